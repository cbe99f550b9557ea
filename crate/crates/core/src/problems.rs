//! Boundary problems `(T, B, E)`, regularity tests, evaluation matrices,
//! Green's operators and the subspace computations behind them.
//!
//! A problem couples a monic differential operator `T` with a space `B`
//! of Stieltjes boundary conditions and an optional exceptional space
//! `E`. When `dim B` exceeds `ord T` the problem is solvable only for
//! forcing functions annihilated by the compatibility conditions; the
//! generalized Green's operator first projects onto the admissible
//! forcing functions along `E`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::constants::{ExpConstant, Rat};
use crate::error::{Error, Result};
use crate::funcalg::{ExpPolynomial, FunctionExpr, Monomial};
use crate::idop::{
    fundamental_right_inverse, BndOp, BoundaryCondition, IdOperator, Kernel,
};
use crate::linalg::KMatrix;

// ---------------------------------------------------------------------
// coordinates

/// Basis functional of the condition coordinate system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CondKey {
    /// `E[point].D^order`
    Local { point: Rat, order: usize },
    /// `E[point].A.(x^k exp(l x))`
    Integral { point: Rat, kernel: Monomial },
}

impl CondKey {
    fn rank(&self) -> (&Rat, u8, usize, Option<&Monomial>) {
        match self {
            CondKey::Local { point, order } => (point, 0, *order, None),
            CondKey::Integral { point, kernel } => (point, 1, 0, Some(kernel)),
        }
    }
}

impl PartialOrd for CondKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CondKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

/// Coordinates of conditions over the shared monomial functionals.
///
/// Fails when a condition carries a kernel outside the monomial basis.
pub fn cond_coordinates(
    conds: &[BoundaryCondition],
) -> Result<(Vec<CondKey>, KMatrix)> {
    let mut keys: BTreeSet<CondKey> = BTreeSet::new();
    for cond in conds {
        for term in cond.terms() {
            keys.insert(cond_key_of(term)?);
        }
    }
    let keys: Vec<CondKey> = keys.into_iter().collect();
    let mut rows = Vec::with_capacity(conds.len());
    for cond in conds {
        let mut row = vec![ExpConstant::zero(); keys.len()];
        for term in cond.terms() {
            let key = cond_key_of(term)?;
            let idx = keys.iter().position(|k| *k == key).unwrap();
            let c = term
                .coeff
                .as_constant()
                .expect("boundary condition coefficients are constants");
            row[idx] = row[idx].add(&c);
        }
        rows.push(row);
    }
    Ok((keys.clone(), KMatrix::new(conds.len(), keys.len(), rows)))
}

fn cond_key_of(term: &crate::idop::BndTerm) -> Result<CondKey> {
    match &term.op {
        BndOp::Deriv(i) => Ok(CondKey::Local {
            point: term.point.clone(),
            order: *i,
        }),
        BndOp::Integral(Kernel::Poly(m)) => Ok(CondKey::Integral {
            point: term.point.clone(),
            kernel: m.clone(),
        }),
        BndOp::Integral(Kernel::Frac(..)) => Err(Error::NoClosedForm(
            "condition kernel is not an exponential polynomial".into(),
        )),
    }
}

/// Coordinates of functions over the monomial basis `x^k exp(l x)`.
pub fn func_coordinates(funcs: &[FunctionExpr]) -> Result<(Vec<Monomial>, KMatrix)> {
    let mut keys: BTreeSet<Monomial> = BTreeSet::new();
    let mut decomposed = Vec::with_capacity(funcs.len());
    for f in funcs {
        let p = f.as_polynomial().ok_or_else(|| {
            Error::NoClosedForm(format!("{} has no monomial coordinates", f))
        })?;
        let monos = p.monomials();
        for (m, _) in &monos {
            keys.insert(m.clone());
        }
        decomposed.push(monos);
    }
    let keys: Vec<Monomial> = keys.into_iter().collect();
    let mut rows = Vec::with_capacity(funcs.len());
    for monos in decomposed {
        let mut row = vec![ExpConstant::zero(); keys.len()];
        for (m, c) in monos {
            let idx = keys.iter().position(|k| *k == m).unwrap();
            row[idx] = c;
        }
        rows.push(row);
    }
    Ok((keys.clone(), KMatrix::new(funcs.len(), keys.len(), rows)))
}

fn cond_from_coords(keys: &[CondKey], row: &[ExpConstant]) -> BoundaryCondition {
    let mut op = IdOperator::zero();
    for (key, c) in keys.iter().zip(row) {
        if c.is_zero() {
            continue;
        }
        let coeff = FunctionExpr::constant(c.clone());
        let term = match key {
            CondKey::Local { point, order } => {
                IdOperator::bnd_local_term(coeff, point.clone(), *order)
            }
            CondKey::Integral { point, kernel } => IdOperator::bnd_int_term(
                coeff,
                point.clone(),
                FunctionExpr::from_poly(ExpPolynomial::monomial(kernel, ExpConstant::one())),
            ),
        };
        op = op.add(&term);
    }
    BoundaryCondition::new(op).expect("monomial functionals are Stieltjes conditions")
}

fn func_from_coords(keys: &[Monomial], row: &[ExpConstant]) -> FunctionExpr {
    let mut p = ExpPolynomial::zero();
    for (key, c) in keys.iter().zip(row) {
        if !c.is_zero() {
            p = p.add(&ExpPolynomial::monomial(key, c.clone()));
        }
    }
    FunctionExpr::from_poly(p)
}

/// Linear combination of boundary conditions.
pub fn combine_conditions(
    coeffs: &[ExpConstant],
    basis: &[BoundaryCondition],
) -> BoundaryCondition {
    let mut acc = IdOperator::zero();
    for (c, cond) in coeffs.iter().zip(basis) {
        if !c.is_zero() {
            acc = acc.add(cond.scale(c).as_operator());
        }
    }
    BoundaryCondition::new(acc).expect("combination of Stieltjes conditions")
}

/// Linear combination of functions.
pub fn combine_functions(coeffs: &[ExpConstant], basis: &[FunctionExpr]) -> FunctionExpr {
    let mut acc = FunctionExpr::zero();
    for (c, f) in coeffs.iter().zip(basis) {
        acc = acc.add(&f.scale(c));
    }
    acc
}

// ---------------------------------------------------------------------
// spaces

/// Finite dimensional space of Stieltjes boundary conditions, stored
/// with a canonical (row reduced) basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CondSpace {
    basis: Vec<BoundaryCondition>,
}

impl CondSpace {
    pub fn empty() -> Self {
        CondSpace { basis: Vec::new() }
    }

    /// Strict constructor: the given conditions must be independent.
    pub fn new(conds: Vec<BoundaryCondition>) -> Result<Self> {
        let space = CondSpace::span(conds.clone())?;
        if space.dim() != conds.len() {
            return Err(Error::InvalidBasis(
                "boundary conditions are linearly dependent".into(),
            ));
        }
        Ok(space)
    }

    /// Canonical basis of the span of the given conditions.
    pub fn span(conds: Vec<BoundaryCondition>) -> Result<Self> {
        if conds.is_empty() {
            return Ok(CondSpace::empty());
        }
        let (keys, m) = cond_coordinates(&conds)?;
        let (r, _) = m.rref_with_transform();
        let mut basis = Vec::new();
        for i in 0..r.rows() {
            if (0..r.cols()).any(|j| !r.get(i, j).is_zero()) {
                basis.push(cond_from_coords(&keys, r.row(i)));
            }
        }
        Ok(CondSpace { basis })
    }

    pub fn basis(&self) -> &[BoundaryCondition] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn sum(&self, other: &CondSpace) -> Result<CondSpace> {
        let mut all = self.basis.clone();
        all.extend(other.basis.clone());
        CondSpace::span(all)
    }

    /// Inclusion test via a joint coordinate system.
    pub fn leq(&self, other: &CondSpace) -> Result<bool> {
        if self.is_empty() {
            return Ok(true);
        }
        if other.is_empty() {
            return Ok(false);
        }
        let mut all = other.basis.clone();
        all.extend(self.basis.clone());
        let (_, m) = cond_coordinates(&all)?;
        let other_rows = KMatrix::from_rows(
            (0..other.basis.len()).map(|i| m.row(i).to_vec()).collect(),
        );
        let joint = KMatrix::from_rows((0..all.len()).map(|i| m.row(i).to_vec()).collect());
        Ok(other_rows.rank() == joint.rank())
    }

    pub fn eq_span(&self, other: &CondSpace) -> Result<bool> {
        Ok(self.leq(other)? && other.leq(self)?)
    }
}

/// Finite dimensional space of functions with a canonical basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FuncSpace {
    basis: Vec<FunctionExpr>,
}

impl FuncSpace {
    pub fn empty() -> Self {
        FuncSpace { basis: Vec::new() }
    }

    pub fn new(funcs: Vec<FunctionExpr>) -> Result<Self> {
        let space = FuncSpace::span(funcs.clone())?;
        if space.dim() != funcs.len() {
            return Err(Error::InvalidBasis(
                "functions are linearly dependent".into(),
            ));
        }
        Ok(space)
    }

    pub fn span(funcs: Vec<FunctionExpr>) -> Result<Self> {
        if funcs.is_empty() {
            return Ok(FuncSpace::empty());
        }
        let (keys, m) = func_coordinates(&funcs)?;
        let (r, _) = m.rref_with_transform();
        let mut basis = Vec::new();
        for i in 0..r.rows() {
            if (0..r.cols()).any(|j| !r.get(i, j).is_zero()) {
                basis.push(func_from_coords(&keys, r.row(i)));
            }
        }
        Ok(FuncSpace { basis })
    }

    pub fn basis(&self) -> &[FunctionExpr] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn sum(&self, other: &FuncSpace) -> Result<FuncSpace> {
        let mut all = self.basis.clone();
        all.extend(other.basis.clone());
        FuncSpace::span(all)
    }

    pub fn leq(&self, other: &FuncSpace) -> Result<bool> {
        if self.is_empty() {
            return Ok(true);
        }
        if other.is_empty() {
            return Ok(false);
        }
        let mut all = other.basis.clone();
        all.extend(self.basis.clone());
        let (_, m) = func_coordinates(&all)?;
        let other_rows = KMatrix::from_rows(
            (0..other.basis.len()).map(|i| m.row(i).to_vec()).collect(),
        );
        let joint = KMatrix::from_rows((0..all.len()).map(|i| m.row(i).to_vec()).collect());
        Ok(other_rows.rank() == joint.rank())
    }

    pub fn eq_span(&self, other: &FuncSpace) -> Result<bool> {
        Ok(self.leq(other)? && other.leq(self)?)
    }
}

// ---------------------------------------------------------------------
// evaluation matrices and the Lemma-style intersections

/// Matrix of conditions applied to functions, `(i, j) = beta_i(u_j)`.
pub fn evaluation_matrix(
    conds: &[BoundaryCondition],
    funcs: &[FunctionExpr],
) -> Result<KMatrix> {
    let mut rows = Vec::with_capacity(conds.len());
    for cond in conds {
        let mut row = Vec::with_capacity(funcs.len());
        for f in funcs {
            row.push(cond.apply(f)?);
        }
        rows.push(row);
    }
    Ok(KMatrix::new(conds.len(), funcs.len(), rows))
}

/// Basis of `U ∩ B^⊥` from the kernel of the evaluation matrix.
pub fn intersect_primal(u: &FuncSpace, b: &CondSpace) -> Result<FuncSpace> {
    if b.is_empty() || u.is_empty() {
        return Ok(u.clone());
    }
    let m = evaluation_matrix(b.basis(), u.basis())?;
    let mut out = Vec::new();
    for k in m.kernel_basis() {
        out.push(combine_functions(&k, u.basis()));
    }
    FuncSpace::span(out)
}

/// Basis of `B ∩ U^⊥` from the kernel of the transposed evaluation
/// matrix.
pub fn intersect_dual(b: &CondSpace, u: &FuncSpace) -> Result<CondSpace> {
    if u.is_empty() || b.is_empty() {
        return Ok(b.clone());
    }
    let m = evaluation_matrix(b.basis(), u.basis())?;
    let mut out = Vec::new();
    for k in m.transpose().kernel_basis() {
        out.push(combine_conditions(&k, b.basis()));
    }
    CondSpace::span(out)
}

// ---------------------------------------------------------------------
// fundamental systems for constant coefficients

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let q = &n / &d;
            if q != d {
                out.push(q);
            }
        }
        d += 1;
    }
    out
}

/// Rational roots with multiplicities; `None` when the polynomial does
/// not split over the rationals.
fn rational_roots(coeffs: &[Rat]) -> Option<Vec<(Rat, usize)>> {
    // clear denominators
    let lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut poly: Vec<BigInt> = coeffs
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let mut roots: Vec<(Rat, usize)> = Vec::new();
    let add_root = |r: Rat, roots: &mut Vec<(Rat, usize)>| {
        if let Some(slot) = roots.iter_mut().find(|(s, _)| *s == r) {
            slot.1 += 1;
        } else {
            roots.push((r, 1));
        }
    };
    while poly.len() > 1 {
        while matches!(poly.last(), Some(c) if c.is_zero()) {
            poly.pop();
        }
        if poly.len() <= 1 {
            break;
        }
        if poly[0].is_zero() {
            add_root(Rat::zero(), &mut roots);
            poly.remove(0);
            continue;
        }
        let lead = poly.last().unwrap().clone();
        let mut found = None;
        'search: for p in divisors(&poly[0]) {
            for q in divisors(&lead) {
                for sign in [1i64, -1] {
                    let cand = Rat::new(&p * BigInt::from(sign), q.clone());
                    let mut val = Rat::zero();
                    for c in poly.iter().rev() {
                        val = val * &cand + Rat::from_integer(c.clone());
                    }
                    if val.is_zero() {
                        found = Some(cand);
                        break 'search;
                    }
                }
            }
        }
        let root = found?;
        add_root(root.clone(), &mut roots);
        // synthetic division by (x - root), done over the rationals
        let rational: Vec<Rat> = poly.iter().map(|c| Rat::from_integer(c.clone())).collect();
        let mut quotient = vec![Rat::zero(); rational.len() - 1];
        let mut carry = Rat::zero();
        for i in (0..rational.len() - 1).rev() {
            carry = &rational[i + 1] + &carry * &root;
            quotient[i] = carry.clone();
        }
        let lcm_q = quotient
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        poly = quotient
            .iter()
            .map(|c| c.numer() * (&lcm_q / c.denom()))
            .collect();
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    Some(roots)
}

/// Fundamental system of a monic constant-coefficient operator whose
/// characteristic polynomial splits over the rationals: the root `l`
/// with multiplicity `k` contributes `x^j exp(l x)` for `j < k`.
pub fn auto_fundamental_system(t: &IdOperator) -> Result<Vec<FunctionExpr>> {
    if !t.is_monic_diff() {
        return Err(Error::MissingFundamentalSystem(
            "operator is not a monic differential operator".into(),
        ));
    }
    let n = t.order().unwrap();
    let mut coeffs = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let c = t
            .diff_coeff(i)
            .as_constant()
            .and_then(|c| c.as_rational())
            .ok_or_else(|| {
                Error::MissingFundamentalSystem(
                    "operator has non-constant coefficients; supply a fundamental system"
                        .into(),
                )
            })?;
        coeffs.push(c);
    }
    let roots = rational_roots(&coeffs).ok_or_else(|| {
        Error::MissingFundamentalSystem(
            "characteristic polynomial has no rational splitting; supply a fundamental system"
                .into(),
        )
    })?;
    let mut out = Vec::with_capacity(n);
    for (root, mult) in roots {
        for j in 0..mult {
            out.push(FunctionExpr::from_poly(ExpPolynomial::monomial(
                &Monomial::new(root.clone(), j),
                ExpConstant::one(),
            )));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// boundary problems

/// A boundary problem `(T, B, E)` with an optional stored fundamental
/// system for `T`.
#[derive(Debug, Clone)]
pub struct BoundaryProblem {
    t: IdOperator,
    conds: CondSpace,
    exc: FuncSpace,
    fundsys: Option<Vec<FunctionExpr>>,
}

impl BoundaryProblem {
    pub fn new(t: IdOperator, conds: CondSpace, exc: FuncSpace) -> Result<Self> {
        if !t.is_monic_diff() {
            return Err(Error::OrderMismatch(
                "problem operator must be a monic differential operator".into(),
            ));
        }
        Ok(BoundaryProblem {
            t,
            conds,
            exc,
            fundsys: None,
        })
    }

    pub fn with_fundsys(
        t: IdOperator,
        conds: CondSpace,
        exc: FuncSpace,
        fundsys: Vec<FunctionExpr>,
    ) -> Result<Self> {
        let mut p = BoundaryProblem::new(t, conds, exc)?;
        let n = p.order();
        if fundsys.len() != n {
            return Err(Error::ArityMismatch {
                expected: n,
                got: fundsys.len(),
            });
        }
        let w = crate::idop::wronskian_matrix(&fundsys);
        if crate::idop::fn_determinant(&w).is_zero() {
            return Err(Error::SingularWronskian);
        }
        p.fundsys = Some(fundsys);
        Ok(p)
    }

    pub fn operator(&self) -> &IdOperator {
        &self.t
    }

    pub fn conds(&self) -> &CondSpace {
        &self.conds
    }

    pub fn exc(&self) -> &FuncSpace {
        &self.exc
    }

    pub fn order(&self) -> usize {
        self.t.order().unwrap_or(0)
    }

    pub fn stored_fundsys(&self) -> Option<&[FunctionExpr]> {
        self.fundsys.as_deref()
    }

    /// The stored fundamental system, or one computed from rational
    /// roots of the characteristic polynomial.
    pub fn fundamental_system(&self) -> Result<Vec<FunctionExpr>> {
        match &self.fundsys {
            Some(fs) => Ok(fs.clone()),
            None => auto_fundamental_system(&self.t),
        }
    }

    /// Uniqueness of solutions: the evaluation matrix has full column
    /// rank.
    pub fn is_semi_regular(&self) -> Result<bool> {
        let u = self.fundamental_system()?;
        let m = evaluation_matrix(self.conds.basis(), &u)?;
        Ok(m.rank() == self.order())
    }

    /// Full regularity of the triple.
    pub fn is_regular(&self) -> Result<bool> {
        let u = self.fundamental_system()?;
        if self.exc.is_empty() {
            if self.conds.dim() != self.order() {
                return Ok(false);
            }
            let m = evaluation_matrix(self.conds.basis(), &u)?;
            return Ok(m.is_invertible());
        }
        if !self.is_semi_regular()? {
            return Ok(false);
        }
        let c = self.compatibility_conditions()?;
        if c.dim() != self.exc.dim() {
            return Ok(false);
        }
        let g = evaluation_matrix(c.basis(), self.exc.basis())?;
        Ok(g.is_invertible())
    }

    /// Compatibility conditions of `(T, B)`: the conditions annihilating
    /// exactly the admissible forcing functions.
    pub fn compatibility_conditions(&self) -> Result<CondSpace> {
        let u = self.fundamental_system()?;
        compatibility_conditions(&self.t, &self.conds, &u)
    }

    /// Green's operator of a regular problem without exceptional space.
    pub fn greens_operator_regular(&self) -> Result<IdOperator> {
        if !self.exc.is_empty() {
            return Err(Error::NotRegular(
                "exceptional space present; use the generalized construction".into(),
            ));
        }
        self.greens_operator()
    }

    /// The (generalized) Green's operator `(1 - sum u_i bhat_i) T* Q`.
    ///
    /// `Q` projects onto the admissible forcing functions along `E`, a
    /// deterministic left inverse of the evaluation matrix picks the
    /// projector onto `Ker T` along `B^⊥`.
    pub fn greens_operator(&self) -> Result<IdOperator> {
        if !self.is_regular()? {
            return Err(Error::NotRegular(format!("{}", self)));
        }
        let u = self.fundamental_system()?;
        let beta = self.conds.basis();
        let m = evaluation_matrix(beta, &u)?;
        let l = m.left_inverse().map_err(|_| {
            Error::NotRegular("evaluation matrix is rank deficient".into())
        })?;
        let t_star = fundamental_right_inverse(&self.t, &u)?;

        // projector onto admissible forcing functions along E
        let q = if self.exc.is_empty() {
            IdOperator::one()
        } else {
            let gamma = self.compatibility_conditions()?;
            let ge = evaluation_matrix(gamma.basis(), self.exc.basis())?;
            let ge_inv = ge.left_inverse().map_err(|_| {
                Error::NotRegular("exceptional space evaluation matrix is singular".into())
            })?;
            let mut q = IdOperator::one();
            for (j, e) in self.exc.basis().iter().enumerate() {
                let gamma_tilde = combine_conditions(ge_inv.row(j), gamma.basis());
                let term = IdOperator::from_fn(e.clone())
                    .multiply(gamma_tilde.as_operator())?;
                q = q.sub(&term);
            }
            q
        };

        let h = t_star.multiply(&q)?;
        let mut g = h.clone();
        for (i, ui) in u.iter().enumerate() {
            let beta_hat = combine_conditions(l.row(i), beta);
            let term = IdOperator::from_fn(ui.clone())
                .multiply(&beta_hat.as_operator().multiply(&h)?)?;
            g = g.sub(&term);
        }
        Ok(g)
    }
}

/// Compatibility conditions `C = (B ∩ (Ker T)^⊥) . T*` for a
/// semi-regular pair, with the given fundamental system.
pub fn compatibility_conditions(
    t: &IdOperator,
    conds: &CondSpace,
    fundsys: &[FunctionExpr],
) -> Result<CondSpace> {
    let m = evaluation_matrix(conds.basis(), fundsys)?;
    if m.rank() != fundsys.len() {
        return Err(Error::NotSemiRegular);
    }
    let t_star = fundamental_right_inverse(t, fundsys)?;
    let mut out = Vec::new();
    for kappa in m.transpose().kernel_basis() {
        let cond = combine_conditions(&kappa, conds.basis());
        out.push(cond.compose(&t_star)?);
    }
    CondSpace::span(out)
}

// ---------------------------------------------------------------------
// rendering

impl fmt::Display for CondSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BC(")?;
        for (i, c) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for FuncSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ES(")?;
        for (i, c) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BoundaryProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exc.is_empty() {
            write!(f, "BP({}, {})", self.t, self.conds)
        } else {
            write!(f, "GBP({}, {}, {})", self.t, self.conds, self.exc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{rat, rat_int};

    fn d() -> IdOperator {
        IdOperator::deriv()
    }

    fn e(c: i64) -> IdOperator {
        IdOperator::eval_point(rat_int(c))
    }

    fn bc(op: IdOperator) -> BoundaryCondition {
        BoundaryCondition::new(op).unwrap()
    }

    fn e1() -> BoundaryCondition {
        bc(e(1))
    }

    fn e1d() -> BoundaryCondition {
        bc(e(1).multiply(&d()).unwrap())
    }

    fn e0d() -> BoundaryCondition {
        bc(e(0).multiply(&d()).unwrap())
    }

    fn x_fn() -> FunctionExpr {
        FunctionExpr::var()
    }

    fn d2_problem() -> BoundaryProblem {
        BoundaryProblem::new(
            d().pow(2).unwrap(),
            CondSpace::new(vec![e1(), e1d(), e0d()]).unwrap(),
            FuncSpace::empty(),
        )
        .unwrap()
    }

    #[test]
    fn coordinates_of_local_conditions() {
        let (keys, m) = cond_coordinates(&[e1(), e0d()]).unwrap();
        assert_eq!(keys.len(), 2);
        // point-major order puts E[0].D first
        assert_eq!(
            keys[0],
            CondKey::Local {
                point: rat_int(0),
                order: 1
            }
        );
        assert_eq!(m.get(0, 1), &ExpConstant::one());
        assert_eq!(m.get(1, 0), &ExpConstant::one());
    }

    #[test]
    fn coordinates_of_difference_condition() {
        let diff = bc(e(1)
            .multiply(&d())
            .unwrap()
            .sub(&e(0).multiply(&d()).unwrap()));
        let (keys, m) = cond_coordinates(&[diff]).unwrap();
        assert_eq!(keys.len(), 2);
        assert_eq!(m.get(0, 0), &ExpConstant::from_int(-1));
        assert_eq!(m.get(0, 1), &ExpConstant::one());
    }

    #[test]
    fn coordinates_of_integral_condition() {
        // E[1].A.exp(-x) + E[1].A.exp(x) spans one coordinate vector over
        // the two integral monomials
        let a = IdOperator::integral();
        let cond = bc(e(1)
            .multiply(&a)
            .unwrap()
            .multiply(&IdOperator::from_fn(FunctionExpr::exp(rat_int(-1))))
            .unwrap()
            .add(
                &e(1)
                    .multiply(&a)
                    .unwrap()
                    .multiply(&IdOperator::from_fn(FunctionExpr::exp(rat_int(1))))
                    .unwrap(),
            ));
        let (keys, m) = cond_coordinates(&[cond]).unwrap();
        assert_eq!(keys.len(), 2);
        assert!(matches!(&keys[0], CondKey::Integral { kernel, .. } if kernel.freq == rat_int(-1)));
        assert_eq!(m.get(0, 0), &ExpConstant::one());
        assert_eq!(m.get(0, 1), &ExpConstant::one());
    }

    #[test]
    fn evaluation_matrix_for_d2() {
        let m = evaluation_matrix(
            &[e1(), e1d(), e0d()],
            &[FunctionExpr::one(), x_fn()],
        )
        .unwrap();
        let one = ExpConstant::one();
        let zero = ExpConstant::zero();
        assert_eq!(m.row(0), &[one.clone(), one.clone()]);
        assert_eq!(m.row(1), &[zero.clone(), one.clone()]);
        assert_eq!(m.row(2), &[zero, one]);
    }

    #[test]
    fn single_integral_condition_matrix() {
        let cond = bc(e(1).multiply(&IdOperator::integral()).unwrap());
        let m = evaluation_matrix(&[cond], &[FunctionExpr::one()]).unwrap();
        assert_eq!(m.get(0, 0), &ExpConstant::one());
    }

    #[test]
    fn dependent_conditions_rejected() {
        let err = CondSpace::new(vec![bc(e(0)), bc(e(0)), bc(e(1))]).unwrap_err();
        assert!(matches!(err, Error::InvalidBasis(_)));
    }

    #[test]
    fn auto_fundsys_for_d2() {
        let fs = auto_fundamental_system(&d().pow(2).unwrap()).unwrap();
        assert_eq!(fs, vec![FunctionExpr::one(), x_fn()]);
    }

    #[test]
    fn auto_fundsys_for_d2_minus_one() {
        let t = d().pow(2).unwrap().sub(&IdOperator::one());
        let fs = auto_fundamental_system(&t).unwrap();
        assert_eq!(
            fs,
            vec![FunctionExpr::exp(rat_int(-1)), FunctionExpr::exp(rat_int(1))]
        );
    }

    #[test]
    fn auto_fundsys_fourth_order() {
        let t = d().pow(4).unwrap().sub(&d().pow(2).unwrap());
        let fs = auto_fundamental_system(&t).unwrap();
        assert_eq!(fs.len(), 4);
        assert_eq!(fs[1], FunctionExpr::one());
        assert_eq!(fs[2], x_fn());
    }

    #[test]
    fn auto_fundsys_irrational_roots_fails() {
        // z^2 - 2 has no rational roots
        let t = d()
            .pow(2)
            .unwrap()
            .sub(&IdOperator::from_fn(FunctionExpr::constant(
                ExpConstant::from_int(2),
            )));
        assert!(matches!(
            auto_fundamental_system(&t),
            Err(Error::MissingFundamentalSystem(_))
        ));
    }

    #[test]
    fn semi_regularity() {
        assert!(d2_problem().is_semi_regular().unwrap());
        let bad = BoundaryProblem::new(
            d().pow(2).unwrap(),
            CondSpace::new(vec![e0d(), e1d()]).unwrap(),
            FuncSpace::empty(),
        )
        .unwrap();
        assert!(!bad.is_semi_regular().unwrap());
    }

    #[test]
    fn regular_first_order_problem() {
        let p = BoundaryProblem::new(
            d(),
            CondSpace::new(vec![bc(e(0))]).unwrap(),
            FuncSpace::empty(),
        )
        .unwrap();
        assert!(p.is_regular().unwrap());
        assert_eq!(p.greens_operator().unwrap(), IdOperator::integral());
        assert!(p.compatibility_conditions().unwrap().is_empty());
    }

    #[test]
    fn compatibility_of_overdetermined_d2() {
        let c = d2_problem().compatibility_conditions().unwrap();
        assert_eq!(c.dim(), 1);
        let expected = bc(e(1).multiply(&IdOperator::integral()).unwrap());
        assert_eq!(c.basis()[0], expected);
        assert_eq!(c.to_string(), "BC(E[1].A)");
    }

    #[test]
    fn greens_operator_of_generalized_d2() {
        let p = BoundaryProblem::new(
            d().pow(2).unwrap(),
            CondSpace::new(vec![e1(), e1d(), e0d()]).unwrap(),
            FuncSpace::new(vec![FunctionExpr::one()]).unwrap(),
        )
        .unwrap();
        assert!(p.is_regular().unwrap());
        let g = p.greens_operator().unwrap();
        assert_eq!(
            g.to_string(),
            "x.A - A.x + (-1/2*x^2 - 1/2).E[1].A + E[1].A.x"
        );
        // operator identities of the construction
        let t = p.operator();
        let tg = t.multiply(&g).unwrap();
        let gtg = g.multiply(&tg).unwrap();
        assert_eq!(gtg, g);
        for cond in p.conds().basis() {
            assert!(cond.as_operator().multiply(&g).unwrap().is_zero());
        }
        assert!(g.apply(&FunctionExpr::one()).unwrap().is_zero());
    }

    #[test]
    fn regular_greens_operator_second_order() {
        let p = BoundaryProblem::new(
            d().pow(2).unwrap(),
            CondSpace::new(vec![bc(e(0)), e0d()]).unwrap(),
            FuncSpace::empty(),
        )
        .unwrap();
        let g = p.greens_operator_regular().unwrap();
        let a2 = IdOperator::integral()
            .multiply(&IdOperator::integral())
            .unwrap();
        assert_eq!(g, a2);
        assert_eq!(p.operator().multiply(&g).unwrap(), IdOperator::one());
    }

    #[test]
    fn greens_operator_with_e1_condition() {
        let p = BoundaryProblem::new(
            d().pow(2).unwrap(),
            CondSpace::new(vec![e0d(), e1()]).unwrap(),
            FuncSpace::empty(),
        )
        .unwrap();
        let g = p.greens_operator_regular().unwrap();
        assert_eq!(p.operator().multiply(&g).unwrap(), IdOperator::one());
        for cond in p.conds().basis() {
            assert!(cond.as_operator().multiply(&g).unwrap().is_zero());
        }
    }

    #[test]
    fn regularity_of_triple_with_x() {
        let t = d().pow(2).unwrap().sub(&IdOperator::one());
        let p = BoundaryProblem::new(
            t,
            CondSpace::new(vec![e1(), e1d(), e0d()]).unwrap(),
            FuncSpace::new(vec![x_fn()]).unwrap(),
        )
        .unwrap();
        assert!(p.is_regular().unwrap());
    }

    #[test]
    fn intersect_primal_kills_conditions() {
        let u = FuncSpace::new(vec![FunctionExpr::one(), x_fn()]).unwrap();
        let b = CondSpace::new(vec![bc(e(0))]).unwrap();
        let got = intersect_primal(&u, &b).unwrap();
        assert_eq!(got.dim(), 1);
        assert_eq!(got.basis()[0], x_fn());
        // annihilation check
        for cond in b.basis() {
            for f in got.basis() {
                assert!(cond.apply(f).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn intersect_primal_empty_result() {
        let u = FuncSpace::new(vec![x_fn()]).unwrap();
        let b = CondSpace::new(vec![e1(), e1d(), e0d()]).unwrap();
        assert!(intersect_primal(&u, &b).unwrap().is_empty());
    }

    #[test]
    fn intersect_primal_no_conditions() {
        let u = FuncSpace::new(vec![FunctionExpr::one(), x_fn()]).unwrap();
        let got = intersect_primal(&u, &CondSpace::empty()).unwrap();
        assert!(got.eq_span(&u).unwrap());
    }

    #[test]
    fn intersect_dual_with_empty_function_space() {
        let b = CondSpace::new(vec![e1(), e1d(), e0d()]).unwrap();
        let got = intersect_dual(&b, &FuncSpace::empty()).unwrap();
        assert!(got.eq_span(&b).unwrap());
    }

    #[test]
    fn intersect_dual_with_constants() {
        let b = CondSpace::new(vec![e1(), e1d(), e0d()]).unwrap();
        let u = FuncSpace::new(vec![FunctionExpr::one()]).unwrap();
        let got = intersect_dual(&b, &u).unwrap();
        let expected = CondSpace::new(vec![e1d(), e0d()]).unwrap();
        assert!(got.eq_span(&expected).unwrap());
        // annihilation check
        for cond in got.basis() {
            assert!(cond.apply(&FunctionExpr::one()).unwrap().is_zero());
        }
    }

    #[test]
    fn intersect_dual_empty_result() {
        let b = CondSpace::new(vec![bc(e(0))]).unwrap();
        let u = FuncSpace::new(vec![FunctionExpr::one()]).unwrap();
        assert!(intersect_dual(&b, &u).unwrap().is_empty());
    }

    #[test]
    fn space_sum_and_leq() {
        let s1 = CondSpace::new(vec![e1()]).unwrap();
        assert_eq!(s1.sum(&s1).unwrap().dim(), 1);
        let diff = CondSpace::new(vec![bc(e(1)
            .multiply(&d())
            .unwrap()
            .sub(&e(0).multiply(&d()).unwrap()))])
        .unwrap();
        let full = CondSpace::new(vec![e1d(), e0d()]).unwrap();
        assert!(diff.leq(&full).unwrap());
        assert!(!full.leq(&diff).unwrap());
    }

    #[test]
    fn half_point_conditions() {
        let ehalf = bc(IdOperator::eval_point(rat(1, 2)));
        let p = BoundaryProblem::new(
            d(),
            CondSpace::new(vec![ehalf]).unwrap(),
            FuncSpace::empty(),
        )
        .unwrap();
        assert!(p.is_regular().unwrap());
        let g = p.greens_operator().unwrap();
        assert_eq!(p.operator().multiply(&g).unwrap(), IdOperator::one());
    }
}
