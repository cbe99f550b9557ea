//! The ring of integro-differential operators.
//!
//! Operators are kept in a normal form that splits into a differential
//! part (terms `f.D^i`), an integral part (terms `f.A.g`) and a boundary
//! part (terms `f.E[c].D^i` and `f.E[c].A.h`). Multiplication rewrites
//! products of parts back into this direct sum; the decomposition makes
//! the zero test (and hence operator equality) decidable.
//!
//! Integral kernels are expanded over the monomial basis `x^k*exp(l*x)`.
//! Kernels that are proper fractions are put over a common denominator
//! per operator, so that linearly dependent kernel terms still cancel.

use std::fmt;

use num_traits::Zero;

use crate::constants::{ExpConstant, Rat};
use crate::error::{Error, Result};
use crate::funcalg::{ExpPolynomial, FunctionExpr, Monomial};

/// Right factor of an integral term, over the canonical basis.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    /// `x^k * exp(l*x)`
    Poly(Monomial),
    /// `x^k * exp(l*x) / den`, where `den` is the operator-wide common
    /// denominator of all fractional kernels
    Frac(Monomial, ExpPolynomial),
}

impl Kernel {
    pub fn to_fn(&self) -> FunctionExpr {
        match self {
            Kernel::Poly(m) => {
                FunctionExpr::from_poly(ExpPolynomial::monomial(m, ExpConstant::one()))
            }
            Kernel::Frac(m, den) => FunctionExpr::ratio(
                ExpPolynomial::monomial(m, ExpConstant::one()),
                den.clone(),
            )
            .expect("nonzero kernel denominator"),
        }
    }

    fn sort_key(&self) -> (u8, Monomial, String) {
        match self {
            Kernel::Poly(m) => (0, m.clone(), String::new()),
            Kernel::Frac(m, den) => (1, m.clone(), den.to_string()),
        }
    }
}

/// Action following the evaluation in a boundary term.
#[derive(Debug, Clone, PartialEq)]
pub enum BndOp {
    /// `E[c].D^i`
    Deriv(usize),
    /// `E[c].A.h`
    Integral(Kernel),
}

impl BndOp {
    fn sort_key(&self) -> (u8, usize, Monomial, String) {
        match self {
            BndOp::Deriv(i) => (0, *i, Monomial::new(Rat::zero(), 0), String::new()),
            BndOp::Integral(k) => {
                let (tag, m, s) = k.sort_key();
                (1, tag as usize, m, s)
            }
        }
    }
}

/// One boundary term `coeff.E[point].<op>`.
#[derive(Debug, Clone, PartialEq)]
pub struct BndTerm {
    pub coeff: FunctionExpr,
    pub point: Rat,
    pub op: BndOp,
}

/// Unnormalized summand used while assembling operators.
#[derive(Debug, Clone)]
enum RawTerm {
    Diff(FunctionExpr, usize),
    Int(FunctionExpr, FunctionExpr),
    BndLocal(FunctionExpr, Rat, usize),
    BndInt(FunctionExpr, Rat, FunctionExpr),
}

/// An integro-differential operator in normal form.
#[derive(Debug, Clone, Default)]
pub struct IdOperator {
    diff: Vec<(usize, FunctionExpr)>,
    int: Vec<(Kernel, FunctionExpr)>,
    bnd: Vec<BndTerm>,
}

impl IdOperator {
    pub fn zero() -> Self {
        IdOperator::default()
    }

    /// The identity operator.
    pub fn one() -> Self {
        IdOperator::from_fn(FunctionExpr::one())
    }

    /// The derivation `D`.
    pub fn deriv() -> Self {
        IdOperator::from_raw(vec![RawTerm::Diff(FunctionExpr::one(), 1)])
    }

    /// The integral `A` from `0`.
    pub fn integral() -> Self {
        IdOperator::from_raw(vec![RawTerm::Int(
            FunctionExpr::one(),
            FunctionExpr::one(),
        )])
    }

    /// The evaluation `E[c]`.
    pub fn eval_point(c: Rat) -> Self {
        IdOperator::from_raw(vec![RawTerm::BndLocal(FunctionExpr::one(), c, 0)])
    }

    /// Multiplication operator by a coefficient function.
    pub fn from_fn(f: FunctionExpr) -> Self {
        IdOperator::from_raw(vec![RawTerm::Diff(f, 0)])
    }

    /// The term `f.D^order`.
    pub fn diff_term(f: FunctionExpr, order: usize) -> Self {
        IdOperator::from_raw(vec![RawTerm::Diff(f, order)])
    }

    /// The term `left.A.kernel`.
    pub fn int_term(left: FunctionExpr, kernel: FunctionExpr) -> Self {
        IdOperator::from_raw(vec![RawTerm::Int(left, kernel)])
    }

    /// The term `coeff.E[point].D^order`.
    pub fn bnd_local_term(coeff: FunctionExpr, point: Rat, order: usize) -> Self {
        IdOperator::from_raw(vec![RawTerm::BndLocal(coeff, point, order)])
    }

    /// The term `coeff.E[point].A.kernel`.
    pub fn bnd_int_term(coeff: FunctionExpr, point: Rat, kernel: FunctionExpr) -> Self {
        IdOperator::from_raw(vec![RawTerm::BndInt(coeff, point, kernel)])
    }

    fn to_raw(&self) -> Vec<RawTerm> {
        let mut out = Vec::new();
        for (i, f) in &self.diff {
            out.push(RawTerm::Diff(f.clone(), *i));
        }
        for (k, f) in &self.int {
            out.push(RawTerm::Int(f.clone(), k.to_fn()));
        }
        for t in &self.bnd {
            out.push(match &t.op {
                BndOp::Deriv(i) => RawTerm::BndLocal(t.coeff.clone(), t.point.clone(), *i),
                BndOp::Integral(k) => {
                    RawTerm::BndInt(t.coeff.clone(), t.point.clone(), k.to_fn())
                }
            });
        }
        out
    }

    fn from_raw(terms: Vec<RawTerm>) -> Self {
        // common denominator of all fractional kernels in this operator
        let mut common_den = ExpPolynomial::one();
        for t in &terms {
            let kernel = match t {
                RawTerm::Int(_, g) => Some(g),
                RawTerm::BndInt(_, _, g) => Some(g),
                _ => None,
            };
            if let Some(g) = kernel {
                if g.as_polynomial().is_none() {
                    let d = g.denominator();
                    if d.exact_div(&common_den).is_some() {
                        common_den = d.clone();
                    } else if common_den.exact_div(d).is_none() {
                        common_den = common_den.mul(d);
                    }
                }
            }
        }

        let mut diff: Vec<(usize, FunctionExpr)> = Vec::new();
        let mut int: Vec<(Kernel, FunctionExpr)> = Vec::new();
        let mut bnd: Vec<BndTerm> = Vec::new();

        let mut add_diff = |order: usize, f: FunctionExpr| {
            if let Some(slot) = diff.iter_mut().find(|(i, _)| *i == order) {
                slot.1 = slot.1.add(&f);
            } else {
                diff.push((order, f));
            }
        };

        // splits a kernel into canonical (kernel, scaled coefficient) pairs
        let split_kernel = |left: &FunctionExpr,
                            g: &FunctionExpr|
         -> Vec<(Kernel, FunctionExpr)> {
            let mut out = Vec::new();
            match g.as_polynomial() {
                Some(p) => {
                    for (m, c) in p.monomials() {
                        out.push((Kernel::Poly(m), left.scale(&c)));
                    }
                }
                None => {
                    let factor = common_den
                        .exact_div(g.denominator())
                        .expect("kernel denominator divides the common denominator");
                    let numerator = g.numerator().mul(&factor);
                    for (m, c) in numerator.monomials() {
                        let mono = ExpPolynomial::monomial(&m, ExpConstant::one());
                        match mono.exact_div(&common_den) {
                            Some(q) => {
                                // the monomial absorbs the denominator
                                for (m2, c2) in q.monomials() {
                                    out.push((
                                        Kernel::Poly(m2),
                                        left.scale(&c).scale(&c2),
                                    ));
                                }
                            }
                            None => out.push((
                                Kernel::Frac(m, common_den.clone()),
                                left.scale(&c),
                            )),
                        }
                    }
                }
            }
            out
        };

        let mut add_int = |kernel: Kernel, f: FunctionExpr| {
            if let Some(slot) = int.iter_mut().find(|(k, _)| *k == kernel) {
                slot.1 = slot.1.add(&f);
            } else {
                int.push((kernel, f));
            }
        };

        let mut add_bnd = |point: Rat, op: BndOp, f: FunctionExpr| {
            if let Some(slot) = bnd
                .iter_mut()
                .find(|t| t.point == point && t.op == op)
            {
                slot.coeff = slot.coeff.add(&f);
            } else {
                bnd.push(BndTerm {
                    coeff: f,
                    point,
                    op,
                });
            }
        };

        for t in terms {
            match t {
                RawTerm::Diff(f, i) => {
                    if !f.is_zero() {
                        add_diff(i, f);
                    }
                }
                RawTerm::Int(f, g) => {
                    if f.is_zero() || g.is_zero() {
                        continue;
                    }
                    for (kernel, coeff) in split_kernel(&f, &g) {
                        add_int(kernel, coeff);
                    }
                }
                RawTerm::BndLocal(f, c, i) => {
                    if !f.is_zero() {
                        add_bnd(c, BndOp::Deriv(i), f);
                    }
                }
                RawTerm::BndInt(f, c, g) => {
                    // an integral evaluated at the base point is zero
                    if f.is_zero() || g.is_zero() || c.is_zero() {
                        continue;
                    }
                    for (kernel, coeff) in split_kernel(&f, &g) {
                        add_bnd(c.clone(), BndOp::Integral(kernel), coeff);
                    }
                }
            }
        }

        diff.retain(|(_, f)| !f.is_zero());
        int.retain(|(_, f)| !f.is_zero());
        bnd.retain(|t| !t.coeff.is_zero());
        diff.sort_by_key(|(i, _)| *i);
        int.sort_by(|a, b| a.0.sort_key().cmp(&b.0.sort_key()));
        bnd.sort_by(|a, b| {
            (a.point.clone(), a.op.sort_key()).cmp(&(b.point.clone(), b.op.sort_key()))
        });
        IdOperator { diff, int, bnd }
    }

    pub fn is_zero(&self) -> bool {
        self.diff.is_empty() && self.int.is_empty() && self.bnd.is_empty()
    }

    pub fn diff_part(&self) -> &[(usize, FunctionExpr)] {
        &self.diff
    }

    pub fn int_part(&self) -> &[(Kernel, FunctionExpr)] {
        &self.int
    }

    pub fn bnd_part(&self) -> &[BndTerm] {
        &self.bnd
    }

    pub fn diff_coeff(&self, order: usize) -> FunctionExpr {
        self.diff
            .iter()
            .find(|(i, _)| *i == order)
            .map(|(_, f)| f.clone())
            .unwrap_or_else(FunctionExpr::zero)
    }

    /// Order of the differential part, if any.
    pub fn order(&self) -> Option<usize> {
        self.diff.iter().map(|(i, _)| *i).max()
    }

    pub fn is_diff_only(&self) -> bool {
        self.int.is_empty() && self.bnd.is_empty()
    }

    /// Monic differential operator of positive order.
    pub fn is_monic_diff(&self) -> bool {
        self.is_diff_only()
            && match self.order() {
                Some(n) if n >= 1 => self.diff_coeff(n).is_one(),
                _ => false,
            }
    }

    pub fn add(&self, other: &IdOperator) -> IdOperator {
        let mut raw = self.to_raw();
        raw.extend(other.to_raw());
        IdOperator::from_raw(raw)
    }

    pub fn neg(&self) -> IdOperator {
        let raw = self
            .to_raw()
            .into_iter()
            .map(|t| match t {
                RawTerm::Diff(f, i) => RawTerm::Diff(f.neg(), i),
                RawTerm::Int(f, g) => RawTerm::Int(f.neg(), g),
                RawTerm::BndLocal(f, c, i) => RawTerm::BndLocal(f.neg(), c, i),
                RawTerm::BndInt(f, c, g) => RawTerm::BndInt(f.neg(), c, g),
            })
            .collect();
        IdOperator::from_raw(raw)
    }

    pub fn sub(&self, other: &IdOperator) -> IdOperator {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &ExpConstant) -> IdOperator {
        self.scale_fn(&FunctionExpr::constant(c.clone()))
    }

    pub fn scale_fn(&self, f: &FunctionExpr) -> IdOperator {
        IdOperator::from_raw(scale_raw(f, self.to_raw()))
    }

    /// Normal form of the composition `self . other`.
    pub fn multiply(&self, other: &IdOperator) -> Result<IdOperator> {
        let rhs = other.to_raw();
        let mut acc: Vec<RawTerm> = Vec::new();
        for term in self.to_raw() {
            match term {
                RawTerm::Diff(f, i) => {
                    let mut t = rhs.clone();
                    for _ in 0..i {
                        t = deriv_times(&t);
                    }
                    acc.extend(scale_raw(&f, t));
                }
                RawTerm::Int(f, g) => {
                    let t = integral_times(&scale_raw(&g, rhs.clone()))?;
                    acc.extend(scale_raw(&f, t));
                }
                RawTerm::BndLocal(f, c, i) => {
                    let mut t = rhs.clone();
                    for _ in 0..i {
                        t = deriv_times(&t);
                    }
                    let t = eval_times(&c, &t)?;
                    acc.extend(scale_raw(&f, t));
                }
                RawTerm::BndInt(f, c, g) => {
                    let t = integral_times(&scale_raw(&g, rhs.clone()))?;
                    let t = eval_times(&c, &t)?;
                    acc.extend(scale_raw(&f, t));
                }
            }
        }
        Ok(IdOperator::from_raw(acc))
    }

    pub fn pow(&self, n: u32) -> Result<IdOperator> {
        let mut out = IdOperator::one();
        for _ in 0..n {
            out = out.multiply(self)?;
        }
        Ok(out)
    }

    /// Apply the operator to a function.
    pub fn apply(&self, f: &FunctionExpr) -> Result<FunctionExpr> {
        let mut out = FunctionExpr::zero();
        for (i, coeff) in &self.diff {
            out = out.add(&coeff.mul(&f.derivative_n(*i)));
        }
        for (kernel, left) in &self.int {
            let inner = kernel.to_fn().mul(f).integrate()?;
            out = out.add(&left.mul(&inner));
        }
        for t in &self.bnd {
            let value = match &t.op {
                BndOp::Deriv(i) => f.derivative_n(*i).evaluate(&t.point)?,
                BndOp::Integral(kernel) => {
                    let anti = kernel.to_fn().mul(f).integrate()?;
                    anti.evaluate(&t.point)?
                }
            };
            out = out.add(&t.coeff.scale(&value));
        }
        Ok(out)
    }
}

impl PartialEq for IdOperator {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

fn scale_raw(f: &FunctionExpr, terms: Vec<RawTerm>) -> Vec<RawTerm> {
    terms
        .into_iter()
        .map(|t| match t {
            RawTerm::Diff(g, j) => RawTerm::Diff(f.mul(&g), j),
            RawTerm::Int(g, k) => RawTerm::Int(f.mul(&g), k),
            RawTerm::BndLocal(g, c, j) => RawTerm::BndLocal(f.mul(&g), c, j),
            RawTerm::BndInt(g, c, k) => RawTerm::BndInt(f.mul(&g), c, k),
        })
        .collect()
}

/// Left multiplication by `D` (Leibniz rule, `D.A = 1`, `D.E[c] = 0`).
fn deriv_times(terms: &[RawTerm]) -> Vec<RawTerm> {
    let mut out = Vec::new();
    for t in terms {
        match t {
            RawTerm::Diff(g, j) => {
                out.push(RawTerm::Diff(g.differentiate(), *j));
                out.push(RawTerm::Diff(g.clone(), j + 1));
            }
            RawTerm::Int(g, k) => {
                out.push(RawTerm::Int(g.differentiate(), k.clone()));
                out.push(RawTerm::Diff(g.mul(k), 0));
            }
            RawTerm::BndLocal(g, c, j) => {
                out.push(RawTerm::BndLocal(g.differentiate(), c.clone(), *j));
            }
            RawTerm::BndInt(g, c, k) => {
                out.push(RawTerm::BndInt(g.differentiate(), c.clone(), k.clone()));
            }
        }
    }
    out
}

/// Left multiplication by `A` (integration by parts and `A.f.D`
/// elimination; evaluations absorb the integral of their coefficient).
fn integral_times(terms: &[RawTerm]) -> Result<Vec<RawTerm>> {
    let mut out = Vec::new();
    for t in terms {
        match t {
            RawTerm::Diff(g, 0) => out.push(RawTerm::Int(FunctionExpr::one(), g.clone())),
            RawTerm::Diff(g, j) => {
                // A.g.D^j = g.D^(j-1) - A.g'.D^(j-1) - g(0).E[0].D^(j-1)
                out.push(RawTerm::Diff(g.clone(), j - 1));
                let rec = integral_times(&[RawTerm::Diff(g.differentiate(), j - 1)])?;
                out.extend(rec.into_iter().map(negate_raw));
                let g0 = g.evaluate(&Rat::zero())?;
                out.push(RawTerm::BndLocal(
                    FunctionExpr::constant(g0.neg()),
                    Rat::zero(),
                    j - 1,
                ));
            }
            RawTerm::Int(g, k) => {
                let anti = g.integrate()?;
                out.push(RawTerm::Int(anti.clone(), k.clone()));
                out.push(RawTerm::Int(FunctionExpr::one().neg(), anti.mul(k)));
            }
            RawTerm::BndLocal(g, c, j) => {
                out.push(RawTerm::BndLocal(g.integrate()?, c.clone(), *j));
            }
            RawTerm::BndInt(g, c, k) => {
                out.push(RawTerm::BndInt(g.integrate()?, c.clone(), k.clone()));
            }
        }
    }
    Ok(out)
}

/// Left multiplication by `E[c]` (characters are multiplicative and
/// absorb evaluations on their right).
fn eval_times(c: &Rat, terms: &[RawTerm]) -> Result<Vec<RawTerm>> {
    let mut out = Vec::new();
    for t in terms {
        match t {
            RawTerm::Diff(g, j) => {
                let gc = g.evaluate(c)?;
                out.push(RawTerm::BndLocal(
                    FunctionExpr::constant(gc),
                    c.clone(),
                    *j,
                ));
            }
            RawTerm::Int(g, k) => {
                if !c.is_zero() {
                    let gc = g.evaluate(c)?;
                    out.push(RawTerm::BndInt(
                        FunctionExpr::constant(gc),
                        c.clone(),
                        k.clone(),
                    ));
                }
            }
            RawTerm::BndLocal(g, d, j) => {
                let gc = g.evaluate(c)?;
                out.push(RawTerm::BndLocal(FunctionExpr::constant(gc), d.clone(), *j));
            }
            RawTerm::BndInt(g, d, k) => {
                let gc = g.evaluate(c)?;
                out.push(RawTerm::BndInt(
                    FunctionExpr::constant(gc),
                    d.clone(),
                    k.clone(),
                ));
            }
        }
    }
    Ok(out)
}

fn negate_raw(t: RawTerm) -> RawTerm {
    match t {
        RawTerm::Diff(f, i) => RawTerm::Diff(f.neg(), i),
        RawTerm::Int(f, g) => RawTerm::Int(f.neg(), g),
        RawTerm::BndLocal(f, c, i) => RawTerm::BndLocal(f.neg(), c, i),
        RawTerm::BndInt(f, c, g) => RawTerm::BndInt(f.neg(), c, g),
    }
}

// ---------------------------------------------------------------------
// boundary conditions

/// A Stieltjes boundary condition: a boundary-only operator with
/// constant coefficients, acting on functions as a linear functional.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCondition(IdOperator);

impl BoundaryCondition {
    pub fn new(op: IdOperator) -> Result<Self> {
        if !op.diff.is_empty() || !op.int.is_empty() {
            return Err(Error::InvalidBasis(
                "boundary condition must be a boundary operator".into(),
            ));
        }
        for t in &op.bnd {
            if t.coeff.as_constant().is_none() {
                return Err(Error::InvalidBasis(
                    "boundary condition coefficients must be constants".into(),
                ));
            }
        }
        Ok(BoundaryCondition(op))
    }

    pub fn as_operator(&self) -> &IdOperator {
        &self.0
    }

    pub fn into_operator(self) -> IdOperator {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn terms(&self) -> &[BndTerm] {
        &self.0.bnd
    }

    pub fn scale(&self, c: &ExpConstant) -> BoundaryCondition {
        BoundaryCondition(self.0.scale(c))
    }

    pub fn add(&self, other: &BoundaryCondition) -> BoundaryCondition {
        BoundaryCondition(self.0.add(&other.0))
    }

    /// Apply the functional; the result lies in `K`.
    pub fn apply(&self, f: &FunctionExpr) -> Result<ExpConstant> {
        let g = self.0.apply(f)?;
        g.as_constant().ok_or_else(|| {
            Error::InvalidBasis("boundary condition did not evaluate to a constant".into())
        })
    }

    /// Right-composition with an operator, `beta . t`.
    pub fn compose(&self, t: &IdOperator) -> Result<BoundaryCondition> {
        BoundaryCondition::new(self.0.multiply(t)?)
    }
}

// ---------------------------------------------------------------------
// fundamental systems

/// Wronskian matrix of a list of functions.
pub fn wronskian_matrix(fundsys: &[FunctionExpr]) -> Vec<Vec<FunctionExpr>> {
    let n = fundsys.len();
    let mut rows = Vec::with_capacity(n);
    let mut current: Vec<FunctionExpr> = fundsys.to_vec();
    for i in 0..n {
        if i > 0 {
            current = current.iter().map(|f| f.differentiate()).collect();
        }
        rows.push(current.clone());
    }
    rows
}

/// Determinant by cofactor expansion; the matrices here are tiny.
pub fn fn_determinant(m: &[Vec<FunctionExpr>]) -> FunctionExpr {
    let n = m.len();
    if n == 0 {
        return FunctionExpr::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut det = FunctionExpr::zero();
    for (j, entry) in m[0].iter().enumerate() {
        if entry.is_zero() {
            continue;
        }
        let minor: Vec<Vec<FunctionExpr>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, f)| f.clone())
                    .collect()
            })
            .collect();
        let cofactor = entry.mul(&fn_determinant(&minor));
        det = if j % 2 == 0 {
            det.add(&cofactor)
        } else {
            det.sub(&cofactor)
        };
    }
    det
}

/// Right inverse of a monic differential operator solving the initial
/// value problem at `0`, by variation of constants.
pub fn fundamental_right_inverse(
    t: &IdOperator,
    fundsys: &[FunctionExpr],
) -> Result<IdOperator> {
    if !t.is_monic_diff() {
        return Err(Error::OrderMismatch(
            "right inverse requires a monic differential operator".into(),
        ));
    }
    let n = t.order().unwrap();
    if fundsys.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            got: fundsys.len(),
        });
    }
    let w = wronskian_matrix(fundsys);
    let d = fn_determinant(&w);
    if d.is_zero() {
        return Err(Error::SingularWronskian);
    }
    let mut acc = IdOperator::zero();
    for i in 0..n {
        // replace column i by the n-th unit vector
        let mut wi = w.clone();
        for (r, row) in wi.iter_mut().enumerate() {
            row[i] = if r + 1 == n {
                FunctionExpr::one()
            } else {
                FunctionExpr::zero()
            };
        }
        let di = fn_determinant(&wi);
        let kernel = di.div(&d)?;
        acc = acc.add(&IdOperator::int_term(fundsys[i].clone(), kernel));
    }
    Ok(acc)
}

// ---------------------------------------------------------------------
// rendering

fn coeff_display(f: &FunctionExpr) -> (bool, String) {
    if f.numerator().is_single_monomial() {
        let plain = f.to_string();
        if plain.starts_with('-') || plain.starts_with("(-") {
            return (true, f.neg().to_string());
        }
        return (false, plain);
    }
    if f.as_polynomial().is_some() {
        (false, format!("({})", f))
    } else {
        (false, f.to_string())
    }
}

fn push_term(out: &mut String, negative: bool, body: String) {
    if out.is_empty() {
        if negative {
            out.push('-');
        }
        out.push_str(&body);
    } else {
        out.push_str(if negative { " - " } else { " + " });
        out.push_str(&body);
    }
}

fn kernel_suffix(k: &Kernel) -> String {
    let f = k.to_fn();
    if f.is_one() {
        String::new()
    } else {
        format!(".{}", f)
    }
}

impl fmt::Display for IdOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (i, coeff) in self.diff.iter().rev() {
            let head = match i {
                0 => String::new(),
                1 => "D".to_string(),
                _ => format!("D^{}", i),
            };
            if head.is_empty() {
                let (neg, body) = coeff_display(coeff);
                push_term(&mut out, neg, body);
            } else if coeff.is_one() {
                push_term(&mut out, false, head);
            } else if coeff.neg().is_one() {
                push_term(&mut out, true, head);
            } else {
                let (neg, body) = coeff_display(coeff);
                push_term(&mut out, neg, format!("{}.{}", body, head));
            }
        }
        for (kernel, coeff) in &self.int {
            let tail = format!("A{}", kernel_suffix(kernel));
            if coeff.is_one() {
                push_term(&mut out, false, tail);
            } else if coeff.neg().is_one() {
                push_term(&mut out, true, tail);
            } else {
                let (neg, body) = coeff_display(coeff);
                push_term(&mut out, neg, format!("{}.{}", body, tail));
            }
        }
        for t in &self.bnd {
            let mut tail = format!("E[{}]", t.point);
            match &t.op {
                BndOp::Deriv(0) => {}
                BndOp::Deriv(1) => tail.push_str(".D"),
                BndOp::Deriv(i) => tail.push_str(&format!(".D^{}", i)),
                BndOp::Integral(kernel) => {
                    tail.push_str(".A");
                    tail.push_str(&kernel_suffix(kernel));
                }
            }
            if t.coeff.is_one() {
                push_term(&mut out, false, tail);
            } else if t.coeff.neg().is_one() {
                push_term(&mut out, true, tail);
            } else {
                let (neg, body) = coeff_display(&t.coeff);
                push_term(&mut out, neg, format!("{}.{}", body, tail));
            }
        }
        write!(f, "{}", out)
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{rat_int, ExpConstant};

    fn d() -> IdOperator {
        IdOperator::deriv()
    }

    fn a() -> IdOperator {
        IdOperator::integral()
    }

    fn e(c: i64) -> IdOperator {
        IdOperator::eval_point(rat_int(c))
    }

    fn x_fn() -> FunctionExpr {
        FunctionExpr::var()
    }

    #[test]
    fn deriv_after_integral_is_identity() {
        assert_eq!(d().multiply(&a()).unwrap(), IdOperator::one());
    }

    #[test]
    fn integral_after_deriv_is_one_minus_eval() {
        let got = a().multiply(&d()).unwrap();
        let expected = IdOperator::one().sub(&e(0));
        assert_eq!(got, expected);
        assert!(!got.sub(&IdOperator::one()).is_zero());
    }

    #[test]
    fn eval_absorbs_coefficients() {
        // E[1].x = 1.E[1]
        let got = e(1).multiply(&IdOperator::from_fn(x_fn())).unwrap();
        assert_eq!(got, e(1));
        // E[0].A = 0
        let got = e(0).multiply(&a()).unwrap();
        assert!(got.is_zero());
    }

    #[test]
    fn integral_boundary_composed_with_d2() {
        // E[1].A composed with D^2 gives E[1].D - E[0].D
        let e1a = e(1).multiply(&a()).unwrap();
        let d2 = d().pow(2).unwrap();
        let got = e1a.multiply(&d2).unwrap();
        let expected = e(1)
            .multiply(&d())
            .unwrap()
            .sub(&e(0).multiply(&d()).unwrap());
        assert_eq!(got, expected);
    }

    #[test]
    fn apply_derivative_and_integral() {
        let d2 = d().pow(2).unwrap();
        let x3 = x_fn().mul(&x_fn()).mul(&x_fn());
        assert_eq!(
            d2.apply(&x3).unwrap(),
            x_fn().scale(&ExpConstant::from_int(6))
        );
        assert_eq!(a().apply(&FunctionExpr::one()).unwrap(), x_fn());
    }

    #[test]
    fn double_integral_normal_form() {
        // A.A = x.A - A.x
        let a2 = a().multiply(&a()).unwrap();
        let expected = IdOperator::int_term(x_fn(), FunctionExpr::one())
            .sub(&IdOperator::int_term(FunctionExpr::one(), x_fn()));
        assert_eq!(a2, expected);
    }

    #[test]
    fn wronskian_of_exponential_pair() {
        let fs = vec![FunctionExpr::exp(rat_int(1)), FunctionExpr::exp(rat_int(-1))];
        let w = wronskian_matrix(&fs);
        assert_eq!(w[0][0], FunctionExpr::exp(rat_int(1)));
        assert_eq!(w[1][1], FunctionExpr::exp(rat_int(-1)).neg());
        let det = fn_determinant(&w);
        assert_eq!(det, FunctionExpr::constant(ExpConstant::from_int(-2)));
    }

    #[test]
    fn wronskian_of_polynomial_pair() {
        let fs = vec![FunctionExpr::one(), x_fn()];
        let w = wronskian_matrix(&fs);
        assert_eq!(w[0][1], x_fn());
        assert!(fn_determinant(&w).is_one());
    }

    #[test]
    fn right_inverse_of_first_order() {
        let t = d();
        let g = fundamental_right_inverse(&t, &[FunctionExpr::one()]).unwrap();
        assert_eq!(g, a());
        assert_eq!(t.multiply(&g).unwrap(), IdOperator::one());
    }

    #[test]
    fn right_inverse_of_second_order() {
        // D^2 with fundamental system (1, x): x.A - A.x
        let t = d().pow(2).unwrap();
        let g = fundamental_right_inverse(&t, &[FunctionExpr::one(), x_fn()]).unwrap();
        let expected = IdOperator::int_term(x_fn(), FunctionExpr::one())
            .sub(&IdOperator::int_term(FunctionExpr::one(), x_fn()));
        assert_eq!(g, expected);
        assert_eq!(t.multiply(&g).unwrap(), IdOperator::one());
    }

    #[test]
    fn right_inverse_with_exponential_system() {
        let t = d().pow(2).unwrap().sub(&IdOperator::one());
        let fs = vec![FunctionExpr::exp(rat_int(1)), FunctionExpr::exp(rat_int(-1))];
        let g = fundamental_right_inverse(&t, &fs).unwrap();
        assert_eq!(t.multiply(&g).unwrap(), IdOperator::one());
        // solves the initial value problem at 0
        for i in 0..2 {
            let probe = IdOperator::bnd_local_term(FunctionExpr::one(), Rat::zero(), i)
                .multiply(&g)
                .unwrap();
            assert!(probe.is_zero(), "E[0].D^{} of the right inverse", i);
        }
    }

    #[test]
    fn singular_wronskian_detected() {
        let t = d().pow(2).unwrap();
        let err = fundamental_right_inverse(&t, &[x_fn(), x_fn()]).unwrap_err();
        assert_eq!(err, Error::SingularWronskian);
    }

    #[test]
    fn arity_checked() {
        let t = d().pow(2).unwrap();
        let err = fundamental_right_inverse(&t, &[x_fn()]).unwrap_err();
        assert!(matches!(err, Error::ArityMismatch { expected: 2, got: 1 }));
    }

    #[test]
    fn stieltjes_shape_enforced() {
        assert!(BoundaryCondition::new(e(1).multiply(&d()).unwrap()).is_ok());
        assert!(BoundaryCondition::new(d()).is_err());
        let with_fn_coeff = IdOperator::bnd_local_term(x_fn(), rat_int(1), 0);
        assert!(BoundaryCondition::new(with_fn_coeff).is_err());
    }

    #[test]
    fn condition_application() {
        let cond = BoundaryCondition::new(e(1).multiply(&a()).unwrap()).unwrap();
        // integral of 1 over [0, 1]
        assert_eq!(cond.apply(&FunctionExpr::one()).unwrap(), ExpConstant::one());
        // integral of exp(-x) over [0, 1] is 1 - exp(-1)
        let got = cond.apply(&FunctionExpr::exp(rat_int(-1))).unwrap();
        let expected = ExpConstant::one().sub(&ExpConstant::exp(rat_int(-1)));
        assert_eq!(got, expected);
    }

    #[test]
    fn display_matches_session_notation() {
        let t = d().pow(4).unwrap().sub(&d().pow(2).unwrap());
        assert_eq!(t.to_string(), "D^4 - D^2");
        let a2 = a().multiply(&a()).unwrap();
        assert_eq!(a2.to_string(), "x.A - A.x");
        let cond = e(1).multiply(&a()).unwrap();
        assert_eq!(cond.to_string(), "E[1].A");
        assert_eq!(
            e(1).multiply(&a()).unwrap()
                .multiply(&IdOperator::from_fn(FunctionExpr::exp(rat_int(-1))))
                .unwrap()
                .to_string(),
            "E[1].A.exp(-x)"
        );
    }

    #[test]
    fn normalization_is_idempotent() {
        let op = a()
            .multiply(&IdOperator::from_fn(x_fn()))
            .unwrap()
            .add(&e(1).multiply(&a()).unwrap());
        let renorm = IdOperator::from_raw(op.to_raw());
        assert_eq!(op.to_string(), renorm.to_string());
    }
}
