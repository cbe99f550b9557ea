//! Composition of generalized boundary problems, inverse images,
//! the reverse-order-law test, and factorization of problems along a
//! factorization of the differential operator.

use crate::error::{Error, Result};
use crate::funcalg::{ExpPolynomial, FunctionExpr, Monomial};
use crate::idop::{fundamental_right_inverse, BndOp, BoundaryCondition, IdOperator, Kernel};
use crate::linalg::KMatrix;
use crate::problems::{
    combine_conditions, combine_functions, compatibility_conditions, evaluation_matrix,
    func_coordinates, intersect_dual, intersect_primal, BoundaryProblem, CondSpace, FuncSpace,
};
use crate::constants::{ExpConstant, Rat};
use num_traits::Zero;

/// Composite problem `(T1 T2, B2 + (B1 ∩ E2^⊥).T2, E1 + T1(B1^⊥ ∩ E2))`.
pub fn compose(p1: &BoundaryProblem, p2: &BoundaryProblem) -> Result<BoundaryProblem> {
    let t = p1.operator().multiply(p2.operator())?;
    let gamma = intersect_dual(p1.conds(), p2.exc())?;
    let v = intersect_primal(p2.exc(), p1.conds())?;
    let mut conds = p2.conds().basis().to_vec();
    for g in gamma.basis() {
        conds.push(g.compose(p2.operator())?);
    }
    let mut exc = p1.exc().basis().to_vec();
    for f in v.basis() {
        exc.push(p1.operator().apply(f)?);
    }
    BoundaryProblem::new(t, CondSpace::span(conds)?, FuncSpace::span(exc)?)
}

/// Basis of `T^{-1}(E)`: the fundamental system together with the
/// images of a basis of `E` under the fundamental right inverse.
pub fn inverse_image(
    t: &IdOperator,
    e: &FuncSpace,
    fundsys: Option<&[FunctionExpr]>,
) -> Result<FuncSpace> {
    let fs = match fundsys {
        Some(fs) => fs.to_vec(),
        None => crate::problems::auto_fundamental_system(t)?,
    };
    let t_star = fundamental_right_inverse(t, &fs)?;
    let mut basis = fs;
    for f in e.basis() {
        basis.push(t_star.apply(f)?);
    }
    FuncSpace::span(basis)
}

/// Intersection of two function spaces over monomial coordinates.
pub fn funcspace_intersect(a: &FuncSpace, b: &FuncSpace) -> Result<FuncSpace> {
    if a.is_empty() || b.is_empty() {
        return Ok(FuncSpace::empty());
    }
    let mut all = a.basis().to_vec();
    all.extend(b.basis().to_vec());
    let (_, m) = func_coordinates(&all)?;
    let p = a.dim();
    let q = b.dim();
    let n = m.cols();
    // solve sum x_i a_i = sum y_j b_j via the kernel of [A^T | -B^T]
    let mut stacked = KMatrix::zero(n, p + q);
    for row in 0..n {
        for i in 0..p {
            stacked.set(row, i, m.get(i, row).clone());
        }
        for j in 0..q {
            stacked.set(row, p + j, m.get(p + j, row).neg());
        }
    }
    let mut out = Vec::new();
    for k in stacked.kernel_basis() {
        out.push(combine_functions(&k[..p], a.basis()));
    }
    FuncSpace::span(out)
}

/// Whether `g.t.g = g`.
pub fn is_outer_inverse(g: &IdOperator, t: &IdOperator) -> Result<bool> {
    let gtg = g.multiply(t)?.multiply(g)?;
    Ok(gtg.sub(g).is_zero())
}

/// Decides whether the product of the Green's operators of `p2` and
/// `p1` is the Green's operator of the composite problem, by the
/// subspace inclusion test on the input data alone.
pub fn check_reverse_order_law(
    p1: &BoundaryProblem,
    p2: &BoundaryProblem,
) -> Result<bool> {
    if !p1.is_regular()? {
        return Err(Error::NotRegular(format!("{}", p1)));
    }
    if !p2.is_regular()? {
        return Err(Error::NotRegular(format!("{}", p2)));
    }
    let fs1 = p1.fundamental_system()?;
    let k1 = inverse_image(p1.operator(), p1.exc(), Some(&fs1))?;
    let j = funcspace_intersect(p2.exc(), &k1)?;
    let b = intersect_dual(p1.conds(), &j)?;
    let k = intersect_dual(p1.conds(), p2.exc())?;
    let fs2 = p2.fundamental_system()?;
    let c2 = compatibility_conditions(p2.operator(), p2.conds(), &fs2)?;
    let c = c2.sum(&k)?;
    b.leq(&c)
}

/// Row reduction of the condition space against a fundamental system of
/// the right factor: returns all transformed conditions; the first
/// `rank` of them restrict to a regular problem for the right factor,
/// the rest annihilate its kernel.
pub fn rref_conditions(
    conds: &[BoundaryCondition],
    funcs: &[FunctionExpr],
) -> Result<Vec<BoundaryCondition>> {
    let m = evaluation_matrix(conds, funcs)?;
    let (_, s) = m.rref_with_transform();
    let mut out = Vec::with_capacity(conds.len());
    for i in 0..conds.len() {
        out.push(combine_conditions(s.row(i), conds));
    }
    Ok(out)
}

fn split_conditions(
    t2: &IdOperator,
    conds: &CondSpace,
    fs2: &[FunctionExpr],
) -> Result<(Vec<BoundaryCondition>, Vec<BoundaryCondition>)> {
    let mu = fs2.len();
    let n = conds.dim();
    let m = evaluation_matrix(conds.basis(), fs2)?;
    if m.rank() != mu {
        return Err(Error::NotSemiRegular);
    }
    let tilde = rref_conditions(conds.basis(), fs2)?;
    let h2 = fundamental_right_inverse(t2, fs2)?;
    let mut alphas = Vec::with_capacity(n - mu);
    for cond in tilde.iter().skip(mu) {
        alphas.push(cond.compose(&h2)?);
    }
    Ok((alphas, tilde[..mu].to_vec()))
}

/// Factors `p = (T1 T2, B, E)` into a generalized left factor
/// `(T1, B1, E)` and a regular right factor `(T2, B2)`; the Green's
/// operator of `p` is the product of the factors' Green's operators.
pub fn factor_right_regular(
    p: &BoundaryProblem,
    t1: &IdOperator,
    t2: &IdOperator,
    fundsys2: Option<&[FunctionExpr]>,
) -> Result<(BoundaryProblem, BoundaryProblem)> {
    if &t1.multiply(t2)? != p.operator() {
        return Err(Error::BadFactorization);
    }
    // verify regularity when a fundamental system for T is available
    match p.is_regular() {
        Ok(true) => {}
        Ok(false) => return Err(Error::NotRegular(format!("{}", p))),
        Err(Error::MissingFundamentalSystem(_)) => {}
        Err(e) => return Err(e),
    }
    let fs2 = match fundsys2 {
        Some(fs) => fs.to_vec(),
        None => crate::problems::auto_fundamental_system(t2)?,
    };
    let (alphas, tilde) = split_conditions(t2, p.conds(), &fs2)?;
    let left = BoundaryProblem::new(
        t1.clone(),
        CondSpace::span(alphas)?,
        p.exc().clone(),
    )?;
    let right = BoundaryProblem::with_fundsys(
        t2.clone(),
        CondSpace::span(tilde)?,
        FuncSpace::empty(),
        fs2,
    )?;
    Ok((left, right))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        if k == 0 {
            return out;
        }
        let mut i = k - 1;
        while idx[i] == n - k + i {
            if i == 0 {
                return out;
            }
            i -= 1;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Default exceptional-space candidates: monomials `x^k exp(l x)` with
/// small degree and frequencies drawn from the problem data and `0`.
pub fn default_candidate_pool(
    p: &BoundaryProblem,
    t1: &IdOperator,
    t2: &IdOperator,
) -> Vec<FunctionExpr> {
    let mut freqs: Vec<Rat> = vec![Rat::zero()];
    let push_freq = |f: Rat, freqs: &mut Vec<Rat>| {
        if !freqs.contains(&f) {
            freqs.push(f);
        }
    };
    for cond in p.conds().basis() {
        for term in cond.terms() {
            if let BndOp::Integral(Kernel::Poly(m)) = &term.op {
                push_freq(m.freq.clone(), &mut freqs);
            }
        }
    }
    for f in p.exc().basis() {
        if let Some(poly) = f.as_polynomial() {
            for (m, _) in poly.monomials() {
                push_freq(m.freq.clone(), &mut freqs);
            }
        }
    }
    for t in [t1, t2] {
        if let Ok(fs) = crate::problems::auto_fundamental_system(t) {
            for f in &fs {
                if let Some(poly) = f.as_polynomial() {
                    for (m, _) in poly.monomials() {
                        push_freq(m.freq.clone(), &mut freqs);
                    }
                }
            }
        }
    }
    freqs.sort();
    let degree_bound = p.order() + p.conds().dim();
    let mut pool = Vec::new();
    for k in 0..=degree_bound {
        for f in &freqs {
            pool.push(FunctionExpr::from_poly(ExpPolynomial::monomial(
                &Monomial::new(f.clone(), k),
                ExpConstant::one(),
            )));
        }
    }
    pool
}

/// Factors a semi-regular pair `(T, B)` with `T = T1 T2` into a regular
/// left factor `(T1, B1)` and a generalized right factor
/// `(T2, B2, E2)` satisfying the reverse order law.
///
/// The exceptional space is found by searching the candidate pool for a
/// subset that makes the right triple regular and passes the reverse
/// order law test.
pub fn factor_left_regular(
    p: &BoundaryProblem,
    t1: &IdOperator,
    t2: &IdOperator,
    fundsys1: Option<&[FunctionExpr]>,
    fundsys2: Option<&[FunctionExpr]>,
    candidate_pool: Option<&[FunctionExpr]>,
) -> Result<(BoundaryProblem, BoundaryProblem)> {
    if &t1.multiply(t2)? != p.operator() {
        return Err(Error::BadFactorization);
    }
    if !p.is_semi_regular()? {
        return Err(Error::NotSemiRegular);
    }
    let fs1 = match fundsys1 {
        Some(fs) => fs.to_vec(),
        None => crate::problems::auto_fundamental_system(t1)?,
    };
    let fs2 = match fundsys2 {
        Some(fs) => fs.to_vec(),
        None => crate::problems::auto_fundamental_system(t2)?,
    };

    // split the conditions, ignoring any exceptional space of p
    let (alphas, tilde) = split_conditions(t2, p.conds(), &fs2)?;
    let b1 = CondSpace::span(alphas)?;
    let b2 = CondSpace::span(tilde)?;

    // first subset of B1 that restricts to a regular left problem
    let m = t1.order().unwrap();
    let full = evaluation_matrix(b1.basis(), &fs1)?;
    if full.rank() != m {
        return Err(Error::NotSemiRegular);
    }
    let mut chosen: Option<Vec<usize>> = None;
    for combo in combinations(b1.dim(), m) {
        let subset: Vec<BoundaryCondition> =
            combo.iter().map(|&i| b1.basis()[i].clone()).collect();
        if evaluation_matrix(&subset, &fs1)?.is_invertible() {
            chosen = Some(combo);
            break;
        }
    }
    let chosen = chosen.ok_or(Error::NotSemiRegular)?;
    let left_conds: Vec<BoundaryCondition> =
        chosen.iter().map(|&i| b1.basis()[i].clone()).collect();
    let left = BoundaryProblem::with_fundsys(
        t1.clone(),
        CondSpace::span(left_conds)?,
        FuncSpace::empty(),
        fs1,
    )?;

    // push the remaining conditions through T2
    let mut pushed = Vec::new();
    for (i, cond) in b1.basis().iter().enumerate() {
        if !chosen.contains(&i) {
            pushed.push(cond.compose(t2)?);
        }
    }
    let b2_aug = b2.sum(&CondSpace::span(pushed)?)?;

    // search the pool for an admissible exceptional space
    let c2 = compatibility_conditions(t2, &b2_aug, &fs2)?;
    let r = c2.dim();
    if r == 0 {
        let right = BoundaryProblem::with_fundsys(
            t2.clone(),
            b2_aug,
            FuncSpace::empty(),
            fs2,
        )?;
        if check_reverse_order_law(&left, &right)? {
            return Ok((left, right));
        }
        return Err(Error::SearchExhausted);
    }
    let default_pool;
    let pool = match candidate_pool {
        Some(pool) => pool,
        None => {
            default_pool = default_candidate_pool(p, t1, t2);
            &default_pool
        }
    };
    for combo in combinations(pool.len(), r) {
        let cand: Vec<FunctionExpr> = combo.iter().map(|&i| pool[i].clone()).collect();
        let Ok(e2) = FuncSpace::new(cand) else {
            continue;
        };
        let right = BoundaryProblem::with_fundsys(
            t2.clone(),
            b2_aug.clone(),
            e2,
            fs2.clone(),
        )?;
        if !right.is_regular()? {
            continue;
        }
        if check_reverse_order_law(&left, &right)? {
            return Ok((left, right));
        }
    }
    Err(Error::SearchExhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::rat_int;

    fn d() -> IdOperator {
        IdOperator::deriv()
    }

    fn e(c: i64) -> IdOperator {
        IdOperator::eval_point(rat_int(c))
    }

    fn bc(op: IdOperator) -> BoundaryCondition {
        BoundaryCondition::new(op).unwrap()
    }

    fn x_fn() -> FunctionExpr {
        FunctionExpr::var()
    }

    fn conds_111() -> CondSpace {
        CondSpace::new(vec![
            bc(e(1)),
            bc(e(1).multiply(&d()).unwrap()),
            bc(e(0).multiply(&d()).unwrap()),
        ])
        .unwrap()
    }

    fn bp1() -> BoundaryProblem {
        BoundaryProblem::new(
            d().pow(2).unwrap(),
            conds_111(),
            FuncSpace::new(vec![FunctionExpr::one()]).unwrap(),
        )
        .unwrap()
    }

    fn bp2() -> BoundaryProblem {
        BoundaryProblem::new(
            d().pow(2).unwrap().sub(&IdOperator::one()),
            conds_111(),
            FuncSpace::new(vec![x_fn()]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn inverse_image_of_constants_under_d2() {
        let got = inverse_image(
            &d().pow(2).unwrap(),
            &FuncSpace::new(vec![FunctionExpr::one()]).unwrap(),
            None,
        )
        .unwrap();
        let expected = FuncSpace::new(vec![
            FunctionExpr::one(),
            x_fn(),
            x_fn().mul(&x_fn()),
        ])
        .unwrap();
        assert!(got.eq_span(&expected).unwrap());
    }

    #[test]
    fn inverse_image_of_empty_space_is_kernel() {
        let got = inverse_image(&d(), &FuncSpace::empty(), None).unwrap();
        assert_eq!(got.dim(), 1);
        assert!(got.basis()[0].is_one());
    }

    #[test]
    fn funcspace_intersections() {
        let s1 = FuncSpace::new(vec![x_fn()]).unwrap();
        let s2 = FuncSpace::new(vec![FunctionExpr::one(), x_fn(), x_fn().mul(&x_fn())])
            .unwrap();
        let got = funcspace_intersect(&s1, &s2).unwrap();
        assert!(got.eq_span(&s1).unwrap());

        let sum = FuncSpace::new(vec![FunctionExpr::one().add(&x_fn())]).unwrap();
        let plane = FuncSpace::new(vec![FunctionExpr::one(), x_fn()]).unwrap();
        let got = funcspace_intersect(&sum, &plane).unwrap();
        assert!(got.eq_span(&sum).unwrap());
    }

    #[test]
    fn outer_inverse_of_true_right_inverse() {
        assert!(is_outer_inverse(&IdOperator::integral(), &d()).unwrap());
    }

    #[test]
    fn compose_of_regular_problems_concatenates_conditions() {
        let p1 = BoundaryProblem::new(
            d(),
            CondSpace::new(vec![bc(e(0))]).unwrap(),
            FuncSpace::empty(),
        )
        .unwrap();
        let p2 = BoundaryProblem::new(
            d(),
            CondSpace::new(vec![bc(e(1))]).unwrap(),
            FuncSpace::empty(),
        )
        .unwrap();
        let c = compose(&p1, &p2).unwrap();
        assert_eq!(c.order(), 2);
        assert_eq!(c.conds().dim(), 2);
        assert!(c.exc().is_empty());
        // second condition is E[0].D by the transpose action
        let expected = CondSpace::new(vec![
            bc(e(1)),
            bc(e(0).multiply(&d()).unwrap()),
        ])
        .unwrap();
        assert!(c.conds().eq_span(&expected).unwrap());
    }

    #[test]
    fn reverse_order_law_for_regular_pairs() {
        let p1 = BoundaryProblem::new(
            d(),
            CondSpace::new(vec![bc(e(0))]).unwrap(),
            FuncSpace::empty(),
        )
        .unwrap();
        let p2 = BoundaryProblem::new(
            d(),
            CondSpace::new(vec![bc(e(1))]).unwrap(),
            FuncSpace::empty(),
        )
        .unwrap();
        assert!(check_reverse_order_law(&p1, &p2).unwrap());
    }

    #[test]
    fn reverse_order_law_on_the_generalized_pair() {
        assert!(check_reverse_order_law(&bp1(), &bp2()).unwrap());
        assert!(!check_reverse_order_law(&bp2(), &bp1()).unwrap());
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(
            combinations(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(combinations(2, 0), vec![Vec::<usize>::new()]);
        assert!(combinations(1, 2).is_empty());
    }
}
