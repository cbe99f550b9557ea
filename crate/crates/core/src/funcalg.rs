//! The coefficient algebra `F`: exponential polynomials and their
//! fractions, with derivation, integration from `0`, and point
//! evaluation.
//!
//! An exponential polynomial is a finite sum of terms `p(x)*exp(l*x)`
//! with rational frequency `l` and polynomial `p` over the scalar field
//! `K`. The algebra is closed under derivation, multiplication and
//! evaluation, and the polynomial part is closed under integration,
//! which is all the operator layer needs.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::constants::{rat_int, ExpConstant, Rat};
use crate::error::{Error, Result};

/// Dense univariate polynomial in `x` over `K`.
///
/// Invariant: no trailing zero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct XPoly {
    coeffs: Vec<ExpConstant>,
}

impl XPoly {
    pub fn zero() -> Self {
        XPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        XPoly::constant(ExpConstant::one())
    }

    pub fn constant(c: ExpConstant) -> Self {
        let mut p = XPoly { coeffs: vec![c] };
        p.trim();
        p
    }

    /// The monomial `c * x^k`.
    pub fn monomial(k: usize, c: ExpConstant) -> Self {
        if c.is_zero() {
            return XPoly::zero();
        }
        let mut coeffs = vec![ExpConstant::zero(); k + 1];
        coeffs[k] = c;
        XPoly { coeffs }
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> ExpConstant {
        self.coeffs.get(k).cloned().unwrap_or_else(ExpConstant::zero)
    }

    pub fn coeffs(&self) -> &[ExpConstant] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&ExpConstant> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &XPoly) -> XPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            coeffs.push(self.coeff(k).add(&other.coeff(k)));
        }
        let mut p = XPoly { coeffs };
        p.trim();
        p
    }

    pub fn neg(&self) -> XPoly {
        XPoly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &XPoly) -> XPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &XPoly) -> XPoly {
        if self.is_zero() || other.is_zero() {
            return XPoly::zero();
        }
        let mut coeffs =
            vec![ExpConstant::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        let mut p = XPoly { coeffs };
        p.trim();
        p
    }

    pub fn scale(&self, c: &ExpConstant) -> XPoly {
        if c.is_zero() {
            return XPoly::zero();
        }
        XPoly {
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn derivative(&self) -> XPoly {
        if self.coeffs.len() <= 1 {
            return XPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale_rat(&rat_int(k as i64)))
            .collect();
        let mut p = XPoly { coeffs };
        p.trim();
        p
    }

    pub fn eval(&self, at: &Rat) -> ExpConstant {
        let mut acc = ExpConstant::zero();
        let mut power = Rat::one();
        for c in &self.coeffs {
            acc = acc.add(&c.scale_rat(&power));
            power *= at;
        }
        acc
    }

    /// Quotient and remainder; exact since `K` is a field.
    pub fn div_rem(&self, div: &XPoly) -> (XPoly, XPoly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let dd = div.degree().unwrap();
        let lead_inv = div.leading().unwrap().inverse().unwrap();
        let mut rem = self.clone();
        let mut quo = XPoly::zero();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let c = rem.leading().unwrap().mul(&lead_inv);
            let term = XPoly::monomial(rd - dd, c);
            quo = quo.add(&term);
            rem = rem.sub(&term.mul(div));
        }
        (quo, rem)
    }

    pub fn exact_div(&self, div: &XPoly) -> Option<XPoly> {
        let (q, r) = self.div_rem(div);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }
}

/// Canonical monomial `x^k * exp(l*x)` of the coefficient algebra.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial {
    pub freq: Rat,
    pub degree: usize,
}

impl Monomial {
    pub fn new(freq: Rat, degree: usize) -> Self {
        Monomial { freq, degree }
    }
}

/// Exponential polynomial: frequencies mapped to their `x`-polynomials.
///
/// Invariant: no stored polynomial is zero; the zero function is the
/// empty map.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExpPolynomial {
    terms: BTreeMap<Rat, XPoly>,
}

impl ExpPolynomial {
    pub fn zero() -> Self {
        ExpPolynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        ExpPolynomial::constant(ExpConstant::one())
    }

    pub fn constant(c: ExpConstant) -> Self {
        ExpPolynomial::from_xpoly(Rat::zero(), XPoly::constant(c))
    }

    pub fn var() -> Self {
        ExpPolynomial::from_xpoly(Rat::zero(), XPoly::monomial(1, ExpConstant::one()))
    }

    /// `exp(freq*x)`.
    pub fn exp(freq: Rat) -> Self {
        ExpPolynomial::from_xpoly(freq, XPoly::one())
    }

    /// `c * x^k * exp(freq*x)`.
    pub fn monomial(m: &Monomial, c: ExpConstant) -> Self {
        ExpPolynomial::from_xpoly(m.freq.clone(), XPoly::monomial(m.degree, c))
    }

    pub fn from_xpoly(freq: Rat, p: XPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(freq, p);
        }
        ExpPolynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map_or(false, |c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &XPoly)> {
        self.terms.iter()
    }

    /// Monomial decomposition in ascending `(freq, degree)` order.
    pub fn monomials(&self) -> Vec<(Monomial, ExpConstant)> {
        let mut out = Vec::new();
        for (freq, p) in &self.terms {
            for (k, c) in p.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    out.push((Monomial::new(freq.clone(), k), c.clone()));
                }
            }
        }
        out
    }

    pub fn as_constant(&self) -> Option<ExpConstant> {
        match self.terms.len() {
            0 => Some(ExpConstant::zero()),
            1 => {
                let (freq, p) = self.terms.iter().next().unwrap();
                if freq.is_zero() && p.degree() == Some(0) {
                    Some(p.coeff(0))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn add(&self, other: &ExpPolynomial) -> ExpPolynomial {
        let mut terms = self.terms.clone();
        for (freq, p) in &other.terms {
            let merged = match terms.remove(freq) {
                Some(q) => q.add(p),
                None => p.clone(),
            };
            if !merged.is_zero() {
                terms.insert(freq.clone(), merged);
            }
        }
        ExpPolynomial { terms }
    }

    pub fn neg(&self) -> ExpPolynomial {
        ExpPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(f, p)| (f.clone(), p.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &ExpPolynomial) -> ExpPolynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ExpPolynomial) -> ExpPolynomial {
        let mut out = ExpPolynomial::zero();
        for (f1, p1) in &self.terms {
            for (f2, p2) in &other.terms {
                out = out.add(&ExpPolynomial::from_xpoly(f1 + f2, p1.mul(p2)));
            }
        }
        out
    }

    pub fn scale(&self, c: &ExpConstant) -> ExpPolynomial {
        if c.is_zero() {
            return ExpPolynomial::zero();
        }
        ExpPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(f, p)| (f.clone(), p.scale(c)))
                .collect(),
        }
    }

    /// Termwise derivative: `(p*exp(l*x))' = (p' + l*p)*exp(l*x)`.
    pub fn derivative(&self) -> ExpPolynomial {
        let mut out = ExpPolynomial::zero();
        for (freq, p) in &self.terms {
            let dp = p
                .derivative()
                .add(&p.scale(&ExpConstant::from_rat(freq.clone())));
            out = out.add(&ExpPolynomial::from_xpoly(freq.clone(), dp));
        }
        out
    }

    /// The antiderivative vanishing at `0`.
    pub fn integrate(&self) -> ExpPolynomial {
        let mut out = ExpPolynomial::zero();
        for (freq, p) in &self.terms {
            if freq.is_zero() {
                // x^k -> x^(k+1)/(k+1)
                let mut coeffs = vec![ExpConstant::zero()];
                for (k, c) in p.coeffs().iter().enumerate() {
                    coeffs.push(c.scale_rat(&Rat::new(BigInt::one(), BigInt::from(k as i64 + 1))));
                }
                let mut q = XPoly { coeffs };
                q.trim();
                out = out.add(&ExpPolynomial::from_xpoly(Rat::zero(), q));
            } else {
                // solve Q' + l*Q = p by descending degree, then subtract Q(0)
                let l = ExpConstant::from_rat(freq.clone());
                let l_inv = l.inverse().unwrap();
                let deg = p.degree().unwrap();
                let mut q = vec![ExpConstant::zero(); deg + 1];
                for k in (0..=deg).rev() {
                    let mut c = p.coeff(k);
                    if k + 1 <= deg {
                        c = c.sub(&q[k + 1].scale_rat(&rat_int(k as i64 + 1)));
                    }
                    q[k] = c.mul(&l_inv);
                }
                let q0 = q[0].clone();
                let mut qp = XPoly { coeffs: q };
                qp.trim();
                out = out.add(&ExpPolynomial::from_xpoly(freq.clone(), qp));
                out = out.add(&ExpPolynomial::constant(q0.neg()));
            }
        }
        out
    }

    pub fn evaluate(&self, at: &Rat) -> ExpConstant {
        let mut acc = ExpConstant::zero();
        for (freq, p) in &self.terms {
            let e = ExpConstant::exp(freq * at);
            acc = acc.add(&p.eval(at).mul(&e));
        }
        acc
    }

    /// Leading coefficient of the dominant monomial (largest frequency,
    /// then largest degree).
    pub fn leading_coeff(&self) -> Option<&ExpConstant> {
        self.terms.iter().next_back().and_then(|(_, p)| p.leading())
    }

    /// Exact division in the exponential-polynomial ring.
    ///
    /// Frequencies are rescaled to a common integer grid and the
    /// quotient is computed by synthetic division on the top frequency;
    /// returns `None` when the division is not exact.
    pub fn exact_div(&self, div: &ExpPolynomial) -> Option<ExpPolynomial> {
        if div.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(ExpPolynomial::zero());
        }
        if let Some(c) = div.as_constant() {
            return Some(self.scale(&c.inverse().unwrap()));
        }
        let mut denoms: Vec<BigInt> = Vec::new();
        for f in self.terms.keys().chain(div.terms.keys()) {
            denoms.push(f.denom().clone());
        }
        let grid = denoms
            .into_iter()
            .fold(BigInt::one(), |acc, d| acc.lcm(&d));
        let scale = Rat::from_integer(grid);
        let fmin = self.terms.keys().next().unwrap().clone();
        let gmin = div.terms.keys().next().unwrap().clone();
        let to_grid = |p: &ExpPolynomial, base: &Rat| -> BTreeMap<BigInt, XPoly> {
            p.terms
                .iter()
                .map(|(f, xp)| (((f - base) * &scale).to_integer(), xp.clone()))
                .collect()
        };
        let mut rem = to_grid(self, &fmin);
        let g = to_grid(div, &gmin);
        let g_top = g.keys().next_back().unwrap().clone();
        let g_lead = g[&g_top].clone();
        let mut quo: BTreeMap<BigInt, XPoly> = BTreeMap::new();
        while let Some(r_top) = rem.keys().next_back().cloned() {
            if r_top < g_top {
                return None;
            }
            let c = rem[&r_top].exact_div(&g_lead)?;
            let d = &r_top - &g_top;
            // rem -= c * t^d * g
            for (i, gp) in &g {
                let idx = &d + i;
                let prod = c.mul(gp);
                let merged = match rem.remove(&idx) {
                    Some(p) => p.sub(&prod),
                    None => prod.neg(),
                };
                if !merged.is_zero() {
                    rem.insert(idx, merged);
                }
            }
            quo.insert(d, c);
        }
        let offset = fmin - gmin;
        let mut out = ExpPolynomial::zero();
        for (i, p) in quo {
            let freq = Rat::from_integer(i) / &scale + &offset;
            out = out.add(&ExpPolynomial::from_xpoly(freq, p));
        }
        Some(out)
    }
}

/// A fraction of exponential polynomials.
///
/// Normalization attempts exact division in both directions and scales
/// the denominator so its dominant coefficient is `1`; equality is
/// decided by cross-multiplication.
#[derive(Debug, Clone)]
pub struct FunctionExpr {
    num: ExpPolynomial,
    den: ExpPolynomial,
}

impl FunctionExpr {
    fn make(num: ExpPolynomial, den: ExpPolynomial) -> Self {
        assert!(!den.is_zero(), "zero denominator in FunctionExpr");
        let mut f = FunctionExpr { num, den };
        f.normalize();
        f
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = ExpPolynomial::one();
            return;
        }
        if self.den.is_one() {
            return;
        }
        if let Some(q) = self.num.exact_div(&self.den) {
            self.num = q;
            self.den = ExpPolynomial::one();
            return;
        }
        let lead = self.den.leading_coeff().unwrap().clone();
        if !lead.is_one() {
            let inv = lead.inverse().unwrap();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn zero() -> Self {
        FunctionExpr {
            num: ExpPolynomial::zero(),
            den: ExpPolynomial::one(),
        }
    }

    pub fn one() -> Self {
        FunctionExpr::from_poly(ExpPolynomial::one())
    }

    pub fn var() -> Self {
        FunctionExpr::from_poly(ExpPolynomial::var())
    }

    pub fn exp(freq: Rat) -> Self {
        FunctionExpr::from_poly(ExpPolynomial::exp(freq))
    }

    pub fn constant(c: ExpConstant) -> Self {
        FunctionExpr::from_poly(ExpPolynomial::constant(c))
    }

    pub fn from_poly(p: ExpPolynomial) -> Self {
        FunctionExpr {
            num: p,
            den: ExpPolynomial::one(),
        }
    }

    pub fn ratio(num: ExpPolynomial, den: ExpPolynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FunctionExpr::make(num, den))
    }

    pub fn numerator(&self) -> &ExpPolynomial {
        &self.num
    }

    pub fn denominator(&self) -> &ExpPolynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// The underlying polynomial when the denominator is trivial.
    pub fn as_polynomial(&self) -> Option<&ExpPolynomial> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<ExpConstant> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        n.div(&d).ok()
    }

    pub fn add(&self, other: &FunctionExpr) -> FunctionExpr {
        FunctionExpr::make(
            self.num
                .mul(&other.den)
                .add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> FunctionExpr {
        FunctionExpr {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &FunctionExpr) -> FunctionExpr {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FunctionExpr) -> FunctionExpr {
        FunctionExpr::make(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &FunctionExpr) -> Result<FunctionExpr> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(FunctionExpr::make(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn scale(&self, c: &ExpConstant) -> FunctionExpr {
        if c.is_zero() {
            return FunctionExpr::zero();
        }
        FunctionExpr::make(self.num.scale(c), self.den.clone())
    }

    /// Exact derivative (quotient rule on fractions).
    pub fn differentiate(&self) -> FunctionExpr {
        if self.den.is_one() {
            return FunctionExpr::from_poly(self.num.derivative());
        }
        let num = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        FunctionExpr::make(num, self.den.mul(&self.den))
    }

    pub fn derivative_n(&self, n: usize) -> FunctionExpr {
        let mut f = self.clone();
        for _ in 0..n {
            f = f.differentiate();
        }
        f
    }

    /// The antiderivative vanishing at `0`; only exponential polynomials
    /// stay inside the algebra.
    pub fn integrate(&self) -> Result<FunctionExpr> {
        match self.as_polynomial() {
            Some(p) => Ok(FunctionExpr::from_poly(p.integrate())),
            None => Err(Error::NoClosedForm(format!(
                "antiderivative of proper fraction {}",
                self
            ))),
        }
    }

    pub fn evaluate(&self, at: &Rat) -> Result<ExpConstant> {
        let d = self.den.evaluate(at);
        if d.is_zero() {
            return Err(Error::PoleAtPoint(at.to_string()));
        }
        self.num.evaluate(at).div(&d)
    }

    /// Semantic equality by cross-multiplication.
    pub fn equals(&self, other: &FunctionExpr) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl PartialEq for FunctionExpr {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl Eq for FunctionExpr {}

// ---------------------------------------------------------------------
// rendering

fn fmt_monomial(
    c: &ExpConstant,
    m: &Monomial,
    lead: bool,
    f: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    let mut parts: Vec<String> = Vec::new();
    let unit_power = m.degree == 0 && m.freq.is_zero();
    let coeff = if c.is_one() && !unit_power {
        None
    } else if c.clone().neg().is_one() && !unit_power {
        Some("-".to_string())
    } else {
        let s = c.to_string();
        let needs_parens = !c.denominator().as_rational().map_or(false, |r| r.is_one())
            || !c.numerator().is_single_term();
        Some(if needs_parens { format!("({})", s) } else { s })
    };
    if m.degree > 0 {
        parts.push(if m.degree == 1 {
            "x".to_string()
        } else {
            format!("x^{}", m.degree)
        });
    }
    if !m.freq.is_zero() {
        let freq = if m.freq.is_one() {
            "x".to_string()
        } else if (-m.freq.clone()).is_one() {
            "-x".to_string()
        } else {
            format!("{}*x", m.freq)
        };
        parts.push(format!("exp({})", freq));
    }
    let body = parts.join("*");
    let (sign, mag) = match &coeff {
        Some(s) if s == "-" => ("-".to_string(), body),
        Some(s) => {
            if let Some(stripped) = s.strip_prefix('-') {
                let mag = if body.is_empty() {
                    stripped.to_string()
                } else {
                    format!("{}*{}", stripped, body)
                };
                ("-".to_string(), mag)
            } else {
                let mag = if body.is_empty() {
                    s.clone()
                } else {
                    format!("{}*{}", s, body)
                };
                ("+".to_string(), mag)
            }
        }
        None => ("+".to_string(), body),
    };
    if lead {
        if sign == "-" {
            write!(f, "-{}", mag)
        } else {
            write!(f, "{}", mag)
        }
    } else if sign == "-" {
        write!(f, " - {}", mag)
    } else {
        write!(f, " + {}", mag)
    }
}

impl fmt::Display for ExpPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // dominant terms first: descending frequency, then degree
        let mut monos = self.monomials();
        monos.reverse();
        for (idx, (m, c)) in monos.iter().enumerate() {
            fmt_monomial(c, m, idx == 0, f)?;
        }
        Ok(())
    }
}

impl ExpPolynomial {
    /// True when the rendering is a single product (no top-level sum).
    pub fn is_single_monomial(&self) -> bool {
        self.monomials().len() <= 1
    }
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.is_single_monomial() && !self.num.to_string().starts_with('-') {
            write!(f, "{}", self.num)?;
        } else {
            write!(f, "({})", self.num)?;
        }
        if self.den.is_single_monomial() {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::rat;

    fn xp() -> FunctionExpr {
        FunctionExpr::var()
    }

    fn ex(freq: i64) -> FunctionExpr {
        FunctionExpr::exp(rat_int(freq))
    }

    #[test]
    fn derivative_of_square() {
        let f = xp().mul(&xp());
        let expected = xp().scale(&ExpConstant::from_int(2));
        assert_eq!(f.differentiate(), expected);
    }

    #[test]
    fn product_rule() {
        let f = ex(1).mul(&xp());
        let expected = ex(1).mul(&xp()).add(&ex(1));
        assert_eq!(f.differentiate(), expected);
    }

    #[test]
    fn quotient_rule_on_fraction() {
        // exp(2x)/(exp(x)-1); oracle: (n'd - nd')/d^2 cross-checked by
        // multiplying back against the hand expansion.
        let den = ex(1).sub(&FunctionExpr::one());
        let f = ex(2).div(&den).unwrap();
        let df = f.differentiate();
        let expected_num = ex(3).sub(&ex(2).scale(&ExpConstant::from_int(2)));
        let expected = expected_num.div(&den.mul(&den)).unwrap();
        assert_eq!(df, expected);
    }

    #[test]
    fn integrate_constant() {
        assert_eq!(FunctionExpr::one().integrate().unwrap(), xp());
    }

    #[test]
    fn integrate_exponential_vanishes_at_zero() {
        let f = ex(1).integrate().unwrap();
        assert_eq!(f, ex(1).sub(&FunctionExpr::one()));
        assert!(f.evaluate(&Rat::zero()).unwrap().is_zero());
    }

    #[test]
    fn integrate_x_exp_x() {
        // oracle: differentiate back and check the value at 0
        let f = xp().mul(&ex(1));
        let g = f.integrate().unwrap();
        assert_eq!(g.differentiate(), f);
        assert!(g.evaluate(&Rat::zero()).unwrap().is_zero());
        let expected = xp().mul(&ex(1)).sub(&ex(1)).add(&FunctionExpr::one());
        assert_eq!(g, expected);
    }

    #[test]
    fn integrate_proper_fraction_fails() {
        let f = FunctionExpr::one()
            .div(&xp().mul(&xp()).add(&FunctionExpr::one()))
            .unwrap();
        assert!(matches!(f.integrate(), Err(Error::NoClosedForm(_))));
    }

    #[test]
    fn evaluate_polynomial() {
        let f = xp().mul(&xp());
        assert_eq!(f.evaluate(&rat_int(1)).unwrap(), ExpConstant::one());
    }

    #[test]
    fn evaluate_exponential() {
        let f = ex(-1);
        assert_eq!(
            f.evaluate(&rat_int(1)).unwrap(),
            ExpConstant::exp(rat_int(-1))
        );
    }

    #[test]
    fn evaluate_at_pole() {
        let f = FunctionExpr::one()
            .div(&xp().sub(&FunctionExpr::one()))
            .unwrap();
        assert!(matches!(
            f.evaluate(&rat_int(1)),
            Err(Error::PoleAtPoint(_))
        ));
    }

    #[test]
    fn fraction_cancellation() {
        let d = ex(1).sub(&FunctionExpr::one());
        let f = d.mul(&FunctionExpr::one().div(&d).unwrap());
        assert!(f.is_one());
        assert!(ex(1).mul(&ex(-1)).is_one());
    }

    #[test]
    fn exact_division_across_frequencies() {
        // (exp(2x) - 1) / (exp(x) - 1) = exp(x) + 1
        let a = ex(2).sub(&FunctionExpr::one());
        let b = ex(1).sub(&FunctionExpr::one());
        let q = a.div(&b).unwrap();
        assert!(q.as_polynomial().is_some());
        assert_eq!(q, ex(1).add(&FunctionExpr::one()));
    }

    #[test]
    fn exact_division_with_half_frequencies() {
        // (exp(x) - 1) / (exp(x/2) - 1) = exp(x/2) + 1
        let a = ex(1).sub(&FunctionExpr::one());
        let b = FunctionExpr::exp(rat(1, 2)).sub(&FunctionExpr::one());
        let q = a.div(&b).unwrap();
        assert_eq!(q, FunctionExpr::exp(rat(1, 2)).add(&FunctionExpr::one()));
    }

    #[test]
    fn display_forms() {
        let den = ex(1).sub(&FunctionExpr::one());
        let f = ex(2).div(&den).unwrap();
        assert_eq!(f.to_string(), "exp(2*x)/(exp(x) - 1)");
        let p = xp()
            .mul(&xp())
            .scale(&ExpConstant::from_rat(rat(-1, 2)))
            .sub(&FunctionExpr::constant(ExpConstant::from_rat(rat(1, 2))));
        assert_eq!(p.to_string(), "-1/2*x^2 - 1/2");
        assert_eq!(ex(-1).to_string(), "exp(-x)");
        assert_eq!(
            xp().mul(&ex(1)).sub(&ex(1)).add(&FunctionExpr::one()).to_string(),
            "x*exp(x) - exp(x) + 1"
        );
    }
}
