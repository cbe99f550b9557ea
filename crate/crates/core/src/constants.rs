//! Exact arithmetic in the scalar field `K`.
//!
//! `K` is the fraction field of the group algebra spanned by the
//! exponential monomials `exp(r)` with rational `r`. Distinct monomials
//! are linearly independent over the rationals, so an element is zero
//! exactly when its numerator carries no terms. That makes the zero test
//! (and hence equality by cross-multiplication) decidable.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used everywhere in the engine.
pub type Rat = BigRational;

/// Convenience constructor for small rationals.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as a rational.
pub fn rat_int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

/// A finite rational combination of exponential monomials `exp(r)`.
///
/// The map sends the exponent `r` to its coefficient; zero coefficients
/// are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct ExpSum {
    terms: BTreeMap<Rat, Rat>,
}

impl ExpSum {
    pub fn zero() -> Self {
        ExpSum {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        ExpSum::from_rat(Rat::one())
    }

    pub fn from_rat(c: Rat) -> Self {
        ExpSum::monomial(Rat::zero(), c)
    }

    /// The single term `c * exp(r)`.
    pub fn monomial(r: Rat, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(r, c);
        }
        ExpSum { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &ExpSum) -> ExpSum {
        let mut terms = self.terms.clone();
        for (r, c) in &other.terms {
            let entry = terms.entry(r.clone()).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(r);
            }
        }
        ExpSum { terms }
    }

    pub fn neg(&self) -> ExpSum {
        ExpSum {
            terms: self.terms.iter().map(|(r, c)| (r.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &ExpSum) -> ExpSum {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ExpSum) -> ExpSum {
        let mut out = ExpSum::zero();
        for (r1, c1) in &self.terms {
            for (r2, c2) in &other.terms {
                let r = r1 + r2;
                let c = c1 * c2;
                let entry = out.terms.entry(r.clone()).or_insert_with(Rat::zero);
                *entry += c;
                if entry.is_zero() {
                    out.terms.remove(&r);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> ExpSum {
        if c.is_zero() {
            return ExpSum::zero();
        }
        ExpSum {
            terms: self.terms.iter().map(|(r, v)| (r.clone(), v * c)).collect(),
        }
    }

    /// Multiply by the monomial `exp(shift)`.
    pub fn shift(&self, shift: &Rat) -> ExpSum {
        ExpSum {
            terms: self
                .terms
                .iter()
                .map(|(r, c)| (r + shift, c.clone()))
                .collect(),
        }
    }

    fn min_exp(&self) -> Option<&Rat> {
        self.terms.keys().next()
    }

    fn leading(&self) -> Option<(&Rat, &Rat)> {
        self.terms.iter().next_back()
    }

    /// Dense coefficients on the integer grid `exp(k/n)`, shifted so the
    /// valuation sits at index 0.
    fn to_grid(&self, n: &BigInt) -> (Rat, Vec<Rat>) {
        let base = self.min_exp().cloned().unwrap_or_else(Rat::zero);
        let mut coeffs = Vec::new();
        for (e, c) in &self.terms {
            let idx = ((e - &base) * Rat::from_integer(n.clone()))
                .to_integer()
                .to_usize()
                .expect("grid index fits");
            if coeffs.len() <= idx {
                coeffs.resize(idx + 1, Rat::zero());
            }
            coeffs[idx] = c.clone();
        }
        (base, coeffs)
    }

    fn from_grid(base: &Rat, n: &BigInt, coeffs: &[Rat]) -> ExpSum {
        let mut out = ExpSum::zero();
        for (idx, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let e = base + Rat::new(BigInt::from(idx), n.clone());
                out.terms.insert(e, c.clone());
            }
        }
        out
    }

    fn grid_unit(sums: &[&ExpSum]) -> BigInt {
        let mut n = BigInt::one();
        for s in sums {
            for e in s.terms.keys() {
                n = num_integer::Integer::lcm(&n, e.denom());
            }
        }
        n
    }

    /// Exact quotient by a divisor of `self` (up to a monomial factor).
    fn div_exact(&self, g: &ExpSum) -> ExpSum {
        let n = ExpSum::grid_unit(&[self, g]);
        let (base_a, mut rem) = self.to_grid(&n);
        let (base_g, div) = g.to_grid(&n);
        let mut quo = vec![Rat::zero(); rem.len().saturating_sub(div.len()) + 1];
        let lead = div.last().unwrap().clone();
        while rem.iter().any(|c| !c.is_zero()) {
            while matches!(rem.last(), Some(c) if c.is_zero()) {
                rem.pop();
            }
            assert!(rem.len() >= div.len(), "inexact grid division");
            let k = rem.len() - div.len();
            let c = rem.last().unwrap() / &lead;
            for (i, d) in div.iter().enumerate() {
                let delta = &c * d;
                rem[k + i] -= delta;
            }
            quo[k] = c;
        }
        ExpSum::from_grid(&(base_a - base_g), &n, &quo)
    }

    /// Monic gcd viewed as Laurent polynomials on a common grid, with
    /// valuation normalized to exponent 0.
    fn gcd(&self, other: &ExpSum) -> ExpSum {
        let n = ExpSum::grid_unit(&[self, other]);
        let (_, mut a) = self.to_grid(&n);
        let (_, mut b) = other.to_grid(&n);
        while b.iter().any(|c| !c.is_zero()) {
            // a mod b
            let lead = b.last().unwrap().clone();
            while a.len() >= b.len() {
                let k = a.len() - b.len();
                let c = a.last().unwrap() / &lead;
                for (i, d) in b.iter().enumerate() {
                    let delta = &c * d;
                    a[k + i] -= delta;
                }
                while matches!(a.last(), Some(c) if c.is_zero()) {
                    a.pop();
                }
                if a.is_empty() {
                    break;
                }
            }
            std::mem::swap(&mut a, &mut b);
            while matches!(b.last(), Some(c) if c.is_zero()) {
                b.pop();
            }
        }
        if a.is_empty() {
            return ExpSum::zero();
        }
        let lead = a.last().unwrap().clone();
        for c in a.iter_mut() {
            *c /= &lead;
        }
        ExpSum::from_grid(&Rat::zero(), &n, &a)
    }

    /// The rational value when the sum is `c * exp(0)` or empty.
    pub fn as_rational(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (r, c) = self.terms.iter().next().unwrap();
                if r.is_zero() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

/// An element of the field `K`: a fraction of [`ExpSum`]s kept in
/// canonical form.
///
/// Canonical form: the numerator of a zero value is empty and its
/// denominator is `1`; otherwise the minimal exponent across numerator
/// and denominator is shifted to `0`, and the coefficient of the largest
/// exponent of the denominator is `1`. Fractions may still carry common
/// non-monomial factors, so equality is decided by cross-multiplication.
#[derive(Debug, Clone)]
pub struct ExpConstant {
    num: ExpSum,
    den: ExpSum,
}

impl ExpConstant {
    fn make(num: ExpSum, den: ExpSum) -> Self {
        assert!(!den.is_zero(), "zero denominator in ExpConstant");
        let mut c = ExpConstant { num, den };
        c.normalize();
        c
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = ExpSum::one();
            return;
        }
        if self.den.terms.len() > 1 && self.num.terms.len() > 1 {
            let g = self.num.gcd(&self.den);
            if g.terms.len() > 1 {
                self.num = self.num.div_exact(&g);
                self.den = self.den.div_exact(&g);
            }
        }
        let m_num = self.num.min_exp().unwrap().clone();
        let m_den = self.den.min_exp().unwrap().clone();
        let m = if m_num < m_den { m_num } else { m_den };
        if !m.is_zero() {
            let shift = -m;
            self.num = self.num.shift(&shift);
            self.den = self.den.shift(&shift);
        }
        let lead = self.den.leading().unwrap().1.clone();
        if !lead.is_one() {
            let inv = lead.recip();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    pub fn zero() -> Self {
        ExpConstant {
            num: ExpSum::zero(),
            den: ExpSum::one(),
        }
    }

    pub fn one() -> Self {
        ExpConstant::from_rat(Rat::one())
    }

    pub fn from_rat(c: Rat) -> Self {
        ExpConstant {
            num: ExpSum::from_rat(c),
            den: ExpSum::one(),
        }
    }

    pub fn from_int(c: i64) -> Self {
        ExpConstant::from_rat(rat_int(c))
    }

    /// The monomial `exp(r)`.
    pub fn exp(r: Rat) -> Self {
        ExpConstant {
            num: ExpSum::monomial(r, Rat::one()),
            den: ExpSum::one(),
        }
    }

    pub fn ratio(num: ExpSum, den: ExpSum) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(ExpConstant::make(num, den))
    }

    pub fn numerator(&self) -> &ExpSum {
        &self.num
    }

    pub fn denominator(&self) -> &ExpSum {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn add(&self, other: &ExpConstant) -> ExpConstant {
        ExpConstant::make(
            self.num
                .mul(&other.den)
                .add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> ExpConstant {
        ExpConstant {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &ExpConstant) -> ExpConstant {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ExpConstant) -> ExpConstant {
        ExpConstant::make(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &ExpConstant) -> Result<ExpConstant> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(ExpConstant::make(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn inverse(&self) -> Result<ExpConstant> {
        ExpConstant::one().div(self)
    }

    pub fn scale_rat(&self, c: &Rat) -> ExpConstant {
        ExpConstant::make(self.num.scale(c), self.den.clone())
    }

    pub fn pow(&self, n: u32) -> ExpConstant {
        let mut out = ExpConstant::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// The rational value, when the element lies in the prime field.
    pub fn as_rational(&self) -> Option<Rat> {
        let n = self.num.as_rational()?;
        let d = self.den.as_rational()?;
        Some(n / d)
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }
}

impl PartialEq for ExpConstant {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for ExpConstant {}

fn fmt_rat_coeff(c: &Rat, lead: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if lead {
        write!(f, "{}", c)
    } else if c.is_negative() {
        write!(f, " - {}", -c)
    } else {
        write!(f, " + {}", c)
    }
}

impl fmt::Display for ExpSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // largest exponent first
        for (idx, (r, c)) in self.terms.iter().rev().enumerate() {
            let lead = idx == 0;
            if r.is_zero() {
                fmt_rat_coeff(c, lead, f)?;
            } else {
                if c.is_one() {
                    if !lead {
                        write!(f, " + ")?;
                    }
                } else if (-c).is_one() {
                    write!(f, "{}", if lead { "-" } else { " - " })?;
                } else {
                    fmt_rat_coeff(c, lead, f)?;
                    write!(f, "*")?;
                }
                write!(f, "exp({})", r)?;
            }
        }
        Ok(())
    }
}

impl ExpSum {
    /// True when rendering needs parentheses inside a product.
    pub fn is_single_term(&self) -> bool {
        self.terms.len() <= 1
    }
}

impl fmt::Display for ExpConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == ExpSum::one() {
            return write!(f, "{}", self.num);
        }
        if self.num.is_single_term() {
            write!(f, "{}", self.num)?;
        } else {
            write!(f, "({})", self.num)?;
        }
        if self.den.is_single_term() {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(r: i64) -> ExpConstant {
        ExpConstant::exp(rat_int(r))
    }

    #[test]
    fn rational_addition() {
        let half = ExpConstant::from_rat(rat(1, 2));
        assert_eq!(half.add(&half), ExpConstant::one());
    }

    #[test]
    fn additive_inverse_of_monomial() {
        let a = e(1);
        assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn term_collection() {
        // (exp(1) + exp(-1)) + exp(1) = 2*exp(1) + exp(-1), merged by hand
        let sum = e(1).add(&e(-1)).add(&e(1));
        let expected = ExpConstant::ratio(
            ExpSum::monomial(rat_int(1), rat_int(2)).add(&ExpSum::monomial(rat_int(-1), Rat::one())),
            ExpSum::one(),
        )
        .unwrap();
        assert_eq!(sum, expected);
    }

    #[test]
    fn exponent_cancellation() {
        assert!(e(1).mul(&e(-1)).is_one());
        assert!(ExpConstant::from_int(2)
            .mul(&ExpConstant::from_rat(rat(1, 2)))
            .is_one());
    }

    #[test]
    fn product_expansion() {
        // (exp(1) - 1)(exp(1) + 1) = exp(2) - 1, expanded by hand
        let one = ExpConstant::one();
        let p = e(1).sub(&one).mul(&e(1).add(&one));
        assert_eq!(p, e(2).sub(&one));
    }

    #[test]
    fn division_multiplies_back() {
        let one = ExpConstant::one();
        let b = e(1).add(&one);
        let q = one.div(&b).unwrap();
        assert_eq!(q.mul(&b), one);
        // canonical form keeps the denominator
        assert_eq!(q.denominator(), &e(1).add(&one).num);

        let a = e(2).sub(&one);
        let c = e(1).sub(&one);
        let q = a.div(&c).unwrap();
        assert_eq!(q.mul(&c), a);
        assert_eq!(q, e(1).add(&one));
    }

    #[test]
    fn division_by_zero_rejected() {
        assert_eq!(
            e(1).div(&ExpConstant::zero()),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn zero_test_on_differences() {
        let x = e(2).div(&e(1).add(&ExpConstant::one())).unwrap();
        assert!(x.sub(&x).is_zero());
    }

    #[test]
    fn canonical_form_shifts_minimal_exponent() {
        // 2*exp(1) / exp(1) normalizes to 2
        let c = ExpConstant::ratio(
            ExpSum::monomial(rat_int(1), rat_int(2)),
            ExpSum::monomial(rat_int(1), Rat::one()),
        )
        .unwrap();
        assert_eq!(c.as_rational(), Some(rat_int(2)));
    }

    #[test]
    fn display_round_shapes() {
        assert_eq!(ExpConstant::from_rat(rat(1, 2)).to_string(), "1/2");
        assert_eq!(e(1).to_string(), "exp(1)");
        // the minimal exponent is shifted to 0
        assert_eq!(
            e(1).add(&e(-1)).add(&e(1)).to_string(),
            "(2*exp(2) + 1)/exp(1)"
        );
        let one = ExpConstant::one();
        assert_eq!(one.div(&e(1).add(&one)).unwrap().to_string(), "1/(exp(1) + 1)");
    }
}
