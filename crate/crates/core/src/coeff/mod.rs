//! Exact coefficient arithmetic: Laurent polynomials in `u = q^(1/2)` over
//! arbitrary-precision rationals, and their fraction field.
//!
//! Every scalar in the presentations lives here. Working in `u` rather than
//! `q` keeps the half-integer exponent lattice of the odd orthogonal series
//! on integer exponents, so all arithmetic is exact.

mod parse;

pub use parse::parse_ratfunc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Arbitrary-precision rational scalar.
pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoeffError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at q = {0}")]
    Pole(String),
    #[error("invalid evaluation point: {0}")]
    BadPoint(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Laurent polynomial in `u = q^(1/2)`: a map from integer u-exponent to a
/// nonzero rational coefficient. Exponent `e` stands for `q^(e/2)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HalfLaurent {
    terms: BTreeMap<i64, Rat>,
}

impl HalfLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Rat::one(), 0)
    }

    /// `c * u^e`, dropping the term when `c = 0`.
    pub fn monomial(c: Rat, e: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    pub fn from_rat(c: Rat) -> Self {
        Self::monomial(c, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_rat(Rat::from_integer(BigInt::from(c)))
    }

    /// `q^k` as `u^{2k}`.
    pub fn q_pow(k: i64) -> Self {
        Self::monomial(Rat::one(), 2 * k)
    }

    /// `u^e = q^{e/2}`.
    pub fn u_pow(e: i64) -> Self {
        Self::monomial(Rat::one(), e)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).map_or(false, |c| c.is_one())
    }

    /// True when the polynomial is `c * u^e` for a single term.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, e: i64) -> Rat {
        self.terms.get(&e).cloned().unwrap_or_else(Rat::zero)
    }

    fn insert_add(&mut self, e: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_add(*e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.insert_add(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    pub fn shift(&self, de: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + de, c.clone())).collect(),
        }
    }

    /// Leading coefficient (highest u-exponent).
    pub fn lead_coeff(&self) -> Rat {
        self.max_exp().map(|e| self.coeff(e)).unwrap_or_else(Rat::zero)
    }

    /// Rational content: gcd of coefficient numerators over lcm of denominators,
    /// signed to make the leading coefficient positive.
    pub fn content(&self) -> Rat {
        if self.is_zero() {
            return Rat::one();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut content = Rat::new(num_gcd, den_lcm);
        if self.lead_coeff().is_negative() {
            content = -content;
        }
        content
    }

    /// Division when the divisor is exact (panics on inexact division).
    fn div_exact(&self, d: &Self) -> Self {
        let (quot, rem) = self.div_rem(d);
        assert!(rem.is_zero(), "inexact polynomial division");
        quot
    }

    /// Polynomial division with remainder, treating `u^k` as a unit (the
    /// quotient and remainder are allowed arbitrary u-shifts).
    fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = Self::zero();
        let d_max = d.max_exp().unwrap();
        let d_lead = d.coeff(d_max);
        let d_min = d.min_exp().unwrap();
        let d_width = d_max - d_min;
        loop {
            if rem.is_zero() {
                break;
            }
            let r_max = rem.max_exp().unwrap();
            let r_min = rem.min_exp().unwrap();
            if r_max - r_min < d_width {
                break;
            }
            let e = r_max - d_max;
            let c = rem.coeff(r_max) / d_lead.clone();
            let t = Self::monomial(c, e);
            quot = quot.add(&t);
            rem = rem.sub(&t.mul(d));
        }
        (quot, rem)
    }

    /// Primitive normal form: min exponent 0, content 1, positive leading
    /// coefficient. Returns the normalized polynomial.
    fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let shift = -self.min_exp().unwrap();
        let content = self.content();
        let inv = content.recip();
        self.shift(shift).scale(&inv)
    }

    /// Gcd up to units (`u^k` and rationals); result in primitive normal form.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive();
        let mut b = other.primitive();
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.primitive();
        }
        a.primitive()
    }

    /// Evaluate at `u = u0` (f64).
    pub fn eval_f64(&self, u0: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * u0.powi(*e as i32))
            .sum()
    }

    /// Evaluate at an exact rational `u0`.
    pub fn eval_rat(&self, u0: &Rat) -> Option<Rat> {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let p = rat_pow(u0, *e)?;
            acc += c * p;
        }
        Some(acc)
    }
}

fn rat_pow(b: &Rat, e: i64) -> Option<Rat> {
    if e == 0 {
        return Some(Rat::one());
    }
    if b.is_zero() {
        return if e > 0 { Some(Rat::zero()) } else { None };
    }
    let mut acc = Rat::one();
    let base = if e > 0 { b.clone() } else { b.recip() };
    for _ in 0..e.unsigned_abs() {
        acc *= base.clone();
    }
    Some(acc)
}

/// Exact square root of a rational, when it exists.
fn rat_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Rat::new(n, d))
    } else {
        None
    }
}

/// Result of evaluating a coefficient at a numeric `q`.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalValue {
    Exact(Rat),
    Float(f64),
}

impl EvalValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            EvalValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            EvalValue::Float(f) => *f,
        }
    }
}

/// Element of the fraction field of [`HalfLaurent`], kept in canonical form:
/// numerator and denominator coprime, denominator with min exponent 0,
/// content 1, positive leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: HalfLaurent,
    den: HalfLaurent,
}

impl Default for RatFunc {
    fn default() -> Self {
        Self::zero()
    }
}

impl RatFunc {
    pub fn new(num: HalfLaurent, den: HalfLaurent) -> Result<Self, CoeffError> {
        if den.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(Self::canonical(num, den))
    }

    fn canonical(num: HalfLaurent, den: HalfLaurent) -> Self {
        if num.is_zero() {
            return Self {
                num: HalfLaurent::zero(),
                den: HalfLaurent::one(),
            };
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g), den.div_exact(&g))
        };
        // Unit normalization: denominator gets min exp 0, content 1, positive lead.
        let shift = -den.min_exp().unwrap();
        den = den.shift(shift);
        num = num.shift(shift);
        let c = den.content();
        if !c.is_one() {
            let inv = c.recip();
            den = den.scale(&inv);
            num = num.scale(&inv);
        }
        Self { num, den }
    }

    pub fn zero() -> Self {
        Self {
            num: HalfLaurent::zero(),
            den: HalfLaurent::one(),
        }
    }

    pub fn one() -> Self {
        Self {
            num: HalfLaurent::one(),
            den: HalfLaurent::one(),
        }
    }

    pub fn from_poly(p: HalfLaurent) -> Self {
        Self {
            num: p,
            den: HalfLaurent::one(),
        }
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_poly(HalfLaurent::from_int(c))
    }

    pub fn from_rat(c: Rat) -> Self {
        Self::from_poly(HalfLaurent::from_rat(c))
    }

    /// `q^k`.
    pub fn q_pow(k: i64) -> Self {
        Self::from_poly(HalfLaurent::q_pow(k))
    }

    /// `u^e = q^{e/2}`.
    pub fn u_pow(e: i64) -> Self {
        Self::from_poly(HalfLaurent::u_pow(e))
    }

    /// `q - 1/q`, the ubiquitous deformation factor.
    pub fn q_minus_qinv() -> Self {
        Self::q_pow(1).sub(&Self::q_pow(-1))
    }

    pub fn num(&self) -> &HalfLaurent {
        &self.num
    }

    pub fn den(&self) -> &HalfLaurent {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The Laurent-polynomial value when the denominator is trivial.
    pub fn as_poly(&self) -> Option<&HalfLaurent> {
        if self.den.is_one() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        Self::canonical(num, den)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::canonical(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn invert(&self) -> Result<Self, CoeffError> {
        if self.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(Self::canonical(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self, CoeffError> {
        Ok(self.mul(&other.invert()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self, CoeffError> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Exact or floating evaluation at `q = q0 > 0`, substituting `u = sqrt(q0)`.
    pub fn evaluate(&self, q0: &Rat) -> Result<EvalValue, CoeffError> {
        if !q0.is_positive() {
            return Err(CoeffError::BadPoint(format!("q = {q0} must be positive")));
        }
        if let Some(u0) = rat_sqrt(q0) {
            let den = self
                .den
                .eval_rat(&u0)
                .ok_or_else(|| CoeffError::BadPoint("u = 0".into()))?;
            if den.is_zero() {
                return Err(CoeffError::Pole(q0.to_string()));
            }
            let num = self
                .num
                .eval_rat(&u0)
                .ok_or_else(|| CoeffError::BadPoint("u = 0".into()))?;
            Ok(EvalValue::Exact(num / den))
        } else {
            let q = q0.to_f64().ok_or_else(|| CoeffError::BadPoint(q0.to_string()))?;
            Ok(EvalValue::Float(self.evaluate_f64(q)?))
        }
    }

    /// Floating evaluation at `q = q0 > 0`.
    pub fn evaluate_f64(&self, q0: f64) -> Result<f64, CoeffError> {
        if !(q0 > 0.0) {
            return Err(CoeffError::BadPoint(format!("q = {q0} must be positive")));
        }
        let u0 = q0.sqrt();
        let den = self.den.eval_f64(u0);
        if den == 0.0 || !den.is_finite() {
            return Err(CoeffError::Pole(format!("{q0}")));
        }
        Ok(self.num.eval_f64(u0) / den)
    }
}

fn write_rat(f: &mut fmt::Formatter<'_>, c: &Rat) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, c: &Rat, e: i64, first: bool) -> fmt::Result {
    let mag = c.abs();
    if first {
        if c.is_negative() {
            write!(f, "-")?;
        }
    } else if c.is_negative() {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    if e == 0 {
        write_rat(f, &mag)?;
        return Ok(());
    }
    if !mag.is_one() {
        write_rat(f, &mag)?;
        write!(f, "*")?;
    }
    if e == 2 {
        write!(f, "q")
    } else if e % 2 == 0 {
        write!(f, "q^({})", e / 2)
    } else {
        write!(f, "q^({}/2)", e)
    }
}

impl fmt::Display for HalfLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Highest exponent first.
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            write_term(f, c, *e, i == 0)?;
        }
        Ok(())
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> RatFunc {
        RatFunc::q_pow(1)
    }

    #[test]
    fn additive_inverse_of_deformation_factor() {
        let a = q().sub(&q().invert().unwrap());
        let b = q().invert().unwrap().sub(&q());
        assert!(a.add(&b).is_zero());
    }

    #[test]
    fn expand_q_minus_qinv_times_q() {
        let lhs = RatFunc::q_minus_qinv().mul(&q());
        let rhs = RatFunc::q_pow(2).sub(&RatFunc::one());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn half_power_squares_to_q() {
        let u = RatFunc::u_pow(1);
        assert_eq!(u.mul(&u), q());
    }

    #[test]
    fn invert_q() {
        assert_eq!(q().invert().unwrap(), RatFunc::q_pow(-1));
    }

    #[test]
    fn invert_deformation_factor() {
        // (q - 1/q)^{-1} = q/(q^2 - 1)
        let inv = RatFunc::q_minus_qinv().invert().unwrap();
        let expect = q()
            .div(&RatFunc::q_pow(2).sub(&RatFunc::one()))
            .unwrap();
        assert_eq!(inv, expect);
    }

    #[test]
    fn invert_zero_is_error() {
        assert_eq!(RatFunc::zero().invert(), Err(CoeffError::DivisionByZero));
    }

    #[test]
    fn evaluate_at_four() {
        let four = Rat::from_integer(4.into());
        let v = RatFunc::q_minus_qinv().evaluate(&four).unwrap();
        assert_eq!(v, EvalValue::Exact(Rat::new(15.into(), 4.into())));
        let v = RatFunc::u_pow(1).evaluate(&four).unwrap();
        assert_eq!(v, EvalValue::Exact(Rat::from_integer(2.into())));
    }

    #[test]
    fn evaluate_pole() {
        // q/(q-1) at q = 1
        let f = q().div(&q().sub(&RatFunc::one())).unwrap();
        let one = Rat::one();
        assert!(matches!(f.evaluate(&one), Err(CoeffError::Pole(_))));
    }

    #[test]
    fn evaluate_irrational_point_is_float() {
        let two = Rat::from_integer(2.into());
        match RatFunc::u_pow(1).evaluate(&two).unwrap() {
            EvalValue::Float(f) => assert!((f - 2f64.sqrt()).abs() < 1e-12),
            other => panic!("expected float, got {other:?}"),
        }
    }

    #[test]
    fn gcd_cancellation() {
        // (q^2 - 1)/(q - 1) = q + 1
        let num = RatFunc::q_pow(2).sub(&RatFunc::one());
        let den = q().sub(&RatFunc::one());
        let r = num.div(&den).unwrap();
        assert_eq!(r, q().add(&RatFunc::one()));
        assert!(r.is_polynomial());
    }

    fn arb_rat() -> impl Strategy<Value = Rat> {
        (-9i64..10, 1i64..5).prop_map(|(n, d)| Rat::new(n.into(), d.into()))
    }

    fn arb_poly() -> impl Strategy<Value = HalfLaurent> {
        prop::collection::vec((-4i64..5, arb_rat()), 0..4).prop_map(|ts| {
            let mut p = HalfLaurent::zero();
            for (e, c) in ts {
                p = p.add(&HalfLaurent::monomial(c, e));
            }
            p
        })
    }

    fn arb_ratfunc() -> impl Strategy<Value = RatFunc> {
        (arb_poly(), arb_poly()).prop_map(|(n, d)| {
            let d = if d.is_zero() { HalfLaurent::one() } else { d };
            RatFunc::new(n, d).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn field_axioms(a in arb_ratfunc(), b in arb_ratfunc(), c in arb_ratfunc()) {
            // Associativity and commutativity.
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            // Distributivity.
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            // Inverses.
            prop_assert!(a.sub(&a).is_zero());
            if !a.is_zero() {
                prop_assert!(a.mul(&a.invert().unwrap()).is_one());
            }
        }

        #[test]
        fn equality_by_cross_multiplication(a in arb_ratfunc(), b in arb_ratfunc()) {
            let cross = a.num().mul(b.den());
            let ssorc = b.num().mul(a.den());
            prop_assert_eq!(a == b, cross == ssorc);
        }

        #[test]
        fn display_parse_round_trip(a in arb_ratfunc()) {
            let s = a.to_string();
            let back = parse_ratfunc(&s).unwrap();
            prop_assert_eq!(a, back);
        }
    }
}
