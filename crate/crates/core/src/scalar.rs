//! Scalar fields used throughout the crate.
//!
//! Everything algebraic is generic over [`Scalar`], which is implemented for
//! `f64` and for exact rationals ([`Q`]). The only transcendental operation the
//! group code needs is a real power `a^e` with rational exponent; on rationals it
//! succeeds only when the result is again rational.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::{BigRational, Signed as _, ToPrimitive};

use crate::error::{Error, Result};

/// Exact rational numbers.
pub type Q = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + std::fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_q(q: &Q) -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_zero(&self) -> bool;
    fn abs(&self) -> Self;
    /// `self^e` for `self > 0`. Fails on rationals when the result is irrational.
    fn powq(&self, e: &Q) -> Result<Self>;
    /// Whether arithmetic in this field is exact.
    fn is_exact() -> bool;

    fn signum_i8(&self) -> i8 {
        if self.is_zero() {
            0
        } else if *self > Self::zero() {
            1
        } else {
            -1
        }
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_q(q: &Q) -> Self {
        q_to_f64(q)
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn powq(&self, e: &Q) -> Result<Self> {
        if *self <= 0.0 {
            return Err(Error::Domain(format!("power of non-positive base {self}")));
        }
        Ok(self.powf(q_to_f64(e)))
    }
    fn is_exact() -> bool {
        false
    }
}

impl Scalar for Q {
    fn zero() -> Self {
        num::Zero::zero()
    }
    fn one() -> Self {
        num::One::one()
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn from_i64(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        q_to_f64(self)
    }
    fn is_zero(&self) -> bool {
        num::Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        num::Signed::abs(self)
    }
    fn powq(&self, e: &Q) -> Result<Self> {
        rational_pow(self, e)
            .ok_or_else(|| Error::Inexact(format!("{self}^({e}) is not rational")))
    }
    fn is_exact() -> bool {
        true
    }
}

pub fn q_to_f64(q: &Q) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // very large numerator/denominator: scale through the logarithm
            let sign = if q.is_negative() { -1.0 } else { 1.0 };
            let ln = bigint_ln(&q.numer().abs()) - bigint_ln(q.denom());
            sign * ln.exp()
        }
    }
}

fn bigint_ln(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Exact `a^e` for positive rational `a` and rational `e`, if it is rational.
pub fn rational_pow(a: &Q, e: &Q) -> Option<Q> {
    if !a.is_positive() {
        return None;
    }
    if num::Zero::is_zero(e) {
        return Some(<Q as Scalar>::one());
    }
    let p = e.numer().clone();
    let root = e.denom().to_u32()?;
    let exp = p.abs().to_u32()?;
    let base = if p.is_negative() { a.recip() } else { a.clone() };
    let num = exact_root(base.numer(), root)?;
    let den = exact_root(base.denom(), root)?;
    let r = Q::new(num, den);
    Some(num::pow::pow(r, exp as usize))
}

fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if k == 1 {
        return Some(n.clone());
    }
    let r = n.nth_root(k);
    if num::pow::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

/// Parses `"p/q"`, an integer, or a decimal literal into an exact rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad_rational(s))?;
        let d: BigInt = d.trim().parse().map_err(|_| bad_rational(s))?;
        if num::Zero::is_zero(&d) {
            return Err(bad_rational(s));
        }
        return Ok(Q::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Ok(Q::from_integer(n));
    }
    // decimal literal, read exactly as written
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').ok_or_else(|| bad_rational(s))?;
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad_rational(s));
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad_rational(s))?;
    let den = num::pow::pow(BigInt::from(10), frac.len());
    let v = Q::new(digits, den);
    Ok(if neg { -v } else { v })
}

/// Exact rational value of a finite double.
pub fn f64_to_q(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::Domain(format!("non-finite value {x}")))
}

/// Formats a rational as `"p/q"` (or `"p"` for integers).
pub fn format_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

fn bad_rational(s: &str) -> Error {
    Error::Parse(format!("not a rational number: {s:?}"))
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Q>) -> BigInt {
    values
        .into_iter()
        .fold(<BigInt as num::One>::one(), |acc, v| num::integer::lcm(acc, v.denom().clone()))
}
