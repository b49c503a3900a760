//! Elements of Q_p with explicit relative precision.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::zp::max_precision;
use crate::error::{Error, Result};

#[inline]
fn pw(p: u64, k: u32) -> u64 {
    p.pow(k)
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(m as i128) as u64
}

/// `unit · p^valuation`, with `unit` known modulo `p^precision`.
///
/// A zero `unit` marks a value indistinguishable from 0; its `valuation`
/// then holds the absolute precision and `precision` is 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PadicNumber {
    p: u64,
    unit: u64,
    valuation: i64,
    precision: u32,
}

impl PadicNumber {
    pub fn zero(p: u64, abs_precision: i64) -> Self {
        PadicNumber {
            p,
            unit: 0,
            valuation: abs_precision,
            precision: 0,
        }
    }

    pub fn one(p: u64, precision: u32) -> Self {
        Self::from_i64(p, 1, precision)
    }

    fn check_prec(p: u64, precision: u32) {
        assert!(
            precision <= max_precision(p),
            "relative precision {precision} exceeds the word-size cap for p = {p}"
        );
    }

    /// Integer `a` with `precision` significant digits; 0 becomes a zero
    /// known to absolute precision `precision`.
    pub fn from_i64(p: u64, a: i64, precision: u32) -> Self {
        Self::from_bigint(p, &BigInt::from(a), precision)
    }

    pub fn from_bigint(p: u64, a: &BigInt, precision: u32) -> Self {
        Self::check_prec(p, precision);
        if a.is_zero() {
            return Self::zero(p, precision as i64);
        }
        let bp = BigInt::from(p);
        let mut a = a.clone();
        let mut v = 0i64;
        while (&a % &bp).is_zero() {
            a /= &bp;
            v += 1;
        }
        let m = BigInt::from(pw(p, precision));
        let unit = a.mod_floor(&m).to_u64().unwrap();
        PadicNumber {
            p,
            unit,
            valuation: v,
            precision,
        }
    }

    pub fn from_rational(p: u64, r: &BigRational, precision: u32) -> Self {
        if r.is_zero() {
            return Self::zero(p, precision as i64);
        }
        let num = Self::from_bigint(p, r.numer(), precision);
        let den = Self::from_bigint(p, r.denom(), precision);
        num.div(&den).expect("nonzero denominator")
    }

    /// The class of `residue` modulo `p^abs_precision`.
    pub fn from_residue(p: u64, residue: u64, abs_precision: u32) -> Self {
        Self::check_prec(p, abs_precision);
        let residue = residue % pw(p, abs_precision);
        if residue == 0 {
            return Self::zero(p, abs_precision as i64);
        }
        let mut u = residue;
        let mut v = 0u32;
        while u % p == 0 {
            u /= p;
            v += 1;
        }
        PadicNumber {
            p,
            unit: u,
            valuation: v as i64,
            precision: abs_precision - v,
        }
    }

    pub fn from_parts(p: u64, unit: u64, valuation: i64, precision: u32) -> Result<Self> {
        Self::check_prec(p, precision);
        if unit == 0 {
            return Ok(Self::zero(p, valuation));
        }
        if unit % p == 0 || precision == 0 {
            return Err(Error::InvalidInput("unit must be coprime to p".into()));
        }
        Ok(PadicNumber {
            p,
            unit: unit % pw(p, precision),
            valuation,
            precision,
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }
    #[inline]
    pub fn unit(&self) -> u64 {
        self.unit
    }
    #[inline]
    pub fn is_zero(&self) -> bool {
        self.unit == 0
    }
    /// Valuation; for a flagged zero this is the absolute precision.
    #[inline]
    pub fn valuation(&self) -> i64 {
        self.valuation
    }
    #[inline]
    pub fn precision(&self) -> u32 {
        self.precision
    }
    #[inline]
    pub fn abs_precision(&self) -> i64 {
        self.valuation + self.precision as i64
    }

    /// Drop digits so that at most `abs` absolute digits remain.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        if abs >= self.abs_precision() {
            return self.clone();
        }
        if self.is_zero() || abs <= self.valuation {
            return Self::zero(self.p, abs.min(self.valuation));
        }
        let k = (abs - self.valuation) as u32;
        PadicNumber {
            unit: self.unit % pw(self.p, k),
            precision: k,
            ..self.clone()
        }
    }

    /// Residue of an integral element modulo `p^k`, `k ≤ abs_precision`.
    pub fn residue(&self, k: u32) -> Result<u64> {
        if (k as i64) > self.abs_precision() {
            return Err(Error::PrecisionExhausted(format!("{k} digits requested")));
        }
        if self.valuation < 0 {
            return Err(Error::InvalidInput("element is not integral".into()));
        }
        if self.is_zero() || self.valuation >= k as i64 {
            return Ok(0);
        }
        let m = pw(self.p, k);
        Ok(mulmod(self.unit % m, pw(self.p, self.valuation as u32), m))
    }

    /// Representative `unit · p^valuation` as an exact rational.
    pub fn to_rational(&self) -> BigRational {
        let u = BigRational::from_integer(BigInt::from(self.unit));
        let pp = BigRational::from_integer(BigInt::from(self.p));
        if self.valuation >= 0 {
            u * num_traits::pow(pp, self.valuation as usize)
        } else {
            u / num_traits::pow(pp, (-self.valuation) as usize)
        }
    }

    /// Centered integer representative when integral.
    pub fn to_bigint_centered(&self) -> Option<BigInt> {
        if self.valuation < 0 && !self.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        let m = BigInt::from(pw(self.p, self.precision));
        let mut u = BigInt::from(self.unit);
        if &u * 2 > m {
            u -= &m;
        }
        Some(u * num_traits::pow(BigInt::from(self.p), self.valuation as usize))
    }

    fn same(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::Mismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        let p = self.p;
        let abs = self.abs_precision().min(other.abs_precision());
        let v = self.valuation.min(other.valuation);
        if abs <= v {
            return Ok(Self::zero(p, abs));
        }
        let k = (abs - v) as u32;
        let m = pw(p, k);
        let term = |x: &Self| -> u64 {
            let shift = x.valuation - v;
            if x.is_zero() || shift >= k as i64 {
                0
            } else {
                mulmod(x.unit % m, pw(p, shift as u32), m)
            }
        };
        let s = ((term(self) as u128 + term(other) as u128) % m as u128) as u64;
        if s == 0 {
            return Ok(Self::zero(p, abs));
        }
        let mut u = s;
        let mut w = 0u32;
        while u % p == 0 {
            u /= p;
            w += 1;
        }
        Ok(PadicNumber {
            p,
            unit: u,
            valuation: v + w as i64,
            precision: k - w,
        })
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let m = pw(self.p, self.precision);
        PadicNumber {
            unit: m - self.unit,
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.p, self.valuation + other.valuation));
        }
        let k = self.precision.min(other.precision);
        let m = pw(self.p, k);
        Ok(PadicNumber {
            p: self.p,
            unit: mulmod(self.unit % m, other.unit % m, m),
            valuation: self.valuation + other.valuation,
            precision: k,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByIndistinguishableZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.p, self.valuation - other.valuation));
        }
        let k = self.precision.min(other.precision);
        let m = pw(self.p, k);
        Ok(PadicNumber {
            p: self.p,
            unit: mulmod(self.unit % m, inv_mod(other.unit % m, m), m),
            valuation: self.valuation - other.valuation,
            precision: k,
        })
    }

    pub fn inv(&self) -> Result<Self> {
        Self::one(self.p, self.precision.max(1)).div(self)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::one(self.p, self.precision.max(1));
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Multiply by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        PadicNumber {
            valuation: self.valuation + k,
            ..self.clone()
        }
    }

    /// `(unit residue, valuation)` equality up to the smaller precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        match self.sub(other) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O({}^{})", self.p, self.valuation);
        }
        let r = self.to_rational();
        let shown = if r.denom().is_one() {
            r.numer().to_string()
        } else {
            r.to_string()
        };
        write!(f, "{} + O({}^{})", shown, self.p, self.abs_precision())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(p: u64, a: i64) -> PadicNumber {
        PadicNumber::from_i64(p, a, 20)
    }

    #[test]
    fn unit_product() {
        let x = n(2, 3).mul(&n(2, 5)).unwrap();
        assert_eq!(x.valuation(), 0);
        assert_eq!(x.to_rational(), BigRational::from_integer(15.into()));
    }

    #[test]
    fn two_plus_two() {
        let x = n(2, 2).add(&n(2, 2)).unwrap();
        assert_eq!(x.valuation(), 2);
        assert_eq!(x.unit(), 1);
    }

    #[test]
    fn cancellation_loses_precision() {
        let a = PadicNumber::from_i64(3, 1 + 81, 10);
        let b = PadicNumber::from_i64(3, 1, 10);
        let d = a.sub(&b).unwrap();
        assert_eq!(d.valuation(), 4);
        assert_eq!(d.abs_precision(), 10);
        assert_eq!(d.precision(), 6);
    }

    #[test]
    fn division_by_zero_flag() {
        let z = PadicNumber::zero(5, 10);
        assert_eq!(n(5, 3).div(&z), Err(Error::DivisionByIndistinguishableZero));
    }

    #[test]
    fn rational_roundtrip() {
        let r = BigRational::new(7.into(), 12.into());
        let x = PadicNumber::from_rational(2, &r, 30);
        assert_eq!(x.valuation(), -2);
        let back = x.mul(&n(2, 12)).unwrap();
        assert!(back.agrees_with(&n(2, 7)));
    }

    #[test]
    fn negative_centered() {
        assert_eq!(n(7, -5).to_bigint_centered().unwrap(), BigInt::from(-5));
    }
}
