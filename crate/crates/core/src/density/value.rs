//! Exact values `c·q^e` with rational exponent, and density values.

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// `q^k` for an integer k.
pub fn q_pow(q: u64, k: i64) -> BigRational {
    let m = num_traits::pow(BigInt::from(q), k.unsigned_abs() as usize);
    if k >= 0 {
        BigRational::from_integer(m)
    } else {
        BigRational::new(BigInt::one(), m)
    }
}

pub fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// `coeff · q^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPow {
    pub coeff: BigRational,
    pub exp: Ratio<i64>,
}

impl QPow {
    pub fn new(coeff: BigRational, exp: Ratio<i64>) -> Self {
        if coeff.is_zero() {
            return Self::zero();
        }
        QPow { coeff, exp }
    }

    pub fn zero() -> Self {
        QPow {
            coeff: BigRational::zero(),
            exp: Ratio::from_integer(0),
        }
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn rational(coeff: BigRational) -> Self {
        Self::new(coeff, Ratio::from_integer(0))
    }

    /// `q^exp`.
    pub fn power(exp: Ratio<i64>) -> Self {
        QPow {
            coeff: BigRational::one(),
            exp,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn mul(&self, other: &QPow) -> QPow {
        Self::new(&self.coeff * &other.coeff, self.exp + other.exp)
    }

    pub fn scale(&self, c: &BigRational) -> QPow {
        Self::new(&self.coeff * c, self.exp)
    }

    pub fn pow(&self, k: u32) -> QPow {
        if k == 0 {
            return Self::one();
        }
        Self::new(
            num_traits::pow(self.coeff.clone(), k as usize),
            self.exp * Ratio::from_integer(k as i64),
        )
    }

    /// The same value with the exponent reduced into [0, 1).
    pub fn normalize(&self, q: u64) -> QPow {
        if self.is_zero() {
            return Self::zero();
        }
        let k = self.exp.floor();
        QPow::new(&self.coeff * q_pow(q, k.to_integer()), self.exp - k)
    }

    /// The value as a rational when the exponent is integral.
    pub fn to_rational(&self, q: u64) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if !self.exp.is_integer() {
            return None;
        }
        Some(&self.coeff * q_pow(q, self.exp.to_integer()))
    }

    /// Sum of terms whose exponents all collapse to integers.
    pub fn sum_rational(terms: &[QPow], q: u64) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for t in terms {
            acc += t.to_rational(q)?;
        }
        Some(acc)
    }
}

impl fmt::Display for QPow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp.is_zero() {
            write!(f, "{}", self.coeff)
        } else {
            write!(f, "{}·q^({})", self.coeff, self.exp)
        }
    }
}

/// JSON form of a rational: numerator and denominator as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for RationalRepr {
    fn from(r: &BigRational) -> Self {
        RationalRepr {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

impl TryFrom<&RationalRepr> for BigRational {
    type Error = String;

    fn try_from(r: &RationalRepr) -> Result<Self, String> {
        let num: BigInt = r.num.parse().map_err(|e| format!("{e}"))?;
        let den: BigInt = r.den.parse().map_err(|e| format!("{e}"))?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(BigRational::new(num, den))
    }
}

/// Serde adapter for `BigRational` fields.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        RationalRepr::from(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let r = RationalRepr::deserialize(d)?;
        BigRational::try_from(&r).map_err(serde::de::Error::custom)
    }
}

/// A density or mass: exact, or a certified enclosure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityValue {
    Exact {
        #[serde(with = "serde_rational")]
        value: BigRational,
    },
    Enclosure {
        #[serde(with = "serde_rational")]
        lo: BigRational,
        #[serde(with = "serde_rational")]
        hi: BigRational,
    },
}

impl DensityValue {
    pub fn exact(value: BigRational) -> Self {
        DensityValue::Exact { value }
    }

    pub fn zero() -> Self {
        Self::exact(BigRational::zero())
    }

    /// `[lo, hi]`, collapsing to an exact value when the ends meet.
    pub fn enclosure(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "empty enclosure");
        if lo == hi {
            Self::exact(lo)
        } else {
            DensityValue::Enclosure { lo, hi }
        }
    }

    pub fn lo(&self) -> &BigRational {
        match self {
            DensityValue::Exact { value } => value,
            DensityValue::Enclosure { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> &BigRational {
        match self {
            DensityValue::Exact { value } => value,
            DensityValue::Enclosure { hi, .. } => hi,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            DensityValue::Exact { value } => Some(value),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, DensityValue::Exact { .. })
    }

    pub fn width(&self) -> BigRational {
        self.hi() - self.lo()
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        self.lo() <= x && x <= self.hi()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        assert!(!c.is_negative());
        Self::enclosure(self.lo() * c, self.hi() * c)
    }

    /// Intersection of two enclosures of the same quantity.
    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let lo = self.lo().max(other.lo()).clone();
        let hi = self.hi().min(other.hi()).clone();
        (lo <= hi).then(|| Self::enclosure(lo, hi))
    }
}

impl fmt::Display for DensityValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityValue::Exact { value } => write!(f, "{value}"),
            DensityValue::Enclosure { lo, hi } => write!(f, "[{lo}, {hi}]"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_powers_collapse() {
        let a = QPow::new(rat(1, 7), Ratio::new(5, 2));
        let d = QPow::power(Ratio::new(-3, 2));
        assert_eq!(a.mul(&d).to_rational(2), Some(rat(2, 7)));
        assert_eq!(a.to_rational(2), None);
    }

    #[test]
    fn json_shape() {
        let v = DensityValue::exact(rat(17, 31));
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"kind":"exact","value":{"num":"17","den":"31"}}"#);
        let back: DensityValue = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn enclosure_collapses() {
        assert!(DensityValue::enclosure(rat(1, 2), rat(1, 2)).is_exact());
        let e = DensityValue::enclosure(rat(1, 3), rat(1, 2));
        assert!(e.contains(&rat(2, 5)));
        assert!(!e.contains(&rat(3, 5)));
    }
}
