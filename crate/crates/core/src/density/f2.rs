//! The split algebra F × F: pair densities, covariances and second moments.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::closed::alpha_moment;
use super::value::{q_pow, serde_rational, DensityValue};
use crate::error::{Error, Result};
use crate::padic::PadicNumber;

fn qr(q: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(q))
}

/// `(A, B)` with ρ_{F²,n}(x, y) = A‖x−y‖ − B‖x−y‖⁴ on O_F², B = 0 for n = 2.
pub fn f2_constants(q: u64, n: u32) -> Result<(BigRational, BigRational)> {
    if n < 2 {
        return Err(Error::InvalidInput("n must be ≥ 2".into()));
    }
    let q = qr(q);
    let one = BigRational::one();
    let s2 = &q * &q + &q + &one;
    let a = &q * &q / &s2;
    let b = if n >= 3 {
        num_traits::pow(q.clone(), 3) / ((&q + &one) * (&q + &one) * &s2)
    } else {
        BigRational::zero()
    };
    Ok((a, b))
}

fn norm(x: &PadicNumber) -> BigRational {
    if x.is_zero() {
        BigRational::zero()
    } else {
        q_pow(x.p(), -x.valuation())
    }
}

/// ρ_{F²,n}(x, y).
pub fn rho_f2(x: &PadicNumber, y: &PadicNumber, n: u32) -> Result<DensityValue> {
    if x.p() != y.p() {
        return Err(Error::Mismatch);
    }
    let q = x.p();
    let (a, b) = f2_constants(q, n)?;
    let diff = x.sub(y)?;
    let one = BigRational::one();
    let (nx, ny) = (norm(x), norm(y));
    let eval = |h: &BigRational| -> BigRational {
        match (nx <= one, ny <= one) {
            (true, true) => &a * h - &b * num_traits::pow(h.clone(), 4),
            (true, false) => (&a - &b) / (&ny * &ny),
            (false, true) => (&a - &b) / (&nx * &nx),
            (false, false) => {
                let s = &nx * &ny;
                &a * h / num_traits::pow(s.clone(), 3)
                    - &b * num_traits::pow(h.clone(), 4) / num_traits::pow(s, 6)
            }
        }
    };
    if diff.is_zero() {
        if x == y {
            return Ok(DensityValue::zero());
        }
        let bound = q_pow(q, -diff.valuation());
        let hi = eval(&bound).max(BigRational::zero());
        let cap = if nx <= one && ny <= one {
            &a * &bound
        } else {
            hi.clone()
        };
        return Ok(DensityValue::enclosure(BigRational::zero(), cap.max(hi)));
    }
    Ok(DensityValue::exact(eval(&norm(&diff))))
}

/// `∫∫_{F²} ρ_{F²,n} = E[Z(Z − 1)]` for Z the number of roots in F.
pub fn rho_f2_mass(q: u64, n: u32) -> Result<BigRational> {
    let (a, b) = f2_constants(q, n)?;
    let a1 = alpha_moment(1, q);
    let a4 = alpha_moment(4, q);
    let inside = &a * q_pow(q, 1) * &a1 - &b * q_pow(q, 4) * &a4;
    let mixed = BigRational::from_integer(2.into()) * (&a - &b) * q_pow(q, -1);
    let outside = q_pow(q, -2) * (&a * &a1 - &b * &a4);
    Ok(inside + mixed + outside)
}

/// `∫∫` of ρ_{F²,n} over a cell `U × V` of O_F² with U, V classes mod
/// p^k, given `‖u − v‖` for distinct classes or `None` for U = V.
pub fn f2_cell_integral(q: u64, n: u32, k: u32, dist: Option<&BigRational>) -> Result<BigRational> {
    let (a, b) = f2_constants(q, n)?;
    let k = k as i64;
    Ok(match dist {
        Some(h) => (&a * h - &b * num_traits::pow(h.clone(), 4)) * q_pow(q, -2 * k),
        None => {
            q_pow(q, -k)
                * (&a * q_pow(q, -2 * k) * q_pow(q, 1) * alpha_moment(1, q)
                    - &b * q_pow(q, -5 * k) * q_pow(q, 4) * alpha_moment(4, q))
        }
    })
}

/// Covariance of root counts in two disjoint balls of O_F.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallCovariance {
    /// `Cov(Z_U, Z_V) / (E[Z_U] E[Z_V])`.
    #[serde(with = "serde_rational")]
    pub normalized: BigRational,
    #[serde(with = "serde_rational")]
    pub raw: BigRational,
    #[serde(with = "serde_rational")]
    pub mean_u: BigRational,
    #[serde(with = "serde_rational")]
    pub mean_v: BigRational,
}

fn check_power_of_q(x: &BigRational, q: u64, what: &str) -> Result<()> {
    let mut t = x.clone();
    let qq = qr(q);
    if t <= BigRational::zero() || t > BigRational::one() {
        return Err(Error::InvalidInput(format!("{what} must be in (0, 1]")));
    }
    while t < BigRational::one() {
        t *= &qq;
    }
    if !t.is_one() {
        return Err(Error::InvalidInput(format!(
            "{what} must be a power of 1/q"
        )));
    }
    Ok(())
}

pub fn covariance_disjoint_balls(
    dist: &BigRational,
    n: u32,
    q: u64,
    lam_u: &BigRational,
    lam_v: &BigRational,
) -> Result<BallCovariance> {
    for (x, w) in [
        (dist, "distance"),
        (lam_u, "ball measure"),
        (lam_v, "ball measure"),
    ] {
        check_power_of_q(x, q, w)?;
    }
    if dist <= lam_u || dist <= lam_v {
        return Err(Error::OverlappingBalls);
    }
    let (a, b) = f2_constants(q, n)?;
    let c = qr(q) / (qr(q) + BigRational::one());
    let mean_u = &c * lam_u;
    let mean_v = &c * lam_v;
    let joint = (&a * dist - &b * num_traits::pow(dist.clone(), 4)) * lam_u * lam_v;
    let raw = &joint - &mean_u * &mean_v;
    let normalized = &raw / (&mean_u * &mean_v);
    Ok(BallCovariance {
        normalized,
        raw,
        mean_u,
        mean_v,
    })
}

/// `E[Z_U Z_V]` for balls V ⊆ U of O_F.
pub fn second_moment_nested(
    lam_u: &BigRational,
    lam_v: &BigRational,
    n: u32,
    q: u64,
) -> Result<BigRational> {
    if lam_v.is_zero() {
        return Ok(BigRational::zero());
    }
    check_power_of_q(lam_u, q, "ball measure")?;
    check_power_of_q(lam_v, q, "ball measure")?;
    if lam_v > lam_u {
        return Err(Error::InvalidInput("V must be contained in U".into()));
    }
    let (a, b) = f2_constants(q, n)?;
    let diag = qr(q) / (qr(q) + BigRational::one()) * lam_v;
    let lin = &a * q_pow(q, 1) * alpha_moment(1, q) * lam_u * lam_u;
    let quartic = &b * q_pow(q, 4) * alpha_moment(4, q) * num_traits::pow(lam_u.clone(), 5);
    Ok(diag + (lin - quartic) * lam_v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::value::rat;

    #[test]
    fn total_mass_q2() {
        assert_eq!(rho_f2_mass(2, 3).unwrap(), rat(25, 31));
    }

    #[test]
    fn cells_partition_the_square() {
        for n in [2, 3] {
            let k = 3;
            let mut total = BigRational::zero();
            for u in 0..8i64 {
                for v in 0..8i64 {
                    let d = if u == v {
                        None
                    } else {
                        Some(q_pow(2, -((u - v).abs().trailing_zeros() as i64)))
                    };
                    total += f2_cell_integral(2, n, k, d.as_ref()).unwrap();
                }
            }
            let (a, b) = f2_constants(2, n).unwrap();
            let whole = a * q_pow(2, 1) * alpha_moment(1, 2) - b * q_pow(2, 4) * alpha_moment(4, 2);
            assert_eq!(total, whole);
        }
    }
}
