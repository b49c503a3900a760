//! Closed-form densities for the base field, quadratic and prime-degree
//! extensions, and their integrated masses.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

use super::value::{q_pow, DensityValue, QPow};
use crate::catalog::{ExtensionField, Ramification};
use crate::error::{Error, Result};
use crate::padic::zp::is_prime;

fn qr(q: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(q))
}

/// `(q^{k+1} − q^r)/(q^{k+1} − 1)`.
pub fn generator_constant(q: u64, r: u32, k: u32) -> BigRational {
    let a = q_pow(q, k as i64 + 1);
    (&a - q_pow(q, r as i64)) / (a - BigRational::one())
}

/// `∫_{O_K} ‖t‖^r dt = q^f/(q^f + 1)`.
pub fn unit_ball_norm_integral(q: u64, f: u32) -> BigRational {
    let qf = q_pow(q, f as i64);
    &qf / (&qf + BigRational::one())
}

/// Density of roots in F at a point of norm `x_norm`.
pub fn rho_base(q: u64, x_norm: &BigRational, n: u32) -> Result<DensityValue> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be ≥ 1".into()));
    }
    let c = qr(q) / (qr(q) + BigRational::one());
    if *x_norm <= BigRational::one() {
        Ok(DensityValue::exact(c))
    } else {
        Ok(DensityValue::exact(c / (x_norm * x_norm)))
    }
}

fn check_unit_coeff(delta: &QPow) -> Result<()> {
    if !delta.is_zero() && !delta.coeff.is_one() {
        return Err(Error::InvalidDistance(format!(
            "{delta} is not a power of q"
        )));
    }
    Ok(())
}

/// Whether `q^exp` is a distance to F realized by some x ∈ O_K, for an
/// unramified or totally ramified K.
pub fn attainable_distance(ext: &ExtensionField, exp: Ratio<i64>) -> bool {
    if exp > Ratio::from_integer(0) {
        return false;
    }
    match ext.ramification() {
        Ramification::Base => false,
        Ramification::Unramified => exp.is_integer(),
        Ramification::TotallyRamified => {
            let k = -exp * Ratio::from_integer(ext.r as i64);
            k.is_integer() && k.to_integer() % ext.r as i64 != 0
        }
    }
}

fn check_delta(delta: &QPow, ext: &ExtensionField) -> Result<()> {
    check_unit_coeff(delta)?;
    if !delta.is_zero() && !attainable_distance(ext, delta.exp) {
        return Err(Error::InvalidDistance(format!(
            "q^({}) is not attainable in {}",
            delta.exp, ext.id
        )));
    }
    Ok(())
}

fn evaluate_terms(terms: &[(QPow, u32)], delta: &QPow, q: u64) -> Result<DensityValue> {
    if delta.is_zero() {
        return Ok(DensityValue::zero());
    }
    let mut acc = BigRational::zero();
    for (c, d) in terms {
        acc += c.mul(&delta.pow(*d)).to_rational(q).ok_or_else(|| {
            Error::InvalidDistance(format!("q^({}) gives an irrational density", delta.exp))
        })?;
    }
    Ok(DensityValue::exact(acc))
}

/// The density on O_K of a quadratic K as `Σ c_i · δ^{d_i}`.
pub fn quadratic_terms(ext: &ExtensionField, n: u32) -> Result<Vec<(QPow, u32)>> {
    if ext.r != 2 {
        return Err(Error::UnsupportedDegree(ext.r));
    }
    if n < 2 {
        return Err(Error::InvalidInput("n must be ≥ 2".into()));
    }
    let q = ext.q();
    let qq = qr(q);
    let s2 = &qq * &qq + &qq + BigRational::one();
    let mut terms = Vec::new();
    if ext.is_unramified() {
        terms.push((QPow::rational(&qq * &qq / &s2), 1));
        if n >= 3 {
            let b = num_traits::pow(qq.clone(), 3) / ((&qq * &qq + BigRational::one()) * &s2);
            terms.push((QPow::rational(b), 4));
        }
    } else {
        let d = ext.disc_norm();
        terms.push((QPow::new(&d / &s2, Ratio::new(5, 2)), 1));
        if n >= 3 {
            let b = &d * num_traits::pow(qq.clone(), 3) / ((&qq + BigRational::one()) * &s2);
            terms.push((QPow::rational(b), 4));
        }
    }
    Ok(terms)
}

/// Density at a point x ∈ O_K of a quadratic K with `dist(x, F) = delta`.
pub fn rho_quadratic(delta: &QPow, ext: &ExtensionField, n: u32) -> Result<DensityValue> {
    let terms = quadratic_terms(ext, n)?;
    check_delta(delta, ext)?;
    evaluate_terms(&terms, delta, ext.q())
}

/// The degree-r density of a prime-degree K as `c · δ^{r(r−1)/2}`.
pub fn prime_degree_terms(ext: &ExtensionField) -> Result<(QPow, u32)> {
    let r = ext.r;
    if !is_prime(r as u64) {
        return Err(Error::NonPrimeDegree(r));
    }
    let q = ext.q();
    let d = r * (r - 1) / 2;
    let c = match ext.ramification() {
        Ramification::Unramified => QPow::rational(generator_constant(q, r, r)),
        Ramification::TotallyRamified => {
            let den = q_pow(q, r as i64 + 1) - BigRational::one();
            QPow::new(
                ext.disc_norm() * (qr(q) - BigRational::one()) / den,
                Ratio::new(3 * r as i64 - 1, 2),
            )
        }
        Ramification::Base => return Err(Error::NonPrimeDegree(r)),
    };
    Ok((c, d))
}

/// Density for n = r at a point x ∈ O_K of a prime-degree K.
pub fn rho_prime_degree_minimal(delta: &QPow, ext: &ExtensionField) -> Result<DensityValue> {
    let (c, d) = prime_degree_terms(ext)?;
    check_delta(delta, ext)?;
    evaluate_terms(&[(c, d)], delta, ext.q())
}

/// Density at x with `O_F[x] = O_K` for an unramified K of degree r.
pub fn rho_unramified_generator(n: u32, r: u32, q: u64) -> Result<DensityValue> {
    if r == 0 || n < r {
        return Err(Error::InvalidInput(format!(
            "need n ≥ r ≥ 1, got n = {n}, r = {r}"
        )));
    }
    let k = n.min(2 * r - 1);
    Ok(DensityValue::exact(generator_constant(q, r, k)))
}

/// `α_d = (q − 1)/(q^{d+1} − 1)`.
pub fn alpha_moment(d: u32, q: u64) -> BigRational {
    (qr(q) - BigRational::one()) / (q_pow(q, d as i64 + 1) - BigRational::one())
}

/// `(∫_{O_K} dist(x,F)^d dx, ∫_{m_K} dist(x,F)^d dx)` for a quadratic K.
pub fn dist_moment_integrals(ext: &ExtensionField, d: u32) -> Result<(QPow, QPow)> {
    if ext.r != 2 {
        return Err(Error::UnsupportedDegree(ext.r));
    }
    if d == 0 {
        return Err(Error::InvalidInput("d must be ≥ 1".into()));
    }
    let q = ext.q();
    let a = alpha_moment(d, q);
    Ok(if ext.is_unramified() {
        (
            QPow::rational(&a * q_pow(q, d as i64)),
            QPow::rational(&a * q_pow(q, -2)),
        )
    } else {
        let half = Ratio::new(d as i64, 2);
        (
            QPow::new(a.clone(), half),
            QPow::new(a, half - Ratio::from_integer(1)),
        )
    })
}

/// ρ_n(K) for a quadratic K, in closed form.
pub fn rho_mass_quadratic(ext: &ExtensionField, n: u32) -> Result<BigRational> {
    if ext.r != 2 {
        return Err(Error::UnsupportedDegree(ext.r));
    }
    if n < 2 {
        return Err(Error::InvalidInput("n must be ≥ 2".into()));
    }
    let q = qr(ext.q());
    let one = BigRational::one();
    let q2 = &q * &q;
    let q4 = &q2 * &q2;
    let s2 = &q2 + &q + &one;
    let s4 = &q4 + &q2 * &q + &q2 + &q + &one;
    Ok(match (ext.is_unramified(), n) {
        (true, 2) => (&q2 - &q + &one) / s2,
        (true, _) => (q4 + one) / s4,
        (false, 2) => ext.disc_norm() * q2 / s2,
        (false, _) => ext.disc_norm() * &q2 * (q2 + one) / s4,
    })
}

/// ρ_n(K) for a quadratic K by integrating the pointwise density over
/// O_K and m_K.
pub fn rho_mass_quadratic_integrated(ext: &ExtensionField, n: u32) -> Result<BigRational> {
    let q = ext.q();
    let mut acc = BigRational::zero();
    for (c, d) in quadratic_terms(ext, n)? {
        let (o, m) = dist_moment_integrals(ext, d)?;
        for part in [o, m] {
            acc += c.mul(&part).to_rational(q).ok_or(Error::Mismatch)?;
        }
    }
    Ok(acc)
}

/// `∫_{O_K} dist(x, F)^d dx` for a prime-degree K, as a sum of terms.
pub fn prime_degree_dist_moment(ext: &ExtensionField, d: u32) -> Result<Vec<QPow>> {
    let r = ext.r as i64;
    let q = ext.q();
    let geometric = BigRational::one() / (BigRational::one() - q_pow(q, -(r - 1 + d as i64)));
    match ext.ramification() {
        Ramification::Unramified => {
            let c = (BigRational::one() - q_pow(q, -(r - 1))) * geometric;
            Ok(vec![QPow::rational(c)])
        }
        Ramification::TotallyRamified => Ok((1..r)
            .map(|j| {
                let w = (q_pow(q, -(j - 1)) - q_pow(q, -j)) * &geometric;
                QPow::new(w, Ratio::new(-j * d as i64, r))
            })
            .collect()),
        Ramification::Base => Err(Error::NonPrimeDegree(1)),
    }
}

/// ρ_r(K) for a prime-degree K, integrating the degree-r density.
pub fn rho_mass_prime_minimal(ext: &ExtensionField) -> Result<BigRational> {
    let (c, d) = prime_degree_terms(ext)?;
    let q = ext.q();
    let m_factor = if ext.is_unramified() {
        q_pow(q, -(ext.r as i64) - d as i64)
    } else {
        q_pow(q, -1)
    };
    let mut acc = BigRational::zero();
    for t in prime_degree_dist_moment(ext, d)? {
        acc += c.mul(&t).to_rational(q).ok_or(Error::Mismatch)?;
    }
    Ok(&acc + &acc * m_factor)
}

/// `∫_{class} ρ_{K,n}` over a class of O_K modulo p^k for a quadratic K
/// presented with an integral basis {1, θ}; `b_valuation` is the
/// valuation of the θ-coordinate of the class, `None` when it is 0 mod p^k.
pub fn quadratic_class_integral(
    ext: &ExtensionField,
    n: u32,
    k: u32,
    b_valuation: Option<u32>,
) -> Result<BigRational> {
    let q = ext.q();
    let shift = if ext.is_unramified() {
        Ratio::from_integer(0)
    } else {
        Ratio::new(-1, 2)
    };
    let k = k as i64;
    let mut acc = BigRational::zero();
    for (c, d) in quadratic_terms(ext, n)? {
        let di = d as i64;
        let base = c.mul(&QPow::power(shift * Ratio::from_integer(di)));
        let part = match b_valuation {
            Some(v) if (v as i64) < k => {
                base.mul(&QPow::power(Ratio::from_integer(-(v as i64) * di - 2 * k)))
            }
            Some(_) => {
                return Err(Error::InvalidInput(
                    "valuation beyond the class depth".into(),
                ))
            }
            None => base
                .scale(&(alpha_moment(d, q) * q_pow(q, di)))
                .mul(&QPow::power(Ratio::from_integer(-k - k * (di + 1)))),
        };
        acc += part.to_rational(q).ok_or(Error::Mismatch)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;
    use crate::density::value::rat;

    #[test]
    fn base_branches() {
        assert_eq!(
            rho_base(2, &rat(1, 4), 3).unwrap(),
            DensityValue::exact(rat(2, 3))
        );
        assert_eq!(
            rho_base(5, &rat(5, 1), 1).unwrap(),
            DensityValue::exact(rat(1, 30))
        );
    }

    #[test]
    fn class_integrals_sum_to_ball_integral() {
        let cat = Catalog::new(2).unwrap();
        for ext in cat.of_degree(2) {
            for n in [2, 3] {
                let k = 3u32;
                let mut total = BigRational::zero();
                for b in 0..8u32 {
                    let v = if b == 0 {
                        None
                    } else {
                        Some(b.trailing_zeros())
                    };
                    total += quadratic_class_integral(ext, n, k, v).unwrap()
                        * BigRational::from_integer(8.into());
                }
                let mut whole = BigRational::zero();
                for (c, d) in quadratic_terms(ext, n).unwrap() {
                    whole += c
                        .mul(&dist_moment_integrals(ext, d).unwrap().0)
                        .to_rational(2)
                        .unwrap();
                }
                assert_eq!(total, whole, "{}", ext.id);
            }
        }
    }
}
