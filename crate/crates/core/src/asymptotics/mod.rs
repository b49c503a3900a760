//! Arithmetic functions, generator counts, and the brackets and main terms
//! for the total masses ρ_n(K).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::catalog::ExtensionField;
use crate::density::{generator_constant, q_pow, serde_rational, unit_ball_norm_integral};
use crate::error::{Error, Result};

/// Sieved Möbius and totient values with divisor lists up to a limit.
#[derive(Clone, Debug)]
pub struct ArithmeticTable {
    mu: Vec<i8>,
    phi: Vec<u64>,
    divisors: Vec<Vec<u32>>,
}

impl ArithmeticTable {
    pub fn new(limit: u32) -> Self {
        let n = limit as usize + 1;
        let mut mu = vec![1i8; n];
        let mut phi: Vec<u64> = (0..n as u64).collect();
        let mut composite = vec![false; n];
        for i in 2..n {
            if composite[i] {
                continue;
            }
            for j in (i..n).step_by(i) {
                if j > i {
                    composite[j] = true;
                }
                mu[j] = -mu[j];
                phi[j] = phi[j] / i as u64 * (i as u64 - 1);
            }
            let sq = i * i;
            for j in (sq..n).step_by(sq) {
                mu[j] = 0;
            }
        }
        if n > 0 {
            mu[0] = 0;
        }
        let mut divisors = vec![Vec::new(); n];
        for d in 1..n {
            for j in (d..n).step_by(d) {
                divisors[j].push(d as u32);
            }
        }
        ArithmeticTable { mu, phi, divisors }
    }

    pub fn limit(&self) -> u32 {
        (self.mu.len() - 1) as u32
    }

    fn check(&self, n: u32) {
        assert!(n >= 1 && n <= self.limit(), "{n} outside the table range");
    }

    pub fn mobius(&self, n: u32) -> i8 {
        self.check(n);
        self.mu[n as usize]
    }

    pub fn totient(&self, n: u32) -> u64 {
        self.check(n);
        self.phi[n as usize]
    }

    pub fn divisors(&self, n: u32) -> &[u32] {
        self.check(n);
        &self.divisors[n as usize]
    }

    /// Smallest prime factor of n ≥ 2.
    pub fn smallest_prime_factor(&self, n: u32) -> u32 {
        self.divisors(n)[1]
    }

    /// `G_f = Σ_{m|f} μ(f/m) q^m`.
    pub fn generator_count(&self, f: u32, q: u64) -> BigInt {
        let mut acc = BigInt::zero();
        for &m in self.divisors(f) {
            let t = num_traits::pow(BigInt::from(q), m as usize);
            match self.mobius(f / m) {
                1 => acc += t,
                -1 => acc -= t,
                _ => {}
            }
        }
        acc
    }
}

fn table_for(n: u32) -> ArithmeticTable {
    ArithmeticTable::new(n.max(1))
}

/// Number of generators of F_{q^f} over F_q.
pub fn generator_count(f: u32, q: u64) -> Result<BigInt> {
    if f == 0 {
        return Err(Error::InvalidInput("f must be ≥ 1".into()));
    }
    Ok(table_for(f).generator_count(f, q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// n = r.
    Minimal,
    /// n ≥ 2r − 1.
    Stable,
}

/// A closed interval with exact rational ends.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bracket {
    #[serde(with = "serde_rational")]
    pub lo: BigRational,
    #[serde(with = "serde_rational")]
    pub hi: BigRational,
}

impl Bracket {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi);
        Bracket { lo, hi }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Bracket::new(&self.lo * c, &self.hi * c)
    }
}

/// Main term and bracket for `ρ_n(K)/‖D_K‖`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityTerms {
    /// `Σ_{m|f} μ(f/m) q^{m−f} = G_f/q^f`.
    #[serde(with = "serde_rational")]
    pub main_sum: BigRational,
    /// Value of the density on generators of O_K, divided by ‖D_K‖.
    #[serde(with = "serde_rational")]
    pub factor: BigRational,
    #[serde(with = "serde_rational")]
    pub center: BigRational,
    pub bracket: Bracket,
}

fn around(center: BigRational, f: u32, q: u64) -> Bracket {
    let eps = q_pow(q, -(f as i64));
    Bracket::new(
        &center - &eps,
        &center + BigRational::from_integer(4.into()) * eps,
    )
}

pub fn density_terms(r: u32, f: u32, q: u64, regime: Regime) -> Result<DensityTerms> {
    if r == 0 || f == 0 || r % f != 0 {
        return Err(Error::InvalidInput(format!("f = {f} must divide r = {r}")));
    }
    let main_sum = BigRational::new(
        generator_count(f, q)?,
        num_traits::pow(BigInt::from(q), f as usize),
    );
    let factor = match regime {
        Regime::Minimal => generator_constant(q, r, r),
        Regime::Stable => unit_ball_norm_integral(q, f),
    };
    let center = &factor * &main_sum;
    Ok(DensityTerms {
        bracket: around(center.clone(), f, q),
        main_sum,
        factor,
        center,
    })
}

/// Bracket for `ρ_n(K)/‖D_K‖` of an unramified K of degree r, r ≤ n ≤ 2r − 1.
pub fn unramified_bracket(r: u32, n: u32, q: u64) -> Result<Bracket> {
    if r == 0 || n < r || n > 2 * r - 1 {
        return Err(Error::InvalidInput(format!(
            "need r ≤ n ≤ 2r − 1, got r = {r}, n = {n}"
        )));
    }
    let main = BigRational::new(
        generator_count(r, q)?,
        num_traits::pow(BigInt::from(q), r as usize),
    );
    Ok(around(generator_constant(q, r, n) * main, r, q))
}

/// Which estimate supplies the bracket of ρ_n(K).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketSource {
    BelowDegree,
    Minimal,
    Stable,
    Unramified,
    Monotone,
}

/// Bracket for ρ_n(K) itself (not divided by ‖D_K‖).
pub fn density_mass_bracket(ext: &ExtensionField, n: u32) -> Result<(Bracket, BracketSource)> {
    let (r, f, q) = (ext.r, ext.f, ext.q());
    let d = ext.disc_norm();
    if n < r {
        return Ok((
            Bracket::new(BigRational::zero(), BigRational::zero()),
            BracketSource::BelowDegree,
        ));
    }
    if n == r {
        return Ok((
            density_terms(r, f, q, Regime::Minimal)?.bracket.scale(&d),
            BracketSource::Minimal,
        ));
    }
    if n >= 2 * r - 1 {
        return Ok((
            density_terms(r, f, q, Regime::Stable)?.bracket.scale(&d),
            BracketSource::Stable,
        ));
    }
    if ext.is_unramified() {
        return Ok((
            unramified_bracket(r, n, q)?.scale(&d),
            BracketSource::Unramified,
        ));
    }
    let lo = density_terms(r, f, q, Regime::Minimal)?.bracket.lo;
    let hi = density_terms(r, f, q, Regime::Stable)?.bracket.hi;
    Ok((Bracket::new(lo, hi).scale(&d), BracketSource::Monotone))
}

/// `Σ_{m|r} φ(r/m) q^{m−r}`.
pub fn degree_sum_main(r: u32, q: u64) -> Result<BigRational> {
    if r == 0 {
        return Err(Error::InvalidInput("r must be ≥ 1".into()));
    }
    let t = table_for(r);
    let mut acc = BigRational::zero();
    for &m in t.divisors(r) {
        acc += BigRational::from_integer(BigInt::from(t.totient(r / m)))
            * q_pow(q, m as i64 - r as i64);
    }
    Ok(acc)
}

/// `r · Σ_{f|r} G_f/f = Σ_{m|r} φ(r/m) q^m`, checked exactly.
pub fn divisor_generator_check(r: u32, q: u64) -> bool {
    let t = table_for(r);
    let mut lhs = BigRational::zero();
    let mut rhs = BigInt::zero();
    for &f in t.divisors(r) {
        lhs += BigRational::new(t.generator_count(f, q), BigInt::from(f));
        rhs += BigInt::from(t.totient(r / f)) * num_traits::pow(BigInt::from(q), f as usize);
    }
    lhs * BigRational::from_integer(BigInt::from(r)) == BigRational::from_integer(rhs)
}

/// `Σ_{m|f} G_m = q^f`.
pub fn generator_partition_check(f: u32, q: u64) -> bool {
    let t = table_for(f);
    let s: BigInt = t.divisors(f).iter().map(|&m| t.generator_count(m, q)).sum();
    s == num_traits::pow(BigInt::from(q), f as usize)
}

/// `Σ_{m|f, m<f} G_m q^m ≤ 2 q^f`.
pub fn proper_generator_check(f: u32, q: u64) -> bool {
    let t = table_for(f);
    let s: BigInt = t
        .divisors(f)
        .iter()
        .filter(|&&m| m < f)
        .map(|&m| t.generator_count(m, q) * num_traits::pow(BigInt::from(q), m as usize))
        .sum();
    s <= BigInt::from(2) * num_traits::pow(BigInt::from(q), f as usize)
}

/// `Σ_{m|n} μ(m)/m = φ(n)/n` on a prepared table.
pub fn mobius_totient_check(table: &ArithmeticTable, n: u32) -> bool {
    let mut acc = BigRational::zero();
    for &m in table.divisors(n) {
        let mu = table.mobius(m);
        if mu != 0 {
            acc += BigRational::new(BigInt::from(mu), BigInt::from(m));
        }
    }
    acc == BigRational::new(BigInt::from(table.totient(n)), BigInt::from(n))
}

/// Main term and radius of the bound on `Σ_{K ∈ Ex_r} ρ_n(K)`, n ≥ 2r − 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSumBound {
    #[serde(with = "serde_rational")]
    pub main: BigRational,
    #[serde(with = "serde_rational")]
    pub radius: BigRational,
}

pub fn degree_sum_bound(r: u32, q: u64) -> Result<DegreeSumBound> {
    let t = table_for(r);
    let sigma: u64 = t.divisors(r).iter().map(|&f| f as u64).sum();
    let radius = BigRational::from_integer(BigInt::from(5 * sigma)) * q_pow(q, -(r as i64));
    Ok(DegreeSumBound {
        main: degree_sum_main(r, q)?,
        radius,
    })
}

/// Leading ramified-mass term `ℓ q^{−r(1−1/ℓ)}` and the full sum
/// `Σ_{m|r} (φ − μ)(r/m) q^{m−r}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamifiedMass {
    pub smallest_prime: u32,
    #[serde(with = "serde_rational")]
    pub leading: BigRational,
    #[serde(with = "serde_rational")]
    pub delta_sum: BigRational,
}

pub fn ramified_mass(r: u32, q: u64) -> Result<RamifiedMass> {
    if r < 2 {
        return Err(Error::InvalidInput("r must be ≥ 2".into()));
    }
    let t = table_for(r);
    let l = t.smallest_prime_factor(r);
    let leading = BigRational::from_integer(BigInt::from(l)) * q_pow(q, -((r - r / l) as i64));
    let mut delta_sum = BigRational::zero();
    for &m in t.divisors(r) {
        let k = r / m;
        let delta = t.totient(k) as i64 - t.mobius(k) as i64;
        delta_sum += BigRational::from_integer(BigInt::from(delta)) * q_pow(q, m as i64 - r as i64);
    }
    debug_assert!(!delta_sum.is_negative());
    Ok(RamifiedMass {
        smallest_prime: l,
        leading,
        delta_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        let t = ArithmeticTable::new(30);
        assert_eq!(t.mobius(1), 1);
        assert_eq!(t.mobius(6), 1);
        assert_eq!(t.mobius(12), 0);
        assert_eq!(t.mobius(30), -1);
        assert_eq!(t.totient(12), 4);
        assert_eq!(t.divisors(12), &[1, 2, 3, 4, 6, 12]);
        assert_eq!(t.smallest_prime_factor(15), 3);
    }
}
