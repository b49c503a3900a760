//! Densities at arbitrary points through the generated order, with
//! rigorous enclosures of the lattice integrals.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};

use super::closed::{generator_constant, rho_base, rho_prime_degree_minimal, rho_quadratic};
use super::value::{q_pow, DensityValue, QPow};
use crate::error::{Error, Result};
use crate::padic::zp::is_prime;
use crate::padic::{default_precision, Distance, ExtElement, IndexValue, OkRing};

pub const DEFAULT_LATTICE_DEPTH: u32 = 3;
pub const DEFAULT_CELL_CAP: u64 = 10_000_000;

fn integral_residues(x: &ExtElement) -> Result<(u32, Vec<u64>)> {
    let p = x.parent().p;
    if x.coeffs().iter().any(|c| !c.is_zero() && c.valuation() < 0) {
        return Err(Error::InvalidInput("x must lie in O_K".into()));
    }
    let abs = x
        .coeffs()
        .iter()
        .map(|c| c.abs_precision())
        .min()
        .unwrap_or(0);
    let prec = abs.clamp(0, default_precision(p) as i64) as u32;
    let coords = x
        .coeffs()
        .iter()
        .map(|c| c.residue(prec))
        .collect::<Result<Vec<_>>>()?;
    Ok((prec, coords))
}

struct Lattice<'a> {
    ring: &'a OkRing,
    combos: Vec<Vec<u64>>,
    depth: u32,
    cap: u64,
    visited: u64,
    exact: HashMap<(u32, u32), u64>,
    open: Vec<u64>,
}

impl Lattice<'_> {
    fn visit(&mut self, y: &[u64], level: u32, skip_zero: bool) -> Result<()> {
        let ring = self.ring;
        let e = ring.e();
        let pk = ring.zp.pow(level);
        let mut child = vec![0u64; ring.r()];
        for i in 0..self.combos.len() {
            if skip_zero && i == 0 {
                continue;
            }
            self.visited += 1;
            if self.visited > self.cap {
                return Err(Error::BudgetExceeded(self.cap));
            }
            child.copy_from_slice(&self.combos[i]);
            ring.scale(&mut child, pk);
            ring.add_into(&mut child, y);
            let v = ring.val(&child);
            if v < e * (level + 1) {
                *self.exact.entry((v, level + 1)).or_default() += 1;
            } else if level + 1 < self.depth {
                let c = child.clone();
                self.visit(&c, level + 1, false)?;
            } else {
                self.open[level as usize] += 1;
            }
        }
        Ok(())
    }
}

/// Enclosure of `∫_{Ω_m} ‖Q(x)‖^r dQ` for x ∈ O_K.
pub fn lattice_norm_integral(x: &ExtElement, m: u32, depth: u32) -> Result<DensityValue> {
    lattice_norm_integral_capped(x, m, depth, DEFAULT_CELL_CAP)
}

pub fn lattice_norm_integral_capped(
    x: &ExtElement,
    m: u32,
    depth: u32,
    cap: u64,
) -> Result<DensityValue> {
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be ≥ 1".into()));
    }
    let ext = x.parent().clone();
    let (prec, coords) = integral_residues(x)?;
    if prec < depth + 2 {
        return Err(Error::PrecisionExhausted(format!(
            "x known to {prec} digits, depth {depth}"
        )));
    }
    let ring = OkRing::new(&ext, prec)?;
    let p = ring.p();
    let r = ring.r();
    let mut powers = vec![ring.one()];
    for i in 1..=m as usize {
        let mut t = vec![0u64; r];
        ring.mul(&powers[i - 1], &coords, &mut t);
        powers.push(t);
    }
    let count = (p as usize).pow(m + 1);
    let mut combos = Vec::with_capacity(count);
    for idx in 0..count {
        let mut s = ring.zero();
        let mut k = idx;
        for pw in &powers {
            let mut t = pw.clone();
            ring.scale(&mut t, (k % p as usize) as u64);
            ring.add_into(&mut s, &t);
            k /= p as usize;
        }
        combos.push(s);
    }
    let mut lat = Lattice {
        ring: &ring,
        combos,
        depth,
        cap,
        visited: 0,
        exact: HashMap::new(),
        open: vec![0; depth as usize],
    };
    lat.visit(&ring.zero(), 0, true)?;

    let f = ring.f() as i64;
    let cells = m as i64 + 1;
    let mut lo = BigRational::zero();
    for (&(v, level), &n) in &lat.exact {
        lo += BigRational::from_integer(BigInt::from(n))
            * q_pow(p, -f * v as i64 - level as i64 * cells);
    }
    let mut slack = BigRational::zero();
    for (k, &n) in lat.open.iter().enumerate() {
        let level = k as i64 + 1;
        slack += BigRational::from_integer(BigInt::from(n))
            * q_pow(p, -(r as i64) * level - level * cells);
    }
    let renorm = BigRational::one() / (BigRational::one() - q_pow(p, -(cells + r as i64)));
    let hi = (&lo + slack) * &renorm;
    Ok(DensityValue::enclosure(lo * renorm, hi))
}

fn index_exponent(x: &ExtElement) -> Result<i64> {
    match x.index_of_generated_order()? {
        IndexValue::Finite {
            exponent,
            certified: true,
        } => Ok(exponent),
        IndexValue::Finite { .. } => Err(Error::PrecisionExhausted("index not certified".into())),
        IndexValue::Infinite { .. } => Err(Error::NotGenerator),
    }
}

/// ρ_{K,n}(x) for x ∈ O_K through the index of O_F[x].
pub fn rho_generic(x: &ExtElement, n: u32, depth: u32) -> Result<DensityValue> {
    let ext = x.parent().clone();
    let r = ext.r;
    let q = ext.q();
    integral_residues(x)?;
    if x.min_poly_degree()? < r {
        return Err(Error::NotGenerator);
    }
    if n < r {
        return Ok(DensityValue::zero());
    }
    let weight = ext.disc_norm() * q_pow(q, -index_exponent(x)?);
    let minimal = DensityValue::exact(&weight * generator_constant(q, r, r));
    if n == r {
        return Ok(minimal);
    }
    let stable = lattice_norm_integral(x, r - 1, depth)?.scale(&weight);
    if n >= 2 * r - 1 {
        return Ok(stable);
    }
    let bracket = DensityValue::enclosure(minimal.lo().clone(), stable.hi().clone());
    let direct = lattice_norm_integral(x, n - r, depth)?.scale(&weight);
    bracket.intersect(&direct).ok_or(Error::Mismatch)
}

/// ‖x‖^{2r} for x ∈ K, as a rational.
fn norm_pow_2r(x: &ExtElement) -> Result<BigRational> {
    let ext = x.parent();
    let v = x.valuation()? * Ratio::from_integer(2 * ext.r as i64);
    Ok(q_pow(ext.q(), -v.to_integer()))
}

/// ρ_{K,n}(x) at any x ∈ K, using closed forms where they apply.
pub fn rho_at(x: &ExtElement, n: u32, depth: u32) -> Result<DensityValue> {
    let ext = x.parent().clone();
    let q = ext.q();
    if ext.r == 1 {
        let c = &x.coeffs()[0];
        let norm = if c.is_zero() {
            BigRational::zero()
        } else {
            q_pow(q, -c.valuation())
        };
        return rho_base(q, &norm, n);
    }
    if x.coeffs().iter().any(|c| !c.is_zero()) && x.valuation()? < Ratio::from_integer(0) {
        let y = ExtElement::from_i64s(&ext, &[1], default_precision(q))?.div(x)?;
        let factor = BigRational::one() / norm_pow_2r(x)?;
        return Ok(rho_at(&y, n, depth)?.scale(&factor));
    }
    let delta = match x.dist_to_base() {
        Distance::InBase => return Ok(DensityValue::zero()),
        Distance::Norm {
            certified: false, ..
        } => {
            return Err(Error::PrecisionExhausted(
                "distance to the base field not certified".into(),
            ))
        }
        Distance::Norm { exponent, .. } => QPow::power(exponent),
    };
    if n < ext.r {
        return Ok(DensityValue::zero());
    }
    if ext.r == 2 {
        return rho_quadratic(&delta, &ext, n);
    }
    if n == ext.r && is_prime(ext.r as u64) {
        return rho_prime_degree_minimal(&delta, &ext);
    }
    rho_generic(x, n, depth)
}
