//! Exact finite-s evaluation of `q^{sr} ∫_{O_K} ‖P'‖^r 1{‖P‖ ≤ q^{-s}}`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::roots::{trim, RootFinder};
use crate::catalog::ExtensionField;
use crate::error::{Error, Result};
use crate::padic::{PadicPolynomial, SAFETY_MARGIN};

/// Contribution `(q^μ − q^{μ−1}) / (q^μ − 1)` of a root of multiplicity μ.
pub fn multiplicity_weight(mu: u32, q: u64) -> Result<BigRational> {
    if mu == 0 || q < 2 {
        return Err(Error::InvalidInput(
            "multiplicity must be ≥ 1 and q ≥ 2".into(),
        ));
    }
    let q = BigInt::from(q);
    let qm = num_traits::pow(q.clone(), mu as usize);
    let qm1 = num_traits::pow(q, mu as usize - 1);
    Ok(BigRational::new(&qm - qm1, qm - BigInt::one()))
}

struct Evaluator<'a> {
    finder: &'a RootFinder,
    qf: BigInt,
    grid_depth: u32,
}

impl Evaluator<'_> {
    fn qf_pow(&self, k: i64) -> BigRational {
        let m = num_traits::pow(self.qf.clone(), k.unsigned_abs() as usize);
        if k >= 0 {
            BigRational::from_integer(m)
        } else {
            BigRational::new(BigInt::one(), m)
        }
    }

    fn normalize(&self, poly: &mut [u64], prec: &mut u32) -> Result<u32> {
        let ring = self.finder.ring();
        let c = ring.poly_content(poly);
        if c >= *prec {
            return Err(Error::PrecisionExhausted(
                "polynomial indistinguishable from 0 on a cell".into(),
            ));
        }
        if c > 0 {
            for chunk in poly.chunks_mut(ring.r()) {
                ring.div_pi_pow(chunk, c);
            }
        }
        *prec -= c;
        Ok(c)
    }

    fn derivative(&self, poly: &[u64]) -> Vec<u64> {
        let ring = self.finder.ring();
        let r = ring.r();
        let n = poly.len() / r;
        if n < 2 {
            return vec![0; r];
        }
        let mut out = Vec::with_capacity((n - 1) * r);
        for k in 1..n {
            let mut c = poly[k * r..(k + 1) * r].to_vec();
            ring.scale(&mut c, k as u64 % ring.zp.modulus());
            out.extend_from_slice(&c);
        }
        out
    }

    fn linear_dominant(&self, poly: &[u64]) -> bool {
        let ring = self.finder.ring();
        let r = ring.r();
        let n = poly.len() / r;
        n >= 2
            && ring.val(&poly[r..2 * r]) == 0
            && (2..n).all(|k| ring.val(&poly[k * r..(k + 1) * r]) > 0)
    }

    fn residue_roots(&self, poly: &[u64]) -> (usize, Vec<u32>) {
        let ring = self.finder.ring();
        let k = ring.field();
        let mut rbar = Vec::new();
        ring.poly_residue(poly, &mut rbar);
        let roots = if rbar.len() == 1 {
            Vec::new()
        } else {
            (0..k.size() as u32)
                .filter(|&z| k.eval(&rbar, z) == 0)
                .collect()
        };
        (rbar.len() - 1, roots)
    }

    fn child(&self, poly: &[u64], z: u32) -> Vec<u64> {
        let ring = self.finder.ring();
        let mut lift = vec![0u64; ring.r()];
        ring.lift(z, &mut lift);
        let mut child = poly.to_vec();
        ring.taylor_shift(&mut child, &lift);
        ring.scale_pi(&mut child);
        child
    }

    fn margin(&self) -> u32 {
        self.finder.ring().e() * SAFETY_MARGIN as u32
    }

    /// `∫_{O_K} ‖Q'(y)‖^r 1{v(Q(y)) ≥ t} dy`, t in π-units.
    fn j(&self, mut poly: Vec<u64>, mut t: i64, mut prec: u32, depth: u32) -> Result<BigRational> {
        let c = self.normalize(&mut poly, &mut prec)?;
        t -= c as i64;
        let scale = self.qf_pow(-(c as i64));
        if t <= 0 {
            let d = self.derivative(&poly);
            if d.iter().all(|&x| x == 0) {
                return Ok(BigRational::zero());
            }
            return Ok(scale * self.g(d, prec, depth)?);
        }
        if prec < self.margin() {
            return Err(Error::DepthExhausted);
        }
        if self.linear_dominant(&poly) {
            return Ok(scale * self.qf_pow(-t));
        }
        if depth >= self.grid_depth {
            return Err(Error::DepthExhausted);
        }
        let (_, roots) = self.residue_roots(&poly);
        let mut acc = BigRational::zero();
        for z in roots {
            acc += self.j(self.child(&poly, z), t, prec, depth + 1)?;
        }
        Ok(scale * acc)
    }

    /// `∫_{O_K} ‖g(y)‖^r dy`.
    fn g(&self, mut poly: Vec<u64>, mut prec: u32, depth: u32) -> Result<BigRational> {
        let ring = self.finder.ring();
        let c = self.normalize(&mut poly, &mut prec)?;
        let scale = self.qf_pow(-(c as i64));
        let (deg, roots) = self.residue_roots(&poly);
        if deg == 0 {
            return Ok(scale);
        }
        if self.linear_dominant(&poly) {
            let qf = BigRational::from_integer(self.qf.clone());
            return Ok(scale * &qf / (&qf + BigRational::one()));
        }
        if prec < self.margin() || depth >= self.grid_depth {
            return Err(Error::DepthExhausted);
        }
        let size = ring.field().size();
        let cell = self.qf_pow(-1);
        let mut acc = BigRational::from_integer(BigInt::from(size - roots.len())) * &cell;
        let mut self_weight = BigRational::zero();
        for z in roots {
            let mut child = self.child(&poly, z);
            let mut child_prec = prec;
            let cc = self.normalize(&mut child, &mut child_prec)?;
            let mut diff = child.clone();
            ring.sub_into(&mut diff, &poly);
            if z == 0 && ring.poly_content(&diff) >= child_prec {
                self_weight += &cell * self.qf_pow(-(cc as i64));
            } else {
                let w = &cell * self.qf_pow(-(cc as i64));
                acc += w * self.g(child, child_prec, depth + 1)?;
            }
        }
        Ok(scale * acc / (BigRational::one() - self_weight))
    }
}

fn evaluate(finder: &RootFinder, coeffs: &[u64], s: u32, grid_depth: u32) -> Result<BigRational> {
    let ring = finder.ring();
    let t = (s * ring.e()) as i64;
    if t as u32 + ring.e() * SAFETY_MARGIN as u32 > ring.prec_pi() {
        return Err(Error::PrecisionExhausted(format!(
            "s = {s} exceeds the working precision"
        )));
    }
    let qf = num_traits::pow(BigInt::from(ring.p()), ring.f() as usize);
    let ev = Evaluator {
        finder,
        qf,
        grid_depth,
    };
    let poly = ring.embed_poly(trim(coeffs));
    let j = ev.j(poly, t, ring.prec_pi(), 0)?;
    Ok(ev.qf_pow(t) * j)
}

/// Kac-Rice count of the roots of `P` in O_K at level `s`.
pub fn kac_rice_estimate(
    poly: &PadicPolynomial,
    ext: &Arc<ExtensionField>,
    s: u32,
    grid_depth: u32,
    precision: u32,
) -> Result<BigRational> {
    let finder = RootFinder::new(ext.clone(), precision)?;
    let k = poly.abs_precision().clamp(1, precision as i64) as u32;
    let coeffs = poly.residues(k)?;
    for leaf in finder.leaves(trim(&coeffs), false) {
        if !leaf.certified {
            return Err(if leaf.multiplicity > 1 {
                Error::DegenerateRoot
            } else {
                Error::DepthExhausted
            });
        }
    }
    evaluate(&finder, &coeffs, s, grid_depth)
}

/// The same evaluation without the simple-root precondition.
pub fn kac_rice_estimate_unchecked(
    poly: &PadicPolynomial,
    ext: &Arc<ExtensionField>,
    s: u32,
    grid_depth: u32,
    precision: u32,
) -> Result<BigRational> {
    let finder = RootFinder::new(ext.clone(), precision)?;
    let k = poly.abs_precision().clamp(1, precision as i64) as u32;
    evaluate(&finder, &poly.residues(k)?, s, grid_depth)
}

/// Fast path on raw residues with a prepared finder.
pub fn kac_rice_residues(
    finder: &RootFinder,
    coeffs: &[u64],
    s: u32,
    grid_depth: u32,
) -> Result<BigRational> {
    evaluate(finder, coeffs, s, grid_depth)
}
