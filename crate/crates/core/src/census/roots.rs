//! Root isolation in O_K by residue refinement with Hensel certification.

use std::sync::Arc;

use serde::Serialize;

use crate::catalog::ExtensionField;
use crate::error::{Error, Result};
use crate::padic::ring::OkRing;
use crate::padic::{Distance, ExtElement, PadicNumber, PadicPolynomial, SAFETY_MARGIN};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Newness {
    New,
    Old,
    Ambiguous,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootRecord {
    #[serde(skip)]
    pub location: ExtElement,
    pub coordinates: Vec<String>,
    pub in_ring: bool,
    pub is_new: Newness,
    pub multiplicity: u32,
    pub certified: bool,
}

/// A root in O_K: power-basis coordinates known modulo `π^depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocatedRoot {
    pub coords: Vec<u64>,
    pub depth: u32,
    pub is_new: Newness,
}

/// Number of roots of a polynomial in K, split by location.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RootCount {
    pub in_ring: u32,
    pub outside: u32,
    pub uncertified: u32,
}

impl RootCount {
    pub fn total(&self) -> u32 {
        self.in_ring + self.outside
    }
    pub fn flagged(&self) -> bool {
        self.uncertified > 0
    }
}

/// A leaf of the isolation tree.
#[derive(Clone, Debug)]
pub(crate) struct Leaf {
    /// x ≡ center (mod π^depth) for every root in the leaf's disc.
    pub center: Vec<u64>,
    pub depth: u32,
    /// Scaled polynomial `π^{-C} P(center + π^depth y)` and its known precision.
    pub poly: Vec<u64>,
    pub prec: u32,
    pub certified: bool,
    pub multiplicity: u32,
}

/// Root isolation over a fixed extension at fixed precision.
#[derive(Clone, Debug)]
pub struct RootFinder {
    ring: OkRing,
    ext: Arc<ExtensionField>,
}

impl RootFinder {
    pub fn new(ext: Arc<ExtensionField>, precision: u32) -> Result<Self> {
        let ring = OkRing::new(&ext, precision)?;
        Ok(RootFinder { ring, ext })
    }

    pub fn ring(&self) -> &OkRing {
        &self.ring
    }

    pub fn ext(&self) -> &Arc<ExtensionField> {
        &self.ext
    }

    fn margin_pi(&self) -> u32 {
        self.ring.e() * SAFETY_MARGIN as u32
    }

    /// Residue roots of `rbar`, simple ones flagged `true`.
    fn residue_roots(&self, rbar: &[u32], zero_only: bool, out: &mut Vec<(u32, bool)>) {
        out.clear();
        let k = self.ring.field();
        let d = rbar.len() - 1;
        if d == 0 {
            return;
        }
        let drv = k.derivative(rbar);
        let test = |z: u32, out: &mut Vec<(u32, bool)>| {
            if k.eval(rbar, z) == 0 {
                out.push((z, k.eval(&drv, z) != 0));
            }
        };
        if zero_only {
            test(0, out);
            return;
        }
        for z in 0..k.size() as u32 {
            test(z, out);
            if out.len() == d {
                break;
            }
        }
    }

    fn residue_multiplicity(&self, rbar: &[u32], z: u32) -> u32 {
        let k = self.ring.field();
        let mut poly = rbar.to_vec();
        let mut m = 0;
        while poly.len() > 1 && k.eval(&poly, z) == 0 {
            m += 1;
            poly = k.derivative(&poly);
            if k.p() as usize <= m as usize {
                break;
            }
        }
        m.max(1)
    }

    /// Count-only traversal.
    fn count_rec(
        &self,
        poly: &mut Vec<u64>,
        prec: u32,
        zero_only: bool,
        acc: &mut RootCount,
        in_ring: bool,
    ) {
        let ring = &self.ring;
        let r = ring.r();
        let c = ring.poly_content(poly);
        if c >= prec {
            acc.uncertified += 1;
            return;
        }
        if c > 0 {
            for chunk in poly.chunks_mut(r) {
                ring.div_pi_pow(chunk, c);
            }
        }
        let prec = prec - c;
        let mut rbar = Vec::with_capacity(poly.len() / r);
        ring.poly_residue(poly, &mut rbar);
        if rbar.len() == 1 {
            return;
        }
        let mut roots = Vec::new();
        self.residue_roots(&rbar, zero_only, &mut roots);
        if prec < self.margin_pi() {
            acc.uncertified += roots.len() as u32;
            return;
        }
        let mut lift = vec![0u64; r];
        for &(z, simple) in &roots {
            if simple {
                if in_ring {
                    acc.in_ring += 1;
                } else {
                    acc.outside += 1;
                }
                continue;
            }
            let mut child = poly.clone();
            ring.lift(z, &mut lift);
            ring.taylor_shift(&mut child, &lift);
            ring.scale_pi(&mut child);
            self.count_rec(&mut child, prec, false, acc, in_ring);
        }
    }

    /// Count roots of a Z/p^N polynomial (residues, low → high) in K.
    pub fn count(&self, coeffs: &[u64]) -> RootCount {
        let coeffs = trim(coeffs);
        let mut acc = RootCount::default();
        let prec = self.ring.prec_pi();
        let mut poly = self.ring.embed_poly(coeffs);
        self.count_rec(&mut poly, prec, false, &mut acc, true);
        let rev: Vec<u64> = coeffs.iter().rev().copied().collect();
        let mut poly = self.ring.embed_poly(&rev);
        self.count_rec(&mut poly, prec, true, &mut acc, false);
        acc
    }

    /// Full traversal collecting leaves.
    pub(crate) fn leaves(&self, coeffs: &[u64], zero_only: bool) -> Vec<Leaf> {
        let mut out = Vec::new();
        let poly = self.ring.embed_poly(coeffs);
        self.leaf_rec(
            poly,
            self.ring.prec_pi(),
            zero_only,
            self.ring.zero(),
            0,
            &mut out,
        );
        out
    }

    fn leaf_rec(
        &self,
        mut poly: Vec<u64>,
        prec: u32,
        zero_only: bool,
        center: Vec<u64>,
        depth: u32,
        out: &mut Vec<Leaf>,
    ) {
        let ring = &self.ring;
        let r = ring.r();
        let c = ring.poly_content(&poly);
        let deg_bound = (poly.len() / r - 1) as u32;
        if c >= prec {
            out.push(Leaf {
                center,
                depth,
                poly,
                prec: 0,
                certified: false,
                multiplicity: deg_bound.max(1),
            });
            return;
        }
        if c > 0 {
            for chunk in poly.chunks_mut(r) {
                ring.div_pi_pow(chunk, c);
            }
        }
        let prec = prec - c;
        let mut rbar = Vec::new();
        ring.poly_residue(&poly, &mut rbar);
        if rbar.len() == 1 {
            return;
        }
        if prec < self.margin_pi() {
            let mut roots = Vec::new();
            self.residue_roots(&rbar, zero_only, &mut roots);
            for &(z, _) in &roots {
                let mult = self.residue_multiplicity(&rbar, z);
                let mut cz = vec![0u64; r];
                ring.lift(z, &mut cz);
                ring.mul_pi_pow(&mut cz, depth);
                ring.add_into(&mut cz, &center);
                out.push(Leaf {
                    center: cz,
                    depth: depth + 1,
                    poly: poly.clone(),
                    prec,
                    certified: false,
                    multiplicity: mult,
                });
            }
            return;
        }
        let mut roots = Vec::new();
        self.residue_roots(&rbar, zero_only, &mut roots);
        let mut lift = vec![0u64; r];
        for &(z, simple) in &roots {
            ring.lift(z, &mut lift);
            let mut child = poly.clone();
            ring.taylor_shift(&mut child, &lift);
            ring.scale_pi(&mut child);
            let mut cz = lift.clone();
            ring.mul_pi_pow(&mut cz, depth);
            ring.add_into(&mut cz, &center);
            if simple {
                out.push(Leaf {
                    center: cz,
                    depth: depth + 1,
                    poly: child,
                    prec,
                    certified: true,
                    multiplicity: 1,
                });
            } else {
                self.leaf_rec(child, prec, false, cz, depth + 1, out);
            }
        }
    }

    /// Extend a certified leaf by `steps` more π-adic digits (or until the
    /// precision margin is reached).
    pub(crate) fn refine(&self, leaf: &mut Leaf, target_depth: u32) {
        let ring = &self.ring;
        let r = ring.r();
        let k = ring.field();
        let mut lift = vec![0u64; r];
        while leaf.certified && leaf.depth < target_depth {
            let c = ring.poly_content(&leaf.poly);
            if c >= leaf.prec || leaf.prec - c < self.margin_pi() {
                break;
            }
            for chunk in leaf.poly.chunks_mut(r) {
                ring.div_pi_pow(chunk, c);
            }
            leaf.prec -= c;
            let q0 = ring.residue(&leaf.poly[..r]);
            let q1 = ring.residue(&leaf.poly[r..2 * r]);
            let Some(inv) = k.inv(q1) else { break };
            let z = k.neg(k.mul(q0, inv));
            ring.lift(z, &mut lift);
            ring.taylor_shift(&mut leaf.poly, &lift);
            ring.scale_pi(&mut leaf.poly);
            let mut cz = lift.clone();
            ring.mul_pi_pow(&mut cz, leaf.depth);
            ring.add_into(&mut leaf.center, &cz);
            leaf.depth += 1;
        }
    }

    /// Roots in O_K refined to the working precision, with coordinates in
    /// the power basis and a newness verdict for prime-degree K.
    pub fn locate_in_ring(&self, coeffs: &[u64]) -> (Vec<LocatedRoot>, bool) {
        let coeffs = trim(coeffs);
        let ring = &self.ring;
        let e = ring.e();
        let n = ring.precision();
        let target = ring.prec_pi();
        let mut flagged = false;
        let mut out = Vec::new();
        for mut leaf in self.leaves(coeffs, false) {
            if !leaf.certified {
                flagged = true;
                continue;
            }
            self.refine(&mut leaf, target);
            let known: Vec<u32> = (0..ring.r() as u32)
                .map(|i| {
                    if e == 1 {
                        leaf.depth
                    } else {
                        leaf.depth.saturating_sub(i).div_ceil(e)
                    }
                    .min(n)
                })
                .collect();
            let coords: Vec<u64> = leaf
                .center
                .iter()
                .zip(&known)
                .map(|(&x, &k)| x % ring.zp.pow(k))
                .collect();
            let is_new = if ring.r() == 1 {
                Newness::New
            } else {
                let mut best: Option<u32> = None;
                let mut floor = u32::MAX;
                for i in 1..ring.r() {
                    let k = known[i];
                    floor = floor.min(k * e + i as u32);
                    if coords[i] != 0 {
                        let v = ring.zp.val(coords[i]) * e + i as u32;
                        best = Some(best.map_or(v, |b| b.min(v)));
                    }
                }
                match best {
                    None if floor + self.margin_pi() >= target => Newness::Old,
                    Some(v) if v + self.margin_pi() <= floor => Newness::New,
                    _ => Newness::Ambiguous,
                }
            };
            if is_new == Newness::Ambiguous {
                flagged = true;
            }
            out.push(LocatedRoot {
                coords,
                depth: leaf.depth,
                is_new,
            });
        }
        (out, flagged)
    }

    fn to_element(&self, center: &[u64], depth: u32) -> Result<ExtElement> {
        let e = self.ring.e();
        let p = self.ring.p();
        let coords = center
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let known = if e == 1 {
                    depth
                } else {
                    (depth.saturating_sub(i as u32)).div_ceil(e)
                };
                let known = known.min(self.ring.precision());
                if known == 0 {
                    PadicNumber::zero(p, 0)
                } else {
                    PadicNumber::from_residue(p, x, known)
                }
            })
            .collect();
        ExtElement::new(self.ext.clone(), coords)
    }
}

/// Drop leading coefficients that vanish at working precision.
pub(crate) fn trim(coeffs: &[u64]) -> &[u64] {
    let mut n = coeffs.len();
    while n > 1 && coeffs[n - 1] == 0 {
        n -= 1;
    }
    &coeffs[..n]
}

fn classify(x: &ExtElement, prime_degree: bool) -> Newness {
    match (x.dist_to_base(), prime_degree) {
        (Distance::InBase, _) => Newness::Old,
        (
            Distance::Norm {
                certified: true, ..
            },
            true,
        ) => Newness::New,
        (
            Distance::Norm {
                certified: true, ..
            },
            false,
        ) => match x.min_poly_degree() {
            Ok(d) if d == x.parent().r => Newness::New,
            Ok(_) => Newness::Old,
            Err(_) => Newness::Ambiguous,
        },
        _ => Newness::Ambiguous,
    }
}

fn is_prime_u32(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// All roots of `poly` in K with locations refined to the working precision.
pub fn count_roots(
    poly: &PadicPolynomial,
    ext: &Arc<ExtensionField>,
    precision: u32,
) -> Result<Vec<RootRecord>> {
    if poly.coeffs().iter().all(|c| c.is_zero()) {
        return Err(Error::PrecisionExhausted(
            "polynomial indistinguishable from 0".into(),
        ));
    }
    if poly
        .coeffs()
        .iter()
        .any(|c| c.valuation() < 0 && !c.is_zero())
    {
        return Err(Error::InvalidInput("coefficients must be integral".into()));
    }
    let finder = RootFinder::new(ext.clone(), precision)?;
    let prec_avail = poly.abs_precision().clamp(1, precision as i64) as u32;
    let coeffs = trim(&poly.residues(prec_avail)?).to_vec();
    let pi_prec = prec_avail * ext.e;
    let prime_degree = ext.r == 1 || is_prime_u32(ext.r);
    let mut out = Vec::new();
    let rev: Vec<u64> = coeffs.iter().rev().copied().collect();
    for (in_ring, c, zero_only) in [(true, coeffs, false), (false, rev, true)] {
        let mut leaves = finder.leaves(&c, zero_only);
        for leaf in leaves.iter_mut() {
            if leaf.certified {
                finder.refine(leaf, pi_prec);
            }
            let depth = leaf.depth.min(pi_prec);
            let mut loc = finder.to_element(&leaf.center, depth)?;
            if !in_ring {
                loc = ExtElement::from_i64s(ext, &[1], precision)?.div(&loc)?;
            }
            let is_new = if ext.r == 1 {
                Newness::New
            } else if leaf.certified {
                classify(&loc, prime_degree)
            } else {
                Newness::Ambiguous
            };
            out.push(RootRecord {
                coordinates: loc.coeffs().iter().map(|c| c.to_string()).collect(),
                location: loc,
                in_ring,
                is_new,
                multiplicity: leaf.multiplicity,
                certified: leaf.certified,
            });
        }
    }
    Ok(out)
}
