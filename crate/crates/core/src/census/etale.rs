//! Square classes of Q_p and the étale type of F[X]/P in degrees 2 and 3.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::roots::{trim, RootFinder};
use crate::catalog::{Catalog, EtaleClass, ExtensionField};
use crate::error::{Error, Result};
use crate::padic::{PadicNumber, PadicPolynomial};

/// An element of Q_p^× / (Q_p^×)².
///
/// For odd p, `unit` is 1 when the unit part is a square mod p and the
/// fixed nonresidue class otherwise (stored as 0/1). For p = 2 it is the
/// unit part modulo 8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SquareClass {
    pub p: u64,
    pub odd_valuation: bool,
    pub unit: u8,
}

impl SquareClass {
    pub fn is_trivial(&self) -> bool {
        !self.odd_valuation
            && if self.p == 2 {
                self.unit == 1
            } else {
                self.unit == 0
            }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = if self.p == 2 {
            format!("{}", self.unit)
        } else if self.unit == 0 {
            "1".to_string()
        } else {
            "t".to_string()
        };
        if self.odd_valuation {
            write!(f, "{}·{}", u, self.p)
        } else {
            write!(f, "{u}")
        }
    }
}

pub fn square_class(a: &PadicNumber) -> Result<SquareClass> {
    let p = a.p();
    if a.is_zero() {
        return Err(Error::PrecisionExhausted(
            "square class of an indistinguishable zero".into(),
        ));
    }
    let need = if p == 2 { 3 } else { 1 };
    if a.precision() < need {
        return Err(Error::PrecisionExhausted(format!(
            "{need} unit digits needed"
        )));
    }
    let odd_valuation = a.valuation().rem_euclid(2) == 1;
    let unit = if p == 2 {
        (a.unit() % 8) as u8
    } else {
        let u = a.unit() % p;
        let square = (1..p).any(|x| x * x % p == u);
        u8::from(!square)
    };
    Ok(SquareClass {
        p,
        odd_valuation,
        unit,
    })
}

/// Root finders over every cataloged field of degree ≤ r.
#[derive(Clone, Debug)]
pub struct EtaleClassifier {
    r: u32,
    base: RootFinder,
    quadratic: Vec<RootFinder>,
    cubic: Vec<RootFinder>,
}

impl EtaleClassifier {
    pub fn new(catalog: &Catalog, r: u32, precision: u32) -> Result<Self> {
        if !(2..=3).contains(&r) {
            return Err(Error::UnsupportedDegree(r));
        }
        let finders = |d: u32| -> Result<Vec<RootFinder>> {
            catalog
                .of_degree(d)
                .map(|k| RootFinder::new(k.clone(), precision))
                .collect()
        };
        Ok(EtaleClassifier {
            r,
            base: RootFinder::new(catalog.base().clone(), precision)?,
            quadratic: finders(2)?,
            cubic: if r == 3 { finders(3)? } else { Vec::new() },
        })
    }

    fn roots_in(&self, finder: &RootFinder, coeffs: &[u64]) -> Result<u32> {
        let c = finder.count(coeffs);
        if c.flagged() {
            return Err(Error::InseparableAtPrecision);
        }
        Ok(c.total())
    }

    fn find(
        &self,
        finders: &[RootFinder],
        coeffs: &[u64],
        want: u32,
    ) -> Result<Arc<ExtensionField>> {
        for f in finders {
            if self.roots_in(f, coeffs)? >= want {
                return Ok(f.ext().clone());
            }
        }
        Err(Error::Mismatch)
    }

    /// Étale type of F[X]/P for residues `coeffs` of a degree-r polynomial.
    pub fn classify(&self, coeffs: &[u64]) -> Result<EtaleClass> {
        if coeffs.len() != self.r as usize + 1 || trim(coeffs).len() != coeffs.len() {
            return Err(Error::InvalidInput(format!(
                "polynomial of degree exactly {} expected",
                self.r
            )));
        }
        let base = self.base.ext().clone();
        let in_base = self.roots_in(&self.base, coeffs)?;
        let comps = match (self.r, in_base) {
            (2, 2) => vec![(base, 2)],
            (2, 0) => vec![(self.find(&self.quadratic, coeffs, 2)?, 1)],
            (3, 3) => vec![(base, 3)],
            (3, 1) => vec![(base, 1), (self.find(&self.quadratic, coeffs, 3)?, 1)],
            (3, 0) => vec![(self.find(&self.cubic, coeffs, 1)?, 1)],
            _ => return Err(Error::InseparableAtPrecision),
        };
        Ok(EtaleClass::from_components(comps))
    }
}

/// Étale type of F[X]/P for `P` of degree 2 or 3 over the cataloged fields.
pub fn classify_etale(
    poly: &PadicPolynomial,
    catalog: &Catalog,
    precision: u32,
) -> Result<EtaleClass> {
    let r = poly.degree_bound() as u32;
    let k = poly.abs_precision().clamp(1, precision as i64) as u32;
    EtaleClassifier::new(catalog, r, k)?.classify(&poly.residues(k)?)
}
