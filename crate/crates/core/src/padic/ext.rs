//! Elements of a cataloged extension K = Q_p[X]/(g) in the power basis.

use std::sync::Arc;

use num_rational::Ratio;

use super::linalg::PadicMatrix;
use super::number::PadicNumber;
use super::SAFETY_MARGIN;
use crate::catalog::ExtensionField;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ExtElement {
    parent: Arc<ExtensionField>,
    coeffs: Vec<PadicNumber>,
}

/// `dist(x, F)` as `p^{exponent}`, or membership in F at working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distance {
    InBase,
    Norm {
        exponent: Ratio<i64>,
        certified: bool,
    },
}

/// `#(O_K / O_F[x]) = q^exponent`, or infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexValue {
    Finite { exponent: i64, certified: bool },
    Infinite { certified: bool },
}

impl ExtElement {
    pub fn new(parent: Arc<ExtensionField>, coeffs: Vec<PadicNumber>) -> Result<Self> {
        if coeffs.len() != parent.r as usize || coeffs.iter().any(|c| c.p() != parent.p) {
            return Err(Error::Mismatch);
        }
        Ok(ExtElement { parent, coeffs })
    }

    pub fn from_i64s(parent: &Arc<ExtensionField>, c: &[i64], precision: u32) -> Result<Self> {
        let mut v: Vec<PadicNumber> = c
            .iter()
            .map(|&a| PadicNumber::from_i64(parent.p, a, precision))
            .collect();
        v.resize(
            parent.r as usize,
            PadicNumber::zero(parent.p, precision as i64),
        );
        Self::new(parent.clone(), v)
    }

    pub fn from_base(parent: &Arc<ExtensionField>, a: PadicNumber) -> Result<Self> {
        let abs = a.abs_precision().max(1);
        let mut v = vec![a];
        for _ in 1..parent.r {
            v.push(PadicNumber::zero(parent.p, abs));
        }
        Self::new(parent.clone(), v)
    }

    /// The class θ of X.
    pub fn theta(parent: &Arc<ExtensionField>, precision: u32) -> Result<Self> {
        let mut c = vec![0i64; parent.r as usize];
        if parent.r == 1 {
            c[0] = -parent.poly[0];
        } else {
            c[1] = 1;
        }
        Self::from_i64s(parent, &c, precision)
    }

    pub fn parent(&self) -> &Arc<ExtensionField> {
        &self.parent
    }

    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.parent != other.parent {
            return Err(Error::Mismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let c = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(ExtElement {
            parent: self.parent.clone(),
            coeffs: c,
        })
    }

    pub fn neg(&self) -> Self {
        ExtElement {
            parent: self.parent.clone(),
            coeffs: self.coeffs.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, a: &PadicNumber) -> Result<Self> {
        let c = self
            .coeffs
            .iter()
            .map(|x| x.mul(a))
            .collect::<Result<_>>()?;
        Ok(ExtElement {
            parent: self.parent.clone(),
            coeffs: c,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let r = self.parent.r as usize;
        let p = self.parent.p;
        let abs = self
            .coeffs
            .iter()
            .chain(&other.coeffs)
            .map(|c| c.abs_precision())
            .max()
            .unwrap_or(0)
            + self.min_valuation_floor()
            + other.min_valuation_floor();
        let mut t: Vec<PadicNumber> = vec![PadicNumber::zero(p, abs.max(1)); 2 * r - 1];
        for i in 0..r {
            for j in 0..r {
                let prod = self.coeffs[i].mul(&other.coeffs[j])?;
                t[i + j] = t[i + j].add(&prod)?;
            }
        }
        let g = &self.parent.poly;
        for k in (r..2 * r - 1).rev() {
            let c = t[k].clone();
            for i in 0..r {
                if g[i] == 0 {
                    continue;
                }
                let gi = PadicNumber::from_i64(p, g[i], c.precision().max(1));
                let term = c.mul(&gi)?;
                t[k - r + i] = t[k - r + i].sub(&term)?;
            }
        }
        t.truncate(r);
        Ok(ExtElement {
            parent: self.parent.clone(),
            coeffs: t,
        })
    }

    fn min_valuation_floor(&self) -> i64 {
        self.coeffs
            .iter()
            .map(|c| c.valuation())
            .min()
            .unwrap_or(0)
            .min(0)
    }

    /// Matrix of multiplication by `self` in the power basis.
    pub fn multiplication_matrix(&self) -> Result<PadicMatrix> {
        let r = self.parent.r as usize;
        let prec = self
            .coeffs
            .iter()
            .map(|c| c.abs_precision())
            .max()
            .unwrap_or(1)
            .max(1);
        let mut cols = Vec::with_capacity(r);
        let mut basis = {
            let mut c = vec![0i64; r];
            c[0] = 1;
            Self::from_i64s(&self.parent, &c, prec.min(i64::from(u32::MAX)) as u32)?
        };
        let theta = Self::theta(&self.parent, prec as u32)?;
        for _ in 0..r {
            cols.push(self.mul(&basis)?.coeffs);
            basis = basis.mul(&theta)?;
        }
        Ok(PadicMatrix::from_columns(&cols))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if other.coeffs.iter().all(|c| c.is_zero()) {
            return Err(Error::DivisionByIndistinguishableZero);
        }
        let m = other.multiplication_matrix()?;
        let y = m.solve(&self.coeffs)?;
        Ok(ExtElement {
            parent: self.parent.clone(),
            coeffs: y,
        })
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let cap = super::zp::max_precision(self.parent.p) as i64;
        let prec = self
            .coeffs
            .iter()
            .map(|c| c.abs_precision())
            .max()
            .unwrap_or(1)
            .clamp(1, cap) as u32;
        let mut c = vec![0i64; self.parent.r as usize];
        c[0] = 1;
        let mut acc = Self::from_i64s(&self.parent, &c, prec)?;
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Valuation in p-units, with denominator dividing e.
    pub fn valuation(&self) -> Result<Ratio<i64>> {
        let e = self.parent.e as i64;
        let mut best: Option<Ratio<i64>> = None;
        let mut floor: Option<Ratio<i64>> = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            let shift = if self.parent.e > 1 {
                Ratio::new(i as i64, e)
            } else {
                Ratio::from_integer(0)
            };
            let v = Ratio::from_integer(c.valuation()) + shift;
            if c.is_zero() {
                floor = Some(floor.map_or(v, |f: Ratio<i64>| f.min(v)));
            } else {
                best = Some(best.map_or(v, |b: Ratio<i64>| b.min(v)));
            }
        }
        match (best, floor) {
            (Some(b), Some(f)) if b >= f => {
                Err(Error::PrecisionExhausted("valuation not certified".into()))
            }
            (Some(b), _) => Ok(b),
            (None, _) => Err(Error::PrecisionExhausted(
                "element indistinguishable from 0".into(),
            )),
        }
    }

    /// `(v(x), log_p ‖x‖)`.
    pub fn norm_and_valuation(&self) -> Result<(Ratio<i64>, Ratio<i64>)> {
        let v = self.valuation()?;
        Ok((v, -v))
    }

    /// N_{K/F}(x) as the determinant of multiplication by x.
    pub fn norm_map(&self) -> Result<PadicNumber> {
        self.multiplication_matrix()?.determinant()
    }

    pub fn dist_to_base(&self) -> Distance {
        let e = self.parent.e as i64;
        let mut best: Option<Ratio<i64>> = None;
        let mut floor: Option<Ratio<i64>> = None;
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let shift = if self.parent.e > 1 {
                Ratio::new(i as i64, e)
            } else {
                Ratio::from_integer(0)
            };
            let v = Ratio::from_integer(c.valuation()) + shift;
            if c.is_zero() {
                floor = Some(floor.map_or(v, |f: Ratio<i64>| f.min(v)));
            } else {
                best = Some(best.map_or(v, |b: Ratio<i64>| b.min(v)));
            }
        }
        match best {
            None => Distance::InBase,
            Some(b) => Distance::Norm {
                exponent: -b,
                certified: floor.map_or(true, |f| b < f),
            },
        }
    }

    fn power_columns(&self, count: usize) -> Result<Vec<Vec<PadicNumber>>> {
        let cap = super::zp::max_precision(self.parent.p) as i64;
        let prec = self
            .coeffs
            .iter()
            .map(|c| c.abs_precision())
            .max()
            .unwrap_or(1)
            .clamp(1, cap) as u32;
        let mut c = vec![0i64; self.parent.r as usize];
        c[0] = 1;
        let mut acc = Self::from_i64s(&self.parent, &c, prec)?;
        let mut cols = Vec::with_capacity(count);
        for _ in 0..count {
            cols.push(acc.coeffs.clone());
            acc = acc.mul(self)?;
        }
        Ok(cols)
    }

    /// `#(O_K / O_F[x])` for integral x.
    pub fn index_of_generated_order(&self) -> Result<IndexValue> {
        let r = self.parent.r as usize;
        let det = PadicMatrix::from_columns(&self.power_columns(r)?).determinant()?;
        let limit = self
            .coeffs
            .iter()
            .map(|c| c.abs_precision())
            .min()
            .unwrap_or(0);
        if det.is_zero() {
            return Ok(IndexValue::Infinite {
                certified: self.dist_to_base() == Distance::InBase,
            });
        }
        let v = det.valuation();
        Ok(IndexValue::Finite {
            exponent: v,
            certified: v < limit - SAFETY_MARGIN,
        })
    }

    /// Degree of the minimal polynomial of x over Q_p.
    pub fn min_poly_degree(&self) -> Result<u32> {
        let r = self.parent.r as usize;
        let m = PadicMatrix::from_columns(&self.power_columns(r + 1)?);
        Ok(m.rank(SAFETY_MARGIN)? as u32)
    }
}
