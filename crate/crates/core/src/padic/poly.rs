use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::ext::ExtElement;
use super::number::PadicNumber;
use crate::catalog::ExtensionField;
use crate::error::{Error, Result};

/// A polynomial of degree at most `n` over Z_p, coefficients low → high.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadicPolynomial {
    coeffs: Vec<PadicNumber>,
}

impl PadicPolynomial {
    pub fn new(coeffs: Vec<PadicNumber>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("empty coefficient vector".into()));
        }
        let p = coeffs[0].p();
        if coeffs.iter().any(|c| c.p() != p) {
            return Err(Error::Mismatch);
        }
        Ok(PadicPolynomial { coeffs })
    }

    pub fn from_i64s(p: u64, c: &[i64], precision: u32) -> Self {
        PadicPolynomial {
            coeffs: c
                .iter()
                .map(|&a| PadicNumber::from_i64(p, a, precision))
                .collect(),
        }
    }

    pub fn from_bigints(p: u64, c: &[BigInt], precision: u32) -> Self {
        PadicPolynomial {
            coeffs: c
                .iter()
                .map(|a| PadicNumber::from_bigint(p, a, precision))
                .collect(),
        }
    }

    /// Coefficients given as residues modulo `p^precision`.
    pub fn from_residues(p: u64, c: &[u64], precision: u32) -> Self {
        PadicPolynomial {
            coeffs: c
                .iter()
                .map(|&a| PadicNumber::from_residue(p, a, precision))
                .collect(),
        }
    }

    pub fn p(&self) -> u64 {
        self.coeffs[0].p()
    }

    /// Degree bound n (the vector has n + 1 entries).
    pub fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    /// Minimal absolute precision of the coefficients.
    pub fn abs_precision(&self) -> i64 {
        self.coeffs.iter().map(|c| c.abs_precision()).min().unwrap()
    }

    /// Valuation of the Gauss norm, `None` if every coefficient is a flagged zero.
    pub fn gauss_valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .filter(|c| !c.is_zero())
            .map(|c| c.valuation())
            .min()
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return PadicPolynomial {
                coeffs: vec![PadicNumber::zero(self.p(), self.abs_precision())],
            };
        }
        let p = self.p();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| {
                c.mul(&PadicNumber::from_i64(p, i as i64, c.precision().max(1)))
                    .unwrap()
            })
            .collect();
        PadicPolynomial { coeffs }
    }

    pub fn eval(&self, x: &PadicNumber) -> Result<PadicNumber> {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(x)?.add(c)?;
        }
        Ok(acc)
    }

    pub fn eval_ext(&self, x: &ExtElement) -> Result<ExtElement> {
        let parent: &Arc<ExtensionField> = x.parent();
        let lift = |c: &PadicNumber| ExtElement::from_base(parent, c.clone());
        let mut acc = lift(self.coeffs.last().unwrap())?;
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(x)?.add(&lift(c)?)?;
        }
        Ok(acc)
    }

    /// Residues of the coefficients modulo `p^k` (integral coefficients).
    pub fn residues(&self, k: u32) -> Result<Vec<u64>> {
        self.coeffs.iter().map(|c| c.residue(k)).collect()
    }
}

/// `X^n P(1/X)` for `deg P ≤ n`.
pub fn reverse_poly(poly: &PadicPolynomial, n: usize) -> Result<PadicPolynomial> {
    if poly.degree_bound() > n {
        for c in &poly.coeffs[n + 1..] {
            if !c.is_zero() {
                return Err(Error::InvalidInput(format!("degree exceeds {n}")));
            }
        }
    }
    let p = poly.p();
    let abs = poly.abs_precision();
    let mut c: Vec<PadicNumber> = (0..=n)
        .map(|i| {
            poly.coeffs
                .get(i)
                .cloned()
                .unwrap_or_else(|| PadicNumber::zero(p, abs))
        })
        .collect();
    c.reverse();
    Ok(PadicPolynomial { coeffs: c })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reverse_swaps() {
        let p = PadicPolynomial::from_i64s(3, &[1, 2], 10);
        let r = reverse_poly(&p, 1).unwrap();
        assert_eq!(r, PadicPolynomial::from_i64s(3, &[2, 1], 10));
    }

    #[test]
    fn reverse_of_x_has_no_unit_root() {
        let p = PadicPolynomial::from_i64s(2, &[0, 1], 10);
        let r = reverse_poly(&p, 1).unwrap();
        assert!(r.coeffs()[1].is_zero());
        assert!(r.coeffs()[0].agrees_with(&PadicNumber::one(2, 10)));
    }

    #[test]
    fn eval_and_derivative() {
        let p = PadicPolynomial::from_i64s(5, &[-1, 0, 1], 10);
        let x = PadicNumber::from_i64(5, 1, 10);
        assert!(p.eval(&x).unwrap().is_zero());
        let d = p.derivative();
        assert!(d
            .eval(&x)
            .unwrap()
            .agrees_with(&PadicNumber::from_i64(5, 2, 10)));
    }
}
