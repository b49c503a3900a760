//! Small dense matrices over Q_p: determinant, rank and solve by
//! valuation-pivoted elimination.

use super::number::PadicNumber;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct PadicMatrix {
    rows: usize,
    cols: usize,
    a: Vec<PadicNumber>,
}

impl PadicMatrix {
    pub fn new(rows: usize, cols: usize, a: Vec<PadicNumber>) -> Self {
        assert_eq!(a.len(), rows * cols);
        PadicMatrix { rows, cols, a }
    }

    /// Matrix whose j-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<PadicNumber>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, |c| c.len());
        let mut a = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for c in columns {
                a.push(c[i].clone());
            }
        }
        PadicMatrix { rows, cols, a }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &PadicNumber {
        &self.a[i * self.cols + j]
    }

    fn swap_rows(&mut self, i: usize, k: usize) {
        if i == k {
            return;
        }
        for j in 0..self.cols {
            self.a.swap(i * self.cols + j, k * self.cols + j);
        }
    }

    fn swap_cols(&mut self, j: usize, k: usize) {
        if j == k {
            return;
        }
        for i in 0..self.rows {
            self.a.swap(i * self.cols + j, i * self.cols + k);
        }
    }

    /// Entry of minimal valuation in the trailing block starting at `(s, s)`.
    fn pivot(&self, s: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, i64)> = None;
        for i in s..self.rows {
            for j in s..self.cols {
                let x = self.get(i, j);
                if x.is_zero() {
                    continue;
                }
                if best.map_or(true, |(_, _, v)| x.valuation() < v) {
                    best = Some((i, j, x.valuation()));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }

    fn eliminate(&mut self, s: usize) -> Result<()> {
        let piv = self.get(s, s).clone();
        for i in s + 1..self.rows {
            let x = self.get(i, s).clone();
            if x.is_zero() {
                self.a[i * self.cols + s] = PadicNumber::zero(x.p(), x.valuation());
                continue;
            }
            let factor = x.div(&piv)?;
            for j in s..self.cols {
                let t = factor.mul(self.get(s, j))?;
                let y = self.get(i, j).sub(&t)?;
                self.a[i * self.cols + j] = y;
            }
        }
        Ok(())
    }

    /// Determinant; a flagged zero when the matrix is singular at precision.
    pub fn determinant(&self) -> Result<PadicNumber> {
        if self.rows != self.cols {
            return Err(Error::InvalidInput(
                "determinant of a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        if n == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        let p = self.a[0].p();
        let mut m = self.clone();
        let mut sign_flip = false;
        let mut det: Option<PadicNumber> = None;
        for s in 0..n {
            let Some((i, j)) = m.pivot(s) else {
                let pivots = det.as_ref().map_or(0, |d| d.valuation());
                let rest = (s..n)
                    .flat_map(|i| (s..n).map(move |j| (i, j)))
                    .map(|(i, j)| m.get(i, j).abs_precision())
                    .min()
                    .unwrap_or(0);
                return Ok(PadicNumber::zero(p, pivots + rest));
            };
            if i != s {
                m.swap_rows(i, s);
                sign_flip = !sign_flip;
            }
            if j != s {
                m.swap_cols(j, s);
                sign_flip = !sign_flip;
            }
            m.eliminate(s)?;
            let piv = m.get(s, s).clone();
            det = Some(match det {
                None => piv,
                Some(d) => d.mul(&piv)?,
            });
        }
        let d = det.expect("n > 0");
        Ok(if sign_flip { d.neg() } else { d })
    }

    /// Rank, pivoting only on entries at least `margin` digits above their
    /// own precision floor.  Residual entries that are small but not
    /// flagged zero make the decision ambiguous.
    pub fn rank(&self, margin: i64) -> Result<usize> {
        let mut m = self.clone();
        let k = self.rows.min(self.cols);
        for s in 0..k {
            let mut best: Option<(usize, usize, i64)> = None;
            let mut ambiguous = false;
            for i in s..m.rows {
                for j in s..m.cols {
                    let x = m.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if x.precision() as i64 <= margin {
                        ambiguous = true;
                        continue;
                    }
                    if best.map_or(true, |(_, _, v)| x.valuation() < v) {
                        best = Some((i, j, x.valuation()));
                    }
                }
            }
            match best {
                Some((i, j, _)) => {
                    m.swap_rows(i, s);
                    m.swap_cols(j, s);
                    m.eliminate(s)?;
                }
                None if ambiguous => return Err(Error::AmbiguousRank),
                None => return Ok(s),
            }
        }
        Ok(k)
    }

    /// Solve `M y = b` for square invertible `M`.
    pub fn solve(&self, b: &[PadicNumber]) -> Result<Vec<PadicNumber>> {
        let n = self.rows;
        if n != self.cols || b.len() != n {
            return Err(Error::InvalidInput("shape mismatch in solve".into()));
        }
        let mut m = PadicMatrix {
            rows: n,
            cols: n + 1,
            a: Vec::with_capacity(n * (n + 1)),
        };
        for i in 0..n {
            for j in 0..n {
                m.a.push(self.get(i, j).clone());
            }
            m.a.push(b[i].clone());
        }
        for s in 0..n {
            let mut best: Option<(usize, i64)> = None;
            for i in s..n {
                let x = m.get(i, s);
                if !x.is_zero() && best.map_or(true, |(_, v)| x.valuation() < v) {
                    best = Some((i, x.valuation()));
                }
            }
            let (i, _) = best.ok_or(Error::DivisionByIndistinguishableZero)?;
            m.swap_rows(i, s);
            m.eliminate(s)?;
        }
        let mut y: Vec<Option<PadicNumber>> = vec![None; n];
        for s in (0..n).rev() {
            let mut acc = m.get(s, n).clone();
            for j in s + 1..n {
                let t = m.get(s, j).mul(y[j].as_ref().unwrap())?;
                acc = acc.sub(&t)?;
            }
            y[s] = Some(acc.div(m.get(s, s))?);
        }
        Ok(y.into_iter().map(Option::unwrap).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(p: u64, rows: usize, cols: usize, v: &[i64]) -> PadicMatrix {
        PadicMatrix::new(
            rows,
            cols,
            v.iter().map(|&x| PadicNumber::from_i64(p, x, 20)).collect(),
        )
    }

    #[test]
    fn det_small() {
        let m = mat(3, 2, 2, &[1, 2, 3, 4]);
        let d = m.determinant().unwrap();
        assert!(d.agrees_with(&PadicNumber::from_i64(3, -2, 20)));
        let m = mat(2, 3, 3, &[2, 0, 0, 0, 4, 1, 0, 0, 8]);
        assert_eq!(m.determinant().unwrap().valuation(), 6);
    }

    #[test]
    fn rank_detects_dependency() {
        let m = mat(5, 2, 3, &[1, 2, 3, 2, 4, 6]);
        assert_eq!(m.rank(8).unwrap(), 1);
        let m = mat(5, 2, 3, &[1, 2, 3, 2, 4, 7]);
        assert_eq!(m.rank(8).unwrap(), 2);
    }

    #[test]
    fn solve_roundtrip() {
        let m = mat(7, 2, 2, &[3, 1, 7, 2]);
        let b = [
            PadicNumber::from_i64(7, 5, 20),
            PadicNumber::from_i64(7, 9, 20),
        ];
        let y = m.solve(&b).unwrap();
        let r0 = m
            .get(0, 0)
            .mul(&y[0])
            .unwrap()
            .add(&m.get(0, 1).mul(&y[1]).unwrap())
            .unwrap();
        assert!(r0.agrees_with(&b[0]));
    }
}
