//! Exact integer accumulators and the derived estimates.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Sums of an integer statistic scaled by `1/scale`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub sum: i128,
    pub sum_sq: i128,
}

impl Moments {
    pub fn push(&mut self, x: i64) {
        self.count += 1;
        self.sum += x as i128;
        self.sum_sq += (x as i128) * (x as i128);
    }

    pub fn merge(&mut self, o: &Moments) {
        self.count += o.count;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        self.sum as f64 / self.count as f64
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let m = self.mean();
        ((self.sum_sq as f64 - n * m * m) / (n - 1.0)).max(0.0)
    }

    /// Standard error of the mean.
    pub fn se(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// Joint sums for a pair of integer statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairMoments {
    pub x: Moments,
    pub y: Moments,
    pub sum_xy: i128,
}

impl PairMoments {
    pub fn push(&mut self, x: i64, y: i64) {
        self.x.push(x);
        self.y.push(y);
        self.sum_xy += x as i128 * y as i128;
    }

    pub fn merge(&mut self, o: &PairMoments) {
        self.x.merge(&o.x);
        self.y.merge(&o.y);
        self.sum_xy += o.sum_xy;
    }

    pub fn covariance(&self) -> f64 {
        let n = self.x.count as f64;
        if n < 2.0 {
            return 0.0;
        }
        (self.sum_xy as f64 - n * self.x.mean() * self.y.mean()) / (n - 1.0)
    }

    /// Mean and standard error of `x − y`.
    pub fn difference(&self) -> (f64, f64) {
        let n = self.x.count as f64;
        if n == 0.0 {
            return (0.0, 0.0);
        }
        let var = self.x.variance() + self.y.variance() - 2.0 * self.covariance();
        (self.x.mean() - self.y.mean(), (var.max(0.0) / n).sqrt())
    }
}

/// Sums needed for `E[UV]/(E[U]E[V]) − 1` and its delta-method error.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CovMoments {
    pub count: u64,
    pub u: i128,
    pub v: i128,
    pub w: i128,
    pub uu: i128,
    pub vv: i128,
    pub ww: i128,
    pub uv: i128,
    pub uw: i128,
    pub vw: i128,
}

impl CovMoments {
    pub fn push(&mut self, u: i64, v: i64) {
        let (u, v) = (u as i128, v as i128);
        let w = u * v;
        self.count += 1;
        self.u += u;
        self.v += v;
        self.w += w;
        self.uu += u * u;
        self.vv += v * v;
        self.ww += w * w;
        self.uv += u * v;
        self.uw += u * w;
        self.vw += v * w;
    }

    pub fn merge(&mut self, o: &CovMoments) {
        self.count += o.count;
        self.u += o.u;
        self.v += o.v;
        self.w += o.w;
        self.uu += o.uu;
        self.vv += o.vv;
        self.ww += o.ww;
        self.uv += o.uv;
        self.uw += o.uw;
        self.vw += o.vw;
    }

    fn means(&self) -> [f64; 3] {
        let n = self.count.max(1) as f64;
        [self.u as f64 / n, self.v as f64 / n, self.w as f64 / n]
    }

    fn cov_matrix(&self) -> [[f64; 3]; 3] {
        let n = self.count as f64;
        let m = self.means();
        let s = [
            [self.uu, self.uv, self.uw],
            [self.uv, self.vv, self.vw],
            [self.uw, self.vw, self.ww],
        ];
        let mut c = [[0.0; 3]; 3];
        if n < 2.0 {
            return c;
        }
        for i in 0..3 {
            for j in 0..3 {
                c[i][j] = (s[i][j] as f64 - n * m[i] * m[j]) / (n - 1.0);
            }
        }
        c
    }

    pub fn mean_u(&self) -> f64 {
        self.means()[0]
    }

    pub fn mean_v(&self) -> f64 {
        self.means()[1]
    }

    /// `(E[UV], se)`.
    pub fn joint(&self) -> (f64, f64) {
        let c = self.cov_matrix();
        (self.means()[2], (c[2][2] / self.count.max(1) as f64).sqrt())
    }

    /// `(Cov(U, V) / (E[U] E[V]), se)`.
    pub fn normalized_covariance(&self) -> (f64, f64) {
        let [a, b, w] = self.means();
        if a == 0.0 || b == 0.0 {
            return (f64::NAN, f64::NAN);
        }
        let g = [-w / (a * a * b), -w / (a * b * b), 1.0 / (a * b)];
        let c = self.cov_matrix();
        let mut var = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                var += g[i] * c[i][j] * g[j];
            }
        }
        (w / (a * b) - 1.0, (var.max(0.0) / self.count as f64).sqrt())
    }
}

/// `(estimate − theory)/se`, 0 when both agree exactly.
pub fn z_score(estimate: f64, se: f64, theory: f64) -> f64 {
    let d = estimate - theory;
    if d == 0.0 {
        0.0
    } else if se == 0.0 {
        f64::INFINITY.copysign(d)
    } else {
        d / se
    }
}

/// Distance in standard errors from the interval `[lo, hi]`.
pub fn z_outside(estimate: f64, se: f64, lo: f64, hi: f64) -> f64 {
    if estimate < lo {
        z_score(estimate, se, lo)
    } else if estimate > hi {
        z_score(estimate, se, hi)
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub pooled_cells: usize,
}

/// Pearson statistic of observed counts against absolute expectations,
/// cells with expectation below `min_expected` pooled into one bucket.
pub fn chi_square(observed: &[u64], expected: &[f64], min_expected: f64) -> ChiSquare {
    assert_eq!(observed.len(), expected.len());
    let mut stat = 0.0;
    let mut buckets = 0usize;
    let (mut po, mut pe, mut pooled) = (0.0, 0.0, 0usize);
    for (&o, &e) in observed.iter().zip(expected) {
        if e < min_expected {
            po += o as f64;
            pe += e;
            pooled += 1;
        } else {
            stat += (o as f64 - e).powi(2) / e;
            buckets += 1;
        }
    }
    if pe > 0.0 {
        stat += (po - pe).powi(2) / pe;
        buckets += 1;
    } else if po > 0.0 {
        stat = f64::INFINITY;
    }
    let dof = buckets.max(1);
    let p_value = if stat.is_finite() {
        1.0 - ChiSquared::new(dof as f64)
            .map(|d| d.cdf(stat))
            .unwrap_or(1.0)
    } else {
        0.0
    };
    ChiSquare {
        statistic: stat,
        dof,
        p_value,
        pooled_cells: pooled,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments() {
        let mut m = Moments::default();
        for x in [1, 2, 3, 4] {
            m.push(x);
        }
        assert_eq!(m.mean(), 2.5);
        assert!((m.variance() - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn merge_is_associative() {
        let mut a = CovMoments::default();
        let mut b = CovMoments::default();
        let mut c = CovMoments::default();
        a.push(1, 2);
        b.push(0, 3);
        c.push(2, 2);
        let mut ab_c = a;
        ab_c.merge(&b);
        ab_c.merge(&c);
        let mut bc = b;
        bc.merge(&c);
        let mut a_bc = a;
        a_bc.merge(&bc);
        assert_eq!(ab_c, a_bc);
    }

    #[test]
    fn independent_counts_have_no_covariance() {
        let mut m = CovMoments::default();
        for u in 0..4 {
            for v in 0..4 {
                m.push(u, v);
            }
        }
        let (c, se) = m.normalized_covariance();
        assert!(c.abs() < 1e-12);
        assert!(se > 0.0);
    }

    #[test]
    fn chi_square_exact_fit() {
        let r = chi_square(&[10, 20, 30], &[10.0, 20.0, 30.0], 5.0);
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        let r = chi_square(&[0, 1, 50], &[1.0, 1.0, 50.0], 5.0);
        assert_eq!(r.pooled_cells, 2);
        assert_eq!(r.dof, 2);
    }

    #[test]
    fn paired_difference() {
        let mut m = PairMoments::default();
        for x in 0..10 {
            m.push(x, x);
        }
        assert_eq!(m.difference(), (0.0, 0.0));
    }
}
