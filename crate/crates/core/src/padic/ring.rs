//! Word-sized arithmetic in O_K / p^N O_K and in the residue field of K.
//!
//! Elements are coordinate slices of length r in the power basis.
//! Valuations are measured in π-units (π = p when unramified, θ when
//! Eisenstein), so they are integers capped at `prec_pi`.

use super::zp::Zp;
use crate::catalog::ExtensionField;
use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 16;
const TABLE_LIMIT: usize = 1024;

/// The residue field F_{p^f} = F_p[X]/(ḡ), elements indexed by their
/// base-p digit vectors.
#[derive(Clone, Debug)]
pub struct ResidueField {
    p: u32,
    f: usize,
    size: usize,
    gbar: Vec<u32>,
    mul_table: Option<Vec<u32>>,
    inv_table: Vec<u32>,
}

impl ResidueField {
    pub fn new(p: u64, gbar: Vec<u32>) -> Result<Self> {
        let f = gbar.len();
        let size = (p as usize)
            .checked_pow(f as u32)
            .filter(|&s| s <= 1 << 24)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "residue field of size {p}^{f} is too large to enumerate"
                ))
            })?;
        let mut k = ResidueField {
            p: p as u32,
            f,
            size,
            gbar,
            mul_table: None,
            inv_table: Vec::new(),
        };
        if size <= TABLE_LIMIT {
            let mut t = vec![0u32; size * size];
            for a in 0..size {
                for b in a..size {
                    let c = k.mul_slow(a as u32, b as u32);
                    t[a * size + b] = c;
                    t[b * size + a] = c;
                }
            }
            k.mul_table = Some(t);
        }
        let mut inv = vec![0u32; if size <= TABLE_LIMIT { size } else { 0 }];
        if !inv.is_empty() {
            for a in 1..size {
                for b in 1..size {
                    if k.mul(a as u32, b as u32) == 1 {
                        inv[a] = b as u32;
                        break;
                    }
                }
            }
        }
        k.inv_table = inv;
        Ok(k)
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }
    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }
    #[inline]
    pub fn degree(&self) -> usize {
        self.f
    }

    pub fn digits(&self, a: u32) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.f);
        let mut a = a;
        for _ in 0..self.f {
            d.push(a % self.p);
            a /= self.p;
        }
        d
    }

    pub fn from_digits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0u32, |acc, &x| acc * self.p + x)
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.f == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b, mut out, mut scale) = (a, b, 0u32, 1u32);
        for _ in 0..self.f {
            out += ((a % self.p + b % self.p) % self.p) * scale;
            a /= self.p;
            b /= self.p;
            scale *= self.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.f == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let (mut a, mut out, mut scale) = (a, 0u32, 1u32);
        for _ in 0..self.f {
            out += ((self.p - a % self.p) % self.p) * scale;
            a /= self.p;
            scale *= self.p;
        }
        out
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.mul_table {
            Some(t) => t[a as usize * self.size + b as usize],
            None => self.mul_slow(a, b),
        }
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        if self.f == 1 {
            return ((a as u64 * b as u64) % p) as u32;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let mut t = vec![0u64; 2 * self.f - 1];
        for i in 0..self.f {
            for j in 0..self.f {
                t[i + j] = (t[i + j] + da[i] as u64 * db[j] as u64) % p;
            }
        }
        for k in (self.f..2 * self.f - 1).rev() {
            let c = t[k];
            if c == 0 {
                continue;
            }
            for i in 0..self.f {
                let sub = c * self.gbar[i] as u64 % p;
                t[k - self.f + i] = (t[k - self.f + i] + p - sub) % p;
            }
        }
        let d: Vec<u32> = t[..self.f].iter().map(|&x| x as u32).collect();
        self.from_digits(&d)
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        if !self.inv_table.is_empty() {
            return Some(self.inv_table[a as usize]);
        }
        let mut acc = 1u32;
        let mut base = a;
        let mut e = self.size as u64 - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        Some(acc)
    }

    /// Evaluate a residue polynomial (low → high) at `x`.
    #[inline]
    pub fn eval(&self, poly: &[u32], x: u32) -> u32 {
        let mut acc = 0u32;
        for &c in poly.iter().rev() {
            acc = self.add(self.mul(acc, x), c);
        }
        acc
    }

    /// Formal derivative.
    pub fn derivative(&self, poly: &[u32]) -> Vec<u32> {
        let mut d = Vec::with_capacity(poly.len().saturating_sub(1));
        for (i, &c) in poly.iter().enumerate().skip(1) {
            let k = (i as u32) % self.p;
            let mut acc = 0u32;
            for _ in 0..k {
                acc = self.add(acc, c);
            }
            d.push(acc);
        }
        d
    }

    /// Degree of the smallest subfield containing `a` over F_p.
    pub fn generated_degree(&self, a: u32) -> usize {
        let mut x = a;
        for m in 1..=self.f {
            let mut y = x;
            for _ in 1..self.p {
                y = self.mul(y, x);
            }
            x = y;
            if x == a && self.f % m == 0 {
                return m;
            }
        }
        self.f
    }
}

/// O_K modulo p^N for an unramified or Eisenstein defining polynomial.
#[derive(Clone, Debug)]
pub struct OkRing {
    pub zp: Zp,
    r: usize,
    e: u32,
    f: u32,
    g: Vec<u64>,
    w: Vec<u64>,
    prec_pi: u32,
    field: ResidueField,
}

impl OkRing {
    pub fn new(ext: &ExtensionField, precision: u32) -> Result<Self> {
        let zp = Zp::new(ext.p, precision)?;
        let r = ext.r as usize;
        if r > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(ext.r));
        }
        let g: Vec<u64> = ext.poly[..r]
            .iter()
            .map(|&c| zp.reduce_i128(c as i128))
            .collect();
        let p = ext.p;
        let (field, w) = if ext.e > 1 {
            let g0 = ext.poly[0];
            if g0 % p as i64 != 0 || (g0 / p as i64) % p as i64 == 0 {
                return Err(Error::InvalidInput(
                    "defining polynomial is not Eisenstein".into(),
                ));
            }
            let u0 = zp.reduce_i128((g0 / p as i64) as i128);
            let minus_inv = zp.neg(zp.inv(u0).unwrap());
            let mut w = vec![0u64; r];
            for i in 0..r {
                let c = if i == r - 1 { 1 } else { g[i + 1] };
                w[i] = zp.mul(minus_inv, c);
            }
            (ResidueField::new(p, vec![0])?, w)
        } else {
            let gbar: Vec<u32> = ext.poly[..r]
                .iter()
                .map(|&c| c.rem_euclid(p as i64) as u32)
                .collect();
            (ResidueField::new(p, gbar)?, Vec::new())
        };
        let prec_pi = precision * ext.e;
        Ok(OkRing {
            zp,
            r,
            e: ext.e,
            f: ext.f,
            g,
            w,
            prec_pi,
            field,
        })
    }

    #[inline]
    pub fn r(&self) -> usize {
        self.r
    }
    #[inline]
    pub fn e(&self) -> u32 {
        self.e
    }
    #[inline]
    pub fn f(&self) -> u32 {
        self.f
    }
    #[inline]
    pub fn p(&self) -> u64 {
        self.zp.p()
    }
    #[inline]
    pub fn precision(&self) -> u32 {
        self.zp.precision()
    }
    #[inline]
    pub fn prec_pi(&self) -> u32 {
        self.prec_pi
    }
    #[inline]
    pub fn field(&self) -> &ResidueField {
        &self.field
    }
    #[inline]
    pub fn eisenstein(&self) -> bool {
        self.e > 1
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.r]
    }

    pub fn one(&self) -> Vec<u64> {
        let mut v = vec![0; self.r];
        v[0] = 1 % self.zp.modulus();
        v
    }

    pub fn from_int(&self, a: i128) -> Vec<u64> {
        let mut v = vec![0; self.r];
        v[0] = self.zp.reduce_i128(a);
        v
    }

    #[inline]
    pub fn add_into(&self, a: &mut [u64], b: &[u64]) {
        for (x, &y) in a.iter_mut().zip(b) {
            *x = self.zp.add(*x, y);
        }
    }

    #[inline]
    pub fn sub_into(&self, a: &mut [u64], b: &[u64]) {
        for (x, &y) in a.iter_mut().zip(b) {
            *x = self.zp.sub(*x, y);
        }
    }

    #[inline]
    pub fn neg_into(&self, a: &mut [u64]) {
        for x in a.iter_mut() {
            *x = self.zp.neg(*x);
        }
    }

    /// `out = a · b`.
    #[inline]
    pub fn mul(&self, a: &[u64], b: &[u64], out: &mut [u64]) {
        let r = self.r;
        let zp = &self.zp;
        if r == 1 {
            out[0] = zp.mul(a[0], b[0]);
            return;
        }
        let mut t = [0u64; 2 * MAX_DEGREE];
        for i in 0..r {
            if a[i] == 0 {
                continue;
            }
            for j in 0..r {
                t[i + j] = zp.add(t[i + j], zp.mul(a[i], b[j]));
            }
        }
        for k in (r..2 * r - 1).rev() {
            let c = t[k];
            if c == 0 {
                continue;
            }
            for i in 0..r {
                if self.g[i] != 0 {
                    t[k - r + i] = zp.sub(t[k - r + i], zp.mul(c, self.g[i]));
                }
            }
        }
        out[..r].copy_from_slice(&t[..r]);
    }

    #[inline]
    pub fn mul_assign(&self, a: &mut [u64], b: &[u64]) {
        let mut t = [0u64; MAX_DEGREE];
        self.mul(a, b, &mut t);
        a.copy_from_slice(&t[..self.r]);
    }

    #[inline]
    pub fn scale(&self, a: &mut [u64], s: u64) {
        for x in a.iter_mut() {
            *x = self.zp.mul(*x, s);
        }
    }

    /// Valuation in π-units, capped at `prec_pi`.
    #[inline]
    pub fn val(&self, a: &[u64]) -> u32 {
        if self.e == 1 {
            a.iter().map(|&x| self.zp.val(x)).min().unwrap()
        } else {
            let e = self.e;
            let mut best = self.prec_pi;
            for (i, &x) in a.iter().enumerate() {
                if x != 0 {
                    best = best.min(e * self.zp.val(x) + i as u32);
                }
            }
            best
        }
    }

    #[inline]
    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    /// Multiply by π in place.
    #[inline]
    pub fn mul_pi(&self, a: &mut [u64]) {
        if self.e == 1 {
            let p = self.p();
            for x in a.iter_mut() {
                *x = self.zp.mul(*x, p);
            }
            return;
        }
        let r = self.r;
        let top = a[r - 1];
        for i in (1..r).rev() {
            a[i] = a[i - 1];
        }
        a[0] = 0;
        if top != 0 {
            for i in 0..r {
                a[i] = self.zp.sub(a[i], self.zp.mul(top, self.g[i]));
            }
        }
    }

    pub fn mul_pi_pow(&self, a: &mut [u64], k: u32) {
        if self.e == 1 {
            let s = if k >= self.precision() {
                0
            } else {
                self.zp.pow(k)
            };
            self.scale(a, s);
            return;
        }
        for _ in 0..k.min(self.prec_pi) {
            self.mul_pi(a);
        }
        if k >= self.prec_pi {
            a.iter_mut().for_each(|x| *x = 0);
        }
    }

    /// Divide by π once; requires `val(a) ≥ 1`.  The top digit becomes unknown
    /// (set to 0), which callers account for in their precision.
    #[inline]
    pub fn div_pi(&self, a: &mut [u64]) {
        let p = self.p();
        if self.e == 1 {
            for x in a.iter_mut() {
                *x /= p;
            }
            return;
        }
        let r = self.r;
        let a0 = a[0] / p;
        for i in 0..r - 1 {
            a[i] = a[i + 1];
        }
        a[r - 1] = 0;
        if a0 != 0 {
            for i in 0..r {
                a[i] = self.zp.add(a[i], self.zp.mul(a0, self.w[i]));
            }
        }
    }

    pub fn div_pi_pow(&self, a: &mut [u64], k: u32) {
        if self.e == 1 {
            let d = self.zp.pow(k);
            for x in a.iter_mut() {
                *x /= d;
            }
            return;
        }
        for _ in 0..k {
            self.div_pi(a);
        }
    }

    /// Image in the residue field.
    #[inline]
    pub fn residue(&self, a: &[u64]) -> u32 {
        let p = self.p();
        if self.e > 1 {
            return (a[0] % p) as u32;
        }
        a.iter()
            .rev()
            .fold(0u32, |acc, &x| acc * p as u32 + (x % p) as u32)
    }

    /// Teichmüller-free lift of a residue: the digit vector itself.
    #[inline]
    pub fn lift(&self, z: u32, out: &mut [u64]) {
        out.iter_mut().for_each(|x| *x = 0);
        if self.e > 1 {
            out[0] = z as u64;
            return;
        }
        let p = self.p() as u32;
        let mut z = z;
        for x in out.iter_mut().take(self.r) {
            *x = (z % p) as u64;
            z /= p;
        }
    }

    /// Inverse of a unit.
    pub fn inv_unit(&self, a: &[u64]) -> Option<Vec<u64>> {
        let z = self.residue(a);
        let zi = self.field.inv(z)?;
        let mut y = vec![0u64; self.r];
        self.lift(zi, &mut y);
        let mut digits = 1u32;
        let mut t = vec![0u64; self.r];
        while digits < self.prec_pi {
            self.mul(a, &y, &mut t);
            self.neg_into(&mut t);
            t[0] = self.zp.add(t[0], 2);
            let mut y2 = vec![0u64; self.r];
            self.mul(&y, &t, &mut y2);
            y = y2;
            digits *= 2;
        }
        Some(y)
    }

    /// Multiply a flat polynomial (stride r) by `c`.
    pub fn poly_eval(&self, poly: &[u64], x: &[u64], out: &mut [u64]) {
        let r = self.r;
        let n = poly.len() / r;
        out[..r].copy_from_slice(&poly[(n - 1) * r..n * r]);
        let mut t = [0u64; MAX_DEGREE];
        for j in (0..n - 1).rev() {
            self.mul(&out[..r], x, &mut t);
            for i in 0..r {
                out[i] = self.zp.add(t[i], poly[j * r + i]);
            }
        }
    }

    /// In-place Taylor shift `Q(X) ↦ Q(X + c)` of a flat polynomial.
    pub fn taylor_shift(&self, poly: &mut [u64], c: &[u64]) {
        let r = self.r;
        let n = poly.len() / r;
        if n < 2 {
            return;
        }
        let mut t = [0u64; MAX_DEGREE];
        let zero_c = self.is_zero(c);
        if zero_c {
            return;
        }
        for i in 0..n - 1 {
            for j in (i..n - 1).rev() {
                self.mul(&poly[(j + 1) * r..(j + 2) * r], c, &mut t);
                for k in 0..r {
                    poly[j * r + k] = self.zp.add(poly[j * r + k], t[k]);
                }
            }
        }
    }

    /// `Q(X) ↦ Q(πX)`.
    pub fn scale_pi(&self, poly: &mut [u64]) {
        let r = self.r;
        let n = poly.len() / r;
        for j in 1..n {
            self.mul_pi_pow(&mut poly[j * r..(j + 1) * r], j as u32);
        }
    }

    /// Minimal coefficient valuation of a flat polynomial.
    pub fn poly_content(&self, poly: &[u64]) -> u32 {
        poly.chunks(self.r)
            .map(|c| self.val(c))
            .min()
            .unwrap_or(self.prec_pi)
    }

    pub fn poly_residue(&self, poly: &[u64], out: &mut Vec<u32>) {
        out.clear();
        out.extend(poly.chunks(self.r).map(|c| self.residue(c)));
        while out.len() > 1 && *out.last().unwrap() == 0 {
            out.pop();
        }
    }

    /// Embed a Z/p^N polynomial.
    pub fn embed_poly(&self, coeffs: &[u64]) -> Vec<u64> {
        let r = self.r;
        let mut out = vec![0u64; coeffs.len() * r];
        for (j, &c) in coeffs.iter().enumerate() {
            out[j * r] = c % self.zp.modulus();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ext(p: u64, poly: Vec<i64>, e: u32) -> ExtensionField {
        let r = poly.len() as u32 - 1;
        ExtensionField {
            id: "t".into(),
            p,
            r,
            e,
            f: r / e,
            poly,
            disc_valuation: 0,
            aut_count: 1,
            galois: false,
        }
    }

    #[test]
    fn theta_times_w_is_p() {
        let k = OkRing::new(&ext(2, vec![-2, 2, 1], 2), 30).unwrap();
        let theta = vec![0, 1];
        let mut out = vec![0; 2];
        k.mul(&theta, &k.w, &mut out);
        assert_eq!(out, vec![2, 0]);
    }

    #[test]
    fn pi_division_roundtrip() {
        let k = OkRing::new(&ext(3, vec![3, 0, 3, 1], 3), 20).unwrap();
        let a = vec![5u64, 7, 11];
        let mut b = a.clone();
        k.mul_pi_pow(&mut b, 4);
        assert_eq!(k.val(&b), 4);
        k.div_pi_pow(&mut b, 4);
        let m = k.zp.pow(18);
        assert!(a.iter().zip(&b).all(|(x, y)| x % m == y % m));
    }

    #[test]
    fn residue_field_of_q4() {
        let k = OkRing::new(&ext(2, vec![1, 1, 1], 1), 20).unwrap();
        let f = k.field();
        assert_eq!(f.size(), 4);
        for a in 1..4 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        assert_eq!(f.generated_degree(1), 1);
        assert_eq!(f.generated_degree(2), 2);
    }

    #[test]
    fn unit_inverse() {
        let k = OkRing::new(&ext(5, vec![-2, 0, 1], 1), 20).unwrap();
        let a = vec![3u64, 7];
        let ai = k.inv_unit(&a).unwrap();
        let mut out = vec![0; 2];
        k.mul(&a, &ai, &mut out);
        assert_eq!(out, vec![1, 0]);
    }

    #[test]
    fn taylor_shift_matches_eval() {
        let k = OkRing::new(&ext(7, vec![-3, 0, 1], 1), 15).unwrap();
        let poly = k.embed_poly(&[4, 0, 2, 1]);
        let c = vec![3u64, 5];
        let mut shifted = poly.clone();
        k.taylor_shift(&mut shifted, &c);
        let mut v1 = vec![0; 2];
        k.poly_eval(&shifted, &k.zero(), &mut v1);
        let mut v2 = vec![0; 2];
        k.poly_eval(&poly, &c, &mut v2);
        assert_eq!(v1, v2);
    }
}
