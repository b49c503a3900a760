//! Residue arithmetic in Z/p^N with word-sized residues.

use crate::error::{Error, Result};

/// Largest exponent `N` with `p^N < 2^63`.
pub fn max_precision(p: u64) -> u32 {
    let mut n = 0u32;
    let mut acc: u128 = 1;
    while acc * p as u128 <= (1u128 << 63) - 1 {
        acc *= p as u128;
        n += 1;
    }
    n
}

/// Default working precision for prime `p`.
pub fn default_precision(p: u64) -> u32 {
    max_precision(p).min(48)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The ring Z/p^N.
#[derive(Clone, Debug)]
pub struct Zp {
    p: u64,
    n: u32,
    pows: Vec<u64>,
    pow2: bool,
}

impl Zp {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        let cap = max_precision(p);
        if n == 0 || n > cap {
            return Err(Error::InvalidInput(format!(
                "precision {n} outside 1..={cap} for p = {p}"
            )));
        }
        let mut pows = Vec::with_capacity(n as usize + 1);
        let mut acc = 1u64;
        for _ in 0..=n {
            pows.push(acc);
            acc = acc.saturating_mul(p);
        }
        Ok(Zp {
            p,
            n,
            pows,
            pow2: p == 2,
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn precision(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.pows[self.n as usize]
    }

    #[inline]
    pub fn pow(&self, k: u32) -> u64 {
        self.pows[k.min(self.n) as usize]
    }

    #[inline]
    pub fn reduce_i128(&self, a: i128) -> u64 {
        a.rem_euclid(self.modulus() as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let m = self.modulus();
        let s = a + b;
        if s >= m {
            s - m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus() - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus() - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.pow2 {
            a.wrapping_mul(b) & (self.modulus() - 1)
        } else {
            ((a as u128 * b as u128) % self.modulus() as u128) as u64
        }
    }

    /// `v_p(a)`, or `N` when `a ≡ 0`.
    #[inline]
    pub fn val(&self, a: u64) -> u32 {
        if a == 0 {
            return self.n;
        }
        if self.pow2 {
            return a.trailing_zeros().min(self.n);
        }
        let mut v = 0;
        let mut a = a;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }

    /// Inverse of a unit modulo p^N.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a % self.p == 0 {
            return None;
        }
        let m = self.modulus() as i128;
        let (mut r0, mut r1) = (m, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Some(t0.rem_euclid(m) as u64)
    }

    pub fn pow_mod(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.modulus();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Signed representative in `(-p^N/2, p^N/2]`.
    pub fn signed(&self, a: u64) -> i128 {
        let m = self.modulus();
        if a > m / 2 {
            a as i128 - m as i128
        } else {
            a as i128
        }
    }
}
