//! Polynomials over F_p (coefficients low → high, trimmed).

fn trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn inv(a: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    trim(&mut a);
    let dm = m.len() - 1;
    let lead_inv = inv(m[dm], p);
    while a.len() > dm && !(a.len() == 1 && a[0] == 0) {
        let k = a.len() - 1;
        let c = a[k] * lead_inv % p;
        for i in 0..=dm {
            let t = c * m[i] % p;
            a[k - dm + i] = (a[k - dm + i] + p - t) % p;
        }
        a[k] = 0;
        trim(&mut a);
    }
    a
}

pub fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut t = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            t[i + j] = (t[i + j] + x * y) % p;
        }
    }
    rem(&t, m, p)
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `X^{p^k} mod m`.
fn frobenius_power(m: &[u64], p: u64, k: u32) -> Vec<u64> {
    let mut x = rem(&[0, 1], m, p);
    for _ in 0..k {
        let mut acc = vec![1u64];
        let mut base = x.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, m, p);
            }
            base = mul_mod(&base, &base, m, p);
            e >>= 1;
        }
        x = acc;
    }
    x
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn sub_x(a: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    if a.len() < 2 {
        a.resize(2, 0);
    }
    a[1] = (a[1] + p - 1) % p;
    trim(&mut a);
    a
}

/// Rabin's irreducibility test for a monic polynomial.
pub fn is_irreducible(m: &[u64], p: u64) -> bool {
    let f = (m.len() - 1) as u32;
    if f == 0 {
        return false;
    }
    if f == 1 {
        return true;
    }
    let full = sub_x(&frobenius_power(m, p, f), p);
    if !(full.len() == 1 && full[0] == 0) {
        return false;
    }
    for l in prime_factors(f) {
        let h = sub_x(&frobenius_power(m, p, f / l), p);
        let g = gcd(m, &h, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Smallest monic irreducible polynomial of degree f, trying trinomials
/// `X^f + aX + b` before the full lexicographic search.
pub fn irreducible(p: u64, f: u32) -> Vec<u64> {
    let f = f as usize;
    for a in 0..p {
        for b in 1..p {
            let mut m = vec![0u64; f + 1];
            m[0] = b;
            if f > 1 {
                m[1] = a;
            } else {
                m[0] = (b + a) % p;
            }
            m[f] = 1;
            if is_irreducible(&m, p) {
                return m;
            }
        }
    }
    let total = p.pow(f as u32);
    for idx in 0..total {
        let mut m = vec![0u64; f + 1];
        let mut k = idx;
        for c in m.iter_mut().take(f) {
            *c = k % p;
            k /= p;
        }
        m[f] = 1;
        if is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_irreducibles() {
        assert!(is_irreducible(&[1, 1, 1], 2));
        assert!(!is_irreducible(&[1, 0, 1], 2));
        assert!(is_irreducible(&[1, 1, 0, 1], 2));
        assert!(!is_irreducible(&[1, 0, 1, 0, 1], 2));
        assert!(is_irreducible(&[1, 1, 0, 0, 1], 2));
    }

    #[test]
    fn counts_match_necklace_formula() {
        for (p, f, expect) in [(2u64, 4usize, 3usize), (3, 3, 8), (2, 6, 9)] {
            let mut count = 0;
            for idx in 0..p.pow(f as u32) {
                let mut m = vec![0u64; f + 1];
                let mut k = idx;
                for c in m.iter_mut().take(f) {
                    *c = k % p;
                    k /= p;
                }
                m[f] = 1;
                if is_irreducible(&m, p) {
                    count += 1;
                }
            }
            assert_eq!(count, expect);
        }
    }
}
