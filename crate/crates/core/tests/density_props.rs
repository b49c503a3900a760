use std::sync::Arc;

use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use padic_roots::catalog::{Catalog, ExtensionField};
use padic_roots::density::*;
use padic_roots::padic::{default_precision, ExtElement, PadicNumber};
use padic_roots::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DEPTH: u32 = 4;

fn fields(p: u64) -> Vec<Arc<ExtensionField>> {
    let cat = Catalog::new(p).unwrap();
    let mut v = vec![cat.base().clone()];
    v.extend(cat.fields().iter().filter(|k| k.r <= 3).cloned());
    v
}

fn random_unit_digits(rng: &mut ChaCha8Rng, p: u64, prec: u32) -> u64 {
    loop {
        let u = rng.gen_range(0..p.pow(prec));
        if u % p != 0 {
            return u;
        }
    }
}

fn random_element(ext: &Arc<ExtensionField>, rng: &mut ChaCha8Rng, outside: bool) -> ExtElement {
    let p = ext.p;
    let prec = default_precision(p) - 6;
    let shift = if outside { rng.gen_range(0..3i64) } else { 0 };
    let coeffs = (0..ext.r)
        .map(|_| {
            if rng.gen_bool(0.15) {
                PadicNumber::zero(p, prec as i64)
            } else {
                let v = rng.gen_range(0..4i64) - shift;
                PadicNumber::from_parts(p, random_unit_digits(rng, p, prec), v, prec).unwrap()
            }
        })
        .collect();
    ExtElement::new(ext.clone(), coeffs).unwrap()
}

fn norm_pow(x: &ExtElement, k: i64) -> BigRational {
    let v = x.valuation().unwrap() * Ratio::from_integer(k);
    assert!(v.is_integer());
    q_pow(x.parent().p, -v.to_integer())
}

fn case() -> impl Strategy<Value = (u64, usize, u64)> {
    (
        prop_oneof![Just(2u64), Just(3), Just(5)],
        0usize..12,
        any::<u64>(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn homography_covariance((p, idx, seed) in case(), n in 2u32..6) {
        let fs = fields(p);
        let ext = &fs[idx % fs.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_element(ext, &mut rng, true);
        prop_assume!(x.coeffs().iter().skip(1).any(|c| !c.is_zero()) || ext.r == 1);
        prop_assume!(x.coeffs().iter().any(|c| !c.is_zero()));
        let prec = default_precision(p) - 6;
        let (a, b, c, d) = loop {
            let m: Vec<i64> = (0..4).map(|_| rng.gen_range(-40..40)).collect();
            if (m[0] * m[3] - m[1] * m[2]).rem_euclid(p as i64) != 0 {
                break (m[0], m[1], m[2], m[3]);
            }
        };
        let k = |t: i64| ExtElement::from_base(ext, PadicNumber::from_i64(p, t, prec)).unwrap();
        let num = x.mul(&k(a)).unwrap().add(&k(b)).unwrap();
        let den = x.mul(&k(c)).unwrap().add(&k(d)).unwrap();
        prop_assume!(den.coeffs().iter().any(|c| !c.is_zero()));
        let y = num.div(&den).unwrap();
        let r = ext.r as i64;
        let lhs = rho_at(&y, n, DEPTH);
        let rhs = rho_at(&x, n, DEPTH);
        match (lhs, rhs) {
            (Ok(l), Ok(rv)) => {
                let rv = rv.scale(&norm_pow(&den, 2 * r));
                if l.is_exact() && rv.is_exact() {
                    prop_assert_eq!(l, rv, "{}", ext.id);
                } else {
                    prop_assert!(l.intersect(&rv).is_some(), "{}: {} vs {}", ext.id, l, rv);
                }
            }
            (Err(Error::PrecisionExhausted(_)), _) | (_, Err(Error::PrecisionExhausted(_))) => {}
            (l, rv) => prop_assert!(false, "{}: {:?} {:?}", ext.id, l, rv),
        }
    }

    #[test]
    fn bounded_by_discriminant((p, idx, seed) in case(), n in 1u32..6) {
        let fs = fields(p);
        let ext = &fs[idx % fs.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_element(ext, &mut rng, false);
        if let Ok(v) = rho_at(&x, n, DEPTH) {
            prop_assert!(*v.lo() >= BigRational::zero());
            prop_assert!(*v.hi() <= ext.disc_norm(), "{}: {}", ext.id, v);
        }
    }

    #[test]
    fn generic_route_agrees((p, idx, seed) in case()) {
        let fs = fields(p);
        let ext = &fs[idx % fs.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_element(ext, &mut rng, false);
        let r = ext.r;
        for n in r..=2 * r {
            let g = match rho_generic(&x, n, DEPTH) {
                Ok(g) => g,
                Err(Error::NotGenerator) => {
                    prop_assert_eq!(rho_at(&x, n, DEPTH).unwrap(), DensityValue::zero());
                    continue;
                }
                Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            };
            let closed = rho_at(&x, n, DEPTH).unwrap();
            if closed.is_exact() && g.is_exact() {
                prop_assert_eq!(&g, &closed, "{} n={}", ext.id, n);
            } else {
                prop_assert!(g.contains(closed.lo()) || g.intersect(&closed).is_some(), "{} n={}: {} vs {}", ext.id, n, g, closed);
            }
        }
    }

    #[test]
    fn monotone_and_stable_in_n((p, idx, seed) in case()) {
        let fs = fields(p);
        let ext = &fs[idx % fs.len()];
        prop_assume!(ext.r >= 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_element(ext, &mut rng, false);
        let r = ext.r;
        let vals: Vec<DensityValue> = match (r..=2 * r + 1).map(|n| rho_generic(&x, n, DEPTH)).collect::<Result<_, _>>() {
            Ok(v) => v,
            Err(Error::NotGenerator) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        };
        for w in vals.windows(2) {
            prop_assert!(w[0].lo() <= w[1].hi());
        }
        let stable = (r - 1) as usize;
        prop_assert!(vals[0].hi() < vals[stable].hi());
        for v in &vals[stable..] {
            prop_assert_eq!(v, &vals[stable]);
        }
    }
}

#[test]
fn quadratic_monotony_on_distance_grid() {
    for p in [2u64, 3, 5, 7] {
        let cat = Catalog::new(p).unwrap();
        for ext in cat.of_degree(2) {
            let half = if ext.is_unramified() {
                Ratio::from_integer(0)
            } else {
                Ratio::new(-1, 2)
            };
            for v in 0..8 {
                let delta = QPow::power(half - Ratio::from_integer(v));
                let a = rho_quadratic(&delta, ext, 2).unwrap();
                let b = rho_quadratic(&delta, ext, 3).unwrap();
                assert!(a.lo() < b.lo());
                for n in 4..8 {
                    assert_eq!(rho_quadratic(&delta, ext, n).unwrap(), b);
                }
            }
        }
    }
    for r in 1..6 {
        for q in [2u64, 3, 5] {
            let vals: Vec<_> = (r..2 * r + 2)
                .map(|n| rho_unramified_generator(n, r, q).unwrap())
                .collect();
            for (i, w) in vals.windows(2).enumerate() {
                if (r as usize + i) < (2 * r - 1) as usize {
                    assert!(w[0].lo() < w[1].lo());
                } else {
                    assert_eq!(w[0], w[1]);
                }
            }
        }
    }
    assert!(BigRational::one() > BigRational::zero());
}
