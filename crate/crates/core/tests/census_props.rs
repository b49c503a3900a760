use std::sync::Arc;

use num_rational::BigRational;
use padic_roots::catalog::{Catalog, ExtensionField};
use padic_roots::census::*;
use padic_roots::padic::{default_precision, Distance, PadicPolynomial};
use proptest::prelude::*;

fn fields(p: u64, max_r: u32) -> Vec<Arc<ExtensionField>> {
    Catalog::new(p)
        .unwrap()
        .fields()
        .iter()
        .filter(|k| k.r <= max_r)
        .cloned()
        .collect()
}

fn random_poly(p: u64, n: usize) -> impl Strategy<Value = Vec<u64>> {
    let m = p.pow(default_precision(p));
    proptest::collection::vec(0..m, n + 1)
}

fn cases() -> impl Strategy<Value = (u64, usize, Vec<u64>)> {
    (prop_oneof![Just(2u64), Just(3), Just(5)], 1usize..=5)
        .prop_flat_map(|(p, n)| (Just(p), Just(n), random_poly(p, n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kac_rice_matches_root_count((p, _n, c) in cases()) {
        let prec = default_precision(p);
        for k in fields(p, 2) {
            let finder = RootFinder::new(k.clone(), prec).unwrap();
            let count = finder.count(&c);
            if count.flagged() {
                continue;
            }
            match kac_rice_residues(&finder, &c, prec - 8, 4 * prec) {
                Ok(v) => prop_assert_eq!(v, BigRational::from_integer(count.in_ring.into()), "{}", k.id),
                Err(e) => prop_assert!(false, "{}: {:?}", k.id, e),
            }
        }
    }

    #[test]
    fn reversal_swaps_inside_and_outside((p, _n, c) in cases()) {
        let prec = default_precision(p);
        let mut rev = c.clone();
        rev.reverse();
        prop_assume!(c[0] != 0 && *c.last().unwrap() != 0);
        for k in fields(p, 2) {
            let finder = RootFinder::new(k.clone(), prec).unwrap();
            let a = finder.count(&c);
            let b = finder.count(&rev);
            if a.flagged() || b.flagged() {
                continue;
            }
            prop_assert_eq!(a.total(), b.total());
            // Units stay in O_K on both sides, so outside roots of P map to
            // non-unit roots of the reversal.
            prop_assert!(b.in_ring >= a.outside);
        }
    }

    #[test]
    fn newness_is_positive_distance((p, _n, c) in cases()) {
        let prec = default_precision(p).min(24);
        let m = p.pow(prec);
        let c: Vec<u64> = c.iter().map(|x| x % m).collect();
        let poly = PadicPolynomial::from_residues(p, &c, prec);
        for k in fields(p, 3).into_iter().filter(|k| k.r > 1) {
            let Ok(roots) = count_roots(&poly, &k, prec) else { continue };
            for r in roots.iter().filter(|r| r.certified) {
                match (r.is_new, r.location.dist_to_base()) {
                    (Newness::New, Distance::Norm { certified, .. }) => prop_assert!(certified),
                    (Newness::Old, Distance::InBase) => {}
                    (Newness::Ambiguous, _) => {}
                    (n, d) => prop_assert!(false, "{}: {:?} vs {:?}", k.id, n, d),
                }
            }
        }
    }

    #[test]
    fn new_roots_bounded_by_degree((p, n, c) in cases()) {
        let prec = default_precision(p);
        let mut total = 0u32;
        let mut base = 0u32;
        for k in fields(p, 3) {
            let count = RootFinder::new(k.clone(), prec).unwrap().count(&c);
            prop_assume!(!count.flagged());
            if k.r == 1 {
                base = count.total();
                total += base;
            } else {
                total += count.total() - base;
            }
        }
        prop_assert!(total as usize <= n);
    }
}

#[test]
fn classification_is_a_distribution() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for p in [2u64, 3, 5] {
        let cat = Catalog::new(p).unwrap();
        let prec = default_precision(p);
        let m = p.pow(prec);
        for r in [2u32, 3] {
            let cl = EtaleClassifier::new(&cat, r, prec).unwrap();
            let mut seen = std::collections::BTreeMap::new();
            let trials = 2000;
            let mut flagged = 0;
            for _ in 0..trials {
                let c: Vec<u64> = (0..=r).map(|_| rng.gen_range(0..m)).collect();
                match cl.classify(&c) {
                    Ok(e) => {
                        prop_assert_sum(&e);
                        *seen.entry(e.label()).or_insert(0u32) += 1;
                    }
                    Err(_) => flagged += 1,
                }
            }
            let total: u32 = seen.values().sum();
            assert_eq!(total + flagged, trials);
            assert!(flagged < 5, "p={p} r={r} flagged {flagged}");
        }
    }
}

fn prop_assert_sum(e: &padic_roots::catalog::EtaleClass) {
    assert!(e.r == 2 || e.r == 3);
}
