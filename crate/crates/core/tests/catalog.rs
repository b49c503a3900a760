use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use padic_roots::catalog::{discriminant, etale_classes, p_valuation, validate_mass, Catalog};
use padic_roots::census::RootFinder;
use padic_roots::padic::default_precision;

fn residues(poly: &[i64], p: u64, n: u32) -> Vec<u64> {
    let m = p.pow(n) as i64;
    poly.iter().map(|&c| c.rem_euclid(m) as u64).collect()
}

#[test]
fn catalogs_validate_for_small_primes() {
    for p in [2u64, 3, 5, 7] {
        let cat = Catalog::new(p).unwrap();
        for r in 1..=3u32 {
            for f in (1..=r).filter(|f| r % f == 0) {
                let classes: Vec<_> = cat.of_degree(r).map(|k| (**k).clone()).collect();
                validate_mass(&classes, p, r, f).unwrap();
            }
        }
    }
}

#[test]
fn quadratic_mass_at_two() {
    let cat = Catalog::new(2).unwrap();
    let total: BigRational = cat
        .of_degree(2)
        .filter(|k| k.e == 2)
        .map(|k| k.disc_norm() * BigInt::from(k.embedded_multiplicity()))
        .sum();
    assert_eq!(
        total,
        BigRational::from_integer(2.into()) * BigRational::new(1.into(), 4.into())
            + BigRational::new(4.into(), 8.into())
    );
    assert_eq!(total, BigRational::from_integer(1.into()));
}

/// Two entries of the same degree are isomorphic iff one defining
/// polynomial has a root in the other field; the root count of a field's
/// own polynomial is its automorphism count.
#[test]
fn entries_are_distinct_and_aut_counts_match() {
    for p in [2u64, 3, 5, 7] {
        let cat = Catalog::new(p).unwrap();
        let n = default_precision(p);
        for r in 2..=3u32 {
            let fields: Vec<_> = cat.of_degree(r).cloned().collect();
            for k in &fields {
                let finder = RootFinder::new(k.clone(), n).unwrap();
                for l in &fields {
                    let c = finder.count(&residues(&l.poly, p, n));
                    assert!(!c.flagged());
                    if Arc::ptr_eq(k, l) {
                        assert_eq!(c.total(), k.aut_count, "{}", k.id);
                    } else {
                        assert_eq!(c.total(), 0, "{} has a root of {}", k.id, l.id);
                    }
                }
            }
        }
    }
}

#[test]
fn stored_discriminants_match_polynomials() {
    for p in [2u64, 3, 5, 7] {
        for k in Catalog::new(p).unwrap().fields() {
            if k.r > 1 {
                assert_eq!(
                    p_valuation(&discriminant(&k.poly), p).unwrap(),
                    k.disc_valuation
                );
            }
        }
    }
}

#[test]
fn etale_mass_counts() {
    // Number of étale classes of degree 2: F^2 plus the quadratic fields.
    for p in [2u64, 3, 5] {
        let cat = Catalog::new(p).unwrap();
        let e2 = etale_classes(&cat, 2).unwrap();
        assert_eq!(e2.len(), 1 + cat.of_degree(2).count());
        let e3 = etale_classes(&cat, 3).unwrap();
        assert_eq!(
            e3.len(),
            1 + cat.of_degree(2).count() + cat.of_degree(3).count()
        );
    }
}
