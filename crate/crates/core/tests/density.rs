use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use padic_roots::catalog::{unramified_extension, Catalog};
use padic_roots::density::*;
use padic_roots::padic::{default_precision, ExtElement, PadicNumber};
use padic_roots::Error;
use std::sync::Arc;

fn q2() -> Catalog {
    Catalog::new(2).unwrap()
}

fn elem(ext: &Arc<padic_roots::catalog::ExtensionField>, c: &[i64]) -> ExtElement {
    ExtElement::from_i64s(ext, c, default_precision(ext.p)).unwrap()
}

#[test]
fn base_density() {
    assert_eq!(
        rho_base(2, &rat(1, 2), 4).unwrap(),
        DensityValue::exact(rat(2, 3))
    );
    assert_eq!(
        rho_base(5, &rat(5, 1), 2).unwrap(),
        DensityValue::exact(rat(1, 30))
    );
    assert!(rho_base(5, &rat(1, 1), 0).is_err());
}

#[test]
fn base_total_mass_is_one() {
    for q in [2u64, 3, 5, 7] {
        let c = rho_base(q, &BigRational::one(), 1).unwrap().lo().clone();
        let outer = &c / BigRational::from_integer(q.into());
        assert_eq!(&c + outer, BigRational::one());
    }
}

#[test]
fn quadratic_examples() {
    let cat = q2();
    let q4 = cat.get("2.2.0.1").unwrap();
    assert_eq!(
        rho_quadratic(&QPow::power(Ratio::from_integer(-1)), q4, 2).unwrap(),
        DensityValue::exact(rat(2, 7))
    );
    assert_eq!(
        rho_quadratic(&QPow::one(), q4, 3).unwrap(),
        DensityValue::exact(rat(4, 5))
    );
    assert_eq!(
        rho_quadratic(&QPow::zero(), q4, 3).unwrap(),
        DensityValue::zero()
    );
    assert!(matches!(
        rho_quadratic(&QPow::power(Ratio::new(-1, 2)), q4, 2),
        Err(Error::InvalidDistance(_))
    ));
    let ram = cat.get("2.2.2.1").unwrap();
    assert!(matches!(
        rho_quadratic(&QPow::one(), ram, 2),
        Err(Error::InvalidDistance(_))
    ));
    // Generators of O_K: δ = q^{-1/2}, index 1, ‖D‖ = 1/4.
    let v = rho_quadratic(&QPow::power(Ratio::new(-1, 2)), ram, 2).unwrap();
    assert_eq!(v, DensityValue::exact(rat(1, 4) * rat(4, 7)));
}

#[test]
fn prime_degree_examples() {
    let cat = q2();
    let q4 = cat.get("2.2.0.1").unwrap();
    assert_eq!(
        rho_prime_degree_minimal(&QPow::one(), q4).unwrap(),
        DensityValue::exact(rat(4, 7))
    );
    let q8 = cat.of_degree(3).find(|k| k.is_unramified()).unwrap();
    assert_eq!(
        rho_prime_degree_minimal(&QPow::one(), q8).unwrap(),
        DensityValue::exact(rat(8, 15))
    );
    assert_eq!(
        rho_prime_degree_minimal(&QPow::zero(), q8).unwrap(),
        DensityValue::zero()
    );
    let q16 = unramified_extension(2, 4).unwrap();
    assert_eq!(
        rho_prime_degree_minimal(&QPow::one(), &q16),
        Err(Error::NonPrimeDegree(4))
    );
}

#[test]
fn unramified_generator_examples() {
    assert_eq!(
        rho_unramified_generator(2, 2, 2).unwrap(),
        DensityValue::exact(rat(4, 7))
    );
    assert_eq!(
        rho_unramified_generator(3, 2, 2).unwrap(),
        DensityValue::exact(rat(4, 5))
    );
    assert_eq!(
        rho_unramified_generator(100, 2, 2).unwrap(),
        rho_unramified_generator(3, 2, 2).unwrap()
    );
}

#[test]
fn generic_examples() {
    let cat = q2();
    let q4 = cat.get("2.2.0.1").unwrap();
    let theta = elem(q4, &[0, 1]);
    assert_eq!(
        rho_generic(&theta, 2, 3).unwrap(),
        DensityValue::exact(rat(4, 7))
    );
    assert!(rho_generic(&theta, 3, 3).unwrap().contains(&rat(4, 5)));
    let two_theta = elem(q4, &[0, 2]);
    assert_eq!(
        rho_generic(&two_theta, 2, 3).unwrap(),
        DensityValue::exact(rat(2, 7))
    );
    assert_eq!(rho_generic(&elem(q4, &[3]), 2, 3), Err(Error::NotGenerator));
}

#[test]
fn lattice_integral_examples() {
    let cat = q2();
    let one = elem(cat.base(), &[1]);
    assert_eq!(
        lattice_norm_integral(&one, 0, 3).unwrap(),
        DensityValue::exact(rat(2, 3))
    );
    let zero = ExtElement::from_base(cat.base(), PadicNumber::zero(2, 40)).unwrap();
    assert!(lattice_norm_integral(&zero, 1, 3)
        .unwrap()
        .contains(&rat(2, 3)));
    let q4 = cat.get("2.2.0.1").unwrap();
    let theta = elem(q4, &[0, 1]);
    assert_eq!(
        lattice_norm_integral(&theta, 0, 3).unwrap(),
        DensityValue::exact(rat(4, 7))
    );
    let v = lattice_norm_integral(&theta, 1, 3).unwrap();
    assert!(v.contains(&rat(4, 5)), "{v}");
}

#[test]
fn lattice_width_shrinks_with_depth() {
    let cat = q2();
    let ram = cat.get("2.2.3.1").unwrap();
    let x = elem(ram, &[1, 2]);
    let mut last: Option<BigRational> = None;
    for depth in 1..6 {
        let w = lattice_norm_integral(&x, 1, depth).unwrap().width();
        if let Some(l) = &last {
            assert!(&w <= l);
        }
        last = Some(w);
    }
}

#[test]
fn lattice_budget() {
    let cat = Catalog::new(5).unwrap();
    let k = cat.of_degree(3).next().unwrap();
    let x = elem(k, &[0, 1]);
    assert_eq!(
        lattice_norm_integral(&x, 2, 6).unwrap(),
        DensityValue::exact(rat(125, 126))
    );
    assert_eq!(
        lattice_norm_integral_capped(&x, 2, 6, 100),
        Err(Error::BudgetExceeded(100))
    );
}

#[test]
fn alpha_examples() {
    assert_eq!(alpha_moment(1, 2), rat(1, 3));
    assert_eq!(alpha_moment(4, 2), rat(1, 31));
    let cat = q2();
    let (o, m) = dist_moment_integrals(cat.get("2.2.0.1").unwrap(), 1).unwrap();
    assert_eq!(o.to_rational(2), Some(rat(2, 3)));
    assert_eq!(m.to_rational(2), Some(rat(1, 12)));
    let (o, _) = dist_moment_integrals(cat.get("2.2.2.1").unwrap(), 4).unwrap();
    assert_eq!(o.to_rational(2), Some(rat(4, 31)));
}

#[test]
fn quadratic_masses() {
    let cat = q2();
    let q4 = cat.get("2.2.0.1").unwrap();
    assert_eq!(rho_mass_quadratic(q4, 2).unwrap(), rat(3, 7));
    assert_eq!(rho_mass_quadratic(q4, 3).unwrap(), rat(17, 31));
    assert_eq!(rho_mass_quadratic(q4, 9).unwrap(), rat(17, 31));
    let ram = cat.get("2.2.3.1").unwrap();
    assert_eq!(rho_mass_quadratic(ram, 3).unwrap(), rat(5, 62));
    for p in [2u64, 3, 5, 7] {
        let cat = Catalog::new(p).unwrap();
        for k in cat.of_degree(2) {
            for n in 2..5 {
                assert_eq!(
                    rho_mass_quadratic(k, n).unwrap(),
                    rho_mass_quadratic_integrated(k, n).unwrap()
                );
            }
            assert_eq!(
                rho_mass_quadratic(k, 2).unwrap(),
                rho_mass_prime_minimal(k).unwrap()
            );
        }
    }
}

#[test]
fn prime_degree_moment_matches_quadratic_formula() {
    for p in [2u64, 3, 5] {
        let cat = Catalog::new(p).unwrap();
        for k in cat.of_degree(2) {
            for d in 1..6 {
                let a = dist_moment_integrals(k, d).unwrap().0;
                let b = prime_degree_dist_moment(k, d).unwrap();
                assert_eq!(b.len(), 1);
                assert_eq!(a.normalize(p), b[0].normalize(p));
            }
        }
    }
}

#[test]
fn f2_examples() {
    let n = |a: i64| PadicNumber::from_i64(2, a, 30);
    assert_eq!(
        rho_f2(&n(0), &n(1), 3).unwrap(),
        DensityValue::exact(rat(4, 9))
    );
    assert_eq!(rho_f2(&n(3), &n(3), 3).unwrap(), DensityValue::zero());
    assert_eq!(
        rho_f2(&n(0), &n(2), 2).unwrap(),
        DensityValue::exact(rat(2, 7))
    );
    let big = PadicNumber::from_rational(2, &rat(1, 4), 30);
    assert_eq!(
        rho_f2(&n(1), &big, 3).unwrap(),
        DensityValue::exact(rat(4, 9) / rat(16, 1))
    );
}

#[test]
fn covariance_examples() {
    let half = rat(1, 2);
    let c = covariance_disjoint_balls(&BigRational::one(), 3, 2, &half, &half).unwrap();
    assert!(c.normalized.is_zero());
    let quarter = rat(1, 4);
    let c = covariance_disjoint_balls(&half, 3, 2, &quarter, &quarter).unwrap();
    assert_eq!(c.normalized, rat(-3, 8));
    assert_eq!(
        covariance_disjoint_balls(&half, 3, 2, &half, &quarter).unwrap_err(),
        Error::OverlappingBalls
    );
    for q in [2u64, 3, 5] {
        for k in 1..6 {
            let d = q_pow(q, -k);
            let lam = q_pow(q, -k - 1);
            assert!(
                covariance_disjoint_balls(&d, 3, q, &lam, &lam)
                    .unwrap()
                    .normalized
                    < BigRational::zero()
            );
        }
    }
}

#[test]
fn nested_second_moment() {
    let one = BigRational::one();
    assert_eq!(
        second_moment_nested(&one, &one, 3, 2).unwrap(),
        rat(274, 279)
    );
    assert_eq!(
        second_moment_nested(&one, &BigRational::zero(), 3, 2).unwrap(),
        BigRational::zero()
    );
    // E[Z_O²] = E[Z_O(Z_O − 1)] + E[Z_O].
    let inside = f2_cell_integral(2, 3, 0, None).unwrap();
    assert_eq!(
        second_moment_nested(&one, &one, 3, 2).unwrap(),
        inside + rat(2, 3)
    );
}
