use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use padic_roots::asymptotics::*;
use padic_roots::catalog::{unramified_extension, Catalog};
use padic_roots::density::{q_pow, rat, rho_mass_prime_minimal, rho_mass_quadratic};
use padic_roots::padic::ring::ResidueField;

fn int(a: i64) -> BigInt {
    BigInt::from(a)
}

#[test]
fn generator_count_examples() {
    for q in [2u64, 3, 5, 7] {
        assert_eq!(generator_count(1, q).unwrap(), int(q as i64));
        assert_eq!(generator_count(2, q).unwrap(), int((q * q - q) as i64));
    }
    assert_eq!(generator_count(2, 2).unwrap(), int(2));
    for q in [2u64, 3] {
        let k = unramified_extension(q, 6).unwrap();
        let gbar: Vec<u32> = k.poly[..6]
            .iter()
            .map(|&c| c.rem_euclid(q as i64) as u32)
            .collect();
        let field = ResidueField::new(q, gbar).unwrap();
        let brute = (0..field.size() as u32)
            .filter(|&a| field.generated_degree(a) == 6)
            .count();
        let qi = q as i64;
        let formula = qi.pow(6) - qi.pow(3) - qi.pow(2) + qi;
        assert_eq!(brute as i64, formula);
        assert_eq!(generator_count(6, q).unwrap(), int(formula));
    }
}

#[test]
fn identity_suite() {
    for q in [2u64, 3, 5] {
        for f in 1..=40 {
            assert!(
                generator_partition_check(f, q),
                "Σ G_m = q^f fails at f = {f}, q = {q}"
            );
            assert!(proper_generator_check(f, q), "f = {f}, q = {q}");
        }
    }
    let t = ArithmeticTable::new(10_000);
    for n in 1..=10_000 {
        assert!(mobius_totient_check(&t, n), "n = {n}");
    }
    for q in [2u64, 3, 4, 5, 7, 9] {
        for r in 1..=100 {
            assert!(divisor_generator_check(r, q), "r = {r}, q = {q}");
        }
    }
}

#[test]
fn density_term_examples() {
    for q in [2u64, 3, 5] {
        let t = density_terms(3, 1, q, Regime::Minimal).unwrap();
        assert_eq!(t.main_sum, BigRational::one());
        let c = t.factor.clone();
        assert_eq!(t.bracket.lo, &c - q_pow(q, -1));
        assert_eq!(t.bracket.hi, &c + rat(4, 1) * q_pow(q, -1));
    }
    let t = density_terms(2, 2, 2, Regime::Stable).unwrap();
    assert_eq!(t.center, rat(2, 5));
    assert!(t.bracket.contains(&rat(17, 31)));
    assert!(density_terms(3, 2, 2, Regime::Stable).is_err());
}

#[test]
fn unramified_bracket_examples() {
    let b = unramified_bracket(3, 4, 2).unwrap();
    // (2^5 − 2^3)/(2^5 − 1) · G_3/2^3 with G_3 = 6.
    let center = rat(24, 31) * rat(6, 8);
    assert_eq!(b.lo, &center - rat(1, 8));
    assert_eq!(b.hi, &center + rat(4, 8));
    assert!(unramified_bracket(3, 6, 2).is_err());
    assert_eq!(
        unramified_bracket(2, 3, 2).unwrap(),
        density_terms(2, 2, 2, Regime::Stable).unwrap().bracket
    );
}

#[test]
fn degree_sum_examples() {
    assert_eq!(degree_sum_main(2, 2).unwrap(), rat(3, 2));
    for q in [2u64, 3, 5] {
        assert_eq!(degree_sum_main(1, q).unwrap(), BigRational::one());
    }
}

#[test]
fn ramified_mass_examples() {
    for q in [2u64, 3, 5, 7] {
        let m = ramified_mass(2, q).unwrap();
        assert_eq!(m.leading, rat(2, q as i64));
        assert_eq!(m.delta_sum, rat(2, q as i64));
    }
    assert_eq!(ramified_mass(2, 2).unwrap().leading, BigRational::one());
    assert_eq!(ramified_mass(3, 2).unwrap().leading, rat(3, 4));
    let m = ramified_mass(6, 2).unwrap();
    assert_eq!(m.smallest_prime, 2);
    assert!(m.delta_sum >= m.leading);
}

#[test]
fn exact_masses_sit_in_brackets() {
    for p in [2u64, 3, 5, 7] {
        let cat = Catalog::new(p).unwrap();
        for k in cat.of_degree(2) {
            for n in 2..6 {
                let (b, _) = density_mass_bracket(k, n).unwrap();
                assert!(
                    b.contains(&rho_mass_quadratic(k, n).unwrap()),
                    "{} n = {n}",
                    k.id
                );
            }
        }
        for k in cat.fields().iter().filter(|k| (2..=3).contains(&k.r)) {
            let (b, src) = density_mass_bracket(k, k.r).unwrap();
            assert_eq!(src, BracketSource::Minimal);
            assert!(b.contains(&rho_mass_prime_minimal(k).unwrap()), "{}", k.id);
        }
    }
}

#[test]
fn quadratic_degree_sum_within_bound() {
    for p in [2u64, 3, 5, 7] {
        let cat = Catalog::new(p).unwrap();
        let mut sum = BigRational::zero();
        for k in cat.of_degree(2) {
            sum += rho_mass_quadratic(k, 3).unwrap()
                * BigRational::from_integer(k.embedded_multiplicity().into());
        }
        let bound = degree_sum_bound(2, p).unwrap();
        let diff = &sum - &bound.main;
        assert!(
            diff.clone() * diff.clone() <= &bound.radius * &bound.radius,
            "p = {p}: {sum} vs {}",
            bound.main
        );
        let ram: BigRational = cat
            .of_degree(2)
            .filter(|k| !k.is_unramified())
            .map(|k| rho_mass_quadratic(k, 3).unwrap())
            .sum();
        println!(
            "p = {p}: Σ_Ex2 ρ = {sum}, main {}, ramified {ram} vs leading {}",
            bound.main,
            ramified_mass(2, p).unwrap().leading
        );
    }
}
