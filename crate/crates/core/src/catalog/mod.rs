//! Extensions of Q_p of degree ≤ 3 (and unramified of any degree),
//! with discriminants, automorphism counts and étale algebras built on them.

mod field;
pub mod fpoly;
mod tables;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

pub use field::{ExtensionField, Ramification};

use crate::error::{Error, Result};
use crate::padic::zp::is_prime;

/// Determinant of an integer matrix by fraction-free elimination.
pub fn bigint_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(s) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Discriminant of a monic integer polynomial (coefficients low → high).
pub fn discriminant(poly: &[i64]) -> BigInt {
    let r = poly.len() - 1;
    if r == 1 {
        return BigInt::one();
    }
    let g: Vec<BigInt> = poly.iter().map(|&c| BigInt::from(c)).collect();
    let dg: Vec<BigInt> = (1..=r).map(|i| BigInt::from(i as i64 * poly[i])).collect();
    let size = 2 * r - 1;
    let mut s = vec![vec![BigInt::zero(); size]; size];
    for row in 0..r - 1 {
        for (k, c) in g.iter().rev().enumerate() {
            s[row][row + k] = c.clone();
        }
    }
    for row in 0..r {
        for (k, c) in dg.iter().rev().enumerate() {
            s[r - 1 + row][row + k] = c.clone();
        }
    }
    let res = bigint_det(s);
    if (r * (r - 1) / 2) % 2 == 1 {
        -res
    } else {
        res
    }
}

pub fn p_valuation(a: &BigInt, p: u64) -> Option<u32> {
    if a.is_zero() {
        return None;
    }
    let bp = BigInt::from(p);
    let mut a = a.abs();
    let mut v = 0;
    while (&a % &bp).is_zero() {
        a /= &bp;
        v += 1;
    }
    Some(v)
}

fn quadratic_nonresidue(p: u64) -> u64 {
    (2..p).find(|&t| (1..p).all(|x| x * x % p != t)).unwrap()
}

fn cube_class_representative(p: u64) -> u64 {
    (2..p)
        .find(|&t| (1..p).all(|x| x * x % p * x % p != t))
        .unwrap()
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    Ok(())
}

/// The unramified extension of degree f.
pub fn unramified_extension(p: u64, f: u32) -> Result<ExtensionField> {
    check_prime(p)?;
    if f == 0 {
        return Err(Error::InvalidInput("degree must be positive".into()));
    }
    if f == 1 {
        return Ok(ExtensionField::base(p));
    }
    let poly: Vec<i64> = if f == 2 && p == 2 {
        vec![1, 1, 1]
    } else if f == 2 {
        vec![-(quadratic_nonresidue(p) as i64), 0, 1]
    } else {
        fpoly::irreducible(p, f)
            .into_iter()
            .map(|c| c as i64)
            .collect()
    };
    Ok(ExtensionField {
        id: format!("{p}.{f}.0.1"),
        p,
        r: f,
        e: 1,
        f,
        poly,
        disc_valuation: 0,
        aut_count: f,
        galois: true,
    })
}

fn ramified(
    p: u64,
    poly: Vec<i64>,
    disc_valuation: u32,
    aut_count: u32,
    index: u32,
) -> ExtensionField {
    let r = poly.len() as u32 - 1;
    ExtensionField {
        id: format!("{p}.{r}.{disc_valuation}.{index}"),
        p,
        r,
        e: r,
        f: 1,
        poly,
        disc_valuation,
        aut_count,
        galois: aut_count == r,
    }
}

/// Isomorphism classes of extensions of degree `r` together with the
/// number of embedded copies in an algebraic closure.
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionList {
    pub classes: Vec<ExtensionField>,
    pub embedded_count: u32,
}

fn classes_of_degree(p: u64, r: u32) -> Result<Vec<ExtensionField>> {
    check_prime(p)?;
    let mut out = Vec::new();
    match r {
        1 => out.push(ExtensionField::base(p)),
        2 => {
            out.push(unramified_extension(p, 2)?);
            if p == 2 {
                out.extend(tables::quadratic_2());
            } else {
                let pi = p as i64;
                let t = quadratic_nonresidue(p) as i64;
                out.push(ramified(p, vec![-pi, 0, 1], 1, 2, 1));
                out.push(ramified(p, vec![-t * pi, 0, 1], 1, 2, 2));
            }
        }
        3 => {
            out.push(unramified_extension(p, 3)?);
            let pi = p as i64;
            if p == 3 {
                out.extend(tables::cubic_3());
            } else if p % 3 == 1 {
                let t = cube_class_representative(p) as i64;
                for (i, u) in [1, t, t * t % pi].into_iter().enumerate() {
                    out.push(ramified(p, vec![-u * pi, 0, 0, 1], 2, 3, i as u32 + 1));
                }
            } else {
                out.push(ramified(p, vec![-pi, 0, 0, 1], 2, 1, 1));
            }
        }
        _ => return Err(Error::UnsupportedDegree(r)),
    }
    for k in &out {
        check_entry(k)?;
    }
    Ok(out)
}

/// Structural checks on a table entry, including the discriminant cross-check.
fn check_entry(k: &ExtensionField) -> Result<()> {
    let p = k.p as i64;
    let bad = |why: &str| {
        Err(Error::InvalidInput(format!(
            "catalog entry {}: {why}",
            k.id
        )))
    };
    if k.e * k.f != k.r || k.poly.len() != k.r as usize + 1 || *k.poly.last().unwrap() != 1 {
        return bad("shape");
    }
    if k.e > 1 {
        if k.f != 1 {
            return bad("mixed ramification is not supported");
        }
        let c0 = k.poly[0];
        if c0 % p != 0 || (c0 / p) % p == 0 || k.poly[1..k.r as usize].iter().any(|c| c % p != 0) {
            return bad("not Eisenstein");
        }
    } else if k.r > 1 {
        let m: Vec<u64> = k.poly.iter().map(|c| c.rem_euclid(p) as u64).collect();
        if !fpoly::is_irreducible(&m, k.p) {
            return bad("residue polynomial reducible");
        }
    }
    let computed = p_valuation(&discriminant(&k.poly), k.p).unwrap_or(u32::MAX);
    if computed != k.disc_valuation {
        return bad(&format!(
            "stored disc valuation {} vs computed {computed}",
            k.disc_valuation
        ));
    }
    if k.e > 1 && k.disc_valuation < k.e - 1 {
        return bad("discriminant below the tame bound");
    }
    if k.r % k.aut_count != 0 {
        return bad("automorphism count does not divide the degree");
    }
    Ok(())
}

pub fn enumerate_extensions(p: u64, r: u32) -> Result<ExtensionList> {
    let classes = classes_of_degree(p, r)?;
    let embedded_count = classes.iter().map(|k| k.embedded_multiplicity()).sum();
    Ok(ExtensionList {
        classes,
        embedded_count,
    })
}

/// `Σ_{K ∈ Ex_{r,f}} ‖D_K‖` over embedded extensions, and the closed form
/// `(r/q^r)(q^f/f)`.
pub fn mass_sides(
    classes: &[ExtensionField],
    p: u64,
    r: u32,
    f: u32,
) -> (BigRational, BigRational) {
    let lhs = classes
        .iter()
        .filter(|k| k.r == r && k.f == f)
        .map(|k| BigRational::from_integer(k.embedded_multiplicity().into()) * k.disc_norm())
        .fold(BigRational::zero(), |a, b| a + b);
    let q = BigInt::from(p);
    let rhs = BigRational::new(
        BigInt::from(r) * num_traits::pow(q.clone(), f as usize),
        num_traits::pow(q, r as usize) * BigInt::from(f),
    );
    (lhs, rhs)
}

pub fn validate_mass(classes: &[ExtensionField], p: u64, r: u32, f: u32) -> Result<BigRational> {
    if f == 0 || r % f != 0 {
        return Err(Error::InvalidInput(format!("{f} does not divide {r}")));
    }
    let (lhs, rhs) = mass_sides(classes, p, r, f);
    if lhs != rhs {
        return Err(Error::MassMismatch {
            r,
            f,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        });
    }
    Ok(lhs)
}

/// All fields of degree ≤ 3 over Q_p, validated at construction.
#[derive(Clone, Debug)]
pub struct Catalog {
    p: u64,
    fields: Vec<Arc<ExtensionField>>,
}

impl Catalog {
    pub fn new(p: u64) -> Result<Self> {
        let mut fields = Vec::new();
        for r in 1..=3 {
            let list = classes_of_degree(p, r)?;
            for f in (1..=r).filter(|f| r % f == 0) {
                validate_mass(&list, p, r, f)?;
            }
            fields.extend(list.into_iter().map(Arc::new));
        }
        Ok(Catalog { p, fields })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn fields(&self) -> &[Arc<ExtensionField>] {
        &self.fields
    }

    pub fn of_degree(&self, r: u32) -> impl Iterator<Item = &Arc<ExtensionField>> {
        self.fields.iter().filter(move |k| k.r == r)
    }

    pub fn get(&self, id: &str) -> Option<&Arc<ExtensionField>> {
        self.fields.iter().find(|k| k.id == id)
    }

    pub fn base(&self) -> &Arc<ExtensionField> {
        &self.fields[0]
    }
}

/// A finite étale algebra as a multiset of field factors.
#[derive(Clone, Debug, Serialize)]
pub struct EtaleClass {
    pub components: Vec<(Arc<ExtensionField>, u32)>,
    pub r: u32,
    pub aut_count: u64,
}

impl EtaleClass {
    pub fn from_components(components: Vec<(Arc<ExtensionField>, u32)>) -> Self {
        let r = components.iter().map(|(k, a)| k.r * a).sum();
        let aut_count = components
            .iter()
            .map(|(k, a)| (1..=*a as u64).product::<u64>() * (k.aut_count as u64).pow(*a))
            .product();
        EtaleClass {
            components,
            r,
            aut_count,
        }
    }

    pub fn label(&self) -> String {
        self.components
            .iter()
            .map(|(k, a)| {
                let name = if k.r == 1 {
                    "F".to_string()
                } else {
                    k.id.clone()
                };
                if *a == 1 {
                    name
                } else {
                    format!("{name}^{a}")
                }
            })
            .collect::<Vec<_>>()
            .join(" x ")
    }

    pub fn is_split(&self) -> bool {
        self.components.iter().all(|(k, _)| k.r == 1)
    }
}

pub fn etale_classes(catalog: &Catalog, r: u32) -> Result<Vec<EtaleClass>> {
    if !(1..=3).contains(&r) {
        return Err(Error::UnsupportedDegree(r));
    }
    let fields: Vec<&Arc<ExtensionField>> = catalog.fields().iter().filter(|k| k.r <= r).collect();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn rec(
        fields: &[&Arc<ExtensionField>],
        start: usize,
        left: u32,
        chosen: &mut Vec<usize>,
        out: &mut Vec<EtaleClass>,
    ) {
        if left == 0 {
            let mut comps: Vec<(Arc<ExtensionField>, u32)> = Vec::new();
            for &i in chosen.iter() {
                match comps.last_mut() {
                    Some((k, a)) if Arc::ptr_eq(k, fields[i]) => *a += 1,
                    _ => comps.push((fields[i].clone(), 1)),
                }
            }
            out.push(EtaleClass::from_components(comps));
            return;
        }
        for i in start..fields.len() {
            if fields[i].r <= left {
                chosen.push(i);
                rec(fields, i, left - fields[i].r, chosen, out);
                chosen.pop();
            }
        }
    }
    rec(&fields, 0, r, &mut chosen, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminants_of_small_polys() {
        assert_eq!(discriminant(&[1, 1, 1]), BigInt::from(-3));
        assert_eq!(discriminant(&[-2, 2, 1]), BigInt::from(12));
        assert_eq!(discriminant(&[-2, 0, 0, 1]), BigInt::from(-108));
        assert_eq!(discriminant(&[3, 3, 0, 1]), BigInt::from(-351));
    }

    #[test]
    fn quadratic_catalog_2() {
        let l = enumerate_extensions(2, 2).unwrap();
        assert_eq!(l.classes.len(), 7);
        let mut norms: Vec<u32> = l.classes.iter().map(|k| k.disc_valuation).collect();
        norms.sort();
        assert_eq!(norms, vec![0, 2, 2, 3, 3, 3, 3]);
        assert_eq!(l.embedded_count, 7);
    }

    #[test]
    fn quadratic_catalog_5() {
        let l = enumerate_extensions(5, 2).unwrap();
        let polys: Vec<Vec<i64>> = l.classes.iter().map(|k| k.poly.clone()).collect();
        assert_eq!(polys, vec![vec![-2, 0, 1], vec![-5, 0, 1], vec![-10, 0, 1]]);
    }

    #[test]
    fn mass_example_p2() {
        let l = enumerate_extensions(2, 2).unwrap();
        assert_eq!(
            validate_mass(&l.classes, 2, 2, 1).unwrap(),
            BigRational::one()
        );
        let l5 = enumerate_extensions(5, 2).unwrap();
        assert_eq!(
            validate_mass(&l5.classes, 5, 2, 1).unwrap(),
            BigRational::new(2.into(), 5.into())
        );
    }

    #[test]
    fn unramified_of_higher_degree() {
        for (p, f) in [(2u64, 4u32), (3, 5), (5, 6), (2, 7)] {
            let k = unramified_extension(p, f).unwrap();
            assert_eq!((k.e, k.aut_count, k.disc_valuation), (1, f, 0));
            check_entry(&k).unwrap();
        }
    }

    #[test]
    fn etale_at_p5() {
        let c = Catalog::new(5).unwrap();
        let two = etale_classes(&c, 2).unwrap();
        assert_eq!(two.len(), 4);
        assert_eq!(two[0].label(), "F^2");
        assert_eq!(two[0].aut_count, 2);
        assert!(two[1..].iter().all(|e| e.aut_count == 2));
        let three = etale_classes(&c, 3).unwrap();
        let f3 = three.iter().find(|e| e.label() == "F^3").unwrap();
        assert_eq!(f3.aut_count, 6);
        assert_eq!(three.len(), 1 + 3 + 2);
        assert_eq!(etale_classes(&c, 1).unwrap().len(), 1);
    }
}
