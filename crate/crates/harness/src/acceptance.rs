//! The acceptance suite: exact checks and Monte Carlo comparisons, one
//! verdict per criterion.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::One;
use padic_roots::asymptotics::{
    divisor_generator_check, generator_partition_check, mobius_totient_check,
    proper_generator_check, ArithmeticTable,
};
use padic_roots::catalog::{enumerate_extensions, validate_mass, Catalog, ExtensionField};
use padic_roots::census::{
    kac_rice_estimate_unchecked, kac_rice_residues, multiplicity_weight, RootFinder,
};
use padic_roots::density::{
    q_pow, rat, rho_at, rho_generic, rho_mass_quadratic, rho_mass_quadratic_integrated,
    rho_unramified_generator, DensityValue,
};
use padic_roots::padic::{default_precision, ExtElement, IndexValue, PadicNumber, PadicPolynomial};
use padic_roots::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, Thresholds};
use crate::report::{run_census, CensusReport, Estimate};
use crate::Result;

/// Sizes and levels of the suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AcceptanceConfig {
    pub samples: u64,
    pub seed: u64,
    pub kac_rice_polynomials: u64,
    pub triangle_points: u64,
    pub property_cases: u64,
    pub lattice_depth: u32,
    pub workers: Option<usize>,
    pub thresholds: Thresholds,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig {
            samples: 500_000,
            seed: 20240601,
            kac_rice_polynomials: 10_000,
            triangle_points: 1000,
            property_cases: 1000,
            lattice_depth: 4,
            workers: None,
            thresholds: Thresholds::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(
            f,
            "{tag} criterion {:>2} ({}): {}",
            self.id, self.name, self.detail
        )
    }
}

/// Collects failures of one criterion.
struct Check {
    id: u32,
    name: &'static str,
    checked: u64,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn new(id: u32, name: &'static str) -> Self {
        Check {
            id,
            name,
            checked: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    fn finish(self) -> Verdict {
        let pass = self.failures.is_empty();
        let mut detail = format!("{} checks", self.checked);
        if !pass {
            let shown: Vec<_> = self.failures.iter().take(6).cloned().collect();
            detail.push_str(&format!(
                ", {} failed: {}",
                self.failures.len(),
                shown.join("; ")
            ));
        }
        if !self.notes.is_empty() {
            detail.push_str(&format!("; {}", self.notes.join("; ")));
        }
        Verdict {
            id: self.id,
            name: self.name.into(),
            pass,
            detail,
        }
    }
}

fn fail_on_error(id: u32, name: &str, e: impl fmt::Display) -> Verdict {
    Verdict {
        id,
        name: name.into(),
        pass: false,
        detail: format!("error: {e}"),
    }
}

/// Mass identities of every catalog.
pub fn criterion_1() -> Verdict {
    let mut c = Check::new(1, "mass identities");
    for p in [2u64, 3, 5, 7] {
        for r in 1..=3u32 {
            let classes = match enumerate_extensions(p, r) {
                Ok(l) => l.classes,
                Err(e) => return fail_on_error(1, c.name, e),
            };
            for f in (1..=r).filter(|f| r % f == 0) {
                let res = validate_mass(&classes, p, r, f);
                c.expect(res.is_ok(), || format!("p={p} r={r} f={f}: {res:?}"));
            }
        }
    }
    match enumerate_extensions(2, 2) {
        Ok(l) => {
            let ram: Vec<&ExtensionField> = l.classes.iter().filter(|k| k.f == 1).collect();
            let by_disc = |d: u32| ram.iter().filter(|k| k.disc_valuation == d).count();
            c.expect(by_disc(2) == 2 && by_disc(3) == 4, || {
                "p=2: ramified quadratic discriminants".into()
            });
            let total = BigRational::from_integer(2.into()) * rat(1, 4)
                + BigRational::from_integer(4.into()) * rat(1, 8);
            let mass = validate_mass(&l.classes, 2, 2, 1).unwrap_or_default();
            c.expect(mass == total && total.is_one(), || {
                format!("p=2 r=2 f=1 mass {mass}")
            });
        }
        Err(e) => return fail_on_error(1, c.name, e),
    }
    c.finish()
}

/// Closed quadratic masses at q = 2 against their integrated forms.
pub fn criterion_2() -> Verdict {
    let mut c = Check::new(2, "quadratic masses exact");
    let cat = match Catalog::new(2) {
        Ok(c) => c,
        Err(e) => return fail_on_error(2, c.name, e),
    };
    for ext in cat.of_degree(2) {
        for n in 2..=8 {
            let (u, r) = if n == 2 {
                (rat(3, 7), rat(4, 7))
            } else {
                (rat(17, 31), rat(20, 31))
            };
            let want = if ext.is_unramified() {
                u
            } else {
                ext.disc_norm() * r
            };
            let closed = rho_mass_quadratic(ext, n);
            let integrated = rho_mass_quadratic_integrated(ext, n);
            c.expect(closed.as_ref() == Ok(&want), || {
                format!("{} n={n}: closed {closed:?}, want {want}", ext.id)
            });
            c.expect(integrated.as_ref() == Ok(&want), || {
                format!("{} n={n}: integrated {integrated:?}", ext.id)
            });
        }
    }
    c.finish()
}

fn random_unit(rng: &mut ChaCha8Rng, p: u64, prec: u32) -> u64 {
    loop {
        let u = rng.gen_range(0..p.pow(prec));
        if u % p != 0 {
            return u;
        }
    }
}

/// A random element of K with coordinates of valuation in
/// `[−shift, 3 − shift]`, some coordinates exactly 0.
pub fn random_element(ext: &Arc<ExtensionField>, rng: &mut ChaCha8Rng, shift: i64) -> ExtElement {
    let p = ext.p;
    let prec = default_precision(p) - 6;
    let coeffs = (0..ext.r)
        .map(|_| {
            if rng.gen_bool(0.15) {
                PadicNumber::zero(p, prec as i64)
            } else {
                let v = rng.gen_range(0..4i64) - shift;
                PadicNumber::from_parts(p, random_unit(rng, p, prec), v, prec).expect("unit")
            }
        })
        .collect();
    ExtElement::new(ext.clone(), coeffs).expect("element")
}

fn consistent(a: &DensityValue, b: &DensityValue) -> bool {
    if a.is_exact() && b.is_exact() {
        a == b
    } else {
        a.intersect(b).is_some()
    }
}

fn fields_up_to_3(p: u64) -> Vec<Arc<ExtensionField>> {
    Catalog::new(p)
        .map(|c| {
            c.fields()
                .iter()
                .filter(|k| (2..=3).contains(&k.r))
                .cloned()
                .collect()
        })
        .unwrap_or_default()
}

/// The determinant route against the closed forms at random points.
pub fn criterion_3(cfg: &AcceptanceConfig) -> Verdict {
    let mut c = Check::new(3, "consistency triangle");
    let depth = cfg.lattice_depth;
    let (mut exact, mut enclosed) = (0u64, 0u64);
    for p in [2u64, 3, 5] {
        for ext in fields_up_to_3(p) {
            let mut rng = ChaCha8Rng::seed_from_u64(
                cfg.seed ^ p.rotate_left(17) ^ (ext.id.len() as u64 * 7919),
            );
            let mut points = 0;
            let mut attempts = 0;
            while points < cfg.triangle_points && attempts < 50 * cfg.triangle_points {
                attempts += 1;
                let x = random_element(&ext, &mut rng, 0);
                let r = ext.r;
                let unram_gen = ext.is_unramified()
                    && matches!(
                        x.index_of_generated_order(),
                        Ok(IndexValue::Finite {
                            exponent: 0,
                            certified: true
                        })
                    );
                let ns: Vec<u32> = match r {
                    2 => (2..=4).collect(),
                    _ if unram_gen => (r..=2 * r).collect(),
                    _ => vec![r],
                };
                let mut used = false;
                for n in ns {
                    let g = match rho_generic(&x, n, depth) {
                        Ok(g) => g,
                        Err(Error::NotGenerator) => {
                            let z = rho_at(&x, n, depth);
                            c.expect(z == Ok(DensityValue::zero()), || {
                                format!("{} n={n}: non-generator {z:?}", ext.id)
                            });
                            continue;
                        }
                        Err(Error::PrecisionExhausted(_)) => continue,
                        Err(e) => {
                            c.expect(false, || format!("{} n={n}: {e}", ext.id));
                            continue;
                        }
                    };
                    let closed = if unram_gen {
                        rho_unramified_generator(n, r, ext.q())
                    } else {
                        rho_at(&x, n, depth)
                    };
                    let closed = match closed {
                        Ok(v) => v,
                        Err(Error::PrecisionExhausted(_)) => continue,
                        Err(e) => {
                            c.expect(false, || format!("{} n={n}: closed form {e}", ext.id));
                            continue;
                        }
                    };
                    used = true;
                    if g.is_exact() && closed.is_exact() {
                        exact += 1;
                    } else {
                        enclosed += 1;
                    }
                    c.expect(consistent(&g, &closed), || {
                        format!("{} n={n}: generic {g} vs closed {closed}", ext.id)
                    });
                }
                if used {
                    points += 1;
                }
            }
            c.expect(points >= cfg.triangle_points, || {
                format!("{}: only {points} usable points", ext.id)
            });
        }
    }
    c.note(format!(
        "{exact} exact comparisons, {enclosed} enclosure comparisons"
    ));
    c.finish()
}

/// The arithmetic identities behind the asymptotic estimates.
pub fn criterion_4() -> Verdict {
    let mut c = Check::new(4, "identity suite");
    for q in [2u64, 3, 4, 5, 7, 9] {
        for f in 1..=40 {
            c.expect(generator_partition_check(f, q), || {
                format!("generator partition f={f} q={q}")
            });
            c.expect(proper_generator_check(f, q), || {
                format!("generator bound f={f} q={q}")
            });
        }
        for r in 1..=100 {
            c.expect(divisor_generator_check(r, q), || {
                format!("divisor sum r={r} q={q}")
            });
        }
    }
    let t = ArithmeticTable::new(10_000);
    for n in 1..=10_000 {
        c.expect(mobius_totient_check(&t, n), || {
            format!("totient identity n={n}")
        });
    }
    c.finish()
}

fn norm_pow(x: &ExtElement, k: i64) -> Option<BigRational> {
    let v = x.valuation().ok()? * Ratio::from_integer(k);
    v.is_integer().then(|| q_pow(x.parent().p, -v.to_integer()))
}

/// Homography covariance, monotony and stabilization at random points.
pub fn criterion_5(cfg: &AcceptanceConfig) -> Verdict {
    let mut c = Check::new(5, "invariant properties");
    let depth = cfg.lattice_depth;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(5));
    let fields: Vec<Arc<ExtensionField>> = [2u64, 3, 5]
        .iter()
        .flat_map(|&p| {
            let cat = Catalog::new(p).expect("catalog");
            let mut v = vec![cat.base().clone()];
            v.extend(fields_up_to_3(p));
            v
        })
        .collect();
    let (mut homography, mut monotone) = (0u64, 0u64);
    let mut guard = 0;
    while homography < cfg.property_cases && guard < 20 * cfg.property_cases {
        guard += 1;
        let ext = &fields[rng.gen_range(0..fields.len())];
        let p = ext.p;
        let n = rng.gen_range(2..6u32);
        let shift = rng.gen_range(0..3);
        let x = random_element(ext, &mut rng, shift);
        if x.coeffs().iter().all(|c| c.is_zero())
            || (ext.r > 1 && x.coeffs().iter().skip(1).all(|c| c.is_zero()))
        {
            continue;
        }
        let prec = default_precision(p) - 6;
        let m: [i64; 4] = loop {
            let m = [0; 4].map(|_| rng.gen_range(-40..40i64));
            if (m[0] * m[3] - m[1] * m[2]).rem_euclid(p as i64) != 0 {
                break m;
            }
        };
        let k =
            |t: i64| ExtElement::from_base(ext, PadicNumber::from_i64(p, t, prec)).expect("scalar");
        let (Ok(num), Ok(den)) = (
            x.mul(&k(m[0])).and_then(|a| a.add(&k(m[1]))),
            x.mul(&k(m[2])).and_then(|a| a.add(&k(m[3]))),
        ) else {
            continue;
        };
        if den.coeffs().iter().all(|c| c.is_zero()) {
            continue;
        }
        let Ok(y) = num.div(&den) else { continue };
        let (l, rv) = match (rho_at(&y, n, depth), rho_at(&x, n, depth)) {
            (Ok(l), Ok(rv)) => (l, rv),
            (Err(Error::PrecisionExhausted(_)), _) | (_, Err(Error::PrecisionExhausted(_))) => {
                continue
            }
            (l, rv) => {
                c.expect(false, || format!("{}: {l:?} {rv:?}", ext.id));
                homography += 1;
                continue;
            }
        };
        let Some(jac) = norm_pow(&den, 2 * ext.r as i64) else {
            continue;
        };
        let rv = rv.scale(&jac);
        homography += 1;
        c.expect(consistent(&l, &rv), || {
            format!("{} n={n}: {l} vs {rv}", ext.id)
        });
    }
    c.expect(homography >= cfg.property_cases, || {
        format!("only {homography} homography cases")
    });
    let mut guard = 0;
    while monotone < cfg.property_cases && guard < 20 * cfg.property_cases {
        guard += 1;
        let ext = &fields[rng.gen_range(0..fields.len())];
        if ext.r < 2 {
            continue;
        }
        let x = random_element(ext, &mut rng, 0);
        let r = ext.r;
        let vals: Vec<DensityValue> =
            match (r..=2 * r + 1).map(|n| rho_generic(&x, n, depth)).collect() {
                Ok(v) => v,
                Err(Error::NotGenerator) => continue,
                Err(e) => {
                    c.expect(false, || format!("{}: {e}", ext.id));
                    monotone += 1;
                    continue;
                }
            };
        monotone += 1;
        let mono = vals.windows(2).all(|w| w[0].lo() <= w[1].hi());
        let stable = (r - 1) as usize;
        let strict = vals[0].hi() < vals[stable].hi();
        let flat = vals[stable..].iter().all(|v| v == &vals[stable]);
        c.expect(mono && strict && flat, || {
            format!(
                "{}: {:?}",
                ext.id,
                vals.iter().map(|v| v.to_string()).collect::<Vec<_>>()
            )
        });
    }
    c.expect(monotone >= cfg.property_cases, || {
        format!("only {monotone} monotony cases")
    });
    c.note(format!(
        "{homography} homography cases, {monotone} monotony cases"
    ));
    c.finish()
}

/// Outcome of comparing Kac-Rice values with isolated root counts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleOutcome {
    pub compared: u64,
    pub redrawn: u64,
    pub mismatches: Vec<String>,
}

/// Random polynomials of degree 1 to 5 over every field of degree ≤ 2 of
/// Q_2, Q_3 and Q_5.
pub fn kac_rice_oracle(cfg: &AcceptanceConfig) -> Result<OracleOutcome> {
    let mut out = OracleOutcome::default();
    for p in [2u64, 3, 5] {
        let cat = Catalog::new(p)?;
        let prec = default_precision(p);
        let m = p.pow(prec);
        for ext in cat.fields().iter().filter(|k| k.r <= 2) {
            let finder = RootFinder::new(ext.clone(), prec)?;
            let mut rng = ChaCha8Rng::seed_from_u64(
                cfg.seed ^ (p << 32) ^ ext.id.bytes().map(u64::from).sum::<u64>(),
            );
            let mut done = 0;
            while done < cfg.kac_rice_polynomials {
                let n = rng.gen_range(1..=5usize);
                let coeffs: Vec<u64> = (0..=n).map(|_| rng.gen_range(0..m)).collect();
                let count = finder.count(&coeffs);
                if count.flagged() {
                    out.redrawn += 1;
                    continue;
                }
                done += 1;
                out.compared += 1;
                let v = kac_rice_residues(&finder, &coeffs, prec - 8, 4 * prec);
                let want = BigRational::from_integer(count.in_ring.into());
                if v.as_ref() != Ok(&want) {
                    out.mismatches
                        .push(format!("{} {:?}: {v:?} vs {want}", ext.id, coeffs));
                }
            }
        }
    }
    Ok(out)
}

/// Kac-Rice counts against root isolation, and the monomial limits.
pub fn criterion_6(cfg: &AcceptanceConfig) -> Verdict {
    let mut c = Check::new(6, "Kac-Rice oracle");
    match kac_rice_oracle(cfg) {
        Ok(o) => {
            c.checked += o.compared - o.mismatches.len() as u64;
            for m in o.mismatches {
                c.expect(false, || m);
            }
            c.note(format!(
                "{} random polynomials compared, {} inseparable draws redrawn",
                o.compared, o.redrawn
            ));
        }
        Err(e) => return fail_on_error(6, c.name, e),
    }
    let mut off = Vec::new();
    for m in monomial_limits() {
        let (q, mu) = (m.q, m.mu);
        let Some(limit) = &m.limit else {
            c.expect(false, || format!("X^{mu} at q={q}: no finite-s limit"));
            continue;
        };
        c.expect(limit == &m.with_derivative_norm, || {
            format!("X^{mu} at q={q}: {limit} vs ‖μ‖·weight")
        });
        c.expect(limit == &m.weight, || {
            format!("X^{mu} at q={q}: limit {limit}, stated weight {}", m.weight)
        });
        if limit != &m.weight {
            off.push(format!("q={q} μ={mu}"));
        }
    }
    if !off.is_empty() {
        c.note(format!(
            "monomial limits carry the factor ‖μ‖ at {}",
            off.join(", ")
        ));
    }
    c.finish()
}

/// Kac-Rice limit of `X^μ` over Q_q beside the multiplicity weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialLimit {
    pub q: u64,
    pub mu: u32,
    /// Common value at two consecutive levels s ≡ 0 mod μ, if they agree.
    pub limit: Option<BigRational>,
    pub weight: BigRational,
    /// `‖μ‖ · weight`, since ‖f'‖ = ‖μ‖·‖x‖^{μ−1} for f = X^μ.
    pub with_derivative_norm: BigRational,
}

pub fn monomial_limits() -> Vec<MonomialLimit> {
    let mut out = Vec::new();
    for q in [2u64, 3] {
        let prec = default_precision(q).min(30);
        let cat = Catalog::new(q).expect("catalog");
        for mu in 1..=4u32 {
            let mut coeffs = vec![0i64; mu as usize + 1];
            coeffs[mu as usize] = 1;
            let poly = PadicPolynomial::from_i64s(q, &coeffs, prec);
            let s1 = 12 / mu * mu;
            let vals: Vec<_> = [s1, s1 + mu]
                .iter()
                .map(|&s| kac_rice_estimate_unchecked(&poly, cat.base(), s, 200, prec))
                .collect();
            let limit = match (&vals[0], &vals[1]) {
                (Ok(a), Ok(b)) if a == b => Some(a.clone()),
                _ => None,
            };
            let weight = multiplicity_weight(mu, q).expect("weight");
            let v = padic_roots::catalog::p_valuation(&BigInt::from(mu), q).unwrap_or(0);
            let with_derivative_norm = q_pow(q, -(v as i64)) * &weight;
            out.push(MonomialLimit {
                q,
                mu,
                limit,
                weight,
                with_derivative_norm,
            });
        }
    }
    out
}

/// The Monte Carlo censuses at p = 2 and p = 5.
pub fn census_reports(cfg: &AcceptanceConfig) -> Result<Vec<CensusReport>> {
    [2u64, 5]
        .iter()
        .map(|&p| {
            let run = RunConfig {
                samples: cfg.samples,
                seed: cfg.seed,
                workers: cfg.workers,
                thresholds: cfg.thresholds.clone(),
                ..RunConfig::preset(p)
            };
            run_census(&run)
        })
        .collect()
}

fn est_ok(c: &mut Check, e: &Estimate, z: f64, what: impl FnOnce() -> String) {
    let ok = e.within(z);
    c.expect(ok, || {
        format!(
            "{}: {:.5} ± {:.5} vs {:?} (z {:?})",
            what(),
            e.mean,
            e.se,
            e.theory,
            e.z.map(|z| (z * 100.0).round() / 100.0)
        )
    });
}

fn flag_check(c: &mut Check, rep: &CensusReport) {
    for d in &rep.degrees {
        c.expect(d.flagged_fraction <= d.flagged_bound, || {
            format!(
                "p={} n={}: flagged fraction {}",
                rep.metadata.p, d.n, d.flagged_fraction
            )
        });
    }
}

fn max_abs_z<'a>(it: impl Iterator<Item = &'a Estimate>) -> f64 {
    it.filter_map(|e| e.z).map(f64::abs).fold(0.0, f64::max)
}

/// Mean root counts, quadratic masses and monotony in n.
pub fn criterion_7(reports: &[CensusReport], t: &Thresholds) -> Verdict {
    let mut c = Check::new(7, "root means and quadratic masses");
    let mut zs = Vec::new();
    for rep in reports {
        let p = rep.metadata.p;
        flag_check(&mut c, rep);
        for d in &rep.degrees {
            est_ok(&mut c, &d.roots_in_base, t.z, || {
                format!("p={p} n={}: roots in F", d.n)
            });
            zs.push(d.roots_in_base.clone());
            for k in d.fields.iter().filter(|k| k.r == 2 && k.f == 2) {
                est_ok(&mut c, &k.new_roots, t.z, || {
                    format!("p={p} n={} {}", d.n, k.id)
                });
                zs.push(k.new_roots.clone());
            }
            est_ok(&mut c, &d.ramified_quadratic, t.z, || {
                format!("p={p} n={}: ramified quadratic total", d.n)
            });
            zs.push(d.ramified_quadratic.clone());
        }
        let ids: Vec<(String, u32)> = rep.degrees[0]
            .fields
            .iter()
            .map(|k| (k.id.clone(), k.r))
            .collect();
        for (id, r) in ids {
            let series: Vec<(u32, &Estimate)> = rep
                .degrees
                .iter()
                .filter_map(|d| d.field(&id).map(|k| (d.n, &k.new_roots)))
                .collect();
            for w in series.windows(2) {
                let ((n0, a), (n1, b)) = (w[0], w[1]);
                let band = t.z * (a.se * a.se + b.se * b.se).sqrt();
                if n1 <= 2 * r - 1 {
                    c.expect(b.mean >= a.mean - band, || {
                        format!("p={p} {id}: mean drops from n={n0} to n={n1}")
                    });
                } else {
                    c.expect((b.mean - a.mean).abs() <= band, || {
                        format!("p={p} {id}: not stable from n={n0} to n={n1}")
                    });
                }
            }
        }
    }
    c.note(format!("max |z| {:.2}", max_abs_z(zs.iter())));
    c.finish()
}

/// Spatial histograms of new roots for Q_4 and the Eisenstein quadratic.
pub fn criterion_8(reports: &[CensusReport], t: &Thresholds) -> Verdict {
    let mut c = Check::new(8, "spatial histograms");
    let Some(rep) = reports.iter().find(|r| r.metadata.p == 2) else {
        return fail_on_error(8, c.name, "no p = 2 census");
    };
    let Some(d) = rep.degree(5) else {
        return fail_on_error(8, c.name, "no n = 5 census");
    };
    let fields = ["2.2.0.1", "2.2.2.2"];
    let level = t.chi_square_level / fields.len() as f64;
    for id in fields {
        match d.histograms.iter().find(|h| h.field == id) {
            Some(h) => {
                c.expect(h.grid.depth == 5, || {
                    format!("{id}: depth {}", h.grid.depth)
                });
                c.expect(h.unlocated == 0, || {
                    format!("{id}: {} unlocated roots", h.unlocated)
                });
                let total_new = d.field(id).map_or(0, |k| k.new_in_ring);
                c.expect(h.grid.total() == total_new, || {
                    format!("{id}: histogram total {} vs {total_new}", h.grid.total())
                });
                c.expect(h.chi_square.p_value > level, || {
                    format!(
                        "{id}: chi-square {:.1} on {} dof, p = {:.4}",
                        h.chi_square.statistic, h.chi_square.dof, h.chi_square.p_value
                    )
                });
                c.note(format!("{id} p-value {:.4}", h.chi_square.p_value));
            }
            None => c.expect(false, || format!("{id}: no histogram")),
        }
    }
    c.finish()
}

/// Pair census covariances and the factorial moment at p = 2.
pub fn criterion_9(reports: &[CensusReport], t: &Thresholds) -> Verdict {
    let mut c = Check::new(9, "pair census");
    let Some(rep) = reports.iter().find(|r| r.metadata.p == 2) else {
        return fail_on_error(9, c.name, "no p = 2 census");
    };
    let mut zs = Vec::new();
    for d in rep.degrees.iter().filter(|d| d.n >= 3) {
        let mut found = [false, false];
        for cov in &d.covariances {
            let Some(e) = &cov.normalized else { continue };
            let dist_one =
                cov.u.digits == 1 && cov.v.digits == 1 && (cov.u.center + cov.v.center) % 2 == 1;
            let dist_half =
                cov.u.digits == 2 && cov.v.digits == 2 && (cov.u.center ^ cov.v.center) % 4 == 2;
            if dist_one {
                found[0] = true;
                c.expect(e.theory == Some(0.0), || {
                    format!("n={}: unit-distance theory {:?}", d.n, e.theory)
                });
            } else if dist_half {
                found[1] = true;
                c.expect(e.theory == Some(-0.375), || {
                    format!("n={}: half-distance theory {:?}", d.n, e.theory)
                });
            } else {
                continue;
            }
            est_ok(&mut c, e, t.z, || {
                format!("n={} balls {:?} {:?}", d.n, cov.u, cov.v)
            });
            zs.push(e.clone());
        }
        c.expect(found == [true, true], || {
            format!("n={}: ball pairs missing", d.n)
        });
        est_ok(&mut c, &d.pair_moment, t.z, || {
            format!("n={}: E[Z(Z-1)]", d.n)
        });
        zs.push(d.pair_moment.clone());
    }
    c.note(format!("max |z| {:.2}", max_abs_z(zs.iter())));
    c.finish()
}

/// The weighted sum over quadratic étale algebras, and its cubic partner.
pub fn criterion_10(reports: &[CensusReport], t: &Thresholds) -> Verdict {
    let mut c = Check::new(10, "mass formula");
    let mut zs = Vec::new();
    for rep in reports {
        let p = rep.metadata.p;
        for n in 2..=5 {
            let Some(d) = rep.degree(n) else {
                c.expect(false, || format!("p={p}: no n={n} census"));
                continue;
            };
            est_ok(&mut c, &d.mass_r2, t.z, || {
                format!("p={p} n={n}: weighted quadratic sum")
            });
            zs.push(d.mass_r2.clone());
            if n == 2 {
                if let Some(e) = &d.etale {
                    let deficit = 1.0 - e.frequency_sum;
                    c.expect((deficit - e.flagged_fraction).abs() < 1e-9, || {
                        format!("p={p}: frequency deficit {deficit}")
                    });
                }
            }
        }
        match rep.degree(5).and_then(|d| d.mass_difference.clone()) {
            Some(e) => {
                est_ok(&mut c, &e, t.z, || {
                    format!("p={p}: quadratic vs cubic sum at n=5")
                });
                c.note(format!(
                    "p={p} difference at n=5: {:.6} ± {:.6}",
                    e.mean, e.se
                ));
            }
            None => c.expect(false, || format!("p={p}: no cubic census at n=5")),
        }
    }
    c.note(format!("max |z| {:.2}", max_abs_z(zs.iter())));
    c.finish()
}

/// Empirical masses of every field inside the exact brackets.
pub fn criterion_11(reports: &[CensusReport], t: &Thresholds) -> Verdict {
    let mut c = Check::new(11, "bracket containment");
    let mut worst = 0.0f64;
    for rep in reports {
        let p = rep.metadata.p;
        for d in &rep.degrees {
            for k in &d.fields {
                worst = worst.max(k.bracket.z.abs());
                c.expect(k.bracket.z.abs() <= t.z, || {
                    format!(
                        "p={p} n={} {}: {:.5} ± {:.5} outside [{}/{}, {}/{}]",
                        d.n,
                        k.id,
                        k.new_roots.mean,
                        k.new_roots.se,
                        k.bracket.lo.num,
                        k.bracket.lo.den,
                        k.bracket.hi.num,
                        k.bracket.hi.den
                    )
                });
            }
        }
    }
    c.note(format!("largest distance outside a bracket {worst:.2} SE"));
    c.finish()
}

pub fn exact_suite(cfg: &AcceptanceConfig) -> Vec<Verdict> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(cfg),
        criterion_4(),
        criterion_5(cfg),
        criterion_6(cfg),
    ]
}

pub fn monte_carlo_suite(reports: &[CensusReport], t: &Thresholds) -> Vec<Verdict> {
    vec![
        criterion_7(reports, t),
        criterion_8(reports, t),
        criterion_9(reports, t),
        criterion_10(reports, t),
        criterion_11(reports, t),
    ]
}

/// All criteria in order.
pub fn run_all(cfg: &AcceptanceConfig) -> Result<Vec<Verdict>> {
    let mut out = exact_suite(cfg);
    let reports = census_reports(cfg)?;
    out.extend(monte_carlo_suite(&reports, &cfg.thresholds));
    Ok(out)
}
