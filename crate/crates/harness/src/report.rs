//! JSON census reports with exact-theory columns.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use padic_roots::asymptotics::{density_mass_bracket, BracketSource};
use padic_roots::catalog::{Catalog, ExtensionField};
use padic_roots::density::{
    covariance_disjoint_balls, q_pow, quadratic_class_integral, rho_f2_mass,
    rho_mass_prime_minimal, rho_mass_quadratic, second_moment_nested, RationalRepr,
};
use serde::{Deserialize, Serialize};

use crate::census::{run_counters, CensusRun, DegreeCounters, Plan};
use crate::config::{Ball, RunConfig};
use crate::histogram::Grid;
use crate::stats::{chi_square, z_outside, z_score, ChiSquare, Moments};
use crate::Result;

pub const SCHEMA_VERSION: u32 = 1;

fn f(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// An empirical mean beside its exact value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub theory: Option<f64>,
    pub theory_exact: Option<RationalRepr>,
    pub z: Option<f64>,
}

impl Estimate {
    pub fn new(mean: f64, se: f64, theory: Option<&BigRational>) -> Self {
        Estimate {
            mean,
            se,
            theory: theory.map(f),
            theory_exact: theory.map(RationalRepr::from),
            z: theory.map(|t| z_score(mean, se, f(t))),
        }
    }

    pub fn from_moments(m: &Moments, scale: i64, theory: Option<&BigRational>) -> Self {
        Self::new(m.mean() / scale as f64, m.se() / scale as f64, theory)
    }

    pub fn within(&self, z: f64) -> bool {
        self.z.is_some_and(|s| s.abs() <= z)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketColumn {
    pub lo: RationalRepr,
    pub hi: RationalRepr,
    pub source: BracketSource,
    /// Distance of the estimate from the bracket in standard errors.
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldReport {
    pub id: String,
    pub r: u32,
    pub e: u32,
    pub f: u32,
    pub aut: u32,
    pub disc_norm: RationalRepr,
    pub new_roots: Estimate,
    pub new_in_ring: u64,
    pub bracket: BracketColumn,
    pub uncertified: u64,
    pub bound_violations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassFrequency {
    pub label: String,
    pub aut: u64,
    pub count: u64,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtaleReport {
    pub classes: Vec<ClassFrequency>,
    pub frequency_sum: f64,
    pub flagged_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallRelation {
    Disjoint,
    Nested,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub u: Ball,
    pub v: Ball,
    pub relation: BallRelation,
    pub mean_u: f64,
    pub mean_v: f64,
    /// `E[Z_U Z_V]`.
    pub joint: Estimate,
    /// `Cov(Z_U, Z_V)/(E[Z_U] E[Z_V])`, disjoint balls only.
    pub normalized: Option<Estimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramReport {
    pub field: String,
    pub grid: Grid,
    pub unlocated: u64,
    pub chi_square: ChiSquare,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub n: u32,
    pub samples: u64,
    pub flagged: u64,
    pub flagged_fraction: f64,
    pub flagged_bound: f64,
    pub roots_in_base: Estimate,
    pub base_in_ring: u64,
    pub base_outside: u64,
    pub fields: Vec<FieldReport>,
    /// Σ of ρ̂_n(K) over the ramified quadratic fields.
    pub ramified_quadratic: Estimate,
    /// `E[Z(Z − 1)]` for Z the number of roots in F.
    pub pair_moment: Estimate,
    /// Σ over quadratic étale algebras of ρ̂_n(E)/#Aut.
    pub mass_r2: Estimate,
    pub mass_r3: Option<Estimate>,
    /// Σ̂(2, n) − Σ̂(3, n) from paired samples.
    pub mass_difference: Option<Estimate>,
    pub etale: Option<EtaleReport>,
    pub covariances: Vec<CovarianceReport>,
    pub histograms: Vec<HistogramReport>,
    pub pairs: Option<Grid>,
    pub conservation_violations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub p: u64,
    pub precision: u32,
    pub seed: u64,
    pub samples: u64,
    pub depth: u32,
    pub max_ext_degree: u32,
    pub rng: String,
    pub wall_time_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub schema_version: u32,
    pub metadata: Metadata,
    pub degrees: Vec<DegreeReport>,
}

impl CensusReport {
    pub fn degree(&self, n: u32) -> Option<&DegreeReport> {
        self.degrees.iter().find(|d| d.n == n)
    }
}

impl DegreeReport {
    pub fn field(&self, id: &str) -> Option<&FieldReport> {
        self.fields.iter().find(|k| k.id == id)
    }
}

/// Exact ρ_n(K) where a closed form is available.
pub fn exact_field_mass(ext: &ExtensionField, n: u32) -> Option<BigRational> {
    if n < ext.r {
        return Some(BigRational::zero());
    }
    match ext.r {
        2 => rho_mass_quadratic(ext, n).ok(),
        3 if n == 3 => rho_mass_prime_minimal(ext).ok(),
        _ => None,
    }
}

fn ball_measure(p: u64, b: &Ball) -> BigRational {
    q_pow(p, -(b.digits as i64))
}

/// Expected counts per class of O_K mod p^k for the new roots in O_K.
pub fn expected_histogram(
    ext: &ExtensionField,
    n: u32,
    depth: u32,
    samples: u64,
) -> Result<Vec<f64>> {
    let p = ext.p;
    let side = p.pow(depth);
    let mut by_val = Vec::new();
    for v in 0..depth {
        by_val.push(f(&quadratic_class_integral(ext, n, depth, Some(v))?));
    }
    let zero_class = f(&quadratic_class_integral(ext, n, depth, None)?);
    let mut out = Vec::with_capacity((side * side) as usize);
    for _a in 0..side {
        for b in 0..side {
            let cell = if b == 0 {
                zero_class
            } else {
                let mut v = 0;
                let mut t = b;
                while t % p == 0 {
                    t /= p;
                    v += 1;
                }
                by_val[v]
            };
            out.push(cell * samples as f64);
        }
    }
    Ok(out)
}

fn degree_report(
    plan: &Plan,
    cfg: &RunConfig,
    catalog: &Catalog,
    c: &DegreeCounters,
) -> Result<DegreeReport> {
    let p = plan.p;
    let n = c.n;
    let valid = c.valid();
    let one = BigRational::one();
    let mut fields = Vec::new();
    for (ext, fc) in plan.exts().zip(&c.fields) {
        let exact = exact_field_mass(ext, n);
        let est = Estimate::from_moments(&fc.new, 1, exact.as_ref());
        let (br, source) = density_mass_bracket(ext, n)?;
        let bz = z_outside(est.mean, est.se, f(&br.lo), f(&br.hi));
        fields.push(FieldReport {
            id: ext.id.clone(),
            r: ext.r,
            e: ext.e,
            f: ext.f,
            aut: ext.aut_count,
            disc_norm: RationalRepr::from(&ext.disc_norm()),
            new_roots: est,
            new_in_ring: fc.new_in_ring,
            bracket: BracketColumn {
                lo: (&br.lo).into(),
                hi: (&br.hi).into(),
                source,
                z: bz,
            },
            uncertified: fc.uncertified,
            bound_violations: fc.bound_violations,
        });
    }
    let mut ramified_theory = Some(BigRational::zero());
    for ext in plan.exts().filter(|k| k.r == 2 && !k.is_unramified()) {
        ramified_theory = ramified_theory
            .zip(exact_field_mass(ext, n))
            .map(|(a, b)| a + b);
    }
    let pair_theory = if n >= 2 {
        Some(rho_f2_mass(p, n)?)
    } else {
        Some(BigRational::zero())
    };
    let mass_theory = if n >= 2 {
        one.clone()
    } else {
        BigRational::zero()
    };
    let has_cubic = plan.exts().any(|k| k.r == 3);
    let mass_r3 = has_cubic.then(|| {
        let t = if n >= 3 {
            one.clone()
        } else {
            BigRational::zero()
        };
        Estimate::from_moments(&c.mass_r3, 6, Some(&t))
    });
    let mass_difference = has_cubic.then(|| {
        let (d, se) = c.mass_pair.difference();
        let t = if n >= 3 {
            Some(BigRational::zero())
        } else {
            None
        };
        Estimate::new(d / 6.0, se / 6.0, t.as_ref())
    });
    let etale = (!c.etale.is_empty() || c.etale_flagged > 0).then(|| {
        let classes: Vec<ClassFrequency> = c
            .etale
            .iter()
            .map(|(label, &count)| ClassFrequency {
                label: label.clone(),
                aut: etale_aut(catalog, label),
                count,
                frequency: count as f64 / c.samples as f64,
            })
            .collect();
        EtaleReport {
            frequency_sum: classes.iter().map(|x| x.frequency).sum(),
            flagged_fraction: (c.etale_flagged + c.flagged) as f64 / c.samples as f64,
            classes,
        }
    });
    let mut covariances = Vec::new();
    for (b, m) in plan.balls.iter().zip(&c.balls) {
        let (lu, lv) = (ball_measure(p, &b.u), ball_measure(p, &b.v));
        let (joint, jse) = m.joint();
        let low = b.u.digits.min(b.v.digits);
        let same_low = b.u.center % p.pow(low) == b.v.center % p.pow(low);
        let (relation, joint_theory, normalized) = if same_low {
            let (outer, inner) = if b.u.digits <= b.v.digits {
                (&lu, &lv)
            } else {
                (&lv, &lu)
            };
            let t = if n >= 2 {
                second_moment_nested(outer, inner, n, p).ok()
            } else {
                None
            };
            (BallRelation::Nested, t, None)
        } else {
            let diff = (b.u.center as i128 - b.v.center as i128).unsigned_abs() as u64;
            let dist = q_pow(p, -(diff.trailing_zeros_base(p) as i64));
            let th = if n >= 2 {
                covariance_disjoint_balls(&dist, n, p, &lu, &lv).ok()
            } else {
                None
            };
            let (nc, nse) = m.normalized_covariance();
            let joint_t = th.as_ref().map(|t| &t.raw + &t.mean_u * &t.mean_v);
            (
                BallRelation::Disjoint,
                joint_t,
                Some(Estimate::new(nc, nse, th.as_ref().map(|t| &t.normalized))),
            )
        };
        covariances.push(CovarianceReport {
            u: b.u.clone(),
            v: b.v.clone(),
            relation,
            mean_u: m.mean_u(),
            mean_v: m.mean_v(),
            joint: Estimate::new(joint, jse, joint_theory.as_ref()),
            normalized,
        });
    }
    let mut histograms = Vec::new();
    for (ext, h) in plan.histogram_fields().zip(&c.histograms) {
        let expected = if n >= 2 {
            expected_histogram(ext, n, plan.depth, valid)?
        } else {
            vec![0.0; h.grid.counts.len()]
        };
        histograms.push(HistogramReport {
            field: h.field.clone(),
            chi_square: chi_square(&h.grid.counts, &expected, cfg.thresholds.min_expected),
            grid: h.grid.clone(),
            unlocated: h.unlocated,
        });
    }
    let flagged_bound = 10.0 * (p as f64).powi(-(plan.precision as i32 - 16));
    Ok(DegreeReport {
        n,
        samples: c.samples,
        flagged: c.flagged,
        flagged_fraction: c.flagged as f64 / c.samples as f64,
        flagged_bound,
        roots_in_base: Estimate::from_moments(&c.roots_in_base, 1, Some(&one)),
        base_in_ring: c.base_in_ring,
        base_outside: c.base_outside,
        fields,
        ramified_quadratic: Estimate::from_moments(
            &c.ramified_quadratic,
            1,
            ramified_theory.as_ref(),
        ),
        pair_moment: Estimate::from_moments(&c.pair_moment, 1, pair_theory.as_ref()),
        mass_r2: Estimate::from_moments(&c.mass_r2, 2, Some(&mass_theory)),
        mass_r3,
        mass_difference,
        etale,
        covariances,
        histograms,
        pairs: c.pairs.clone(),
        conservation_violations: c.conservation_violations,
    })
}

trait BaseValuation {
    fn trailing_zeros_base(self, p: u64) -> u32;
}

impl BaseValuation for u64 {
    fn trailing_zeros_base(mut self, p: u64) -> u32 {
        if self == 0 {
            return u32::MAX;
        }
        let mut v = 0;
        while self % p == 0 {
            self /= p;
            v += 1;
        }
        v
    }
}

fn etale_aut(catalog: &Catalog, label: &str) -> u64 {
    padic_roots::catalog::etale_classes(catalog, 3)
        .into_iter()
        .chain(padic_roots::catalog::etale_classes(catalog, 2))
        .flatten()
        .find(|e| e.label() == label)
        .map_or(0, |e| e.aut_count)
}

pub fn build_report(cfg: &RunConfig, catalog: &Catalog, run: &CensusRun) -> Result<CensusReport> {
    let plan = Plan::new(cfg, catalog)?;
    let degrees = run
        .degrees
        .iter()
        .map(|c| degree_report(&plan, cfg, catalog, c))
        .collect::<Result<_>>()?;
    Ok(CensusReport {
        schema_version: SCHEMA_VERSION,
        metadata: Metadata {
            p: cfg.p,
            precision: cfg.precision(),
            seed: cfg.seed,
            samples: cfg.samples,
            depth: cfg.depth(),
            max_ext_degree: cfg.max_ext_degree,
            rng: "ChaCha8, one stream per (degree, sample index)".into(),
            wall_time_secs: run.wall_time_secs,
        },
        degrees,
    })
}

/// Sample, count and compare against theory.
pub fn run_census(cfg: &RunConfig) -> Result<CensusReport> {
    let catalog = Catalog::new(cfg.p)?;
    let run = run_counters(cfg, &catalog)?;
    build_report(cfg, &catalog, &run)
}
