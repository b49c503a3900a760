//! Sharded census of random polynomials over the cataloged fields.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use padic_roots::catalog::{Catalog, ExtensionField};
use padic_roots::census::{EtaleClassifier, Newness, RootFinder};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{BallPair, RunConfig};
use crate::histogram::Grid;
use crate::sample::{sample_residues, stream_index};
use crate::stats::{CovMoments, Moments, PairMoments};
use crate::Result;

const SHARD: u64 = 4096;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldCounters {
    /// New roots in K.
    pub new: Moments,
    /// New roots in O_K.
    pub new_in_ring: u64,
    pub uncertified: u64,
    /// Samples whose new-root count exceeded ⌊n/r⌋·r.
    pub bound_violations: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramCounters {
    pub field: String,
    pub grid: Grid,
    /// New roots in O_K that could not be placed in a class.
    pub unlocated: u64,
}

/// Mergeable counters for one degree n.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCounters {
    pub n: u32,
    pub samples: u64,
    pub flagged: u64,
    pub roots_in_base: Moments,
    pub base_in_ring: u64,
    pub base_outside: u64,
    pub fields: Vec<FieldCounters>,
    /// New roots summed over the ramified quadratic fields.
    pub ramified_quadratic: Moments,
    /// Z(Z − 1) for Z the number of roots in F.
    pub pair_moment: Moments,
    /// 2·Σ over quadratic étale classes of new-root counts divided by #Aut.
    pub mass_r2: Moments,
    /// 6·Σ over cubic étale classes, when cubic fields are in scope.
    pub mass_r3: Moments,
    /// (6·W₂, 6·W₃) per sample.
    pub mass_pair: PairMoments,
    pub etale: BTreeMap<String, u64>,
    pub etale_flagged: u64,
    pub histograms: Vec<HistogramCounters>,
    /// Ordered pairs of distinct roots in O_F.
    pub pairs: Option<Grid>,
    pub balls: Vec<CovMoments>,
    pub conservation_violations: u64,
}

impl DegreeCounters {
    pub fn merge(&mut self, o: &DegreeCounters) {
        assert_eq!(self.n, o.n);
        self.samples += o.samples;
        self.flagged += o.flagged;
        self.roots_in_base.merge(&o.roots_in_base);
        self.base_in_ring += o.base_in_ring;
        self.base_outside += o.base_outside;
        for (a, b) in self.fields.iter_mut().zip(&o.fields) {
            a.new.merge(&b.new);
            a.new_in_ring += b.new_in_ring;
            a.uncertified += b.uncertified;
            a.bound_violations += b.bound_violations;
        }
        self.ramified_quadratic.merge(&o.ramified_quadratic);
        self.pair_moment.merge(&o.pair_moment);
        self.mass_r2.merge(&o.mass_r2);
        self.mass_r3.merge(&o.mass_r3);
        self.mass_pair.merge(&o.mass_pair);
        for (k, v) in &o.etale {
            *self.etale.entry(k.clone()).or_default() += v;
        }
        self.etale_flagged += o.etale_flagged;
        for (a, b) in self.histograms.iter_mut().zip(&o.histograms) {
            a.grid.merge(&b.grid);
            a.unlocated += b.unlocated;
        }
        if let (Some(a), Some(b)) = (self.pairs.as_mut(), o.pairs.as_ref()) {
            a.merge(b);
        }
        for (a, b) in self.balls.iter_mut().zip(&o.balls) {
            a.merge(b);
        }
        self.conservation_violations += o.conservation_violations;
    }

    pub fn valid(&self) -> u64 {
        self.samples - self.flagged
    }
}

/// Prepared root finders and classifiers for one prime.
pub struct Plan {
    pub p: u64,
    pub precision: u32,
    pub depth: u32,
    pub base: RootFinder,
    pub fields: Vec<RootFinder>,
    hist: Vec<usize>,
    classifiers: BTreeMap<u32, EtaleClassifier>,
    pub balls: Vec<BallPair>,
    seed: u64,
}

impl Plan {
    pub fn new(cfg: &RunConfig, catalog: &Catalog) -> Result<Self> {
        cfg.validate()?;
        let prec = cfg.precision();
        let fields: Vec<RootFinder> = catalog
            .fields()
            .iter()
            .filter(|k| (2..=cfg.max_ext_degree).contains(&k.r))
            .map(|k| RootFinder::new(k.clone(), prec))
            .collect::<std::result::Result<_, _>>()?;
        let hist = fields
            .iter()
            .enumerate()
            .filter(|(_, f)| {
                f.ext().r == 2
                    && (cfg.histogram_fields.is_empty()
                        || cfg.histogram_fields.contains(&f.ext().id))
            })
            .map(|(i, _)| i)
            .collect();
        let mut classifiers = BTreeMap::new();
        for r in 2..=cfg.max_ext_degree {
            if cfg.degrees.contains(&r) {
                classifiers.insert(r, EtaleClassifier::new(catalog, r, prec)?);
            }
        }
        Ok(Plan {
            p: cfg.p,
            precision: prec,
            depth: cfg.depth(),
            base: RootFinder::new(catalog.base().clone(), prec)?,
            fields,
            hist,
            classifiers,
            balls: cfg.balls(),
            seed: cfg.seed,
        })
    }

    pub fn exts(&self) -> impl Iterator<Item = &Arc<ExtensionField>> {
        self.fields.iter().map(|f| f.ext())
    }

    pub fn histogram_fields(&self) -> impl Iterator<Item = &Arc<ExtensionField>> {
        self.hist.iter().map(|&i| self.fields[i].ext())
    }

    pub fn empty(&self, n: u32) -> DegreeCounters {
        DegreeCounters {
            n,
            fields: vec![FieldCounters::default(); self.fields.len()],
            histograms: self
                .histogram_fields()
                .map(|k| HistogramCounters {
                    field: k.id.clone(),
                    grid: Grid::new(self.p, self.depth),
                    unlocated: 0,
                })
                .collect(),
            pairs: Some(Grid::new(self.p, self.depth)),
            balls: vec![CovMoments::default(); self.balls.len()],
            ..Default::default()
        }
    }

    /// Base-field roots in O_F, located modulo p^digits.
    fn base_locations(&self, coeffs: &[u64], digits: u32) -> Option<Vec<u64>> {
        let (roots, flagged) = self.base.locate_in_ring(coeffs);
        if flagged || roots.iter().any(|r| r.depth < digits) {
            return None;
        }
        let m = self.p.pow(digits);
        Some(roots.iter().map(|r| r.coords[0] % m).collect())
    }

    /// Census of one polynomial given by residues.
    pub fn record(&self, coeffs: &[u64], acc: &mut DegreeCounters) {
        let n = acc.n;
        acc.samples += 1;
        let base = self.base.count(coeffs);
        let counts: Vec<_> = self.fields.iter().map(|f| f.count(coeffs)).collect();
        if base.flagged() || counts.iter().any(|c| c.flagged()) {
            acc.flagged += 1;
            for (fc, c) in acc.fields.iter_mut().zip(&counts) {
                fc.uncertified += c.uncertified as u64;
            }
            return;
        }
        let need_digits = self
            .balls
            .iter()
            .map(|b| b.u.digits.max(b.v.digits))
            .max()
            .unwrap_or(0)
            .max(self.depth);
        let located = if base.in_ring > 0 {
            match self.base_locations(coeffs, need_digits) {
                Some(x) if x.len() == base.in_ring as usize => x,
                _ => {
                    acc.flagged += 1;
                    return;
                }
            }
        } else {
            Vec::new()
        };
        let z = base.total() as i64;
        if z > n as i64 {
            acc.conservation_violations += 1;
        }
        acc.roots_in_base.push(z);
        acc.base_in_ring += base.in_ring as u64;
        acc.base_outside += base.outside as u64;
        acc.pair_moment.push(z * (z - 1));
        let mut w2 = z * (z - 1);
        let mut w3 = z * (z - 1) * (z - 2);
        let mut ramified = 0;
        for (i, (f, c)) in self.fields.iter().zip(&counts).enumerate() {
            let ext = f.ext();
            let new = c.total() as i64 - z;
            let new_in_ring = c.in_ring as i64 - base.in_ring as i64;
            let fc = &mut acc.fields[i];
            if new < 0 || new_in_ring < 0 {
                acc.conservation_violations += 1;
            }
            if new > (n / ext.r * ext.r) as i64 {
                fc.bound_violations += 1;
            }
            fc.new.push(new);
            fc.new_in_ring += new_in_ring.max(0) as u64;
            let aut = ext.aut_count as i64;
            match ext.r {
                2 => {
                    if !ext.is_unramified() {
                        ramified += new;
                    }
                    w2 += 2 * new / aut;
                    w3 += 6 * z * new / aut;
                }
                3 => w3 += 6 * new / aut,
                _ => {}
            }
        }
        if self.fields.iter().any(|f| f.ext().r == 2) {
            acc.ramified_quadratic.push(ramified);
        }
        acc.mass_r2.push(w2);
        if self.fields.iter().any(|f| f.ext().r == 3) {
            acc.mass_r3.push(w3);
            acc.mass_pair.push(3 * w2, w3);
        }
        if let Some(cl) = self.classifiers.get(&n) {
            match cl.classify(coeffs) {
                Ok(e) => *acc.etale.entry(e.label()).or_default() += 1,
                Err(_) => acc.etale_flagged += 1,
            }
        }
        let m = self.p.pow(self.depth);
        for (h, &i) in acc.histograms.iter_mut().zip(&self.hist) {
            let expected = counts[i].in_ring - base.in_ring;
            if expected == 0 {
                continue;
            }
            let (roots, _) = self.fields[i].locate_in_ring(coeffs);
            let mut placed = 0;
            for r in roots.iter().filter(|r| r.is_new == Newness::New) {
                h.grid.add(r.coords[0] % m, r.coords[1] % m);
                placed += 1;
            }
            h.unlocated += (expected as u64).saturating_sub(placed);
        }
        if let Some(g) = acc.pairs.as_mut() {
            for (i, &x) in located.iter().enumerate() {
                for (j, &y) in located.iter().enumerate() {
                    if i != j {
                        g.add(x, y);
                    }
                }
            }
        }
        for (b, cm) in self.balls.iter().zip(acc.balls.iter_mut()) {
            let zu = located.iter().filter(|&&x| b.u.contains(self.p, x)).count() as i64;
            let zv = located.iter().filter(|&&x| b.v.contains(self.p, x)).count() as i64;
            cm.push(zu, zv);
        }
    }

    /// Samples `[start, end)` of the degree-n batch.
    pub fn run_range(&self, n: u32, start: u64, end: u64) -> DegreeCounters {
        let mut acc = self.empty(n);
        for i in start..end {
            let c = sample_residues(self.p, n, self.precision, self.seed, stream_index(n, i));
            self.record(&c, &mut acc);
        }
        acc
    }

    pub fn run_degree(&self, n: u32, samples: u64) -> DegreeCounters {
        let shards = samples.div_ceil(SHARD);
        (0..shards)
            .into_par_iter()
            .map(|s| self.run_range(n, s * SHARD, ((s + 1) * SHARD).min(samples)))
            .reduce(
                || self.empty(n),
                |mut a, b| {
                    a.merge(&b);
                    a
                },
            )
    }
}

/// Raw counters of a full run.
pub struct CensusRun {
    pub degrees: Vec<DegreeCounters>,
    pub wall_time_secs: f64,
}

pub fn run_counters(cfg: &RunConfig, catalog: &Catalog) -> Result<CensusRun> {
    let plan = Plan::new(cfg, catalog)?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(|e| crate::HarnessError::Config(e.to_string()))?;
    let degrees = pool.install(|| {
        cfg.degrees
            .iter()
            .map(|&n| plan.run_degree(n, cfg.samples))
            .collect()
    });
    Ok(CensusRun {
        degrees,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(p: u64) -> (RunConfig, Catalog) {
        let cfg = RunConfig {
            samples: 3000,
            degrees: vec![2, 3],
            ..RunConfig::preset(p)
        };
        (cfg, Catalog::new(p).unwrap())
    }

    #[test]
    fn shard_merge_matches_sequential() {
        let (cfg, cat) = small(2);
        let plan = Plan::new(&cfg, &cat).unwrap();
        let seq = plan.run_range(3, 0, 3000);
        let mut a = plan.run_range(3, 2000, 3000);
        let mut b = plan.run_range(3, 0, 1000);
        b.merge(&plan.run_range(3, 1000, 2000));
        a.merge(&b);
        assert_eq!(seq, a);
        assert_eq!(plan.run_degree(3, 3000), seq);
    }

    #[test]
    fn quadratics_classify_exhaustively() {
        let (cfg, cat) = small(5);
        let plan = Plan::new(&cfg, &cat).unwrap();
        let c = plan.run_degree(2, 3000);
        let classified: u64 = c.etale.values().sum();
        assert_eq!(classified + c.etale_flagged + c.flagged, c.samples);
        assert_eq!(c.mass_r2.sum, 2 * c.mass_r2.count as i128);
        assert_eq!(c.conservation_violations, 0);
    }

    #[test]
    fn histogram_conserves_new_roots() {
        let (cfg, cat) = small(2);
        let plan = Plan::new(&cfg, &cat).unwrap();
        let c = plan.run_degree(3, 3000);
        for (h, &i) in c.histograms.iter().zip(&plan.hist) {
            assert_eq!(
                h.grid.total() + h.unlocated,
                c.fields[i].new_in_ring,
                "{}",
                h.field
            );
        }
        let pairs = c.pairs.as_ref().unwrap().total() as i128;
        assert!(pairs <= c.pair_moment.sum);
    }
}
