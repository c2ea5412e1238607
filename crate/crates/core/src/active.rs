//! The two active-learning engines: the stump engine (interval halving over
//! threshold indices) and the general engine (version-space pruning over an
//! enumerated class), plus the brute-force optimal oracle used to verify
//! their multiplicative guarantees.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{achievable_width, vc_dimension, ClassComplexity};
use crate::dataset::{sample_without_replacement, DatasetKind, GridDataset, LabelSource};
use crate::disagreement::{dis_region, radius, theta_class, Budget};
use crate::error::{Error, Result};
use crate::hypotheses::{ClassKind, Hypothesis, HypothesisClass, Stump};
use crate::labeling::Labeling;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ThetaMode {
    /// Exact brute force when within budget, falling back to the formula
    /// bound when the class is too large.
    BruteForce,
    Supplied { value: f64 },
    /// ln(n)^depth growth-law bound (depth 1 for stumps).
    BoundFormula,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RunConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub c1: f64,
    pub b1: f64,
    pub c2: f64,
    pub b2: f64,
    pub theta_mode: ThetaMode,
    pub seed: u64,
    /// Clamp requested sample sizes to the population (recording the clamp)
    /// instead of erroring.
    pub clamp_to_population: bool,
}

impl RunConfig {
    pub fn new(epsilon: f64, delta: f64, constants: (f64, f64, f64, f64), seed: u64) -> Self {
        RunConfig {
            epsilon,
            delta,
            c1: constants.0,
            b1: constants.1,
            c2: constants.2,
            b2: constants.3,
            theta_mode: ThetaMode::BruteForce,
            seed,
            clamp_to_population: true,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("epsilon", self.epsilon), ("delta", self.delta)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} {v} outside (0, 1)")));
            }
        }
        for (name, v) in [
            ("c1", self.c1),
            ("b1", self.b1),
            ("c2", self.c2),
            ("b2", self.b2),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} {v} negative")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Loop,
    DirectEstimation,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationTrace {
    pub iteration: usize,
    /// Stump engine: surviving interval [L, R] after pruning.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<(usize, usize)>,
    /// General engine: |H_i| after pruning.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    pub sample_size: usize,
    pub clamped: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunStats {
    pub queries: u64,
    pub iterations: usize,
    pub terminated_via: Termination,
    pub returned: Hypothesis,
    /// Population error of the returned hypothesis; filled by the verifier.
    pub achieved_err: Option<f64>,
    /// Optimal population error; filled by the verifier.
    pub eta: Option<f64>,
    pub clamps: usize,
}

/// Full run record for serialization: config echo, trace, stats.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub trace: Vec<IterationTrace>,
    pub stats: RunStats,
}

#[derive(Debug, Clone)]
pub struct StumpRun {
    pub stump: Stump,
    pub stats: RunStats,
    pub trace: Vec<IterationTrace>,
}

#[derive(Debug, Clone)]
pub struct GeneralRun {
    pub hypothesis: Hypothesis,
    pub member_index: usize,
    pub stats: RunStats,
    pub trace: Vec<IterationTrace>,
}

/// Misclassification counts of stumps lo..=hi against a sample of
/// (1-based position, label) pairs sorted by position.
fn stump_sample_errs(sample: &[(usize, bool)], lo: usize, hi: usize) -> Vec<u32> {
    let m = sample.len();
    let mut err: i64 = sample
        .iter()
        .filter(|&&(p, y)| if p < lo { y } else { !y })
        .count() as i64;
    let mut out = Vec::with_capacity(hi - lo + 1);
    out.push(err as u32);
    let mut k = sample.partition_point(|&(p, _)| p < lo);
    for h in lo..hi {
        // position h switches from "predicted 1" to "predicted 0" at h+1
        while k < m && sample[k].0 == h {
            if sample[k].1 {
                err += 1;
            } else {
                err -= 1;
            }
            k += 1;
        }
        out.push(err as u32);
    }
    out
}

fn ceil_count(x: f64) -> usize {
    if x <= 0.0 {
        0
    } else {
        x.ceil() as usize
    }
}

/// Algorithm: maintain a candidate interval [L, R] of stump indices, sample
/// from the covered points, prune by LB <= min UB, and fall back to a
/// single direct-estimation draw when the interval fails to halve.
pub fn stump_active(ds: &GridDataset, source: &LabelSource, cfg: &RunConfig) -> Result<StumpRun> {
    cfg.validate()?;
    if ds.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: ds.dim(),
        });
    }
    if ds.kind() == DatasetKind::Grid && ds.n() > 1 {
        // 1-D grids are sorted; anything else must be the sorted variant
    } else if ds.kind() != DatasetKind::Sorted1d && ds.n() > 1 && ds.kind() != DatasetKind::Diagonal
    {
        return Err(Error::InvalidParameter(
            "stump engine requires sorted 1-D data".into(),
        ));
    }
    let n = ds.n();
    if n == 0 {
        return Err(Error::EmptySet("stump engine dataset"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let delta_p = cfg.delta / (2.0 * (2.0 * n as f64).log2());
    let iter_cap = (2.0 * n as f64).log2().ceil() as usize + 1;

    let mut l = 0usize;
    let mut r = n;
    let mut queries = 0u64;
    let mut clamps = 0usize;
    let mut trace = Vec::new();
    let mut iterations = 0usize;

    let draw = |lo: usize,
                hi: usize,
                want: usize,
                rng: &mut ChaCha12Rng,
                queries: &mut u64,
                clamps: &mut usize|
     -> Result<(Vec<(usize, bool)>, bool)> {
        let pop: Vec<usize> = (lo.max(1)..=hi).collect();
        let clamped = want > pop.len();
        if clamped {
            if !cfg.clamp_to_population {
                return Err(Error::InvalidParameter(format!(
                    "sample size {want} exceeds population {} and clamping is disabled",
                    pop.len()
                )));
            }
            *clamps += 1;
        }
        let picked = sample_without_replacement(&pop, want, rng);
        *queries += picked.len() as u64;
        let mut labeled = Vec::with_capacity(picked.len());
        for p in picked {
            labeled.push((p, source.query(p - 1)?));
        }
        Ok((labeled, clamped))
    };

    while l < r {
        let m1 = ceil_count(cfg.c1 * (1.0 / delta_p).ln() + cfg.b1);
        let (sample, clamped) = draw(l, r, m1, &mut rng, &mut queries, &mut clamps)?;
        iterations += 1;
        if iterations > iter_cap {
            return Err(Error::Internal(format!(
                "stump loop exceeded {iter_cap} iterations"
            )));
        }
        if sample.is_empty() {
            return Err(Error::EmptySet("stump engine sample"));
        }
        let width = if clamped {
            0.0
        } else {
            achievable_width(sample.len() as u64, delta_p, 1)?
        };
        let errs = stump_sample_errs(&sample, l, r);
        let msize = sample.len() as f64;
        let min_err = *errs.iter().min().expect("nonempty") as f64 / msize;
        let beta = (min_err + width / 2.0).min(1.0);
        let keep = |e: u32| (e as f64 / msize - width / 2.0).max(0.0) <= beta + 1e-12;
        let new_l = l + errs.iter().position(|&e| keep(e)).expect("argmin survives");
        let new_r = l + errs.iter().rposition(|&e| keep(e)).expect("argmin survives");

        trace.push(IterationTrace {
            iteration: iterations,
            interval: Some((new_l, new_r)),
            set_size: None,
            radius: None,
            sample_size: sample.len(),
            clamped,
        });

        if 2 * (new_r - new_l) > r - l {
            // pruning stalled: direct estimation over the pre-shrink interval
            let m2 = ceil_count(
                cfg.c2 / (cfg.epsilon * cfg.epsilon)
                    * ((1.0 / (cfg.delta * cfg.epsilon)).ln() + cfg.b2),
            );
            let (sample2, clamped2) = draw(l, r, m2, &mut rng, &mut queries, &mut clamps)?;
            let errs2 = stump_sample_errs(&sample2, l, r);
            let best = l
                + errs2
                    .iter()
                    .enumerate()
                    .min_by_key(|&(i, e)| (*e, i))
                    .expect("nonempty")
                    .0;
            trace.push(IterationTrace {
                iteration: iterations,
                interval: Some((l, r)),
                set_size: None,
                radius: None,
                sample_size: sample2.len(),
                clamped: clamped2,
            });
            let stump = Stump { index: best };
            return Ok(StumpRun {
                stump,
                stats: RunStats {
                    queries,
                    iterations,
                    terminated_via: Termination::DirectEstimation,
                    returned: Hypothesis::Stump(stump),
                    achieved_err: None,
                    eta: None,
                    clamps,
                },
                trace,
            });
        }
        l = new_l;
        r = new_r;
    }

    let stump = Stump { index: l };
    Ok(StumpRun {
        stump,
        stats: RunStats {
            queries,
            iterations,
            terminated_via: Termination::Loop,
            returned: Hypothesis::Stump(stump),
            achieved_err: None,
            eta: None,
            clamps,
        },
        trace,
    })
}

fn resolve_theta(class: &HypothesisClass, ds: &GridDataset, mode: ThetaMode) -> Result<f64> {
    let formula = |kind: ClassKind| -> f64 {
        let d = match kind {
            ClassKind::Stump => 1,
            ClassKind::Tree { depth, .. } | ClassKind::LineTree { depth, .. } => depth.max(1),
        };
        (ds.n() as f64).ln().max(1.0).powi(d as i32)
    };
    match mode {
        ThetaMode::Supplied { value } => Ok(value),
        ThetaMode::BoundFormula => Ok(formula(class.kind())),
        ThetaMode::BruteForce => match theta_class(class, &Budget::default()) {
            Ok(t) => Ok(t),
            Err(Error::BudgetExceeded(_)) => Ok(formula(class.kind())),
            Err(e) => Err(e),
        },
    }
}

fn class_vc(class: &HypothesisClass, ds: &GridDataset) -> Result<u32> {
    match class.kind() {
        ClassKind::Stump => vc_dimension(ClassComplexity::Stump),
        ClassKind::Tree { depth, .. } | ClassKind::LineTree { depth, .. } => {
            vc_dimension(ClassComplexity::Tree {
                depth,
                dim: ds.dim().max(2),
            })
        }
    }
}

/// Version-space engine: sample from the disagreement region, prune by
/// LB <= min UB, and fall back to direct estimation when the version-space
/// radius fails to halve.
pub fn general_active(
    ds: &GridDataset,
    class: &HypothesisClass,
    source: &LabelSource,
    cfg: &RunConfig,
) -> Result<GeneralRun> {
    cfg.validate()?;
    if class.is_empty() {
        return Err(Error::EmptySet("general engine hypothesis class"));
    }
    let n = ds.n();
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let theta = resolve_theta(class, ds, cfg.theta_mode)?;
    let vc = class_vc(class, ds)?;
    let delta_p = cfg.delta / (2.0 * (2.0 * n as f64).log2());
    let ln_theta = theta.ln().max(0.0);
    let iter_cap = (2.0 * n as f64).log2().ceil() as usize + 1;
    let all: Vec<usize> = (0..n).collect();

    let mut alive: Vec<usize> = (0..class.len()).collect();
    let mut rad = 1.0f64;
    let mut queries = 0u64;
    let mut clamps = 0usize;
    let mut iterations = 0usize;
    let mut trace = Vec::new();

    let finish = |member: usize,
                  via: Termination,
                  queries: u64,
                  iterations: usize,
                  clamps: usize,
                  trace: Vec<IterationTrace>| GeneralRun {
        hypothesis: class.member(member).clone(),
        member_index: member,
        stats: RunStats {
            queries,
            iterations,
            terminated_via: via,
            returned: class.member(member).clone(),
            achieved_err: None,
            eta: None,
            clamps,
        },
        trace,
    };

    while alive.len() > 1 {
        let dis = dis_region(class, &alive, &all)?;
        if dis.is_empty() {
            // distinct labelings must disagree somewhere; only possible if
            // the class was not deduplicated (e.g. raw stump indices 0 and 1)
            return Err(Error::Internal(
                "empty disagreement region with |H| > 1".into(),
            ));
        }
        let m1 = ceil_count(
            cfg.c1 * theta * theta * (vc as f64 * ln_theta + (1.0 / delta_p).ln()) + cfg.b1,
        );
        let clamped = m1 > dis.len();
        if clamped {
            if !cfg.clamp_to_population {
                return Err(Error::InvalidParameter(format!(
                    "sample size {m1} exceeds |DIS| = {} and clamping is disabled",
                    dis.len()
                )));
            }
            clamps += 1;
        }
        let sample = sample_without_replacement(&dis, m1, &mut rng);
        queries += sample.len() as u64;
        let mut labels = Vec::with_capacity(sample.len());
        for &p in &sample {
            labels.push(source.query(p)?);
        }
        iterations += 1;
        if iterations > iter_cap {
            return Err(Error::Internal(format!(
                "general loop exceeded {iter_cap} iterations"
            )));
        }
        let width = if sample.len() == dis.len() {
            0.0
        } else {
            achievable_width(sample.len() as u64, delta_p, vc)?
        };
        let msize = sample.len() as f64;
        let emp = |member: usize| -> f64 {
            let lab = class.labeling(member);
            sample
                .iter()
                .zip(&labels)
                .filter(|&(&p, &y)| lab.get(p) != y)
                .count() as f64
                / msize
        };
        let emps: Vec<f64> = alive.iter().map(|&m| emp(m)).collect();
        let beta = emps
            .iter()
            .map(|e| (e + width / 2.0).min(1.0))
            .fold(f64::INFINITY, f64::min);
        let surviving: Vec<usize> = alive
            .iter()
            .zip(&emps)
            .filter(|&(_, &e)| (e - width / 2.0).max(0.0) <= beta + 1e-12)
            .map(|(&m, _)| m)
            .collect();
        let new_rad = radius(class, &surviving)?;
        trace.push(IterationTrace {
            iteration: iterations,
            interval: None,
            set_size: Some(surviving.len()),
            radius: Some(new_rad),
            sample_size: sample.len(),
            clamped,
        });

        if new_rad > rad / 2.0 {
            // radius failed to halve: direct estimation from DIS(H_i)
            let m2 = ceil_count(
                cfg.c2 * theta * theta / (cfg.epsilon * cfg.epsilon)
                    * (vc as f64 * (theta / cfg.epsilon).ln().max(0.0)
                        + (1.0 / cfg.delta).ln())
                    + cfg.b2,
            );
            let clamped2 = m2 > dis.len();
            if clamped2 {
                clamps += 1;
            }
            let sample2 = sample_without_replacement(&dis, m2, &mut rng);
            queries += sample2.len() as u64;
            let mut labels2 = Vec::with_capacity(sample2.len());
            for &p in &sample2 {
                labels2.push(source.query(p)?);
            }
            let m2size = sample2.len() as f64;
            let best = alive
                .iter()
                .map(|&m| {
                    let lab = class.labeling(m);
                    let e = sample2
                        .iter()
                        .zip(&labels2)
                        .filter(|&(&p, &y)| lab.get(p) != y)
                        .count();
                    (e, m)
                })
                .min()
                .expect("alive nonempty")
                .1;
            let _ = m2size;
            trace.push(IterationTrace {
                iteration: iterations,
                interval: None,
                set_size: Some(alive.len()),
                radius: Some(new_rad),
                sample_size: sample2.len(),
                clamped: clamped2,
            });
            return Ok(finish(
                best,
                Termination::DirectEstimation,
                queries,
                iterations,
                clamps,
                trace,
            ));
        }
        alive = surviving;
        rad = new_rad;
    }

    let sole = alive[0];
    Ok(finish(
        sole,
        Termination::Loop,
        queries,
        iterations,
        clamps,
        trace,
    ))
}

/// Exact argmin of population error over an enumerated class, ties broken
/// by canonical (lowest) member index.
pub fn brute_force_optimal(class: &HypothesisClass, labels: &Labeling) -> Result<(usize, f64)> {
    if class.is_empty() {
        return Err(Error::EmptySet("brute_force_optimal over empty class"));
    }
    let n = class.n() as f64;
    let (wrong, idx) = (0..class.len())
        .map(|m| (class.labeling(m).xor_count(labels), m))
        .min()
        .expect("nonempty");
    Ok((idx, wrong as f64 / n))
}

/// Prefix-sum scan over all n+1 stumps: exact optimal index and error.
pub fn brute_force_optimal_stump(labels: &Labeling) -> (Stump, f64) {
    let n = labels.len();
    // h = 0 predicts 1 everywhere: errors = zeros
    let mut err: i64 = (0..n).filter(|&i| !labels.get(i)).count() as i64;
    let mut best = (err, 0usize);
    for h in 1..=n {
        // moving h-1 -> h flips 1-based position h-1 (none when h = 1)
        if h >= 2 {
            if labels.get(h - 2) {
                err += 1;
            } else {
                err -= 1;
            }
        }
        if err < best.0 {
            best = (err, h);
        }
    }
    (Stump { index: best.1 }, best.0 as f64 / n as f64)
}

/// Population error of a stump against a full label vector.
pub fn stump_population_err(stump: Stump, labels: &Labeling) -> f64 {
    let n = labels.len();
    let wrong = (0..n)
        .filter(|&i| (i + 1 >= stump.index) != labels.get(i))
        .count();
    wrong as f64 / n as f64
}
