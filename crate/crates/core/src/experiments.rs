//! Experiment harness: success-rate grids over the engine constants,
//! coefficient scaling studies, and label-complexity curves. All outputs are
//! a pure function of (config, master seed); trials parallelize with rayon
//! and rows are emitted in sorted key order.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::active::{
    brute_force_optimal_stump, stump_active, stump_population_err, RunConfig, ThetaMode,
};
use crate::dataset::{make_diagonal, make_grid, make_label_source, make_sorted1d_range, DatasetKind, GridDataset};
use crate::disagreement::{theta_class, theta_of, Budget};
use crate::error::{Error, Result};
use crate::hypotheses::{enumerate_stumps, enumerate_trees, Hypothesis, Stump};

/// splitmix64 finalizer; chained to derive independent per-trial seeds.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic seed for (master, cell, trial); no cross-trial correlation.
pub fn trial_seed(master: u64, cell: u64, trial: u64) -> u64 {
    let mut x = splitmix64(master);
    x = splitmix64(x ^ cell.wrapping_mul(0xA24B_AED4_963E_E407));
    splitmix64(x ^ trial.wrapping_mul(0x9FB2_1C65_1E98_DF25))
}

fn default_axis() -> Vec<f64> {
    vec![1.0, 2.0, 3.0, 5.0, 10.0]
}

fn default_trials() -> usize {
    50
}

fn default_n() -> usize {
    100_000
}

fn default_true() -> bool {
    true
}

fn default_max_members() -> usize {
    200_000
}

fn default_max_points() -> usize {
    4_096
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuccessGridConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    pub noise: f64,
    pub epsilon: f64,
    pub delta: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_axis")]
    pub c1_values: Vec<f64>,
    #[serde(default = "default_axis")]
    pub b1_values: Vec<f64>,
    #[serde(default = "default_axis")]
    pub c2_values: Vec<f64>,
    #[serde(default = "default_axis")]
    pub b2_values: Vec<f64>,
    #[serde(default)]
    pub master_seed: u64,
    /// Reuse one labeled instance across all trials of a cell instead of the
    /// default fresh instance per trial.
    #[serde(default)]
    pub fixed_dataset: bool,
    /// Fixed target stump index; omitted = drawn per instance.
    #[serde(default)]
    pub h_star: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaCenter {
    /// Coefficient at the all-zero hypothesis.
    AllZero,
    /// Supremum over the whole class.
    Class,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ScalingClass {
    Stump,
    Tree {
        depth: usize,
        #[serde(default = "default_true")]
        unique_dims: bool,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThetaScalingConfig {
    pub dataset: DatasetKind,
    pub dim: usize,
    pub n_values: Vec<usize>,
    #[serde(flatten)]
    pub class: ScalingClass,
    pub center: ThetaCenter,
    #[serde(default = "default_max_members")]
    pub max_members: usize,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelComplexityConfig {
    pub n_values: Vec<usize>,
    pub noise: f64,
    pub epsilon: f64,
    pub delta: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    pub c1: f64,
    pub b1: f64,
    pub c2: f64,
    pub b2: f64,
    #[serde(default)]
    pub master_seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum ExperimentConfig {
    SuccessGrid(SuccessGridConfig),
    ThetaScaling(ThetaScalingConfig),
    LabelComplexity(LabelComplexityConfig),
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentConfig::SuccessGrid(c) => {
                if c.trials == 0 {
                    return Err(Error::InvalidParameter("trials must be >= 1".into()));
                }
                for (name, axis) in [
                    ("c1_values", &c.c1_values),
                    ("b1_values", &c.b1_values),
                    ("c2_values", &c.c2_values),
                    ("b2_values", &c.b2_values),
                ] {
                    if axis.is_empty() {
                        return Err(Error::InvalidParameter(format!("{name} is empty")));
                    }
                }
                if c.n == 0 {
                    return Err(Error::InvalidParameter("n must be >= 1".into()));
                }
            }
            ExperimentConfig::ThetaScaling(c) => {
                if c.n_values.is_empty() {
                    return Err(Error::InvalidParameter("n_values is empty".into()));
                }
                if c.dim == 0 {
                    return Err(Error::InvalidParameter("dim must be >= 1".into()));
                }
            }
            ExperimentConfig::LabelComplexity(c) => {
                if c.n_values.is_empty() {
                    return Err(Error::InvalidParameter("n_values is empty".into()));
                }
                if c.trials == 0 {
                    return Err(Error::InvalidParameter("trials must be >= 1".into()));
                }
            }
        }
        Ok(())
    }

    fn name(&self) -> &'static str {
        match self {
            ExperimentConfig::SuccessGrid(_) => "success_grid",
            ExperimentConfig::ThetaScaling(_) => "theta_scaling",
            ExperimentConfig::LabelComplexity(_) => "label_complexity",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridCell {
    pub c1: f64,
    pub b1: f64,
    pub c2: f64,
    pub b2: f64,
    pub successes: usize,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_queries: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaRow {
    pub class_kind: String,
    pub n: usize,
    pub d: usize,
    pub dim: usize,
    pub theta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexityRow {
    pub n: usize,
    pub median_queries: u64,
    pub p90_queries: u64,
    pub success_rate: f64,
}

/// One stump-engine trial: (success under the (1+eps)*eta criterion, queries).
fn stump_trial(
    ds: &GridDataset,
    noise: f64,
    run_cfg: &RunConfig,
    h_star: usize,
    label_seed: u64,
) -> Result<(bool, u64)> {
    let src = make_label_source(ds, &Hypothesis::Stump(Stump { index: h_star }), noise, label_seed)?;
    let run = stump_active(ds, &src, run_cfg)?;
    let labels = src.labels_unchecked();
    let eta = brute_force_optimal_stump(labels).1;
    let achieved = stump_population_err(run.stump, labels);
    Ok((achieved <= (1.0 + run_cfg.epsilon) * eta + 1e-12, run.stats.queries))
}

pub fn run_success_grid(cfg: &SuccessGridConfig, master_seed: u64) -> Result<Vec<GridCell>> {
    let ds = make_sorted1d_range(cfg.n)?;
    let mut cells: Vec<(f64, f64, f64, f64)> = Vec::new();
    for &c1 in &cfg.c1_values {
        for &b1 in &cfg.b1_values {
            for &c2 in &cfg.c2_values {
                for &b2 in &cfg.b2_values {
                    cells.push((c1, b1, c2, b2));
                }
            }
        }
    }
    cells
        .par_iter()
        .enumerate()
        .map(|(ci, &(c1, b1, c2, b2))| {
            let results: Vec<(bool, u64)> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = trial_seed(master_seed, ci as u64, t as u64);
                    // fixed-dataset mode shares one instance across trials
                    let label_seed = if cfg.fixed_dataset {
                        trial_seed(master_seed, ci as u64, u64::MAX)
                    } else {
                        splitmix64(seed ^ 1)
                    };
                    let h_star = cfg.h_star.unwrap_or_else(|| {
                        let s = if cfg.fixed_dataset {
                            label_seed
                        } else {
                            splitmix64(seed ^ 2)
                        };
                        (s % (cfg.n as u64 + 1)) as usize
                    });
                    let run_cfg = RunConfig {
                        epsilon: cfg.epsilon,
                        delta: cfg.delta,
                        c1,
                        b1,
                        c2,
                        b2,
                        theta_mode: ThetaMode::BruteForce,
                        seed: splitmix64(seed ^ 3),
                        clamp_to_population: true,
                    };
                    stump_trial(&ds, cfg.noise, &run_cfg, h_star, label_seed)
                })
                .collect::<Result<_>>()?;
            let successes = results.iter().filter(|r| r.0).count();
            let total_q: u64 = results.iter().map(|r| r.1).sum();
            Ok(GridCell {
                c1,
                b1,
                c2,
                b2,
                successes,
                trials: cfg.trials,
                success_rate: successes as f64 / cfg.trials as f64,
                mean_queries: total_q as f64 / cfg.trials as f64,
            })
        })
        .collect()
}

fn scaling_dataset(kind: DatasetKind, n: usize, dim: usize) -> Result<GridDataset> {
    match kind {
        DatasetKind::Grid => {
            let w = (n as f64).powf(1.0 / dim as f64).round() as usize;
            if w.pow(dim as u32) != n {
                return Err(Error::InvalidParameter(format!(
                    "n = {n} is not a perfect {dim}-th power"
                )));
            }
            make_grid(w, dim)
        }
        DatasetKind::Diagonal => make_diagonal(n, dim),
        DatasetKind::Sorted1d => {
            if dim != 1 {
                return Err(Error::DimensionMismatch { expected: 1, got: dim });
            }
            make_sorted1d_range(n)
        }
    }
}

pub fn run_theta_scaling(cfg: &ThetaScalingConfig) -> Result<Vec<ThetaRow>> {
    let budget = Budget {
        max_members: cfg.max_members,
        max_points: cfg.max_points,
    };
    let mut ns = cfg.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::with_capacity(ns.len());
    for &n in &ns {
        let ds = scaling_dataset(cfg.dataset, n, cfg.dim)?;
        let (class, kind_name, d) = match cfg.class {
            ScalingClass::Stump => (enumerate_stumps(ds.n())?, "stump".to_string(), 1),
            ScalingClass::Tree { depth, unique_dims } => (
                enumerate_trees(&ds, depth, unique_dims, cfg.max_members)?,
                format!("tree_{}", if unique_dims { "unique" } else { "repeated" }),
                depth,
            ),
        };
        let theta = match cfg.center {
            ThetaCenter::Class => theta_class(&class, &budget)?,
            ThetaCenter::AllZero => {
                let c = class.all_zero_member().ok_or(Error::EmptySet(
                    "class has no all-zero member for the all_zero center",
                ))?;
                theta_of(&class, c, &budget)?.theta_h
            }
        };
        rows.push(ThetaRow {
            class_kind: kind_name,
            n: ds.n(),
            d,
            dim: cfg.dim,
            theta,
        });
    }
    Ok(rows)
}

pub fn run_label_complexity(cfg: &LabelComplexityConfig, master_seed: u64) -> Result<Vec<ComplexityRow>> {
    let mut ns = cfg.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    ns.iter()
        .enumerate()
        .map(|(ni, &n)| {
            let ds = make_sorted1d_range(n)?;
            let results: Vec<(bool, u64)> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = trial_seed(master_seed, ni as u64, t as u64);
                    let h_star = (splitmix64(seed ^ 2) % (n as u64 + 1)) as usize;
                    let run_cfg = RunConfig {
                        epsilon: cfg.epsilon,
                        delta: cfg.delta,
                        c1: cfg.c1,
                        b1: cfg.b1,
                        c2: cfg.c2,
                        b2: cfg.b2,
                        theta_mode: ThetaMode::BruteForce,
                        seed: splitmix64(seed ^ 3),
                        clamp_to_population: true,
                    };
                    stump_trial(&ds, cfg.noise, &run_cfg, h_star, splitmix64(seed ^ 1))
                })
                .collect::<Result<_>>()?;
            let mut queries: Vec<u64> = results.iter().map(|r| r.1).collect();
            queries.sort_unstable();
            let median = queries[(queries.len() - 1) / 2];
            let p90 = queries[((queries.len() as f64 * 0.9).ceil() as usize - 1).min(queries.len() - 1)];
            let successes = results.iter().filter(|r| r.0).count();
            Ok(ComplexityRow {
                n,
                median_queries: median,
                p90_queries: p90,
                success_rate: successes as f64 / cfg.trials as f64,
            })
        })
        .collect()
}

/// Run manifest written alongside every CSV.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub experiment: String,
    pub config: serde_json::Value,
    pub seed: u64,
    pub wall_time_secs: f64,
    pub version: String,
}

fn guard_output(path: &Path, overwrite: bool) -> Result<()> {
    if path.exists() && !overwrite {
        return Err(Error::OutputExists(path.display().to_string()));
    }
    Ok(())
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut p = out.as_os_str().to_owned();
    p.push(".manifest.json");
    PathBuf::from(p)
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Top-level driver: dispatch, write the CSV table and the JSON manifest.
/// `seed_override` (the CLI --seed) replaces the config's master_seed.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    seed_override: Option<u64>,
    out: &Path,
    jobs: Option<usize>,
    overwrite: bool,
) -> Result<()> {
    cfg.validate()?;
    let mpath = manifest_path(out);
    guard_output(out, overwrite)?;
    guard_output(&mpath, overwrite)?;

    let seed = seed_override.unwrap_or(match cfg {
        ExperimentConfig::SuccessGrid(c) => c.master_seed,
        ExperimentConfig::ThetaScaling(_) => 0,
        ExperimentConfig::LabelComplexity(c) => c.master_seed,
    });

    let start = Instant::now();
    let body = || -> Result<()> {
        match cfg {
            ExperimentConfig::SuccessGrid(c) => write_rows(out, &run_success_grid(c, seed)?),
            ExperimentConfig::ThetaScaling(c) => write_rows(out, &run_theta_scaling(c)?),
            ExperimentConfig::LabelComplexity(c) => {
                write_rows(out, &run_label_complexity(c, seed)?)
            }
        }
    };
    match jobs {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(body)?,
        None => body()?,
    }

    let manifest = RunManifest {
        experiment: cfg.name().to_string(),
        config: serde_json::to_value(cfg)?,
        seed,
        wall_time_secs: start.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    std::fs::write(&mpath, serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid_cfg() -> SuccessGridConfig {
        SuccessGridConfig {
            n: 512,
            noise: 0.1,
            epsilon: 0.1,
            delta: 0.1,
            trials: 10,
            c1_values: vec![3.0],
            b1_values: vec![3.0],
            c2_values: vec![3.0],
            b2_values: vec![3.0],
            master_seed: 7,
            fixed_dataset: false,
            h_star: None,
        }
    }

    #[test]
    fn grid_cell_invariants() {
        let cells = run_success_grid(&small_grid_cfg(), 7).unwrap();
        assert_eq!(cells.len(), 1);
        let c = &cells[0];
        assert!(c.successes <= c.trials);
        assert!((c.success_rate - c.successes as f64 / c.trials as f64).abs() < 1e-12);
        assert!(c.mean_queries > 0.0);
    }

    #[test]
    fn single_noiseless_trial_succeeds() {
        let mut cfg = small_grid_cfg();
        cfg.noise = 0.0;
        cfg.trials = 1;
        let cells = run_success_grid(&cfg, 1).unwrap();
        assert_eq!(cells[0].success_rate, 1.0);
    }

    #[test]
    fn deterministic_csv_bytes() {
        let cfg = small_grid_cfg();
        let render = || {
            let cells = run_success_grid(&cfg, 42).unwrap();
            let mut w = csv::Writer::from_writer(Vec::new());
            for c in &cells {
                w.serialize(c).unwrap();
            }
            w.into_inner().unwrap()
        };
        assert_eq!(render(), render());
    }

    #[test]
    fn trial_seeds_have_no_collisions() {
        let mut seen = std::collections::HashSet::new();
        for master in 0..8u64 {
            for cell in 0..8 {
                for t in 0..8 {
                    assert!(seen.insert(trial_seed(master, cell, t)));
                }
            }
        }
    }

    #[test]
    fn theta_scaling_diagonal_rows() {
        let cfg = ThetaScalingConfig {
            dataset: DatasetKind::Diagonal,
            dim: 2,
            n_values: vec![4, 6],
            class: ScalingClass::Tree {
                depth: 2,
                unique_dims: true,
            },
            center: ThetaCenter::AllZero,
            max_members: default_max_members(),
            max_points: default_max_points(),
        };
        for row in run_theta_scaling(&cfg).unwrap() {
            assert!(row.theta >= row.n as f64, "theta {} < n {}", row.theta, row.n);
        }
    }

    #[test]
    fn label_complexity_rows_sorted_and_sane() {
        let cfg = LabelComplexityConfig {
            n_values: vec![1024, 256],
            noise: 0.1,
            epsilon: 0.1,
            delta: 0.1,
            trials: 8,
            c1: 3.0,
            b1: 3.0,
            c2: 3.0,
            b2: 3.0,
            master_seed: 3,
        };
        let rows = run_label_complexity(&cfg, 3).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].n < rows[1].n);
        for r in &rows {
            assert!(r.median_queries <= r.p90_queries);
            assert!(r.success_rate >= 0.0 && r.success_rate <= 1.0);
        }
    }

    #[test]
    fn config_json_round_trip() {
        let json = r#"{
            "experiment": "success_grid",
            "noise": 0.1, "epsilon": 0.1, "delta": 0.1,
            "trials": 2, "n": 64,
            "c1_values": [3], "b1_values": [3], "c2_values": [3], "b2_values": [3]
        }"#;
        let cfg = ExperimentConfig::from_json(json).unwrap();
        assert_eq!(cfg.name(), "success_grid");
        let back = serde_json::to_string(&cfg).unwrap();
        let again = ExperimentConfig::from_json(&back).unwrap();
        assert_eq!(again.name(), "success_grid");
    }

    #[test]
    fn overwrite_guard() {
        let dir = std::env::temp_dir().join("gridactive_test_guard");
        std::fs::create_dir_all(&dir).unwrap();
        let out = dir.join("out.csv");
        std::fs::write(&out, "existing").unwrap();
        let mut cfg = small_grid_cfg();
        cfg.trials = 1;
        cfg.n = 32;
        let cfg = ExperimentConfig::SuccessGrid(cfg);
        let err = run_experiment(&cfg, Some(0), &out, None, false).unwrap_err();
        assert!(matches!(err, Error::OutputExists(_)));
        run_experiment(&cfg, Some(0), &out, None, true).unwrap();
        assert!(manifest_path(&out).exists());
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
