//! Discrete datasets: integer grids, diagonals, sorted one-dimensional point
//! sets, plus noisy label sources hidden behind a query-counting oracle.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::distributions::{Bernoulli, Distribution};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypotheses::Hypothesis;
use crate::labeling::Labeling;

/// Default cap on the number of points a constructor may materialize.
pub const DEFAULT_POINT_BUDGET: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Grid,
    Diagonal,
    Sorted1d,
}

/// A fixed, ordered universe of points with integer-like coordinates.
///
/// Coordinates are stored as `f64` so the sorted 1-D variant can hold real
/// values; grid and diagonal constructors only ever produce integers in
/// `1..=w`.
#[derive(Debug, Clone)]
pub struct GridDataset {
    kind: DatasetKind,
    coords: Vec<f64>,
    dim: usize,
    w: usize,
    n: usize,
}

impl GridDataset {
    pub fn kind(&self) -> DatasetKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coordinates of the point at 0-based position `i`.
    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Distinct coordinate values along `dim` among `idxs`, ascending.
    pub fn distinct_values(&self, dim: usize, idxs: &[usize]) -> Vec<f64> {
        let mut vals: Vec<f64> = idxs.iter().map(|&i| self.point(i)[dim]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        vals
    }
}

/// The full integer grid {1..w}^dim in lexicographic order.
pub fn make_grid(w: usize, dim: usize) -> Result<GridDataset> {
    make_grid_with_budget(w, dim, DEFAULT_POINT_BUDGET)
}

pub fn make_grid_with_budget(w: usize, dim: usize, budget: usize) -> Result<GridDataset> {
    if w < 1 || dim < 1 {
        return Err(Error::InvalidParameter(format!(
            "make_grid requires w >= 1 and dim >= 1, got w={w}, dim={dim}"
        )));
    }
    let n = w
        .checked_pow(dim as u32)
        .filter(|&n| n <= budget)
        .ok_or_else(|| Error::BudgetExceeded(format!("w^dim = {w}^{dim} exceeds cap {budget}")))?;
    let mut coords = Vec::with_capacity(n * dim);
    let mut cell = vec![1usize; dim];
    loop {
        coords.extend(cell.iter().map(|&c| c as f64));
        // lexicographic increment, last axis fastest
        let mut axis = dim;
        loop {
            if axis == 0 {
                debug_assert_eq!(coords.len(), n * dim);
                return Ok(GridDataset {
                    kind: DatasetKind::Grid,
                    coords,
                    dim,
                    w,
                    n,
                });
            }
            axis -= 1;
            if cell[axis] < w {
                cell[axis] += 1;
                cell[axis + 1..].fill(1);
                break;
            }
        }
    }
}

/// Points X_i = (i, i, ..., i) for i = 1..n, with w = n.
pub fn make_diagonal(n: usize, dim: usize) -> Result<GridDataset> {
    if n < 1 || dim < 1 {
        return Err(Error::InvalidParameter(format!(
            "make_diagonal requires n >= 1 and dim >= 1, got n={n}, dim={dim}"
        )));
    }
    if n.checked_mul(dim).is_none_or(|t| t > DEFAULT_POINT_BUDGET * 4) {
        return Err(Error::BudgetExceeded(format!("diagonal n*dim = {n}*{dim}")));
    }
    let mut coords = Vec::with_capacity(n * dim);
    for i in 1..=n {
        coords.extend(std::iter::repeat(i as f64).take(dim));
    }
    Ok(GridDataset {
        kind: DatasetKind::Diagonal,
        coords,
        dim,
        w: n,
        n,
    })
}

/// A strictly increasing 1-D point set. Duplicates are rejected.
pub fn make_sorted1d(values: Vec<f64>) -> Result<GridDataset> {
    if values.is_empty() {
        return Err(Error::EmptySet("sorted 1-D dataset"));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "sorted 1-D dataset requires strictly increasing values".into(),
        ));
    }
    let n = values.len();
    Ok(GridDataset {
        kind: DatasetKind::Sorted1d,
        coords: values,
        dim: 1,
        w: n,
        n,
    })
}

/// Convenience: the 1-D grid 1..=n as a sorted dataset.
pub fn make_sorted1d_range(n: usize) -> Result<GridDataset> {
    make_sorted1d((1..=n).map(|i| i as f64).collect())
}

/// Ground-truth labels realized once at construction: the generating
/// hypothesis's output xor-ed with independent Bernoulli(noise) flips.
/// Labels are only visible through [`LabelSource::query`], which charges one
/// query per call (or one per distinct index when caching is enabled).
#[derive(Debug)]
pub struct LabelSource {
    labels: Labeling,
    noise: f64,
    seed: u64,
    query_count: AtomicU64,
    cache_queries: bool,
    charged: Vec<AtomicU64>,
}

impl LabelSource {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Charge once per distinct index instead of once per call.
    pub fn with_cached_queries(mut self) -> Self {
        self.cache_queries = true;
        self.charged = (0..self.labels.len().div_ceil(64))
            .map(|_| AtomicU64::new(0))
            .collect();
        self
    }

    /// The realized label at 0-based `index`, charging the query counter.
    pub fn query(&self, index: usize) -> Result<bool> {
        if index >= self.labels.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.labels.len(),
            });
        }
        if self.cache_queries {
            let prev = self.charged[index / 64].fetch_or(1 << (index % 64), Ordering::Relaxed);
            if prev >> (index % 64) & 1 == 0 {
                self.query_count.fetch_add(1, Ordering::Relaxed);
            }
        } else {
            self.query_count.fetch_add(1, Ordering::Relaxed);
        }
        Ok(self.labels.get(index))
    }

    pub fn query_count(&self) -> u64 {
        self.query_count.load(Ordering::Relaxed)
    }

    /// Full label vector, bypassing the oracle. For verification only; does
    /// not touch the query counter.
    pub fn labels_unchecked(&self) -> &Labeling {
        &self.labels
    }
}

pub fn make_label_source(
    dataset: &GridDataset,
    h_star: &Hypothesis,
    noise: f64,
    seed: u64,
) -> Result<LabelSource> {
    if !(0.0..=1.0).contains(&noise) {
        return Err(Error::InvalidParameter(format!(
            "noise rate {noise} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let flip = Bernoulli::new(noise).expect("noise validated");
    let mut labels = Labeling::zeros(dataset.n());
    for i in 0..dataset.n() {
        let clean = h_star.eval(dataset, dataset.point(i))?;
        labels.set(i, clean ^ flip.sample(&mut rng));
    }
    Ok(LabelSource {
        labels,
        noise,
        seed,
        query_count: AtomicU64::new(0),
        cache_queries: false,
        charged: Vec::new(),
    })
}

/// A uniformly random subset of `indices` of size min(a, |indices|), sorted
/// ascending. Deterministic given the generator state.
pub fn sample_without_replacement<R: Rng>(indices: &[usize], a: usize, rng: &mut R) -> Vec<usize> {
    let k = a.min(indices.len());
    let mut picked: Vec<usize> = rand::seq::index::sample(rng, indices.len(), k)
        .into_iter()
        .map(|j| indices[j])
        .collect();
    picked.sort_unstable();
    picked
}

/// Per-point weights W_i in [1, lambda] over a base dataset.
#[derive(Debug, Clone)]
pub struct WeightedDataset {
    base_n: usize,
    weights: Vec<f64>,
    lambda: f64,
}

impl WeightedDataset {
    pub fn new(base: &GridDataset, weights: Vec<f64>, lambda: f64) -> Result<Self> {
        if lambda < 1.0 {
            return Err(Error::InvalidParameter(format!("lambda {lambda} < 1")));
        }
        if weights.len() != base.n() {
            return Err(Error::DimensionMismatch {
                expected: base.n(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|&w| !(1.0..=lambda).contains(&w)) {
            return Err(Error::InvalidParameter(format!(
                "weights must lie in [1, {lambda}]"
            )));
        }
        Ok(WeightedDataset {
            base_n: base.n(),
            weights,
            lambda,
        })
    }

    pub fn n(&self) -> usize {
        self.base_n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Serializable description of a dataset + labeling instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetDescriptor {
    pub kind: DatasetKind,
    pub w: usize,
    pub dim: usize,
    pub n: usize,
    pub seed: u64,
    pub noise: f64,
    pub h_star: Hypothesis,
}
