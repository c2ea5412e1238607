//! Disagreement regions, hypothesis balls, radii, and exact brute-force
//! disagreement coefficients (weighted and unweighted).
//!
//! All quantities are computed on labeling vectors. The disagreement region
//! of a set V is computed through the single-reference form
//! {x : exists h' in V with h'(x) != h(x)} for an arbitrary member h, which
//! coincides with the pairwise definition whenever the reference belongs
//! to V; the pairwise form lives in the test suite as an oracle.

use rayon::prelude::*;
use serde::Serialize;

use crate::dataset::WeightedDataset;
use crate::error::{Error, Result};
use crate::hypotheses::HypothesisClass;
use crate::labeling::Labeling;

/// Caps for brute-force coefficient computation.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub max_members: usize,
    pub max_points: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_members: 200_000,
            max_points: 4_096,
        }
    }
}

impl Budget {
    pub fn check(&self, class: &HypothesisClass) -> Result<()> {
        if class.len() > self.max_members {
            return Err(Error::BudgetExceeded(format!(
                "{} members exceeds brute-force cap {}",
                class.len(),
                self.max_members
            )));
        }
        if class.n() > self.max_points {
            return Err(Error::BudgetExceeded(format!(
                "{} points exceeds brute-force cap {}",
                class.n(),
                self.max_points
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RadiusRow {
    pub r: f64,
    pub ball_size: usize,
    pub dis_size: usize,
    pub ratio: f64,
}

/// Per-center disagreement-coefficient report: the ratio |DIS(B(h,r))|/(rn)
/// evaluated at every radius level r = k/n, and its maximum theta_h.
#[derive(Debug, Clone, Serialize)]
pub struct DisagreementReport {
    pub center: usize,
    pub per_radius: Vec<RadiusRow>,
    pub theta_h: f64,
    pub argmax_r: f64,
}

impl DisagreementReport {
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["r", "ball_size", "dis_size", "ratio"])?;
        for row in &self.per_radius {
            wtr.write_record([
                format!("{}", row.r),
                row.ball_size.to_string(),
                row.dis_size.to_string(),
                format!("{}", row.ratio),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Points of `s` (0-based positions) where some pair of hypotheses in `v`
/// (member indices into `class`) disagree.
pub fn dis_region(class: &HypothesisClass, v: &[usize], s: &[usize]) -> Result<Vec<usize>> {
    if v.is_empty() {
        return Err(Error::EmptySet("dis_region of empty hypothesis set"));
    }
    let reference = class.labeling(v[0]);
    let mut acc = vec![0u64; reference.words().len()];
    for &m in &v[1..] {
        class.labeling(m).accumulate_xor(reference, &mut acc);
    }
    Ok(s
        .iter()
        .copied()
        .filter(|&i| acc[i / 64] >> (i % 64) & 1 == 1)
        .collect())
}

/// Member indices within distance `r` of `center` over the full dataset.
pub fn ball(class: &HypothesisClass, center: &Labeling, r: f64) -> Vec<usize> {
    let n = class.n() as f64;
    (0..class.len())
        .filter(|&m| class.labeling(m).xor_count(center) as f64 / n <= r + 1e-12)
        .collect()
}

/// Radius of the smallest ball centered at a member of `hset` that contains
/// all of `hset`: min over centers of the max distance.
pub fn radius(class: &HypothesisClass, hset: &[usize]) -> Result<f64> {
    if hset.is_empty() {
        return Err(Error::EmptySet("radius of empty hypothesis set"));
    }
    let n = class.n() as f64;
    let best = hset
        .iter()
        .map(|&c| {
            hset.iter()
                .map(|&m| class.labeling(m).xor_count(class.labeling(c)))
                .max()
                .unwrap_or(0)
        })
        .min()
        .unwrap_or(0);
    Ok(best as f64 / n)
}

/// Exact theta_h for the member at `center_idx`, with the full per-radius
/// table. The supremum over r > 0 is attained at a level k/n because the
/// ball is constant between consecutive attained distances.
pub fn theta_of(
    class: &HypothesisClass,
    center_idx: usize,
    budget: &Budget,
) -> Result<DisagreementReport> {
    budget.check(class)?;
    let n = class.n();
    let center = class.labeling(center_idx);

    // distance (in point counts) from the center to every member
    let mut by_dist: Vec<(usize, usize)> = (0..class.len())
        .map(|m| (class.labeling(m).xor_count(center), m))
        .collect();
    by_dist.sort_unstable();

    // sweep radii k = 1..n, growing the ball and or-ing disagreements in
    let mut acc = vec![0u64; center.words().len()];
    let mut dis_at = vec![0usize; n + 1]; // dis size for radius level k
    let mut ball_at = vec![0usize; n + 1];
    let mut pos = 0;
    let mut dis = 0usize;
    let mut in_ball = 0usize;
    for k in 0..=n {
        while pos < by_dist.len() && by_dist[pos].0 <= k {
            dis = class.labeling(by_dist[pos].1).accumulate_xor(center, &mut acc);
            in_ball += 1;
            pos += 1;
        }
        dis_at[k] = dis;
        ball_at[k] = in_ball;
    }

    let mut per_radius = Vec::with_capacity(n);
    let mut theta_h = 0.0f64;
    let mut argmax_r = 0.0f64;
    for k in 1..=n {
        let r = k as f64 / n as f64;
        let ratio = dis_at[k] as f64 / (r * n as f64);
        if ratio > theta_h {
            theta_h = ratio;
            argmax_r = r;
        }
        per_radius.push(RadiusRow {
            r,
            ball_size: ball_at[k],
            dis_size: dis_at[k],
            ratio,
        });
    }
    Ok(DisagreementReport {
        center: center_idx,
        per_radius,
        theta_h,
        argmax_r,
    })
}

/// Lean theta_h (no report rows) used by theta_class.
fn theta_of_value(class: &HypothesisClass, center_idx: usize) -> f64 {
    let n = class.n() as f64;
    let center = class.labeling(center_idx);
    let mut by_dist: Vec<(usize, usize)> = (0..class.len())
        .map(|m| (class.labeling(m).xor_count(center), m))
        .collect();
    by_dist.sort_unstable();
    let mut acc = vec![0u64; center.words().len()];
    let mut theta = 0.0f64;
    let mut pos = 0;
    while pos < by_dist.len() {
        let k = by_dist[pos].0;
        let mut dis = 0;
        while pos < by_dist.len() && by_dist[pos].0 == k {
            dis = class.labeling(by_dist[pos].1).accumulate_xor(center, &mut acc);
            pos += 1;
        }
        if k > 0 {
            theta = theta.max(dis as f64 / k as f64);
        }
        let _ = n;
    }
    theta
}

/// Worst-case coefficient: max over all members of theta_h.
pub fn theta_class(class: &HypothesisClass, budget: &Budget) -> Result<f64> {
    budget.check(class)?;
    if class.is_empty() {
        return Err(Error::EmptySet("theta of empty class"));
    }
    Ok((0..class.len())
        .into_par_iter()
        .map(|c| theta_of_value(class, c))
        .reduce(|| 0.0, f64::max))
}

/// Weight-averaged disagreement fraction between two labelings.
pub fn weighted_distance(l1: &Labeling, l2: &Labeling, w: &WeightedDataset) -> f64 {
    let mut num = 0.0;
    for i in 0..w.n() {
        if l1.get(i) != l2.get(i) {
            num += w.weights()[i];
        }
    }
    num / w.total_weight()
}

/// Weighted theta_h: the Definition-3 analogue with weighted distance and
/// weighted disagreement mass, sup over attained weight-fraction levels.
pub fn weighted_theta(
    class: &HypothesisClass,
    center_idx: usize,
    w: &WeightedDataset,
    budget: &Budget,
) -> Result<f64> {
    budget.check(class)?;
    let center = class.labeling(center_idx);
    let total = w.total_weight();
    let mut by_dist: Vec<(f64, usize)> = (0..class.len())
        .map(|m| (weighted_distance(class.labeling(m), center, w), m))
        .collect();
    by_dist.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut acc = vec![0u64; center.words().len()];
    let mut theta = 0.0f64;
    let mut pos = 0;
    while pos < by_dist.len() {
        let r = by_dist[pos].0;
        while pos < by_dist.len() && by_dist[pos].0 <= r + 1e-12 {
            class.labeling(by_dist[pos].1).accumulate_xor(center, &mut acc);
            pos += 1;
        }
        if r > 1e-12 {
            let mass: f64 = (0..w.n())
                .filter(|&i| acc[i / 64] >> (i % 64) & 1 == 1)
                .map(|i| w.weights()[i])
                .sum();
            theta = theta.max(mass / (r * total));
        }
    }
    Ok(theta)
}
