//! VC dimensions, uniform-convergence sample sizes, and LB/UB confidence
//! intervals.
//!
//! Two sample-size shapes are in play. The generic uniform-convergence size
//! is (64/eps^2)(2 V ln(12/eps) + ln(4/delta)) for a two-sided deviation of
//! eps. The interval machinery uses the specialized shape
//! (256/eps^2)(2 V ln(24/eps) + ln(4/delta)), whose half-width is eps/2 so
//! the LB/UB interval has width exactly eps; given an actual sample size m
//! we invert that relation numerically to get the achievable width.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassComplexity {
    Stump,
    Tree { depth: usize, dim: usize },
}

/// VC dimension: 1 for stumps, ceil(10 * 2^d * (d + log2 dim)) for trees
/// of height at most d over dim >= 2 feature dimensions.
pub fn vc_dimension(kind: ClassComplexity) -> Result<u32> {
    match kind {
        ClassComplexity::Stump => Ok(1),
        ClassComplexity::Tree { depth, dim } => {
            if dim < 2 {
                return Err(Error::InvalidParameter(format!(
                    "tree VC bound requires dim >= 2, got {dim}"
                )));
            }
            let v = 10.0 * (1u64 << depth) as f64 * (depth as f64 + (dim as f64).log2());
            Ok(v.ceil() as u32)
        }
    }
}

fn check_eps_delta(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon {epsilon} outside (0, 1]"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta {delta} outside (0, 1)"
        )));
    }
    Ok(())
}

/// Uniform-convergence sample size m(eps, delta, vc), rounded up.
pub fn sample_size(epsilon: f64, delta: f64, vc: u32) -> Result<u64> {
    check_eps_delta(epsilon, delta)?;
    let m = 64.0 / (epsilon * epsilon)
        * (2.0 * vc as f64 * (12.0 / epsilon).ln() + (4.0 / delta).ln());
    Ok(m.ceil() as u64)
}

/// Sample size delivering an LB/UB interval of width exactly `width`
/// (specialized shape; half-width width/2).
pub fn width_sample_size(width: f64, delta: f64, vc: u32) -> Result<f64> {
    check_eps_delta(width, delta)?;
    Ok(256.0 / (width * width)
        * (2.0 * vc as f64 * (24.0 / width).ln() + (4.0 / delta).ln()))
}

/// The interval width achievable with `m` samples at confidence 1 - delta:
/// the smallest eps in (0, 1] with width_sample_size(eps) <= m, saturating
/// at 1 when even that is out of reach. Bisection; the relation is strictly
/// monotone in eps.
pub fn achievable_width(m: u64, delta: f64, vc: u32) -> Result<f64> {
    if m == 0 {
        return Ok(1.0);
    }
    if width_sample_size(1.0, delta, vc)? > m as f64 {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64); // width_sample_size(hi) <= m
    while (hi - lo) / hi > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if width_sample_size(mid, delta, vc)? <= m as f64 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundPair {
    pub lb: f64,
    pub ub: f64,
    pub width: f64,
    pub confidence: f64,
    pub sample_size: u64,
}

impl BoundPair {
    /// Census interval: the empirical error is the exact population error.
    pub fn exact(empirical_err: f64, m: u64) -> BoundPair {
        BoundPair {
            lb: empirical_err,
            ub: empirical_err,
            width: 0.0,
            confidence: 1.0,
            sample_size: m,
        }
    }
}

/// LB/UB from an empirical error and the width achievable at (m, delta, vc),
/// clamped into [0, 1].
pub fn bound_pair(empirical_err: f64, m: u64, delta: f64, vc: u32) -> Result<BoundPair> {
    if !(0.0..=1.0).contains(&empirical_err) {
        return Err(Error::InvalidParameter(format!(
            "empirical error {empirical_err} outside [0, 1]"
        )));
    }
    if m < 1 {
        return Err(Error::InvalidParameter("bound_pair requires m >= 1".into()));
    }
    let width = achievable_width(m, delta, vc)?;
    Ok(BoundPair {
        lb: (empirical_err - width / 2.0).max(0.0),
        ub: (empirical_err + width / 2.0).min(1.0),
        width,
        confidence: 1.0 - delta,
        sample_size: m,
    })
}
