//! Estimating the correlation time from one snapshot of a correlated pair.
//!
//! Both estimators compare the normalised sizes of the largest pendent
//! subtrees of the two centroids. For matched rank `k`,
//!
//! ```text
//! Y(k) = (X1(k) - X2(k))^2 / (2 X1(k) (1 - X1(k)))
//! ```
//!
//! concentrates around `1 / t_star`. The coarse estimate inverts `Y(1)`; the
//! fine estimate inverts the running mean of `Y(1..=K)` with
//! `K = floor(-c ln Y(1))`, clamped to the ranks available in both trees.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::RngSpec;
use crate::stats::{centroid, ranked_pendent_subtrees};
use crate::tree::{grow_correlated, GrowingTree, GrowthRule, SeedTree, TreeError};

pub const DEFAULT_RANK_CONSTANT: f64 = 1.0 / 400.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("largest pendent subtrees have identical sizes; the gap statistic is zero")]
    DegenerateZeroGap,
    #[error("rank {0} has a zero denominator")]
    DegenerateRank(usize),
    #[error("trees have different sizes ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("estimation needs at least 3 vertices, got {0}")]
    TooSmall(usize),
    #[error("estimators are defined for the two-vertex seed; got a {0}-vertex seed (override to proceed)")]
    UnsupportedSeed(usize),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

impl EstimateError {
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            EstimateError::DegenerateZeroGap | EstimateError::DegenerateRank(_)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Multiplier `c` in `K = floor(-c ln Y)`.
    pub k_constant: f64,
    /// Accept seeds other than the two-vertex tree.
    pub allow_any_seed: bool,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            k_constant: DEFAULT_RANK_CONSTANT,
            allow_any_seed: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoarseEstimate {
    pub x1: f64,
    pub x2: f64,
    pub y: f64,
    pub t_hat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub n: usize,
    pub rule: GrowthRule,
    /// `X1(k)` for `k = 1..=k_used`.
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub y: Vec<f64>,
    pub y1: f64,
    /// `floor(-c ln Y(1))` before clamping; may be zero or negative.
    pub k_raw: i64,
    pub k_used: usize,
    /// Mean of `y[..k_used]`.
    pub s_k: f64,
    pub t_hat_coarse: f64,
    pub t_hat_fine: f64,
}

/// `Y` for one matched rank.
pub fn gap_ratio(x1: f64, x2: f64) -> Option<f64> {
    let denom = 2.0 * x1 * (1.0 - x1);
    (denom > 0.0).then(|| (x1 - x2).powi(2) / denom)
}

/// `floor(-c * log_y)`, taking `ln Y` so that tiny `Y` need not be representable.
pub fn rank_count_from_log(log_y: f64, k_constant: f64) -> i64 {
    (-k_constant * log_y).floor() as i64
}

/// `floor(ln(t_star) / 384)`, the rank count the analysis targets.
pub fn reference_rank_count(t_star: usize) -> i64 {
    ((t_star as f64).ln() / 384.0).floor() as i64
}

fn check_inputs(t1: &GrowingTree, t2: &GrowingTree, config: &EstimatorConfig) -> Result<usize, EstimateError> {
    if t1.n() != t2.n() {
        return Err(EstimateError::SizeMismatch(t1.n(), t2.n()));
    }
    if t1.n() < 3 {
        return Err(EstimateError::TooSmall(t1.n()));
    }
    for t in [t1, t2] {
        if !config.allow_any_seed && t.seed_size() != 2 {
            return Err(EstimateError::UnsupportedSeed(t.seed_size()));
        }
    }
    Ok(t1.n())
}

pub fn coarse_estimate(
    t1: &GrowingTree,
    t2: &GrowingTree,
    config: &EstimatorConfig,
) -> Result<CoarseEstimate, EstimateError> {
    let n = check_inputs(t1, t2, config)? as f64;
    let x1 = centroid(t1).psi as f64 / n;
    let x2 = centroid(t2).psi as f64 / n;
    let y = gap_ratio(x1, x2).ok_or(EstimateError::DegenerateRank(1))?;
    if y == 0.0 {
        return Err(EstimateError::DegenerateZeroGap);
    }
    Ok(CoarseEstimate {
        x1,
        x2,
        y,
        t_hat: 1.0 / y,
    })
}

pub fn fine_estimate(
    t1: &GrowingTree,
    t2: &GrowingTree,
    config: &EstimatorConfig,
) -> Result<EstimatorReport, EstimateError> {
    let n = check_inputs(t1, t2, config)?;
    let ranks1 = ranked_pendent_subtrees(t1);
    let ranks2 = ranked_pendent_subtrees(t2);
    let max_rank = ranks1.len().min(ranks2.len());
    let nf = n as f64;
    let fraction = |size: usize| size as f64 / nf;

    let y1 = gap_ratio(fraction(ranks1[0].size), fraction(ranks2[0].size))
        .ok_or(EstimateError::DegenerateRank(1))?;
    if y1 == 0.0 {
        return Err(EstimateError::DegenerateZeroGap);
    }
    let k_raw = rank_count_from_log(y1.ln(), config.k_constant);
    let k_used = (k_raw.max(1) as usize).min(max_rank);

    let mut x1 = Vec::with_capacity(k_used);
    let mut x2 = Vec::with_capacity(k_used);
    let mut y = Vec::with_capacity(k_used);
    for (rank, (a, b)) in ranks1.iter().zip(&ranks2).take(k_used).enumerate() {
        let (f1, f2) = (fraction(a.size), fraction(b.size));
        x1.push(f1);
        x2.push(f2);
        y.push(gap_ratio(f1, f2).ok_or(EstimateError::DegenerateRank(rank + 1))?);
    }
    let s_k = y.iter().sum::<f64>() / k_used as f64;
    Ok(EstimatorReport {
        n,
        rule: t1.rule(),
        x1,
        x2,
        y,
        y1,
        k_raw,
        k_used,
        s_k,
        t_hat_coarse: 1.0 / y1,
        t_hat_fine: 1.0 / s_k,
    })
}

/// Quantiles of a relative-error sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorQuantiles {
    pub count: usize,
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
}

impl ErrorQuantiles {
    pub fn from_values(mut values: Vec<f64>) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        values.sort_by(f64::total_cmp);
        Some(ErrorQuantiles {
            count: values.len(),
            q10: quantile_sorted(&values, 0.1),
            median: quantile_sorted(&values, 0.5),
            q90: quantile_sorted(&values, 0.9),
        })
    }
}

/// Linear-interpolation quantile of a sorted, nonempty sample.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub trials: usize,
    pub degenerate: usize,
    /// `|t_hat - t_star| / t_star` over non-degenerate trials.
    pub coarse: Option<ErrorQuantiles>,
    pub fine: Option<ErrorQuantiles>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchEstimate {
    pub t_star: usize,
    pub reports: Vec<Result<EstimatorReport, EstimateError>>,
    pub summary: BatchSummary,
}

impl BatchEstimate {
    pub fn successful(&self) -> impl Iterator<Item = &EstimatorReport> {
        self.reports.iter().filter_map(|r| r.as_ref().ok())
    }
}

/// Run [`fine_estimate`] on `trials` independent correlated pairs; trial `i`
/// uses `rng.substream(i)`.
#[allow(clippy::too_many_arguments)]
pub fn batch_estimate(
    seed: &SeedTree,
    rule: GrowthRule,
    n: usize,
    t_star: usize,
    trials: usize,
    rng: &RngSpec,
    config: &EstimatorConfig,
) -> Result<BatchEstimate, EstimateError> {
    if !config.allow_any_seed && seed.size() != 2 {
        return Err(EstimateError::UnsupportedSeed(seed.size()));
    }
    let reports: Vec<Result<EstimatorReport, EstimateError>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let pair = grow_correlated(seed, rule, n, t_star, &rng.substream(i as u64))?;
            fine_estimate(&pair.first, &pair.second, config)
        })
        .collect();
    if let Some(Err(e)) = reports.iter().find(|r| matches!(r, Err(e) if !e.is_degenerate())) {
        return Err(e.clone());
    }
    let t = t_star as f64;
    let rel = |x: f64| (x - t).abs() / t;
    let ok: Vec<&EstimatorReport> = reports.iter().filter_map(|r| r.as_ref().ok()).collect();
    let summary = BatchSummary {
        trials,
        degenerate: trials - ok.len(),
        coarse: ErrorQuantiles::from_values(ok.iter().map(|r| rel(r.t_hat_coarse)).collect()),
        fine: ErrorQuantiles::from_values(ok.iter().map(|r| rel(r.t_hat_fine)).collect()),
    };
    Ok(BatchEstimate {
        t_star,
        reports,
        summary,
    })
}
