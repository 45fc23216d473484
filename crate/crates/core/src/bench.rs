//! Random-state benchmark of the kurtosis estimation strategy: how often do
//! the kurtosis-extremal directions recover the true N_KL maximizer, and how
//! much of the measure do they capture?
//!
//! For each draw the discrepancy Δ = min(|φ_Jmax − φ_Kmax|, |φ_Jmax −
//! φ_Kmin|) (circular, phases mod π) and the ratio R = max(J_Kmax,
//! J_Kmin)/N_KL are recorded. Draw seeds are derived per index from the
//! master seed, so results are independent of evaluation order.

use serde::Serialize;

use crate::error::Result;
use crate::measures::{kurtosis_strategy, n_kl, OptimizerOptions};
use crate::rng::SplitMix64;
use crate::states::{random_mixed, random_pure};

/// Width of the Δ histogram bins.
pub const DELTA_BIN: f64 = std::f64::consts::PI / 50.0;
/// Δ below which a draw counts toward the headline share.
pub const DELTA_SHARE_CUT: f64 = std::f64::consts::PI / 100.0;
/// Δ below which the kurtosis candidate is called an exact hit.
pub const EXACT_HIT_CUT: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct BenchConfig {
    pub n_max: usize,
    pub samples: usize,
    pub seed: u64,
    pub mixed: bool,
    /// Also evaluate the variance-extremal candidate directions.
    pub variance_augmented: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchResult {
    pub config: BenchConfig,
    pub mean_ratio: f64,
    pub share_ratio_above_095: f64,
    pub share_delta_below_cut: f64,
    pub share_exact_candidate_hits: f64,
    /// Mean of the ratio with variance candidates included, when requested.
    pub mean_ratio_augmented: Option<f64>,
    /// Counts per Δ bin of width π/50 on [0, π/2].
    pub delta_histogram: Vec<usize>,
    /// Counts per R bin of width 0.02 on [0, 1].
    pub ratio_histogram: Vec<usize>,
}

/// Circular distance between phases identified mod π.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::PI);
    d.min(std::f64::consts::PI - d)
}

/// Run the benchmark. Deterministic for a fixed config.
pub fn random_bench(config: &BenchConfig, opts: &OptimizerOptions) -> Result<BenchResult> {
    let mut sum_ratio = 0.0;
    let mut sum_ratio_aug = 0.0;
    let mut above = 0usize;
    let mut below_cut = 0usize;
    let mut exact = 0usize;
    let mut delta_hist = vec![0usize; 25];
    let mut ratio_hist = vec![0usize; 50];

    for i in 0..config.samples {
        let seed = SplitMix64::stream(config.seed, i as u64).next_u64();
        let state = if config.mixed {
            random_mixed(config.n_max, seed)?
        } else {
            random_pure(config.n_max, seed)?
        };
        let truth = n_kl(&state, opts)?;
        let est = kurtosis_strategy(&state, config.variance_augmented, opts)?;

        let phi_j = truth.direction.phis()[0];
        let delta = if truth.value < 1e-12 {
            0.0
        } else {
            phase_distance(phi_j, est.phi_kmax).min(phase_distance(phi_j, est.phi_kmin))
        };
        let ratio = if truth.value < 1e-12 {
            1.0
        } else {
            (est.estimate / truth.value).min(1.0)
        };
        sum_ratio += ratio;
        if ratio > 0.95 {
            above += 1;
        }
        if delta < DELTA_SHARE_CUT {
            below_cut += 1;
        }
        if delta < EXACT_HIT_CUT {
            exact += 1;
        }
        let db = ((delta / DELTA_BIN) as usize).min(delta_hist.len() - 1);
        delta_hist[db] += 1;
        let rb = ((ratio / 0.02) as usize).min(ratio_hist.len() - 1);
        ratio_hist[rb] += 1;

        if config.variance_augmented {
            let aug = est
                .variance_candidates
                .as_ref()
                .map(|v| v.estimate)
                .unwrap_or(est.estimate);
            let r = if truth.value < 1e-12 {
                1.0
            } else {
                (aug / truth.value).min(1.0)
            };
            sum_ratio_aug += r;
        }
    }

    let n = config.samples as f64;
    Ok(BenchResult {
        config: config.clone(),
        mean_ratio: sum_ratio / n,
        share_ratio_above_095: above as f64 / n,
        share_delta_below_cut: below_cut as f64 / n,
        share_exact_candidate_hits: exact as f64 / n,
        mean_ratio_augmented: config.variance_augmented.then_some(sum_ratio_aug / n),
        delta_histogram: delta_hist,
        ratio_histogram: ratio_hist,
    })
}
