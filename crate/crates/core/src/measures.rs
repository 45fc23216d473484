//! The non-Gaussianity measures and their cross bounds.
//!
//! - N_KL: maximum negentropy of quadrature distributions over all network
//!   directions (Θ, Φ), located by a coarse angular scan plus derivative-free
//!   refinement (golden section for one mode, Nelder-Mead for two).
//! - The kurtosis estimation strategy: reconstruct the degree-4 trigonometric
//!   moment fields from five fixed phases, evaluate the negentropy only at
//!   the kurtosis extrema (optionally also the variance extrema).
//! - N_QR = S₁(ρ_G) − S₁(ρ) via the symplectic spectrum.
//! - The photon-number lower bound L(ρ) = S₁(ρ_G) − H({⟨n|ρ|n⟩}).
//! - N_HS exactly for one mode, and the bound N_HS ≥ (1 − F_N)²/2 with
//!   F_N = min[1, exp(−N_KL/2 + (N/2)ln(e/2))].
//! - The trace-overlap bound O(ρ)/μ(ρ) ≤ (e/2)^{N/2} exp(−N_QR/2) and the
//!   uncertainty relation √det Γ ≥ h⁻¹(N_KL + S₁).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::gaussian::{
    covariance, covariance_unchecked, h, h_inverse, reference_gaussian_fock,
    symplectic_eigenvalues, von_neumann_entropy,
};
use crate::info::{negentropy_unclipped};
use crate::quadrature::{
    central_moments, reconstruct_moment_field, QuadratureDirection, QuadratureGrid,
    SingleModeEvaluator, TwoModeEvaluator,
};
use crate::states::StateSpec;

/// Angular-search budget and grid resolutions.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizerOptions {
    /// x-grid resolution for refinement and reported values.
    pub grid_points: usize,
    /// x-grid resolution during the coarse angular scan.
    pub coarse_grid_points: usize,
    /// Single-mode: number of phases scanned on [0, π).
    pub coarse_phases: usize,
    /// Two-mode: θ₁ points on [0, π/2].
    pub theta_points: usize,
    /// Two-mode: φ points on [0, 2π) per mode.
    pub phi_points: usize,
    /// Brackets/cells carried into refinement.
    pub refine_candidates: usize,
    /// Angular tolerance of the refinement stage (radians).
    pub refine_tol: f64,
    /// Negative-density tolerance passed to the evaluators.
    pub negativity_tol: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            grid_points: 4096,
            coarse_grid_points: 1024,
            coarse_phases: 180,
            theta_points: 12,
            phi_points: 24,
            refine_candidates: 3,
            refine_tol: 1e-6,
            negativity_tol: 1e-14,
        }
    }
}

impl OptimizerOptions {
    /// The two-mode search refines from more cells (5) at a looser angular
    /// tolerance (1e-5) than the single-mode line search.
    fn two_mode_candidates(&self) -> usize {
        self.refine_candidates.max(5)
    }
}

/// What the optimizer saw on the way to the maximum.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizerDiagnostics {
    /// Best value on the coarse angular grid.
    pub grid_stage_value: f64,
    /// Best refined value (unclipped).
    pub refined_value: f64,
    /// Objective evaluations spent.
    pub iterations: usize,
    /// Whether the two best refined candidates agree within 1e-6
    /// (a degenerate or multimodal landscape).
    pub top_two_agree: bool,
    /// False when a refinement hit its evaluation budget.
    pub converged: bool,
}

/// N_KL together with the maximizing direction.
#[derive(Debug, Clone)]
pub struct NklResult {
    /// max(0, refined maximum) in nats.
    pub value: f64,
    pub direction: QuadratureDirection,
    pub diagnostics: OptimizerDiagnostics,
}

fn scan_grids(state: &FockState, opts: &OptimizerOptions) -> Result<(QuadratureGrid, QuadratureGrid)> {
    let cov = covariance_unchecked(state)?;
    let n2 = 2 * state.modes();
    let sigma_max = {
        // largest eigenvalue of Γ via the complex Jacobi solver (it is tiny)
        let mut m = crate::linalg::CMat::zeros(n2);
        for i in 0..n2 {
            for j in 0..n2 {
                m[(i, j)] = num_complex::Complex64::new(cov.gamma[i * n2 + j], 0.0);
            }
        }
        let evs = crate::linalg::hermitian_eigenvalues(&m)?;
        evs[n2 - 1].max(0.0).sqrt()
    };
    let mean_reach: f64 = cov.means.iter().map(|m| m * m).sum::<f64>().sqrt();
    let half_width = mean_reach + 8.0 * sigma_max.max(1.0);
    Ok((
        QuadratureGrid::new(0.0, half_width, opts.coarse_grid_points)?,
        QuadratureGrid::new(0.0, half_width, opts.grid_points)?,
    ))
}

/// Golden-section maximization of `f` on [a, b] to the given x tolerance.
fn golden_max<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    evals: &mut usize,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    *evals += 2;
    while (b - a) > tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
        *evals += 1;
    }
    Ok(if f1 > f2 { (x1, f1) } else { (x2, f2) })
}

/// Nelder-Mead maximization (reflection/expansion/contraction/shrink) with a
/// simplex-diameter stopping rule.
fn nelder_mead_max<F: FnMut(&[f64]) -> Result<f64>>(
    mut f: F,
    start: &[f64],
    steps: &[f64],
    param_tol: f64,
    max_evals: usize,
    evals: &mut usize,
) -> Result<(Vec<f64>, f64, bool)> {
    let dim = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..dim {
        let mut p = start.to_vec();
        p[i] += steps[i];
        simplex.push(p);
    }
    let mut values = Vec::with_capacity(dim + 1);
    for p in &simplex {
        values.push(f(p)?);
        *evals += 1;
    }
    let mut spent = dim + 1;
    let mut converged = false;
    while spent < max_evals {
        // order descending (maximization)
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap());
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        let diameter = simplex
            .iter()
            .map(|p| {
                p.iter()
                    .zip(simplex[best].iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < param_tol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; dim];
        for &i in order.iter().take(dim) {
            for (c, x) in centroid.iter_mut().zip(simplex[i].iter()) {
                *c += x / dim as f64;
            }
        }
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(simplex[worst].iter())
            .map(|(c, w)| 2.0 * c - w)
            .collect();
        let f_reflect = f(&reflect)?;
        *evals += 1;
        spent += 1;

        if f_reflect > values[best] {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(simplex[worst].iter())
                .map(|(c, w)| 3.0 * c - 2.0 * w)
                .collect();
            let f_expand = f(&expand)?;
            *evals += 1;
            spent += 1;
            if f_expand > f_reflect {
                simplex[worst] = expand;
                values[worst] = f_expand;
            } else {
                simplex[worst] = reflect;
                values[worst] = f_reflect;
            }
            continue;
        }
        if f_reflect > values[second_worst] {
            simplex[worst] = reflect;
            values[worst] = f_reflect;
            continue;
        }
        let contract: Vec<f64> = centroid
            .iter()
            .zip(simplex[worst].iter())
            .map(|(c, w)| 0.5 * (c + w))
            .collect();
        let f_contract = f(&contract)?;
        *evals += 1;
        spent += 1;
        if f_contract > values[worst] {
            simplex[worst] = contract;
            values[worst] = f_contract;
            continue;
        }
        // shrink toward the best vertex
        let anchor = simplex[best].clone();
        for i in 0..=dim {
            if i == best {
                continue;
            }
            for (x, a) in simplex[i].iter_mut().zip(anchor.iter()) {
                *x = 0.5 * (*x + a);
            }
            values[i] = f(&simplex[i])?;
            *evals += 1;
            spent += 1;
        }
    }
    let mut order: Vec<usize> = (0..=dim).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap());
    Ok((simplex[order[0]].clone(), values[order[0]], converged))
}

/// N_KL(ρ) = max_{Θ,Φ} J(Q_{Θ,Φ}).
pub fn n_kl(state: &FockState, opts: &OptimizerOptions) -> Result<NklResult> {
    match state.modes() {
        1 => n_kl_single(state, opts),
        2 => n_kl_two(state, opts),
        _ => Err(Error::ShapeError("N > 2 not supported".into())),
    }
}

fn n_kl_single(state: &FockState, opts: &OptimizerOptions) -> Result<NklResult> {
    let (coarse_grid, full_grid) = scan_grids(state, opts)?;
    let coarse =
        SingleModeEvaluator::with_negativity_tolerance(state, coarse_grid, opts.negativity_tol)?;
    let full =
        SingleModeEvaluator::with_negativity_tolerance(state, full_grid, opts.negativity_tol)?;
    let mut evals = 0usize;
    let n = opts.coarse_phases;
    let step = std::f64::consts::PI / n as f64;
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        values.push(negentropy_unclipped(&coarse.distribution(step * k as f64)?)?);
        evals += 1;
    }
    // local maxima on the π-periodic scan
    let mut peaks: Vec<(f64, usize)> = (0..n)
        .filter(|&k| {
            let prev = values[(k + n - 1) % n];
            let next = values[(k + 1) % n];
            values[k] >= prev && values[k] >= next
        })
        .map(|k| (values[k], k))
        .collect();
    if peaks.is_empty() {
        // perfectly flat landscape (rotationally symmetric state)
        peaks.push((values[0], 0));
    }
    peaks.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
    });
    peaks.truncate(opts.refine_candidates);
    let grid_stage_value = peaks[0].0;

    let mut refined: Vec<(f64, f64)> = Vec::new(); // (value, phi)
    for &(_, k) in &peaks {
        let center = step * k as f64;
        let (phi, val) = golden_max(
            |p| negentropy_unclipped(&full.distribution(p)?),
            center - step,
            center + step,
            opts.refine_tol,
            &mut evals,
        )?;
        refined.push((val, phi.rem_euclid(std::f64::consts::PI)));
    }
    refined.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
    let (best_val, best_phi) = refined[0];
    let top_two_agree = refined.len() > 1 && (refined[0].0 - refined[1].0).abs() <= 1e-6;
    Ok(NklResult {
        value: best_val.max(0.0),
        direction: QuadratureDirection::single(best_phi),
        diagnostics: OptimizerDiagnostics {
            grid_stage_value,
            refined_value: best_val,
            iterations: evals,
            top_two_agree,
            converged: true,
        },
    })
}

fn n_kl_two(state: &FockState, opts: &OptimizerOptions) -> Result<NklResult> {
    let (coarse_grid, full_grid) = scan_grids(state, opts)?;
    let coarse = TwoModeEvaluator::new(state, coarse_grid)?;
    let full = TwoModeEvaluator::new(state, full_grid)?;
    let mut evals = 0usize;

    let theta_step = std::f64::consts::FRAC_PI_2 / (opts.theta_points - 1) as f64;
    let phi_step = 2.0 * std::f64::consts::PI / opts.phi_points as f64;
    let mut cells: Vec<(f64, [f64; 3])> = Vec::new();
    for ti in 0..opts.theta_points {
        let theta = theta_step * ti as f64;
        for p1 in 0..opts.phi_points {
            let phi1 = phi_step * p1 as f64;
            for p2 in 0..opts.phi_points {
                let phi2 = phi_step * p2 as f64;
                let dir = QuadratureDirection::two_mode(theta, phi1, phi2);
                let j = negentropy_unclipped(&coarse.distribution(&dir)?)?;
                evals += 1;
                cells.push((j, [theta, phi1, phi2]));
            }
        }
    }
    // deterministic ordering: value desc, then lexicographic on the angles
    cells.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then_with(|| a.1.partial_cmp(&b.1).unwrap())
    });
    let grid_stage_value = cells[0].0;
    let candidates = opts.two_mode_candidates().min(cells.len());

    let mut refined: Vec<(f64, [f64; 3], bool)> = Vec::new();
    for cell in cells.iter().take(candidates) {
        let (point, value, converged) = nelder_mead_max(
            |p| {
                let dir = QuadratureDirection::two_mode(p[0], p[1], p[2]);
                negentropy_unclipped(&full.distribution(&dir)?)
            },
            &cell.1,
            &[theta_step / 2.0, phi_step / 2.0, phi_step / 2.0],
            1e-5,
            400,
            &mut evals,
        )?;
        refined.push((value, [point[0], point[1], point[2]], converged));
    }
    refined.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then_with(|| a.1.partial_cmp(&b.1).unwrap())
    });
    let best = &refined[0];
    let top_two_agree = refined.len() > 1 && (refined[0].0 - refined[1].0).abs() <= 1e-6;
    Ok(NklResult {
        value: best.0.max(0.0),
        direction: QuadratureDirection::two_mode(best.1[0], best.1[1], best.1[2]),
        diagnostics: OptimizerDiagnostics {
            grid_stage_value,
            refined_value: best.0,
            iterations: evals,
            top_two_agree,
            converged: best.2,
        },
    })
}

/// Negentropies at the kurtosis-extremal directions.
#[derive(Debug, Clone, Serialize)]
pub struct KurtosisEstimate {
    pub phi_kmax: f64,
    pub phi_kmin: f64,
    pub j_at_kmax: f64,
    pub j_at_kmin: f64,
    /// max(j_at_kmax, j_at_kmin); a restricted maximum, so ≤ N_KL + 1e-6.
    pub estimate: f64,
    /// Present when the variance-extremal candidates were also evaluated.
    pub variance_candidates: Option<VarianceCandidates>,
    /// Kurtosis independent of phase (e.g. Fock states).
    pub rotationally_symmetric: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VarianceCandidates {
    pub phi_vmax: f64,
    pub phi_vmin: f64,
    pub j_at_vmax: f64,
    pub j_at_vmin: f64,
    /// max over all four candidate directions.
    pub estimate: f64,
}

/// The homodyne estimation strategy for a single-mode state: five phases at
/// spacing π/5 determine the degree-4 central-moment fields; the kurtosis
/// extrema on [0, π) are the candidate directions.
pub fn kurtosis_strategy(
    state: &FockState,
    include_variance: bool,
    opts: &OptimizerOptions,
) -> Result<KurtosisEstimate> {
    if state.modes() != 1 {
        return Err(Error::ShapeError(
            "kurtosis strategy is single-mode; use kurtosis_strategy_two_mode".into(),
        ));
    }
    let phi0 = 0.0;
    let mut var_samples = [0.0; 5];
    let mut mu4_samples = [0.0; 5];
    for j in 0..5 {
        let phi = phi0 + j as f64 * std::f64::consts::PI / 5.0;
        let (_, var, _, mu4) = central_moments(state, &QuadratureDirection::single(phi))?;
        var_samples[j] = var;
        mu4_samples[j] = mu4;
    }
    let var_field = reconstruct_moment_field(&var_samples, phi0, 4)?;
    let mu4_field = reconstruct_moment_field(&mu4_samples, phi0, 4)?;
    let kurt = |phi: f64| {
        let v = var_field.eval(phi);
        mu4_field.eval(phi) / (v * v)
    };

    // scan the closed-form field, then polish
    let scan_n = 720;
    let step = std::f64::consts::PI / scan_n as f64;
    let mut kmax = (f64::NEG_INFINITY, 0.0);
    let mut kmin = (f64::INFINITY, 0.0);
    for k in 0..scan_n {
        let phi = step * k as f64;
        let val = kurt(phi);
        if val > kmax.0 {
            kmax = (val, phi);
        }
        if val < kmin.0 {
            kmin = (val, phi);
        }
    }
    let spread = (kmax.0 - kmin.0).abs();
    let rotationally_symmetric = spread < 1e-9 * kmax.0.abs().max(1.0);
    let (phi_kmax, phi_kmin) = if rotationally_symmetric {
        (0.0, 0.0)
    } else {
        let mut dummy = 0usize;
        let (pmax, _) = golden_max(
            |p| Ok(kurt(p)),
            kmax.1 - step,
            kmax.1 + step,
            opts.refine_tol,
            &mut dummy,
        )?;
        let (pmin, _) = golden_max(
            |p| Ok(-kurt(p)),
            kmin.1 - step,
            kmin.1 + step,
            opts.refine_tol,
            &mut dummy,
        )?;
        (
            pmax.rem_euclid(std::f64::consts::PI),
            pmin.rem_euclid(std::f64::consts::PI),
        )
    };

    let (_, full_grid) = scan_grids(state, opts)?;
    let full =
        SingleModeEvaluator::with_negativity_tolerance(state, full_grid, opts.negativity_tol)?;
    let j_at = |phi: f64| -> Result<f64> {
        Ok(negentropy_unclipped(&full.distribution(phi)?)?.max(0.0))
    };
    let j_at_kmax = j_at(phi_kmax)?;
    let j_at_kmin = j_at(phi_kmin)?;
    let estimate = j_at_kmax.max(j_at_kmin);

    let variance_candidates = if include_variance {
        let mut vmax = (f64::NEG_INFINITY, 0.0);
        let mut vmin = (f64::INFINITY, 0.0);
        for k in 0..scan_n {
            let phi = step * k as f64;
            let val = var_field.eval(phi);
            if val > vmax.0 {
                vmax = (val, phi);
            }
            if val < vmin.0 {
                vmin = (val, phi);
            }
        }
        let mut dummy = 0usize;
        let (phi_vmax, _) = golden_max(
            |p| Ok(var_field.eval(p)),
            vmax.1 - step,
            vmax.1 + step,
            opts.refine_tol,
            &mut dummy,
        )?;
        let (phi_vmin, _) = golden_max(
            |p| Ok(-var_field.eval(p)),
            vmin.1 - step,
            vmin.1 + step,
            opts.refine_tol,
            &mut dummy,
        )?;
        let phi_vmax = phi_vmax.rem_euclid(std::f64::consts::PI);
        let phi_vmin = phi_vmin.rem_euclid(std::f64::consts::PI);
        let j_at_vmax = j_at(phi_vmax)?;
        let j_at_vmin = j_at(phi_vmin)?;
        Some(VarianceCandidates {
            phi_vmax,
            phi_vmin,
            j_at_vmax,
            j_at_vmin,
            estimate: estimate.max(j_at_vmax).max(j_at_vmin),
        })
    } else {
        None
    };

    Ok(KurtosisEstimate {
        phi_kmax,
        phi_kmin,
        j_at_kmax,
        j_at_kmin,
        estimate,
        variance_candidates,
        rotationally_symmetric,
    })
}

/// Two-mode kurtosis candidates: extremize K(θ, φ₁, φ₂) operator-side, then
/// evaluate the negentropy at the two extremal directions.
pub fn kurtosis_strategy_two_mode(
    state: &FockState,
    opts: &OptimizerOptions,
) -> Result<(QuadratureDirection, QuadratureDirection, f64, f64)> {
    if state.modes() != 2 {
        return Err(Error::ShapeError("needs a two-mode state".into()));
    }
    let kurt = |p: &[f64]| -> Result<f64> {
        let dir = QuadratureDirection::two_mode(p[0], p[1], p[2]);
        let (_, var, _, mu4) = central_moments(state, &dir)?;
        Ok(mu4 / (var * var))
    };
    let theta_n = 8;
    let phi_n = 12;
    let theta_step = std::f64::consts::FRAC_PI_2 / (theta_n - 1) as f64;
    let phi_step = 2.0 * std::f64::consts::PI / phi_n as f64;
    let mut best_max = (f64::NEG_INFINITY, [0.0; 3]);
    let mut best_min = (f64::INFINITY, [0.0; 3]);
    for ti in 0..theta_n {
        for p1 in 0..phi_n {
            for p2 in 0..phi_n {
                let p = [
                    theta_step * ti as f64,
                    phi_step * p1 as f64,
                    phi_step * p2 as f64,
                ];
                let k = kurt(&p)?;
                if k > best_max.0 {
                    best_max = (k, p);
                }
                if k < best_min.0 {
                    best_min = (k, p);
                }
            }
        }
    }
    let mut evals = 0usize;
    let steps = [theta_step / 2.0, phi_step / 2.0, phi_step / 2.0];
    let (pmax, _, _) = nelder_mead_max(&mut |p: &[f64]| kurt(p), &best_max.1, &steps, 1e-6, 400, &mut evals)?;
    let (pmin, _, _) =
        nelder_mead_max(&mut |p: &[f64]| Ok(-kurt(p)?), &best_min.1, &steps, 1e-6, 400, &mut evals)?;
    let dir_max = QuadratureDirection::two_mode(pmax[0], pmax[1], pmax[2]);
    let dir_min = QuadratureDirection::two_mode(pmin[0], pmin[1], pmin[2]);
    let (_, full_grid) = scan_grids(state, opts)?;
    let full = TwoModeEvaluator::new(state, full_grid)?;
    let j_max = negentropy_unclipped(&full.distribution(&dir_max)?)?.max(0.0);
    let j_min = negentropy_unclipped(&full.distribution(&dir_min)?)?.max(0.0);
    Ok((dir_max, dir_min, j_max, j_min))
}

/// N_QR(ρ) = S₁(ρ_G) − S₁(ρ) = Σᵢ h(νᵢ) − S₁(ρ).
pub fn n_qr(state: &FockState) -> Result<f64> {
    let cov = covariance(state)?;
    let spectrum = symplectic_eigenvalues(&cov)?;
    let mut s_ref = 0.0;
    for &nu in &spectrum.nus {
        s_ref += h(nu.max(0.5))?;
    }
    Ok(s_ref - von_neumann_entropy(state)?)
}

/// L(ρ) = S₁(ρ_G) − H({Pₙ}) with Pₙ = ⟨n|ρ|n⟩ (single mode).
pub fn genoni_lower(state: &FockState) -> Result<f64> {
    if state.modes() != 1 {
        return Err(Error::ShapeError("photon-number bound is single-mode".into()));
    }
    let cov = covariance(state)?;
    let nu = symplectic_eigenvalues(&cov)?.nus[0];
    let pn = state.photon_number_distribution()?;
    let total: f64 = pn.iter().sum();
    let shannon: f64 = pn
        .iter()
        .filter(|&&p| p > 1e-300)
        .map(|&p| {
            let q = p / total;
            -q * q.ln()
        })
        .sum();
    Ok(h(nu.max(0.5))? - shannon)
}

/// Exact N_HS = [tr ρ² + tr ρ_G² − 2 tr(ρρ_G)] / (2 tr ρ²), single mode.
/// The reference is built in Fock basis, escalating the cutoff when the
/// squeezing demands it.
pub fn n_hs_exact(state: &FockState) -> Result<f64> {
    if state.modes() != 1 {
        return Err(Error::ShapeError("exact N_HS is single-mode".into()));
    }
    let cov = covariance(state)?;
    let mut cutoff = state.cutoff();
    loop {
        match reference_gaussian_fock(&cov, cutoff) {
            Ok(rho_g) => {
                let padded = state.pad_to(cutoff)?;
                let r = padded.density_matrix();
                let g = rho_g.density_matrix();
                let mu = r.trace_square_hermitian();
                let mu_g = g.trace_square_hermitian();
                let overlap = r.trace_mul(&g).re;
                return Ok((mu + mu_g - 2.0 * overlap) / (2.0 * mu));
            }
            Err(Error::TruncationError { .. }) if cutoff < 1024 => {
                cutoff *= 2;
            }
            Err(e) => return Err(e),
        }
    }
}

/// F_N = min[1, exp(−N_KL/2 + (N/2) ln(e/2))] and the bound (1−F_N)²/2.
pub fn n_hs_lower(nkl: f64, modes: usize) -> f64 {
    let f = (-(nkl / 2.0) + modes as f64 / 2.0 * (std::f64::consts::E / 2.0).ln()).exp();
    let f = f.min(1.0);
    0.5 * (1.0 - f) * (1.0 - f)
}

/// Trace-overlap ratio O(ρ)/μ(ρ) and its bound (e/2)^{N/2} e^{−N_QR/2}
/// (single mode; needs ρ_G in Fock basis).
pub fn overlap_bound(state: &FockState, nqr: f64) -> Result<(f64, f64)> {
    if state.modes() != 1 {
        return Err(Error::ShapeError("trace overlap is single-mode".into()));
    }
    let cov = covariance(state)?;
    let mut cutoff = state.cutoff();
    let ratio = loop {
        match reference_gaussian_fock(&cov, cutoff) {
            Ok(rho_g) => {
                let padded = state.pad_to(cutoff)?;
                let r = padded.density_matrix();
                let g = rho_g.density_matrix();
                break r.trace_mul(&g).re / r.trace_square_hermitian();
            }
            Err(Error::TruncationError { .. }) if cutoff < 1024 => cutoff *= 2,
            Err(e) => return Err(e),
        }
    };
    let bound = (std::f64::consts::E / 2.0).sqrt() * (-nqr / 2.0).exp();
    Ok((ratio, bound))
}

/// √det Γ against h⁻¹(N_KL + S₁): the non-Gaussianity- and entropy-bounded
/// uncertainty relation (single mode).
pub fn uncertainty_check(state: &FockState, nkl: f64) -> Result<(f64, f64)> {
    if state.modes() != 1 {
        return Err(Error::ShapeError("uncertainty relation is single-mode".into()));
    }
    let cov = covariance(state)?;
    let lhs = cov.det_gamma().sqrt();
    let rhs = h_inverse(nkl + von_neumann_entropy(state)?)?;
    Ok((lhs, rhs))
}

/// Everything the CLI reports for one state.
#[derive(Debug, Clone, Serialize)]
pub struct MeasureReport {
    pub state: String,
    pub modes: usize,
    pub nkl: f64,
    pub nkl_direction_thetas: Vec<f64>,
    pub nkl_direction_phis: Vec<f64>,
    pub nkl_diagnostics: OptimizerDiagnostics,
    pub nqr: f64,
    pub genoni_lower: Option<f64>,
    pub nhs_exact: Option<f64>,
    pub nhs_lower: f64,
    pub overlap_ratio: Option<f64>,
    pub overlap_bound: Option<f64>,
    pub ur_lhs: Option<f64>,
    pub ur_rhs: Option<f64>,
    pub mean_photon_number: f64,
    pub provenance: Provenance,
}

/// Enough to re-run the computation.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub cutoff: usize,
    pub grid_points: usize,
    pub coarse_grid_points: usize,
    pub tail_tolerance: f64,
    pub refine_tol: f64,
    pub seed: Option<u64>,
}

/// Compute the full report for a state spec.
pub fn evaluate(spec: &StateSpec, cutoff: usize, opts: &OptimizerOptions) -> Result<MeasureReport> {
    let state = crate::states::build(spec, cutoff)?;
    evaluate_state(spec.canonical(), &state, opts, seed_of(spec))
}

fn seed_of(spec: &StateSpec) -> Option<u64> {
    match spec {
        StateSpec::RandomPure { seed, .. } | StateSpec::RandomMixed { seed, .. } => Some(*seed),
        _ => None,
    }
}

/// Report for an already-built state.
pub fn evaluate_state(
    name: String,
    state: &FockState,
    opts: &OptimizerOptions,
    seed: Option<u64>,
) -> Result<MeasureReport> {
    let nkl = n_kl(state, opts)?;
    let nqr = n_qr(state)?;
    let single = state.modes() == 1;
    let genoni = if single { Some(genoni_lower(state)?) } else { None };
    let nhs_exact = if single { Some(n_hs_exact(state)?) } else { None };
    let nhs_lower_v = n_hs_lower(nkl.value, state.modes());
    let (overlap_ratio, overlap_bnd) = if single {
        let (r, b) = overlap_bound(state, nqr)?;
        (Some(r), Some(b))
    } else {
        (None, None)
    };
    let (ur_lhs, ur_rhs) = if single {
        let (l, r) = uncertainty_check(state, nkl.value)?;
        (Some(l), Some(r))
    } else {
        (None, None)
    };
    Ok(MeasureReport {
        state: name,
        modes: state.modes(),
        nkl: nkl.value,
        nkl_direction_thetas: nkl.direction.thetas().to_vec(),
        nkl_direction_phis: nkl.direction.phis().to_vec(),
        nkl_diagnostics: nkl.diagnostics,
        nqr,
        genoni_lower: genoni,
        nhs_exact,
        nhs_lower: nhs_lower_v,
        overlap_ratio,
        overlap_bound: overlap_bnd,
        ur_lhs,
        ur_rhs,
        mean_photon_number: state.mean_photon_number(),
        provenance: Provenance {
            cutoff: state.cutoff(),
            grid_points: opts.grid_points,
            coarse_grid_points: opts.coarse_grid_points,
            tail_tolerance: crate::fock::DEFAULT_TAIL_TOLERANCE,
            refine_tol: opts.refine_tol,
            seed,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build, StateSpec};

    const EULER_GAMMA: f64 = 0.5772156649015329;

    fn opts() -> OptimizerOptions {
        OptimizerOptions::default()
    }

    #[test]
    fn nkl_vanishes_on_gaussian_states() {
        for spec in [
            StateSpec::Vacuum,
            StateSpec::Coherent(0.8),
            StateSpec::SqueezedVacuum(0.5),
            StateSpec::Thermal(1.0),
        ] {
            let st = build(&spec, 64).unwrap();
            let r = n_kl(&st, &opts()).unwrap();
            assert!(r.value < 1e-6, "{spec}: N_KL = {}", r.value);
        }
    }

    #[test]
    fn nkl_of_fock_one_matches_closed_form() {
        let st = build(&StateSpec::Fock(1), 32).unwrap();
        let r = n_kl(&st, &opts()).unwrap();
        let want = 1.0 + 0.5 * 3.0f64.ln() - 2.0f64.ln() - EULER_GAMMA;
        assert!((r.value - want).abs() < 1e-6, "{} vs {want}", r.value);
        // rotationally symmetric: the refined top-2 coincide
        assert!(r.diagnostics.top_two_agree);
    }

    #[test]
    fn nqr_of_fock_one_is_two_ln_two() {
        let st = build(&StateSpec::Fock(1), 64).unwrap();
        let v = n_qr(&st).unwrap();
        assert!((v - 2.0 * 2.0f64.ln()).abs() < 1e-9, "{v}");
    }

    #[test]
    fn nqr_vanishes_on_gaussians_and_dominates_nkl() {
        for spec in [
            StateSpec::Vacuum,
            StateSpec::SqueezedVacuum(0.5),
            StateSpec::Thermal(1.0),
        ] {
            let st = build(&spec, 64).unwrap();
            assert!(n_qr(&st).unwrap().abs() < 1e-6, "{spec}");
        }
        for spec in [
            StateSpec::Fock(2),
            StateSpec::EvenCat(1.2),
            StateSpec::OddCat(0.8),
            StateSpec::PhaseAveragedCoherent(1.0),
        ] {
            let st = build(&spec, 64).unwrap();
            let nkl = n_kl(&st, &opts()).unwrap().value;
            let nqr = n_qr(&st).unwrap();
            assert!(nqr >= nkl - 1e-6, "{spec}: nqr {nqr} < nkl {nkl}");
        }
    }

    #[test]
    fn genoni_bound_on_fock_states_is_tight() {
        for n in [1usize, 2, 3] {
            let st = build(&StateSpec::Fock(n), 64).unwrap();
            let l = genoni_lower(&st).unwrap();
            let q = n_qr(&st).unwrap();
            assert!((l - q).abs() < 1e-9, "n={n}: L = {l}, N_QR = {q}");
        }
    }

    #[test]
    fn hs_exact_of_fock_one_matches_direct_trace_oracle() {
        // ρ_G = τ_{n̄=1}: tr ρ² = 1, tr ρ_G² = 1/3, tr ρρ_G = ⟨1|τ|1⟩ = 1/4
        // → N_HS = (1 + 1/3 − 1/2)/2 = 5/12
        let st = build(&StateSpec::Fock(1), 64).unwrap();
        let v = n_hs_exact(&st).unwrap();
        assert!((v - 5.0 / 12.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn hs_lower_bound_clamps_for_gaussians_and_holds_for_fock() {
        assert_eq!(n_hs_lower(0.0, 1), 0.0);
        let st = build(&StateSpec::Fock(1), 64).unwrap();
        let nkl = n_kl(&st, &opts()).unwrap().value;
        let lower = n_hs_lower(nkl, 1);
        let exact = n_hs_exact(&st).unwrap();
        assert!(exact >= lower - 1e-9, "exact {exact} lower {lower}");
    }

    #[test]
    fn overlap_ratio_of_fock_one() {
        let st = build(&StateSpec::Fock(1), 64).unwrap();
        let nqr = n_qr(&st).unwrap();
        let (ratio, bound) = overlap_bound(&st, nqr).unwrap();
        assert!((ratio - 0.25).abs() < 1e-8, "ratio {ratio}");
        let want = (std::f64::consts::E / 2.0).sqrt() * 0.5;
        assert!((bound - want).abs() < 1e-9);
        assert!(ratio <= bound + 1e-6);
    }

    #[test]
    fn overlap_of_gaussian_is_one_with_slack_bound() {
        let st = build(&StateSpec::Coherent(0.5), 64).unwrap();
        let nqr = n_qr(&st).unwrap();
        let (ratio, bound) = overlap_bound(&st, nqr).unwrap();
        assert!((ratio - 1.0).abs() < 1e-7);
        assert!((bound - (std::f64::consts::E / 2.0).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn uncertainty_relation_on_reference_cases() {
        // vacuum saturates at 1/2
        let vac = build(&StateSpec::Vacuum, 16).unwrap();
        let (lhs, rhs) = uncertainty_check(&vac, 0.0).unwrap();
        assert!((lhs - 0.5).abs() < 1e-10);
        assert!((rhs - 0.5).abs() < 1e-10);

        // thermal saturates: h⁻¹(0 + S₁) = n̄ + 1/2
        let th = build(&StateSpec::Thermal(1.0), 64).unwrap();
        let (lhs, rhs) = uncertainty_check(&th, 0.0).unwrap();
        assert!((lhs - 1.5).abs() < 1e-8);
        assert!((rhs - 1.5).abs() < 1e-8);

        // Fock |1⟩: strict inequality since N_KL < N_QR
        let one = build(&StateSpec::Fock(1), 64).unwrap();
        let nkl = n_kl(&one, &opts()).unwrap().value;
        let (lhs, rhs) = uncertainty_check(&one, nkl).unwrap();
        assert!((lhs - 1.5).abs() < 1e-9);
        assert!(rhs < lhs - 1e-3, "lhs {lhs} rhs {rhs}");
        assert!(rhs >= 0.5);
    }

    #[test]
    fn kurtosis_strategy_on_fock_is_exact_and_flagged() {
        let st = build(&StateSpec::Fock(1), 32).unwrap();
        let est = kurtosis_strategy(&st, false, &opts()).unwrap();
        assert!(est.rotationally_symmetric);
        let nkl = n_kl(&st, &opts()).unwrap().value;
        assert!((est.estimate - nkl).abs() < 1e-7);
        assert!(est.estimate <= nkl + 1e-6);
    }

    #[test]
    fn kurtosis_strategy_on_cat_tracks_the_optimizer() {
        let st = build(&StateSpec::EvenCat(1.0), 64).unwrap();
        let est = kurtosis_strategy(&st, true, &opts()).unwrap();
        assert!(!est.rotationally_symmetric);
        let nkl = n_kl(&st, &opts()).unwrap().value;
        assert!(est.estimate <= nkl + 1e-6);
        // for cats the better kurtosis candidate is the optimum itself
        assert!((est.estimate - nkl).abs() < 1e-5, "{} vs {nkl}", est.estimate);
        let aug = est.variance_candidates.unwrap();
        assert!(aug.estimate >= est.estimate - 1e-12);
        assert!(aug.estimate <= nkl + 1e-6);
    }

    #[test]
    fn two_mode_nkl_of_pnes_is_positive_and_bounded_by_nqr() {
        let st = build(&StateSpec::Pnes(0.4), 4).unwrap();
        let r = n_kl(&st, &opts()).unwrap();
        assert!(r.value > 0.01, "N_KL = {}", r.value);
        let q = n_qr(&st).unwrap();
        assert!(q >= r.value - 1e-6, "nqr {q} nkl {}", r.value);
    }

    #[test]
    fn report_assembles_for_single_and_two_mode() {
        let rep = evaluate(&StateSpec::Fock(1), 64, &opts()).unwrap();
        assert!(rep.nhs_exact.is_some());
        assert!(rep.ur_lhs.unwrap() >= rep.ur_rhs.unwrap() - 1e-6);
        assert!(rep.nqr >= rep.nkl - 1e-6);
        let json = serde_json::to_string(&rep);
        assert!(json.is_ok());

        let rep2 = evaluate(&StateSpec::Pnes(0.3), 4, &opts()).unwrap();
        assert!(rep2.nhs_exact.is_none());
        assert!(rep2.genoni_lower.is_none());
        assert!(rep2.nqr >= rep2.nkl - 1e-6);
    }
}
