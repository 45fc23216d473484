//! The reference Gaussian state ρ_G and everything needed to handle it:
//! covariance extraction in symmetrized ordering (ħ = 1, vacuum variance
//! 1/2), symplectic eigenvalues by the N ≤ 2 closed forms, the Gaussian
//! entropy function h, von Neumann and Rényi-2 entropies, and the
//! single-mode Fock-basis construction ρ_G = D R S τ_n̄ S† R† D†.
//!
//! Quadrature convention: x̂ = (â + â†)/√2, p̂ ≡ q̂_{π/2} = i(â − â†)/√2,
//! phase-space ordering (x₁, p₁, x₂, p₂).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    apply_unitary, displacement, phase_rotation, squeezer, Body, FockState,
};
use crate::linalg::{hermitian_eigenvalues, sym2_eigen, CMat};

/// First moments and the 2N×2N symmetrized covariance matrix.
#[derive(Debug, Clone)]
pub struct CovarianceData {
    /// ⟨x₁⟩, ⟨p₁⟩, ...
    pub means: Vec<f64>,
    /// Row-major 2N×2N, Γ_jk = ⟨{Q̂_j, Q̂_k}⟩/2 − ⟨Q̂_j⟩⟨Q̂_k⟩.
    pub gamma: Vec<f64>,
}

impl CovarianceData {
    pub fn modes(&self) -> usize {
        self.means.len() / 2
    }

    pub fn gamma_at(&self, i: usize, j: usize) -> f64 {
        self.gamma[i * self.means.len() + j]
    }

    pub fn det_gamma(&self) -> f64 {
        match self.modes() {
            1 => det2(&self.gamma),
            2 => det4(&self.gamma),
            _ => unreachable!("N > 2 covariance"),
        }
    }
}

fn det2(m: &[f64]) -> f64 {
    m[0] * m[3] - m[1] * m[2]
}

fn det4(m: &[f64]) -> f64 {
    // cofactor expansion along the first row
    let minor = |r: [usize; 3], c: [usize; 3]| -> f64 {
        let e = |i: usize, j: usize| m[4 * r[i] + c[j]];
        e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
            - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
    };
    m[0] * minor([1, 2, 3], [1, 2, 3]) - m[1] * minor([1, 2, 3], [0, 2, 3])
        + m[2] * minor([1, 2, 3], [0, 1, 3])
        - m[3] * minor([1, 2, 3], [0, 1, 2])
}

/// Ladder-operator expectation values that determine means and covariance.
struct LadderMoments {
    /// ⟨â_j⟩
    a: Vec<Complex64>,
    /// ⟨â_j²⟩
    a2: Vec<Complex64>,
    /// ⟨â_j†â_j⟩
    n: Vec<f64>,
    /// ⟨â₁â₂⟩ (two-mode only)
    a1a2: Complex64,
    /// ⟨â₁â₂†⟩ (two-mode only)
    a1a2dag: Complex64,
}

fn ladder_moments(state: &FockState) -> LadderMoments {
    let d = state.cutoff();
    let modes = state.modes();
    let sq = |k: usize| (k as f64).sqrt();
    let mut m = LadderMoments {
        a: vec![Complex64::new(0.0, 0.0); modes],
        a2: vec![Complex64::new(0.0, 0.0); modes],
        n: vec![0.0; modes],
        a1a2: Complex64::new(0.0, 0.0),
        a1a2dag: Complex64::new(0.0, 0.0),
    };
    match (state.body(), modes) {
        (Body::Pure(v), 1) => {
            for k in 0..d {
                let c = v[k].conj();
                if k + 1 < d {
                    m.a[0] += c * sq(k + 1) * v[k + 1];
                }
                if k + 2 < d {
                    m.a2[0] += c * sq(k + 1) * sq(k + 2) * v[k + 2];
                }
                m.n[0] += k as f64 * v[k].norm_sqr();
            }
        }
        (Body::Density(rho), 1) => {
            for k in 0..d {
                if k + 1 < d {
                    m.a[0] += rho[(k, k + 1)].conj() * sq(k + 1);
                }
                if k + 2 < d {
                    m.a2[0] += rho[(k, k + 2)].conj() * sq(k + 1) * sq(k + 2);
                }
                m.n[0] += k as f64 * rho[(k, k)].re;
            }
        }
        (Body::Pure(v), 2) => {
            let idx = |m1: usize, m2: usize| m1 * d + m2;
            for i in 0..d {
                for j in 0..d {
                    let c = v[idx(i, j)].conj();
                    if c.norm_sqr() == 0.0 {
                        continue;
                    }
                    if i + 1 < d {
                        m.a[0] += c * sq(i + 1) * v[idx(i + 1, j)];
                    }
                    if j + 1 < d {
                        m.a[1] += c * sq(j + 1) * v[idx(i, j + 1)];
                    }
                    if i + 2 < d {
                        m.a2[0] += c * sq(i + 1) * sq(i + 2) * v[idx(i + 2, j)];
                    }
                    if j + 2 < d {
                        m.a2[1] += c * sq(j + 1) * sq(j + 2) * v[idx(i, j + 2)];
                    }
                    m.n[0] += i as f64 * v[idx(i, j)].norm_sqr();
                    m.n[1] += j as f64 * v[idx(i, j)].norm_sqr();
                    if i + 1 < d && j + 1 < d {
                        m.a1a2 += c * sq(i + 1) * sq(j + 1) * v[idx(i + 1, j + 1)];
                    }
                    if i + 1 < d && j > 0 {
                        m.a1a2dag += c * sq(i + 1) * sq(j) * v[idx(i + 1, j - 1)];
                    }
                }
            }
        }
        (Body::Density(rho), 2) => {
            let idx = |m1: usize, m2: usize| m1 * d + m2;
            // tr(ρ Ô) = Σ_{I} ⟨I| ρ Ô |I⟩ = Σ_{I,J} ρ_{I,J} Ô_{J,I}
            for i in 0..d {
                for j in 0..d {
                    let bra = idx(i, j);
                    if i + 1 < d {
                        m.a[0] += rho[(idx(i + 1, j), bra)] * sq(i + 1);
                    }
                    if j + 1 < d {
                        m.a[1] += rho[(idx(i, j + 1), bra)] * sq(j + 1);
                    }
                    if i + 2 < d {
                        m.a2[0] += rho[(idx(i + 2, j), bra)] * sq(i + 1) * sq(i + 2);
                    }
                    if j + 2 < d {
                        m.a2[1] += rho[(idx(i, j + 2), bra)] * sq(j + 1) * sq(j + 2);
                    }
                    m.n[0] += i as f64 * rho[(bra, bra)].re;
                    m.n[1] += j as f64 * rho[(bra, bra)].re;
                    if i + 1 < d && j + 1 < d {
                        m.a1a2 += rho[(idx(i + 1, j + 1), bra)] * sq(i + 1) * sq(j + 1);
                    }
                    if i + 1 < d && j > 0 {
                        m.a1a2dag += rho[(idx(i + 1, j - 1), bra)] * sq(i + 1) * sq(j);
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    m
}

/// Means and covariance of a (possibly signed) Fock state.
pub fn covariance(state: &FockState) -> Result<CovarianceData> {
    state.ensure_truncation_safe()?;
    covariance_unchecked(state)
}

/// Covariance without the truncation gate, for partially transposed local
/// modes whose tail bookkeeping is inherited from the parent state.
pub fn covariance_unchecked(state: &FockState) -> Result<CovarianceData> {
    let modes = state.modes();
    let lm = ladder_moments(state);
    let mut means = vec![0.0; 2 * modes];
    for j in 0..modes {
        means[2 * j] = std::f64::consts::SQRT_2 * lm.a[j].re;
        means[2 * j + 1] = -std::f64::consts::SQRT_2 * lm.a[j].im;
    }
    let n2 = 2 * modes;
    let mut gamma = vec![0.0; n2 * n2];
    for j in 0..modes {
        let xx = lm.a2[j].re + lm.n[j] + 0.5 - means[2 * j] * means[2 * j];
        let pp = -lm.a2[j].re + lm.n[j] + 0.5 - means[2 * j + 1] * means[2 * j + 1];
        let xp = -lm.a2[j].im - means[2 * j] * means[2 * j + 1];
        gamma[(2 * j) * n2 + 2 * j] = xx;
        gamma[(2 * j + 1) * n2 + 2 * j + 1] = pp;
        gamma[(2 * j) * n2 + 2 * j + 1] = xp;
        gamma[(2 * j + 1) * n2 + 2 * j] = xp;
    }
    if modes == 2 {
        let x1x2 = lm.a1a2.re + lm.a1a2dag.re - means[0] * means[2];
        let p1p2 = -lm.a1a2.re + lm.a1a2dag.re - means[1] * means[3];
        let x1p2 = -lm.a1a2.im + lm.a1a2dag.im - means[0] * means[3];
        let p1x2 = -lm.a1a2.im - lm.a1a2dag.im - means[1] * means[2];
        for (i, j, v) in [
            (0usize, 2usize, x1x2),
            (0, 3, x1p2),
            (1, 2, p1x2),
            (1, 3, p1p2),
        ] {
            gamma[i * n2 + j] = v;
            gamma[j * n2 + i] = v;
        }
    }
    Ok(CovarianceData { means, gamma })
}

/// Symplectic eigenvalues ν_i of a 2N×2N covariance matrix, N ≤ 2.
#[derive(Debug, Clone)]
pub struct SymplecticSpectrum {
    pub nus: Vec<f64>,
}

impl SymplecticSpectrum {
    pub fn min(&self) -> f64 {
        self.nus.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// N = 1: ν = √det Γ. N = 2: with Γ = [[A, C], [Cᵀ, B]] in 2×2 blocks and
/// Δ = det A + det B + 2 det C,
///
/// ```text
///   ν±² = (Δ ± √(Δ² − 4 det Γ)) / 2.
/// ```
///
/// Covariances of partially transposed states are admitted; ν then may drop
/// below 1/2, which is exactly the PPT signal.
pub fn symplectic_eigenvalues(cov: &CovarianceData) -> Result<SymplecticSpectrum> {
    match cov.modes() {
        1 => {
            let det = cov.det_gamma();
            if det < 0.0 {
                return Err(Error::NumericsError(format!("det Γ = {det} < 0")));
            }
            Ok(SymplecticSpectrum {
                nus: vec![det.sqrt()],
            })
        }
        2 => {
            let g = |i: usize, j: usize| cov.gamma_at(i, j);
            let det_a = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
            let det_b = g(2, 2) * g(3, 3) - g(2, 3) * g(3, 2);
            let det_c = g(0, 2) * g(1, 3) - g(0, 3) * g(1, 2);
            let delta = det_a + det_b + 2.0 * det_c;
            let det = cov.det_gamma();
            let disc = delta * delta - 4.0 * det;
            if disc < -1e-9 * delta.abs().max(1.0) {
                return Err(Error::NumericsError(format!(
                    "Δ² − 4 det Γ = {disc} < 0 beyond tolerance"
                )));
            }
            let root = disc.max(0.0).sqrt();
            let hi = ((delta + root) / 2.0).max(0.0).sqrt();
            let lo = ((delta - root) / 2.0).max(0.0).sqrt();
            Ok(SymplecticSpectrum { nus: vec![lo, hi] })
        }
        _ => Err(Error::ShapeError("N > 2 not supported".into())),
    }
}

/// Gaussian mode entropy h(x) = (x+1/2)ln(x+1/2) − (x−1/2)ln(x−1/2),
/// h(1/2) = 0, strictly increasing on [1/2, ∞).
pub fn h(x: f64) -> Result<f64> {
    if x < 0.5 - 1e-9 {
        return Err(Error::DomainError(format!("h(x) needs x >= 1/2, got {x}")));
    }
    let x = x.max(0.5);
    let up = x + 0.5;
    let dn = x - 0.5;
    let low = if dn > 0.0 { dn * dn.ln() } else { 0.0 };
    Ok(up * up.ln() - low)
}

/// Inverse of `h` on [1/2, ∞), by bisection (h is monotone; ~60 halvings
/// reach 1e-14 relative).
pub fn h_inverse(y: f64) -> Result<f64> {
    if y < 0.0 {
        return Err(Error::DomainError(format!("h⁻¹ needs y >= 0, got {y}")));
    }
    if y == 0.0 {
        return Ok(0.5);
    }
    let mut lo = 0.5;
    let mut hi = 1.0;
    while h(hi)? < y {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NumericsError("h_inverse bracket blew up".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid)? < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// S₁(ρ) = −tr ρ ln ρ from the Jacobi spectrum; eigenvalues are clamped to
/// [0, 1] within 1e-9 and renormalized. Pure bodies short-circuit to zero.
pub fn von_neumann_entropy(state: &FockState) -> Result<f64> {
    let rho = match state.body() {
        Body::Pure(_) => return Ok(0.0),
        Body::Density(m) => m,
    };
    let evs = hermitian_eigenvalues(rho)?;
    if evs[0] < -1e-7 {
        return Err(Error::NotAState(format!("eigenvalue {0:.3e}", evs[0])));
    }
    let clamped: Vec<f64> = evs.iter().map(|&l| l.clamp(0.0, 1.0)).collect();
    let total: f64 = clamped.iter().sum();
    Ok(clamped
        .iter()
        .filter(|&&l| l > 1e-300)
        .map(|&l| {
            let p = l / total;
            -p * p.ln()
        })
        .sum())
}

/// S₂(ρ) = −ln tr ρ², no eigensolve.
pub fn renyi2_entropy(state: &FockState) -> f64 {
    -state.purity().ln()
}

/// The single-mode reference Gaussian ρ_G = D(α) R(θ) S(r) τ_n̄ S† R† D† in
/// Fock basis, with (n̄, r, θ, α) solved from (means, Γ). Built at twice the
/// requested cutoff, then truncated; the resulting covariance reproduces the
/// input within 1e-6 (checked by the round-trip tests, not at runtime).
pub fn reference_gaussian_fock(cov: &CovarianceData, cutoff: usize) -> Result<FockState> {
    if cov.modes() != 1 {
        return Err(Error::ShapeError(
            "Fock-basis reference Gaussian is single-mode only".into(),
        ));
    }
    let det = cov.det_gamma();
    let nu = det.sqrt();
    if nu.is_nan() || nu < 0.5 - 1e-9 {
        return Err(Error::DomainError(format!(
            "unphysical covariance: √det Γ = {nu} < 1/2"
        )));
    }
    let nbar = (nu - 0.5).max(0.0);
    let (lo, hi, v_min) = sym2_eigen(cov.gamma_at(0, 0), cov.gamma_at(0, 1), cov.gamma_at(1, 1));
    if lo <= 0.0 {
        return Err(Error::DomainError("covariance not positive definite".into()));
    }
    let r = 0.25 * (hi / lo).ln();
    let theta = -v_min[1].atan2(v_min[0]);
    let alpha = Complex64::new(cov.means[0], -cov.means[1]) / Complex64::new(std::f64::consts::SQRT_2, 0.0);

    let work = 2 * cutoff;
    // thermal τ_n̄ at the working cutoff
    let mut tau = CMat::zeros(work);
    let mut w = 1.0 / (nbar + 1.0);
    let mut total = 0.0;
    for k in 0..work {
        tau[(k, k)] = Complex64::new(w, 0.0);
        total += w;
        w *= nbar / (nbar + 1.0);
    }
    if 1.0 - total > 1e-9 {
        return Err(Error::TruncationError {
            cutoff,
            tail_mass: 1.0 - total,
            tolerance: 1e-9,
            required: cutoff * 2,
        });
    }
    for k in 0..work {
        tau[(k, k)] /= total;
    }
    let mut state = FockState::from_density_matrix(tau, 1, work)?;
    state = apply_unitary(&state, &squeezer(r, work))?;
    state = apply_unitary(&state, &phase_rotation(theta, work))?;
    state = apply_unitary(&state, &displacement(alpha, work))?;

    // truncate back to the requested cutoff
    let big = state.density_matrix();
    let mut small = CMat::zeros(cutoff);
    for i in 0..cutoff {
        for j in 0..cutoff {
            small[(i, j)] = big[(i, j)];
        }
    }
    let tr = small.trace().re;
    let leak = (1.0 - tr).max(0.0) + state.tail_mass();
    if leak > crate::fock::DEFAULT_TAIL_TOLERANCE {
        return Err(Error::TruncationError {
            cutoff,
            tail_mass: leak,
            tolerance: crate::fock::DEFAULT_TAIL_TOLERANCE,
            required: cutoff * 2,
        });
    }
    let small = small.scale(Complex64::new(1.0 / tr, 0.0));
    // symmetrize away roundoff before validation
    let mut sym = small.clone();
    for i in 0..cutoff {
        for j in 0..cutoff {
            sym[(i, j)] = 0.5 * (small[(i, j)] + small[(j, i)].conj());
        }
    }
    Ok(FockState::from_density_matrix(sym, 1, cutoff)?.with_tail_mass(leak))
}

/// S₂(σ) − S₁(σ) = Σ_i [ln(2ν_i) − h(ν_i)] of the Gaussian state with this
/// spectrum; bounded below by N ln(2/e).
pub fn gaussian_entropy_gap(spectrum: &SymplecticSpectrum) -> Result<f64> {
    let mut acc = 0.0;
    for &nu in &spectrum.nus {
        acc += (2.0 * nu).ln() - h(nu)?;
    }
    Ok(acc)
}

/// 𝒟(n̄) = S₁(τ_n̄) − S₂(τ_n̄), monotone increasing with limit ln(e/2).
pub fn thermal_entropy_difference(nbar: f64) -> Result<f64> {
    Ok(h(nbar + 0.5)? - (1.0 + 2.0 * nbar).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{partial_transpose, two_mode_squeezer};
    use crate::states::{build, StateSpec};

    #[test]
    fn covariance_of_vacuum_and_fock() {
        let vac = FockState::vacuum(1, 16);
        let c = covariance(&vac).unwrap();
        assert!((c.gamma_at(0, 0) - 0.5).abs() < 1e-12);
        assert!((c.gamma_at(1, 1) - 0.5).abs() < 1e-12);
        assert!(c.gamma_at(0, 1).abs() < 1e-12);

        for n in 1..4 {
            let st = build(&StateSpec::Fock(n), 16).unwrap();
            let c = covariance(&st).unwrap();
            let want = n as f64 + 0.5;
            assert!((c.gamma_at(0, 0) - want).abs() < 1e-12);
            assert!((c.gamma_at(1, 1) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn covariance_of_coherent_state_means() {
        let st = build(&StateSpec::Coherent(0.8), 32).unwrap();
        let c = covariance(&st).unwrap();
        assert!((c.means[0] - 0.8 * std::f64::consts::SQRT_2).abs() < 1e-10);
        assert!(c.means[1].abs() < 1e-10);
        assert!((c.gamma_at(0, 0) - 0.5).abs() < 1e-10);
        assert!((c.gamma_at(1, 1) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn covariance_of_tmsv_matches_closed_form() {
        let s = 0.5;
        let d = 24;
        let tmsv = apply_unitary(
            &FockState::vacuum(2, d),
            &two_mode_squeezer(s, 0.0, d),
        )
        .unwrap();
        let c = covariance(&tmsv).unwrap();
        let ch = (2.0 * s).cosh() / 2.0;
        let sh = (2.0 * s).sinh() / 2.0;
        for j in 0..4 {
            assert!((c.gamma_at(j, j) - ch).abs() < 1e-9, "diag {j}");
        }
        // off-diagonal block sinh(2s)/2 · diag(1, −1); sign of the p₁p₂
        // correlation follows ζ real positive in Ŝ = exp(−ζa₁†a₂† + ...)
        assert!((c.gamma_at(0, 2).abs() - sh).abs() < 1e-9);
        assert!((c.gamma_at(1, 3).abs() - sh).abs() < 1e-9);
        assert!((c.gamma_at(0, 2) + c.gamma_at(1, 3)).abs() < 1e-9, "opposite signs");
        assert!(c.gamma_at(0, 3).abs() < 1e-9);
        // physical state: ν_min ≥ 1/2
        let nus = symplectic_eigenvalues(&c).unwrap();
        assert!(nus.min() >= 0.5 - 1e-8);
    }

    #[test]
    fn symplectic_eigenvalues_closed_forms() {
        let vac = covariance(&FockState::vacuum(1, 8)).unwrap();
        assert!((symplectic_eigenvalues(&vac).unwrap().nus[0] - 0.5).abs() < 1e-12);

        let th = covariance(&build(&StateSpec::Thermal(1.0), 64).unwrap()).unwrap();
        assert!((symplectic_eigenvalues(&th).unwrap().nus[0] - 1.5).abs() < 1e-9);
    }

    #[test]
    fn partial_transpose_drops_symplectic_eigenvalue_of_tmsv() {
        let s = 0.5;
        let d = 24;
        let tmsv = apply_unitary(
            &FockState::vacuum(2, d),
            &two_mode_squeezer(s, 0.0, d),
        )
        .unwrap()
        .to_density();
        let pt = partial_transpose(&tmsv, 1).unwrap();
        let c = covariance_unchecked(&pt).unwrap();
        let nus = symplectic_eigenvalues(&c).unwrap();
        let want = (-2.0 * s).exp() / 2.0;
        assert!((nus.min() - want).abs() < 1e-8, "{} vs {want}", nus.min());
        assert!((want - 0.18394).abs() < 1e-5);

        // PT on the covariance is the p₂ sign flip
        let c0 = covariance(&tmsv).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let flip = |k: usize| if k == 3 { -1.0 } else { 1.0 };
                let want = c0.gamma_at(i, j) * flip(i) * flip(j);
                assert!((c.gamma_at(i, j) - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn h_closed_forms_and_inverse() {
        assert_eq!(h(0.5).unwrap(), 0.0);
        assert!((h(1.5).unwrap() - 2.0 * 2.0f64.ln()).abs() < 1e-12);
        assert_eq!(h_inverse(0.0).unwrap(), 0.5);
        for x in [0.5, 0.62, 1.5, 3.0, 40.0] {
            let y = h(x).unwrap();
            assert!((h_inverse(y).unwrap() - x).abs() < 1e-10, "x = {x}");
        }
        assert!(h(0.4).is_err());
    }

    #[test]
    fn entropies_on_simple_states() {
        let pure = build(&StateSpec::Fock(2), 16).unwrap();
        assert_eq!(von_neumann_entropy(&pure).unwrap(), 0.0);
        assert!((renyi2_entropy(&pure)).abs() < 1e-12);

        let half = build(&StateSpec::NoisySinglePhoton(0.5), 8).unwrap();
        assert!((von_neumann_entropy(&half).unwrap() - 2.0f64.ln()).abs() < 1e-12);
        assert!((renyi2_entropy(&half) - 2.0f64.ln()).abs() < 1e-12);

        let th = build(&StateSpec::Thermal(1.0), 64).unwrap();
        assert!((von_neumann_entropy(&th).unwrap() - 2.0 * 2.0f64.ln()).abs() < 1e-9);
        assert!((renyi2_entropy(&th) - 3.0f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn reference_gaussian_round_trips() {
        // vacuum → vacuum
        let vac = FockState::vacuum(1, 16);
        let g = reference_gaussian_fock(&covariance(&vac).unwrap(), 16).unwrap();
        assert!((g.fidelity(&vac).unwrap() - 1.0).abs() < 1e-9);

        // cov of |1⟩ → thermal n̄ = 1
        let one = build(&StateSpec::Fock(1), 64).unwrap();
        let g = reference_gaussian_fock(&covariance(&one).unwrap(), 64).unwrap();
        let th = build(&StateSpec::Thermal(1.0), 64).unwrap();
        let diff = g.density_matrix().sub(&th.density_matrix()).max_abs();
        assert!(diff < 1e-9, "|ρ_G − τ₁| = {diff}");

        // generic round trip: covariance(ρ_G(c)) = c within 1e-6
        for spec in [
            StateSpec::Coherent(0.7),
            StateSpec::SqueezedVacuum(0.5),
            StateSpec::EvenCat(1.2),
            StateSpec::NoisySinglePhoton(0.3),
        ] {
            let st = build(&spec, 128).unwrap();
            let c = covariance(&st).unwrap();
            let g = reference_gaussian_fock(&c, 128).unwrap();
            let c2 = covariance(&g).unwrap();
            for i in 0..2 {
                assert!((c.means[i] - c2.means[i]).abs() < 1e-6, "{spec} mean {i}");
                for j in 0..2 {
                    assert!(
                        (c.gamma_at(i, j) - c2.gamma_at(i, j)).abs() < 1e-6,
                        "{spec} Γ[{i}{j}]: {} vs {}",
                        c.gamma_at(i, j),
                        c2.gamma_at(i, j)
                    );
                }
            }
        }
    }

    #[test]
    fn rotated_squeezed_displaced_covariance_round_trip() {
        // a covariance with all entries nonzero
        let d = 48;
        let mut st = FockState::vacuum(1, d);
        st = apply_unitary(&st, &squeezer(0.4, d)).unwrap();
        st = apply_unitary(&st, &phase_rotation(0.9, d)).unwrap();
        st = apply_unitary(&st, &displacement(Complex64::new(0.3, -0.5), d)).unwrap();
        let c = covariance(&st).unwrap();
        assert!(c.gamma_at(0, 1).abs() > 1e-3, "rotation must tilt Γ");
        let g = reference_gaussian_fock(&c, d).unwrap();
        // Gaussian pure state: ρ_G should be the state itself
        assert!((g.fidelity(&st).unwrap() - 1.0).abs() < 1e-7);
        let c2 = covariance(&g).unwrap();
        for i in 0..2 {
            assert!((c.means[i] - c2.means[i]).abs() < 1e-7);
            for j in 0..2 {
                assert!((c.gamma_at(i, j) - c2.gamma_at(i, j)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn entropy_gap_values_and_bound() {
        let gap0 = gaussian_entropy_gap(&SymplecticSpectrum { nus: vec![0.5] }).unwrap();
        assert_eq!(gap0, 0.0);
        let bound = (2.0f64 / std::f64::consts::E).ln();
        assert!(gap0 >= bound);

        let gap1 = gaussian_entropy_gap(&SymplecticSpectrum { nus: vec![1.5] }).unwrap();
        let want = 3.0f64.ln() - 2.0 * 2.0f64.ln();
        assert!((gap1 - want).abs() < 1e-12);
        assert!((want + 0.28768).abs() < 1e-5);

        let gap_big = gaussian_entropy_gap(&SymplecticSpectrum {
            nus: vec![1000.5],
        })
        .unwrap();
        assert!((gap_big - bound).abs() < 1e-3);
    }

    #[test]
    fn thermal_difference_is_monotone_and_bounded() {
        let mut prev = -f64::INFINITY;
        for k in 0..=40 {
            let nbar = 10f64.powf(-3.0 + 7.0 * k as f64 / 40.0);
            let d = thermal_entropy_difference(nbar).unwrap();
            assert!(d > prev, "not monotone at n̄ = {nbar}");
            assert!(d <= (std::f64::consts::E / 2.0).ln() + 1e-12);
            prev = d;
        }
    }

    #[test]
    fn reference_entropy_two_routes_agree() {
        // S₁(ρ_G) from the symplectic spectrum vs the Fock-basis eigensolve
        for spec in [
            StateSpec::Fock(1),
            StateSpec::EvenCat(1.0),
            StateSpec::PhaseAveragedCoherent(1.0),
            StateSpec::NoisySinglePhoton(0.35),
        ] {
            let st = build(&spec, 64).unwrap();
            let c = covariance(&st).unwrap();
            let nus = symplectic_eigenvalues(&c).unwrap();
            let via_spectrum = h(nus.nus[0]).unwrap();
            let rho_g = reference_gaussian_fock(&c, 64).unwrap();
            let via_eigensolve = von_neumann_entropy(&rho_g).unwrap();
            assert!(
                (via_spectrum - via_eigensolve).abs() < 1e-5,
                "{spec}: {via_spectrum} vs {via_eigensolve}"
            );
        }
    }

    #[test]
    fn physicality_of_catalog_states() {
        for spec in [
            StateSpec::Fock(3),
            StateSpec::EvenCat(1.5),
            StateSpec::OddCat(0.9),
            StateSpec::PhaseAveragedCoherent(1.3),
            StateSpec::RandomMixed { n_max: 5, seed: 11 },
        ] {
            let st = build(&spec, 64).unwrap();
            let nus = symplectic_eigenvalues(&covariance(&st).unwrap()).unwrap();
            assert!(nus.min() >= 0.5 - 1e-8, "{spec}: ν = {}", nus.min());
        }
    }
}
