//! Catalog of benchmark states: Fock, phase-averaged coherent, even/odd
//! cats, photon-number-entangled states, photon-subtracted two-mode squeezed
//! vacuum, entangled coherent states, noisy single photons, random
//! pure/mixed states, and the Gaussian reference families (vacuum, coherent,
//! squeezed vacuum, thermal) the bound suites compare against.
//!
//! Families with printed closed-form quadrature distributions double as
//! independent oracles for the generic engine.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    apply_unitary, displacement, squeezer, two_mode_squeezer, FockState, DEFAULT_TAIL_TOLERANCE,
};
use crate::linalg::CMat;
use crate::quadrature::{
    simpson_integral, QuadratureDirection, QuadratureDistribution, QuadratureGrid,
    CAPTURE_TOLERANCE,
};
use crate::rng::SplitMix64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One state family with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    /// |n⟩
    Fock(usize),
    /// e^{−γ²} Σ γ²ⁿ/n! |n⟩⟨n|
    PhaseAveragedCoherent(f64),
    /// ∝ |γ⟩ + |−γ⟩
    EvenCat(f64),
    /// ∝ |γ⟩ − |−γ⟩
    OddCat(f64),
    /// √(1−f)|00⟩ + √f|11⟩
    Pnes(f64),
    /// â₁â₂ Ŝ₁₂(s e^{iφ}) |00⟩, normalized
    PhotonSubtractedTmsv { s: f64, phi: f64 },
    /// ∝ |γ⟩|γ⟩ − |−γ⟩|−γ⟩
    EntangledCoherent(f64),
    /// (1−f)|0⟩⟨0| + f|1⟩⟨1|
    NoisySinglePhoton(f64),
    /// Σ cₙ|n⟩, cₙ real i.i.d. normal then normalized (uniform on the sphere)
    RandomPure { n_max: usize, seed: u64 },
    /// f|χ₁⟩⟨χ₁| + (1−f)|χ₂⟩⟨χ₂| with f uniform and two independent draws
    RandomMixed { n_max: usize, seed: u64 },
    Vacuum,
    /// |α⟩ with real α
    Coherent(f64),
    /// Ŝ(r)|0⟩
    SqueezedVacuum(f64),
    /// thermal state with mean photon number n̄
    Thermal(f64),
}

impl StateSpec {
    pub fn validate(&self) -> Result<()> {
        use StateSpec::*;
        let bad = |msg: String| Err(Error::DomainError(msg));
        match *self {
            PhaseAveragedCoherent(g) | EvenCat(g) | EntangledCoherent(g) if g < 0.0 => {
                bad(format!("gamma must be >= 0, got {g}"))
            }
            OddCat(g) if g <= 0.0 => bad(format!("odd cat needs gamma > 0, got {g}")),
            Pnes(f) | NoisySinglePhoton(f) if !(0.0..=1.0).contains(&f) => {
                bad(format!("fraction must lie in [0,1], got {f}"))
            }
            PhotonSubtractedTmsv { s, .. } if s <= 0.0 => {
                bad(format!("squeezing must be > 0, got {s}"))
            }
            RandomPure { n_max, .. } | RandomMixed { n_max, .. } if n_max < 1 => {
                bad("n_max must be >= 1".into())
            }
            Coherent(a) if a < 0.0 => bad(format!("coherent amplitude must be >= 0, got {a}")),
            SqueezedVacuum(r) if r < 0.0 => bad(format!("squeezing must be >= 0, got {r}")),
            Thermal(n) if n < 0.0 => bad(format!("mean photon number must be >= 0, got {n}")),
            _ => Ok(()),
        }
    }

    pub fn modes(&self) -> usize {
        use StateSpec::*;
        match self {
            Pnes(_) | PhotonSubtractedTmsv { .. } | EntangledCoherent(_) => 2,
            _ => 1,
        }
    }

    /// Cutoff policy: 64 for single-mode, 24 per mode for two-mode, 40 for
    /// entangled coherent states (their √2γ local amplitudes need the room).
    pub fn default_cutoff(&self) -> usize {
        use StateSpec::*;
        match self {
            EntangledCoherent(_) => 40,
            Pnes(_) => 4,
            PhotonSubtractedTmsv { .. } => 24,
            Fock(n) => 64.max(n + 1),
            RandomPure { n_max, .. } | RandomMixed { n_max, .. } => (n_max + 1).max(8),
            NoisySinglePhoton(_) => 8,
            _ => 64,
        }
    }

    /// Canonical text form, e.g. `fock:3`, `evencat:1.2`,
    /// `randpure:5:seed=42`.
    pub fn canonical(&self) -> String {
        use StateSpec::*;
        match self {
            Fock(n) => format!("fock:{n}"),
            PhaseAveragedCoherent(g) => format!("pacoh:{g}"),
            EvenCat(g) => format!("evencat:{g}"),
            OddCat(g) => format!("oddcat:{g}"),
            Pnes(f) => format!("pnes:{f}"),
            PhotonSubtractedTmsv { s, phi } => {
                if *phi == 0.0 {
                    format!("pstmsv:{s}")
                } else {
                    format!("pstmsv:{s}:{phi}")
                }
            }
            EntangledCoherent(g) => format!("ecs:{g}"),
            NoisySinglePhoton(f) => format!("noisy1:{f}"),
            RandomPure { n_max, seed } => format!("randpure:{n_max}:seed={seed}"),
            RandomMixed { n_max, seed } => format!("randmixed:{n_max}:seed={seed}"),
            Vacuum => "vacuum".into(),
            Coherent(a) => format!("coherent:{a}"),
            SqueezedVacuum(r) => format!("sqvac:{r}"),
            Thermal(n) => format!("thermal:{n}"),
        }
    }

    /// Parse the canonical text form.
    pub fn parse(text: &str) -> Result<Self> {
        use StateSpec::*;
        let err = |msg: &str| Error::ParseError(text.to_string(), msg.to_string());
        let parts: Vec<&str> = text.split(':').collect();
        let family = parts[0].to_ascii_lowercase();
        let real = |idx: usize| -> Result<f64> {
            parts
                .get(idx)
                .ok_or_else(|| err("missing parameter"))?
                .parse::<f64>()
                .map_err(|_| err("parameter is not a number"))
        };
        let integer = |idx: usize| -> Result<usize> {
            parts
                .get(idx)
                .ok_or_else(|| err("missing parameter"))?
                .parse::<usize>()
                .map_err(|_| err("parameter is not an integer"))
        };
        let seed = |idx: usize| -> Result<u64> {
            let raw = parts.get(idx).ok_or_else(|| err("missing seed"))?;
            raw.strip_prefix("seed=")
                .unwrap_or(raw)
                .parse::<u64>()
                .map_err(|_| err("seed is not a 64-bit integer"))
        };
        let spec = match family.as_str() {
            "fock" => Fock(integer(1)?),
            "pacoh" => PhaseAveragedCoherent(real(1)?),
            "evencat" => EvenCat(real(1)?),
            "oddcat" => OddCat(real(1)?),
            "pnes" => Pnes(real(1)?),
            "pstmsv" => PhotonSubtractedTmsv {
                s: real(1)?,
                phi: if parts.len() > 2 { real(2)? } else { 0.0 },
            },
            "ecs" => EntangledCoherent(real(1)?),
            "noisy1" => NoisySinglePhoton(real(1)?),
            "randpure" => RandomPure {
                n_max: integer(1)?,
                seed: seed(2)?,
            },
            "randmixed" => RandomMixed {
                n_max: integer(1)?,
                seed: seed(2)?,
            },
            "vacuum" => Vacuum,
            "coherent" => Coherent(real(1)?),
            "sqvac" => SqueezedVacuum(real(1)?),
            "thermal" => Thermal(real(1)?),
            _ => return Err(err("unknown family")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl std::fmt::Display for StateSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// Coherent amplitudes e^{−α²/2} αⁿ/√n! for real α, via logs.
fn coherent_amplitudes(alpha: f64, cutoff: usize) -> Vec<f64> {
    let mut out = vec![0.0; cutoff];
    if alpha == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let mut log_fact = 0.0;
    for (n, slot) in out.iter_mut().enumerate() {
        if n > 0 {
            log_fact += (n as f64).ln();
        }
        *slot = (n as f64 * alpha.abs().ln() - 0.5 * log_fact - 0.5 * alpha * alpha).exp()
            * if alpha < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    }
    out
}

fn truncation_error(spec: &StateSpec, cutoff: usize, tail: f64) -> Error {
    // find a cutoff that would satisfy the tolerance
    let mut required = cutoff;
    for c in (cutoff + 1)..4096 {
        if tail_mass_for(spec, c) <= DEFAULT_TAIL_TOLERANCE {
            required = c;
            break;
        }
    }
    Error::TruncationError {
        cutoff,
        tail_mass: tail,
        tolerance: DEFAULT_TAIL_TOLERANCE,
        required,
    }
}

/// Exact (series) tail mass the family leaves above `cutoff`.
fn tail_mass_for(spec: &StateSpec, cutoff: usize) -> f64 {
    use StateSpec::*;
    match *spec {
        Fock(n) => {
            if n < cutoff {
                0.0
            } else {
                1.0
            }
        }
        PhaseAveragedCoherent(g) | Coherent(g) => poisson_tail(g * g, cutoff),
        EvenCat(g) => cat_tail(g, 1.0, cutoff),
        OddCat(g) => cat_tail(g, -1.0, cutoff),
        Pnes(_) | NoisySinglePhoton(_) => {
            if cutoff >= 2 {
                0.0
            } else {
                1.0
            }
        }
        PhotonSubtractedTmsv { s, .. } => {
            let t2 = s.tanh().powi(2);
            // weights (n+1)² t²⁽ⁿ⁺¹⁾ on |nn⟩
            let weight = |n: usize| ((n + 1) as f64).powi(2) * t2.powi(n as i32 + 1);
            let mut total = 0.0;
            let mut tail = 0.0;
            let mut n = 0usize;
            loop {
                let w = weight(n);
                total += w;
                if n >= cutoff {
                    tail += w;
                }
                if n > cutoff && w < 1e-18 * total {
                    break;
                }
                n += 1;
            }
            tail / total
        }
        EntangledCoherent(g) => {
            let total = 2.0 - 2.0 * (-4.0 * g * g).exp();
            if total <= 0.0 {
                return 0.0;
            }
            // per-mode coefficients e^{−γ²}γ^{m+n}(1−(−1)^{m+n})/√(m!n!)
            let amp = coherent_amplitudes(g, cutoff);
            let mut captured = 0.0;
            for (m, am) in amp.iter().enumerate() {
                for (n, an) in amp.iter().enumerate() {
                    if (m + n) % 2 == 1 {
                        captured += 4.0 * (am * an).powi(2);
                    }
                }
            }
            ((total - captured) / total).max(0.0)
        }
        RandomPure { n_max, .. } | RandomMixed { n_max, .. } => {
            if n_max < cutoff {
                0.0
            } else {
                1.0
            }
        }
        Vacuum => 0.0,
        SqueezedVacuum(r) => {
            let t2 = r.tanh().powi(2);
            // |c_{2k}|² = (2k)!/(k!)² (tanh²r/4)^k / cosh r
            let mut total = 0.0;
            let mut tail = 0.0;
            let mut w = 1.0 / r.cosh();
            let mut k = 0usize;
            loop {
                total += w;
                if 2 * k >= cutoff {
                    tail += w;
                }
                if 2 * k > cutoff && w < 1e-18 * total {
                    break;
                }
                k += 1;
                let kk = k as f64;
                w *= t2 * (2.0 * kk - 1.0) / (2.0 * kk);
            }
            tail / total
        }
        Thermal(nbar) => {
            if nbar <= 0.0 {
                0.0
            } else {
                (nbar / (nbar + 1.0)).powi(cutoff as i32)
            }
        }
    }
}

fn poisson_tail(lambda: f64, cutoff: usize) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    let mut term = (-lambda).exp();
    let mut head = term;
    for n in 1..cutoff {
        term *= lambda / n as f64;
        head += term;
    }
    (1.0 - head).max(0.0)
}

fn cat_tail(gamma: f64, sign: f64, cutoff: usize) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    let g2 = gamma * gamma;
    let total = 2.0 * (1.0 + sign * (-2.0 * g2).exp());
    // |c_n|² of |γ⟩ ± |−γ⟩ is 4 e^{−γ²} γ²ⁿ/n! on the allowed parity
    let parity = if sign > 0.0 { 0 } else { 1 };
    let mut term = (-g2).exp();
    let mut captured = 0.0;
    for n in 0..cutoff {
        if n > 0 {
            term *= g2 / n as f64;
        }
        if n % 2 == parity {
            captured += 4.0 * term;
        }
    }
    ((total - captured) / total).max(0.0)
}

/// Build a state at the given cutoff, with the exact tail recorded.
pub fn build(spec: &StateSpec, cutoff: usize) -> Result<FockState> {
    use StateSpec::*;
    spec.validate()?;
    let tail = tail_mass_for(spec, cutoff);
    if tail > DEFAULT_TAIL_TOLERANCE {
        return Err(truncation_error(spec, cutoff, tail));
    }
    let state = match *spec {
        Fock(n) => {
            let mut v = vec![ZERO; cutoff];
            v[n] = Complex64::new(1.0, 0.0);
            FockState::make_pure(&v, 1, cutoff)?
        }
        PhaseAveragedCoherent(g) => {
            let amp = coherent_amplitudes(g, cutoff);
            let mut rho = CMat::zeros(cutoff);
            let norm: f64 = amp.iter().map(|a| a * a).sum();
            for (n, a) in amp.iter().enumerate() {
                rho[(n, n)] = Complex64::new(a * a / norm, 0.0);
            }
            FockState::from_density_matrix(rho, 1, cutoff)?
        }
        EvenCat(g) | OddCat(g) => {
            let parity = if matches!(spec, EvenCat(_)) { 0 } else { 1 };
            let amp = coherent_amplitudes(g, cutoff);
            let v: Vec<Complex64> = amp
                .iter()
                .enumerate()
                .map(|(n, &a)| {
                    if n % 2 == parity {
                        Complex64::new(a, 0.0)
                    } else {
                        ZERO
                    }
                })
                .collect();
            FockState::make_pure(&v, 1, cutoff)?
        }
        Pnes(f) => {
            let mut v = vec![ZERO; cutoff * cutoff];
            v[0] = Complex64::new((1.0 - f).sqrt(), 0.0);
            v[cutoff + 1] = Complex64::new(f.sqrt(), 0.0);
            FockState::make_pure(&v, 2, cutoff)?
        }
        PhotonSubtractedTmsv { s, phi } => {
            // â₁â₂ Ŝ|00⟩ ∝ Σ (n+1) λⁿ⁺¹ |nn⟩ with λ = −e^{iφ} tanh s
            let lambda = Complex64::from_polar(s.tanh(), phi + std::f64::consts::PI);
            let mut v = vec![ZERO; cutoff * cutoff];
            let mut pw = lambda;
            for n in 0..cutoff {
                v[n * cutoff + n] = pw * (n as f64 + 1.0);
                pw *= lambda;
            }
            FockState::make_pure(&v, 2, cutoff)?
        }
        EntangledCoherent(g) => {
            let amp = coherent_amplitudes(g, cutoff);
            let mut v = vec![ZERO; cutoff * cutoff];
            for m in 0..cutoff {
                for n in 0..cutoff {
                    if (m + n) % 2 == 1 {
                        v[m * cutoff + n] = Complex64::new(2.0 * amp[m] * amp[n], 0.0);
                    }
                }
            }
            FockState::make_pure(&v, 2, cutoff)?
        }
        NoisySinglePhoton(f) => {
            let mut rho = CMat::zeros(cutoff);
            rho[(0, 0)] = Complex64::new(1.0 - f, 0.0);
            rho[(1, 1)] = Complex64::new(f, 0.0);
            FockState::from_density_matrix(rho, 1, cutoff)?
        }
        RandomPure { n_max, seed } => random_pure_at(n_max, seed, cutoff)?,
        RandomMixed { n_max, seed } => random_mixed_at(n_max, seed, cutoff)?,
        Vacuum => FockState::vacuum(1, cutoff),
        Coherent(a) => {
            let amp = coherent_amplitudes(a, cutoff);
            let v: Vec<Complex64> = amp.iter().map(|&a| Complex64::new(a, 0.0)).collect();
            FockState::make_pure(&v, 1, cutoff)?
        }
        SqueezedVacuum(r) => {
            return apply_unitary(&FockState::vacuum(1, cutoff), &squeezer(r, cutoff));
        }
        Thermal(nbar) => {
            let mut rho = CMat::zeros(cutoff);
            let mut w = 1.0 / (nbar + 1.0);
            let mut total = 0.0;
            for n in 0..cutoff {
                rho[(n, n)] = Complex64::new(w, 0.0);
                total += w;
                let _ = n;
                w *= nbar / (nbar + 1.0);
            }
            for n in 0..cutoff {
                rho[(n, n)] /= total;
            }
            FockState::from_density_matrix(rho, 1, cutoff)?
        }
    };
    Ok(state.with_tail_mass(tail))
}

/// Build at the family's default cutoff.
pub fn build_default(spec: &StateSpec) -> Result<FockState> {
    build(spec, spec.default_cutoff())
}

/// Random pure state Σ cₙ|n⟩, n ≤ n_max, real cₙ uniform on the unit sphere
/// (i.i.d. standard normals, normalized). Deterministic per seed.
pub fn random_pure(n_max: usize, seed: u64) -> Result<FockState> {
    random_pure_at(n_max, seed, n_max + 1)
}

fn random_pure_at(n_max: usize, seed: u64, cutoff: usize) -> Result<FockState> {
    if n_max < 1 {
        return Err(Error::DomainError("n_max must be >= 1".into()));
    }
    if cutoff < n_max + 1 {
        return Err(Error::ShapeError("cutoff below n_max + 1".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut v = vec![ZERO; cutoff];
    for slot in v.iter_mut().take(n_max + 1) {
        *slot = Complex64::new(rng.next_gaussian(), 0.0);
    }
    FockState::make_pure(&v, 1, cutoff)
}

/// f|χ₁⟩⟨χ₁| + (1−f)|χ₂⟩⟨χ₂| with f ~ U[0,1]; the two pure draws use
/// derived sub-streams so the triple is reproducible from one seed.
pub fn random_mixed(n_max: usize, seed: u64) -> Result<FockState> {
    random_mixed_at(n_max, seed, n_max + 1)
}

fn random_mixed_at(n_max: usize, seed: u64, cutoff: usize) -> Result<FockState> {
    let mut rng = SplitMix64::new(seed);
    let f = rng.next_f64();
    let chi1 = random_pure_at(n_max, rng.next_u64(), cutoff)?;
    let chi2 = random_pure_at(n_max, rng.next_u64(), cutoff)?;
    let rho = chi1
        .density_matrix()
        .scale(Complex64::new(f, 0.0))
        .add(&chi2.density_matrix().scale(Complex64::new(1.0 - f, 0.0)));
    FockState::from_density_matrix(rho, 1, cutoff)
}

/// The PNES fraction reached by photon subtraction at squeezing s:
/// f = sinh²s / cosh 2s, bounded above by 1/2.
pub fn pnes_fraction_from_squeezing(s: f64) -> f64 {
    s.sinh().powi(2) / (2.0 * s).cosh()
}

/// Closed-form quadrature density for the families the source prints one
/// for: Fock, phase-averaged coherent, even/odd cat, PNES.
pub fn analytic_quadrature(
    spec: &StateSpec,
    dir: &QuadratureDirection,
    grid: QuadratureGrid,
) -> Result<QuadratureDistribution> {
    use StateSpec::*;
    if dir.modes() != spec.modes() {
        return Err(Error::ShapeError("direction arity mismatch".into()));
    }
    let density: Vec<f64> = match *spec {
        Fock(n) => {
            let table = crate::quadrature::oscillator_table(&grid, n + 1);
            (0..grid.points)
                .map(|i| {
                    let psi = table[i * (n + 1) + n];
                    psi * psi
                })
                .collect()
        }
        PhaseAveragedCoherent(g) => {
            let lambda = g * g;
            // Poisson mixture of Fock densities; extend terms well past the mean
            let terms = ((lambda + 40.0 * lambda.sqrt() + 60.0) as usize).max(8);
            let table = crate::quadrature::oscillator_table(&grid, terms);
            let mut weights = Vec::with_capacity(terms);
            let mut w = (-lambda).exp();
            for n in 0..terms {
                if n > 0 {
                    w *= lambda / n as f64;
                }
                weights.push(w);
            }
            (0..grid.points)
                .map(|i| {
                    let row = &table[i * terms..(i + 1) * terms];
                    weights
                        .iter()
                        .zip(row.iter())
                        .map(|(w, psi)| w * psi * psi)
                        .sum()
                })
                .collect()
        }
        EvenCat(g) | OddCat(g) => {
            let sign = if matches!(spec, EvenCat(_)) { 1.0 } else { -1.0 };
            let phi = dir.phis()[0];
            let g2 = g * g;
            let norm = std::f64::consts::PI.sqrt() * (1.0 + sign * (-2.0 * g2).exp());
            let (c, s) = (phi.cos(), phi.sin());
            grid.xs()
                .iter()
                .map(|&x| {
                    let envelope = (-x * x - 2.0 * g2 * c * c).exp();
                    let hump = (2.0 * std::f64::consts::SQRT_2 * g * x * c).cosh();
                    let fringe = (2.0 * std::f64::consts::SQRT_2 * g * x * s).cos();
                    envelope * (hump + sign * fringe) / norm
                })
                .collect()
        }
        Pnes(f) => {
            let theta = dir.thetas()[0];
            let phi_sum = dir.phis()[0] + dir.phis()[1];
            let c4 = (4.0 * theta).cos();
            let s2 = (2.0 * theta).sin();
            let cross = 8.0 * (f * (1.0 - f)).sqrt() * phi_sum.cos() * s2;
            let norm = 8.0 * std::f64::consts::PI.sqrt();
            grid.xs()
                .iter()
                .map(|&x| {
                    let x2 = x * x;
                    let x4 = x2 * x2;
                    let poly = 8.0
                        + f * (-5.0 + 4.0 * x2 + 4.0 * x4)
                        + f * (-3.0 + 12.0 * x2 - 4.0 * x4) * c4
                        + cross * (2.0 * x2 - 1.0);
                    (-x2).exp() * poly / norm
                })
                .collect()
        }
        _ => return Err(Error::NotAnalytic(spec.canonical())),
    };
    let mass = simpson_integral(&density, grid.step());
    if mass < 1.0 - CAPTURE_TOLERANCE {
        return Err(Error::GridError {
            captured: mass,
            suggested_half_width: grid.half_width * 1.5,
        });
    }
    QuadratureDistribution::from_density(grid, density, 1e-12)
}

/// The photon-subtracted TMSV expressed through the squeezer acting on a
/// PNES: Ŝ₁₂(ζ) R̂₁(φ+π) (cosh s|00⟩ + sinh s|11⟩)/√cosh 2s.
pub fn photon_subtracted_tmsv_via_pnes(s: f64, phi: f64, cutoff: usize) -> Result<FockState> {
    let f = pnes_fraction_from_squeezing(s);
    let pnes = build(&StateSpec::Pnes(f), cutoff)?;
    let rot = crate::fock::phase_rotation_two_mode(phi + std::f64::consts::PI, 0.0, cutoff);
    let rotated = apply_unitary(&pnes, &rot)?;
    apply_unitary(&rotated, &two_mode_squeezer(s, phi, cutoff))
}

/// |α⟩ built by displacing vacuum (exercises the displacement operator
/// rather than the closed-form amplitudes).
pub fn coherent_via_displacement(alpha: Complex64, cutoff: usize) -> Result<FockState> {
    apply_unitary(&FockState::vacuum(1, cutoff), &displacement(alpha, cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{distribution, moment};

    fn grid10() -> QuadratureGrid {
        QuadratureGrid::new(0.0, 10.0, 4096).unwrap()
    }

    #[test]
    fn even_cat_limit_is_vacuum() {
        let cat = build(&StateSpec::EvenCat(0.0), 16).unwrap();
        let vac = FockState::vacuum(1, 16);
        assert!((cat.fidelity(&vac).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_averaged_coherent_purity_matches_bessel_series() {
        // μ = e^{−2γ²} I₀(2γ²), I₀ by series
        let g: f64 = 1.0;
        let st = build(&StateSpec::PhaseAveragedCoherent(g), 64).unwrap();
        let z = 2.0 * g * g;
        let mut i0 = 0.0;
        let mut term = 1.0;
        for k in 0..200 {
            if k > 0 {
                term *= (z / 2.0) * (z / 2.0) / ((k * k) as f64);
            }
            i0 += term;
            if term < 1e-18 * i0 {
                break;
            }
        }
        let want = (-z).exp() * i0;
        assert!((st.purity() - want).abs() < 1e-10, "{} vs {want}", st.purity());
        assert!((want - 0.30851).abs() < 1e-5);
    }

    #[test]
    fn pnes_fraction_mapping() {
        let f = pnes_fraction_from_squeezing(0.5);
        assert!((f - 0.5f64.sinh().powi(2) / 1.0f64.cosh()).abs() < 1e-15);
        assert!((f - 0.175973).abs() < 1e-6, "f = {f}");
        // bounded by 1/2 for all s
        for s in [0.1, 0.5, 1.0, 2.0, 5.0, 20.0] {
            assert!(pnes_fraction_from_squeezing(s) <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn truncation_errors_carry_a_usable_hint() {
        match build(&StateSpec::PhaseAveragedCoherent(3.0), 12) {
            Err(Error::TruncationError { required, .. }) => {
                assert!(required > 12);
                assert!(build(&StateSpec::PhaseAveragedCoherent(3.0), required).is_ok());
            }
            other => panic!("expected TruncationError, got {other:?}"),
        }
    }

    #[test]
    fn analytic_fock_matches_trivials() {
        let dir = QuadratureDirection::single(0.3);
        let d0 = analytic_quadrature(&StateSpec::Fock(0), &dir, grid10()).unwrap();
        assert!((d0.moments.variance - 0.5).abs() < 1e-9);
        let d1 = analytic_quadrature(&StateSpec::Fock(1), &dir, grid10()).unwrap();
        let mid = d1.grid.points / 2;
        assert!(d1.density[mid] < 1e-5);
    }

    #[test]
    fn analytic_families_match_generic_engine() {
        let cases: Vec<(StateSpec, f64)> = vec![
            (StateSpec::Fock(2), 0.0),
            (StateSpec::Fock(3), 1.1),
            (StateSpec::PhaseAveragedCoherent(1.2), 0.7),
            (StateSpec::EvenCat(1.0), 0.4),
            (StateSpec::EvenCat(1.7), 2.0),
            (StateSpec::OddCat(0.8), 1.3),
        ];
        for (spec, phi) in cases {
            let dir = QuadratureDirection::single(phi);
            let analytic = analytic_quadrature(&spec, &dir, grid10()).unwrap();
            let state = build(&spec, 64).unwrap();
            let engine = distribution(&state, &dir, grid10()).unwrap();
            let worst = analytic
                .density
                .iter()
                .zip(engine.density.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-8, "{spec} at phi={phi}: max abs {worst}");
        }
    }

    #[test]
    fn analytic_pnes_matches_engine_across_directions() {
        let quarter = std::f64::consts::FRAC_PI_4;
        for (f, theta, p1, p2) in [
            (0.3, std::f64::consts::FRAC_PI_3, 0.2, 0.5),
            (1.0, quarter, 0.0, 0.0),
            (0.5, quarter, 0.0, 0.0),
            (0.7, 0.3, 1.0, 2.2),
        ] {
            let spec = StateSpec::Pnes(f);
            let dir = QuadratureDirection::two_mode(theta, p1, p2);
            let analytic = analytic_quadrature(&spec, &dir, grid10()).unwrap();
            let state = build(&spec, 4).unwrap();
            let engine = distribution(&state, &dir, grid10()).unwrap();
            let worst = analytic
                .density
                .iter()
                .zip(engine.density.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-8, "f={f} θ={theta}: max abs {worst}");
        }
    }

    #[test]
    fn random_pure_is_normalized_and_deterministic() {
        let a = random_pure(5, 42).unwrap();
        let b = random_pure(5, 42).unwrap();
        assert!((a.fidelity(&b).unwrap() - 1.0).abs() < 1e-12);
        if let crate::fock::Body::Pure(v) = a.body() {
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        let c = random_pure(5, 43).unwrap();
        assert!(a.fidelity(&c).unwrap() < 1.0 - 1e-6);
    }

    #[test]
    fn random_pure_ground_occupation_is_uniform_on_average() {
        // E|c₀|² = 1/(n_max+1) on the sphere; 3 standard errors of 10⁴ draws
        let n_max = 5;
        let draws = 10_000;
        let mut acc = 0.0;
        for i in 0..draws {
            let st = random_pure(n_max, SplitMix64::stream(7, i as u64).next_u64()).unwrap();
            if let crate::fock::Body::Pure(v) = st.body() {
                acc += v[0].norm_sqr();
            }
        }
        let mean = acc / draws as f64;
        let dim = (n_max + 1) as f64;
        let var = 3.0 / (dim * (dim + 2.0)) - 1.0 / (dim * dim);
        let se = (var / draws as f64).sqrt();
        assert!(
            (mean - 1.0 / dim).abs() < 3.0 * se,
            "mean {mean} expected {} ± {}",
            1.0 / dim,
            3.0 * se
        );
    }

    #[test]
    fn random_mixed_purity_matches_algebra_oracle() {
        for seed in [1u64, 7, 99] {
            let st = random_mixed(5, seed).unwrap();
            // recover f and the two draws the same way the builder does
            let mut rng = SplitMix64::new(seed);
            let f = rng.next_f64();
            let chi1 = random_pure(5, rng.next_u64()).unwrap();
            let chi2 = random_pure(5, rng.next_u64()).unwrap();
            let overlap = chi1.fidelity(&chi2).unwrap();
            let want = f * f + (1.0 - f) * (1.0 - f) + 2.0 * f * (1.0 - f) * overlap;
            assert!((st.purity() - want).abs() < 1e-10);
        }
    }

    #[test]
    fn random_mixed_is_a_valid_state() {
        for seed in 0..20u64 {
            let st = random_mixed(4, seed).unwrap();
            let evs = crate::linalg::hermitian_eigenvalues(&st.density_matrix()).unwrap();
            assert!(evs[0] > -1e-12);
            let tr: f64 = evs.iter().sum();
            assert!((tr - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn photon_subtraction_identity_fidelity() {
        let (s, phi) = (0.5, 0.3);
        let direct = build(&StateSpec::PhotonSubtractedTmsv { s, phi }, 24).unwrap();
        let via_pnes = photon_subtracted_tmsv_via_pnes(s, phi, 24).unwrap();
        let fid = direct.fidelity(&via_pnes).unwrap();
        assert!(fid > 1.0 - 1e-8, "fidelity {fid}");
    }

    #[test]
    fn photon_subtracted_tmsv_matches_operator_route() {
        // independent route: apply Ŝ then â₁â₂ matrices, renormalize
        let (s, phi) = (0.4, 0.0);
        let d = 20;
        let tmsv = apply_unitary(&FockState::vacuum(2, d), &two_mode_squeezer(s, phi, d)).unwrap();
        if let crate::fock::Body::Pure(v) = tmsv.body() {
            let mut sub = vec![ZERO; d * d];
            for m in 0..d - 1 {
                for n in 0..d - 1 {
                    sub[m * d + n] =
                        v[(m + 1) * d + (n + 1)] * (((m + 1) * (n + 1)) as f64).sqrt();
                }
            }
            let via_ops = FockState::make_pure(&sub, 2, d).unwrap();
            let direct = build(&StateSpec::PhotonSubtractedTmsv { s, phi }, d).unwrap();
            assert!((via_ops.fidelity(&direct).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn coherent_via_displacement_matches_closed_form() {
        let st = coherent_via_displacement(Complex64::new(0.8, 0.0), 48).unwrap();
        let closed = build(&StateSpec::Coherent(0.8), 48).unwrap();
        assert!((st.fidelity(&closed).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ecs_is_normalized_and_odd_total_parity() {
        let st = build(&StateSpec::EntangledCoherent(1.0), 40).unwrap();
        if let crate::fock::Body::Pure(v) = st.body() {
            for m in 0..40 {
                for n in 0..40 {
                    if (m + n) % 2 == 0 {
                        assert_eq!(v[m * 40 + n], ZERO);
                    }
                }
            }
        }
        // mean photon of each half matches coherent |γ| content scaled by normalization
        assert!(st.mean_photon_number() > 0.0);
    }

    #[test]
    fn thermal_moments() {
        let st = build(&StateSpec::Thermal(1.0), 64).unwrap();
        assert!((st.mean_photon_number() - 1.0).abs() < 1e-10);
        let dir = QuadratureDirection::single(0.0);
        // Var x = n̄ + 1/2
        let m2 = moment(&st, &dir, 2).unwrap();
        assert!((m2 - 1.5).abs() < 1e-10);
    }

    #[test]
    fn spec_strings_round_trip() {
        let specs = [
            "fock:3",
            "pacoh:1.2",
            "evencat:0.9",
            "oddcat:1.4",
            "pnes:0.4",
            "pstmsv:0.5",
            "ecs:1",
            "noisy1:0.25",
            "randpure:5:seed=42",
            "randmixed:5:seed=9",
            "vacuum",
            "coherent:0.8",
            "sqvac:0.5",
            "thermal:1",
        ];
        for s in specs {
            let spec = StateSpec::parse(s).unwrap();
            let round = StateSpec::parse(&spec.canonical()).unwrap();
            assert_eq!(spec, round, "{s}");
        }
        assert!(StateSpec::parse("pnes:1.5").is_err());
        assert!(StateSpec::parse("nonsense:1").is_err());
        assert!(StateSpec::parse("randpure:0:seed=1").is_err());
    }
}
