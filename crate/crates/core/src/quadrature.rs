//! Generic quadrature-distribution engine.
//!
//! For an N-mode state ρ and network angles (Θ, Φ), the observable is
//!
//! ```text
//!   Q̂_{Θ,Φ} = Σ_j c_j q̂_{j,φ_j},    q̂_{j,φ} = (â_j e^{iφ} + â_j† e^{-iφ})/√2,
//! ```
//!
//! with the c_j the cosine/sine products of the angular coordinates Θ. The
//! probability density of Q̂ is what a single homodyne detector sees behind
//! the linear network L̂ = B̂(θ₁)R̂₁(φ₁)R̂₂(φ₂): the distribution of q̂₁ at
//! phase 0 in the state L̂ρL̂†. The two-mode path here applies exactly that
//! reduction in Fock space (the beam splitter is the coordinate rotation
//! u = c₁x₁ + c₂x₂, marginalized exactly by the partial trace), then
//! evaluates the single-mode density
//!
//! ```text
//!   P(x; φ) = Σ_{m,n} ρ_{mn} e^{iφ(m-n)} ψ_m(x) ψ_n(x)
//! ```
//!
//! with ψ_n the real harmonic-oscillator eigenfunctions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{beam_splitter, phase_rotation_two_mode, Body, FockState};
use crate::linalg::{solve_real, CMat};

/// Mass the grid must capture before a distribution is accepted.
pub const CAPTURE_TOLERANCE: f64 = 1e-8;

/// Negative densities above this magnitude are an error; smaller dips are
/// clipped to zero.
pub const DEFAULT_NEGATIVITY_TOLERANCE: f64 = 1e-14;

/// One homodyne observable: N-1 mixing angles, N phases, derived c_j.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureDirection {
    thetas: Vec<f64>,
    phis: Vec<f64>,
    coeffs: Vec<f64>,
}

impl QuadratureDirection {
    /// c₁ = cos θ₁, c_j = cos θ_j Π_{k<j} sin θ_k, c_N = Π sin θ_k.
    pub fn new(thetas: Vec<f64>, phis: Vec<f64>) -> Result<Self> {
        let n = phis.len();
        if n == 0 || thetas.len() + 1 != n {
            return Err(Error::ShapeError(format!(
                "need N phases and N-1 angles, got {} and {}",
                n,
                thetas.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(n);
        let mut sin_prod = 1.0;
        for theta in &thetas {
            coeffs.push(theta.cos() * sin_prod);
            sin_prod *= theta.sin();
        }
        coeffs.push(sin_prod);
        Ok(Self { thetas, phis, coeffs })
    }

    pub fn single(phi: f64) -> Self {
        Self {
            thetas: vec![],
            phis: vec![phi],
            coeffs: vec![1.0],
        }
    }

    pub fn two_mode(theta1: f64, phi1: f64, phi2: f64) -> Self {
        Self::new(vec![theta1], vec![phi1, phi2]).expect("two-mode arity is consistent")
    }

    pub fn modes(&self) -> usize {
        self.phis.len()
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Unit vector u with Var(Q) = uᵀ Γ u in the (x₁,p₁,x₂,p₂,...) basis:
    /// u_x = c_j cos φ_j, u_p = c_j sin φ_j.
    pub fn phase_space_vector(&self) -> Vec<f64> {
        let mut u = Vec::with_capacity(2 * self.modes());
        for (c, phi) in self.coeffs.iter().zip(self.phis.iter()) {
            u.push(c * phi.cos());
            u.push(c * phi.sin());
        }
        u
    }
}

/// Uniform evaluation grid: `points` samples on [center - hw, center + hw].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    pub center: f64,
    pub half_width: f64,
    pub points: usize,
}

impl QuadratureGrid {
    pub fn new(center: f64, half_width: f64, points: usize) -> Result<Self> {
        if half_width <= 0.0 {
            return Err(Error::DomainError("half_width must be positive".into()));
        }
        if points < 256 || !points.is_power_of_two() {
            return Err(Error::DomainError(format!(
                "points must be a power of two >= 256, got {points}"
            )));
        }
        Ok(Self {
            center,
            half_width,
            points,
        })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.center - self.half_width + self.step() * i as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.x(i)).collect()
    }
}

/// Cached moments of a distribution.
#[derive(Debug, Clone, Copy)]
pub struct GridMoments {
    pub mean: f64,
    pub variance: f64,
    pub central3: f64,
    pub central4: f64,
}

/// A normalized probability density on a grid.
#[derive(Debug, Clone)]
pub struct QuadratureDistribution {
    pub grid: QuadratureGrid,
    pub density: Vec<f64>,
    pub moments: GridMoments,
}

impl QuadratureDistribution {
    /// Normalize raw density values and cache moments. `negativity_tol`
    /// bounds how negative a value may be before it is an error rather than
    /// clipping noise.
    pub fn from_density(
        grid: QuadratureGrid,
        mut density: Vec<f64>,
        negativity_tol: f64,
    ) -> Result<Self> {
        if density.len() != grid.points {
            return Err(Error::ShapeError("density length != grid points".into()));
        }
        for (i, v) in density.iter_mut().enumerate() {
            if *v < 0.0 {
                if *v < -negativity_tol {
                    return Err(Error::NotDistribution {
                        x: grid.x(i),
                        density: *v,
                    });
                }
                *v = 0.0;
            }
        }
        let dx = grid.step();
        let mass = simpson_integral(&density, dx);
        if mass <= 0.0 {
            return Err(Error::DegenerateInput("zero-mass density".into()));
        }
        for v in density.iter_mut() {
            *v /= mass;
        }
        let moments = grid_moments(&grid, &density);
        if moments.variance <= 0.0 {
            return Err(Error::DegenerateInput("zero-variance distribution".into()));
        }
        Ok(Self {
            grid,
            density,
            moments,
        })
    }

    pub fn integral(&self) -> f64 {
        simpson_integral(&self.density, self.grid.step())
    }

    /// CSV rows `x,density`, 12 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "x,density")?;
        for (i, d) in self.density.iter().enumerate() {
            writeln!(w, "{:.11e},{:.11e}", self.grid.x(i), d)?;
        }
        Ok(())
    }
}

fn grid_moments(grid: &QuadratureGrid, density: &[f64]) -> GridMoments {
    let dx = grid.step();
    let mean = simpson_weighted(density, dx, |i, p| grid.x(i) * p);
    let variance = simpson_weighted(density, dx, |i, p| {
        let d = grid.x(i) - mean;
        d * d * p
    });
    let central3 = simpson_weighted(density, dx, |i, p| {
        let d = grid.x(i) - mean;
        d * d * d * p
    });
    let central4 = simpson_weighted(density, dx, |i, p| {
        let d = grid.x(i) - mean;
        d * d * d * d * p
    });
    GridMoments {
        mean,
        variance,
        central3,
        central4,
    }
}

/// Composite Simpson on a uniform grid; a 3/8 tail handles an odd interval
/// count.
pub fn simpson_integral(values: &[f64], dx: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    if n < 4 {
        // trapezoid fallback for tiny inputs
        let mut s = 0.5 * (values[0] + values[n - 1]);
        for v in &values[1..n - 1] {
            s += v;
        }
        return s * dx;
    }
    let intervals = n - 1;
    let (simpson_end, mut total) = if intervals.is_multiple_of(2) {
        (n - 1, 0.0)
    } else {
        // Simpson 3/8 on the last three intervals
        let tail = 3.0 * dx / 8.0
            * (values[n - 4] + 3.0 * values[n - 3] + 3.0 * values[n - 2] + values[n - 1]);
        (n - 4, tail)
    };
    let mut s = values[0] + values[simpson_end];
    let mut i = 1;
    while i < simpson_end {
        s += 4.0 * values[i];
        if i + 1 < simpson_end {
            s += 2.0 * values[i + 1];
        }
        i += 2;
    }
    total += s * dx / 3.0;
    total
}

fn simpson_weighted<F: Fn(usize, f64) -> f64>(density: &[f64], dx: f64, f: F) -> f64 {
    let vals: Vec<f64> = density.iter().enumerate().map(|(i, &p)| f(i, p)).collect();
    simpson_integral(&vals, dx)
}

/// ψ_n(x_i) for n < dim, row per grid point, via the stable normalized
/// recurrence ψ_{n+1} = x √(2/(n+1)) ψ_n − √(n/(n+1)) ψ_{n-1}.
///
/// The normalized form avoids factorial overflow at any n; the remaining
/// limit is the e^{-x²/2} seed underflowing past |x| ≈ 38.6, which caps
/// reliable synthesis at n ≈ 700 (the capture check catches it beyond).
pub fn oscillator_table(grid: &QuadratureGrid, dim: usize) -> Vec<f64> {
    let g = grid.points;
    let norm0 = std::f64::consts::PI.powf(-0.25);
    let mut table = vec![0.0; g * dim];
    for i in 0..g {
        let x = grid.x(i);
        let row = &mut table[i * dim..(i + 1) * dim];
        row[0] = norm0 * (-0.5 * x * x).exp();
        if dim > 1 {
            row[1] = x * std::f64::consts::SQRT_2 * row[0];
        }
        for n in 1..dim.saturating_sub(1) {
            let a = x * (2.0 / (n as f64 + 1.0)).sqrt();
            let b = (n as f64 / (n as f64 + 1.0)).sqrt();
            row[n + 1] = a * row[n] - b * row[n - 1];
        }
    }
    table
}

/// Prepared single-mode evaluator: one oscillator table plus either the
/// state amplitudes or the phase harmonics of the density matrix, so a
/// φ-sweep costs O(d·G) per angle.
pub struct SingleModeEvaluator {
    grid: QuadratureGrid,
    dim: usize,
    table: Vec<f64>,
    kind: SingleModeKind,
    negativity_tol: f64,
}

enum SingleModeKind {
    Pure(Vec<Complex64>),
    /// harmonics[j][i] = Σ_{m-n=j} ρ_{mn} ψ_m(x_i) ψ_n(x_i)
    Density(Vec<Vec<Complex64>>),
}

impl SingleModeEvaluator {
    pub fn new(state: &FockState, grid: QuadratureGrid) -> Result<Self> {
        Self::with_negativity_tolerance(state, grid, DEFAULT_NEGATIVITY_TOLERANCE)
    }

    /// Entanglement witnesses evaluate partially transposed local modes,
    /// whose densities may dip slightly negative; they pass a looser bound.
    pub fn with_negativity_tolerance(
        state: &FockState,
        grid: QuadratureGrid,
        negativity_tol: f64,
    ) -> Result<Self> {
        if state.modes() != 1 {
            return Err(Error::ShapeError("single-mode evaluator".into()));
        }
        let dim = state.cutoff();
        let table = oscillator_table(&grid, dim);
        let kind = match state.body() {
            Body::Pure(v) => SingleModeKind::Pure(v.clone()),
            Body::Density(rho) => {
                let g = grid.points;
                let mut harmonics: Vec<Vec<Complex64>> =
                    vec![vec![Complex64::new(0.0, 0.0); g]; dim];
                for i in 0..g {
                    let row = &table[i * dim..(i + 1) * dim];
                    for (j, harmonic) in harmonics.iter_mut().enumerate() {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for n in 0..(dim - j) {
                            let m = n + j;
                            acc += rho[(m, n)] * (row[m] * row[n]);
                        }
                        harmonic[i] = acc;
                    }
                }
                SingleModeKind::Density(harmonics)
            }
        };
        Ok(Self {
            grid,
            dim,
            table,
            kind,
            negativity_tol,
        })
    }

    /// Raw density values at phase φ (not yet normalized).
    pub fn raw_density(&self, phi: f64) -> Vec<f64> {
        let g = self.grid.points;
        let d = self.dim;
        let mut out = vec![0.0; g];
        match &self.kind {
            SingleModeKind::Pure(c) => {
                let rotated: Vec<Complex64> = c
                    .iter()
                    .enumerate()
                    .map(|(n, z)| z * Complex64::from_polar(1.0, phi * n as f64))
                    .collect();
                for (i, o) in out.iter_mut().enumerate() {
                    let row = &self.table[i * d..(i + 1) * d];
                    let mut w = Complex64::new(0.0, 0.0);
                    for (z, psi) in rotated.iter().zip(row.iter()) {
                        w += z * psi;
                    }
                    *o = w.norm_sqr();
                }
            }
            SingleModeKind::Density(harmonics) => {
                let phases: Vec<Complex64> = (0..d)
                    .map(|j| Complex64::from_polar(1.0, phi * j as f64))
                    .collect();
                for i in 0..g {
                    let mut acc = harmonics[0][i].re;
                    for j in 1..d {
                        let z = harmonics[j][i];
                        if z.re == 0.0 && z.im == 0.0 {
                            continue;
                        }
                        acc += 2.0 * (phases[j] * z).re;
                    }
                    out[i] = acc;
                }
            }
        }
        out
    }

    pub fn distribution(&self, phi: f64) -> Result<QuadratureDistribution> {
        let raw = self.raw_density(phi);
        let mass = simpson_integral(&raw, self.grid.step());
        if mass < 1.0 - CAPTURE_TOLERANCE {
            return Err(Error::GridError {
                captured: mass,
                suggested_half_width: self.grid.half_width * 1.5,
            });
        }
        QuadratureDistribution::from_density(self.grid, raw, self.negativity_tol)
    }
}

/// Prepared two-mode evaluator. Each direction costs an O(d²·G) density
/// synthesis; beam splitters are memoized by angle since the coarse angular
/// scan revisits few distinct θ.
pub struct TwoModeEvaluator {
    grid: QuadratureGrid,
    dim: usize,
    table: Vec<f64>,
    state: FockState,
    splitters: std::cell::RefCell<std::collections::HashMap<u64, std::rc::Rc<crate::fock::ModeOperator>>>,
}

impl TwoModeEvaluator {
    pub fn new(state: &FockState, grid: QuadratureGrid) -> Result<Self> {
        if state.modes() != 2 {
            return Err(Error::ShapeError("two-mode evaluator".into()));
        }
        Ok(Self {
            grid,
            dim: state.cutoff(),
            table: oscillator_table(&grid, state.cutoff()),
            state: state.clone(),
            splitters: std::cell::RefCell::new(std::collections::HashMap::new()),
        })
    }

    fn splitter(&self, theta: f64) -> std::rc::Rc<crate::fock::ModeOperator> {
        self.splitters
            .borrow_mut()
            .entry(theta.to_bits())
            .or_insert_with(|| std::rc::Rc::new(beam_splitter(theta, self.dim)))
            .clone()
    }

    /// Reduced mode-1 density matrix after the network L̂ = B̂(θ)R̂₁R̂₂.
    fn reduced_after_network(&self, dir: &QuadratureDirection) -> CMat {
        let d = self.dim;
        let theta = dir.thetas()[0];
        let rot = phase_rotation_two_mode(dir.phis()[0], dir.phis()[1], d);
        let bs = self.splitter(theta);
        match self.state.body() {
            Body::Pure(v) => {
                let (w1, _) = rot.apply_vec(v);
                let (w, _) = bs.apply_vec(&w1);
                // ρ₁ = W W† with W[m][n] = w[m*d + n]
                let mut red = CMat::zeros(d);
                for m1 in 0..d {
                    for m2 in m1..d {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for n in 0..d {
                            acc += w[m1 * d + n] * w[m2 * d + n].conj();
                        }
                        red[(m1, m2)] = acc;
                        red[(m2, m1)] = acc.conj();
                    }
                }
                red
            }
            Body::Density(rho) => {
                let (r1, _) = rot.apply_density(rho);
                let (r2, _) = bs.apply_density(&r1);
                let mut red = CMat::zeros(d);
                for m1 in 0..d {
                    for m2 in 0..d {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for n in 0..d {
                            acc += r2[(m1 * d + n, m2 * d + n)];
                        }
                        red[(m1, m2)] = acc;
                    }
                }
                red
            }
        }
    }

    pub fn raw_density(&self, dir: &QuadratureDirection) -> Vec<f64> {
        let d = self.dim;
        let red = self.reduced_after_network(dir);
        let g = self.grid.points;
        let mut out = vec![0.0; g];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.table[i * d..(i + 1) * d];
            let mut acc = 0.0;
            for m in 0..d {
                acc += red[(m, m)].re * row[m] * row[m];
                for n in (m + 1)..d {
                    acc += 2.0 * red[(m, n)].re * row[m] * row[n];
                }
            }
            *o = acc;
        }
        out
    }

    pub fn distribution(&self, dir: &QuadratureDirection) -> Result<QuadratureDistribution> {
        let raw = self.raw_density(dir);
        let mass = simpson_integral(&raw, self.grid.step());
        if mass < 1.0 - CAPTURE_TOLERANCE {
            return Err(Error::GridError {
                captured: mass,
                suggested_half_width: self.grid.half_width * 1.5,
            });
        }
        QuadratureDistribution::from_density(self.grid, raw, DEFAULT_NEGATIVITY_TOLERANCE)
    }
}

/// Distribution of Q̂_{Θ,Φ} on the given grid.
pub fn distribution(
    state: &FockState,
    dir: &QuadratureDirection,
    grid: QuadratureGrid,
) -> Result<QuadratureDistribution> {
    if state.modes() != dir.modes() {
        return Err(Error::ShapeError(format!(
            "state has {} mode(s), direction {}",
            state.modes(),
            dir.modes()
        )));
    }
    state.ensure_truncation_safe()?;
    match state.modes() {
        1 => SingleModeEvaluator::new(state, grid)?.distribution(dir.phis()[0]),
        2 => TwoModeEvaluator::new(state, grid)?.distribution(dir),
        _ => Err(Error::ShapeError("N > 2 not supported".into())),
    }
}

/// Grid centered on ⟨Q⟩ with half-width 8·max(1, √Var), operator-side.
pub fn default_grid(state: &FockState, dir: &QuadratureDirection) -> Result<QuadratureGrid> {
    let mean = moment(state, dir, 1)?;
    let second = moment(state, dir, 2)?;
    let var = (second - mean * mean).max(0.0);
    QuadratureGrid::new(mean, 8.0 * var.sqrt().max(1.0), 4096)
}

/// Raw operator moment ⟨Q̂_{Θ,Φ}^order⟩ via ladder algebra (order 1..=4).
///
/// The state is padded by `order` levels first: q̂ᵏ climbs k rungs, so the
/// power applied at the bare cutoff would silently truncate.
pub fn moment(state: &FockState, dir: &QuadratureDirection, order: u32) -> Result<f64> {
    if !(1..=4).contains(&order) {
        return Err(Error::DomainError(format!("moment order {order} not in 1..=4")));
    }
    if state.modes() != dir.modes() {
        return Err(Error::ShapeError("state/direction mode mismatch".into()));
    }
    let state = &state.pad_to(state.cutoff() + order as usize)?;
    let d = state.cutoff();
    // tridiagonal ⟨m|q̂_φ|n⟩: q[n-1, n] = e^{iφ}√(n/2), q[n, n-1] = conj
    let tridiag = |phi: f64| -> Vec<Complex64> {
        // store superdiagonal entries e^{iφ}√(n/2), n = 1..d-1
        (1..d)
            .map(|n| Complex64::from_polar((n as f64 / 2.0).sqrt(), phi))
            .collect()
    };
    match state.modes() {
        1 => {
            let sup = tridiag(dir.phis()[0]);
            let apply = |v: &[Complex64]| -> Vec<Complex64> {
                let mut out = vec![Complex64::new(0.0, 0.0); d];
                for m in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    if m + 1 < d {
                        acc += sup[m] * v[m + 1];
                    }
                    if m > 0 {
                        acc += sup[m - 1].conj() * v[m - 1];
                    }
                    out[m] = acc;
                }
                out
            };
            Ok(expectation_of_power(state, apply, order))
        }
        2 => {
            let (c1, c2) = (dir.coeffs()[0], dir.coeffs()[1]);
            let s1 = tridiag(dir.phis()[0]);
            let s2 = tridiag(dir.phis()[1]);
            let apply = |v: &[Complex64]| -> Vec<Complex64> {
                let mut out = vec![Complex64::new(0.0, 0.0); d * d];
                for m in 0..d {
                    for n in 0..d {
                        let mut acc = Complex64::new(0.0, 0.0);
                        if m + 1 < d {
                            acc += sup_scaled(&s1, m, c1) * v[(m + 1) * d + n];
                        }
                        if m > 0 {
                            acc += sup_scaled(&s1, m - 1, c1).conj() * v[(m - 1) * d + n];
                        }
                        if n + 1 < d {
                            acc += sup_scaled(&s2, n, c2) * v[m * d + n + 1];
                        }
                        if n > 0 {
                            acc += sup_scaled(&s2, n - 1, c2).conj() * v[m * d + n - 1];
                        }
                        out[m * d + n] = acc;
                    }
                }
                out
            };
            Ok(expectation_of_power(state, apply, order))
        }
        _ => Err(Error::ShapeError("N > 2 not supported".into())),
    }
}

fn sup_scaled(sup: &[Complex64], idx: usize, c: f64) -> Complex64 {
    sup[idx] * c
}

fn expectation_of_power<F>(state: &FockState, apply: F, order: u32) -> f64
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    match state.body() {
        Body::Pure(v) => {
            let mut w = v.clone();
            for _ in 0..order {
                w = apply(&w);
            }
            let ip: Complex64 = v.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum();
            ip.re
        }
        Body::Density(rho) => {
            // tr(ρ Q̂ᵏ) = Σ_col ⟨col| Q̂ᵏ ρ |col⟩ column by column
            let n = rho.n;
            let mut acc = 0.0;
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                for (i, c) in col.iter_mut().enumerate() {
                    *c = rho[(i, j)];
                }
                let mut w = col.clone();
                for _ in 0..order {
                    w = apply(&w);
                }
                acc += w[j].re;
            }
            acc
        }
    }
}

/// Central moments (mean, variance, μ₃, μ₄) of Q̂_{Θ,Φ}, operator-side.
pub fn central_moments(state: &FockState, dir: &QuadratureDirection) -> Result<(f64, f64, f64, f64)> {
    let m1 = moment(state, dir, 1)?;
    let m2 = moment(state, dir, 2)?;
    let m3 = moment(state, dir, 3)?;
    let m4 = moment(state, dir, 4)?;
    let var = m2 - m1 * m1;
    let mu3 = m3 - 3.0 * m2 * m1 + 2.0 * m1.powi(3);
    let mu4 = m4 - 4.0 * m3 * m1 + 6.0 * m2 * m1 * m1 - 3.0 * m1.powi(4);
    Ok((m1, var, mu3, mu4))
}

/// A trigonometric polynomial Σ_k a_k cos(kφ) + b_k sin(kφ) over the
/// harmonics of one moment order (k ≡ order mod 2, k ≤ order).
#[derive(Debug, Clone)]
pub struct TrigPolynomial {
    /// (harmonic k, cos coefficient, sin coefficient); k = 0 carries the
    /// constant in the cos slot.
    pub terms: Vec<(usize, f64, f64)>,
}

impl TrigPolynomial {
    pub fn eval(&self, phi: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(k, a, b)| a * (k as f64 * phi).cos() + b * (k as f64 * phi).sin())
            .sum()
    }
}

/// Recover the degree-n trig polynomial ⟨q̂_φⁿ⟩ from its values at the n+1
/// equally spaced phases φ_j = φ₀ + jπ/(n+1).
pub fn reconstruct_moment_field(samples: &[f64], phi0: f64, order: usize) -> Result<TrigPolynomial> {
    if samples.len() != order + 1 {
        return Err(Error::ShapeError(format!(
            "order {} needs exactly {} samples, got {}",
            order,
            order + 1,
            samples.len()
        )));
    }
    // harmonics with the parity of `order`
    let harmonics: Vec<usize> = (0..=order)
        .filter(|k| k % 2 == order % 2)
        .collect();
    let mut columns: Vec<(usize, bool)> = Vec::new(); // (k, is_sin)
    for &k in &harmonics {
        columns.push((k, false));
        if k > 0 {
            columns.push((k, true));
        }
    }
    debug_assert_eq!(columns.len(), order + 1);
    let n = order + 1;
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for j in 0..n {
        let phi = phi0 + j as f64 * std::f64::consts::PI / n as f64;
        for (ci, &(k, is_sin)) in columns.iter().enumerate() {
            let arg = k as f64 * phi;
            a[j * n + ci] = if is_sin { arg.sin() } else { arg.cos() };
        }
        b[j] = samples[j];
    }
    let sol = solve_real(&a, &b, n)?;
    let mut terms: Vec<(usize, f64, f64)> = harmonics.iter().map(|&k| (k, 0.0, 0.0)).collect();
    for (ci, &(k, is_sin)) in columns.iter().enumerate() {
        let slot = terms.iter_mut().find(|t| t.0 == k).unwrap();
        if is_sin {
            slot.2 = sol[ci];
        } else {
            slot.1 = sol[ci];
        }
    }
    Ok(TrigPolynomial { terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{apply_unitary, squeezer, FockState};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fock(n: usize, cutoff: usize) -> FockState {
        let mut v = vec![c(0.0, 0.0); cutoff];
        v[n] = c(1.0, 0.0);
        FockState::make_pure(&v, 1, cutoff).unwrap()
    }

    fn grid_default() -> QuadratureGrid {
        QuadratureGrid::new(0.0, 10.0, 4096).unwrap()
    }

    #[test]
    fn vacuum_density_is_standard_gaussian_half_variance() {
        let vac = FockState::vacuum(1, 16);
        for phi in [0.0, 0.7, 2.1] {
            let dist = distribution(&vac, &QuadratureDirection::single(phi), grid_default()).unwrap();
            for (i, &p) in dist.density.iter().enumerate() {
                let x = dist.grid.x(i);
                let want = (-x * x).exp() / std::f64::consts::PI.sqrt();
                assert!((p - want).abs() < 1e-10, "x={x} p={p} want={want}");
            }
            assert!((dist.moments.variance - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn fock_one_density_vanishes_at_origin() {
        let one = fock(1, 16);
        let dist = distribution(&one, &QuadratureDirection::single(0.3), grid_default()).unwrap();
        // grid is symmetric, so x = 0 is mid-range up to rounding
        let mid = dist.grid.points / 2;
        let near_zero = dist.density[mid - 1..=mid + 1]
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!(near_zero < 1e-4);
        // H₁(x)² Gaussian form, any phase
        for (i, &p) in dist.density.iter().enumerate() {
            let x = dist.grid.x(i);
            let want = 2.0 * x * x * (-x * x).exp() / std::f64::consts::PI.sqrt();
            assert!((p - want).abs() < 1e-10);
        }
    }

    #[test]
    fn density_normalizes_and_matches_grid_invariants() {
        let one = fock(3, 32);
        let dist = distribution(&one, &QuadratureDirection::single(1.1), grid_default()).unwrap();
        assert!((dist.integral() - 1.0).abs() < 1e-12);
        assert!(dist.density.iter().all(|&p| p >= 0.0));
        assert!((dist.moments.variance - 3.5).abs() < 1e-8); // n + 1/2
    }

    #[test]
    fn grid_too_narrow_is_reported() {
        let wide = fock(9, 32);
        let narrow = QuadratureGrid::new(0.0, 1.0, 256).unwrap();
        match distribution(&wide, &QuadratureDirection::single(0.0), narrow) {
            Err(Error::GridError {
                captured,
                suggested_half_width,
            }) => {
                assert!(captured < 1.0 - 1e-8);
                assert!(suggested_half_width > 1.0);
            }
            other => panic!("expected GridError, got {other:?}"),
        }
    }

    #[test]
    fn operator_moments_match_ladder_oracle() {
        // ⟨q̂²⟩ = n + 1/2, ⟨q̂⁴⟩ = 3(2n² + 2n + 1)/4
        for n in 0..4 {
            let st = fock(n, 24);
            let dir = QuadratureDirection::single(0.9);
            let m2 = moment(&st, &dir, 2).unwrap();
            let m4 = moment(&st, &dir, 4).unwrap();
            let nf = n as f64;
            assert!((m2 - (nf + 0.5)).abs() < 1e-12);
            assert!((m4 - 0.75 * (2.0 * nf * nf + 2.0 * nf + 1.0)).abs() < 1e-12);
        }
        // |1⟩: ⟨q⁴⟩ = 3.75 → kurtosis 5/3
        let st = fock(1, 24);
        let dir = QuadratureDirection::single(0.0);
        let (_, var, _, mu4) = central_moments(&st, &dir).unwrap();
        assert!((mu4 - 3.75).abs() < 1e-12);
        assert!((mu4 / (var * var) - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn grid_and_operator_moments_agree() {
        let st = fock(2, 32);
        let dir = QuadratureDirection::single(0.4);
        let dist = distribution(&st, &dir, grid_default()).unwrap();
        let m1 = moment(&st, &dir, 1).unwrap();
        let m2 = moment(&st, &dir, 2).unwrap();
        assert!((dist.moments.mean - m1).abs() < 1e-7);
        assert!((dist.moments.variance - (m2 - m1 * m1)).abs() < 1e-7);
    }

    #[test]
    fn gaussian_kurtosis_is_three_for_squeezed_vacuum() {
        let sq = apply_unitary(&FockState::vacuum(1, 48), &squeezer(0.4, 48)).unwrap();
        for phi in [0.0, 0.5, 1.3] {
            let dir = QuadratureDirection::single(phi);
            let (_, var, _, mu4) = central_moments(&sq, &dir).unwrap();
            assert!((mu4 / (var * var) - 3.0).abs() < 1e-8, "phi={phi}");
        }
    }

    #[test]
    fn phase_periodicity_mirrors_distribution() {
        let st = fock(1, 16);
        // superpose with vacuum to break symmetry
        let mut v = vec![c(0.0, 0.0); 16];
        v[0] = c(0.8, 0.0);
        v[1] = c(0.0, 0.6);
        let st2 = FockState::make_pure(&v, 1, 16).unwrap();
        for state in [st, st2] {
            let phi: f64 = 0.77;
            let a = distribution(&state, &QuadratureDirection::single(phi), grid_default()).unwrap();
            let b = distribution(
                &state,
                &QuadratureDirection::single(phi + std::f64::consts::PI),
                grid_default(),
            )
            .unwrap();
            let g = a.grid.points;
            for i in 0..g {
                assert!((a.density[i] - b.density[g - 1 - i]).abs() < 1e-10);
            }
            let ja = crate::info::negentropy(&a).unwrap();
            let jb = crate::info::negentropy(&b).unwrap();
            assert!((ja - jb).abs() < 1e-9, "negentropy must be mirror-invariant");
        }
    }

    #[test]
    fn direction_coefficients_are_normalized() {
        let dir = QuadratureDirection::two_mode(0.9, 0.1, 2.2);
        let s: f64 = dir.coeffs().iter().map(|c| c * c).sum();
        assert!((s - 1.0).abs() < 1e-12);
        let dir3 = QuadratureDirection::new(vec![0.3, 1.1], vec![0.0, 0.5, 1.0]).unwrap();
        let s3: f64 = dir3.coeffs().iter().map(|c| c * c).sum();
        assert!((s3 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_mode_product_state_reduces_to_convolution() {
        // product of |1⟩ and vacuum: P_Q = marginal mixing both modes;
        // oracle: direct convolution of scaled single-mode densities
        let d = 12;
        let one = fock(1, d);
        let vac = FockState::vacuum(1, d);
        let prod = crate::fock::tensor_product(&one, &vac).unwrap();
        let theta: f64 = 0.6;
        let dir = QuadratureDirection::two_mode(theta, 0.0, 0.0);
        let grid = QuadratureGrid::new(0.0, 8.0, 1024).unwrap();
        let got = distribution(&prod, &dir, grid).unwrap();

        let (c1, c2) = (theta.cos(), theta.sin());
        let conv_oracle = |u: f64| -> f64 {
            // ∫ P₁(x) P₂((u - c₁x)/c₂) / c₂ ... with P₁ evaluated at x/c₁ scale:
            // Q = c₁ x₁ + c₂ x₂ ⇒ p(u) = ∫ dx₁ P₁(x₁) P₂((u - c₁x₁)/c₂) / c₂
            let n = 4001;
            let lo = -8.0;
            let hi = 8.0;
            let h = (hi - lo) / (n - 1) as f64;
            let mut acc = 0.0;
            for i in 0..n {
                let x1: f64 = lo + i as f64 * h;
                let p1 = 2.0 * x1 * x1 * (-x1 * x1).exp() / std::f64::consts::PI.sqrt();
                let x2 = (u - c1 * x1) / c2;
                let p2 = (-x2 * x2).exp() / std::f64::consts::PI.sqrt();
                let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                acc += w * p1 * p2 * h;
            }
            acc / c2
        };
        for i in (0..grid.points).step_by(97) {
            let u = got.grid.x(i);
            let want = conv_oracle(u);
            assert!(
                (got.density[i] - want).abs() < 1e-8,
                "u={u}: got {} want {want}",
                got.density[i]
            );
        }
    }

    #[test]
    fn reconstruct_constant_field_order_two() {
        let field = reconstruct_moment_field(&[0.5, 0.5, 0.5], 0.0, 2).unwrap();
        for phi in [0.0, 0.3, 2.9] {
            assert!((field.eval(phi) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn reconstruct_squeezed_variance_field() {
        // Var(φ) = (e^{-2r}cos²φ + e^{2r}sin²φ)/2 for our squeezer convention
        let r = 0.5;
        let d = 48;
        let sq = apply_unitary(&FockState::vacuum(1, d), &squeezer(r, d)).unwrap();
        let phi0 = 0.17;
        let samples: Vec<f64> = (0..3)
            .map(|j| {
                let phi = phi0 + j as f64 * std::f64::consts::PI / 3.0;
                let dir = QuadratureDirection::single(phi);
                let m1 = moment(&sq, &dir, 1).unwrap();
                let m2 = moment(&sq, &dir, 2).unwrap();
                m2 - m1 * m1
            })
            .collect();
        let field = reconstruct_moment_field(&samples, phi0, 2).unwrap();
        for phi in [0.0f64, 0.4, 1.1, 2.8] {
            let want = 0.5 * ((-2.0 * r).exp() * phi.cos().powi(2) + (2.0 * r).exp() * phi.sin().powi(2));
            assert!((field.eval(phi) - want).abs() < 1e-9, "phi={phi}");
        }
    }

    #[test]
    fn reconstruct_order_four_fock_field_is_constant() {
        let st = fock(1, 16);
        let phi0 = 0.0;
        let samples: Vec<f64> = (0..5)
            .map(|j| {
                let phi = phi0 + j as f64 * std::f64::consts::PI / 5.0;
                moment(&st, &QuadratureDirection::single(phi), 4).unwrap()
            })
            .collect();
        let field = reconstruct_moment_field(&samples, phi0, 4).unwrap();
        for phi in [0.1, 0.9, 2.2] {
            assert!((field.eval(phi) - 3.75).abs() < 1e-10);
        }
        // evaluation at the sampled phases reproduces the inputs
        for (j, &s) in samples.iter().enumerate() {
            let phi = phi0 + j as f64 * std::f64::consts::PI / 5.0;
            assert!((field.eval(phi) - s).abs() < 1e-10);
        }
    }

    #[test]
    fn reconstruct_rejects_wrong_sample_count() {
        assert!(matches!(
            reconstruct_moment_field(&[1.0, 2.0], 0.0, 2),
            Err(Error::ShapeError(_))
        ));
    }

    #[test]
    fn simpson_integrates_gaussian_to_machine_precision() {
        let grid = QuadratureGrid::new(0.0, 9.0, 4096).unwrap();
        let vals: Vec<f64> = grid
            .xs()
            .iter()
            .map(|&x| (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt())
            .collect();
        assert!((simpson_integral(&vals, grid.step()) - 1.0).abs() < 1e-12);
    }
}
