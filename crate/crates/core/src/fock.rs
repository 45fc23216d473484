//! Truncated Fock-space representation of one- and two-mode bosonic states
//! and the Gaussian operator algebra acting on them.
//!
//! States live in a number basis |0⟩..|d-1⟩ per mode (two-mode basis index
//! `m*d + n` with `m` the first mode). Operators are kept in structured form
//! where the physics provides one:
//!
//! - phase rotations R̂(φ) = exp(iφ n̂) are diagonal,
//! - beam splitters B̂(θ) = exp[θ(â₁†â₂ − â₂†â₁)] conserve total photon
//!   number and are exponentiated block by block,
//! - the two-mode squeezer Ŝ₁₂(ζ) = exp(−ζâ₁†â₂† + ζ*â₁â₂) conserves the
//!   photon-number difference and is exponentiated at an inflated cutoff,
//!   then truncated back.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{expm, hermitian_eigenvalues, CMat};

/// Population above the cutoff at which a state stops being trusted.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// State body: complex amplitudes for pure states, a Hermitian matrix
/// otherwise.
#[derive(Debug, Clone)]
pub enum Body {
    Pure(Vec<Complex64>),
    Density(CMat),
}

/// A one- or two-mode state in a truncated number basis.
///
/// Constructors validate normalization and Hermiticity. Positivity holds for
/// everything built by the constructors; `partial_transpose` is the one
/// operation that deliberately leaves the positive cone.
#[derive(Debug, Clone)]
pub struct FockState {
    modes: usize,
    cutoff: usize,
    body: Body,
    tail_mass: f64,
}

impl FockState {
    /// Normalized pure state from raw amplitudes (length `cutoff^modes`).
    pub fn make_pure(amplitudes: &[Complex64], modes: usize, cutoff: usize) -> Result<Self> {
        if !(modes == 1 || modes == 2) {
            return Err(Error::ShapeError(format!("modes must be 1 or 2, got {modes}")));
        }
        let dim = cutoff.pow(modes as u32);
        if amplitudes.len() != dim {
            return Err(Error::ShapeError(format!(
                "expected {dim} amplitudes for {modes} mode(s) at cutoff {cutoff}, got {}",
                amplitudes.len()
            )));
        }
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm2 < 1e-300 {
            return Err(Error::DegenerateInput("zero amplitude vector".into()));
        }
        let inv = 1.0 / norm2.sqrt();
        let v: Vec<Complex64> = amplitudes.iter().map(|z| z * inv).collect();
        Ok(Self {
            modes,
            cutoff,
            body: Body::Pure(v),
            tail_mass: 0.0,
        })
    }

    /// Density-matrix state. Checks Hermiticity (1e-12 entrywise) and unit
    /// trace (1e-10). Positivity is verified by an eigensolve for dimensions
    /// up to 256; above that only the principal-minor necessary condition
    /// |ρ_ij|² ≤ ρ_ii ρ_jj is affordable.
    pub fn from_density_matrix(mat: CMat, modes: usize, cutoff: usize) -> Result<Self> {
        if !(modes == 1 || modes == 2) {
            return Err(Error::ShapeError(format!("modes must be 1 or 2, got {modes}")));
        }
        let dim = cutoff.pow(modes as u32);
        if mat.n != dim {
            return Err(Error::ShapeError(format!(
                "expected {dim}x{dim} density matrix, got {0}x{0}",
                mat.n
            )));
        }
        let herm = mat.hermiticity_defect();
        if herm > 1e-12 {
            return Err(Error::NotAState(format!("Hermiticity defect {herm:.3e}")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::NotAState(format!("trace = {tr}")));
        }
        if dim <= 256 {
            let evs = hermitian_eigenvalues(&mat)?;
            if evs[0] < -1e-9 {
                return Err(Error::NotAState(format!("eigenvalue {0:.3e} < 0", evs[0])));
            }
        } else {
            for i in 0..dim {
                if mat[(i, i)].re < -1e-9 {
                    return Err(Error::NotAState(format!(
                        "diagonal entry {0:.3e} < 0",
                        mat[(i, i)].re
                    )));
                }
                for j in (i + 1)..dim {
                    let bound = mat[(i, i)].re.max(0.0) * mat[(j, j)].re.max(0.0);
                    if mat[(i, j)].norm_sqr() > bound + 1e-9 {
                        return Err(Error::NotAState(
                            "off-diagonal exceeds principal-minor bound".into(),
                        ));
                    }
                }
            }
        }
        Ok(Self {
            modes,
            cutoff,
            body: Body::Density(mat),
            tail_mass: 0.0,
        })
    }

    /// Hermitian unit-trace matrix that may fail positivity; produced by
    /// partial transposition and by the entanglement-witness local modes.
    pub fn signed_density(mat: CMat, modes: usize, cutoff: usize) -> Result<Self> {
        let dim = cutoff.pow(modes as u32);
        if mat.n != dim {
            return Err(Error::ShapeError(format!(
                "expected {dim}x{dim} matrix, got {0}x{0}",
                mat.n
            )));
        }
        let herm = mat.hermiticity_defect();
        if herm > 1e-10 {
            return Err(Error::NotAState(format!("Hermiticity defect {herm:.3e}")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(Error::NotAState(format!("trace = {tr}")));
        }
        Ok(Self {
            modes,
            cutoff,
            body: Body::Density(mat),
            tail_mass: 0.0,
        })
    }

    pub fn vacuum(modes: usize, cutoff: usize) -> Self {
        let dim = cutoff.pow(modes as u32);
        let mut v = vec![ZERO; dim];
        v[0] = Complex64::new(1.0, 0.0);
        Self {
            modes,
            cutoff,
            body: Body::Pure(v),
            tail_mass: 0.0,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff.pow(self.modes as u32)
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Record the population estimated to live above the cutoff.
    pub fn with_tail_mass(mut self, tail: f64) -> Self {
        self.tail_mass = tail;
        self
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.body, Body::Pure(_))
    }

    /// Whether the truncation error is inside `tol`.
    pub fn truncation_safe(&self, tol: f64) -> bool {
        self.tail_mass <= tol
    }

    pub fn ensure_truncation_safe(&self) -> Result<()> {
        if self.truncation_safe(DEFAULT_TAIL_TOLERANCE) {
            Ok(())
        } else {
            Err(Error::TruncationError {
                cutoff: self.cutoff,
                tail_mass: self.tail_mass,
                tolerance: DEFAULT_TAIL_TOLERANCE,
                required: self.cutoff * 2,
            })
        }
    }

    /// Materialize the density matrix ρ (a copy for pure bodies).
    pub fn density_matrix(&self) -> CMat {
        match &self.body {
            Body::Density(m) => m.clone(),
            Body::Pure(v) => {
                let n = v.len();
                let mut m = CMat::zeros(n);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] = v[i] * v[j].conj();
                    }
                }
                m
            }
        }
    }

    /// Embed into a larger cutoff (exact zero padding).
    pub fn pad_to(&self, cutoff: usize) -> Result<Self> {
        if cutoff < self.cutoff {
            return Err(Error::ShapeError("pad_to cannot shrink the cutoff".into()));
        }
        if cutoff == self.cutoff {
            return Ok(self.clone());
        }
        let (d, w) = (self.cutoff, cutoff);
        let body = match &self.body {
            Body::Pure(v) => {
                let mut out = vec![ZERO; w.pow(self.modes as u32)];
                if self.modes == 1 {
                    out[..d].copy_from_slice(v);
                } else {
                    for m in 0..d {
                        out[m * w..m * w + d].copy_from_slice(&v[m * d..(m + 1) * d]);
                    }
                }
                Body::Pure(out)
            }
            Body::Density(rho) => {
                let mut out = CMat::zeros(w.pow(self.modes as u32));
                let map = |i: usize| {
                    if self.modes == 1 {
                        i
                    } else {
                        (i / d) * w + (i % d)
                    }
                };
                for i in 0..rho.n {
                    for j in 0..rho.n {
                        out[(map(i), map(j))] = rho[(i, j)];
                    }
                }
                Body::Density(out)
            }
        };
        Ok(Self {
            modes: self.modes,
            cutoff: w,
            body,
            tail_mass: self.tail_mass,
        })
    }

    pub fn to_density(&self) -> Self {
        Self {
            modes: self.modes,
            cutoff: self.cutoff,
            body: Body::Density(self.density_matrix()),
            tail_mass: self.tail_mass,
        }
    }

    /// tr ρ².
    pub fn purity(&self) -> f64 {
        match &self.body {
            Body::Pure(_) => 1.0,
            Body::Density(m) => m.trace_square_hermitian(),
        }
    }

    /// ⟨n̂₁ + ... + n̂_N⟩.
    pub fn mean_photon_number(&self) -> f64 {
        let d = self.cutoff;
        let occupancy = |idx: usize| -> f64 {
            if self.modes == 1 {
                idx as f64
            } else {
                (idx / d + idx % d) as f64
            }
        };
        match &self.body {
            Body::Pure(v) => v
                .iter()
                .enumerate()
                .map(|(i, z)| occupancy(i) * z.norm_sqr())
                .sum(),
            Body::Density(m) => (0..m.n).map(|i| occupancy(i) * m[(i, i)].re).sum(),
        }
    }

    /// Photon-number distribution P_n = ⟨n|ρ|n⟩ (single mode only).
    pub fn photon_number_distribution(&self) -> Result<Vec<f64>> {
        if self.modes != 1 {
            return Err(Error::ShapeError("photon-number distribution is single-mode".into()));
        }
        Ok(match &self.body {
            Body::Pure(v) => v.iter().map(|z| z.norm_sqr()).collect(),
            Body::Density(m) => (0..m.n).map(|i| m[(i, i)].re).collect(),
        })
    }

    /// |⟨ψ|φ⟩|² for pure states, tr(ρσ) in general.
    pub fn fidelity(&self, other: &FockState) -> Result<f64> {
        if self.dim() != other.dim() || self.modes != other.modes {
            return Err(Error::ShapeError("fidelity needs matching spaces".into()));
        }
        match (&self.body, &other.body) {
            (Body::Pure(a), Body::Pure(b)) => {
                let ip: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
                Ok(ip.norm_sqr())
            }
            _ => {
                let ra = self.density_matrix();
                let rb = other.density_matrix();
                Ok(ra.trace_mul(&rb).re)
            }
        }
    }
}

/// Annihilation operator ⟨m|â|n⟩ = √n δ_{m,n-1} on a d-dimensional space.
pub fn annihilation_matrix(cutoff: usize) -> CMat {
    let mut a = CMat::zeros(cutoff);
    for n in 1..cutoff {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Structured operator body.
#[derive(Debug, Clone)]
pub enum OpRepr {
    Dense(CMat),
    /// Diagonal unitary; entry k multiplies basis state k.
    DiagPhase(Vec<Complex64>),
    /// Block-diagonal over a partition of basis indices. `basis[b]` lists the
    /// global indices that `mats[b]` acts on, in matching order.
    Blocks {
        basis: Vec<Vec<usize>>,
        mats: Vec<CMat>,
    },
}

/// A (Gaussian) unitary on one or two modes at a fixed cutoff.
///
/// Operators whose generators leak above the state cutoff (squeezers,
/// displacements) are exponentiated on an inflated workspace where they are
/// exactly unitary; application embeds the state, acts, and truncates the
/// result back, logging the escaped mass into `tail_mass`.
#[derive(Debug, Clone)]
pub struct ModeOperator {
    pub modes: usize,
    /// State-facing cutoff.
    pub cutoff: usize,
    /// Internal cutoff the matrices are built at (>= `cutoff`).
    pub work_cutoff: usize,
    pub repr: OpRepr,
}

impl ModeOperator {
    pub fn dim(&self) -> usize {
        self.cutoff.pow(self.modes as u32)
    }

    fn work_dim(&self) -> usize {
        self.work_cutoff.pow(self.modes as u32)
    }

    /// Pad a state vector from the nominal cutoff into the workspace.
    fn embed(&self, v: &[Complex64]) -> Vec<Complex64> {
        if self.work_cutoff == self.cutoff {
            return v.to_vec();
        }
        let (d, w) = (self.cutoff, self.work_cutoff);
        let mut out = vec![ZERO; self.work_dim()];
        if self.modes == 1 {
            out[..d].copy_from_slice(v);
        } else {
            for m in 0..d {
                out[m * w..m * w + d].copy_from_slice(&v[m * d..(m + 1) * d]);
            }
        }
        out
    }

    /// Keep the corner below the nominal cutoff; returns the lost mass.
    fn extract(&self, v: &[Complex64]) -> (Vec<Complex64>, f64) {
        if self.work_cutoff == self.cutoff {
            return (v.to_vec(), 0.0);
        }
        let (d, w) = (self.cutoff, self.work_cutoff);
        let mut out = vec![ZERO; self.dim()];
        if self.modes == 1 {
            out.copy_from_slice(&v[..d]);
        } else {
            for m in 0..d {
                out[m * d..(m + 1) * d].copy_from_slice(&v[m * w..m * w + d]);
            }
        }
        let kept: f64 = out.iter().map(|z| z.norm_sqr()).sum();
        let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        (out, (total - kept).max(0.0))
    }

    /// max |U†U - I| on the retained space.
    pub fn unitarity_defect(&self) -> f64 {
        match &self.repr {
            OpRepr::Dense(m) => m.unitarity_defect(),
            OpRepr::DiagPhase(d) => d
                .iter()
                .map(|z| (z.norm() - 1.0).abs())
                .fold(0.0, f64::max),
            OpRepr::Blocks { mats, .. } => mats
                .iter()
                .map(|m| m.unitarity_defect())
                .fold(0.0, f64::max),
        }
    }

    /// Materialize the full matrix on the workspace.
    pub fn dense(&self) -> CMat {
        let dim = self.work_dim();
        match &self.repr {
            OpRepr::Dense(m) => m.clone(),
            OpRepr::DiagPhase(d) => {
                let mut m = CMat::zeros(dim);
                for (i, z) in d.iter().enumerate() {
                    m[(i, i)] = *z;
                }
                m
            }
            OpRepr::Blocks { basis, mats } => {
                let mut m = CMat::zeros(dim);
                for (idx, blk) in basis.iter().enumerate() {
                    let b = &mats[idx];
                    for (bi, &gi) in blk.iter().enumerate() {
                        for (bj, &gj) in blk.iter().enumerate() {
                            m[(gi, gj)] = b[(bi, bj)];
                        }
                    }
                }
                m
            }
        }
    }

    pub fn dagger(&self) -> ModeOperator {
        let repr = match &self.repr {
            OpRepr::Dense(m) => OpRepr::Dense(m.dagger()),
            OpRepr::DiagPhase(d) => OpRepr::DiagPhase(d.iter().map(|z| z.conj()).collect()),
            OpRepr::Blocks { basis, mats } => OpRepr::Blocks {
                basis: basis.clone(),
                mats: mats.iter().map(|m| m.dagger()).collect(),
            },
        };
        ModeOperator {
            modes: self.modes,
            cutoff: self.cutoff,
            work_cutoff: self.work_cutoff,
            repr,
        }
    }

    /// Apply on the workspace (input length `work_dim`).
    fn apply_work_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.work_dim());
        match &self.repr {
            OpRepr::Dense(m) => m.mul_vec(v),
            OpRepr::DiagPhase(d) => v.iter().zip(d.iter()).map(|(x, z)| x * z).collect(),
            OpRepr::Blocks { basis, mats } => {
                let mut out = vec![ZERO; v.len()];
                for (idx, blk) in basis.iter().enumerate() {
                    let m = &mats[idx];
                    for (bi, &gi) in blk.iter().enumerate() {
                        let mut acc = ZERO;
                        for (bj, &gj) in blk.iter().enumerate() {
                            acc += m[(bi, bj)] * v[gj];
                        }
                        out[gi] = acc;
                    }
                }
                out
            }
        }
    }

    /// Apply to a state vector at the nominal cutoff; returns the new
    /// amplitudes (unnormalized) and the mass lost above the cutoff.
    pub fn apply_vec(&self, v: &[Complex64]) -> (Vec<Complex64>, f64) {
        let w = self.apply_work_vec(&self.embed(v));
        self.extract(&w)
    }

    /// UρU† at the nominal cutoff; returns the matrix (trace possibly below
    /// one) and the trace lost above the cutoff.
    pub fn apply_density(&self, rho: &CMat) -> (CMat, f64) {
        if self.work_cutoff == self.cutoff {
            return (self.apply_work_density(rho), 0.0);
        }
        let (d, w) = (self.cutoff, self.work_cutoff);
        let wd = self.work_dim();
        let mut big = CMat::zeros(wd);
        let map = |i: usize| -> usize {
            if self.modes == 1 {
                i
            } else {
                (i / d) * w + (i % d)
            }
        };
        for i in 0..rho.n {
            for j in 0..rho.n {
                big[(map(i), map(j))] = rho[(i, j)];
            }
        }
        let out = self.apply_work_density(&big);
        let mut small = CMat::zeros(rho.n);
        for i in 0..rho.n {
            for j in 0..rho.n {
                small[(i, j)] = out[(map(i), map(j))];
            }
        }
        let leak = (out.trace().re - small.trace().re).max(0.0);
        (small, leak)
    }

    fn apply_work_density(&self, rho: &CMat) -> CMat {
        assert_eq!(rho.n, self.work_dim());
        match &self.repr {
            OpRepr::Dense(m) => m.mul(rho).mul(&m.dagger()),
            OpRepr::DiagPhase(d) => {
                let n = rho.n;
                let mut out = rho.clone();
                for i in 0..n {
                    for j in 0..n {
                        out[(i, j)] *= d[i] * d[j].conj();
                    }
                }
                out
            }
            OpRepr::Blocks { basis, mats } => {
                let n = rho.n;
                // A = U ρ (block rows), then B = A U† (block columns)
                let mut a = rho.clone();
                for (idx, blk) in basis.iter().enumerate() {
                    let m = &mats[idx];
                    let s = blk.len();
                    let mut tmp = vec![ZERO; s * n];
                    for bi in 0..s {
                        for bj in 0..s {
                            let coef = m[(bi, bj)];
                            if coef.norm_sqr() == 0.0 {
                                continue;
                            }
                            let src = blk[bj] * n;
                            for col in 0..n {
                                tmp[bi * n + col] += coef * a.data[src + col];
                            }
                        }
                    }
                    for (bi, &gi) in blk.iter().enumerate() {
                        a.data[gi * n..(gi + 1) * n].copy_from_slice(&tmp[bi * n..(bi + 1) * n]);
                    }
                }
                let mut b = a.clone();
                for (idx, blk) in basis.iter().enumerate() {
                    let m = &mats[idx];
                    let s = blk.len();
                    let mut tmp = vec![ZERO; s * n];
                    for bi in 0..s {
                        for bj in 0..s {
                            let coef = m[(bi, bj)].conj();
                            if coef.norm_sqr() == 0.0 {
                                continue;
                            }
                            let src = blk[bj];
                            for row in 0..n {
                                tmp[bi * n + row] += coef * b.data[row * n + src];
                            }
                        }
                    }
                    for (bi, &gi) in blk.iter().enumerate() {
                        for row in 0..n {
                            b.data[row * n + gi] = tmp[bi * n + row];
                        }
                    }
                }
                b
            }
        }
    }
}

/// R̂(φ) = exp(iφ n̂) on a single mode.
pub fn phase_rotation(phi: f64, cutoff: usize) -> ModeOperator {
    let d: Vec<Complex64> = (0..cutoff)
        .map(|n| Complex64::from_polar(1.0, phi * n as f64))
        .collect();
    ModeOperator {
        modes: 1,
        cutoff,
        work_cutoff: cutoff,
        repr: OpRepr::DiagPhase(d),
    }
}

/// R̂₁(φ₁) R̂₂(φ₂) on two modes.
pub fn phase_rotation_two_mode(phi1: f64, phi2: f64, cutoff: usize) -> ModeOperator {
    let mut d = Vec::with_capacity(cutoff * cutoff);
    for m in 0..cutoff {
        for n in 0..cutoff {
            d.push(Complex64::from_polar(1.0, phi1 * m as f64 + phi2 * n as f64));
        }
    }
    ModeOperator {
        modes: 2,
        cutoff,
        work_cutoff: cutoff,
        repr: OpRepr::DiagPhase(d),
    }
}

/// B̂(θ) = exp[θ(â₁†â₂ − â₂†â₁)], transmittance cos²θ.
///
/// Exactly number-conserving: each total-photon-number block is the
/// exponential of the skew-symmetric generator restricted to that block.
pub fn beam_splitter(theta: f64, cutoff: usize) -> ModeOperator {
    let d = cutoff;
    let mut basis = Vec::new();
    let mut mats = Vec::new();
    for total in 0..=(2 * (d - 1)) {
        // states |m, total-m⟩ with both occupancies below the cutoff
        let m_lo = total.saturating_sub(d - 1);
        let m_hi = total.min(d - 1);
        let idx: Vec<usize> = (m_lo..=m_hi).map(|m| m * d + (total - m)).collect();
        let s = idx.len();
        let mut gen = CMat::zeros(s);
        for (bi, m) in (m_lo..=m_hi).enumerate() {
            // â₁†â₂ |m, n⟩ = √((m+1)n) |m+1, n-1⟩
            if m < m_hi {
                let n = total - m;
                let g = ((m + 1) as f64 * n as f64).sqrt();
                gen[(bi + 1, bi)] = Complex64::new(theta * g, 0.0);
                gen[(bi, bi + 1)] = Complex64::new(-theta * g, 0.0);
            }
        }
        mats.push(expm(&gen));
        basis.push(idx);
    }
    ModeOperator {
        modes: 2,
        cutoff,
        work_cutoff: cutoff,
        repr: OpRepr::Blocks { basis, mats },
    }
}

/// Ŝ₁₂(ζ) = exp(−ζâ₁†â₂† + ζ*â₁â₂) with ζ = s e^{iφ}.
///
/// Conserves n₁ − n₂; each difference block is exponentiated at twice the
/// cutoff, where it is exactly unitary. Application truncates the result
/// back to the nominal cutoff.
pub fn two_mode_squeezer(s: f64, phi: f64, cutoff: usize) -> ModeOperator {
    let w = 2 * cutoff;
    let zeta = Complex64::from_polar(s, phi);
    let mut basis = Vec::new();
    let mut mats = Vec::new();
    for k in -(w as isize - 1)..=(w as isize - 1) {
        let ka = k.unsigned_abs();
        // block: |j + ka, j⟩ (k >= 0) or |j, j + ka⟩ (k < 0), j = 0..w-ka
        let len = w - ka;
        let mut gen = CMat::zeros(len);
        for j in 0..(len - 1) {
            // â₁†â₂†|n₁, n₂⟩ = √((n₁+1)(n₂+1)) |n₁+1, n₂+1⟩
            let g = (((j + ka + 1) * (j + 1)) as f64).sqrt();
            gen[(j + 1, j)] = -zeta * g;
            gen[(j, j + 1)] = zeta.conj() * g;
        }
        let idx: Vec<usize> = (0..len)
            .map(|j| {
                if k >= 0 {
                    (j + ka) * w + j
                } else {
                    j * w + (j + ka)
                }
            })
            .collect();
        basis.push(idx);
        mats.push(expm(&gen));
    }
    ModeOperator {
        modes: 2,
        cutoff,
        work_cutoff: w,
        repr: OpRepr::Blocks { basis, mats },
    }
}

/// Single-mode displacement D̂(α) = exp(αâ† − α*â), exponentiated on an
/// inflated workspace.
pub fn displacement(alpha: Complex64, cutoff: usize) -> ModeOperator {
    let w = 2 * cutoff + 8;
    let a = annihilation_matrix(w);
    let adag = a.dagger();
    let gen = adag.scale(alpha).sub(&a.scale(alpha.conj()));
    ModeOperator {
        modes: 1,
        cutoff,
        work_cutoff: w,
        repr: OpRepr::Dense(expm(&gen)),
    }
}

/// Single-mode squeezer Ŝ(r) = exp[r/2 (â² − â†²)]; squeezes x̂ by e⁻ʳ.
pub fn squeezer(r: f64, cutoff: usize) -> ModeOperator {
    let w = 2 * cutoff + 8;
    let a = annihilation_matrix(w);
    let a2 = a.mul(&a);
    let gen = a2.sub(&a2.dagger()).scale(Complex64::new(0.5 * r, 0.0));
    ModeOperator {
        modes: 1,
        cutoff,
        work_cutoff: w,
        repr: OpRepr::Dense(expm(&gen)),
    }
}

/// ρ → UρU†. The operator must be unitary on its workspace to 1e-10; mass
/// pushed above the nominal cutoff is folded into `tail_mass` and the result
/// renormalized.
pub fn apply_unitary(state: &FockState, op: &ModeOperator) -> Result<FockState> {
    if state.dim() != op.dim() || state.modes() != op.modes {
        return Err(Error::ShapeError(format!(
            "operator dim {} does not match state dim {}",
            op.dim(),
            state.dim()
        )));
    }
    let defect = op.unitarity_defect();
    if defect > 1e-10 {
        return Err(Error::NumericsError(format!(
            "operator unitarity defect {defect:.3e} exceeds 1e-10"
        )));
    }
    match state.body() {
        Body::Pure(v) => {
            let (mut w, leak) = op.apply_vec(v);
            let norm2: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            if norm2 < 0.5 {
                return Err(Error::TruncationError {
                    cutoff: state.cutoff(),
                    tail_mass: leak,
                    tolerance: DEFAULT_TAIL_TOLERANCE,
                    required: state.cutoff() * 2,
                });
            }
            let inv = 1.0 / norm2.sqrt();
            for z in w.iter_mut() {
                *z *= inv;
            }
            Ok(FockState {
                modes: state.modes(),
                cutoff: state.cutoff(),
                body: Body::Pure(w),
                tail_mass: state.tail_mass() + leak,
            })
        }
        Body::Density(rho) => {
            let (out, leak) = op.apply_density(rho);
            let tr = out.trace().re;
            if tr < 0.5 {
                return Err(Error::TruncationError {
                    cutoff: state.cutoff(),
                    tail_mass: leak,
                    tolerance: DEFAULT_TAIL_TOLERANCE,
                    required: state.cutoff() * 2,
                });
            }
            let out = out.scale(Complex64::new(1.0 / tr, 0.0));
            Ok(FockState {
                modes: state.modes(),
                cutoff: state.cutoff(),
                body: Body::Density(out),
                tail_mass: state.tail_mass() + leak,
            })
        }
    }
}

/// Reduced state of one mode of a two-mode state. `keep` is 0-based.
pub fn partial_trace(state: &FockState, keep: usize) -> Result<FockState> {
    if state.modes() != 2 {
        return Err(Error::ShapeError("partial trace needs a two-mode state".into()));
    }
    if keep > 1 {
        return Err(Error::ShapeError(format!("mode index {keep} out of range")));
    }
    let d = state.cutoff();
    let mut red = CMat::zeros(d);
    match state.body() {
        Body::Pure(v) => {
            // amplitudes W[m][n] = v[m*d + n]
            for i in 0..d {
                for j in 0..d {
                    let mut acc = ZERO;
                    for k in 0..d {
                        let (ai, aj) = if keep == 0 {
                            (i * d + k, j * d + k)
                        } else {
                            (k * d + i, k * d + j)
                        };
                        acc += v[ai] * v[aj].conj();
                    }
                    red[(i, j)] = acc;
                }
            }
        }
        Body::Density(rho) => {
            for i in 0..d {
                for j in 0..d {
                    let mut acc = ZERO;
                    for k in 0..d {
                        let (ri, rj) = if keep == 0 {
                            (i * d + k, j * d + k)
                        } else {
                            (k * d + i, k * d + j)
                        };
                        acc += rho[(ri, rj)];
                    }
                    red[(i, j)] = acc;
                }
            }
        }
    }
    Ok(FockState {
        modes: 1,
        cutoff: d,
        body: Body::Density(red),
        tail_mass: state.tail_mass(),
    })
}

/// Partial transpose on the given mode (0-based) of a two-mode density
/// matrix: ⟨m₁ n₁| ρ^PT |m₂ n₂⟩ = ⟨m₁ n₂| ρ |m₂ n₁⟩ for `on = 1`.
///
/// The result is Hermitian with unit trace but can have negative
/// eigenvalues; that is what the PPT criterion looks for.
pub fn partial_transpose(state: &FockState, on: usize) -> Result<FockState> {
    if state.modes() != 2 {
        return Err(Error::ShapeError("partial transpose needs a two-mode state".into()));
    }
    if on > 1 {
        return Err(Error::ShapeError(format!("mode index {on} out of range")));
    }
    let rho = match state.body() {
        Body::Density(m) => m,
        Body::Pure(_) => {
            return Err(Error::ShapeError(
                "partial transpose needs a DensityMatrix body; call to_density() first".into(),
            ))
        }
    };
    let d = state.cutoff();
    let mut out = CMat::zeros(d * d);
    for m1 in 0..d {
        for n1 in 0..d {
            for m2 in 0..d {
                for n2 in 0..d {
                    let src = if on == 1 {
                        (m1 * d + n2, m2 * d + n1)
                    } else {
                        (m2 * d + n1, m1 * d + n2)
                    };
                    out[(m1 * d + n1, m2 * d + n2)] = rho[src];
                }
            }
        }
    }
    Ok(FockState {
        modes: 2,
        cutoff: d,
        body: Body::Density(out),
        tail_mass: state.tail_mass(),
    })
}

/// ρ_A ⊗ ρ_B (or |ψ⟩⊗|φ⟩ when both are pure) of two single-mode states.
pub fn tensor_product(a: &FockState, b: &FockState) -> Result<FockState> {
    if a.modes() != 1 || b.modes() != 1 {
        return Err(Error::ShapeError("tensor product of single-mode states only".into()));
    }
    if a.cutoff() != b.cutoff() {
        return Err(Error::ShapeError("tensor product needs equal cutoffs".into()));
    }
    let d = a.cutoff();
    let tail = a.tail_mass() + b.tail_mass();
    match (a.body(), b.body()) {
        (Body::Pure(u), Body::Pure(v)) => {
            let mut w = vec![ZERO; d * d];
            for m in 0..d {
                for n in 0..d {
                    w[m * d + n] = u[m] * v[n];
                }
            }
            Ok(FockState {
                modes: 2,
                cutoff: d,
                body: Body::Pure(w),
                tail_mass: tail,
            })
        }
        _ => {
            let ra = a.density_matrix();
            let rb = b.density_matrix();
            Ok(FockState {
                modes: 2,
                cutoff: d,
                body: Body::Density(ra.kron(&rb)),
                tail_mass: tail,
            })
        }
    }
}
