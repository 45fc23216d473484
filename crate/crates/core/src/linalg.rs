//! Small dense complex linear algebra.
//!
//! Everything in this crate works on matrices of dimension at most a few
//! hundred (Fock-space truncations), so a plain row-major `Vec<Complex64>`
//! with straightforward O(n³) kernels is entirely adequate. The Hermitian
//! eigensolver is a cyclic Jacobi iteration with complex rotations.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "rows must form a square matrix");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMat {
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix product");
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row.iter()) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.n, v.len(), "dimension mismatch in matrix-vector product");
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.data[i * n..(i + 1) * n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(v.iter()) {
                acc += a * b;
            }
            *o = acc;
        }
        out
    }

    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> CMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// tr(A B) computed without forming the product.
    pub fn trace_mul(&self, rhs: &CMat) -> Complex64 {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * rhs[(k, i)];
            }
        }
        acc
    }

    /// tr(A²) for Hermitian A reduces to the squared Frobenius norm.
    pub fn trace_square_hermitian(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |A - A†| over entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// max |U†U - I| over entries.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.dagger().mul(self);
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p[(i, j)] - Complex64::new(expect, 0.0)).norm());
            }
        }
        worst
    }

    /// Kronecker product; `self` indexes the slow (first) factor.
    pub fn kron(&self, rhs: &CMat) -> CMat {
        let (a, b) = (self.n, rhs.n);
        let mut out = CMat::zeros(a * b);
        for i in 0..a {
            for j in 0..a {
                let v = self[(i, j)];
                if v.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..b {
                    for l in 0..b {
                        out[(i * b + k, j * b + l)] = v * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
///
/// The generators exponentiated in this crate are anti-Hermitian with modest
/// norm, for which this scheme is accurate to close to machine precision.
pub fn expm(a: &CMat) -> CMat {
    let n = a.n;
    // 1-norm estimate for scaling
    let mut norm1 = 0.0f64;
    for j in 0..n {
        let col: f64 = (0..n).map(|i| a[(i, j)].norm()).sum();
        norm1 = norm1.max(col);
    }
    let s = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let b = a.scale(Complex64::new(1.0 / f64::powi(2.0, s as i32), 0.0));

    let mut result = CMat::identity(n);
    let mut term = CMat::identity(n);
    for k in 1..=30 {
        term = term.mul(&b).scale(Complex64::new(1.0 / k as f64, 0.0));
        result = result.add(&term);
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = result.mul(&result);
    }
    result
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi with complex rotations.
///
/// Returns the eigenvalues in ascending order. Off-diagonal mass is reduced
/// below `tol * max_abs` (with `tol = 1e-12`) or the sweep budget is spent,
/// in which case an error is returned.
pub fn hermitian_eigenvalues(a: &CMat) -> Result<Vec<f64>> {
    let n = a.n;
    if n == 0 {
        return Ok(vec![]);
    }
    let defect = a.hermiticity_defect();
    if defect > 1e-9 {
        return Err(Error::NumericsError(format!(
            "eigensolver input not Hermitian (defect {defect:.3e})"
        )));
    }
    let mut m = a.clone();
    // symmetrize to suppress roundoff drift during rotations
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
    }

    let scale = m.max_abs().max(1e-300);
    let tol = 1e-12 * scale;
    let max_sweeps = 60;

    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(m[(i, j)].norm());
            }
        }
        if off <= tol {
            let mut evs: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
            evs.sort_by(|x, y| x.partial_cmp(y).unwrap());
            return Ok(evs);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.norm() <= tol * 1e-3 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // phase that makes the pivot real, then a real Jacobi rotation
                let phase = apq / apq.norm();
                let g = apq.norm();
                let theta = 0.5 * (2.0 * g).atan2(app - aqq);
                let (c, s) = (theta.cos(), theta.sin());
                let sp = phase * s;
                // columns: col_p' = c*col_p + s*phase†*col_q is folded into
                // the row update below via Hermiticity; update rows then cols.
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * c + mkq * sp.conj();
                    m[(k, q)] = -mkp * sp + mkq * c;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * c + mqk * sp;
                    m[(q, k)] = -mpk * sp.conj() + mqk * c;
                }
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
            }
        }
    }
    Err(Error::NumericsError(
        "Jacobi eigensolver did not converge".into(),
    ))
}

/// Solve the real n×n system `a x = b` (row-major `a`) by Gaussian
/// elimination with partial pivoting. Sized for the tiny trig-moment
/// systems, not for general use.
pub fn solve_real(a: &[f64], b: &[f64], n: usize) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let mut m = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (pivot_row, pivot_val) = (col..n)
            .map(|r| (r, m[r * n + col].abs()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if pivot_val < 1e-12 {
            return Err(Error::NumericsError("singular linear system".into()));
        }
        if pivot_row != col {
            for k in 0..n {
                m.swap(col * n + k, pivot_row * n + k);
            }
            rhs.swap(col, pivot_row);
        }
        for r in (col + 1)..n {
            let f = m[r * n + col] / m[col * n + col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[r * n + k] -= f * m[col * n + k];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..n {
            acc -= m[row * n + k] * x[k];
        }
        x[row] = acc / m[row * n + row];
    }
    Ok(x)
}

/// Eigen-decomposition of a real symmetric 2x2 matrix `[[a, b], [b, d]]`.
///
/// Returns `(lambda_min, lambda_max, v_min)` with `v_min` the unit
/// eigenvector of the smaller eigenvalue.
pub fn sym2_eigen(a: f64, b: f64, d: f64) -> (f64, f64, [f64; 2]) {
    let tr = a + d;
    let det = a * d - b * b;
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    let lo = 0.5 * tr - disc;
    let hi = 0.5 * tr + disc;
    // eigenvector for lo: (A - lo I) v = 0
    let v = if b.abs() > 1e-300 {
        [b, lo - a]
    } else if a <= d {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
    (lo, hi, [v[0] / norm, v[1] / norm])
}
