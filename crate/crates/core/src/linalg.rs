//! Dense complex matrices and the eigenvalue / singular-value / determinant
//! kernels used by every other module.
//!
//! Matrices in this crate are tiny (side ≤ ~100), so everything here is a
//! plain O(n³) dense routine with no blocking or dependencies. The Hermitian
//! eigensolver is a cyclic complex Jacobi scheme; singular values come from
//! the eigenvalues of the Gram matrix A†A, which is accurate enough at the
//! scales involved (entries of order one, tolerances no tighter than 1e-10).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tolerance for Hermiticity validation, relative to max(1, ‖A‖_F).
pub const DEFAULT_HERM_TOL: f64 = 1e-9;

/// Jacobi sweep budget.
const MAX_SWEEPS: usize = 100;

/// Convergence: off-diagonal Frobenius norm below this times ‖A‖_F.
const JACOBI_OFF_TOL: f64 = 1e-12;

/// Gram eigenvalues this far below zero are rounding; anything lower is a bug.
const GRAM_CLAMP: f64 = -1e-12;

/// Gram eigenvalues below this fraction of the largest one are rounding
/// residue of exact zeros. Squaring costs the Gram method half the digits,
/// so without this cut a zero singular value resurfaces as √ε ≈ 1e-8.
const GRAM_ZERO_CUT: f64 = 1e-13;

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl CMat {
    /// Build from row-major entries, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("matrix must be non-empty, got {rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "entry count {} does not match {rows}x{cols}",
                entries.len()
            )));
        }
        if let Some((idx, bad)) = entries
            .iter()
            .enumerate()
            .find(|(_, z)| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Validation(format!(
                "non-finite entry {bad} at index {idx} (row {}, col {})",
                idx / cols,
                idx % cols
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Build from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        Self::diag(&values.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Matrix product.
    pub fn matmul(&self, other: &CMat) -> Result<CMat> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::Shape(format!(
                "cannot apply {}x{} to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[i] += self[(i, j)] * v[j];
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::Shape(format!("trace of non-square {}x{}", self.rows, self.cols)));
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    pub fn add(&self, other: &CMat) -> Result<CMat> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &CMat) -> Result<CMat> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Shape(format!(
                "cannot subtract {}x{} from {}x{}",
                other.rows, other.cols, self.rows, self.cols
            )));
        }
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, factor: Complex64) -> CMat {
        let mut out = self.clone();
        for z in &mut out.entries {
            *z *= factor;
        }
        out
    }

    pub fn scale_real(&self, factor: f64) -> CMat {
        let mut out = self.clone();
        for z in &mut out.entries {
            *z = z.scale(factor);
        }
        out
    }

    /// Kronecker product self ⊗ other.
    pub fn kron(&self, other: &CMat) -> CMat {
        let mut out = CMat::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let aij = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = aij * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest |entry-wise difference| to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Deviation from Hermiticity: largest |A_ij − conj(A_ji)| with its index.
    pub fn hermiticity_defect(&self) -> (f64, (usize, usize)) {
        let mut worst = 0.0;
        let mut at = (0, 0);
        for i in 0..self.rows {
            for j in i..self.cols.min(self.rows) {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst {
                    worst = d;
                    at = (i, j);
                }
            }
        }
        (worst, at)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_defect().0 <= tol
    }

    /// (A + A†)/2, the canonical Hermitian part.
    pub fn symmetrize(&self) -> Result<CMat> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "cannot symmetrize non-square {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(CMat::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()).scale(0.5)
        }))
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of {}x{}", self.rows, self.cols);
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of {}x{}", self.rows, self.cols);
        &mut self.entries[r * self.cols + c]
    }
}

fn off_diagonal_norm(m: &CMat) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// `herm_tol` bounds the accepted Hermiticity defect relative to
/// max(1, ‖A‖_F); the input is then replaced by its Hermitian part before
/// the cyclic Jacobi iteration runs. Rotations stop once the off-diagonal
/// Frobenius norm falls below 1e-12·‖A‖_F.
pub fn hermitian_eigenvalues(a: &CMat, herm_tol: f64) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "eigenvalues of non-square {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let fro = a.frobenius_norm();
    let (defect, at) = a.hermiticity_defect();
    if defect > herm_tol * fro.max(1.0) {
        return Err(Error::NotHermitian(format!(
            "|A[{},{}] - conj(A[{},{}])| = {defect:.3e} exceeds tolerance {:.3e}",
            at.0,
            at.1,
            at.1,
            at.0,
            herm_tol * fro.max(1.0)
        )));
    }

    let n = a.rows();
    let mut m = a.symmetrize()?;
    let threshold = JACOBI_OFF_TOL * fro;

    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                jacobi_rotate(&mut m, p, q);
            }
        }
    }

    let off = off_diagonal_norm(&m);
    if off > threshold {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS, off_norm: off });
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    Ok(eigs)
}

/// One complex Jacobi rotation annihilating the (p, q) entry.
fn jacobi_rotate(m: &mut CMat, p: usize, q: usize) {
    let apq = m[(p, q)];
    let abs_apq = apq.norm();
    if abs_apq <= f64::MIN_POSITIVE {
        return;
    }
    let phase = apq.unscale(abs_apq); // e^{iφ} with A[p][q] = |A[p][q]|·e^{iφ}
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;

    let tau = (aqq - app) / (2.0 * abs_apq);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let n = m.rows();
    // Columns p and q: right-multiplication by the rotation.
    let conj_phase = phase.conj();
    for i in 0..n {
        let aip = m[(i, p)];
        let aiq = m[(i, q)];
        m[(i, p)] = aip.scale(c) - (conj_phase * aiq).scale(s);
        m[(i, q)] = aip.scale(s) + (conj_phase * aiq).scale(c);
    }
    // Rows p and q: left-multiplication by the adjoint rotation.
    for j in 0..n {
        let apj = m[(p, j)];
        let aqj = m[(q, j)];
        m[(p, j)] = apj.scale(c) - (phase * aqj).scale(s);
        m[(q, j)] = apj.scale(s) + (phase * aqj).scale(c);
    }
    // The rotated pivot is zero in exact arithmetic; pin it there.
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    let dp = m[(p, p)].re;
    let dq = m[(q, q)].re;
    m[(p, p)] = Complex64::new(dp, 0.0);
    m[(q, q)] = Complex64::new(dq, 0.0);
}

/// Singular values, descending, via the Gram matrix A†A.
///
/// Returns min(rows, cols) values; Gram eigenvalues in [-1e-12, 0) are
/// treated as rounding and clamped, anything lower is reported as an error.
pub fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    let gram = a.adjoint().matmul(a)?;
    let eigs = hermitian_eigenvalues(&gram, DEFAULT_HERM_TOL)?;
    let top = eigs.last().copied().unwrap_or(0.0).max(0.0);
    let mut sv = Vec::with_capacity(eigs.len());
    for mu in eigs {
        if mu < GRAM_CLAMP {
            return Err(Error::Numerical(format!(
                "Gram eigenvalue {mu:.3e} below clamp threshold {GRAM_CLAMP:.0e}"
            )));
        }
        let mu = if mu <= GRAM_ZERO_CUT * top { 0.0 } else { mu };
        sv.push(mu.sqrt());
    }
    sv.sort_by(|x, y| y.partial_cmp(x).expect("singular values are finite"));
    sv.truncate(a.rows().min(a.cols()));
    Ok(sv)
}

/// Determinant via LU with partial pivoting.
pub fn determinant(a: &CMat) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "determinant of non-square {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot_mag = m[(k, k)].norm();
        for i in k + 1..n {
            let mag = m[(i, k)].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = i;
            }
        }
        if pivot_mag == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if pivot_row != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(pivot_row, j)];
                m[(pivot_row, j)] = tmp;
            }
            det = -det;
        }
        let pivot = m[(k, k)];
        det *= pivot;
        for i in k + 1..n {
            let factor = m[(i, k)] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k..n {
                let mkj = m[(k, j)];
                m[(i, j)] -= factor * mkj;
            }
        }
    }
    Ok(det)
}
