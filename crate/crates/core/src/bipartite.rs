//! Bipartite density matrices: validation, the partial-transpose and
//! realignment reshuffles, generators for the built-in state families, and
//! the state-file format.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMat, DEFAULT_HERM_TOL};
use crate::rng::SplitMix64;

/// How far a state may drift from exact Hermiticity / unit trace / positive
/// semi-definiteness before validation rejects it. External files carry
/// decimal rounding, so exact checks would be unusable.
pub const STATE_TOL: f64 = 1e-9;

/// A trace-one positive semi-definite matrix on a tensor-product space of
/// dimensions `dim_a` x `dim_b`.
///
/// The stored matrix is the Hermitian part of the input; construction fails
/// if the input deviates from Hermiticity, unit trace, or positivity by more
/// than [`STATE_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    dim_a: usize,
    dim_b: usize,
    mat: CMat,
}

impl BipartiteState {
    pub fn new(dim_a: usize, dim_b: usize, mat: CMat) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::Shape(format!(
                "subsystem dimensions must be positive, got {dim_a} and {dim_b}"
            )));
        }
        let d = dim_a * dim_b;
        if mat.rows() != d || mat.cols() != d {
            return Err(Error::Shape(format!(
                "matrix is {}x{} but dimensions {dim_a}x{dim_b} require {d}x{d}",
                mat.rows(),
                mat.cols()
            )));
        }
        if let Some((idx, z)) = mat
            .entries()
            .iter()
            .enumerate()
            .find(|(_, z)| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Validation(format!(
                "non-finite entry {z} at row {}, col {}",
                idx / d,
                idx % d
            )));
        }
        let (defect, (i, j)) = mat.hermiticity_defect();
        if defect > STATE_TOL {
            return Err(Error::Validation(format!(
                "matrix is not Hermitian: entries ({i},{j}) and ({j},{i}) differ by {defect:.3e}"
            )));
        }
        let mat = mat.symmetrize()?;
        let tr = mat.trace()?;
        if (tr - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::Validation(format!(
                "trace must be 1, got {} + {}i",
                tr.re, tr.im
            )));
        }
        let eigs = hermitian_eigenvalues(&mat, DEFAULT_HERM_TOL)?;
        if eigs[0] < -STATE_TOL {
            return Err(Error::Validation(format!(
                "matrix is not positive semi-definite: minimal eigenvalue {:.3e}",
                eigs[0]
            )));
        }
        Ok(Self { dim_a, dim_b, mat })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    /// Total dimension `dim_a * dim_b`.
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    /// Tr[ρ²], the purity.
    pub fn purity(&self) -> f64 {
        self.mat.frobenius_norm().powi(2)
    }

    /// Transpose the second subsystem: block (i,j) of the output is the
    /// transpose of block (i,j) of the input. Applying it twice gives back
    /// the input exactly.
    pub fn partial_transpose(&self) -> CMat {
        let db = self.dim_b;
        let d = self.dim();
        CMat::from_fn(d, d, |r, c| {
            let (bi, ri) = (r / db, r % db);
            let (bj, cj) = (c / db, c % db);
            self.mat[(bi * db + cj, bj * db + ri)]
        })
    }

    /// Reshuffle into the realigned matrix: row `i*dim_a + j` of the output
    /// is the row-major vectorization of block (i,j). The result has shape
    /// (dim_a²) x (dim_b²) and the same Frobenius norm as the state.
    pub fn realign(&self) -> CMat {
        let (da, db) = (self.dim_a, self.dim_b);
        CMat::from_fn(da * da, db * db, |row, col| {
            let (i, j) = (row / da, row % da);
            let (r, c) = (col / db, col % db);
            self.mat[(i * db + r, j * db + c)]
        })
    }

    /// Product state ρ_A ⊗ ρ_B from two (unnormalized-tolerance) density
    /// matrices.
    pub fn product(rho_a: &CMat, rho_b: &CMat) -> Result<Self> {
        if !rho_a.is_square() || !rho_b.is_square() {
            return Err(Error::Shape("product factors must be square".into()));
        }
        Self::new(rho_a.rows(), rho_b.rows(), rho_a.kron(rho_b))
    }

    /// Pure product state |ψ_A⟩⟨ψ_A| ⊗ |ψ_B⟩⟨ψ_B| from two state vectors,
    /// normalizing each.
    pub fn pure_product(psi_a: &[Complex64], psi_b: &[Complex64]) -> Result<Self> {
        let rho_a = pure_density(psi_a)?;
        let rho_b = pure_density(psi_b)?;
        Self::product(&rho_a, &rho_b)
    }

    /// The one-parameter 3⊗3 family used throughout the tests: a rank-7
    /// state with symmetric blocks (so its partial transpose equals itself)
    /// whose entanglement for a < 1 is invisible to the plain PPT test.
    /// Defined for a ≥ 1/2; below that the matrix stops being positive.
    pub fn paper_ppt_family(a: f64) -> Result<Self> {
        if a.is_nan() || a < 0.5 {
            return Err(Error::Domain(format!(
                "family parameter must satisfy a >= 0.5, got {a}"
            )));
        }
        let s = 1.0 / (3.0 * (3.0 + a));
        #[rustfmt::skip]
        let pattern: [[f64; 9]; 9] = [
            [1.0, 0.0, 0.0,   0.0, 1.0, 0.0,   0.0, 0.0, 1.0],
            [0.0,   a, 0.0,   1.0, 0.0, 0.0,   0.0, 0.0, 0.0],
            [0.0, 0.0, 2.0,   0.0, 0.0, 0.0,   1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0,   2.0, 0.0, 0.0,   0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0,   0.0, 1.0, 0.0,   0.0, 0.0, 1.0],
            [0.0, 0.0, 0.0,   0.0, 0.0,   a,   0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0,   0.0, 0.0, 0.0,     a, 0.0, 0.0],
            [0.0, 0.0, 0.0,   0.0, 0.0, 1.0,   0.0, 2.0, 0.0],
            [1.0, 0.0, 0.0,   0.0, 1.0, 0.0,   0.0, 0.0, 1.0],
        ];
        let mat = CMat::from_fn(9, 9, |i, j| Complex64::new(pattern[i][j] * s, 0.0));
        Self::new(3, 3, mat)
    }

    /// Two-qubit Werner state p·|ψ⁻⟩⟨ψ⁻| + (1-p)·I/4 with the singlet
    /// |ψ⁻⟩ = (|01⟩ - |10⟩)/√2. Entangled exactly for p > 1/3.
    pub fn werner_state(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!(
                "Werner parameter must lie in [0, 1], got {p}"
            )));
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = [
            Complex64::new(0.0, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let mut mat = CMat::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                mat[(i, j)] = (singlet[i] * singlet[j].conj()).scale(p);
            }
            mat[(i, i)] += Complex64::new((1.0 - p) / 4.0, 0.0);
        }
        Self::new(2, 2, mat)
    }

    /// Maximally entangled two-qubit state (|00⟩ + |11⟩)/√2 as a density
    /// matrix.
    pub fn bell_state() -> Self {
        let mut mat = CMat::zeros(4, 4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                mat[(i, j)] = Complex64::new(0.5, 0.0);
            }
        }
        Self::new(2, 2, mat).expect("Bell state is a valid density matrix")
    }

    /// Maximally mixed state I/(dim_a·dim_b).
    pub fn max_mixed(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::Shape(format!(
                "subsystem dimensions must be positive, got {dim_a} and {dim_b}"
            )));
        }
        let d = dim_a * dim_b;
        Self::new(dim_a, dim_b, CMat::identity(d).scale_real(1.0 / d as f64))
    }

    /// Convex mixture of `terms` random pure product states with
    /// Dirichlet-uniform weights. Separable by construction and fully
    /// determined by the seed (see [`crate::rng`] for the generator).
    pub fn random_separable(dim_a: usize, dim_b: usize, terms: usize, seed: u64) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::Shape(format!(
                "subsystem dimensions must be positive, got {dim_a} and {dim_b}"
            )));
        }
        if terms == 0 {
            return Err(Error::Argument("terms must be at least 1".into()));
        }
        let mut rng = SplitMix64::new(seed);
        // Dirichlet(1,..,1) on the simplex: normalized exponential samples.
        let mut weights: Vec<f64> = (0..terms).map(|_| -rng.next_f64_open().ln()).collect();
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }

        let d = dim_a * dim_b;
        let mut mat = CMat::zeros(d, d);
        for w in weights {
            let psi_a = random_unit_vector(&mut rng, dim_a);
            let psi_b = random_unit_vector(&mut rng, dim_b);
            let mut prod = Vec::with_capacity(d);
            for za in &psi_a {
                for zb in &psi_b {
                    prod.push(za * zb);
                }
            }
            for i in 0..d {
                for j in 0..d {
                    mat[(i, j)] += (prod[i] * prod[j].conj()).scale(w);
                }
            }
        }
        Self::new(dim_a, dim_b, mat)
    }
}

fn pure_density(psi: &[Complex64]) -> Result<CMat> {
    let n = psi.len();
    if n == 0 {
        return Err(Error::Shape("state vector must be non-empty".into()));
    }
    let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if norm_sq <= 0.0 || !norm_sq.is_finite() {
        return Err(Error::Validation(format!(
            "state vector has invalid squared norm {norm_sq}"
        )));
    }
    Ok(CMat::from_fn(n, n, |i, j| {
        (psi[i] * psi[j].conj()).scale(1.0 / norm_sq)
    }))
}

fn random_unit_vector(rng: &mut SplitMix64, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.next_gaussian(), rng.next_gaussian()))
            .collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|z| z.unscale(norm)).collect();
        }
    }
}

// ---------------------------------------------------------------------------
// State files
// ---------------------------------------------------------------------------

/// On-disk form: `{"dimA": .., "dimB": .., "matrix": [[[re, im], ..], ..]}`.
#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    #[serde(rename = "dimA")]
    dim_a: usize,
    #[serde(rename = "dimB")]
    dim_b: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

/// serde_json formatter that prints every float with 17 significant digits,
/// enough for exact f64 round-trips through decimal text.
pub(crate) struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

pub(crate) fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Parse(format!("serialization failed: {e}")))?;
    String::from_utf8(buf).map_err(|e| Error::Parse(format!("serialized non-UTF8 data: {e}")))
}

/// Serialize a state in the state-file format with 17-significant-digit
/// entries.
pub fn state_to_json(state: &BipartiteState) -> Result<String> {
    let d = state.dim();
    let matrix: Vec<Vec<[f64; 2]>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let z = state.mat()[(i, j)];
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    let file = StateFile { dim_a: state.dim_a(), dim_b: state.dim_b(), matrix };
    to_json_string(&file)
}

/// Parse and validate a state from state-file JSON.
pub fn state_from_json(text: &str) -> Result<BipartiteState> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad state file: {e}")))?;
    let d = file.dim_a * file.dim_b;
    if file.matrix.len() != d || file.matrix.iter().any(|row| row.len() != d) {
        return Err(Error::Validation(format!(
            "matrix must be {d}x{d} for dimensions {}x{}, got {} rows of lengths {:?}",
            file.dim_a,
            file.dim_b,
            file.matrix.len(),
            file.matrix.iter().map(|r| r.len()).collect::<Vec<_>>()
        )));
    }
    let entries: Vec<Complex64> = file
        .matrix
        .iter()
        .flatten()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    let mat = CMat::new(d, d, entries)?;
    BipartiteState::new(file.dim_a, file.dim_b, mat)
}

pub fn save_state(state: &BipartiteState, path: &Path) -> Result<()> {
    let text = state_to_json(state)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

pub fn load_state(path: &Path) -> Result<BipartiteState> {
    let text = std::fs::read_to_string(path)?;
    state_from_json(&text)
}
