//! Positive (not necessarily completely positive) maps on the B subsystem
//! and their extension I⊗Λ to the full bipartite space.
//!
//! Three builtins are provided: the transpose, the reduction map
//! X ↦ Tr(X)·I − X, and Hou's indecomposable map on 3x3 matrices. Arbitrary
//! maps can be supplied as a superoperator matrix L acting on row-major
//! vectorizations, vec(Λ(X)) = L·vec(X) — the same vec convention the
//! realignment uses, so one layout rule covers the whole crate.
//!
//! Positivity of a user superoperator is a trust assumption: construction
//! only verifies that the map preserves Hermiticity. Criteria evaluated with
//! a non-positive map are meaningless, and front ends should say where a
//! custom map came from.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bipartite::BipartiteState;
use crate::error::{Error, Result};
use crate::linalg::CMat;

/// Tolerance for the Hermiticity-preservation check at construction.
const HERM_PRESERVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    /// X ↦ Xᵀ.
    Transpose,
    /// Hou's map on 3x3 matrices:
    /// A ↦ ½·[[a11+a22, -a12, -a13], [-a21, a22+a33, -a23], [-a31, -a32, a33+a11]].
    HouGamma,
    /// X ↦ Tr(X)·I − X.
    Reduction,
    /// Explicit superoperator on row-major vectorizations.
    Superoperator(CMat),
}

/// A positive map on dim_b x dim_b matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveMap {
    dim_b: usize,
    kind: MapKind,
    name: String,
}

impl PositiveMap {
    pub fn transpose(dim_b: usize) -> Self {
        Self { dim_b, kind: MapKind::Transpose, name: "transpose".into() }
    }

    pub fn hou_gamma() -> Self {
        Self { dim_b: 3, kind: MapKind::HouGamma, name: "gamma".into() }
    }

    pub fn reduction(dim_b: usize) -> Self {
        Self { dim_b, kind: MapKind::Reduction, name: "reduction".into() }
    }

    /// Wrap an explicit superoperator, verifying its shape and that it
    /// preserves Hermiticity (checked on the basis of matrix units).
    pub fn from_superop(dim_b: usize, superop: CMat, name: impl Into<String>) -> Result<Self> {
        if dim_b == 0 {
            return Err(Error::Shape("map dimension must be positive".into()));
        }
        let d2 = dim_b * dim_b;
        if superop.rows() != d2 || superop.cols() != d2 {
            return Err(Error::Shape(format!(
                "superoperator must be {d2}x{d2} for dim_b = {dim_b}, got {}x{}",
                superop.rows(),
                superop.cols()
            )));
        }
        let map = Self { dim_b, kind: MapKind::Superoperator(superop), name: name.into() };
        for r in 0..dim_b {
            for s in 0..dim_b {
                let mut unit = CMat::zeros(dim_b, dim_b);
                unit[(r, s)] = Complex64::new(1.0, 0.0);
                let lhs = map.apply(&unit.adjoint())?;
                let rhs = map.apply(&unit)?.adjoint();
                let defect = lhs.max_abs_diff(&rhs);
                if defect > HERM_PRESERVE_TOL {
                    return Err(Error::Validation(format!(
                        "superoperator does not preserve Hermiticity: \
                         defect {defect:.3e} on matrix unit ({r},{s})"
                    )));
                }
            }
        }
        Ok(map)
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    /// Short label used in reports and CSV output.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Apply the map to a dim_b x dim_b matrix.
    pub fn apply(&self, x: &CMat) -> Result<CMat> {
        if x.rows() != self.dim_b || x.cols() != self.dim_b {
            return Err(Error::Shape(format!(
                "map acts on {0}x{0} matrices, got {1}x{2}",
                self.dim_b,
                x.rows(),
                x.cols()
            )));
        }
        match &self.kind {
            MapKind::Transpose => Ok(x.transpose()),
            MapKind::Reduction => {
                let tr = x.trace()?;
                CMat::identity(self.dim_b).scale(tr).sub(x)
            }
            MapKind::HouGamma => {
                let a = |i: usize, j: usize| x[(i, j)];
                let out = CMat::from_fn(3, 3, |i, j| {
                    if i == j {
                        a(i, i) + a((i + 1) % 3, (i + 1) % 3)
                    } else {
                        -a(i, j)
                    }
                });
                Ok(out.scale_real(0.5))
            }
            MapKind::Superoperator(l) => {
                let vec_x: Vec<Complex64> = x.entries().to_vec();
                let vec_y = l.matvec(&vec_x)?;
                CMat::new(self.dim_b, self.dim_b, vec_y)
            }
        }
    }

    /// Apply I⊗Λ: the map acts on each dim_b x dim_b block of the state.
    /// The output is validated to be Hermitian within 1e-9 and returned
    /// symmetrized; for the transpose this reproduces the partial transpose
    /// exactly.
    pub fn extend_apply(&self, state: &BipartiteState) -> Result<CMat> {
        if state.dim_b() != self.dim_b {
            return Err(Error::Shape(format!(
                "map acts on dimension {}, state has dim_b = {}",
                self.dim_b,
                state.dim_b()
            )));
        }
        let (da, db) = (state.dim_a(), state.dim_b());
        let d = da * db;
        let mut out = CMat::zeros(d, d);
        for bi in 0..da {
            for bj in 0..da {
                let block = CMat::from_fn(db, db, |r, c| state.mat()[(bi * db + r, bj * db + c)]);
                let mapped = self.apply(&block)?;
                for r in 0..db {
                    for c in 0..db {
                        out[(bi * db + r, bj * db + c)] = mapped[(r, c)];
                    }
                }
            }
        }
        let (defect, (i, j)) = out.hermiticity_defect();
        if defect > HERM_PRESERVE_TOL * out.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian(format!(
                "map output defect {defect:.3e} at entries ({i},{j})/({j},{i})"
            )));
        }
        out.symmetrize()
    }

    /// The superoperator matrix of this map: column (r·dim_b + s) is
    /// vec(Λ(E_rs)).
    pub fn to_superop(&self) -> Result<CMat> {
        let db = self.dim_b;
        let d2 = db * db;
        let mut l = CMat::zeros(d2, d2);
        for r in 0..db {
            for s in 0..db {
                let mut unit = CMat::zeros(db, db);
                unit[(r, s)] = Complex64::new(1.0, 0.0);
                let mapped = self.apply(&unit)?;
                let col = r * db + s;
                for (row, z) in mapped.entries().iter().enumerate() {
                    l[(row, col)] = *z;
                }
            }
        }
        Ok(l)
    }
}

// ---------------------------------------------------------------------------
// Map files
// ---------------------------------------------------------------------------

/// On-disk form: `{"dimB": .., "superop": [[[re, im], ..], ..]}`.
#[derive(Debug, Serialize, Deserialize)]
struct MapFile {
    #[serde(rename = "dimB")]
    dim_b: usize,
    superop: Vec<Vec<[f64; 2]>>,
}

/// Parse a superoperator map from map-file JSON.
pub fn superop_from_json(text: &str, name: impl Into<String>) -> Result<PositiveMap> {
    let file: MapFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad map file: {e}")))?;
    let d2 = file.dim_b * file.dim_b;
    if file.superop.len() != d2 || file.superop.iter().any(|row| row.len() != d2) {
        return Err(Error::Validation(format!(
            "superop must be {d2}x{d2} for dimB = {}, got {} rows",
            file.dim_b,
            file.superop.len()
        )));
    }
    let entries: Vec<Complex64> = file
        .superop
        .iter()
        .flatten()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    let mat = CMat::new(d2, d2, entries)?;
    PositiveMap::from_superop(file.dim_b, mat, name)
}

pub fn superop_from_file(path: &Path) -> Result<PositiveMap> {
    let text = std::fs::read_to_string(path)?;
    superop_from_json(&text, path.display().to_string())
}

/// Serialize a map's superoperator in the map-file format.
pub fn superop_to_json(map: &PositiveMap) -> Result<String> {
    let l = map.to_superop()?;
    let d2 = l.rows();
    let superop: Vec<Vec<[f64; 2]>> = (0..d2)
        .map(|i| (0..d2).map(|j| [l[(i, j)].re, l[(i, j)].im]).collect())
        .collect();
    crate::bipartite::to_json_string(&MapFile { dim_b: map.dim_b(), superop })
}
