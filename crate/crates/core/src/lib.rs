//! Numerical certification of bipartite entanglement.
//!
//! The crate evaluates a battery of separability criteria on a bipartite
//! density matrix: moment criteria on the partial transpose (p3-PPT, the D3
//! inequality, p3-OPPT, Hankel moment matrices), realignment-based criteria
//! (CCNR trace norm, realignment moments, R-moments), a characteristic-
//! polynomial sign test on the output of an arbitrary positive map, and a
//! full-eigendecomposition PPT oracle. Every criterion returns a structured
//! [`Verdict`](criteria::Verdict): `Entangled` when its witness exceeds the
//! decision tolerance, `Inconclusive` otherwise.
//!
//! The characteristic-polynomial test needs only the power-sum traces of the
//! map output, which it converts to polynomial coefficients with the
//! Newton / Faddeev-LeVerrier recursion — no eigendecomposition, which is
//! what makes the criterion estimable from moment data.
//!
//! ```
//! use entcert::bipartite::BipartiteState;
//! use entcert::criteria::{self, Decision};
//! use entcert::maps::PositiveMap;
//!
//! let state = BipartiteState::paper_ppt_family(0.7).unwrap();
//! let map = PositiveMap::hou_gamma();
//! let verdict = criteria::charpoly_signs(&state, &map, entcert::DEFAULT_TOL).unwrap();
//! assert_eq!(verdict.decision, Decision::Entangled);
//! ```

pub mod bipartite;
pub mod criteria;
pub mod error;
pub mod linalg;
pub mod maps;
pub mod rng;
pub mod scan;
pub mod spectra;

pub use bipartite::BipartiteState;
pub use criteria::{CriterionId, CriterionReport, Decision, Verdict};
pub use error::{Error, Result};
pub use linalg::CMat;
pub use maps::PositiveMap;
pub use spectra::{CharPolyCoeffs, Moments};

/// Decision tolerance shared by all criteria: a witness must exceed this to
/// flag entanglement. States are trace-normalized, so witnesses are O(1) and
/// 1e-9 cleanly separates rounding noise from signal at the dimensions in
/// scope.
pub const DEFAULT_TOL: f64 = 1e-9;
