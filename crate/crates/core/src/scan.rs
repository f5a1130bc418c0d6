//! Parameter scans over the built-in state family: evaluate criterion
//! witnesses on a grid, bracket every decision flip, and refine each bracket
//! by bisection.
//!
//! Witnesses are continuous in the family parameter and a criterion fires
//! when its witness exceeds the decision tolerance, so thresholds are roots
//! of `witness(a) − tol`. The coarse grid may bracket several flips; all of
//! them are reported, and the quoted threshold is the largest parameter
//! below which the criterion fires.

use serde::{Deserialize, Serialize};

use crate::bipartite::BipartiteState;
use crate::criteria::{self, CriterionId, Decision};
use crate::error::{Error, Result};
use crate::maps::PositiveMap;

/// Bisection iteration count; brackets of grid width shrink far below any
/// quoted tolerance.
pub const BISECTION_STEPS: usize = 40;

/// One grid evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridRow {
    pub a: f64,
    pub criterion: CriterionId,
    pub map: Option<String>,
    pub witness: f64,
    pub decision: Decision,
}

/// A sign change of `witness − tol` refined by bisection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub root: f64,
    pub iterations: usize,
}

/// Per-criterion scan summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanResult {
    pub criterion: CriterionId,
    pub map: Option<String>,
    /// Largest parameter below which the criterion fires, when the scan saw
    /// the decision flip from entangled to inconclusive.
    pub threshold: Option<f64>,
    pub brackets: Vec<Bracket>,
    pub grid_points: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanOutput {
    pub family: String,
    pub tol: f64,
    pub rows: Vec<GridRow>,
    pub results: Vec<ScanResult>,
}

/// The scannable criterion/map pairs for one run.
fn scan_targets(
    criteria_ids: &[CriterionId],
    maps: &[PositiveMap],
) -> Vec<(CriterionId, Option<PositiveMap>)> {
    let mut targets = Vec::new();
    for &id in criteria_ids {
        if id.is_map_dependent() {
            for m in maps {
                targets.push((id, Some(m.clone())));
            }
        } else {
            targets.push((id, None));
        }
    }
    targets
}

/// Scan the one-parameter 3⊗3 family over `[lo, hi]` with the given grid
/// step, then bisect every decision flip.
pub fn scan_paper_family(
    lo: f64,
    hi: f64,
    step: f64,
    criteria_ids: &[CriterionId],
    maps: &[PositiveMap],
    tol: f64,
) -> Result<ScanOutput> {
    if lo.is_nan() || lo < 0.5 {
        return Err(Error::Domain(format!(
            "family is defined for a >= 0.5, scan starts at {lo}"
        )));
    }
    if hi.is_nan() || hi <= lo {
        return Err(Error::Domain(format!("empty scan range [{lo}, {hi}]")));
    }
    if step.is_nan() || step <= 0.0 {
        return Err(Error::Domain(format!("step must be positive, got {step}")));
    }

    let default_maps = [PositiveMap::hou_gamma()];
    let maps: &[PositiveMap] = if maps.is_empty() { &default_maps } else { maps };
    let targets = scan_targets(criteria_ids, maps);

    let n_steps = ((hi - lo) / step + 1e-9).floor() as usize;
    let grid: Vec<f64> = (0..=n_steps).map(|i| lo + i as f64 * step).collect();

    let mut rows = Vec::with_capacity(grid.len() * targets.len());
    // witness samples per target, in grid order
    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.len()); targets.len()];
    for &a in &grid {
        let state = BipartiteState::paper_ppt_family(a)?;
        for (t, (id, map)) in targets.iter().enumerate() {
            let verdict = criteria::run_criterion(*id, &state, map.as_ref(), tol)?;
            samples[t].push(verdict.witness);
            rows.push(GridRow {
                a,
                criterion: *id,
                map: map.as_ref().map(|m| m.name().to_string()),
                witness: verdict.witness,
                decision: verdict.decision,
            });
        }
    }

    let mut results = Vec::with_capacity(targets.len());
    for (t, (id, map)) in targets.iter().enumerate() {
        let witness_at = |a: f64| -> Result<f64> {
            let state = BipartiteState::paper_ppt_family(a)?;
            Ok(criteria::run_criterion(*id, &state, map.as_ref(), tol)?.witness)
        };
        let mut brackets = Vec::new();
        for w in 0..n_steps {
            let (ga, gb) = (samples[t][w] - tol, samples[t][w + 1] - tol);
            if (ga > 0.0) != (gb > 0.0) {
                let root = bisect(grid[w], grid[w + 1], ga, &witness_at, tol)?;
                brackets.push(Bracket {
                    lo: grid[w],
                    hi: grid[w + 1],
                    root,
                    iterations: BISECTION_STEPS,
                });
            }
        }
        // Threshold: the largest root where the criterion stops firing as a
        // grows (left side entangled, right side not).
        let threshold = brackets
            .iter()
            .filter(|b| {
                let left = samples[t][grid.iter().position(|&g| g == b.lo).unwrap()];
                left - tol > 0.0
            })
            .map(|b| b.root)
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))));
        results.push(ScanResult {
            criterion: *id,
            map: map.as_ref().map(|m| m.name().to_string()),
            threshold,
            brackets,
            grid_points: grid.len(),
        });
    }

    Ok(ScanOutput { family: "paper-ppt".into(), tol, rows, results })
}

fn bisect<F>(mut lo: f64, mut hi: f64, g_lo: f64, witness_at: &F, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut sign_lo = g_lo > 0.0;
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let g_mid = witness_at(mid)? - tol;
        if (g_mid > 0.0) == sign_lo {
            lo = mid;
            sign_lo = g_mid > 0.0;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Fixed-format float for byte-stable CSV output: 17 significant digits.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Render a scan as CSV: one block of grid rows with columns
/// `a,criterion,map,witness,decision`, then a threshold summary block.
pub fn to_csv(output: &ScanOutput) -> String {
    let mut s = String::new();
    s.push_str("a,criterion,map,witness,decision\n");
    for row in &output.rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(row.a),
            row.criterion,
            row.map.as_deref().unwrap_or("-"),
            fmt_f64(row.witness),
            row.decision
        ));
    }
    s.push('\n');
    s.push_str("# thresholds\n");
    s.push_str("criterion,map,threshold,brackets,iterations\n");
    for r in &output.results {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.criterion,
            r.map.as_deref().unwrap_or("-"),
            r.threshold.map_or_else(|| "none".to_string(), fmt_f64),
            r.brackets.len(),
            BISECTION_STEPS
        ));
    }
    s
}
