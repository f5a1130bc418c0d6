//! `entcert` — evaluate entanglement criteria on state files, scan the
//! built-in state family for detection thresholds, and generate example
//! states.
//!
//! Exit codes: 0 on success, 2 on validation/usage errors, 3 on numerical
//! failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use entcert::bipartite::{self, BipartiteState};
use entcert::criteria::{self, CriterionId, CriterionReport};
use entcert::error::Error;
use entcert::maps::{self, PositiveMap};
use entcert::scan;
use entcert::DEFAULT_TOL;

#[derive(Parser)]
#[command(
    name = "entcert",
    about = "Certify bipartite entanglement from moments of positive-map outputs",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate criteria on a state file.
    Evaluate(EvaluateArgs),
    /// Scan a state family for per-criterion detection thresholds.
    Scan(ScanArgs),
    /// Generate an example state file.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct EvaluateArgs {
    /// State file to evaluate.
    #[arg(long)]
    state: PathBuf,
    /// Positive map: builtin name (transpose, gamma, reduction) or a map
    /// file path. Repeatable; defaults to the transpose.
    #[arg(long = "map")]
    maps: Vec<String>,
    /// Comma-separated criterion list, or "all".
    #[arg(long, default_value = "all")]
    criteria: String,
    /// Decision tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Output format on stdout: table or json.
    #[arg(long, default_value = "table")]
    format: String,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    /// State family to scan (only "paper-ppt" is built in).
    #[arg(long, default_value = "paper-ppt")]
    family: String,
    /// Parameter range as lo:hi.
    #[arg(long)]
    range: String,
    /// Grid step.
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Comma-separated criterion list, or "all".
    #[arg(long, default_value = "all")]
    criteria: String,
    /// Positive map for map-dependent criteria (repeatable; defaults to
    /// the Hou map for this 3x3 family).
    #[arg(long = "map")]
    maps: Vec<String>,
    /// Decision tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Output format on stdout: table, csv, or json.
    #[arg(long, default_value = "table")]
    format: String,
    /// Write the grid + threshold CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// State kind: paper-ppt, werner, bell, max-mixed, random-separable.
    kind: String,
    /// Family parameter for paper-ppt.
    #[arg(long)]
    a: Option<f64>,
    /// Mixing parameter for werner.
    #[arg(long)]
    p: Option<f64>,
    /// First subsystem dimension (max-mixed, random-separable).
    #[arg(long, default_value_t = 2)]
    dim_a: usize,
    /// Second subsystem dimension (max-mixed, random-separable).
    #[arg(long, default_value_t = 2)]
    dim_b: usize,
    /// Number of product terms for random-separable.
    #[arg(long, default_value_t = 4)]
    terms: usize,
    /// RNG seed for random-separable.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output state file.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Evaluate(args) => cmd_evaluate(args),
        Cmd::Scan(args) => cmd_scan(args),
        Cmd::Generate(args) => cmd_generate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

fn parse_criteria(text: &str) -> Result<Vec<CriterionId>, Error> {
    if text.trim() == "all" {
        return Ok(CriterionId::ALL.to_vec());
    }
    text.split(',').map(|part| part.trim().parse()).collect()
}

fn parse_map(text: &str, dim_b: usize) -> Result<PositiveMap, Error> {
    match text {
        "transpose" => Ok(PositiveMap::transpose(dim_b)),
        "gamma" => Ok(PositiveMap::hou_gamma()),
        "reduction" => Ok(PositiveMap::reduction(dim_b)),
        path => {
            let map = maps::superop_from_file(Path::new(path))?;
            // Positivity of a user superoperator is not verified; say so.
            eprintln!(
                "note: map {path:?} is user-supplied; only Hermiticity preservation was \
                 verified, positivity is trusted"
            );
            Ok(map)
        }
    }
}

fn parse_range(text: &str) -> Result<(f64, f64), Error> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| Error::Argument(format!("range must look like lo:hi, got {text:?}")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Argument(format!("bad range endpoint {s:?}")))
    };
    Ok((parse(lo)?, parse(hi)?))
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), Error> {
    let state = bipartite::load_state(&args.state)?;
    let maps = args
        .maps
        .iter()
        .map(|m| parse_map(m, state.dim_b()))
        .collect::<Result<Vec<_>, _>>()?;
    let which = parse_criteria(&args.criteria)?;
    let mut report = criteria::evaluate_all(&state, &maps, &which, args.tol);
    report.state = format!(
        "{}x{} bipartite state from {}",
        state.dim_a(),
        state.dim_b(),
        args.state.display()
    );

    match args.format.as_str() {
        "table" => print_report_table(&report),
        "json" => println!("{}", report_json(&report)?),
        other => {
            return Err(Error::Argument(format!(
                "unknown format {other:?}; expected table or json"
            )))
        }
    }
    if let Some(path) = &args.out {
        std::fs::write(path, report_json(&report)? + "\n")?;
    }
    Ok(())
}

fn report_json(report: &CriterionReport) -> Result<String, Error> {
    serde_json::to_string_pretty(report)
        .map_err(|e| Error::Parse(format!("report serialization failed: {e}")))
}

fn print_report_table(report: &CriterionReport) {
    println!("state: {}", report.state);
    println!("tol:   {:.3e}", report.tol);
    println!("{:<18} {:<12} {:<14} {:>14} {:>14}", "criterion", "map", "decision", "witness", "margin");
    for v in &report.verdicts {
        println!(
            "{:<18} {:<12} {:<14} {:>14.6e} {:>14.6e}",
            v.criterion.to_string(),
            v.map.as_deref().unwrap_or("-"),
            v.decision.to_string(),
            v.witness,
            v.margin
        );
    }
    let flags = report.entangled_flags();
    if flags.is_empty() {
        println!("summary: inconclusive (no criterion fired)");
    } else {
        println!("summary: entangled ({} fired: {})", flags.len(), flags.join(", "));
    }
}

fn cmd_scan(args: ScanArgs) -> Result<(), Error> {
    if args.family != "paper-ppt" {
        return Err(Error::Domain(format!(
            "unknown family {:?}; only paper-ppt is built in",
            args.family
        )));
    }
    let (lo, hi) = parse_range(&args.range)?;
    let criteria_ids = parse_criteria(&args.criteria)?;
    let maps = args
        .maps
        .iter()
        .map(|m| parse_map(m, 3))
        .collect::<Result<Vec<_>, _>>()?;
    let output = scan::scan_paper_family(lo, hi, args.step, &criteria_ids, &maps, args.tol)?;

    match args.format.as_str() {
        "table" => print_scan_table(&output),
        "csv" => print!("{}", scan::to_csv(&output)),
        "json" => println!(
            "{}",
            serde_json::to_string_pretty(&output)
                .map_err(|e| Error::Parse(format!("scan serialization failed: {e}")))?
        ),
        other => {
            return Err(Error::Argument(format!(
                "unknown format {other:?}; expected table, csv, or json"
            )))
        }
    }
    if let Some(path) = &args.out {
        std::fs::write(path, scan::to_csv(&output))?;
    }
    Ok(())
}

fn print_scan_table(output: &scan::ScanOutput) {
    println!("family: {}  tol: {:.3e}", output.family, output.tol);
    println!("{:<18} {:<12} {:>16} {:>10}", "criterion", "map", "threshold", "brackets");
    for r in &output.results {
        println!(
            "{:<18} {:<12} {:>16} {:>10}",
            r.criterion.to_string(),
            r.map.as_deref().unwrap_or("-"),
            r.threshold.map_or_else(|| "none".to_string(), |t| format!("{t:.6}")),
            r.brackets.len()
        );
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<(), Error> {
    let state = match args.kind.as_str() {
        "paper-ppt" => {
            let a = args.a.ok_or_else(|| {
                Error::Argument("paper-ppt needs --a <parameter>".into())
            })?;
            BipartiteState::paper_ppt_family(a)?
        }
        "werner" => {
            let p = args
                .p
                .ok_or_else(|| Error::Argument("werner needs --p <parameter>".into()))?;
            BipartiteState::werner_state(p)?
        }
        "bell" => BipartiteState::bell_state(),
        "max-mixed" => BipartiteState::max_mixed(args.dim_a, args.dim_b)?,
        "random-separable" => {
            BipartiteState::random_separable(args.dim_a, args.dim_b, args.terms, args.seed)?
        }
        other => {
            return Err(Error::Argument(format!(
                "unknown kind {other:?}; expected paper-ppt, werner, bell, max-mixed, \
                 or random-separable"
            )))
        }
    };
    bipartite::save_state(&state, &args.out)?;
    println!(
        "wrote {}x{} state to {}",
        state.dim_a(),
        state.dim_b(),
        args.out.display()
    );
    Ok(())
}
