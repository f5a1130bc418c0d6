//! End-to-end tests driving the compiled binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entcert"))
}

fn workdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("entcert-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn generate_family_state_matches_expected_entries() {
    let dir = workdir("gen");
    let path = dir.join("rho1.json");
    let out = run(bin()
        .args(["generate", "paper-ppt", "--a", "1.0", "--out"])
        .arg(&path));
    assert!(out.status.success(), "{out:?}");

    let state = entcert::bipartite::load_state(&path).unwrap();
    assert_eq!((state.dim_a(), state.dim_b()), (3, 3));
    assert!((state.mat()[(0, 0)].re - 1.0 / 12.0).abs() < 1e-15);
    assert!((state.mat()[(2, 2)].re - 2.0 / 12.0).abs() < 1e-15);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn generate_is_deterministic_per_seed() {
    let dir = workdir("det");
    let (p1, p2) = (dir.join("s1.json"), dir.join("s2.json"));
    for p in [&p1, &p2] {
        let out = run(bin()
            .args([
                "generate",
                "random-separable",
                "--dim-a",
                "3",
                "--dim-b",
                "3",
                "--terms",
                "5",
                "--seed",
                "7",
                "--out",
            ])
            .arg(p));
        assert!(out.status.success(), "{out:?}");
    }
    let b1 = std::fs::read(&p1).unwrap();
    let b2 = std::fs::read(&p2).unwrap();
    assert_eq!(b1, b2, "same seed must give byte-identical files");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn evaluate_family_state_with_gamma_flags_expected_criteria() {
    let dir = workdir("eval");
    let path = dir.join("rho07.json");
    assert!(run(bin()
        .args(["generate", "paper-ppt", "--a", "0.7", "--out"])
        .arg(&path))
    .status
    .success());

    let out = run(bin()
        .args(["evaluate", "--map", "gamma", "--format", "json", "--state"])
        .arg(&path));
    assert!(out.status.success(), "{out:?}");
    let report: entcert::criteria::CriterionReport =
        serde_json::from_str(&stdout_of(&out)).unwrap();
    let mut flags = report.entangled_flags();
    flags.sort();
    assert_eq!(
        flags,
        vec!["ccnr", "charpoly-signs(gamma)", "hankel(gamma)", "r-moments"]
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn evaluate_bell_state_reports_p3_ppt_witness() {
    let dir = workdir("bell");
    let path = dir.join("bell.json");
    assert!(run(bin().args(["generate", "bell", "--out"]).arg(&path)).status.success());

    let out = run(bin()
        .args(["evaluate", "--map", "transpose", "--format", "json", "--state"])
        .arg(&path));
    assert!(out.status.success());
    let report: entcert::criteria::CriterionReport =
        serde_json::from_str(&stdout_of(&out)).unwrap();
    let v = report
        .verdicts
        .iter()
        .find(|v| v.criterion == entcert::criteria::CriterionId::P3Ppt)
        .unwrap();
    assert!((v.witness - 0.75).abs() < 1e-12);
    assert!(v.is_entangled());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn evaluate_rejects_bad_trace_with_exit_code_two() {
    let dir = workdir("badtrace");
    let path = dir.join("bad.json");
    std::fs::write(
        &path,
        r#"{"dimA":1,"dimB":2,"matrix":[[[0.5,0.0],[0.0,0.0]],[[0.0,0.0],[0.4,0.0]]]}"#,
    )
    .unwrap();
    let out = run(bin().args(["evaluate", "--state"]).arg(&path));
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("trace"), "stderr: {err}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn evaluate_rejects_malformed_json_with_exit_code_two() {
    let dir = workdir("badjson");
    let path = dir.join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = run(bin().args(["evaluate", "--state"]).arg(&path));
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn scan_finds_realignment_moment_threshold() {
    let dir = workdir("scan");
    let csv_path = dir.join("scan.csv");
    let out = run(bin()
        .args([
            "scan",
            "--family",
            "paper-ppt",
            "--range",
            "0.53:0.58",
            "--step",
            "0.005",
            "--criteria",
            "realign-moments",
            "--out",
        ])
        .arg(&csv_path));
    assert!(out.status.success(), "{out:?}");
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let threshold = threshold_from_csv(&csv, "realign-moments");
    assert!((threshold - 0.554204).abs() < 1e-4, "threshold {threshold}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn scan_csv_is_byte_stable() {
    let args = [
        "scan",
        "--range",
        "0.5:0.6",
        "--step",
        "0.02",
        "--criteria",
        "ccnr,realign-moments",
        "--format",
        "csv",
    ];
    let a = run(bin().args(args));
    let b = run(bin().args(args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout_of(&a).starts_with("a,criterion,map,witness,decision\n"));
}

#[test]
fn scan_rejects_out_of_domain_range() {
    let out = run(bin().args(["scan", "--range", "0.2:0.4"]));
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn generate_requires_kind_parameters() {
    let dir = workdir("missing");
    let out = run(bin().args(["generate", "paper-ppt", "--out"]).arg(dir.join("x.json")));
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn evaluate_accepts_superoperator_map_file() {
    let dir = workdir("mapfile");
    let state_path = dir.join("rho.json");
    assert!(run(bin()
        .args(["generate", "paper-ppt", "--a", "0.7", "--out"])
        .arg(&state_path))
    .status
    .success());
    // Superoperator file for the builtin Hou map.
    let map_json = entcert::maps::superop_to_json(&entcert::maps::PositiveMap::hou_gamma()).unwrap();
    let map_path = dir.join("gamma.json");
    std::fs::write(&map_path, map_json).unwrap();

    let out = run(bin()
        .args(["evaluate", "--criteria", "charpoly-signs", "--format", "json"])
        .arg("--map")
        .arg(&map_path)
        .arg("--state")
        .arg(&state_path));
    assert!(out.status.success(), "{out:?}");
    let report: entcert::criteria::CriterionReport =
        serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report.verdicts.len(), 1);
    assert!(report.verdicts[0].is_entangled());
    std::fs::remove_dir_all(&dir).ok();
}

fn threshold_from_csv(csv: &str, criterion: &str) -> f64 {
    let mut in_summary = false;
    for line in csv.lines() {
        if line.starts_with("# thresholds") {
            in_summary = true;
            continue;
        }
        if in_summary && line.starts_with(criterion) {
            let fields: Vec<&str> = line.split(',').collect();
            return fields[2].parse().unwrap();
        }
    }
    panic!("criterion {criterion} not found in CSV summary:\n{csv}");
}
