//! End-to-end tests of the command-line interface: exit codes, file
//! outputs, and determinism of repeated invocations.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex64;

use focqs::pauli::{transverse_field_mixer, Axis, PauliSum, PauliTerm};
use focqs::problems::{write_instance, InstanceParams, ProblemInstance, ProblemKind};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_focqs"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("spawn focqs");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_code(args: &[&str]) -> i32 {
    bin()
        .args(args)
        .output()
        .expect("spawn focqs")
        .status
        .code()
        .unwrap_or(-1)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_ising_writes_deterministic_instance() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    run_ok(&["gen", "--kind", "ising", "--n", "10", "--seed", "42", "--out", path_str(&a)]);
    run_ok(&["gen", "--kind", "ising", "--n", "10", "--seed", "42", "--out", path_str(&b)]);
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap(), "repeat invocations differ");

    let inst = focqs::problems::read_instance(&a).unwrap();
    assert_eq!(inst.kind, ProblemKind::Ising);
    assert_eq!(inst.cost.len(), 45); // n(n-1)/2 coupling terms
}

#[test]
fn gen_mis_accepts_lambda_and_stays_connected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mis.json");
    run_ok(&[
        "gen", "--kind", "mis", "--n", "8", "--seed", "7", "--lambda", "2", "--out",
        path_str(&path),
    ]);
    let inst = focqs::problems::read_instance(&path).unwrap();
    match &inst.params {
        InstanceParams::Mis { edges, weights, lambda } => {
            assert_eq!(*lambda, 2.0);
            assert_eq!(weights.len(), 8);
            assert!(!edges.is_empty());
        }
        _ => panic!("expected MIS params"),
    }
}

#[test]
fn gen_rejects_unknown_kind_with_usage_exit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    assert_eq!(
        exit_code(&["gen", "--kind", "tsp", "--n", "4", "--seed", "0", "--out", path_str(&path)]),
        2
    );
}

#[test]
fn run_falqon_produces_trace_and_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    run_ok(&["gen", "--kind", "ising", "--n", "6", "--seed", "1", "--out", path_str(&inst)]);
    let trace = dir.path().join("run.trace");
    run_ok(&[
        "run", "--algo", "falqon", "--instance", path_str(&inst), "--layers", "12", "--out",
        path_str(&trace),
    ]);
    let text = std::fs::read_to_string(&trace).unwrap();
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("layer"))
        .collect();
    assert_eq!(rows.len(), 12);
    assert!(text.contains("layer,u,phi,phi_tilde,energy,cum_time"));
    assert!(text.contains("\"algorithm\":\"falqon\""));

    let schedule: PathBuf = PathBuf::from(format!("{}.schedule.json", trace.display()));
    let (sched, prov) = focqs::controllers::read_schedule(&schedule).unwrap();
    assert_eq!(sched.len(), 12);
    assert_eq!(sched.u[0], 0.0);
    assert_eq!(prov.algorithm, "falqon");
}

#[test]
fn run_focqs_records_resolved_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    run_ok(&["gen", "--kind", "ising", "--n", "5", "--seed", "2", "--out", path_str(&inst)]);
    let trace = dir.path().join("focqs.trace");
    run_ok(&[
        "run", "--algo", "focqs", "--instance", path_str(&inst), "--layers", "10", "--beta0",
        "10", "--falloff", "2", "--out", path_str(&trace),
    ]);
    let text = std::fs::read_to_string(&trace).unwrap();
    let config_line = text.lines().find(|l| l.starts_with("# config:")).unwrap();
    assert!(config_line.contains("\"beta0\":10.0"), "{config_line}");
    assert!(config_line.contains("\"falloff\":2.0"), "{config_line}");
    assert!(config_line.contains("\"window\":\"unbounded\""), "{config_line}");
}

#[test]
fn focqs_iter_requires_input_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    run_ok(&["gen", "--kind", "ising", "--n", "4", "--seed", "0", "--out", path_str(&inst)]);
    let out = dir.path().join("x.trace");
    assert_eq!(
        exit_code(&[
            "run", "--algo", "focqs-iter", "--instance", path_str(&inst), "--out", path_str(&out)
        ]),
        2
    );
}

#[test]
fn run_rejects_unknown_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    run_ok(&["gen", "--kind", "ising", "--n", "4", "--seed", "0", "--out", path_str(&inst)]);
    let out = dir.path().join("x.trace");
    assert_eq!(
        exit_code(&[
            "run", "--algo", "annealing", "--instance", path_str(&inst), "--out", path_str(&out)
        ]),
        2
    );
}

#[test]
fn iter_pipeline_runs_from_schedule_file() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    run_ok(&["gen", "--kind", "ising", "--n", "5", "--seed", "4", "--out", path_str(&inst)]);
    let trace0 = dir.path().join("focqs.trace");
    run_ok(&[
        "run", "--algo", "focqs", "--instance", path_str(&inst), "--layers", "15", "--out",
        path_str(&trace0),
    ]);
    let u0 = format!("{}.schedule.json", trace0.display());
    let trace1 = dir.path().join("iter.trace");
    run_ok(&[
        "run", "--algo", "focqs-iter", "--instance", path_str(&inst), "--layers", "15", "--u0",
        &u0, "--out", path_str(&trace1),
    ]);
    let (sched, prov) = focqs::controllers::read_schedule(Path::new(&format!(
        "{}.schedule.json",
        trace1.display()
    )))
    .unwrap();
    assert_eq!(sched.len(), 15);
    assert_eq!(prov.algorithm, "focqs-iter");
}

#[test]
fn focqs_iter_rejects_depth_beyond_input_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    run_ok(&["gen", "--kind", "ising", "--n", "4", "--seed", "3", "--out", path_str(&inst)]);
    let trace0 = dir.path().join("focqs.trace");
    run_ok(&[
        "run", "--algo", "focqs", "--instance", path_str(&inst), "--layers", "8", "--out",
        path_str(&trace0),
    ]);
    let u0 = format!("{}.schedule.json", trace0.display());
    let out = dir.path().join("iter.trace");
    assert_eq!(
        exit_code(&[
            "run", "--algo", "focqs-iter", "--instance", path_str(&inst), "--layers", "20",
            "--u0", &u0, "--out", path_str(&out)
        ]),
        2
    );
}

#[test]
fn solve_reports_tie_broken_bitstring() {
    // Two-qubit Ising with J_01 = 1: ground energy -1, reported "01".
    let dir = tempfile::tempdir().unwrap();
    let term = PauliTerm::new(Complex64::new(1.0, 0.0), &[(0, Axis::Z), (1, Axis::Z)]).unwrap();
    let inst = ProblemInstance {
        kind: ProblemKind::Ising,
        n: 2,
        seed: 0,
        params: InstanceParams::Ising {
            couplings: vec![(0, 1, 1.0)],
        },
        cost: PauliSum::from_terms(2, vec![term]).unwrap(),
        mixer: transverse_field_mixer(2),
    };
    let path = dir.path().join("ising2.json");
    write_instance(&path, &inst).unwrap();
    let out = run_ok(&["solve", "--instance", path_str(&path)]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("energy: -1.0000000000000000e0"), "{stdout}");
    assert!(stdout.contains("bitstring: 01"), "{stdout}");
}

#[test]
fn solve_takes_the_weighted_node() {
    // Two nodes, no edges, weights 1.5 and 0: the zero-weight node ties
    // into the complement, so the reported set is node 0 alone.
    let dir = tempfile::tempdir().unwrap();
    let mut terms = Vec::new();
    for (i, r) in [(0usize, 1.5f64), (1, 0.0)] {
        terms.push(PauliTerm::new(Complex64::new(-r / 2.0, 0.0), &[(i, Axis::Z)]).unwrap());
        terms.push(PauliTerm::identity(Complex64::new(-r / 2.0, 0.0)));
    }
    let inst = ProblemInstance {
        kind: ProblemKind::Mis,
        n: 2,
        seed: 0,
        params: InstanceParams::Mis {
            edges: vec![],
            weights: vec![1.5, 0.0],
            lambda: 2.0,
        },
        cost: PauliSum::from_terms(2, terms).unwrap(),
        mixer: transverse_field_mixer(2),
    };
    let path = dir.path().join("mis2.json");
    write_instance(&path, &inst).unwrap();
    let out = run_ok(&["solve", "--instance", path_str(&path)]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("energy: -1.5000000000000000e0"), "{stdout}");
    assert!(stdout.contains("bitstring: 01"), "{stdout}");
}

#[test]
fn solve_rejects_non_diagonal_cost() {
    let dir = tempfile::tempdir().unwrap();
    let inst = ProblemInstance {
        kind: ProblemKind::Ising,
        n: 2,
        seed: 0,
        params: InstanceParams::Ising { couplings: vec![] },
        cost: transverse_field_mixer(2),
        mixer: transverse_field_mixer(2),
    };
    let path = dir.path().join("bad.json");
    write_instance(&path, &inst).unwrap();
    assert_eq!(exit_code(&["solve", "--instance", path_str(&path)]), 1);
}

#[test]
fn sweep_runs_config_and_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(
        &config,
        r#"{
            "kind": "ising",
            "n": [4],
            "seeds": [0, 1],
            "layers": 15,
            "dt": 0.1,
            "algorithms": [{"name": "falqon"}]
        }"#,
    )
    .unwrap();
    let out_path = dir.path().join("summary.json");
    run_ok(&["sweep", "--config", path_str(&config), "--out", path_str(&out_path)]);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let summary: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(summary["cells"][0]["trials"], 2);
    assert_eq!(summary["cells"][0]["algorithm"], "falqon");
}

#[test]
fn sweep_rejects_unknown_algorithm_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    std::fs::write(
        &config,
        r#"{"kind": "ising", "n": [4], "seeds": [0], "algorithms": [{"name": "grover"}]}"#,
    )
    .unwrap();
    let out_path = dir.path().join("summary.json");
    let out = bin()
        .args(["sweep", "--config", path_str(&config), "--out", path_str(&out_path)])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("grover"),
        "stderr should name the bad algorithm"
    );
}

#[test]
fn replay_reproduces_run_energy_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    run_ok(&["gen", "--kind", "ising", "--n", "5", "--seed", "9", "--out", path_str(&inst)]);
    let trace = dir.path().join("run.trace");
    run_ok(&[
        "run", "--algo", "falqon", "--instance", path_str(&inst), "--layers", "20", "--out",
        path_str(&trace),
    ]);
    let schedule = format!("{}.schedule.json", trace.display());
    let replay = dir.path().join("replay.trace");
    run_ok(&[
        "replay", "--instance", path_str(&inst), "--schedule", &schedule, "--out",
        path_str(&replay),
    ]);

    let energy_column = |path: &Path| -> Vec<String> {
        std::fs::read_to_string(path)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("layer"))
            .map(|l| l.split(',').nth(4).unwrap().to_string())
            .collect()
    };
    assert_eq!(
        energy_column(&trace),
        energy_column(&replay),
        "replayed energies must match the recorded run bit-for-bit"
    );
}
