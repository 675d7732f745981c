//! Binary-level contract tests: exit codes, diagnostics, report determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_conslaw-forge")
}

fn repo(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn strip_timestamp(text: &str) -> String {
    text.lines()
        .filter(|line| !line.trim_start().starts_with("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn eq(rel: &str) -> String {
    repo(rel).display().to_string()
}

#[test]
fn malformed_equation_exits_2_with_diagnostic() {
    let dir = std::env::temp_dir().join("conslaw_cli_io");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.eq");
    std::fs::write(&bad, "equation: Dt(u) + (f(u)*").unwrap();
    let out = run(&["adjoint", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("error"), "stderr was: {stderr}");
}

#[test]
fn unknown_command_exits_2() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_0() {
    let out = run(&["help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("conslaw-forge"));
}

#[test]
fn adjoint_renders_the_linear_heat_adjoint() {
    let out = run(&["adjoint", &eq("equations/linear_heat_y.eq")]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("v_t + k*v_yy"), "stdout: {stdout}");
}

#[test]
fn reports_are_deterministic_up_to_the_timestamp() {
    let args = [
        "selfadjoint",
        &eq("equations/source2d_trig.eq"),
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    let a = strip_timestamp(&String::from_utf8_lossy(&a.stdout));
    let b = strip_timestamp(&String::from_utf8_lossy(&b.stdout));
    assert_eq!(a, b);
    assert!(a.contains("content_hash"));
}

#[test]
fn oracle_mode_is_seed_deterministic() {
    let vectors = eq("configs/vectors3d.json");
    let args = [
        "verify",
        &eq("equations/anisotropic3d.eq"),
        &vectors,
        "--mode",
        "oracle",
        "--seed",
        "7",
        "--samples",
        "200",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(
        strip_timestamp(&String::from_utf8_lossy(&a.stdout)),
        strip_timestamp(&String::from_utf8_lossy(&b.stdout))
    );
}

#[test]
fn corrupted_vector_fails_verification_with_exit_1() {
    let out = run(&[
        "verify",
        &eq("equations/anisotropic3d.eq"),
        &eq("configs/vectors3d_corrupted.json"),
        "--mode",
        "oracle",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL"));
}

#[test]
fn symbolic_verification_extracts_the_multiplier() {
    let out = run(&[
        "verify",
        &eq("equations/anisotropic3d.eq"),
        &eq("configs/vectors3d.json"),
        "--mode",
        "symbolic",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("Div C = (1) * F"));
    assert!(stdout.contains("Div C = (y*z) * F"));
}

#[test]
fn oversized_3d_simulation_is_rejected() {
    let dir = std::env::temp_dir().join("conslaw_cli_io");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("big3d.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "dims": 3,
            "n": [96, 16, 16],
            "extents": [[0.0,1.0],[0.0,1.0],[0.0,1.0]],
            "t_end": 0.001,
            "boundary": "periodic",
            "models": {"f": {"kind": "constant", "value": 1.0},
                        "g": {"kind": "constant", "value": 1.0},
                        "h": {"kind": "constant", "value": 1.0}},
            "initial": {"kind": "constant", "value": 1.0}
        })
        .to_string(),
    )
    .unwrap();
    let out = run(&["simulate", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("64"));
}

#[test]
fn simulate_writes_the_declared_artifacts() {
    let dir = std::env::temp_dir().join(format!("conslaw_sim_{}", std::process::id()));
    let out = run(&[
        "simulate",
        &eq("configs/linear2d.json"),
        "--balance",
        &eq("configs/vectors2d.json"),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for artifact in ["report.json", "final.bin", "residuals_mass.csv"] {
        assert!(dir.join(artifact).exists(), "missing {artifact}");
    }
    // the snapshot round-trips
    let (grid, field) = conslaw_numlab::output::read_snapshot(&dir.join("final.bin")).unwrap();
    assert_eq!(grid.cells(), field.len());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn mismatched_ansatz_request_is_diagnosed() {
    let out = run(&[
        "selfadjoint",
        &eq("equations/source2d_trig.eq"),
        "--ansatz",
        "poly",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("requested ansatz `poly`"),
        "stdout: {stdout}"
    );
}

#[test]
fn time_translation_alone_yields_only_trivial_vectors() {
    let out = run(&[
        "conslaws",
        &eq("equations/anisotropic3d.eq"),
        "--symmetries",
        "t",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("all conserved vectors trivial"));
    assert!(stdout.contains("independent nontrivial vectors: 0"));
}

#[test]
fn latex_emission_renders_component_per_line() {
    let out = run(&[
        "conslaws",
        &eq("equations/source2d_trig.eq"),
        "--symmetries",
        "x",
        "--format",
        "latex",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("\\begin{align}"));
    assert!(stdout.contains("C^1 &="));
    assert!(stdout.contains("\\sin(\\omega x)"));
}
