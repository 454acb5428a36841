//! End-to-end tests of the `darboux` binary: exit codes, report schemas,
//! and the section/system file formats.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_darboux"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    format!("{}/examples/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

#[test]
fn bracket_of_canonical_pair_is_minus_one() {
    let out = run(&["bracket", "--f", "q1", "--g", "p1", "--at", "0,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["command"], "bracket");
    assert_eq!(report["value"].as_f64().unwrap(), -1.0);
}

#[test]
fn bracket_with_system_layout_names() {
    let out = run(&[
        "bracket",
        "--system",
        "ideal-gas",
        "--param",
        "R=2",
        "--f",
        "U",
        "--g",
        "S",
        "--at",
        "3,1,1,1,-1,1,2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    // {z, q1} = q1, here {U, S} = S = 3
    assert_eq!(stdout_json(&out)["value"].as_f64().unwrap(), 3.0);
}

#[test]
fn verify_passes_on_the_gas_solution_and_fails_on_the_bad_jet() {
    let ok = run(&[
        "verify",
        "--system",
        "ideal-gas",
        "--param",
        "R=2",
        "--section",
        &data("idealgas_G_c.json"),
        "--equation",
        "xh-alt",
        "--grid",
        "0.5:2:8",
    ]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let report = stdout_json(&ok);
    assert_eq!(report["pass"], true);
    assert_eq!(report["assumptions"], "satisfied");
    assert_eq!(report["samples"].as_u64().unwrap(), 512);
    assert!(report["max_residual"].as_f64().unwrap() <= 1e-10);

    let bad = run(&[
        "verify",
        "--system",
        "linear-dissipation",
        "--param",
        "lam=0",
        "--potential",
        "0",
        "--section",
        &data("free_particle_bad.json"),
        "--equation",
        "xh-alt",
        "--grid",
        "-1:1:9",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let report = stdout_json(&bad);
    assert_eq!(report["pass"], false);
    assert!((report["max_residual"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!(report["witness"].is_array());
}

#[test]
fn verify_solution_section_for_the_dissipative_preset() {
    let out = run(&[
        "verify",
        "--system",
        "linear-dissipation",
        "--param",
        "m=1",
        "--param",
        "lam=0.1",
        "--potential",
        "-2 - 0.2*q1",
        "--section",
        &data("dissipation_solution.json"),
        "--equation",
        "ev-alt",
        "--grid",
        "-1:1:11",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["pass"], true);
    assert!(report["constant"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn verify_rejects_equation_domain_mismatch() {
    let out = run(&[
        "verify",
        "--system",
        "linear-dissipation",
        "--section",
        &data("dissipation_solution.json"),
        "--equation",
        "xh",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_emits_csv_with_drift_footer() {
    let out = run(&[
        "simulate",
        "--system",
        "linear-dissipation",
        "--param",
        "m=1",
        "--param",
        "lam=0.1",
        "--potential",
        "q1^2/2",
        "--field",
        "evolution",
        "--x0",
        "1,1,1",
        "--t-end",
        "10",
        "--dt",
        "1e-3",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,q1,p1,z,H");
    let footer = text
        .lines()
        .find(|l| l.starts_with("# H-drift:"))
        .expect("drift footer present");
    let drift: f64 = footer.trim_start_matches("# H-drift:").trim().parse().unwrap();
    assert!(drift < 1e-8, "drift {drift}");
    // 10001 samples + header + footer
    assert_eq!(text.lines().count(), 10003);
}

#[test]
fn simulate_emits_json_records() {
    let out = run(&[
        "simulate",
        "--system",
        &data("damped_oscillator.json"),
        "--field",
        "hamiltonian",
        "--x0",
        "1,1,1",
        "--t-end",
        "0.5",
        "--dt",
        "0.1",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let records = stdout_json(&out);
    let array = records.as_array().unwrap();
    assert_eq!(array.len(), 6);
    assert_eq!(array[0]["t"], 0.0);
    assert!(array[0]["H"].as_f64().unwrap() > 0.0);
}

#[test]
fn classify_reports_section_type() {
    let out = run(&["classify", "--section", &data("free_particle_bad.json")]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["legendrian"], true);

    let out = run(&["classify", "--section", &data("gaussian_lift.json"), "--grid", "-1:1:5,0.5:1.5:5"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["coisotropic"], true);
    assert_eq!(report["lagrangian_leaves"], true);
}

#[test]
fn symplectify_check_passes_for_presets() {
    let out = run(&[
        "symplectify-check",
        "--system",
        "ideal-gas",
        "--param",
        "R=2",
        "--points",
        "30",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["pass"], true);
    assert!(report["max_residual"].as_f64().unwrap() <= 1e-9);
    assert!(report["homogeneity_defect"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn symplectify_check_runs_the_exp_z_profile() {
    let out = run(&[
        "symplectify-check",
        "--system",
        "linear-dissipation",
        "--tilde-section",
        &data("exp_z_section.json"),
        "--grid",
        "-1:1:5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert!(report["exp_z_defect"].as_f64().unwrap() < 1e-12);
}

#[test]
fn lift_command_reproduces_the_gaussian_scale() {
    let out = run(&[
        "lift",
        "--section",
        &data("gaussian_lift.json"),
        "--sigma",
        "1/z",
        "--grid",
        "-1:1:5,0.5:1.5:3",
        "--tol",
        "1e-9",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["pass"], true);
    let samples = report["gamma_t_samples"].as_array().unwrap();
    assert_eq!(samples.len(), 15);
    for row in samples {
        let row = row.as_array().unwrap();
        let q = row[0].as_f64().unwrap();
        let value = row[2].as_f64().unwrap();
        assert!((value - (-q * q).exp()).abs() < 1e-9);
    }
}

#[test]
fn lift_reports_assumption_failures_as_check_failures() {
    let out = run(&[
        "lift",
        "--section",
        &data("gaussian_lift.json"),
        "--sigma",
        "0",
        "--grid",
        "-1:1:5,0.5:1.5:3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["pass"], false);
    assert!(report["assumptions"]
        .as_str()
        .unwrap()
        .starts_with("violated"));
}

#[test]
fn verify_momentum_sections_from_temp_files() {
    let dir = std::env::temp_dir().join("darboux-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let system = dir.join("pure_z.json");
    std::fs::write(&system, r#"{"n": 1, "H": "exp(z)"}"#).unwrap();
    let section = dir.join("zero_section.json");
    std::fs::write(&section, r#"{"n": 1, "domain": "QxR", "components": ["0"]}"#).unwrap();

    // the zero section solves the Hamiltonian equation for pure-z H
    let out = run(&[
        "verify",
        "--system",
        system.to_str().unwrap(),
        "--section",
        section.to_str().unwrap(),
        "--equation",
        "xh",
        "--grid",
        "-1:1:5,-1:1:5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["assumptions"], "satisfied");

    // but not the evolution equation (residual dH/dq = 0 holds too... use
    // a section that fails it: gamma = q against free H)
    let failing = dir.join("linear_section.json");
    std::fs::write(&failing, r#"{"n": 1, "domain": "QxR", "components": ["q1"]}"#).unwrap();
    let free = dir.join("free.json");
    std::fs::write(&free, r#"{"n": 1, "H": "p1^2/2"}"#).unwrap();
    let out = run(&[
        "verify",
        "--system",
        free.to_str().unwrap(),
        "--section",
        failing.to_str().unwrap(),
        "--equation",
        "ev",
        "--grid",
        "-1:1:5,-1:1:5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert!((report["max_residual"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn simulate_blowup_aborts_with_exit_one() {
    let dir = std::env::temp_dir().join("darboux-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let system = dir.join("escape.json");
    std::fs::write(&system, r#"{"n": 1, "H": "-z^2"}"#).unwrap();
    let out = run(&[
        "simulate",
        "--system",
        system.to_str().unwrap(),
        "--field",
        "hamiltonian",
        "--x0",
        "0,0,1",
        "--t-end",
        "2",
        "--dt",
        "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# aborted:")));
}

#[test]
fn usage_errors_exit_with_two() {
    // unknown subcommand
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    // malformed expression
    assert_eq!(
        run(&["bracket", "--f", "q1 +", "--g", "p1", "--at", "0,0,0"]).status.code(),
        Some(2)
    );
    // undeclared identifier
    assert_eq!(
        run(&["bracket", "--f", "nope", "--g", "p1", "--at", "0,0,0"]).status.code(),
        Some(2)
    );
    // even-length state
    assert_eq!(
        run(&["bracket", "--f", "q1", "--g", "p1", "--at", "0,0"]).status.code(),
        Some(2)
    );
    // missing section file
    assert_eq!(
        run(&[
            "verify",
            "--system",
            "linear-dissipation",
            "--section",
            "no-such-file.json",
            "--equation",
            "xh"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn closed_pipe_terminates_cleanly() {
    use std::io::Read;
    use std::process::Stdio;

    // the trajectory is ~500 KB, far beyond the pipe buffer, so the child
    // must hit a closed pipe once the reader hangs up
    let mut child = std::process::Command::new(env!("CARGO_BIN_EXE_darboux"))
        .args([
            "simulate",
            "--system",
            "linear-dissipation",
            "--field",
            "evolution",
            "--x0",
            "1,1,1",
            "--t-end",
            "10",
            "--dt",
            "1e-3",
        ])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdout = child.stdout.take().unwrap();
    let mut prefix = [0u8; 64];
    stdout.read_exact(&mut prefix).unwrap();
    drop(stdout); // hang up
    let status = child.wait().unwrap();
    assert_eq!(status.code(), Some(0), "expected a quiet exit on broken pipe");
    let mut stderr = String::new();
    child.stderr.take().unwrap().read_to_string(&mut stderr).unwrap();
    assert!(!stderr.contains("panicked"), "stderr: {stderr}");
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "--help"]).status.code(), Some(0));
}
