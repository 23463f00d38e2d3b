//! End-to-end tests of the command-line interface: exit codes, emitted
//! files, bit-stable CSV output, and the validation error contract.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracrd"))
}

fn write(path: &Path, contents: &str) {
    std::fs::write(path, contents).unwrap();
}

fn regime1_config(dt: f64, t_end: f64, stride: usize) -> String {
    format!(
        r#"{{
  "domain": {{"length": 1.0, "n_modes": 32, "boundary": "neumann"}},
  "kinetics": {{"alpha1": 1, "alpha2": 2, "beta1": 3, "beta2": 1, "k_f": 1, "k_b": 1}},
  "diffusion": {{"d_u": 0.1, "d_v": 0.1, "sigma1": 0.4, "sigma2": 0.8, "rho": 0.7}},
  "initial_u": {{"profile": "bump", "center": 0.5, "width": 1.0, "height": 1.0}},
  "initial_v": {{"profile": "bump", "center": 0.5, "width": 1.0, "height": 1.0}},
  "solver": {{"scheme": "l1_imex", "dt": {dt}, "t_end": {t_end}, "snapshot_stride": {stride}}}
}}"#
    )
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn simulate_regime_one_exits_zero_with_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    write(&cfg, &regime1_config(0.015625, 0.25, 0));
    let out_dir = dir.path().join("out");
    let out = bin()
        .args([
            "simulate",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = stdout_of(&out);
    assert!(stdout.contains("regime: I"), "stdout: {stdout}");
    assert!(stdout.contains("termination: completed"));

    let csv = std::fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,linf_u,linf_v,l2_u,l2_v,mass_u,mass_v,lyapunov"
    );
    // header + one row per step + initial row
    assert_eq!(csv.lines().count(), 1 + 16 + 1);
    // regime I: lyapunov column populated
    let first_row = csv.lines().nth(1).unwrap();
    assert!(
        !first_row.ends_with(','),
        "lyapunov column empty: {first_row}"
    );
    // LF endings only
    assert!(!csv.contains('\r'));
}

#[test]
fn invalid_kinetics_exits_one_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    write(
        &cfg,
        &regime1_config(0.1, 0.5, 0).replace(r#""alpha1": 1"#, r#""alpha1": -1"#),
    );
    let out = bin()
        .args([
            "simulate",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().join("o").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("kinetics.alpha1"), "stderr: {stderr}");
    assert!(!stderr.contains("panicked"), "stack dump leaked: {stderr}");
}

#[test]
fn growth_only_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("blowup.json");
    write(
        &cfg,
        r#"{
  "domain": {"length": 1.0, "n_modes": 16, "boundary": "neumann"},
  "kinetics": {"alpha1": 2, "alpha2": 3, "beta1": 2, "beta2": 3, "k_f": 5, "k_b": 1e-9},
  "diffusion": {"d_u": 0.01, "d_v": 0.01, "sigma1": 0.5, "sigma2": 0.5, "rho": 0.5},
  "initial_u": {"profile": "constant", "c": 5.0},
  "initial_v": {"profile": "constant", "c": 5.0},
  "solver": {"scheme": "l1_imex", "dt": 0.05, "t_end": 50.0}
}"#,
    );
    let out = bin()
        .args([
            "simulate",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().join("o").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stdout: {}", stdout_of(&out));
    assert!(stdout_of(&out).contains("blowup_detected"));
}

#[test]
fn csv_bit_stable_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    write(&cfg, &regime1_config(0.015625, 0.25, 0));
    let read = |tag: &str| -> Vec<u8> {
        let out_dir = dir.path().join(tag);
        let st = bin()
            .args([
                "simulate",
                cfg.to_str().unwrap(),
                "--out",
                out_dir.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(st.success());
        std::fs::read(out_dir.join("diagnostics.csv")).unwrap()
    };
    assert_eq!(read("a"), read("b"));
}

#[test]
fn emitted_files_listed_exactly_once() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    write(&cfg, &regime1_config(0.015625, 0.25, 8));
    let out_dir = dir.path().join("out");
    let out = bin()
        .args([
            "simulate",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--plot",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = stdout_of(&out);
    let wrote: Vec<&str> = stdout.lines().filter(|l| l.starts_with("wrote ")).collect();
    // diagnostics + 3 snapshots (steps 0, 8, 16) + svg
    assert_eq!(wrote.len(), 5, "stdout: {stdout}");
    let mut unique = wrote.clone();
    unique.sort();
    unique.dedup();
    assert_eq!(unique.len(), wrote.len(), "duplicate listing");
    for line in wrote {
        let path = line.trim_start_matches("wrote ");
        assert!(Path::new(path).exists(), "listed file missing: {path}");
    }
}

#[test]
fn verify_suite_passes_and_self_test_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("verify.json");
    write(
        &cfg,
        r#"{"seed": 42, "max_principle_runs": 2, "sv_fields": 12, "pointwise_samples": 2000, "convexity_paths": 3}"#,
    );
    let out_dir = dir.path().join("out");
    let out = bin()
        .args([
            "verify",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout_of(&out));
    assert!(stdout_of(&out).contains("[PASS]"));
    assert!(out_dir.join("verification_report.json").exists());

    let cfg2 = dir.path().join("selftest.json");
    write(
        &cfg2,
        r#"{"seed": 42, "max_principle_runs": 2, "sv_fields": 12, "pointwise_samples": 2000, "convexity_paths": 3, "self_test": true}"#,
    );
    let out = bin()
        .args([
            "verify",
            cfg2.to_str().unwrap(),
            "--out",
            dir.path().join("o2").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_of(&out).contains("[FAIL]"));
}

#[test]
fn sweep_single_point_matches_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let sim_cfg = dir.path().join("run.json");
    write(&sim_cfg, &regime1_config(0.015625, 0.25, 0));
    let sim_out = dir.path().join("sim");
    assert!(bin()
        .args([
            "simulate",
            sim_cfg.to_str().unwrap(),
            "--out",
            sim_out.to_str().unwrap()
        ])
        .status()
        .unwrap()
        .success());

    let sweep_cfg = dir.path().join("sweep.json");
    write(
        &sweep_cfg,
        &format!(
            r#"{{"base": {}, "grid": {{"diffusion.rho": [0.7]}}}}"#,
            regime1_config(0.015625, 0.25, 0)
        ),
    );
    let sweep_out = dir.path().join("sweep");
    let out = bin()
        .args([
            "sweep",
            sweep_cfg.to_str().unwrap(),
            "--out",
            sweep_out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    let a = std::fs::read(sim_out.join("diagnostics.csv")).unwrap();
    let b = std::fs::read(sweep_out.join("run_0000/diagnostics.csv")).unwrap();
    assert_eq!(a, b, "single-point sweep must reproduce cmd_simulate");
}

#[test]
fn sweep_two_by_two_grid_yields_four_rows() {
    let dir = tempfile::tempdir().unwrap();
    let sweep_cfg = dir.path().join("sweep.json");
    write(
        &sweep_cfg,
        &format!(
            r#"{{"base": {}, "grid": {{"diffusion.rho": [0.5, 0.7], "kinetics.k_f": [1.0, 2.0]}}}}"#,
            regime1_config(0.03125, 0.125, 0)
        ),
    );
    let sweep_out = dir.path().join("out");
    let out = bin()
        .args([
            "sweep",
            sweep_cfg.to_str().unwrap(),
            "--out",
            sweep_out.to_str().unwrap(),
            "--workers",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let summary = std::fs::read_to_string(sweep_out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5); // header + 4 runs
    assert!(summary
        .lines()
        .next()
        .unwrap()
        .starts_with("run,diffusion.rho,kinetics.k_f,"));
    // the k_f = k_b = 1 slice classifies as regime I with positive margins
    for line in summary.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols[3] == "I" {
            let margin_u: f64 = cols[7].parse().unwrap();
            let margin_v: f64 = cols[8].parse().unwrap();
            assert!(margin_u > 0.0 && margin_v > 0.0, "{line}");
        }
    }
}

#[test]
fn converge_reports_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("conv.json");
    write(
        &cfg,
        r#"{"length": 3.141592653589793, "n_modes": 8, "mode_k": 1, "d": 1.0, "sigma": 0.5,
            "rho": 0.5, "scheme": "l1_imex", "dt_start": 0.05, "levels": 4, "t_end": 1.0}"#,
    );
    let out_dir = dir.path().join("out");
    let out = bin()
        .args([
            "converge",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("observed order"));
    assert!(out_dir.join("convergence.csv").exists());
}

#[test]
fn unreadable_config_is_a_clean_error() {
    let out = bin()
        .args(["simulate", "/nonexistent/nope.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("error"));
    assert!(!stderr.contains("panicked"));
}

#[test]
fn log_level_controls_verbosity_but_not_contract_lines() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    write(&cfg, &regime1_config(0.03125, 0.125, 0));

    let run = |level: &str, tag: &str| -> String {
        let out = bin()
            .env("FRACRD_LOG", level)
            .args([
                "simulate",
                cfg.to_str().unwrap(),
                "--out",
                dir.path().join(tag).to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        stdout_of(&out)
    };

    let debug = run("debug", "d");
    assert!(debug.contains("debug: running"), "debug output: {debug}");
    let error_only = run("error", "e");
    assert!(!error_only.contains("debug:"));
    // contract lines survive every level
    for s in [&debug, &error_only] {
        assert!(s.contains("regime: I"));
        assert!(s.contains("termination: completed"));
        assert!(s.contains("wrote "));
    }
}

#[test]
fn seed_flag_overrides_random_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let config = regime1_config(0.03125, 0.125, 0).replace(
        r#""initial_u": {"profile": "bump", "center": 0.5, "width": 1.0, "height": 1.0}"#,
        r#""initial_u": {"profile": "random", "seed": 1, "lambda": 1.0}"#,
    );
    write(&cfg, &config);
    let read = |tag: &str, seed: Option<&str>| -> Vec<u8> {
        let out_dir = dir.path().join(tag);
        let mut args = vec![
            "simulate".to_string(),
            cfg.to_str().unwrap().to_string(),
            "--out".into(),
            out_dir.to_str().unwrap().to_string(),
        ];
        if let Some(s) = seed {
            args.push("--seed".into());
            args.push(s.into());
        }
        assert!(bin().args(&args).status().unwrap().success());
        std::fs::read(out_dir.join("diagnostics.csv")).unwrap()
    };
    let base = read("a", None);
    let same = read("b", None);
    let other = read("c", Some("99"));
    assert_eq!(base, same, "same config+seed must be byte-identical");
    assert_ne!(base, other, "--seed must change the random profile");
}
