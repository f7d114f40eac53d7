use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wick-gibbs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn validation_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["g-convergence", "--m", "2", "--bogus", "1", "--seed", "1"],
        &["g-convergence", "--m", "2", "--n-list", "2,4"],
        &["gff-stats", "--N", "2", "--samples", "100", "--seed", "1", "--t", "3"],
        &["gibbs-sample", "--m", "0", "--N", "2", "--samples", "200", "--seed", "1"],
        &["g-convergence", "--m", "2", "--n-list", "2,x", "--seed", "1"],
        &["appendix-check", "--N", "2", "--samples", "100", "--seed", "3", "--format", "xml"],
        &["nonexistent-command"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    let o = run(&["g-convergence", "--m", "2", "--n-list", "2,4"]);
    assert!(stderr(&o).contains("--seed is mandatory"));
}

#[test]
fn resource_errors_exit_one() {
    let o = run(&["g-convergence", "--m", "6", "--n-list", "1000", "--samples", "10", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stderr(&o).contains("resource error"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["gibbs-sample", "--m", "2", "--N", "3", "--samples", "500", "--seed", "11", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["gibbs-sample", "--m", "2", "--N", "3", "--samples", "500", "--seed", "11", "--format", "json", "--threads", "1"]);
    assert_eq!(a.stdout, c.stdout);
    let d = run(&["gibbs-sample", "--m", "2", "--N", "3", "--samples", "500", "--seed", "12", "--format", "json"]);
    assert_ne!(a.stdout, d.stdout);
}

#[test]
fn appendix_check() {
    let o = run(&["appendix-check", "--N", "2", "--samples", "100", "--seed", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["N"], 2);
    assert_eq!(v["samples"], 100);
    assert!(v["max_relative_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["identities"].as_object().unwrap().len(), 7);
}

#[test]
fn g_convergence_csv() {
    let o = run(&["g-convergence", "--m", "2", "--n-list", "2,4,8", "--samples", "200", "--seed", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,M,exact_distance,mc_estimate,stderr");
    assert_eq!(lines.len(), 5);
    let row: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&row[..2], ["2", "4"]);
    let exact: f64 = row[2].parse().unwrap();
    assert!((exact - 4.248818554168746).abs() < 1e-10);
    assert!(lines[4].starts_with("# fitted_slope,"));
    let slope: f64 = lines[4].split(',').nth(1).unwrap().parse().unwrap();
    assert!(slope < 0.0);
}

#[test]
fn output_file_and_config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out.json");
    std::fs::write(
        &cfg,
        "# defaults\nN = 2\nsamples=100\nseed=3\n--format=json\n",
    )
    .unwrap();
    let o = run(&[
        "appendix-check",
        "--config",
        cfg.to_str().unwrap(),
        "--N",
        "1",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.starts_with(b"appendix-check:"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    // The flag wins over the file; the file supplies the rest.
    assert_eq!(v["N"], 1);
    assert_eq!(v["samples"], 100);

    std::fs::write(&cfg, "colour=blue\n").unwrap();
    let o = run(&["appendix-check", "--config", cfg.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&cfg, "no equals sign\n").unwrap();
    let o = run(&["appendix-check", "--config", cfg.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["appendix-check", "--config", "/nonexistent/file", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invariance_small_run() {
    let o = run(&[
        "invariance", "--m", "2", "--N", "2", "--t", "0.5", "--samples", "1000", "--permutations", "100",
        "--seed", "4", "--format", "json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["m"], 2);
    assert_eq!(v["n"], 1000);
    for obs in v["observables"].as_array().unwrap() {
        let p = obs["p_value"].as_f64().unwrap();
        assert!(p > 0.0 && p <= 1.0);
    }
    let o = run(&["invariance", "--m", "2", "--N", "2", "--samples", "999", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn evolve_csv_and_json() {
    let o = run(&["evolve", "--m", "2", "--N", "2", "--M", "4", "--t", "0.3", "--seed", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("t,mass_low,hamiltonian"));
    let o = run(&["evolve", "--m", "2", "--N", "2", "--M", "4", "--t", "0.3", "--seed", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["mass_drift"].as_f64().unwrap() < 1e-9);
    assert!(v["hamiltonian_drift"].as_f64().unwrap() < 1e-8);
}

#[test]
fn small_runs_of_every_subcommand() {
    let cases: &[&[&str]] = &[
        &["wick-identities", "--m", "3", "--samples", "200", "--seed", "1"],
        &["gff-stats", "--N", "3", "--samples", "500", "--seed", "1"],
        &["f-convergence", "--m", "2", "--n-list", "2,4", "--s", "-0.5", "--samples", "50", "--seed", "1"],
        &["gibbs-sample", "--m", "2", "--N", "2", "--samples", "500", "--beta", "0.5", "--seed", "1"],
        &["gibbs-sample", "--m", "2", "--N", "3", "--samples", "200", "--basis", "dirichlet", "--seed", "1", "--format", "json"],
        &["tail-curve", "--m", "2", "--N", "2", "--M", "4", "--samples", "200", "--seed", "1"],
        &["domain-covariance", "--n-list", "4,8", "--seed", "1"],
        &["g-convergence", "--m", "2", "--n-list", "2,4", "--samples", "50", "--basis", "dirichlet", "--seed", "1"],
    ];
    for args in cases {
        let o = run(args);
        assert!(o.status.success(), "{args:?}: {}", stderr(&o));
        assert!(!o.stdout.is_empty());
    }
    let o = run(&["gibbs-sample", "--m", "2", "--N", "3", "--samples", "200", "--basis", "dirichlet", "--seed", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["basis"], "dirichlet-square");
}

#[test]
fn help_lists_schemas() {
    let o = run(&["--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("Output schemas"));
    assert!(text.contains("appendix-check"));
}
