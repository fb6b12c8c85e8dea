//! End-to-end tests of the binary: known outputs, exit codes, determinism,
//! and the table cache.

use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_smoothdist"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn psi_examples() {
    let out = run(&["psi", "100", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "20\n");

    let out = run(&["psi", "10", "2", "--mod", "3"]);
    assert_eq!(stdout(&out), "4\n");

    let out = run(&["psi", "10", "2", "--mod", "4", "--res", "1"]);
    assert_eq!(stdout(&out), "1\n");
}

#[test]
fn usage_errors_exit_1() {
    let out = run(&["psi"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(1));

    // --res without --mod is a domain error
    let out = run(&["psi", "10", "2", "--res", "1"]);
    assert_eq!(out.status.code(), Some(1));

    // x below the solver's domain
    let out = run(&["alpha", "2", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn capacity_exit_2() {
    let out = run(&["psi", "200", "3", "--limit", "100"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_and_version_succeed() {
    assert!(run(&["--help"]).status.success());
    assert!(run(&["--version"]).status.success());
}

#[test]
fn alpha_outputs_residual_within_tol() {
    let out = run(&["alpha", "1000000", "100"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,residual"));
    let data = lines.next().unwrap();
    let mut parts = data.split(',');
    let alpha: f64 = parts.next().unwrap().parse().unwrap();
    let residual: f64 = parts.next().unwrap().parse().unwrap();
    assert!(alpha > 0.5 && alpha < 0.7);
    assert!(residual <= 1e-10);
}

#[test]
fn rho_u_max_one_is_all_ones() {
    let out = run(&["rho", "1", "--step", "0.25"]);
    assert!(out.status.success());
    for line in stdout(&out).lines().skip(1) {
        let rho = line.split(',').nth(1).unwrap();
        assert_eq!(rho, "1");
    }
}

#[test]
fn rho_value_and_step_halving() {
    let out = run(&["rho", "2", "--step", "0.001"]);
    let text = stdout(&out);
    let last = text.lines().last().unwrap();
    let rho: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((rho - (1.0 - 2f64.ln())).abs() < 1e-4);

    let finer = run(&["rho", "2", "--step", "0.0005"]);
    let last = stdout(&finer).lines().last().unwrap().to_string();
    let rho_fine: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!(
        (rho - rho_fine).abs() < 1e-5,
        "halving barely moves the value"
    );
}

#[test]
fn charsum_mod_4() {
    let out = run(&["charsum", "20", "3", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,conductor,order,parity,primitive,re,im,abs");
    assert_eq!(lines.len(), 3);
    // principal: coprime count 3; nonprincipal: 1 - 1 + 1 = 1
    let principal: f64 = lines[1].split(',').nth(5).unwrap().parse().unwrap();
    assert!((principal - 3.0).abs() < 1e-9);
    let odd: f64 = lines[2].split(',').nth(5).unwrap().parse().unwrap();
    assert!((odd - 1.0).abs() < 1e-9);
}

#[test]
fn large_sieve_zero_trials_vacuous_pass() {
    let out = run(&[
        "large-sieve",
        "--trials",
        "0",
        "--qmax",
        "5",
        "--nmax",
        "10",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "pass n/a\n");
}

#[test]
fn large_sieve_small_run_is_deterministic() {
    let args = [
        "large-sieve",
        "--trials",
        "20",
        "--qmax",
        "10",
        "--nmax",
        "200",
        "--seed",
        "7",
    ];
    let a = run(&args);
    assert!(a.status.success());
    assert!(stdout(&a).starts_with("pass "));
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    // different seed still passes but may change the ratio
    let c = run(&[
        "large-sieve",
        "--trials",
        "20",
        "--qmax",
        "10",
        "--nmax",
        "200",
        "--seed",
        "8",
    ]);
    assert!(c.status.success());
}

#[test]
fn bv_experiment_csv_and_json_deterministic() {
    let args = [
        "bv", "--x-grid", "2000", "--y-grid", "10,30", "--q-grid", "8", "--format", "csv",
    ];
    let out = run(&args);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.starts_with("x,y,u,Q,psi,alpha,bv_lhs,bv_char_form,rhs_c,ratio\n"));
    assert_eq!(text.lines().count(), 3);

    let jargs = [
        "bdh", "--x-grid", "2000", "--y-grid", "10", "--q-grid", "8", "--format", "json", "--seed",
        "3",
    ];
    let a = run(&jargs);
    assert!(a.status.success());
    let b = run(&jargs);
    assert_eq!(a.stdout, b.stdout, "json reruns must be byte-identical");
    assert!(stdout(&a).contains("\"kind\": \"bdh\""));
    assert!(stdout(&a).contains("\"fitted_c\""));
}

#[test]
fn experiment_config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.conf");
    std::fs::write(
        &cfg,
        "x_grid = 1000\ny_grid = 10\nq_grid = 6\nformat = csv\n",
    )
    .unwrap();
    let out_path = dir.path().join("report.csv");
    let out = run(&[
        "bv",
        "--config",
        cfg.to_str().unwrap(),
        "--y-grid",
        "30",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty(), "data went to the file");
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.contains(",30,"), "flag overrode the config y grid");
    // bad config key is a usage error
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let out = run(&["bv", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn split_check_passes() {
    let out = run(&["split-check", "20000", "30"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "threshold,smooth_in_range,splits,partition_ok,bijective"
    );
    for line in &lines[1..] {
        assert!(line.ends_with("true,true"), "line: {line}");
    }
}

#[test]
fn perron_check_within_budget() {
    let out = run(&[
        "perron-check",
        "--x",
        "2000",
        "--y",
        "20",
        "--moduli",
        "3,4",
        "--heights",
        "64,256",
        "--nodes",
        "8192",
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    for line in text.lines().skip(1) {
        assert!(line.ends_with(",true"), "row out of budget: {line}");
    }
}

#[test]
fn table_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("table.smft");
    let a = run(&["psi", "5000", "7", "--table-cache", cache.to_str().unwrap()]);
    assert!(a.status.success());
    assert!(cache.exists());
    let b = run(&["psi", "5000", "7", "--table-cache", cache.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
}
