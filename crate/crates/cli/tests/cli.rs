use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riemann-accel")).args(args).output().expect("binary runs")
}

fn bin_ok(args: &[&str]) -> Output {
    let out = bin(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn data_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).map(String::from).collect()
}

#[test]
fn fig1_csv_schema_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    bin_ok(&["fig1", "--out", a.to_str().unwrap()]);
    bin_ok(&["fig1", "--sequential", "--out", b.to_str().unwrap()]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let text = fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("# R = 5.0000000000000000e-1\n"));
    assert!(!text.contains('\r'));
    let lines = data_lines(&a);
    assert_eq!(lines[0], "k,t,method,gap,bound");
    assert_eq!(lines.len(), 1 + 3 * 1001);
    // k = 0: gap = f(x0) = R²/2, no bound.
    assert_eq!(lines[1], "0,0.0000000000000000e0,sirnag_opt1,1.2500000000000000e-1,");
    // t = 1: bound = 2 coth(1) R².
    let row = lines.iter().find(|l| l.starts_with("10,")).unwrap();
    let bound: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!((bound - 2.0 / 1f64.tanh() * 0.25).abs() < 1e-12);

    let c = dir.path().join("c.csv");
    bin_ok(&["fig1", "--seed", "8", "--out", c.to_str().unwrap()]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn fig2_matrix_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fig2.toml");
    fs::write(&cfg, "seed = 3\n[fig2]\nm = 40\ncond = 100.0\nsteps = 50\nsave_matrix = \"q.txt\"\n").unwrap();
    let first = dir.path().join("first.csv");
    bin_ok(&["fig2", "--config", cfg.to_str().unwrap(), "--out", first.to_str().unwrap()]);
    let q = dir.path().join("q.txt");
    let qtext = fs::read_to_string(&q).unwrap();
    let mut lines = qtext.lines();
    assert_eq!(lines.next(), Some("40"));
    assert!(lines.clone().all(|l| l.split(' ').count() == 40));
    assert_eq!(lines.count(), 40);

    let second = dir.path().join("second.csv");
    bin_ok(&["fig2", "--config", cfg.to_str().unwrap(), "--matrix", q.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    let (a, b) = (data_lines(&first), data_lines(&second));
    assert_eq!(a[0], "k,method,gap");
    assert_eq!(a.len(), 1 + 2 * 51);
    assert_eq!(b.len(), a.len());
    let lambda = |p: &Path| -> f64 {
        let t = fs::read_to_string(p).unwrap();
        let l = t.lines().find(|l| l.starts_with("# lambda_max = ")).unwrap();
        l["# lambda_max = ".len()..].parse().unwrap()
    };
    assert!((lambda(&first) - lambda(&second)).abs() < 1e-9 * lambda(&first));
    // The top of the spectrum is clustered, so the recomputed leading
    // eigenvector (and hence x0) may differ; runs on the loaded file are
    // still reproducible.
    let third = dir.path().join("third.csv");
    bin_ok(&["fig2", "--config", cfg.to_str().unwrap(), "--matrix", q.to_str().unwrap(), "--out", third.to_str().unwrap()]);
    assert_eq!(fs::read(&second).unwrap(), fs::read(&third).unwrap());
}

#[test]
fn fig2_rejects_oversized_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("big.toml");
    fs::write(&cfg, "[fig2]\nm = 20001\n").unwrap();
    assert_eq!(bin(&["fig2", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn fig3_has_peak_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fig3.toml");
    fs::write(&cfg, "[fig3]\nh_ref = 1e-3\nhorizon = 2.0\nhs = [0.2, 0.1]\n").unwrap();
    let out = dir.path().join("f3.csv");
    bin_ok(&["fig3", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let lines = data_lines(&out);
    assert_eq!(lines[0], "h,k,t,error");
    let peaks: Vec<&String> = lines.iter().filter(|l| l.contains(",peak,")).collect();
    assert_eq!(peaks.len(), 2);
    assert!(lines[1].ends_with(",0.0000000000000000e0"));
}

#[test]
fn check_reduction_passes() {
    let out = bin_ok(&["check", "reduction"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("check: option2_equals_nesterov | pass"));
    assert!(text.contains("status: pass"));
}

#[test]
fn check_shadowing_states_failed_precondition() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("shadow.txt");
    bin_ok(&["check", "shadowing", "--out", out.to_str().unwrap()]);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("precondition_holds: false"));
    let defects = data_lines(&dir.path().join("shadow.defects.csv"));
    assert_eq!(defects[0], "h,max_defect,fitted_c");
    assert_eq!(defects.len(), 5);
}

#[test]
fn run_writes_a_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "[run]\nmanifold = \"euclidean\"\nobjective = \"quadratic\"\ndim = 3\nregime = \"sc\"\nmu = 1.0\nh = 0.1\nsteps = 20\noption = \"II\"\n",
    )
    .unwrap();
    let out = dir.path().join("traj.csv");
    bin_ok(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("# method = sirnag_opt2"));
    let lines = data_lines(&out);
    assert_eq!(lines[0], "k,t,value,gap,grad_norm,dist_to_min,energy,bound,outside_domain");
    assert_eq!(lines.len(), 22);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[fig1]\nh = -0.1\n").unwrap();
    assert_eq!(bin(&["fig1", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&bad, "unknown_key = 1\n").unwrap();
    assert_eq!(bin(&["fig1", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(bin(&["check", "nonsense"]).status.code(), Some(2));
    assert_eq!(bin(&["fig9"]).status.code(), Some(2));
    assert_eq!(bin(&["fig1", "--config", "/nonexistent/x.toml"]).status.code(), Some(2));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "seed = 1\nout = \"from_file.csv\"\n[fig1]\nsteps = 5\n").unwrap();
    let flag_out = dir.path().join("flag.csv");
    bin_ok(&["fig1", "--config", cfg.to_str().unwrap(), "--seed", "9", "--out", flag_out.to_str().unwrap()]);
    assert!(!dir.path().join("from_file.csv").exists());
    let text = fs::read_to_string(&flag_out).unwrap();
    assert!(text.contains("# seed = 9"));
    assert_eq!(data_lines(&flag_out).len(), 1 + 3 * 6);
}
