use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_dirac-pollution");

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(cwd).env_remove("DIRAC_POLLUTION_OUTPUT_DIR").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn spectrum_kinetic_balance_zinc() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    let first: f64 = text.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((first - 0.97573).abs() < 1e-5, "{first}");
}

#[test]
fn free_upper_lower_gap_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum", "--set", "basis.scheme=upper-lower", "--set", "potential.type=zero"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "gap_eigenvalue,oracle_distance");
}

#[test]
fn invalid_scheme_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum", "--set", "basis.scheme=nonsense"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("basis.scheme"));
    let o = run(&["sweep", "--set", "sweep.parameter=theta"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sweep.parameter"));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum", "--config", "absent.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fig2_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["reproduce", "fig2", "--out", "f2.csv"], dir.path());
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("f2.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 61);
    let header: Vec<&str> = lines[0].split(',').collect();
    assert_eq!(header[0], "theta");
    let nt = header.iter().filter(|h| h.starts_with("traj_")).count();
    assert_eq!(header.iter().filter(|h| h.starts_with("spurious_")).count(), nt);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 1 + 2 * nt));
    assert!(lines[1].starts_with("0.05,"));
    assert!(lines[60].starts_with("1.52,"));
}

#[test]
fn ground_prints_three_target_lines() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["reproduce", "ground"], dir.path());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    for (line, target) in lines.iter().zip(["0.975729", "0.975739", "0.996578"]) {
        assert!(line.contains(target), "{line}");
    }
    let all_pass = lines.iter().all(|l| l.ends_with("PASS"));
    assert_eq!(o.status.code(), Some(if all_pass { 0 } else { 3 }));
}

#[test]
fn written_config_reproduces_bit_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--set", "basis.scheme=atomic-balance",
        "--set", "trap.kind=contracted",
        "--set", "sweep.parameter=delta",
        "--set", "sweep.from=5000",
        "--set", "sweep.to=20000",
        "--set", "sweep.steps=7",
    ];
    let mut first = vec!["sweep", "--set", "output.path=a.csv"];
    first.extend(args);
    assert!(run(&first, dir.path()).status.success());

    let mut dump = vec!["print-config", "--set", "output.path=b.csv"];
    dump.extend(args);
    let cfg = stdout(&run(&dump, dir.path()));
    std::fs::write(dir.path().join("run.cfg"), cfg).unwrap();
    assert!(run(&["sweep", "--config", "run.cfg"], dir.path()).status.success());

    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 8);
}

#[test]
fn output_dir_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    let o = Command::new(BIN)
        .args(["reproduce", "fig5"])
        .current_dir(dir.path())
        .env("DIRAC_POLLUTION_OUTPUT_DIR", out.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(out.path().join("fig5.csv").exists());
    assert!(!dir.path().join("fig5.csv").exists());
}

#[test]
fn check_intervals_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "check-intervals",
            "--set", "basis.scheme=upper-lower",
            "--set", "potential.type=gaussian-well",
            "--set", "trap.kind=concentrated",
            "--set", "trap.r0=0.7147",
            "--set", "trap.width_exponent=12.2",
            "--set", "classify.oracle_tol=1e-6",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["scheme"], "upper-lower");
    assert!(v["violations"].as_array().unwrap().is_empty());
}
