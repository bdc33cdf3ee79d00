use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use fractel::spectral::solve_with;
use fractel_cli::config::ProblemConfig;
use fractel_cli::output::{trajectory, NormsReport};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fractel"))
}

fn example() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/critical_mode.json")
}

fn solve(config: &Path, out: &Path) -> std::process::Output {
    bin()
        .args(["solve", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

#[test]
fn example_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = solve(&example(), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let cfg = ProblemConfig::load(&example()).unwrap();
    let problem = cfg.problem().unwrap();
    let field = solve_with(&problem, &cfg.solver.options()).unwrap();
    let tr = trajectory(&problem, &field, &cfg.times()).unwrap();

    let csv = fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 1 + 2 * problem.modes() + 3);
    for (i, line) in lines.enumerate() {
        let row: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(row[0], tr.t[i]);
        for (k, c) in tr.u[i].iter().enumerate() {
            assert_eq!(row[1 + 2 * k], c.re);
            assert_eq!(row[2 + 2 * k], c.im);
        }
        let n = &tr.norms[i];
        assert_eq!(&row[row.len() - 3..], &[n.u, n.au, n.du]);
    }

    let norms: NormsReport = serde_json::from_str(&fs::read_to_string(dir.path().join("norms.json")).unwrap()).unwrap();
    assert_eq!(norms.samples, tr.norms);
    assert_eq!(norms.critical_modes, vec![1]);

    let field_csv = fs::read_to_string(dir.path().join("field.csv")).unwrap();
    assert!(field_csv.starts_with("x,t,u\n"));
    assert_eq!(field_csv.lines().count(), 1 + 65 * tr.t.len());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(solve(&example(), a.path()).status.success());
    let out = bin()
        .env("FRACTEL_THREADS", "1")
        .args(["solve", "--config"])
        .arg(example())
        .arg("--out")
        .arg(b.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    for name in ["solution.csv", "norms.json", "field.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn zero_data_gives_zero_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zero.json");
    fs::write(
        &cfg,
        r#"{"schema_version":1,"rho":0.7,"alpha":0.5,"T":2,
            "operator":{"kind":"diagonal_explicit","eigenvalues":[1,4,9]},
            "phi0":"zero","phi1":"zero","outputs":["solution"]}"#,
    )
    .unwrap();
    assert!(solve(&cfg, dir.path()).status.success());
    let csv = fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    for line in csv.lines().skip(1) {
        assert!(line.split(',').skip(1).all(|v| v.parse::<f64>().unwrap() == 0.0), "{line}");
    }
    assert!(!dir.path().join("field.csv").exists());
}

#[test]
fn invalid_rho_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(example()).unwrap().replace("\"rho\": 0.5", "\"rho\": 1.5");
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, text).unwrap();
    let out = solve(&cfg, &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rho"));
}

#[test]
fn unknown_field_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(example()).unwrap().replacen('{', "{\"colour\": 1,", 1);
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, text).unwrap();
    assert_eq!(solve(&cfg, dir.path()).status.code(), Some(2));
}

fn ml(args: &[&str]) -> (Option<i32>, String) {
    let out = bin().arg("ml").args(args).output().unwrap();
    (out.status.code(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn ml_calculator() {
    assert_eq!(ml(&["1", "1", "1", "0", "1e-12"]), (Some(0), "2.718281828459045 series\n".into()));

    let (code, s) = ml(&["2", "1", "-2.4674011002723395", "0", "1e-12"]);
    assert_eq!(code, Some(0));
    assert!(s.split(' ').next().unwrap().parse::<f64>().unwrap().abs() < 1e-12);

    // 50-digit direct summation
    let (code, s) = ml(&["0.5", "0.5", "-5", "0", "1e-10"]);
    assert_eq!(code, Some(0));
    let v: f64 = s.split(' ').next().unwrap().parse().unwrap();
    assert!((v - 0.010666394882413155).abs() < 1e-10);

    let (_, s) = ml(&["0.5", "1", "-1", "2", "1e-12"]);
    assert_eq!(s.split_whitespace().count(), 3);

    assert_eq!(ml(&["0", "1", "1", "0", "1e-12"]).0, Some(2));
    assert_eq!(ml(&["0.5", "1", "1", "0", "-1"]).0, Some(2));
    assert_eq!(ml(&["0.5", "1", "x", "0", "1e-12"]).0, Some(2));
}

fn verify(config: &Path, report: &Path, extra: &[&str]) -> std::process::Output {
    bin()
        .arg("verify")
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(report)
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn verify_subset_passes_and_fault_injection_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.json");
    fs::write(&cfg, r#"{"only":["ml_identities","ml_asymptotic_tail"]}"#).unwrap();

    let report = dir.path().join("report.jsonl");
    let out = verify(&cfg, &report, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let lines: Vec<serde_json::Value> = fs::read_to_string(&report)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|v| v["status"] == "pass"));

    let out = verify(&cfg, &report, &["--fault-inject"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(fs::read_to_string(&report).unwrap().contains("\"fail\""));
}

#[test]
fn verify_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.json");
    fs::write(&cfg, r#"{"only":["no_such_check"]}"#).unwrap();
    assert_eq!(verify(&cfg, &dir.path().join("r.jsonl"), &[]).status.code(), Some(2));
}
