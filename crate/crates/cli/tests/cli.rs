use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kwise-entropy"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn construct(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(format!("{name}.txt"));
    let mut all = vec!["construct", name];
    all.extend_from_slice(args);
    all.extend_from_slice(&["-o", path.to_str().unwrap()]);
    let o = run(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn construct_examples() {
    let o = run(&["construct", "hamming", "--m", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("n=7\n"));
    assert_eq!(text.lines().count(), 17);

    let text = stdout(&run(&["construct", "uniform", "--n", "4"]));
    assert_eq!(text.lines().filter(|l| l.ends_with(" 0.0625")).count(), 16);

    assert_eq!(
        stdout(&run(&["construct", "point", "--n", "5"])),
        "n=5\n00000 1\n"
    );
}

#[test]
fn construct_from_matrix() {
    let dir = TempDir::new().unwrap();
    let m = dir.path().join("m.txt");
    std::fs::write(&m, "2 4\n1100\n0011\n").unwrap();
    let o = run(&["construct", "from-matrix", "--input", m.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "n=4\n0000 0.25\n0011 0.25\n1100 0.25\n1111 0.25\n"
    );
}

#[test]
fn construct_usage_errors() {
    assert_eq!(run(&["construct", "hamming"]).status.code(), Some(2));
    assert_eq!(
        run(&["construct", "bch", "--m", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["construct", "hamming", "--m", "9"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn analyze_hamming_and_uniform() {
    let dir = TempDir::new().unwrap();
    let h7 = construct(dir.path(), "hamming", &["--m", "3"]);
    let o = run(&["analyze", h7.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    for want in [
        "independence_order         = 3",
        "shannon                    = 4",
        "bound_thm_half             = 4",
        "slack_thm_half             = 0",
        "marginal_order             = 3",
    ] {
        assert!(text.contains(want), "missing {want:?} in\n{text}");
    }

    let u8 = construct(dir.path(), "uniform", &["--n", "8"]);
    let o = run(&["analyze", u8.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["order"], 8);
    assert_eq!(v["shannon"], 8.0);
}

#[test]
fn analyze_rejects_bad_files() {
    let dir = TempDir::new().unwrap();
    let short = dir.path().join("short.txt");
    std::fs::write(&short, "n=2\n00 0.5\n11 0.4\n").unwrap();
    let o = run(&["analyze", short.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0.9"));

    let garbled = dir.path().join("garbled.txt");
    std::fs::write(&garbled, "n=2\n00 0.5\n1x 0.5\n").unwrap();
    let o = run(&["analyze", garbled.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    assert_eq!(
        run(&["analyze", "/nonexistent/x.txt"]).status.code(),
        Some(2)
    );
}

#[test]
fn chain_examples() {
    let dir = TempDir::new().unwrap();
    let h7 = construct(dir.path(), "hamming", &["--m", "3"]);
    let o = run(&["chain", h7.to_str().unwrap(), "--theorem", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("result: PASS\n"));

    let h15 = construct(dir.path(), "hamming", &["--m", "4"]);
    let o = run(&[
        "chain",
        h15.to_str().unwrap(),
        "--k",
        "4",
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    let rows = stdout(&o);
    assert!(rows.starts_with("n,k,r,label,lhs,relation,rhs,slack,asserted,pass\n"));

    let p = construct(dir.path(), "point", &["--n", "6"]);
    let o = run(&["chain", p.to_str().unwrap(), "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("level 1") && err.contains("1.000e0"), "{err}");
}

#[test]
fn chain_usage_errors() {
    let dir = TempDir::new().unwrap();
    let h7 = construct(dir.path(), "hamming", &["--m", "3"]);
    let h7 = h7.to_str().unwrap();
    assert_eq!(run(&["chain", h7]).status.code(), Some(2));
    assert_eq!(run(&["chain", h7, "--theorem", "1"]).status.code(), Some(2));
    assert_eq!(run(&["chain", h7, "--k", "9"]).status.code(), Some(2));
    assert_eq!(
        run(&["chain", h7, "--k", "2", "--theorem", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sweep_spectra_monotone() {
    let o = run(&[
        "sweep", "spectra", "--n", "20", "--r", "1..19", "--format", "csv",
    ]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 19);
    let lambdas: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(lambdas.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(rows[18][3].parse::<f64>().unwrap(), 2.0 * 19f64.sqrt());
}

#[test]
fn sweep_bounds_examples() {
    let o = run(&[
        "sweep", "bounds", "--n", "16", "--k", "1..8", "--format", "csv",
    ]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 8);
    let main: Vec<f64> = rows.iter().filter_map(|r| r[5].parse().ok()).collect();
    assert!(main.len() >= 6);
    assert!(main.windows(2).all(|w| w[1] >= w[0]), "{main:?}");

    let o = run(&["sweep", "bounds", "--n", "7", "--k", "4", "--format", "csv"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][6], "4");
}

#[test]
fn sweep_empty_range() {
    assert_eq!(
        run(&["sweep", "bounds", "--n", "7", "--k", "5..3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["sweep", "spectra", "--n", "3", "--r", "5..6"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn solver_selection() {
    let power = run(&["spectra", "--n", "10", "--r", "3", "--format", "json"]);
    let bisect = run(&[
        "spectra",
        "--n",
        "10",
        "--r",
        "3",
        "--format",
        "json",
        "--solver",
        "bisection",
    ]);
    let dense = run(&[
        "spectra", "--n", "10", "--r", "3", "--format", "json", "--solver", "dense",
    ]);
    let lambda = |o: &Output| {
        serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()["lambda"]
            .as_f64()
            .unwrap()
    };
    assert!((lambda(&power) - lambda(&bisect)).abs() < 1e-9);
    assert!((lambda(&power) - lambda(&dense)).abs() < 1e-9);
    let o = run(&["spectra", "--n", "10", "--r", "3", "--solver", "lanczos"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("power, bisection, dense"));
}

#[test]
fn outputs_are_deterministic() {
    let args = [
        "sweep", "bounds", "--n", "8..12", "--k", "1..6", "--format", "csv",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["sweep", "spectra", "--n", "12..16", "--r", "0..6"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn dimension_cap_env() {
    let dir = TempDir::new().unwrap();
    let u6 = construct(dir.path(), "uniform", &["--n", "6"]);
    let analyze = |cap: &str| {
        bin()
            .args(["analyze", u6.to_str().unwrap()])
            .env("KWISE_MAX_DIM", cap)
            .output()
            .unwrap()
    };
    let o = analyze("5");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n=6"));
    assert!(analyze("6").status.success());
}
