use std::path::Path;
use std::process::{Command, Output};

use qaud_experiments::table::parse_rendered;

const BIN: &str = env!("CARGO_BIN_EXE_qaud");

fn qaud(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn quick(cmd: &str, extra: &[&str], out: &Path) -> String {
    let mut args = vec![
        cmd,
        "--seed",
        "7",
        "--k",
        "32",
        "--n-trials",
        "20",
        "--gap-samples",
        "10",
        "--grid-points",
        "11",
        "--output",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = qaud(&args);
    assert!(o.status.success(), "{cmd} failed: {}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

fn body(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<String> {
    let idx = rows[0].iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
    rows[1..].iter().map(|r| r[idx].clone()).collect()
}

fn floats(v: &[String]) -> Vec<f64> {
    v.iter().map(|s| qaud::annealer::io::parse_f64(s, 0).unwrap()).collect()
}

#[test]
fn aer_vs_k_is_byte_identical_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let a = quick("aer-vs-k", &["--k-sweep", "1,10,100"], &dir.path().join("a.csv"));
    let b = quick("aer-vs-k", &["--k-sweep", "1,10,100", "--sequential"], &dir.path().join("b.csv"));
    assert_eq!(body(&a), body(&b));
    assert!(a.starts_with("# tool=qaud-experiments"));
    let (notes, rows) = parse_rendered(&a);
    assert!(notes.contains(&("kind".into(), "aer_vs_k".into())));
    assert_eq!(rows[0], ["scheme", "k", "aer_mean", "ci_halfwidth", "n_trials"]);
    assert_eq!(rows.len(), 1 + 2 * 3);
}

#[test]
fn mean_gap_covers_the_grid_and_caches() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let text = quick("mean-gap", &["--cache-dir", cache.to_str().unwrap()], &dir.path().join("g.csv"));
    let (_, rows) = parse_rendered(&text);
    let u = floats(&column(&rows, "u"));
    let g = floats(&column(&rows, "gap_sq_mean"));
    assert_eq!(u.len(), 22);
    assert_eq!((u[0], u[10]), (0.0, 1.0));
    assert!((g[10] - 4.0).abs() < 1e-9 && (g[21] - 4.0).abs() < 1e-9);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 2);
    let again = quick("mean-gap", &["--cache-dir", cache.to_str().unwrap()], &dir.path().join("g2.csv"));
    assert_eq!(body(&text), body(&again));
}

#[test]
fn anneal_demo_boundaries() {
    let dir = tempfile::tempdir().unwrap();
    let text = quick(
        "anneal-demo",
        &["--scheme", "unit_sphere", "--epsilon", "0.05", "--demo-points", "50"],
        &dir.path().join("d.csv"),
    );
    let (_, rows) = parse_rendered(&text);
    let u = floats(&column(&rows, "u"));
    let p = floats(&column(&rows, "success_probability"));
    assert!((u[0] - 1.0).abs() < 1e-9 && u.last().unwrap().abs() < 1e-9);
    assert!((p[0] - 1.0 / 32.0).abs() < 1e-12);
    assert!(rows.len() - 1 <= 51);
}

#[test]
fn qaer_tables_have_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let snr = quick(
        "qaer-vs-snr",
        &["--scheme", "gaussian", "--epsilon", "0.1", "--snr-db", "0,inf"],
        &dir.path().join("s.csv"),
    );
    let (_, rows) = parse_rendered(&snr);
    assert_eq!(
        rows[0],
        ["scheme", "estimator", "epsilon", "snr_db", "error_rate_mean", "ci_halfwidth", "n_trials"]
    );
    assert_eq!(column(&rows, "estimator"), ["aer_nnls", "qaer", "aer_nnls", "qaer"]);

    let time = quick(
        "qaer-vs-time",
        &["--scheme", "gaussian", "--epsilon", "0.01,0.1"],
        &dir.path().join("t.csv"),
    );
    let (notes, rows) = parse_rendered(&time);
    assert!(notes.contains(&("snr_db".into(), "1.0000000000000000e1".into())));
    let t = floats(&column(&rows, "annealing_time"));
    assert!(t[0] < t[1], "rows run from fast to slow");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "scheme = \"unit_sphere\"\nk_sweep = [2, 4]\nn_trials = 10\nmaster_seed = 3\n").unwrap();
    let out = dir.path().join("o.csv");
    let o = qaud(&["aer-vs-k", "--config", cfg.to_str().unwrap(), "--n-trials", "12", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (notes, rows) = parse_rendered(&std::fs::read_to_string(&out).unwrap());
    assert!(notes.contains(&("master_seed".into(), "3".into())));
    assert_eq!(column(&rows, "n_trials"), ["12", "12"]);
    assert_eq!(column(&rows, "scheme"), ["unit_sphere", "unit_sphere"]);
}

#[test]
fn calibration_with_loose_target_returns_one() {
    let o = qaud(&["calibrate-k", "--seed", "1", "--target-aer", "0.5", "--calibration-trials", "200"]);
    assert!(o.status.success());
    let (_, rows) = parse_rendered(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(column(&rows, "k"), ["1", "1"]);
}

#[test]
fn errors_exit_nonzero() {
    let o = qaud(&["aer-vs-k", "--m", "6"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("error:"));

    let o = qaud(&["aer-vs-k", "--publication"]);
    assert!(!o.status.success(), "publication runs need a seed");

    let o = qaud(&["aer-vs-k", "--config", "/nonexistent/run.toml"]);
    assert!(!o.status.success());

    let o = qaud(&["calibrate-k", "--target-aer", "1e-9", "--k-max", "4", "--calibration-trials", "50"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("calibration"));
}
