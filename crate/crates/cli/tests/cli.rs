//! End-to-end runs of the `triqap` binary.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const GHZ: &str = r#"{"type": "ghz", "lambda0_plus": 1, "lambda0_minus": 0, "lambda1": 0, "lambda2": 0, "lambda3": 0}"#;
const COUNTEREXAMPLE: &str =
    r#"{"type": "ghz", "lambda0_plus": 0.4, "lambda0_minus": 0, "lambda1": 0.1, "lambda2": 0.1, "lambda3": 0.1}"#;
const WHITE: &str = r#"{"type": "ghz", "lambda0_plus": 0.125, "lambda0_minus": 0.125, "lambda1": 0.125, "lambda2": 0.125, "lambda3": 0.125}"#;

fn triqap() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_triqap"));
    c.env_remove("TRIQAP_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    triqap().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = triqap()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn nums(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(num).collect()
}

fn write_spec(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

/// 8x8 matrix document from real entries.
fn matrix_doc(entry: impl Fn(usize, usize) -> f64) -> String {
    let rows: Vec<String> = (0..8)
        .map(|r| {
            let cells: Vec<String> = (0..8).map(|c| format!("[{}, 0]", entry(r, c))).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!(r#"{{"type": "matrix", "rho": [{}]}}"#, rows.join(", "))
}

#[test]
fn analyze_ghz() {
    let r = json(&run_stdin(&["analyze", "-"], GHZ));
    assert_eq!(r["flags"]["useful"], true);
    assert_eq!(r["flags"]["npt_all_cuts"], true);
    assert_eq!(r["flags"]["violates_general"], true);
    assert!((num(&r["mermin_general"]) - 4.0).abs() < 1e-6);
    assert_eq!(nums(&r["f"]), [1.0; 3]);
    assert_eq!(nums(&r["F"]), [1.0; 3]);
    assert_eq!(nums(&r["negativity"]), [0.5; 3]);
}

#[test]
fn analyze_counterexample() {
    let r = json(&run_stdin(&["analyze", "-"], COUNTEREXAMPLE));
    assert_eq!(r["flags"]["useful"], false);
    assert_eq!(r["flags"]["npt_all_cuts"], true);
    assert_eq!(nums(&r["f"]), [0.5; 3]);
    assert_eq!(nums(&r["negativity"]), [0.1; 3]);
}

#[test]
fn flags_are_recomputable() {
    let dir = tempfile::tempdir().unwrap();
    let bell = matrix_doc(|r, c| {
        if [0, 3].contains(&r) && [0, 3].contains(&c) {
            0.5
        } else {
            0.0
        }
    });
    for (name, text) in [("ghz", GHZ), ("ce", COUNTEREXAMPLE), ("white", WHITE), ("bell", &bell)] {
        let path = write_spec(dir.path(), name, text);
        let r = json(&run(&["analyze", &path]));
        let tol = num(&r["tolerance"]);
        let min = |v: &Value| nums(v).into_iter().fold(f64::INFINITY, f64::min);
        assert_eq!(r["flags"]["useful"], min(&r["f"]) > 0.5 + tol, "{name}");
        assert_eq!(r["flags"]["npt_all_cuts"], min(&r["negativity"]) > tol, "{name}");
        assert_eq!(
            r["flags"]["violates_symmetric"],
            num(&r["mermin_symmetric"]) > 2.0 + tol,
            "{name}"
        );
        assert_eq!(
            r["flags"]["violates_general"],
            num(&r["mermin_general"]) > 2.0 + tol,
            "{name}"
        );
        for (f, big_f) in nums(&r["f"]).iter().zip(nums(&r["F"])) {
            assert!(((2.0 * f + 1.0) / 3.0 - big_f).abs() < 1e-11);
        }
    }
}

#[test]
fn zero_bell_is_not_useful_but_violates_symmetric() {
    let bell = matrix_doc(|r, c| {
        if [0, 3].contains(&r) && [0, 3].contains(&c) {
            0.5
        } else {
            0.0
        }
    });
    let r = json(&run_stdin(&["analyze", "-"], &bell));
    assert_eq!(nums(&r["f"]), [1.0, 0.5, 0.5]);
    assert_eq!(r["flags"]["useful"], false);
    assert_eq!(r["flags"]["npt_all_cuts"], false);
    assert!((num(&r["mermin_symmetric"]) - 2.29561001066).abs() < 1e-6);
    assert!((num(&r["mermin_general"]) - 2.0 * 2f64.sqrt()).abs() < 1e-6);
}

#[test]
fn pure_and_mixture_inputs() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let pure = format!(
        r#"{{"type": "pure", "amplitudes": [[{h}, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0], [0, 0], [{h}, 0]]}}"#
    );
    let r = json(&run_stdin(&["analyze", "-"], &pure));
    assert_eq!(nums(&r["f"]), [1.0; 3]);

    let mix = format!(
        r#"{{"type": "mixture", "components": [{{"weight": 0.6, "state": {pure}}}, {{"weight": 0.4, "state": {WHITE}}}]}}"#
    );
    let r = json(&run_stdin(&["analyze", "-"], &mix));
    assert_eq!(nums(&r["f"]), [0.7; 3]);
    assert_eq!(num(&r["ghz_params"]["lambda0_plus"]), 0.65);
    assert_eq!(num(&r["ghz_params"]["lambda1"]), 0.05);
}

#[test]
fn csv_report_has_a_fixed_header() {
    let o = run_stdin(&["--format", "csv", "analyze", "-"], GHZ);
    assert_eq!(code(&o), 0);
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header[..6], ["f1", "f2", "f3", "F1", "F2", "F3"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].len(), header.len());
    assert_eq!(&rows[0][header.iter().position(|h| h == "useful").unwrap()], "true");
}

#[test]
fn invalid_states_exit_with_two() {
    let not_psd = matrix_doc(|r, c| match (r, c) {
        (0, 0) => 1.0,
        (0, 7) | (7, 0) => 2.0,
        _ => 0.0,
    });
    let o = run_stdin(&["analyze", "-"], &not_psd);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("positive semidefinite"));

    let bad_trace = matrix_doc(|r, c| if r == c { 0.5 } else { 0.0 });
    assert_eq!(code(&run_stdin(&["analyze", "-"], &bad_trace)), 2);

    let bad_weights =
        r#"{"type": "ghz", "lambda0_plus": 0.9, "lambda0_minus": 0, "lambda1": 0.1, "lambda2": 0, "lambda3": 0}"#;
    assert_eq!(code(&run_stdin(&["analyze", "-"], bad_weights)), 2);

    let bad_mixture = format!(r#"{{"type": "mixture", "components": [{{"weight": 0.5, "state": {GHZ}}}]}}"#);
    assert_eq!(code(&run_stdin(&["analyze", "-"], &bad_mixture)), 2);
}

#[test]
fn io_and_parse_errors_exit_with_one() {
    assert_eq!(code(&run(&["analyze", "/nonexistent/state.json"])), 1);
    assert_eq!(code(&run_stdin(&["analyze", "-"], "{not json")), 1);
    assert_eq!(
        code(&run_stdin(
            &["analyze", "-"],
            r#"{"type": "matrix", "rho": [[[1, 0]]]}"#
        )),
        1
    );
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn analyze_is_deterministic() {
    let a = run_stdin(&["analyze", "-"], COUNTEREXAMPLE);
    let b = run_stdin(&["--seed", "99", "analyze", "-"], COUNTEREXAMPLE);
    assert_eq!(a.stdout, b.stdout);
}

fn read_sweep(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn sweep_equal_lambda_slice() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("slice.csv");
    let o = run(&[
        "sweep",
        "--steps",
        "50",
        "--tie",
        "l1,l2,l3",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_sweep(&out);
    assert_eq!(
        header,
        [
            "lambda0_plus",
            "lambda0_minus",
            "lambda1",
            "lambda2",
            "lambda3",
            "f1",
            "f2",
            "f3",
            "N1",
            "N2",
            "N3",
            "mermin",
            "useful",
            "npt_all_cuts",
            "violates"
        ]
    );
    assert!(rows.len() > 100);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (v, u, d) = (col("violates"), col("useful"), col("npt_all_cuts"));
    for row in &rows {
        assert!(row[v] != "true" || row[u] == "true", "{row:?}");
        assert!(row[u] != "true" || row[d] == "true", "{row:?}");
    }
    let ghz = rows.iter().find(|r| r[..5] == ["1", "0", "0", "0", "0"]).unwrap();
    assert_eq!(ghz[5..12], ["1", "1", "1", "0.5", "0.5", "0.5", "4"]);
}

#[test]
fn sweep_uniform_point() {
    let o = run(&["sweep", "--steps", "9", "--tie", "l1,l2,l3"]);
    assert_eq!(code(&o), 0);
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let row = rdr
        .records()
        .map(Result::unwrap)
        .find(|r| (0..5).all(|k| &r[k] == "0.125"))
        .unwrap();
    let row: Vec<&str> = row.iter().collect();
    assert_eq!(
        row[5..],
        ["0.25", "0.25", "0.25", "0", "0", "0", "0", "false", "false", "false"]
    );
}

#[test]
fn sweep_errors() {
    assert_eq!(code(&run(&["sweep", "--fix", "l0p=0.9", "--fix", "l1=0.3"])), 2);
    assert_eq!(code(&run(&["sweep", "--steps", "1"])), 1);
    assert_eq!(code(&run(&["sweep", "--fix", "l7=0.1"])), 1);
}

#[test]
fn verify_theorem1() {
    let r = json(&run(&["--quiet", "verify", "theorem1", "--n", "10000", "--seed", "7"]));
    assert_eq!(r["violations"], 0);
    assert_eq!(r["samples"], 10000);
}

#[test]
fn verify_theorem2() {
    let r = json(&run(&["--quiet", "verify", "theorem2", "--n", "10000", "--seed", "7"]));
    assert_eq!(r["violations"], 0);
    assert!(r["antecedents"].as_u64().unwrap() > 0);
}

/// The negativity and Mermin closed forms hold on every sample. The
/// trace-norm expression exceeds `l0+ + l_(4-i)` once the two remaining
/// `l_j` sum past 1/4, and the campaign reports exactly those samples.
#[test]
fn verify_closed_forms() {
    let o = run(&["--quiet", "verify", "closed-forms", "--n", "1000", "--seed", "7"]);
    assert_eq!(code(&o), 3);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["passed"], false);
    assert!(num(&r["metrics"]["max_negativity_deviation"]) <= 1e-9);
    assert!(num(&r["metrics"]["max_mermin_deviation"]) <= 1e-3);
    let outliers = r["outliers"].as_array().unwrap();
    assert_eq!(outliers.len() as u64, r["violations"].as_u64().unwrap());
    for o in outliers {
        assert!(o["check"].as_str().unwrap().starts_with("trace-norm f_"), "{o}");
        assert!(
            num(&o["quantities"]["closed"]) > num(&o["quantities"]["formula"]),
            "{o}"
        );
    }
}

#[test]
fn verify_unknown_campaign_lists_names() {
    let o = run(&["verify", "theorem3"]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8(o.stderr).unwrap();
    for name in ["theorem1", "theorem2", "closed-forms", "depolarization-monotonicity"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn seed_from_environment() {
    let args = ["verify", "depolarization-monotonicity", "--n", "20"];
    let from_flag = json(&run(&[&args[..], &["--seed", "5"]].concat()));
    let from_env = json(&triqap().env("TRIQAP_SEED", "5").args(args).output().unwrap());
    let overridden = json(
        &triqap()
            .env("TRIQAP_SEED", "6")
            .args([&args[..], &["--seed", "5"]].concat())
            .output()
            .unwrap(),
    );
    let default = json(&run(&args));
    assert_eq!(from_flag, from_env);
    assert_eq!(from_flag, overridden);
    assert_eq!(from_flag["seed"], 5);
    assert_eq!(default["seed"], 0);
}

#[test]
fn simulate_ghz() {
    let r = json(&run_stdin(
        &["simulate", "-", "--system", "1", "--samples", "10000"],
        GHZ,
    ));
    assert!((num(&r["mean"]) - 1.0).abs() <= 1e-12);
    assert!(num(&r["gap"]).abs() <= 1e-12);
}

#[test]
fn simulate_counterexample() {
    let r = json(&run_stdin(
        &["simulate", "-", "--system", "1", "--samples", "100000", "--seed", "3"],
        COUNTEREXAMPLE,
    ));
    let (mean, se) = (num(&r["mean"]), num(&r["std_error"]));
    assert!((mean - 2.0 / 3.0).abs() <= 3.0 * se, "{r}");
    assert!((num(&r["analytic_fidelity"]) - 2.0 / 3.0).abs() < 1e-11);
}

#[test]
fn simulate_maximally_mixed() {
    let r = json(&run_stdin(
        &["simulate", "-", "--frame", "auto", "--samples", "20000"],
        WHITE,
    ));
    assert!(
        (num(&r["mean"]) - 0.5).abs() <= 3.0 * num(&r["std_error"]) + 1e-9,
        "{r}"
    );
    assert_eq!(r["frame"], "auto");
}

#[test]
fn simulate_is_deterministic_and_validates() {
    let args = [
        "simulate",
        "-",
        "--system",
        "2",
        "--samples",
        "2000",
        "--seed",
        "11",
        "--euler",
        "0.3,0.2,0.1",
    ];
    assert_eq!(
        run_stdin(&args, COUNTEREXAMPLE).stdout,
        run_stdin(&args, COUNTEREXAMPLE).stdout
    );
    assert_eq!(code(&run_stdin(&["simulate", "-", "--system", "4"], GHZ)), 1);
    assert_eq!(code(&run_stdin(&["simulate", "-", "--system", "0"], GHZ)), 1);
}
