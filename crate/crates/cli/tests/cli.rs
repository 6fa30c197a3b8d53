//! End-to-end tests of the `whittaker-lab` binary: output schema, exit
//! codes, determinism, and recheck round trips.

use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_whittaker-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

#[test]
fn whittaker_identity_valuation_is_one() {
    let out = run(&[
        "whittaker",
        "--p",
        "2",
        "--n",
        "2",
        "--v",
        "0",
        "--alpha",
        "1,1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["value"], serde_json::json!([1.0, 0.0]));
}

#[test]
fn whittaker_off_cone_is_zero() {
    let out = run(&[
        "whittaker",
        "--p",
        "3",
        "--n",
        "3",
        "--v",
        "1,-2",
        "--alpha",
        "1,i,-i",
    ]);
    let doc = json_of(&out);
    assert_eq!(doc["value"], serde_json::json!([0.0, 0.0]));
}

#[test]
fn schur_methods_agree() {
    let out = run(&[
        "schur",
        "--n",
        "3",
        "--m",
        "2,1",
        "--alpha",
        "0.9+0.2i,-0.3+0.8i,0.1-1.4i",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    let read = |name: &str| {
        let v = doc["values"][name].as_array().unwrap();
        (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
    };
    let (bre, bim) = read("bialternant");
    let (jre, jim) = read("jacobi-trudi");
    let (tre, tim) = read("tableau");
    assert!((bre - tre).abs() < 1e-10 && (bim - tim).abs() < 1e-10);
    assert!((jre - tre).abs() < 1e-10 && (jim - tim).abs() < 1e-10);
    assert_eq!(doc["partition"], serde_json::json!([3, 2, 0]));
}

#[test]
fn composite_prime_exits_two_with_error_object() {
    let out = run(&[
        "whittaker",
        "--p",
        "4",
        "--n",
        "2",
        "--v",
        "0",
        "--alpha",
        "1,1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let doc = json_of(&out);
    assert_eq!(doc["error"]["kind"], "not-prime");
}

#[test]
fn divergent_pairing_exits_three() {
    let out = run(&[
        "pairing",
        "--p",
        "2",
        "--n",
        "2",
        "--alpha",
        "2,0.5",
        "--beta",
        "2,0.5",
        "--epsilon",
        "0",
        "--truncation",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json_of(&out)["error"]["kind"], "divergent-domain");
}

#[test]
fn pairing_reports_bounds_and_closed_form() {
    let out = run(&[
        "pairing",
        "--p",
        "2",
        "--n",
        "2",
        "--alpha",
        "0.5,0.5",
        "--beta",
        "0.5,0.5",
        "--epsilon",
        "0.1",
        "--truncation",
        "60",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert!(doc["within_bound"].as_bool().unwrap());
    assert!(doc["difference"].as_f64().unwrap() < 1e-10);
}

#[test]
fn verify_plancherel_passes_and_echoes_seed() {
    let out = run(&[
        "verify",
        "plancherel",
        "--n",
        "3",
        "--p",
        "2",
        "--cube",
        "3",
        "--trials",
        "4",
        "--tol",
        "1e-10",
        "--seed",
        "11",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["seed"], 11);
    assert_eq!(doc["passed"], true);
    assert!(!doc["checks"].as_array().unwrap().is_empty());
}

#[test]
fn verify_output_is_deterministic() {
    let args = [
        "verify", "cauchy", "--seed", "5", "--trials", "3", "--m-max", "30",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
}

#[test]
fn forward_inverse_round_trip_through_cli() {
    // h = indicator at v = (1) scaled by 2^{-1/2} transforms to b + 1/b;
    // feeding that polynomial back recovers the original value at v = 1.
    let inv = run(&[
        "inverse",
        "--p",
        "2",
        "--n",
        "2",
        "--v",
        "1",
        "--poly",
        r#"[{"e":[1],"c":[1,0]},{"e":[-1],"c":[1,0]}]"#,
    ]);
    assert_eq!(inv.status.code(), Some(0));
    let doc = json_of(&inv);
    let value = doc["value"].as_array().unwrap();
    let expected = 2.0_f64.powf(-0.5);
    assert!((value[0].as_f64().unwrap() - expected).abs() < 1e-12);
    assert_eq!(doc["method"], "exact");
}

#[test]
fn inverse_quadrature_matches_closed_profile() {
    // Rank-2 L-factor evaluator at d=3, lambda=2, p=2, s=2.5.
    let out = run(&[
        "inverse",
        "--p",
        "2",
        "--n",
        "2",
        "--v",
        "2",
        "--lfactor-d",
        "3",
        "--lfactor-s",
        "2.5",
        "--nodes",
        "512",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value = json_of(&out)["value"].as_array().unwrap()[0]
        .as_f64()
        .unwrap();
    // Closed profile: 2^{-1} (x^2 - x^4)/((1-x^2)(1-x^4)) at x = 2^{-2.5}.
    let x = 2.0_f64.powf(-2.5);
    let closed = 0.5 * (x.powi(2) - x.powi(4)) / ((1.0 - x.powi(2)) * (1.0 - x.powi(4)));
    assert!((value - closed).abs() < 1e-8, "{value} vs {closed}");
}

#[test]
fn lfactor_table_reports_small_differences() {
    let out = run(&[
        "lfactor-table",
        "--d",
        "4",
        "--p",
        "3",
        "--s",
        "2.5",
        "--lambda-max",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert!(doc["max_abs_diff"].as_f64().unwrap() < 1e-8);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 9);
}

#[test]
fn recheck_round_trips_json_and_csv() {
    let dir = std::env::temp_dir();
    let json_path = dir.join("whittaker_cli_test_table.json");
    let csv_path = dir.join("whittaker_cli_test_table.csv");

    let args = [
        "lfactor-table",
        "--d",
        "3",
        "--p",
        "2",
        "--s",
        "2.5",
        "--lambda-max",
        "6",
    ];
    let out = bin()
        .args(args)
        .args(["--out", json_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = bin()
        .args(args)
        .args(["--output", "csv", "--out", csv_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    for path in [&json_path, &csv_path] {
        let rc = run(&["recheck", path.to_str().unwrap()]);
        let doc = json_of(&rc);
        assert_eq!(doc["reproduced"], true, "{doc}");
        assert_eq!(rc.status.code(), Some(0));
    }

    // Tampering must be detected.
    let tampered = std::fs::read_to_string(&json_path).unwrap().replacen(
        "\"max_abs_diff\":",
        "\"max_abs_diff_x\":",
        1,
    );
    std::fs::write(&json_path, tampered).unwrap();
    let rc = run(&["recheck", json_path.to_str().unwrap()]);
    assert_eq!(rc.status.code(), Some(1));
    assert_eq!(json_of(&rc)["reproduced"], false);

    let _ = std::fs::remove_file(&json_path);
    let _ = std::fs::remove_file(&csv_path);
}

#[test]
fn thread_cap_does_not_change_results() {
    let args = [
        "lfactor-table",
        "--d",
        "2",
        "--p",
        "5",
        "--s",
        "3",
        "--lambda-max",
        "10",
    ];
    let solo = bin()
        .args(args)
        .env("WHITTAKER_LAB_THREADS", "1")
        .output()
        .unwrap();
    let many = bin()
        .args(args)
        .env("WHITTAKER_LAB_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(solo.stdout, many.stdout);
}

#[test]
fn csv_flattens_complex_to_two_columns() {
    let out = run(&[
        "whittaker",
        "--p",
        "2",
        "--n",
        "2",
        "--v",
        "1",
        "--alpha",
        "1,1",
        "--output",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# {"));
    assert_eq!(lines.next().unwrap(), "value_re,value_im");
    let row = lines.next().unwrap();
    assert!(row.starts_with("1.414213562373095"), "{row}");
}
