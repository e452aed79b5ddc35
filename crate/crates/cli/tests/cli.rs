use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smtkit"))
        .args(args)
        .env_remove("SMTKIT_QUAD_TOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn bounds_example_exits_zero() {
    let out = run(&["bounds", "--n", "2", "--q", "4", "--eps", "1/2", "--degrees", "2,2,2,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let r = &v["result"];
    assert_eq!(r["n"], 2);
    assert_eq!(r["q"], 4);
    assert_eq!(r["eps"], "1/2");
    assert_eq!(r["margin_ok"], true);
    assert_eq!(v["config"]["options"]["eps"], "1/2");
    assert_eq!(v["checks_passed"], true);
}

#[test]
fn degenerate_admissible_is_a_verdict() {
    let out = run(&["admissible", "--system", &data("degenerate.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["admissible"], false);
    assert_eq!(v["result"]["failing_subset"], serde_json::json!([0, 2]));
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"n\": 1,\n \"forms\": [}").unwrap();
    let out = run(&["admissible", "--system", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2, column 12"), "{err}");
}

#[test]
fn schema_violation_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    std::fs::write(&p, r#"{"n": "one", "forms": []}"#).unwrap();
    let out = run(&["resultant", "--system", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn float_eps_is_rejected() {
    let out = run(&["bounds", "--n", "1", "--q", "3", "--eps", "0.5", "--degrees", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_file_exits_two() {
    let out = run(&["admissible", "--system", "/nonexistent/sys.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_check_exits_one() {
    // near r = 1 none of the targets has zeros, so the counting side is 0
    // while (q-n-1-ε)·T(r) is positive
    let out = run(&[
        "smt-verify",
        "--curve",
        &data("exp_curve.json"),
        "--system",
        &data("fixed_line.json"),
        "--eps",
        "1/2",
        "--rmin",
        "1",
        "--rmax",
        "1.5",
        "--steps",
        "3",
        "--levels",
        "1,1,1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["result"]["verdict"], false);
    assert_eq!(v["checks_passed"], false);
}

#[test]
fn every_subcommand_has_help_and_schema() {
    for sub in [
        "resultant",
        "admissible",
        "certificate",
        "filtration",
        "bounds",
        "jensen",
        "wronskian",
        "defects",
        "smt-verify",
        "selftest",
    ] {
        let help = run(&[sub, "--help"]);
        assert_eq!(help.status.code(), Some(0), "{sub} --help");
        assert!(!help.stdout.is_empty());
        let schema = run(&[sub, "--schema"]);
        assert_eq!(schema.status.code(), Some(0), "{sub} --schema");
        let v = json(&schema);
        assert_eq!(v["subcommand"], sub);
        assert!(v["inputs"].is_object());
    }
}

#[test]
fn output_is_deterministic() {
    let args = [
        "smt-verify",
        "--curve",
        &data("exp_curve.json"),
        "--system",
        &data("moving_line.json"),
        "--eps",
        "1/2",
        "--steps",
        "4",
        "--seed",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["config"]["seed"], 7);

    let r = ["resultant", "--system", &data("conics.json"), "--seed", "3"];
    assert_eq!(run(&r).stdout, run(&r).stdout);
}

#[test]
fn report_and_plot_written_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let plot = dir.path().join("plot.svg");
    let out = run(&[
        "smt-verify",
        "--curve",
        &data("exp_curve.json"),
        "--system",
        &data("moving_line.json"),
        "--eps",
        "1/2",
        "--steps",
        "4",
        "--plot",
        plot.to_str().unwrap(),
        "-o",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["result"]["verdict"], true);
    let svg = std::fs::read_to_string(&plot).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    // nothing but the two artifacts is left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn filtration_reports_table() {
    let out = run(&["filtration", "--system", &data("conics.json"), "--subset", "0,3", "--N", "6", "--psi"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    // K = C(N/d + n, n) = C(5, 2), M = C(N + n, n) = C(8, 2)
    assert_eq!(r["K"], 10);
    assert_eq!(r["M"], 28);
    let m_sum: u64 = r["m"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).sum();
    assert_eq!(m_sum, 28);
    assert_eq!(r["psi_basis"]["exponent_sums"], serde_json::json!([r["A"], r["A"]]));
}

#[test]
fn filtration_rejects_bad_degree() {
    let out = run(&["filtration", "--system", &data("conics.json"), "--subset", "0,3", "--N", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resultant_matches_sylvester_for_lines() {
    let out = run(&["resultant", "--system", &data("moving_line.json"), "--subset", "0,2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert_eq!(r["agrees_up_to_sign"], true);
}

#[test]
fn certificate_within_bound() {
    let out = run(&["certificate", "--system", &data("conics.json"), "--subset", "0,1,3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert!(r["common_s"].as_u64().unwrap() <= r["s_bound"].as_u64().unwrap());
    assert_eq!(r["certificates"].as_array().unwrap().len(), 3);
}

#[test]
fn jensen_and_wronskian() {
    let out = run(&["jensen", "--function", &data("function.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["result"]["max_residual"].as_f64().unwrap() < 1e-6);

    let out = run(&["wronskian", "--curve", &data("poly_curve.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["divisor_bound"]["violations"], 0);

    let out = run(&["wronskian", "--functions", &data("functions.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["admissible_set"]["alpha"].as_array().unwrap().len(), 4);
}

#[test]
fn csv_outputs() {
    let out = run(&["bounds", "--n", "1", "--q", "3", "--eps", "1/2", "--degrees", "1", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# smtkit"));
    assert!(lines.next().unwrap().starts_with("n,q,d,eps"));
    assert!(lines.count() >= 3);

    let out = run(&["jensen", "--function", &data("function.json"), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quadrature_override_is_recorded() {
    let out = Command::new(env!("CARGO_BIN_EXE_smtkit"))
        .args(["jensen", "--function", &data("function.json"), "--radii", "3"])
        .env("SMTKIT_QUAD_TOL", "1e-10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["config"]["quad_tol_override"], "1e-10");
}

#[test]
fn selftest_subset() {
    let out = run(&["selftest", "--only", "4,7"]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.matches("[PASS]").count(), 2, "{stderr}");
    assert_eq!(json(&out)["result"]["all_passed"], true);

    assert_eq!(run(&["selftest", "--only", "11"]).status.code(), Some(2));
}
