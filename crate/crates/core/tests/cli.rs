use std::fs;
use std::path::PathBuf;

use defectlab::cli::{run, EXIT_CHECK, EXIT_INPUT, EXIT_PASS, EXIT_USAGE};
use serde_json::Value;

fn scenario(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run_into(dir: &tempfile::TempDir, args: &[&str]) -> i32 {
    let mut argv = vec!["defectlab", "--out", dir.path().to_str().unwrap()];
    argv.extend_from_slice(args);
    run(argv)
}

fn report(dir: &tempfile::TempDir, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.path().join(format!("{name}.json"))).unwrap()).unwrap()
}

#[test]
fn bounds_report_matches_worked_values() {
    let dir = tempfile::tempdir().unwrap();
    let code = run_into(&dir, &["bounds", "--n", "2", "--k", "2", "--d", "1", "--eps", "1", "--rho", "0"]);
    assert_eq!(code, EXIT_PASS);
    let r = report(&dir, "bounds");
    assert_eq!(r["p"], 1);
    assert_eq!(r["N"], "57");
    assert_eq!(r["u"], "1711");
    assert_eq!(r["rhs"], "4");
    assert_eq!(r["lemma_new"]["a"], "pass");
    assert_eq!(r["lemma_new"]["b"], "pass");
    assert_eq!(r["seed"], 0);
}

#[test]
fn position_verdicts_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let fam = scenario("conics.json");
    assert_eq!(run_into(&dir, &["check-position", &fam, "--k", "2"]), EXIT_PASS);
    assert_eq!(report(&dir, "check-position")["verdict"], "holds");
    assert_eq!(run_into(&dir, &["check-position", &fam, "--k", "1"]), EXIT_CHECK);
    assert_eq!(report(&dir, "check-position")["verdict"], "violated");
}

#[test]
fn nevanlinna_writes_monotone_csv() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["nevanlinna", &scenario("twisted_cubic.json"), &scenario("hyp_sum.json")];
    let code = run_into(&dir, &[&args[..], &["--r0", "1", "--grid", "geom:2,64,24", "--trunc", "3"]].concat());
    assert_eq!(code, EXIT_PASS);
    let mut rdr = csv::Reader::from_path(dir.path().join("nevanlinna.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["r", "T", "N", "N_trunc", "m", "residual"]);
    let t: Vec<f64> = rdr.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(t.len(), 25);
    assert!(t.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn reports_are_byte_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let code = run_into(dir, &["--seed", "7", "smt", &scenario("line_curve.json"), &scenario("lines.json"), "--N", "2", "--divisor"]);
        assert_eq!(code, EXIT_PASS);
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("smt.json")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_eq!(report(&a, "smt")["seed"], 7);
}

#[test]
fn replace_filtration_wronskian_and_gauss() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_into(&dir, &["replace", &scenario("plane.json")]), EXIT_PASS);
    assert_eq!(report(&dir, "replace")["span_form_verified"], true);
    assert_eq!(run_into(&dir, &["filtration", &scenario("conics.json"), "--N", "6", "--basis"]), EXIT_PASS);
    assert_eq!(report(&dir, "filtration")["jump_law"]["pass"], true);
    assert_eq!(run_into(&dir, &["wronskian", &scenario("tuple.json"), "--point", "1,-2+0.5i"]), EXIT_PASS);
    assert_eq!(report(&dir, "wronskian")["weight"], 2);
    assert_eq!(run_into(&dir, &["wronskian", &scenario("dependent_tuple.json")]), EXIT_CHECK);
    assert_eq!(run_into(&dir, &["gauss", &scenario("surface_immersion.json")]), EXIT_PASS);
    assert_eq!(report(&dir, "gauss")["plucker_relations"]["checked"], 16);
    let code = run_into(
        &dir,
        &["gauss", &scenario("moment_curve_immersion.json"), "--family", &scenario("plane_lines.json"), "--grid", "geom:2,1e4,32"],
    );
    assert_eq!(code, EXIT_PASS);
    assert_eq!(report(&dir, "gauss")["defects"]["rhs"], "4");
}

#[test]
fn input_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_into(&dir, &["check-position", "/nonexistent/family.json", "--k", "1"]), EXIT_INPUT);
    assert_eq!(run_into(&dir, &["bounds", "--n", "1", "--k", "1", "--d", "1", "--eps", "-1"]), EXIT_INPUT);
    assert_eq!(run(["defectlab", "bounds", "--frobnicate"]), EXIT_USAGE);
    assert_eq!(run(["defectlab", "transmogrify"]), EXIT_USAGE);
}
