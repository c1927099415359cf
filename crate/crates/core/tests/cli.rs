use chainlock::cli::run;
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("chainlock").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(text: &str) -> Value {
    serde_json::from_str(text.trim()).unwrap()
}

fn assert_error_line(err: &str) {
    let lines: Vec<&str> = err.lines().collect();
    assert_eq!(lines.len(), 1, "{err}");
    assert!(json(lines[0])["error"].is_string());
}

#[test]
fn bound_reports_closed_form() {
    let (code, out, _) = call(&["bound", "--n", "3"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["alpha_closed"], 6);
    assert_eq!(v["match"], true);

    let (code, out, _) = call(&["bound", "--n", "3", "--exhaustive"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["method"], "behavior_exhaustive");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["bound", "--n", "1"][..],
        &["sweep", "--n-min", "5", "--n-max", "3"],
        &["frobnicate"],
        &["seesaw", "--n", "2", "--restarts", "0"],
    ] {
        let (code, out, err) = call(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty());
        assert_error_line(&err);
    }
}

#[test]
fn certify_saved_optimal_model() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("optimal_n2.json");
    let p = path.to_str().unwrap();
    let (code, out, _) = call(&["quantum", "--n", "2", "--construction", "jw", "--save-model", p]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert!((v["beta"].as_f64().unwrap() - 2.82842712475).abs() < 1e-11);
    assert_eq!(v["terms"].as_array().unwrap().len(), 2);

    let (code, out, _) = call(&["certify", "--model", p]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["certified"], true);
}

#[test]
fn certify_fails_for_random_model() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("seesaw.json");
    let p = path.to_str().unwrap();
    let (code, _, _) = call(&["seesaw", "--n", "2", "--restarts", "1", "--max-iterations", "1", "--save-model", p]);
    assert_eq!(code, 0);
    let (code, out, err) = call(&["certify", "--model", p]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["certified"], false);
    assert_error_line(&err);

    let (code, _, err) = call(&["certify", "--model", "/nonexistent/model.json"]);
    assert_eq!(code, 1);
    assert_error_line(&err);
}

#[test]
fn evaluators_give_same_json() {
    let (_, dense, _) = call(&["quantum", "--n", "2", "--evaluator", "dense"]);
    let (_, contracted, _) = call(&["quantum", "--n", "2", "--evaluator", "contracted"]);
    assert_eq!(dense, contracted);
}

#[test]
fn sweep_csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let (code, out, _) = call(&[
        "sweep", "--n-min", "2", "--n-max", "8", "--format", "csv", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,alpha,beta_opt,ratio,beta_constructed,certified"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 7);
    assert_eq!(&rows[0][..4], &["2", "2", "2.82842712475", "1.41421356237"]);
    assert_eq!(&rows[1][..4], &["3", "6", "6.92820323028", "1.15470053838"]);
    assert_eq!(&rows[2][..4], &["4", "12", "16", "1.33333333333"]);
    assert_eq!(rows[0][5], "true");
    assert_eq!(rows[6][4], "");
    assert!(rows.iter().all(|r| r[3].parse::<f64>().unwrap() > 1.0));
}

#[test]
fn seesaw_is_reproducible_and_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let args = ["seesaw", "--n", "2", "--restarts", "3", "--seed", "9", "--trace-csv", trace.to_str().unwrap()];
    let (code, first, _) = call(&args);
    assert_eq!(code, 0);
    let (_, second, _) = call(&args);
    assert_eq!(first, second);
    let (_, threaded, _) = call(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(first, threaded);
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("restart,iteration,beta\n0,0,"));
}

#[test]
fn dump_scenario_prints_encoding() {
    let (code, out, _) = call(&["seesaw", "--n", "3", "--dump-scenario"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["signs"][3], serde_json::json!([1, -1, -1]));
    assert_eq!(v["bob_inputs"][1], serde_json::json!([1, 2]));
}

#[test]
fn require_certified_flags_failures() {
    let (code, _, _) = call(&["quantum", "--n", "2", "--require-certified"]);
    assert_eq!(code, 0);
    let (code, out, err) = call(&["sweep", "--n-min", "2", "--n-max", "3", "--require-certified"]);
    let rows = json(&out);
    let all_certified = rows
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["certified"] != false);
    assert_eq!(code == 0, all_certified, "{err}");
}
