use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padiclab"))
        .args(args)
        .env_remove("PADICLAB_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn digits_examples() {
    let o = run(&["digits", "--base", "2", "--prec", "10", "--num", "1", "--den", "3"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "v=0 1101010101\n"));
    let o = run(&["digits", "--base", "2", "--prec", "6", "--int", "-1"]);
    assert_eq!(stdout(&o), "v=0 111111\n");
    let o = run(&["digits", "--p", "2", "--prec", "4", "--int", "0"]);
    assert_eq!(stdout(&o), "v=inf 0000\n");
}

#[test]
fn digits_rejects_bad_input_without_output() {
    for args in [
        &["digits", "--base", "2", "--prec", "4", "--num", "1", "--den", "0"][..],
        &["digits", "--base", "1", "--prec", "4", "--int", "3"],
        &["digits", "--base", "2", "--prec", "0", "--int", "3"],
        &["digits", "--base", "2", "--prec", "4"],
        &["digits", "--base", "2", "--prec", "x", "--int", "3"],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn digits_json_matches_text() {
    let o = run(&["digits", "--base", "2", "--prec", "4", "--int", "12", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["valuation"], 2);
    assert_eq!(v["digits"], serde_json::json!([1, 1, 0, 0]));
    let text = stdout(&run(&["digits", "--base", "2", "--prec", "4", "--int", "12"]));
    assert_eq!(text, "v=2 1100\n");
}

#[test]
fn figure_text_rows() {
    let o = run(&["figure", "--id", "1", "--rows", "5", "--width", "7"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().nth(4), Some("1000101"));
    let o = run(&["figure", "--id", "6", "--rows", "1", "--width", "8"]);
    assert_eq!(stdout(&o), "10.000000\n");
}

#[test]
fn figure_three_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f3.pbm");
    let o = run(&["figure", "--id", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let grid = padiclab::grid::parse_netpbm(&text).unwrap();
    assert!(text.starts_with("P1\n600 256\n"));
    let want = padiclab::grid::grid_power_tower(3, 2, 256, 600, &padiclab::grid::TowerTransform::None).unwrap();
    assert_eq!(grid.rows, want.rows);
}

#[test]
fn figure_montage_writes_six_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.pgm");
    let o = run(&["figure", "--id", "7", "--rows", "8", "--width", "16", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["m-2-3.pgm", "m-2-5.pgm", "m-3-5.pgm", "m-4-3.pgm", "m-5-2.pgm", "m-7-2.pgm"]);
}

#[test]
fn figure_rejects_bad_id_and_path() {
    assert_eq!(code(&run(&["figure", "--id", "8"])), 2);
    assert_eq!(code(&run(&["figure", "--id", "0"])), 2);
    let o = run(&["figure", "--id", "1", "--out", "/nonexistent-dir/x.pbm"]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
}

#[test]
fn every_figure_renders() {
    for id in 1..=7 {
        let o = run(&["figure", "--id", &id.to_string(), "--rows", "6", "--width", "12"]);
        assert_eq!(code(&o), 0, "figure {id}");
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn limit_examples() {
    let o = run(&["limit", "power:3,2@2^n", "--prec", "8", "--budget", "16"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("converged") && stdout(&o).contains("limit 10000000"));
    let o = run(&["limit", "fibonacci@2^n", "--prec", "3", "--budget", "16"]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("not converged"));
    let o = run(&["limit", "power:2,5@5^n", "--prec", "2", "--budget", "10", "--json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["outcome"], "converged");
    assert_eq!(v["limit"]["digits"], serde_json::json!([2, 1]));
}

#[test]
fn limit_parse_failure_and_inconclusive() {
    assert_eq!(code(&run(&["limit", "nonsense@2^n", "--prec", "3"])), 2);
    assert_eq!(code(&run(&["limit", "catalan@2^n"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_padiclab"))
        .args(["limit", "catalan@2^n", "--prec", "3", "--budget", "8"])
        .env("PADICLAB_BUDGET", "catalan=4")
        .output()
        .unwrap();
    assert_eq!(code(&o), 4);
}

#[test]
fn deterministic_output() {
    let args = ["limit", "bell@4^n/2^3", "--budget", "8", "--json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn verify_single_group() {
    let o = run(&["verify", "--only", "legendre"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.lines().all(|l| !l.starts_with("[") || l.contains("legendre/")));
    assert_eq!(code(&run(&["verify", "--only", "nope"])), 2);
}

#[test]
fn verify_names_injected_fault() {
    let o = run(&["verify", "--only", "euler", "--inject-fault", "order-off-by-one"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("failed: euler/order-of-three"));
}

#[test]
fn verify_full_suite_passes() {
    let o = run(&["verify"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}
