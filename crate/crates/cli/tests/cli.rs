use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn cikit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cikit"))
        .args(args)
        .current_dir(data(""))
        .output()
        .expect("spawn cikit")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn golden(name: &str) -> String {
    fs::read_to_string(data(name)).unwrap()
}

#[test]
fn check_reports_the_missing_contraction_triple() {
    let o = cikit(&["check", "witness.rel", "--rules", "D,U,C,L"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("C: violated"));
    assert!(out.contains("missing (a ; b c ;)"));
    assert_eq!(out, golden("check_witness.out"));
}

#[test]
fn check_passes_on_closed_relation() {
    let o = cikit(&["check", "close_witness.out", "--rules", "D,U,C"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn close_matches_golden() {
    let o = cikit(&["close", "witness.rel"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("close_witness.out"));
}

#[test]
fn dual_twice_is_identity() {
    let dir = std::env::temp_dir().join(format!("cikit-dual-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let once = dir.join("once.rel");
    let twice = dir.join("twice.rel");
    let o = cikit(&[
        "dual",
        "path4_separation.out",
        "--out",
        once.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = cikit(&[
        "dual",
        once.to_str().unwrap(),
        "--out",
        twice.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        fs::read(&twice).unwrap(),
        fs::read(data("path4_separation.out")).unwrap()
    );
    assert_ne!(fs::read(&once).unwrap(), fs::read(&twice).unwrap());
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn separation_listing_and_query() {
    let o = cikit(&["separation", "path4.g"]);
    assert_eq!(stdout(&o), golden("path4_separation.out"));
    let o = cikit(&["separation", "path4.g", "--query", "d ; a ; b"]);
    assert_eq!(stdout(&o), "(a ; d ; b): separated\n");
    let o = cikit(&["separation", "path4.g", "--query", "a ; d ;"]);
    assert_eq!(stdout(&o), "(a ; d ;): not separated\n");
}

#[test]
fn extract_graph_modes() {
    let o = cikit(&["extract-graph", "witness.rel", "--mode", "bi"]);
    assert_eq!(stdout(&o), "vertices: a b c\nedge: a c\nedge: b c\n");
    let o = cikit(&[
        "extract-graph",
        "witness.rel",
        "--mode",
        "un",
        "--adjacency",
    ]);
    assert_eq!(
        stdout(&o),
        "vertices: a b c\nedge: a b\nedge: b c\n0 1 0\n1 0 1\n0 1 0\n"
    );
    let o = cikit(&["extract-graph", "witness.rel", "--mode", "sideways"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gaussian_chain_and_its_inverse() {
    let o = cikit(&["gaussian", "chain.cov"]);
    assert_eq!(stdout(&o), golden("chain_relation.out"));
    let o = cikit(&["gaussian", "chain.cov", "--inverse"]);
    assert_eq!(stdout(&o), golden("chain_inverse.out"));
    let o = cikit(&["gaussian", "chain.cov", "--duality"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("passed"));
}

#[test]
fn verify_pseudo_conc_exhaustive() {
    let o = cikit(&["verify", "pseudo-conc", "--p", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("passed, 0 counterexamples"));
    assert_eq!(stdout(&o), golden("verify_pseudo_conc.out"));
}

#[test]
fn search_finds_counterexample_with_exit_one() {
    let o = cikit(&[
        "search",
        "localizable-implies-c",
        "--p",
        "3",
        "--budget",
        "500",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample 1:"));
}

#[test]
fn verify_single_instance() {
    let o = cikit(&["verify", "semi-parsim", "--relation", "close_witness.out"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let o = cikit(&[
        "verify",
        "gaussian-duality",
        "--covariance",
        "chain.cov",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["claim"], "gaussian-duality");
}

#[test]
fn parse_errors_name_file_line_and_token() {
    let o = cikit(&["check", "bad_token.rel"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(
        stderr(&o),
        "error: bad_token.rel: line 3: unknown vertex (at `z`)\n"
    );
    assert!(stdout(&o).is_empty());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cikit(&["verify", "no-such-claim"]).status.code(), Some(2));
    assert_eq!(
        cikit(&["check", "witness.rel", "--rules", "D,Q"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cikit(&["check", "missing.rel"]).status.code(), Some(2));
    assert_eq!(cikit(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        cikit(&["verify", "semi-parsim", "--p", "6", "--exhaustive"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sampling_is_deterministic_across_thread_counts() {
    let run = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_cikit"))
            .args([
                "search",
                "localizable-implies-c",
                "--p",
                "4",
                "--budget",
                "3000",
                "--seed",
                "7",
            ])
            .env("CIKIT_THREADS", threads)
            .output()
            .unwrap();
        stdout(&o)
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    assert_eq!(one, run("1"));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_cikit"))
        .args(["dual", "witness.rel"])
        .current_dir(data(""))
        .env("CIKIT_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("CIKIT_THREADS"));
}
