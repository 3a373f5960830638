//! Runs the binary and compares stdout with committed goldens. Set
//! `CRNKIT_UPDATE_GOLDEN=1` to rewrite them.

use std::path::PathBuf;
use std::process::Command;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_crnkit"))
        .args(args)
        .current_dir(root().join("../.."))
        .env_remove("CRNKIT_THREADS")
        .output()
        .expect("run crnkit");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn golden(name: &str, args: &[&str]) {
    let (code, stdout, stderr) = run(args);
    assert_eq!(code, 0, "{args:?} failed: {stderr}");
    let path = root().join("tests/golden").join(name);
    if std::env::var_os("CRNKIT_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &stdout).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(stdout, expected, "output of {args:?} differs from {name}");
}

#[test]
fn info_goldens() {
    golden("info_wegscheider_irrev.json", &["info", "--model", "wegscheider-irrev", "--format", "json"]);
    golden("info_ross_chain.txt", &["info", "--model", "ross-chain"]);
    golden("info_a_to_b.txt", &["info", "--reactions", "A->B"]);
    golden("graph_wegscheider.dot", &["graph", "--model", "wegscheider"]);
}

#[test]
fn analysis_goldens() {
    golden("db_wegscheider.txt", &["db", "--model", "wegscheider"]);
    golden("db_wegscheider.json", &["db", "--model", "wegscheider", "--format", "json"]);
    golden("acr_envz_ompr.txt", &["acr", "--model", "envz-ompr"]);
    golden("acr_r1.json", &["acr", "--model", "wegscheider-irrev", "--format", "json"]);
    golden("elementary_ops16_count.txt", &["elementary", "--species", "fixtures/ops16.formulas", "--count-only"]);
    golden(
        "decompose_triangle.txt",
        &["decompose", "--reactions", "A -> B, B -> C, C -> A, A -> C", "--overall", "A -> C", "--cycles", "--preprocess"],
    );
}

#[test]
fn simulation_goldens() {
    golden("ode_consecutive.csv", &["ode", "--model", "consecutive", "--t-end", "2", "--samples", "5"]);
    golden("ssa_lv.csv", &["ssa", "--model", "lotka-volterra", "--t-end", "1", "--samples", "5", "--seed", "7"]);
    golden(
        "ssa_lv_ensemble.json",
        &["ssa", "--model", "lotka-volterra", "--t-end", "1", "--samples", "3", "--runs", "8", "--seed", "7", "--format", "json"],
    );
}

#[test]
fn spec_examples() {
    let (_, out, _) = run(&["info", "--model", "wegscheider-irrev", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["deficiency"], 1);
    for key in ["species", "complexes", "N", "L", "S", "linkage_classes", "strong_components", "terminal", "weakly_reversible", "conservation_laws"] {
        assert!(v.get(key).is_some(), "missing key {key}");
    }
    let (_, out, _) = run(&["info", "--reactions", "A->B", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!((v["N"].as_u64(), v["L"].as_u64(), v["S"].as_u64(), v["deficiency"].as_i64()), (Some(2), Some(1), Some(1), Some(0)));
    let (_, out, _) = run(&["db", "--model", "wegscheider"]);
    assert!(out.contains("k[2]*k[3] == k[1]*k[4]"));
    let (_, out, _) = run(&["acr", "--model", "envz-ompr", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["robust_species"].as_array().unwrap().iter().any(|s| s == "Yp"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["info", "--reactions", "A -> "]).0, 2);
    assert_eq!(run(&["info", "--nonsense"]).0, 2);
    assert_eq!(run(&["info", "--file", "does/not/exist"]).0, 2);
    assert_eq!(run(&["db", "--model", "wegscheider-irrev"]).0, 3);
    assert_eq!(run(&["info", "--model", "wegscheider", "--rates", "1,2"]).0, 3);
    assert_eq!(run(&["ode", "--reactions", "A -> 2 A", "--initial", "1", "--t-end", "100", "--max-steps", "10"]).0, 4);
    assert_eq!(run(&["decompose", "--reactions", "A -> B", "--overall", "B -> A"]).0, 5);
    assert_eq!(run(&["graph", "--model", "wegscheider", "--format", "csv"]).0, 2);
}

#[test]
fn byte_identical_across_threads() {
    let args = ["ssa", "--model", "lotka-volterra", "--t-end", "2", "--samples", "5", "--runs", "16", "--method", "tau", "--format", "json"];
    let (_, one, _) = run(&[&["--threads", "1"], &args[..]].concat());
    let (_, four, _) = run(&[&["--threads", "4"], &args[..]].concat());
    assert_eq!(one, four);
}

#[test]
fn plot_data_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ode.dat");
    let p = path.to_str().unwrap();
    let (code, _, _) = run(&["ode", "--model", "consecutive", "--samples", "3", "--emit-plot-data", p]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# t A B C\n"));
    assert_eq!(text.lines().count(), 4);
}
