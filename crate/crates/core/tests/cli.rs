use std::process::{Command, Output};

use serde_json::Value;

fn pmbox(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmbox"))
        .args(args)
        .env("PMBOX_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = pmbox(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    assert!(!out.stderr.is_empty(), "summary goes to stderr");
    let v: Value = serde_json::from_slice(&out.stdout).expect("one JSON report");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["argv"].as_array().unwrap().len(), args.len() + 1);
    v
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("pmbox-cli-{}-{name}", std::process::id()))
}

#[test]
fn vertices() {
    let r = report(&["vertices", "--d", "2", "--nx", "3", "--nb", "4"]);
    assert_eq!(r["results"]["strategies"], 128);
    assert_eq!(r["results"]["vertices"], 40);
    let path = tmp("v.json");
    let r = report(&["vertices", "--nx", "3", "--nb", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(r["results"]["polytope_dimension"], 6);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(file["vertices"].as_array().unwrap().len(), 21);
    let _ = std::fs::remove_file(path);
}

#[test]
fn invalid_input_exits_with_two() {
    let out = pmbox(&["vertices", "--d", "2", "--nx", "2", "--nb", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nX must exceed d"));
    assert!(out.stdout.is_empty());
    assert_eq!(pmbox(&["bound", "--builtin", "S42"]).status.code(), Some(2));
    assert_eq!(pmbox(&["eval", "--protocol", "no-such-protocol"]).status.code(), Some(2));
}

#[test]
fn guard_refusal_exits_with_three() {
    let out = pmbox(&["facets", "--nx", "6", "--nb", "6"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bounds() {
    for (name, want) in [("S1", "1"), ("T45-8", "4"), ("SD(2,3,3)", "2")] {
        let r = report(&["bound", "--builtin", name]);
        assert_eq!(r["results"]["bound"], want, "{name}");
        assert_eq!(r["results"]["matches_stated"], true);
    }
}

#[test]
fn facets_small_scenarios() {
    let path = tmp("f.jsonl");
    let r = report(&["facets", "--nx", "3", "--nb", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(r["results"]["new_classes"], serde_json::json!(["S1"]));
    let lines = std::fs::read_to_string(&path).unwrap();
    for line in lines.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert!(v["coeffs"].is_array() && v["bound"].is_i64() && v["orbit_size"].is_u64());
    }
    let _ = std::fs::remove_file(path);
    let r = report(&["facets", "--nx", "4", "--nb", "4"]);
    let mut new: Vec<String> = serde_json::from_value(r["results"]["new_classes"].clone()).unwrap();
    new.sort();
    assert_eq!(new, vec!["S2", "S3"]);
}

#[test]
fn verify_facet_family() {
    let r = report(&["verify-facet", "--builtin", "Sn", "--n", "6"]);
    assert_eq!(r["results"]["report"]["is_facet"], true);
    assert_eq!(r["results"]["report"]["saturating_count"], 246);
    assert_eq!(r["results"]["expected_saturating"], 246);
    let r = report(&["verify-facet", "--builtin", "Sn", "--n", "3", "--bound", "0.9"]);
    assert_eq!(r["results"]["report"]["is_valid"], false);
}

#[test]
fn eval_and_export_round_trip() {
    let r = report(&["eval", "--protocol", "S1-qubit"]);
    let want = (9.0 + 2.0 * 3f64.sqrt()) / 12.0;
    assert!((r["results"]["score"]["value"].as_f64().unwrap() - want).abs() < 1e-12);
    assert_eq!(r["results"]["score"]["within_target"], true);

    let path = tmp("p.json");
    let r = report(&["eval", "--protocol", "S1-trine-qc", "--export", path.to_str().unwrap()]);
    let direct = r["results"]["score"]["value"].as_f64().unwrap();
    let r = report(&["eval", "--protocol", path.to_str().unwrap(), "--inequality", "S1"]);
    assert!((r["results"]["score"]["value"].as_f64().unwrap() - direct).abs() < 1e-12);
    let _ = std::fs::remove_file(path);
}

#[test]
fn noise_thresholds() {
    let r = report(&["noise", "--protocol", "S2-chsh", "--kind", "depolarizing"]);
    let v = r["results"]["visibility"]["value"].as_f64().unwrap();
    assert!((v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    let r = report(&["noise", "--protocol", "S2-chsh", "--kind", "dephasing"]);
    let v = r["results"]["visibility"]["value"].as_f64().unwrap();
    assert!((v - (2f64.sqrt() - 1.0)).abs() < 1e-6);
    let r = report(&["noise", "--protocol", "S1-qubit", "--kind", "depolarizing"]);
    assert_eq!(r["results"]["monotone"], true);
}

#[test]
fn info_bound() {
    let r = report(&["info", "--n", "3"]);
    assert_eq!(r["results"]["bound"], 1.125);
    assert_eq!(r["results"]["achieved"]["within_target"], true);
    let r = report(&["info", "--n", "4", "--check-random", "2000", "--seed", "7"]);
    assert_eq!(r["results"]["random_check"]["violations"], 0);
    assert_eq!(r["seed"], 7);
}

#[test]
fn seeded_seesaw_is_reproducible() {
    let args = ["seesaw", "--inequality", "S2", "--fixed-state", "phi+", "--restarts", "4", "--seed", "3"];
    let a = report(&args);
    let b = report(&args);
    assert_eq!(a["results"], b["results"]);
    assert_eq!(a["results"]["best"]["within_target"], true);
    assert_eq!(a["inputs"]["fixed_state"], "phi+");
    assert_eq!(a["seed"], 3);
}
