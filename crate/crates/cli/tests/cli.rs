//! End-to-end runs of the binary against the fixture specs, pinning exit
//! codes about the interface contract: 0 ok, 2 parse, 3 cap, 4 unsupported
//! structure.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invmono"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_report(out: &Output) -> serde_json::Value {
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert!(v["input_sha256"].as_str().unwrap().len() == 64);
    v
}

#[test]
fn check_i3() {
    let out = run(&["check", "--input", fixture("i3.json").to_str().unwrap()]);
    assert!(out.status.success());
    let v = json_report(&out);
    assert_eq!(v["report"]["size"], 34);
    assert_eq!(v["report"]["idempotents"], 8);
    assert_eq!(v["report"]["atoms"], 3);
    for flag in ["inverse", "distributive", "boolean", "condition_h"] {
        assert_eq!(v["report"]["flags"][flag], true, "{flag}");
    }
}

#[test]
fn malformed_spec_exits_2() {
    let out = run(&["check", "--input", fixture("malformed.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let missing = run(&["check", "--input", "/nonexistent/file.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn cap_exceeded_exits_3() {
    let out = run(&[
        "check",
        "--input",
        fixture("i3.json").to_str().unwrap(),
        "--cap-elements",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn traces_on_non_principal_exits_4_with_witness() {
    let out = run(&["traces", "--input", fixture("z2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let v = json_report(&out);
    assert_eq!(v["report"]["error"], "not_principal");
    assert!(v["report"]["witness"].is_number());
}

#[test]
fn traces_on_i3_match_mean_column() {
    let out = run(&["traces", "--input", fixture("i3.json").to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_report(&out);
    let tau = v["report"]["trace"]["tau_of"].as_object().unwrap();
    let mu = v["report"]["mu_of_e_s"].as_object().unwrap();
    assert_eq!(tau.len(), 34);
    for (k, t) in tau {
        assert_eq!(Some(t), mu.get(k), "element {k}");
    }
    assert_eq!(v["report"]["positivity"]["all_nonnegative"], true);
    assert_eq!(v["report"]["positivity"]["zero_forces_zero"], true);
}

#[test]
fn means_output_is_deterministic() {
    let a = run(&["means", "--input", fixture("i3.json").to_str().unwrap()]);
    let b = run(&["means", "--input", fixture("i3.json").to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json_report(&a);
    assert_eq!(v["report"]["vertices"][0][0], "1/3");
    assert_eq!(v["report"]["dimension"], 0);
}

#[test]
fn groupoid_of_i3_is_the_full_relation() {
    let out = run(&["groupoid", "--input", fixture("i3.json").to_str().unwrap()]);
    assert!(out.status.success());
    let v = json_report(&out);
    assert_eq!(v["report"]["groupoid"]["units"], 3);
    assert_eq!(v["report"]["groupoid"]["arrows"].as_array().unwrap().len(), 9);
    assert_eq!(v["report"]["principal"], true);
    assert_eq!(v["report"]["minimal"], true);
    assert_eq!(v["report"]["predicates"]["hausdorff"], true);
}

#[test]
fn af_fibonacci_dims() {
    let out = run(&[
        "af",
        "--input",
        fixture("fibonacci.json").to_str().unwrap(),
        "--depth",
        "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_report(&out);
    assert_eq!(v["report"]["dims"][3][0], 3);
    assert_eq!(v["report"]["dims"][3][1], 2);
    assert_eq!(v["report"]["coherent_unique"], false);
    let levels = v["report"]["levels"].as_array().unwrap();
    assert!(levels.iter().all(|l| l["polytope_vertices"] == 2));
    assert!(levels.iter().all(|l| l["block_dims_checked"] == true));
}

#[test]
fn odometer_depth_2() {
    let out = run(&["odometer", "2"]);
    assert!(out.status.success());
    let v = json_report(&out);
    assert_eq!(v["report"]["unique"], true);
    assert_eq!(v["report"]["single_atom_orbit"], true);
    assert_eq!(v["report"]["cylinder_values_match"], true);
    assert_eq!(v["report"]["cylinder_means"][2]["value"], "1/4");
}

#[test]
fn table_format_renders() {
    let out = run(&[
        "check",
        "--input",
        fixture("i3.json").to_str().unwrap(),
        "--format",
        "table",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("size: 34"));
    assert!(text.contains("condition (H): true"));
}
