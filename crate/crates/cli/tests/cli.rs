use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn burneq(args: &[&str]) -> Output {
    let args: Vec<String> = args
        .iter()
        .map(|a| match a.strip_prefix('@') {
            Some(name) => fixture(name),
            None => a.to_string(),
        })
        .collect();
    Command::new(env!("CARGO_BIN_EXE_burneq"))
        .args(&args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = burneq(args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    stdout(&o)
}

#[test]
fn s3_product_of_reflection_and_rotation_cosets() {
    let out = ok(&["mul", "-g", "@s3.json", "-a", "[G/(1 2)]", "-b", "[G/(1 2 3)]"]);
    assert_eq!(out, "1*[G/e]\n");
}

#[test]
fn whole_group_is_the_unit() {
    for a in ["[G/e]", "[G/(1 2)]", "2*[G/(1 2 3)] - [G/e]", "0"] {
        let out = ok(&["mul", "-g", "@s3.json", "-a", a, "-b", "[G/G]"]);
        let same = ok(&["mul", "-g", "@s3.json", "-a", a, "-b", "[G/G]"]);
        let direct = ok(&["mul", "-g", "@s3.json", "-a", "[G/G]", "-b", a]);
        assert_eq!(out, same);
        assert_eq!(out, direct);
    }
    let out = ok(&["mul", "-g", "@s3.json", "-a", "[G/(1 2)]", "-b", "[G/G]"]);
    assert_eq!(out, "1*[G/(1 2)]\n");
}

#[test]
fn mul_json_output() {
    let out = ok(&[
        "mul", "-g", "@z2.json", "-a", "[G/e]", "-b", "[G/e]", "--format", "json",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["text"], "2*[G/e]");
    assert_eq!(v["coeffs"], serde_json::json!([2, 0]));
}

#[test]
fn marks_table_golden() {
    let out = ok(&["marks", "-g", "@s3.json"]);
    assert_eq!(
        out,
        ",e,(1 2),(1 2 3),G\n\
         e,6,0,0,0\n\
         (1 2),3,1,0,0\n\
         (1 2 3),2,0,2,0\n\
         G,1,1,1,1\n"
    );
}

#[test]
fn group_summary_golden() {
    let out = ok(&["group", "-g", "@s3.json", "-r", "@s3_perm.json"]);
    let expected_head = "order: 6\n\
subgroup classes:\n\
\x20  0  [G/e]  order 1  conjugates 1  Weyl order 6\n\
\x20  1  [G/(1 2)]  order 2  conjugates 3  Weyl order 1\n\
\x20  2  [G/(1 2 3)]  order 3  conjugates 1  Weyl order 2\n\
\x20  3  [G/G]  order 6  conjugates 1  Weyl order 1\n";
    assert!(out.starts_with(expected_head), "{out}");
    assert!(out.contains("  ((1 2 3))  dim V^H 1  empty  witness -\n"));
    assert!(out.contains("  (G)  dim V^H 1  occupied  witness (1, 1, 1)\n"));
}

#[test]
fn degree_of_a_single_linear_piece() {
    let out = ok(&["degree", "-g", "@z2.json", "-r", "@z2_sign.json", "-m", "@z2_map.json"]);
    assert_eq!(
        out,
        "degree: 1*[G/e]\n  piece 0: orbit G·(1) of size 2, type (e), index 1\n"
    );
}

#[test]
fn degree_of_a_union_and_json_form() {
    let out = ok(&[
        "degree", "-g", "@z2.json", "-r", "@z2_sign.json",
        "-m", "@z2_map.json", "-m", "@z2_origin.json", "--format", "json",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["degree"]["text"], "1*[G/e] + 1*[G/G]");
    assert_eq!(v["per_orbit"].as_array().unwrap().len(), 2);
    assert_eq!(v["per_orbit"][1]["class"], "G");
    assert_eq!(v["per_orbit"][1]["index"], 1);
}

#[test]
fn overlapping_maps_are_rejected() {
    let o = burneq(&[
        "degree", "-g", "@z2.json", "-r", "@z2_sign.json",
        "-m", "@z2_map.json", "-m", "@z2_map.json",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn z2_product_formula_holds() {
    let o = burneq(&[
        "product", "-g", "@z2.json",
        "-r1", "@z2_sign.json", "-r2", "@z2_sign.json",
        "-m1", "@z2_map.json", "-m2", "@z2_map.json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("deg(f x f')  = 2*[G/e]\n"), "{out}");
    assert!(out.contains("deg f*deg f' = 2*[G/e]\n"), "{out}");
    assert!(out.ends_with("equal: true\n"));
}

#[test]
fn product_accepts_repeated_flags_and_json() {
    let out = ok(&[
        "product", "-g", "@z2.json", "-r", "@z2_sign.json", "-r", "@z2_sign.json",
        "-m", "@z2_map.json", "-m", "@z2_origin.json", "--format", "json",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["equal"], true);
    assert_eq!(v["deg_product"], v["product_of_degrees"]);
    assert_eq!(v["deg_product"]["text"], "1*[G/e]");
}

#[test]
fn product_needs_two_maps() {
    let o = burneq(&["product", "-g", "@z2.json", "-r", "@z2_sign.json", "-m", "@z2_map.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn infeasible_realization_exits_2_with_reason() {
    let o = burneq(&["realize", "-g", "@z2.json", "-r", "@z2_sign.json", "-e", "-[G/G]"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert_eq!(err["error"], "infeasible_coefficient");
    assert!(err["message"].as_str().unwrap().contains("[G/G]"));

    let o = burneq(&["realize", "-g", "@s3.json", "-r", "@s3_perm.json", "-e", "[G/(1 2 3)]"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert_eq!(err["error"], "infeasible_coefficient");
    assert!(err["message"].as_str().unwrap().contains("stratum is empty"));
}

#[test]
fn realize_then_degree_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let target = "3*[G/e] - 2*[G/(1 2)] + [G/G]";
    let out_path = dir.path().join("map.json");
    let out = out_path.display().to_string();
    ok(&["realize", "-g", "@s3.json", "-r", "@s3_perm.json", "-e", target, "-o", &out]);
    let degree = ok(&["degree", "-g", "@s3.json", "-r", "@s3_perm.json", "-m", &out]);
    let first = degree.lines().next().unwrap();
    assert_eq!(first, "degree: 3*[G/e] - 2*[G/(1 2)] + 1*[G/G]");
}

#[test]
fn outputs_are_deterministic() {
    let runs = [
        vec!["realize", "-g", "@s3.json", "-r", "@s3_perm.json", "-e", "2*[G/e] + [G/(1 2)]"],
        vec!["group", "-g", "@s3.json", "-r", "@s3_perm.json", "--format", "json"],
        vec!["check", "-g", "@s3.json", "-r", "@s3_perm.json", "--seed", "7", "--trials", "5"],
    ];
    for args in &runs {
        assert_eq!(ok(args), ok(args), "{args:?}");
    }
}

#[test]
fn check_reports_every_invariant() {
    let out = ok(&["check", "-g", "@s3.json", "-r", "@s3_perm.json", "--trials", "5"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l.contains(": ok (")), "{out}");
    assert!(lines[0].starts_with("marks vs orbit oracle: ok (16 class pairs"));
}

#[test]
fn order_cap_is_enforced() {
    let o = Command::new(env!("CARGO_BIN_EXE_burneq"))
        .args(["marks", "-g", &fixture("s3.json")])
        .env("BURNEQ_ORDER_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_input_exits_1() {
    let o = burneq(&["mul", "-g", "@s3.json", "-a", "[G/(1 2 3 4)]", "-b", "[G/G]"]);
    assert_eq!(o.status.code(), Some(1));
    let o = burneq(&["marks", "-g", "@missing.json"]);
    assert_eq!(o.status.code(), Some(1));
    let o = burneq(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
}
