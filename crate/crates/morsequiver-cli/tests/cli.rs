use std::process::{Command, Output};

use serde_json::{json, Value};

fn morsequiver(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morsequiver"))
        .args(args)
        .env("MORSEQUIVER_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn standard_torus_is_perfect() {
    let v = json_of(&morsequiver(&["analyze", "fixture:torus_standard"]));
    assert_eq!(v["schema"], 1);
    assert_eq!(v["inequalities"]["descending"]["exact"], true);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn degenerate_torus_remainder() {
    let v = json_of(&morsequiver(&["analyze", "fixture:torus_degenerate"]));
    assert_eq!(v["inequalities"]["descending"]["remainder"], json!([0, 1]));
    assert_eq!(v["critical_components"][1]["kind"], "Degenerate(2)");
    assert_eq!(v["critical_components"][1]["value"], "2");
}

#[test]
fn genus_two_remainder_over_both_fields() {
    for field in ["f2", "q"] {
        let v = json_of(&morsequiver(&["analyze", "fixture:genus2", "--field", field]));
        assert_eq!(v["inequalities"]["descending"]["remainder"], json!([1, 1]), "{field}");
        assert_eq!(v["field"], field);
    }
}

#[test]
fn bott_quiver_dot() {
    let dot = stdout(&morsequiver(&["quiver", "fixture:torus_bott"]));
    assert_eq!(dot.matches("[label=").count(), 2);
    assert_eq!(dot.matches("  n1 -> n0;").count(), 2);
    assert!(dot.contains("label=\"C0@0\""));
}

#[test]
fn sphere_refined_quiver_is_a_chain() {
    let dot = stdout(&morsequiver(&["quiver", "fixture:sphere", "--refined"]));
    assert_eq!(dot.matches("[label=").count(), 4);
    let edges: Vec<&str> = dot.lines().filter(|l| l.contains("->")).collect();
    assert_eq!(edges.len(), 3);
    let mut out_deg = [0; 4];
    let mut in_deg = [0; 4];
    for e in edges {
        let ends: Vec<usize> = e
            .trim()
            .trim_end_matches(';')
            .split(" -> ")
            .map(|n| n.trim_start_matches('n').parse().unwrap())
            .collect();
        out_deg[ends[0]] += 1;
        in_deg[ends[1]] += 1;
    }
    assert!(out_deg.iter().all(|&d| d <= 1) && in_deg.iter().all(|&d| d <= 1));
}

#[test]
fn degenerate_torus_quiver_has_five_nodes() {
    let dot = stdout(&morsequiver(&["quiver", "fixture:torus_degenerate"]));
    assert_eq!(dot.matches("[label=").count(), 5);
}

#[test]
fn gamma_fixture_dot() {
    let dot = stdout(&morsequiver(&["quiver", "fixture:gamma1"]));
    assert_eq!(dot.matches("[label=").count(), 5);
    assert_eq!(dot.matches("->").count(), 11);
}

#[test]
fn spectral_examples() {
    let v = json_of(&morsequiver(&["spectral", "fixture:torus_degenerate", "--levelling", "morse"]));
    let morse = &v["spectral"][1];
    assert_eq!(morse["levelling"], "morse");
    assert_eq!(morse["page_count"], 2);
    assert_eq!(morse["pages"][0]["d_rank"], 1);
    assert_eq!(morse["pages"][0]["total_dims"], json!([1, 3, 2]));
    assert_eq!(morse["pages"][1]["total_dims"], json!([1, 2, 1]));
    assert_eq!(morse["abuts"], true);

    let v = json_of(&morsequiver(&["spectral", "fixture:torus_standard", "--levelling", "index"]));
    let index = &v["spectral"][1];
    assert_eq!(index["pages"][0]["total_dims"], json!([1, 2, 1]));
    assert!(index["pages"].as_array().unwrap().iter().all(|p| p["d_rank"] == 0));

    let v = json_of(&morsequiver(&["spectral", "fixture:torus_bott"]));
    for run in v["spectral"].as_array().unwrap() {
        assert!(run["pages"].as_array().unwrap().iter().all(|p| p["d_rank"] == 0));
    }

    let v = json_of(&morsequiver(&["spectral", "fixture:torus_degenerate", "--pages", "1"]));
    assert_eq!(v["spectral"][1]["pages"].as_array().unwrap().len(), 1);
}

#[test]
fn reports_are_deterministic() {
    let a = stdout(&morsequiver(&["analyze", "fixture:torus_degenerate"]));
    let b = stdout(&morsequiver(&["analyze", "fixture:torus_degenerate"]));
    assert_eq!(a, b);
}

#[test]
fn export_round_trip_reproduces_the_report() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["sphere", "torus_degenerate", "torus_bott", "saddle_chart"] {
        let path = dir.path().join(format!("{name}.mesh"));
        let p = path.to_str().unwrap();
        let exported = morsequiver(&["export", &format!("fixture:{name}"), "--out", p]);
        assert!(exported.status.success());
        let direct = stdout(&morsequiver(&["analyze", &format!("fixture:{name}")]));
        let reloaded = stdout(&morsequiver(&["analyze", p]));
        assert_eq!(direct, reloaded, "{name}");
    }
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = morsequiver(&["analyze", "fixture:sphere", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["betti"], json!([1, 0, 1]));
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 1);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mesh");
    std::fs::write(&bad, "MORSEMESH 1\nvertices\nv 0 zero\n").unwrap();
    let out = morsequiver(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    assert_eq!(morsequiver(&["analyze", "fixture:missing"]).status.code(), Some(2));

    // Two triangles sharing only a vertex: the link of vertex 0 is two arcs.
    let pinched = dir.path().join("pinched.mesh");
    std::fs::write(
        &pinched,
        "MORSEMESH 1\nvertices\nv 0 0\nv 1 1\nv 2 2\nv 3 3\nv 4 4\nsimplices\ns 0 1 2\ns 0 3 4\n",
    )
    .unwrap();
    assert_eq!(morsequiver(&["analyze", pinched.to_str().unwrap()]).status.code(), Some(4));

    let table = dir.path().join("levelling.json");
    std::fs::write(&table, r#"{"name": "flat", "values": [["1"], ["0"], ["0"], ["0"], ["0"]]}"#).unwrap();
    let arg = format!("file:{}", table.display());
    let out = morsequiver(&["spectral", "fixture:torus_degenerate", "--levelling", &arg]);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(ii)"));
}
