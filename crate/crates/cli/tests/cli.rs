use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }

    fn error(&self) -> Value {
        serde_json::from_str(self.stderr.trim()).unwrap_or_else(|e| panic!("{e}: {}", self.stderr))
    }
}

fn perverse(dir: &Path, args: &[&str]) -> Run {
    let Output { status, stdout, stderr } = Command::new(env!("CARGO_BIN_EXE_perverse"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap();
    Run {
        code: status.code().unwrap(),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

/// A scratch directory holding every builtin as `NAME.json`.
fn corpus() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let list = perverse(dir.path(), &["builtin", "list", "--json", "-"]);
    assert_eq!(list.code, 0);
    for entry in list.json().as_array().unwrap() {
        let name = entry["name"].as_str().unwrap();
        let file = format!("{name}.json");
        assert_eq!(perverse(dir.path(), &["builtin", "show", name, "-o", &file]).code, 0);
    }
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn free_ranks(report: &Value) -> Vec<u64> {
    let h = report["homology"].as_object().unwrap();
    (0..h.len()).map(|k| h[&k.to_string()]["free_rank"].as_u64().unwrap()).collect()
}

fn torsion_free(report: &Value) -> bool {
    report["homology"]
        .as_object()
        .unwrap()
        .values()
        .all(|g| g["torsion"].as_array().unwrap().is_empty())
}

#[test]
fn validate_reports_strata() {
    let d = corpus();
    let r = perverse(d.path(), &["validate", "pointed-sphere.json", "--json", "-"]);
    assert_eq!(r.code, 0);
    let v = r.json();
    assert_eq!(v["strata"].as_array().unwrap().len(), 2);
    assert_eq!(v["order"], serde_json::json!([["S0.0", "S2.0"]]));
    let text = perverse(d.path(), &["validate", "pointed-sphere.json"]);
    assert!(text.stdout.contains("S0.0") && text.stdout.contains("S2.0"));
}

#[test]
fn validate_errors_map_to_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "low.json",
        r#"{"name":"low","formal_dim":2,"vertices":[{"id":"a","level":1},{"id":"b","level":1}],"simplices":[["a","b"]]}"#,
    );
    let r = perverse(d.path(), &["validate", "low.json"]);
    assert_eq!(r.code, 3);
    assert_eq!(r.error()["error"]["kind"], "EmptyTopLevel");

    write(d.path(), "broken.json", r#"{"name": "#);
    let r = perverse(d.path(), &["validate", "broken.json"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.error()["error"]["code"], 2);

    assert_eq!(perverse(d.path(), &["validate", "missing.json"]).code, 2);
    assert_eq!(perverse(d.path(), &["validate", "builtin:nothing"]).code, 4);
}

#[test]
fn homology_examples() {
    let d = corpus();
    // Cone formula at p(w) = 0 with H(T^2) = (Z, Z^2, Z): degrees below 2 survive.
    let r = perverse(d.path(), &["homology", "cone-torus.json", "-p", "apex0.json", "--ring", "z", "--json", "-"]);
    assert_eq!(r.code, 0);
    assert_eq!(free_ranks(&r.json()), [1, 2, 0, 0]);
    assert!(torsion_free(&r.json()));

    let r = perverse(
        d.path(),
        &["homology", "cone-circle.json", "-p", "apex2.json", "--tame", "--ring", "z", "--json", "-"],
    );
    assert_eq!(free_ranks(&r.json()), [0, 0, 0]);
    assert!(torsion_free(&r.json()));

    let r = perverse(d.path(), &["homology", "pointed-sphere.json", "-p", "pt_neg1.json", "--ring", "z", "--json", "-"]);
    assert_eq!(free_ranks(&r.json()), [1, 0, 0]);
}

#[test]
fn homology_semantic_errors() {
    let d = corpus();
    write(d.path(), "codim2.json", r#"{"kind":"classical","by_codim":{"2":0}}"#);
    let r = perverse(d.path(), &["homology", "susp-torus.json", "-p", "codim2.json"]);
    assert_eq!(r.code, 4);
    assert_eq!(r.error()["error"]["kind"], "MissingCodim");

    write(d.path(), "ghost.json", r#"{"kind":"general","values":{"S7.3":1}}"#);
    let r = perverse(d.path(), &["homology", "pointed-sphere.json", "-p", "ghost.json"]);
    assert_eq!(r.code, 4);
    assert_eq!(r.error()["error"]["kind"], "UnknownStratum");

    let r = perverse(d.path(), &["homology", "circle3.json", "--ring", "f4"]);
    assert_eq!(r.code, 4);
    assert_eq!(r.error()["error"]["kind"], "NotPrime");

    assert_eq!(perverse(d.path(), &["homology"]).code, 2);
}

#[test]
fn homology_relative_and_reduced() {
    let d = corpus();
    let r = perverse(d.path(), &["homology", "circle3.json", "--reduced", "--json", "-"]);
    assert_eq!(free_ranks(&r.json()), [0, 1]);
    // The pole of the pointed sphere as a subcomplex: (S^2, pt) has H = (0, 0, Z); the mapping cone adds a zero degree 3.
    write(
        d.path(),
        "pole.json",
        r#"{"name":"pole","formal_dim":0,"vertices":[{"id":"n","level":0}],"simplices":[["n"]]}"#,
    );
    let r = perverse(d.path(), &["homology", "pointed-sphere.json", "-p", "apex2.json", "--relative", "pole.json", "--json", "-"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(free_ranks(&r.json()), [0, 0, 1, 0]);
}

#[test]
fn constructors_write_valid_files() {
    let d = corpus();
    let r = perverse(d.path(), &["cone", "circle3.json", "-o", "cc.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = perverse(d.path(), &["validate", "cc.json", "--json", "-"]).json();
    let apex = v["strata"].as_array().unwrap().iter().find(|s| s["regular"] == false).unwrap();
    assert_eq!(apex["level"], 0);

    assert_eq!(perverse(d.path(), &["sd", "pointed-sphere.json", "-o", "sd1.json"]).code, 0);
    for p in ["pt_neg1.json", "apex1.json"] {
        let a = perverse(d.path(), &["homology", "pointed-sphere.json", "-p", p, "--json", "-"]).json();
        let b = perverse(d.path(), &["homology", "sd1.json", "-p", p, "--json", "-"]).json();
        assert_eq!(a["homology"], b["homology"]);
    }

    assert_eq!(perverse(d.path(), &["prod-s1", "pointed-sphere.json", "--m", "3", "-o", "s1xs2.json"]).code, 0);
    let v = perverse(d.path(), &["validate", "s1xs2.json", "--json", "-"]).json();
    assert_eq!(v["formal_dim"], 3);
    assert_eq!(v["pseudomanifold"], true);

    assert_eq!(perverse(d.path(), &["prod-s1", "circle3.json", "--m", "2"]).code, 3);
    assert_eq!(perverse(d.path(), &["prod-i", "circle3.json", "-o", "cyl.json"]).code, 0);
    assert_eq!(perverse(d.path(), &["suspend", "circle3.json", "-o", "s2.json"]).code, 0);
    let s2 = perverse(d.path(), &["homology", "s2.json", "-p", "builtin:apex0", "--json", "-"]);
    assert_eq!(s2.code, 4, "two apex strata need two values");
    assert_eq!(perverse(d.path(), &["union", "circle3.json", "pointed-circle.json", "-o", "u.json"]).code, 0);
    let u = perverse(d.path(), &["homology", "u.json", "-p", "builtin:apex0", "--json", "-"]);
    assert_eq!(free_ranks(&u.json()), [2, 2]);
    assert_eq!(perverse(d.path(), &["union", "circle3.json", "torus.json"]).code, 3);
}

#[test]
fn check_examples() {
    let d = corpus();
    let r = perverse(d.path(), &["check", "susp-torus.json", "-p", "gm-middle.json", "--class", "gm", "--json", "-"]);
    assert_eq!(r.json()["pass"], true);

    let r = perverse(
        d.path(),
        &["check", "pointed-sphere.json", "-p", "pt_neg1.json", "--class", "k", "--equiv", "pt-reg.json", "--json", "-"],
    );
    let v = r.json();
    assert_eq!(v["pass"], false);
    let conditions = v["conditions"].as_object().unwrap();
    let failed: Vec<&String> = conditions.iter().filter(|(_, c)| c["pass"] == false).map(|(k, _)| k).collect();
    assert_eq!(failed.len(), 1);
    assert!(failed[0].starts_with("(ii)"));

    let r = perverse(d.path(), &["check", "susp-torus.json", "-p", "jump2.json", "--class", "king", "--json", "-"]);
    let v = r.json();
    assert_eq!(v["pass"], false);
    assert!(v["failures"][0].as_str().unwrap().contains("growth"));
}

fn verdicts(report: &Value) -> Vec<String> {
    report["sections"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|s| s["verdicts"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn invariance_examples() {
    let d = corpus();
    let r = perverse(d.path(), &["invariance", "pointed-sphere.json", "trivial-sphere.json", "--json", "-"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(verdicts(&r.json()).iter().all(|v| v == "match"));

    let r = perverse(
        d.path(),
        &["invariance", "pointed-sphere.json", "trivial-sphere.json", "--fine-perversity", "pt_neg1.json", "--json", "-"],
    );
    let v = verdicts(&r.json());
    assert!(v.contains(&"no-claim (mismatch consistent)".to_string()));
    assert!(!v.contains(&"match".to_string()));

    let r = perverse(
        d.path(),
        &[
            "invariance",
            "susp-torus-sd-pt.json",
            "susp-torus-sd.json",
            "-p",
            "gm-middle.json",
            "--tame",
            "--ring",
            "z",
            "--ring",
            "q",
            "--ring",
            "f2",
            "--json",
            "-",
        ],
    );
    let report = r.json();
    assert_eq!(report["sections"].as_array().unwrap().len(), 3);
    assert!(verdicts(&report).iter().all(|v| v == "match"));
    assert_eq!(report["transcript"]["tame_hypotheses"], true);

    let r = perverse(d.path(), &["invariance", "torus.json", "circle3.json"]);
    assert_eq!(r.code, 3);
}

#[test]
fn diagnose_examples() {
    let d = corpus();
    let r = perverse(d.path(), &["diagnose", "cone-circle.json", "-p", "apex1.json", "--funest", "--json", "-"]);
    let v = r.json();
    let edge = v["funest"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f["simplex"] == serde_json::json!(["a", "w"]))
        .expect("edge {w,a} is listed");
    assert_eq!(edge["funest_face"], serde_json::json!(["w"]));
    assert_eq!(edge["defect"], 2);
    assert!(v.get("defects").is_none());

    let r = perverse(d.path(), &["diagnose", "pointed-sphere.json", "-p", "apex1.json", "--grandes-strates", "--json", "-"]);
    assert_eq!(r.json()["grandes_strates"]["strata"], serde_json::json!(["S0.0"]));

    for name in ["pointed-sphere", "cone-torus", "susp-torus", "pinched-torus"] {
        let top = perverse(d.path(), &["validate", &format!("{name}.json"), "--json", "-"]).json();
        let values: serde_json::Map<String, Value> = top["strata"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|s| s["regular"] == false)
            .map(|s| (s["id"].as_str().unwrap().to_string(), Value::from(s["codim"].as_i64().unwrap() - 2)))
            .collect();
        let file = format!("{name}-top.json");
        write(d.path(), &file, &serde_json::json!({"kind": "general", "values": values}).to_string());
        let r = perverse(d.path(), &["diagnose", &format!("{name}.json"), "-p", &file, "--grandes-strates", "--json", "-"]);
        assert_eq!(r.json()["grandes_strates"]["strata"], serde_json::json!([]), "{name}");
    }
}

#[test]
fn reports_are_deterministic() {
    let d = corpus();
    let args = |out: &str| {
        vec![
            "invariance".to_string(),
            "susp-torus-sd-pt.json".into(),
            "susp-torus-sd.json".into(),
            "-p".into(),
            "gm-middle.json".into(),
            "--ring".into(),
            "z".into(),
            "--ring".into(),
            "f3".into(),
            "--json".into(),
            out.into(),
        ]
    };
    let run = |out: &str| {
        let a = args(out);
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        perverse(d.path(), &a)
    };
    let (r1, r2) = (run("a.json"), run("b.json"));
    assert_eq!(r1.stdout, r2.stdout);
    let a = std::fs::read(d.path().join("a.json")).unwrap();
    let b = std::fs::read(d.path().join("b.json")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn builtins_round_trip_through_the_cli() {
    let d = corpus();
    let list = perverse(d.path(), &["builtin", "list", "--json", "-"]).json();
    for entry in list.as_array().unwrap().iter().filter(|e| e["kind"] == "complex") {
        let name = entry["name"].as_str().unwrap();
        let file = format!("{name}.json");
        let before = perverse(d.path(), &["validate", &file, "--json", "-"]);
        assert_eq!(before.code, 0, "{name}");
        let copy = perverse(d.path(), &["validate", &format!("builtin:{name}"), "--json", "-"]);
        assert_eq!(before.stdout, copy.stdout, "{name}");
    }
}
