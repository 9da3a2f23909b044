use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hodge-fischer"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const SYMMETRIC: &str = r#"{"m": 3, "terms": [
    {"alpha": [1, 0, 0], "I": [2], "coeff": "1"},
    {"alpha": [0, 1, 0], "I": [1], "coeff": "1"}]}"#;

#[test]
fn dims_table() {
    let o = run(&["dims", "--m", "3", "--kmax", "1", "--json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    let row = |s: u64, k: u64| rows.iter().find(|r| r["s"] == s && r["k"] == k).unwrap();
    let r = row(1, 1);
    assert_eq!((r["h"].as_u64(), r["u"].as_u64(), r["v"].as_u64(), r["ker"].as_u64()), (Some(5), Some(1), Some(3), Some(9)));
    assert_eq!(row(0, 1)["h"], 0);
    assert!(rows.iter().all(|r| r["balanced"] == true));

    let o = run(&["dims", "--m", "1", "--kmax", "0", "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["h"] == 1));

    let o = run(&["dims", "--m", "3", "--kmax", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with("ok")));
    assert_eq!(run(&["dims", "--m", "0", "--kmax", "1"]).status.code(), Some(3));
}

#[test]
fn decompose_fischer() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "p.json", SYMMETRIC);
    let out = dir.path().join("c.json");
    let o = run(&["decompose", "--mode", "fischer", "--in", &input, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("reconstruction: exact"));
    let v = read_json(&out);
    let blocks = v["blocks"].as_array().unwrap();
    assert!(blocks.iter().any(|b| b["s"] == 1 && b["k"] == 1 && b["word"] == ""));
}

#[test]
fn decompose_modes_and_zero() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "z.json", r#"{"m": 2, "terms": []}"#);
    let out = dir.path().join("z_out.json");
    let o = run(&["decompose", "--mode", "fischer", "--in", &zero, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(read_json(&out)["blocks"].as_array().unwrap().len(), 0);

    let r2 = write(
        dir.path(),
        "r2.json",
        r#"{"m": 2, "terms": [{"alpha": [2, 0], "I": [], "coeff": "1"}, {"alpha": [0, 2], "I": [1], "coeff": "3/2"}]}"#,
    );
    for mode in ["harmonic", "monogenic"] {
        let out = dir.path().join(format!("{mode}.json"));
        let o = run(&["decompose", "--mode", mode, "--in", &r2, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{mode}");
        assert!(stdout(&o).contains("reconstruction: exact"));
        assert!(!read_json(&out)["layers"].as_array().unwrap().is_empty());
    }
}

#[test]
fn decompose_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad_index = write(dir.path(), "a.json", r#"{"m": 3, "terms": [{"alpha": [0,0,0], "I": [2,1], "coeff": "1"}]}"#);
    assert_eq!(run(&["decompose", "--mode", "fischer", "--in", &bad_index]).status.code(), Some(2));
    let broken = write(dir.path(), "b.json", r#"{"m": 3, "terms": [ "#);
    let o = run(&["decompose", "--mode", "fischer", "--in", &broken]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
    let decimal = write(dir.path(), "c.json", r#"{"m": 1, "terms": [{"alpha": [1], "I": [], "coeff": "0.5"}]}"#);
    assert_eq!(run(&["decompose", "--mode", "fischer", "--in", &decimal]).status.code(), Some(2));
    let short = write(dir.path(), "d.json", r#"{"m": 3, "terms": [{"alpha": [1,0], "I": [], "coeff": "1"}]}"#);
    assert_eq!(run(&["decompose", "--mode", "fischer", "--in", &short]).status.code(), Some(3));
    let wide = write(dir.path(), "e.json", r#"{"m": 2, "terms": [{"alpha": [1,0], "I": [3], "coeff": "1"}]}"#);
    assert_eq!(run(&["decompose", "--mode", "fischer", "--in", &wide]).status.code(), Some(3));
}

#[test]
fn project_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.json", SYMMETRIC);
    let out = dir.path().join("h_out.json");
    let o = run(&["project", "--in", &h, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v = read_json(&out);
    assert_eq!(v["blocks"]["h"]["terms"].as_array().unwrap().len(), 2);
    for b in ["u", "v", "w"] {
        assert!(v["blocks"][b]["terms"].as_array().unwrap().is_empty());
    }

    // x applied to the constant 1 is -(x1 dx1 + x2 dx2 + x3 dx3)
    let u = write(
        dir.path(),
        "u.json",
        r#"{"m": 3, "terms": [
            {"alpha": [1,0,0], "I": [1], "coeff": "-1"},
            {"alpha": [0,1,0], "I": [2], "coeff": "-1"},
            {"alpha": [0,0,1], "I": [3], "coeff": "-1"}]}"#,
    );
    let out = dir.path().join("u_out.json");
    assert!(run(&["project", "--in", &u, "--out", out.to_str().unwrap()]).status.success());
    let v = read_json(&out);
    assert_eq!(v["blocks"]["u"]["terms"].as_array().unwrap().len(), 3);
    assert!(v["blocks"]["h"]["terms"].as_array().unwrap().is_empty());
    assert_eq!(v["certificates"]["u_source"]["terms"][0]["coeff"], "1");

    let not_harmonic = write(dir.path(), "n.json", r#"{"m": 3, "terms": [{"alpha": [2,0,0], "I": [1], "coeff": "1"}]}"#);
    let o = run(&["project", "--in", &not_harmonic]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2 dx1"));
}

#[test]
fn verify_defaults_and_fault() {
    let o = run(&["verify"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("all 8 suites passed"));

    let o = run(&["verify", "--kmax", "0"]);
    assert!(o.status.success());

    let o = run(&["verify", "--inject-fault", "dstar-sign"]);
    assert_eq!(o.status.code(), Some(5));
    let text = stdout(&o);
    assert!(text.contains("FAIL relations"));
    assert!(text.contains("{x,d*}=E−Ê+m"));

    let a = stdout(&run(&["verify", "--m", "2", "--kmax", "2", "--seed", "7", "--trials", "5"]));
    let b = stdout(&run(&["verify", "--m", "2", "--kmax", "2", "--seed", "7", "--trials", "5"]));
    assert_eq!(a, b);
}
