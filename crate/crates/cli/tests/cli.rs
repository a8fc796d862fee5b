use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_wigner-bounds"));
    c.env_remove("WIGNER_BOUNDS_TOL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn verify_two_root_passes() {
    let out = run(&["verify", "--branch", "two_root", "--mu-g", "0.5", "--param", "2.0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["max_rel_err"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["pass"], true);
}

#[test]
fn verify_reports_the_extremity_ratio() {
    let out = run(&["verify", "--branch", "one_root", "--mu-g", "0.5", "--param", "3.0"]);
    assert_eq!(out.status.code(), Some(0));
    let ratio = json_of(&out)["purity_ratio"].as_f64().unwrap();
    assert!((ratio - 8.0 / 9.0).abs() < 1e-12);
}

#[test]
fn verify_rejects_out_of_range_parameters() {
    let out = run(&["verify", "--branch", "two_root", "--mu-g", "0.5", "--param", "5.0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "--branch", "one_root", "--mu-g", "1.5", "--param", "3.0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "--branch", "sideways", "--mu-g", "0.5", "--param", "3.0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn surface_contents() {
    let out = run(&[
        "surface",
        "--mu-g-min",
        "0.25",
        "--mu-g-max",
        "1.0",
        "--mu-g-steps",
        "4",
        "--params-per-branch",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# wigner-bounds-cli"));
    assert!(text.lines().nth(1).unwrap() == "mu_g,branch,param,mu_ex,overlap_ex,delta_ex");
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 4 * (8 + 9));
    let f = |s: &String| s.parse::<f64>().unwrap();
    let row_8_9 = rows
        .iter()
        .find(|r| f(&r[0]) == 0.5 && r[1] == "one_root" && f(&r[2]) == 3.0)
        .unwrap();
    assert!((f(&row_8_9[3]) / 0.5 - 8.0 / 9.0).abs() < 1e-12);
    for mu_g in [0.25, 0.5, 0.75, 1.0] {
        let at: Vec<_> = rows.iter().filter(|r| f(&r[0]) == mu_g).collect();
        let two = at.iter().rfind(|r| r[1] == "two_root").unwrap();
        let one = at.iter().find(|r| r[1] == "one_root").unwrap();
        assert_eq!(two[2], one[2]);
        assert!((f(&two[3]) - f(&one[3])).abs() < 1e-10);
    }
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| {
        f(&a[0])
            .total_cmp(&f(&b[0]))
            .then((a[1] == "one_root").cmp(&(b[1] == "one_root")))
            .then(f(&a[2]).total_cmp(&f(&b[2])))
    });
    assert_eq!(rows, sorted);
}

#[test]
fn surface_rejects_bad_flags() {
    assert_eq!(run(&["surface", "--mu-g-steps", "1"]).status.code(), Some(2));
    assert_eq!(run(&["surface", "--mu-g-max", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["surface", "--mu-g-steps", "abc"]).status.code(), Some(2));
}

#[test]
fn ultimate_with_lower() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    let out = run(&[
        "ultimate",
        "--mu-g-steps",
        "10",
        "--with-lower",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "mu_g,delta_upper,delta_lower");
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 10);
    for r in &rows {
        let (upper, lower): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!(lower <= upper, "{r:?}");
    }
    let last: f64 = rows[9][2].parse().unwrap();
    assert!(last.abs() < 1e-9);
}

#[test]
fn outputs_round_trip_17_digits() {
    let out = run(&["ultimate", "--mu-g-steps", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for r in csv_rows(&text) {
        for cell in r {
            let mantissa = cell.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17, "{cell}");
        }
    }
}

#[test]
fn check_thermal() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "t.json",
        r#"{"type":"thermal","c":1.0,"convention":"vacuum-identity"}"#,
    );
    let out = run(&["check", "--input", &input]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["physicality"]["verdict"]["kind"], "PassedUpToNmax");
    assert!(v["delta"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(v["physicality"]["overlaps"].as_array().unwrap().len(), 41);
}

#[test]
fn check_extremal_on_the_pure_locus() {
    // α solving μ_G·R(α) = 1 at μ_G = 0.5
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "e.json",
        r#"{"type":"extremal","mu_g":0.5,"branch":"two_root","param":1.2026902536,"convention":"vacuum-identity"}"#,
    );
    let out = run(&["check", "--input", &input]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["physicality"]["verdict"]["kind"], "FailedAtN");
    assert!(v["physicality"]["verdict"]["n"].as_u64().unwrap() <= 40);
    assert!((v["purity"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(v["exceeds_upper_bound"], false);
}

#[test]
fn check_sampled_thermal_matches_analytic() {
    let dir = tempfile::tempdir().unwrap();
    let c = 1.0f64;
    let r: Vec<f64> = (0..=4000).map(|i| 60.0 * i as f64 / 4000.0).collect();
    let w: Vec<f64> = r
        .iter()
        .map(|x| (-x / (2.0 * c)).exp() / (2.0 * std::f64::consts::PI * c))
        .collect();
    let body = serde_json::json!({"type": "sampled", "r": r, "w": w, "convention": "vacuum-identity"});
    let input = write(dir.path(), "s.json", &body.to_string());
    let out = run(&["check", "--input", &input]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["approximate"], true);
    assert_eq!(v["physicality"]["verdict"]["kind"], "PassedUpToNmax");
    assert!(v["delta"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn check_schema_errors_cite_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"type":"thermal","c":1.0}"#, "`convention`"),
        (r#"{"type":"thermal","c":1.0,"convention":"hbar=1"}"#, "`convention`"),
        (r#"{"type":"fock","n":"two","convention":"vacuum-identity"}"#, "`n`"),
        (
            r#"{"type":"sampled","r":[0,1,1,2],"w":[1,1,1,1],"convention":"vacuum-identity"}"#,
            "`r`",
        ),
    ];
    for (i, (body, field)) in cases.iter().enumerate() {
        let input = write(dir.path(), &format!("bad{i}.json"), body);
        let out = run(&["check", "--input", &input]);
        assert_eq!(out.status.code(), Some(2), "{body}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(field), "{body}");
    }
    assert_eq!(
        run(&["check", "--input", "/nonexistent/file.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn unnormalized_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "u.json",
        r#"{"type":"extremal","a1":1.0,"a2":0.0,"a3":0.0,"c":1.0,"r_lo":0.0,"r_hi":1.0,"convention":"vacuum-identity"}"#,
    );
    let out = run(&["check", "--input", &input]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_override() {
    let out = bin()
        .env("WIGNER_BOUNDS_TOL", "1e-8")
        .args(["verify", "--branch", "one_root", "--mu-g", "0.3", "--param", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["metadata"]["rel_tol"].as_f64(), Some(1e-8));
    let out = bin()
        .env("WIGNER_BOUNDS_TOL", "-1")
        .args(["ultimate", "--mu-g-steps", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_file_is_written_and_stdout_left_empty() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let out = run(&[
        "surface",
        "--mu-g-steps",
        "2",
        "--params-per-branch",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("two_root"));
}
