use std::path::Path;
use std::process::{Command, Output};

use rug::ops::Pow;
use serde_json::Value;

fn sepprob(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepprob"))
        .args(args)
        .current_dir(dir)
        .env("SEPPROB_CACHE_DIR", dir.join("cache"))
        .output()
        .expect("run sepprob")
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn table_check_passes_reference_and_flags_perturbation() {
    let d = tempfile::tempdir().unwrap();
    let ok = sepprob(d.path(), &["table", "reference", "--out", "ref.json"]);
    assert!(ok.status.success());
    let v = stdout_json(&sepprob(d.path(), &["table", "check", "--table", "ref.json"]));
    assert_eq!(v["matched"], 20);
    let bad = write(d.path(), "bad.json", r#"{"rows":[{"alpha":"2","value":"26/324"},{"alpha":"11","value":"1/9"}]}"#);
    let o = sepprob(d.path(), &["table", "check", "--table", &bad]);
    assert_eq!(o.status.code(), Some(4));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"][0]["status"], "mismatch");
    assert_eq!(v["rows"][1]["status"], "unchecked");
}

#[test]
fn failures_map_to_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let bad = write(d.path(), "bad.json", r#"{"rows":[{"alpha":"1/0","value":"1/2"}]}"#);
    let o = sepprob(d.path(), &["table", "check", "--table", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("rows[0].alpha"));
    let o = sepprob(d.path(), &["mc", "estimate", "--ensemble", "octonion", "--samples", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = sepprob(d.path(), &["hyper", "eval", "--upper", "1,1,1", "--lower", "2", "--z", "1/2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = sepprob(d.path(), &["hyper", "family", "--alpha", "-2", "--k", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha+2"));
}

#[test]
fn fitline_on_exponential_table() {
    let d = tempfile::tempdir().unwrap();
    // Eighty-digit fixed decimals of e^-alpha.
    let rows: Vec<String> = (1..=10)
        .map(|a| {
            let v = rug::Float::with_val(400, -(a as i32)).exp();
            let s = sepprob::numeric::decimal_render(&v.to_rational().unwrap(), 80);
            format!(r#"{{"alpha":"{a}","value":"{s}"}}"#)
        })
        .collect();
    let t = write(d.path(), "exp.json", &format!(r#"{{"rows":[{}]}}"#, rows.join(",")));
    let v = stdout_json(&sepprob(d.path(), &["fitline", "--table", &t, "--out-csv", "f.csv", "--out-svg", "f.svg"]));
    assert_eq!(v["slope"], "-1.00000000000");
    let csv = std::fs::read_to_string(d.path().join("f.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("alpha,ln_p,fitted,residual"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",0.000000000000")));
    let svg = std::fs::read_to_string(d.path().join("f.svg")).unwrap();
    assert!(svg.contains(r#"data-alpha="10""#));
    assert!(svg.contains(r#"data-ln-p="-10.000000000000""#));
    assert!(d.path().join("f.csv.manifest.json").exists());
}

#[test]
fn fitline_reference_logs() {
    let d = tempfile::tempdir().unwrap();
    sepprob(d.path(), &["table", "reference", "--out", "ref.json"]);
    stdout_json(&sepprob(d.path(), &["fitline", "--table", "ref.json"]));
    let csv = std::fs::read_to_string(d.path().join("fitline.csv")).unwrap();
    let row = csv.lines().find(|l| l.starts_with("1,")).unwrap();
    let ln: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((ln - (-1.4171)).abs() < 5e-5);
}

#[test]
fn mc_estimate_is_deterministic_and_has_manifest() {
    let d = tempfile::tempdir().unwrap();
    let args = ["mc", "estimate", "--ensemble", "qubit", "--samples", "20000", "--seed", "5", "--threads", "1", "--out", "a.json"];
    stdout_json(&sepprob(d.path(), &args));
    let a = std::fs::read(d.path().join("a.json")).unwrap();
    let args2 = ["mc", "estimate", "--ensemble", "qubit", "--samples", "20000", "--seed", "5", "--threads", "3", "--out", "b.json"];
    stdout_json(&sepprob(d.path(), &args2));
    let b = std::fs::read(d.path().join("b.json")).unwrap();
    assert_eq!(a, b);
    let m: Value = serde_json::from_slice(&std::fs::read(d.path().join("a.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "mc estimate");
    assert_eq!(m["seeds"][0], 5);
    assert_eq!(m["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn reconstruct_uniform_moments_gives_one_seventeenth() {
    let d = tempfile::tempdir().unwrap();
    // Moments of the uniform density on [-1/16, 1/256].
    let (a, b) = (rug::Rational::from((-1, 16)), rug::Rational::from((1, 256)));
    let moments: Vec<String> = (0..6u32)
        .map(|n| {
            let hi = rug::Rational::from(b.clone().pow(n + 1));
            let lo = rug::Rational::from(a.clone().pow(n + 1));
            let m = (hi - lo) / (rug::Rational::from(&b - &a) * (n + 1));
            format!("\"{}\"", sepprob::numeric::format_rational(&m))
        })
        .collect();
    let f = write(
        d.path(),
        "m.json",
        &format!(r#"{{"alpha":"1","interval":["-1/16","1/256"],"moments":[{}],"source":"uniform"}}"#, moments.join(",")),
    );
    let v = stdout_json(&sepprob(d.path(), &["reconstruct", "--moments", &f, "--degree", "5", "--trace", "t.csv"]));
    assert_eq!(v["estimate"], "1/17");
    let csv = std::fs::read_to_string(d.path().join("t.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.lines().skip(1).all(|l| l.contains(",1/17,")));
}

#[test]
fn formula_round_trip_through_files() {
    let d = tempfile::tempdir().unwrap();
    let unit = r#"{"affine":{"num":["1"],"den":["1"]},"weights":[{"num":["0"]},{"num":["0"]},{"num":["0"]},{"num":["0"]},{"num":["0"]},{"num":["0"]}],"description":"one"}"#;
    let c = write(d.path(), "unit.json", unit);
    let v = stdout_json(&sepprob(d.path(), &["formula", "eval", "--config", &c, "--alpha", "7", "--digits", "20"]));
    assert_eq!(v["radius"], "0");
    assert!(v["value"].as_str().unwrap().starts_with("1.0000"));
    let bad = write(d.path(), "bad.json", &unit.replace(r#"{"num":["1"],"den":["1"]}"#, r#"{"num":["1"],"den":["0"]}"#));
    let o = sepprob(d.path(), &["formula", "eval", "--config", &bad, "--alpha", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("affine.den"));
}

#[test]
fn recognize_affine_from_cli() {
    let d = tempfile::tempdir().unwrap();
    let t = sepprob::numeric::ConstantTable::builtin();
    let c1 = sepprob::numeric::float_to_rational(&t.value("c1", 80).unwrap());
    let x = rug::Rational::from(2) - rug::Rational::from((17, 21)) * c1;
    let x = sepprob::numeric::decimal_render(&x, 50);
    let v = stdout_json(&sepprob(d.path(), &["recognize", "--value", &x, "--constant", "c1", "--a-candidates", "2"]));
    assert_eq!(v["form"], "affine");
    assert_eq!(v["b"], "-17/21");
    let v = stdout_json(&sepprob(d.path(), &["recognize", "--value", "0.33333", "--max-den", "1000000"]));
    assert_eq!(v["form"], "none");
}

#[test]
fn verify_small_run_is_low_power() {
    let d = tempfile::tempdir().unwrap();
    sepprob(d.path(), &["table", "reference", "--out", "ref.json"]);
    let v = stdout_json(&sepprob(d.path(), &["verify", "--table", "ref.json", "--samples", "100", "--threads", "1"]));
    for r in v["rows"].as_array().unwrap() {
        assert_eq!(r["status"], "LOW_POWER");
    }
    assert!(d.path().join("verdict.json").exists());
}
