//! The `prmt` binary end to end.

use std::process::{Command, Output};

fn prmt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prmt"))
        .args(args)
        .output()
        .expect("run prmt")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn limit_reports_value_and_term_counts() {
    let v = json(&prmt(&["limit", "--word", "C C* C C*"]));
    for key in ["word", "theta", "value_re", "value_im", "mc_error", "n_terms", "n_crossing"] {
        assert!(v.get(key).is_some(), "missing {key} in {v}");
    }
    assert!((v["value_re"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(v["n_terms"], 2);

    let v = json(&prmt(&["limit", "--word", "C D C* D*", "--theta", "1.0", "--dump-terms"]));
    assert!(v["patterns"].as_array().is_some_and(|p| !p.is_empty()), "{v}");
}

#[test]
fn malformed_word_is_a_usage_error() {
    let out = prmt(&["limit", "--word", "C Q*"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Q*"));

    let out = prmt(&["moment", "--word", "D^x", "-n", "8"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn moment_of_circulant_square_is_near_one() {
    let v = json(&prmt(&["moment", "--word", "C C*", "-n", "128", "--reps", "50", "--seed", "3"]));
    let m = v["mean_re"].as_f64().unwrap();
    assert!((m - 1.0).abs() < 0.05, "{m}");
}

#[test]
fn esd_csv_has_histogram_header() {
    let out = prmt(&["esd", "-e", "left-skew", "-n", "64", "--reps", "2", "--format", "csv", "--bins", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("bin_left,bin_right,count,density"));
    assert_eq!(text.lines().count(), 11);
    assert!(String::from_utf8_lossy(&out.stderr).contains("pooled KS"));
}

#[test]
fn gen_and_spectrum_produce_json() {
    let v = json(&prmt(&["gen", "-e", "circulant", "-n", "4", "--seed", "1"]));
    assert!(v.is_object() || v.is_array());
    let a = prmt(&["spectrum", "-e", "skew", "-n", "16", "--reps", "2", "--seed", "1"]);
    let b = prmt(&["spectrum", "-e", "skew", "-n", "16", "--reps", "2", "--seed", "1", "--threads", "3"]);
    assert_eq!(json(&a), json(&b));
}

#[test]
fn fast_verify_passes() {
    let out = prmt(&["verify"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("0 failed"), "{text}");
}

#[test]
fn zero_threads_is_rejected() {
    assert!(!prmt(&["verify", "--threads", "0"]).status.success());
}
