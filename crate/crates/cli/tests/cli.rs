//! End-to-end tests of the `sl2prim` binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sl2prim")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

#[test]
fn zeta_of_z16() {
    let out = run(&["zeta", "--ring", "Z/2^4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "2X^24 + 2X^12 + 6X^8 + 20X^6 + 16X^3");
}

#[test]
fn zeta_with_level_override_and_json() {
    let out = run(&["zeta", "--ring", "F2[t]/t^2", "--level", "4", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["zeta"]["pretty"], "X^24 + 8X^12 + 5X^8 + 16X^6 + 4X^4");
    assert_eq!(v["zeta"]["terms"]["24"], 1);
}

#[test]
fn brute_zeta_matches_construction() {
    let out = run(&["zeta", "--ring", "Z/2^2", "--brute"]);
    assert_eq!(stdout(&out).trim(), "4X^3 + X^2 + 2X");
    let full = run(&["zeta", "--ring", "Z/2^2", "--full"]);
    assert_eq!(stdout(&full).trim(), "4X^3 + 2X^2 + 4X");
}

#[test]
fn compare_distinguishes_at_r4() {
    let out = run(&["compare", "--a", "Z/2^4", "--b", "F2[t]/t^4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "DISTINGUISHED at dimension 24: counts 2 vs 1");
}

#[test]
fn compare_is_consistent_at_r2() {
    let out = run(&["compare", "--a", "Z/2^2", "--b", "F2[t]/t^2", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["verdict"], "consistent");
}

#[test]
fn verify_passes_at_level_two() {
    let out = run(&["verify", "--ring", "Z/2^2", "--level", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).lines().all(|l| l.starts_with("[PASS]")));
}

#[test]
fn nmax_at_r6() {
    let out = run(&["nmax", "--ring", "Z/2^6"]);
    assert_eq!(stdout(&out).trim(), "nmax = 96, #nmax = 8");
}

#[test]
fn table_formats() {
    let csv = run(&["table", "--ring", "Z/2^4", "--csv"]);
    let text = stdout(&csv);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("representative,type,centralizer_sl,m_a,theta,delta1,delta2,dims"));
    assert_eq!(lines.count(), 8);

    let json = run(&["table", "--ring", "F2[t]/t^4", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 10);

    let human = run(&["table", "--ring", "Z/2^4"]);
    assert!(stdout(&human).contains("primitive zeta polynomial: 2X^24"));
}

#[test]
fn orbits_and_ring_info() {
    let out = run(&["orbits", "--ring", "Z/2^4"]);
    assert!(stdout(&out).contains("8 orbits (IR: 1, SNS: 6, SS: 1)"));
    let info = run(&["ring-info", "--ring", "GR(2^4,2)", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&info.stdout).unwrap();
    assert_eq!(v["q"], 4);
    assert_eq!(v["sl2_order"], 15 * 4u64.pow(10));
}

#[test]
fn extension_set_for_one_triple() {
    let out = run(&["extension-set", "--ring", "F2[t]/t^6", "--triple", "1,t,0", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["cosets"], serde_json::json!(["0", "t^2"]));
    let brute = run(&["extension-set", "--ring", "F2[t]/t^6", "--triple", "1,t,t^2", "--brute", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&brute.stdout).unwrap();
    assert_eq!(v[0]["index_over_pi_ell"], 1);
    assert_eq!(v[0]["regime"], "brute");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["zeta", "--ring", "Q/7"]).status.code(), Some(2));
    assert_eq!(run(&["zeta"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["extension-set", "--ring", "Z/2^4", "--triple", "2,1,1"]).status.code(), Some(2));
    assert_eq!(run(&["table", "--ring", "Z/2^5"]).status.code(), Some(3));
    assert_eq!(run(&["zeta", "--ring", "Z/2^8", "--brute"]).status.code(), Some(3));
}
