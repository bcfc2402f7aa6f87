//! End-to-end tests of the `ychl` binary: exit codes, output schemas,
//! and determinism across runs and worker counts.

use std::process::{Command, Output};

use serde_json::Value;
use ychl::rate::{parse_rate_tuple, Rat};
use ychl::region::LinearRegion;

fn ychl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ychl"))
        .args(args)
        .output()
        .expect("binary launches")
}

fn ychl_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ychl"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary launches")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("stdout is json")
}

#[test]
fn region_json_round_trips_check_verdicts() {
    let out = ychl(&["region", "dyc", "--levels", "5,4,3", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["version"], "0.1.0");
    assert_eq!(v["vars"].as_array().unwrap().len(), 6);
    let region = LinearRegion::<Rat>::from_json(&v).expect("parseable region");
    assert_eq!(region.ineqs.len(), 8);

    for (rates, expect_inside) in [("0,2,2,1,0,2", true), ("0,3,2,1,0,2", false)] {
        let reparsed = region.contains(
            &parse_rate_tuple(rates).unwrap(),
            Rat::from_integer(0),
        );
        assert_eq!(reparsed, expect_inside, "re-parsed region on {rates}");
        let check = ychl(&["check", "--levels", "5,4,3", "--rates", rates]);
        assert_eq!(code(&check), if expect_inside { 0 } else { 1 }, "check on {rates}");
        assert!(stdout(&check).contains(if expect_inside { "inside: yes" } else { "inside: no" }));
    }
}

#[test]
fn gaussian_region_rows_and_role_mapping() {
    let out = ychl(&["region", "gyc", "--gains", "1,3,2", "--power", "1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["inequalities"].as_array().unwrap().len(), 14);
    assert_eq!(v["role_users"], serde_json::json!([2, 3, 1]));

    let out = ychl(&[
        "region", "gyc", "--gains", "3,2,1", "--bound", "inner-target", "--format", "json",
    ]);
    assert_eq!(json(&out)["inequalities"].as_array().unwrap().len(), 8);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&ychl(&["region", "dyc", "--levels", "3,4,5"])), 2);
    assert_eq!(code(&ychl(&["check", "--levels", "2,2,2", "--rates", "1,2"])), 2);
    assert_eq!(code(&ychl(&["check", "--levels", "2,2,2", "--rates", "1,x,0,0,0,0"])), 2);
    assert_eq!(
        code(&ychl(&["check", "--levels", "2,2,2", "--rates", "1,1,0,0,0,0", "--format", "csv"])),
        2
    );
    assert_eq!(code(&ychl(&["no-such-command"])), 2);
    assert_eq!(code(&ychl(&["--help"])), 0);
}

#[test]
fn plan_emits_reference_streams() {
    let args = ["plan", "--levels", "5,4,3", "--rates", "0,2,2,1,0,2", "--format", "json"];
    let out = ychl(&args);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["feasible"], true);
    assert_eq!(v["expansion_factor"], 1);
    let streams = v["streams"].as_array().unwrap();
    let ids: Vec<&str> = streams.iter().map(|s| s["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["b23", "c132-top", "c132-bot", "u21", "u13"]);
    let levels: Vec<(Value, Value)> = streams
        .iter()
        .map(|s| (s["uplink"].clone(), s["downlink"].clone()))
        .collect();
    let pair = |a: u64, b: u64| (serde_json::json!([a, a]), serde_json::json!([b, b]));
    assert_eq!(levels, vec![pair(1, 1), pair(4, 4), pair(2, 2), pair(3, 5), pair(5, 3)]);

    let again = ychl(&args);
    assert_eq!(stdout(&out), stdout(&again), "plan output is deterministic");
}

#[test]
fn plan_reports_infeasible_tuples() {
    let out = ychl(&["plan", "--levels", "2,2,2", "--rates", "2,0,0,2,2,0"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("infeasible:"));

    let out = ychl(&["plan", "--levels", "2,2,2", "--rates", "2,0,0,2,2,0", "--format", "json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["feasible"], false);
}

#[test]
fn plan_expands_fractional_tuples() {
    let out = ychl(&[
        "plan", "--levels", "1,1,1", "--rates", "1/2,0,1/2,0,0,0", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["expansion_factor"], 2);
    assert_eq!(v["levels"], serde_json::json!([2, 2, 2]));
    assert_eq!(v["rates"], serde_json::json!([1, 0, 1, 0, 0, 0]));
}

#[test]
fn simulate_sweeps_and_limits() {
    let out = ychl(&[
        "simulate", "--levels", "5,4,3", "--rates", "0,2,2,1,0,2", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["mode"], "exhaustive");
    assert_eq!(v["cases"], 128);
    assert_eq!(v["failures"], 0);
    assert_eq!(v["ok"], true);

    // 26 message bits refuse the default exhaustive sweep but accept
    // sampling.
    let big = ["--levels", "13,13,13", "--rates", "13,0,13,0,0,0"];
    let refused = ychl(&[&["simulate"], &big[..]].concat());
    assert_eq!(code(&refused), 2);
    let sampled = ychl(
        &[&["simulate"], &big[..], &["--trials", "50", "--seed", "3", "--format", "json"]]
            .concat(),
    );
    assert_eq!(code(&sampled), 0);
    let v = json(&sampled);
    assert_eq!(v["mode"], "random");
    assert_eq!(v["cases"], 50);
    assert_eq!(v["failures"], 0);
}

#[test]
fn verify_passes_and_fails_with_exit_codes() {
    let out = ychl(&[
        "verify", "--gains", "3,2,1", "--power", "7",
        "--rates", "0.1,0.1,0.1,0.1,0.1,0.1", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["ok"], true);
    assert_eq!(v["version"], "0.1.0");
    assert_eq!(v["constraints"].as_array().unwrap().len(), 26);

    let out = ychl(&[
        "verify", "--gains", "3,2,1", "--power", "1", "--rates", "3,3,3,3,3,3",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("verified: no"));
}

#[test]
fn verify_permutes_user_order_into_roles() {
    // Same channel and traffic, users listed in two different orders.
    let a = ychl(&[
        "verify", "--gains", "3,2,1", "--power", "7",
        "--rates", "0.4,0.1,0.2,0.5,0.3,0.2", "--format", "json",
    ]);
    // Users renamed by the cycle 1->2->3->1: gains rotate and every rate
    // R_jk moves to the renamed pair.
    let b = ychl(&[
        "verify", "--gains", "1,3,2", "--power", "7",
        "--rates", "0.3,0.2,0.1,0.4,0.5,0.2", "--format", "json",
    ]);
    let (va, vb) = (json(&a), json(&b));
    assert_eq!(va["rates_role_order"], vb["rates_role_order"]);
    assert_eq!(va["min_slack"], vb["min_slack"]);
    assert_eq!(vb["role_users"], serde_json::json!([2, 3, 1]));
}

#[test]
fn verify_rejects_traffic_through_a_dead_link() {
    let out = ychl(&["verify", "--gains", "1,1,0", "--rates", "0,0.1,0,0,0,0"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("not achievable:"));

    let bad = ychl(&["verify", "--gains", "1,1,1", "--rates", "0,-0.1,0,0,0,0"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn sweep_writes_stable_csv() {
    let p1 = concat!(env!("CARGO_TARGET_TMPDIR"), "/sweep1.csv");
    let p2 = concat!(env!("CARGO_TARGET_TMPDIR"), "/sweep2.csv");
    let args = |path: &'static str| {
        vec!["sweep-gap", "--samples", "40", "--seed", "11", "--out", path]
    };
    let out = ychl(&args(p1));
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("40 samples, 40 pass, 0 fail"));

    let body = std::fs::read_to_string(p1).unwrap();
    let mut lines = body.lines();
    assert_eq!(
        lines.next().unwrap(),
        "seed,h1,h2,h3,P,R12,R13,R21,R23,R31,R32,min_slack,verdict"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 40);
    for (i, row) in rows.iter().enumerate() {
        assert!(row.starts_with(&format!("{i},")), "rows ordered by sample index");
        assert!(row.ends_with(",pass"));
    }

    let rerun = ychl_with_env(&args(p2), "YCHL_THREADS", "1");
    assert_eq!(code(&rerun), 0);
    assert_eq!(body, std::fs::read_to_string(p2).unwrap(), "worker count changes nothing");
}

#[test]
fn sweep_default_range_all_pass() {
    let path = concat!(env!("CARGO_TARGET_TMPDIR"), "/sweep1000.csv");
    let out = ychl(&["sweep-gap", "--samples", "1000", "--out", path, "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["samples"], 1000);
    assert_eq!(v["failures"], 0);
    assert_eq!(v["ok"], true);
    assert!(!std::fs::read_to_string(path).unwrap().contains(",fail"));
}
