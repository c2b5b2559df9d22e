//! End-to-end tests of the `casas` binary: exit codes, report shapes and
//! byte-determinism of the JSON output.

use std::process::{Command, Output};

fn casas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casas"))
        .args(args)
        .env_remove("CA_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn check_poly_exit_codes() {
    // pure power: consistent, exit 0
    let ok = casas(&["check-poly", "--field", "q", "(x1-2)^3"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = stdout_json(&ok);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["data"]["pure_power"], true);
    assert_eq!(v["data"]["root"], "2");

    // the F_2 counterexample: exit 1
    let ce = casas(&["check-poly", "--field", "f2", "x1^3 + x1^2"]);
    assert_eq!(ce.status.code(), Some(1));
    let v = stdout_json(&ce);
    assert_eq!(v["data"]["counterexample"], true);

    // malformed input: exit 2, no JSON
    let bad = casas(&["check-poly", "--field", "q", "x1 + @"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("parse error"));

    // composite modulus: exit 2
    let badfield = casas(&["check-poly", "--field", "f6", "x1"]);
    assert_eq!(badfield.status.code(), Some(2));
}

#[test]
fn verify_degree_exit_codes_and_witness() {
    let pass = casas(&["verify-degree", "3", "--field", "q"]);
    assert_eq!(pass.status.code(), Some(0));
    let v = stdout_json(&pass);
    assert_eq!(v["data"]["tuples_checked"], 9);
    assert_eq!(v["report"]["passed"], true);

    let fail = casas(&["verify-degree", "3", "--field", "f2"]);
    assert_eq!(fail.status.code(), Some(1));
    let v = stdout_json(&fail);
    let witness = &v["report"]["items"][0]["witness"];
    assert!(witness["tuple"].is_array(), "witness tuple embedded: {v}");

    // out of the documented range: exit 2
    let usage = casas(&["verify-degree", "2"]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn scan_bad_primes_reports_two() {
    let out = casas(&["scan-bad-primes", "--d", "3", "--bound", "10"]);
    assert_eq!(out.status.code(), Some(1), "a bad prime is a witness");
    let v = stdout_json(&out);
    let failing = v["data"]["failing"].as_array().unwrap();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["prime"], 2);
    assert_eq!(failing[0]["brute_force_witness"], "x1^3 + x1^2");
    assert_eq!(v["data"]["unresolved_extension_cases"].as_array().unwrap().len(), 0);
}

#[test]
fn json_is_byte_identical_across_worker_counts() {
    let one = casas(&["verify-degree", "3", "--workers", "1"]);
    let four = casas(&["verify-degree", "3", "--workers", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(four.status.code(), Some(0));
    // the echoed worker count is the single permitted difference
    let strip = |bytes: &[u8]| -> String {
        String::from_utf8_lossy(bytes)
            .lines()
            .filter(|l| !l.contains("\"workers\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&one.stdout), strip(&four.stdout));

    // identical invocations are byte-identical outright
    let again = casas(&["verify-degree", "3", "--workers", "4"]);
    assert_eq!(four.stdout, again.stdout);
}

#[test]
fn verify_proof_f3_negative_control() {
    let out = casas(&[
        "verify-proof",
        "--n",
        "3",
        "--tuple",
        "1,2",
        "--jn",
        "3",
        "--field",
        "f3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    let items = v["report"]["items"].as_array().unwrap();
    let by_name = |name: &str| {
        items
            .iter()
            .find(|i| i["name"].as_str().unwrap().starts_with(name))
            .unwrap_or_else(|| panic!("missing item {name}"))
    };
    assert_eq!(by_name("recursion_identities")["pass"], true);
    assert_eq!(by_name("s_hat_regular")["pass"], true);
    assert_eq!(by_name("filtration")["pass"], true);
    let section = by_name("section");
    assert_eq!(section["pass"], false);
    let note = section["witness"]["note"].as_str().unwrap();
    assert!(note.contains("characteristic 3"), "obstruction named: {note}");
}

#[test]
fn verify_proof_q_passes_everything_but_the_known_gap() {
    let out = casas(&["verify-proof", "--n", "3", "--tuple", "1,2", "--jn", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    let items = v["report"]["items"].as_array().unwrap();
    let failures: Vec<&str> = items
        .iter()
        .filter(|i| i["pass"] == false)
        .map(|i| i["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        failures,
        vec!["diagram[1,2;jn=1].four_lemma_row2_exact"],
        "the only failing stage is the row-2 exactness of the four-lemma input"
    );
}

#[test]
fn text_output_renders_lines() {
    let out = casas(&["verify-degree", "3", "--output", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("[PASS] all_tuples_regular"));
    assert!(text.contains("overall: PASS"));
}

#[test]
fn koszul_query_reports_homology_table() {
    let out = casas(&[
        "koszul", "--n", "3", "--tuple", "1,2", "--cap", "2", "--bound", "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let table = v["data"]["homology"].as_array().unwrap();
    assert!(!table.is_empty());
    // H_1 of the truncated complex vanishes in every reported degree
    for entry in table {
        if entry["homological_index"] == 1 {
            assert_eq!(entry["dimension"], 0, "{entry}");
        }
    }
}

#[test]
fn ca_workers_env_overrides_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_casas"))
        .args(["verify-degree", "3", "--workers", "1"])
        .env("CA_WORKERS", "2")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["config"]["workers"], 2);
}
