//! Interface tests through the installed binary: the quoted example
//! invocations, the JSON wire form, the CSV export, and the exit-code
//! contract (0 success, 2 argument error, 3 computational-bound failure).

use std::process::{Command, Output};

fn apconst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apconst"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

// ----------------------------------------------------------------------
// The quoted example invocations
// ----------------------------------------------------------------------

#[test]
fn mu_of_one_mod_five_prints_the_published_thirty_digits() {
    let out = apconst(&["mu", "--modulus", "5", "--class", "1", "--digits", "30"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(
        text.contains("mu(1,5) = 1.22523843853908458005760977474"),
        "got: {text}"
    );
}

#[test]
fn rho_of_one_mod_two_is_exactly_one_half() {
    let out = apconst(&["rho", "--modulus", "2", "--class", "1", "--digits", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("rho(1,2) = 0.5000000000"));
}

#[test]
fn census_table_ends_with_the_quoted_entry() {
    let out = apconst(&["census", "--order", "5", "--max-n", "25"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let last_row = text
        .lines()
        .filter(|l| l.trim_start().starts_with(char::is_numeric))
        .next_back()
        .expect("table rows");
    let fields: Vec<&str> = last_row.split_whitespace().collect();
    assert_eq!(fields, ["25", "4", "9"], "got row: {last_row}");
}

// ----------------------------------------------------------------------
// Wire forms
// ----------------------------------------------------------------------

#[test]
fn json_constant_document_has_the_full_wire_form() {
    let out = apconst(&[
        "mu", "--modulus", "5", "--class", "1", "--digits", "30", "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(doc["name"], "mu(1,5)");
    assert_eq!(doc["value"], "1.22523843853908458005760977474");
    assert_eq!(doc["error_bound"], "1e-29");
    assert!(doc["method"].as_str().unwrap().contains("closed-form"));
    assert_eq!(doc["parameters"]["precision_bits"], 164);
    assert_eq!(doc["parameters"]["prime_strip"], 1000);
    assert!(doc["elapsed_ms"].is_number());
}

#[test]
fn identity_json_serializes_candidate_terms() {
    let out = apconst(&[
        "identity",
        "--modulus",
        "4",
        "--target-exp",
        "1",
        "--max-dilation",
        "2",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(doc["solvable"], true);
    let candidates = doc["candidates"].as_array().expect("candidate list");
    assert!(!candidates.is_empty());
    let quoted = candidates
        .iter()
        .find(|c| {
            c["terms"].as_array().is_some_and(|terms| {
                terms
                    .iter()
                    .map(|t| {
                        (
                            t["char_index"].as_u64(),
                            t["dilation"].as_u64(),
                            t["exponent"].as_i64(),
                        )
                    })
                    .collect::<Vec<_>>()
                    == vec![
                        (Some(0), Some(1), Some(1)),
                        (Some(0), Some(2), Some(-1)),
                        (Some(1), Some(1), Some(1)),
                    ]
            })
        })
        .expect("the quoted combination is among the candidates");
    assert_eq!(quoted["zeta_pole_order"], 1);
}

#[test]
fn census_csv_matches_the_column_contract() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("quintic.csv");
    let out = apconst(&[
        "census",
        "--order",
        "5",
        "--max-n",
        "25",
        "--csv",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).expect("csv written");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,b,partial_sum"));
    assert!(csv.lines().any(|l| l == "11,4,5"));
    assert_eq!(csv.lines().next_back(), Some("25,4,9"));
}

#[test]
fn lvalue_renders_complex_values_with_both_components() {
    let out = apconst(&[
        "lvalue",
        "--modulus",
        "5",
        "--char-index",
        "1",
        "--s",
        "1",
        "--digits",
        "20",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    let value = doc["value"].as_str().unwrap();
    assert!(value.ends_with('i'), "complex rendering: {value}");
    assert!(value.contains(" + ") || value.contains(" - "));
    assert_eq!(doc["parameters"]["char_order"], 4);
}

// ----------------------------------------------------------------------
// Exit codes
// ----------------------------------------------------------------------

#[test]
fn argument_violations_exit_with_code_two() {
    // Class not coprime to the modulus.
    let out = apconst(&["mu", "--modulus", "4", "--class", "2", "--digits", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("coprime"));

    // Digits outside the accepted range.
    let out = apconst(&["mu", "--modulus", "5", "--class", "1", "--digits", "0"]);
    assert_eq!(out.status.code(), Some(2));

    // A cross-checking method where no closed form exists.
    let out = apconst(&[
        "rho", "--modulus", "7", "--class", "1", "--digits", "10", "--method", "both",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown suite name.
    let out = apconst(&["verify", "--suite", "nightly"]);
    assert_eq!(out.status.code(), Some(2));

    // Character index out of range.
    let out = apconst(&[
        "lvalue",
        "--modulus",
        "5",
        "--char-index",
        "4",
        "--s",
        "2",
        "--digits",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("out of range"));
}

#[test]
fn uncertifiable_digit_requests_exit_with_code_three() {
    // The truncated gcd product at a small prime limit certifies only a
    // few digits against the assembled route.
    let out = apconst(&[
        "kappa",
        "--order",
        "7",
        "--method",
        "gcd-slow",
        "--prime-limit",
        "100000",
        "--digits",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("can be certified"));
}

#[test]
fn principal_character_at_one_is_rejected() {
    let out = apconst(&[
        "lvalue",
        "--modulus",
        "5",
        "--char-index",
        "0",
        "--s",
        "1",
        "--digits",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("pole"));
}

#[test]
#[cfg(unix)]
fn piped_output_truncated_by_the_reader_stays_quiet() {
    // `apconst … | head` must end like any other filter: no panic
    // backtrace when the reader closes the pipe after the first line.
    // The census table is long enough to overrun the pipe buffer.
    let out = Command::new("sh")
        .arg("-c")
        .arg(format!(
            "{} census --order 5 --max-n 6000 | head -n 1",
            env!("CARGO_BIN_EXE_apconst")
        ))
        .output()
        .expect("pipeline runs");
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(
        !stderr(&out).contains("panic"),
        "broken pipe leaked a panic: {}",
        stderr(&out)
    );
}
