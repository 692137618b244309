use std::fs;

use qpow::cli::{run, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION};
use qpow::netstats::{parse_csv, parse_structured, Scenario};
use qpow::pipeline::{ratio_column, CLASSICAL_ROW, ENERGY_TABLE, LANDAUER_COLUMN};

fn qpow(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qpow").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn energy_cell(args: &[&str], row: &str, column: &str) -> f64 {
    let mut full = vec!["energy", "--format", "structured"];
    full.extend_from_slice(args);
    let (code, out, err) = qpow(&full);
    assert_eq!(code, EXIT_OK, "{err}");
    let doc = parse_structured(&out).unwrap();
    doc.table(ENERGY_TABLE).unwrap().cell(row, column).unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(qpow(&["--help"]).0, EXIT_OK);
    assert_eq!(qpow(&["--version"]).0, EXIT_OK);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qpow(&[]).0, EXIT_USAGE);
    assert_eq!(qpow(&["no-such-command"]).0, EXIT_USAGE);
    assert_eq!(qpow(&["tables", "--format", "xml"]).0, EXIT_USAGE);
    assert_eq!(qpow(&["tables", "--ratio", "-3"]).0, EXIT_USAGE);
    assert_eq!(qpow(&["tables", "--temperature", "0"]).0, EXIT_USAGE);
    assert_eq!(
        qpow(&["tables", "--scenario", "/no/such/file.toml"]).0,
        EXIT_USAGE
    );
    assert_eq!(qpow(&["grover", "--qubits", "30"]).0, EXIT_USAGE);
}

#[test]
fn validate_distinguishes_bad_values_from_unreadable_files() {
    let dir = tempfile::tempdir().unwrap();

    let good = dir.path().join("good.toml");
    fs::write(&good, Scenario::published().to_toml()).unwrap();
    let (code, out, _) = qpow(&["validate", "--scenario", good.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("valid:"));

    let bad = dir.path().join("bad.toml");
    let text = Scenario::published().to_toml().replace(
        "network_hashrate_th_per_s = 201000000.0",
        "network_hashrate_th_per_s = -1.0",
    );
    assert!(text.contains("-1.0"), "fixture text changed shape");
    fs::write(&bad, text).unwrap();
    let (code, _, err) = qpow(&["validate", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_VALIDATION);
    assert!(err.contains("network_hashrate_th_per_s"), "{err}");

    let (code, _, err) = qpow(&["validate", "--scenario", "/no/such/file.toml"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("/no/such/file.toml"), "{err}");

    let garbled = dir.path().join("garbled.toml");
    fs::write(&garbled, "schema_version = [").unwrap();
    assert_eq!(
        qpow(&["validate", "--scenario", garbled.to_str().unwrap()]).0,
        EXIT_VALIDATION
    );
}

#[test]
fn check_mode_warns_but_succeeds() {
    let (code, out, err) = qpow(&["tables", "--check"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("Check against published values"));
    assert_eq!(err.lines().filter(|l| l.starts_with("warning:")).count(), 1);
    assert!(err.contains("Non-ECC NISQ Miner"));
}

#[test]
fn landauer_cells_scale_with_temperature() {
    let cold = energy_cell(&[], CLASSICAL_ROW, LANDAUER_COLUMN);
    let warm = energy_cell(&["--temperature", "300"], CLASSICAL_ROW, LANDAUER_COLUMN);
    approx::assert_relative_eq!(warm / cold, 300.0 / 293.0, max_relative = 1e-12);

    let q_cold = energy_cell(&[], "2 Layer ECC Quantum Miner", LANDAUER_COLUMN);
    let q_warm = energy_cell(
        &["--temperature", "300"],
        "2 Layer ECC Quantum Miner",
        LANDAUER_COLUMN,
    );
    approx::assert_relative_eq!(q_warm / q_cold, 300.0 / 293.0, max_relative = 1e-12);
}

#[test]
fn ratio_override_adds_columns() {
    let landauer = energy_cell(&["--ratio", "10,100"], CLASSICAL_ROW, LANDAUER_COLUMN);
    let at_100 = energy_cell(&["--ratio", "10,100"], CLASSICAL_ROW, &ratio_column(100.0));
    approx::assert_relative_eq!(at_100, 100.0 * landauer, max_relative = 1e-12);
}

#[test]
fn csv_output_parses_and_out_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tables.csv");
    let (code, out, _) = qpow(&["tables", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let cells = parse_csv(&fs::read_to_string(&path).unwrap()).unwrap();
    assert!(cells
        .iter()
        .any(|c| c.table == ENERGY_TABLE && c.row == CLASSICAL_ROW));
}

#[test]
fn self_consistent_scenario_by_name() {
    let v = energy_cell(
        &["--scenario", "self-consistent"],
        CLASSICAL_ROW,
        LANDAUER_COLUMN,
    );
    approx::assert_relative_eq!(v, 1.26423, max_relative = 1e-4);
}

#[test]
fn race_reports_are_reproducible() {
    let args = [
        "race",
        "--blocks",
        "50000",
        "--success-prob",
        "0.001",
        "--format",
        "structured",
        "--seed",
        "3",
    ];
    let (code, first, _) = qpow(&args);
    assert_eq!(code, EXIT_OK);
    assert_eq!(first, qpow(&args).1);
}

#[test]
fn grover_reports_closed_form_gap() {
    let (code, out, _) = qpow(&[
        "grover",
        "--qubits",
        "8",
        "--marked",
        "2",
        "--format",
        "structured",
    ]);
    assert_eq!(code, EXIT_OK);
    let doc = parse_structured(&out).unwrap();
    let gap = doc
        .table("Grover run")
        .unwrap()
        .cell("Gap", "value")
        .unwrap();
    assert!(gap < 1e-9, "gap {gap}");
}
