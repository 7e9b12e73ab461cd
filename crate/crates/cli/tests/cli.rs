//! End-to-end tests of the sweep output contract and the binary's exit codes.

use std::process::Command;

use phasesim_cli::{run_sweep, OutputFormat, Row, SweepSpec, CSV_HEADER, SCHEMA_VERSION};

fn small_spec() -> SweepSpec {
    let mut spec = SweepSpec::from_flags(
        &["kitaev".into(), "adaptive".into()],
        &[1],
        &["0..2".into()],
    )
    .expect("valid flags");
    spec.trials = 200;
    spec.seed = 42;
    spec.bootstrap_b = 999;
    spec
}

fn sweep_bytes(spec: &SweepSpec) -> (Vec<Row>, Vec<u8>) {
    let mut buf = Vec::new();
    let rows = run_sweep(spec, &mut buf).expect("sweep runs");
    (rows, buf)
}

#[test]
fn csv_output_has_header_and_one_row_per_grid_point() {
    let spec = small_spec();
    let (rows, bytes) = sweep_bytes(&spec);
    let text = String::from_utf8(bytes).expect("utf-8");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(rows.len(), 2 * 3, "2 policies x 3 K values");
    assert_eq!(lines.len(), 1 + rows.len());
    for line in &lines[1..] {
        assert_eq!(
            line.split(',').count(),
            CSV_HEADER.split(',').count(),
            "row width matches header"
        );
    }
}

#[test]
fn csv_fields_round_trip_at_full_precision() {
    let spec = small_spec();
    let (rows, bytes) = sweep_bytes(&spec);
    let text = String::from_utf8(bytes).expect("utf-8");
    for (row, line) in rows.iter().zip(text.lines().skip(1)) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0].parse::<u32>().unwrap(), SCHEMA_VERSION);
        assert_eq!(f[1].parse::<u64>().unwrap(), row.n);
        assert_eq!(f[2], format!("{}", row.policy));
        assert_eq!(f[3].parse::<u32>().unwrap(), row.m);
        assert_eq!(f[4].parse::<u32>().unwrap(), row.k);
        assert_eq!(f[5].parse::<u64>().unwrap(), row.trials);
        // {:.16e} keeps all 17 significant digits: parsing must recover the
        // exact bit pattern, and sigma must be exactly sqrt(v_holevo).
        let v: f64 = f[6].parse().unwrap();
        let sigma: f64 = f[7].parse().unwrap();
        assert_eq!(v.to_bits(), row.v_holevo.to_bits());
        assert_eq!(sigma.to_bits(), row.v_holevo.sqrt().to_bits());
        let ci_low: f64 = f[8].parse().unwrap();
        let ci_high: f64 = f[9].parse().unwrap();
        assert_eq!(ci_low.to_bits(), row.ci_low.to_bits());
        assert_eq!(ci_high.to_bits(), row.ci_high.to_bits());
        assert!(ci_low <= v && v <= ci_high, "interval contains the estimate");
        assert_eq!(f[13].parse::<u64>().unwrap(), row.seed);
    }
}

#[test]
fn json_rows_mirror_csv_rows_exactly() {
    let mut spec = small_spec();
    let (csv_rows, _) = sweep_bytes(&spec);
    spec.format = OutputFormat::Json;
    let (json_rows, bytes) = sweep_bytes(&spec);
    assert_eq!(csv_rows, json_rows, "format choice must not affect values");
    let parsed: Vec<Row> = serde_json::from_slice(&bytes).expect("valid JSON");
    assert_eq!(parsed, csv_rows, "JSON round-trips every field");
    let text = String::from_utf8(bytes).unwrap();
    for key in [
        "\"schema\"", "\"N\"", "\"policy\"", "\"M\"", "\"K\"", "\"trials\"",
        "\"v_holevo\"", "\"sigma\"", "\"ci_low\"", "\"ci_high\"", "\"sql_ref\"",
        "\"hl_ref\"", "\"asym_ref\"", "\"seed\"",
    ] {
        assert!(text.contains(key), "JSON field {key} present");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let spec = small_spec();
    let (_, first) = sweep_bytes(&spec);
    let (_, second) = sweep_bytes(&spec);
    assert_eq!(first, second, "same spec, same bytes");
}

#[test]
fn comparison_preset_covers_the_three_policy_grid() {
    let spec = SweepSpec::fig3();
    let points = spec.points();
    assert_eq!(points.len(), 18);
    assert_eq!(spec.trials, 1000);
    let expect: Vec<(phasesim_core::PolicyKind, u32)> = vec![
        (phasesim_core::PolicyKind::Nonadaptive, 6),
        (phasesim_core::PolicyKind::Kitaev, 1),
        (phasesim_core::PolicyKind::Adaptive, 6),
    ];
    assert_eq!(spec.pairs, expect);
    for (i, point) in points.iter().enumerate() {
        assert_eq!(point.k, (i % 6) as u32, "K cycles 0..5 within each pair");
    }
}

#[test]
fn nonadaptive_rows_report_the_matched_resource_count() {
    let mut spec = SweepSpec::from_flags(
        &["nonadaptive".into(), "adaptive".into()],
        &[6],
        &["1".into()],
    )
    .expect("valid flags");
    spec.trials = 50;
    spec.bootstrap_b = 999;
    let (rows, _) = sweep_bytes(&spec);
    assert_eq!(rows.len(), 2);
    assert_eq!(
        rows[0].n, rows[1].n,
        "nonadaptive row is resource-matched to the (M, K) grid point"
    );
    assert_eq!(rows[0].n, 18, "M(2^(K+1)-1) = 6 * 3");
}

fn run_binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_phasesim"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn usage_errors_exit_with_code_2() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["sweep", "--policy", "kitaev"],                // no --k
        vec!["sweep", "--policy", "kitaev", "--m", "2", "--k", "0"], // kitaev M != 1
        vec!["sweep", "--policy", "waffle", "--k", "0"],    // unknown policy
        vec!["sweep", "--preset", "fig3", "--policy", "kitaev", "--k", "0"], // conflict
        vec!["verify", "medium"],                           // unknown level
        vec!["frobnicate"],                                 // unknown subcommand
    ];
    for args in cases {
        let out = run_binary(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "args {args:?} stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn unwritable_output_path_exits_with_code_4() {
    let out = run_binary(&[
        "sweep",
        "--policy",
        "kitaev",
        "--k",
        "0",
        "--trials",
        "10",
        "--bootstrap-b",
        "999",
        "--out",
        "/nonexistent-dir/rows.csv",
    ]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn successful_sweep_exits_zero_and_prints_csv() {
    let out = run_binary(&[
        "sweep",
        "--policy",
        "kitaev",
        "--k",
        "0,1",
        "--trials",
        "50",
        "--bootstrap-b",
        "999",
        "--seed",
        "7",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with(CSV_HEADER));
    assert_eq!(text.lines().count(), 3);
}
