use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use thermo_hindcast::report::ReportEnvelope;

const BIN: &str = env!("CARGO_BIN_EXE_thermo-hindcast");
const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("THERMO_HINDCAST_FIXTURES")
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Copies the bundled CSVs into a scratch directory.
fn fixture_copy() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(FIXTURES).unwrap() {
        let path = entry.unwrap().path();
        std::fs::copy(&path, dir.path().join(path.file_name().unwrap())).unwrap();
    }
    dir
}

/// A user manifest with just GWP and energy, energy tagged with `energy_unit`.
fn core_manifest(dir: &Path, energy_unit: &str) -> PathBuf {
    let path = dir.join("user.txt");
    std::fs::write(
        &path,
        format!(
            "gwp = gwp.csv USD/yr\nenergy = energy.csv {energy_unit}\n\n[calibration]\neta0 = 0.01\nyear = 1960\n"
        ),
    )
    .unwrap();
    path
}

fn drop_years(csv: &Path, years: &[i32]) {
    let text = std::fs::read_to_string(csv).unwrap();
    let kept: Vec<&str> = text
        .lines()
        .filter(|l| !years.iter().any(|y| l.starts_with(&format!("{y},"))))
        .collect();
    std::fs::write(csv, kept.join("\n") + "\n").unwrap();
}

#[test]
fn bundled_fixture_validates() {
    let out = run(&["validate", "--manifest", "fixture"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("material.cement"));
}

#[test]
fn gapped_series_exits_4_and_names_years() {
    let dir = fixture_copy();
    drop_years(&dir.path().join("gwp.csv"), &[1971, 1972, 1973]);
    let manifest = core_manifest(dir.path(), "EJ/yr");
    let out = run(&["validate", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let err = stderr(&out);
    assert!(err.contains("1971") && err.contains("1973"), "{err}");
}

#[test]
fn single_missing_year_is_filled_and_recorded() {
    let dir = fixture_copy();
    drop_years(&dir.path().join("gwp.csv"), &[1985]);
    let manifest = core_manifest(dir.path(), "EJ/yr");
    let out = run(&["validate", "--manifest", manifest.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let env = ReportEnvelope::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(env.provenance.get("dataset").map(String::as_str), Some("user data"));
    assert!(env.provenance.values().any(|v| v.contains("1985")), "{:?}", env.provenance);
}

#[test]
fn malformed_csv_exits_2() {
    let dir = fixture_copy();
    let path = dir.path().join("gwp.csv");
    let text = std::fs::read_to_string(&path).unwrap().replacen("1950,", "1950,abc", 1);
    std::fs::write(&path, text).unwrap();
    let manifest = core_manifest(dir.path(), "EJ/yr");
    let out = run(&["validate", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn unknown_unit_exits_3() {
    let dir = fixture_copy();
    let manifest = core_manifest(dir.path(), "furlongs");
    let out = run(&["validate", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn missing_energy_exits_5() {
    let dir = fixture_copy();
    let manifest = dir.path().join("m.txt");
    std::fs::write(&manifest, "gwp = gwp.csv USD/yr\n[calibration]\neta0 = 0.01\nyear = 1960\n").unwrap();
    let out = run(&["validate", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5), "{}", stderr(&out));
}

#[test]
fn exajoules_labelled_as_watts_warns() {
    let dir = fixture_copy();
    let manifest = core_manifest(dir.path(), "W");
    let out = run(&["validate", "--manifest", manifest.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("warning"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["hindcast"]).status.code(), Some(64));
    assert_eq!(
        run(&["fit", "--manifest", "fixture", "--window", "2010-1950"]).status.code(),
        Some(64)
    );
    assert!(run(&["--help"]).status.success());
}

#[test]
fn short_fit_window_fails() {
    let out = run(&["fit", "--manifest", "fixture", "--window", "2000:2001"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failure_leaves_no_output_file() {
    let dir = fixture_copy();
    drop_years(&dir.path().join("gwp.csv"), &[1971, 1972]);
    let manifest = core_manifest(dir.path(), "EJ/yr");
    let report = dir.path().join("out.csv");
    let svg = dir.path().join("out.svg");
    let out = run(&[
        "diagnostics",
        "--manifest",
        manifest.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(!report.exists() && !svg.exists());
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn fixture_directory_override() {
    let dir = fixture_copy();
    drop_years(&dir.path().join("energy.csv"), &[1990, 1991]);
    let out = Command::new(BIN)
        .args(["validate", "--manifest", "fixture"])
        .env("THERMO_HINDCAST_FIXTURES", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn output_and_plot_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("hindcast.json");
    let svg = dir.path().join("hindcast.svg");
    let out = run(&[
        "hindcast",
        "--manifest",
        "fixture",
        "--format",
        "json",
        "--output",
        report.to_str().unwrap(),
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let env = ReportEnvelope::from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(env.command, "hindcast");
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert!(svg.starts_with("<?xml") || svg.starts_with("<svg"));
    assert!(svg.contains("<metadata>"), "timestamp expected without --reproducible");
}

#[test]
fn reproducible_svg_has_no_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("fit.svg");
    let out = run(&[
        "fit",
        "--manifest",
        "fixture",
        "--reproducible",
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(!std::fs::read_to_string(&svg).unwrap().contains("<metadata>"));
}

#[test]
fn json_and_csv_agree() {
    let json = run(&["diagnostics", "--manifest", "fixture", "--format", "json"]);
    let csv = run(&["diagnostics", "--manifest", "fixture", "--format", "csv"]);
    let env = ReportEnvelope::from_json(&String::from_utf8(json.stdout).unwrap()).unwrap();
    let table = env.table("diagnostics").unwrap();
    let csv = String::from_utf8(csv.stdout).unwrap();
    let block = csv.split("\n\n").next().unwrap();
    let mut rdr = csv::Reader::from_reader(block.as_bytes());
    let header = rdr.headers().unwrap().clone();
    let mut n = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.unwrap();
        for (j, col) in table.columns.iter().enumerate() {
            let cell = &rec[j + 1];
            match table.number(i, &col.name) {
                Some(v) => assert_eq!(cell.parse::<f64>().unwrap(), v, "{} row {i}", &header[j + 1]),
                None => assert!(cell.is_empty() || cell.parse::<f64>().is_err()),
            }
        }
        n += 1;
    }
    assert_eq!(n, table.rows.len());
}
