use std::process::Command;

use thermo_hindcast::diagnostics::{
    dataset_diagnostics, efficiency_innovation_gap, gwp_growth_decomposition, GrowthDiagnostics, DECADE,
};
use thermo_hindcast::hindcast::{run_hindcast, EtaTechSource, HindcastConfig};
use thermo_hindcast::identity::{estimate_lambda, wealth_series};
use thermo_hindcast::ingest::{load_fixture_dataset, EconomicDataset, FuelSeries};
use thermo_hindcast::report::ReportEnvelope;
use thermo_hindcast::techchange::{eta_tech_physical, ProductionWeighting};
use thermo_hindcast::{AnnualSeries, Unit, YearRange};

const BIN: &str = env!("CARGO_BIN_EXE_thermo-hindcast");

fn json(args: &[&str]) -> ReportEnvelope {
    let out = Command::new(BIN)
        .args(args)
        .args(["--manifest", "fixture", "--format", "json"])
        .env_remove("THERMO_HINDCAST_FIXTURES")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    ReportEnvelope::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap()
}

fn years(a: i32, b: i32) -> YearRange {
    YearRange::new(a, b).unwrap()
}

fn fixture_diagnostics() -> GrowthDiagnostics {
    dataset_diagnostics(&load_fixture_dataset().unwrap(), DECADE).unwrap()
}

#[test]
fn rate_of_return_history() {
    let diag = fixture_diagnostics();
    let mean = diag.eta.mean_over(years(1970, 2010)).unwrap();
    assert!((mean - 0.019).abs() < 0.001, "{mean}");
    let (peak_year, peak) = diag
        .eta
        .slice(years(1950, 2010))
        .unwrap()
        .iter()
        .fold((0, 0.0), |best, (y, v)| if v > best.1 { (y, v) } else { best });
    assert_eq!(peak_year, 2008);
    assert!((peak - 0.0224).abs() < 0.001, "{peak}");
}

#[test]
fn innovation_history() {
    let diag = fixture_diagnostics();
    let early = diag.innovation.mean_over(years(1950, 1960)).unwrap();
    let late = diag.innovation.mean_over(years(1990, 2010)).unwrap();
    assert!((early - 0.033).abs() < 0.0015, "{early}");
    assert!((late - 0.006).abs() < 0.001, "{late}");

    // Smoothed innovation drops below the rate of return in the late 1970s.
    let (eta, innovation, _) = diag.rates(true);
    let crossing = (1950..=2010)
        .find(|&y| innovation.at(y).unwrap() < eta.at(y).unwrap())
        .unwrap();
    assert!((1975..=1982).contains(&crossing), "{crossing}");
}

#[test]
fn smoothed_gwp_growth_slows_after_1980() {
    let diag = fixture_diagnostics();
    let (_, _, gwp) = diag.rates(true);
    for y in 1950..=1970 {
        let g = gwp.at(y).unwrap();
        assert!((0.04..=0.05).contains(&g), "{y}: {g}");
    }
    let late = gwp.mean_over(years(1981, 2010)).unwrap();
    assert!((late - 0.03).abs() < 0.005, "{late}");
}

#[test]
fn efficiency_tracks_innovation_within_lambda_wobble() {
    let data = load_fixture_dataset().unwrap();
    let diag = dataset_diagnostics(&data, 1).unwrap();
    let c = wealth_series(data.gwp(), data.initial_wealth()).unwrap();
    let wobble = estimate_lambda(data.energy(), &c, years(1970, 2010)).unwrap().relative_sd;
    let gap = efficiency_innovation_gap(diag.efficiency.as_ref().unwrap(), &diag.eta).unwrap();
    assert!(gap < 2.0 * wobble, "{gap} vs {wobble}");
}

#[test]
fn logistic_world_satisfies_growth_identity() {
    let (eta0, eta_tech, w0) = (0.01f64, 0.051, 1e15f64);
    let eta = |t: f64| {
        let g = (eta_tech * t).exp();
        eta0 * g / (1.0 + 2.0 * eta0 * (g - 1.0) / eta_tech)
    };
    // ln C(t) = ln C0 + ½ ln(1 + 2η₀(e^{η_tech t} − 1)/η_tech)
    let ln_c = |t: f64| w0.ln() + 0.5 * (2.0 * eta0 * ((eta_tech * t).exp() - 1.0) / eta_tech).ln_1p();
    let y: Vec<f64> = (0..=80).map(|k| eta(k as f64) * ln_c(k as f64).exp()).collect();
    let gwp = AnnualSeries::new("gwp", 1950, y, Unit::CurrencyPerYear).unwrap();
    let diag = gwp_growth_decomposition(&gwp, w0).unwrap();
    assert!(diag.max_identity_residual < 1e-4, "{}", diag.max_identity_residual);
}

#[test]
fn lambda_column_averages_near_seven_milliwatts() {
    let env = json(&["diagnostics", "--window", "1970:2010"]);
    let t = env.table("diagnostics").unwrap();
    let picked: Vec<f64> = (0..t.rows.len())
        .filter(|&i| (1970.0..=2010.0).contains(&t.number(i, "year").unwrap()))
        .map(|i| t.number(i, "lambda").unwrap())
        .collect();
    assert_eq!(picked.len(), 41);
    let mean = picked.iter().sum::<f64>() / picked.len() as f64;
    assert!((mean * 1e3 - 7.1).abs() < 0.15, "{mean}");
    let summary = env.table("lambda").unwrap().number(0, "mean_lambda").unwrap();
    assert!((summary - mean).abs() <= 1e-15 * mean);
}

#[test]
fn unit_smoothing_window_changes_nothing() {
    let plain = json(&["diagnostics"]);
    let one = json(&["diagnostics", "--smooth", "1"]);
    assert_eq!(plain.tables, one.tables);
}

#[test]
fn smoothed_eta_and_gwp_growth_converge_by_2010() {
    let data = load_fixture_dataset().unwrap();
    let diag = dataset_diagnostics(&data, DECADE).unwrap();
    let (eta, _, gwp) = diag.rates(true);
    let (e, g) = (eta.at(2010).unwrap(), gwp.at(2010).unwrap());
    assert!((e - 0.025).abs() < 0.005 && (g - 0.025).abs() < 0.005, "{e} {g}");
    let (e60, g60) = (eta.at(1960).unwrap(), gwp.at(1960).unwrap());
    assert!((g60 - e60) > 3.0 * (g - e).abs());
}

#[test]
fn explicit_rate_matches_implied_pathway() {
    let data = load_fixture_dataset().unwrap();
    let diag = dataset_diagnostics(&data, DECADE).unwrap();
    let implied = run_hindcast(&data, &diag, &HindcastConfig::default()).unwrap();
    let explicit = run_hindcast(
        &data,
        &diag,
        &HindcastConfig {
            eta_tech: EtaTechSource::Explicit(0.051),
            ..HindcastConfig::default()
        },
    )
    .unwrap();
    for (a, b) in [
        (implied.eta.hindcast, explicit.eta.hindcast),
        (implied.innovation.hindcast, explicit.innovation.hindcast),
        (implied.gwp_growth.hindcast, explicit.gwp_growth.hindcast),
    ] {
        assert!((a - b).abs() < 5e-5, "{a} {b}");
    }
    let exact = run_hindcast(
        &data,
        &diag,
        &HindcastConfig {
            eta_tech: EtaTechSource::Explicit(implied.eta_tech),
            ..HindcastConfig::default()
        },
    )
    .unwrap();
    assert_eq!(exact.gwp_growth, implied.gwp_growth);
}

#[test]
fn in_sample_decade_tracks_observations() {
    let env = json(&["hindcast", "--eval", "1960:1970"]);
    let t = env.table("hindcast").unwrap();
    assert!(t.number(0, "skill_clamped").unwrap() > 0.9);
    // Persistence is itself nearly exact for innovation one decade out, so
    // only the hindcast error is bounded for those rows.
    for row in 0..3 {
        let miss = (t.number(row, "hindcast").unwrap() - t.number(row, "observed").unwrap()).abs();
        assert!(miss < 0.005, "row {row}: {miss}");
    }
}

#[test]
fn physical_pathway_runs() {
    let env = json(&["hindcast", "--eta-tech", "physical"]);
    let rate = env.table("parameters").unwrap().number(0, "eta_tech").unwrap();
    assert!(rate > 0.0 && rate < 0.2, "{rate}");
}

#[test]
fn single_period_gives_one_row() {
    let env = json(&["techchange", "--periods", "1950:2010"]);
    assert_eq!(env.table("components").unwrap().rows.len(), 1);
    let residual = env.table("components").unwrap().number(0, "residual").unwrap();
    assert!((residual - 0.016).abs() < 0.002, "{residual}");
}

#[test]
fn constant_world_has_no_technological_change() {
    let flat = |name: &str, v: f64, unit: Unit| AnnualSeries::new(name, 1940, vec![v; 75], unit).unwrap();
    let data = EconomicDataset::new(
        flat("gwp", 5e13, Unit::CurrencyPerYear),
        flat("energy", 1.5e13, Unit::Watts),
        2e15,
    )
    .unwrap()
    .with_fuels(FuelSeries {
        oil_reserves: flat("oil_reserves", 8000.0, Unit::Energy),
        gas_reserves: flat("gas_reserves", 6000.0, Unit::Energy),
        oil_production: flat("oil_production", 150.0, Unit::EnergyPerYear),
        gas_production: flat("gas_production", 90.0, Unit::EnergyPerYear),
        coal_production: flat("coal_production", 120.0, Unit::EnergyPerYear),
        oil_discovery: Some(flat("oil_discovery", 150.0, Unit::EnergyPerYear)),
        gas_discovery: Some(flat("gas_discovery", 90.0, Unit::EnergyPerYear)),
    })
    .unwrap()
    .with_material("cement", flat("cement", 3e9, Unit::VolumePerYear))
    .unwrap()
    .with_material("wood", flat("wood", 2e9, Unit::VolumePerYear))
    .unwrap()
    .with_material("iron_steel", flat("iron_steel", 1400.0, Unit::MassPerYear))
    .unwrap()
    .with_material("copper", flat("copper", 18.0, Unit::MassPerYear))
    .unwrap()
    .with_inflation(flat("inflation", 0.03, Unit::FractionPerYear))
    .unwrap();
    for period in [years(1950, 1970), years(1990, 2010)] {
        let c = eta_tech_physical(&data, period, ProductionWeighting::PeriodMean).unwrap();
        assert_eq!(
            (c.eta_delta, c.eta_reserves, c.eta_extraction, c.eta_tech_total),
            (0.0, 0.0, 0.0, 0.0),
            "{period}"
        );
    }
}
