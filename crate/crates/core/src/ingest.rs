//! Reading series files and manifests, unit normalization, and the bundled
//! fixture dataset.
//!
//! # Manifest grammar
//!
//! A manifest is a line-oriented text file. Blank lines and lines starting
//! with `#` are ignored. Outside any section each line reads
//!
//! ```text
//! <series> = <source> <unit>
//! ```
//!
//! where `<source>` is a path relative to the manifest, or `fixture:<file>`
//! for a bundled file, and `<unit>` is a unit token such as `EJ/yr`.
//! Recognized series are `gwp`, `energy`, `oil_reserves`, `gas_reserves`,
//! `oil_production`, `gas_production`, `coal_production`, `oil_discovery`,
//! `gas_discovery`, `inflation` and `material.<class>`.
//!
//! A `[calibration]` section holds either `initial_wealth = <USD>` or the
//! pair `eta0 = <fraction/yr>` and `year = <year>`. A `[provenance]` section
//! holds free-form `key = value` labels.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::series::{cumulative_trapezoid, AnnualSeries, YearRange};
use crate::units::Unit;

/// Environment variable that replaces the bundled fixture directory.
pub const FIXTURE_DIR_ENV: &str = "THERMO_HINDCAST_FIXTURES";

/// Manifest argument that selects the bundled dataset.
pub const BUNDLED_MANIFEST: &str = "fixture";

/// Shortest overlap between GWP and energy that the diagnostics accept.
pub const MIN_OVERLAP_YEARS: usize = 10;

/// Plausible range for global primary power, in W.
pub const PLAUSIBLE_POWER_W: (f64, f64) = (1e12, 1e14);

const EMBEDDED: &[(&str, &str)] = &[
    ("manifest.txt", include_str!("../fixtures/manifest.txt")),
    ("gwp.csv", include_str!("../fixtures/gwp.csv")),
    ("energy.csv", include_str!("../fixtures/energy.csv")),
    ("oil_reserves.csv", include_str!("../fixtures/oil_reserves.csv")),
    ("gas_reserves.csv", include_str!("../fixtures/gas_reserves.csv")),
    ("oil_production.csv", include_str!("../fixtures/oil_production.csv")),
    ("gas_production.csv", include_str!("../fixtures/gas_production.csv")),
    ("coal_production.csv", include_str!("../fixtures/coal_production.csv")),
    ("cement.csv", include_str!("../fixtures/cement.csv")),
    ("wood.csv", include_str!("../fixtures/wood.csv")),
    ("iron_steel.csv", include_str!("../fixtures/iron_steel.csv")),
    ("copper.csv", include_str!("../fixtures/copper.csv")),
    ("inflation.csv", include_str!("../fixtures/inflation.csv")),
];

/// A parsed series together with the years that were filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSeries {
    pub series: AnnualSeries,
    pub filled_years: Vec<i32>,
}

/// Parses `year,value[,unit]` CSV text.
///
/// Rows must ascend by year. A single missing year is filled geometrically
/// from its neighbours (arithmetically if either neighbour is not positive);
/// longer gaps are rejected.
pub fn parse_series_csv(
    text: &str,
    source_name: &str,
    series_name: &str,
    expected_unit: Unit,
) -> Result<ParsedSeries> {
    let parse_err = |line: u64, message: String| Error::Parse {
        source_name: source_name.to_string(),
        line,
        message,
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let names: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    let has_unit = match names.as_slice() {
        [y, v] if y == "year" && v == "value" => false,
        [y, v, u] if y == "year" && v == "value" && u == "unit" => true,
        _ => {
            return Err(parse_err(
                1,
                format!("expected header 'year,value[,unit]', found '{}'", names.join(",")),
            ))
        }
    };

    let mut start_year: Option<i32> = None;
    let mut values: Vec<f64> = Vec::new();
    let mut filled = Vec::new();

    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let want = if has_unit { 3 } else { 2 };
        if record.len() != want {
            return Err(parse_err(
                line,
                format!("expected {want} fields, found {}", record.len()),
            ));
        }
        let year: i32 = record[0]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid year '{}'", &record[0])))?;
        let value: f64 = record[1]
            .parse()
            .map_err(|_| parse_err(line, format!("invalid value '{}'", &record[1])))?;
        if !value.is_finite() {
            return Err(parse_err(line, format!("non-finite value '{}'", &record[1])));
        }
        if has_unit {
            let unit: Unit = record[2].parse()?;
            if unit != expected_unit {
                return Err(Error::Unit(format!(
                    "{source_name}: line {line}: unit {unit} does not match declared {expected_unit}"
                )));
            }
        }

        match start_year {
            None => start_year = Some(year),
            Some(start) => {
                let next = start + values.len() as i32;
                if year < next {
                    return Err(parse_err(
                        line,
                        format!("year {year} is out of order or duplicated"),
                    ));
                }
                let missing = year - next;
                if missing >= 2 {
                    return Err(Error::Gap {
                        series: series_name.to_string(),
                        first: next,
                        last: year - 1,
                    });
                }
                if missing == 1 {
                    let prev = *values.last().unwrap();
                    let fill = if prev > 0.0 && value > 0.0 {
                        (prev * value).sqrt()
                    } else {
                        0.5 * (prev + value)
                    };
                    values.push(fill);
                    filled.push(next);
                }
            }
        }
        values.push(value);
    }

    let start = start_year.ok_or_else(|| parse_err(1, "no data rows".into()))?;
    Ok(ParsedSeries {
        series: AnnualSeries::new(series_name, start, values, expected_unit)?,
        filled_years: filled,
    })
}

/// Serializes a series as `year,value,unit` with round-trip exact floats.
pub fn write_series_csv(series: &AnnualSeries) -> String {
    let mut out = String::from("year,value,unit\n");
    for (year, v) in series.iter() {
        out.push_str(&format!("{year},{v:?},{}\n", series.unit()));
    }
    out
}

/// Initial wealth `W` such that `Y(at_year) / (W + ∫Y) = target_eta0`,
/// with the integral taken from the first year of `gwp` to `at_year`.
pub fn calibrate_initial_wealth(gwp: &AnnualSeries, target_eta0: f64, at_year: i32) -> Result<f64> {
    if !(target_eta0 > 0.0) {
        return Err(Error::Calibration(format!(
            "target rate of return must be positive, got {target_eta0}"
        )));
    }
    let y_at = gwp.at(at_year)?;
    let upto = (at_year - gwp.start_year()) as usize;
    let accumulated = cumulative_trapezoid(&gwp.values()[..=upto], 1.0, 0.0)[upto];
    let w = y_at / target_eta0 - accumulated;
    if !(w > 0.0) {
        return Err(Error::Calibration(format!(
            "rate of return {target_eta0} at {at_year} needs initial wealth {w:e}, which is not positive"
        )));
    }
    Ok(w)
}

/// How the initial wealth is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Calibration {
    InitialWealth(f64),
    EtaAt { eta0: f64, year: i32 },
}

/// Where a series comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Fixture(String),
    File(PathBuf),
}

impl Source {
    fn parse(token: &str, base: Option<&Path>) -> Source {
        match token.strip_prefix("fixture:") {
            Some(name) => Source::Fixture(name.to_string()),
            None => {
                let p = PathBuf::from(token);
                match base {
                    Some(dir) if p.is_relative() => Source::File(dir.join(p)),
                    _ => Source::File(p),
                }
            }
        }
    }

    fn label(&self) -> String {
        match self {
            Source::Fixture(name) => format!("fixture:{name}"),
            Source::File(p) => p.display().to_string(),
        }
    }

    fn read(&self) -> Result<String> {
        match self {
            Source::Fixture(name) => read_fixture(name),
            Source::File(p) => {
                std::fs::read_to_string(p).map_err(|e| Error::io(p.display().to_string(), e))
            }
        }
    }
}

/// Reads a bundled fixture file, honouring the directory override.
pub fn read_fixture(name: &str) -> Result<String> {
    if let Ok(dir) = std::env::var(FIXTURE_DIR_ENV) {
        let path = Path::new(&dir).join(name);
        return std::fs::read_to_string(&path).map_err(|e| Error::io(path.display().to_string(), e));
    }
    EMBEDDED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| text.to_string())
        .ok_or_else(|| Error::Coverage(format!("no bundled fixture named '{name}'")))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesEntry {
    pub name: String,
    pub source: Source,
    pub unit: Unit,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetManifest {
    pub entries: Vec<SeriesEntry>,
    pub calibration: Option<Calibration>,
    pub provenance: BTreeMap<String, String>,
    /// True when the manifest is the bundled one.
    pub bundled: bool,
}

const SERIES_NAMES: &[&str] = &[
    "gwp",
    "energy",
    "oil_reserves",
    "gas_reserves",
    "oil_production",
    "gas_production",
    "coal_production",
    "oil_discovery",
    "gas_discovery",
    "inflation",
];

impl DatasetManifest {
    /// Parses manifest text; relative paths resolve against `base`.
    pub fn parse(text: &str, source_name: &str, base: Option<&Path>) -> Result<Self> {
        #[derive(PartialEq)]
        enum Section {
            Series,
            Calibration,
            Provenance,
        }
        let err = |line: usize, message: String| Error::Parse {
            source_name: source_name.to_string(),
            line: line as u64,
            message,
        };

        let mut manifest = DatasetManifest::default();
        let mut section = Section::Series;
        let mut eta0: Option<f64> = None;
        let mut year: Option<i32> = None;
        let mut wealth: Option<f64> = None;

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('[') {
                section = match line {
                    "[calibration]" => Section::Calibration,
                    "[provenance]" => Section::Provenance,
                    other => return Err(err(line_no, format!("unknown section {other}"))),
                };
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(line_no, "expected 'key = value'".into()))?;

            match section {
                Section::Series => {
                    let known = SERIES_NAMES.contains(&key)
                        || key.strip_prefix("material.").is_some_and(|c| !c.is_empty());
                    if !known {
                        return Err(err(line_no, format!("unknown series '{key}'")));
                    }
                    if manifest.entries.iter().any(|e| e.name == key) {
                        return Err(err(line_no, format!("series '{key}' declared twice")));
                    }
                    let (src, unit) = value
                        .rsplit_once(char::is_whitespace)
                        .map(|(s, u)| (s.trim(), u.trim()))
                        .ok_or_else(|| err(line_no, "expected '<source> <unit>'".into()))?;
                    let unit: Unit = unit.parse()?;
                    manifest.entries.push(SeriesEntry {
                        name: key.to_string(),
                        source: Source::parse(src, base),
                        unit,
                    });
                }
                Section::Calibration => {
                    let number = |v: &str| -> Result<f64> {
                        v.parse()
                            .map_err(|_| err(line_no, format!("invalid number '{v}'")))
                    };
                    match key {
                        "eta0" => eta0 = Some(number(value)?),
                        "year" => {
                            year = Some(
                                value
                                    .parse()
                                    .map_err(|_| err(line_no, format!("invalid year '{value}'")))?,
                            )
                        }
                        "initial_wealth" => wealth = Some(number(value)?),
                        other => {
                            return Err(err(line_no, format!("unknown calibration key '{other}'")))
                        }
                    }
                }
                Section::Provenance => {
                    manifest
                        .provenance
                        .insert(key.to_string(), value.to_string());
                }
            }
        }

        manifest.calibration = match (wealth, eta0, year) {
            (Some(w), None, None) => Some(Calibration::InitialWealth(w)),
            (None, Some(eta0), Some(year)) => Some(Calibration::EtaAt { eta0, year }),
            (None, None, None) => None,
            _ => {
                return Err(err(
                    0,
                    "calibration needs either initial_wealth or both eta0 and year".into(),
                ))
            }
        };
        Ok(manifest)
    }

    /// Loads a manifest from disk, or the bundled one for `fixture`.
    pub fn load(arg: &str) -> Result<Self> {
        if arg == BUNDLED_MANIFEST {
            let mut m = DatasetManifest::parse(&read_fixture("manifest.txt")?, "fixture:manifest.txt", None)?;
            m.bundled = true;
            return Ok(m);
        }
        let path = Path::new(arg);
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(arg, e))?;
        DatasetManifest::parse(&text, arg, path.parent())
    }

    fn entry(&self, name: &str) -> Option<&SeriesEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// Fossil fuel series used by the reserve ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct FuelSeries {
    pub oil_reserves: AnnualSeries,
    pub gas_reserves: AnnualSeries,
    pub oil_production: AnnualSeries,
    pub gas_production: AnnualSeries,
    pub coal_production: AnnualSeries,
    pub oil_discovery: Option<AnnualSeries>,
    pub gas_discovery: Option<AnnualSeries>,
}

/// A validated bundle of input series in canonical units.
#[derive(Debug, Clone, PartialEq)]
pub struct EconomicDataset {
    gwp: AnnualSeries,
    energy: AnnualSeries,
    initial_wealth: f64,
    fuels: Option<FuelSeries>,
    materials: BTreeMap<String, AnnualSeries>,
    inflation: Option<AnnualSeries>,
    provenance: BTreeMap<String, String>,
    warnings: Vec<String>,
}

impl EconomicDataset {
    /// `gwp` in USD/yr and `energy` in W; the two must overlap for at least
    /// ten years.
    pub fn new(gwp: AnnualSeries, energy: AnnualSeries, initial_wealth: f64) -> Result<Self> {
        if gwp.unit() != Unit::CurrencyPerYear {
            return Err(Error::Unit(format!("gwp must be in USD/yr, not {}", gwp.unit())));
        }
        if energy.unit() != Unit::Watts {
            return Err(Error::Unit(format!("energy must be in W, not {}", energy.unit())));
        }
        gwp.require_positive()?;
        energy.require_positive()?;
        let overlap = gwp.span().intersect(energy.span()).map_or(0, |r| r.len());
        if overlap < MIN_OVERLAP_YEARS {
            return Err(Error::Coverage(format!(
                "gwp ({}) and energy ({}) overlap for {overlap} years, need {MIN_OVERLAP_YEARS}",
                gwp.span(),
                energy.span()
            )));
        }
        if !(initial_wealth > 0.0) {
            return Err(Error::Calibration(format!(
                "initial wealth must be positive, got {initial_wealth}"
            )));
        }
        let mut warnings = Vec::new();
        let (lo, hi) = PLAUSIBLE_POWER_W;
        if let Some((year, v)) = energy.iter().find(|&(_, v)| v < lo || v > hi) {
            warnings.push(format!(
                "energy: {v:e} W in {year} is outside the plausible global range {lo:e}-{hi:e} W; check the declared unit"
            ));
        }
        Ok(EconomicDataset {
            gwp,
            energy,
            initial_wealth,
            fuels: None,
            materials: BTreeMap::new(),
            inflation: None,
            provenance: BTreeMap::new(),
            warnings,
        })
    }

    pub fn with_fuels(mut self, fuels: FuelSeries) -> Result<Self> {
        for s in [
            &fuels.oil_reserves,
            &fuels.gas_reserves,
            &fuels.oil_production,
            &fuels.gas_production,
            &fuels.coal_production,
        ] {
            s.require_positive()?;
        }
        for s in [&fuels.oil_reserves, &fuels.gas_reserves] {
            expect_unit(s, Unit::Energy)?;
        }
        for s in [&fuels.oil_production, &fuels.gas_production, &fuels.coal_production] {
            expect_unit(s, Unit::EnergyPerYear)?;
        }
        for s in fuels.oil_discovery.iter().chain(fuels.gas_discovery.iter()) {
            expect_unit(s, Unit::EnergyPerYear)?;
        }
        self.fuels = Some(fuels);
        Ok(self)
    }

    pub fn with_material(mut self, class: impl Into<String>, series: AnnualSeries) -> Result<Self> {
        if !matches!(series.unit(), Unit::MassPerYear | Unit::VolumePerYear) {
            return Err(Error::Unit(format!(
                "{}: material consumption must be in Mt/yr or m3/yr, not {}",
                series.name(),
                series.unit()
            )));
        }
        series.require_positive()?;
        self.materials.insert(class.into(), series);
        Ok(self)
    }

    pub fn with_inflation(mut self, inflation: AnnualSeries) -> Result<Self> {
        expect_unit(&inflation, Unit::FractionPerYear)?;
        self.inflation = Some(inflation);
        Ok(self)
    }

    pub fn with_provenance(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.provenance.insert(key.into(), value.into());
        self
    }

    pub fn gwp(&self) -> &AnnualSeries {
        &self.gwp
    }

    /// Primary power consumption in W.
    pub fn energy(&self) -> &AnnualSeries {
        &self.energy
    }

    pub fn initial_wealth(&self) -> f64 {
        self.initial_wealth
    }

    pub fn fuels(&self) -> Option<&FuelSeries> {
        self.fuels.as_ref()
    }

    pub fn materials(&self) -> &BTreeMap<String, AnnualSeries> {
        &self.materials
    }

    pub fn inflation(&self) -> Option<&AnnualSeries> {
        self.inflation.as_ref()
    }

    pub fn provenance(&self) -> &BTreeMap<String, String> {
        &self.provenance
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Years covered by both GWP and energy.
    pub fn overlap(&self) -> YearRange {
        self.gwp.span().intersect(self.energy.span()).unwrap()
    }
}

fn expect_unit(series: &AnnualSeries, unit: Unit) -> Result<()> {
    if series.unit() == unit {
        Ok(())
    } else {
        Err(Error::Unit(format!(
            "{}: expected {unit}, found {}",
            series.name(),
            series.unit()
        )))
    }
}

fn canonical_unit(name: &str) -> Option<Unit> {
    Some(match name {
        "gwp" => Unit::CurrencyPerYear,
        "energy" => Unit::Watts,
        "oil_reserves" | "gas_reserves" => Unit::Energy,
        "oil_production" | "gas_production" | "coal_production" | "oil_discovery"
        | "gas_discovery" => Unit::EnergyPerYear,
        "inflation" => Unit::FractionPerYear,
        _ => return None,
    })
}

fn load_entry(entry: &SeriesEntry, notes: &mut BTreeMap<String, String>) -> Result<AnnualSeries> {
    let text = entry.source.read()?;
    let parsed = parse_series_csv(&text, &entry.source.label(), &entry.name, entry.unit)?;
    let mut series = parsed.series;
    if let Some(target) = canonical_unit(&entry.name) {
        let factor = entry.unit.conversion_factor(target)?;
        if target != entry.unit {
            series = series.map(entry.name.clone(), target, |v| v * factor)?;
        }
    }
    notes.insert(format!("source.{}", entry.name), entry.source.label());
    if !parsed.filled_years.is_empty() {
        let years: Vec<String> = parsed.filled_years.iter().map(i32::to_string).collect();
        notes.insert(
            format!("interpolated.{}", entry.name),
            format!("{} year(s): {}", years.len(), years.join(" ")),
        );
    }
    Ok(series)
}

/// Loads, converts and cross-validates every series in the manifest.
///
/// Per-series failures are collected and reported together.
pub fn load_dataset(manifest: &DatasetManifest) -> Result<EconomicDataset> {
    let mut errors = Vec::new();
    let mut notes = BTreeMap::new();
    let mut loaded: BTreeMap<String, AnnualSeries> = BTreeMap::new();

    for entry in &manifest.entries {
        match load_entry(entry, &mut notes) {
            Ok(s) => {
                loaded.insert(entry.name.clone(), s);
            }
            Err(e) => errors.push(e),
        }
    }
    for required in ["gwp", "energy"] {
        if manifest.entry(required).is_none() {
            errors.push(Error::Coverage(format!("manifest declares no '{required}' series")));
        }
    }
    if manifest.calibration.is_none() {
        errors.push(Error::Coverage(
            "manifest has no [calibration] block; initial wealth is required".into(),
        ));
    }
    if !errors.is_empty() {
        return Err(aggregate(errors));
    }

    let gwp = loaded.remove("gwp").unwrap();
    let energy = loaded.remove("energy").unwrap();
    let initial_wealth = match manifest.calibration.unwrap() {
        Calibration::InitialWealth(w) => w,
        Calibration::EtaAt { eta0, year } => calibrate_initial_wealth(&gwp, eta0, year)?,
    };
    let mut dataset = EconomicDataset::new(gwp, energy, initial_wealth)?;

    let fuel_names = [
        "oil_reserves",
        "gas_reserves",
        "oil_production",
        "gas_production",
        "coal_production",
    ];
    let present = fuel_names.iter().filter(|n| loaded.contains_key(**n)).count();
    if present == fuel_names.len() {
        let mut take = |n: &str| loaded.remove(n).unwrap();
        let fuels = FuelSeries {
            oil_reserves: take("oil_reserves"),
            gas_reserves: take("gas_reserves"),
            oil_production: take("oil_production"),
            gas_production: take("gas_production"),
            coal_production: take("coal_production"),
            oil_discovery: loaded.remove("oil_discovery"),
            gas_discovery: loaded.remove("gas_discovery"),
        };
        dataset = collect(dataset.clone().with_fuels(fuels), &mut errors, &dataset);
    } else if present > 0 {
        let missing: Vec<&str> = fuel_names
            .iter()
            .copied()
            .filter(|n| !loaded.contains_key(*n))
            .collect();
        errors.push(Error::Coverage(format!(
            "fuel series incomplete, missing {}",
            missing.join(", ")
        )));
    }

    if let Some(infl) = loaded.remove("inflation") {
        dataset = collect(dataset.clone().with_inflation(infl), &mut errors, &dataset);
    }
    let material_keys: Vec<String> = loaded
        .keys()
        .filter(|k| k.starts_with("material."))
        .cloned()
        .collect();
    for key in material_keys {
        let series = loaded.remove(&key).unwrap();
        let class = key.trim_start_matches("material.").to_string();
        dataset = collect(dataset.clone().with_material(class, series), &mut errors, &dataset);
    }
    if !errors.is_empty() {
        return Err(aggregate(errors));
    }

    for (k, v) in &manifest.provenance {
        notes.insert(k.clone(), v.clone());
    }
    notes.insert(
        "dataset".into(),
        if manifest.bundled {
            "bundled synthetic-calibrated fixture".into()
        } else {
            "user data".into()
        },
    );
    for (k, v) in notes {
        dataset = dataset.with_provenance(k, v);
    }
    Ok(dataset)
}

// Keeps the dataset unchanged when a builder step fails, recording the error.
fn collect(
    result: Result<EconomicDataset>,
    errors: &mut Vec<Error>,
    fallback: &EconomicDataset,
) -> EconomicDataset {
    match result {
        Ok(d) => d,
        Err(e) => {
            errors.push(e);
            fallback.clone()
        }
    }
}

fn aggregate(mut errors: Vec<Error>) -> Error {
    if errors.len() == 1 {
        errors.pop().unwrap()
    } else {
        Error::Dataset(errors)
    }
}

/// The bundled dataset.
pub fn load_fixture_dataset() -> Result<EconomicDataset> {
    load_dataset(&DatasetManifest::load(BUNDLED_MANIFEST)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<ParsedSeries> {
        parse_series_csv(text, "test.csv", "x", Unit::CurrencyPerYear)
    }

    #[test]
    fn plain_parse() {
        let p = parse("year,value\n1950,100\n1951,110").unwrap();
        assert_eq!(p.series.start_year(), 1950);
        assert_eq!(p.series.values(), &[100.0, 110.0]);
        assert!(p.filled_years.is_empty());
    }

    #[test]
    fn single_year_gap_is_filled_geometrically() {
        let p = parse("year,value\r\n1950,100\r\n1952,121\r\n").unwrap();
        assert_eq!(p.series.len(), 3);
        assert!((p.series.values()[1] - 110.0).abs() < 1e-12);
        assert_eq!(p.filled_years, vec![1951]);
    }

    #[test]
    fn long_gap_names_missing_years() {
        match parse("year,value\n1950,100\n1954,150") {
            Err(Error::Gap { first, last, .. }) => assert_eq!((first, last), (1951, 1953)),
            other => panic!("expected gap error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_row_reports_line() {
        match parse("year,value\n1950,100\n1951,abc\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(parse("yr,v\n1950,1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse("year,value\n1951,1\n1950,2"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn unit_column_must_match() {
        assert!(parse("year,value,unit\n1950,1,USD/yr\n1951,2,USD/yr").is_ok());
        assert!(matches!(
            parse("year,value,unit\n1950,1,USD/yr\n1951,2,W"),
            Err(Error::Unit(_))
        ));
    }

    #[test]
    fn calibration_closed_form() {
        let y = AnnualSeries::new("y", 1950, vec![1.0; 11], Unit::CurrencyPerYear).unwrap();
        assert!((calibrate_initial_wealth(&y, 0.01, 1960).unwrap() - 90.0).abs() < 1e-12);
        let long = AnnualSeries::new("y", 1900, vec![1.0; 61], Unit::CurrencyPerYear).unwrap();
        assert!(matches!(
            calibrate_initial_wealth(&long, 10.0, 1960),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn fixture_loads_in_canonical_units() {
        let d = load_fixture_dataset().unwrap();
        assert!(d.overlap().contains(YearRange::new(1950, 2010).unwrap()));
        assert_eq!(d.energy().unit(), Unit::Watts);
        assert!(d.warnings().is_empty());
        assert!(d.fuels().is_some() && d.inflation().is_some());
        assert_eq!(d.materials().len(), 4);
        assert_eq!(d.provenance()["dataset"], "bundled synthetic-calibrated fixture");
    }

    #[test]
    fn manifest_rejects_unknown_series_and_section() {
        assert!(matches!(
            DatasetManifest::parse("bogus = a.csv W", "m", None),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            DatasetManifest::parse("\n[extras]\n", "m", None),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            DatasetManifest::parse("gwp = a.csv parsecs", "m", None),
            Err(Error::Unit(_))
        ));
    }

    #[test]
    fn manifest_without_gwp_is_coverage_error() {
        let m = DatasetManifest::parse(
            "energy = fixture:energy.csv EJ/yr\n[calibration]\ninitial_wealth = 1e14\n",
            "m",
            None,
        )
        .unwrap();
        assert!(matches!(load_dataset(&m), Err(Error::Coverage(_))));
    }

    #[test]
    fn per_series_errors_are_aggregated() {
        let m = DatasetManifest::parse(
            "gwp = fixture:missing.csv USD/yr\nenergy = fixture:nope.csv EJ/yr\n",
            "m",
            None,
        )
        .unwrap();
        match load_dataset(&m) {
            Err(Error::Dataset(list)) => assert_eq!(list.len(), 3),
            other => panic!("expected aggregate, got {other:?}"),
        }
    }

    #[test]
    fn energy_labeled_as_watts_warns() {
        let m = DatasetManifest::parse(
            "gwp = fixture:gwp.csv USD/yr\nenergy = fixture:energy.csv W\n[calibration]\neta0 = 0.01\nyear = 1960\n",
            "m",
            None,
        )
        .unwrap();
        let d = load_dataset(&m).unwrap();
        assert_eq!(d.warnings().len(), 1);
    }

    fn series_strategy() -> impl Strategy<Value = AnnualSeries> {
        (1800i32..2100, proptest::collection::vec(-1e15f64..1e15, 1..50))
            .prop_map(|(start, v)| AnnualSeries::new("x", start, v, Unit::CurrencyPerYear).unwrap())
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(s in series_strategy()) {
            let text = write_series_csv(&s);
            let back = parse(&text).unwrap();
            prop_assert_eq!(back.series.values(), s.values());
            prop_assert_eq!(back.series.start_year(), s.start_year());
        }

        #[test]
        fn watts_round_trip(v in 1e-3f64..1e16) {
            let ej = Unit::Watts.convert(v, Unit::EnergyPerYear).unwrap();
            let w = Unit::EnergyPerYear.convert(ej, Unit::Watts).unwrap();
            prop_assert!((w - v).abs() <= 1e-12 * v);
        }

        #[test]
        fn gap_fill_preserves_interval_rate(a in 1e-3f64..1e6, b in 1e-3f64..1e6) {
            let p = parse(&format!("year,value\n2000,{a:?}\n2002,{b:?}\n")).unwrap();
            let s = &p.series;
            let whole = crate::series::interval_average_rate(s, 2000, 2002).unwrap();
            let first = crate::series::interval_average_rate(s, 2000, 2001).unwrap();
            let second = crate::series::interval_average_rate(s, 2001, 2002).unwrap();
            prop_assert!((first - whole).abs() <= 1e-12 * whole.abs().max(1.0));
            prop_assert!((second - whole).abs() <= 1e-12 * whole.abs().max(1.0));
        }
    }
}
