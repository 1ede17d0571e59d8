//! Command-line front end. Every command builds its complete output in
//! memory before anything is written, so a failure leaves no partial files.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::diagnostics::{dataset_diagnostics, efficiency_innovation_gap, GrowthDiagnostics, DECADE};
use crate::error::{Error, ErrorClass, Result};
use crate::hindcast::{fit_innovation_vs_return, run_hindcast, EtaTechSource, HindcastConfig, QuantityRecord};
use crate::identity::{estimate_lambda, wealth_series};
use crate::ingest::{load_dataset, DatasetManifest, EconomicDataset};
use crate::plot;
use crate::report::{Cell, ReportEnvelope, Table};
use crate::series::YearRange;
use crate::techchange::{compare_tech, ProductionWeighting};
use crate::units::Unit;

/// Exit status for command-line usage errors.
pub const EXIT_USAGE: i32 = 64;

pub fn exit_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Parse => 2,
        ErrorClass::Unit => 3,
        ErrorClass::Gap => 4,
        ErrorClass::Coverage => 5,
        ErrorClass::Computation | ErrorClass::Io => 1,
    }
}

#[derive(Debug, Parser)]
#[command(name = "thermo-hindcast", version, about = "Thermodynamic growth diagnostics and logistic hindcasts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Manifest file, or `fixture` for the bundled dataset.
    #[arg(long)]
    pub manifest: String,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write an SVG chart.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Omit the generation timestamp from SVG output.
    #[arg(long)]
    pub reproducible: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and check every series in a manifest.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Per-year rate of return, innovation, GWP growth, lambda and efficiency.
    Diagnostics {
        #[command(flatten)]
        common: Common,
        /// Window for the lambda estimate.
        #[arg(long, default_value = "1970:2010")]
        window: YearRange,
        /// Centered smoothing window in years; 1 leaves rates unsmoothed.
        #[arg(long, default_value_t = 1)]
        smooth: usize,
    },
    /// Logistic hindcast scored against persistence.
    Hindcast {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1950:1960")]
        train: YearRange,
        #[arg(long, default_value_t = 1960)]
        init: i32,
        #[arg(long, default_value = "2000:2010")]
        eval: YearRange,
        /// `implied`, `physical`, or a rate as a fraction per year.
        #[arg(long, default_value = "implied")]
        eta_tech: EtaTechSource,
        /// Average decadal-smoothed rates over the training window.
        #[arg(long)]
        smoothed_training: bool,
        #[arg(long, default_value = "period-mean")]
        weighting: ProductionWeighting,
    },
    /// Physical components of technological change against the implied rate.
    Techchange {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "1950:1970,1970:1990,1990:2010,1950:2010")]
        periods: Vec<YearRange>,
        #[arg(long, default_value = "period-mean")]
        weighting: ProductionWeighting,
        /// Use decadal-smoothed rates for the implied estimate.
        #[arg(long)]
        smoothed: bool,
    },
    /// Least-squares fit of innovation against rate of return.
    Fit {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1950:2010")]
        window: YearRange,
        /// Smoothing window in years for the fitted pairs.
        #[arg(long, default_value_t = DECADE)]
        smooth: usize,
        /// Fit unsmoothed annual values.
        #[arg(long)]
        raw: bool,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Validate { common }
            | Command::Diagnostics { common, .. }
            | Command::Hindcast { common, .. }
            | Command::Techchange { common, .. }
            | Command::Fit { common, .. } => common,
        }
    }
}

/// Rendered output of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub report: String,
    pub report_path: Option<PathBuf>,
    pub svg: Option<(PathBuf, String)>,
    pub warnings: Vec<String>,
}

fn load(manifest: &str) -> Result<EconomicDataset> {
    load_dataset(&DatasetManifest::load(manifest)?)
}

fn rate() -> Option<Unit> {
    Some(Unit::FractionPerYear)
}

fn unitless() -> Option<Unit> {
    Some(Unit::Dimensionless)
}

fn start_envelope(command: &str, common: &Common, dataset: &EconomicDataset) -> ReportEnvelope {
    let mut env = ReportEnvelope::new(command);
    env.echo("manifest", &common.manifest);
    env.provenance = dataset.provenance().clone();
    env.warnings = dataset.warnings().to_vec();
    env
}

/// Runs a parsed command and renders its output without touching the disk.
pub fn execute(cli: &Cli, timestamp: Option<String>) -> Result<Output> {
    let common = cli.command.common();
    let dataset = load(&common.manifest)?;
    let svg_stamp = if common.reproducible { None } else { timestamp };
    let mut svg = None;

    let env = match &cli.command {
        Command::Validate { .. } => validate_report(common, &dataset),
        Command::Diagnostics { window, smooth, .. } => {
            let diag = dataset_diagnostics(&dataset, *smooth)?;
            if let Some(p) = &common.plot {
                let chart = plot::rates_chart(&diag, *smooth > 1);
                svg = Some((p.clone(), chart.to_svg(svg_stamp.as_deref())));
            }
            diagnostics_report(common, &dataset, &diag, *window, *smooth)?
        }
        Command::Hindcast {
            train,
            init,
            eval,
            eta_tech,
            smoothed_training,
            weighting,
            ..
        } => {
            let config = HindcastConfig {
                train: *train,
                init_year: *init,
                eval: *eval,
                eta_tech: *eta_tech,
                smoothed_training: *smoothed_training,
                weighting: *weighting,
                ..HindcastConfig::default()
            };
            let diag = dataset_diagnostics(&dataset, DECADE)?;
            let report = run_hindcast(&dataset, &diag, &config)?;
            if let Some(p) = &common.plot {
                let chart = plot::hindcast_chart(&diag, &report);
                svg = Some((p.clone(), chart.to_svg(svg_stamp.as_deref())));
            }
            let mut env = start_envelope("hindcast", common, &dataset);
            env.echo("train", train);
            env.echo("init", init);
            env.echo("eval", eval);
            env.echo("eta_tech", eta_tech_label(eta_tech));
            env.echo("smoothed_training", smoothed_training);
            env.echo("weighting", weighting_label(*weighting));
            hindcast_tables(&mut env, &report);
            env
        }
        Command::Techchange {
            periods,
            weighting,
            smoothed,
            ..
        } => {
            let diag = dataset_diagnostics(&dataset, DECADE)?;
            let mut env = start_envelope("techchange", common, &dataset);
            env.echo(
                "periods",
                periods.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","),
            );
            env.echo("weighting", weighting_label(*weighting));
            env.echo("smoothed", smoothed);
            techchange_tables(&mut env, &dataset, &diag, periods, *weighting, *smoothed)?;
            env
        }
        Command::Fit {
            window, smooth, raw, ..
        } => {
            let diag = dataset_diagnostics(&dataset, *smooth)?;
            let fit = fit_innovation_vs_return(&diag, *window, !raw)?;
            if let Some(p) = &common.plot {
                let chart = plot::fit_chart(&diag, *window, !raw, &fit);
                svg = Some((p.clone(), chart.to_svg(svg_stamp.as_deref())));
            }
            let mut env = start_envelope("fit", common, &dataset);
            env.echo("window", window);
            env.echo("smooth", smooth);
            env.echo("raw", raw);
            let mut t = Table::new(
                "fit",
                &[
                    ("window", None),
                    ("slope", unitless()),
                    ("slope_ci95", unitless()),
                    ("intercept", rate()),
                    ("intercept_ci95", rate()),
                    ("n", None),
                    ("r_squared", unitless()),
                ],
            );
            t.push(vec![
                window.to_string().into(),
                fit.slope.into(),
                fit.slope_ci95.into(),
                fit.intercept.into(),
                fit.intercept_ci95.into(),
                fit.n.into(),
                fit.r_squared.into(),
            ]);
            env.tables.push(t);
            env
        }
    };

    let report = match common.format {
        Format::Text => env.to_text(),
        Format::Csv => env.to_csv()?,
        Format::Json => env.to_json()?,
    };
    Ok(Output {
        report,
        report_path: common.output.clone(),
        svg,
        warnings: env.warnings.clone(),
    })
}

fn eta_tech_label(s: &EtaTechSource) -> String {
    match s {
        EtaTechSource::Implied => "implied".into(),
        EtaTechSource::Physical => "physical".into(),
        EtaTechSource::Explicit(v) => format!("{v:?}"),
    }
}

fn weighting_label(w: ProductionWeighting) -> &'static str {
    match w {
        ProductionWeighting::PeriodMean => "period-mean",
        ProductionWeighting::Endpoints => "endpoints",
        ProductionWeighting::Start => "start",
        ProductionWeighting::End => "end",
    }
}

fn validate_report(common: &Common, dataset: &EconomicDataset) -> ReportEnvelope {
    let mut env = start_envelope("validate", common, dataset);
    let mut t = Table::new(
        "series",
        &[("series", None), ("unit", None), ("start", None), ("end", None), ("years", None)],
    );
    let mut add = |name: &str, s: &crate::AnnualSeries| {
        t.push(vec![
            name.into(),
            s.unit().token().into(),
            s.start_year().into(),
            s.end_year().into(),
            s.len().into(),
        ]);
    };
    add("gwp", dataset.gwp());
    add("energy", dataset.energy());
    if let Some(f) = dataset.fuels() {
        add("oil_reserves", &f.oil_reserves);
        add("gas_reserves", &f.gas_reserves);
        add("oil_production", &f.oil_production);
        add("gas_production", &f.gas_production);
        add("coal_production", &f.coal_production);
        if let Some(d) = &f.oil_discovery {
            add("oil_discovery", d);
        }
        if let Some(d) = &f.gas_discovery {
            add("gas_discovery", d);
        }
    }
    for (class, s) in dataset.materials() {
        add(&format!("material.{class}"), s);
    }
    if let Some(i) = dataset.inflation() {
        add("inflation", i);
    }
    env.tables.push(t);
    let mut c = Table::new("calibration", &[("initial_wealth", Some(Unit::Currency))]);
    c.push(vec![dataset.initial_wealth().into()]);
    env.tables.push(c);
    env
}

fn diagnostics_report(
    common: &Common,
    dataset: &EconomicDataset,
    diag: &GrowthDiagnostics,
    window: YearRange,
    smooth: usize,
) -> Result<ReportEnvelope> {
    let mut env = start_envelope("diagnostics", common, dataset);
    env.echo("window", window);
    env.echo("smooth", smooth);

    let smoothed = smooth > 1;
    let (eta, innovation, gwp_growth) = diag.rates(smoothed);
    let from_energy = if smoothed {
        diag.smoothed.eta_from_energy.as_ref()
    } else {
        diag.eta_from_energy.as_ref()
    };
    let mut t = Table::new(
        "diagnostics",
        &[
            ("year", None),
            ("eta", rate()),
            ("innovation", rate()),
            ("gwp_growth", rate()),
            ("eta_from_energy", rate()),
            ("lambda", Some(Unit::WattsPerCurrency)),
            ("efficiency", Some(Unit::CurrencyPerJoule)),
        ],
    );
    for year in eta.span().years() {
        t.push(vec![
            year.into(),
            eta.get(year).into(),
            innovation.get(year).into(),
            gwp_growth.get(year).into(),
            from_energy.and_then(|s| s.get(year)).into(),
            diag.lambda.as_ref().and_then(|s| s.get(year)).into(),
            diag.efficiency.as_ref().and_then(|s| s.get(year)).into(),
        ]);
    }
    env.tables.push(t);

    let wealth = wealth_series(dataset.gwp(), dataset.initial_wealth())?;
    let lam = estimate_lambda(dataset.energy(), &wealth, window)?;
    let mut l = Table::new(
        "lambda",
        &[
            ("window", None),
            ("mean_lambda", Some(Unit::WattsPerCurrency)),
            ("relative_sd", unitless()),
            ("ci95_halfwidth", Some(Unit::WattsPerCurrency)),
            ("n_years", None),
        ],
    );
    l.push(vec![
        window.to_string().into(),
        lam.mean_lambda.into(),
        lam.relative_sd.into(),
        lam.ci95_halfwidth.into(),
        lam.n_years.into(),
    ]);
    env.tables.push(l);

    let gap = match &diag.efficiency {
        Some(f) => Some(efficiency_innovation_gap(f, &diag.eta)?),
        None => None,
    };
    let mut c = Table::new(
        "identities",
        &[
            ("max_identity_residual", rate()),
            ("max_accumulation_residual", rate()),
            ("max_efficiency_innovation_gap", rate()),
        ],
    );
    c.push(vec![
        diag.max_identity_residual.into(),
        diag.max_accumulation_residual.into(),
        gap.into(),
    ]);
    env.tables.push(c);
    Ok(env)
}

fn hindcast_tables(env: &mut ReportEnvelope, report: &crate::hindcast::HindcastReport) {
    let mut p = Table::new(
        "parameters",
        &[("eta0", rate()), ("eta_tech", rate()), ("growth_number", unitless())],
    );
    p.push(vec![report.eta0.into(), report.eta_tech.into(), report.growth_number.into()]);
    env.tables.push(p);

    let mut t = Table::new(
        "hindcast",
        &[
            ("quantity", None),
            ("persistence", rate()),
            ("hindcast", rate()),
            ("observed", rate()),
            ("observed_energy", rate()),
            ("skill", unitless()),
            ("skill_clamped", unitless()),
        ],
    );
    let mut row = |name: &str, q: &QuantityRecord| {
        t.push(vec![
            name.into(),
            q.persistence.into(),
            q.hindcast.into(),
            q.observed.into(),
            q.observed_energy.into(),
            q.skill.map(|s| s.raw).into(),
            q.skill.map(|s| s.clamped).into(),
        ]);
    };
    row("eta", &report.eta);
    row("innovation", &report.innovation);
    row("gwp_growth", &report.gwp_growth);
    env.tables.push(t);

    let mut tr = Table::new(
        "trajectory",
        &[("year", None), ("eta", rate()), ("innovation", rate()), ("gwp_growth", rate())],
    );
    let traj = &report.trajectory;
    for i in 0..traj.len() {
        let year = traj.years[i];
        if (year - year.round()).abs() < 1e-6 {
            tr.push(vec![
                (year.round() as i32).into(),
                traj.eta[i].into(),
                traj.innovation[i].into(),
                traj.gwp_growth[i].into(),
            ]);
        }
    }
    env.tables.push(tr);
}

fn techchange_tables(
    env: &mut ReportEnvelope,
    dataset: &EconomicDataset,
    diag: &GrowthDiagnostics,
    periods: &[YearRange],
    weighting: ProductionWeighting,
    smoothed: bool,
) -> Result<()> {
    let mut c = Table::new(
        "components",
        &[
            ("period", None),
            ("eta_delta", rate()),
            ("eta_reserves", rate()),
            ("eta_extraction", rate()),
            ("eta_tech_physical", rate()),
            ("eta_mean", rate()),
            ("innovation_mean", rate()),
            ("eta_tech_implied", rate()),
            ("residual", rate()),
        ],
    );
    let mut b = Table::new(
        "breakdown",
        &[
            ("period", None),
            ("component", None),
            ("item", None),
            ("rate", rate()),
            ("weight", Some(Unit::EnergyPerYear)),
        ],
    );
    for &period in periods {
        let cmp = compare_tech(dataset, diag, period, weighting, smoothed)?;
        let ph = &cmp.physical;
        c.push(vec![
            period.to_string().into(),
            ph.eta_delta.into(),
            ph.eta_reserves.into(),
            ph.eta_extraction.into(),
            ph.eta_tech_total.into(),
            cmp.implied.eta_mean.into(),
            cmp.implied.innovation_mean.into(),
            cmp.implied.eta_tech.into(),
            cmp.residual.into(),
        ]);
        for (fuel, r) in &ph.per_fuel {
            b.push(vec![
                period.to_string().into(),
                "reserves".into(),
                fuel.as_str().into(),
                r.rate.into(),
                r.weight.into(),
            ]);
        }
        for (class, r) in &ph.per_material {
            b.push(vec![
                period.to_string().into(),
                "extraction".into(),
                class.as_str().into(),
                (*r).into(),
                Cell::Missing,
            ]);
        }
        for (fuel, year) in &ph.negative_discovery_years {
            env.warnings.push(format!(
                "{period}: implied {fuel} discovery is negative in {year} (downward reserve revision)"
            ));
        }
    }
    env.tables.push(c);
    env.tables.push(b);
    Ok(())
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a half-written file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Parameter(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let io = |e| Error::io(path.display().to_string(), e);
    let mut f = std::fs::File::create(&tmp).map_err(io)?;
    f.write_all(contents.as_bytes()).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}

/// Writes a finished output: files first, then the report to stdout if no
/// path was given.
pub fn emit(output: &Output, stdout: &mut impl std::io::Write) -> Result<()> {
    if let Some((path, svg)) = &output.svg {
        write_atomic(path, svg)?;
    }
    match &output.report_path {
        Some(path) => write_atomic(path, &output.report)?,
        None => stdout
            .write_all(output.report.as_bytes())
            .map_err(|e| Error::io("stdout", e))?,
    }
    Ok(())
}
