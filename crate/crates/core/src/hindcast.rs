//! Hindcast protocol: train on one decade, forecast another with the
//! logistic model, and score against persistence.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::diagnostics::GrowthDiagnostics;
use crate::error::{Error, Result};
use crate::identity::wealth_series;
use crate::ingest::EconomicDataset;
use crate::logistic::{decade_averages, integrate_ode, LogisticParams, RateTriple, Trajectory};
use crate::series::{interval_average_rate, YearRange};
use crate::techchange::{eta_tech_implied, eta_tech_physical, ProductionWeighting};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Skill {
    pub raw: f64,
    /// `max(0, raw)`.
    pub clamped: f64,
}

/// `1 − |hindcast − observed| / |persistence − observed|`.
pub fn skill_score(hindcast: f64, persistence: f64, observed: f64) -> Result<Skill> {
    let hindcast_error = hindcast - observed;
    let persistence_error = persistence - observed;
    if persistence_error == 0.0 {
        return Err(Error::UndefinedSkill {
            hindcast_error,
            persistence_error,
        });
    }
    let raw = 1.0 - hindcast_error.abs() / persistence_error.abs();
    Ok(Skill {
        raw,
        clamped: raw.max(0.0),
    })
}

/// Training-window means of η, innovation and GWP growth.
pub fn persistence_forecast(diag: &GrowthDiagnostics, train: YearRange, smoothed: bool) -> Result<RateTriple> {
    let (eta, innovation, gwp_growth) = diag.rates(smoothed);
    if !innovation.span().contains(train) {
        return Err(Error::Coverage(format!(
            "training window {train} is not inside the diagnosed years {}",
            innovation.span()
        )));
    }
    Ok(RateTriple {
        eta: eta.mean_over(train)?,
        innovation: innovation.mean_over(train)?,
        gwp_growth: gwp_growth.mean_over(train)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum EtaTechSource {
    /// Training-mean innovation plus twice training-mean η.
    Implied,
    /// Sum of physical components over the training window.
    Physical,
    Explicit(f64),
}

impl std::str::FromStr for EtaTechSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "implied" => Ok(EtaTechSource::Implied),
            "physical" => Ok(EtaTechSource::Physical),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(EtaTechSource::Explicit)
                .ok_or_else(|| {
                    Error::Parameter(format!(
                        "eta-tech must be 'implied', 'physical' or a number per year, got '{other}'"
                    ))
                }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HindcastConfig {
    pub train: YearRange,
    pub init_year: i32,
    pub eval: YearRange,
    pub eta_tech: EtaTechSource,
    /// Use decadal-smoothed rates for the training means.
    pub smoothed_training: bool,
    pub weighting: ProductionWeighting,
    /// RK4 step for the emitted trajectory, in years.
    pub trajectory_step: f64,
}

impl Default for HindcastConfig {
    fn default() -> Self {
        HindcastConfig {
            train: YearRange { start: 1950, end: 1960 },
            init_year: 1960,
            eval: YearRange { start: 2000, end: 2010 },
            eta_tech: EtaTechSource::Implied,
            smoothed_training: false,
            weighting: ProductionWeighting::PeriodMean,
            trajectory_step: 0.1,
        }
    }
}

impl HindcastConfig {
    pub fn validate(&self) -> Result<()> {
        if self.train.end > self.init_year || self.init_year > self.eval.start {
            return Err(Error::Parameter(format!(
                "need train ({}) to end by the initial year ({}) and evaluation ({}) to start after it",
                self.train, self.init_year, self.eval
            )));
        }
        if self.eval.start >= self.eval.end {
            return Err(Error::Parameter(format!(
                "evaluation window {} must span at least one year",
                self.eval
            )));
        }
        if !(self.trajectory_step > 0.0) {
            return Err(Error::Parameter("trajectory step must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantityRecord {
    pub persistence: f64,
    pub hindcast: f64,
    pub observed: f64,
    /// Observed value from the energy pathway, for η only.
    pub observed_energy: Option<f64>,
    /// Absent when persistence matches the observation exactly.
    pub skill: Option<Skill>,
}

impl QuantityRecord {
    fn new(persistence: f64, hindcast: f64, observed: f64, observed_energy: Option<f64>) -> Self {
        QuantityRecord {
            persistence,
            hindcast,
            observed,
            observed_energy,
            skill: skill_score(hindcast, persistence, observed).ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HindcastReport {
    pub config: HindcastConfig,
    pub eta0: f64,
    pub eta_tech: f64,
    pub growth_number: f64,
    pub eta: QuantityRecord,
    pub innovation: QuantityRecord,
    pub gwp_growth: QuantityRecord,
    /// From the initial year to the end of the evaluation window.
    pub trajectory: Trajectory,
}

/// Observed interval averages over `eval` from log endpoints of wealth,
/// η and production; plus η from power consumption.
pub fn observed_averages(
    dataset: &EconomicDataset,
    diag: &GrowthDiagnostics,
    eval: YearRange,
) -> Result<(RateTriple, f64)> {
    let wealth = wealth_series(dataset.gwp(), dataset.initial_wealth())?;
    let eta = interval_average_rate(&wealth, eval.start, eval.end)?;
    let innovation = interval_average_rate(&diag.eta, eval.start, eval.end)?;
    let gwp_growth = interval_average_rate(dataset.gwp(), eval.start, eval.end)?;
    let energy = interval_average_rate(dataset.energy(), eval.start, eval.end)?;
    Ok((
        RateTriple {
            eta,
            innovation,
            gwp_growth,
        },
        energy,
    ))
}

pub fn run_hindcast(
    dataset: &EconomicDataset,
    diag: &GrowthDiagnostics,
    config: &HindcastConfig,
) -> Result<HindcastReport> {
    config.validate()?;
    let persistence = persistence_forecast(diag, config.train, config.smoothed_training)?;
    let eta0 = diag.eta.at(config.init_year)?;
    let eta_tech = match config.eta_tech {
        EtaTechSource::Implied => {
            eta_tech_implied(diag, config.train, config.smoothed_training)?.eta_tech
        }
        EtaTechSource::Physical => {
            eta_tech_physical(dataset, config.train, config.weighting)?.eta_tech_total
        }
        EtaTechSource::Explicit(v) => v,
    };
    let params = LogisticParams::new(eta0, eta_tech, config.init_year as f64)?;
    let t1 = (config.eval.start - config.init_year) as f64;
    let t2 = (config.eval.end - config.init_year) as f64;
    let hindcast = decade_averages(&params, t1, t2)?;
    let (observed, observed_energy) = observed_averages(dataset, diag, config.eval)?;
    let trajectory = integrate_ode(&params, t2, config.trajectory_step)?;

    Ok(HindcastReport {
        config: *config,
        eta0,
        eta_tech,
        growth_number: params.growth_number(),
        eta: QuantityRecord::new(persistence.eta, hindcast.eta, observed.eta, Some(observed_energy)),
        innovation: QuantityRecord::new(
            persistence.innovation,
            hindcast.innovation,
            observed.innovation,
            None,
        ),
        gwp_growth: QuantityRecord::new(
            persistence.gwp_growth,
            hindcast.gwp_growth,
            observed.gwp_growth,
            None,
        ),
        trajectory,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub slope_ci95: f64,
    pub intercept_ci95: f64,
    pub n: usize,
    pub r_squared: f64,
}

/// Ordinary least squares with Student-t 95% intervals on `n − 2` degrees
/// of freedom.
pub fn ols(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(Error::Fit(format!(
            "x and y lengths differ ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if !(sxx > f64::EPSILON * mx.abs().max(1.0).powi(2) * nf) {
        return Err(Error::Fit("x has no spread".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let dof = nf - 2.0;
    let s2 = sse / dof;
    let se_slope = (s2 / sxx).sqrt();
    let se_intercept = (s2 * (1.0 / nf + mx * mx / sxx)).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::Fit(e.to_string()))?
        .inverse_cdf(0.975);
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(FitResult {
        slope,
        intercept,
        slope_ci95: t * se_slope,
        intercept_ci95: t * se_intercept,
        n,
        r_squared,
    })
}

/// Regresses innovation on η over `window`.
pub fn fit_innovation_vs_return(
    diag: &GrowthDiagnostics,
    window: YearRange,
    smoothed: bool,
) -> Result<FitResult> {
    let (eta, innovation, _) = diag.rates(smoothed);
    let years = innovation
        .span()
        .intersect(window)
        .ok_or_else(|| Error::Fit(format!("no diagnosed years in {window}")))?;
    let x: Vec<f64> = years.years().map(|y| eta.get(y).unwrap()).collect();
    let y: Vec<f64> = years.years().map(|y| innovation.get(y).unwrap()).collect();
    ols(&x, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_hindcast_scores_one() {
        let s = skill_score(0.4, 3.3, 0.4).unwrap();
        assert_eq!((s.raw, s.clamped), (1.0, 1.0));
    }

    #[test]
    fn matching_persistence_scores_zero() {
        assert_eq!(skill_score(2.0, 2.0, 1.0).unwrap().raw, 0.0);
    }

    #[test]
    fn gwp_row_from_rounded_entries() {
        let s = skill_score(2.8, 4.0, 2.6).unwrap();
        assert!((s.raw - (1.0 - 0.2 / 1.4)).abs() < 1e-15);
    }

    #[test]
    fn worse_than_persistence_is_clamped() {
        let s = skill_score(5.0, 1.5, 1.0).unwrap();
        assert_eq!(s.raw, -7.0);
        assert_eq!(s.clamped, 0.0);
    }

    #[test]
    fn undefined_skill_carries_errors() {
        match skill_score(1.2, 1.0, 1.0) {
            Err(Error::UndefinedSkill {
                hindcast_error,
                persistence_error,
            }) => {
                assert!((hindcast_error - 0.2).abs() < 1e-15);
                assert_eq!(persistence_error, 0.0);
            }
            other => panic!("expected undefined skill, got {other:?}"),
        }
    }

    #[test]
    fn eta_tech_source_parses() {
        assert_eq!("implied".parse::<EtaTechSource>().unwrap(), EtaTechSource::Implied);
        assert_eq!("0.051".parse::<EtaTechSource>().unwrap(), EtaTechSource::Explicit(0.051));
        assert!("fast".parse::<EtaTechSource>().is_err());
    }

    #[test]
    fn config_order_is_checked() {
        let mut c = HindcastConfig::default();
        assert!(c.validate().is_ok());
        c.init_year = 1955;
        assert!(c.validate().is_err());
    }

    #[test]
    fn noiseless_line_recovered() {
        let x: Vec<f64> = (0..30).map(|i| 0.005 + 0.0007 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| -2.0 * v + 0.05).collect();
        let f = ols(&x, &y).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-10);
        assert!((f.intercept - 0.05).abs() < 1e-10);
        assert!(f.slope_ci95 < 1e-10 && f.intercept_ci95 < 1e-10);
    }

    #[test]
    fn known_regression_intervals() {
        // Worked by hand: x = 1..5, y = {2, 4, 5, 4, 5}.
        let f = ols(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 4.0, 5.0, 4.0, 5.0]).unwrap();
        assert!((f.slope - 0.6).abs() < 1e-12);
        assert!((f.intercept - 2.2).abs() < 1e-12);
        // s² = 2.4/3, se(slope) = sqrt(0.8/10), t(0.975, 3) = 3.182446.
        assert!((f.slope_ci95 - 3.182_446_305 * (0.08f64).sqrt()).abs() < 1e-8);
        assert!((f.r_squared - 0.6).abs() < 1e-12);
    }

    #[test]
    fn degenerate_fits_rejected() {
        assert!(matches!(ols(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::Fit(_))));
        assert!(matches!(ols(&[1.0, 2.0], &[1.0, 2.0]), Err(Error::Fit(_))));
    }

    proptest! {
        #[test]
        fn skill_symmetric_and_shift_invariant(
            h in -5.0f64..5.0, p in -5.0f64..5.0, o in -5.0f64..5.0, c in -10.0f64..10.0
        ) {
            prop_assume!((p - o).abs() > 1e-6);
            let a = skill_score(h, p, o).unwrap().raw;
            let flipped = skill_score(2.0 * o - h, 2.0 * o - p, o).unwrap().raw;
            let shifted = skill_score(h + c, p + c, o + c).unwrap().raw;
            prop_assert!((a - flipped).abs() <= 1e-9 * a.abs().max(1.0));
            prop_assert!((a - shifted).abs() <= 1e-6 * a.abs().max(1.0));
        }

        #[test]
        fn fit_equivariant_under_time_rescaling(k in 0.1f64..10.0, noise in 0.0f64..1e-3) {
            // Rates scale as 1/k when time is measured in units of k years:
            // the slope is unchanged and the intercept scales with the rates.
            let x: Vec<f64> = (0..40).map(|i| 0.008 + 0.0004 * i as f64).collect();
            let y: Vec<f64> = x.iter().enumerate()
                .map(|(i, v)| -2.3 * v + 0.055 + noise * ((i * 7 % 11) as f64 - 5.0))
                .collect();
            let a = ols(&x, &y).unwrap();
            let xs: Vec<f64> = x.iter().map(|v| v * k).collect();
            let ys: Vec<f64> = y.iter().map(|v| v * k).collect();
            let b = ols(&xs, &ys).unwrap();
            prop_assert!((a.slope - b.slope).abs() <= 1e-9);
            prop_assert!((a.intercept * k - b.intercept).abs() <= 1e-9);
            prop_assert!((a.slope_ci95 - b.slope_ci95).abs() <= 1e-7);
        }
    }
}
