//! Wealth as accumulated production, and its proportionality to power.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{cumulative_trapezoid, AnnualSeries, YearRange};
use crate::units::Unit;

/// Wealth `C = W + ∫Y dt` in 2005 USD, accumulated with the trapezoidal rule.
pub fn wealth_series(gwp: &AnnualSeries, initial_wealth: f64) -> Result<AnnualSeries> {
    if gwp.unit() != Unit::CurrencyPerYear {
        return Err(Error::Unit(format!(
            "{}: production must be in USD/yr, not {}",
            gwp.name(),
            gwp.unit()
        )));
    }
    if !(initial_wealth > 0.0) {
        return Err(Error::Calibration(format!(
            "initial wealth must be positive, got {initial_wealth}"
        )));
    }
    if let Some((year, v)) = gwp.iter().find(|&(_, v)| v < 0.0) {
        return Err(Error::Domain(format!(
            "{}: negative production {v} in {year}",
            gwp.name()
        )));
    }
    AnnualSeries::new(
        "wealth",
        gwp.start_year(),
        cumulative_trapezoid(gwp.values(), 1.0, initial_wealth),
        Unit::Currency,
    )
}

/// Summary of `λ = a / C` over a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    /// W per 2005 USD.
    pub mean_lambda: f64,
    pub per_year_lambda: AnnualSeries,
    /// Sample standard deviation divided by the mean.
    pub relative_sd: f64,
    /// 1.96 standard errors, W per 2005 USD.
    pub ci95_halfwidth: f64,
    pub n_years: usize,
}

pub fn estimate_lambda(
    energy: &AnnualSeries,
    wealth: &AnnualSeries,
    window: YearRange,
) -> Result<LambdaEstimate> {
    if energy.unit() != Unit::Watts || wealth.unit() != Unit::Currency {
        return Err(Error::Unit(format!(
            "lambda needs power in W and wealth in USD, got {} and {}",
            energy.unit(),
            wealth.unit()
        )));
    }
    if window.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "lambda window {window} has fewer than 2 years"
        )));
    }
    let a = energy.slice(window)?;
    let c = wealth.slice(window)?;
    let per_year = a.zip_with(&c, "lambda", Unit::WattsPerCurrency, |a, c| a / c)?;
    let v = per_year.values();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    Ok(LambdaEstimate {
        mean_lambda: mean,
        relative_sd: sd / mean,
        ci95_halfwidth: 1.96 * sd / n.sqrt(),
        n_years: v.len(),
        per_year_lambda: per_year,
    })
}

/// `Y = (1/λ) da/dt` with a centered difference; loses the end years.
///
/// Shrinking power consumption yields negative production, which is kept.
pub fn production_from_energy(energy: &AnnualSeries, lambda: f64) -> Result<AnnualSeries> {
    if energy.unit() != Unit::Watts {
        return Err(Error::Unit(format!(
            "{}: power must be in W, not {}",
            energy.name(),
            energy.unit()
        )));
    }
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("lambda must be positive, got {lambda}")));
    }
    if energy.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{}: need at least 3 years to differentiate",
            energy.name()
        )));
    }
    let values = energy
        .values()
        .windows(3)
        .map(|w| 0.5 * (w[2] - w[0]) / lambda)
        .collect();
    AnnualSeries::new(
        "production from energy",
        energy.start_year() + 1,
        values,
        Unit::CurrencyPerYear,
    )
}
