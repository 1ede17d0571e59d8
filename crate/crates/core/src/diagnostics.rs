//! Rate of return, innovation rate and GWP growth, with the identity that
//! ties them together: `d ln Y/dt = η + d ln η/dt`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identity::wealth_series;
use crate::ingest::EconomicDataset;
use crate::series::{
    centered_log_diff, cumulative_trapezoid, log_derivative, running_decadal_mean, AnnualSeries,
    RateSeries, YearRange,
};
use crate::units::{Unit, YEAR_SECONDS};

/// Default smoothing window, in years.
pub const DECADE: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothedRates {
    pub window_years: usize,
    pub eta: RateSeries,
    pub innovation: RateSeries,
    pub gwp_growth: RateSeries,
    pub eta_from_energy: Option<RateSeries>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthDiagnostics {
    /// `η = Y / C`, over the full GWP span.
    pub eta: RateSeries,
    /// `d ln η/dt`, one year shorter at each end than `eta`.
    pub innovation: RateSeries,
    /// `d ln Y/dt`, aligned with `innovation`.
    pub gwp_growth: RateSeries,
    /// `d ln a/dt`, present when power consumption was supplied.
    pub eta_from_energy: Option<RateSeries>,
    /// `f = Y / a` in USD per joule.
    pub efficiency: Option<AnnualSeries>,
    /// `λ = a / C` in W per USD.
    pub lambda: Option<AnnualSeries>,
    /// Largest `|d ln Y/dt − η − d ln η/dt|` over interior years.
    pub max_identity_residual: f64,
    /// Largest gap between `η(y) − η(y₀)` and the trapezoidal integral of
    /// `dη/dt = η · d ln η/dt`.
    pub max_accumulation_residual: f64,
    pub smoothed: SmoothedRates,
}

impl GrowthDiagnostics {
    /// Years for which all three core rates are defined.
    pub fn interior(&self) -> YearRange {
        self.innovation.span()
    }

    /// Smoothed or raw core rates.
    pub fn rates(&self, smoothed: bool) -> (&RateSeries, &RateSeries, &RateSeries) {
        if smoothed {
            (&self.smoothed.eta, &self.smoothed.innovation, &self.smoothed.gwp_growth)
        } else {
            (&self.eta, &self.innovation, &self.gwp_growth)
        }
    }

    /// Recomputes the smoothed variants with another window.
    pub fn resmooth(&mut self, window_years: usize) -> Result<()> {
        self.smoothed = smooth(
            window_years,
            &self.eta,
            &self.innovation,
            &self.gwp_growth,
            self.eta_from_energy.as_ref(),
        )?;
        Ok(())
    }
}

fn smooth(
    window: usize,
    eta: &RateSeries,
    innovation: &RateSeries,
    gwp_growth: &RateSeries,
    eta_from_energy: Option<&RateSeries>,
) -> Result<SmoothedRates> {
    Ok(SmoothedRates {
        window_years: window,
        eta: running_decadal_mean(eta, window)?,
        innovation: running_decadal_mean(innovation, window)?,
        gwp_growth: running_decadal_mean(gwp_growth, window)?,
        eta_from_energy: eta_from_energy
            .map(|s| running_decadal_mean(s, window))
            .transpose()?,
    })
}

/// `η = Y / C` with `C` from [`wealth_series`].
pub fn rate_of_return(gwp: &AnnualSeries, initial_wealth: f64) -> Result<RateSeries> {
    gwp.require_positive()?;
    let c = wealth_series(gwp, initial_wealth)?;
    gwp.zip_with(&c, "eta", Unit::FractionPerYear, |y, c| y / c)
}

/// `d ln η/dt` by centered differences.
pub fn innovation_rate(eta: &RateSeries) -> Result<RateSeries> {
    Ok(log_derivative(eta)?.with_name("innovation"))
}

/// Full diagnostics from production alone.
pub fn gwp_growth_decomposition(gwp: &AnnualSeries, initial_wealth: f64) -> Result<GrowthDiagnostics> {
    let eta = rate_of_return(gwp, initial_wealth)?;
    let innovation = innovation_rate(&eta)?;
    let gwp_growth = log_derivative(gwp)?.with_name("gwp_growth");

    let max_identity_residual = gwp_growth
        .iter()
        .zip(innovation.values())
        .map(|((year, g), i)| (g - eta.get(year).unwrap() - i).abs())
        .fold(0.0, f64::max);

    // η(y) − η(y₀) against ∫ η · d ln η/dt over the interior years.
    let interior = innovation.span();
    let eta_in = eta.slice(interior)?;
    let d_eta: Vec<f64> = eta_in
        .values()
        .iter()
        .zip(innovation.values())
        .map(|(e, i)| e * i)
        .collect();
    let integral = cumulative_trapezoid(&d_eta, 1.0, 0.0);
    let e0 = eta_in.values()[0];
    let max_accumulation_residual = eta_in
        .values()
        .iter()
        .zip(&integral)
        .map(|(e, s)| (e - e0 - s).abs())
        .fold(0.0, f64::max);

    let smoothed = smooth(DECADE, &eta, &innovation, &gwp_growth, None)?;
    Ok(GrowthDiagnostics {
        eta,
        innovation,
        gwp_growth,
        eta_from_energy: None,
        efficiency: None,
        lambda: None,
        max_identity_residual,
        max_accumulation_residual,
        smoothed,
    })
}

/// Diagnostics for a dataset, including the energy pathway.
pub fn dataset_diagnostics(dataset: &EconomicDataset, window_years: usize) -> Result<GrowthDiagnostics> {
    let mut d = gwp_growth_decomposition(dataset.gwp(), dataset.initial_wealth())?;
    let energy = dataset.energy();
    let wealth = wealth_series(dataset.gwp(), dataset.initial_wealth())?;
    d.eta_from_energy = Some(log_derivative(energy)?.with_name("eta_from_energy"));
    d.efficiency = Some(production_efficiency(dataset.gwp(), energy)?);
    d.lambda = Some(energy.zip_with(&wealth, "lambda", Unit::WattsPerCurrency, |a, c| a / c)?);
    d.resmooth(window_years)?;
    Ok(d)
}

/// `f = Y / a` in USD per joule over the overlapping years.
pub fn production_efficiency(gwp: &AnnualSeries, energy: &AnnualSeries) -> Result<AnnualSeries> {
    if energy.unit() != Unit::Watts {
        return Err(Error::Unit(format!("power must be in W, not {}", energy.unit())));
    }
    energy.require_positive()?;
    gwp.zip_with(energy, "efficiency", Unit::CurrencyPerJoule, |y, a| {
        y / YEAR_SECONDS / a
    })
}

/// Largest `|d ln f/dt − d ln η/dt|` over the years both are defined.
///
/// The two coincide when `λ` is exactly constant.
pub fn efficiency_innovation_gap(efficiency: &AnnualSeries, eta: &RateSeries) -> Result<f64> {
    let df = log_derivative(efficiency)?;
    let de = log_derivative(eta)?;
    let gap = df.zip_with(&de, "gap", Unit::FractionPerYear, |a, b| (a - b).abs())?;
    Ok(gap.values().iter().copied().fold(0.0, f64::max))
}

/// Largest identity residual for production sampled every `step` years.
///
/// This is the grid form of the check in [`gwp_growth_decomposition`], used
/// to confirm the residual falls at second order as the step shrinks.
pub fn identity_residual_on_grid(production: &[f64], step: f64, initial_wealth: f64) -> Result<f64> {
    if production.len() < 3 {
        return Err(Error::InsufficientData("need at least 3 samples".into()));
    }
    if production.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::Domain("production must be strictly positive".into()));
    }
    let c = cumulative_trapezoid(production, step, initial_wealth);
    let eta: Vec<f64> = production.iter().zip(&c).map(|(y, c)| y / c).collect();
    let dln_y = centered_log_diff(production, step);
    let dln_eta = centered_log_diff(&eta, step);
    Ok(dln_y
        .iter()
        .zip(&dln_eta)
        .zip(&eta[1..])
        .map(|((g, i), e)| (g - e - i).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn usd(values: Vec<f64>) -> AnnualSeries {
        AnnualSeries::new("y", 1950, values, Unit::CurrencyPerYear).unwrap()
    }

    #[test]
    fn constant_production_rate_of_return() {
        let eta = rate_of_return(&usd(vec![1.0; 5]), 99.0).unwrap();
        assert!((eta.values()[1] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn constant_eta_has_zero_innovation() {
        let eta = AnnualSeries::new("e", 1950, vec![0.02; 8], Unit::FractionPerYear).unwrap();
        assert!(innovation_rate(&eta).unwrap().values().iter().all(|&v| v == 0.0));
        let bad = AnnualSeries::new("e", 1950, vec![0.02, -0.01, 0.02], Unit::FractionPerYear).unwrap();
        assert!(matches!(innovation_rate(&bad), Err(Error::Domain(_))));
    }

    #[test]
    fn proportional_power_ties_efficiency_to_eta() {
        let y = usd((0..30).map(|t| 1e13 * (0.03 * t as f64).exp()).collect());
        let w = 4e14;
        let c = wealth_series(&y, w).unwrap();
        let lam = 0.0071;
        let a = c.map("a", Unit::Watts, |v| lam * v).unwrap();
        let f = production_efficiency(&y, &a).unwrap();
        let eta = rate_of_return(&y, w).unwrap();
        for (year, fv) in f.iter() {
            let e = eta.at(year).unwrap();
            assert!((lam * fv * YEAR_SECONDS - e).abs() <= 1e-12 * e);
        }
        assert!(efficiency_innovation_gap(&f, &eta).unwrap() <= 1e-12);

        // Doubling f at fixed λ doubles η.
        let f2 = f.map("f2", Unit::CurrencyPerJoule, |v| 2.0 * v).unwrap();
        let e2 = f2.map("e2", Unit::FractionPerYear, |v| lam * v * YEAR_SECONDS).unwrap();
        assert!((e2.values()[3] - 2.0 * eta.values()[3]).abs() < 1e-15);
    }

    #[test]
    fn identity_residual_falls_at_second_order() {
        let y = |t: f64| (0.03 * t + 0.1 * (0.2 * t).sin()).exp();
        let r: Vec<f64> = [1.0, 0.5, 0.25]
            .iter()
            .map(|&h| {
                let n = (40.0 / h) as usize + 1;
                let v: Vec<f64> = (0..n).map(|k| y(k as f64 * h)).collect();
                identity_residual_on_grid(&v, h, 30.0).unwrap()
            })
            .collect();
        for pair in r.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
        }
    }

    proptest! {
        #[test]
        fn currency_rebasing_leaves_rates_unchanged(k in 1e-3f64..1e3, r in 0.0f64..0.06) {
            let y: Vec<f64> = (0..40).map(|t| 1e12 * (r * t as f64 + 0.02 * (t as f64).sin()).exp()).collect();
            let base = gwp_growth_decomposition(&usd(y.clone()), 3e13).unwrap();
            let scaled = gwp_growth_decomposition(&usd(y.iter().map(|v| v * k).collect()), 3e13 * k).unwrap();
            for (a, b) in [
                (&base.eta, &scaled.eta),
                (&base.innovation, &scaled.innovation),
                (&base.gwp_growth, &scaled.gwp_growth),
            ] {
                for (x, z) in a.values().iter().zip(b.values()) {
                    prop_assert!((x - z).abs() <= 1e-12);
                }
            }
        }
    }
}
