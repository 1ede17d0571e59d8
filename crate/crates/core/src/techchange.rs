//! Rate of technological change from physical statistics, and the value the
//! growth record implies for it.
//!
//! The physical estimate is the sum of three growth rates: falling
//! inflation as a proxy for longer-lived capital, net discovery of fossil
//! reserves, and raw-material extraction per unit of energy.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diagnostics::GrowthDiagnostics;
use crate::error::{Error, Result};
use crate::ingest::{EconomicDataset, FuelSeries};
use crate::series::{interval_average_rate, AnnualSeries, YearRange};
use crate::units::Unit;

/// Material classes averaged with equal weight.
pub const MATERIAL_CLASSES: [&str; 3] = ["cement_wood", "iron_steel", "copper"];

fn require_period(series: &AnnualSeries, period: YearRange) -> Result<()> {
    if period.start >= period.end {
        return Err(Error::Range(format!("period {period} must span at least one year")));
    }
    if series.span().contains(period) {
        Ok(())
    } else {
        Err(Error::Coverage(format!(
            "{} ({}) does not cover {period}",
            series.name(),
            series.span()
        )))
    }
}

/// `−Δi/Δt` for the global inflation rate over the period.
pub fn longevity_rate(inflation: &AnnualSeries, period: YearRange) -> Result<f64> {
    require_period(inflation, period)?;
    let i0 = inflation.at(period.start)?;
    let i1 = inflation.at(period.end)?;
    Ok(-(i1 - i0) / period.span_years())
}

/// Reserves (or, for coal, production capacity) and production of one fuel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuelRecord {
    pub name: String,
    /// Reserve stock in EJ, or production in EJ/yr when `capacity_proxy`.
    pub stock: AnnualSeries,
    pub production: AnnualSeries,
    /// Explicit gross discovery in EJ/yr; inferred from the stock if absent.
    pub discovery: Option<AnnualSeries>,
    /// Growth of production stands in for reserve growth.
    pub capacity_proxy: bool,
}

impl FuelRecord {
    /// Gross discovery `D = dΔH/dt + a`, explicit or inferred by centered
    /// differences of the stock.
    pub fn discovery_series(&self) -> Result<AnnualSeries> {
        if let Some(d) = &self.discovery {
            return Ok(d.clone());
        }
        if self.stock.len() < 3 {
            return Err(Error::InsufficientData(format!(
                "{}: need 3 years of reserves to infer discovery",
                self.name
            )));
        }
        let s = &self.stock;
        let values = s
            .values()
            .windows(3)
            .zip(s.years().skip(1))
            .map(|(w, year)| {
                let a = self.production.get(year).unwrap_or(f64::NAN);
                0.5 * (w[2] - w[0]) + a
            })
            .collect::<Vec<_>>();
        let first_ok = values.iter().position(|v| v.is_finite());
        let last_ok = values.iter().rposition(|v| v.is_finite());
        match (first_ok, last_ok) {
            (Some(a), Some(b)) => AnnualSeries::new(
                format!("{} discovery", self.name),
                s.start_year() + 1 + a as i32,
                values[a..=b].to_vec(),
                Unit::EnergyPerYear,
            ),
            _ => Err(Error::Coverage(format!(
                "{}: reserves and production do not overlap",
                self.name
            ))),
        }
    }

    /// Net discovery rate over the period.
    fn rate(&self, period: YearRange) -> Result<f64> {
        require_period(&self.stock, period)?;
        match (&self.discovery, self.capacity_proxy) {
            (Some(d), false) => {
                require_period(d, period)?;
                require_period(&self.production, period)?;
                let mut sum = 0.0;
                for year in period.years() {
                    sum += (d.at(year)? - self.production.at(year)?) / self.stock.at(year)?;
                }
                Ok(sum / period.len() as f64)
            }
            _ => interval_average_rate(&self.stock, period.start, period.end),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReserveLedger {
    pub fuels: Vec<FuelRecord>,
}

impl ReserveLedger {
    /// Oil and gas by reserve stock, coal by production capacity.
    pub fn from_fuels(f: &FuelSeries) -> Self {
        ReserveLedger {
            fuels: vec![
                FuelRecord {
                    name: "oil".into(),
                    stock: f.oil_reserves.clone(),
                    production: f.oil_production.clone(),
                    discovery: f.oil_discovery.clone(),
                    capacity_proxy: false,
                },
                FuelRecord {
                    name: "gas".into(),
                    stock: f.gas_reserves.clone(),
                    production: f.gas_production.clone(),
                    discovery: f.gas_discovery.clone(),
                    capacity_proxy: false,
                },
                FuelRecord {
                    name: "coal".into(),
                    stock: f.coal_production.clone(),
                    production: f.coal_production.clone(),
                    discovery: None,
                    capacity_proxy: true,
                },
            ],
        }
    }

    /// Years within `period` where a reserve fuel's implied discovery is
    /// negative, i.e. reserves were revised down. Reported, not rejected.
    pub fn negative_discovery(&self, period: YearRange) -> Result<Vec<(String, i32)>> {
        let mut out = Vec::new();
        for f in self.fuels.iter().filter(|f| !f.capacity_proxy) {
            let d = f.discovery_series()?;
            for (year, v) in d.iter() {
                if period.years().contains(&year) && v < 0.0 {
                    out.push((f.name.clone(), year));
                }
            }
        }
        Ok(out)
    }
}

/// How fuels are weighted when combining their discovery rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProductionWeighting {
    /// Arithmetic mean of annual production over the period.
    #[default]
    PeriodMean,
    /// Mean of production in the first and last year.
    Endpoints,
    /// Production in the first year.
    Start,
    /// Production in the last year.
    End,
}

impl std::str::FromStr for ProductionWeighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "period-mean" => ProductionWeighting::PeriodMean,
            "endpoints" => ProductionWeighting::Endpoints,
            "start" => ProductionWeighting::Start,
            "end" => ProductionWeighting::End,
            other => {
                return Err(Error::Parameter(format!(
                    "unknown weighting '{other}' (period-mean, endpoints, start, end)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuelRate {
    pub rate: f64,
    /// Production weight in EJ/yr.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetDiscovery {
    pub total: f64,
    pub per_fuel: BTreeMap<String, FuelRate>,
    pub negative_discovery_years: Vec<(String, i32)>,
}

/// Production-weighted net discovery rate across fuels.
pub fn net_discovery_rate(
    ledger: &ReserveLedger,
    period: YearRange,
    weighting: ProductionWeighting,
) -> Result<NetDiscovery> {
    if ledger.fuels.is_empty() {
        return Err(Error::Weight("reserve ledger has no fuels".into()));
    }
    let mut per_fuel = BTreeMap::new();
    let mut weighted = 0.0;
    let mut total_weight = 0.0;
    for f in &ledger.fuels {
        require_period(&f.production, period)?;
        let p = &f.production;
        let weight = match weighting {
            ProductionWeighting::PeriodMean => p.mean_over(period)?,
            ProductionWeighting::Endpoints => 0.5 * (p.at(period.start)? + p.at(period.end)?),
            ProductionWeighting::Start => p.at(period.start)?,
            ProductionWeighting::End => p.at(period.end)?,
        };
        let rate = f.rate(period)?;
        weighted += weight * rate;
        total_weight += weight;
        per_fuel.insert(f.name.clone(), FuelRate { rate, weight });
    }
    if !(total_weight > 0.0) {
        return Err(Error::Weight(format!(
            "total fuel production over {period} is zero"
        )));
    }
    Ok(NetDiscovery {
        total: weighted / total_weight,
        per_fuel,
        negative_discovery_years: ledger.negative_discovery(period)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub total: f64,
    /// Material growth minus energy growth, per class.
    pub per_class: BTreeMap<String, f64>,
    pub energy_rate: f64,
}

/// Groups raw material series into the three classes. Cement and wood are
/// summed by volume unless a combined `cement_wood` series is given.
pub fn material_classes(
    materials: &BTreeMap<String, AnnualSeries>,
) -> Result<BTreeMap<String, AnnualSeries>> {
    let mut out = BTreeMap::new();
    let combined = match (
        materials.get("cement_wood"),
        materials.get("cement"),
        materials.get("wood"),
    ) {
        (Some(cw), _, _) => Some(cw.clone()),
        (None, Some(c), Some(w)) => {
            if c.unit() != w.unit() {
                return Err(Error::Unit(format!(
                    "cement ({}) and wood ({}) must share a volume unit to be summed",
                    c.unit(),
                    w.unit()
                )));
            }
            Some(c.zip_with(w, "cement_wood", c.unit(), |a, b| a + b)?)
        }
        _ => None,
    };
    if let Some(cw) = combined {
        out.insert("cement_wood".to_string(), cw);
    }
    for class in ["iron_steel", "copper"] {
        if let Some(s) = materials.get(class) {
            out.insert(class.to_string(), s.clone());
        }
    }
    let missing: Vec<&str> = MATERIAL_CLASSES
        .iter()
        .copied()
        .filter(|c| !out.contains_key(*c))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Coverage(format!(
            "missing material classes: {}",
            missing.join(", ")
        )));
    }
    Ok(out)
}

/// Unweighted mean over classes of material growth minus energy growth.
pub fn extraction_efficiency_rate(
    materials: &BTreeMap<String, AnnualSeries>,
    energy: &AnnualSeries,
    period: YearRange,
) -> Result<Extraction> {
    let classes = material_classes(materials)?;
    require_period(energy, period)?;
    let energy_rate = interval_average_rate(energy, period.start, period.end)?;
    let mut per_class = BTreeMap::new();
    for (name, s) in &classes {
        require_period(s, period)?;
        per_class.insert(
            name.clone(),
            interval_average_rate(s, period.start, period.end)? - energy_rate,
        );
    }
    let total = per_class.values().sum::<f64>() / per_class.len() as f64;
    Ok(Extraction {
        total,
        per_class,
        energy_rate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechChangeComponents {
    pub period: YearRange,
    pub eta_delta: f64,
    pub eta_reserves: f64,
    pub eta_extraction: f64,
    pub eta_tech_total: f64,
    pub per_fuel: BTreeMap<String, FuelRate>,
    pub per_material: BTreeMap<String, f64>,
    pub negative_discovery_years: Vec<(String, i32)>,
}

/// The three physical components and their sum.
pub fn eta_tech_physical(
    dataset: &EconomicDataset,
    period: YearRange,
    weighting: ProductionWeighting,
) -> Result<TechChangeComponents> {
    let inflation = dataset
        .inflation()
        .ok_or_else(|| Error::Coverage("dataset has no inflation series".into()))?;
    let fuels = dataset
        .fuels()
        .ok_or_else(|| Error::Coverage("dataset has no reserve and production series".into()))?;
    let eta_delta = longevity_rate(inflation, period)?;
    let reserves = net_discovery_rate(&ReserveLedger::from_fuels(fuels), period, weighting)?;
    let extraction = extraction_efficiency_rate(dataset.materials(), dataset.energy(), period)?;
    Ok(TechChangeComponents {
        period,
        eta_delta,
        eta_reserves: reserves.total,
        eta_extraction: extraction.total,
        eta_tech_total: eta_delta + reserves.total + extraction.total,
        per_fuel: reserves.per_fuel,
        per_material: extraction.per_class,
        negative_discovery_years: reserves.negative_discovery_years,
    })
}

/// `mean(d ln η/dt) + 2·mean(η)` over a period, with its parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpliedTech {
    pub eta_mean: f64,
    pub innovation_mean: f64,
    pub eta_tech: f64,
}

pub fn eta_tech_implied(diag: &GrowthDiagnostics, period: YearRange, smoothed: bool) -> Result<ImpliedTech> {
    let (eta, innovation, _) = diag.rates(smoothed);
    require_period(innovation, period)?;
    let eta_mean = eta.mean_over(period)?;
    let innovation_mean = innovation.mean_over(period)?;
    Ok(ImpliedTech {
        eta_mean,
        innovation_mean,
        eta_tech: innovation_mean + 2.0 * eta_mean,
    })
}

/// Physical and implied estimates side by side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechComparison {
    pub physical: TechChangeComponents,
    pub implied: ImpliedTech,
    /// Implied minus physical.
    pub residual: f64,
}

pub fn compare_tech(
    dataset: &EconomicDataset,
    diag: &GrowthDiagnostics,
    period: YearRange,
    weighting: ProductionWeighting,
    smoothed: bool,
) -> Result<TechComparison> {
    let physical = eta_tech_physical(dataset, period, weighting)?;
    let implied = eta_tech_implied(diag, period, smoothed)?;
    Ok(TechComparison {
        residual: implied.eta_tech - physical.eta_tech_total,
        physical,
        implied,
    })
}
