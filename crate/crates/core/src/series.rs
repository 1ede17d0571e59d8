//! Annual series and the small amount of calculus the model needs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::Unit;

/// A contiguous annual series: `values[i]` belongs to `start_year + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualSeries {
    name: String,
    start_year: i32,
    unit: Unit,
    values: Vec<f64>,
}

/// A relative growth rate per year attributed to each calendar year.
pub type RateSeries = AnnualSeries;

impl AnnualSeries {
    pub fn new(name: impl Into<String>, start_year: i32, values: Vec<f64>, unit: Unit) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(Error::InsufficientData(format!("{name}: series is empty")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "{name}: non-finite value in {}",
                start_year + i as i32
            )));
        }
        Ok(AnnualSeries {
            name,
            start_year,
            unit,
            values,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    pub fn end_year(&self) -> i32 {
        self.start_year + self.values.len() as i32 - 1
    }

    pub fn span(&self) -> YearRange {
        YearRange {
            start: self.start_year,
            end: self.end_year(),
        }
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.values.len() as i32).map(move |i| self.start_year + i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.years().zip(self.values.iter().copied())
    }

    pub fn contains_year(&self, year: i32) -> bool {
        year >= self.start_year && year <= self.end_year()
    }

    pub fn get(&self, year: i32) -> Option<f64> {
        if self.contains_year(year) {
            Some(self.values[(year - self.start_year) as usize])
        } else {
            None
        }
    }

    /// Value at `year`, or a range error naming the series.
    pub fn at(&self, year: i32) -> Result<f64> {
        self.get(year).ok_or_else(|| {
            Error::Range(format!(
                "{}: year {year} outside {}",
                self.name,
                self.span()
            ))
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Same values under a different unit tag. Used after a conversion.
    pub fn relabel(mut self, unit: Unit) -> Self {
        self.unit = unit;
        self
    }

    pub fn map(&self, name: impl Into<String>, unit: Unit, f: impl Fn(f64) -> f64) -> Result<Self> {
        AnnualSeries::new(
            name,
            self.start_year,
            self.values.iter().map(|&v| f(v)).collect(),
            unit,
        )
    }

    /// The sub-series covering `range`, which must lie inside the span.
    pub fn slice(&self, range: YearRange) -> Result<Self> {
        self.require_covers(range)?;
        let a = (range.start - self.start_year) as usize;
        let b = (range.end - self.start_year) as usize;
        AnnualSeries::new(
            self.name.clone(),
            range.start,
            self.values[a..=b].to_vec(),
            self.unit,
        )
    }

    pub fn require_covers(&self, range: YearRange) -> Result<()> {
        if self.contains_year(range.start) && self.contains_year(range.end) {
            Ok(())
        } else {
            Err(Error::Range(format!(
                "{}: {range} not within {}",
                self.name,
                self.span()
            )))
        }
    }

    pub fn require_positive(&self) -> Result<()> {
        match self.iter().find(|&(_, v)| v <= 0.0) {
            Some((year, v)) => Err(Error::Domain(format!(
                "{}: value {v} in {year} is not strictly positive",
                self.name
            ))),
            None => Ok(()),
        }
    }

    /// Arithmetic mean of the values for the years in `range`, inclusive.
    pub fn mean_over(&self, range: YearRange) -> Result<f64> {
        let s = self.slice(range)?;
        Ok(s.values.iter().sum::<f64>() / s.len() as f64)
    }

    /// Pointwise operation on the overlapping years of two series.
    pub fn zip_with(
        &self,
        other: &AnnualSeries,
        name: impl Into<String>,
        unit: Unit,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let overlap = self.span().intersect(other.span()).ok_or_else(|| {
            Error::Coverage(format!(
                "{} ({}) and {} ({}) do not overlap",
                self.name,
                self.span(),
                other.name,
                other.span()
            ))
        })?;
        let values = overlap
            .years()
            .map(|y| f(self.get(y).unwrap(), other.get(y).unwrap()))
            .collect();
        AnnualSeries::new(name, overlap.start, values, unit)
    }
}

/// Inclusive range of calendar years, written `1950:1970` on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct YearRange {
    pub start: i32,
    pub end: i32,
}

impl YearRange {
    pub fn new(start: i32, end: i32) -> Result<Self> {
        if start > end {
            return Err(Error::Range(format!("empty year range {start}:{end}")));
        }
        Ok(YearRange { start, end })
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn span_years(&self) -> f64 {
        (self.end - self.start) as f64
    }

    pub fn years(&self) -> std::ops::RangeInclusive<i32> {
        self.start..=self.end
    }

    pub fn contains(&self, other: YearRange) -> bool {
        other.start >= self.start && other.end <= self.end
    }

    pub fn intersect(&self, other: YearRange) -> Option<YearRange> {
        let start = self.start.max(other.start);
        let end = self.end.min(other.end);
        (start <= end).then_some(YearRange { start, end })
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start, self.end)
    }
}

impl FromStr for YearRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("year range '{s}' is not of the form START:END"));
        let (a, b) = s.trim().split_once(':').ok_or_else(bad)?;
        let start = a.trim().parse().map_err(|_| bad())?;
        let end = b.trim().parse().map_err(|_| bad())?;
        YearRange::new(start, end)
    }
}

/// Trapezoidal running integral on a uniform grid.
pub fn cumulative_trapezoid(values: &[f64], step: f64, initial: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = initial;
    for (i, &v) in values.iter().enumerate() {
        if i > 0 {
            acc += 0.5 * step * (values[i - 1] + v);
        }
        out.push(acc);
    }
    out
}

/// Centered difference of `ln v` on a uniform grid, interior points only.
///
/// Callers guarantee positivity and at least three points.
pub fn centered_log_diff(values: &[f64], step: f64) -> Vec<f64> {
    values
        .windows(3)
        .map(|w| (w[2].ln() - w[0].ln()) / (2.0 * step))
        .collect()
}

/// `initial` plus the trapezoidal integral of an annual flux.
pub fn integrate_cumulative(series: &AnnualSeries, initial: f64) -> Result<AnnualSeries> {
    if !series.unit().is_flux() && series.unit() != Unit::FractionPerYear {
        return Err(Error::Unit(format!(
            "{}: {} is not a per-time unit",
            series.name(),
            series.unit()
        )));
    }
    if !(initial >= 0.0) {
        return Err(Error::Parameter(format!(
            "initial accumulation must be non-negative, got {initial}"
        )));
    }
    let unit = series.unit().integrated()?;
    AnnualSeries::new(
        format!("cumulative {}", series.name()),
        series.start_year(),
        cumulative_trapezoid(series.values(), 1.0, initial),
        unit,
    )
}

/// Centered log-derivative; the result loses the first and last year.
pub fn log_derivative(series: &AnnualSeries) -> Result<RateSeries> {
    if series.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{}: log-derivative needs at least 3 years, got {}",
            series.name(),
            series.len()
        )));
    }
    series.require_positive()?;
    AnnualSeries::new(
        format!("dln {}", series.name()),
        series.start_year() + 1,
        centered_log_diff(series.values(), 1.0),
        Unit::FractionPerYear,
    )
}

/// Centered moving average over `window_years + 1` points when the window is
/// even (a window of 10 spans ±5 years) and `window_years` points when odd.
/// Near the edges the window shrinks symmetrically.
pub fn running_decadal_mean(series: &AnnualSeries, window_years: usize) -> Result<AnnualSeries> {
    if window_years == 0 {
        return Err(Error::Parameter("smoothing window must be at least 1 year".into()));
    }
    let half = window_years / 2;
    let v = series.values();
    let n = v.len();
    let out = (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let w = &v[i - h..=i + h];
            w.iter().sum::<f64>() / w.len() as f64
        })
        .collect();
    AnnualSeries::new(series.name(), series.start_year(), out, series.unit())
}

/// Geometric-mean growth rate between two years.
pub fn interval_average_rate(series: &AnnualSeries, year_a: i32, year_b: i32) -> Result<f64> {
    if year_a >= year_b {
        return Err(Error::Range(format!(
            "interval {year_a}:{year_b} must run forwards"
        )));
    }
    let a = series.at(year_a)?;
    let b = series.at(year_b)?;
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::Domain(format!(
            "{}: interval rate needs positive endpoints",
            series.name()
        )));
    }
    Ok((b.ln() - a.ln()) / (year_b - year_a) as f64)
}
