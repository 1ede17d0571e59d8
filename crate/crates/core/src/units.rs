//! Unit tags carried by every series, and the fixed conversion constants.
//!
//! Canonical internal units are watts for power and 2005 MER USD per year
//! for production. All conversion happens at the ingest boundary; the
//! numerical modules never look at units beyond checking them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Length of the Julian year in seconds.
pub const YEAR_SECONDS: f64 = 31_557_600.0;

/// Joules in one exajoule.
pub const JOULES_PER_EXAJOULE: f64 = 1e18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Unit {
    /// Power in W.
    Watts,
    /// 2005 MER USD per year.
    CurrencyPerYear,
    /// 2005 MER USD.
    Currency,
    /// EJ per year.
    EnergyPerYear,
    /// EJ.
    Energy,
    /// Fraction per year (not percent).
    FractionPerYear,
    Dimensionless,
    /// Mt per year.
    MassPerYear,
    /// Cubic metres per year.
    VolumePerYear,
    /// W per 2005 USD, the unit of lambda.
    WattsPerCurrency,
    /// 2005 USD per joule, the unit of production efficiency.
    CurrencyPerJoule,
}

impl Unit {
    pub const ALL: [Unit; 11] = [
        Unit::Watts,
        Unit::CurrencyPerYear,
        Unit::Currency,
        Unit::EnergyPerYear,
        Unit::Energy,
        Unit::FractionPerYear,
        Unit::Dimensionless,
        Unit::MassPerYear,
        Unit::VolumePerYear,
        Unit::WattsPerCurrency,
        Unit::CurrencyPerJoule,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Unit::Watts => "W",
            Unit::CurrencyPerYear => "USD/yr",
            Unit::Currency => "USD",
            Unit::EnergyPerYear => "EJ/yr",
            Unit::Energy => "EJ",
            Unit::FractionPerYear => "1/yr",
            Unit::Dimensionless => "1",
            Unit::MassPerYear => "Mt/yr",
            Unit::VolumePerYear => "m3/yr",
            Unit::WattsPerCurrency => "W/USD",
            Unit::CurrencyPerJoule => "USD/J",
        }
    }

    /// True for units that are a rate of flow per unit time.
    pub fn is_flux(self) -> bool {
        matches!(
            self,
            Unit::Watts
                | Unit::CurrencyPerYear
                | Unit::EnergyPerYear
                | Unit::MassPerYear
                | Unit::VolumePerYear
        )
    }

    /// The unit obtained by integrating this flux over time in years.
    ///
    /// Watts integrate to EJ after conversion; everything else keeps its
    /// numerator.
    pub fn integrated(self) -> Result<Unit> {
        match self {
            Unit::CurrencyPerYear => Ok(Unit::Currency),
            Unit::EnergyPerYear => Ok(Unit::Energy),
            Unit::FractionPerYear => Ok(Unit::Dimensionless),
            other => Err(Error::Unit(format!(
                "cannot integrate a series in {} over years",
                other.token()
            ))),
        }
    }

    /// Factor that converts a value in `self` into `target`.
    pub fn conversion_factor(self, target: Unit) -> Result<f64> {
        if self == target {
            return Ok(1.0);
        }
        match (self, target) {
            (Unit::EnergyPerYear, Unit::Watts) => Ok(JOULES_PER_EXAJOULE / YEAR_SECONDS),
            (Unit::Watts, Unit::EnergyPerYear) => Ok(YEAR_SECONDS / JOULES_PER_EXAJOULE),
            _ => Err(Error::Unit(format!(
                "no conversion from {} to {}",
                self.token(),
                target.token()
            ))),
        }
    }

    pub fn convert(self, value: f64, target: Unit) -> Result<f64> {
        Ok(value * self.conversion_factor(target)?)
    }
}

/// Converts a production flux from USD per year to USD per second.
pub fn currency_per_year_to_per_second(usd_per_year: f64) -> f64 {
    usd_per_year / YEAR_SECONDS
}

pub fn currency_per_second_to_per_year(usd_per_second: f64) -> f64 {
    usd_per_second * YEAR_SECONDS
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        Unit::ALL
            .iter()
            .copied()
            .find(|u| u.token().eq_ignore_ascii_case(t))
            .ok_or_else(|| Error::Unit(format!("unrecognized unit '{t}'")))
    }
}

impl Serialize for Unit {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.token())
    }
}

impl<'de> Deserialize<'de> for Unit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_exajoule_per_year_in_watts() {
        let w = Unit::EnergyPerYear.convert(1.0, Unit::Watts).unwrap();
        assert!((w - 3.168_808_781e10).abs() / w < 1e-9);
    }

    #[test]
    fn tokens_parse_back() {
        for u in Unit::ALL {
            assert_eq!(u.token().parse::<Unit>().unwrap(), u);
        }
        assert!("furlongs".parse::<Unit>().is_err());
    }

    #[test]
    fn currency_seconds_round_trip() {
        let y = 5.2e13;
        let back = currency_per_second_to_per_year(currency_per_year_to_per_second(y));
        assert!((back - y).abs() / y < 1e-15);
    }

    #[test]
    fn incompatible_conversion_is_unit_error() {
        assert!(matches!(
            Unit::Watts.conversion_factor(Unit::Currency),
            Err(Error::Unit(_))
        ));
    }
}
