//! Thermodynamic model of global economic growth: wealth and power
//! diagnostics, technological-change estimates, logistic hindcasts and
//! their skill against persistence.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod hindcast;
pub mod identity;
pub mod ingest;
pub mod logistic;
pub mod plot;
pub mod report;
pub mod series;
pub mod techchange;
pub mod units;

pub use error::{Error, ErrorClass, Result};
pub use series::{AnnualSeries, RateSeries, YearRange};
pub use units::Unit;
