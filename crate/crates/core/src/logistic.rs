//! Logistic dynamics of the rate of return, `dη/dt = η_tech·η − 2η²`.
//!
//! The closed form is evaluated as
//!
//! ```text
//! η(t) = η₀ eˣ / (1 + 2η₀ t φ(x)),   x = η_tech t,   φ(x) = (eˣ − 1)/x
//! ```
//!
//! which is algebraically the usual `(η_tech/2) / (1 + (G − 1) e⁻ˣ)` but
//! stays finite as `η_tech → 0`, where it reduces to `η₀ / (1 + 2η₀ t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::RateSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    eta0: f64,
    eta_tech: f64,
    t0: f64,
}

impl LogisticParams {
    /// `eta0` must be positive; `eta_tech` may take any finite value.
    pub fn new(eta0: f64, eta_tech: f64, t0: f64) -> Result<Self> {
        if !(eta0 > 0.0 && eta0.is_finite()) {
            return Err(Error::Parameter(format!(
                "initial rate of return must be positive and finite, got {eta0}"
            )));
        }
        if !eta_tech.is_finite() || !t0.is_finite() {
            return Err(Error::Parameter(
                "rate of technological change and start time must be finite".into(),
            ));
        }
        Ok(LogisticParams { eta0, eta_tech, t0 })
    }

    pub fn eta0(&self) -> f64 {
        self.eta0
    }

    pub fn eta_tech(&self) -> f64 {
        self.eta_tech
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// The growth number `G = η_tech / (2η₀)`.
    pub fn growth_number(&self) -> f64 {
        0.5 * self.eta_tech / self.eta0
    }

    /// Long-run rate of return, `η_tech/2`, meaningful only when `G > 0`.
    pub fn asymptote(&self) -> f64 {
        0.5 * self.eta_tech
    }
}

/// `(eˣ − 1)/x`, with its limit 1 at the origin.
fn phi(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + 0.5 * x
    } else {
        x.exp_m1() / x
    }
}

/// `η` at `t` years after `t0`.
pub fn eta_analytic(p: &LogisticParams, t: f64) -> f64 {
    let x = p.eta_tech * t;
    p.eta0 * x.exp() / (1.0 + 2.0 * p.eta0 * t * phi(x))
}

/// `d ln Y/dt = η_tech − η`.
pub fn gwp_growth_analytic(p: &LogisticParams, t: f64) -> f64 {
    p.eta_tech - eta_analytic(p, t)
}

/// `d ln η/dt = η_tech − 2η`.
pub fn innovation_analytic(p: &LogisticParams, t: f64) -> f64 {
    p.eta_tech - 2.0 * eta_analytic(p, t)
}

/// `∫₀ᵗ η dt′ = ln C(t) − ln C(0)`.
pub fn log_wealth_increment(p: &LogisticParams, t: f64) -> f64 {
    let x = p.eta_tech * t;
    0.5 * (2.0 * p.eta0 * t * phi(x)).ln_1p()
}

/// Interval averages of the three rates, each per year.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTriple {
    pub eta: f64,
    pub innovation: f64,
    pub gwp_growth: f64,
}

/// Averages over `[t1, t2]` (years since `t0`), measured as log-endpoint
/// differences of `C` and `η`; GWP growth is their sum since `Y = ηC`.
pub fn decade_averages(p: &LogisticParams, t1: f64, t2: f64) -> Result<RateTriple> {
    if !(t2 > t1) {
        return Err(Error::Parameter(format!(
            "averaging interval [{t1}, {t2}] must run forwards"
        )));
    }
    let span = t2 - t1;
    let eta = (log_wealth_increment(p, t2) - log_wealth_increment(p, t1)) / span;
    let e1 = eta_analytic(p, t1);
    let e2 = eta_analytic(p, t2);
    if !(e1 > 0.0 && e2 > 0.0) {
        return Err(Error::Domain(
            "rate of return is not positive on the averaging interval".into(),
        ));
    }
    let innovation = (e2.ln() - e1.ln()) / span;
    Ok(RateTriple {
        eta,
        innovation,
        gwp_growth: eta + innovation,
    })
}

/// Sampled solution. `years` are calendar times; `innovation` equals
/// `eta_tech − 2·eta` at every sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub years: Vec<f64>,
    pub eta: Vec<f64>,
    pub gwp_growth: Vec<f64>,
    pub innovation: Vec<f64>,
    pub eta_tech: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }

    pub fn last_eta(&self) -> f64 {
        *self.eta.last().unwrap()
    }
}

fn check_steps(horizon: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("step must be positive, got {dt}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Parameter(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    Ok(())
}

/// Classical fourth-order Runge-Kutta with fixed step `dt`; the final step
/// is shortened to land exactly on the horizon.
///
/// `forcing(t, η)` gives `η_tech` at calendar time `t`.
pub fn integrate_with_forcing(
    eta0: f64,
    t0: f64,
    horizon: f64,
    dt: f64,
    forcing: impl Fn(f64, f64) -> f64,
) -> Result<Trajectory> {
    check_steps(horizon, dt)?;
    let rhs = |t: f64, eta: f64| forcing(t, eta) * eta - 2.0 * eta * eta;

    let full_steps = (horizon / dt).floor() as usize;
    let remainder = horizon - full_steps as f64 * dt;
    // Skip a sliver of a last step caused by rounding in horizon/dt.
    let extra = usize::from(remainder > 1e-9 * dt);
    let n = full_steps + extra;

    let mut traj = Trajectory {
        years: Vec::with_capacity(n + 1),
        eta: Vec::with_capacity(n + 1),
        gwp_growth: Vec::with_capacity(n + 1),
        innovation: Vec::with_capacity(n + 1),
        eta_tech: Vec::with_capacity(n + 1),
    };
    let mut push = |t: f64, eta: f64| {
        let et = forcing(t, eta);
        traj.years.push(t);
        traj.eta.push(eta);
        traj.gwp_growth.push(et - eta);
        traj.innovation.push(et - 2.0 * eta);
        traj.eta_tech.push(et);
    };

    let mut eta = eta0;
    push(t0, eta);
    for k in 0..n {
        let t = t0 + k as f64 * dt;
        let h = if k < full_steps { dt } else { remainder };
        let k1 = rhs(t, eta);
        let k2 = rhs(t + 0.5 * h, eta + 0.5 * h * k1);
        let k3 = rhs(t + 0.5 * h, eta + 0.5 * h * k2);
        let k4 = rhs(t + h, eta + h * k3);
        eta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        let t_next = if k + 1 == n { t0 + horizon } else { t0 + (k + 1) as f64 * dt };
        push(t_next, eta);
    }
    Ok(traj)
}

/// Integrates the logistic equation with constant `η_tech`.
pub fn integrate_ode(p: &LogisticParams, horizon: f64, dt: f64) -> Result<Trajectory> {
    let et = p.eta_tech;
    integrate_with_forcing(p.eta0, p.t0, horizon, dt, move |_, _| et)
}

/// Piecewise-linear interpolation of an annual rate series at calendar time
/// `t`, or `None` outside its span.
pub fn interpolate_rate(series: &RateSeries, t: f64) -> Option<f64> {
    let start = series.start_year() as f64;
    let end = series.end_year() as f64;
    if !(t >= start && t <= end) {
        return None;
    }
    let v = series.values();
    let pos = t - start;
    let i = (pos.floor() as usize).min(v.len() - 1);
    if i + 1 >= v.len() {
        return Some(v[i]);
    }
    let frac = pos - i as f64;
    Some(v[i] + (v[i + 1] - v[i]) * frac)
}

/// Integrates with `η_tech(t)` interpolated from an annual series.
///
/// With a constant series this is bit-identical to [`integrate_ode`].
pub fn time_dependent_eta_tech_integrate(
    eta0: f64,
    t0: f64,
    eta_tech_series: &RateSeries,
    horizon: f64,
    dt: f64,
) -> Result<Trajectory> {
    LogisticParams::new(eta0, 0.0, t0)?;
    check_steps(horizon, dt)?;
    let need_start = t0;
    let need_end = t0 + horizon;
    if need_start < eta_tech_series.start_year() as f64
        || need_end > eta_tech_series.end_year() as f64
    {
        return Err(Error::Coverage(format!(
            "{} ({}) does not cover {need_start}..{need_end}",
            eta_tech_series.name(),
            eta_tech_series.span()
        )));
    }
    integrate_with_forcing(eta0, t0, horizon, dt, |t, _| {
        // The span check above keeps every stage time inside the series.
        interpolate_rate(eta_tech_series, t.clamp(t0, need_end)).unwrap()
    })
}
