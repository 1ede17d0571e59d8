#!/usr/bin/env python3
"""Regenerate the bundled synthetic-calibrated fixture dataset.

The fixture is NOT historical data. It is a smooth synthetic world whose
aggregate growth rates were tuned so that the pipeline reproduces the
published global aggregates (rates of return, innovation, technological
change components, lambda ~ 7.1 mW per 2005 USD). Users holding the real
source datasets should write their own manifest instead.

Usage: python3 tools/make_fixtures.py [output_dir]
Requires numpy and scipy.
"""
import os
import sys

import numpy as np
from scipy.interpolate import CubicSpline

YEAR_SECONDS = 31_557_600.0
FIRST, LAST = 1940, 2012
YEARS = np.arange(FIRST, LAST + 1)


def idx(year):
    return year - FIRST


# ---------------------------------------------------------------------------
# Rate of return eta(t) = Y / C. Smooth log-spline plus recession dips.
ETA_KNOT_YEARS = [1936, 1943, 1950, 1955, 1960, 1965, 1970, 1976,
                  1982, 1988, 1994, 2000, 2004, 2008, 2012, 2016]
ETA_LOG_KNOTS = [-10.97584, -10.72833, -10.485683, -10.315248, -10.145035,
                 -9.97748, -9.823824, -9.675484, -9.573061, -9.506176,
                 -9.456861, -9.412609, -9.384635, -9.359067, -9.337046,
                 -9.318258]
RECESSIONS = {1946: -0.012, 1947: -0.006, 1954: -0.006, 1958: -0.010,
              1974: -0.010, 1975: -0.018, 1976: -0.006, 1980: -0.006,
              1981: -0.010, 1982: -0.014, 1983: -0.006, 1991: -0.008,
              1992: -0.006, 1993: -0.007, 2001: -0.008, 2002: -0.004,
              2009: -0.040, 2010: -0.024, 2011: -0.024, 2012: -0.026}
ETA_1960 = 0.010

# Y(2010) in 2005 MER USD per year.
GWP_2010 = 5.2e13

# Relative wobble of lambda = a / C (natural log), spline knots.
LAMBDA_KNOT_YEARS = [1936, 1950, 1962, 1972, 1982, 1992, 2000, 2006, 2012, 2018]
LAMBDA_LOG_WOBBLE = [0.15358, 0.13931, 0.12534, 0.1098, 0.10269, 0.10031,
                     0.08183, 0.0939, 0.09616, 0.09641]
LAMBDA_MEAN_1970_2010 = 7.1e-3  # W per 2005 USD

# ---------------------------------------------------------------------------
# Technological-change inputs: per-period log growth rates in %/yr for
# 1950-1970, 1970-1990, 1990-2010.
PERIOD_KNOTS = [1950, 1970, 1990, 2010]
CEMENT_WOOD_PER_ENERGY = [2.2785, -0.7278, -0.3132]
IRON_STEEL_PER_ENERGY = [4.6785, -1.3278, 1.4868]
COPPER_PER_ENERGY = [3.7451, 0.0389, 1.0535]
OIL_RESERVES = [3.5963, 0.5211, -0.7138]
GAS_RESERVES = [8.2019, 2.3635, 0.5895]
LONGEVITY = [-0.0594, 0.1823, 0.2405]

# Production at the period knots, EJ/yr (geometric interpolation between).
OIL_PRODUCTION = [23.0, 107.0, 154.0, 187.0]
GAS_PRODUCTION = [8.5, 37.0, 95.0, 128.0]
COAL_PRODUCTION = [53.947, 84.108, 122.132, 194.066]

OIL_RESERVES_1950 = 600.0   # EJ
GAS_RESERVES_1950 = 300.0   # EJ
INFLATION_2010 = 0.030

NATIONS = ["usa", "gbr", "jpn", "deu", "ita", "fra"]


def eta_path():
    spline = CubicSpline(ETA_KNOT_YEARS, ETA_LOG_KNOTS, bc_type="natural")
    dips = np.array([RECESSIONS.get(int(y), 0.0) for y in YEARS])
    eta = np.exp(spline(YEARS) + dips)
    return eta * (ETA_1960 / eta[idx(1960)])


def gwp_and_wealth(eta):
    """Invert eta_i = Y_i / C_i with C built by the trapezoidal rule."""
    n = len(eta)
    wealth = np.zeros(n)
    gwp = np.zeros(n)
    wealth[0] = 1.0
    gwp[0] = eta[0]
    for i in range(1, n):
        wealth[i] = (wealth[i - 1] + 0.5 * gwp[i - 1]) / (1.0 - 0.5 * eta[i])
        gwp[i] = eta[i] * wealth[i]
    scale = GWP_2010 / gwp[idx(2010)]
    return gwp * scale, wealth * scale


def piecewise_log(rates_pct, start_value):
    """Log-linear path through the period knots, extended at the edges."""
    knots = [0.0]
    for r in rates_pct:
        knots.append(knots[-1] + r / 100.0 * 20.0)
    x = np.array(PERIOD_KNOTS, dtype=float)
    y = np.array(knots)
    out = np.interp(YEARS, x, y)
    lo = YEARS < x[0]
    out[lo] = y[0] + (YEARS[lo] - x[0]) * rates_pct[0] / 100.0
    hi = YEARS > x[-1]
    out[hi] = y[-1] + (YEARS[hi] - x[-1]) * rates_pct[-1] / 100.0
    return start_value * np.exp(out)


def geometric_through(values):
    rates = [np.log(values[k + 1] / values[k]) / 20.0 * 100.0 for k in range(3)]
    return piecewise_log(rates, values[0])


def decadal_wiggle(amplitude, phase):
    # Vanishes at every decade boundary so period endpoints are untouched.
    return 1.0 + amplitude * np.sin(np.pi * (YEARS - 1950) / 10.0 + phase) * \
        np.abs(np.sin(np.pi * (YEARS - 1950) / 10.0))


def inflation_path():
    levels = [INFLATION_2010]
    for r in reversed(LONGEVITY):
        levels.insert(0, levels[0] + r / 100.0 * 20.0)
    base = np.interp(YEARS, PERIOD_KNOTS, levels)
    base[YEARS < 1950] = levels[0]
    bumps = np.zeros(len(YEARS))
    for k, amp in enumerate([-0.035, 0.045, 0.02]):
        a = PERIOD_KNOTS[k]
        sel = (YEARS >= a) & (YEARS <= a + 20)
        bumps[sel] = amp * np.sin(np.pi * (YEARS[sel] - a) / 20.0)
    return base + bumps


def national_inflation(global_path):
    """Six synthetic national series whose unweighted mean is the global path."""
    offsets = []
    rng = np.random.default_rng(20151)
    for _ in NATIONS[:-1]:
        offsets.append(rng.normal(0.0, 0.01) + 0.004 * np.sin(YEARS / rng.uniform(3, 9)))
    offsets.append(-np.sum(offsets, axis=0))
    return {n: global_path + off for n, off in zip(NATIONS, offsets)}


def write_series(path, values, fmt="%.10g"):
    with open(path, "w", newline="\n") as f:
        f.write("year,value\n")
        for y, v in zip(YEARS, values):
            f.write(f"{y},{fmt % v}\n")


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(__file__), "..", "crates", "core", "fixtures")
    os.makedirs(out, exist_ok=True)

    eta = eta_path()
    gwp, wealth = gwp_and_wealth(eta)

    wobble = np.exp(CubicSpline(LAMBDA_KNOT_YEARS, LAMBDA_LOG_WOBBLE,
                                bc_type="natural")(YEARS))
    window = slice(idx(1970), idx(2010) + 1)
    lam = wobble * LAMBDA_MEAN_1970_2010 / wobble[window].mean()
    energy_w = lam * wealth
    energy_ej = energy_w * YEAR_SECONDS / 1e18
    energy_rel = energy_w / energy_w[idx(1950)]

    write_series(os.path.join(out, "gwp.csv"), gwp)
    write_series(os.path.join(out, "energy.csv"), energy_ej)

    cw = piecewise_log(CEMENT_WOOD_PER_ENERGY, 1.0) * energy_rel * 4.0e8
    share = np.clip(0.25 + 0.5 * (YEARS - 1940) / 72.0, 0.0, 1.0)
    cw_wiggle = decadal_wiggle(0.01, 0.3)
    write_series(os.path.join(out, "cement.csv"), cw * share * cw_wiggle)
    write_series(os.path.join(out, "wood.csv"), cw * (1.0 - share) * cw_wiggle)
    write_series(os.path.join(out, "iron_steel.csv"),
                 piecewise_log(IRON_STEEL_PER_ENERGY, 1.0) * energy_rel * 190.0
                 * decadal_wiggle(0.015, 1.1))
    write_series(os.path.join(out, "copper.csv"),
                 piecewise_log(COPPER_PER_ENERGY, 1.0) * energy_rel * 2.5
                 * decadal_wiggle(0.01, 2.0))

    write_series(os.path.join(out, "oil_reserves.csv"),
                 piecewise_log(OIL_RESERVES, OIL_RESERVES_1950) * decadal_wiggle(0.01, 0.7))
    write_series(os.path.join(out, "gas_reserves.csv"),
                 piecewise_log(GAS_RESERVES, GAS_RESERVES_1950) * decadal_wiggle(0.01, 1.9))
    write_series(os.path.join(out, "oil_production.csv"), geometric_through(OIL_PRODUCTION))
    write_series(os.path.join(out, "gas_production.csv"), geometric_through(GAS_PRODUCTION))
    write_series(os.path.join(out, "coal_production.csv"), geometric_through(COAL_PRODUCTION))

    infl = inflation_path()
    national = national_inflation(infl)
    pre = YEARS < 1970
    blended = infl.copy()
    blended[pre] = np.mean([national[n][pre] for n in NATIONS], axis=0)
    write_series(os.path.join(out, "inflation.csv"), blended, fmt="%.12g")


if __name__ == "__main__":
    main()
