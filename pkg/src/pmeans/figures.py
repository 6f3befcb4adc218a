"""Data behind the ratio-density plots: the critical stability index where
the ratio density turns bimodal, the extremum loci, and grid tables.

The density of the stable ratio R has derivative proportional (with a
strictly negative factor) to the quadratic

    (1 + a) x^2 + 2 x cos(a pi) + (1 - a),   x = r^a,

so its shape is controlled by half the discriminant, cos^2(a pi) + a^2 - 1:
strictly decreasing while it is negative, bimodal once it turns positive.
"""

from __future__ import annotations

import math

import numpy as np

from .specialfn import stable_ratio_pdf

__all__ = [
    "half_discriminant",
    "alpha_critical",
    "inflection_abscissa",
    "ratio_extrema",
    "power_density",
    "density_sign_changes",
    "ratio_density_table",
    "discriminant_table",
]


def half_discriminant(alpha: float) -> float:
    """cos^2(alpha pi) + alpha^2 - 1."""
    return math.cos(alpha * math.pi) ** 2 + alpha * alpha - 1.0


def alpha_critical(tol: float = 1e-10) -> float:
    """Unique root of the half discriminant in (0, 1), by bisection on the
    bracket [0.5, 0.99] where the function crosses from - to +."""
    lo, hi = 0.5, 0.99
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if half_discriminant(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def inflection_abscissa(alpha_c: float | None = None) -> float:
    """Location (sqrt(1 - ac^2)/(1 + ac))^(1/ac) of the inflection of the
    ratio density at the critical index."""
    ac = alpha_critical() if alpha_c is None else alpha_c
    return (math.sqrt(1.0 - ac * ac) / (1.0 + ac)) ** (1.0 / ac)


def ratio_extrema(alpha: float) -> tuple[float, float]:
    """(r_minus, r_plus): local-minimum and local-maximum locations of the
    ratio density, the quadratic roots taken to the power 1/alpha.
    Requires a nonnegative discriminant (alpha >= alpha_critical)."""
    d2 = half_discriminant(alpha)
    if d2 < 0.0:
        raise ValueError(f"density is strictly decreasing at alpha = {alpha}")
    c = math.cos(alpha * math.pi)
    root = math.sqrt(d2)
    x_minus = (-c - root) / (1.0 + alpha)
    x_plus = (-c + root) / (1.0 + alpha)
    return x_minus ** (1.0 / alpha), x_plus ** (1.0 / alpha)


def power_density(alpha: float, x: float) -> float:
    """Density of R^alpha (the conditioned scaled-Cauchy form):
    sin(a pi) / (a pi (1 + 2 x cos(a pi) + x^2)) on x > 0."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if x < 0.0:
        raise ValueError(f"x must be >= 0, got {x}")
    return math.sin(alpha * math.pi) / (
        alpha * math.pi * (1.0 + 2.0 * x * math.cos(alpha * math.pi) + x * x)
    )


def density_sign_changes(alpha: float, n_grid: int = 4001) -> int:
    """Sign changes of the numeric derivative of the ratio density over a
    log-spaced grid; 0 for a strictly decreasing density, 2 for a bimodal
    one."""
    r = np.geomspace(1e-3, 2.0, n_grid)
    f = np.array([stable_ratio_pdf(alpha, float(v)) for v in r])
    s = np.sign(np.diff(f))
    s = s[s != 0.0]
    return int(np.sum(s[1:] != s[:-1]))


def ratio_density_table(points: int = 257) -> list[tuple[float, str, float, float]]:
    """Rows (alpha, variable, grid, density) for alpha = k/8, k = 1..7:
    variable "power" tabulates the density of R^alpha, "ratio" of R."""
    rows = []
    xs = np.linspace(0.0, 3.0, points)
    rs = np.linspace(1e-3, 3.0, points)
    for k in range(1, 8):
        a = k / 8.0
        for x in xs:
            rows.append((a, "power", float(x), power_density(a, float(x))))
        for r in rs:
            rows.append((a, "ratio", float(r), stable_ratio_pdf(a, float(r))))
    return rows


def discriminant_table(points: int = 257) -> list[tuple[float, float, float, float]]:
    """Rows (alpha, half_discriminant, r_minus, r_plus); the extremum loci
    are NaN below the critical index."""
    ac = alpha_critical()
    rows = []
    for a in np.linspace(0.01, 0.99, points):
        a = float(a)
        if a >= ac:
            rm, rp = ratio_extrema(a)
        else:
            rm = rp = math.nan
        rows.append((a, half_discriminant(a), rm, rp))
    return rows
