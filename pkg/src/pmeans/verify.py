"""Named, reproducible identity checks: Monte Carlo pipelines pitted
against closed forms, reported as machine-readable pass/fail records.

Every check is a pure function of (check_name, config): the RNG stream is
keyed by the seed and a stable hash of the check name, so reports are
bit-for-bit reproducible.  Thresholds: Kolmogorov-Smirnov statistics are
compared against 1.95/sqrt(n) (about the 99.9% null quantile) unless a
cell pins a looser value; moment-style statistics are compared against 3
empirical standard errors.

Each check accepts config["perturb"] = True, which shifts a parameter of
its *analytic target* by 0.2 while leaving the simulation alone; a sound
threshold must then fail, which guards against vacuous tolerances.

Truncation policy for stick-broken weight laws: the residual mass decays
exponentially for alpha = 0 but only polynomially (like j^-(1-a)/a) for
alpha > 0, so per-alpha tolerances are used and the truncated mass is
pushed through the defect-mean correction.  The correction makes mean
functionals exactly unbiased; smooth-moment statistics inherit a bias
O(tol^2) and distribution-level (KS) statistics O(tol), both chosen to
sit well under the corresponding thresholds.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import betainc

from . import _kernels
from .discrete import MAX_ATOMS, AlphaTheta
from .pmean import AtomicDistribution, cs_transform_rhs
from .sampling import RngStream, _stable_transform
from .specialfn import SeriesControl, log_gamma, mittag_leffler

__all__ = [
    "CheckReport",
    "ks_statistic",
    "ks_two_sample",
    "run_check",
    "run_all",
    "check_names",
    "default_cells",
    "check_identity",
    "darling_lamperti_cdf",
    "darling_lamperti_mass",
]

KS_COEF = 1.95
_CHUNK = 4_000


@dataclass(frozen=True)
class CheckReport:
    check_name: str
    statistic: float
    threshold: float
    n_samples: int
    seed: int
    passed: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "check_name": self.check_name,
                "statistic": self.statistic,
                "threshold": self.threshold,
                "n_samples": self.n_samples,
                "seed": self.seed,
                "passed": self.passed,
            }
        )


def ks_statistic(samples, cdf: Callable) -> float:
    """Sup-norm distance between the empirical CDF of sorted samples and
    the given CDF (evaluated vectorized on the sample points)."""
    s = np.asarray(samples, dtype=np.float64)
    if s.size == 0:
        raise ValueError("samples must be nonempty")
    if np.any(np.diff(s) < 0.0):
        raise ValueError("samples must be sorted ascending")
    f = np.asarray(cdf(s), dtype=np.float64)
    i = np.arange(1, s.size + 1, dtype=np.float64)
    n = float(s.size)
    return float(max((i / n - f).max(), (f - (i - 1.0) / n).max()))


def ks_two_sample(a, b) -> float:
    """Sup-norm distance between the empirical CDFs of two samples."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.abs(fa - fb).max())


def _ks_threshold(n: int, floor: float | None = None) -> float:
    """Null KS quantile; a cell may pin a looser floor (stated for its
    default n), which never tightens the n-dependent value."""
    return max(KS_COEF / math.sqrt(n), floor or 0.0)


def _ks2_threshold(n1: int, n2: int, floor: float | None = None) -> float:
    return max(KS_COEF * math.sqrt((n1 + n2) / (n1 * n2)), floor or 0.0)


def _check_trunc_tol(alpha: float) -> float:
    """Stick-breaking truncation tolerance per stability index (see module
    docstring for the bias accounting).  At alpha <= 0 the residual decays
    exponentially, so an extremely small tolerance is nearly free and keeps
    the truncation floor below the visible left tail even for beta targets
    with tiny first parameter."""
    if alpha <= 0.0:
        return 1e-60
    if alpha <= 0.35:
        return 1e-5
    return 2e-3


# ----------------------------------------------------------------------
# sampling pipelines (batched; all randomness from the passed Generator)


def _atomic_params(x: AtomicDistribution) -> np.ndarray:
    cum = np.cumsum(x.probs)
    cum[-1] = 1.0
    return np.concatenate([[len(x.values)], x.values, cum])


def gem_mean_sample(
    params: AlphaTheta, x: AtomicDistribution, trunc_tol: float, n: int, gen
) -> np.ndarray:
    """n stick-broken P-means of atomic X, defect-corrected by E X."""
    if x.values == (0.0, 1.0):
        kind, xp = _kernels.X_BERNOULLI, np.array([x.probs[1]])
    else:
        kind, xp = _kernels.X_ATOMIC, _atomic_params(x)
    return _kernels.gem_pmean_batch(
        params.alpha, params.theta, trunc_tol, MAX_ATOMS, n, kind, xp, x.mean(), gen
    )


def _gem_weights_apply(params, trunc_tol, n, gen, fn) -> np.ndarray:
    """Run fn(flat, offsets, defects) over fixed-size weight batches."""
    out = []
    done = 0
    while done < n:
        b = min(_CHUNK, n - done)
        flat, offsets, defects = _kernels.gem_weights_batch(
            params.alpha, params.theta, trunc_tol, MAX_ATOMS, b, gen
        )
        out.append(fn(flat, offsets, defects))
        done += b
    return np.concatenate(out)


def stable_bernoulli_mean_sample(alpha: float, p: float, n: int, gen) -> np.ndarray:
    """Exact stable-increment construction of the (alpha, 0) mean of a
    Bernoulli(p): p^(1/a) T / (p^(1/a) T + q^(1/a) T')."""
    u1 = gen.random(n) * math.pi
    e1 = gen.standard_exponential(n)
    t1 = _stable_transform(alpha, u1, e1)
    u2 = gen.random(n) * math.pi
    e2 = gen.standard_exponential(n)
    t2 = _stable_transform(alpha, u2, e2)
    pa = p ** (1.0 / alpha)
    qa = (1.0 - p) ** (1.0 / alpha)
    return pa * t1 / (pa * t1 + qa * t2)


def compose_mean_sample(
    theta: float, alpha: float, p: float, trunc_tol: float, n: int, gen
) -> np.ndarray:
    """Means of Bernoulli(p) under fragmentation of a stick-broken
    (0, theta) law by independent (alpha, 0) laws: each atom of the outer
    law contributes its weight times a fresh exact (alpha, 0) mean."""
    outer = AlphaTheta(0.0, theta)

    def fn(flat, offsets, defects):
        y = stable_bernoulli_mean_sample(alpha, p, flat.size, gen)
        seg = np.add.reduceat(flat * y, offsets[:-1])
        return seg + defects * p

    return _gem_weights_apply(outer, trunc_tol, n, gen, fn)


def gem_cauchy_mean_sample(
    theta: float, a: float, b: float, trunc_tol: float, n: int, gen
) -> np.ndarray:
    """Stick-broken (0, theta) means of a + b*Cauchy.  The defect mass is
    compensated at the center a (the residual Cauchy mass is symmetric
    about a and of scale b*defect, negligible at the tolerances used)."""
    params = AlphaTheta(0.0, theta)

    def fn(flat, offsets, defects):
        x = a + b * np.tan(math.pi * (gen.random(flat.size) - 0.5))
        seg = np.add.reduceat(flat * x, offsets[:-1])
        return seg + defects * a

    return _gem_weights_apply(params, trunc_tol, n, gen, fn)


# ----------------------------------------------------------------------
# analytic CDF helpers


def _beta_cdf(a: float, b: float):
    return lambda u: betainc(a, b, np.clip(u, 0.0, 1.0))


def _dl_pdf_arr(alpha: float, p: float, u: np.ndarray) -> np.ndarray:
    q = 1.0 - p
    cu = 1.0 - u
    num = p * q * math.sin(alpha * math.pi) * u ** (alpha - 1.0) * cu ** (alpha - 1.0)
    den = math.pi * (
        q * q * u ** (2.0 * alpha)
        + 2.0 * p * q * (u * cu) ** alpha * math.cos(alpha * math.pi)
        + p * p * cu ** (2.0 * alpha)
    )
    return num / den


def _cumulative_gauss(f, lo: float, hi: float, n_seg: int, nodes: int = 16):
    """Cumulative integral of a smooth vectorized f over [lo, hi] by
    composite Gauss-Legendre; returns (edges, cumulative at edges)."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(lo, hi, n_seg + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = mid[:, None] + half[:, None] * x[None, :]
    seg = (f(pts) * w).sum(axis=1) * half
    return edges, np.concatenate([[0.0], np.cumsum(seg)])


def _dl_half_cumulative(alpha: float, p: float, n_seg: int = 1500):
    """Cumulative mass of the occupation density on [0, 1/2].  The
    substitution u = w^(1/alpha) removes the u^(alpha-1) endpoint
    singularity; returns (u knots, cumulative values)."""

    def g(w):
        u = w ** (1.0 / alpha)
        return _dl_pdf_arr(alpha, p, u) * u / (alpha * w)

    edges, cum = _cumulative_gauss(g, 0.0, 0.5**alpha, n_seg)
    return edges ** (1.0 / alpha), cum


def darling_lamperti_mass(alpha: float, p: float) -> float:
    """Total mass of the occupation density by quadrature (the right half
    is the mirrored left half at 1 - p)."""
    _, left = _dl_half_cumulative(alpha, p)
    _, right = _dl_half_cumulative(alpha, 1.0 - p)
    return float(left[-1] + right[-1])


def darling_lamperti_cdf(alpha: float, p: float):
    """Occupation-law CDF on (0,1) as an interpolant of the quadrature
    cumulative (knot spacing keeps interpolation error below 1e-7)."""
    ul, cl = _dl_half_cumulative(alpha, p)
    ur, cr = _dl_half_cumulative(alpha, 1.0 - p)
    total = cl[-1] + cr[-1]

    def cdf(u):
        u = np.asarray(u, dtype=np.float64)
        left = np.interp(u, ul, cl)
        right = total - np.interp(1.0 - u, ur, cr)
        return np.where(u <= 0.5, left, right)

    return cdf


# ----------------------------------------------------------------------
# check runners: cfg -> (statistic, threshold)


def _run_dirichlet_beta(cfg, gen):
    """KS of stick-broken Bernoulli means against the beta target.

    For p > 1/2 the beta law concentrates within one double-spacing of 1
    (mass (1e-16)^(q theta) can be percent-sized), so the equivalent
    complement check at 1 - p is run instead; the KS statistic is
    invariant under m -> 1 - m."""
    theta, p, n = cfg["theta"], cfg["p"], cfg["n_samples"]
    if p > 0.5:
        p = 1.0 - p
    sample = gem_mean_sample(
        AlphaTheta(0.0, theta), AtomicDistribution.bernoulli(p),
        cfg.get("trunc_tol", _check_trunc_tol(0.0)), n, gen,
    )
    pt = p + 0.2 if cfg.get("perturb") else p
    stat = ks_statistic(np.sort(sample), _beta_cdf(pt * theta, (1.0 - pt) * theta))
    return stat, _ks_threshold(n, cfg.get("threshold"))


def _run_symmetric_dirichlet_beta(cfg, gen):
    m, a, b, n = cfg["m"], cfg["a"], cfg["b"], cfg["n_samples"]
    g = gen.standard_gamma(a + b, size=(n, m))
    xn = gen.standard_gamma(a, size=(n, m))
    xd = xn + gen.standard_gamma(b, size=(n, m))
    means = (g * (xn / xd)).sum(axis=1) / g.sum(axis=1)
    at = a + 0.2 if cfg.get("perturb") else a
    stat = ks_statistic(np.sort(means), _beta_cdf(m * at, m * b))
    return stat, _ks_threshold(n, cfg.get("threshold"))


def _run_lamperti_density(cfg, gen):
    alpha, p, n = cfg["alpha"], cfg["p"], cfg["n_samples"]
    sample = stable_bernoulli_mean_sample(alpha, p, n, gen)
    pt = p + 0.2 if cfg.get("perturb") else p
    stat = ks_statistic(np.sort(sample), darling_lamperti_cdf(alpha, pt))
    return stat, _ks_threshold(n, cfg.get("threshold"))


def _run_composition_rule(cfg, gen):
    alpha, theta, p, n = cfg["alpha"], cfg["theta"], cfg["p"], cfg["n_samples"]
    lhs = compose_mean_sample(theta, alpha, p, 1e-8, n, gen)
    at = alpha - 0.2 if cfg.get("perturb") else alpha
    rhs = gem_mean_sample(
        AlphaTheta(at, theta), AtomicDistribution.bernoulli(p),
        cfg.get("trunc_tol", _check_trunc_tol(at)), n, gen,
    )
    return ks_two_sample(lhs, rhs), _ks2_threshold(n, n, cfg.get("threshold"))


def _run_ml_survival(cfg, gen):
    alpha, x, n = cfg["alpha"], cfg["x"], cfg["n_samples"]
    eps = gen.standard_exponential(n)
    u1 = gen.random(n) * math.pi
    e1 = gen.standard_exponential(n)
    t1 = _stable_transform(alpha, u1, e1)
    u2 = gen.random(n) * math.pi
    e2 = gen.standard_exponential(n)
    t2 = _stable_transform(alpha, u2, e2)
    emp = float(np.mean(eps * t1 / t2 > x))
    at = alpha + 0.2 if cfg.get("perturb") else alpha
    target = mittag_leffler(at, -(x**at), SeriesControl(1e-12, 400))
    return abs(emp - target), cfg.get("threshold", 0.01)


def _run_shanbag(cfg, gen):
    alpha, n = cfg["alpha"], cfg["n_samples"]
    eps = gen.standard_exponential(n)
    u = gen.random(n) * math.pi
    e = gen.standard_exponential(n)
    t = _stable_transform(alpha, u, e)
    sample = np.sort((eps / t) ** alpha)
    rate = 1.2 if cfg.get("perturb") else 1.0
    stat = ks_statistic(sample, lambda s: -np.expm1(-rate * s))
    return stat, _ks_threshold(n, cfg.get("threshold"))


def _run_mellin_stable(cfg, gen):
    alpha, r, n = cfg["alpha"], cfg["r"], cfg["n_samples"]
    u = gen.random(n) * math.pi
    e = gen.standard_exponential(n)
    t = _stable_transform(alpha, u, e)
    vals = t ** (alpha * r)
    emp = float(vals.mean())
    se = float(vals.std()) / math.sqrt(n)
    at = alpha + 0.2 if cfg.get("perturb") else alpha
    target = math.exp(log_gamma(1.0 - r) - log_gamma(1.0 - at * r))
    return abs(emp - target), 3.0 * se


def _run_cs_transform(cfg, gen):
    alpha, theta, n = cfg["alpha"], cfg["theta"], cfg["n_samples"]
    lams = cfg.get("lams", (0.5, 1.0, 4.0))
    if "values" in cfg:
        x = AtomicDistribution(cfg["values"], cfg["probs"])
    else:
        x = AtomicDistribution.bernoulli(cfg.get("x_p", 0.4))
    params = AlphaTheta(alpha, theta)
    means = gem_mean_sample(
        params, x, cfg.get("trunc_tol", _check_trunc_tol(alpha)), n, gen
    )
    tt = theta + 0.2 if cfg.get("perturb") else theta
    worst = 0.0
    for lam in lams:
        vals = (1.0 + lam * means) ** (-theta)
        target = cs_transform_rhs(AlphaTheta(alpha, tt), x, lam)
        # the floor keeps degenerate X (zero-variance values, exact match)
        # from dividing rounding noise by rounding noise
        se = max(float(vals.std()) / math.sqrt(n), 1e-14 * max(1.0, abs(target)))
        worst = max(worst, abs(float(vals.mean()) - target) / (3.0 * se))
    return worst, 1.0


def _run_stochastic_fixed_point(cfg, gen):
    theta, p, n = cfg["theta"], cfg["p"], cfg["n_samples"]
    x = AtomicDistribution.bernoulli(p)
    tol = cfg.get("trunc_tol", _check_trunc_tol(0.0))
    params = AlphaTheta(0.0, theta)
    lhs = gem_mean_sample(params, x, tol, n, gen)
    refeed = gem_mean_sample(params, x, tol, n, gen)
    g1 = gen.standard_gamma(1.0, size=n)
    g2 = gen.standard_gamma(theta, size=n)
    h = g1 / (g1 + g2)
    pt = p + 0.2 if cfg.get("perturb") else p
    xs = (gen.random(n) < pt).astype(np.float64)
    rhs = h * xs + (1.0 - h) * refeed
    return ks_two_sample(lhs, rhs), _ks2_threshold(n, n, cfg.get("threshold"))


def _run_residual_split_transform(cfg, gen):
    theta, p, lam, n = cfg["theta"], cfg["p"], cfg["lam"], cfg["n_samples"]
    x = AtomicDistribution.bernoulli(p)
    means = gem_mean_sample(AlphaTheta(0.0, theta), x,
                            cfg.get("trunc_tol", _check_trunc_tol(0.0)), n, gen)
    pt = p + 0.2 if cfg.get("perturb") else p
    c = (1.0 - pt) + pt / (1.0 + lam)  # E (1 + lam X)^(-1) for Bernoulli X
    diff = (1.0 + lam * means) ** (-(1.0 + theta)) - c * (1.0 + lam * means) ** (-theta)
    se = float(diff.std()) / math.sqrt(n)
    return abs(float(diff.mean())), 3.0 * se


def _run_hannum_sign(cfg, gen):
    theta, xq, n = cfg["theta"], cfg["x"], cfg["n_samples"]
    x = AtomicDistribution(cfg.get("values", (0.0, 0.5, 2.0)),
                           cfg.get("probs", (0.3, 0.4, 0.3)))
    means = gem_mean_sample(AlphaTheta(0.0, theta), x,
                            cfg.get("trunc_tol", _check_trunc_tol(0.0)), n, gen)
    p1 = float(np.mean(means <= xq))
    # independent-gamma construction of gamma(theta) * (mean - x)
    xt = xq + 0.2 if cfg.get("perturb") else xq
    t = np.zeros(n)
    for v, pr in zip(x.values, x.probs):
        t += (v - xt) * gen.standard_gamma(theta * pr, size=n)
    p2 = float(np.mean(t <= 0.0))
    pbar = 0.5 * (p1 + p2)
    se = math.sqrt(max(pbar * (1.0 - pbar), 1e-12) * 2.0 / n)
    return abs(p1 - p2), 3.0 * se


def _run_cauchy_invariance(cfg, gen):
    a, b, theta, n = cfg["a"], cfg["b"], cfg["theta"], cfg["n_samples"]
    means = gem_cauchy_mean_sample(theta, a, b,
                                   cfg.get("trunc_tol", 1e-8), n, gen)
    at = a + 0.2 if cfg.get("perturb") else a
    worst = 0.0
    for q in (0.25, 0.5, 0.75):
        target = at + b * math.tan(math.pi * (q - 0.5))
        dens = 1.0 / (math.pi * b * (1.0 + ((target - a) / b) ** 2))
        se = math.sqrt(q * (1.0 - q) / n) / dens
        worst = max(worst, abs(float(np.quantile(means, q)) - target) / (3.0 * se))
    return worst, 1.0


def _run_thinning_invariance(cfg, gen):
    """Atom-level thinning of a stick-broken weight law against the exact
    stable-increment route for the unthinned mean.

    The thinned mean uses the ratio form M(X K)/M(K) with both the
    numerator and the denominator defect-corrected (tail sums replaced by
    their conditional expectations), so no replicate is ever empty; the
    residual pile this leaves at E X has probability ~P(first stick mass
    > 1 - tol), which the default tolerances keep a factor of a few below
    the KS threshold."""
    alpha, keep_p, n = cfg["alpha"], cfg["keep_p"], cfg["n_samples"]
    xp = cfg.get("x_p", 0.5)
    tol = cfg.get("trunc_tol", _check_trunc_tol(alpha))
    params = AlphaTheta(alpha, 0.0)

    def thinned(flat, offsets, defects):
        xs = (gen.random(flat.size) < xp).astype(np.float64)
        keep = gen.random(flat.size) < keep_p
        num = np.add.reduceat(flat * xs * keep, offsets[:-1]) + defects * keep_p * xp
        den = np.add.reduceat(flat * keep, offsets[:-1]) + defects * keep_p
        return num / den

    thin = _gem_weights_apply(params, tol, n, gen, thinned)
    at = alpha - 0.2 if cfg.get("perturb") else alpha
    base = stable_bernoulli_mean_sample(at, xp, n, gen)
    return ks_two_sample(thin, base), _ks2_threshold(n, n, cfg.get("threshold"))


# ----------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class _CheckDef:
    runner: Callable
    identity: str
    default_n: int
    cells: tuple[dict, ...]


_REGISTRY: dict[str, _CheckDef] = {
    "dirichlet_beta": _CheckDef(
        _run_dirichlet_beta,
        "gem(0,theta) mean of Bernoulli(p) =d= Beta(p*theta, q*theta)",
        200_000,
        tuple(
            {"theta": t, "p": p, "threshold": 0.01}
            for t in (0.5, 1.0, 2.0)
            for p in (0.2, 0.5, 0.8)
        ),
    ),
    "symmetric_dirichlet_beta": _CheckDef(
        _run_symmetric_dirichlet_beta,
        "Dirichlet(m||m(a+b)) mean of Beta(a,b) draws =d= Beta(m*a, m*b)",
        200_000,
        ({"m": 3, "a": 0.5, "b": 0.5}, {"m": 2, "a": 1.0, "b": 2.0}),
    ),
    "lamperti_density": _CheckDef(
        _run_lamperti_density,
        "stable(alpha) increment ratio =d= occupation law "
        "p q sin(a pi) u^(a-1)(1-u)^(a-1) / (pi [q^2 u^2a + 2pq(u(1-u))^a cos(a pi)"
        " + p^2 (1-u)^2a])",
        200_000,
        (
            {"alpha": 0.25, "p": 0.2, "threshold": 0.01},
            {"alpha": 0.5, "p": 0.5, "threshold": 0.01},
            {"alpha": 0.75, "p": 0.3, "threshold": 0.01},
        ),
    ),
    "composition_rule": _CheckDef(
        _run_composition_rule,
        "gem(0,theta) fragmented by gem(alpha,0) =d= gem(alpha,theta), "
        "compared through Bernoulli means",
        100_000,
        ({"alpha": 0.5, "theta": 1.0, "p": 0.5, "threshold": 0.015},),
    ),
    "ml_survival": _CheckDef(
        _run_ml_survival,
        "P(eps * T/T' > x) = E_alpha(-x^alpha) (Mittag-Leffler survival)",
        1_000_000,
        tuple({"alpha": 0.6, "x": x} for x in (0.5, 1.0, 2.0)),
    ),
    "shanbag": _CheckDef(
        _run_shanbag,
        "(eps / T_alpha)^alpha =d= eps (unit exponential)",
        200_000,
        ({"alpha": 0.4}, {"alpha": 0.7}),
    ),
    "mellin_stable": _CheckDef(
        _run_mellin_stable,
        "E T_alpha^(alpha r) = Gamma(1-r) / Gamma(1 - alpha r)",
        1_000_000,
        ({"alpha": 0.5, "r": 0.5}, {"alpha": 0.7, "r": -0.4}),
    ),
    "cs_transform": _CheckDef(
        _run_cs_transform,
        "E (1 + lam M)^-theta = (E (1 + lam X)^alpha)^(-theta/alpha)",
        200_000,
        (
            {"alpha": 0.5, "theta": 0.5},
            {"alpha": 0.5, "theta": 2.0},
            {"alpha": 0.25, "theta": 1.0},
        ),
    ),
    "stochastic_fixed_point": _CheckDef(
        _run_stochastic_fixed_point,
        "M =d= H X + (1-H) M  with H =d= Beta(1, theta), all independent",
        200_000,
        ({"theta": 1.0, "p": 0.5}, {"theta": 2.0, "p": 0.3}),
    ),
    "residual_split_transform": _CheckDef(
        _run_residual_split_transform,
        "E (1+lam M)^-(1+theta) = E (1+lam X)^-1 * E (1+lam M)^-theta",
        200_000,
        (
            {"theta": 0.5, "p": 0.3, "lam": 1.0},
            {"theta": 2.0, "p": 0.3, "lam": 1.0},
        ),
    ),
    "hannum_sign": _CheckDef(
        _run_hannum_sign,
        "P(M <= x) = P(sum_i (x_i - x) gamma_i(theta p_i) <= 0)",
        200_000,
        ({"theta": 2.0, "x": 0.4}, {"theta": 2.0, "x": 1.0}),
    ),
    "cauchy_invariance": _CheckDef(
        _run_cauchy_invariance,
        "P-mean of a + b*Cauchy =d= a + b*Cauchy (quartile comparison)",
        200_000,
        ({"a": 1.0, "b": 2.0, "theta": 1.0},),
    ),
    "thinning_invariance": _CheckDef(
        _run_thinning_invariance,
        "p-thinned gem(alpha,0) =d= gem(alpha,0), compared through "
        "Bernoulli means",
        30_000,
        (
            {"alpha": 0.25, "keep_p": 0.5, "trunc_tol": 1e-10},
            {"alpha": 0.5, "keep_p": 0.5, "trunc_tol": 2e-4, "n_samples": 10_000},
        ),
    ),
}


def check_names() -> list[str]:
    return sorted(_REGISTRY)


def check_identity(name: str) -> str:
    return _REGISTRY[name].identity


def default_cells(name: str) -> list[dict]:
    return [dict(c) for c in _REGISTRY[name].cells]


def _cell_label(name: str, cfg: dict) -> str:
    keys = [
        k
        for k in sorted(cfg)
        if k not in ("seed", "n_samples", "perturb", "threshold", "stream_id",
                     "trunc_tol", "lams")
    ]
    if not keys:
        return name

    def fmt(v):
        if isinstance(v, (int, float)):
            return f"{v:g}"
        if isinstance(v, (tuple, list)):
            return "(" + ";".join(fmt(u) for u in v) + ")"
        return str(v)

    inner = ",".join(f"{k}={fmt(cfg[k])}" for k in keys)
    return f"{name}[{inner}]"


def _stream_for(label: str) -> int:
    digest = hashlib.blake2b(label.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def run_check(name: str, config: dict) -> CheckReport:
    """Execute one named identity check; the report is a pure function of
    (name, config)."""
    if name not in _REGISTRY:
        raise KeyError(f"unknown check {name!r}; known: {', '.join(check_names())}")
    defn = _REGISTRY[name]
    cfg = dict(defn.cells[0])
    cfg.update(config)
    cfg.setdefault("seed", 0)
    cfg.setdefault("n_samples", defn.default_n)
    label = _cell_label(name, cfg)
    stream = cfg.get("stream_id", _stream_for(label))
    gen = RngStream(cfg["seed"], stream).generator
    stat, threshold = defn.runner(cfg, gen)
    return CheckReport(
        check_name=label if not cfg.get("perturb") else label + "!perturbed",
        statistic=float(stat),
        threshold=float(threshold),
        n_samples=int(cfg["n_samples"]),
        seed=int(cfg["seed"]),
        passed=bool(stat <= threshold),
    )


def run_all(
    seed: int = 0, n_samples: int | None = None, names: list[str] | None = None,
    perturb: bool = False,
) -> list[CheckReport]:
    """Run every registered check over its default cells; reports are
    merged deterministically by name."""
    reports = []
    for name in sorted(names or check_names()):
        for cell in default_cells(name):
            cfg = dict(cell)
            cfg["seed"] = seed
            if n_samples is not None:
                cfg["n_samples"] = n_samples
            if perturb:
                cfg["perturb"] = True
            reports.append(run_check(name, cfg))
    return sorted(reports, key=lambda r: r.check_name)
