"""Exact and Monte Carlo computation of randomly weighted averages
(P-means), and the closed-form densities/transforms of their laws.

The central exact formula expresses moments of the P-mean of X through the
ECPF of the weight law:

    E M^j = sum_k sum_{(n_1..n_k) composition of j} ecpf(n_1..n_k)
                 * prod_i E X^{n_i}.

Transforms of the two-parameter family follow the composite pattern
E (1 + lam M)^(-theta) = (E (1 + lam X)^alpha)^(-theta/alpha) with the
log/Stieltjes limit forms at alpha = 0 and theta = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .discrete import AlphaTheta, RandomDiscreteSample
from .partition import (
    ENUM_GUARD,
    Composition,
    ecpf,
    ecpf_uniform,
    kn_distribution,
    partitions_with_multiplicity,
)
from .sampling import RngStream

__all__ = [
    "AtomicDistribution",
    "MomentVector",
    "exact_pmean_moments",
    "classical_mean_moments",
    "pgf_kn_moment",
    "product_moment",
    "mc_pmean",
    "darling_lamperti_pdf",
    "lamperti_stieltjes",
    "cs_transform_rhs",
    "dirichlet_log_transform",
    "alpha0_transform",
]

PROB_TOL = 1e-12
SET_PARTITION_GUARD = 12


@dataclass(frozen=True)
class AtomicDistribution:
    """Finite-support law: distinct values x_i with positive masses p_i."""

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __init__(self, values: Sequence[float], probs: Sequence[float]):
        values = tuple(float(v) for v in values)
        probs = tuple(float(p) for p in probs)
        if len(values) != len(probs) or not values:
            raise ValueError("values and probs must be nonempty and same length")
        if len(set(values)) != len(values):
            raise ValueError(f"values must be distinct, got {values}")
        if any(p <= 0 for p in probs):
            raise ValueError("probabilities must be positive")
        if abs(sum(probs) - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {sum(probs)}, not 1")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def bernoulli(cls, p: float) -> "AtomicDistribution":
        if not 0.0 < p < 1.0:
            raise ValueError(f"p must be in (0, 1), got {p}")
        return cls((0.0, 1.0), (1.0 - p, p))

    def mean(self) -> float:
        return sum(v * p for v, p in zip(self.values, self.probs))

    def moment(self, j: int) -> float:
        return sum(v**j * p for v, p in zip(self.values, self.probs))

    def moment_vector(self, n: int) -> "MomentVector":
        return MomentVector(tuple(self.moment(j) for j in range(1, n + 1)))


@dataclass(frozen=True)
class MomentVector:
    """Raw moments (E X, E X^2, ..., E X^n)."""

    moments: tuple[float, ...]

    def __init__(self, moments: Sequence[float]):
        moments = tuple(float(v) for v in moments)
        if any(not math.isfinite(v) for v in moments):
            raise ValueError("moments must be finite")
        object.__setattr__(self, "moments", moments)

    @property
    def order(self) -> int:
        return len(self.moments)

    def __getitem__(self, j: int) -> float:
        """E X^j, 1-indexed."""
        return self.moments[j - 1]


def exact_pmean_moments(
    ecpf_provider: Callable[[Composition], float], mx: MomentVector, n: int
) -> MomentVector:
    """Moments E M^j for j = 1..n of the P-mean whose weight law has the
    given ECPF, from the moments of X."""
    if not 1 <= n <= ENUM_GUARD:
        raise ValueError(f"order must be in 1..{ENUM_GUARD}, got {n}")
    if mx.order < n:
        raise ValueError(f"need {n} moments of X, got {mx.order}")
    out = []
    for j in range(1, n + 1):
        total = 0.0
        for k in range(1, j + 1):
            for lam, mult in partitions_with_multiplicity(j, k):
                prod = 1.0
                for part in lam:
                    prod *= mx[part]
                total += mult * ecpf_provider(Composition(lam)) * prod
        out.append(total)
    return MomentVector(out)


def classical_mean_moments(m: int, mx: MomentVector, n: int) -> MomentVector:
    """Moments of the arithmetic mean of m i.i.d. copies of X (the uniform
    weight law on m boxes plugged into the composition sum)."""
    return exact_pmean_moments(lambda c: ecpf_uniform(m, c), mx, n)


def pgf_kn_moment(params: AlphaTheta, v: float, n: int) -> float:
    """E v^{K_n} = sum_k P(K_n = k) v^k; equals the n-th moment of the
    P-mean of a Bernoulli(v) indicator."""
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"v must be in [0, 1], got {v}")
    kn = kn_distribution(lambda c: ecpf(params, c), n)
    return sum(pk * v**k for k, pk in enumerate(kn, start=1))


def _set_partitions(items: tuple[int, ...]) -> Iterator[list[tuple[int, ...]]]:
    if len(items) == 1:
        yield [items]
        return
    first, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [(first, *sub[i])] + sub[i + 1 :]
        yield [(first,)] + sub


def product_moment(
    eppf_provider: Callable[[Composition], float],
    mu: Callable[[tuple[int, ...]], float],
    n: int,
) -> float:
    """Expected product of n jointly constructed P-means:
    sum over set partitions {B_1..B_k} of {1..n} of
    eppf(|B_1|..|B_k|) * prod_j mu(B_j), where mu(B) = E prod_{i in B} Y_i.

    With exchangeable Y (mu a function of |B| only) this collapses to the
    composition sum of exact_pmean_moments.
    """
    if not 1 <= n <= SET_PARTITION_GUARD:
        raise ValueError(f"n must be in 1..{SET_PARTITION_GUARD}, got {n}")
    total = 0.0
    for blocks in _set_partitions(tuple(range(1, n + 1))):
        p = eppf_provider(Composition([len(b) for b in blocks]))
        if p == 0.0:
            continue
        prod = p
        for b in blocks:
            prod *= mu(b)
        total += prod
    return total


def mc_pmean(
    P_factory: Callable[[RngStream], RandomDiscreteSample],
    x_sampler: Callable[[int, RngStream], np.ndarray],
    ex: float,
    rng: RngStream,
) -> float:
    """One Monte Carlo replicate of the P-mean of X: draw P, draw one X per
    atom, return sum X_j P_j + defect * ex (ex = E X, supplied by the
    caller so the defect correction is exact)."""
    if not math.isfinite(ex):
        raise ValueError(f"ex must be finite, got {ex}")
    P = P_factory(rng)
    if P.weights.size == 0:
        return P.defect * ex
    xs = np.asarray(x_sampler(P.weights.size, rng), dtype=np.float64)
    return float(P.weights @ xs + P.defect * ex)


def darling_lamperti_pdf(alpha: float, p: float, u: float) -> float:
    """Occupation-density of the stable(alpha) weighted Bernoulli(p) mean:

        p q sin(a pi) u^(a-1) (1-u)^(a-1)
        / (pi [q^2 u^(2a) + 2 p q (u(1-u))^a cos(a pi) + p^2 (1-u)^(2a)])
    """
    if not (0.0 < alpha < 1.0 and 0.0 < p < 1.0):
        raise ValueError(f"need alpha, p in (0, 1), got ({alpha}, {p})")
    if not 0.0 < u < 1.0:
        raise ValueError(f"u must be inside (0, 1), got {u}")
    q = 1.0 - p
    cu = 1.0 - u
    num = p * q * math.sin(alpha * math.pi) * u ** (alpha - 1.0) * cu ** (alpha - 1.0)
    den = math.pi * (
        q * q * u ** (2.0 * alpha)
        + 2.0 * p * q * (u * cu) ** alpha * math.cos(alpha * math.pi)
        + p * p * cu ** (2.0 * alpha)
    )
    return num / den


def lamperti_stieltjes(alpha: float, p: float, lam: float) -> float:
    """Stieltjes transform of the Darling-Lamperti law:
    (q + p(1+lam)^(alpha-1)) / (q + p(1+lam)^alpha)."""
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    q = 1.0 - p
    return (q + p * (1.0 + lam) ** (alpha - 1.0)) / (q + p * (1.0 + lam) ** alpha)


def cs_transform_rhs(params: AlphaTheta, x: AtomicDistribution, lam: float) -> float:
    """Analytic value of E (1 + lam M)^(-theta) for the two-parameter mean
    of a nonnegative atomic X: (sum_i p_i (1+lam x_i)^alpha)^(-theta/alpha).
    Requires alpha != 0 and theta != 0."""
    if params.alpha == 0.0 or params.theta == 0.0:
        raise ValueError("transform requires alpha != 0 and theta != 0")
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if min(x.values) < 0.0:
        raise ValueError("x must be nonnegative-valued")
    inner = sum(p * (1.0 + lam * v) ** params.alpha for v, p in zip(x.values, x.probs))
    return inner ** (-params.theta / params.alpha)


def dirichlet_log_transform(theta: float, x: AtomicDistribution, lam: float) -> float:
    """E (1 + lam M)^(-theta) for the normalized-gamma (alpha = 0) mean:
    exp(-theta sum_i p_i log(1 + lam x_i))."""
    if theta <= 0:
        raise ValueError(f"theta must be > 0, got {theta}")
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if min(x.values) < 0.0:
        raise ValueError("x must be nonnegative-valued")
    s = sum(p * math.log1p(lam * v) for v, p in zip(x.values, x.probs))
    return math.exp(-theta * s)


def alpha0_transform(
    alpha: float, x: AtomicDistribution, lam: float
) -> tuple[float, float]:
    """Transforms of the theta = 0 mean: the log form
    (1/alpha) log sum_i p_i (1+lam x_i)^alpha  (= E log(1 + lam M)) and the
    Stieltjes form sum p_i (1+lam x_i)^(alpha-1) / sum p_i (1+lam x_i)^alpha
    (= E (1 + lam M)^(-1))."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    if min(x.values) < 0.0:
        raise ValueError("x must be nonnegative-valued")
    sa = sum(p * (1.0 + lam * v) ** alpha for v, p in zip(x.values, x.probs))
    sam1 = sum(p * (1.0 + lam * v) ** (alpha - 1.0) for v, p in zip(x.values, x.probs))
    return math.log(sa) / alpha, sam1 / sa
