"""Seeded random-variate generation.

All randomness in the package flows through RngStream, a thin wrapper
around a counter-based Philox generator keyed by (seed, stream_id).
Identical keys reproduce identical sequences; distinct stream ids give
statistically independent streams, so parallel work should hand each
worker its own stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RngStream",
    "sample_gamma",
    "sample_beta",
    "sample_stable",
    "sample_cauchy_alpha",
    "sample_talzol",
    "sample_stable_ratio",
]


def _splitmix64(x: int) -> int:
    """Finalizer of the splitmix64 generator; a cheap 64-bit mixer."""
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


@dataclass
class RngStream:
    """A reproducible, splittable stream of pseudo-random numbers.

    The (seed, stream_id) pair is the full identity of the stream: the
    generator is Philox keyed by it, so equal pairs give bitwise-equal
    variate sequences and unequal pairs give independent streams.
    """

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator | None = field(default=None, repr=False, compare=False)

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            key = np.array(
                [self.seed & 0xFFFFFFFFFFFFFFFF, self.stream_id & 0xFFFFFFFFFFFFFFFF],
                dtype=np.uint64,
            )
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def substream(self, k: int) -> "RngStream":
        """Derive the k-th child stream; deterministic in (stream_id, k)."""
        child = _splitmix64(self.stream_id ^ _splitmix64(k + 1))
        return RngStream(self.seed, child)


def sample_gamma(r: float, rng: RngStream, size: int | None = None):
    """Standard gamma(r) variates: density x^(r-1) e^(-x) / Gamma(r) on x > 0."""
    if not r > 0:
        raise ValueError(f"gamma shape must be > 0, got {r}")
    out = rng.generator.standard_gamma(r, size=size)
    return float(out) if size is None else out


def sample_beta(r: float, s: float, rng: RngStream, size: int | None = None):
    """Beta(r, s) variates built as g / (g + g'), two independent gammas.

    The gamma construction (rather than a dedicated beta method) keeps the
    beta/gamma coupling available: callers that need the independence of
    the ratio and the total can reconstruct both from the same stream.
    """
    if not (r > 0 and s > 0):
        raise ValueError(f"beta parameters must be > 0, got ({r}, {s})")
    gen = rng.generator
    g1 = gen.standard_gamma(r, size=size)
    g2 = gen.standard_gamma(s, size=size)
    out = g1 / (g1 + g2)
    return float(out) if size is None else out


def _stable_transform(alpha: float, u: np.ndarray, e: np.ndarray) -> np.ndarray:
    # Kanter's rejection-free representation of the one-sided stable law
    # with Laplace transform exp(-lambda^alpha), u uniform on (0, pi),
    # e unit exponential:
    #   T = sin(a u) sin((1-a) u)^((1-a)/a) sin(u)^(-1/a) e^(-(1-a)/a)
    rho = (1.0 - alpha) / alpha
    return (
        np.sin(alpha * u)
        * np.sin((1.0 - alpha) * u) ** rho
        / (np.sin(u) ** (1.0 / alpha) * e**rho)
    )


def sample_stable(alpha: float, rng: RngStream, size: int | None = None):
    """Standard one-sided stable(alpha) variates, E exp(-l T) = exp(-l^alpha)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"stable index must be in (0, 1), got {alpha}")
    gen = rng.generator
    n = 1 if size is None else size
    u = gen.random(n) * math.pi
    e = gen.standard_exponential(n)
    out = _stable_transform(alpha, u, e)
    return float(out[0]) if size is None else out


def sample_cauchy_alpha(alpha: float, rng: RngStream, size: int | None = None):
    """Shifted-scaled Cauchy -cos(a pi) + sin(a pi) C, C standard Cauchy;
    positive with probability exactly alpha."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    c = rng.generator.standard_cauchy(size=size)
    out = -math.cos(alpha * math.pi) + math.sin(alpha * math.pi) * c
    return float(out) if size is None else out


def sample_talzol(alpha: float, rng: RngStream, size: int | None = None):
    """log of the shifted-scaled Cauchy conditioned positive, by rejection
    on the sign (acceptance probability alpha per attempt)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    n = 1 if size is None else size
    out = np.empty(n)
    filled = 0
    # draw in blocks sized for the expected acceptance rate
    while filled < n:
        want = n - filled
        block = max(32, int(1.5 * want / alpha))
        c = sample_cauchy_alpha(alpha, rng, size=block)
        accepted = c[c > 0.0]
        take = min(len(accepted), want)
        out[filled : filled + take] = np.log(accepted[:take])
        filled += take
    return float(out[0]) if size is None else out


def sample_stable_ratio(alpha: float, rng: RngStream, size: int | None = None):
    """Ratio of two independent standard one-sided stable(alpha) variates."""
    t1 = sample_stable(alpha, rng, size=size)
    t2 = sample_stable(alpha, rng, size=size)
    return t1 / t2
