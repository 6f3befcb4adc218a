"""Construction and transformation of random discrete distributions.

A RandomDiscreteSample is a realized weight sequence plus an explicit
defect: the mass truncated away from an infinite model.  Constructors
never renormalize silently; truncated mass is carried in the defect field
and consumed downstream by the defective-mean rule (defect contributes
defect * E X to a randomly weighted average).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .sampling import RngStream, sample_stable

__all__ = [
    "AlphaTheta",
    "RandomDiscreteSample",
    "EmptyThinning",
    "MASS_TOL",
    "MAX_ATOMS",
    "gem_stick_break",
    "dirichlet_finite",
    "subordinator_increments",
    "size_biased_permutation",
    "rank_decreasing",
    "p_thin",
    "compose",
]

MASS_TOL = 1e-12
MAX_ATOMS = 10**7
COMPOSE_MAX_ATOMS = 10**5


class EmptyThinning(Exception):
    """p-thinning kept no atom; the caller decides whether to retry."""


@dataclass(frozen=True)
class AlphaTheta:
    """Validated (alpha, theta) parameter pair.

    Exactly one regime is admissible:
      finite    alpha < 0 and theta = -m*alpha for a positive integer m
      dirichlet alpha = 0 and theta > 0
      stable    0 < alpha < 1 and theta > -alpha
    """

    alpha: float
    theta: float

    def __post_init__(self):
        self.regime  # validation side effect

    @property
    def regime(self) -> str:
        a, t = self.alpha, self.theta
        if a < 0.0:
            m = -t / a
            if t > 0.0 and abs(m - round(m)) < 1e-9 and round(m) >= 1:
                return "finite"
            raise ValueError(
                f"alpha < 0 requires theta = -m*alpha for integer m >= 1, "
                f"got ({a}, {t})"
            )
        if a == 0.0:
            if t > 0.0:
                return "dirichlet"
            raise ValueError(f"alpha = 0 requires theta > 0, got theta = {t}")
        if a < 1.0:
            if t > -a:
                return "stable"
            raise ValueError(f"0 < alpha < 1 requires theta > -alpha, got ({a}, {t})")
        raise ValueError(f"alpha must be < 1, got {a}")

    @property
    def finite_atoms(self) -> int:
        """m in the finite regime, 0 otherwise."""
        return int(round(-self.theta / self.alpha)) if self.alpha < 0.0 else 0


@dataclass
class RandomDiscreteSample:
    """A realized random discrete distribution: weights, defect, ordering tag."""

    weights: np.ndarray
    defect: float = 0.0
    order_tag: str = "as_constructed"

    _ORDER_TAGS = ("size_biased", "ranked", "as_constructed")

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.validate()

    def validate(self) -> "RandomDiscreteSample":
        if self.order_tag not in self._ORDER_TAGS:
            raise ValueError(f"unknown order tag {self.order_tag!r}")
        if self.weights.size and self.weights.min() < 0.0:
            raise ValueError("negative weight")
        if self.defect < 0.0:
            raise ValueError(f"negative defect {self.defect}")
        total = float(self.weights.sum()) + self.defect
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"total mass {total} differs from 1 beyond {MASS_TOL}")
        if self.order_tag == "ranked" and self.weights.size > 1:
            if np.any(np.diff(self.weights) > 0.0):
                raise ValueError("ranked sample has increasing weights")
        return self

    def to_json(self) -> str:
        return json.dumps(
            {
                "weights": [float(w) for w in self.weights],
                "defect": float(self.defect),
                "order": self.order_tag,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "RandomDiscreteSample":
        obj = json.loads(text)
        return cls(
            weights=np.asarray(obj["weights"], dtype=np.float64),
            defect=float(obj["defect"]),
            order_tag=str(obj["order"]),
        )


def gem_stick_break(
    params: AlphaTheta, trunc_tol: float, rng: RngStream
) -> RandomDiscreteSample:
    """Stick-breaking sample: P_j = H_j prod_{i<j}(1 - H_i) with independent
    H_i ~ beta(1 - alpha, theta + i*alpha).

    Generation stops once the residual stick mass drops below trunc_tol
    (the residual is stored as defect), or after exactly m atoms in the
    finite regime.  Output is in size-biased order by construction.
    """
    if not 0.0 < trunc_tol < 1.0:
        raise ValueError(f"trunc_tol must be in (0, 1), got {trunc_tol}")
    flat, offsets, defects = _kernels.gem_weights_batch(
        params.alpha, params.theta, trunc_tol, MAX_ATOMS, 1, rng.generator
    )
    # in the finite regime the m-th factor is exactly 1, so defects[0] == 0
    return RandomDiscreteSample(flat, float(defects[0]), "size_biased")


def dirichlet_finite(
    theta_list: Sequence[float], rng: RngStream
) -> RandomDiscreteSample:
    """Finite Dirichlet weights: independent gamma(theta_i) normalized by
    their sum (a zero parameter contributes a structural zero weight)."""
    thetas = np.asarray(theta_list, dtype=np.float64)
    if thetas.size == 0 or np.any(thetas < 0.0):
        raise ValueError("theta_list must be nonempty with nonnegative entries")
    if thetas.sum() <= 0.0:
        raise ValueError("at least one theta_i must be positive")
    gen = rng.generator
    atoms = np.zeros(thetas.size)
    pos = thetas > 0.0
    atoms[pos] = gen.standard_gamma(thetas[pos])
    return RandomDiscreteSample(atoms / atoms.sum(), 0.0, "as_constructed")


def subordinator_increments(
    kind: str, lengths: Sequence[float], rng: RngStream, alpha: float | None = None
) -> RandomDiscreteSample:
    """Normalized independent increments of a subordinator over consecutive
    intervals of the given lengths.

    kind "gamma": increments are gamma(length_i).
    kind "stable": increments are length_i^(1/alpha) T_i for i.i.d. standard
    one-sided stable(alpha) variables T_i.
    """
    lens = np.asarray(lengths, dtype=np.float64)
    if lens.size == 0 or np.any(lens <= 0.0):
        raise ValueError("lengths must be nonempty and positive")
    if kind == "gamma":
        atoms = rng.generator.standard_gamma(lens)
    elif kind == "stable":
        if alpha is None or not 0.0 < alpha < 1.0:
            raise ValueError(f"stable increments need alpha in (0, 1), got {alpha}")
        t = sample_stable(alpha, rng, size=lens.size)
        atoms = lens ** (1.0 / alpha) * t
    else:
        raise ValueError(f"unknown subordinator kind {kind!r}")
    return RandomDiscreteSample(atoms / atoms.sum(), 0.0, "as_constructed")


def size_biased_permutation(
    P: RandomDiscreteSample, rng: RngStream
) -> RandomDiscreteSample:
    """Reorder atoms by successive weight-proportional draws without
    replacement, realized as an exponential race (sort of E_i / w_i)."""
    if P.defect > 0.0:
        raise ValueError("size-biased permutation of an improper sample")
    w = P.weights
    keys = rng.generator.standard_exponential(w.size)
    with np.errstate(divide="ignore"):
        order = np.argsort(np.where(w > 0.0, keys / w, np.inf), kind="stable")
    return RandomDiscreteSample(w[order], 0.0, "size_biased")


def rank_decreasing(P: RandomDiscreteSample) -> RandomDiscreteSample:
    """Weights sorted non-increasing; defect unchanged."""
    w = np.sort(P.weights)[::-1]
    return RandomDiscreteSample(w, P.defect, "ranked")


def p_thin(
    P: RandomDiscreteSample, p: float, rng: RngStream
) -> tuple[float, RandomDiscreteSample]:
    """Keep each atom independently with probability p; return the kept
    mass F(p) and the kept atoms renormalized, in their original order."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    if P.defect > 0.0:
        raise ValueError("p-thinning of an improper sample")
    if P.weights.size and P.weights.min() <= 0.0:
        raise ValueError("p-thinning requires strictly positive weights")
    keep = rng.generator.random(P.weights.size) < p
    kept = P.weights[keep]
    if kept.size == 0:
        raise EmptyThinning(f"no atom survived thinning at p = {p}")
    mass = float(kept.sum())
    tag = P.order_tag if P.order_tag in ("size_biased", "ranked") else "as_constructed"
    return mass, RandomDiscreteSample(kept / mass, 0.0, tag)


def compose(
    P: RandomDiscreteSample,
    q_factory: Callable[[RngStream], RandomDiscreteSample],
    rng: RngStream,
) -> RandomDiscreteSample:
    """Fragment each atom of P by an independent fresh draw from q_factory
    and rank the products.  Truncation defects of the fragment draws (and
    any atoms trimmed beyond the output cap) accumulate into the defect."""
    if P.defect > 0.0:
        raise ValueError("compose requires a proper (defect-free) P")
    parts = []
    defect = 0.0
    for w in P.weights:
        q = q_factory(rng)
        parts.append(w * q.weights)
        defect += w * q.defect
    prods = np.sort(np.concatenate(parts))[::-1] if parts else np.empty(0)
    if prods.size > COMPOSE_MAX_ATOMS:
        defect += float(prods[COMPOSE_MAX_ATOMS:].sum())
        prods = prods[:COMPOSE_MAX_ATOMS]
    total = float(prods.sum()) + defect
    if abs(total - 1.0) > MASS_TOL:
        raise ValueError(f"composed mass {total} drifted from 1")
    return RandomDiscreteSample(prods, defect, "ranked")
