"""Exact partition-structure computations.

The exchangeable partition probability function (EPPF) of the two-parameter
family is

    p(n_1,...,n_k) = [prod_{i=1}^{k-1} (theta + i alpha)]
                     * prod_i (1-alpha)_{n_i - 1} / (theta + 1)_{n-1},

symmetric in the parts.  The ECPF multiplies by multinomial(n; parts) / k!
and is a probability function on compositions of n.  Everything here is
exact combinatorics in double precision; sums over compositions are
aggregated over partitions (the providers are symmetric) so the n <= 25
guards stay fast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, NamedTuple, Sequence

from .discrete import AlphaTheta
from .sampling import RngStream
from .specialfn import pochhammer

__all__ = [
    "Composition",
    "BlockState",
    "EwensProb",
    "eppf",
    "ecpf",
    "ecpf_uniform",
    "eppf_uniform",
    "kn_distribution",
    "crp_sample",
    "crp_seating_probs",
    "ewens_permutation_prob",
    "consistency_residual",
    "compositions",
    "partitions_with_multiplicity",
    "ENUM_GUARD",
]

ENUM_GUARD = 25


@dataclass(frozen=True)
class Composition:
    """Ordered sequence of positive integers; n is their sum, k their count."""

    parts: tuple[int, ...]

    def __init__(self, parts: Sequence[int]):
        parts = tuple(int(p) for p in parts)
        if not parts or any(p < 1 for p in parts):
            raise ValueError(f"parts must be positive integers, got {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def k(self) -> int:
        return len(self.parts)


@dataclass
class BlockState:
    """Block sizes of a growing partition, in order of appearance."""

    block_sizes: list[int]

    def __post_init__(self):
        if any(b < 1 for b in self.block_sizes):
            raise ValueError("block sizes must be >= 1")

    @property
    def total(self) -> int:
        return sum(self.block_sizes)


def compositions(n: int, k: int | None = None) -> Iterator[tuple[int, ...]]:
    """All compositions of n (optionally into exactly k parts), lexicographic."""
    if k is None:
        for kk in range(1, n + 1):
            yield from compositions(n, kk)
        return
    if k == 1:
        yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in compositions(n - first, k - 1):
            yield (first, *rest)


@lru_cache(maxsize=None)
def partitions_with_multiplicity(n: int, k: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Partitions of n into k parts, each with the number of distinct
    compositions ordering its parts (k! / prod of multiplicity factorials)."""

    def gen(remaining: int, kk: int, cap: int) -> Iterator[tuple[int, ...]]:
        if kk == 1:
            if remaining <= cap:
                yield (remaining,)
            return
        for first in range(min(cap, remaining - kk + 1), 0, -1):
            for rest in gen(remaining - first, kk - 1, first):
                yield (first, *rest)

    out = []
    for lam in gen(n, k, n):
        mult = math.factorial(k)
        for v in set(lam):
            mult //= math.factorial(lam.count(v))
        out.append((lam, mult))
    return tuple(out)


def eppf(params: AlphaTheta, c: Composition) -> float:
    """Two-parameter EPPF evaluated at a composition; 0 beyond the block
    budget of the finite regime (the vanishing factor theta + m*alpha)."""
    a, t = params.alpha, params.theta
    m = params.finite_atoms
    if m and c.k > m:
        return 0.0
    num = 1.0
    for i in range(1, c.k):
        num *= t + i * a
    for part in c.parts:
        num *= pochhammer(1.0 - a, part - 1)
    return num / pochhammer(t + 1.0, c.n - 1)


def _multinomial(n: int, parts: Sequence[int]) -> int:
    out = math.factorial(n)
    for p in parts:
        out //= math.factorial(p)
    return out


def ecpf(params: AlphaTheta, c: Composition) -> float:
    """ECPF = multinomial(n; parts) / k! * EPPF; a probability function on
    compositions of n."""
    return _multinomial(c.n, c.parts) / math.factorial(c.k) * eppf(params, c)


def ecpf_uniform(m: int, c: Composition) -> float:
    """ECPF for sampling from the uniform distribution on m boxes:
    (1/m)^n binom(m, k) multinomial(n; parts); 0 when k > m."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if c.k > m:
        return 0.0
    return m**-c.n * math.comb(m, c.k) * _multinomial(c.n, c.parts)


def eppf_uniform(m: int, c: Composition) -> float:
    """EPPF companion of ecpf_uniform (divide the multinomial back out)."""
    return ecpf_uniform(m, c) * math.factorial(c.k) / _multinomial(c.n, c.parts)


def kn_distribution(
    ecpf_provider: Callable[[Composition], float], n: int
) -> list[float]:
    """P(K_n = k) for k = 1..n by summing the ECPF over compositions of n
    with k parts (aggregated over partitions; the ECPF is symmetric)."""
    if not 1 <= n <= ENUM_GUARD:
        raise ValueError(f"n must be in 1..{ENUM_GUARD}, got {n}")
    out = []
    for k in range(1, n + 1):
        total = 0.0
        for lam, mult in partitions_with_multiplicity(n, k):
            total += mult * ecpf_provider(Composition(lam))
        out.append(total)
    return out


def crp_seating_probs(params: AlphaTheta, state: BlockState) -> list[float]:
    """Seating probabilities for the next index given ordered block sizes:
    entry j < k is the probability of joining block j, entry k of opening a
    new block.  These are the EPPF ratios p(b with j incremented) / p(b),
    simplified: (b_j - alpha)/(theta + t) and (theta + k alpha)/(theta + t)."""
    t = state.total
    k = len(state.block_sizes)
    denom = params.theta + t
    probs = [(b - params.alpha) / denom for b in state.block_sizes]
    m = params.finite_atoms
    new = 0.0 if (m and k >= m) else (params.theta + k * params.alpha) / denom
    probs.append(new)
    return probs


def crp_sample(params: AlphaTheta, n: int, rng: RngStream) -> BlockState:
    """Grow a partition of n indices one at a time with the seating rule of
    crp_seating_probs; returns block sizes in order of appearance."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    gen = rng.generator
    sizes = [1]
    for t in range(1, n):
        scaled = gen.random() * (params.theta + t)
        cum = 0.0
        for j, b in enumerate(sizes):
            cum += b - params.alpha
            if scaled < cum:
                sizes[j] += 1
                break
        else:
            sizes.append(1)
    return BlockState(sizes)


class EwensProb(NamedTuple):
    per_permutation: float
    cycle_type: float


def ewens_permutation_prob(theta: float, cycle_counts: Sequence[int]) -> EwensProb:
    """Probability content of a permutation cycle type under the
    theta-biased permutation model.

    cycle_counts[i-1] is the number of cycles of size i, so n = sum i*c_i.
    per_permutation = theta^K / (theta)_n is the probability of each single
    permutation with K = sum c_i cycles; cycle_type multiplies by the number
    n! / prod(i^c_i c_i!) of permutations sharing the cycle type, and sums
    to 1 over cycle types.
    """
    if theta <= 0:
        raise ValueError(f"theta must be > 0, got {theta}")
    counts = [int(c) for c in cycle_counts]
    if any(c < 0 for c in counts) or sum(counts) == 0:
        raise ValueError(f"inconsistent cycle counts {cycle_counts}")
    n = sum(i * c for i, c in enumerate(counts, start=1))
    k = sum(counts)
    per_perm = theta**k / pochhammer(theta, n)
    n_perms = math.factorial(n)
    for i, c in enumerate(counts, start=1):
        n_perms //= i**c * math.factorial(c)
    return EwensProb(per_perm, n_perms * per_perm)


def consistency_residual(params: AlphaTheta, c: Composition) -> float:
    """p(n) - sum over the k+1 one-step extensions of the composition
    (each part incremented, plus an appended singleton); 0 for any
    sampling-consistent EPPF."""
    base = eppf(params, c)
    total = 0.0
    for i in range(c.k):
        grown = list(c.parts)
        grown[i] += 1
        total += eppf(params, Composition(grown))
    total += eppf(params, Composition((*c.parts, 1)))
    return base - total
