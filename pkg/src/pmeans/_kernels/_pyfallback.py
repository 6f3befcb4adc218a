"""Pure numpy implementations of the hot kernels.

Kept in lockstep with _core.pyx: same draw order, same arithmetic.  See
the package docstring for the draw-order contract.
"""

from __future__ import annotations

import numpy as np

_X_CONST = 0
_X_BERNOULLI = 1
_X_ATOMIC = 2


def _finite_atoms(alpha: float, theta: float) -> int:
    """Number of atoms in the finite regime (alpha < 0), else 0."""
    if alpha < 0.0:
        return int(round(-theta / alpha))
    return 0


def _x_values(kind: int, params: np.ndarray, u: np.ndarray) -> np.ndarray:
    if kind == _X_BERNOULLI:
        return (u < params[0]).astype(np.float64)
    if kind == _X_ATOMIC:
        k = int(params[0])
        values = params[1 : 1 + k]
        cum = params[1 + k : 1 + 2 * k]
        idx = np.searchsorted(cum, u, side="right")
        return values[np.minimum(idx, k - 1)]
    raise ValueError(f"unknown x kind {kind}")


def gem_pmean_batch(alpha, theta, trunc_tol, max_atoms, n_rep, x_kind, x_params, ex, gen):
    """Batch of stick-breaking P-means of X: sum_j X_j P_j + defect * ex."""
    x_params = np.asarray(x_params, dtype=np.float64)
    acc = np.zeros(n_rep)
    resid = np.ones(n_rep)
    active = np.arange(n_rep)
    m = _finite_atoms(alpha, theta)
    shape1 = 1.0 - alpha
    i = 0
    while active.size:
        i += 1
        if i > max_atoms:
            raise RuntimeError(
                f"stick-breaking exceeded {max_atoms} atoms; trunc_tol too small"
            )
        n_act = active.size
        if m and i == m:  # last atom of the finite regime: H = 1 exactly
            h = np.ones(n_act)
            omh = np.zeros(n_act)
        else:
            g1 = gen.standard_gamma(shape1, size=n_act)
            g2 = gen.standard_gamma(theta + i * alpha, size=n_act)
            s = g1 + g2
            h = g1 / s
            omh = g2 / s
        w = resid[active] * h
        if x_kind == _X_CONST:
            x = x_params[0]
        else:
            u = gen.random(n_act)
            x = _x_values(x_kind, x_params, u)
        acc[active] += w * x
        resid[active] = resid[active] * omh
        if m:  # finite regime always runs to its m-th (degenerate) atom
            active = active[:0] if i >= m else active
        else:
            active = active[resid[active] >= trunc_tol]
    return acc + resid * ex


def gem_weights_batch(alpha, theta, trunc_tol, max_atoms, n_rep, gen):
    """Batch of stick-breaking weight sequences.

    Returns (flat, offsets, defects): row r's weights, in stick order, are
    flat[offsets[r]:offsets[r+1]]; defects[r] is its residual mass.
    """
    resid = np.ones(n_rep)
    active = np.arange(n_rep)
    m = _finite_atoms(alpha, theta)
    shape1 = 1.0 - alpha
    rows_parts: list[np.ndarray] = []
    w_parts: list[np.ndarray] = []
    i = 0
    while active.size:
        i += 1
        if i > max_atoms:
            raise RuntimeError(
                f"stick-breaking exceeded {max_atoms} atoms; trunc_tol too small"
            )
        n_act = active.size
        if m and i == m:
            h = np.ones(n_act)
            omh = np.zeros(n_act)
        else:
            g1 = gen.standard_gamma(shape1, size=n_act)
            g2 = gen.standard_gamma(theta + i * alpha, size=n_act)
            s = g1 + g2
            h = g1 / s
            omh = g2 / s
        rows_parts.append(active.copy())
        w_parts.append(resid[active] * h)
        resid[active] = resid[active] * omh
        if m:
            active = active[:0] if i >= m else active
        else:
            active = active[resid[active] >= trunc_tol]
    if rows_parts:
        rows = np.concatenate(rows_parts)
        w = np.concatenate(w_parts)
        # generation is step-major with steps ascending, so a stable sort
        # on the row index yields row-major atoms in stick order
        order = np.argsort(rows, kind="stable")
        rows = rows[order]
        flat = w[order]
    else:
        rows = np.empty(0, dtype=np.int64)
        flat = np.empty(0)
    counts = np.bincount(rows, minlength=n_rep)
    offsets = np.zeros(n_rep + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return flat, offsets, resid


def crp_kn_batch(alpha, theta, n, n_rep, gen):
    """Number of blocks after sequentially seating n items, for n_rep
    independent runs of the (alpha, theta) seating rule."""
    counts = np.zeros((n_rep, n))
    counts[:, 0] = 1.0
    k = np.ones(n_rep, dtype=np.int64)
    rows = np.arange(n_rep)
    for t in range(1, n):
        u = gen.random(n_rep)
        scaled = u * (theta + t)
        occupied = counts > 0.0
        cum = np.cumsum(np.where(occupied, counts - alpha, 0.0), axis=1)
        hit = scaled[:, None] < cum
        joins = hit.any(axis=1)
        block = np.where(joins, hit.argmax(axis=1), k)
        counts[rows, block] += 1.0
        k += ~joins
    return k
