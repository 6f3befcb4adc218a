# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels.

Kept in lockstep with _pyfallback.py: same draw order, same arithmetic.
Randomness is pulled from the caller's numpy Generator through the
BitGenerator capsule, calling the same C distribution functions numpy
itself uses, so the two backends see identical variates.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    random_standard_gamma,
    random_standard_uniform,
)

cnp.import_array()

ctypedef cnp.float64_t f8
ctypedef cnp.int64_t i8

cdef int X_CONST = 0
cdef int X_BERNOULLI = 1
cdef int X_ATOMIC = 2


cdef inline bitgen_t *_bitgen(object gen):
    return <bitgen_t *> PyCapsule_GetPointer(gen.bit_generator.capsule,
                                             "BitGenerator")


cdef inline int _finite_atoms(double alpha, double theta):
    if alpha < 0.0:
        return <int> round(-theta / alpha)
    return 0


def gem_pmean_batch(double alpha, double theta, double trunc_tol,
                    long max_atoms, Py_ssize_t n_rep,
                    int x_kind, object x_params, double ex, object gen):
    """Batch of stick-breaking P-means of X: sum_j X_j P_j + defect * ex."""
    cdef cnp.ndarray[f8, ndim=1] params = \
        np.ascontiguousarray(x_params, dtype=np.float64)
    cdef cnp.ndarray[f8, ndim=1] acc = np.zeros(n_rep)
    cdef cnp.ndarray[f8, ndim=1] resid = np.ones(n_rep)
    cdef cnp.ndarray[f8, ndim=1] g1 = np.empty(n_rep)
    cdef cnp.ndarray[f8, ndim=1] g2 = np.empty(n_rep)
    cdef cnp.ndarray[f8, ndim=1] u = np.empty(n_rep)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] active = np.arange(n_rep, dtype=np.intp)
    cdef bitgen_t *rng = _bitgen(gen)
    cdef Py_ssize_t n_act = n_rep, j, r, nkeep, natoms, ki
    cdef int m = _finite_atoms(alpha, theta)
    cdef double shape1 = 1.0 - alpha
    cdef double shape2, s, h, omh, w, x, uu
    cdef long i = 0
    cdef bint degenerate

    natoms = 0
    if x_kind == X_ATOMIC:
        natoms = <Py_ssize_t> params[0]

    with gen.bit_generator.lock:
        while n_act > 0:
            i += 1
            if i > max_atoms:
                raise RuntimeError(
                    f"stick-breaking exceeded {max_atoms} atoms; "
                    f"trunc_tol too small")
            degenerate = (m != 0 and i == m)
            if not degenerate:
                shape2 = theta + i * alpha
                for j in range(n_act):
                    g1[j] = random_standard_gamma(rng, shape1)
                for j in range(n_act):
                    g2[j] = random_standard_gamma(rng, shape2)
            if x_kind != X_CONST:
                for j in range(n_act):
                    u[j] = random_standard_uniform(rng)
            nkeep = 0
            for j in range(n_act):
                r = active[j]
                if degenerate:
                    h = 1.0
                    omh = 0.0
                else:
                    s = g1[j] + g2[j]
                    h = g1[j] / s
                    omh = g2[j] / s
                w = resid[r] * h
                if x_kind == X_CONST:
                    x = params[0]
                elif x_kind == X_BERNOULLI:
                    x = 1.0 if u[j] < params[0] else 0.0
                else:
                    uu = u[j]
                    ki = 0
                    while ki < natoms - 1 and uu >= params[1 + natoms + ki]:
                        ki += 1
                    x = params[1 + ki]
                acc[r] += w * x
                resid[r] = resid[r] * omh
                # the finite regime always runs to its m-th (degenerate) atom
                if (i < m) if m else (resid[r] >= trunc_tol):
                    active[nkeep] = r
                    nkeep += 1
            n_act = nkeep
    return acc + resid * ex


def gem_weights_batch(double alpha, double theta, double trunc_tol,
                      long max_atoms, Py_ssize_t n_rep, object gen):
    """Batch of stick-breaking weight sequences -> (flat, offsets, defects)."""
    cdef cnp.ndarray[f8, ndim=1] resid = np.ones(n_rep)
    cdef cnp.ndarray[f8, ndim=1] g1 = np.empty(n_rep)
    cdef cnp.ndarray[f8, ndim=1] g2 = np.empty(n_rep)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] active = np.arange(n_rep, dtype=np.intp)
    cdef cnp.ndarray[i8, ndim=1] counts = np.zeros(n_rep, dtype=np.int64)
    cdef bitgen_t *rng = _bitgen(gen)
    cdef Py_ssize_t n_act = n_rep, j, r, nkeep, total = 0, cap
    cdef int m = _finite_atoms(alpha, theta)
    cdef double shape1 = 1.0 - alpha
    cdef double shape2, s, h, omh
    cdef long i = 0
    cdef bint degenerate

    # step-major buffers, compacted to row-major at the end
    cap = 4 * n_rep if n_rep > 0 else 16
    cdef cnp.ndarray[cnp.intp_t, ndim=1] rows_buf = np.empty(cap, dtype=np.intp)
    cdef cnp.ndarray[f8, ndim=1] w_buf = np.empty(cap)

    with gen.bit_generator.lock:
        while n_act > 0:
            i += 1
            if i > max_atoms:
                raise RuntimeError(
                    f"stick-breaking exceeded {max_atoms} atoms; "
                    f"trunc_tol too small")
            degenerate = (m != 0 and i == m)
            if not degenerate:
                shape2 = theta + i * alpha
                for j in range(n_act):
                    g1[j] = random_standard_gamma(rng, shape1)
                for j in range(n_act):
                    g2[j] = random_standard_gamma(rng, shape2)
            if total + n_act > cap:
                while total + n_act > cap:
                    cap *= 2
                rows_buf = np.resize(rows_buf, cap)
                w_buf = np.resize(w_buf, cap)
            nkeep = 0
            for j in range(n_act):
                r = active[j]
                if degenerate:
                    h = 1.0
                    omh = 0.0
                else:
                    s = g1[j] + g2[j]
                    h = g1[j] / s
                    omh = g2[j] / s
                rows_buf[total] = r
                w_buf[total] = resid[r] * h
                total += 1
                counts[r] += 1
                resid[r] = resid[r] * omh
                if (i < m) if m else (resid[r] >= trunc_tol):
                    active[nkeep] = r
                    nkeep += 1
            n_act = nkeep

    cdef cnp.ndarray[i8, ndim=1] offsets = np.zeros(n_rep + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    cdef cnp.ndarray[i8, ndim=1] fill = offsets[:n_rep].copy()
    cdef cnp.ndarray[f8, ndim=1] flat = np.empty(total)
    cdef Py_ssize_t t2
    for t2 in range(total):
        r = rows_buf[t2]
        flat[fill[r]] = w_buf[t2]
        fill[r] += 1
    return flat, offsets, resid


def crp_kn_batch(double alpha, double theta, int n, Py_ssize_t n_rep,
                 object gen):
    """Number of blocks after sequentially seating n items, batched."""
    cdef cnp.ndarray[f8, ndim=2] counts = np.zeros((n_rep, n))
    cdef cnp.ndarray[i8, ndim=1] k = np.ones(n_rep, dtype=np.int64)
    cdef cnp.ndarray[f8, ndim=1] u = np.empty(n_rep)
    cdef bitgen_t *rng = _bitgen(gen)
    cdef Py_ssize_t r, j
    cdef int t
    cdef double scaled, cum
    cdef bint joined

    counts[:, 0] = 1.0
    with gen.bit_generator.lock:
        for t in range(1, n):
            for r in range(n_rep):
                u[r] = random_standard_uniform(rng)
            for r in range(n_rep):
                scaled = u[r] * (theta + t)
                cum = 0.0
                joined = False
                for j in range(k[r]):
                    cum += counts[r, j] - alpha
                    if scaled < cum:
                        counts[r, j] += 1.0
                        joined = True
                        break
                if not joined:
                    counts[r, k[r]] = 1.0
                    k[r] += 1
    return k
