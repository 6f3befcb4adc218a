"""Hot Monte Carlo kernels with two interchangeable backends.

The compiled Cython extension (_core) is preferred; a pure numpy fallback
(_pyfallback) is selected when the extension is unavailable or when the
environment variable PMEANS_BACKEND=python is set.  Both backends consume
random draws from the caller's numpy Generator in exactly the same order
and apply the same floating-point operations, so for a given (seed,
stream_id) they produce bit-identical output (the extension is compiled
with FP contraction off).

Draw-order contract for the stick-breaking kernels, batch of R replicates:

    step i = 1, 2, ...:
        A = indices of unfinished replicates, ascending
        unless the step is the degenerate last atom of the finite regime
        (alpha < 0, i = m), draw
            pass 1:  one standard gamma(1 - alpha) per r in A
            pass 2:  one standard gamma(theta + i*alpha) per r in A
        pass 3 (pmean kernel, non-constant X): one uniform per r in A
        update H = g1/(g1+g2), weight = resid*H, resid *= g2/(g1+g2)
        drop replicates with resid < trunc_tol

The CRP kernel consumes one uniform per replicate per seated customer,
customers in outer order, replicates ascending within a customer.
"""

import os

__all__ = [
    "BACKEND",
    "X_CONST",
    "X_BERNOULLI",
    "X_ATOMIC",
    "gem_pmean_batch",
    "gem_weights_batch",
    "crp_kn_batch",
]

# X-law codes for gem_pmean_batch; params layout documented per code.
X_CONST = 0      # params [c]
X_BERNOULLI = 1  # params [p]
X_ATOMIC = 2     # params [k, v_1..v_k, cum_1..cum_k]

_forced = os.environ.get("PMEANS_BACKEND", "").strip().lower()

if _forced in ("", "cython", "c"):
    try:
        from ._core import crp_kn_batch, gem_pmean_batch, gem_weights_batch

        BACKEND = "cython"
    except ImportError:
        if _forced:
            raise
        from ._pyfallback import crp_kn_batch, gem_pmean_batch, gem_weights_batch

        BACKEND = "python"
elif _forced == "python":
    from ._pyfallback import crp_kn_batch, gem_pmean_batch, gem_weights_batch

    BACKEND = "python"
else:
    raise RuntimeError(f"unknown PMEANS_BACKEND value: {_forced!r}")
