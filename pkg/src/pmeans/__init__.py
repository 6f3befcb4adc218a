"""Random discrete distributions, partition structures, and the laws of
their randomly weighted averages: exact combinatorics, closed-form
transforms and densities, seeded samplers, and a Monte Carlo verification
harness for the identities tying them together."""

from ._kernels import BACKEND
from .discrete import AlphaTheta, RandomDiscreteSample
from .partition import BlockState, Composition
from .pmean import AtomicDistribution, MomentVector
from .sampling import RngStream
from .verify import CheckReport, run_all, run_check

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AlphaTheta",
    "RandomDiscreteSample",
    "BlockState",
    "Composition",
    "AtomicDistribution",
    "MomentVector",
    "RngStream",
    "CheckReport",
    "run_check",
    "run_all",
    "__version__",
]
