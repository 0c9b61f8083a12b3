"""cohnorm: norm-induced quantum-coherence measures and their stress tests.

Computes C(rho) = min over diagonal states sigma of nu(rho - sigma) for a
catalog of matrix norms (column-wise l_{q,p}, Schatten-p, gauge-represented
unitary-similarity-invariant norms), applies incoherent Kraus channels, and
checks the coherence-measure axioms on concrete states and channels.
"""

from . import axioms, channels, jsonio, matrices, measures, norms, oracles
from ._kernels import BACKEND as kernel_backend

__all__ = [
    "axioms",
    "channels",
    "jsonio",
    "matrices",
    "measures",
    "norms",
    "oracles",
    "kernel_backend",
]

__version__ = "0.1.0"
