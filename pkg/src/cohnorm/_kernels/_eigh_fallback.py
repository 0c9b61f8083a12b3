"""Pure-Python (numpy) eigensolver backend.

Used when the compiled Jacobi extension is unavailable or disabled via
COHNORM_DISABLE_EXT=1. Same contract as the extension: descending eigenvalues,
eigenvector columns aligned with them.
"""

import numpy as np


def eigh_descending(a):
    w, v = np.linalg.eigh(np.asarray(a, dtype=np.complex128))
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def eigvals_descending(a):
    w = np.linalg.eigvalsh(np.asarray(a, dtype=np.complex128))
    return w[::-1].copy()


def eigvals_batch(a):
    w = np.linalg.eigvalsh(np.asarray(a, dtype=np.complex128))
    return w[:, ::-1].copy()
