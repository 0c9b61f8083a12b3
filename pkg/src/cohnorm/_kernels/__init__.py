"""Eigensolver backend selection.

The compiled cyclic-Jacobi extension is preferred; a numpy fallback keeps the
package importable without a C toolchain. Set COHNORM_DISABLE_EXT=1 to force
the fallback. Call through module attributes (``kernels.eigvals_batch``) so
``set_backend`` can rebind at runtime (used by tests and benchmarks).
"""

import os

from . import _eigh_fallback

try:
    from . import _jacobi
except ImportError:  # extension not built
    _jacobi = None

BACKEND = "numpy-eigh"
eigh_descending = _eigh_fallback.eigh_descending
eigvals_descending = _eigh_fallback.eigvals_descending
eigvals_batch = _eigh_fallback.eigvals_batch


def available_backends():
    names = ["numpy-eigh"]
    if _jacobi is not None:
        names.insert(0, "jacobi-ext")
    return names


def set_backend(name):
    """Select 'jacobi-ext' or 'numpy-eigh'; returns the active backend name."""
    global BACKEND, eigh_descending, eigvals_descending, eigvals_batch
    if name == "jacobi-ext":
        if _jacobi is None:
            raise RuntimeError("compiled jacobi extension is not available")
        mod = _jacobi
    elif name == "numpy-eigh":
        mod = _eigh_fallback
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name
    eigh_descending = mod.eigh_descending
    eigvals_descending = mod.eigvals_descending
    eigvals_batch = mod.eigvals_batch
    return BACKEND


if not os.environ.get("COHNORM_DISABLE_EXT") and _jacobi is not None:
    set_backend("jacobi-ext")
