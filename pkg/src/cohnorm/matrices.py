"""Dense complex-matrix foundation.

Validated containers for Hermitian matrices, density states and diagonal
states, plus the handful of constructions everything else is built from:
all-ones matrices, direct sums, diagonal extraction and descending Hermitian
eigenvalues. All containers are immutable after construction (numpy buffers
are marked read-only) and all operations are pure.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels, jsonio

DIM_LIMIT = 256
HERMITICITY_ATOL = 1e-12
TRACE_ATOL = 1e-10
PSD_ATOL = 1e-10
EIG_RESIDUAL_REL = 1e-10
EIG_TRACE_ATOL = 1e-9


class MatrixError(ValueError):
    """Base class for matrix-domain failures."""


class ArgumentError(MatrixError):
    """Malformed argument: wrong shape, empty input, out-of-range dimension."""


class StructureError(MatrixError):
    """A structural invariant failed (hermiticity, trace, positivity)."""


def as_complex_matrix(entries, *, square=False):
    """Coerce to a 2-D complex128 array within the desk-scale dimension bound."""
    a = np.array(entries, dtype=np.complex128, order="C")
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise ArgumentError(f"expected a 2-D matrix, got ndim={a.ndim}")
    if a.shape[0] == 0 or a.shape[1] == 0:
        raise ArgumentError("matrix dimensions must be positive")
    if max(a.shape) > DIM_LIMIT:
        raise ArgumentError(f"dimension {max(a.shape)} exceeds desk-scale limit {DIM_LIMIT}")
    if square and a.shape[0] != a.shape[1]:
        raise ArgumentError(f"expected a square matrix, got shape {a.shape}")
    return a


def hermiticity_residual(a):
    return float(np.abs(a - a.conj().T).max())


class HermitianMatrix:
    """Square complex matrix with A = A† entrywise within 1e-12.

    Entries are symmetrized to (A + A†)/2 at construction; a larger residual
    is an error, never silently fixed.
    """

    __slots__ = ("mat",)

    def __init__(self, entries):
        a = as_complex_matrix(entries, square=True)
        resid = hermiticity_residual(a)
        if resid > HERMITICITY_ATOL:
            raise StructureError(f"matrix is not Hermitian: residual {resid:.3e} > {HERMITICITY_ATOL}")
        a = (a + a.conj().T) / 2.0
        a.setflags(write=False)
        self.mat = a

    @property
    def dim(self):
        return self.mat.shape[0]

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class DensityState(HermitianMatrix):
    """Hermitian, trace one within 1e-10, eigenvalues >= -1e-10."""

    __slots__ = ()

    def __init__(self, entries):
        super().__init__(entries)
        tr = float(np.trace(self.mat).real)
        if abs(tr - 1.0) > TRACE_ATOL:
            raise StructureError(f"trace {tr!r} differs from 1 by more than {TRACE_ATOL}")
        lo = float(_kernels.eigvals_descending(self.mat)[-1])
        if lo < -PSD_ATOL:
            raise StructureError(f"negative eigenvalue {lo:.3e} below -{PSD_ATOL}")

    def diagonal(self):
        return np.real(np.diagonal(self.mat)).copy()


class DiagonalState:
    """Incoherent state: nonnegative diagonal summing to one within 1e-10."""

    __slots__ = ("diag",)

    def __init__(self, diagonal):
        d = np.array(diagonal, dtype=np.float64)
        if d.ndim != 1 or d.size == 0:
            raise ArgumentError("diagonal must be a nonempty 1-D real vector")
        if d.size > DIM_LIMIT:
            raise ArgumentError(f"dimension {d.size} exceeds desk-scale limit {DIM_LIMIT}")
        if d.min() < -1e-12:
            raise StructureError(f"negative diagonal entry {d.min():.3e}")
        d = np.maximum(d, 0.0)
        total = float(d.sum())
        if abs(total - 1.0) > TRACE_ATOL:
            raise StructureError(f"diagonal sums to {total!r}, not 1 within {TRACE_ATOL}")
        d.setflags(write=False)
        self.diag = d

    @property
    def dim(self):
        return self.diag.size

    def matrix(self):
        return np.diag(self.diag.astype(np.complex128))

    def as_density(self):
        return DensityState(self.matrix())

    def __repr__(self):
        return f"DiagonalState({np.array2string(self.diag, precision=6)})"


@dataclass(frozen=True)
class EigenResult:
    """Descending eigenvalues plus the max per-vector residual ||Av - wv||_2."""

    eigenvalues: np.ndarray
    residual: float


def _as_array(a, *, square=False):
    if isinstance(a, (HermitianMatrix, DensityState)):
        return a.mat
    if isinstance(a, DiagonalState):
        return a.matrix()
    return as_complex_matrix(a, square=square)


def make_all_ones(n):
    """The n x n all-ones matrix; divided by n it is a valid pure state."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ArgumentError(f"n must be a positive integer, got {n!r}")
    return HermitianMatrix(np.ones((n, n)))


def direct_sum(blocks):
    """Block-diagonal Hermitian matrix from a nonempty list of blocks."""
    if isinstance(blocks, (HermitianMatrix, np.ndarray)):
        raise ArgumentError("direct_sum expects a list of blocks")
    mats = [_as_array(b, square=True) for b in blocks]
    if not mats:
        raise ArgumentError("direct_sum of an empty list")
    n = sum(m.shape[0] for m in mats)
    if n > DIM_LIMIT:
        raise ArgumentError(f"direct sum dimension {n} exceeds desk-scale limit {DIM_LIMIT}")
    out = np.zeros((n, n), dtype=np.complex128)
    at = 0
    for m in mats:
        k = m.shape[0]
        out[at:at + k, at:at + k] = m
        at += k
    return HermitianMatrix(out)


def eigenvalues_hermitian(a):
    """Descending eigenvalues of a Hermitian matrix with a residual certificate."""
    mat = _as_array(a, square=True)
    resid = hermiticity_residual(mat)
    if resid > HERMITICITY_ATOL:
        raise StructureError(f"matrix is not Hermitian: residual {resid:.3e}")
    mat = (mat + mat.conj().T) / 2.0
    w, v = _kernels.eigh_descending(mat)
    residual = float(np.linalg.norm(mat @ v - v * w[None, :], axis=0).max()) if mat.size else 0.0
    fro = float(np.linalg.norm(mat))
    if residual > EIG_RESIDUAL_REL * max(fro, 1e-300) and fro > 0:
        raise StructureError(f"eigensolver residual {residual:.3e} exceeds {EIG_RESIDUAL_REL:.0e}*||A||_F")
    tr = float(np.trace(mat).real)
    if abs(float(w.sum()) - tr) > EIG_TRACE_ATOL * max(1.0, abs(tr)):
        raise StructureError("eigenvalue sum disagrees with trace")
    w.setflags(write=False)
    return EigenResult(eigenvalues=w, residual=residual)


def diag_part(a):
    """Same-shape matrix with all off-diagonal entries zeroed."""
    mat = _as_array(a)
    if mat.shape[0] != mat.shape[1]:
        raise ArgumentError(f"diag_part needs a square matrix, got shape {mat.shape}")
    return np.diag(np.diagonal(mat).copy())


def validate_density(a):
    """Accept iff Hermitian, trace-one and PSD; each failure reported separately."""
    mat = _as_array(a, square=True)
    problems = []
    resid = hermiticity_residual(mat)
    if resid > HERMITICITY_ATOL:
        problems.append(f"hermiticity residual {resid:.3e} > {HERMITICITY_ATOL}")
    else:
        sym = (mat + mat.conj().T) / 2.0
        tr = float(np.trace(sym).real)
        if abs(tr - 1.0) > TRACE_ATOL:
            problems.append(f"trace {tr!r} differs from 1 by more than {TRACE_ATOL}")
        lo = float(_kernels.eigvals_descending(sym)[-1])
        if lo < -PSD_ATOL:
            problems.append(f"negative eigenvalue {lo:.3e} below -{PSD_ATOL}")
    if problems:
        raise StructureError("not a density matrix: " + "; ".join(problems))
    return DensityState(mat)


def random_density(n, rng):
    """Random full-support density matrix (Ginibre construction)."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return DensityState(rho)


# --- JSON matrix format -----------------------------------------------------
#
# {"n": <rows>, "re": [[...]], "im": [[...]]}; writers emit 17 significant
# digits. Rectangular matrices (Kraus operators) reuse the format with "n"
# carrying the row count and the column count inferred from the arrays.


def matrix_to_dict(a):
    mat = _as_array(a)
    return {
        "n": int(mat.shape[0]),
        "re": [[float(x) for x in row] for row in mat.real],
        "im": [[float(x) for x in row] for row in mat.imag],
    }


def matrix_from_dict(d):
    try:
        re = np.array(d["re"], dtype=np.float64)
        im = np.array(d["im"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise ArgumentError(f"malformed matrix object: {exc}") from exc
    if re.ndim != 2 or re.shape != im.shape:
        raise ArgumentError(f"re/im must be 2-D arrays of equal shape, got {re.shape} and {im.shape}")
    if "n" in d and int(d["n"]) != re.shape[0]:
        raise ArgumentError(f"declared n={d['n']} but re has {re.shape[0]} rows")
    return as_complex_matrix(re + 1j * im)


def save_matrix(a, path):
    jsonio.dump(matrix_to_dict(a), path)


def load_matrix(path):
    return matrix_from_dict(jsonio.load(path))
