"""Incoherent Kraus channels.

A Kraus set {K_1, ..., K_m} in M_{N,n} is incoherent when every column of
every operator has at most one nonzero entry; then each K_j maps diagonal
states to diagonal matrices. Completeness sum K_j† K_j = I makes the vertical
stack F = [K_1; ...; K_m] an isometry, the object the contraction argument
runs on.
"""

from dataclasses import dataclass

import numpy as np

from . import jsonio
from .matrices import (
    ArgumentError,
    DIM_LIMIT,
    DensityState,
    StructureError,
    _as_array,
    as_complex_matrix,
    matrix_from_dict,
    matrix_to_dict,
)

COMPLETENESS_ATOL = 1e-10
COLUMN_ENTRY_TOL = 1e-12
OUTCOME_PROB_FLOOR = 1e-12


class KrausValidationError(StructureError):
    """The operator list is not a valid incoherent Kraus set."""


@dataclass(frozen=True)
class ColumnMap:
    """Per-operator column structure: K_k e_j = coeffs[k, j] * e_(targets[k, j]).

    targets[k, j] is -1 when column j of operator k vanishes.
    """

    targets: np.ndarray
    coeffs: np.ndarray

    def reconstruct(self, rows):
        m, n = self.targets.shape
        ops = np.zeros((m, rows, n), dtype=np.complex128)
        for k in range(m):
            for j in range(n):
                t = self.targets[k, j]
                if t >= 0:
                    ops[k, t, j] = self.coeffs[k, j]
        return list(ops)


class KrausSet:
    """Validated list of incoherent Kraus operators with shared shape (N, n)."""

    __slots__ = ("operators", "column_map")

    def __init__(self, operators, column_map):
        self.operators = operators
        self.column_map = column_map

    @property
    def m(self):
        return len(self.operators)

    @property
    def rows(self):
        return self.operators[0].shape[0]

    @property
    def dim_in(self):
        return self.operators[0].shape[1]

    def __repr__(self):
        return f"KrausSet(m={self.m}, shape={self.rows}x{self.dim_in})"

    def to_dict(self):
        return {"ops": [matrix_to_dict(k) for k in self.operators]}

    @staticmethod
    def from_dict(d):
        return validate_incoherent([matrix_from_dict(o) for o in d["ops"]])

    def save(self, path):
        jsonio.dump(self.to_dict(), path)

    @staticmethod
    def load(path):
        return KrausSet.from_dict(jsonio.load(path))


def validate_incoherent(ops):
    """Build a KrausSet, checking completeness and the one-nonzero-per-column rule.

    Entries with modulus at most 1e-12 are zeroed before the structure check.
    """
    if not ops:
        raise ArgumentError("empty Kraus operator list")
    mats = [as_complex_matrix(k) for k in ops]
    shape = mats[0].shape
    for k in mats:
        if k.shape != shape:
            raise ArgumentError(f"Kraus operators must share a shape; got {shape} and {k.shape}")
    rows, n = shape
    cleaned = []
    for k in mats:
        k = k.copy()
        k[np.abs(k) <= COLUMN_ENTRY_TOL] = 0.0
        cleaned.append(k)
    gram = sum(k.conj().T @ k for k in cleaned)
    resid = float(np.abs(gram - np.eye(n)).max())
    if resid > COMPLETENESS_ATOL:
        raise KrausValidationError(f"completeness residual {resid:.3e} > {COMPLETENESS_ATOL}")
    targets = np.full((len(cleaned), n), -1, dtype=np.int64)
    coeffs = np.zeros((len(cleaned), n), dtype=np.complex128)
    for idx, k in enumerate(cleaned):
        for j in range(n):
            nz = np.flatnonzero(k[:, j])
            if nz.size > 1:
                raise KrausValidationError(
                    f"operator {idx} column {j} has {nz.size} nonzero entries; incoherent sets allow one"
                )
            if nz.size == 1:
                targets[idx, j] = nz[0]
                coeffs[idx, j] = k[nz[0], j]
        k.setflags(write=False)
    targets.setflags(write=False)
    coeffs.setflags(write=False)
    return KrausSet(cleaned, ColumnMap(targets, coeffs))


def apply_channel(kraus, rho):
    """Trace-preserving channel action sum_j K_j rho K_j†."""
    mat = _as_array(rho, square=True)
    if mat.shape[0] != kraus.dim_in:
        raise ArgumentError(f"state dimension {mat.shape[0]} does not match channel input {kraus.dim_in}")
    out = np.zeros((kraus.rows, kraus.rows), dtype=np.complex128)
    for k in kraus.operators:
        out += k @ mat @ k.conj().T
    return DensityState(out)


@dataclass(frozen=True)
class ChannelOutcome:
    """Selective measurement outcome; state omitted when probability <= 1e-12."""

    probability: float
    state: DensityState | None


def selective_outcomes(kraus, rho):
    """Ensemble {(p_j, rho_j)} with p_j = tr(K_j rho K_j†)."""
    mat = _as_array(rho, square=True)
    if mat.shape[0] != kraus.dim_in:
        raise ArgumentError(f"state dimension {mat.shape[0]} does not match channel input {kraus.dim_in}")
    outcomes = []
    total = 0.0
    for k in kraus.operators:
        piece = k @ mat @ k.conj().T
        p = float(np.trace(piece).real)
        total += p
        if p <= OUTCOME_PROB_FLOOR:
            outcomes.append(ChannelOutcome(max(p, 0.0), None))
        else:
            outcomes.append(ChannelOutcome(p, DensityState(piece / p)))
    if abs(total - 1.0) > 1e-9:
        raise StructureError(f"outcome probabilities sum to {total!r}")
    return outcomes


def necessity_family(n, theta):
    """Two-operator channel K_1 = sin(theta) I_n ⊕ [0], K_2 = cos(theta) I_n ⊕ [1]."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ArgumentError(f"n must be a positive integer, got {n!r}")
    if not 0.0 <= theta <= np.pi / 2:
        raise ArgumentError(f"theta must lie in [0, pi/2], got {theta!r}")
    s, c = np.sin(theta), np.cos(theta)
    k1 = np.zeros((n + 1, n + 1), dtype=np.complex128)
    k2 = np.zeros((n + 1, n + 1), dtype=np.complex128)
    k1[:n, :n] = s * np.eye(n)
    k2[:n, :n] = c * np.eye(n)
    k2[n, n] = 1.0
    return validate_incoherent([k1, k2])


def random_incoherent_kraus(n, N, m, seed):
    """Seeded random incoherent Kraus set with m operators in M_{N,n}.

    Construction: each input column j receives a set of stacked rows, at most
    one per operator and disjoint across columns; complex weights on those rows
    are normalized to a unit l_2 column. Disjoint supports make the stacked
    matrix an isometry by construction, so completeness never needs a
    correction loop.
    """
    for name, val in (("n", n), ("N", N), ("m", m)):
        if not isinstance(val, (int, np.integer)) or val < 1:
            raise ArgumentError(f"{name} must be a positive integer, got {val!r}")
    if N > DIM_LIMIT or n > DIM_LIMIT:
        raise ArgumentError(f"dimensions exceed desk-scale limit {DIM_LIMIT}")
    if N * m < n:
        raise ArgumentError(f"infeasible shape: N*m = {N * m} stacked rows cannot host {n} columns")
    rng = np.random.default_rng(seed)
    slots = [(k, r) for k in range(m) for r in range(N)]
    order = rng.permutation(len(slots))
    # one dedicated slot per column first, then scatter leftovers
    assignment = {j: [slots[order[j]]] for j in range(n)}
    for idx in order[n:]:
        k, r = slots[idx]
        j = int(rng.integers(n))
        if any(k == kk for kk, _ in assignment[j]):
            continue
        if rng.random() < 0.5:
            assignment[j].append((k, r))
    ops = [np.zeros((N, n), dtype=np.complex128) for _ in range(m)]
    for j in range(n):
        cnt = len(assignment[j])
        w = rng.standard_normal(cnt) + 1j * rng.standard_normal(cnt)
        while np.any(np.abs(w) < 1e-6):
            w = rng.standard_normal(cnt) + 1j * rng.standard_normal(cnt)
        w /= np.linalg.norm(w)
        for (k, r), val in zip(assignment[j], w):
            ops[k][r, j] = val
    return validate_incoherent(ops)


def stacked_isometry(kraus):
    """Vertical stack F = [K_1; ...; K_m]; F†F = I within 1e-10."""
    f = np.vstack(kraus.operators)
    resid = float(np.abs(f.conj().T @ f - np.eye(kraus.dim_in)).max())
    if resid > COMPLETENESS_ATOL:
        raise KrausValidationError(f"stacked isometry residual {resid:.3e}")
    return f


def dephasing_channel(n):
    """Full dephasing {E_11, ..., E_nn}; selective outcomes are basis states."""
    ops = []
    for i in range(n):
        e = np.zeros((n, n), dtype=np.complex128)
        e[i, i] = 1.0
        ops.append(e)
    return validate_incoherent(ops)


def permutation_channel(perm):
    """Single-operator channel conjugating by the permutation matrix of `perm`."""
    perm = np.asarray(perm, dtype=np.int64)
    n = perm.size
    p = np.zeros((n, n), dtype=np.complex128)
    p[perm, np.arange(n)] = 1.0
    return validate_incoherent([p])
