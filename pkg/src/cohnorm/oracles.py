"""Independent brute-force verification of the supporting inequalities.

Everything here is deliberately dumb: exhaustive subset sums, direct grid
scans, literal transcriptions of closed-form constructions. These oracles
never share logic with the solver paths they validate.

* cover inequality: (max_sigma l_p(v_sigma))^(p-2) l_2(v)^2 <= l_p(v)^p;
* weighted cover inequality: sum l_p(v_sigma)^(p-2) b_sigma <= l_p(v)^p for
  weights dominated by partial l_2 masses;
* cover extraction from a Kraus set via the row supports of its stacked
  isometry;
* channel contraction: sum_k l_{1,p}(K_k A K_k†) <= l_{1,p}(A) for p in [1,2];
* extreme points of the l_{1,p} unit ball have one nonzero column (averaging
  witnesses for everything else);
* exhaustive simplex-grid minimization as the solver's ground truth.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channels import random_incoherent_kraus, stacked_isometry
from .matrices import ArgumentError, StructureError, _as_array
from .measures import SolverConfig, c_nu_min_diag, c_nu_symmetric, simplex_lattice
from .norms import check_exponent, lqp_norm, norm_batch, norm_value, vector_lp

COVER_ATOL = 1e-10
EXHAUSTIVE_LIMIT = 12


def _check_p_range(p):
    p = check_exponent(p)
    if p > 2.0:
        raise ArgumentError(f"inequality is stated for p in [1, 2], got {p}")
    return p


@dataclass(frozen=True)
class CoverInstance:
    """A cover of {0..n-1}, a nonnegative weight vector, optionally subset weights b.

    When b is present: sum b = l_2(v)^2 and, exhaustively for n <= 12,
    sum over sigma inside tau of b_sigma <= l_2(v_tau)^2 for every subset tau.
    """

    n: int
    subsets: tuple
    v: np.ndarray
    b: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.v, dtype=np.float64)
        if v.ndim != 1 or v.size != self.n:
            raise ArgumentError(f"v must be a length-{self.n} vector")
        if v.min() < 0:
            raise ArgumentError("v must be entrywise nonnegative")
        object.__setattr__(self, "v", v)
        subsets = tuple(frozenset(int(i) for i in s) for s in self.subsets)
        object.__setattr__(self, "subsets", subsets)
        if not subsets:
            raise ArgumentError("cover must be nonempty")
        covered = set()
        for s in subsets:
            if not s:
                raise ArgumentError("cover subsets must be nonempty")
            if min(s) < 0 or max(s) >= self.n:
                raise ArgumentError(f"subset {sorted(s)} out of range for n={self.n}")
            covered |= s
        if covered != set(range(self.n)):
            raise ArgumentError(f"subsets do not cover all of 0..{self.n - 1}")
        if self.b is not None:
            b = np.asarray(self.b, dtype=np.float64)
            if b.shape != (len(subsets),):
                raise ArgumentError("b must assign one weight per subset")
            if b.min() < 0:
                raise ArgumentError("b must be entrywise nonnegative")
            object.__setattr__(self, "b", b)
            total = float(b.sum())
            l2sq = float((v ** 2).sum())
            if abs(total - l2sq) > COVER_ATOL:
                raise StructureError(f"sum b = {total!r} differs from l2(v)^2 = {l2sq!r}")
            if self.n <= EXHAUSTIVE_LIMIT and not _subset_sums_ok(subsets, b, v):
                raise StructureError("partial b sums exceed partial l2 masses")

    def restrict(self, drop_b=True):
        return CoverInstance(self.n, self.subsets, self.v, None if drop_b else self.b)


def _masks(subsets):
    return np.array([sum(1 << i for i in s) for s in subsets], dtype=np.int64)


def _subset_sums_ok(subsets, b, v):
    n = v.size
    masks = _masks(subsets)
    taus = np.arange(1 << n, dtype=np.int64)
    inclusion = (masks[:, None] & ~taus[None, :]) == 0
    bsums = b @ inclusion
    bits = ((taus[None, :] >> np.arange(n)[:, None]) & 1).astype(np.float64)
    rhs = (v ** 2) @ bits
    return bool(np.all(bsums <= rhs + COVER_ATOL))


def check_perm_inequality(inst, p):
    """LHS - RHS of the cover inequality; the lemma asserts <= 0."""
    p = _check_p_range(p)
    if inst.b is not None:
        raise ArgumentError("cover inequality takes an instance without subset weights")
    if inst.v.min() <= 0.0:
        raise ArgumentError("cover inequality requires v with no zero entries")
    biggest = max(vector_lp(inst.v[sorted(s)], p) for s in inst.subsets)
    lhs = biggest ** (p - 2.0) * float((inst.v ** 2).sum())
    rhs = vector_lp(inst.v, p) ** p
    return lhs - rhs


def check_lagrange_inequality(inst, p):
    """LHS - RHS of the weighted cover inequality; the lemma asserts <= 0."""
    p = _check_p_range(p)
    if inst.b is None:
        raise ArgumentError("weighted inequality needs subset weights b")
    if float(inst.v.max()) <= 0.0:
        raise ArgumentError("v must be nonzero")
    lhs = 0.0
    for s, bs in zip(inst.subsets, inst.b):
        piece = inst.v[sorted(s)]
        if piece.max() <= 0.0:
            continue
        lhs += vector_lp(piece, p) ** (p - 2.0) * bs
    rhs = vector_lp(inst.v, p) ** p
    return lhs - rhs


def cover_from_kraus(kraus, v):
    """Cover instance from the row supports of the stacked isometry.

    b_sigma collects |(Fv)_i|^2 over rows i whose nonzero pattern is sigma;
    all-zero rows contribute to no subset. The isometry identity makes the
    resulting instance satisfy the CoverInstance invariants.
    """
    v = np.asarray(v, dtype=np.complex128).ravel()
    if v.size != kraus.dim_in:
        raise ArgumentError(f"v must have length {kraus.dim_in}")
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ArgumentError("v must be an l_2 unit vector")
    f = stacked_isometry(kraus)
    fv = f @ v
    buckets = {}
    for i in range(f.shape[0]):
        support = frozenset(np.flatnonzero(np.abs(f[i]) > 1e-12).tolist())
        if not support:
            continue
        buckets[support] = buckets.get(support, 0.0) + float(abs(fv[i]) ** 2)
    subsets = tuple(sorted(buckets, key=lambda s: sorted(s)))
    b = np.array([buckets[s] for s in subsets])
    return CoverInstance(kraus.dim_in, subsets, np.abs(v), b)


def check_contraction(a, kraus, p):
    """sum_k l_{1,p}(K_k A K_k†) - l_{1,p}(A); the contraction asserts <= 0."""
    p = _check_p_range(p)
    mat = _as_array(a, square=True)
    if mat.shape[0] != kraus.dim_in:
        raise ArgumentError(f"matrix dim {mat.shape[0]} does not match channel input {kraus.dim_in}")
    total = sum(lqp_norm(k @ mat @ k.conj().T, 1.0, p) for k in kraus.operators)
    return total - lqp_norm(mat, 1.0, p)


def extreme_point_witness(b, p):
    """Averaging witnesses for a unit-norm matrix, or "extreme".

    A matrix on the l_{1,p} unit sphere with at least two nonzero columns is
    the midpoint of two distinct unit-norm matrices obtained by transferring
    norm mass eps between its first two nonzero columns; with one nonzero
    column no such construction exists.
    """
    p = check_exponent(p)
    mat = _as_array(b)
    total = lqp_norm(mat, 1.0, p)
    if abs(total - 1.0) > 1e-10:
        raise ArgumentError(f"matrix must lie on the unit sphere, l_(1,p) norm is {total!r}")
    col_norms = [vector_lp(mat[:, j], p) for j in range(mat.shape[1])]
    nonzero = [j for j, cn in enumerate(col_norms) if cn > 1e-12]
    if len(nonzero) < 2:
        return "extreme"
    j1, j2 = nonzero[0], nonzero[1]
    n1, n2 = col_norms[j1], col_norms[j2]
    eps = 0.5 * min(n1, n2)
    first = mat.copy()
    second = mat.copy()
    first[:, j1] *= 1.0 + eps / n1
    first[:, j2] *= 1.0 - eps / n2
    second[:, j1] *= 1.0 - eps / n1
    second[:, j2] *= 1.0 + eps / n2
    return first, second


def brute_force_min_diag(rho, norm, resolution):
    """Exhaustive simplex-grid minimum of nu(rho - sigma); dim <= 4 only.

    The grid has `resolution` points per axis, so the result overshoots the
    true minimum by at most grid_error_bound(norm, n, resolution).
    """
    mat = _as_array(rho, square=True)
    n = mat.shape[0]
    if n > 4:
        raise ArgumentError(f"grid oracle refuses dim {n} > 4 (grid blow-up)")
    if resolution < 1:
        raise ArgumentError("resolution must be positive")
    pts = simplex_lattice(n, resolution)
    idx = np.arange(n)
    best = math.inf
    for start in range(0, pts.shape[0], 65536):
        chunk = pts[start:start + 65536].astype(np.float64) / resolution
        stack = np.broadcast_to(mat, (chunk.shape[0], n, n)).copy()
        stack[:, idx, idx] -= chunk
        best = min(best, float(norm_batch(stack, norm).min()))
    return best


def grid_error_bound(norm, n, resolution):
    """Lipschitz-style oracle error: the norm of the all-ones diagonal step over the grid pitch."""
    return norm_value(np.diag(np.ones(n)).astype(complex), norm) / resolution


# --- randomized suites -------------------------------------------------------


def random_cover(rng, n):
    """Random cover: up to 2n half-density subsets, patched with singletons."""
    count = int(rng.integers(1, 2 * n + 1))
    subsets = set()
    for _ in range(count):
        mask = rng.random(n) < 0.5
        while not mask.any():
            mask = rng.random(n) < 0.5
        subsets.add(frozenset(np.flatnonzero(mask).tolist()))
    covered = set().union(*subsets) if subsets else set()
    for i in range(n):
        if i not in covered:
            subsets.add(frozenset([i]))
    return tuple(sorted(subsets, key=lambda s: sorted(s)))


def random_perm_instance(rng, n_max=8):
    n = int(rng.integers(1, n_max + 1))
    v = rng.uniform(0.1, 2.0, size=n)
    return CoverInstance(n, random_cover(rng, n), v, None)


def random_lagrange_instance(rng, n_max=6, max_tries=500):
    """Feasible weighted instance by rejection: Dirichlet b scaled to l2(v)^2."""
    for _ in range(max_tries):
        n = int(rng.integers(1, n_max + 1))
        v = rng.uniform(0.1, 1.5, size=n)
        subsets = random_cover(rng, n)
        target = float((v ** 2).sum())
        for _ in range(40):
            b = rng.dirichlet(np.ones(len(subsets))) * target
            if _subset_sums_ok(subsets, b, v):
                return CoverInstance(n, subsets, v, b)
    raise RuntimeError("could not sample a feasible weighted cover instance")


def run_perm_suite(trials, seed, ps=(1.0, 1.3, 1.7, 2.0)):
    worst = -math.inf
    for t in range(trials):
        rng = np.random.default_rng((seed, t))
        inst = random_perm_instance(rng)
        for p in ps:
            worst = max(worst, check_perm_inequality(inst, p))
    return {"suite": "cover-inequality", "trials": trials, "exponents": list(ps), "worst_margin": worst}


def run_lagrange_suite(trials, seed, ps=(1.0, 1.3, 1.7, 2.0)):
    worst = -math.inf
    for t in range(trials):
        rng = np.random.default_rng((seed, t))
        inst = random_lagrange_instance(rng)
        for p in ps:
            worst = max(worst, check_lagrange_inequality(inst, p))
    return {"suite": "weighted-cover-inequality", "trials": trials, "exponents": list(ps), "worst_margin": worst}


def run_contraction_suite(trials, seed, ps=(1.0, 1.3, 1.7, 2.0), n_max=6):
    worst = -math.inf
    for t in range(trials):
        rng = np.random.default_rng((seed, t))
        n = int(rng.integers(1, n_max + 1))
        while True:
            m = int(rng.integers(1, 4))
            rows = int(rng.integers(1, 7))
            if m * rows >= n:
                break
        kraus = random_incoherent_kraus(n, rows, m, seed=int(rng.integers(2 ** 62)))
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        for p in ps:
            worst = max(worst, check_contraction(a, kraus, p))
    return {"suite": "channel-contraction", "trials": trials, "exponents": list(ps), "worst_margin": worst}


def run_cover_kraus_suite(trials, seed, ps=(1.0, 1.3, 1.7, 2.0)):
    """Random Kraus covers pass both inequalities (the contraction reduction chain)."""
    worst = -math.inf
    for t in range(trials):
        rng = np.random.default_rng((seed, t))
        n = int(rng.integers(2, 7))
        while True:
            m = int(rng.integers(1, 4))
            rows = int(rng.integers(1, 7))
            if m * rows >= n:
                break
        kraus = random_incoherent_kraus(n, rows, m, seed=int(rng.integers(2 ** 62)))
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        inst = cover_from_kraus(kraus, v)
        strictly_positive = inst.v.min() > 0.0
        for p in ps:
            worst = max(worst, check_lagrange_inequality(inst, p))
            if strictly_positive:
                worst = max(worst, check_perm_inequality(inst.restrict(), p))
    return {"suite": "kraus-cover", "trials": trials, "exponents": list(ps), "worst_margin": worst}


def run_extreme_suite(trials, seed, ps=(1.0, 1.5, 2.0)):
    """Averaging witnesses: unit norms, exact midpoint, genuinely distinct."""
    worst_norm_dev = 0.0
    worst_avg_dev = 0.0
    worst_sep = math.inf
    count = 0
    for t in range(trials):
        rng = np.random.default_rng((seed, t))
        p = ps[t % len(ps)]
        n = int(rng.integers(2, 7))
        mat = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        mat /= lqp_norm(mat, 1.0, p)
        got = extreme_point_witness(mat, p)
        if got == "extreme":
            continue
        first, second = got
        count += 1
        worst_norm_dev = max(
            worst_norm_dev,
            abs(lqp_norm(first, 1.0, p) - 1.0),
            abs(lqp_norm(second, 1.0, p) - 1.0),
        )
        worst_avg_dev = max(worst_avg_dev, float(np.abs((first + second) / 2.0 - mat).max()))
        nz = [vector_lp(mat[:, j], p) for j in range(n)]
        nz = [x for x in nz if x > 1e-12]
        eps = 0.5 * min(nz[0], nz[1])
        worst_sep = min(worst_sep, lqp_norm(first - second, 1.0, p) / eps)
    return {
        "suite": "extreme-points",
        "trials": trials,
        "witness_pairs": count,
        "worst_unit_norm_deviation": worst_norm_dev,
        "worst_average_deviation": worst_avg_dev,
        "worst_separation_over_eps": worst_sep,
    }


def solver_oracle_agreement(states, norm_specs, cfg=None, resolutions=None):
    """Compare the simplex solver against the grid oracle on small states.

    Returns one row per (state, norm) with the margin and its allowed bound
    (grid error + solver tolerance).
    """
    cfg = cfg or SolverConfig()
    resolutions = resolutions or {1: 10, 2: 1000, 3: 300, 4: 120}
    rows = []
    for label, state in states:
        mat = _as_array(state, square=True)
        n = mat.shape[0]
        res = resolutions[n]
        for spec in norm_specs:
            solver_value = c_nu_min_diag(mat, spec, cfg).value
            oracle_value = brute_force_min_diag(mat, spec, res)
            bound = grid_error_bound(spec, n, res) + cfg.tolerance
            rows.append(
                {
                    "state": label,
                    "norm": str(spec),
                    "solver": solver_value,
                    "oracle": oracle_value,
                    "difference": abs(solver_value - oracle_value),
                    "bound": bound,
                    "pass": abs(solver_value - oracle_value) <= bound,
                }
            )
    return rows


def symmetric_solver_agreement(block_states, norm_specs, cfg=None, atol=1e-6):
    """c_nu_symmetric vs c_nu_min_diag on circulant-symmetric block states."""
    from .matrices import direct_sum

    cfg = cfg or SolverConfig()
    rows = []
    for label, blocks in block_states:
        full = direct_sum(list(blocks)).mat
        for spec in norm_specs:
            sym = c_nu_symmetric(blocks, spec, cfg).value
            general = c_nu_min_diag(full, spec, cfg).value
            rows.append(
                {
                    "state": label,
                    "norm": str(spec),
                    "symmetric": sym,
                    "general": general,
                    "difference": abs(sym - general),
                    "pass": abs(sym - general) <= atol,
                }
            )
    return rows
