"""Coherence measures induced by norms.

Three evaluation routes:

* closed form for absolute norms: C(rho) = nu(rho - rho_diag), no optimization;
* general nearest-diagonal-state minimization over the probability simplex
  (convex objective: a norm of an affine map). Projected subgradient descent
  with diminishing steps localizes the minimum from several deterministic
  seeds plus random restarts; line-search polish stages (pair transfers,
  projected steepest descent, gradient sampling with analytic eigengradients)
  then drive the value to solver tolerance, since subgradient steps alone
  converge too slowly on kinked objectives such as the trace norm. Inputs are
  canonically relabeled first so values cannot depend on the basis ordering;
* the modified trace-norm measure min over entrywise-nonnegative diagonals D
  of ||rho - D||_1, minimized over a box (the scale factor of the diagonal
  state is absorbed into D).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import jsonio
from .matrices import ArgumentError, DiagonalState, StructureError, _as_array, diag_part, hermiticity_residual
from .norms import NormSpec, diag_gradient, lqp_norm, norm_batch

PROBE_STEP = 1e-9
FD_STEP = 1e-6


class SolverError(RuntimeError):
    """Minimization could not produce a finite certified value."""

    def __init__(self, message, best_value=None):
        super().__init__(message)
        self.best_value = best_value


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-8
    max_iterations: int = 10000
    restarts: int = 8
    grid_resolution: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ArgumentError("tolerance must be positive")
        if self.max_iterations < 1 or self.restarts < 1 or self.grid_resolution < 1:
            raise ArgumentError("max_iterations, restarts and grid_resolution must be positive")


@dataclass(frozen=True)
class SolverTrace:
    iterations: int
    final_step: float
    best_seed: int
    evaluations: int


@dataclass(frozen=True)
class MinimizationResult:
    value: float
    minimizer: object
    certificate: SolverTrace

    def minimizer_diagonal(self):
        m = self.minimizer
        return m.diag if isinstance(m, DiagonalState) else np.asarray(m)


def c_qp(rho, q, p):
    """Closed-form l_{q,p} coherence: the norm of rho with its diagonal removed."""
    mat = _as_array(rho, square=True)
    return lqp_norm(mat - diag_part(mat), q, p)


# --- simplex machinery -------------------------------------------------------


def project_simplex(y):
    """Euclidean projection onto {x >= 0, sum x = 1} (sort-based)."""
    n = y.size
    a = np.sort(y)[::-1]
    cums = (np.cumsum(a) - 1.0) / np.arange(1, n + 1)
    k = np.flatnonzero(a > cums)[-1]
    return np.maximum(y - cums[k], 0.0)


def simplex_lattice(n, k):
    """Integer compositions of k into n parts, shape (C(k+n-1, n-1), n)."""
    memo = {}

    def build(parts, total):
        if parts == 1:
            return np.array([[total]], dtype=np.int64)
        key = (parts, total)
        got = memo.get(key)
        if got is None:
            blocks = []
            for first in range(total, -1, -1):
                rest = build(parts - 1, total - first)
                blocks.append(np.hstack([np.full((rest.shape[0], 1), first, dtype=np.int64), rest]))
            got = np.vstack(blocks)
            memo[key] = got
        return got

    return build(n, k)


def _coarse_grid(n, budget):
    if n == 1:
        return np.ones((1, 1))
    k = 1
    while math.comb((k + 1) + n - 1, n - 1) <= budget:
        k += 1
    return simplex_lattice(n, k).astype(np.float64) / k


def _golden_min(f, lo, hi, tol=1e-12):
    """Minimum of a convex function on [lo, hi]; returns (t, f(t), evals)."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    fa, fb = f(a), f(b)
    evals = 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    evals += 2
    while (b - a) > tol and evals < 200:
        if fc <= fd:
            b, fb = d, fd
            d, fd = c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, fa = c, fc
            c, fc = d, fd
            d = a + invphi * (b - a)
            fd = f(d)
        evals += 1
    candidates = [(fa, a), (fc, c), (fd, d), (fb, b)]
    fbest, tbest = min(candidates, key=lambda it: it[0])
    return tbest, fbest, evals


class _Counter:
    __slots__ = ("n",)

    def __init__(self):
        self.n = 0


def _probe_finds_dip(phi, fx, span):
    """Cheap convexity test for a dip along [0, span].

    Two probe lengths: the convex chord bound guarantees a dip of depth eta at
    t* shows a gain of at least eta * probe/t* at any probe <= t*, so a short
    and a mid-range probe together see every dip worth the solver tolerance.
    """
    for t in (PROBE_STEP, 1e-3):
        if t >= span:
            break
        if phi(t) < fx - 1e-15:
            return True
    return phi(span) < fx - 1e-15


def _subgradient_simplex(fun, fun_batch, x0, budget, counter, step_scale=0.25, window_gain=1e-9):
    """Projected subgradient descent with normalized steps of length a/sqrt(k).

    Subgradients come from central finite differences (the objective extends
    smoothly off the simplex, so coordinate probes need no projection). Stops
    early once a 200-iteration window stops paying; the line-search polish
    owns the last digits.
    """
    n = x0.size
    x = x0.copy()
    fx = fun(x)
    counter.n += 1
    xbest, fbest = x.copy(), fx
    eye = np.eye(n) * FD_STEP
    stall = 0
    k = 0
    last_step = 0.0
    window_best = fbest
    while k < budget:
        k += 1
        pts = np.concatenate([x[None, :] + eye, x[None, :] - eye], axis=0)
        vals = fun_batch(pts)
        counter.n += 2 * n
        g = (vals[:n] - vals[n:]) / (2.0 * FD_STEP)
        gnorm = float(np.linalg.norm(g))
        if gnorm < 1e-13:
            break
        last_step = step_scale / math.sqrt(k)
        x = project_simplex(x - last_step * (g / gnorm))
        fx = fun(x)
        counter.n += 1
        if fx < fbest - 1e-15:
            fbest, xbest = fx, x.copy()
            stall = 0
        else:
            stall += 1
            if stall >= 120:
                break
        if k % 200 == 0:
            if window_best - fbest < window_gain:
                break
            window_best = fbest
    return xbest, fbest, k, last_step


def _polish_simplex(fun, x, fx, tol, counter):
    """Deterministic descent over pair-transfer and vertexward directions.

    Each candidate direction gets a tiny convexity probe; only directions that
    strictly improve earn a golden-section line search. Terminates when no
    direction improves, which for a convex objective certifies first-order
    stationarity over the probed direction set.
    """
    n = x.size
    x = x.copy()
    min_gain = max(tol * 1e-3, 1e-14)
    for _ in range(200):
        improved = False
        for i in range(n):
            if x[i] <= 1e-15:
                continue
            for j in range(n):
                if j == i:
                    continue
                span = x[i]
                direction = np.zeros(n)
                direction[i] = -1.0
                direction[j] = 1.0

                def phi(t, d=direction):
                    counter.n += 1
                    return fun(x + t * d)

                if not _probe_finds_dip(phi, fx, span):
                    continue
                t, ft, _ = _golden_min(phi, 0.0, span)
                if ft < fx - min_gain:
                    x = x + t * direction
                    np.maximum(x, 0.0, out=x)
                    fx = ft
                    improved = True
        for j in range(n):
            towards = np.zeros(n)
            towards[j] = 1.0
            direction = towards - x
            if np.abs(direction).max() < 1e-15:
                continue

            def phi(t, d=direction):
                counter.n += 1
                return fun(x + t * d)

            if not _probe_finds_dip(phi, fx, 1.0):
                continue
            t, ft, _ = _golden_min(phi, 0.0, 1.0)
            if ft < fx - min_gain:
                x = np.maximum(x + t * direction, 0.0)
                fx = ft
                improved = True
        if not improved:
            break
    total = x.sum()
    if abs(total - 1.0) > 1e-9:
        x = x / total
    return x, fun(x)


def _steepest_polish_simplex(fun, grad, x, fx, counter, rounds=80):
    """Exact line searches along the projected steepest-descent direction.

    Complements the pairwise polish: coordinate moves zigzag along narrow
    valleys of smooth objectives, while a full-gradient direction cuts
    straight down them. Directions are projected onto the simplex tangent
    cone (sum zero, nonnegative on vanished coordinates).
    """
    x = x.copy()
    for _ in range(rounds):
        counter.n += 1
        d = _tangent_direction(x, -grad(x))
        if float(np.linalg.norm(d)) < 1e-10:
            break
        x2, f2 = _line_search_simplex(fun, x, fx, d, counter)
        if f2 >= fx - 1e-15:
            break
        x, fx = x2, f2
    return x, fx


def _tangent_direction(x, d):
    """Project d onto the simplex tangent cone at x (sum zero, inward on the boundary)."""
    n = x.size
    d = d.copy()
    blocked = np.zeros(n, dtype=bool)
    for _ in range(n):
        d[blocked] = 0.0
        free = ~blocked
        if not free.any():
            break
        d[free] -= d[free].mean()
        newly = (x <= 1e-15) & (d < 0.0) & free
        if not newly.any():
            break
        blocked |= newly
    return d


def _min_norm_point(gradients, iters=300):
    """Frank-Wolfe for the minimum-norm point of conv{gradients}; exact steps."""
    combo = gradients.mean(axis=0)
    for _ in range(iters):
        j = int(np.argmin(gradients @ combo))
        step_vec = gradients[j] - combo
        denom = float(step_vec @ step_vec)
        if denom < 1e-30:
            break
        t = -float(combo @ step_vec) / denom
        if t <= 0.0:
            break
        combo = combo + min(t, 1.0) * step_vec
    return combo


def _line_search_simplex(fun, x, fx, d, counter):
    dnorm = float(np.linalg.norm(d))
    if dnorm < 1e-10:
        # numerically stationary: normalizing roundoff would manufacture a
        # direction with a spurious nonzero sum and walk off the simplex
        return x, fx
    d = _tangent_direction(x, d / dnorm)
    dnorm = float(np.linalg.norm(d))
    if dnorm < 1e-3:
        return x, fx
    d = d / dnorm
    falling = d < 0.0
    span = float(np.min(x[falling] / -d[falling])) if falling.any() else 1.0
    if span <= 1e-14:
        return x, fx

    def phi(t):
        counter.n += 1
        return fun(np.maximum(x + t * d, 0.0))

    t, ft, _ = _golden_min(phi, 0.0, span, tol=1e-14)
    if ft < fx - 1e-16:
        return np.maximum(x + t * d, 0.0), ft
    return x, fx


def _gradient_sampling_polish(fun, grad, x, fx, counter, rng, iters=300):
    """Nonsmooth finisher: descent along the min-norm point of sampled gradients.

    Eigenvalue-kink objectives form valleys too narrow for coordinate or
    single-gradient steps; the convex hull of exact gradients sampled in a
    shrinking ball recovers a usable descent direction (gradient sampling in
    the Burke-Lewis-Overton sense).
    """
    n = x.size
    x = x.copy()
    radius = 1e-3
    samples = 2 * n + 4
    for _ in range(iters):
        pts = [x] + [np.maximum(x + radius * _tangent_direction(x, rng.standard_normal(n)), 0.0) for _ in range(samples)]
        counter.n += len(pts)
        grads = [_tangent_direction(x, grad(q)) for q in pts]
        combo = _min_norm_point(np.stack(grads))
        if float(np.linalg.norm(combo)) < 1e-12:
            radius *= 0.3
            if radius < 1e-12:
                break
            continue
        x2, f2 = _line_search_simplex(fun, x, fx, _tangent_direction(x, -combo), counter)
        if f2 < fx - 1e-17:
            x, fx = x2, f2
        else:
            radius *= 0.3
            if radius < 1e-12:
                break
    return x, fx


def _minimize_simplex(fun, fun_batch, grad, n, cfg, canonical_seeds):
    rng = np.random.default_rng(cfg.seed)
    seeds = [np.asarray(s, dtype=np.float64) for s in canonical_seeds]
    grid = _coarse_grid(n, max(cfg.grid_resolution, n + 1))
    grid_vals = fun_batch(grid)
    counter = _Counter()
    counter.n += len(grid)
    seeds.append(grid[int(np.argmin(grid_vals))].copy())
    for _ in range(cfg.restarts):
        seeds.append(rng.dirichlet(np.ones(n)))

    best_val = math.inf
    best_x = None
    best_seed = -1
    iterations = 0
    final_step = 0.0
    n_canonical = len(canonical_seeds) + 1
    for idx, x0 in enumerate(seeds):
        budget = cfg.max_iterations if idx < n_canonical else max(cfg.max_iterations // 10, 200)
        x, v, used, step = _subgradient_simplex(fun, fun_batch, x0, budget, counter)
        iterations += used
        if v < best_val - 0.0:
            best_val, best_x, best_seed, final_step = v, x, idx, step
    if best_x is None or not math.isfinite(best_val):
        raise SolverError("no finite objective value found", best_value=best_val)
    # alternate polish modes: pair transfers snap onto faces and vertices,
    # steepest descent finishes smooth valleys, gradient sampling follows
    # the narrow valleys that eigenvalue kinks carve
    polish_rng = np.random.default_rng((cfg.seed, 0xC0FFEE))
    x, v = best_x, best_val
    for _ in range(4):
        before = v
        x1, v1 = _polish_simplex(fun, x, v, cfg.tolerance, counter)
        if v1 < v:
            x, v = x1, v1
        x2, v2 = _steepest_polish_simplex(fun, grad, x, v, counter)
        if v2 < v:
            x, v = x2, v2
        x3, v3 = _gradient_sampling_polish(fun, grad, x, v, counter, polish_rng)
        if v3 < v:
            x, v = x3, v3
        if before - v < 1e-14:
            break
    if v < best_val:
        best_x, best_val = x, v
    best_x = np.maximum(best_x, 0.0)
    best_x /= best_x.sum()
    value = fun(best_x)
    counter.n += 1
    if not math.isfinite(value):
        raise SolverError("objective is not finite at the minimizer", best_value=best_val)
    trace = SolverTrace(iterations=iterations, final_step=final_step, best_seed=best_seed, evaluations=counter.n)
    return best_x, value, trace


# --- nearest diagonal state ---------------------------------------------------


def _diag_objective(rho_mat, spec):
    n = rho_mat.shape[0]
    idx = np.arange(n)

    def fun(d):
        m = rho_mat.copy()
        m[idx, idx] -= d
        return float(norm_batch(m[None, :, :], spec)[0])

    def fun_batch(ds):
        ds = np.asarray(ds, dtype=np.float64)
        stack = np.broadcast_to(rho_mat, (ds.shape[0],) + rho_mat.shape).copy()
        stack[:, idx, idx] -= ds
        return norm_batch(stack, spec)

    def grad(d):
        m = rho_mat.copy()
        m[idx, idx] -= d
        return -diag_gradient(m, spec)

    return fun, fun_batch, grad


def _canonical_permutation(mat):
    """Index order from permutation-equivariant keys (diagonal, sorted row moduli).

    Relabeled copies of a state then map to the same canonical matrix bit for
    bit, so the solver path (and hence the reported value) cannot depend on
    the input labeling. Exactly tied keys keep their input order; exact ties
    only occur for highly symmetric states where all labelings already solve
    identically.
    """
    keys = np.concatenate([np.real(np.diagonal(mat))[:, None], np.sort(np.abs(mat), axis=1)], axis=1)
    return np.lexsort(keys.T[::-1])


def c_nu_min_diag(rho, norm, cfg=None):
    """Minimize nu(rho - sigma) over diagonal states sigma."""
    cfg = cfg or SolverConfig()
    mat = _as_array(rho, square=True)
    n = mat.shape[0]
    perm = _canonical_permutation(mat)
    canon = mat[np.ix_(perm, perm)]
    fun, fun_batch, grad = _diag_objective(canon, norm)
    rho_diag = np.maximum(np.real(np.diagonal(canon)), 0.0)
    rho_diag = rho_diag / rho_diag.sum() if rho_diag.sum() > 0 else np.full(n, 1.0 / n)
    seeds = [rho_diag, np.full(n, 1.0 / n)]
    x, value, trace = _minimize_simplex(fun, fun_batch, grad, n, cfg, seeds)
    out = np.empty(n)
    out[perm] = x
    return MinimizationResult(value=value, minimizer=DiagonalState(out), certificate=trace)


def nearest_diag_minimizer(rho, norm, cfg=None):
    """The diagonal state achieving the nearest-diagonal minimum."""
    return c_nu_min_diag(rho, norm, cfg).minimizer


# --- circulant-symmetric reduction --------------------------------------------


def basic_circulant(dim):
    """Cyclic shift permutation matrix R with ones at (1,2), (2,3), ..., (dim,1)."""
    r = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(dim):
        r[i, (i + 1) % dim] = 1.0
    return r


def is_circulant_invariant(block, atol=1e-10):
    """Whether R† B R = B for the basic circulant of the block's dimension."""
    b = _as_array(block, square=True)
    r = basic_circulant(b.shape[0])
    return float(np.abs(r.conj().T @ b @ r - b).max()) <= atol


def c_nu_symmetric(blocks, norm, cfg=None):
    """Symmetry-reduced minimization for block states fixed by the block circulant.

    Each block must commute with its basic circulant (so its optimal diagonal
    compensation is a multiple of the identity); equal blocks are tied to a
    shared parameter. Minimizes over the remaining per-group scalars only.
    """
    cfg = cfg or SolverConfig()
    mats = []
    for b in blocks:
        m = _as_array(b, square=True)
        if hermiticity_residual(m) > 1e-12:
            raise StructureError("block is not Hermitian")
        mats.append((m + m.conj().T) / 2.0)
    if not mats:
        raise ArgumentError("c_nu_symmetric needs at least one block")
    traces = [float(np.trace(m).real) for m in mats]
    if abs(sum(traces) - 1.0) > 1e-10:
        raise StructureError(f"block traces sum to {sum(traces)!r}, not 1")
    for m in mats:
        if not is_circulant_invariant(m):
            raise StructureError("block is not invariant under its basic circulant")

    dims = [m.shape[0] for m in mats]
    full = np.zeros((sum(dims), sum(dims)), dtype=np.complex128)
    at = 0
    slots = []
    for m, d in zip(mats, dims):
        full[at:at + d, at:at + d] = m
        slots.append(np.arange(at, at + d))
        at += d

    groups = []
    for j, m in enumerate(mats):
        for grp in groups:
            lead = mats[grp[0]]
            if lead.shape == m.shape and np.array_equal(lead, m):
                grp.append(j)
                break
        else:
            groups.append([j])
    group_slots = [np.concatenate([slots[j] for j in grp]) for grp in groups]
    sizes = np.array([s.size for s in group_slots], dtype=np.float64)
    n_groups = len(groups)

    def expand(w):
        d = np.empty(full.shape[0])
        for g, s in enumerate(group_slots):
            d[s] = w[g] / sizes[g]
        return d

    base_fun, base_batch, base_grad = _diag_objective(full, norm)
    scatter = _scatter(group_slots, full.shape[0])

    def fun(w):
        return base_fun(expand(w))

    def fun_batch(ws):
        ws = np.asarray(ws, dtype=np.float64)
        return base_batch(ws / sizes[None, :] @ scatter)

    def grad(w):
        return (scatter @ base_grad(expand(w))) / sizes

    seeds = [np.array([sum(traces[j] for j in grp) for grp in groups]), np.full(n_groups, 1.0 / n_groups)]
    w, value, trace = _minimize_simplex(fun, fun_batch, grad, n_groups, cfg, seeds)
    return MinimizationResult(value=value, minimizer=DiagonalState(expand(w)), certificate=trace)


def _scatter(group_slots, n):
    m = np.zeros((len(group_slots), n))
    for g, s in enumerate(group_slots):
        m[g, s] = 1.0
    return m


# --- modified trace-norm measure -----------------------------------------------


def _subgradient_box(fun, fun_batch, x0, lo, hi, budget, counter, step_scale=None, window_gain=1e-9):
    n = x0.size
    scale = step_scale if step_scale is not None else 0.25 * (hi - lo)
    x = x0.copy()
    fx = fun(x)
    counter.n += 1
    xbest, fbest = x.copy(), fx
    eye = np.eye(n) * FD_STEP
    stall = 0
    k = 0
    window_best = fbest
    while k < budget:
        k += 1
        pts = np.concatenate([x[None, :] + eye, x[None, :] - eye], axis=0)
        vals = fun_batch(pts)
        counter.n += 2 * n
        g = (vals[:n] - vals[n:]) / (2.0 * FD_STEP)
        gnorm = float(np.linalg.norm(g))
        if gnorm < 1e-13:
            break
        x = np.clip(x - (scale / math.sqrt(k)) * (g / gnorm), lo, hi)
        fx = fun(x)
        counter.n += 1
        if fx < fbest - 1e-15:
            fbest, xbest = fx, x.copy()
            stall = 0
        else:
            stall += 1
            if stall >= 120:
                break
        if k % 200 == 0:
            if window_best - fbest < window_gain:
                break
            window_best = fbest
    return xbest, fbest, k


def _polish_box(fun, x, fx, lo, hi, tol, counter):
    n = x.size
    x = x.copy()
    min_gain = max(tol * 1e-3, 1e-14)
    directions = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        directions.append(e)
        directions.append(-e)
    for i in range(n):
        for j in range(i + 1, n):
            for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                d = np.zeros(n)
                d[i], d[j] = si, sj
                directions.append(d)
    for _ in range(200):
        improved = False
        for d in directions:
            pos = d > 0
            neg = d < 0
            spans = []
            if pos.any():
                spans.append(np.min((hi - x[pos]) / d[pos]))
            if neg.any():
                spans.append(np.min((lo - x[neg]) / d[neg]))
            span = min(spans)
            if span <= PROBE_STEP:
                continue

            def phi(t, dd=d):
                counter.n += 1
                return fun(np.clip(x + t * dd, lo, hi))

            if not _probe_finds_dip(phi, fx, span):
                continue
            t, ft, _ = _golden_min(phi, 0.0, span)
            if ft < fx - min_gain:
                x = np.clip(x + t * d, lo, hi)
                fx = ft
                improved = True
        if not improved:
            break
    return x, fun(x)


def yu_modified_measure(rho, cfg=None):
    """min over entrywise-nonnegative diagonal D of ||rho - D||_1.

    Equivalent to min over t >= 0 and diagonal states sigma of ||rho - t sigma||_1
    (t is absorbed into D). The minimizer lies in [0, 2 max_i rho_ii + 1]^n:
    once ||D||_1 outgrows ||rho||_1 the objective ||rho - D||_1 >= ||D||_1 - ||rho||_1
    only increases, so the box is not binding.
    """
    cfg = cfg or SolverConfig()
    full = _as_array(rho, square=True)
    n = full.shape[0]
    perm = _canonical_permutation(full)
    mat = full[np.ix_(perm, perm)]
    spec = NormSpec.trace_norm()
    fun, fun_batch, _ = _diag_objective(mat, spec)
    hi = 2.0 * float(np.max(np.real(np.diagonal(mat)))) + 1.0
    hi = max(hi, 1e-6)
    rho_diag = np.clip(np.real(np.diagonal(mat)), 0.0, hi)
    rng = np.random.default_rng(cfg.seed)
    seeds = [rho_diag, np.zeros(n), np.full(n, hi / 2.0)]
    seeds += [np.full(n, t) for t in np.linspace(0.0, hi, 9)[1:-1]]
    seeds += [rng.uniform(0.0, hi, size=n) for _ in range(cfg.restarts)]
    counter = _Counter()
    best_val, best_x, best_seed = math.inf, None, -1
    iterations = 0
    for idx, x0 in enumerate(seeds):
        budget = cfg.max_iterations if idx < 3 else max(cfg.max_iterations // 20, 100)
        x, v, used = _subgradient_box(fun, fun_batch, x0, 0.0, hi, budget, counter)
        iterations += used
        if v < best_val:
            best_val, best_x, best_seed = v, x, idx
    x, v = _polish_box(fun, best_x, best_val, 0.0, hi, cfg.tolerance, counter)
    if v > best_val:
        x, v = best_x, best_val
    value = fun(x)
    if not math.isfinite(value):
        raise SolverError("objective is not finite at the minimizer", best_value=best_val)
    out = np.empty(n)
    out[perm] = np.maximum(x, 0.0)
    out.setflags(write=False)
    trace = SolverTrace(iterations=iterations, final_step=0.0, best_seed=best_seed, evaluations=counter.n)
    return MinimizationResult(value=value, minimizer=out, certificate=trace)


# --- measure specification -----------------------------------------------------


METHODS = ("closed_form", "min_diag", "yu")


@dataclass(eq=False)
class MeasureSpec:
    """A coherence measure: a norm plus an evaluation method."""

    norm: NormSpec
    method: str = "min_diag"
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ArgumentError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.method == "closed_form" and not self.norm.is_absolute:
            raise ArgumentError("closed_form evaluation requires an absolute norm")
        if self.method == "yu" and not (self.norm.tag == "schatten" and self.norm.p == 1.0):
            raise ArgumentError("the modified measure is defined for the trace norm")
        self._cache = {}

    @property
    def label(self):
        if self.method == "yu":
            return "yu-modified-trace"
        return str(self.norm)

    def value(self, rho):
        mat = _as_array(rho, square=True)
        key = (mat.shape[0], mat.tobytes())
        got = self._cache.get(key)
        if got is None:
            got = self._evaluate(mat)
            if len(self._cache) < 8192:
                self._cache[key] = got
        return got

    def _evaluate(self, mat):
        if self.method == "closed_form":
            return c_qp(mat, self.norm.q, self.norm.p)
        if self.method == "min_diag":
            return c_nu_min_diag(mat, self.norm, self.solver).value
        return yu_modified_measure(mat, self.solver).value

    def minimize(self, rho):
        mat = _as_array(rho, square=True)
        if self.method == "closed_form":
            d = np.maximum(np.real(np.diagonal(mat)), 0.0)
            d /= d.sum()
            trace = SolverTrace(iterations=0, final_step=0.0, best_seed=0, evaluations=1)
            return MinimizationResult(value=self._evaluate(mat), minimizer=DiagonalState(d), certificate=trace)
        if self.method == "min_diag":
            return c_nu_min_diag(mat, self.norm, self.solver)
        return yu_modified_measure(mat, self.solver)

    def to_dict(self):
        d = self.norm.to_dict()
        d["method"] = self.method
        return d

    @staticmethod
    def from_dict(d, solver=None):
        d = dict(d)
        method = d.pop("method", None)
        norm = NormSpec.from_dict(d)
        if method is None:
            method = "closed_form" if norm.is_absolute else "min_diag"
        return MeasureSpec(norm, method, solver or SolverConfig())

    def cache_key(self):
        return jsonio.dumps(self.to_dict())
