"""Norm evaluation for every family the coherence measures draw on.

* l_p on vectors, with p = inf as an explicit max branch;
* l_{q,p} on matrices: the l_q norm of the vector of column l_p norms;
* Schatten-p on Hermitian matrices, computed from eigenvalues (all coherence
  differences are Hermitian, so no SVD is needed);
* gauge-represented unitary-similarity-invariant norms: a set of generator
  vectors per dimension, implicitly closed under sign flip and entry
  permutation; evaluation pairs sorted generators with sorted eigenvalues
  (the rearrangement maximum over the permutation closure). Ky Fan-k and the
  Hermitian numerical radius are shipped as instances.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, jsonio
from .matrices import ArgumentError, HERMITICITY_ATOL, StructureError, _as_array, hermiticity_residual

INF = math.inf


class NormConfigError(ValueError):
    """The norm specification cannot evaluate this input (e.g. missing generators)."""


def check_exponent(p):
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ArgumentError(f"exponent must lie in [1, inf], got {p!r}")
    return p


def _exponent_to_json(p):
    return "inf" if math.isinf(p) else float(p)


def _exponent_from_json(x):
    if isinstance(x, str):
        if x.lower() in ("inf", "infinity"):
            return INF
        raise ArgumentError(f"bad exponent string {x!r}")
    return check_exponent(x)


@dataclass(frozen=True, eq=False)
class NormSpec:
    """Tagged description of a norm: 'lqp', 'schatten' or 'gauge_usi'."""

    tag: str
    q: float | None = None
    p: float | None = None
    generators: dict | None = field(default=None, repr=False)
    label: str | None = None

    @staticmethod
    def lqp(q, p):
        q, p = check_exponent(q), check_exponent(p)
        return NormSpec("lqp", q=q, p=p, label=f"l_({_fmt(q)},{_fmt(p)})")

    @staticmethod
    def schatten(p):
        p = check_exponent(p)
        return NormSpec("schatten", p=p, label=f"schatten-{_fmt(p)}")

    @staticmethod
    def trace_norm():
        return NormSpec("schatten", p=1.0, label="trace-norm")

    @staticmethod
    def gauge_usi(generators, label=None):
        gens = {}
        for dim, vecs in generators.items():
            dim = int(dim)
            arr = np.array(vecs, dtype=np.float64)
            if arr.ndim == 1:
                arr = arr[None, :]
            if arr.ndim != 2 or arr.shape[1] != dim or arr.shape[0] == 0:
                raise ArgumentError(f"generators for dim {dim} must be nonempty vectors of length {dim}")
            arr.setflags(write=False)
            gens[dim] = arr
        if not gens:
            raise ArgumentError("gauge_usi needs at least one dimension of generators")
        return NormSpec("gauge_usi", generators=gens, label=label or "gauge-usi")

    @staticmethod
    def ky_fan(k, dims):
        """Sum of the k largest |eigenvalues|.

        Generators carry k nonzero entries split between +1 and -1 (one
        pattern per split, up to the global sign flip); pairing the sorted
        patterns with sorted eigenvalues picks out the k largest moduli. A
        single all-ones pattern would only see |sum of k eigenvalues| and
        degenerates on trace-zero inputs.
        """
        gens = {}
        for n in dims:
            if k > n:
                raise ArgumentError(f"ky fan order {k} exceeds dimension {n}")
            rows = []
            for ones in range((k + 1) // 2, k + 1):
                g = np.zeros(n)
                g[:ones] = 1.0
                g[ones:k] = -1.0
                rows.append(g)
            gens[n] = rows
        return NormSpec.gauge_usi(gens, label=f"ky-fan-{k}")

    @staticmethod
    def numerical_radius(dims):
        """Hermitian numerical radius max|eigenvalue|: generator set {±(1,0,..,0)P}."""
        gens = {n: [np.eye(1, n, 0)[0]] for n in dims}
        return NormSpec.gauge_usi(gens, label="numerical-radius")

    @staticmethod
    def sign_patterns(dims):
        """All ±1 patterns of (1,..,1); agrees with the trace norm on Hermitian inputs."""
        gens = {}
        for n in dims:
            rows = []
            for ones in range((n + 1) // 2, n + 1):
                g = np.ones(n)
                g[ones:] = -1.0
                rows.append(g)
            gens[n] = rows
        return NormSpec.gauge_usi(gens, label="sign-gauge")

    @property
    def is_absolute(self):
        return self.tag == "lqp"

    @property
    def is_usi(self):
        return self.tag in ("schatten", "gauge_usi")

    def generators_for(self, n):
        if self.generators is None or n not in self.generators:
            have = sorted(self.generators) if self.generators else []
            raise NormConfigError(f"no gauge generators for dimension {n} (have {have})")
        return self.generators[n]

    def to_dict(self):
        if self.tag == "lqp":
            d = {"tag": "lqp", "q": _exponent_to_json(self.q), "p": _exponent_to_json(self.p)}
        elif self.tag == "schatten":
            d = {"tag": "schatten", "p": _exponent_to_json(self.p)}
        else:
            d = {
                "tag": "gauge_usi",
                "generators": {str(n): [[float(x) for x in g] for g in gs] for n, gs in sorted(self.generators.items())},
            }
        if self.label:
            d["label"] = self.label
        return d

    @staticmethod
    def from_dict(d):
        tag = d.get("tag")
        label = d.get("label")
        if tag == "lqp":
            spec = NormSpec.lqp(_exponent_from_json(d["q"]), _exponent_from_json(d["p"]))
        elif tag == "schatten":
            spec = NormSpec.schatten(_exponent_from_json(d["p"]))
        elif tag == "gauge_usi":
            spec = NormSpec.gauge_usi(d["generators"], label=label)
            return spec
        else:
            raise ArgumentError(f"unknown norm tag {tag!r}")
        return NormSpec(spec.tag, q=spec.q, p=spec.p, label=label or spec.label)

    def cache_key(self):
        return jsonio.dumps(self.to_dict())

    def __str__(self):
        return self.label or self.tag


def _fmt(p):
    if math.isinf(p):
        return "inf"
    return f"{p:g}"


def vector_lp(v, p):
    """l_p norm of a complex vector; p = inf gives the max modulus."""
    p = check_exponent(p)
    v = np.asarray(v)
    if v.size == 0:
        return 0.0
    mod = np.abs(v)
    if math.isinf(p):
        return float(mod.max())
    if p == 1.0:
        return float(mod.sum())
    return float((mod ** p).sum() ** (1.0 / p))


def lqp_norm(a, q, p):
    """l_q norm of the vector of column l_p norms."""
    q, p = check_exponent(q), check_exponent(p)
    mat = np.abs(_as_array(a))
    if math.isinf(p):
        cols = mat.max(axis=0)
    elif p == 1.0:
        cols = mat.sum(axis=0)
    else:
        cols = (mat ** p).sum(axis=0) ** (1.0 / p)
    return vector_lp(cols, q)


def _hermitian_or_raise(a, what):
    mat = _as_array(a, square=True)
    resid = hermiticity_residual(mat)
    if resid > HERMITICITY_ATOL:
        raise StructureError(f"{what} expects a Hermitian matrix (residual {resid:.3e})")
    return (mat + mat.conj().T) / 2.0


def schatten_norm(a, p):
    """Schatten p-norm of a Hermitian matrix: l_p of the eigenvalue moduli."""
    p = check_exponent(p)
    mat = _hermitian_or_raise(a, "schatten_norm")
    w = _kernels.eigvals_descending(mat)
    return vector_lp(w, p)


def gauge_usi_norm(a, spec):
    """Evaluate a gauge-represented USI norm on a Hermitian matrix."""
    if spec.tag != "gauge_usi":
        raise ArgumentError(f"expected a gauge_usi spec, got tag {spec.tag!r}")
    mat = _hermitian_or_raise(a, "gauge_usi_norm")
    w = _kernels.eigvals_descending(mat)
    return float((_gauge_rows(spec, mat.shape[0]) @ w).max())


def _gauge_rows(spec, n):
    """Sorted ± generator rows for dimension n, ready to pair with descending eigenvalues."""
    gens = spec.generators_for(n)
    rows = np.concatenate([np.sort(gens, axis=1)[:, ::-1], np.sort(-gens, axis=1)[:, ::-1]], axis=0)
    return rows


def norm_value(a, spec):
    """Evaluate any NormSpec on a matrix."""
    if spec.tag == "lqp":
        return lqp_norm(a, spec.q, spec.p)
    if spec.tag == "schatten":
        return schatten_norm(a, spec.p)
    if spec.tag == "gauge_usi":
        return gauge_usi_norm(a, spec)
    raise ArgumentError(f"unknown norm tag {spec.tag!r}")


def diag_gradient(x, spec):
    """A subgradient of X -> nu(X) with respect to the diagonal entries of X.

    Used by the minimization finisher: finite differences smear the eigenvalue
    kinks at their step scale, while the eigendecomposition gives the exact
    gradient wherever the norm is differentiable (generic points). At ties a
    valid subgradient selection is returned.
    """
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[0]
    if spec.tag == "lqp":
        p, q = spec.p, spec.q
        mod = np.abs(x)
        if math.isinf(p):
            cols = mod.max(axis=0)
        elif p == 1.0:
            cols = mod.sum(axis=0)
        else:
            cols = (mod ** p).sum(axis=0) ** (1.0 / p)
        total = vector_lp(cols, q)
        diag = np.real(np.diagonal(x))
        dmod = np.abs(diag)
        sgn = np.sign(diag)
        with np.errstate(divide="ignore", invalid="ignore"):
            if math.isinf(p):
                dcol = np.where(np.isclose(dmod, cols) & (cols > 0), sgn, 0.0)
            elif p == 1.0:
                dcol = sgn
            else:
                dcol = np.where(cols > 0, sgn * dmod ** (p - 1.0) / np.where(cols > 0, cols, 1.0) ** (p - 1.0), 0.0)
            if math.isinf(q):
                dnu = np.zeros(n)
                if cols.max() > 0:
                    dnu[int(np.argmax(cols))] = 1.0
            elif q == 1.0:
                dnu = np.ones(n)
            else:
                dnu = np.where(total > 0, cols ** (q - 1.0) / max(total, 1e-300) ** (q - 1.0), 0.0)
        return dcol * dnu
    w, v = _kernels.eigh_descending((x + x.conj().T) / 2.0)
    if spec.tag == "schatten":
        p = spec.p
        mod = np.abs(w)
        if math.isinf(p):
            phi = np.zeros(n)
            phi[int(np.argmax(mod))] = np.sign(w[int(np.argmax(mod))])
        elif p == 1.0:
            phi = np.sign(w)
        else:
            total = vector_lp(w, p)
            phi = np.sign(w) * mod ** (p - 1.0) / max(total, 1e-300) ** (p - 1.0)
    elif spec.tag == "gauge_usi":
        rows = _gauge_rows(spec, n)
        phi = rows[int(np.argmax(rows @ w))]
    else:
        raise ArgumentError(f"unknown norm tag {spec.tag!r}")
    return (np.abs(v) ** 2) @ phi


def norm_batch(stack, spec):
    """Evaluate a NormSpec over a stack (m, n, n) of Hermitian matrices.

    Internal fast path for solvers and grid oracles; inputs are assumed
    already Hermitian (no per-matrix validation).
    """
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.ndim != 3:
        raise ArgumentError(f"norm_batch expects shape (m, n, n), got {stack.shape}")
    if spec.tag == "lqp":
        mod = np.abs(stack)
        p, q = spec.p, spec.q
        if math.isinf(p):
            cols = mod.max(axis=1)
        elif p == 1.0:
            cols = mod.sum(axis=1)
        else:
            cols = (mod ** p).sum(axis=1) ** (1.0 / p)
        if math.isinf(q):
            return cols.max(axis=1)
        if q == 1.0:
            return cols.sum(axis=1)
        return (cols ** q).sum(axis=1) ** (1.0 / q)
    w = _kernels.eigvals_batch(stack)
    if spec.tag == "schatten":
        p = spec.p
        mod = np.abs(w)
        if math.isinf(p):
            return mod.max(axis=1)
        if p == 1.0:
            return mod.sum(axis=1)
        return (mod ** p).sum(axis=1) ** (1.0 / p)
    if spec.tag == "gauge_usi":
        return (w @ _gauge_rows(spec, stack.shape[1]).T).max(axis=1)
    raise ArgumentError(f"unknown norm tag {spec.tag!r}")
