"""Coherence-measure axiom checks and the counterexample catalog.

Checks the monotonicity/convexity axioms on concrete instances:

* B3: C(rho) >= sum_j p_j C(rho_j) over selective channel outcomes;
* B4: sum_j p_j C(rho_j) >= C(sum_j p_j rho_j) for mixtures;
* B2: C(rho) >= C(channel(rho)) (implied by B3 + B4);
* C3: C(p1 rho1 ⊕ p2 rho2) = p1 C(rho1) + p2 C(rho2), the block-additivity
  equality that every unitary-similarity-invariant norm must break somewhere.

`usi_catalog_c3_test` runs a fixed catalog of three direct-sum decompositions
on a USI norm normalized to C(J_2/2) = 1 and reports which break additivity;
`falsify` adds randomized B3/B4 searches on seeded instances.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channels import necessity_family, random_incoherent_kraus, selective_outcomes
from .matrices import ArgumentError, DensityState, StructureError, _as_array, direct_sum, make_all_ones, matrix_to_dict, random_density
from .measures import MeasureSpec, SolverConfig
from .norms import NormSpec, check_exponent

VIOLATION_TOL = 1e-7

AXIOMS = ("B1", "B2", "B3", "B4", "C3")
SWEEP_COSINES = (0.5, 0.2, 0.1, 0.05)


class DegenerateNormError(StructureError):
    """The norm vanishes on trace-zero 2x2 matrices; normalization impossible."""


@dataclass(frozen=True)
class AxiomReport:
    axiom: str
    verdict: str
    gap: float
    witness: dict
    tolerance: float

    def to_dict(self):
        return {
            "axiom": self.axiom,
            "verdict": self.verdict,
            "gap": float(self.gap),
            "tolerance": float(self.tolerance),
            "witness": self.witness,
        }


def _report(axiom, gap, witness, tolerance):
    if axiom not in AXIOMS:
        raise ArgumentError(f"unknown axiom {axiom!r}")
    verdict = "violated" if gap > tolerance else "holds"
    return AxiomReport(axiom=axiom, verdict=verdict, gap=float(gap), witness=witness, tolerance=tolerance)


@dataclass(frozen=True)
class CatalogState:
    label: str
    state: DensityState
    blocks: tuple
    weights: tuple
    circulant_blocks: tuple


def catalog_states():
    """The concrete states used across the impossibility arguments.

    `blocks`/`weights` record the direct-sum decomposition for C3 checks;
    `circulant_blocks` is the finest partition into blocks fixed by their
    basic circulants (traces summing to one), for the symmetric solver.
    """
    j2 = make_all_ones(2).mat
    j3 = make_all_ones(3).mat
    j4 = make_all_ones(4).mat
    zero1 = np.zeros((1, 1))
    zero2 = np.zeros((2, 2))
    entries = [
        ("j2-half", j2 / 2, (j2 / 2,), (1.0,), (j2 / 2,)),
        ("j3-third", j3 / 3, (j3 / 3,), (1.0,), (j3 / 3,)),
        ("j2-half-plus-0_2", direct_sum([j2 / 2, zero2]).mat, (j2 / 2, zero2), (1.0, 0.0), (j2 / 2, zero2)),
        ("j3-third-plus-0", direct_sum([j3 / 3, zero1]).mat, (j3 / 3, zero1), (1.0, 0.0), (j3 / 3, zero1)),
        ("j2-quarter-pair", direct_sum([j2 / 4, j2 / 4]).mat, (j2 / 2, j2 / 2), (0.5, 0.5), (j2 / 4, j2 / 4)),
        (
            "j2-sixth-triple",
            direct_sum([j2 / 6, j2 / 6, j2 / 6]).mat,
            (j2 / 2, j2 / 2, j2 / 2),
            (1 / 3, 1 / 3, 1 / 3),
            (j2 / 6, j2 / 6, j2 / 6),
        ),
        (
            "j2-j3-final",
            direct_sum([j2 / 4, j3 / 6, zero1]).mat,
            (j2 / 2, direct_sum([j3 / 3, zero1]).mat),
            (0.5, 0.5),
            (j2 / 4, j3 / 6, zero1),
        ),
        ("j4-quarter", j4 / 4, (j4 / 4,), (1.0,), (j4 / 4,)),
    ]
    return [CatalogState(lbl, DensityState(m), blk, w, circ) for lbl, m, blk, w, circ in entries]


def usi_norm_catalog(dims=(2, 3, 4, 5, 6)):
    """The shipped USI norms: Schatten p in {1, 1.5, 2, 3, inf}, Ky Fan 1 and 2, numerical radius."""
    specs = [NormSpec.schatten(p) for p in (1.0, 1.5, 2.0, 3.0, math.inf)]
    specs.append(NormSpec.ky_fan(1, dims))
    specs.append(NormSpec.ky_fan(2, [d for d in dims if d >= 2]))
    specs.append(NormSpec.numerical_radius(dims))
    return specs


def check_b3(measure, rho, kraus, tolerance=VIOLATION_TOL):
    """gap = sum_j p_j C(rho_j) - C(rho); positive gap breaks monotonicity."""
    rho = _as_density(rho)
    if rho.dim != kraus.dim_in:
        raise ArgumentError(f"state dim {rho.dim} does not match channel input dim {kraus.dim_in}")
    outcomes = selective_outcomes(kraus, rho)
    ensemble = 0.0
    probs = []
    for out in outcomes:
        probs.append(out.probability)
        if out.state is not None:
            ensemble += out.probability * measure.value(out.state)
    gap = ensemble - measure.value(rho)
    witness = {
        "measure": _measure_dict(measure),
        "rho": matrix_to_dict(rho),
        "channel": kraus.to_dict(),
        "outcome_probabilities": probs,
    }
    return _report("B3", gap, witness, tolerance)


def check_b2(measure, rho, kraus, tolerance=VIOLATION_TOL):
    """Deterministic-channel monotonicity: gap = C(channel(rho)) - C(rho)."""
    from .channels import apply_channel

    rho = _as_density(rho)
    out = apply_channel(kraus, rho)
    gap = measure.value(out) - measure.value(rho)
    witness = {"measure": _measure_dict(measure), "rho": matrix_to_dict(rho), "channel": kraus.to_dict()}
    return _report("B2", gap, witness, tolerance)


def check_b4(measure, states, weights, tolerance=VIOLATION_TOL):
    """Mixture convexity: gap = C(sum p_j rho_j) - sum p_j C(rho_j)."""
    states = [_as_density(s) for s in states]
    weights = np.asarray(weights, dtype=np.float64)
    if len(states) != weights.size or not states:
        raise ArgumentError("states and weights must be matching nonempty lists")
    dims = {s.dim for s in states}
    if len(dims) != 1:
        raise ArgumentError(f"mixture states must share a dimension, got {sorted(dims)}")
    if abs(float(weights.sum()) - 1.0) > 1e-10 or weights.min() < -1e-12:
        raise ArgumentError("weights must be a probability vector")
    mixture = DensityState(sum(w * s.mat for w, s in zip(weights, states)))
    gap = measure.value(mixture) - float(sum(w * measure.value(s) for w, s in zip(weights, states)))
    witness = {
        "measure": _measure_dict(measure),
        "weights": [float(w) for w in weights],
        "states": [matrix_to_dict(s) for s in states],
    }
    return _report("B4", gap, witness, tolerance)


def check_c3(measure, rho1, rho2, p1, tolerance=VIOLATION_TOL):
    """Block additivity: gap = |C(p1 rho1 ⊕ p2 rho2) - p1 C(rho1) - p2 C(rho2)|."""
    rho1, rho2 = _as_density(rho1), _as_density(rho2)
    if not 0.0 <= p1 <= 1.0:
        raise ArgumentError(f"p1 must lie in [0, 1], got {p1!r}")
    p2 = 1.0 - p1
    combined = DensityState(direct_sum([p1 * rho1.mat, p2 * rho2.mat]).mat)
    lhs = measure.value(combined)
    rhs = p1 * measure.value(rho1) + p2 * measure.value(rho2)
    gap = abs(lhs - rhs)
    witness = {
        "measure": _measure_dict(measure),
        "p1": float(p1),
        "lhs": float(lhs),
        "rhs": float(rhs),
        "rho1": matrix_to_dict(rho1),
        "rho2": matrix_to_dict(rho2),
    }
    return _report("C3", gap, witness, tolerance)


class _NormalizedMeasure:
    """Measure wrapper scaling values so that C(J_2/2) = 1."""

    def __init__(self, measure, scale):
        self.measure = measure
        self.scale = scale

    def value(self, rho):
        return self.scale * self.measure.value(rho)

    def to_dict(self):
        d = self.measure.to_dict()
        d["normalization"] = self.scale
        return d


def usi_catalog_c3_test(norm, cfg=None, tolerance=VIOLATION_TOL):
    """Run the three catalog decompositions against a USI norm.

    The measure is c_nu_min_diag normalized so C(J_2/2) = 1; block additivity
    must fail on at least one decomposition for every USI norm.
    """
    if not norm.is_usi:
        raise ArgumentError(f"usi_catalog_c3_test needs a USI norm, got {norm}")
    cfg = cfg or SolverConfig()
    measure = MeasureSpec(norm, "min_diag", cfg)
    j2 = make_all_ones(2).mat
    j3 = make_all_ones(3).mat
    base = measure.value(j2 / 2)
    if base < 1e-12:
        raise DegenerateNormError(f"{norm} vanishes on (J_2 - I_2)/2; cannot normalize C(J_2/2) to 1")
    scaled = _NormalizedMeasure(measure, 1.0 / base)
    j2half = DensityState(j2 / 2)
    quarter_pair = DensityState(direct_sum([j2 / 4, j2 / 4]).mat)
    j3_plus = DensityState(direct_sum([j3 / 3, np.zeros((1, 1))]).mat)
    decompositions = [
        ("J2/2 + J2/2 @ 1/2", j2half, j2half, 0.5),
        ("J2/2 + (J2/4 ⊕ J2/4) @ 1/3", j2half, quarter_pair, 1.0 / 3.0),
        ("J2/2 + (J3/3 ⊕ [0]) @ 1/2", j2half, j3_plus, 0.5),
    ]
    reports = []
    for label, r1, r2, p1 in decompositions:
        rep = check_c3(scaled, r1, r2, p1, tolerance)
        witness = dict(rep.witness)
        witness["decomposition"] = label
        witness["normalization"] = 1.0 / base
        reports.append(AxiomReport(rep.axiom, rep.verdict, rep.gap, witness, rep.tolerance))
    return reports


def f_n_theta(n, theta, p):
    """Closed-form B3 surplus for the two-operator channel on the all-ones state.

    Positive values certify a monotonicity violation for the column-sum norm
    with inner exponent p; the three terms are the closed forms of the norm on
    the unnormalized all-ones matrix and its two channel outcomes.
    """
    p = check_exponent(p)
    if math.isinf(p):
        raise ArgumentError("f_n_theta needs a finite inner exponent; use the explicit max form for p=inf")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ArgumentError(f"n must be a positive integer, got {n!r}")
    if not 0.0 < theta < math.pi / 2:
        raise ArgumentError(f"theta must lie strictly inside (0, pi/2), got {theta!r}")
    c = math.cos(theta)
    s = math.sin(theta)
    whole = (n + 1) * n ** (1.0 / p)
    part1 = (s * s) * n * (n - 1) ** (1.0 / p)
    part2 = c * n ** (1.0 / p) + n * ((n - 1) * c ** (2 * p) + c ** p) ** (1.0 / p)
    return part1 + part2 - whole


def sweep_p3_violation(p, max_power=16, cosines=SWEEP_COSINES):
    """Geometric sweep n in {2, 4, ..., 2^max_power} for the first f(n, theta) > 0.

    Returns (n, theta, f) for the first hit, or None. Positivity is only
    guaranteed for large n and theta near pi/2, hence the sweep.
    """
    p = check_exponent(p)
    for power in range(1, max_power + 1):
        n = 2 ** power
        for c in cosines:
            theta = math.acos(c)
            val = f_n_theta(n, theta, p)
            if val > 0.0:
                return n, theta, val
    return None


def b3_gap_all_ones(n, theta, p):
    """check_b3 gap for C_{1,p} on rho = J_{n+1}/(n+1) with the two-operator channel."""
    measure = MeasureSpec(NormSpec.lqp(1.0, p), "closed_form")
    rho = DensityState(make_all_ones(n + 1).mat / (n + 1))
    return check_b3(measure, rho, necessity_family(n, theta)).gap


def random_b3_instance(rng, max_dim=6, m_max=4, rows_max=8):
    """Random density state plus a compatible random incoherent channel."""
    n = int(rng.integers(2, max_dim + 1))
    rho = random_density(n, rng)
    while True:
        m = int(rng.integers(1, m_max + 1))
        rows = int(rng.integers(1, rows_max + 1))
        if m * rows >= n:
            break
    kraus = random_incoherent_kraus(n, rows, m, seed=int(rng.integers(2 ** 62)))
    return rho, kraus


def random_b4_instance(rng, max_dim=6):
    n = int(rng.integers(2, max_dim + 1))
    count = int(rng.integers(2, 5))
    states = [random_density(n, rng) for _ in range(count)]
    weights = rng.dirichlet(np.ones(count))
    return states, weights


def b3_random_suite(measure, trials, seed, max_dim=6, m_max=4, rows_max=8, tolerance=VIOLATION_TOL):
    """Count B3 violations over seeded random (state, channel) instances."""
    violations = 0
    worst = -math.inf
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        rho, kraus = random_b3_instance(rng, max_dim, m_max, rows_max)
        rep = check_b3(measure, rho, kraus, tolerance)
        worst = max(worst, rep.gap)
        violations += rep.verdict == "violated"
    return {"axiom": "B3", "trials": trials, "violations": violations, "worst_gap": worst}


def b4_random_suite(measure, trials, seed, max_dim=6, tolerance=VIOLATION_TOL):
    """Count B4 violations over seeded random mixtures."""
    violations = 0
    worst = -math.inf
    for trial in range(trials):
        rng = np.random.default_rng((seed, trials + trial))
        states, weights = random_b4_instance(rng, max_dim)
        rep = check_b4(measure, states, weights, tolerance)
        worst = max(worst, rep.gap)
        violations += rep.verdict == "violated"
    return {"axiom": "B4", "trials": trials, "violations": violations, "worst_gap": worst}


def b2_random_suite(measure, trials, seed, max_dim=6, tolerance=VIOLATION_TOL):
    """Count deterministic-monotonicity violations on the B3 instance family."""
    violations = 0
    worst = -math.inf
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        rho, kraus = random_b3_instance(rng, max_dim)
        rep = check_b2(measure, rho, kraus, tolerance)
        worst = max(worst, rep.gap)
        violations += rep.verdict == "violated"
    return {"axiom": "B2", "trials": trials, "violations": violations, "worst_gap": worst}


def falsify(measure, trials, seed, max_dim=6, tolerance=VIOLATION_TOL):
    """Catalog checks plus seeded random B3/B4 searches; returns violations by gap.

    Deterministic for a given seed. Zero-probability outcomes are skipped in
    B3 ensembles, matching the channel module convention.
    """
    violations = []

    def note(report, order):
        if report.verdict == "violated":
            violations.append((report.gap, order, report))

    order = 0
    if measure.norm.tag == "lqp":
        j2 = make_all_ones(2).mat
        j3 = make_all_ones(3).mat
        j2half = DensityState(j2 / 2)
        pair = DensityState(direct_sum([j2 / 4, j2 / 4]).mat)
        j3_plus = DensityState(direct_sum([j3 / 3, np.zeros((1, 1))]).mat)
        for label, r1, r2, p1 in (
            ("J2/2 + J2/2 @ 1/2", j2half, j2half, 0.5),
            ("J2/2 + (J2/4 ⊕ J2/4) @ 1/3", j2half, pair, 1.0 / 3.0),
            ("J2/2 + (J3/3 ⊕ [0]) @ 1/2", j2half, j3_plus, 0.5),
        ):
            rep = check_c3(measure, r1, r2, p1, tolerance)
            rep = AxiomReport(rep.axiom, rep.verdict, rep.gap, {**rep.witness, "decomposition": label}, rep.tolerance)
            note(rep, order)
            order += 1
        if not math.isinf(measure.norm.p) and measure.norm.q == 1.0 and measure.norm.p > 2.0:
            hit = sweep_p3_violation(measure.norm.p)
            if hit is not None:
                n, theta, _ = hit
                rep = check_b3(measure, DensityState(make_all_ones(n + 1).mat / (n + 1)), necessity_family(n, theta), tolerance)
                note(rep, order)
                order += 1
    elif measure.norm.is_usi and measure.method == "min_diag":
        for rep in usi_catalog_c3_test(measure.norm, measure.solver, tolerance):
            note(rep, order)
            order += 1

    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        rho, kraus = random_b3_instance(rng, max_dim)
        note(check_b3(measure, rho, kraus, tolerance), order)
        order += 1

    for trial in range(trials):
        rng = np.random.default_rng((seed, trials + trial))
        states, weights = random_b4_instance(rng, max_dim)
        note(check_b4(measure, states, weights, tolerance), order)
        order += 1

    violations.sort(key=lambda item: (-item[0], item[1]))
    return [rep for _, _, rep in violations]


def _as_density(rho):
    if isinstance(rho, DensityState):
        return rho
    return DensityState(_as_array(rho, square=True))


def _measure_dict(measure):
    try:
        return measure.to_dict()
    except AttributeError:
        return {"label": getattr(measure, "label", repr(measure))}
