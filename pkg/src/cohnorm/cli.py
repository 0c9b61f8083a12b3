"""Command-line front end.

Subcommands:

* ``coherence``: evaluate a measure on a state file, print value + minimizer;
* ``repro``: rebuild the concrete numbers and counterexamples as a pass/fail
  table (sections: thm21, lqp-necessity, lqp-sufficiency, lemmas);
* ``falsify``: run the axiom falsifier for a measure over seeded random
  instances.

Exit codes: 0 = all rows pass / value computed, 1 = violation or failing row,
2 = usage error. JSON output is byte-identical across identical invocations
(floats pinned at 17 significant digits).
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import jsonio
from .axioms import (
    b3_random_suite,
    b3_gap_all_ones,
    b4_random_suite,
    catalog_states,
    check_c3,
    falsify,
    sweep_p3_violation,
    usi_catalog_c3_test,
    usi_norm_catalog,
)
from .matrices import DensityState, MatrixError, direct_sum, load_matrix, make_all_ones
from .measures import MeasureSpec, SolverConfig, c_nu_min_diag
from .norms import NormSpec
from .oracles import (
    run_contraction_suite,
    run_cover_kraus_suite,
    run_extreme_suite,
    run_lagrange_suite,
    run_perm_suite,
    solver_oracle_agreement,
    symmetric_solver_agreement,
)

SECTIONS = ("thm21", "lqp-necessity", "lqp-sufficiency", "lemmas")


@dataclass(frozen=True)
class ReproRow:
    """One reproduced number: pass iff difference <= tolerance.

    For one-sided rows (claimed is a lower bound) the difference is the
    shortfall, clamped at zero.
    """

    label: str
    claimed: float
    computed: float
    tolerance: float
    provenance: str
    one_sided: bool = False

    @property
    def difference(self):
        if self.one_sided:
            return max(self.claimed - self.computed, 0.0)
        return abs(self.claimed - self.computed)

    @property
    def passed(self):
        return self.difference <= self.tolerance

    def to_dict(self):
        return {
            "label": self.label,
            "claimed": float(self.claimed),
            "computed": float(self.computed),
            "diff": float(self.difference),
            "tolerance": float(self.tolerance),
            "provenance": self.provenance,
            "pass": bool(self.passed),
        }


def build_thm21_rows(cfg=None, tolerance=1e-6):
    """Trace-norm values and the additivity contradiction, plus the USI catalog."""
    cfg = cfg or SolverConfig()
    trace_measure = MeasureSpec(NormSpec.trace_norm(), "min_diag", cfg)
    j2 = make_all_ones(2).mat
    j3 = make_all_ones(3).mat
    j2half = DensityState(j2 / 2)
    j3plus = DensityState(direct_sum([j3 / 3, np.zeros((1, 1))]).mat)
    rows = [
        ReproRow("trace C(J2/2)", 1.0, trace_measure.value(j2half), tolerance, "closed value 1"),
    ]
    res = c_nu_min_diag(j3plus.mat, trace_measure.norm, cfg)
    rows.append(ReproRow("trace C(J3/3 ⊕ [0])", 4.0 / 3.0, res.value, tolerance, "closed value 4/3"))
    target = np.array([1 / 3, 1 / 3, 1 / 3, 0.0])
    dist = float(np.abs(res.minimizer.diag - target).max())
    rows.append(ReproRow("minimizer -> diag(1/3,1/3,1/3,0)", 0.0, dist, 1e-4, "uniform block minimizer"))
    rep = check_c3(trace_measure, j2half, j3plus, 0.5)
    rows.append(
        ReproRow("trace C3 gap on (J2/2, J3/3 ⊕ [0])", 1.0 / 6.0, rep.gap, tolerance, "7/6 vs upper bound 1", one_sided=True)
    )
    for spec in usi_norm_catalog():
        reports = usi_catalog_c3_test(spec, cfg)
        count = float(sum(r.verdict == "violated" for r in reports))
        rows.append(ReproRow(f"usi catalog violations: {spec}", 1.0, count, 0.0, "no USI coherence measure", one_sided=True))
    return rows


def build_lqp_necessity_rows(tolerance=1e-9):
    """The q = 1 and p <= 2 necessity gaps."""
    j2half = DensityState(make_all_ones(2).mat / 2)
    q2 = MeasureSpec(NormSpec.lqp(2, 2), "closed_form")
    gap_q2 = check_c3(q2, j2half, j2half, 0.5).gap
    rows = [
        ReproRow("C3 gap for q=2 on (J2/2, J2/2)", math.sqrt(2) / 2 - 0.5, gap_q2, tolerance, "sqrt(2)/2 - sqrt(4)/4"),
    ]
    c = math.sqrt(2) / 2
    gap_inf = b3_gap_all_ones(3, math.pi / 4, math.inf)
    rows.append(
        ReproRow(
            "B3 gap for (q,p)=(1,inf) at n=3, theta=pi/4",
            (3 * c - 1) * (1 - c) / 4,
            gap_inf,
            tolerance,
            "(nc-1)(1-c)/(n+1) at c=sqrt(2)/2",
        )
    )
    hit = sweep_p3_violation(3.0)
    if hit is None:
        rows.append(ReproRow("p=3 sweep finds f(n,theta) > 0", 1.0, 0.0, 0.0, "violation exists for large n", one_sided=True))
        return rows
    n, theta, f_value = hit
    rows.append(ReproRow("p=3 sweep finds f(n,theta) > 0", 1e-12, f_value, 0.0, f"first hit n={n}, cos={math.cos(theta):.2f}", one_sided=True))
    gap = b3_gap_all_ones(n, theta, 3.0)
    rows.append(
        ReproRow("p=3 channel gap matches closed form", 0.0, abs((n + 1) * gap - f_value), tolerance, "(n+1) * B3 gap vs f(n,theta)")
    )
    return rows


def build_lqp_sufficiency_rows(trials=1000, seed=0, ps=(1.0, 1.25, 1.5, 1.75, 2.0)):
    """Randomized B3/B4 suites for the measure-inducing exponents: zero violations."""
    rows = []
    for p in ps:
        measure = MeasureSpec(NormSpec.lqp(1, p), "closed_form")
        b3 = b3_random_suite(measure, trials, seed)
        rows.append(
            ReproRow(f"B3 violations for p={p:g} ({trials} trials)", 0.0, float(b3["violations"]), 0.0, "q=1, p in [1,2] is a measure")
        )
        b4 = b4_random_suite(measure, trials, seed)
        rows.append(
            ReproRow(f"B4 violations for p={p:g} ({trials} trials)", 0.0, float(b4["violations"]), 0.0, "norm convexity")
        )
    return rows


def catalog_norm_specs():
    """Norms exercised by the solver-vs-oracle comparison."""
    return list(usi_norm_catalog()) + [NormSpec.lqp(1, 1), NormSpec.lqp(1, 2), NormSpec.lqp(2, 2)]


def build_lemmas_rows(trials=10000, seed=0, cfg=None):
    """Oracle suites: lemma margins, Kraus covers, extreme points, solver agreement."""
    cfg = cfg or SolverConfig()
    rows = []
    perm = run_perm_suite(trials, seed)
    rows.append(ReproRow(f"cover inequality worst margin ({trials} trials)", 0.0, max(perm["worst_margin"], 0.0), 1e-10, "proved for p in [1,2]"))
    lagr = run_lagrange_suite(trials, seed)
    rows.append(ReproRow(f"weighted cover worst margin ({trials} trials)", 0.0, max(lagr["worst_margin"], 0.0), 1e-10, "proved for p in [1,2]"))
    contr = run_contraction_suite(trials, seed)
    rows.append(ReproRow(f"contraction worst margin ({trials} trials)", 0.0, max(contr["worst_margin"], 0.0), 1e-10, "channel column-norm contraction"))
    kc = run_cover_kraus_suite(max(trials // 5, 1), seed)
    rows.append(ReproRow("kraus cover instances worst margin", 0.0, max(kc["worst_margin"], 0.0), 1e-10, "isometry row supports"))
    ext = run_extreme_suite(100, seed)
    rows.append(ReproRow("extreme witnesses: unit-norm deviation", 0.0, ext["worst_unit_norm_deviation"], 1e-10, "averaging construction"))
    rows.append(ReproRow("extreme witnesses: midpoint deviation", 0.0, ext["worst_average_deviation"], 1e-12, "averaging construction"))
    states = [(s.label, s.state) for s in catalog_states() if s.state.dim <= 4]
    agreement = solver_oracle_agreement(states, catalog_norm_specs(), cfg)
    worst = max(r["difference"] - r["bound"] for r in agreement)
    rows.append(ReproRow(f"solver vs grid oracle over {len(agreement)} pairs", 0.0, max(worst, 0.0), 0.0, "margin beyond grid+solver bound"))
    sym_states = [(s.label, s.circulant_blocks) for s in catalog_states()]
    sym = symmetric_solver_agreement(sym_states, [NormSpec.trace_norm(), NormSpec.schatten(2), NormSpec.schatten(math.inf)], cfg)
    worst_sym = max(r["difference"] for r in sym)
    rows.append(ReproRow(f"symmetric reduction vs general solver over {len(sym)} pairs", 0.0, worst_sym, 1e-6, "circulant block reduction"))
    return rows


def rows_to_table(rows):
    head = f"{'label':58s} {'claimed':>22s} {'computed':>22s} {'diff':>12s} {'pass':>5s}"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(
            f"{r.label[:58]:58s} {r.claimed:>22.12g} {r.computed:>22.12g} {r.difference:>12.3e} {'ok' if r.passed else 'FAIL':>5s}"
        )
    return "\n".join(lines)


def rows_to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["label", "claimed", "computed", "diff", "pass"])
    for r in rows:
        writer.writerow([r.label, format(r.claimed, ".17g"), format(r.computed, ".17g"), format(r.difference, ".17g"), str(r.passed).lower()])
    return buf.getvalue()


def _write_outputs(out_dir, stem, payload, rows=None, fmt="json"):
    os.makedirs(out_dir, exist_ok=True)
    jsonio.dump(payload, os.path.join(out_dir, stem + ".json"))
    if rows is not None and fmt in ("csv", "json"):
        with open(os.path.join(out_dir, stem + ".csv"), "w") as fh:
            fh.write(rows_to_csv(rows))


def _parse_measure(text, solver):
    if os.path.exists(text):
        with open(text) as fh:
            data = json.load(fh)
    else:
        data = json.loads(text)
    return MeasureSpec.from_dict(data, solver=solver)


def cmd_coherence(args):
    solver = SolverConfig(tolerance=args.tol, seed=args.seed)
    try:
        state = load_matrix(args.state)
        measure = _parse_measure(args.measure, solver)
    except (OSError, json.JSONDecodeError, MatrixError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        rho = DensityState(state)
    except MatrixError as exc:
        print(f"error: state is not a density matrix: {exc}", file=sys.stderr)
        return 2
    result = measure.minimize(rho)
    value = result.value
    payload = {
        "measure": measure.to_dict(),
        "method": measure.method,
        "value": float(value),
        "minimizer_diagonal": [float(x) for x in result.minimizer_diagonal()],
        "iterations": result.certificate.iterations,
    }
    if args.normalize:
        j2half = make_all_ones(2).mat / 2
        base = measure.value(j2half)
        payload["normalization"] = float(base)
        payload["normalized_value"] = float(value / base) if base > 1e-12 else None
    text = jsonio.dumps(payload, indent=2)
    print(text, end="")
    if args.out:
        _write_outputs(args.out, "coherence", payload)
    return 0


def cmd_repro(args):
    cfg = SolverConfig(seed=args.seed)
    if args.section == "thm21":
        rows = build_thm21_rows(cfg)
    elif args.section == "lqp-necessity":
        rows = build_lqp_necessity_rows()
    elif args.section == "lqp-sufficiency":
        rows = build_lqp_sufficiency_rows(trials=args.trials or 1000, seed=args.seed)
    else:
        rows = build_lemmas_rows(trials=args.trials or 10000, seed=args.seed, cfg=cfg)
    print(rows_to_table(rows))
    payload = {"section": args.section, "rows": [r.to_dict() for r in rows]}
    if args.out:
        _write_outputs(args.out, f"repro-{args.section}", payload, rows)
    if args.format == "csv":
        print(rows_to_csv(rows), end="")
    return 0 if all(r.passed for r in rows) else 1


def cmd_falsify(args):
    solver = SolverConfig(tolerance=min(args.tol, 1e-6), seed=args.seed)
    try:
        measure = _parse_measure(args.measure, solver)
    except (OSError, json.JSONDecodeError, MatrixError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    violations = falsify(measure, trials=args.trials, seed=args.seed, max_dim=args.dims, tolerance=args.tol)
    payload = [v.to_dict() for v in violations]
    print(f"{measure.label}: {len(violations)} violation(s) over {args.trials} random trials (seed {args.seed})")
    for v in violations[:10]:
        extra = v.witness.get("decomposition", "random instance")
        print(f"  {v.axiom} gap={v.gap:.9g} [{extra}]")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        jsonio.dump(payload, os.path.join(args.out, "violations.json"))
        with open(os.path.join(args.out, "violations.csv"), "w") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["axiom", "gap", "witness"])
            for i, v in enumerate(violations):
                path = os.path.join(args.out, f"witness-{i:04d}.json")
                jsonio.dump(v.witness, path)
                writer.writerow([v.axiom, format(v.gap, ".17g"), os.path.basename(path)])
    return 1 if violations else 0


def build_parser():
    parser = argparse.ArgumentParser(prog="cohnorm", description="norm-induced coherence measures")
    sub = parser.add_subparsers(dest="command", required=True)

    coh = sub.add_parser("coherence", help="evaluate a coherence measure on a state file")
    coh.add_argument("--state", required=True, help="JSON matrix file {n, re, im}")
    coh.add_argument("--measure", required=True, help="measure spec as inline JSON or a file path")
    coh.add_argument("--tol", type=float, default=1e-8)
    coh.add_argument("--seed", type=int, default=0)
    coh.add_argument("--normalize", action="store_true", help="also report value normalized so C(J2/2)=1")
    coh.add_argument("--out", default=None)
    coh.add_argument("--format", choices=("json", "csv"), default="json")
    coh.set_defaults(func=cmd_coherence)

    rep = sub.add_parser("repro", help="reproduce the concrete numbers as a pass/fail table")
    rep.add_argument("section", choices=SECTIONS)
    rep.add_argument("--trials", type=int, default=None)
    rep.add_argument("--seed", type=int, default=0)
    rep.add_argument("--out", default=None)
    rep.add_argument("--format", choices=("json", "csv"), default="json")
    rep.set_defaults(func=cmd_repro)

    fal = sub.add_parser("falsify", help="search for axiom violations of a measure")
    fal.add_argument("--measure", required=True)
    fal.add_argument("--trials", type=int, default=200)
    fal.add_argument("--seed", type=int, default=0)
    fal.add_argument("--dims", type=int, default=6, help="largest state dimension to sample")
    fal.add_argument("--tol", type=float, default=1e-7)
    fal.add_argument("--out", default=None)
    fal.add_argument("--format", choices=("json", "csv"), default="json")
    fal.set_defaults(func=cmd_falsify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
