"""Compare the compiled Jacobi kernel against the numpy fallback.

Backends share one contract (descending Hermitian eigenvalues, single and
batched), so the solver stack runs unchanged on either; this script reports
raw kernel timings plus one end-to-end nearest-diagonal minimization.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from cohnorm import _kernels
from cohnorm.matrices import direct_sum, make_all_ones
from cohnorm.measures import SolverConfig, c_nu_min_diag
from cohnorm.norms import NormSpec


def _random_hermitian(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2.0


def _time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    backends = _kernels.available_backends()
    if len(backends) < 2:
        print("compiled extension not available; benchmarking the fallback only")

    singles = {n: _random_hermitian(rng, n) for n in (4, 8, 16, 64)}
    batches = {
        (4, 20000): np.stack([_random_hermitian(rng, 4) for _ in range(20000)]),
        (8, 5000): np.stack([_random_hermitian(rng, 8) for _ in range(5000)]),
        (16, 1000): np.stack([_random_hermitian(rng, 16) for _ in range(1000)]),
    }
    hard_state = direct_sum([make_all_ones(2).mat / 4, make_all_ones(3).mat / 6, [[0.0]]]).mat

    rows = []
    for backend in backends:
        _kernels.set_backend(backend)
        for n, a in singles.items():
            dt = _time(lambda a=a: [_kernels.eigvals_descending(a) for _ in range(200)], args.repeats)
            rows.append((f"single eigvals n={n} (x200)", backend, dt))
        for (n, m), stack in batches.items():
            dt = _time(lambda s=stack: _kernels.eigvals_batch(s), args.repeats)
            rows.append((f"batch eigvals {m}x{n}x{n}", backend, dt))
        dt = _time(
            lambda: c_nu_min_diag(hard_state, NormSpec.trace_norm(), SolverConfig()),
            max(1, args.repeats - 1),
        )
        rows.append(("c_nu_min_diag trace norm, dim 6", backend, dt))
    _kernels.set_backend(backends[0])

    width = max(len(r[0]) for r in rows)
    print(f"{'benchmark':{width}s}  {'backend':12s}  {'best time':>10s}")
    print("-" * (width + 26))
    for label, backend, dt in rows:
        print(f"{label:{width}s}  {backend:12s}  {dt * 1e3:9.2f}ms")

    if len(backends) == 2:
        print("\nspeedups (jacobi-ext over numpy-eigh):")
        by_label = {}
        for label, backend, dt in rows:
            by_label.setdefault(label, {})[backend] = dt
        for label, times in by_label.items():
            ratio = times["numpy-eigh"] / times["jacobi-ext"]
            print(f"  {label:{width}s}  {ratio:5.2f}x")


if __name__ == "__main__":
    main()
