"""Benchmark the SU(2) step-product backends on the standard-ring workload.

The hot kernel multiplies tens of thousands of 2x2 unitary steps per
monodromy evaluation.  This script times the numba kernel against the pure
numpy pairwise reduction on identical inputs, then times full monodromy
calls through each backend.

Run: python3 benchmarks/bench_backends.py [--steps-per-unit N] [--repeats R]
"""

import argparse
import time

import numpy as np

from berryring import IntegrationConfig, available_backends, monodromy, standard_ring
from berryring.backends import ordered_product


def _random_su2_steps(n, seed=7):
    rng = np.random.default_rng(seed)
    axes = rng.normal(size=(n, 3))
    axes /= np.linalg.norm(axes, axis=1)[:, None]
    angles = rng.uniform(0.0, 0.05, size=n)
    steps = np.empty((n, 2, 2), dtype=np.complex128)
    cos_a = np.cos(angles)
    sin_a = np.sin(angles)
    steps[:, 0, 0] = cos_a + 1j * sin_a * axes[:, 2]
    steps[:, 0, 1] = sin_a * (axes[:, 1] + 1j * axes[:, 0])
    steps[:, 1, 0] = sin_a * (-axes[:, 1] + 1j * axes[:, 0])
    steps[:, 1, 1] = cos_a - 1j * sin_a * axes[:, 2]
    return steps


def _time(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--steps-per-unit", type=float, default=2000.0)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    print(f"available backends: {', '.join(backends)}")

    ring = standard_ring(alpha=0.02)
    config = IntegrationConfig(steps_per_unit=args.steps_per_unit)
    lo, hi = ring.domain
    n_steps = max(config.min_steps, int(np.ceil((hi - lo) * args.steps_per_unit)))
    steps = _random_su2_steps(n_steps)

    # warm up (includes numba JIT compilation on the first call)
    for name in backends:
        ordered_product(steps[:128], backend=name)

    print(f"\nkernel: ordered product of {n_steps} SU(2) steps "
          f"(best of {args.repeats})")
    times = {}
    for name in backends:
        times[name] = _time(lambda: ordered_product(steps, backend=name), args.repeats)
        print(f"  {name:>6}: {times[name] * 1e3:8.3f} ms")
    if len(times) == 2:
        print(f"  numba speedup over numpy: {times['numpy'] / times['numba']:.2f}x")
        mismatch = np.max(
            np.abs(
                ordered_product(steps, backend="numba")
                - ordered_product(steps, backend="numpy")
            )
        )
        print(f"  max |numba - numpy| on this input: {mismatch:.2e}")

    print(f"\nend to end: standard-ring monodromy at {args.steps_per_unit:g} "
          f"steps/unit (best of {args.repeats})")
    for name in backends:
        best = _time(
            lambda: monodromy(ring, config=config, backend=name), args.repeats
        )
        print(f"  {name:>6}: {best * 1e3:8.3f} ms")


if __name__ == "__main__":
    main()
