"""Wall-time comparison of the simulation kernels.

Runs one preset on every available backend (compiled extension and the
pure-Python fallback), reports steps/second and the speedup, and
verifies that the trajectories agree bit for bit — the kernels are
line-for-line ports of each other, so they must not merely be close,
they must be identical.

Usage::

    python3 benchmarks/bench_backends.py [--scenario fig1] [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ptsmc import COLUMNS, available_backends, get_scenario, run


def time_backend(scenario, backend: str, repeats: int):
    result = run(scenario.sim, scenario.spec, scenario.dist, backend=backend)  # warmup
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        result = run(scenario.sim, scenario.spec, scenario.dist, backend=backend)
        best = min(best, time.perf_counter() - started)
    return result, best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scenario", default="fig1", help="preset name (default: fig1)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats, best-of (default: 3)")
    args = parser.parse_args()

    scenario = get_scenario(args.scenario)
    backends = available_backends()
    print(f"scenario {scenario.name}: dt={scenario.sim.dt:g}, "
          f"t_end={scenario.sim.t_end:g} ({scenario.sim.n_steps} steps), "
          f"law={scenario.spec.law}, surrogate={scenario.spec.surrogate}")

    results, timings = {}, {}
    for backend in backends:
        result, best = time_backend(scenario, backend, args.repeats)
        results[backend], timings[backend] = result, best
        print(f"  {backend:>8}: {best * 1e3:8.1f} ms  "
              f"({result.step_count / best / 1e6:6.2f} M steps/s)")

    if "compiled" in timings and "pure" in timings:
        print(f"  speedup: {timings['pure'] / timings['compiled']:.1f}x "
              "(compiled over pure)")
        a, b = results["compiled"], results["pure"]
        for name in COLUMNS:
            if not np.array_equal(a.column(name), b.column(name)):
                print(f"  MISMATCH in column {name}: backends are not bit-identical")
                return 1
        print("  trajectories bit-identical across backends "
              f"({a.n_samples} samples x {len(COLUMNS)} columns)")
    else:
        print("  only one backend available; no comparison")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
