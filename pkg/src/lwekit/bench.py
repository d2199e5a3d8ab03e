"""Benchmark the compiled kernel against the interpreted fallback.

The numeric core is one source file that runs either as a Cython-built
extension or under the plain interpreter; the two produce bit-identical
streams, so this benchmark is purely about throughput.  Run with

    python -m lwekit.bench [--draws N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from .backend import core as active_core, load_pure_core


def _bench_1d(core_mod, draws: int) -> tuple[float, np.ndarray]:
    tab = core_mod.Dgs1dTable(0.3, 0.0, 1.5, 0.0)
    rng = core_mod.Xoshiro256StarStar(11, 22, 33, 44)
    out = np.empty(draws, dtype=np.int64)
    t0 = time.perf_counter()
    tab.fill(rng, out, draws)
    return time.perf_counter() - t0, out


def _bench_theta(core_mod, reps: int) -> float:
    t0 = time.perf_counter()
    for i in range(reps):
        core_mod.theta(0.3, 0.0, 1.0 + (i % 7) * 0.5, 0.0, 80)
    return time.perf_counter() - t0


def _bench_gauss(core_mod, draws: int) -> float:
    rng = core_mod.Xoshiro256StarStar(5, 6, 7, 8)
    hi = np.empty(draws)
    lo = np.empty(draws)
    t0 = time.perf_counter()
    core_mod.gauss_d1_fill(rng, hi, lo, draws)
    return time.perf_counter() - t0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="python -m lwekit.bench")
    ap.add_argument("--draws", type=int, default=200_000,
                    help="1d sampler draws for the compiled backend")
    args = ap.parse_args(argv)

    pure = load_pure_core()
    compiled = active_core if active_core.compiled() else None
    if compiled is None:
        print("compiled backend unavailable; benchmarking the interpreted core only")

    rows = []
    pure_draws = max(args.draws // 50, 1000)
    tp, outp = _bench_1d(pure, pure_draws)
    rows.append(("dgs1d draws/s", f"{pure_draws / tp:,.0f}", None))
    if compiled:
        tc, outc = _bench_1d(compiled, args.draws)
        rows[-1] = ("dgs1d draws/s", f"{pure_draws / tp:,.0f}", f"{args.draws / tc:,.0f}")
        assert (outc[:pure_draws] == outp).all(), "backends disagree"

    tp = _bench_theta(pure, 200)
    if compiled:
        tc = _bench_theta(compiled, 5000)
        rows.append(("theta evals/s", f"{200 / tp:,.0f}", f"{5000 / tc:,.0f}"))
    else:
        rows.append(("theta evals/s", f"{200 / tp:,.0f}", None))

    gp = max(args.draws // 50, 1000)
    tp = _bench_gauss(pure, gp)
    if compiled:
        tc = _bench_gauss(compiled, args.draws)
        rows.append(("cont. gauss draws/s", f"{gp / tp:,.0f}", f"{args.draws / tc:,.0f}"))
    else:
        rows.append(("cont. gauss draws/s", f"{gp / tp:,.0f}", None))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel'.rjust(width)}  {'interpreted':>14}  {'compiled':>14}")
    for name, p, c in rows:
        print(f"{name.rjust(width)}  {p:>14}  {(c or '-'):>14}")
    if compiled:
        print("\nidentical output streams verified on the shared prefix")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
