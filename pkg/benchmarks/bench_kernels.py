#!/usr/bin/env python3
"""Time the compiled kernels against the pure numpy fallback.

Covers the two hot loops: the SMO dual solver on a study-sized cell
and the YIN difference function over one second of audio. Run from
the repository root after installing the package:

    python3 benchmarks/bench_kernels.py [--n 800] [--repeats 5]
"""

import argparse
import time

import numpy as np

from phonodiverge import _kernels_py
from phonodiverge.svm import dual_objective, rbf_kernel_matrix

try:
    from phonodiverge import _speedups
except ImportError:
    _speedups = None


def smo_problem(n, d=8, gap=1.5, seed=0):
    rng = np.random.Generator(np.random.PCG64(seed))
    half = n // 2
    x = np.vstack(
        [
            rng.normal(0.0, 1.0, (half, d)),
            rng.normal(gap / np.sqrt(d), 1.0, (n - half, d)),
        ]
    )
    x = (x - x.mean(axis=0)) / x.std(axis=0)
    y = np.concatenate([-np.ones(half), np.ones(n - half)])
    return rbf_kernel_matrix(x, x, 1.0 / d), y


def yin_frames(sr=16000, freq=220.0, win=0.040, hop=0.010, f0_min=60.0):
    t = np.arange(sr) / sr
    x = 0.6 * np.sin(2 * np.pi * freq * t)
    window = int(win * sr)
    tau_max = int(sr / f0_min)
    starts = range(0, x.shape[0] - window - tau_max, int(hop * sr))
    return [x[s : s + window + tau_max] for s in starts], window, tau_max


def best_of(fn, repeats):
    times = []
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t0)
    return min(times), result


def main():
    ap = argparse.ArgumentParser(
        description="compare kernel backends", allow_abbrev=False
    )
    ap.add_argument("--n", type=int, default=800, help="SMO training set size")
    ap.add_argument("--repeats", type=int, default=5, help="keep the best run")
    args = ap.parse_args()

    backends = [("pure-python", _kernels_py)]
    if _speedups is not None:
        backends.insert(0, ("compiled", _speedups))
    else:
        print("compiled extension not available; timing the fallback only")

    k, y = smo_problem(args.n)
    print(f"smo_solve  (n={args.n}, tol=1e-3, max_passes=10, seed=7)")
    timings = {}
    for name, impl in backends:
        dt, (alphas, bias, sweeps, converged) = best_of(
            lambda impl=impl: impl.smo_solve(k, y, 1.0, 1e-3, 10, 7),
            args.repeats,
        )
        timings[name] = dt
        obj = dual_objective(k, y, alphas)
        print(
            f"  {name:12s} {dt * 1e3:9.1f} ms   sweeps={sweeps} "
            f"converged={converged} dual={obj:.6f}"
        )
    if len(timings) == 2:
        print(f"  speedup      {timings['pure-python'] / timings['compiled']:9.1f} x")

    frames, window, tau_max = yin_frames()
    print(f"yin_diff   ({len(frames)} frames, window={window}, tau_max={tau_max})")
    timings = {}
    for name, impl in backends:

        def run(impl=impl):
            acc = 0.0
            for frame in frames:
                acc += impl.yin_diff(frame, window, tau_max)[tau_max]
            return acc

        dt, _ = best_of(run, args.repeats)
        timings[name] = dt
        print(f"  {name:12s} {dt * 1e3:9.1f} ms")
    if len(timings) == 2:
        print(f"  speedup      {timings['pure-python'] / timings['compiled']:9.1f} x")


if __name__ == "__main__":
    main()
