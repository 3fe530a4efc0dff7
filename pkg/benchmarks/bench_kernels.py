"""Compare the compiled and numpy Monte Carlo kernels.

    python benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]

Each kernel is timed on the same uniforms; the best of ``--repeat`` runs
is reported together with the relative difference of the outputs.
"""
import argparse
import time

import numpy as np

from qsi.kernels import MIXED, PURE, get_backend


def best_time(fn, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, np.asarray(out, dtype=float)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=10**6)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    py = get_backend("python")
    try:
        cy = get_backend("cython")
    except ImportError:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
        return

    rng = np.random.default_rng(2024)
    u6 = rng.random((args.n, 6))
    u2 = np.ascontiguousarray(u6[:, :2])
    nplus = np.array([300.0, 400.0, 500.0])
    nminus = np.array([200.0, 100.0, 50.0])
    means = np.array([0.3, 0.4, 0.5])
    cases = [
        ("bloch_from_uniforms mixed", "bloch_from_uniforms", (u6, MIXED)),
        ("loglik_moments mixed", "loglik_moments", (u6, MIXED, nplus, nminus)),
        ("loglik_moments pure", "loglik_moments", (u2, PURE, nplus, nminus)),
        ("tophat_moments mixed xyz", "tophat_moments", (u6, MIXED, means, np.array([1, 1, 1], np.int8), 0.01)),
        ("tophat_moments mixed z", "tophat_moments", (u6, MIXED, means, np.array([0, 0, 1], np.int8), 0.01)),
        ("tophat_moments pure xyz", "tophat_moments", (u2, PURE, means, np.array([1, 1, 1], np.int8), 0.01)),
    ]
    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'kernel':28s} {'numpy ms':>10s} {'cython ms':>10s} {'speedup':>8s} {'max rel diff':>13s}")
    for label, name, call in cases:
        tp, op = best_time(getattr(py, name), call, args.repeat)
        tc, oc = best_time(getattr(cy, name), call, args.repeat)
        scale = np.maximum(np.abs(op), 1e-300)
        diff = float(np.nanmax(np.abs(op - oc) / scale)) if op.size else 0.0
        print(f"{label:28s} {tp * 1e3:10.2f} {tc * 1e3:10.2f} {tp / tc:8.2f} {diff:13.2e}")


if __name__ == "__main__":
    main()
