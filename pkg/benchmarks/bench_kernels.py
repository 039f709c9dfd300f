"""Compare the numba and numpy kernels on Monte Carlo sized inputs.

Usage: python benchmarks/bench_kernels.py [--trials N] [--repeat R]
"""

import argparse
import time

import numpy as np

from hardybell import _kernels
from hardybell.hardy import ALPHA_H, build_hardy_state
from hardybell.qm import BasisParams, EfficiencySet, NoiseMode, NoiseParams, detected_joint_distribution


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; install the [jit] extra")

    params = BasisParams(ALPHA_H)
    h = build_hardy_state(params)
    dist = detected_joint_distribution(h.state, params, EfficiencySet.uniform(0.9), NoiseParams(0.02, NoiseMode.StateMixture))
    p = dist.table.reshape(4, 9)
    cum_out = np.cumsum(p / p.sum(axis=1, keepdims=True), axis=1)
    cum_out[:, -1] = 1.0
    cum_pair = np.array([0.25, 0.5, 0.75, 1.0])
    rng = np.random.default_rng(0)
    u_pair, u_out = rng.random(args.trials), rng.random(args.trials)

    # warm up the compiled versions so compile time is not measured
    _kernels.tally_trials_jit(u_pair[:10], u_out[:10], cum_pair, cum_out)
    ideal = np.abs(rng.standard_normal((2, 2, 2, 2)))
    eta = np.array([0.9, 0.8])
    _kernels.detect_cells_jit(ideal, eta, eta)

    print(f"tally_trials, {args.trials} trials, best of {args.repeat}")
    t_np, c_np = best_of(lambda: _kernels.tally_trials_numpy(u_pair, u_out, cum_pair, cum_out), args.repeat)
    t_jit, c_jit = best_of(lambda: _kernels.tally_trials_jit(u_pair, u_out, cum_pair, cum_out), args.repeat)
    print(f"  numpy {t_np * 1e3:9.2f} ms")
    print(f"  numba {t_jit * 1e3:9.2f} ms  speedup {t_np / t_jit:5.1f}x  identical={np.array_equal(c_np, c_jit)}")

    n_calls = 20_000
    print(f"detect_cells, {n_calls} calls, best of {args.repeat}")

    def loop(fn):
        def run():
            for _ in range(n_calls):
                out = fn(ideal, eta, eta)
            return out
        return run

    t_np, d_np = best_of(loop(_kernels.detect_cells_numpy), args.repeat)
    t_jit, d_jit = best_of(loop(_kernels.detect_cells_jit), args.repeat)
    print(f"  numpy {t_np / n_calls * 1e6:9.2f} us/call")
    print(f"  numba {t_jit / n_calls * 1e6:9.2f} us/call  speedup {t_np / t_jit:5.1f}x  identical={np.array_equal(d_np, d_jit)}")


if __name__ == "__main__":
    main()
