"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--dim 20] [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from dilemma import kernels
from dilemma.tournament import MatchConfig, run_match


def kernel_cases(dim: int):
    rng = np.random.default_rng(0)
    Ls = np.stack([np.eye(dim), np.eye(dim)])
    for _ in range(50):
        kernels.BACKENDS["python"].chol_update(Ls[0], (rng.random(dim) < 0.25).astype(float))
    bs = rng.standard_normal((2, dim))
    x = (rng.random(dim) < 0.25).astype(float)
    Z = rng.standard_normal((2, dim))
    return {
        "chol_update": lambda: kernels.chol_update(Ls[1].copy(), x),
        "linear_scores": lambda: kernels.linear_scores(Ls, bs, x, 1.0),
        "sampled_scores": lambda: kernels.sampled_scores(Ls, bs, x, 1.0, Z),
    }


def match_case(memory: int):
    cfg = MatchConfig(rounds=60, runs=5, memory=memory, seed=0)
    return lambda: run_match(["LinUCB", "CTS"], cfg)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dim", type=int, default=20, help="context dimension (memory 5 gives 20)")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = sorted(kernels.BACKENDS)
    timings: dict[str, dict[str, float]] = {}
    previous = kernels.BACKEND
    try:
        for name in backends:
            kernels.use_backend(name)
            cases = kernel_cases(args.dim)
            cases["LinUCB vs CTS match (5 runs)"] = match_case(args.dim // 4)
            for case, fn in cases.items():
                number = 1 if "match" in case else 2000
                best = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
                timings.setdefault(case, {})[name] = best
    finally:
        kernels.use_backend(previous)

    header = f"{'case':32s}" + "".join(f"{b:>14s}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for case, row in timings.items():
        line = f"{case:32s}" + "".join(f"{row[b] * 1e6:12.1f}us" for b in backends)
        if len(backends) == 2:
            line += f"{row['python'] / row['cython']:9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
