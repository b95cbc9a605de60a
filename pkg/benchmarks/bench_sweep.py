"""Benchmark: compiled vs pure sweep kernel on a collinear-chain instance.

Usage: python benchmarks/bench_sweep.py [--n-mc 200] [--m 20] [--n 4000]
"""
import argparse
import time

import numpy as np

from colgibbs import (
    ChainConfig,
    CollinearityMatrix,
    block_distribution,
    build_kernel,
    make_dataset,
    pair_probabilities,
    run_chain,
)
from colgibbs.backend import available_backends


def build_instance(m, n, p):
    desc = {"m": m, "n": n, "p": p, "alpha": 0.9, "degree": 5,
            "noise_factor": 0.3, "seed": 7,
            "inputs": {"kind": "chain", "channels": max(2, m // 2), "c": 0.99}}
    ds = make_dataset(desc)
    kern = build_kernel(0.9, p)
    C = CollinearityMatrix.from_inputs(ds.problem.inputs)
    dist = block_distribution(pair_probabilities(C, 100.0), m, 10)
    G = ds.problem.G
    gram = (G.T @ G, G.T @ ds.problem.Y, float(ds.problem.Y @ ds.problem.Y))
    return ds, kern, dist, gram


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--m", type=int, default=20)
    parser.add_argument("--n", type=int, default=4000)
    parser.add_argument("--p", type=int, default=50)
    parser.add_argument("--n-mc", type=int, default=200)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    ds, kern, dist, gram = build_instance(args.m, args.n, args.p)
    rows = []
    for backend in available_backends():
        cfg = ChainConfig(scheme="rsgsob", n_mc=args.n_mc, n_ob=10, seed=1,
                          backend=backend, store_selection=False)
        best = np.inf
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            run_chain(cfg, ds.problem, kern, dist, gram=gram)
            best = min(best, time.perf_counter() - t0)
        per_iter = 1e3 * best / args.n_mc
        rows.append((backend, best, per_iter))
        print(f"{backend:9s}: {best:7.3f}s total, {per_iter:7.3f} ms/iteration")
    if len(rows) == 2:
        print(f"speedup: {rows[1][1] / rows[0][1]:.2f}x "
              f"({rows[0][0]} over {rows[1][0]})")


if __name__ == "__main__":
    main()
