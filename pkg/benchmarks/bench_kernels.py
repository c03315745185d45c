"""Compare the compiled path kernel with the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--paths 100000] [--N 20] [--repeat 5]
"""
from __future__ import annotations

import argparse
import json
import math
import time

import numpy as np

from insider_disclosure import kernels
from insider_disclosure.params import ModelParams
from insider_disclosure.sequential import solve_sequential
from insider_disclosure.simulator import strategy_from


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=100_000)
    ap.add_argument("--N", type=int, default=20)
    ap.add_argument("--K", type=float, default=1.2)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    prm = ModelParams(K=args.K, N=args.N)
    st = strategy_from(solve_sequential(prm))
    call_args = (st.u, st.theta, st.lam, st.gamma, st.gamma_prime, st.eta, st.sz,
                 prm.p0, math.sqrt(prm.Sigma0), prm.sigma_mu, 42, 0, args.paths, True)

    result = {"paths": args.paths, "N": args.N, "K": args.K}
    py = kernels.python_simulate_block
    result["python_s"] = best_of(lambda: py(*call_args), args.repeat)
    if kernels.compiled_simulate_block is None:
        result["compiled_s"] = None
    else:
        cy = kernels.compiled_simulate_block
        result["compiled_s"] = best_of(lambda: cy(*call_args), args.repeat)
        result["speedup"] = result["python_s"] / result["compiled_s"]
        diff = max(float(np.max(np.abs(a - b))) for a, b in zip(cy(*call_args), py(*call_args)))
        result["max_abs_diff"] = diff
    print(json.dumps(result, indent=2))


if __name__ == "__main__":
    main()
