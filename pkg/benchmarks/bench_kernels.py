"""Compiled vs pure-Python kernel timings.

    python benchmarks/bench_kernels.py [--repeat 5]

Also checks that both backends agree before timing them.
"""
import argparse
import timeit

import numpy as np

from robinlap._backend import available_backends


def workloads():
    rng = np.random.default_rng(7)
    z = rng.uniform(0.1, 40, 2000) + 1j * rng.uniform(-5, 5, 2000)
    ells = np.arange(0, 2001, dtype=np.int64)
    n = 8192
    lower = -np.ones(n - 1, dtype=complex)
    upper = -np.ones(n - 1, dtype=complex)
    diag = np.full(n, 2.0 + 1j)
    rhs = rng.normal(size=n) + 0j
    return {
        "log_j_array(nu=3.5, 2000 pts)": lambda k: k.log_j_array(3.5, z),
        "weyl_denominators(l<=2000, k=e^{i pi/4})": lambda k: k.weyl_denominators(
            0.0, ells, np.exp(0.25j * np.pi), 1.0),
        "tridiag_solve(N=8192)": lambda k: k.tridiag_solve(lower, diag, upper, rhs),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the Python backend is available")
    print(f"{'kernel':45s} " + " ".join(f"{b:>12s}" for b in backends) + "   speedup")
    for name, job in workloads().items():
        results = {b: np.asarray(job(k)) for b, k in backends.items()}
        if len(results) == 2:
            a, b = results["python"], results["cython"]
            scale = np.maximum(np.abs(a), 1.0)
            assert np.max(np.abs(a - b) / scale) < 1e-10, name
        times = {b: min(timeit.repeat(lambda: job(k), number=1, repeat=args.repeat))
                 for b, k in backends.items()}
        row = " ".join(f"{times[b] * 1e3:10.2f}ms" for b in backends)
        speed = f"{times['python'] / times['cython']:8.1f}x" if len(times) == 2 else ""
        print(f"{name:45s} {row} {speed}")


if __name__ == "__main__":
    main()
