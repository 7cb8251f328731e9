#!/usr/bin/env python3
"""Benchmark the eigensolver kernels: compiled extension vs pure Python,
with numpy.linalg.eigh as the reference point.

Run:  python3 benchmarks/bench_eigen.py [--sizes 4,8,16,32,64] [--repeats 20]

The two kernels implement the same Householder + implicit-shift QL
pipeline, so the table isolates the cost of the interpreter loop.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from posmap import _eigen_py

try:
    from posmap import _eigen_cy
except ImportError:
    _eigen_cy = None


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2.0


def time_solver(solver, matrices: list[np.ndarray]) -> tuple[float, float]:
    """Best-of-run mean time per call and worst eigenvalue error vs numpy."""
    start = time.perf_counter()
    worst = 0.0
    for h in matrices:
        vals, vecs = solver(h)
        ref = np.linalg.eigvalsh(h)
        worst = max(worst, float(np.abs(vals - ref).max()))
        # cheap sanity: the vectors must actually diagonalize h
        residual = np.abs(h @ vecs - vecs * vals).max()
        worst = max(worst, float(residual))
    elapsed = (time.perf_counter() - start) / len(matrices)
    return elapsed, worst


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="4,8,16,32,64",
                        help="comma-separated matrix sizes")
    parser.add_argument("--repeats", type=int, default=20,
                        help="matrices per size")
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(args.seed)

    solvers = [("numpy.linalg.eigh", lambda h: np.linalg.eigh(h)),
               ("pure python", _eigen_py.eigh)]
    if _eigen_cy is not None:
        solvers.append(("compiled", _eigen_cy.eigh))
    else:
        print("note: compiled extension not built; showing fallback only")

    header = f"{'n':>5} " + "".join(f"{name:>22}" for name, _ in solvers)
    print(header)
    print("-" * len(header))
    for n in sizes:
        matrices = [random_hermitian(n, rng) for _ in range(args.repeats)]
        cells = []
        for name, solver in solvers:
            per_call, worst = time_solver(solver, matrices)
            if worst > 1e-8 * max(1.0, n):
                raise SystemExit(
                    f"{name} drifted from the reference at n={n}: {worst:.2e}")
            cells.append(f"{per_call * 1e6:>18.1f} us")
        print(f"{n:>5} " + "".join(cells))
    print("\nall kernels agree with numpy.linalg within 1e-8")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
