"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from scalarflat import kernels


def jets_case(n_points=200_000, n_knots=7, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-5, 5, n_points)
    y = rng.uniform(1e-3, 5, n_points)
    knots = np.sort(rng.uniform(-2, 2, n_knots))
    coefs = rng.normal(size=(n_knots, 2))
    return lambda be: be.ray_jets_sum(x, y, knots, coefs)


def sor_case(n=48):
    h = 1.0 / n
    ys = h * np.arange(n + 1)
    fixed = np.ones((n + 1, 2 * n + 1), dtype=bool)
    fixed[3:-1, 1:-1] = False

    def run(be):
        u = np.zeros(fixed.shape)
        u[2, n // 2 : n + n // 2] = 1.0
        return be.sor_solve(u, fixed, ys, h, 1.7, 1e-10, 100_000)

    return run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = [n for n in ("python", "compiled") if n in kernels.BACKENDS]
    if "compiled" not in names:
        print("compiled extension not built; timing the python backend only")
    cases = {"ray_jets_sum (2e5 points, 7 knots)": jets_case(), "sor_solve (97x49 grid, tol 1e-10)": sor_case()}
    print(f"{'kernel':38s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, fn in cases.items():
        times = []
        for name in names:
            be = kernels.get_backend(name)
            fn(be)  # warm up
            times.append(min(timeit.repeat(lambda: fn(be), number=1, repeat=args.repeat)))
        row = f"{label:38s}" + "".join(f"{t * 1e3:10.1f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
