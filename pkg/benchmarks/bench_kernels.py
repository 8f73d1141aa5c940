"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--n 1000000] [--grid 200] [--repeat 5]

Prints the best-of-repeat wall time per kernel and the speedup, then the
largest disagreement between the two backends on the same inputs.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from nharm import _backend
from nharm import phasecore as pc


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1_000_000, help="terms per sum")
    ap.add_argument("--grid", type=int, default=200, help="grid points for the grid kernel")
    ap.add_argument("--grid-n", type=int, default=16384, help="terms per grid point")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--alpha", default="0.5")
    args = ap.parse_args(argv)

    if _backend.compiled is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
    backends = {"python": _backend.fallback, "cython": _backend.compiled}
    exp = pc.HarmonicExponent(args.alpha)
    a_hi, a_lo = exp.dd
    y = pc.cycle_coefficient("0.3")
    ys = pc.cycle_coefficients(np.linspace(0.05, 0.5, args.grid))
    cps = np.array([args.n // 4, args.n // 2, args.n], dtype=np.int64)
    gcps = np.array([args.grid_n // 2, args.grid_n], dtype=np.int64)
    p = backends["python"].powers_dd(a_hi, a_lo, 1, args.n)
    pg = (p[0][:args.grid_n], p[1][:args.grid_n])

    cases = {
        "powers_dd": lambda k: k.powers_dd(a_hi, a_lo, 1, args.n),
        "frac_products": lambda k: k.frac_products(*p, *y),
        "phase_sums": lambda k: k.phase_sums(*p, *y, None, cps),
        "phase_sums_grid": lambda k: k.phase_sums_grid(*pg, *ys, None, gcps),
    }
    print(f"active backend: {_backend.NAME}; n={args.n}, grid={args.grid}x{args.grid_n}, best of {args.repeat}")
    print(f"{'kernel':<18}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}{'max diff':>12}")
    for name, fn in cases.items():
        tp, outp = best_of(lambda: fn(backends["python"]), args.repeat)
        tc, outc = best_of(lambda: fn(backends["cython"]), args.repeat)
        a = np.asarray(outp[0] if isinstance(outp, tuple) else outp)
        b = np.asarray(outc[0] if isinstance(outc, tuple) else outc)
        diff = np.abs(a - b)
        if name == "frac_products":
            diff = np.minimum(diff, 1 - diff)
        print(f"{name:<18}{tp:>12.4f}{tc:>12.4f}{tp / tc:>10.1f}{float(diff.max()):>12.2e}")


if __name__ == "__main__":
    main()
