"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Each kernel runs on identical inputs in both backends; the script reports
the best wall time of ``--repeat`` runs, the speed-up, and the largest
difference between the two outputs.
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from zetaclt import _backend, primes


def _best(fn, repeat: int) -> tuple[float, np.ndarray]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases():
    ps = primes.cached_primes(10**4)
    w = 0.5
    M = 256
    ang = 2 * np.pi * np.arange(M) / M
    L = -np.log1p(-w * np.exp(1j * ang))
    uu, vv = np.meshgrid(np.linspace(-3, 3, 121), np.linspace(-3, 3, 121))
    u, v = uu.ravel(), vv.ravel()
    return {
        "sample_euler (20k samples, p < 1e4)": lambda k: k.sample_euler(0.95, ps, 7, 0, 20000),
        "dirichlet_multi (N = 1e6, 1 sigma)": lambda k: k.dirichlet_multi(1.5e6, 0.95, 0.0, 1, 10**6),
        "dirichlet_multi (N = 1e6, 10 sigmas)": lambda k: k.dirichlet_multi(1.5e6, 0.95, 0.2, 10, 10**6),
        "char_fn_grid (121^2 points, 256 nodes)": lambda k: k.char_fn_grid(u, v, L.real.copy(), L.imag.copy()),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="write the results here as well")
    args = ap.parse_args(argv)

    try:
        compiled = _backend.get("compiled")
    except ImportError:
        print("compiled extension not built; nothing to compare")
        return 1
    fallback = _backend.get("python")

    rows = []
    print(f"{'kernel':42s} {'compiled':>10s} {'python':>10s} {'speed-up':>9s} {'max diff':>10s}")
    for name, fn in cases().items():
        fn(compiled)  # warm caches (prime logs, factor tables)
        tc, oc = _best(lambda: fn(compiled), args.repeat)
        tp, op = _best(lambda: fn(fallback), args.repeat)
        diff = float(np.max(np.abs(np.asarray(oc) - np.asarray(op))))
        rows.append({"kernel": name, "compiled_s": tc, "python_s": tp, "speedup": tp / tc, "max_diff": diff})
        print(f"{name:42s} {tc:10.4f} {tp:10.4f} {tp / tc:8.1f}x {diff:10.2e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
