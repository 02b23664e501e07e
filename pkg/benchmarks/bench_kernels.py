"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one row per kernel and size with the median time of each backend, the
speedup, and whether both returned identical results.
"""

import argparse
import statistics
import time

import numpy as np

from ucf._kernels import AVAILABLE


def _time(fn, repeat):
    out, runs = None, []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs), out


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b), equal_nan=True)


def cases(rng):
    for n in (100, 400, 1000):
        x, y = rng.normal(size=(3, n)), rng.normal(size=(3, n))
        yield f"dtw_cost l=3 n={n}", lambda k, x=x, y=y: k.dtw_cost(x, y)
        yield f"dtw_cost l=3 n={n} band 10%", lambda k, x=x, y=y, r=n // 10: k.dtw_cost(x, y, r)
    for n in (100, 400):
        z, s = rng.normal(size=n), rng.normal(size=n)
        yield f"dtw_subgradient n={n}", lambda k, z=z, s=s: k.dtw_subgradient(z, s)
    for m, F in ((100, 1000), (300, 4614)):
        XT = np.ascontiguousarray(rng.normal(size=(F, m)))
        rows = np.arange(m, dtype=np.intp)
        cand = rng.choice(F, size=int(np.ceil(0.1 * F)), replace=False).astype(np.intp)
        u = rng.random(len(cand))
        y = rng.integers(0, 4, size=m).astype(np.intp)
        yield f"best_split m={m} F={F}", lambda k, a=(XT, rows, cand, u, y): k.best_split(*a, 4, 1)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if "cython" not in AVAILABLE:
        print("compiled extension not built; only the numpy backend is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':32s} {'cython':>10s} {'numpy':>10s} {'speedup':>8s}  identical")
    for name, fn in cases(rng):
        tp, outp = _time(lambda: fn(AVAILABLE["numpy"]), args.repeat)
        if "cython" in AVAILABLE:
            tc, outc = _time(lambda: fn(AVAILABLE["cython"]), args.repeat)
            print(f"{name:32s} {tc * 1e3:8.2f}ms {tp * 1e3:8.2f}ms {tp / tc:7.1f}x  {_same(outc, outp)}")
        else:
            print(f"{name:32s} {'-':>10s} {tp * 1e3:8.2f}ms")


if __name__ == "__main__":
    main()
