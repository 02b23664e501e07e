"""Slow, independent reference computations for checking the fast paths.

Nothing here calls into the kernels or the modules it is used to check.
"""

from __future__ import annotations

import cmath
import functools
import math

import numpy as np


def warping_paths(n: int, m: int):
    """Every boundary-anchored monotone path with diagonal/up/right steps."""
    def walk(i, j, path):
        if (i, j) == (n - 1, m - 1):
            yield path
            return
        for di, dj in ((1, 1), (1, 0), (0, 1)):
            a, b = i + di, j + dj
            if a < n and b < m:
                yield from walk(a, b, path + [(a, b)])
    yield from walk(0, 0, [(0, 0)])


@functools.lru_cache(maxsize=None)
def _path_table(n: int, m: int):
    """All paths as padded flat cell indices plus each path's band width."""
    paths = list(warping_paths(n, m))
    width = max(len(p) for p in paths)
    flat = np.full((len(paths), width), n * m, dtype=np.intp)  # pad points at a zero cell
    spread = np.empty(len(paths), dtype=np.intp)
    for r, path in enumerate(paths):
        flat[r, :len(path)] = [i * m + j for i, j in path]
        spread[r] = max(abs(i - j) for i, j in path)
    return flat, spread


def dtw_exhaustive(X, Y, radius=None) -> float:
    """Minimum over all warping paths of the summed squared multichannel cost.

    With ``radius`` only paths staying within ``|i - j| <= radius`` count.
    Each path is summed left to right, independently of any recurrence.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    n, m = X.shape[1], Y.shape[1]
    cost = ((X[:, :, None] - Y[:, None, :]) ** 2).sum(axis=0).ravel()
    flat, spread = _path_table(n, m)
    if radius is not None:
        flat = flat[spread <= radius]
        if flat.shape[0] == 0:
            return math.inf
    totals = np.append(cost, 0.0)[flat].sum(axis=1)
    return float(totals.min())


def dtw_independent_exhaustive(X, Y) -> float:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    return sum(dtw_exhaustive(X[k], Y[k]) for k in range(X.shape[0]))


def nn1_bruteforce(train_X, train_y, test_X, distance) -> list:
    """All-pairs scan, first minimum wins."""
    preds = []
    for q in test_X:
        d = [distance(q, r) for r in train_X]
        preds.append(train_y[int(np.argmin(d))])
    return preds


def dft_magnitude(z) -> list:
    """Direct-summation magnitude spectrum for frequencies 0..n//2."""
    n = len(z)
    return [abs(sum(z[t] * cmath.exp(-2j * math.pi * k * t / n) for t in range(n)))
            for k in range(n // 2 + 1)]


def quantile(values, p: float) -> float:
    """Linear interpolation between closest order statistics."""
    s = sorted(values)
    h = (len(s) - 1) * p
    lo = math.floor(h)
    hi = min(lo + 1, len(s) - 1)
    return s[lo] + (h - lo) * (s[hi] - s[lo])


def interval_quantiles(segment, divisor: int) -> list:
    seg = list(map(float, segment))
    k = max(1, -(-len(seg) // divisor))
    probs = [0.5] if k == 1 else [i / (k - 1) for i in range(k)]
    mean = sum(seg) / len(seg)
    out = [quantile(seg, p) for p in probs]
    return [v - mean if i % 2 == 1 else v for i, v in enumerate(out)]


def interval_bounds(n: int, depth: int) -> list:
    """(start, end, shifted) per interval, via np.array_split piece sizes."""
    out = []
    for d in range(depth + 1):
        sizes = [len(p) for p in np.array_split(np.arange(n), 2 ** d)]
        starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
        tiles = [(int(s), int(s + w)) for s, w in zip(starts, sizes)]
        out.extend((s, e, False) for s, e in tiles)
        for s, e in tiles:
            h = (e - s) // 2
            if e - s >= 2 and e + h <= n:
                out.append((s + h, e + h, True))
    return out


def quant_feature_count(n: int, depth: int = 6, divisor: int = 4) -> int:
    total = 0
    for length in (n, n - 1, n - 2, n // 2 + 1):
        for s, e, _ in interval_bounds(length, depth):
            total += max(1, -(-(e - s) // divisor))
    return total
