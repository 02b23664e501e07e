"""QUANT features: quantiles over dyadic intervals of four series representations.

The column layout is representation-major (raw, diff1, diff2, fourier), then
interval in :func:`dyadic_intervals` order, then quantile index. It depends
only on ``(n, depth, divisor)``.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .data import LabeledDataset

__all__ = [
    "REPRESENTATIONS",
    "FeatureMatrix",
    "Interval",
    "QuantConfig",
    "dyadic_intervals",
    "export_features_csv",
    "feature_columns",
    "interval_quantiles",
    "make_representation",
    "quant_transform",
    "representation_length",
]

REPRESENTATIONS = ("raw", "diff1", "diff2", "fourier")


class Interval(NamedTuple):
    start: int
    end: int
    depth: int
    shifted: bool

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class QuantConfig:
    depth: int = 6
    divisor: int = 4

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.divisor < 1:
            raise ValueError("divisor must be >= 1")


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    values: np.ndarray
    columns: tuple

    @property
    def shape(self):
        return self.values.shape


def dyadic_intervals(n: int, max_depth: int) -> list[Interval]:
    """Tiling intervals of ``[0, n)`` at depths ``0..max_depth`` plus half-shifted copies.

    At depth ``d`` the range is cut into ``2**d`` pieces whose sizes differ by
    at most one, the leftmost pieces taking the remainder. Each piece of
    length >= 2 also contributes a copy shifted right by half its length,
    unless the copy would run past ``n``. Within a depth, unshifted pieces
    come first.
    """
    if n < 2:
        raise ValueError(f"series length must be >= 2, got {n}")
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    if 2 ** max_depth > n:
        raise ValueError(f"depth {max_depth} needs at least {2 ** max_depth} points, got {n}")
    out = []
    for depth in range(max_depth + 1):
        pieces = 2 ** depth
        base, extra = divmod(n, pieces)
        bounds = [0]
        for p in range(pieces):
            bounds.append(bounds[-1] + base + (1 if p < extra else 0))
        tiles = [Interval(bounds[p], bounds[p + 1], depth, False) for p in range(pieces)]
        out.extend(tiles)
        for t in tiles:
            half = t.length // 2
            if t.length >= 2 and t.end + half <= n:
                out.append(Interval(t.start + half, t.end + half, depth, True))
    return out


def representation_length(n: int, kind: str) -> int:
    return {"raw": n, "diff1": n - 1, "diff2": n - 2, "fourier": n // 2 + 1}[kind]


def make_representation(z, kind: str) -> np.ndarray:
    """Raw series, first/second differences, or the unnormalized rFFT magnitude.

    Works along the last axis, so a ``(m, n)`` batch is transformed row-wise.
    """
    z = np.asarray(z, dtype=np.float64)
    n = z.shape[-1]
    need = {"raw": 1, "diff1": 2, "diff2": 3, "fourier": 1}
    if kind not in need:
        raise ValueError(f"unknown representation {kind!r}")
    if n < need[kind]:
        raise ValueError(f"series of length {n} is too short for {kind}")
    if kind == "raw":
        return z.copy()
    if kind == "diff1":
        return np.diff(z, n=1, axis=-1)
    if kind == "diff2":
        return np.diff(z, n=2, axis=-1)
    return np.abs(np.fft.rfft(z, axis=-1))


def _n_quantiles(length: int, divisor: int) -> int:
    return max(1, math.ceil(length / divisor))


def _probabilities(k: int) -> np.ndarray:
    if k == 1:
        return np.array([0.5])
    return np.arange(k) / (k - 1)


def _linear_quantiles(sorted_seg: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Linear-interpolation quantiles of pre-sorted rows (numpy's "linear" rule)."""
    n = sorted_seg.shape[-1]
    virtual = (n - 1) * probs
    lo = np.floor(virtual).astype(np.intp)
    hi = np.minimum(lo + 1, n - 1)
    t = virtual - lo
    a, b = sorted_seg[..., lo], sorted_seg[..., hi]
    diff = b - a
    # same two-sided lerp as numpy, exact at both ends
    return np.where(t >= 0.5, b - diff * (1 - t), a + diff * t)


def interval_quantiles(segment, divisor: int) -> np.ndarray:
    """Evenly spaced quantiles of ``segment`` with odd positions mean-centred.

    ``segment`` may be 1D or a batch whose last axis is the interval; the
    result has ``ceil(length / divisor)`` entries along it (at least one, the
    median). Each row is computed independently of the rest of the batch.
    """
    seg = np.asarray(segment, dtype=np.float64)
    if seg.shape[-1] < 1:
        raise ValueError("empty segment")
    if divisor < 1:
        raise ValueError("divisor must be >= 1")
    length = seg.shape[-1]
    k = _n_quantiles(length, divisor)
    q = _linear_quantiles(np.sort(seg, axis=-1), _probabilities(k))
    if k > 1:
        # cumulative sum fixes the summation order per row
        mean = np.cumsum(seg, axis=-1)[..., -1:] / length
        q[..., 1::2] -= mean
    return q


def _check_depth(n: int, depth: int):
    for kind in REPRESENTATIONS:
        length = representation_length(n, kind)
        if length < 2 or 2 ** depth > length:
            raise ValueError(
                f"series length {n} is too short for depth {depth}: "
                f"{kind} has {length} points, fewer than the {2 ** depth} intervals")


@functools.lru_cache(maxsize=64)
def feature_columns(n: int, depth: int = 6, divisor: int = 4) -> tuple[str, ...]:
    """Column ids ``rep:d<depth>:<start>-<end>[s]:q<index>`` for series length ``n``."""
    _check_depth(n, depth)
    cols = []
    for kind in REPRESENTATIONS:
        for iv in dyadic_intervals(representation_length(n, kind), depth):
            tag = f"{kind}:d{iv.depth}:{iv.start}-{iv.end}{'s' if iv.shifted else ''}"
            cols.extend(f"{tag}:q{i}" for i in range(_n_quantiles(iv.length, divisor)))
    return tuple(cols)


def _representation_features(R: np.ndarray, depth: int, divisor: int) -> np.ndarray:
    """Quantile features of every interval of ``R`` (rows = series), in interval order.

    Intervals of equal length are gathered into one ``(m, count, length)``
    block so each distinct length costs a single quantile call.
    """
    intervals = dyadic_intervals(R.shape[1], depth)
    widths = [_n_quantiles(iv.length, divisor) for iv in intervals]
    offsets = np.concatenate([[0], np.cumsum(widths)])
    out = np.empty((R.shape[0], offsets[-1]))
    by_length: dict[int, list[int]] = {}
    for idx, iv in enumerate(intervals):
        by_length.setdefault(iv.length, []).append(idx)
    for length, members in by_length.items():
        starts = np.array([intervals[i].start for i in members])
        windows = R[:, starts[:, None] + np.arange(length)]
        block = interval_quantiles(windows, divisor)
        k = block.shape[-1]
        for j, i in enumerate(members):
            out[:, offsets[i]:offsets[i] + k] = block[:, j]
    return out


def quant_transform(data, depth: int = 6, divisor: int = 4) -> FeatureMatrix:
    """Feature matrix for a univariate dataset or a ``(m, n)`` array."""
    if isinstance(data, LabeledDataset):
        if data.n_channels != 1:
            raise ValueError(f"QUANT needs univariate input, got {data.n_channels} channels")
        Z = data.X[:, 0, :]
    else:
        Z = np.asarray(data, dtype=np.float64)
        if Z.ndim == 3:
            if Z.shape[1] != 1:
                raise ValueError(f"QUANT needs univariate input, got {Z.shape[1]} channels")
            Z = Z[:, 0, :]
        if Z.ndim != 2:
            raise ValueError(f"expected (m, n) input, got shape {Z.shape}")
    columns = feature_columns(Z.shape[1], depth, divisor)
    blocks = [_representation_features(make_representation(Z, kind), depth, divisor)
              for kind in REPRESENTATIONS]
    values = np.ascontiguousarray(np.concatenate(blocks, axis=1))
    assert values.shape[1] == len(columns)
    return FeatureMatrix(values, columns)


def export_features_csv(path, features: FeatureMatrix):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(features.columns)
        for row in features.values:
            writer.writerow(repr(float(v)) for v in row)
