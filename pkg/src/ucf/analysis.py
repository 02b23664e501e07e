"""Channel-correlation heatmaps and Nemenyi critical-difference rankings."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np
from scipy.stats import rankdata

from .data import LabeledDataset

__all__ = [
    "CorrelationMatrix",
    "RankTable",
    "average_ranks",
    "cdd_emit",
    "class_correlation",
    "cliques",
    "export_correlation_csv",
    "nemenyi_cd",
]

# Two-tailed Nemenyi critical values q_alpha (studentized range at infinite
# degrees of freedom divided by sqrt(2)). k = 2..10 from Demsar (2006), JMLR 7,
# Table 5; k = 11..20 from the same studentized-range construction, rounded to
# three decimals.
Q_TABLE = {
    0.05: (1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164,
           3.219, 3.268, 3.313, 3.354, 3.391, 3.426, 3.458, 3.489, 3.517, 3.544),
    0.10: (1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920,
           2.978, 3.030, 3.077, 3.120, 3.159, 3.196, 3.230, 3.261, 3.291, 3.319),
}


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    values: np.ndarray
    label: str
    n_instances: int
    degenerate: np.ndarray  # per channel: constant in at least one instance


def class_correlation(dataset: LabeledDataset, label: str) -> CorrelationMatrix:
    """Instance-averaged Pearson correlation between channels for one class.

    Pairs involving a constant channel (or one whose norm underflows) count
    as 0 and the channel is flagged.
    """
    X = dataset.X[dataset.y == str(label)]
    if X.shape[0] == 0:
        raise ValueError(f"class {label!r} not present in dataset")
    l, n = X.shape[1], X.shape[2]
    if l < 2:
        raise ValueError("correlation needs at least two channels")
    if n < 2:
        raise ValueError("correlation needs at least two time steps")
    total = np.zeros((l, l))
    degenerate = np.zeros(l, dtype=bool)
    for series in X:
        centred = series - series.mean(axis=1, keepdims=True)
        norm = np.sqrt((centred * centred).sum(axis=1))
        constant = (np.ptp(series, axis=1) == 0) | (norm == 0)
        degenerate |= constant
        scale = np.where(constant, 1.0, norm)
        unit = np.where(constant[:, None], 0.0, centred / scale[:, None])
        total += unit @ unit.T
    values = total / X.shape[0]
    values = np.clip((values + values.T) / 2, -1.0, 1.0)
    np.fill_diagonal(values, 1.0)
    return CorrelationMatrix(values, str(label), X.shape[0], degenerate)


def export_correlation_csv(path, corr: CorrelationMatrix, channel_names=None):
    l = corr.values.shape[0]
    names = channel_names or [f"ch{j}" for j in range(l)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["channel", *names])
        for name, row in zip(names, corr.values):
            w.writerow([name, *(repr(float(v)) for v in row)])


@dataclass(frozen=True, eq=False)
class RankTable:
    algorithms: tuple
    datasets: tuple
    accuracy: np.ndarray  # (k, N)
    ranks: np.ndarray  # (k, N), 1 = best
    average: np.ndarray  # (k,)


def average_ranks(scores, algorithms=None, datasets=None,
                  higher_is_better: bool = True) -> RankTable:
    """Rank ``k`` algorithms on each of ``N`` datasets (rows = algorithms).

    Ties share the mean of the tied positions.
    """
    A = np.asarray(scores, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError("scores must be a (k algorithms, N datasets) matrix")
    if np.isnan(A).any():
        raise ValueError("scores contain NaN")
    k, N = A.shape
    algorithms = tuple(algorithms or (f"alg{i}" for i in range(k)))
    datasets = tuple(datasets or (f"ds{j}" for j in range(N)))
    keyed = -A if higher_is_better else A
    ranks = np.column_stack([rankdata(keyed[:, j], method="average") for j in range(N)])
    return RankTable(algorithms, datasets, A, ranks, ranks.mean(axis=1))


def nemenyi_cd(k: int, N: int, alpha: float = 0.1) -> float:
    """Critical difference ``q_alpha(k) * sqrt(k (k + 1) / (6 N))``."""
    alpha = round(float(alpha), 10)
    if alpha not in Q_TABLE:
        raise ValueError(f"alpha must be one of {sorted(Q_TABLE)}")
    if not 2 <= k <= 20:
        raise ValueError(f"k={k} outside the bundled q table (2..20)")
    if N < 2:
        raise ValueError("need at least two datasets")
    return Q_TABLE[alpha][k - 2] * math.sqrt(k * (k + 1) / (6.0 * N))


def cliques(average, cd: float) -> list[tuple[int, ...]]:
    """Maximal runs of rank-sorted algorithms whose rank spread is below ``cd``.

    Returns tuples of algorithm indices; singletons are omitted.
    """
    avg = np.asarray(average, dtype=np.float64)
    order = np.argsort(avg, kind="stable")
    r = avg[order]
    out, last_end = [], -1
    for i in range(len(r)):
        j = i
        while j + 1 < len(r) and r[j + 1] - r[i] < cd:
            j += 1
        if j > i and j > last_end:
            out.append(tuple(int(a) for a in order[i:j + 1]))
            last_end = j
    return out


def cdd_emit(table: RankTable, cd: float, prefix) -> tuple[str, str]:
    """Write ``<prefix>.csv`` (rank and clique membership) and ``<prefix>.svg``."""
    groups = cliques(table.average, cd)
    csv_path, svg_path = f"{prefix}.csv", f"{prefix}.svg"
    order = np.argsort(table.average, kind="stable")
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["algorithm", "average_rank", "cliques"])
        for a in order:
            member = [str(g) for g, grp in enumerate(groups) if a in grp]
            w.writerow([table.algorithms[a], f"{table.average[a]:.6f}", ";".join(member)])
    with open(svg_path, "w") as fh:
        fh.write(_svg(table, cd, groups))
    return csv_path, svg_path


def _svg(table: RankTable, cd: float, groups) -> str:
    k = len(table.algorithms)
    width, left, right, top = 640, 160, 480, 60
    order = list(np.argsort(table.average, kind="stable"))
    half = (k + 1) // 2
    height = top + 40 + 18 * max(half, k - half) + 14 * len(groups) + 20

    def x(rank):
        return left + (right - left) * (rank - 1) / max(k - 1, 1)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<line x1="{x(1):.1f}" y1="{top}" x2="{x(k):.1f}" y2="{top}" stroke="black"/>',
    ]
    for r in range(1, k + 1):
        parts.append(f'<line x1="{x(r):.1f}" y1="{top - 5}" x2="{x(r):.1f}" y2="{top}" stroke="black"/>')
        parts.append(f'<text x="{x(r):.1f}" y="{top - 9}" text-anchor="middle">{r}</text>')
    parts.append(f'<line x1="{x(1):.1f}" y1="20" x2="{x(1 + cd):.1f}" y2="20" stroke="black" stroke-width="2"/>')
    parts.append(f'<text x="{x(1):.1f}" y="14">CD = {cd:.3f}</text>')
    bar_y = top + 8
    for grp in groups:
        ranks = [table.average[a] for a in grp]
        parts.append(f'<line x1="{x(min(ranks)) - 3:.1f}" y1="{bar_y}" x2="{x(max(ranks)) + 3:.1f}" '
                     f'y2="{bar_y}" stroke="black" stroke-width="3"/>')
        bar_y += 14
    base = bar_y + 14
    for pos, a in enumerate(order):
        r = table.average[a]
        name = escape(str(table.algorithms[a]))
        if pos < half:
            yy = base + 18 * pos
            parts.append(f'<polyline points="{x(r):.1f},{top} {x(r):.1f},{yy} {left - 10},{yy}" '
                         f'fill="none" stroke="black"/>')
            parts.append(f'<text x="{left - 14}" y="{yy + 4}" text-anchor="end">{name} ({r:.2f})</text>')
        else:
            yy = base + 18 * (k - 1 - pos)
            parts.append(f'<polyline points="{x(r):.1f},{top} {x(r):.1f},{yy} {right + 10},{yy}" '
                         f'fill="none" stroke="black"/>')
            parts.append(f'<text x="{right + 14}" y="{yy + 4}">({r:.2f}) {name}</text>')
    parts.append("</svg>\n")
    return "\n".join(parts)
