"""Extremely randomized trees for QUANT features.

Each tree is grown on the full training set. At every node a fraction of
the features is sampled without replacement, each candidate gets a single
uniform threshold between its node-local min and max, and the candidate with
the largest Gini decrease wins. Tree ``i`` draws from its own stream seeded by
``(seed, i)``, so the fitted model does not depend on the worker count.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from ._parallel import pmap

__all__ = ["EnsembleConfig", "Tree", "TrainedEnsemble", "fit", "load_model", "predict", "save_model"]

FORMAT_VERSION = 1


@dataclass(frozen=True)
class EnsembleConfig:
    n_trees: int = 200
    feature_fraction: float = 0.1
    min_samples_leaf: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if not 0 < self.feature_fraction <= 1:
            raise ValueError("feature_fraction must be in (0, 1]")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a non-negative 64-bit integer")


@dataclass(eq=False)
class Tree:
    """Flat node arrays; ``feature == -1`` marks a leaf."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray  # (n_nodes, n_classes)

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by each row of ``X``."""
        node = np.zeros(X.shape[0], dtype=np.intp)
        rows = np.arange(X.shape[0])
        while True:
            feat = self.feature[node]
            inner = feat >= 0
            if not inner.any():
                return node
            r, nd = rows[inner], node[inner]
            go_left = X[r, feat[inner]] <= self.threshold[nd]
            node[inner] = np.where(go_left, self.left[nd], self.right[nd])

    def votes(self, X: np.ndarray) -> np.ndarray:
        # argmax takes the first maximum: the lexicographically smallest label
        return np.argmax(self.counts[self.apply(X)], axis=1)

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": [None if f < 0 else float(t) for f, t in zip(self.feature, self.threshold)],
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "counts": self.counts.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tree":
        return cls(
            np.asarray(d["feature"], dtype=np.intp),
            np.asarray([np.nan if t is None else t for t in d["threshold"]], dtype=np.float64),
            np.asarray(d["left"], dtype=np.intp),
            np.asarray(d["right"], dtype=np.intp),
            np.asarray(d["counts"], dtype=np.int64).reshape(len(d["feature"]), -1),
        )


@dataclass(eq=False)
class TrainedEnsemble:
    trees: list
    classes: tuple
    n_features: int
    config: EnsembleConfig

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "kind": "extra_trees",
            "classes": list(self.classes),
            "n_features": self.n_features,
            "config": asdict(self.config),
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainedEnsemble":
        if d.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {d.get('format_version')!r}")
        return cls(
            [Tree.from_dict(t) for t in d["trees"]],
            tuple(d["classes"]),
            int(d["n_features"]),
            EnsembleConfig(**d["config"]),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def _grow(XT, y, n_classes, cfg, tree_index):
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, tree_index]))
    n_features, m = XT.shape
    k = math.ceil(cfg.feature_fraction * n_features)
    msl = cfg.min_samples_leaf

    feature, threshold, left, right, counts = [], [], [], [], []

    def new_node(rows):
        feature.append(-1)
        threshold.append(np.nan)
        left.append(-1)
        right.append(-1)
        counts.append(np.bincount(y[rows], minlength=n_classes))
        return len(feature) - 1

    stack = [(new_node(np.arange(m)), np.arange(m))]
    while stack:
        node, rows = stack.pop()
        c = counts[node]
        if rows.shape[0] < 2 * msl or np.count_nonzero(c) <= 1:
            continue
        cand = rng.choice(n_features, size=k, replace=False).astype(np.intp)
        u = rng.random(k)
        pos, t = _kernels.best_split(XT, rows, cand, u, y, n_classes, msl)
        if pos < 0:
            continue
        f = int(cand[pos])
        mask = XT[f, rows] <= t
        lrows, rrows = rows[mask], rows[~mask]
        feature[node] = f
        threshold[node] = t
        left[node] = new_node(lrows)
        right[node] = new_node(rrows)
        # right pushed first so the left subtree is numbered first
        stack.append((right[node], rrows))
        stack.append((left[node], lrows))

    return Tree(
        np.asarray(feature, dtype=np.intp),
        np.asarray(threshold, dtype=np.float64),
        np.asarray(left, dtype=np.intp),
        np.asarray(right, dtype=np.intp),
        np.asarray(counts, dtype=np.int64),
    )


def fit(features, labels, cfg: EnsembleConfig | None = None,
        threads: int | None = None) -> TrainedEnsemble:
    """Grow ``cfg.n_trees`` trees on ``features`` (rows x features)."""
    cfg = cfg or EnsembleConfig()
    X = np.asarray(getattr(features, "values", features), dtype=np.float64)
    labels = [str(v) for v in labels]
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise ValueError(f"need a non-empty 2D feature matrix, got shape {X.shape}")
    if X.shape[0] != len(labels):
        raise ValueError(f"{X.shape[0]} rows but {len(labels)} labels")
    if not np.isfinite(X).all():
        raise ValueError("features contain non-finite values")
    classes = tuple(sorted(set(labels)))
    index = {c: i for i, c in enumerate(classes)}
    y = np.asarray([index[v] for v in labels], dtype=np.intp)
    XT = np.ascontiguousarray(X.T)
    trees = pmap(lambda i: _grow(XT, y, len(classes), cfg, i), range(cfg.n_trees), threads)
    return TrainedEnsemble(trees, classes, X.shape[1], cfg)


def predict(model: TrainedEnsemble, features) -> list[str]:
    """Plurality vote over trees; ties go to the lexicographically smallest label."""
    X = np.asarray(getattr(features, "values", features), dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(
            f"model expects {model.n_features} features, got shape {X.shape}")
    tally = np.zeros((X.shape[0], len(model.classes)), dtype=np.int64)
    rows = np.arange(X.shape[0])
    for tree in model.trees:
        np.add.at(tally, (rows, tree.votes(X)), 1)
    return [model.classes[i] for i in np.argmax(tally, axis=1)]


def save_model(model: TrainedEnsemble, path):
    with open(path, "w") as fh:
        fh.write(model.dumps())


def load_model(path) -> TrainedEnsemble:
    with open(path) as fh:
        return TrainedEnsemble.from_dict(json.load(fh))
