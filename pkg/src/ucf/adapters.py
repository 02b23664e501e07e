"""Multivariate-to-univariate strategies that reuse the QUANT classifier."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

from . import trees
from ._parallel import derive_seed, pmap
from .data import LabeledDataset, as_series
from .quant import QuantConfig, quant_transform

__all__ = [
    "QuantPipeline",
    "concatenate_channels",
    "concatenate_dataset",
    "majority_vote",
    "per_channel_ensemble_fit",
    "per_channel_ensemble_predict",
]


def concatenate_channels(X) -> np.ndarray:
    """Channels laid end to end in index order: length ``n * l``."""
    return as_series(X).reshape(-1)


def concatenate_dataset(dataset: LabeledDataset) -> LabeledDataset:
    m = len(dataset)
    return dataset.replace(X=dataset.X.reshape(m, 1, -1))


@dataclass
class QuantPipeline:
    """QUANT features followed by an extremely randomized trees ensemble."""

    quant: QuantConfig = field(default_factory=QuantConfig)
    ensemble: trees.EnsembleConfig = field(default_factory=trees.EnsembleConfig)
    model: trees.TrainedEnsemble | None = None

    def transform(self, X):
        return quant_transform(X, self.quant.depth, self.quant.divisor)

    def fit(self, X, y, threads=None, features=None) -> "QuantPipeline":
        F = self.transform(X) if features is None else features
        self.model = trees.fit(F, y, self.ensemble, threads=threads)
        return self

    def predict(self, X, features=None) -> list[str]:
        if self.model is None:
            raise RuntimeError("pipeline is not fitted")
        F = self.transform(X) if features is None else features
        return trees.predict(self.model, F)

    def to_dict(self) -> dict:
        return {
            "quant": {"depth": self.quant.depth, "divisor": self.quant.divisor},
            "model": None if self.model is None else self.model.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QuantPipeline":
        model = trees.TrainedEnsemble.from_dict(d["model"]) if d["model"] else None
        ens = model.config if model else trees.EnsembleConfig()
        return cls(QuantConfig(**d["quant"]), ens, model)


def channel_seeds(master: int, n_channels: int) -> list[int]:
    return [derive_seed(master, j) for j in range(n_channels)]


def per_channel_ensemble_fit(dataset: LabeledDataset, quant: QuantConfig | None = None,
                             ensemble: trees.EnsembleConfig | None = None, *,
                             seeds: list[int] | None = None,
                             threads: int | None = None) -> list[QuantPipeline]:
    """One QUANT pipeline per channel.

    Channel ``j`` uses ``seeds[j]``, by default derived from
    ``(ensemble.seed, j)``.
    """
    quant = quant or QuantConfig()
    ensemble = ensemble or trees.EnsembleConfig()
    l = dataset.n_channels
    seeds = channel_seeds(ensemble.seed, l) if seeds is None else list(seeds)
    if len(seeds) != l:
        raise ValueError(f"{len(seeds)} seeds for {l} channels")

    def one(j):
        pipe = QuantPipeline(quant, replace(ensemble, seed=seeds[j]))
        return pipe.fit(dataset.X[:, j, :], dataset.y)

    return pmap(one, range(l), threads)


def majority_vote(votes) -> str:
    """Most frequent label; ties go to the lexicographically smallest."""
    tally = Counter(votes)
    top = max(tally.values())
    return min(label for label, c in tally.items() if c == top)


def per_channel_ensemble_predict(pipelines: list[QuantPipeline],
                                 dataset: LabeledDataset) -> list[str]:
    if len(pipelines) != dataset.n_channels:
        raise ValueError(
            f"{len(pipelines)} channel pipelines but data has {dataset.n_channels} channels")
    per_channel = [p.predict(dataset.X[:, j, :]) for j, p in enumerate(pipelines)]
    return [majority_vote(v) for v in zip(*per_channel)]
