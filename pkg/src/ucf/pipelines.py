"""End-to-end classifiers for every compared strategy.

Each classifier splits work into ``transform`` (deterministic, cacheable
across seeds) and ``fit_transformed`` / ``predict_transformed``, so the
benchmark can time the phases separately.
"""

from __future__ import annotations

import json
from dataclasses import asdict, replace

import numpy as np

from . import trees
from .adapters import channel_seeds, concatenate_dataset, majority_vote
from .data import LabeledDataset, normalize_dataset
from .dtw import DtwConfig, nn1_classify
from .fusion import BarycenterParams, FusionStrategy, fuse_dataset
from .quant import QuantConfig, quant_transform

__all__ = [
    "ALGORITHMS",
    "ChannelEnsembleClassifier",
    "ConcatClassifier",
    "NN1DTWClassifier",
    "UCFClassifier",
    "load_model",
    "make_classifier",
    "save_model",
]

MODEL_FORMAT_VERSION = 1

ALGORITHMS = {
    "ucf-mean": "UCF (mean)",
    "ucf-median": "UCF (median)",
    "ucf-barycenter": "UCF (barycenter)",
    "concat": "QUANT (concatenation)",
    "channel-ensemble": "QUANT (ensemble)",
    "dtw-d": "DTW_D",
    "dtw-i": "DTW_I",
}


class _QuantBased:
    def __init__(self, quant=None, ensemble=None):
        self.quant = quant or QuantConfig()
        self.ensemble = ensemble or trees.EnsembleConfig()
        self.model = None

    def _features(self, D: LabeledDataset):
        return quant_transform(D, self.quant.depth, self.quant.divisor)

    def fit_transformed(self, F, y, threads=None):
        self.model = trees.fit(F, y, self.ensemble, threads=threads)
        return self

    def predict_transformed(self, F, threads=None):
        return trees.predict(self.model, F)

    def fit(self, D, threads=None):
        return self.fit_transformed(self.transform(D, threads), D.y, threads)

    def predict(self, D, threads=None):
        return self.predict_transformed(self.transform(D, threads), threads)

    def _base_dict(self):
        return {"quant": asdict(self.quant), "ensemble": asdict(self.ensemble),
                "model": self.model.to_dict() if self.model else None}

    def _load_base(self, d):
        self.quant = QuantConfig(**d["quant"])
        self.ensemble = trees.EnsembleConfig(**d["ensemble"])
        self.model = trees.TrainedEnsemble.from_dict(d["model"]) if d["model"] else None


class UCFClassifier(_QuantBased):
    """Fuse channels into one series, then QUANT."""

    def __init__(self, fusion: FusionStrategy | None = None, quant=None, ensemble=None):
        super().__init__(quant, ensemble)
        self.fusion = fusion or FusionStrategy()

    @property
    def algo(self):
        return f"ucf-{self.fusion.kind}"

    def fuse(self, D, threads=None):
        return fuse_dataset(D, self.fusion, threads)

    def transform(self, D, threads=None):
        return self._features(self.fuse(D, threads))

    def to_dict(self):
        d = self._base_dict()
        d["fusion"] = {"kind": self.fusion.kind, "barycenter": asdict(self.fusion.barycenter)}
        return d

    @classmethod
    def from_dict(cls, d):
        fusion = FusionStrategy(d["fusion"]["kind"], BarycenterParams(**d["fusion"]["barycenter"]))
        obj = cls(fusion)
        obj._load_base(d)
        return obj


class ConcatClassifier(_QuantBased):
    """Lay the channels end to end, then QUANT."""

    algo = "concat"

    def transform(self, D, threads=None):
        return self._features(concatenate_dataset(D))

    def to_dict(self):
        return self._base_dict()

    @classmethod
    def from_dict(cls, d):
        obj = cls()
        obj._load_base(d)
        return obj


class ChannelEnsembleClassifier:
    """One QUANT pipeline per channel, combined by hard majority vote."""

    algo = "channel-ensemble"

    def __init__(self, quant=None, ensemble=None, seeds=None):
        self.quant = quant or QuantConfig()
        self.ensemble = ensemble or trees.EnsembleConfig()
        self.seeds = None if seeds is None else list(seeds)
        self.models = None

    def transform(self, D, threads=None):
        return [quant_transform(D.X[:, j, :], self.quant.depth, self.quant.divisor)
                for j in range(D.n_channels)]

    def fit_transformed(self, Fs, y, threads=None):
        seeds = self.seeds if self.seeds is not None else channel_seeds(self.ensemble.seed, len(Fs))
        if len(seeds) != len(Fs):
            raise ValueError(f"{len(seeds)} seeds for {len(Fs)} channels")
        # trees inside each channel are parallel; channels run in order
        self.models = [trees.fit(F, y, replace(self.ensemble, seed=s), threads=threads)
                       for F, s in zip(Fs, seeds)]
        return self

    def predict_transformed(self, Fs, threads=None):
        if len(Fs) != len(self.models):
            raise ValueError(f"{len(self.models)} channel models but {len(Fs)} channels")
        votes = [trees.predict(m, F) for m, F in zip(self.models, Fs)]
        return [majority_vote(v) for v in zip(*votes)]

    def fit(self, D, threads=None):
        return self.fit_transformed(self.transform(D), D.y, threads)

    def predict(self, D, threads=None):
        return self.predict_transformed(self.transform(D), threads)

    def to_dict(self):
        return {"quant": asdict(self.quant), "ensemble": asdict(self.ensemble),
                "seeds": self.seeds,
                "models": [m.to_dict() for m in self.models] if self.models else None}

    @classmethod
    def from_dict(cls, d):
        obj = cls(QuantConfig(**d["quant"]), trees.EnsembleConfig(**d["ensemble"]), d.get("seeds"))
        if d.get("models"):
            obj.models = [trees.TrainedEnsemble.from_dict(m) for m in d["models"]]
        return obj


class NN1DTWClassifier:
    """1NN under dependent or independent DTW; fitting just stores the data."""

    def __init__(self, dependent: bool = True, dtw: DtwConfig | None = None):
        self.dependent = dependent
        self.dtw = dtw or DtwConfig()
        self.train = None

    @property
    def algo(self):
        return "dtw-d" if self.dependent else "dtw-i"

    def transform(self, D, threads=None):
        return D

    def fit_transformed(self, D, y, threads=None):
        self.train = D
        return self

    def predict_transformed(self, D, threads=None):
        return nn1_classify(self.train, D, "dtw_d" if self.dependent else "dtw_i",
                            self.dtw, threads=threads)

    def fit(self, D, threads=None):
        return self.fit_transformed(D, D.y, threads)

    def predict(self, D, threads=None):
        return self.predict_transformed(D, threads)

    def to_dict(self):
        t = self.train
        return {"dtw": asdict(self.dtw), "dependent": self.dependent,
                "train": None if t is None else {
                    "X": t.X.tolist(), "y": list(t.y), "class_labels": list(t.class_labels),
                    "name": t.name}}

    @classmethod
    def from_dict(cls, d):
        obj = cls(d["dependent"], DtwConfig(**d["dtw"]))
        if d.get("train"):
            t = d["train"]
            obj.train = LabeledDataset(np.asarray(t["X"]), t["y"], tuple(t["class_labels"]), t["name"])
        return obj


def make_classifier(algo: str, *, quant: QuantConfig | None = None,
                    ensemble: trees.EnsembleConfig | None = None,
                    barycenter: BarycenterParams | None = None,
                    dtw: DtwConfig | None = None):
    if algo.startswith("ucf-"):
        return UCFClassifier(FusionStrategy(algo[4:], barycenter or BarycenterParams()), quant, ensemble)
    if algo == "concat":
        return ConcatClassifier(quant, ensemble)
    if algo == "channel-ensemble":
        return ChannelEnsembleClassifier(quant, ensemble)
    if algo in ("dtw-d", "dtw-i"):
        return NN1DTWClassifier(algo == "dtw-d", dtw)
    raise ValueError(f"unknown algorithm {algo!r}; choose from {sorted(ALGORITHMS)}")


_LOADERS = {
    "ucf-mean": UCFClassifier, "ucf-median": UCFClassifier, "ucf-barycenter": UCFClassifier,
    "concat": ConcatClassifier, "channel-ensemble": ChannelEnsembleClassifier,
    "dtw-d": NN1DTWClassifier, "dtw-i": NN1DTWClassifier,
}


def save_model(clf, path, *, normalize: bool = False, n_channels=None, n_timepoints=None):
    doc = {"format_version": MODEL_FORMAT_VERSION, "algo": clf.algo, "normalize": normalize,
           "n_channels": n_channels, "n_timepoints": n_timepoints, "classifier": clf.to_dict()}
    with open(path, "w") as fh:
        json.dump(doc, fh, separators=(",", ":"))


def load_model(path):
    """Returns ``(classifier, metadata)``."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {doc.get('format_version')!r}")
    clf = _LOADERS[doc["algo"]].from_dict(doc["classifier"])
    return clf, {k: v for k, v in doc.items() if k != "classifier"}


def prepare(D: LabeledDataset, normalize: bool) -> LabeledDataset:
    return normalize_dataset(D) if normalize else D
