"""Channel fusion: collapse an ``(l, n)`` series into one length-``n`` series."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._parallel import derive_seed, pmap
from .data import LabeledDataset, as_series

__all__ = [
    "BarycenterParams",
    "BarycenterResult",
    "DivergenceError",
    "FusionStrategy",
    "barycenter_objective",
    "dba",
    "fuse",
    "fuse_barycenter",
    "fuse_dataset",
    "fuse_mean",
    "fuse_median",
]


class DivergenceError(FloatingPointError):
    """The barycenter iterate became non-finite (step size too large)."""


@dataclass(frozen=True)
class BarycenterParams:
    max_epochs: int = 30
    initial_step: float = 0.05
    final_step: float = 0.005
    tolerance: float = 1e-5
    seed: int = 0

    def __post_init__(self):
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if not self.initial_step >= self.final_step > 0:
            raise ValueError("need initial_step >= final_step > 0")
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")

    def step(self, epoch: int) -> float:
        """Linearly decayed step size for a 0-based epoch."""
        if self.max_epochs == 1:
            return self.initial_step
        frac = epoch / (self.max_epochs - 1)
        return self.initial_step - (self.initial_step - self.final_step) * frac


@dataclass(frozen=True)
class FusionStrategy:
    kind: str = "mean"
    barycenter: BarycenterParams = field(default_factory=BarycenterParams)

    def __post_init__(self):
        if self.kind not in ("mean", "median", "barycenter"):
            raise ValueError(f"unknown fusion kind {self.kind!r}")


def fuse_mean(X) -> np.ndarray:
    """Pointwise arithmetic mean over channels."""
    return as_series(X).mean(axis=0)


def fuse_median(X) -> np.ndarray:
    """Pointwise median over channels (midpoint of the two central values for even l)."""
    return np.median(as_series(X), axis=0)


def barycenter_objective(z, X) -> float:
    """Sum over channels of the DTW cost between ``z`` and each channel."""
    z = np.ascontiguousarray(z, dtype=np.float64)[None, :]
    total = 0.0
    for chan in as_series(X):
        total = total + _kernels.dtw_cost(z, chan[None, :])
    return total


@dataclass
class BarycenterResult:
    series: np.ndarray
    initial_objective: float
    epoch_objectives: list = field(default_factory=list)
    best_objectives: list = field(default_factory=list)

    @property
    def objective(self) -> float:
        return self.best_objectives[-1] if self.best_objectives else self.initial_objective


def dba(X, params: BarycenterParams | None = None) -> BarycenterResult:
    """Stochastic subgradient DTW barycenter of the channels of ``X``.

    Starts at the pointwise mean. Each epoch visits the channels in a seeded
    random order and takes one subgradient step per channel. The objective
    is evaluated exactly at every epoch end and the lowest-objective
    epoch-end iterate is returned.
    """
    params = params or BarycenterParams()
    X = as_series(X)
    rng = np.random.default_rng(params.seed)
    z = X.mean(axis=0)
    f0 = barycenter_objective(z, X)
    result = BarycenterResult(series=z.copy(), initial_objective=f0)
    best, prev = f0, f0
    if f0 == 0.0:
        return result

    for epoch in range(params.max_epochs):
        step = params.step(epoch)
        for j in rng.permutation(X.shape[0]):
            _, grad = _kernels.dtw_subgradient(z, X[j])
            with np.errstate(over="ignore", invalid="ignore"):
                z = z - step * grad
            if not np.isfinite(z).all():
                raise DivergenceError(f"barycenter diverged in epoch {epoch} (step {step})")
        f = barycenter_objective(z, X)
        result.epoch_objectives.append(f)
        if f < best:
            best = f
            result.series = z.copy()
        result.best_objectives.append(best)
        if prev - f < params.tolerance * prev:
            break
        prev = f
    return result


def fuse_barycenter(X, params: BarycenterParams | None = None) -> np.ndarray:
    return dba(X, params).series


def fuse(X, strategy: FusionStrategy) -> np.ndarray:
    if strategy.kind == "mean":
        return fuse_mean(X)
    if strategy.kind == "median":
        return fuse_median(X)
    return fuse_barycenter(X, strategy.barycenter)


def fuse_dataset(dataset: LabeledDataset, strategy: FusionStrategy,
                 threads: int | None = None) -> LabeledDataset:
    """Fuse every instance; barycenter seeds derive from (seed, instance index)."""
    if strategy.kind == "mean":
        Z = dataset.X.mean(axis=1)
    elif strategy.kind == "median":
        Z = np.median(dataset.X, axis=1)
    else:
        base = strategy.barycenter

        def one(i):
            p = BarycenterParams(base.max_epochs, base.initial_step, base.final_step,
                                 base.tolerance, derive_seed(base.seed, i))
            return fuse_barycenter(dataset.X[i], p)

        Z = np.stack(pmap(one, range(len(dataset)), threads))
    return dataset.replace(X=Z[:, None, :])
