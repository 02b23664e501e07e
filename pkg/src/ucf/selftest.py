"""Oracle checks runnable from the command line (``ucf selftest``)."""

from __future__ import annotations

import time

import numpy as np

from . import oracles
from ._kernels import BACKEND
from .analysis import Q_TABLE, nemenyi_cd
from .dtw import dtw, dtw_dependent, dtw_independent, nn1_classify
from .data import LabeledDataset
from .fusion import barycenter_objective, dba
from .quant import dyadic_intervals, interval_quantiles, make_representation, quant_transform

QUANT_FEATURES_400_6_4 = 4614


def _rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


def check_dtw(rng, pairs=200):
    worst = 0.0
    for _ in range(pairs):
        l, n, m = rng.integers(1, 4), rng.integers(1, 7), rng.integers(1, 7)
        X, Y = rng.normal(size=(l, n)), rng.normal(size=(l, m))
        worst = max(worst, _rel(dtw_dependent(X, Y), oracles.dtw_exhaustive(X, Y)),
                    _rel(dtw_independent(X, Y), oracles.dtw_independent_exhaustive(X, Y)),
                    _rel(dtw(X[0], Y[0]), oracles.dtw_exhaustive(X[0], Y[0])))
    return worst <= 1e-9, f"max relative error {worst:.2e} over {pairs} pairs"


def check_nn1(rng):
    X = rng.normal(size=(8, 2, 5))
    y = list("aabbccdd")
    train = LabeledDataset(X[:5], y[:5], ("a", "b", "c", "d"))
    test = LabeledDataset(X[5:], y[5:], train.class_labels)
    got = nn1_classify(train, test, "dtw_i")
    want = oracles.nn1_bruteforce(train.X, list(train.y), test.X, oracles.dtw_independent_exhaustive)
    return got == want, f"{got} vs brute force {want}"


def check_dba(rng, instances=20):
    ok = True
    for _ in range(instances):
        X = rng.normal(size=(rng.integers(1, 6), rng.integers(2, 20)))
        res = dba(X)
        ok &= barycenter_objective(res.series, X) <= res.initial_objective
        ok &= all(b >= a for a, b in zip(res.best_objectives[1:], res.best_objectives))
    return ok, f"objective never above the mean initialisation on {instances} instances"


def check_quant(rng):
    ok = quant_transform(rng.normal(size=(2, 400))).values.shape[1] == QUANT_FEATURES_400_6_4
    ok &= oracles.quant_feature_count(400, 6, 4) == QUANT_FEATURES_400_6_4
    got = [(iv.start, iv.end, iv.shifted) for iv in dyadic_intervals(37, 4)]
    ok &= got == oracles.interval_bounds(37, 4)
    z = rng.normal(size=13)
    ok &= np.allclose(make_representation(z, "fourier"), oracles.dft_magnitude(z), atol=1e-10)
    seg = rng.normal(size=11)
    ok &= np.allclose(interval_quantiles(seg, 3), oracles.interval_quantiles(seg, 3), atol=1e-12)
    return bool(ok), "intervals, Fourier magnitude, quantiles and feature count"


def check_qtable():
    from scipy.stats import studentized_range

    worst = max(abs(q - studentized_range.ppf(1 - a, k, np.inf) / np.sqrt(2))
                for a, row in Q_TABLE.items() for k, q in enumerate(row, start=2))
    ok = worst < 2e-3 and abs(nemenyi_cd(5, 8) - 2 * nemenyi_cd(5, 32)) < 1e-12
    return ok, f"q table within {worst:.1e} of the studentized range"


def run(seed: int = 0, stream=print) -> bool:
    rng = np.random.default_rng(seed)
    checks = [
        ("dtw vs exhaustive paths", lambda: check_dtw(rng)),
        ("1nn vs brute force", lambda: check_nn1(rng)),
        ("dba improvement", lambda: check_dba(rng)),
        ("quant layout and values", lambda: check_quant(rng)),
        ("nemenyi q table", check_qtable),
    ]
    stream(f"kernel backend: {BACKEND}")
    all_ok = True
    for name, fn in checks:
        t0 = time.perf_counter()
        ok, detail = fn()
        all_ok &= ok
        stream(f"{'PASS' if ok else 'FAIL'}  {name}: {detail} ({time.perf_counter() - t0:.2f} s)")
    return all_ok
