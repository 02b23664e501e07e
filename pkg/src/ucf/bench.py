"""Experiment runner: ingest, normalize, transform, train, predict, report.

Results go to ``<out>/<dataset>/<algo>/{results.json,predictions.csv,timing.csv}``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import statistics
import time
from dataclasses import asdict, dataclass, field, replace

from . import trees
from .data import LabeledDataset, load_ts
from .dtw import DtwConfig
from .fusion import BarycenterParams
from .pipelines import ALGORITHMS, make_classifier, prepare
from .quant import QuantConfig

__all__ = [
    "CONFIG_SCHEMA_VERSION",
    "ExperimentConfig",
    "ExperimentError",
    "ExperimentResult",
    "emit_results",
    "load_bench_config",
    "run_bench",
    "run_experiment",
    "write_experiment",
]

log = logging.getLogger(__name__)

CONFIG_SCHEMA_VERSION = 1
DETERMINISTIC = ("dtw-d", "dtw-i")


class ExperimentError(RuntimeError):
    """A module error, tagged with the phase it happened in."""

    def __init__(self, phase: str, cause: Exception):
        self.phase = phase
        super().__init__(f"[{phase}] {type(cause).__name__}: {cause}")


@dataclass
class ExperimentConfig:
    train_path: str
    test_path: str
    algo: str
    dataset: str = ""
    normalize: bool = False
    seeds: tuple = tuple(range(10))
    quant: QuantConfig = field(default_factory=QuantConfig)
    ensemble: trees.EnsembleConfig = field(default_factory=trees.EnsembleConfig)
    barycenter: BarycenterParams = field(default_factory=BarycenterParams)
    dtw: DtwConfig = field(default_factory=DtwConfig)
    subsample: dict | None = None  # {"train": n, "test": n}: first n instances
    output_dir: str | None = None
    threads: int | None = None

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algo!r}")
        self.seeds = tuple(int(s) for s in self.seeds)
        if not self.seeds:
            raise ValueError("at least one seed is required")


@dataclass
class ExperimentResult:
    algorithm: str
    dataset: str
    seeds: list
    accuracy: list  # percent, one per seed
    predictions: list  # one list of labels per seed
    true_labels: list
    timing: list  # per seed: transform_s, train_s, test_s, total_s
    ingest_s: float = 0.0
    wall_s: float = 0.0

    @property
    def display_name(self) -> str:
        return ALGORITHMS.get(self.algorithm, self.algorithm)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentResult":
        return cls(**d)


def _accuracy(pred, truth) -> float:
    correct = sum(p == t for p, t in zip(pred, truth))
    return 100.0 * correct / len(truth)


def _phase(name, fn, *args):
    try:
        t0 = time.perf_counter()
        out = fn(*args)
        return out, time.perf_counter() - t0
    except ExperimentError:
        raise
    except Exception as exc:  # noqa: BLE001
        raise ExperimentError(name, exc) from exc


def _load(cfg: ExperimentConfig):
    train, test = load_ts(cfg.train_path, "train"), load_ts(cfg.test_path, "test")
    if set(train.class_labels) != set(test.class_labels):
        raise ValueError("train and test splits declare different label sets")
    if cfg.subsample:
        train = train.subset(range(min(cfg.subsample.get("train", len(train)), len(train))))
        test = test.subset(range(min(cfg.subsample.get("test", len(test)), len(test))))
    return prepare(train, cfg.normalize), prepare(test, cfg.normalize)


def run_experiment(cfg: ExperimentConfig, data: tuple[LabeledDataset, LabeledDataset] | None = None
                   ) -> ExperimentResult:
    """Run one algorithm on one dataset for every seed.

    Transforms (fusion, QUANT features) do not depend on the classifier seed
    and are computed once; their time is charged to every seed. The 1NN
    baselines are deterministic and run once.
    """
    wall0 = time.perf_counter()
    if data is None:
        (train, test), ingest = _phase("ingest", _load, cfg)
    else:
        train, test = data
        ingest = 0.0
    name = cfg.dataset or train.name
    clf = make_classifier(cfg.algo, quant=cfg.quant, ensemble=cfg.ensemble,
                          barycenter=cfg.barycenter, dtw=cfg.dtw)
    Ttr, t_tr = _phase("transform", clf.transform, train, cfg.threads)
    Tte, t_te = _phase("transform", clf.transform, test, cfg.threads)
    transform_s = t_tr + t_te

    accuracy, predictions, timing = [], [], []
    cached = None
    for seed in cfg.seeds:
        if cfg.algo in DETERMINISTIC and cached is not None:
            pred, train_s, test_s = cached
        else:
            if hasattr(clf, "ensemble"):
                clf.ensemble = replace(cfg.ensemble, seed=seed)
            _, train_s = _phase("train", clf.fit_transformed, Ttr, train.y, cfg.threads)
            pred, test_s = _phase("test", clf.predict_transformed, Tte, cfg.threads)
            cached = (pred, train_s, test_s)
        predictions.append(list(pred))
        accuracy.append(_accuracy(pred, test.y))
        timing.append({"transform_s": transform_s, "train_s": train_s, "test_s": test_s,
                       "total_s": transform_s + train_s + test_s})
        log.info("%s %s seed=%d acc=%.2f", name, cfg.algo, seed, accuracy[-1])

    return ExperimentResult(cfg.algo, name, list(cfg.seeds), accuracy, predictions,
                            [str(v) for v in test.y], timing, ingest,
                            time.perf_counter() - wall0)


def predictions_csv(result: ExperimentResult) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["seed", "instance", "true", "predicted"])
    for seed, pred in zip(result.seeds, result.predictions):
        for i, (t, p) in enumerate(zip(result.true_labels, pred)):
            w.writerow([seed, i, t, p])
    return out.getvalue()


def write_experiment(result: ExperimentResult, output_dir) -> str:
    path = os.path.join(output_dir, result.dataset, result.algorithm)
    os.makedirs(path, exist_ok=True)
    with open(os.path.join(path, "results.json"), "w") as fh:
        json.dump(result.to_dict(), fh, indent=1)
    with open(os.path.join(path, "predictions.csv"), "w", newline="") as fh:
        fh.write(predictions_csv(result))
    with open(os.path.join(path, "timing.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["seed", "transform_s", "train_s", "test_s", "total_s"])
        for seed, t in zip(result.seeds, result.timing):
            w.writerow([seed, t["transform_s"], t["train_s"], t["test_s"], t["total_s"]])
    return path


SUMMARY_COLUMNS = ["algorithm", "dataset", "n_seeds", "accuracy_mean", "accuracy_std",
                   "transform_s", "train_s", "test_s", "total_s"]


def summarize(result: ExperimentResult) -> dict:
    acc = result.accuracy
    med = {k: statistics.median(t[k] for t in result.timing)
           for k in ("transform_s", "train_s", "test_s", "total_s")}
    return {
        "algorithm": result.display_name,
        "dataset": result.dataset,
        "n_seeds": len(acc),
        "accuracy_mean": statistics.fmean(acc),
        "accuracy_std": statistics.stdev(acc) if len(acc) > 1 else 0.0,
        **med,
    }


def emit_results(results: list[ExperimentResult], fmt: str = "csv", path=None) -> str:
    """One row per (algorithm, dataset): mean/std accuracy, median phase times."""
    rows = [summarize(r) for r in results]
    if fmt == "csv":
        out = io.StringIO()
        w = csv.DictWriter(out, SUMMARY_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        text = out.getvalue()
    elif fmt == "json":
        text = json.dumps({"columns": SUMMARY_COLUMNS, "rows": rows,
                           "results": [r.to_dict() for r in results]}, indent=1)
    elif fmt in ("markdown", "markdown-table", "md"):
        lines = ["| Dataset | Algorithm | Accuracy | Time |", "|---|---|---|---|"]
        for r in rows:
            lines.append(f"| {r['dataset']} | {r['algorithm']} | "
                         f"{r['accuracy_mean']:.2f} ± {r['accuracy_std']:.2f} | "
                         f"{_fmt_time(r['total_s'])} |")
        text = "\n".join(lines) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def _fmt_time(seconds: float) -> str:
    if seconds < 60:
        return f"{seconds:.2f} s"
    if seconds < 3600:
        return f"{seconds / 60:.2f} min"
    return f"{seconds / 3600:.2f} h"


# ------------------------------------------------------------------ config

def _sub(base, overrides):
    return replace(base, **overrides) if overrides else base


def load_bench_config(path) -> tuple[list[ExperimentConfig], str]:
    """Expand a JSON bench config into experiments; returns ``(configs, output_dir)``."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != CONFIG_SCHEMA_VERSION:
        raise ValueError(f"config schema_version must be {CONFIG_SCHEMA_VERSION}")
    root = os.path.dirname(os.path.abspath(path))

    def resolve(p):
        p = os.path.expandvars(p)
        return p if os.path.isabs(p) else os.path.join(root, p)

    quant = QuantConfig(**doc.get("quant", {}))
    ensemble = trees.EnsembleConfig(**doc.get("ensemble", {}))
    bary = BarycenterParams(**doc.get("dba", {}))
    dtw = DtwConfig(**doc.get("dtw", {}))
    seeds = tuple(doc.get("seeds", range(10)))
    out = resolve(doc.get("output_dir", "results"))
    configs = []
    for ds in doc["datasets"]:
        for p in (ds["train"], ds["test"]):
            if not os.path.exists(resolve(p)):
                raise FileNotFoundError(resolve(p))
        for algo in ds.get("algorithms", doc.get("algorithms", list(ALGORITHMS))):
            configs.append(ExperimentConfig(
                train_path=resolve(ds["train"]), test_path=resolve(ds["test"]), algo=algo,
                dataset=ds.get("name", ""), normalize=ds.get("normalize", doc.get("normalize", False)),
                seeds=tuple(ds.get("seeds", seeds)),
                quant=_sub(quant, ds.get("quant")),
                ensemble=_sub(ensemble, ds.get("ensemble")),
                barycenter=_sub(bary, ds.get("dba")),
                dtw=_sub(dtw, ds.get("dtw")),
                subsample=ds.get("subsample"), output_dir=out,
                threads=doc.get("threads")))
    return configs, out


def run_bench(path, threads: int | None = None) -> list[ExperimentResult]:
    configs, out = load_bench_config(path)
    cache: dict = {}
    results = []
    for cfg in configs:
        if threads is not None:
            cfg.threads = threads
        key = (cfg.train_path, cfg.test_path, cfg.normalize, str(cfg.subsample))
        if key not in cache:
            t0 = time.perf_counter()
            cache[key] = (_phase("ingest", _load, cfg)[0], time.perf_counter() - t0)
        data, ingest = cache[key]
        result = run_experiment(cfg, data)
        result.ingest_s = ingest
        result.wall_s += ingest
        write_experiment(result, out)
        results.append(result)
    os.makedirs(out, exist_ok=True)
    for fmt, ext in (("csv", "csv"), ("json", "json"), ("markdown", "md")):
        emit_results(results, fmt, os.path.join(out, f"summary.{ext}"))
    return results
