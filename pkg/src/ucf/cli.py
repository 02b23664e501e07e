"""Command-line interface: ``ucf <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys

import numpy as np

from . import __version__
from ._parallel import resolve_threads

ALGO_CHOICES = ["ucf", "concat", "channel-ensemble", "dtw-d", "dtw-i"]


def _add_fusion(p):
    p.add_argument("--fusion", choices=["mean", "median", "barycenter"], default="median")
    p.add_argument("--dba-epochs", type=int, default=30)
    p.add_argument("--dba-step", type=float, default=0.05, help="initial DBA step size")
    p.add_argument("--dba-final-step", type=float, default=0.005)
    p.add_argument("--dba-tol", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=0)


def _add_common(p):
    p.add_argument("--znorm", action="store_true", help="z-normalize every channel first")
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: $UCF_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ucf", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fuse", help="fuse a multivariate .ts file into a univariate one")
    _add_fusion(p)
    _add_common(p)
    p.add_argument("input")
    p.add_argument("output")

    p = sub.add_parser("train", help="train a classifier and save it as JSON")
    p.add_argument("--algo", choices=ALGO_CHOICES, default="ucf")
    _add_fusion(p)
    _add_common(p)
    p.add_argument("--quant-depth", type=int, default=6)
    p.add_argument("--quant-div", type=int, default=4)
    p.add_argument("--n-trees", type=int, default=200)
    p.add_argument("--feature-fraction", type=float, default=0.1)
    p.add_argument("--dtw-window", type=float, default=None)
    p.add_argument("--dtw-agg", choices=["sum", "mean"], default="sum")
    p.add_argument("--train", required=True, help="training .ts file")
    p.add_argument("--model", required=True, help="output model file")

    p = sub.add_parser("predict", help="predict a .ts file with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out", help="predictions CSV (default: stdout)")
    p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("bench", help="run a JSON benchmark configuration")
    p.add_argument("--config", required=True)
    p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("analyze-corr", help="per-class channel correlation heatmaps as CSV")
    p.add_argument("input", help=".ts file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--znorm", action="store_true")

    p = sub.add_parser("cdd", help="average ranks and a Nemenyi critical difference diagram")
    p.add_argument("--results", required=True,
                   help="wide CSV (dataset, then one column per algorithm) or a bench output directory")
    p.add_argument("--metric", choices=["accuracy", "time"], default="accuracy")
    p.add_argument("--alpha", type=float, choices=[0.05, 0.1], default=0.1)
    p.add_argument("--out", required=True, help="output prefix for .csv and .svg")

    p = sub.add_parser("selftest", help="run the oracle checks")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _require(parser, *paths):
    for path in paths:
        if not os.path.exists(path):
            parser.error(f"no such file: {path}")


def _barycenter(args):
    from .fusion import BarycenterParams
    return BarycenterParams(args.dba_epochs, args.dba_step, args.dba_final_step, args.dba_tol, args.seed)


def cmd_fuse(args):
    from .data import load_ts, write_ts
    from .fusion import FusionStrategy, fuse_dataset
    from .pipelines import prepare

    D = prepare(load_ts(args.input), args.znorm)
    fused = fuse_dataset(D, FusionStrategy(args.fusion, _barycenter(args)), resolve_threads(args.threads))
    with open(args.output, "w") as fh:
        write_ts(fused, fh)
    print(f"wrote {len(fused)} univariate series of length {fused.n_timepoints} to {args.output}")


def cmd_train(args):
    from .data import load_ts
    from .dtw import DtwConfig
    from .pipelines import make_classifier, prepare, save_model
    from .quant import QuantConfig
    from .trees import EnsembleConfig

    algo = f"ucf-{args.fusion}" if args.algo == "ucf" else args.algo
    D = prepare(load_ts(args.train, "train"), args.znorm)
    clf = make_classifier(
        algo,
        quant=QuantConfig(args.quant_depth, args.quant_div),
        ensemble=EnsembleConfig(args.n_trees, args.feature_fraction, 1, args.seed),
        barycenter=_barycenter(args),
        dtw=DtwConfig(args.dtw_window, args.dtw_agg),
    )
    clf.fit(D, resolve_threads(args.threads))
    save_model(clf, args.model, normalize=args.znorm, n_channels=D.n_channels,
               n_timepoints=D.n_timepoints)
    print(f"trained {algo} on {len(D)} series; model saved to {args.model}")


def cmd_predict(args):
    from .data import load_ts
    from .pipelines import load_model, prepare

    clf, meta = load_model(args.model)
    D = prepare(load_ts(args.test, "test"), meta["normalize"])
    if meta.get("n_channels") not in (None, D.n_channels):
        raise ValueError(f"model expects {meta['n_channels']} channels, data has {D.n_channels}")
    pred = clf.predict(D, resolve_threads(args.threads))
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["instance", "true", "predicted"])
        for i, (t, p) in enumerate(zip(D.y, pred)):
            w.writerow([i, t, p])
    finally:
        if args.out:
            out.close()
    acc = 100.0 * np.mean([t == p for t, p in zip(D.y, pred)])
    print(f"accuracy {acc:.2f}% on {len(D)} series", file=sys.stderr)


def cmd_bench(args):
    from .bench import emit_results, run_bench

    results = run_bench(args.config, args.threads)
    print(emit_results(results, "markdown"))


def cmd_analyze_corr(args):
    from .analysis import class_correlation, export_correlation_csv
    from .data import load_ts
    from .pipelines import prepare

    D = prepare(load_ts(args.input), args.znorm)
    os.makedirs(args.out, exist_ok=True)
    for label in D.class_labels:
        if not (D.y == label).any():
            continue
        corr = class_correlation(D, label)
        path = os.path.join(args.out, f"{D.name or 'dataset'}_{label}.csv")
        export_correlation_csv(path, corr)
        off = corr.values[~np.eye(len(corr.values), dtype=bool)]
        flag = " (constant channel present)" if corr.degenerate.any() else ""
        print(f"{label}: {corr.n_instances} series, mean off-diagonal r = {off.mean():.3f}{flag} -> {path}")


def _read_scores(path, metric):
    if os.path.isdir(path):
        path = os.path.join(path, "summary.csv")
        column = "accuracy_mean" if metric == "accuracy" else "total_s"
        table: dict = {}
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                table.setdefault(row["algorithm"], {})[row["dataset"]] = float(row[column])
        algos = list(table)
        datasets = sorted({d for v in table.values() for d in v})
        scores = [[table[a][d] for d in datasets] for a in algos]
        return algos, datasets, scores
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    algos = rows[0][1:]
    datasets = [r[0] for r in rows[1:]]
    scores = [[float(r[1 + a]) for r in rows[1:]] for a in range(len(algos))]
    return algos, datasets, scores


def cmd_cdd(args):
    from .analysis import average_ranks, cdd_emit, cliques, nemenyi_cd

    algos, datasets, scores = _read_scores(args.results, args.metric)
    table = average_ranks(scores, algos, datasets, higher_is_better=args.metric == "accuracy")
    cd = nemenyi_cd(len(algos), len(datasets), args.alpha)
    csv_path, svg_path = cdd_emit(table, cd, args.out)
    for a in np.argsort(table.average, kind="stable"):
        print(f"{table.average[a]:6.3f}  {algos[a]}")
    print(f"CD(alpha={args.alpha}, k={len(algos)}, N={len(datasets)}) = {cd:.4f}; "
          f"{len(cliques(table.average, cd))} cliques -> {csv_path}, {svg_path}")


def cmd_selftest(args):
    from .selftest import run

    if not run(args.seed):
        raise SystemExit(1)


COMMANDS = {
    "fuse": cmd_fuse, "train": cmd_train, "predict": cmd_predict, "bench": cmd_bench,
    "analyze-corr": cmd_analyze_corr, "cdd": cmd_cdd, "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    for attr in ("input", "train", "test", "model", "config", "results"):
        path = getattr(args, attr, None)
        if path is not None and not (args.command == "train" and attr == "model"):
            _require(parser, path)
    try:
        COMMANDS[args.command](args)
    except SystemExit:
        raise
    except Exception as exc:  # noqa: BLE001
        print(f"ucf {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
