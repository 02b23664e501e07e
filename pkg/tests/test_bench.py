import csv
import io
import json

import pytest

from ucf.bench import (
    SUMMARY_COLUMNS,
    ExperimentConfig,
    ExperimentError,
    ExperimentResult,
    emit_results,
    load_bench_config,
    run_bench,
    run_experiment,
)
from ucf.data import write_ts
from ucf.quant import QuantConfig
from ucf.trees import EnsembleConfig
from conftest import DATA

TRAIN, TEST = str(DATA / "BasicMotions_TRAIN.ts"), str(DATA / "BasicMotions_TEST.ts")
FAST = dict(quant=QuantConfig(depth=4), ensemble=EnsembleConfig(n_trees=20), seeds=(0, 1, 2))


def test_emit_empty():
    assert emit_results([], "csv") == ",".join(SUMMARY_COLUMNS) + "\n"
    assert emit_results([], "markdown").count("\n") == 2


@pytest.fixture(scope="module")
def ucf_result():
    return run_experiment(ExperimentConfig(TRAIN, TEST, "ucf-median", normalize=True, **FAST))


def test_emit_one_row(ucf_result):
    rows = list(csv.reader(io.StringIO(emit_results([ucf_result], "csv"))))
    assert rows[0] == SUMMARY_COLUMNS
    assert len(rows) == 2 and rows[1][:3] == ["UCF (median)", "BasicMotions", "3"]


def test_json_round_trip(ucf_result, tmp_path):
    doc = json.loads(emit_results([ucf_result], "json", tmp_path / "s.json"))
    assert ExperimentResult.from_dict(doc["results"][0]) == ucf_result
    assert json.loads((tmp_path / "s.json").read_text()) == doc


def test_accuracy_recounted(ucf_result):
    for acc, pred in zip(ucf_result.accuracy, ucf_result.predictions):
        hits = sum(p == t for p, t in zip(pred, ucf_result.true_labels))
        assert acc == 100.0 * hits / len(ucf_result.true_labels)
    assert min(ucf_result.accuracy) > 70


def test_phase_times_within_wall(ucf_result):
    first = ucf_result.timing[0]
    assert all(v >= 0 for t in ucf_result.timing for v in t.values())
    assert first["transform_s"] + sum(t["train_s"] + t["test_s"] for t in ucf_result.timing) \
        <= ucf_result.wall_s
    assert all(t["total_s"] == pytest.approx(t["transform_s"] + t["train_s"] + t["test_s"])
               for t in ucf_result.timing)


def test_self_match(tmp_path, basicmotions):
    train, _ = basicmotions
    small = train.subset(range(0, 40, 4))
    a, b = tmp_path / "s_TRAIN.ts", tmp_path / "s_TEST.ts"
    a.write_text(write_ts(small))
    b.write_text(write_ts(small))
    r = run_experiment(ExperimentConfig(str(a), str(b), "dtw-d", seeds=(0, 1)))
    assert r.accuracy == [100.0, 100.0]


def test_reproducible_across_threads():
    cfg = dict(algo="channel-ensemble", subsample={"train": 12, "test": 8}, **FAST)
    one = run_experiment(ExperimentConfig(TRAIN, TEST, threads=1, **cfg))
    many = run_experiment(ExperimentConfig(TRAIN, TEST, threads=4, **cfg))
    assert one.predictions == many.predictions


def test_phase_tagged_errors(tmp_path):
    with pytest.raises(ExperimentError) as err:
        run_experiment(ExperimentConfig(TRAIN, TEST, "ucf-mean", quant=QuantConfig(depth=6), seeds=(0,)))
    assert err.value.phase == "transform"
    with pytest.raises(ExperimentError) as err:
        run_experiment(ExperimentConfig(str(tmp_path / "nope.ts"), TEST, "ucf-mean"))
    assert err.value.phase == "ingest"


def _config(tmp_path, **over):
    doc = {"schema_version": 1, "output_dir": "out", "seeds": [0], "normalize": True,
           "quant": {"depth": 4}, "ensemble": {"n_trees": 5},
           "datasets": [{"name": "BM", "train": TRAIN, "test": TEST,
                         "algorithms": ["ucf-mean", "dtw-i"], "subsample": {"train": 8, "test": 8}}]}
    doc.update(over)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    return path


def test_run_bench_writes_layout(tmp_path):
    results = run_bench(_config(tmp_path))
    assert [r.algorithm for r in results] == ["ucf-mean", "dtw-i"]
    for algo in ("ucf-mean", "dtw-i"):
        for f in ("results.json", "predictions.csv", "timing.csv"):
            assert (tmp_path / "out" / "BM" / algo / f).exists()
    for ext in ("csv", "json", "md"):
        assert (tmp_path / "out" / f"summary.{ext}").exists()


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        load_bench_config(_config(tmp_path, schema_version=2))
    with pytest.raises(FileNotFoundError):
        load_bench_config(_config(tmp_path, datasets=[{"train": "x.ts", "test": "y.ts"}]))
    with pytest.raises(ValueError):
        ExperimentConfig(TRAIN, TEST, "svm")
