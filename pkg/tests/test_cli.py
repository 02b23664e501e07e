import json

import pytest

from ucf.cli import main
from ucf.data import load_ts
from conftest import DATA

TRAIN, TEST = str(DATA / "BasicMotions_TRAIN.ts"), str(DATA / "BasicMotions_TEST.ts")


def test_unknown_subcommand(capsys):
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


def test_missing_file(capsys, tmp_path):
    with pytest.raises(SystemExit) as err:
        main(["fuse", str(tmp_path / "absent.ts"), str(tmp_path / "o.ts")])
    assert err.value.code == 2
    assert "no such file" in capsys.readouterr().err


@pytest.mark.parametrize("fusion", ["mean", "median", "barycenter"])
def test_fuse(tmp_path, fusion):
    out = tmp_path / "f.ts"
    assert main(["fuse", "--fusion", fusion, TRAIN, str(out)]) == 0
    D, src = load_ts(out), load_ts(TRAIN)
    assert D.n_channels == 1 and D.n_timepoints == 100
    assert list(D.y) == list(src.y) and D.class_labels == src.class_labels


def test_train_predict(tmp_path, capsys):
    model, preds = tmp_path / "m.json", tmp_path / "p.csv"
    assert main(["train", "--algo", "ucf", "--fusion", "mean", "--quant-depth", "4", "--n-trees", "20",
                 "--znorm", "--train", TRAIN, "--model", str(model)]) == 0
    assert main(["predict", "--model", str(model), "--test", TEST, "--out", str(preds)]) == 0
    assert "accuracy" in capsys.readouterr().err
    lines = preds.read_text().splitlines()
    assert lines[0] == "instance,true,predicted" and len(lines) == 41


def test_runtime_error_is_reported(tmp_path, capsys):
    rc = main(["train", "--algo", "concat", "--quant-depth", "12", "--train", TRAIN,
               "--model", str(tmp_path / "m.json")])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_bench(tmp_path):
    cfg = {"schema_version": 1, "output_dir": "o", "seeds": [0], "quant": {"depth": 4},
           "ensemble": {"n_trees": 5},
           "datasets": [{"name": "BM", "train": TRAIN, "test": TEST, "algorithms": ["ucf-median"]}]}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert main(["bench", "--config", str(path)]) == 0
    assert (tmp_path / "o" / "BM" / "ucf-median" / "predictions.csv").exists()


def test_analyze_corr(tmp_path):
    assert main(["analyze-corr", TRAIN, "--out", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("BasicMotions_*.csv"))) == 4


def test_cdd(tmp_path):
    wide = tmp_path / "acc.csv"
    wide.write_text("dataset,A,B,C\nd1,0.9,0.8,0.7\nd2,0.8,0.9,0.6\nd3,0.95,0.7,0.5\n")
    assert main(["cdd", "--results", str(wide), "--out", str(tmp_path / "cd")]) == 0
    assert (tmp_path / "cd.csv").exists() and (tmp_path / "cd.svg").exists()


def test_selftest():
    assert main(["selftest"]) == 0
