import os
from pathlib import Path

import numpy as np
import pytest

from ucf.data import load_ts

HERE = Path(__file__).parent
DATA = HERE / "data"


def uea_dir() -> Path:
    return Path(os.environ.get("UCF_DATA_DIR", HERE.parent / "data" / "uea"))


def uea_paths(name):
    root = uea_dir() / name
    return root / f"{name}_TRAIN.ts", root / f"{name}_TEST.ts"


@pytest.fixture(scope="session")
def basicmotions():
    return (load_ts(DATA / "BasicMotions_TRAIN.ts"), load_ts(DATA / "BasicMotions_TEST.ts"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# ------------------------------------------------------------ acceptance log

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
