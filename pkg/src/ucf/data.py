"""Series and dataset containers, `.ts` / long-CSV ingestion, z-normalization.

A multivariate series is a float64 array of shape ``(n_channels, n_timepoints)``;
a dataset stacks ``m`` of them into ``(m, n_channels, n_timepoints)``.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from typing import Iterable, Mapping, TextIO

import numpy as np

__all__ = [
    "CsvSchema",
    "DatasetFormatError",
    "LabeledDataset",
    "as_series",
    "load_ts",
    "normalize_dataset",
    "parse_csv_long",
    "parse_ts",
    "write_ts",
    "z_normalize",
]


class DatasetFormatError(ValueError):
    """Malformed input file. ``lineno`` is 1-based when known."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def as_series(X) -> np.ndarray:
    """Coerce to a finite ``(l, n)`` float64 array; 1D input becomes one channel."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"expected a (channels, timepoints) array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("series contains non-finite values")
    return np.ascontiguousarray(arr)


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """An immutable set of equal-shape multivariate series with class labels.

    Parameters
    ----------
    X : ndarray of shape (m, l, n)
    y : sequence of str, length m
    class_labels : tuple of str
        The label set Y. Defaults to the sorted distinct labels of ``y``.
    name : str
    split : {"train", "test"}
    """

    X: np.ndarray
    y: np.ndarray
    class_labels: tuple = ()
    name: str = ""
    split: str = "train"

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64)
        if X.ndim != 3 or 0 in X.shape:
            raise ValueError(f"X must have shape (m, l, n) with all sizes >= 1, got {X.shape}")
        if not np.isfinite(X).all():
            raise ValueError("dataset contains non-finite values")
        y = np.array([str(v) for v in self.y], dtype=object)
        if y.shape != (X.shape[0],):
            raise ValueError(f"{y.shape[0]} labels for {X.shape[0]} instances")
        labels = tuple(str(v) for v in self.class_labels) or tuple(sorted(set(y)))
        unknown = set(y) - set(labels)
        if unknown:
            raise ValueError(f"labels {sorted(unknown)} not in class set {labels}")
        if self.split not in ("train", "test"):
            raise ValueError(f"split must be 'train' or 'test', got {self.split!r}")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "class_labels", labels)

    @property
    def n_instances(self) -> int:
        return self.X.shape[0]

    @property
    def n_channels(self) -> int:
        return self.X.shape[1]

    @property
    def n_timepoints(self) -> int:
        return self.X.shape[2]

    def __len__(self):
        return self.n_instances

    def __getitem__(self, i):
        return self.X[i], self.y[i]

    def replace(self, **changes) -> "LabeledDataset":
        fields = dict(X=self.X, y=self.y, class_labels=self.class_labels,
                      name=self.name, split=self.split)
        fields.update(changes)
        return LabeledDataset(**fields)

    def subset(self, index) -> "LabeledDataset":
        index = np.asarray(index)
        return self.replace(X=self.X[index], y=self.y[index])

    def equals(self, other: "LabeledDataset", rtol: float = 0.0) -> bool:
        return (
            self.X.shape == other.X.shape
            and list(self.y) == list(other.y)
            and self.class_labels == other.class_labels
            and self.name == other.name
            and np.allclose(self.X, other.X, rtol=rtol, atol=0.0)
        )


# --------------------------------------------------------------------- .ts

_BOOL = {"true": True, "false": False}


def _lines(source) -> Iterable[str]:
    if isinstance(source, str):
        return source.splitlines()
    return (line.rstrip("\r\n") for line in source)


def parse_ts(source: str | TextIO, split: str = "train") -> LabeledDataset:
    """Parse a UEA/sktime ``.ts`` classification file.

    Only equal-length, timestamp-free, labelled problems are accepted.
    Errors carry the offending line number.
    """
    header: dict[str, str] = {}
    labels: tuple[str, ...] | None = None
    rows: list[np.ndarray] = []
    y: list[str] = []
    in_data = False
    n_dims = None
    length = None

    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not in_data:
            if not line.startswith("@"):
                raise DatasetFormatError("expected a header line before @data", lineno)
            key, _, value = line[1:].partition(" ")
            key = key.lower()
            value = value.strip()
            if key == "data":
                if labels is None:
                    raise DatasetFormatError("missing @classLabel header", lineno)
                in_data = True
                continue
            header[key] = value
            if key == "classlabel":
                parts = value.split()
                if not parts or parts[0].lower() != "true":
                    raise DatasetFormatError("only classification files (@classLabel true ...) are supported", lineno)
                labels = tuple(parts[1:])
                if not labels:
                    raise DatasetFormatError("@classLabel true lists no labels", lineno)
            elif key in ("timestamps", "missing", "univariate", "equallength"):
                if value.lower() not in _BOOL:
                    raise DatasetFormatError(f"@{key} must be true or false", lineno)
                flag = _BOOL[value.lower()]
                if key == "timestamps" and flag:
                    raise DatasetFormatError("timestamped series are not supported", lineno)
                if key == "univariate" and flag:
                    n_dims = 1 if n_dims is None else n_dims
            elif key in ("dimensions", "dimension", "serieslength"):
                try:
                    ivalue = int(value)
                except ValueError:
                    raise DatasetFormatError(f"@{key} must be an integer", lineno) from None
                if key == "serieslength":
                    length = ivalue
                else:
                    n_dims = ivalue
            elif key == "targetlabel":
                raise DatasetFormatError("regression files are not supported", lineno)
            continue

        parts = line.split(":")
        label = parts[-1].strip()
        channels = parts[:-1]
        if not channels:
            raise DatasetFormatError("instance has no channel data", lineno)
        if label not in labels:
            raise DatasetFormatError(f"unknown class label {label!r}", lineno)
        if n_dims is not None and len(channels) != n_dims:
            raise DatasetFormatError(
                f"declared {n_dims} dimensions but found {len(channels)} channels", lineno)
        values = []
        for chan in channels:
            try:
                values.append([float(tok) for tok in chan.split(",")])
            except ValueError:
                bad = next(t for t in chan.split(",") if not _is_float(t))
                raise DatasetFormatError(f"non-numeric token {bad!r}", lineno) from None
        lengths = {len(v) for v in values}
        if len(lengths) != 1:
            raise DatasetFormatError(f"ragged channel lengths {sorted(lengths)}", lineno)
        arr = np.array(values)
        if not np.isfinite(arr).all():
            raise DatasetFormatError("non-finite value", lineno)
        if length is not None and arr.shape[1] != length:
            raise DatasetFormatError(
                f"declared series length {length} but found {arr.shape[1]}", lineno)
        if rows and arr.shape != rows[0].shape:
            raise DatasetFormatError(
                f"instance shape {arr.shape} differs from first instance {rows[0].shape}", lineno)
        rows.append(arr)
        y.append(label)

    if not in_data:
        raise DatasetFormatError("missing @data section")
    if not rows:
        raise DatasetFormatError("no instances after @data")
    return LabeledDataset(np.stack(rows), y, labels, header.get("problemname", ""), split)


def _is_float(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def load_ts(path: str | os.PathLike, split: str | None = None) -> LabeledDataset:
    """Read a ``.ts`` file; the split defaults to TRAIN/TEST in the file name."""
    if split is None:
        split = "test" if "_TEST" in os.path.basename(str(path)).upper() else "train"
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_ts(fh, split=split)


def write_ts(dataset: LabeledDataset, fh: TextIO | None = None) -> str | None:
    """Serialize to ``.ts``; values use ``repr`` so a re-parse is exact."""
    out = io.StringIO() if fh is None else fh
    m, l, n = dataset.X.shape
    name = dataset.name or "unnamed"
    out.write(f"@problemName {name}\n")
    out.write("@timeStamps false\n@missing false\n")
    out.write(f"@univariate {'true' if l == 1 else 'false'}\n")
    out.write(f"@dimensions {l}\n@equalLength true\n@seriesLength {n}\n")
    out.write("@classLabel true " + " ".join(dataset.class_labels) + "\n@data\n")
    for series, label in zip(dataset.X, dataset.y):
        chans = (",".join(repr(float(v)) for v in chan) for chan in series)
        out.write(":".join(chans) + f":{label}\n")
    return out.getvalue() if fh is None else None


# -------------------------------------------------------------- long CSV

@dataclass(frozen=True)
class CsvSchema:
    """Column names of a long-format CSV (one value per row)."""

    instance: str = "instance"
    channel: str = "channel"
    time: str = "time"
    value: str = "value"
    label: str = "label"


def _sort_key(values):
    try:
        return sorted(values, key=float)
    except ValueError:
        return sorted(values)


def parse_csv_long(source: str | TextIO, schema: CsvSchema | Mapping[str, str] | None = None,
                   name: str = "", split: str = "train") -> LabeledDataset:
    """Assemble a dataset from long-format rows sorted by (instance, channel, time).

    Ids sort numerically when every id parses as a number, else lexically.
    """
    if schema is None:
        schema = CsvSchema()
    elif not isinstance(schema, CsvSchema):
        schema = CsvSchema(**schema)
    text = source if isinstance(source, str) else source.read()
    reader = csv.DictReader(io.StringIO(text))
    cols = [schema.instance, schema.channel, schema.time, schema.value, schema.label]
    missing = [c for c in cols if c not in (reader.fieldnames or [])]
    if missing:
        raise DatasetFormatError(f"missing columns {missing}", 1)

    cells: dict[tuple[str, str, str], float] = {}
    inst_label: dict[str, str] = {}
    for lineno, row in enumerate(reader, start=2):
        inst, chan, t = row[schema.instance], row[schema.channel], row[schema.time]
        key = (inst, chan, t)
        if key in cells:
            raise DatasetFormatError(f"duplicate cell {key}", lineno)
        try:
            value = float(row[schema.value])
        except (TypeError, ValueError):
            raise DatasetFormatError(f"non-numeric value {row[schema.value]!r}", lineno) from None
        if not np.isfinite(value):
            raise DatasetFormatError("non-finite value", lineno)
        cells[key] = value
        label = row[schema.label]
        if inst_label.setdefault(inst, label) != label:
            raise DatasetFormatError(
                f"conflicting labels {inst_label[inst]!r} and {label!r} for instance {inst!r}", lineno)

    if not cells:
        raise DatasetFormatError("no data rows")
    instances = _sort_key({k[0] for k in cells})
    channels = _sort_key({k[1] for k in cells})
    times = _sort_key({k[2] for k in cells})
    X = np.empty((len(instances), len(channels), len(times)))
    for a, inst in enumerate(instances):
        for b, chan in enumerate(channels):
            for c, t in enumerate(times):
                try:
                    X[a, b, c] = cells[(inst, chan, t)]
                except KeyError:
                    raise DatasetFormatError(
                        f"missing cell instance={inst!r} channel={chan!r} time={t!r}") from None
    return LabeledDataset(X, [inst_label[i] for i in instances], name=name, split=split)


# ------------------------------------------------------------ normalization

def z_normalize(X) -> np.ndarray:
    """Standardize each channel (last axis) to mean 0, population std 1.

    Constant channels map to all zeros. Deviations are rescaled by their
    largest magnitude before squaring, so tiny or huge values neither
    underflow nor overflow.
    """
    X = np.asarray(X, dtype=np.float64)
    centred = X - X.mean(axis=-1, keepdims=True)
    scale = np.abs(centred).max(axis=-1, keepdims=True)
    constant = (np.ptp(X, axis=-1, keepdims=True) == 0) | (scale == 0)
    unit = centred / np.where(constant, 1.0, scale)
    std = np.sqrt((unit * unit).mean(axis=-1, keepdims=True))
    return np.where(constant, 0.0, unit / np.where(constant, 1.0, std))


def normalize_dataset(dataset: LabeledDataset) -> LabeledDataset:
    return dataset.replace(X=z_normalize(dataset.X))
