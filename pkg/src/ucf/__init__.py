"""Univariate channel fusion for multivariate time series classification.

Multivariate series are fused into one channel (mean, median or DTW
barycenter) and classified with QUANT features and extremely randomized
trees. Concatenation, per-channel voting and 1NN-DTW baselines, a benchmark
harness and rank statistics are included.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .data import LabeledDataset, load_ts, parse_csv_long, parse_ts, write_ts, z_normalize
from .dtw import DtwConfig, dtw, dtw_dependent, dtw_independent, nn1_classify
from .fusion import BarycenterParams, FusionStrategy, fuse, fuse_dataset
from .pipelines import make_classifier

__all__ = [
    "BACKEND",
    "BarycenterParams",
    "DtwConfig",
    "FusionStrategy",
    "LabeledDataset",
    "dtw",
    "dtw_dependent",
    "dtw_independent",
    "fuse",
    "fuse_dataset",
    "load_ts",
    "make_classifier",
    "nn1_classify",
    "parse_csv_long",
    "parse_ts",
    "write_ts",
    "z_normalize",
]
