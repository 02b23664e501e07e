"""Kernel backend selection.

The compiled Cython module is used when it imports; otherwise (or when
``UCF_PURE_PYTHON`` is set to a non-empty value) the numpy fallback is used.
Both expose ``dtw_cost``, ``dtw_subgradient`` and ``best_split``.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

if _ckernels is not None and not os.environ.get("UCF_PURE_PYTHON"):
    backend = _ckernels
else:
    backend = _pykernels

BACKEND = backend.BACKEND
AVAILABLE = {"numpy": _pykernels}
if _ckernels is not None:
    AVAILABLE["cython"] = _ckernels

dtw_cost = backend.dtw_cost
dtw_subgradient = backend.dtw_subgradient
best_split = backend.best_split

__all__ = ["AVAILABLE", "BACKEND", "best_split", "dtw_cost", "dtw_subgradient"]
