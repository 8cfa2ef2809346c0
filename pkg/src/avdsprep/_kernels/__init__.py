"""Kernel backend selection: compiled extension when available, NumPy otherwise.

Set AVDSPREP_FORCE_PURE=1 to skip the extension (used by the benchmark and
the backend-equivalence tests).
"""

from __future__ import annotations

import os

from . import _pure

KIND_EUCLIDEAN = _pure.KIND_EUCLIDEAN
KIND_BHATTACHARYA = _pure.KIND_BHATTACHARYA
KIND_MANHATTAN = _pure.KIND_MANHATTAN
KIND_HAMMING = _pure.KIND_HAMMING

if os.environ.get("AVDSPREP_FORCE_PURE") == "1":
    BACKEND = "pure"
    fuzzy_filter = _pure.fuzzy_filter
    avds_filter = _pure.avds_filter
else:
    try:
        from . import _core

        BACKEND = "compiled"
        fuzzy_filter = _core.fuzzy_filter
        avds_filter = _core.avds_filter
    except ImportError:  # pragma: no cover - depends on the build environment
        BACKEND = "pure"
        fuzzy_filter = _pure.fuzzy_filter
        avds_filter = _pure.avds_filter

__all__ = [
    "BACKEND",
    "KIND_BHATTACHARYA",
    "KIND_EUCLIDEAN",
    "KIND_HAMMING",
    "KIND_MANHATTAN",
    "avds_filter",
    "fuzzy_filter",
]
