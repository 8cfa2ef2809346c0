"""Quality metrics for preprocessing comparisons: MSE, RMSE, PSNR, contrast, entropy.

Contrast is the population standard deviation of the samples; entropy is
Shannon entropy of the intensity histogram in bits. Multi-channel images
are scored per channel and the channel values averaged arithmetically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .raster import Histogram, Image, Plane, histogram

CSV_HEADER = "method,mse,rmse,psnr_db,contrast,entropy_bits,params"


def _pixels(a) -> np.ndarray:
    return a.pixels if isinstance(a, Plane) else np.asarray(a, dtype=np.float64)


def mse(a: Plane, b: Plane) -> float:
    """Mean squared per-pixel difference."""
    pa, pb = _pixels(a), _pixels(b)
    if pa.shape != pb.shape:
        raise DimensionMismatch(f"shape {pa.shape} vs {pb.shape}")
    return float(np.mean((pa - pb) ** 2))


def rmse_from_mse(value: float) -> float:
    return math.sqrt(value)


def rmse(a: Plane, b: Plane) -> float:
    return rmse_from_mse(mse(a, b))


def psnr_from_mse(value: float, max_value: float = 255.0) -> float:
    """20*log10(MAX) - 10*log10(MSE), in dB; +inf for zero error."""
    if max_value <= 0:
        raise ValueError("max_value must be positive")
    if value == 0.0:
        return math.inf
    return 20.0 * math.log10(max_value) - 10.0 * math.log10(value)


def psnr(a: Plane, b: Plane, max_value: float = 255.0) -> float:
    return psnr_from_mse(mse(a, b), max_value)


def contrast(plane: Plane) -> float:
    """Population standard deviation of the samples."""
    return float(np.std(_pixels(plane)))


def shannon_entropy(plane: Plane, bins: int = 256) -> float:
    """Entropy of the binned intensity distribution, in bits."""
    hist = histogram(plane, bins)
    return entropy_of_histogram(hist)


def entropy_of_histogram(hist: Histogram) -> float:
    total = hist.total
    if total == 0:
        return 0.0
    p = hist.bins[hist.bins > 0] / total
    return float(-np.sum(p * np.log2(p)))


@dataclass(frozen=True)
class QualityReport:
    """One method's metrics for one image, serializable to CSV or JSON."""

    method: str
    mse: float
    rmse: float
    psnr_db: float
    contrast: float
    entropy_bits: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mse < 0 or self.rmse < 0 or self.contrast < 0 or self.entropy_bits < 0:
            raise ValueError("metric values must be non-negative")
        if self.mse == 0.0:
            ok = self.rmse == 0.0
        else:
            ok = abs(self.rmse * self.rmse - self.mse) <= 1e-9 * self.mse
        if not ok:
            raise ValueError(f"rmse {self.rmse} inconsistent with mse {self.mse}")
        if math.isinf(self.psnr_db) != (self.mse == 0.0):
            raise ValueError("psnr must be +inf exactly when mse is 0")
        object.__setattr__(self, "params", dict(self.params))

    def params_text(self) -> str:
        return ";".join(f"{k}={v}" for k, v in self.params.items())

    def csv_fields(self) -> list:
        return [
            self.method,
            format_metric(self.mse),
            format_metric(self.rmse),
            format_metric(self.psnr_db),
            format_metric(self.contrast),
            format_metric(self.entropy_bits),
            self.params_text(),
        ]

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "mse": self.mse,
            "rmse": self.rmse,
            "psnr_db": "inf" if math.isinf(self.psnr_db) else self.psnr_db,
            "contrast": self.contrast,
            "entropy_bits": self.entropy_bits,
            "params": dict(self.params),
        }


def format_metric(value: float) -> str:
    if math.isinf(value):
        return "inf"
    return format(value, ".12g")


def _channel_mean(values) -> float:
    values = list(values)
    return sum(values) / len(values)


def evaluate(method: str, reference, processed, params=None, bins: int = 256) -> QualityReport:
    """Score `processed` against `reference` (Plane or Image, matching kinds).

    MSE compares processed to reference; contrast and entropy describe the
    processed result alone. Multi-channel inputs are scored per channel and
    averaged; RMSE and PSNR are then derived from the averaged MSE so every
    report stays internally consistent.
    """
    ref_planes = reference.planes if isinstance(reference, Image) else (reference,)
    out_planes = processed.planes if isinstance(processed, Image) else (processed,)
    if len(ref_planes) != len(out_planes):
        raise DimensionMismatch(
            f"reference has {len(ref_planes)} plane(s), processed has {len(out_planes)}"
        )
    mse_v = _channel_mean(mse(r, o) for r, o in zip(ref_planes, out_planes))
    return QualityReport(
        method=method,
        mse=mse_v,
        rmse=rmse_from_mse(mse_v),
        psnr_db=psnr_from_mse(mse_v),
        contrast=_channel_mean(contrast(p) for p in out_planes),
        entropy_bits=_channel_mean(shannon_entropy(p, bins) for p in out_planes),
        params=dict(params or {}),
    )
