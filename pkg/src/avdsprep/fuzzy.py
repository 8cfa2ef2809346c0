"""Fuzzy weighted-mean filter for mixed Gaussian/impulsive noise.

Each pixel becomes a weighted mean of its (2*half+1)^2 neighborhood, where a
sample's weight falls linearly from 1 to 0 as its difference from the
reference value approaches a threshold T. The threshold adapts to image
statistics unless fixed explicitly. An optional impulse guard swaps the
reference to the window median when the center itself looks like an outlier,
so isolated spikes are removed instead of preserved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidConfig
from .raster import Plane, mirror_pad


@dataclass(frozen=True)
class FuzzyConfig:
    """Window half-size, threshold mode, and impulse-guard switch.

    A ``fixed_threshold`` of None means the threshold is derived from the
    image via :func:`dynamic_threshold` with scale ``threshold_scale``.
    """

    half: int = 1
    fixed_threshold: float | None = None
    threshold_scale: float = 2.0
    impulse_guard: bool = True

    def __post_init__(self):
        if not isinstance(self.half, int) or self.half < 1:
            raise InvalidConfig(f"half must be an integer >= 1, got {self.half!r}")
        if self.fixed_threshold is not None and not self.fixed_threshold > 0:
            raise InvalidConfig(f"fixed_threshold must be > 0, got {self.fixed_threshold!r}")
        if not self.threshold_scale > 0:
            raise InvalidConfig(f"threshold_scale must be > 0, got {self.threshold_scale!r}")


def membership_weight(delta: float, threshold: float) -> float:
    """Linear ramp: 1 at zero difference, 0 at or beyond the threshold."""
    if not threshold > 0:
        raise InvalidConfig(f"threshold must be > 0, got {threshold!r}")
    return max(0.0, 1.0 - abs(delta) / threshold)


def dynamic_threshold(plane: Plane, scale: float) -> float:
    """T = max(1.0, scale * std of first-neighbor differences).

    The population standard deviation of all horizontal and vertical
    neighbor differences tracks the image's noise level; the floor of 1.0
    keeps constant (or single-pixel) planes well defined.
    """
    if not scale > 0:
        raise InvalidConfig(f"scale must be > 0, got {scale!r}")
    pixels = plane.pixels
    diffs = []
    if plane.height > 1:
        diffs.append(np.diff(pixels, axis=0).ravel())
    if plane.width > 1:
        diffs.append(np.diff(pixels, axis=1).ravel())
    if not diffs:
        return 1.0
    sigma = float(np.std(np.concatenate(diffs)))
    return max(1.0, scale * sigma)


def resolve_threshold(plane: Plane, config: FuzzyConfig) -> float:
    if config.fixed_threshold is not None:
        return config.fixed_threshold
    return dynamic_threshold(plane, config.threshold_scale)


def fuzzy_filter(plane: Plane, config: FuzzyConfig = FuzzyConfig()) -> Plane:
    """Apply the weighted-mean filter with mirror-reflected boundaries."""
    threshold = resolve_threshold(plane, config)
    padded = mirror_pad(plane.pixels, config.half)
    out = _kernels.fuzzy_filter(padded, config.half, threshold, config.impulse_guard)
    out = np.asarray(out, dtype=np.float64)
    np.clip(out, plane.pixels.min(), plane.pixels.max(), out=out)
    return Plane(out)
