"""AVDS contrast filter: adaptive variable distance speckle reduction.

Every pixel sits inside a (2k-1)x(2k-1) mask split into five overlapping
k x k sub-windows (NW, NE, SW, SE, and a centered C), each containing the
pixel itself. Each sub-window is scored by its distance to the pixel's
replicated value under one of four metrics; the output is the
inverse-distance-weighted mean of the sub-window means, so homogeneous
sub-windows dominate and edges stay sharp. The adaptive mode runs all four
metrics and keeps the output with the highest contrast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import _kernels
from .errors import InvalidConfig
from .quality import contrast
from .raster import Plane, mirror_pad, window_at


class DistanceKind(IntEnum):
    """Patch-to-reference metrics; the value order doubles as the tie-break."""

    EUCLIDEAN = 0
    BHATTACHARYA = 1
    MANHATTAN = 2
    HAMMING = 3

    @property
    def label(self) -> str:
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> "DistanceKind":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise InvalidConfig(f"unknown distance kind {text!r}") from None


@dataclass(frozen=True)
class AvdsConfig:
    """k is the sub-window side (mask side 2k-1); omega the weight exponent."""

    k: int = 3
    omega: float = 2.0
    bd_bins: int = 16
    epsilon: float = 1e-9

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 2:
            raise InvalidConfig(f"k must be an integer >= 2, got {self.k!r}")
        if not self.omega >= 0:
            raise InvalidConfig(f"omega must be >= 0, got {self.omega!r}")
        if not isinstance(self.bd_bins, int) or self.bd_bins < 2:
            raise InvalidConfig(f"bd_bins must be an integer >= 2, got {self.bd_bins!r}")
        if not self.epsilon > 0:
            raise InvalidConfig(f"epsilon must be > 0, got {self.epsilon!r}")


@dataclass(frozen=True)
class SubWindowSet:
    """The five k x k patches around one pixel, row-major, plus its value."""

    nw: np.ndarray
    ne: np.ndarray
    sw: np.ndarray
    se: np.ndarray
    c: np.ndarray
    center_value: float

    @property
    def patches(self) -> tuple:
        return (self.nw, self.ne, self.sw, self.se, self.c)

    @property
    def labels(self) -> tuple:
        return ("NW", "NE", "SW", "SE", "C")


def subwindows(plane: Plane, x: int, y: int, k: int) -> SubWindowSet:
    """Extract the five sub-windows of the mirror-padded mask at (x, y)."""
    if k < 2:
        raise InvalidConfig(f"k must be >= 2, got {k!r}")
    mask = window_at(plane, x, y, k - 1)
    c0 = k // 2
    return SubWindowSet(
        nw=mask[0:k, 0:k],
        ne=mask[0:k, k - 1:2 * k - 1],
        sw=mask[k - 1:2 * k - 1, 0:k],
        se=mask[k - 1:2 * k - 1, k - 1:2 * k - 1],
        c=mask[c0:c0 + k, c0:c0 + k],
        center_value=float(plane.pixels[y, x]),
    )


def _bin_index(value: float, bins: int) -> int:
    return min(int(math.floor(value * bins / 256.0)), bins - 1)


def distance(patch, center_value: float, kind: DistanceKind,
             config: AvdsConfig = AvdsConfig()) -> float:
    """Distance between the patch and the center value replicated over it."""
    values = np.asarray(patch, dtype=np.float64).ravel()
    center = float(center_value)
    if kind == DistanceKind.EUCLIDEAN:
        acc = 0.0
        for v in values:
            d = v - center
            acc += d * d
        return math.sqrt(acc)
    if kind == DistanceKind.MANHATTAN:
        acc = 0.0
        for v in values:
            acc += abs(v - center)
        return acc
    if kind == DistanceKind.HAMMING:
        cq = math.floor(center + 0.5)
        return float(sum(1 for v in values if math.floor(v + 0.5) != cq))
    bins = config.bd_bins
    n = float(values.size)
    counts = [0] * bins
    for v in values:
        counts[_bin_index(v, bins)] += 1
    cb = _bin_index(center, bins)
    p = []
    psum = 0.0
    for b in range(bins):
        pv = counts[b] / n
        if pv < 1e-6:
            pv = 1e-6
        p.append(pv)
        psum += pv
    qsum = 0.0
    for b in range(bins):
        qsum += 1.0 if b == cb else 1e-6
    bc = 0.0
    for b in range(bins):
        qv = 1.0 if b == cb else 1e-6
        bc += math.sqrt((p[b] / psum) * (qv / qsum))
    if bc >= 1.0:
        return 0.0
    return -math.log(bc)


def avds_single(plane: Plane, kind: DistanceKind,
                config: AvdsConfig = AvdsConfig()) -> Plane:
    """Apply the filter with one fixed distance metric."""
    kind = DistanceKind(kind)
    padded = mirror_pad(plane.pixels, config.k - 1)
    out = _kernels.avds_filter(
        padded, config.k, config.omega, int(kind), config.bd_bins, config.epsilon
    )
    out = np.asarray(out, dtype=np.float64)
    np.clip(out, plane.pixels.min(), plane.pixels.max(), out=out)
    return Plane(out)


@dataclass(frozen=True)
class AvdsOutcome:
    """All four filtered planes plus the contrast-based selection."""

    outputs: dict
    contrasts: dict
    chosen: DistanceKind

    def __post_init__(self):
        if set(self.outputs) != set(DistanceKind) or set(self.contrasts) != set(DistanceKind):
            raise InvalidConfig("outcome must cover every distance kind")

    @property
    def chosen_output(self) -> Plane:
        return self.outputs[self.chosen]


def avds_adaptive(plane: Plane, config: AvdsConfig = AvdsConfig()) -> AvdsOutcome:
    """Run all four metrics and keep the highest-contrast output.

    Ties go to the smaller DistanceKind value, so a constant plane selects
    EUCLIDEAN.
    """
    outputs = {kind: avds_single(plane, kind, config) for kind in DistanceKind}
    contrasts = {kind: contrast(outputs[kind]) for kind in DistanceKind}
    chosen = max(DistanceKind, key=lambda kind: (contrasts[kind], -int(kind)))
    return AvdsOutcome(outputs=outputs, contrasts=contrasts, chosen=chosen)
