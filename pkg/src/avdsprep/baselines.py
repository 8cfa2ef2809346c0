"""Reference enhancers: global histogram equalization and CLAHE.

Both quantize samples to 256 levels, build level histograms, and remap
through the usual cdf-based transfer function. CLAHE does this per tile
with a clip limit and blends the per-tile mappings bilinearly between tile
centers, which limits noise amplification and avoids tile seams.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig
from .raster import Plane, bin_indices

_LEVELS = 256


@dataclass(frozen=True)
class ClaheConfig:
    """Tile grid size and clip limit (a multiple of the uniform bin height)."""

    tiles_x: int = 8
    tiles_y: int = 8
    clip_limit: float = 2.0

    def __post_init__(self):
        if not isinstance(self.tiles_x, int) or self.tiles_x < 1:
            raise InvalidConfig(f"tiles_x must be an integer >= 1, got {self.tiles_x!r}")
        if not isinstance(self.tiles_y, int) or self.tiles_y < 1:
            raise InvalidConfig(f"tiles_y must be an integer >= 1, got {self.tiles_y!r}")
        if not self.clip_limit >= 1:
            raise InvalidConfig(f"clip_limit must be >= 1, got {self.clip_limit!r}")


def _levels_of(pixels: np.ndarray) -> np.ndarray:
    return bin_indices(pixels, _LEVELS)


def _he_lut(counts: np.ndarray) -> np.ndarray:
    """Level-mapping LUT: 255 * (cdf - cdf_min) / (1 - cdf_min), rounded.

    Histograms with at most one occupied level get the identity mapping.
    """
    nonzero = np.nonzero(counts > 0)[0]
    if nonzero.size <= 1:
        return np.arange(_LEVELS, dtype=np.float64)
    total = float(counts.sum())
    cdf = np.cumsum(counts, dtype=np.float64) / total
    cdf_min = cdf[nonzero[0]]
    lut = np.floor(255.0 * (cdf - cdf_min) / (1.0 - cdf_min) + 0.5)
    np.clip(lut, 0.0, 255.0, out=lut)
    return lut


def hist_equalize(plane: Plane) -> Plane:
    """Global histogram equalization; single-level planes pass through."""
    levels = _levels_of(plane.pixels)
    counts = np.bincount(levels.ravel(), minlength=_LEVELS)
    if np.count_nonzero(counts) <= 1:
        return plane
    return Plane(_he_lut(counts)[levels])


def _tile_bounds(extent: int, tiles: int) -> list:
    """Split [0, extent) into `tiles` spans; the last span absorbs the rest."""
    base = extent // tiles
    bounds = []
    for t in range(tiles):
        start = t * base
        stop = (t + 1) * base if t < tiles - 1 else extent
        bounds.append((start, stop))
    return bounds


def _clipped_lut(tile_levels: np.ndarray, clip_limit: float) -> np.ndarray:
    counts = np.bincount(tile_levels.ravel(), minlength=_LEVELS)
    if np.count_nonzero(counts) <= 1:
        return np.arange(_LEVELS, dtype=np.float64)
    threshold = clip_limit * tile_levels.size / _LEVELS
    clipped = np.minimum(counts.astype(np.float64), threshold)
    excess = float(np.sum(counts - clipped))
    if excess > 0.0:
        clipped += excess / _LEVELS
    return _he_lut(clipped)


def _axis_blend(coords: np.ndarray, centers: np.ndarray):
    """Per-coordinate lower tile index and upper-tile weight, clamped at ends."""
    if centers.size == 1:
        return np.zeros(coords.size, dtype=np.int64), np.zeros(coords.size)
    lo = np.searchsorted(centers, coords, side="right") - 1
    lo = np.clip(lo, 0, centers.size - 2)
    weight = (coords - centers[lo]) / (centers[lo + 1] - centers[lo])
    return lo, np.clip(weight, 0.0, 1.0)


def clahe(plane: Plane, config: ClaheConfig = ClaheConfig()) -> Plane:
    """Contrast-limited adaptive histogram equalization.

    With a single tile the blend is a no-op and the LUT applies directly,
    so a large clip limit reproduces hist_equalize exactly.
    """
    levels = _levels_of(plane.pixels)
    if np.count_nonzero(np.bincount(levels.ravel(), minlength=_LEVELS)) <= 1:
        return plane
    tiles_y = min(config.tiles_y, plane.height)
    tiles_x = min(config.tiles_x, plane.width)
    row_bounds = _tile_bounds(plane.height, tiles_y)
    col_bounds = _tile_bounds(plane.width, tiles_x)
    luts = np.empty((tiles_y, tiles_x, _LEVELS), dtype=np.float64)
    for ty, (y0, y1) in enumerate(row_bounds):
        for tx, (x0, x1) in enumerate(col_bounds):
            luts[ty, tx] = _clipped_lut(levels[y0:y1, x0:x1], config.clip_limit)
    if tiles_y == 1 and tiles_x == 1:
        return Plane(luts[0, 0][levels])

    row_centers = np.array([(y0 + y1 - 1) / 2.0 for y0, y1 in row_bounds])
    col_centers = np.array([(x0 + x1 - 1) / 2.0 for x0, x1 in col_bounds])
    iy, wy = _axis_blend(np.arange(plane.height, dtype=np.float64), row_centers)
    ix, wx = _axis_blend(np.arange(plane.width, dtype=np.float64), col_centers)

    iy_col = iy[:, None]
    ix_row = ix[None, :]
    v00 = luts[iy_col, ix_row, levels]
    v01 = luts[iy_col, np.minimum(ix_row + 1, tiles_x - 1), levels]
    v10 = luts[np.minimum(iy_col + 1, tiles_y - 1), ix_row, levels]
    v11 = luts[np.minimum(iy_col + 1, tiles_y - 1), np.minimum(ix_row + 1, tiles_x - 1), levels]
    wy_col = wy[:, None]
    wx_row = wx[None, :]
    out = (1.0 - wy_col) * ((1.0 - wx_row) * v00 + wx_row * v01) + wy_col * (
        (1.0 - wx_row) * v10 + wx_row * v11
    )
    np.clip(out, 0.0, 255.0, out=out)
    return Plane(out)
