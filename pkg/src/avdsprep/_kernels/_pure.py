"""Pure NumPy implementations of the hot per-pixel kernels.

These mirror the compiled extension exactly: every accumulation runs in the
same order (row-major over window offsets, NW/NE/SW/SE/C over sub-windows,
ascending bin index), so the two backends agree to the last few ulps.

Both kernels take a mirror-padded float64 array and return the filtered
interior; padding and output clamping are the caller's responsibility.
"""

from __future__ import annotations

import numpy as np

KIND_EUCLIDEAN = 0
KIND_BHATTACHARYA = 1
KIND_MANHATTAN = 2
KIND_HAMMING = 3


def fuzzy_filter(padded: np.ndarray, half: int, threshold: float, guard: bool) -> np.ndarray:
    """Weighted-mean denoiser: weight = max(0, 1 - |sample - reference| / T).

    The reference is the window center, or the window median when the guard
    is on and the center deviates from the median by more than T.
    """
    size = 2 * half + 1
    h = padded.shape[0] - 2 * half
    w = padded.shape[1] - 2 * half
    center = padded[half:half + h, half:half + w]
    reference = center
    if guard:
        stack = np.empty((size * size, h, w), dtype=np.float64)
        idx = 0
        for dy in range(size):
            for dx in range(size):
                stack[idx] = padded[dy:dy + h, dx:dx + w]
                idx += 1
        med = np.median(stack, axis=0)
        reference = np.where(np.abs(center - med) > threshold, med, center)
    num = np.zeros((h, w), dtype=np.float64)
    den = np.zeros((h, w), dtype=np.float64)
    for dy in range(size):
        for dx in range(size):
            v = padded[dy:dy + h, dx:dx + w]
            wgt = 1.0 - np.abs(v - reference) / threshold
            np.maximum(wgt, 0.0, out=wgt)
            num += wgt * v
            den += wgt
    return num / den


def _bin_plane(values: np.ndarray, bins: int) -> np.ndarray:
    idx = np.floor(values * float(bins) / 256.0).astype(np.int64)
    return np.minimum(idx, bins - 1)


def _bhattacharya_plane(padded, center, ay, ax, k, h, w, bins):
    """Distance between the patch histogram and the delta at the center bin.

    Bins are floored at 1e-6 and renormalized before the coefficient sum,
    which keeps the distance finite for disjoint supports.
    """
    k2 = float(k * k)
    cbin = _bin_plane(center, bins)
    npix = h * w
    base = np.arange(npix, dtype=np.int64) * bins
    combined = np.empty((k * k, npix), dtype=np.int64)
    idx = 0
    for dy in range(k):
        for dx in range(k):
            v = padded[ay + dy:ay + dy + h, ax + dx:ax + dx + w]
            combined[idx] = base + _bin_plane(v, bins).ravel()
            idx += 1
    counts = np.bincount(combined.ravel(), minlength=npix * bins)
    counts = counts.reshape(h, w, bins).astype(np.float64)
    p = np.maximum(counts / k2, 1e-6)
    psum = np.zeros((h, w), dtype=np.float64)
    for b in range(bins):
        psum += p[:, :, b]
    qsum = np.zeros((h, w), dtype=np.float64)
    for b in range(bins):
        qsum += np.where(cbin == b, 1.0, 1e-6)
    bc = np.zeros((h, w), dtype=np.float64)
    for b in range(bins):
        qb = np.where(cbin == b, 1.0, 1e-6)
        bc += np.sqrt((p[:, :, b] / psum) * (qb / qsum))
    return np.where(bc >= 1.0, 0.0, -np.log(np.minimum(bc, 1.0)))


def _distance_plane(padded, center, ay, ax, k, h, w, kind, bins):
    if kind == KIND_BHATTACHARYA:
        return _bhattacharya_plane(padded, center, ay, ax, k, h, w, bins)
    acc = np.zeros((h, w), dtype=np.float64)
    if kind == KIND_HAMMING:
        cq = np.floor(center + 0.5)
        for dy in range(k):
            for dx in range(k):
                v = padded[ay + dy:ay + dy + h, ax + dx:ax + dx + w]
                acc += np.floor(v + 0.5) != cq
        return acc
    for dy in range(k):
        for dx in range(k):
            diff = padded[ay + dy:ay + dy + h, ax + dx:ax + dx + w] - center
            if kind == KIND_EUCLIDEAN:
                acc += diff * diff
            else:
                acc += np.abs(diff)
    if kind == KIND_EUCLIDEAN:
        return np.sqrt(acc)
    return acc


def avds_filter(padded, k, omega, kind, bd_bins, epsilon):
    """Inverse-distance-weighted mean of the five sub-window means.

    Sub-windows with distance below `epsilon` dominate in the limit, so any
    such pixel gets the plain average of exactly those sub-window means.
    """
    pad = k - 1
    h = padded.shape[0] - 2 * pad
    w = padded.shape[1] - 2 * pad
    k2 = float(k * k)
    center = padded[pad:pad + h, pad:pad + w]
    anchors = ((0, 0), (0, pad), (pad, 0), (pad, pad), (k // 2, k // 2))
    means = []
    dists = []
    for ay, ax in anchors:
        mu = np.zeros((h, w), dtype=np.float64)
        for dy in range(k):
            for dx in range(k):
                mu += padded[ay + dy:ay + dy + h, ax + dx:ax + dx + w]
        mu /= k2
        means.append(mu)
        dists.append(_distance_plane(padded, center, ay, ax, k, h, w, kind, bd_bins))
    degenerate = [d < epsilon for d in dists]
    any_degenerate = degenerate[0]
    for mask in degenerate[1:]:
        any_degenerate = any_degenerate | mask
    deg_num = np.zeros((h, w), dtype=np.float64)
    deg_cnt = np.zeros((h, w), dtype=np.float64)
    for mu, mask in zip(means, degenerate):
        deg_num += np.where(mask, mu, 0.0)
        deg_cnt += mask
    num = np.zeros((h, w), dtype=np.float64)
    den = np.zeros((h, w), dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for mu, d in zip(means, dists):
            wgt = (1.0 / d) ** omega
            num += mu * wgt
            den += wgt
        regular = num / den
        limit = deg_num / np.maximum(deg_cnt, 1.0)
    return np.where(any_degenerate, limit, regular)
