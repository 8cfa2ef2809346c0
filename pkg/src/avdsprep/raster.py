"""Image containers, the binary PNM codec, histograms, and mirrored windows.

Samples are kept as float64 in [0, 255] end to end; quantization happens
only when writing PNM bytes. Color images are stored as three planes in
BGR order; the codec converts from/to the RGB byte order used on disk.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, MalformedHeader, Truncated, UnsupportedMaxval

GRAY_WEIGHTS_RGB = (0.299, 0.587, 0.114)


class ChannelOrder(enum.Enum):
    GRAY = "gray"
    BGR = "bgr"


@dataclass(frozen=True)
class Plane:
    """A single-channel raster of float64 samples in [0, 255].

    The pixel array is copied on construction and marked read-only, so a
    Plane can be shared freely between threads.
    """

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.array(self.pixels, dtype=np.float64, order="C", copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"plane must be a non-empty 2-D array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("plane samples must be finite")
        if arr.min() < 0.0 or arr.max() > 255.0:
            raise ValueError(
                f"plane samples must lie in [0, 255], got [{arr.min()}, {arr.max()}]"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def samples(self) -> np.ndarray:
        """Row-major 1-D view of the samples."""
        return self.pixels.reshape(-1)

    @classmethod
    def filled(cls, width: int, height: int, value: float) -> "Plane":
        return cls(np.full((height, width), float(value)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Plane):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    def __hash__(self):
        return hash((self.width, self.height))


@dataclass(frozen=True)
class Image:
    """One (gray) or three (BGR) planes of identical dimensions."""

    planes: tuple
    channel_order: ChannelOrder

    def __post_init__(self):
        planes = tuple(self.planes)
        object.__setattr__(self, "planes", planes)
        if len(planes) not in (1, 3):
            raise ValueError(f"image must have 1 or 3 planes, got {len(planes)}")
        expected = ChannelOrder.GRAY if len(planes) == 1 else ChannelOrder.BGR
        if self.channel_order is not expected:
            raise ValueError(
                f"{len(planes)} plane(s) requires channel order {expected}, got {self.channel_order}"
            )
        w, h = planes[0].width, planes[0].height
        for p in planes[1:]:
            if p.width != w or p.height != h:
                raise DimensionMismatch("image planes must share dimensions")

    @property
    def width(self) -> int:
        return self.planes[0].width

    @property
    def height(self) -> int:
        return self.planes[0].height

    @classmethod
    def gray(cls, plane: Plane) -> "Image":
        return cls((plane,), ChannelOrder.GRAY)

    @classmethod
    def bgr(cls, b: Plane, g: Plane, r: Plane) -> "Image":
        return cls((b, g, r), ChannelOrder.BGR)


@dataclass(frozen=True)
class Histogram:
    """Integer bin counts over the fixed sample range [0, 255]."""

    bins: np.ndarray

    def __post_init__(self):
        arr = np.array(self.bins, dtype=np.int64, copy=True)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("histogram needs at least one bin")
        if arr.min() < 0:
            raise ValueError("histogram counts must be non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "bins", arr)

    @property
    def bin_count(self) -> int:
        return self.bins.size

    @property
    def total(self) -> int:
        return int(self.bins.sum())


@dataclass(frozen=True)
class Pdf:
    """A normalized probability vector (sums to 1 within 1e-12)."""

    probs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.probs, dtype=np.float64, copy=True)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("pdf needs at least one entry")
        if arr.min() < 0.0:
            raise ValueError("pdf entries must be non-negative")
        if abs(arr.sum() - 1.0) > 1e-12:
            raise ValueError(f"pdf must sum to 1 within 1e-12, got {arr.sum()!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @property
    def bin_count(self) -> int:
        return self.probs.size

    @classmethod
    def from_histogram(cls, hist: Histogram) -> "Pdf":
        total = hist.total
        if total == 0:
            raise ValueError("cannot normalize an empty histogram")
        return cls(hist.bins / total)


# --------------------------------------------------------------------------
# PNM codec (binary P5 / P6)
# --------------------------------------------------------------------------

_WHITESPACE = b" \t\n\r\x0b\x0c"


def _read_header_tokens(data: bytes, count: int):
    """Read `count` whitespace-separated header tokens, honoring # comments.

    Returns (tokens, offset_of_first_payload_byte). The single whitespace
    byte after the last token is consumed, per the Netpbm convention.
    """
    tokens = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i] in _WHITESPACE:
            i += 1
        if i < n and data[i] == ord("#"):
            while i < n and data[i] not in (ord("\n"), ord("\r")):
                i += 1
            continue
        start = i
        while i < n and data[i] not in _WHITESPACE and data[i] != ord("#"):
            i += 1
        if i == start:
            raise MalformedHeader("unexpected end of PNM header")
        tokens.append(data[start:i])
    if i >= n or data[i] not in _WHITESPACE:
        raise MalformedHeader("missing whitespace after PNM maxval")
    return tokens, i + 1


def load_pnm(data: bytes) -> Image:
    """Decode a binary PNM (P5/P6) byte stream into an Image.

    8-bit samples are copied verbatim; 16-bit samples (big-endian) are
    rescaled by 255/maxval. P6 triplets are RGB on disk and become BGR
    planes in memory.
    """
    if len(data) < 2:
        raise MalformedHeader("not a PNM stream")
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise MalformedHeader(f"unsupported PNM magic {magic!r}")
    try:
        tokens, payload_at = _read_header_tokens(data[2:], 3)
    except MalformedHeader:
        raise
    payload_at += 2
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise MalformedHeader(f"non-integer PNM header tokens {tokens!r}") from None
    if width <= 0 or height <= 0:
        raise MalformedHeader(f"bad PNM dimensions {width}x{height}")
    if maxval <= 0 or maxval > 65535:
        raise UnsupportedMaxval(f"unsupported PNM maxval {maxval}")

    channels = 1 if magic == b"P5" else 3
    two_byte = maxval > 255
    need = width * height * channels * (2 if two_byte else 1)
    payload = data[payload_at : payload_at + need]
    if len(payload) < need:
        raise Truncated(f"PNM payload has {len(payload)} of {need} bytes")

    dtype = ">u2" if two_byte else np.uint8
    raw = np.frombuffer(payload, dtype=dtype).astype(np.float64)
    if two_byte:
        raw = np.clip(raw * (255.0 / maxval), 0.0, 255.0)
    if channels == 1:
        return Image.gray(Plane(raw.reshape(height, width)))
    rgb = raw.reshape(height, width, 3)
    return Image.bgr(Plane(rgb[:, :, 2]), Plane(rgb[:, :, 1]), Plane(rgb[:, :, 0]))


def save_pnm(image: Image) -> bytes:
    """Encode an Image as binary PNM with maxval 255.

    Samples are rounded half-away-from-zero and clamped to [0, 255];
    loading the result back reproduces the image up to that rounding.
    """
    header = b"P5" if image.channel_order is ChannelOrder.GRAY else b"P6"
    out = bytearray()
    out += header
    out += f"\n{image.width} {image.height}\n255\n".encode("ascii")

    def quantize(p: Plane) -> np.ndarray:
        return np.clip(np.floor(p.pixels + 0.5), 0.0, 255.0).astype(np.uint8)

    if image.channel_order is ChannelOrder.GRAY:
        out += quantize(image.planes[0]).tobytes()
    else:
        b, g, r = (quantize(p) for p in image.planes)
        out += np.stack([r, g, b], axis=-1).tobytes()
    return bytes(out)


def to_gray(image: Image) -> Plane:
    """Collapse an image to one plane (BGR uses 0.299 R + 0.587 G + 0.114 B)."""
    if image.channel_order is ChannelOrder.GRAY:
        return image.planes[0]
    b, g, r = (p.pixels for p in image.planes)
    wr, wg, wb = GRAY_WEIGHTS_RGB
    return Plane(np.clip(wr * r + wg * g + wb * b, 0.0, 255.0))


# --------------------------------------------------------------------------
# Histograms
# --------------------------------------------------------------------------


def bin_indices(values: np.ndarray, bin_count: int) -> np.ndarray:
    """Bin index floor(v * bin_count / 256) per sample, clamped to the last bin."""
    idx = np.floor(values * float(bin_count) / 256.0).astype(np.int64)
    return np.minimum(idx, bin_count - 1)


def histogram(plane: Plane, bin_count: int = 256) -> Histogram:
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    idx = bin_indices(plane.pixels.reshape(-1), bin_count)
    return Histogram(np.bincount(idx, minlength=bin_count))


def histogram_csv(hist: Histogram) -> str:
    """CSV export with header "bin,count" and LF line endings."""
    lines = ["bin,count"]
    lines.extend(f"{i},{int(c)}" for i, c in enumerate(hist.bins))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Mirrored windows
# --------------------------------------------------------------------------


def mirror_indices(length: int, lo: int, hi: int) -> np.ndarray:
    """Indices lo..hi-1 reflected into [0, length) without repeating edges.

    Index -1 maps to 1 and index `length` to length-2; a length-1 axis
    reflects onto itself. Reflection repeats with period 2*(length-1), so
    windows larger than the plane still resolve.
    """
    idx = np.arange(lo, hi, dtype=np.int64)
    if length == 1:
        return np.zeros_like(idx)
    period = 2 * (length - 1)
    m = np.mod(idx, period)
    return np.where(m >= length, period - m, m)


def mirror_pad(pixels: np.ndarray, pad: int) -> np.ndarray:
    """Pad a 2-D array on all sides by whole-sample mirror reflection."""
    rows = mirror_indices(pixels.shape[0], -pad, pixels.shape[0] + pad)
    cols = mirror_indices(pixels.shape[1], -pad, pixels.shape[1] + pad)
    return np.ascontiguousarray(pixels[np.ix_(rows, cols)])


def window_at(plane: Plane, x: int, y: int, half: int) -> np.ndarray:
    """The (2*half+1)^2 neighborhood of (x, y), mirror-reflected at borders."""
    if not (0 <= x < plane.width and 0 <= y < plane.height):
        raise ValueError(f"pixel ({x}, {y}) outside {plane.width}x{plane.height} plane")
    if half < 0:
        raise ValueError("half must be >= 0")
    rows = mirror_indices(plane.height, y - half, y + half + 1)
    cols = mirror_indices(plane.width, x - half, x + half + 1)
    return plane.pixels[np.ix_(rows, cols)]
