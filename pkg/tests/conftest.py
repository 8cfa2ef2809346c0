import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from avdsprep import Image, Plane, save_pnm


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_plane(rng, height, width, lo=0.0, hi=255.0):
    return Plane(rng.uniform(lo, hi, (height, width)))


def noisy_gray_bytes(rng, height=24, width=24, mean=120.0, std=25.0) -> bytes:
    arr = np.clip(rng.normal(mean, std, (height, width)), 0.0, 255.0)
    return save_pnm(Image.gray(Plane(arr)))


def noisy_bgr_bytes(rng, height=16, width=16) -> bytes:
    planes = tuple(
        Plane(np.clip(rng.normal(m, 20.0, (height, width)), 0.0, 255.0))
        for m in (90.0, 130.0, 170.0)
    )
    return save_pnm(Image.bgr(*planes))
