import numpy as np
import pytest

from irav import ActivityMask, Frame420, FramePlane


def frames_equal(a: Frame420, b: Frame420) -> bool:
    return (
        np.array_equal(a.luma.samples, b.luma.samples)
        and np.array_equal(a.cb.samples, b.cb.samples)
        and np.array_equal(a.cr.samples, b.cr.samples)
    )


def random_frame(rng, width, height) -> Frame420:
    return Frame420(
        FramePlane(width, height, rng.integers(0, 256, (height, width), dtype=np.uint8)),
        FramePlane(width // 2, height // 2,
                   rng.integers(0, 256, (height // 2, width // 2), dtype=np.uint8)),
        FramePlane(width // 2, height // 2,
                   rng.integers(0, 256, (height // 2, width // 2), dtype=np.uint8)),
    )


def full_mask(width, height, active=True) -> ActivityMask:
    return ActivityMask(width, height, np.full((height, width), active, dtype=bool))


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0DEC)
