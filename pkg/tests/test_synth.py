import numpy as np
import pytest

from irav import motion_search, synthesize_sequence, write_yuv420
from irav.synth import _offsets

from conftest import frames_equal


class TestSynth:
    def test_identical_seed_identical_frames(self):
        a = synthesize_sequence("orbit", 64, 32, 5, seed=7)
        b = synthesize_sequence("orbit", 64, 32, 5, seed=7)
        assert all(frames_equal(x, y) for x, y in zip(a, b))

    def test_different_seed_differs(self):
        a = synthesize_sequence("orbit", 64, 32, 1, seed=7)
        b = synthesize_sequence("orbit", 64, 32, 1, seed=8)
        assert not frames_equal(a[0], b[0])

    def test_file_size_single_frame(self, tmp_path):
        frames = synthesize_sequence("checker", 32, 16, 1, seed=0)
        n = write_yuv420(frames, tmp_path / "one.yuv")
        assert n == 32 * 16 * 3 // 2

    @pytest.mark.parametrize("kind", ["gradient", "checker", "orbit"])
    def test_kinds_render(self, kind):
        frames = synthesize_sequence(kind, 48, 32, 3, seed=1)
        assert len(frames) == 3
        assert frames[0].luma.samples.std() > 1.0  # not degenerate

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            synthesize_sequence("plasma", 32, 32, 1, seed=0)

    def test_interior_is_shifted_copy(self):
        frames = synthesize_sequence("orbit", 96, 96, 6, seed=3)
        for t in range(5):
            oy0, ox0 = _offsets(t)
            oy1, ox1 = _offsets(t + 1)
            dy, dx = oy1 - oy0, ox1 - ox0
            a = frames[t].luma.samples
            b = frames[t + 1].luma.samples
            m = 8
            inner_b = b[m : 96 - m, m : 96 - m]
            inner_a = a[m + dy : 96 - m + dy, m + dx : 96 - m + dx]
            assert np.array_equal(inner_a, inner_b)

    def test_motion_search_recovers_orbit_shift(self):
        frames = synthesize_sequence("orbit", 96, 96, 4, seed=3)
        for t in range(3):
            oy0, ox0 = _offsets(t)
            oy1, ox1 = _offsets(t + 1)
            expect = (oy0 - oy1, ox0 - ox1)  # content displacement ref -> cur
            block = frames[t + 1].luma.samples[32:48, 32:48]
            mv, cost = motion_search(block, frames[t].luma.samples, (32, 32), 8)
            assert mv == expect and cost == 0
