import math

import numpy as np
import pytest

from irav import (
    Frame420,
    FramePlane,
    Projection,
    ProjectionFormat,
    SphereDirection,
    convert,
    dir_to_erp,
    erp_to_dir,
    generate_mask,
    psnr,
    ws_weights_erp,
)

# reference packing inactive percentages at both resolution classes,
# with the per-format acceptance tolerance in percentage points
TABLE2 = [
    ("cmp", 3840, 2880, 50.0, 0.0),
    ("cmp", 4736, 3552, 50.0, 0.0),
    ("ohp", 2880, 1248, 49.7, 1.0),
    ("ohp", 6176, 2672, 49.9, 1.0),
    ("cohp", 2176, 2552, 1.25, 2.0),
    ("cohp", 2672, 3128, 1.02, 2.0),
    ("cisp", 1416, 1816, 8.71, 2.0),
    ("cisp", 2496, 3320, 4.94, 2.0),
    ("rsp", 2880, 1920, 5.33, 2.0),
    ("rsp", 3552, 2368, 5.48, 2.0),
    ("ssp", 1008, 6080, 7.64, 0.05),
    ("ssp", 1216, 7328, 7.56, 0.05),
]


class TestMasks:
    @pytest.mark.parametrize("kind,w,h,expected,tol", TABLE2)
    def test_inactive_fractions(self, kind, w, h, expected, tol):
        mask = generate_mask(ProjectionFormat(kind), w, h)
        pct = 100.0 * mask.inactive_fraction
        if tol == 0.0:
            assert pct == expected
        else:
            assert abs(pct - expected) <= tol, f"{kind} {w}x{h}: {pct:.3f}%"

    def test_erp_all_active(self):
        mask = generate_mask(ProjectionFormat("erp"), 3840, 1920)
        assert mask.inactive_count == 0

    def test_ssp_analytic_oracle(self):
        # circle-complement of two polar squares plus two guard strips
        w, h, g = 1008, 6080, 16
        analytic = (2 * (1 - math.pi / 4) * w * w + 2 * g * w) / (w * h)
        mask = generate_mask(ProjectionFormat("ssp"), w, h)
        assert abs(mask.inactive_fraction - analytic) < 5e-4

    @pytest.mark.parametrize("w,h", [(1008, 6080), (1216, 7328)])
    def test_ssp_layout_identity(self, w, h):
        # polar square + guard + equator + guard + polar square rows
        assert w + 16 + 4 * w + 16 + w == h

    def test_cmp_exact_slot_structure(self):
        mask = generate_mask(ProjectionFormat("cmp"), 3840, 2880)
        face = 960
        # six active slots of the 4x3 grid
        assert mask.bits[face : 2 * face, :].all()          # middle row
        assert mask.bits[:face, face : 2 * face].all()      # top face
        assert mask.bits[2 * face :, face : 2 * face].all() # bottom face
        assert not mask.bits[:face, :face].any()

    def test_deterministic(self):
        a = generate_mask(ProjectionFormat("rsp"), 2880, 1920)
        b = generate_mask(ProjectionFormat("rsp"), 2880, 1920)
        assert np.array_equal(a.bits, b.bits)

    def test_unsupported_dimensions_name_constraint(self):
        with pytest.raises(ValueError, match="width%4"):
            generate_mask(ProjectionFormat("cmp"), 100, 99)
        with pytest.raises(ValueError, match="6\\*width"):
            generate_mask(ProjectionFormat("ssp"), 1008, 6000)
        with pytest.raises(ValueError, match="2\\*height"):
            generate_mask(ProjectionFormat("erp"), 100, 99)


class TestErpMapping:
    def test_center_pixel(self):
        x, y = dir_to_erp(SphereDirection(0.0, 0.0), 3840, 1920)
        assert (x, y) == (1919.5, 959.5)

    def test_north_pole_top_edge(self):
        _, y = dir_to_erp(SphereDirection(0.0, math.pi / 2), 3840, 1920)
        assert y == pytest.approx(-0.5)

    def test_inverse_pair(self, rng):
        lon = rng.uniform(-math.pi, math.pi, 1000)
        lat = rng.uniform(-math.pi / 2, math.pi / 2, 1000)
        x, y = dir_to_erp(SphereDirection(lon, lat), 3840, 1920)
        back = erp_to_dir(x, y, 3840, 1920)
        assert np.abs(back.longitude - lon).max() < 1e-12
        assert np.abs(back.latitude - lat).max() < 1e-12

    def test_aspect_enforced(self):
        with pytest.raises(ValueError):
            dir_to_erp(SphereDirection(0.0, 0.0), 100, 99)


class TestWeights:
    def test_height4_values(self):
        wm = ws_weights_erp(8, 4)
        expected = [math.cos(-1.5 * math.pi / 4), math.cos(-0.5 * math.pi / 4),
                    math.cos(0.5 * math.pi / 4), math.cos(1.5 * math.pi / 4)]
        assert np.allclose(wm.weights[:, 0], expected)

    def test_rows_constant_and_bounded(self):
        wm = ws_weights_erp(64, 32)
        assert (wm.weights == wm.weights[:, :1]).all()
        assert (wm.weights > 0).all() and (wm.weights <= 1).all()

    def test_symmetry(self):
        wm = ws_weights_erp(64, 32)
        assert np.allclose(wm.weights, wm.weights[::-1])

    def test_equator_near_one(self):
        wm = ws_weights_erp(128, 64)
        assert wm.weights[32, 0] == pytest.approx(math.cos(0.5 * math.pi / 64))


def _smooth_erp(w, h):
    x = np.arange(w)[None, :]
    y = np.arange(h)[:, None]
    luma = np.rint(
        96 + 64 * np.sin(2 * np.pi * x / w) * np.cos(np.pi * (y - h / 2) / h)
        + 64 * (y / h)
    ).astype(np.uint8)
    return Frame420(
        FramePlane(w, h, luma),
        FramePlane(w // 2, h // 2, np.full((h // 2, w // 2), 120, np.uint8)),
        FramePlane(w // 2, h // 2, np.full((h // 2, w // 2), 130, np.uint8)),
    )


ERP = ProjectionFormat("erp")
CMP = ProjectionFormat("cmp")
SSP = ProjectionFormat("ssp")


class TestConvert:
    def test_constant_gray_preserved(self):
        w, h = 256, 128
        const = Frame420(
            FramePlane(w, h, np.full((h, w), 77, np.uint8)),
            FramePlane(w // 2, h // 2, np.full((h // 2, w // 2), 88, np.uint8)),
            FramePlane(w // 2, h // 2, np.full((h // 2, w // 2), 99, np.uint8)),
        )
        out = convert(const, ERP, CMP, 256, 192)
        mask = generate_mask(CMP, 256, 192)
        assert (out.luma.samples[mask.bits] == 77).all()

    def test_inactive_pixels_stay_gray(self):
        frame = _smooth_erp(256, 128)
        out = convert(frame, ERP, SSP, 64, 416)
        mask = generate_mask(SSP, 64, 416)
        assert (out.luma.samples[~mask.bits] == 128).all()
        cmask = generate_mask(ProjectionFormat("ssp", guard_width=8), 32, 208)
        assert (out.cb.samples[~cmask.bits] == 128).all()

    def test_erp_center_hits_cmp_front_face_center(self):
        # a bright dot at the ERP center must land at the front-face center
        w, h = 512, 256
        luma = np.zeros((h, w), np.uint8)
        luma[h // 2 - 2 : h // 2 + 2, w // 2 - 2 : w // 2 + 2] = 255
        frame = Frame420(
            FramePlane(w, h, luma),
            FramePlane(w // 2, h // 2, np.full((h // 2, w // 2), 128, np.uint8)),
            FramePlane(w // 2, h // 2, np.full((h // 2, w // 2), 128, np.uint8)),
        )
        out = convert(frame, ERP, CMP, 512, 384)
        face = 128
        front = out.luma.samples[face : 2 * face, face : 2 * face]
        j, i = np.unravel_index(np.argmax(front), front.shape)
        assert abs(j - face / 2) <= 2 and abs(i - face / 2) <= 2

    def test_round_trip_cmp_40db(self):
        frame = _smooth_erp(768, 384)
        packed = convert(frame, ERP, CMP, 768, 576)
        back = convert(packed, CMP, ERP, 768, 384)
        value = psnr(frame.luma, back.luma)
        assert value >= 40.0, f"regression floor: measured {value:.2f} dB"

    def test_round_trip_ssp_40db(self):
        frame = _smooth_erp(768, 384)
        packed = convert(frame, ERP, SSP, 192, 1184)
        back = convert(packed, SSP, ERP, 768, 384)
        value = psnr(frame.luma, back.luma)
        assert value >= 40.0, f"regression floor: measured {value:.2f} dB"

    def test_unsupported_pair(self):
        frame = _smooth_erp(64, 32)
        with pytest.raises(ValueError, match="unsupported conversion"):
            convert(frame, ERP, ProjectionFormat("ohp"), 64, 32)
        with pytest.raises(ValueError, match="unsupported conversion"):
            convert(frame, CMP, SSP, 64, 416)

    def test_nearest_mode_runs(self):
        frame = _smooth_erp(128, 64)
        out = convert(frame, ERP, CMP, 128, 96, nearest=True)
        assert out.luma.samples.shape == (96, 128)
