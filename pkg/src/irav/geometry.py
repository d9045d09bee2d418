"""Projection-format geometry for 360-degree video.

Provides activity-mask generation for the supported sphere packings,
sphere <-> pixel mappings, ERP<->CMP and ERP<->SSP resampling, and the
latitude-cosine weight map used by sphere-weighted PSNR.

Layout conventions (frame coordinates are row-major, pixel centers at
index + 0.5):

* ERP: 2:1 equirectangular, longitude left to right, latitude top to bottom.
* CMP: 4x3 grid of square faces. Middle row holds left/front/right/back,
  the top face sits at grid cell (row 0, col 1) and the bottom face at
  (row 2, col 1); the remaining six cells are inactive.
* OHP: 4x2 grid of triangle bounding boxes, apex-up in the top row and
  apex-down in the bottom row; box complements are inactive.
* COHP: dense triangle interleave with two full-width 16-row guard strips
  at the seams of the compact packing (quarter and three-quarter height).
* CISP: two triangle-strip bands separated by a full-width guard strip;
  seven of the diagonal triangle edges per band carry 16-sample guards.
* RSP: two stacked 3:1 faces; each face's active area is a capsule whose
  ends are circular arcs of radius 0.52 x face height.
* SSP: vertical stack [north pole square | guard | equator | guard |
  south pole square]; poles use azimuthal-equidistant discs, the equator
  is the +-45-degree ERP band rotated so longitude runs down the frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .frame_io import ActivityMask, Frame420, FramePlane

# Cap radius of the RSP capsule in units of face height; calibrated so the
# inactive fraction lands on the reference packing percentages.
RSP_CAP_RADIUS = 0.52

INACTIVE_FILL = 128  # mid-gray for pixels outside the active region


class Projection(str, Enum):
    ERP = "erp"
    CMP = "cmp"
    OHP = "ohp"
    COHP = "cohp"
    CISP = "cisp"
    RSP = "rsp"
    SSP = "ssp"


@dataclass
class ProjectionFormat:
    """A packing plus the guard-band width used between discontinuous faces."""

    kind: Projection
    guard_width: int = 16

    def __post_init__(self):
        self.kind = Projection(self.kind)
        if self.guard_width < 0:
            raise ValueError("guard_width must be >= 0")


@dataclass
class SphereDirection:
    """Direction on the unit sphere: longitude in [-pi, pi), latitude in [-pi/2, pi/2]."""

    longitude: float
    latitude: float

    def __post_init__(self):
        lon = np.asarray(self.longitude, dtype=float)
        lat = np.asarray(self.latitude, dtype=float)
        if np.any(lon < -math.pi) or np.any(lon >= math.pi + 1e-12):
            raise ValueError("longitude out of [-pi, pi)")
        if np.any(np.abs(lat) > math.pi / 2 + 1e-12):
            raise ValueError("latitude out of [-pi/2, pi/2]")


@dataclass
class WeightMap:
    """Non-negative per-pixel weights, row-major."""

    width: int
    height: int
    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (self.height, self.width):
            raise ValueError("weight array shape does not match dimensions")
        if (self.weights < 0).any() or not (self.weights > 0).any():
            raise ValueError("weights must be non-negative with at least one positive")


# ---------------------------------------------------------------------------
# mask generation
# ---------------------------------------------------------------------------

def _require(cond: bool, fmt: Projection, constraint: str):
    if not cond:
        raise ValueError(f"{fmt.value.upper()} mask requires {constraint}")


def _mask_erp(w, h, g):
    _require(w == 2 * h, Projection.ERP, f"width == 2*height, got {w}x{h}")
    return np.ones((h, w), dtype=bool)


CMP_ACTIVE_SLOTS = {
    "left": (1, 0),
    "front": (1, 1),
    "right": (1, 2),
    "back": (1, 3),
    "top": (0, 1),
    "bottom": (2, 1),
}


def _mask_cmp(w, h, g):
    _require(
        w % 4 == 0 and h % 3 == 0 and w // 4 == h // 3,
        Projection.CMP,
        f"width%4==0, height%3==0, width/4==height/3, got {w}x{h}",
    )
    face = w // 4
    m = np.zeros((h, w), dtype=bool)
    for row, col in CMP_ACTIVE_SLOTS.values():
        m[row * face : (row + 1) * face, col * face : (col + 1) * face] = True
    return m


def _triangle_box(bw: int, bh: int, apex_up: bool) -> np.ndarray:
    xs = np.arange(bw) + 0.5
    ys = np.arange(bh) + 0.5
    X, Y = np.meshgrid(xs, ys)
    depth = Y if apex_up else (bh - Y)
    return np.abs(X - bw / 2.0) * bh <= (bw / 2.0) * depth


def _mask_ohp(w, h, g):
    _require(w % 4 == 0 and h % 2 == 0, Projection.OHP,
             f"width%4==0 and height even, got {w}x{h}")
    bw, bh = w // 4, h // 2
    up = np.tile(_triangle_box(bw, bh, apex_up=True), (1, 4))
    down = np.tile(_triangle_box(bw, bh, apex_up=False), (1, 4))
    return np.vstack([up, down])


def _mask_cohp(w, h, g):
    _require(h >= 4 * g and g >= 1, Projection.COHP,
             f"height >= 4*guard_width, got height {h}, guard {g}")
    m = np.ones((h, w), dtype=bool)
    for center in (h // 4, (3 * h) // 4):
        start = center - g // 2
        m[start : start + g, :] = False
    return m


def _cisp_band(w: int, hb: int, g: int, flip: bool) -> np.ndarray:
    # Ten interleaved triangles of base w/5; guards run along seven of the
    # diagonal edges, counted left to right.
    base = w / 5.0
    ys = np.arange(hb) + 0.5
    f = ys / hb
    if flip:
        f = 1.0 - f
    xs = np.arange(w) + 0.5
    X = xs[None, :]
    F = f[:, None]
    band = np.ones((hb, w), dtype=bool)
    for k in range(7):
        i, odd = divmod(k, 2)
        edge_x = (i + 0.5) * base + (0.5 * base * F if odd else -0.5 * base * F)
        band &= np.abs(X - edge_x) >= g / 2.0
    return band


def _mask_cisp(w, h, g):
    _require((h - g) > 0 and (h - g) % 2 == 0, Projection.CISP,
             f"(height - guard_width) positive and even, got {w}x{h}, guard {g}")
    _require(w >= 5 * g, Projection.CISP, f"width >= 5*guard_width, got {w}, guard {g}")
    hb = (h - g) // 2
    m = np.ones((h, w), dtype=bool)
    m[:hb] = _cisp_band(w, hb, g, flip=False)
    m[hb : hb + g] = False
    m[hb + g :] = _cisp_band(w, hb, g, flip=True)
    return m


def _rsp_face_active(w: int, hf: int) -> np.ndarray:
    xs = np.arange(w) + 0.5
    ys = np.arange(hf) + 0.5
    X, Y = np.meshgrid(xs, ys)
    r = RSP_CAP_RADIUS * hf
    cy = hf / 2.0
    cx1, cx2 = w / 6.0, 5.0 * w / 6.0
    mid = (X >= cx1) & (X <= cx2)
    cap1 = (X < cx1) & ((X - cx1) ** 2 + (Y - cy) ** 2 <= r * r)
    cap2 = (X > cx2) & ((X - cx2) ** 2 + (Y - cy) ** 2 <= r * r)
    return mid | cap1 | cap2


def _mask_rsp(w, h, g):
    _require(h % 2 == 0 and 2 * w == 3 * h, Projection.RSP,
             f"2*width == 3*height with even height, got {w}x{h}")
    face = _rsp_face_active(w, h // 2)
    return np.vstack([face, face])


def _ssp_disc(w: int) -> np.ndarray:
    c = w / 2.0
    xs = np.arange(w) + 0.5
    X, Y = np.meshgrid(xs, xs)
    return (X - c) ** 2 + (Y - c) ** 2 <= c * c


def _mask_ssp(w, h, g):
    _require(h == 6 * w + 2 * g, Projection.SSP,
             f"height == 6*width + 2*guard_width, got {w}x{h} with guard {g}")
    m = np.zeros((h, w), dtype=bool)
    disc = _ssp_disc(w)
    m[:w] = disc
    m[w + g : 5 * w + g] = True
    m[5 * w + 2 * g :] = disc
    return m


_MASK_GENERATORS = {
    Projection.ERP: _mask_erp,
    Projection.CMP: _mask_cmp,
    Projection.OHP: _mask_ohp,
    Projection.COHP: _mask_cohp,
    Projection.CISP: _mask_cisp,
    Projection.RSP: _mask_rsp,
    Projection.SSP: _mask_ssp,
}


def generate_mask(fmt: ProjectionFormat, width: int, height: int) -> ActivityMask:
    """Generate the activity mask for a packing at the given resolution.

    Deterministic; raises ValueError naming the violated constraint when the
    resolution does not fit the packing's layout.
    """
    if width <= 0 or height <= 0:
        raise ValueError(f"dimensions must be positive, got {width}x{height}")
    gen = _MASK_GENERATORS[fmt.kind]
    return ActivityMask(width, height, gen(width, height, fmt.guard_width))


# ---------------------------------------------------------------------------
# sphere mappings
# ---------------------------------------------------------------------------

def dir_to_erp(d: SphereDirection, width: int, height: int):
    """Continuous ERP pixel coordinate of a sphere direction."""
    if width != 2 * height:
        raise ValueError(f"ERP requires width == 2*height, got {width}x{height}")
    x = (np.asarray(d.longitude) / (2 * math.pi) + 0.5) * width - 0.5
    y = (0.5 - np.asarray(d.latitude) / math.pi) * height - 0.5
    return x, y


def erp_to_dir(x, y, width: int, height: int) -> SphereDirection:
    """Sphere direction of a continuous ERP pixel coordinate."""
    if width != 2 * height:
        raise ValueError(f"ERP requires width == 2*height, got {width}x{height}")
    lon = ((np.asarray(x, dtype=float) + 0.5) / width - 0.5) * 2 * math.pi
    lat = (0.5 - (np.asarray(y, dtype=float) + 0.5) / height) * math.pi
    return SphereDirection(lon, lat)


def _dir_to_vec(lon, lat):
    cl = np.cos(lat)
    return cl * np.sin(lon), np.sin(lat), cl * np.cos(lon)


def _vec_to_dir(x, y, z):
    norm = np.sqrt(x * x + y * y + z * z)
    lat = np.arcsin(np.clip(y / norm, -1.0, 1.0))
    lon = np.arctan2(x, z)
    return lon, lat


# face order used for vectorized CMP indexing
_CMP_FACE_NAMES = ("left", "front", "right", "back", "top", "bottom")


def _cmp_pixel_dirs(w: int, h: int):
    """Longitude/latitude of every active CMP pixel (garbage elsewhere)."""
    face = w // 4
    t = (np.arange(face) + 0.5) / face * 2.0 - 1.0
    U, V = np.meshgrid(t, t)
    lon = np.zeros((h, w))
    lat = np.zeros((h, w))
    face_vecs = {
        "front": (U, -V, np.ones_like(U)),
        "right": (np.ones_like(U), -V, -U),
        "left": (-np.ones_like(U), -V, U),
        "back": (-U, -V, -np.ones_like(U)),
        "top": (U, np.ones_like(U), V),
        "bottom": (U, -np.ones_like(U), -V),
    }
    for name, (row, col) in CMP_ACTIVE_SLOTS.items():
        x, y, z = face_vecs[name]
        flon, flat = _vec_to_dir(x, y, z)
        lon[row * face : (row + 1) * face, col * face : (col + 1) * face] = flon
        lat[row * face : (row + 1) * face, col * face : (col + 1) * face] = flat
    return lon, lat


def _cmp_dir_to_pixel(lon, lat, w: int, h: int):
    """Continuous CMP frame coordinate sampling a sphere direction.

    Coordinates are clamped inside the selected face so bilinear taps never
    leave the active slot.
    """
    face = w // 4
    x, y, z = _dir_to_vec(lon, lat)
    ax, ay, az = np.abs(x), np.abs(y), np.abs(z)
    # face codes follow _CMP_FACE_NAMES
    is_x = (ax >= ay) & (ax >= az)
    is_y = ~is_x & (ay >= az)
    is_z = ~is_x & ~is_y
    code = np.where(
        is_x,
        np.where(x >= 0, 2, 0),            # right / left
        np.where(is_y, np.where(y >= 0, 4, 5), np.where(z >= 0, 1, 3)),
    )
    major = np.where(is_x, ax, np.where(is_y, ay, az))
    major = np.maximum(major, 1e-12)
    u = np.select(
        [code == 2, code == 0, code == 4, code == 5, code == 1, code == 3],
        [-z / major, z / major, x / major, x / major, x / major, -x / major],
    )
    v = np.select(
        [code == 2, code == 0, code == 4, code == 5, code == 1, code == 3],
        [-y / major, -y / major, z / major, -z / major, -y / major, -y / major],
    )
    local_x = np.clip((u + 1.0) / 2.0 * face - 0.5, 0.0, face - 1.0)
    local_y = np.clip((v + 1.0) / 2.0 * face - 0.5, 0.0, face - 1.0)
    rows = np.empty_like(code)
    cols = np.empty_like(code)
    for idx, name in enumerate(_CMP_FACE_NAMES):
        row, col = CMP_ACTIVE_SLOTS[name]
        rows = np.where(code == idx, row, rows)
        cols = np.where(code == idx, col, cols)
    return cols * face + local_x, rows * face + local_y


def _ssp_pixel_dirs(w: int, h: int, g: int):
    """Longitude/latitude of every active SSP pixel (garbage in guards/corners)."""
    lon = np.zeros((h, w))
    lat = np.zeros((h, w))
    half = w / 2.0
    center = half - 0.5
    xs = np.arange(w, dtype=float)
    X, Y = np.meshgrid(xs, xs)
    dx, dy = X - center, Y - center
    rho = np.hypot(dx, dy)
    theta = np.minimum(rho / half, 1.0) * (math.pi / 4)
    # north disc: rows [0, w)
    lon[:w] = np.arctan2(dx, -dy)
    lat[:w] = math.pi / 2 - theta
    # equator: rows [w+g, 5w+g), longitude along the vertical axis
    t = np.arange(4 * w, dtype=float)
    lon[w + g : 5 * w + g] = ((t[:, None] + 0.5) / (4 * w)) * 2 * math.pi - math.pi
    lat[w + g : 5 * w + g] = (0.5 - (xs[None, :] + 0.5) / w) * (math.pi / 2)
    # south disc
    lon[5 * w + 2 * g :] = np.arctan2(dx, dy)
    lat[5 * w + 2 * g :] = -math.pi / 2 + theta
    return lon, lat


def _ssp_dir_to_pixel(lon, lat, w: int, h: int, g: int):
    """Continuous SSP frame coordinate for a direction, clamped for sampling.

    Pole radii are pulled in by 1.5 px so all four bilinear taps stay inside
    the active disc; the equator longitude coordinate is clamped at the wrap
    seam instead of wrapping.
    """
    half = w / 2.0
    center = half - 0.5
    north = lat >= math.pi / 4
    south = lat <= -math.pi / 4
    # equator
    t = (lon + math.pi) / (2 * math.pi) * (4 * w) - 0.5
    eq_y = np.clip(t, 0.0, 4 * w - 1.0) + (w + g)
    eq_x = np.clip((0.5 - lat / (math.pi / 2)) * w - 0.5, 0.0, w - 1.0)
    # poles
    colat_n = (math.pi / 2 - lat) / (math.pi / 4)
    colat_s = (lat + math.pi / 2) / (math.pi / 4)
    rho_n = np.minimum(colat_n * half, half - 1.5)
    rho_s = np.minimum(colat_s * half, half - 1.5)
    nx = center + rho_n * np.sin(lon)
    ny = center - rho_n * np.cos(lon)
    sx = center + rho_s * np.sin(lon)
    sy = (5 * w + 2 * g) + center + rho_s * np.cos(lon)
    x = np.where(north, nx, np.where(south, sx, eq_x))
    y = np.where(north, ny, np.where(south, sy, eq_y))
    return x, y


def ws_weights_erp(width: int, height: int) -> WeightMap:
    """Latitude-cosine weights for sphere-weighted PSNR over an ERP frame."""
    if width != 2 * height:
        raise ValueError(f"ERP requires width == 2*height, got {width}x{height}")
    j = np.arange(height, dtype=float)
    row = np.cos((j + 0.5 - height / 2) * math.pi / height)
    return WeightMap(width, height, np.repeat(row[:, None], width, axis=1))


# ---------------------------------------------------------------------------
# resampling
# ---------------------------------------------------------------------------

def _bilinear(plane: np.ndarray, x, y, wrap_x: bool):
    h, w = plane.shape
    x0f = np.floor(x)
    y0f = np.floor(y)
    fx = x - x0f
    fy = y - y0f
    x0 = x0f.astype(np.int64)
    y0 = np.clip(y0f.astype(np.int64), 0, h - 1)
    y1 = np.clip(y0 + 1, 0, h - 1)
    if wrap_x:
        x0 %= w
        x1 = (x0 + 1) % w
    else:
        x0 = np.clip(x0, 0, w - 1)
        x1 = np.clip(x0 + 1, 0, w - 1)
    p = plane.astype(np.float64)
    top = p[y0, x0] * (1 - fx) + p[y0, x1] * fx
    bot = p[y1, x0] * (1 - fx) + p[y1, x1] * fx
    return top * (1 - fy) + bot * fy


def _nearest(plane: np.ndarray, x, y, wrap_x: bool):
    h, w = plane.shape
    xi = np.rint(x).astype(np.int64)
    yi = np.clip(np.rint(y).astype(np.int64), 0, h - 1)
    xi = xi % w if wrap_x else np.clip(xi, 0, w - 1)
    return plane[yi, xi].astype(np.float64)


def _convert_plane(src: np.ndarray, src_kind: Projection, dst_kind: Projection,
                   out_w: int, out_h: int, guard: int, nearest: bool) -> np.ndarray:
    # `guard` applies to whichever side of the pair is not ERP.
    sh, sw = src.shape
    if dst_kind is Projection.ERP:
        if out_w != 2 * out_h:
            raise ValueError(f"ERP output requires width == 2*height, got {out_w}x{out_h}")
        lon, lat = _erp_pixel_dirs(out_w, out_h)
        active = np.ones((out_h, out_w), dtype=bool)
    elif dst_kind is Projection.CMP:
        active = _mask_cmp(out_w, out_h, guard)
        lon, lat = _cmp_pixel_dirs(out_w, out_h)
    else:
        active = _mask_ssp(out_w, out_h, guard)
        lon, lat = _ssp_pixel_dirs(out_w, out_h, guard)

    if src_kind is Projection.ERP:
        if sw != 2 * sh:
            raise ValueError(f"ERP source requires width == 2*height, got {sw}x{sh}")
        x = (lon / (2 * math.pi) + 0.5) * sw - 0.5
        y = np.clip((0.5 - lat / math.pi) * sh - 0.5, 0.0, sh - 1.0)
        wrap = True
    elif src_kind is Projection.CMP:
        _mask_cmp(sw, sh, guard)
        x, y = _cmp_dir_to_pixel(lon, lat, sw, sh)
        wrap = False
    else:
        _mask_ssp(sw, sh, guard)
        x, y = _ssp_dir_to_pixel(lon, lat, sw, sh, guard)
        wrap = False

    sample = _nearest if nearest else _bilinear
    values = sample(src, x, y, wrap)
    out = np.full((out_h, out_w), INACTIVE_FILL, dtype=np.uint8)
    out[active] = np.clip(np.rint(values[active]), 0, 255).astype(np.uint8)
    return out


def _erp_pixel_dirs(w: int, h: int):
    xs = np.arange(w, dtype=float)
    ys = np.arange(h, dtype=float)
    lon = ((xs + 0.5) / w - 0.5) * 2 * math.pi
    lat = (0.5 - (ys + 0.5) / h) * math.pi
    LON, LAT = np.meshgrid(lon, lat)
    return LON, LAT


_CONVERT_PAIRS = {
    (Projection.ERP, Projection.CMP),
    (Projection.CMP, Projection.ERP),
    (Projection.ERP, Projection.SSP),
    (Projection.SSP, Projection.ERP),
}


def convert(frame: Frame420, src: ProjectionFormat, dst: ProjectionFormat,
            out_width: int, out_height: int, nearest: bool = False) -> Frame420:
    """Resample a frame between projection formats via the sphere.

    Supports ERP<->CMP and ERP<->SSP. Active target pixels are bilinearly
    sampled from the source (nearest-neighbor with ``nearest=True``);
    inactive target pixels are set to mid-gray.
    """
    pair = (src.kind, dst.kind)
    if pair not in _CONVERT_PAIRS:
        raise ValueError(
            f"unsupported conversion {src.kind.value} -> {dst.kind.value}; "
            "supported pairs are erp<->cmp and erp<->ssp"
        )
    if out_width % 2 or out_height % 2:
        raise ValueError("output dimensions must be even for 4:2:0 frames")
    packed = dst if dst.kind is not Projection.ERP else src
    if packed.kind is Projection.SSP and packed.guard_width % 2:
        raise ValueError("SSP guard_width must be even to convert 4:2:0 frames")
    planes = []
    for plane, div in ((frame.luma, 1), (frame.cb, 2), (frame.cr, 2)):
        guard = packed.guard_width // div if packed.kind is Projection.SSP else packed.guard_width
        out = _convert_plane(
            plane.samples, src.kind, dst.kind,
            out_width // div, out_height // div, guard, nearest,
        )
        planes.append(FramePlane(out_width // div, out_height // div, out))
    return Frame420(*planes)
