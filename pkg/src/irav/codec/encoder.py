"""Block-based encoder with the three mask-aware coding tools.

Structure: fixed 32x32 CTUs (16x16 for chroma) with recursive quadtree
splits down to 8x8, IPPP GOP with a configurable intra period, and SAO as
the only in-loop filter. Each plane of a frame is coded independently with
the plane-appropriate activity mask: luma uses the signaled mask, chroma the
conservatively subsampled one.

The three tools:

* masked_rdo     -- every RDO distortion (SAD for integer motion search,
                    SATD for half-pel and intra preselection, SSD for final
                    decisions) ignores inactive pixels.
* zero_inactive_residual -- residual samples at inactive positions are set
                    to zero after prediction and before the transform, in
                    the RDO loop and in final coding alike.
* masked_sao     -- SAO statistics skip inactive pixels (application is
                    unchanged and mask-free).

Decisions are trial-coded with exact bit counts, then the chosen tree is
serialized, so decoder output is bit-identical to the encoder-side
reconstruction by construction.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ..frame_io import ActivityMask, Frame420, FramePlane, subsample_mask_420
from ..rdo import lambda_ssd, masked_ssd, satd_batch, ssd
from ..sao import SAO_BO, SAO_EO, SAO_OFF, SaoParams, apply_sao, choose_params, collect_stats
from .bitio import BitWriter, signed_to_unsigned, ue_bits
from .bitstream import (
    SequenceHeader,
    TOOL_MASKED_RDO,
    TOOL_MASKED_SAO,
    TOOL_SAO_ENABLED,
    TOOL_ZERO_RESIDUAL,
)
from .entropy import block_bits, entropy_encode_block
from .predict import (
    INTRA_MODE_BITS,
    INTRA_MODES,
    UNDECODED,
    gather_intra_refs,
    intra_predict,
    motion_search,
    predict_inter,
    refine_half_pel,
)
from .transform import forward_dct, quantize, reconstruct_block, zero_inactive_residual

CTU_SIZE = 32
MIN_CU = 8
INTRA_FULL_RD = 2  # intra modes carried from SATD preselection into full RD


@dataclass
class ToolFlags:
    masked_rdo: bool = False
    zero_inactive_residual: bool = False
    masked_sao: bool = False
    sao_enabled: bool = True


@dataclass
class EncoderConfig:
    qp: int
    ctu_size: int = CTU_SIZE
    min_cu: int = MIN_CU
    intra_period: int = 16
    search_range: int = 8
    tools: ToolFlags = field(default_factory=ToolFlags)

    def __post_init__(self):
        if not 0 <= self.qp <= 51:
            raise ValueError(f"qp must be in [0, 51], got {self.qp}")
        if self.ctu_size != CTU_SIZE or self.min_cu != MIN_CU:
            raise ValueError(
                f"fixed block structure: ctu_size {CTU_SIZE}, min_cu {MIN_CU}"
            )
        if not 1 <= self.intra_period <= 0xFFFF:
            raise ValueError("intra_period must be in [1, 65535]")
        if self.search_range < 0:
            raise ValueError("search_range must be >= 0")


@dataclass
class EncodeResult:
    bitstream: bytes
    recon: list
    frame_bits: list
    total_bits: int


def write_sao_params(writer, params: SaoParams):
    if params.mode == SAO_OFF:
        writer.write_bit(0)
        return
    writer.write_bit(1)
    writer.write_bit(1 if params.mode == SAO_EO else 0)
    if params.mode == SAO_EO:
        writer.write_uint(params.eo_direction, 2)
    else:
        writer.write_uint(params.band_start, 5)
    for off in params.offsets:
        writer.write_uint(abs(off), 3)
        writer.write_bit(1 if off < 0 else 0)


class _PlaneCoder:
    """Codes one plane of one frame: CU tree decisions, then SAO."""

    def __init__(self, orig, recon, ref, active, qp, tools, ctu, search_range,
                 is_intra_frame):
        self.orig = orig
        self.recon = recon
        self.ref = ref
        self.active = active
        self.qp = qp
        self.tools = tools
        self.ctu = ctu
        self.search_range = search_range
        self.is_intra_frame = is_intra_frame
        self.lam_ssd = lambda_ssd(qp)
        self.h, self.w = orig.shape

    # -- distortion under the configured RDO rule ------------------------

    def _dist(self, a, b, active):
        if self.tools.masked_rdo:
            return masked_ssd(a, b, active)
        return ssd(a, b)

    # -- residual path ----------------------------------------------------

    def _code_residual(self, orig, pred, active, is_intra_pred):
        res = orig.astype(np.int64) - pred.astype(np.int64)
        if self.tools.zero_inactive_residual:
            res = zero_inactive_residual(res, active)
        levels = quantize(forward_dct(res), self.qp, is_intra_pred)
        bits = block_bits(levels)
        rec = reconstruct_block(pred, levels, self.qp)
        return levels, bits, rec

    # -- leaf (single CU) coding -------------------------------------------

    def _code_leaf(self, x, y, size, orig, active):
        refs = gather_intra_refs(self.recon, x, y, size)
        preds = [intra_predict(m, refs) for m in INTRA_MODES]
        diffs = np.stack(preds).astype(np.int32) - orig.astype(np.int32)
        if self.tools.masked_rdo:
            diffs = diffs * active
        satds = satd_batch(diffs)
        ranked = sorted(range(len(INTRA_MODES)), key=lambda i: satds[i])

        pred_flag_bits = 0 if self.is_intra_frame else 1
        candidates = []
        if not self.is_intra_frame:
            search_mask = active if self.tools.masked_rdo else None
            mv_int, _ = motion_search(orig, self.ref, (x, y), self.search_range,
                                      search_mask)
            mv_hp, _ = refine_half_pel(orig, self.ref, (x, y), mv_int, search_mask)
            pred = predict_inter(self.ref, (x, y), size, mv_hp)
            levels, cbits, rec = self._code_residual(orig, pred, active, False)
            mv_bits = (ue_bits(signed_to_unsigned(mv_hp[0]))
                       + ue_bits(signed_to_unsigned(mv_hp[1])))
            candidates.append((("inter", mv_hp, levels),
                               pred_flag_bits + mv_bits + cbits, rec))
        for mi in ranked[:INTRA_FULL_RD]:
            levels, cbits, rec = self._code_residual(orig, preds[mi], active, True)
            candidates.append((("intra", mi, levels),
                               pred_flag_bits + INTRA_MODE_BITS + cbits, rec))

        best = None
        for payload, bits, rec in candidates:
            cost = self._dist(orig, rec, active) + self.lam_ssd * bits
            if best is None or cost < best[0]:
                best = (cost, payload, bits, rec)
        return best[1], best[2], best[3]

    # -- recursive CU tree --------------------------------------------------

    def _code_cu(self, x, y, size):
        if x >= self.w or y >= self.h:
            return None, 0
        half = size // 2
        if x + size > self.w or y + size > self.h:
            # implicit split at the frame boundary, no flag
            children, total = [], 0
            for oy, ox in ((0, 0), (0, half), (half, 0), (half, half)):
                dec, bits = self._code_cu(x + ox, y + oy, half)
                children.append(dec)
                total += bits
            return ("split", children), total

        orig = self.orig[y : y + size, x : x + size]
        active = self.active[y : y + size, x : x + size]
        payload, leaf_bits, leaf_recon = self._code_leaf(x, y, size, orig, active)
        if size <= MIN_CU:
            self.recon[y : y + size, x : x + size] = leaf_recon
            return ("leaf", payload), leaf_bits

        leaf_cost = self._dist(orig, leaf_recon, active) + self.lam_ssd * (leaf_bits + 1)
        children, child_bits = [], 0
        for oy, ox in ((0, 0), (0, half), (half, 0), (half, half)):
            dec, bits = self._code_cu(x + ox, y + oy, half)
            children.append(dec)
            child_bits += bits
        split_recon = self.recon[y : y + size, x : x + size]
        split_cost = self._dist(orig, split_recon, active) + self.lam_ssd * (child_bits + 1)
        if leaf_cost <= split_cost:
            self.recon[y : y + size, x : x + size] = leaf_recon
            return ("leaf", payload), leaf_bits + 1
        return ("split", children), child_bits + 1

    def _write_cu(self, writer, dec, x, y, size):
        if dec is None:
            return
        half = size // 2
        kind, payload = dec
        forced = x + size > self.w or y + size > self.h
        if not forced and size > MIN_CU:
            writer.write_bit(1 if kind == "split" else 0)
        if kind == "split":
            for (oy, ox), child in zip(((0, 0), (0, half), (half, 0), (half, half)),
                                       payload):
                self._write_cu(writer, child, x + ox, y + oy, half)
            return
        what, info, levels = payload
        if not self.is_intra_frame:
            writer.write_bit(1 if what == "intra" else 0)
        if what == "intra":
            writer.write_uint(info, INTRA_MODE_BITS)
        else:
            writer.write_ue(signed_to_unsigned(info[0]))
            writer.write_ue(signed_to_unsigned(info[1]))
        entropy_encode_block(levels, writer)

    # -- SAO ------------------------------------------------------------------

    def _sao_pass(self, writer):
        writer.write_bit(1 if self.tools.sao_enabled else 0)
        if not self.tools.sao_enabled:
            return
        for cy in range(0, self.h, self.ctu):
            for cx in range(0, self.w, self.ctu):
                sl = np.s_[cy : min(cy + self.ctu, self.h),
                           cx : min(cx + self.ctu, self.w)]
                ov, rv, av = self.orig[sl], self.recon[sl], self.active[sl]
                eo = [collect_stats(ov, rv, av, "eo", d, self.tools.masked_sao)
                      for d in range(4)]
                bo = collect_stats(ov, rv, av, "bo", masked=self.tools.masked_sao)
                params = choose_params(eo, bo, self.lam_ssd)
                write_sao_params(writer, params)
                self.recon[sl] = apply_sao(rv, params)

    def encode_into(self, writer):
        for cy in range(0, self.h, self.ctu):
            for cx in range(0, self.w, self.ctu):
                dec, bits = self._code_cu(cx, cy, self.ctu)
                before = writer.bit_position
                self._write_cu(writer, dec, cx, cy, self.ctu)
                written = writer.bit_position - before
                if written != bits:
                    raise AssertionError(
                        f"rate accounting drift: counted {bits}, wrote {written}"
                    )
        self._sao_pass(writer)


def effective_tools(tools: ToolFlags, mask_all_active: bool) -> ToolFlags:
    """Normalize tool flags to their effective values.

    With an all-active mask the three mask tools alter nothing, so they are
    recorded (and run) as off; this keeps bitstreams byte-identical across
    tool settings whenever the mask has no inactive pixels.
    """
    on = not mask_all_active
    return ToolFlags(
        masked_rdo=tools.masked_rdo and on,
        zero_inactive_residual=tools.zero_inactive_residual and on,
        masked_sao=tools.masked_sao and on,
        sao_enabled=tools.sao_enabled,
    )


def _tool_bits(tools: ToolFlags) -> int:
    bits = 0
    if tools.masked_rdo:
        bits |= TOOL_MASKED_RDO
    if tools.zero_inactive_residual:
        bits |= TOOL_ZERO_RESIDUAL
    if tools.masked_sao:
        bits |= TOOL_MASKED_SAO
    if tools.sao_enabled:
        bits |= TOOL_SAO_ENABLED
    return bits


def encode_sequence(frames, mask: ActivityMask, cfg: EncoderConfig) -> EncodeResult:
    """Encode a frame sequence; returns the bitstream, reconstructions, and stats.

    The reconstruction frames are bit-identical to what decode_sequence
    produces from the returned bitstream.
    """
    frames = list(frames)
    if not frames:
        raise ValueError("cannot encode an empty sequence")
    w, h = frames[0].width, frames[0].height
    for i, f in enumerate(frames):
        if f.width != w or f.height != h:
            raise ValueError(f"frame {i} is {f.width}x{f.height}, expected {w}x{h}")
    if mask.width != w or mask.height != h:
        raise ValueError(
            f"mask is {mask.width}x{mask.height}, expected {w}x{h} to match luma"
        )
    if w % 16 or h % 16:
        raise ValueError(f"luma dimensions must be multiples of 16, got {w}x{h}")
    if len(frames) > 0xFFFFFFFF:
        raise ValueError("too many frames")

    tools = effective_tools(cfg.tools, mask.all_active)
    luma_active = mask.bits
    chroma_active = subsample_mask_420(mask).bits
    chroma_range = max(1, cfg.search_range // 2)

    header = SequenceHeader(w, h, len(frames), cfg.qp, cfg.intra_period,
                            cfg.ctu_size, _tool_bits(tools))
    out = bytearray(header.pack())
    prev = None
    recon_frames = []
    frame_bits = []
    for idx, frame in enumerate(frames):
        is_i = idx % cfg.intra_period == 0
        writer = BitWriter()
        plane_specs = (
            (frame.luma.samples, luma_active, cfg.ctu_size, cfg.search_range),
            (frame.cb.samples, chroma_active, cfg.ctu_size // 2, chroma_range),
            (frame.cr.samples, chroma_active, cfg.ctu_size // 2, chroma_range),
        )
        recons = []
        for p, (orig, active, ctu, rng) in enumerate(plane_specs):
            recon = np.full_like(orig, UNDECODED)
            ref = None if is_i else prev[p]
            coder = _PlaneCoder(orig, recon, ref, active, cfg.qp, tools, ctu,
                                rng, is_i)
            coder.encode_into(writer)
            recons.append(recon)
        bits = writer.bit_position
        writer.byte_align()
        body = writer.getvalue()
        out += struct.pack(">I", bits)
        out += body
        frame_bits.append(bits)
        prev = recons
        cw, ch = w // 2, h // 2
        recon_frames.append(Frame420(
            FramePlane(w, h, recons[0].copy()),
            FramePlane(cw, ch, recons[1].copy()),
            FramePlane(cw, ch, recons[2].copy()),
        ))
    return EncodeResult(bytes(out), recon_frames, frame_bits, len(out) * 8)
