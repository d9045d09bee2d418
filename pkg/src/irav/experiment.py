"""Sweep runner: rate-distortion comparisons of baseline vs mask-aware coding.

A sweep encodes one sequence at several QPs under two tool configurations
(baseline: all three mask tools off; proposed: all on; SAO enabled in both),
measures quality per the format's pipeline, and reports the BD-Rate of
proposed against baseline.

Quality pipelines by format:

* erp          -- encode the input directly, sphere-weighted PSNR.
* cmp, ssp     -- the input is the ERP source: convert to the packed format,
                  encode, decode, convert back to ERP, sphere-weighted PSNR
                  against the original.
* other formats -- the input is already packed; mask-aware PSNR in the
                  packed domain.

All quality numbers are luma, averaged per frame. Rates count the whole
bitstream file. Encodes are independent and may run in parallel processes;
results are deterministic regardless of job count.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .codec import EncoderConfig, ToolFlags, encode_sequence
from .frame_io import read_mask_pgm, read_yuv420, write_mask_pgm, write_yuv420
from .geometry import Projection, ProjectionFormat, convert, generate_mask
from .metrics import RdPoint, bd_rate, masked_psnr, rate_kbps, ws_psnr_erp

DEFAULT_QPS = (22, 27, 32, 37)

BASELINE = "baseline"
PROPOSED = "proposed"

TOOL_CONFIGS = {
    BASELINE: ToolFlags(False, False, False, sao_enabled=True),
    PROPOSED: ToolFlags(True, True, True, sao_enabled=True),
}

CSV_COLUMNS = ("sequence", "format", "config", "qp", "bits", "kbps",
               "quality_db", "metric_kind")


@dataclass
class ExperimentSpec:
    input_path: str
    width: int
    height: int
    fps: float
    fmt: ProjectionFormat
    outdir: str
    sequence_name: str = ""
    qps: tuple = DEFAULT_QPS
    frames: int = 33
    intra_period: int = 16
    search_range: int = 8
    mask_path: str | None = None
    coded_width: int | None = None
    coded_height: int | None = None
    fill_inactive: bool = False
    jobs: int = 1
    configs: dict = field(default_factory=lambda: dict(TOOL_CONFIGS))

    def __post_init__(self):
        if len(self.qps) < 4:
            raise ValueError("a sweep needs at least 4 QPs for BD-Rate")
        if len(set(self.qps)) != len(self.qps):
            raise ValueError("duplicate QPs in sweep")
        if len(self.configs) < 2 or BASELINE not in self.configs:
            raise ValueError("a sweep needs the baseline plus at least one test config")
        if not self.sequence_name:
            self.sequence_name = os.path.splitext(os.path.basename(self.input_path))[0]


@dataclass
class ReportRow:
    sequence: str
    fmt: str
    bd_rate_percent: float
    points: dict = field(default_factory=dict)  # (config, qp) -> (bits, quality)


def default_coded_dims(kind: Projection, erp_w: int, erp_h: int):
    """Coded-format resolution derived from the ERP source resolution."""
    if kind is Projection.CMP:
        face = erp_h // 2
        face -= face % 16
        return 4 * face, 3 * face
    if kind is Projection.SSP:
        w = max(32, (erp_w // 4) // 16 * 16)
        return w, 6 * w + 32
    raise ValueError(f"no coded-dimension rule for {kind.value}")


def _prepare(spec: ExperimentSpec):
    """Write coded-domain input and mask into outdir; return job template."""
    os.makedirs(spec.outdir, exist_ok=True)
    kind = spec.fmt.kind
    frames = read_yuv420(spec.input_path, spec.width, spec.height, spec.frames)
    if not frames:
        raise ValueError(f"no frames read from {spec.input_path}")

    if kind in (Projection.CMP, Projection.SSP):
        cw, ch = spec.coded_width, spec.coded_height
        if cw is None or ch is None:
            cw, ch = default_coded_dims(kind, spec.width, spec.height)
        erp = ProjectionFormat(Projection.ERP, spec.fmt.guard_width)
        coded = [convert(f, erp, spec.fmt, cw, ch) for f in frames]
        quality_mode = "ws-erp-roundtrip"
    else:
        cw, ch = spec.width, spec.height
        coded = frames
        quality_mode = "ws-erp-direct" if kind is Projection.ERP else "masked"

    if spec.mask_path:
        mask = read_mask_pgm(spec.mask_path)
        if (mask.width, mask.height) != (cw, ch):
            raise ValueError(
                f"mask {mask.width}x{mask.height} does not match coded "
                f"dimensions {cw}x{ch}"
            )
    else:
        mask = generate_mask(spec.fmt, cw, ch)

    if spec.fill_inactive and not mask.all_active:
        from .frame_io import subsample_mask_420

        cmask = subsample_mask_420(mask)
        for f in coded:
            f.luma.samples[~mask.bits] = 128
            f.cb.samples[~cmask.bits] = 128
            f.cr.samples[~cmask.bits] = 128

    coded_path = os.path.join(spec.outdir, "coded_input.yuv")
    write_yuv420(coded, coded_path)
    mask_file = os.path.join(spec.outdir, "mask.pgm")
    write_mask_pgm(mask, mask_file)

    return {
        "coded_path": coded_path,
        "coded_width": cw,
        "coded_height": ch,
        "mask_path": mask_file,
        "frames": len(coded),
        "intra_period": spec.intra_period,
        "search_range": spec.search_range,
        "quality_mode": quality_mode,
        "erp_path": spec.input_path,
        "erp_width": spec.width,
        "erp_height": spec.height,
        "erp_frames": spec.frames,
        "guard_width": spec.fmt.guard_width,
        "fmt": kind.value,
        "outdir": spec.outdir,
        "sequence": spec.sequence_name,
    }


def _sweep_job(payload: dict) -> dict:
    """Encode one (config, qp) point and measure its quality. Picklable."""
    frames = read_yuv420(payload["coded_path"], payload["coded_width"],
                         payload["coded_height"], payload["frames"])
    mask = read_mask_pgm(payload["mask_path"])
    cfg = EncoderConfig(
        qp=payload["qp"],
        intra_period=payload["intra_period"],
        search_range=payload["search_range"],
        tools=payload["tools"],
    )
    result = encode_sequence(frames, mask, cfg)
    bit_name = f"{payload['sequence']}_{payload['config']}_qp{payload['qp']}.bit"
    with open(os.path.join(payload["outdir"], bit_name), "wb") as fh:
        fh.write(result.bitstream)

    mode = payload["quality_mode"]
    if mode == "ws-erp-direct":
        vals = [ws_psnr_erp(o.luma, r.luma) for o, r in zip(frames, result.recon)]
        metric = "ws_psnr_erp"
    elif mode == "ws-erp-roundtrip":
        erp_frames = read_yuv420(payload["erp_path"], payload["erp_width"],
                                 payload["erp_height"], payload["erp_frames"])
        fmt = ProjectionFormat(Projection(payload["fmt"]), payload["guard_width"])
        erp = ProjectionFormat(Projection.ERP, payload["guard_width"])
        vals = []
        for orig, rec in zip(erp_frames, result.recon):
            back = convert(rec, fmt, erp, payload["erp_width"], payload["erp_height"])
            vals.append(ws_psnr_erp(orig.luma, back.luma))
        metric = "ws_psnr_erp"
    else:
        vals = [masked_psnr(o.luma, r.luma, mask) for o, r in zip(frames, result.recon)]
        metric = "masked_psnr"

    return {
        "config": payload["config"],
        "qp": payload["qp"],
        "bits": result.total_bits,
        "quality_db": sum(vals) / len(vals),
        "metric_kind": metric,
    }


def run_sweep(spec: ExperimentSpec):
    """Run the full sweep; writes points.csv and report.txt.

    Returns one ReportRow per non-baseline configuration (BD-Rate against
    the baseline).
    """
    template = _prepare(spec)
    config_names = list(spec.configs)
    jobs = []
    for config in config_names:
        for qp in spec.qps:
            job = dict(template)
            job["config"] = config
            job["tools"] = spec.configs[config]
            job["qp"] = int(qp)
            jobs.append(job)

    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            raw = list(pool.map(_sweep_job, jobs))
    else:
        raw = [_sweep_job(j) for j in jobs]
    results = {(r["config"], r["qp"]): r for r in raw}

    points_path = os.path.join(spec.outdir, "points.csv")
    with open(points_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for config in config_names:
            for qp in spec.qps:
                r = results[(config, qp)]
                kbps = rate_kbps(r["bits"], template["frames"], spec.fps)
                writer.writerow([
                    spec.sequence_name, template["fmt"], config, qp,
                    r["bits"], f"{kbps:.6f}", f"{r['quality_db']:.6f}",
                    r["metric_kind"],
                ])

    def curve(config):
        return [
            RdPoint(rate_kbps(results[(config, qp)]["bits"], template["frames"],
                              spec.fps),
                    results[(config, qp)]["quality_db"])
            for qp in spec.qps
        ]

    anchor = curve(BASELINE)
    rows = []
    for config in config_names:
        if config == BASELINE:
            continue
        bd = bd_rate(anchor, curve(config))
        rows.append(ReportRow(
            spec.sequence_name, template["fmt"], bd.percent,
            {(c, q): (results[(c, q)]["bits"], results[(c, q)]["quality_db"])
             for c in (BASELINE, config) for q in spec.qps},
        ))
    _write_report(spec, template, results, config_names, rows)
    return rows


def _write_report(spec, template, results, config_names, rows):
    lines = []
    lines.append("inactive-region coding sweep")
    lines.append(
        f"sequence: {spec.sequence_name}  format: {template['fmt']}  "
        f"coded: {template['coded_width']}x{template['coded_height']}  "
        f"frames: {template['frames']}  fps: {spec.fps:g}"
    )
    lines.append(
        f"GOP: IPPP, intra period {spec.intra_period} "
        "(not a random-access structure; numbers are not comparable to "
        "reference-encoder results)"
    )
    metric = results[(BASELINE, spec.qps[0])]["metric_kind"]
    lines.append(f"quality metric: {metric} (luma, per-frame mean)")
    lines.append("")
    lines.append(f"{'config':<10} {'qp':>4} {'bits':>12} {'kbps':>12} {'quality_db':>12}")
    for config in config_names:
        for qp in spec.qps:
            r = results[(config, qp)]
            kbps = rate_kbps(r["bits"], template["frames"], spec.fps)
            lines.append(
                f"{config:<10} {qp:>4} {r['bits']:>12} {kbps:>12.3f} "
                f"{r['quality_db']:>12.4f}"
            )
    lines.append("")
    lines.append(f"{'sequence':<20} {'format':<8} {'config':<12} {'bd_rate_percent':>16}")
    for row in rows:
        config = next(c for c, _ in row.points if c != BASELINE)
        lines.append(
            f"{row.sequence:<20} {row.fmt:<8} {config:<12} "
            f"{row.bd_rate_percent:>16.6f}"
        )
    avg = sum(r.bd_rate_percent for r in rows) / len(rows)
    lines.append(f"{'Average':<20} {'':<8} {'':<12} {avg:>16.6f}")
    with open(os.path.join(spec.outdir, "report.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
