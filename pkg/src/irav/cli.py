"""Command-line interface.

Subcommands: genmask, convert, encode, decode, evaluate, sweep, synth.
Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

``encode`` and ``sweep`` accept ``--config FILE`` with line-oriented
``key = value`` pairs (same names as the long options, underscores for
dashes); explicit flags override the file.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .codec import BitstreamError, EncoderConfig, ToolFlags, decode_sequence, encode_sequence
from .experiment import DEFAULT_QPS, ExperimentSpec, run_sweep
from .frame_io import (
    read_mask_pgm,
    read_yuv420,
    write_mask_pgm,
    write_yuv420,
)
from .geometry import Projection, ProjectionFormat, convert, generate_mask
from .metrics import masked_psnr, psnr, ws_psnr_erp
from .synth import KINDS, synthesize_sequence

STATS_SCHEMA = 1

TOOL_NAMES = ("masked-rdo", "zero-residual", "masked-sao")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_tools(text: str, sao: bool) -> ToolFlags:
    text = text.strip().lower()
    if text == "none":
        names = []
    elif text == "all":
        names = list(TOOL_NAMES)
    else:
        names = [t.strip() for t in text.split(",") if t.strip()]
        unknown = [t for t in names if t not in TOOL_NAMES]
        if unknown:
            raise UsageError(
                f"unknown tool(s) {', '.join(unknown)}; expected from {TOOL_NAMES}"
            )
    return ToolFlags(
        masked_rdo="masked-rdo" in names,
        zero_inactive_residual="zero-residual" in names,
        masked_sao="masked-sao" in names,
        sao_enabled=sao,
    )


def _parse_config_file(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _apply_config_defaults(parser, argv):
    """Parse --config early and install its values as parser defaults."""
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if not known.config:
        return
    raw = _parse_config_file(known.config)
    defaults = {}
    for action in parser._actions:
        if action.dest in raw:
            val = raw[action.dest]
            if action.type is int:
                defaults[action.dest] = int(val)
            elif action.type is float:
                defaults[action.dest] = float(val)
            elif isinstance(action, argparse._StoreTrueAction):
                defaults[action.dest] = val.lower() in ("1", "true", "yes", "on")
            else:
                defaults[action.dest] = val
    parser.set_defaults(**defaults)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_genmask(args) -> int:
    fmt = ProjectionFormat(Projection(args.format), args.guard)
    mask = generate_mask(fmt, args.width, args.height)
    write_mask_pgm(mask, args.out)
    if fmt.kind is Projection.ERP:
        print("note: ERP has no inactive region; mask is all-active")
    print(
        f"inactive fraction: {mask.inactive_fraction:.4f} "
        f"({mask.inactive_count} of {mask.bits.size} pixels)"
    )
    return 0


def cmd_convert(args) -> int:
    src = ProjectionFormat(Projection(args.src_format), args.guard)
    dst = ProjectionFormat(Projection(args.dst_format), args.guard)
    frames = read_yuv420(args.input, args.width, args.height, args.frames)
    out = [
        convert(f, src, dst, args.out_width, args.out_height, nearest=args.nearest)
        for f in frames
    ]
    nbytes = write_yuv420(out, args.output)
    print(f"wrote {len(out)} frames ({nbytes} bytes) to {args.output}")
    return 0


def cmd_encode(args) -> int:
    mask = read_mask_pgm(args.mask)
    frames = read_yuv420(args.input, args.width, args.height, args.frames)
    if not frames:
        raise ValueError(f"no frames read from {args.input}")
    tools = _parse_tools(args.tools, sao=not args.no_sao)
    cfg = EncoderConfig(
        qp=args.qp,
        intra_period=args.intra_period,
        search_range=args.search_range,
        tools=tools,
    )
    result = encode_sequence(frames, mask, cfg)

    y_psnr = [psnr(o.luma, r.luma) for o, r in zip(frames, result.recon)]
    stats = {
        "schema": STATS_SCHEMA,
        "width": args.width,
        "height": args.height,
        "frames": len(frames),
        "qp": args.qp,
        "intra_period": args.intra_period,
        "tools": {
            "masked_rdo": tools.masked_rdo,
            "zero_inactive_residual": tools.zero_inactive_residual,
            "masked_sao": tools.masked_sao,
            "sao_enabled": tools.sao_enabled,
        },
        "total_bits": result.total_bits,
        "per_frame_bits": result.frame_bits,
        "psnr_y": sum(y_psnr) / len(y_psnr),
    }
    if not mask.all_active:
        m_psnr = [masked_psnr(o.luma, r.luma, mask) for o, r in zip(frames, result.recon)]
        stats["masked_psnr_y"] = sum(m_psnr) / len(m_psnr)

    with open(args.out, "wb") as fh:
        fh.write(result.bitstream)
    if args.stats:
        with open(args.stats, "w") as fh:
            json.dump(stats, fh, indent=2)
            fh.write("\n")
    if args.recon:
        write_yuv420(result.recon, args.recon)
    print(
        f"encoded {len(frames)} frames at qp {args.qp}: {result.total_bits} bits, "
        f"psnr_y {stats['psnr_y']:.4f} dB"
    )
    return 0


def cmd_decode(args) -> int:
    with open(args.input, "rb") as fh:
        data = fh.read()
    frames = decode_sequence(data)
    write_yuv420(frames, args.output)
    print(f"decoded {len(frames)} frames to {args.output}")
    if args.verify:
        w, h = frames[0].width, frames[0].height
        expect = read_yuv420(args.verify, w, h)
        same = len(expect) == len(frames) and all(
            np.array_equal(a.luma.samples, b.luma.samples)
            and np.array_equal(a.cb.samples, b.cb.samples)
            and np.array_equal(a.cr.samples, b.cr.samples)
            for a, b in zip(frames, expect)
        )
        if not same:
            raise ValueError(f"decoded output differs from {args.verify}")
        print("verify: decoded output matches reference exactly")
    return 0


def cmd_evaluate(args) -> int:
    a = read_yuv420(args.ref, args.width, args.height, args.frames)
    b = read_yuv420(args.test, args.width, args.height, args.frames)
    if len(a) != len(b):
        raise ValueError(f"frame counts differ: {len(a)} vs {len(b)}")
    if not a:
        raise ValueError("no frames to evaluate")
    if args.metric == "masked-psnr":
        if not args.mask:
            raise UsageError("--mask is required for masked-psnr")
        mask = read_mask_pgm(args.mask)
        values = [masked_psnr(x.luma, y.luma, mask) for x, y in zip(a, b)]
    elif args.metric == "ws-psnr":
        values = [ws_psnr_erp(x.luma, y.luma) for x, y in zip(a, b)]
    else:
        values = [psnr(x.luma, y.luma) for x, y in zip(a, b)]
    for i, v in enumerate(values):
        print(f"frame {i}: {v:.4f} dB")
    print(f"mean {args.metric} (luma): {sum(values) / len(values):.4f} dB")
    return 0


def cmd_sweep(args) -> int:
    qps = tuple(int(q) for q in args.qps.split(","))
    spec = ExperimentSpec(
        input_path=args.input,
        width=args.width,
        height=args.height,
        fps=args.fps,
        fmt=ProjectionFormat(Projection(args.format), args.guard),
        outdir=args.outdir,
        sequence_name=args.name or "",
        qps=qps,
        frames=args.frames,
        intra_period=args.intra_period,
        search_range=args.search_range,
        mask_path=args.mask,
        coded_width=args.coded_width,
        coded_height=args.coded_height,
        fill_inactive=args.fill_inactive,
        jobs=args.jobs,
    )
    rows = run_sweep(spec)
    for row in rows:
        print(
            f"BD-Rate (proposed vs baseline) for {row.sequence} [{row.fmt}]: "
            f"{row.bd_rate_percent:+.4f}%"
        )
    print(f"points.csv and report.txt written to {spec.outdir}")
    return 0


def cmd_synth(args) -> int:
    frames = synthesize_sequence(args.kind, args.width, args.height,
                                 args.frames, args.seed)
    nbytes = write_yuv420(frames, args.out)
    print(f"wrote {len(frames)} {args.kind} frames ({nbytes} bytes) to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="irav",
                     description="inactive-region-aware video codec tools")
    sub = parser.add_subparsers(dest="command", required=True)
    formats = [p.value for p in Projection]

    p = sub.add_parser("genmask", help="generate an activity mask PGM")
    p.add_argument("--format", required=True, choices=formats)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--guard", type=int, default=16)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_genmask)

    p = sub.add_parser("convert", help="resample between projection formats")
    p.add_argument("--from", dest="src_format", required=True, choices=formats)
    p.add_argument("--to", dest="dst_format", required=True, choices=formats)
    p.add_argument("--input", required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--out-width", type=int, required=True)
    p.add_argument("--out-height", type=int, required=True)
    p.add_argument("--frames", type=int, default=None)
    p.add_argument("--guard", type=int, default=16)
    p.add_argument("--nearest", action="store_true",
                   help="nearest-neighbor resampling (debug)")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("encode", help="encode a YUV420 sequence")
    p.add_argument("--config", help="key = value config file; flags override")
    p.add_argument("--input", required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--qp", type=int, required=True)
    p.add_argument("--frames", type=int, default=None)
    p.add_argument("--intra-period", type=int, default=16)
    p.add_argument("--search-range", type=int, default=8)
    p.add_argument("--tools", default="none",
                   help=f"none, all, or comma list of {','.join(TOOL_NAMES)}")
    p.add_argument("--no-sao", action="store_true", help="disable the SAO filter")
    p.add_argument("--out", required=True)
    p.add_argument("--stats", help="write stats JSON here")
    p.add_argument("--recon", help="write encoder reconstruction YUV here")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a bitstream")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--verify", help="compare decoded output to this YUV file")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("evaluate", help="quality metrics between two YUV files")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--frames", type=int, default=None)
    p.add_argument("--metric", choices=("psnr", "masked-psnr", "ws-psnr"),
                   default="psnr")
    p.add_argument("--mask", help="activity mask PGM (masked-psnr)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="baseline-vs-proposed RD sweep with BD-Rate")
    p.add_argument("--config", help="key = value config file; flags override")
    p.add_argument("--input", required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--fps", type=float, required=True)
    p.add_argument("--format", required=True, choices=formats)
    p.add_argument("--guard", type=int, default=16)
    p.add_argument("--name", help="sequence name for the report")
    p.add_argument("--qps", default=",".join(str(q) for q in DEFAULT_QPS))
    p.add_argument("--frames", type=int, default=33)
    p.add_argument("--intra-period", type=int, default=16)
    p.add_argument("--search-range", type=int, default=8)
    p.add_argument("--mask", help="override the generated activity mask")
    p.add_argument("--coded-width", type=int, default=None)
    p.add_argument("--coded-height", type=int, default=None)
    p.add_argument("--fill-inactive", action="store_true",
                   help="gray-fill inactive pixels before encoding")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="generate a synthetic test sequence")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        _apply_config_defaults(parser, argv)
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, BitstreamError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # invariant violations
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
