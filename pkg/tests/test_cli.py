import csv
import json
import os

import numpy as np
import pytest

from irav import RdPoint, bd_rate, read_mask_pgm, read_yuv420
from irav.cli import main

from conftest import frames_equal


def run(*args):
    return main(list(args))


class TestGenmask:
    def test_cmp_fraction_printed(self, tmp_path, capsys):
        out = tmp_path / "m.pgm"
        assert run("genmask", "--format", "cmp", "--width", "3840",
                   "--height", "2880", "--out", str(out)) == 0
        text = capsys.readouterr().out
        assert "0.5000" in text
        assert read_mask_pgm(out).inactive_fraction == 0.5

    def test_erp_warns_all_active(self, tmp_path, capsys):
        out = tmp_path / "m.pgm"
        assert run("genmask", "--format", "erp", "--width", "256",
                   "--height", "128", "--out", str(out)) == 0
        assert "no inactive region" in capsys.readouterr().out

    def test_unsupported_dims_exit2_names_constraint(self, tmp_path, capsys):
        rc = run("genmask", "--format", "ssp", "--width", "100",
                 "--height", "100", "--out", str(tmp_path / "m.pgm"))
        assert rc == 2
        assert "6*width" in capsys.readouterr().err

    def test_bad_format_usage_error(self, tmp_path, capsys):
        rc = run("genmask", "--format", "cubemap", "--width", "8",
                 "--height", "8", "--out", str(tmp_path / "m.pgm"))
        assert rc == 1


class TestSynthCli:
    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.yuv", tmp_path / "b.yuv"
        for p in (a, b):
            assert run("synth", "--kind", "orbit", "--width", "64", "--height", "32",
                       "--frames", "3", "--seed", "7", "--out", str(p)) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_single_frame_size(self, tmp_path):
        out = tmp_path / "one.yuv"
        assert run("synth", "--kind", "gradient", "--width", "32", "--height", "16",
                   "--frames", "1", "--out", str(out)) == 0
        assert os.path.getsize(out) == 32 * 16 * 3 // 2


@pytest.fixture(scope="module")
def encoded(tmp_path_factory):
    """A small end-to-end CLI encode, shared across tests."""
    root = tmp_path_factory.mktemp("cli_encode")
    yuv = root / "in.yuv"
    mask = root / "mask.pgm"
    bit = root / "out.bit"
    stats = root / "stats.json"
    recon = root / "recon.yuv"
    assert run("synth", "--kind", "orbit", "--width", "96", "--height", "96",
               "--frames", "3", "--seed", "5", "--out", str(yuv)) == 0
    assert run("genmask", "--format", "ohp", "--width", "96", "--height", "96",
               "--out", str(mask)) == 0
    rc = run("encode", "--input", str(yuv), "--width", "96", "--height", "96",
             "--mask", str(mask), "--qp", "32", "--tools", "all",
             "--out", str(bit), "--stats", str(stats), "--recon", str(recon))
    assert rc == 0
    return root


class TestEncodeDecode:
    def test_stats_schema(self, encoded):
        stats = json.loads((encoded / "stats.json").read_text())
        assert stats["schema"] == 1
        assert stats["total_bits"] == os.path.getsize(encoded / "out.bit") * 8
        assert len(stats["per_frame_bits"]) == 3
        assert stats["tools"]["masked_rdo"] is True
        assert "masked_psnr_y" in stats and "psnr_y" in stats

    def test_decode_verify_roundtrip(self, encoded, tmp_path, capsys):
        out = tmp_path / "dec.yuv"
        rc = run("decode", "--input", str(encoded / "out.bit"),
                 "--output", str(out), "--verify", str(encoded / "recon.yuv"))
        assert rc == 0
        assert "matches" in capsys.readouterr().out

    def test_decode_without_mask_file(self, encoded, tmp_path):
        # the bitstream is self-contained: decoding never touches the mask
        data = (encoded / "out.bit").read_bytes()
        scratch = tmp_path / "stream.bit"
        scratch.write_bytes(data)
        out = tmp_path / "dec.yuv"
        assert run("decode", "--input", str(scratch), "--output", str(out)) == 0
        dec = read_yuv420(out, 96, 96)
        rec = read_yuv420(encoded / "recon.yuv", 96, 96)
        assert all(frames_equal(a, b) for a, b in zip(dec, rec))

    def test_verify_mismatch_exit2(self, encoded, tmp_path):
        bad = tmp_path / "bad.yuv"
        data = bytearray((encoded / "recon.yuv").read_bytes())
        data[100] ^= 0xFF
        bad.write_bytes(bytes(data))
        rc = run("decode", "--input", str(encoded / "out.bit"),
                 "--output", str(tmp_path / "d.yuv"), "--verify", str(bad))
        assert rc == 2

    def test_missing_mask_no_partial_output(self, encoded, tmp_path, capsys):
        out = tmp_path / "never.bit"
        rc = run("encode", "--input", str(encoded / "in.yuv"), "--width", "96",
                 "--height", "96", "--mask", str(tmp_path / "absent.pgm"),
                 "--qp", "32", "--tools", "none", "--out", str(out))
        assert rc == 2
        assert not out.exists()

    def test_null_mask_tools_byte_identical(self, encoded, tmp_path):
        mask = tmp_path / "all.pgm"
        assert run("genmask", "--format", "erp", "--width", "96", "--height", "48",
                   "--out", str(mask)) == 0
        yuv = tmp_path / "in.yuv"
        assert run("synth", "--kind", "checker", "--width", "96", "--height", "48",
                   "--frames", "2", "--seed", "3", "--out", str(yuv)) == 0
        outs = []
        for name, tools in (("none.bit", "none"), ("all.bit", "all")):
            path = tmp_path / name
            assert run("encode", "--input", str(yuv), "--width", "96",
                       "--height", "48", "--mask", str(mask), "--qp", "30",
                       "--tools", tools, "--out", str(path)) == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1]

    def test_config_file_defaults(self, encoded, tmp_path):
        cfgfile = tmp_path / "enc.cfg"
        cfgfile.write_text("qp = 32\ntools = all\nwidth = 96\nheight = 96\n")
        out = tmp_path / "cfg.bit"
        rc = run("encode", "--config", str(cfgfile),
                 "--input", str(encoded / "in.yuv"),
                 "--mask", str(encoded / "mask.pgm"), "--out", str(out))
        assert rc == 0
        assert out.read_bytes() == (encoded / "out.bit").read_bytes()


class TestEvaluate:
    def test_psnr_identical(self, tmp_path, capsys):
        yuv = tmp_path / "a.yuv"
        assert run("synth", "--kind", "gradient", "--width", "64", "--height", "32",
                   "--frames", "2", "--out", str(yuv)) == 0
        rc = run("evaluate", "--ref", str(yuv), "--test", str(yuv),
                 "--width", "64", "--height", "32", "--metric", "ws-psnr")
        assert rc == 0
        assert "99.99" in capsys.readouterr().out

    def test_masked_requires_mask(self, tmp_path):
        yuv = tmp_path / "a.yuv"
        assert run("synth", "--kind", "gradient", "--width", "64", "--height", "32",
                   "--frames", "1", "--out", str(yuv)) == 0
        rc = run("evaluate", "--ref", str(yuv), "--test", str(yuv),
                 "--width", "64", "--height", "32", "--metric", "masked-psnr")
        assert rc == 1


class TestConvertCli:
    def test_erp_to_cmp_file(self, tmp_path):
        yuv = tmp_path / "erp.yuv"
        out = tmp_path / "cmp.yuv"
        assert run("synth", "--kind", "gradient", "--width", "128", "--height", "64",
                   "--frames", "1", "--out", str(yuv)) == 0
        rc = run("convert", "--from", "erp", "--to", "cmp", "--input", str(yuv),
                 "--width", "128", "--height", "64", "--out-width", "128",
                 "--out-height", "96", "--output", str(out))
        assert rc == 0
        assert os.path.getsize(out) == 128 * 96 * 3 // 2

    def test_unsupported_pair_exit2(self, tmp_path):
        yuv = tmp_path / "erp.yuv"
        assert run("synth", "--kind", "gradient", "--width", "128", "--height", "64",
                   "--frames", "1", "--out", str(yuv)) == 0
        rc = run("convert", "--from", "erp", "--to", "ohp", "--input", str(yuv),
                 "--width", "128", "--height", "64", "--out-width", "128",
                 "--out-height", "64", "--output", str(tmp_path / "x.yuv"))
        assert rc == 2


class TestSweepCli:
    @pytest.fixture(scope="class")
    def sweep_dir(self, tmp_path_factory):
        root = tmp_path_factory.mktemp("sweep")
        yuv = root / "tiny.yuv"
        assert run("synth", "--kind", "orbit", "--width", "48", "--height", "48",
                   "--frames", "4", "--seed", "2", "--out", str(yuv)) == 0
        outdir = root / "out"
        rc = run("sweep", "--input", str(yuv), "--width", "48", "--height", "48",
                 "--fps", "30", "--format", "ohp", "--qps", "22,27,32,37",
                 "--frames", "4", "--intra-period", "4", "--outdir", str(outdir))
        assert rc == 0
        return outdir

    def test_points_csv_cardinality(self, sweep_dir):
        with open(sweep_dir / "points.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 8  # 4 QPs x 2 configs
        assert {r["config"] for r in rows} == {"baseline", "proposed"}

    def test_report_matches_recomputed_bd(self, sweep_dir):
        with open(sweep_dir / "points.csv") as fh:
            rows = list(csv.DictReader(fh))
        curves = {"baseline": [], "proposed": []}
        for r in rows:
            curves[r["config"]].append(
                RdPoint(float(r["kbps"]), float(r["quality_db"])))
        expected = bd_rate(curves["baseline"], curves["proposed"]).percent
        report = (sweep_dir / "report.txt").read_text()
        line = next(l for l in report.splitlines() if l.startswith("tiny"))
        reported = float(line.split()[-1])
        assert reported == pytest.approx(expected, abs=5e-7)

    def test_report_metadata(self, sweep_dir):
        report = (sweep_dir / "report.txt").read_text()
        assert "IPPP" in report and "Average" in report

    def test_identical_configs_zero_bd(self, tmp_path):
        # API-level: test config identical to baseline -> BD-Rate 0.0%
        from irav import ProjectionFormat, ToolFlags, synthesize_sequence, write_yuv420
        from irav.experiment import BASELINE, ExperimentSpec, run_sweep

        yuv = tmp_path / "s.yuv"
        write_yuv420(synthesize_sequence("checker", 48, 48, 3, seed=1), yuv)
        base = ToolFlags(False, False, False, True)
        spec = ExperimentSpec(
            input_path=str(yuv), width=48, height=48, fps=30.0,
            fmt=ProjectionFormat("ohp"),
            outdir=str(tmp_path / "out"), frames=3, intra_period=3,
            configs={BASELINE: base, "same": base},
        )
        rows = run_sweep(spec)
        assert rows[0].bd_rate_percent == 0.0
