import csv
import io
import json
import math
import subprocess
import sys

import pytest

from pointer_lab import cli, config
from pointer_lab.compton import SweepRecord
from pointer_lab.errors import ConfigError
from pointer_lab.ssb import EnsembleStats, Regime

SWEEP_HEADER = ("phi_rad,delta_lambda_m,ratio,recoil_dp,pointer_overlap,regime,visibility,"
                "f_mix,n_branch1,n_branch2,seed")

SWEEP_CONFIG = """\
# angle sweep at the longest wavelength that back-scatter doubles
seed = 42
compton.wavelength_m = 4.8e-12
compton.alpha = 1/sqrt(2)
compton.beta = 1/sqrt(2)   # equal weights
compton.n_ensemble = 2000
sweep.phi_start_deg = 0
sweep.phi_stop_deg = 180
sweep.phi_count = 9
"""


@pytest.fixture
def sweep_cfg(tmp_path):
    p = tmp_path / "sweep.cfg"
    p.write_text(SWEEP_CONFIG)
    return p


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    args = cli.build_parser().parse_args(argv)
    code = cli.run(args.experiment, args.config, args.overrides, seed=args.seed, out=args.out,
                   fmt=args.format, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


class TestConfigParsing:
    def test_comments_and_expressions(self):
        values = config.parse_lines(["# c", "", "compton.alpha = 1/sqrt(2)  # tail",
                                     "sweep.phi_rad = 0, pi/4, pi"])
        assert values["compton.alpha"] == pytest.approx(2**-0.5)
        assert values["sweep.phi_rad"] == [0.0, math.pi / 4, math.pi]

    def test_complex_amplitude(self):
        assert config.parse_lines(["ensemble.c1 = 0.6j"])["ensemble.c1"] == 0.6j

    @pytest.mark.parametrize("line", ["nonsense", "= 3", "compton.wavelength = 1",
                                      "compton.wavelength_m = abc", "seed = 1.5",
                                      "compton.wavelength_m = __import__('os')"])
    def test_malformed(self, line):
        with pytest.raises(ConfigError, match="<config>:1"):
            config.parse_lines([line])

    def test_duplicate(self):
        with pytest.raises(ConfigError, match="duplicate"):
            config.parse_lines(["seed = 1", "seed = 2"])

    def test_degrees_converted(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("compton.phi_deg = 90\n")
        assert config.load("compton", p).angle("compton.phi") == math.pi / 2

    def test_override_wins(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("seed = 1\ncompton.n_ensemble = 5\n")
        rc = config.load("compton", p, ["compton.n_ensemble=7"], seed=9)
        assert rc.seed == 9
        assert rc.get("compton.n_ensemble") == 7


class TestRecords:
    REC = SweepRecord(0.1, 1.2e-14, 0.0025, 3.3e-23, 0.123456789012345678, Regime.SUPERPOSITION,
                      0.2469135780246913, 0.0, 0, 0, 42)

    def test_forward_record_text(self):
        rec = SweepRecord(0.0, 0.0, 0.0, 0.0, 1.0, Regime.SUPERPOSITION, 1.0, 0.0, 0, 0, 1)
        row = next(csv.reader([cli.emit_record(rec)]))
        assert row[2] == "0"
        assert row[5] == "superposition"

    def test_broken_record_text(self):
        rec = SweepRecord(math.pi, 4.8e-12, 1.0, 2.07e-22, 0.0, Regime.BROKEN, 0.0, 1.0, 3, 4, 1)
        row = dict(zip(SWEEP_HEADER.split(","), next(csv.reader([cli.emit_record(rec)]))))
        assert row["regime"] == "broken"
        assert row["f_mix"] == "1"

    def test_seventeen_digits(self):
        row = next(csv.reader([cli.emit_record(self.REC)]))
        assert row[4] == format(0.123456789012345678, ".17g")

    @pytest.mark.parametrize("fmt", ["csv", "jsonl"])
    def test_round_trip(self, fmt):
        line = cli.emit_record(self.REC, fmt)
        assert cli.parse_record(line, SweepRecord, fmt) == self.REC

    def test_jsonl_field_names(self):
        obj = json.loads(cli.emit_record(self.REC, "jsonl"))
        assert ",".join(obj) == SWEEP_HEADER

    def test_ensemble_round_trip(self):
        stats = EnsembleStats(10, 3, 7, 0.3, 5)
        for fmt in ("csv", "jsonl"):
            assert cli.parse_record(cli.emit_record(stats, fmt), EnsembleStats, fmt) == stats

    def test_invalid_record_not_emitted(self):
        bad = SweepRecord(0.1, 1e-14, 0.002, 1e-23, 0.5, Regime.BROKEN, 0.1, 0.5, 0, 0, 1)
        with pytest.raises(Exception, match="f_mix = 1"):
            cli.emit_record(bad)


class TestRun:
    def test_sweep_csv(self, sweep_cfg, tmp_path):
        out = tmp_path / "o.csv"
        code, stdout, _ = invoke(["sweep", "--config", str(sweep_cfg), "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == SWEEP_HEADER
        rows = list(csv.DictReader(lines))
        assert len(rows) == 9
        dl = [float(r["delta_lambda_m"]) for r in rows]
        assert all(b > a for a, b in zip(dl, dl[1:]))
        assert "extrapolation" in stdout

    def test_mirror_no_transfer(self):
        code, records, summary = invoke(["mirror", "--set", "mirror.momentum_transfer_kg_m_s=0",
                                         "--set", "mirror.a=0.6", "--set", "mirror.b=0.8"])
        assert code == 0
        row = next(csv.DictReader(records.splitlines()))
        assert row["regime"] == "superposition"
        assert float(row["visibility"]) == pytest.approx(0.96, abs=1e-15)
        assert "superposition" in summary

    def test_ensemble_jsonl(self, tmp_path):
        out = tmp_path / "e.jsonl"
        code, _, _ = invoke(["ensemble", "--seed", "3", "--format", "jsonl", "--out", str(out),
                             "--set", "ensemble.n=1000"])
        assert code == 0
        stats = cli.parse_record(out.read_text().strip(), EnsembleStats, "jsonl")
        assert stats.n_total == 1000
        assert stats.seed == 3

    def test_compton_single_angle(self):
        code, records, _ = invoke(["compton", "--set", "compton.phi_deg=0"])
        assert code == 0
        (row,) = csv.DictReader(records.splitlines())
        assert row["ratio"] == "0"

    @pytest.mark.parametrize("experiment", ["sweep", "mirror", "ensemble", "compton"])
    @pytest.mark.parametrize("fmt", ["csv", "jsonl"])
    def test_byte_identical(self, experiment, fmt, sweep_cfg, tmp_path):
        outs = []
        for i in range(2):
            out = tmp_path / f"{i}.out"
            invoke([experiment, "--config", str(sweep_cfg), "--format", fmt, "--out", str(out)])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1] and outs[0]

    def test_unknown_key_exit_2(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("seed = 1\ncompton.colour = red\n")
        code, _, err = invoke(["sweep", "--config", str(p)])
        assert code == 2
        assert "bad.cfg:2" in err and "compton.colour" in err

    def test_missing_file_exit_2(self, tmp_path):
        code, _, _ = invoke(["sweep", "--config", str(tmp_path / "nope.cfg")])
        assert code == 2

    def test_invariant_exit_3(self):
        code, _, err = invoke(["compton", "--set", "compton.alpha=1", "--set", "compton.beta=1"])
        assert code == 3
        assert "|alpha|^2 + |beta|^2 = 1" in err

    def test_angle_out_of_range_exit_3(self):
        code, _, err = invoke(["sweep", "--set", "sweep.phi_deg=0,200"])
        assert code == 3
        assert "phi" in err

    def test_console_script(self, sweep_cfg, tmp_path):
        out = tmp_path / "s.csv"
        proc = subprocess.run([sys.executable, "-m", "pointer_lab.cli", "sweep", "--config",
                               str(sweep_cfg), "--out", str(out)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert out.read_text().splitlines()[0] == SWEEP_HEADER

    def test_argparse_usage_error(self):
        proc = subprocess.run([sys.executable, "-m", "pointer_lab.cli", "nope"],
                              capture_output=True, text=True)
        assert proc.returncode == 2
