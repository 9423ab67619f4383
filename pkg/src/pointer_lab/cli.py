"""``pointer-lab`` command line harness.

    pointer-lab <mirror|compton|sweep|ensemble> [--config PATH] [--set key=value]...
                [--seed N] [--out PATH] [--format csv|jsonl]

Records go to ``--out`` (stdout when omitted) and a summary table goes to
stdout (stderr when records use stdout).  Exit status: 0 success,
2 malformed configuration, 3 physical invariant violated.

Output columns, in order:

    sweep, compton   phi_rad, delta_lambda_m, ratio, recoil_dp, pointer_overlap,
                     regime, visibility, f_mix, n_branch1, n_branch2, seed
    mirror           momentum_transfer, pointer_overlap, regime, visibility
    ensemble         n_total, n_branch1, n_branch2, fraction1, regime, seed

Floats carry 17 significant digits so every value round-trips exactly.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import compton, config, mirror, qcore, ssb
from .constants import M_E
from .errors import ConfigError, InvariantViolation, RegimeViolationError
from .packets import GaussianPacket
from .ssb import EnsembleStats, Regime

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3


@dataclass(frozen=True)
class MirrorRecord:
    momentum_transfer: float
    pointer_overlap: float
    regime: Regime
    visibility: float

    def validate(self):
        if not self.momentum_transfer >= 0:
            raise InvariantViolation("momentum_transfer >= 0")
        if not 0 <= self.pointer_overlap <= 1 + qcore.NORM_TOL:
            raise InvariantViolation("0 <= |overlap| <= 1")
        if not 0 <= self.visibility <= 1:
            raise InvariantViolation("0 <= visibility <= 1")
        return self


COLUMNS = {
    compton.SweepRecord: tuple(f.name for f in fields(compton.SweepRecord)),
    MirrorRecord: tuple(f.name for f in fields(MirrorRecord)),
    EnsembleStats: ("n_total", "n_branch1", "n_branch2", "fraction1", "regime", "seed"),
}


def _text(value):
    if isinstance(value, Regime):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("boolean field")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise InvariantViolation("emitted values finite", repr(value))
        return format(float(value), ".17g")
    return str(value)


def header(record_type, fmt="csv"):
    """CSV header line for a record type (None for jsonl)."""
    if fmt != "csv":
        return None
    return ",".join(COLUMNS[record_type])


def emit_record(record, fmt="csv") -> str:
    """Serialize one record as a CSV row or a JSON object line (no newline).

    The record is re-validated first; a violation aborts instead of emitting.
    """
    record.validate()
    cols = COLUMNS[type(record)]
    values = [getattr(record, c) for c in cols]
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="").writerow([_text(v) for v in values])
        return buf.getvalue()
    if fmt == "jsonl":
        # numbers are written raw so the 17-digit text is what lands in the file
        parts = []
        for c, v in zip(cols, values):
            t = _text(v)
            if isinstance(v, (str, Regime)):
                t = json.dumps(t)
            parts.append(f"{json.dumps(c)}: {t}")
        return "{" + ", ".join(parts) + "}"
    raise ValueError(f"unknown format {fmt!r}")


def parse_record(line: str, record_type, fmt="csv"):
    """Inverse of :func:`emit_record`."""
    cols = COLUMNS[record_type]
    if fmt == "csv":
        raw = dict(zip(cols, next(csv.reader([line]))))
    else:
        raw = json.loads(line)
    kinds = {f.name: f.type for f in fields(record_type)}
    out = {}
    for c in cols:
        v = raw[c]
        kind = kinds[c]
        if kind in ("Regime", Regime):
            out[c] = Regime(v)
        elif kind in ("int", int):
            out[c] = int(v)
        else:
            out[c] = float(v)
    return record_type(**out)


def _emit_all(records, fmt, stream):
    if not records:
        return
    h = header(type(records[0]), fmt)
    if h:
        stream.write(h + "\n")
    for r in records:
        stream.write(emit_record(r, fmt) + "\n")


# -- experiment builders -----------------------------------------------------

def _crossover(name):
    try:
        return compton.CrossoverModel(name.lower())
    except ValueError:
        raise ConfigError(f"compton.crossover_model must be 'sharp' or 'linear', got {name!r}") from None


def compton_template(cfg: config.RunConfig) -> compton.ComptonConfig:
    s = cfg.section("compton")
    lambda_max, _, _ = compton.solve_max_parameters(0.01)
    amp = 2 ** -0.5
    return compton.ComptonConfig(
        wavelength=s.get("wavelength_m", lambda_max),
        angle_phi=cfg.angle("compton.phi", math.pi),
        alpha=s.get("alpha", amp),
        beta=s.get("beta", amp),
        electron_sigma_x=s.get("electron_sigma_x_m", compton.DEFAULT_ELECTRON_SIGMA_X),
        ratio_threshold=s.get("ratio_threshold", 0.01),
        epsilon_high=s.get("epsilon_high", 0.5),
        crossover_model=_crossover(s.get("crossover_model", "sharp")),
    )


def mirror_config(cfg: config.RunConfig) -> mirror.MirrorExperimentConfig:
    s = cfg.section("mirror")
    mass = s.get("mass_kg", 1e-6)
    base = mirror.MirrorExperimentConfig.realistic(mass=mass, temperature=s.get("temperature_k", 300.0))
    sigma = s.get("sigma_x_m")
    if sigma is None:
        sigma = mirror.thermal_sigma_x(mass, s.get("temperature_k", 300.0))
    return mirror.MirrorExperimentConfig(
        photon_momentum=s.get("photon_momentum_kg_m_s", base.photon_momentum),
        momentum_transfer=s.get("momentum_transfer_kg_m_s", base.momentum_transfer),
        a=s.get("a", base.a),
        b=s.get("b", base.b),
        mirror_mass=mass,
        mirror_sigma_x=sigma,
        interaction_time=s.get("interaction_time_s", base.interaction_time),
    )


def sweep_grid(cfg: config.RunConfig):
    listed = cfg.angle("sweep.phi")
    if listed is not None:
        return list(listed)
    start = cfg.angle("sweep.phi_start", 0.0)
    stop = cfg.angle("sweep.phi_stop", math.pi)
    count = cfg.get("sweep.phi_count", 9)
    if count < 1:
        raise ConfigError(f"sweep.phi_count must be >= 1, got {count}")
    return [float(x) for x in np.linspace(start, stop, count)]


def run_compton(cfg, grid=None):
    template = compton_template(cfg)
    grid = [template.angle_phi] if grid is None else grid
    n = cfg.get("compton.n_ensemble", 1000)
    if n < 0:
        raise ConfigError(f"compton.n_ensemble must be >= 0, got {n}")
    records = compton.sweep(template, grid, n, cfg.seed)
    rows = [(f"{r.phi_rad:.6g}", f"{r.ratio:.4g}", r.regime.value, f"{r.visibility:.4g}",
             f"{r.f_mix:.4g}", f"{r.n_branch1}/{r.n_branch2}") for r in records]
    title = (f"compton scattering, lambda = {template.wavelength:.6g} m, "
             f"crossover model = {template.crossover_model.value} (extrapolation between bands)")
    return records, title, ("phi_rad", "ratio", "regime", "visibility", "f_mix", "n1/n2"), rows


def run_mirror(cfg):
    mcfg = mirror_config(cfg)
    grid = cfg.get("mirror.dp_grid_kg_m_s", [mcfg.momentum_transfer])
    k = cfg.get("mirror.k", 1.0)
    points = mirror.regime_scan(mcfg, grid, k)
    records = [MirrorRecord(p.momentum_transfer, p.overlap_magnitude, p.regime, p.visibility)
               for p in points]
    rows = [(f"{r.momentum_transfer:.6g}", f"{r.pointer_overlap:.6g}", r.regime.value,
             f"{r.visibility:.6g}") for r in records]
    title = (f"photon + movable mirror, mass = {mcfg.mirror_mass:.3g} kg, "
             f"sigma_x = {mcfg.mirror_sigma_x:.3g} m, 2|ab| = {2 * abs(mcfg.a * mcfg.b):.6g}")
    return records, title, ("dp_kg_m_s", "|overlap|", "regime", "visibility"), rows


def run_ensemble(cfg):
    s = cfg.section("ensemble")
    sigma = s.get("sigma_x_m", 1e-10)
    mass = s.get("mass_kg", M_E)
    g1 = GaussianPacket(0.0, 0.0, sigma, mass)
    g2 = GaussianPacket(s.get("dx_m", 10 * sigma), s.get("dp_kg_m_s", 0.0), sigma, mass)
    amp = 2 ** -0.5
    state = qcore.TwoBranchState(
        qcore.Branch(s.get("c1", amp), "branch1", g1),
        qcore.Branch(s.get("c2", amp), "branch2", g2),
    )
    n = s.get("n", 100000)
    if n < 1:
        raise ConfigError(f"ensemble.n must be >= 1, got {n}")
    stats = ssb.run_ensemble(state, n, s.get("k", 1.0), cfg.seed, workers=s.get("workers"))
    p1, _ = qcore.born_probabilities(state)
    rows = [(stats.regime.value, str(stats.n_total), str(stats.n_branch1), str(stats.n_branch2),
             f"{stats.fraction1:.6g}", f"{p1:.6g}")]
    return ([stats], "Born-rule ensemble",
            ("regime", "n_total", "n1", "n2", "fraction1", "|c1|^2"), rows)


def _table(title, head, rows):
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(head)]
    line = "  ".join(h.ljust(w) for h, w in zip(head, widths))
    out = [title, line, "-" * len(line)]
    out += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(out) + "\n"


def execute(cfg: config.RunConfig):
    if cfg.experiment == "sweep":
        return run_compton(cfg, sweep_grid(cfg))
    if cfg.experiment == "compton":
        return run_compton(cfg)
    if cfg.experiment == "mirror":
        return run_mirror(cfg)
    return run_ensemble(cfg)


def run(experiment, config_path=None, overrides=(), *, seed=None, out=None, fmt=None,
        stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        cfg = config.load(experiment, config_path, overrides, seed=seed,
                          output_path=out, output_format=fmt)
        records, title, head, rows = execute(cfg)
        buf = io.StringIO()
        _emit_all(records, cfg.output_format, buf)
    except ConfigError as exc:
        print(f"pointer-lab: config error: {exc}", file=stderr)
        return EXIT_CONFIG
    except (InvariantViolation, RegimeViolationError, ValueError) as exc:
        print(f"pointer-lab: {exc}", file=stderr)
        return EXIT_INVARIANT
    summary = _table(title, head, rows)
    if cfg.output_path is None:
        stdout.write(buf.getvalue())
        stderr.write(summary)
    else:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
        stdout.write(summary)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="pointer-lab",
                                 description="Measurement as spontaneous superposition breaking.")
    ap.add_argument("experiment", choices=config.EXPERIMENTS)
    ap.add_argument("--config", help="key = value configuration file")
    ap.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                    help="override a configuration key (repeatable)")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", help="output file (default: stdout)")
    ap.add_argument("--format", choices=config.FORMATS)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(args.experiment, args.config, args.overrides, seed=args.seed, out=args.out,
               fmt=args.format)


if __name__ == "__main__":
    raise SystemExit(main())
