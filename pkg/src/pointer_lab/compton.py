"""Compton scattering with the recoil electron as the detector pointer.

A photon of wavelength ``wavelength`` is split by a fixed half-silvered
mirror; the transmitted part Compton-scatters on an electron at rest and a
filter keeps only photons scattered at ``angle_phi``.  The surviving
photon+electron pair is

    alpha |transmitted, p>|e at rest> + beta |scattered at phi, p'>|e recoiling with dp>

The relative wavelength shift ``dlambda/lambda`` decides the regime: small
shifts leave a detectable photon superposition, shifts of order one leave a
mixture.  Between the two bands the outcome is set by a pluggable crossover
model, which is an extrapolation and is labeled as such.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from . import qcore, ssb
from .constants import H, HBAR, LAMBDA_CE, M_E
from .errors import InvariantViolation
from .packets import GaussianPacket
from .qcore import Branch, TwoBranchState
from .ssb import CriterionKind, Regime, RegimeVerdict

TRANSMITTED = "transmitted unscattered (p)"
SCATTERED = "scattered at phi (p')"
DEFAULT_ELECTRON_SIGMA_X = 1e-10  # m, atomic scale
_BAND_RTOL = 1e-12


class CrossoverModel(enum.Enum):
    SHARP = "sharp"
    LINEAR = "linear"


@dataclass(frozen=True)
class ComptonConfig:
    wavelength: float
    angle_phi: float
    alpha: complex
    beta: complex
    electron_sigma_x: float = DEFAULT_ELECTRON_SIGMA_X
    ratio_threshold: float = 0.01
    epsilon_high: float = 0.5
    crossover_model: CrossoverModel = CrossoverModel.SHARP

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        object.__setattr__(self, "crossover_model", CrossoverModel(self.crossover_model))
        if not (math.isfinite(self.wavelength) and self.wavelength > 0):
            raise InvariantViolation("wavelength > 0", repr(self.wavelength))
        _check_angle(self.angle_phi)
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1) > qcore.NORM_TOL:
            raise InvariantViolation("|alpha|^2 + |beta|^2 = 1", f"norm={norm!r}")
        if not (math.isfinite(self.electron_sigma_x) and self.electron_sigma_x > 0):
            raise InvariantViolation("electron_sigma_x > 0", repr(self.electron_sigma_x))
        if not 0 < self.ratio_threshold < 1:
            raise InvariantViolation("0 < ratio_threshold < 1", repr(self.ratio_threshold))
        if not 0 < self.epsilon_high < 1:
            raise InvariantViolation("0 < epsilon_high < 1", repr(self.epsilon_high))
        if not self.ratio_threshold < self.broken_ratio:
            raise InvariantViolation("ratio_threshold < 1 - epsilon_high",
                                     f"{self.ratio_threshold!r} vs {self.broken_ratio!r}")

    @property
    def broken_ratio(self):
        """Lower edge of the mixture band, 1 - epsilon_high."""
        return 1.0 - self.epsilon_high


class KinematicsRecord(NamedTuple):
    p_in: float
    delta_lambda: float
    lambda_out: float
    p_out: float
    recoil_dp: float
    ratio: float
    uncertainty_product: float


@dataclass(frozen=True)
class SweepRecord:
    phi_rad: float
    delta_lambda_m: float
    ratio: float
    recoil_dp: float
    pointer_overlap: float
    regime: Regime
    visibility: float
    f_mix: float
    n_branch1: int
    n_branch2: int
    seed: int

    def validate(self):
        _check_angle(self.phi_rad)
        if not self.delta_lambda_m >= 0:
            raise InvariantViolation("delta_lambda >= 0", repr(self.delta_lambda_m))
        if not self.ratio >= 0:
            raise InvariantViolation("ratio >= 0", repr(self.ratio))
        if not self.recoil_dp >= 0:
            raise InvariantViolation("recoil_dp >= 0", repr(self.recoil_dp))
        if not 0 <= self.pointer_overlap <= 1 + qcore.NORM_TOL:
            raise InvariantViolation("0 <= |overlap| <= 1", repr(self.pointer_overlap))
        if not 0 <= self.visibility <= 1:
            raise InvariantViolation("0 <= visibility <= 1", repr(self.visibility))
        if not 0 <= self.f_mix <= 1:
            raise InvariantViolation("0 <= f_mix <= 1", repr(self.f_mix))
        if min(self.n_branch1, self.n_branch2) < 0:
            raise InvariantViolation("branch counts >= 0")
        if self.regime is Regime.SUPERPOSITION and self.f_mix != 0:
            raise InvariantViolation("f_mix = 0 in superposition regime")
        if self.regime is Regime.BROKEN and self.f_mix != 1:
            raise InvariantViolation("f_mix = 1 in broken regime")
        return self


def _check_angle(phi):
    if not (math.isfinite(phi) and 0 <= phi <= math.pi):
        raise InvariantViolation("0 <= phi <= pi", f"phi={phi!r}")


def _check_wavelength(wavelength):
    if not (math.isfinite(wavelength) and wavelength > 0):
        raise InvariantViolation("wavelength > 0", repr(wavelength))


def compton_shift(wavelength: float, phi: float, *, lambda_ce=LAMBDA_CE) -> float:
    """Wavelength increase 2 lambda_ce sin^2(phi/2); independent of ``wavelength``."""
    _check_angle(phi)
    s = math.sin(phi / 2)
    return 2 * lambda_ce * s * s


def scattering_angle(delta_lambda: float, *, lambda_ce=LAMBDA_CE) -> float:
    """Inverse of :func:`compton_shift` on [0, pi]."""
    if not 0 <= delta_lambda <= 2 * lambda_ce:
        raise InvariantViolation("0 <= delta_lambda <= 2 lambda_ce", repr(delta_lambda))
    return 2 * math.asin(math.sqrt(delta_lambda / (2 * lambda_ce)))


def debroglie_momentum(wavelength: float, *, h=H) -> float:
    _check_wavelength(wavelength)
    return h / wavelength


def recoil_momentum(wavelength: float, phi: float, *, h=H, lambda_ce=LAMBDA_CE) -> float:
    """Magnitude of the electron recoil |p - p'|.

    Law of cosines written as (p - p')^2 + 4 p p' sin^2(phi/2) to stay
    accurate at small angles.
    """
    p = debroglie_momentum(wavelength, h=h)
    p_out = debroglie_momentum(wavelength + compton_shift(wavelength, phi, lambda_ce=lambda_ce), h=h)
    s = math.sin(phi / 2)
    return math.sqrt((p - p_out) ** 2 + 4 * p * p_out * s * s)


def wavelength_ratio(wavelength: float, phi: float, *, lambda_ce=LAMBDA_CE) -> float:
    _check_wavelength(wavelength)
    return compton_shift(wavelength, phi, lambda_ce=lambda_ce) / wavelength


def kinematics(wavelength: float, phi: float, *, h=H, lambda_ce=LAMBDA_CE) -> KinematicsRecord:
    p = debroglie_momentum(wavelength, h=h)
    dl = compton_shift(wavelength, phi, lambda_ce=lambda_ce)
    dp = recoil_momentum(wavelength, phi, h=h, lambda_ce=lambda_ce)
    return KinematicsRecord(p, dl, wavelength + dl, h / (wavelength + dl), dp, dl / wavelength, dl * dp)


def classify_regime(cfg: ComptonConfig, *, lambda_ce=LAMBDA_CE) -> RegimeVerdict:
    """Superposition for ratio <= ratio_threshold, broken for ratio >= 1 - epsilon_high.

    Band edges are inclusive up to a 1e-12 relative rounding allowance.
    """
    ratio = wavelength_ratio(cfg.wavelength, cfg.angle_phi, lambda_ce=lambda_ce)
    if ratio <= cfg.ratio_threshold * (1 + _BAND_RTOL):
        regime = Regime.SUPERPOSITION
    elif ratio >= cfg.broken_ratio * (1 - _BAND_RTOL):
        regime = Regime.BROKEN
    else:
        regime = Regime.INTERMEDIATE
    return RegimeVerdict(regime, ratio, CriterionKind.WAVELENGTH_RATIO)


def build_entangled_state(cfg: ComptonConfig, *, h=H, lambda_ce=LAMBDA_CE) -> TwoBranchState:
    rest = GaussianPacket(0.0, 0.0, cfg.electron_sigma_x, M_E)
    dp = recoil_momentum(cfg.wavelength, cfg.angle_phi, h=h, lambda_ce=lambda_ce)
    return TwoBranchState(
        Branch(cfg.alpha, TRANSMITTED, rest),
        Branch(cfg.beta, SCATTERED, replace(rest, p_center=dp)),
    )


def detector_visibility(cfg: ComptonConfig, *, h=H, hbar=None, lambda_ce=LAMBDA_CE) -> float:
    """Fringe visibility at the recombining detector, 2|alpha beta| |<e 0|e dp>|."""
    hbar = h / (2 * math.pi) if hbar is None else hbar
    dp = recoil_momentum(cfg.wavelength, cfg.angle_phi, h=h, lambda_ce=lambda_ce)
    x = dp * cfg.electron_sigma_x / hbar
    return min(2 * abs(cfg.alpha * cfg.beta) * math.exp(-x * x / 2), 1.0)


def uncertainty_product(cfg: ComptonConfig, *, h=H, lambda_ce=LAMBDA_CE) -> float:
    """dlambda * |dp|: the localization interval times the recoil momentum."""
    k = kinematics(cfg.wavelength, cfg.angle_phi, h=h, lambda_ce=lambda_ce)
    if k.delta_lambda == 0:
        raise ValueError("uncertainty product undefined without scattering (phi = 0)")
    return k.uncertainty_product


def solve_max_parameters(ratio_threshold: float, *, lambda_ce=LAMBDA_CE) -> tuple[float, float, float]:
    """(lambda_max, delta_lambda_max, phi_max) for a superposition threshold.

    lambda_max = 2 lambda_ce is the longest wavelength that back-scatter can
    double; phi_max is the exact angle whose shift is ratio_threshold * lambda_max.
    """
    if not 0 < ratio_threshold < 1:
        raise InvariantViolation("0 < ratio_threshold < 1", repr(ratio_threshold))
    lambda_max = 2 * lambda_ce
    dl_max = ratio_threshold * lambda_max
    return lambda_max, dl_max, scattering_angle(dl_max, lambda_ce=lambda_ce)


def mixture_fraction(ratio: float, cfg: ComptonConfig) -> float:
    """Fraction of detected photons in the mixture sub-ensemble.

    0 in the superposition band and 1 in the broken band.  In between:
    SHARP jumps from 0 to 1 at the band midpoint, LINEAR ramps as
    clamp((ratio - ratio_threshold) / (1 - epsilon_high - ratio_threshold), 0, 1).
    """
    lo, hi = cfg.ratio_threshold, cfg.broken_ratio
    if ratio <= lo * (1 + _BAND_RTOL):
        return 0.0
    if ratio >= hi * (1 - _BAND_RTOL):
        return 1.0
    if cfg.crossover_model is CrossoverModel.SHARP:
        return 1.0 if ratio >= 0.5 * (lo + hi) else 0.0
    return min(max((ratio - lo) / (hi - lo), 0.0), 1.0)


def sample_cell(cfg: ComptonConfig, f_mix: float, n: int, seed: int, cell: int) -> tuple[int, int]:
    """Born tallies inside the mixture sub-ensemble for one grid cell.

    Trial i joins the mixture when its assignment draw is below f_mix, then
    picks branch 1 when its branch draw is below |alpha|^2.  Draws come from
    streams 2*cell+1 and 2*cell+2 of ``seed``.
    """
    if n == 0 or f_mix == 0:
        return 0, 0
    p1 = abs(cfg.alpha) ** 2
    in_mix = ssb.uniforms(seed, n, stream=2 * cell + 1) < f_mix
    first = ssb.uniforms(seed, n, stream=2 * cell + 2) < p1
    n1 = int(np.count_nonzero(in_mix & first))
    return n1, int(np.count_nonzero(in_mix)) - n1


def sweep(template: ComptonConfig, phi_grid, n_ensemble: int, seed: int,
          *, h=H, lambda_ce=LAMBDA_CE) -> list[SweepRecord]:
    """One record per angle, in grid order."""
    grid = [float(phi) for phi in phi_grid]
    for phi in grid:
        _check_angle(phi)
    if n_ensemble < 0:
        raise ValueError(f"n_ensemble must be >= 0, got {n_ensemble!r}")
    hbar = h / (2 * math.pi)
    out = []
    for cell, phi in enumerate(grid):
        cfg = replace(template, angle_phi=phi)
        kin = kinematics(cfg.wavelength, phi, h=h, lambda_ce=lambda_ce)
        verdict = classify_regime(cfg, lambda_ce=lambda_ce)
        x = kin.recoil_dp * cfg.electron_sigma_x / hbar
        f_mix = mixture_fraction(kin.ratio, cfg)
        n1, n2 = sample_cell(cfg, f_mix, n_ensemble, seed, cell)
        out.append(SweepRecord(
            phi_rad=phi,
            delta_lambda_m=kin.delta_lambda,
            ratio=kin.ratio,
            recoil_dp=kin.recoil_dp,
            pointer_overlap=math.exp(-x * x / 2),
            regime=verdict.regime,
            visibility=detector_visibility(cfg, h=h, lambda_ce=lambda_ce),
            f_mix=f_mix,
            n_branch1=n1,
            n_branch2=n2,
            seed=seed,
        ).validate())
    return out
