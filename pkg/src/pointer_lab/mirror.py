"""Photon and movable half-silvered mirror.

The photon is either transmitted (mirror stays at rest) or reflected (mirror
recoils with momentum ``momentum_transfer``).  The mirror's center-of-mass
packet is the pointer.  Recoil is applied as an instantaneous kick at t = 0
followed by free flight to the interaction time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from . import packets, qcore, ssb
from .constants import H, HBAR, K_B
from .errors import InvariantViolation, RegimeViolationError
from .packets import GaussianPacket
from .qcore import Branch, TwoBranchState

TRANSMITTED = "transmitted (p)"
REFLECTED = "reflected (p - dp)"


def thermal_sigma_x(mass, temperature=300.0, *, hbar=HBAR):
    """Width of the minimum-uncertainty packet whose momentum spread is thermal,
    sqrt(m k_B T)."""
    return hbar / (2 * math.sqrt(mass * K_B * temperature))


@dataclass(frozen=True)
class MirrorExperimentConfig:
    photon_momentum: float
    momentum_transfer: float
    a: complex
    b: complex
    mirror_mass: float
    mirror_sigma_x: float
    interaction_time: float

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        norm = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm - 1) > qcore.NORM_TOL:
            raise InvariantViolation("|a|^2 + |b|^2 = 1", f"norm={norm!r}")
        for name in ("photon_momentum", "mirror_mass", "mirror_sigma_x", "interaction_time"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvariantViolation(f"{name} > 0", f"{name}={v!r}")
        if not (math.isfinite(self.momentum_transfer) and self.momentum_transfer >= 0):
            raise InvariantViolation("momentum_transfer >= 0", repr(self.momentum_transfer))

    @classmethod
    def realistic(cls, *, wavelength=500e-9, mass=1e-6, temperature=300.0,
                  interaction_time=1e-9, a=2 ** -0.5, b=2 ** -0.5):
        """Visible photon on a light but macroscopic mirror at room temperature,
        reflected head-on (momentum transfer 2p)."""
        p = H / wavelength
        return cls(p, 2 * p, a, b, mass, thermal_sigma_x(mass, temperature), interaction_time)


class ScanPoint(NamedTuple):
    momentum_transfer: float
    overlap_magnitude: float
    regime: ssb.Regime
    visibility: float


def evolve_interaction(cfg: MirrorExperimentConfig, *, hbar=HBAR) -> TwoBranchState:
    rest = GaussianPacket(0.0, 0.0, cfg.mirror_sigma_x, cfg.mirror_mass)
    kicked = replace(rest, p_center=cfg.momentum_transfer)
    tau = cfg.interaction_time
    return TwoBranchState(
        Branch(cfg.a, TRANSMITTED, packets.evolve_free(rest, tau, hbar=hbar)),
        Branch(cfg.b, REFLECTED, packets.evolve_free(kicked, tau, hbar=hbar)),
    )


def photon_mixture(state: TwoBranchState, k: float = 1.0, *, hbar=HBAR) -> qcore.ReducedDensityMatrix2:
    """Reduced photon state once the mirror pointers no longer interfere.

    Refuses strongly overlapping pointers: there the reduced matrix is not the
    diagonal mixture and no measurement has happened.
    """
    verdict = ssb.classify(state, k, hbar=hbar)
    if verdict.regime is not ssb.Regime.BROKEN:
        raise RegimeViolationError(
            f"mirror pointers still interfere (|overlap| = {verdict.criterion_value:.6g}); "
            "the photon is not in a mixture")
    return qcore.reduce_pointer(state, state.pointer_overlap(hbar=hbar))


def regime_scan(cfg: MirrorExperimentConfig, dp_grid, k: float = 1.0, *, hbar=HBAR) -> list[ScanPoint]:
    grid = list(dp_grid)
    if not grid:
        raise ValueError("momentum-transfer grid is empty")
    out = []
    for dp in grid:
        if dp < 0:
            raise ValueError(f"momentum transfer must be >= 0, got {dp!r}")
        state = evolve_interaction(replace(cfg, momentum_transfer=dp), hbar=hbar)
        verdict = ssb.classify(state, k, hbar=hbar)
        rho = qcore.reduced_state(state, hbar=hbar)
        out.append(ScanPoint(dp, verdict.criterion_value, verdict.regime, qcore.visibility(rho)))
    return out
