"""Minimum-uncertainty Gaussian pointer packets in one dimension.

A packet is prepared at its waist (width w, minimum uncertainty) and
then evolves freely.  The wavefunction at the waist is

    psi(x) = (2 pi w^2)^(-1/4) exp(-(x - x0)^2 / (4 w^2) + i p (x - x0) / hbar)

and a freely evolved packet is the exact Schrodinger evolution of that state,
so overlaps between packets that spread for the same time equal the overlaps
of their waist-time counterparts.

All closed forms are evaluated in units of the waist (lengths / w, momenta
* w / hbar) so that SI-scale inputs neither overflow nor cancel.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from .constants import HBAR
from .errors import InvariantViolation, UnsupportedPairError

_REL_TOL = 1e-12


@dataclass(frozen=True)
class GaussianPacket:
    """Pointer wave packet.

    ``sigma_x`` is the current position spread.  ``spreading`` is the
    dimensionless free-flight time hbar*t/(2 m w^2) since the packet was last
    at its waist w; a freshly built packet has spreading 0 and is minimum
    uncertainty.
    """

    x_center: float
    p_center: float
    sigma_x: float
    mass: float
    time: float = 0.0
    spreading: float = 0.0

    def __post_init__(self):
        for name in ("x_center", "p_center", "sigma_x", "mass", "time", "spreading"):
            if not math.isfinite(getattr(self, name)):
                raise InvariantViolation("packet fields finite", f"{name}={getattr(self, name)!r}")
        if self.sigma_x <= 0:
            raise InvariantViolation("sigma_x > 0", f"sigma_x={self.sigma_x!r}")
        if self.mass <= 0:
            raise InvariantViolation("mass > 0", f"mass={self.mass!r}")
        if self.spreading < 0:
            raise InvariantViolation("spreading >= 0", f"spreading={self.spreading!r}")

    @property
    def waist(self):
        return self.sigma_x / math.sqrt(1 + self.spreading * self.spreading)

    def sigma_p(self, hbar=HBAR):
        """Momentum spread, fixed at hbar / (2 waist) by free evolution."""
        return hbar / (2 * self.waist)


class SuperpositionMoments(NamedTuple):
    mean_x: float
    std_x: float
    stability_ratio: float


class InterferenceReport(NamedTuple):
    """Both sub-criteria of the weak-interference test."""

    separation: float
    separated: bool
    overlap_magnitude: float
    overlap_threshold: float
    overlap_small: bool

    @property
    def weak(self):
        return self.separated or self.overlap_small


def _check_pair(g1, g2):
    if not math.isclose(g1.sigma_x, g2.sigma_x, rel_tol=_REL_TOL):
        raise UnsupportedPairError(f"packet widths differ: {g1.sigma_x!r} vs {g2.sigma_x!r}")
    if not math.isclose(g1.spreading, g2.spreading, rel_tol=_REL_TOL, abs_tol=1e-300):
        raise UnsupportedPairError("packets have spread for different times")
    if not math.isclose(g1.mass, g2.mass, rel_tol=_REL_TOL):
        raise UnsupportedPairError(f"packet masses differ: {g1.mass!r} vs {g2.mass!r}")
    if not math.isclose(g1.time, g2.time, rel_tol=_REL_TOL, abs_tol=1e-300):
        raise UnsupportedPairError(f"packets live at different times: {g1.time!r} vs {g2.time!r}")


def _scaled(g, origin, hbar):
    # (current center, waist-time center, wavenumber) in waist units
    k = g.p_center * g.waist / hbar
    u = (g.x_center - origin) / g.waist
    return u, u - 2 * k * g.spreading, k


def _pair_terms(g1, g2, origin, hbar):
    """Overlap <g1|g2> and conditional moments of x (waist units, about origin)."""
    u1, w1, k1 = _scaled(g1, origin, hbar)
    u2, w2, k2 = _scaled(g2, origin, hbar)
    dw, dk = w1 - w2, k1 - k2
    magnitude = math.exp(-dw * dw / 8 - dk * dk / 2)
    s = complex(1.0, g1.spreading)
    abs_s2 = abs(s) ** 2
    # <g1|x|g2> / <g1|g2> for two packets sharing the complex width s
    mu = (s * u1 + s.conjugate() * u2) / 2 + 1j * abs_s2 * (k2 - k1)
    return magnitude * cmath.exp(0.5j * dw * (k1 + k2)), mu, mu * mu + abs_s2


def overlap(g1: GaussianPacket, g2: GaussianPacket, *, hbar=HBAR) -> complex:
    """Inner product <g1|g2> in closed form.

    At the waist the magnitude is exp(-dx^2/(8 w^2) - dp^2 w^2/(2 hbar^2)) and
    the phase is (x1 - x2)(p1 + p2)/(2 hbar).  Both packets must share width,
    mass and time.
    """
    _check_pair(g1, g2)
    if g1 == g2:
        return 1.0 + 0.0j
    s12, _, _ = _pair_terms(g1, g2, 0.5 * (g1.x_center + g2.x_center), hbar)
    return s12


def superposition_moments(c1: complex, g1: GaussianPacket, c2: complex, g2: GaussianPacket,
                          *, hbar=HBAR) -> SuperpositionMoments:
    """Exact position mean and spread of the normalized state c1|g1> + c2|g2>.

    Includes the interference cross terms.  Packets must satisfy the same
    pairing rule as :func:`overlap`.
    """
    _check_pair(g1, g2)
    origin = 0.5 * (g1.x_center + g2.x_center)
    w = g1.waist
    coeffs = (complex(c1), complex(c2))
    pairs = (g1, g2)
    norm = 0.0j
    m1 = 0.0j
    m2 = 0.0j
    for i in range(2):
        for j in range(2):
            weight = coeffs[i].conjugate() * coeffs[j]
            if weight == 0:
                continue
            s, mu, mu2 = _pair_terms(pairs[i], pairs[j], origin, hbar)
            norm += weight * s
            m1 += weight * s * mu
            m2 += weight * s * mu2
    norm = norm.real
    if not norm > 1e-12:
        raise InvariantViolation("superposition norm > 1e-12", f"norm={norm!r}")
    mean_u = m1.real / norm
    var_u = m2.real / norm - mean_u * mean_u
    std_x = w * math.sqrt(max(var_u, 0.0))
    if std_x <= 0:
        raise InvariantViolation("std_x > 0")
    mean_x = origin + w * mean_u
    return SuperpositionMoments(mean_x, std_x, abs(mean_x) / std_x)


def interference_report(g1: GaussianPacket, g2: GaussianPacket, k: float = 1.0,
                        *, hbar=HBAR) -> InterferenceReport:
    if not k > 0:
        raise ValueError(f"k must be positive, got {k!r}")
    sep = abs(g1.x_center - g2.x_center)
    mag = abs(overlap(g1, g2, hbar=hbar))
    threshold = math.exp(-k * k / 8)
    return InterferenceReport(sep, sep > k * g1.sigma_x, mag, threshold, mag < threshold)


def weakly_interfering(g1: GaussianPacket, g2: GaussianPacket, k: float = 1.0, *, hbar=HBAR) -> bool:
    """True when the packets are separated by more than k spreads in position,
    or their overlap magnitude is below exp(-k^2/8) (the value two packets
    k spreads apart would have)."""
    return interference_report(g1, g2, k, hbar=hbar).weak


def packet_stable(g: GaussianPacket, dominance: float = 10.0) -> bool:
    """Center dominates the spread: |x_center| >= dominance * sigma_x (inclusive)."""
    return abs(g.x_center) >= dominance * g.sigma_x


def evolve_free(g: GaussianPacket, dt: float, *, hbar=HBAR) -> GaussianPacket:
    """Free evolution by ``dt`` seconds: drift at p/m and Gaussian spreading."""
    if dt < 0:
        raise ValueError(f"dt must be non-negative, got {dt!r}")
    if dt == 0:
        return g
    w = g.waist
    tau = g.spreading + hbar * dt / (2 * g.mass * w * w)
    return replace(
        g,
        x_center=g.x_center + g.p_center / g.mass * dt,
        sigma_x=w * math.sqrt(1 + tau * tau),
        time=g.time + dt,
        spreading=tau,
    )
