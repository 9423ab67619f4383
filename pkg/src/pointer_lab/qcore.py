"""Two-branch system+pointer states and their reduced 2x2 density matrices.

A state is kept symbolically as two branches ``c_i |label_i>|pointer_i>``
with orthogonal system labels.  Amplitudes are plain Python ``complex``.
Tracing out the pointer only needs the pointer overlap <pointer_1|pointer_2>,
which the packets module supplies in closed form.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import packets
from .errors import InvalidOverlapError, InvalidStateError, InvariantViolation
from .packets import GaussianPacket

NORM_TOL = 1e-9
PSD_TOL = 1e-12


@dataclass(frozen=True)
class Branch:
    amplitude: complex
    label: str
    pointer: GaussianPacket

    def __post_init__(self):
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        if not cmath.isfinite(self.amplitude):
            raise InvalidStateError("amplitudes finite", f"{self.label}: {self.amplitude!r}")


@dataclass(frozen=True)
class TwoBranchState:
    """c1|label1>|pointer1> + c2|label2>|pointer2> with orthogonal labels.

    Because the labels are orthogonal the norm is |c1|^2 + |c2|^2 whatever the
    pointer overlap, and it must equal 1 within NORM_TOL.
    """

    branch1: Branch
    branch2: Branch

    def __post_init__(self):
        if self.branch1.label == self.branch2.label:
            raise InvalidStateError("branch labels distinct", repr(self.branch1.label))
        n = self.norm()
        if abs(n - 1.0) > NORM_TOL:
            raise InvalidStateError("|c1|^2 + |c2|^2 = 1", f"norm={n!r}")

    @classmethod
    def normalized(cls, c1, label1, pointer1, c2, label2, pointer2):
        """Build a state, rescaling the amplitudes to unit norm."""
        c1, c2 = complex(c1), complex(c2)
        if not (cmath.isfinite(c1) and cmath.isfinite(c2)):
            raise InvalidStateError("amplitudes finite", f"{c1!r}, {c2!r}")
        n = math.sqrt(abs(c1) ** 2 + abs(c2) ** 2)
        if n == 0:
            raise InvalidStateError("state norm > 0")
        return cls(Branch(c1 / n, label1, pointer1), Branch(c2 / n, label2, pointer2))

    @property
    def amplitudes(self):
        return self.branch1.amplitude, self.branch2.amplitude

    @property
    def labels(self):
        return self.branch1.label, self.branch2.label

    def norm(self):
        c1, c2 = self.amplitudes
        return abs(c1) ** 2 + abs(c2) ** 2

    def pointer_overlap(self, **kw):
        """<pointer1|pointer2>, closed form."""
        return packets.overlap(self.branch1.pointer, self.branch2.pointer, **kw)

    def swapped(self):
        return TwoBranchState(self.branch2, self.branch1)


@dataclass(frozen=True)
class ReducedDensityMatrix2:
    """Hermitian 2x2 matrix [[rho11, rho12], [conj(rho12), rho22]]."""

    rho11: float
    rho22: float
    rho12: complex
    basis: tuple[str, str] = ("1", "2")

    def __post_init__(self):
        object.__setattr__(self, "rho12", complex(self.rho12))
        vals = (self.rho11, self.rho22, self.rho12.real, self.rho12.imag)
        if not all(math.isfinite(v) for v in vals):
            raise InvariantViolation("density matrix entries finite")
        if self.rho11 < -PSD_TOL or self.rho22 < -PSD_TOL:
            raise InvariantViolation("rho11, rho22 >= 0", f"{self.rho11!r}, {self.rho22!r}")
        if abs(self.rho11 + self.rho22 - 1.0) > NORM_TOL:
            raise InvariantViolation("trace = 1", f"trace={self.rho11 + self.rho22!r}")
        if self.rho11 * self.rho22 - abs(self.rho12) ** 2 < -PSD_TOL:
            raise InvariantViolation("positive semidefinite",
                                     f"det={self.rho11 * self.rho22 - abs(self.rho12) ** 2!r}")

    def as_array(self):
        return np.array([[self.rho11, self.rho12],
                         [self.rho12.conjugate(), self.rho22]], dtype=complex)


def reduce_pointer(state: TwoBranchState, pointer_overlap: complex) -> ReducedDensityMatrix2:
    """Trace the pointer out of ``state``.

    ``pointer_overlap`` is <pointer1|pointer2>; rho12 = c1 conj(c2) conj(overlap).
    Overlaps above 1 by less than NORM_TOL are treated as rounding and clipped.
    """
    z = complex(pointer_overlap)
    if not cmath.isfinite(z):
        raise InvalidOverlapError("overlap finite", repr(z))
    mag = abs(z)
    if mag > 1 + NORM_TOL:
        raise InvalidOverlapError("|overlap| <= 1", f"|overlap|={mag!r}")
    if mag > 1:
        z /= mag
    c1, c2 = state.amplitudes
    if not (cmath.isfinite(c1) and cmath.isfinite(c2)):
        raise InvalidStateError("amplitudes finite")
    p1, p2 = abs(c1) ** 2, abs(c2) ** 2
    tr = p1 + p2
    return ReducedDensityMatrix2(p1 / tr, p2 / tr, c1 * c2.conjugate() * z.conjugate() / tr,
                                 state.labels)


def reduced_state(state: TwoBranchState, **kw) -> ReducedDensityMatrix2:
    """reduce_pointer with the state's own closed-form pointer overlap."""
    return reduce_pointer(state, state.pointer_overlap(**kw))


def purity(rho: ReducedDensityMatrix2) -> float:
    """Tr(rho^2), between 1/2 (maximally mixed) and 1 (pure)."""
    return rho.rho11 ** 2 + rho.rho22 ** 2 + 2 * abs(rho.rho12) ** 2


def visibility(rho: ReducedDensityMatrix2) -> float:
    """Fringe visibility 2|rho12| at a detector recombining both labels."""
    return min(2 * abs(rho.rho12), 1.0)


def born_probabilities(state: TwoBranchState) -> tuple[float, float]:
    n = state.norm()
    if abs(n - 1.0) > NORM_TOL:
        raise InvalidStateError("|c1|^2 + |c2|^2 = 1", f"norm={n!r}")
    c1, c2 = state.amplitudes
    return abs(c1) ** 2 / n, abs(c2) ** 2 / n
