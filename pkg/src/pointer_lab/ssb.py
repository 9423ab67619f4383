"""Superposition-breaking decision rule and Born-rule actualization.

A two-branch pointer superposition is *broken* when its pointer packets are
weakly interfering; only then may it actualize into one branch, with Born
probability.  Actualization samples outcomes and never modifies the state:
the exact state stays a superposition, and there is deliberately no inverse
operation taking an outcome back to the superposition.

Randomness
----------
All draws come from a Philox4x64 counter-based stream keyed by
``(seed, stream)``.  Trial ``i`` of an ensemble consumes the ``i``-th double
of stream 0, so any chunk of trials can be computed independently by jumping
the counter, and tallies do not depend on how the work is split.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import packets, qcore
from .constants import HBAR
from .errors import InvariantViolation, RegimeViolationError
from .qcore import TwoBranchState

_U64 = (1 << 64) - 1
# Philox emits 4 uint64 per counter step; chunk boundaries must align.
_BLOCK = 4
_CHUNK = 1 << 16


class Regime(enum.Enum):
    SUPERPOSITION = "superposition"
    INTERMEDIATE = "intermediate"
    BROKEN = "broken"


class CriterionKind(enum.Enum):
    POINTER_OVERLAP = "pointer_overlap"
    WAVELENGTH_RATIO = "wavelength_ratio"


@dataclass(frozen=True)
class RegimeVerdict:
    regime: Regime
    criterion_value: float
    criterion_kind: CriterionKind

    def __post_init__(self):
        if not (math.isfinite(self.criterion_value) and self.criterion_value >= 0):
            raise InvariantViolation("criterion_value finite and >= 0", repr(self.criterion_value))


@dataclass(frozen=True)
class EnsembleStats:
    n_total: int
    n_branch1: int
    n_branch2: int
    fraction1: float
    seed: int
    regime: Regime = Regime.BROKEN

    def validate(self):
        if min(self.n_total, self.n_branch1, self.n_branch2) < 0:
            raise InvariantViolation("counts >= 0")
        if self.n_branch1 + self.n_branch2 != self.n_total:
            raise InvariantViolation("n_branch1 + n_branch2 = n_total")
        expected = self.n_branch1 / self.n_total if self.n_total else 0.0
        if self.fraction1 != expected:
            raise InvariantViolation("fraction1 = n_branch1 / n_total")
        return self


def _key(seed, stream):
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError(f"seed must be a non-negative integer, got {seed!r}")
    return [int(seed) & _U64, int(stream) & _U64]


def uniforms(seed: int, count: int, *, stream: int = 0, start: int = 0) -> np.ndarray:
    """Doubles ``start .. start+count-1`` of the (seed, stream) Philox stream."""
    head = start % _BLOCK
    bg = np.random.Philox(key=_key(seed, stream))
    bg.advance((start - head) // _BLOCK)
    return np.random.Generator(bg).random(count + head)[head:]


def classify(state: TwoBranchState, k: float = 1.0, *, hbar=HBAR) -> RegimeVerdict:
    """Broken iff the two pointers are weakly interfering at strength ``k``."""
    p1, p2 = state.branch1.pointer, state.branch2.pointer
    report = packets.interference_report(p1, p2, k, hbar=hbar)
    regime = Regime.BROKEN if report.weak else Regime.SUPERPOSITION
    return RegimeVerdict(regime, report.overlap_magnitude, CriterionKind.POINTER_OVERLAP)


def _require_broken(verdict):
    if verdict.regime is not Regime.BROKEN:
        raise RegimeViolationError(
            f"cannot actualize a {verdict.regime.value} state: pointers still interfere strongly")


def actualize(state: TwoBranchState, verdict: RegimeVerdict, rng_seed: int) -> str:
    """Label of the branch the broken superposition turns into for this seed.

    Uses trial 0 of the seed's stream, so it agrees with the first trial of
    :func:`run_ensemble`.
    """
    _require_broken(verdict)
    p1, _ = qcore.born_probabilities(state)
    u = uniforms(rng_seed, 1)[0]
    return state.branch1.label if u < p1 else state.branch2.label


def _count_branch1(p1, seed, start, count):
    return int(np.count_nonzero(uniforms(seed, count, start=start) < p1))


def run_ensemble(state: TwoBranchState, n: int, k: float = 1.0, rng_seed: int = 0,
                 *, workers: int | None = None, hbar=HBAR) -> EnsembleStats:
    """Tally ``n`` independent actualizations.

    A state that does not break yields empty stats carrying its regime.
    ``workers`` > 1 spreads chunks of trials over threads; the tallies are
    identical for any worker count.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    verdict = classify(state, k, hbar=hbar)
    if verdict.regime is not Regime.BROKEN:
        return EnsembleStats(0, 0, 0, 0.0, rng_seed, verdict.regime)
    p1, _ = qcore.born_probabilities(state)
    starts = range(0, n, _CHUNK)
    sizes = [min(_CHUNK, n - s) for s in starts]
    if workers and workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            n1 = sum(pool.map(lambda a: _count_branch1(p1, rng_seed, *a), zip(starts, sizes)))
    else:
        n1 = sum(_count_branch1(p1, rng_seed, s, c) for s, c in zip(starts, sizes))
    return EnsembleStats(n, n1, n - n1, n1 / n, rng_seed).validate()
