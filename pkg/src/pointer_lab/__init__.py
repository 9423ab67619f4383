"""Pointer-state simulations of quantum measurement as spontaneous
superposition breaking: a photon on a movable mirror, and a photon Compton
scattering on an electron that acts as the detector pointer."""

from .compton import ComptonConfig, CrossoverModel, SweepRecord
from .mirror import MirrorExperimentConfig
from .packets import GaussianPacket
from .qcore import Branch, ReducedDensityMatrix2, TwoBranchState
from .ssb import EnsembleStats, Regime, RegimeVerdict

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "ComptonConfig",
    "CrossoverModel",
    "EnsembleStats",
    "GaussianPacket",
    "MirrorExperimentConfig",
    "ReducedDensityMatrix2",
    "Regime",
    "RegimeVerdict",
    "SweepRecord",
    "TwoBranchState",
]
