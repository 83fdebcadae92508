"""Membership intervals, perpendicular supporting hyperplanes and separability
certificates along one-parameter families through the maximally mixed state."""

from .family import HyperplaneSide, OneParamFamily, orthogonal_partner, pairing, state_at
from .oracles import SeeSawConfig, Status
from .tensor import BipartiteOperator, Dims, PureStateVector, SchmidtSpectrum

__all__ = [
    "BipartiteOperator",
    "Dims",
    "HyperplaneSide",
    "OneParamFamily",
    "PureStateVector",
    "SchmidtSpectrum",
    "SeeSawConfig",
    "Status",
    "orthogonal_partner",
    "pairing",
    "state_at",
]
