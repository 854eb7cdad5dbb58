"""
Domain types
"""
from bmfl.models.density import DensityMatrix
from bmfl.models.fock import MixedState, OccupationBasis, PureState
from bmfl.models.localization import LocalizedState, LocalizingOperator
from bmfl.models.measure import DeFinettiMeasure
from bmfl.models.operators import ManyBodyOperator, ModelSpec, OneBodyOperator, TwoBodyOperator

__all__ = [
    "DensityMatrix",
    "MixedState",
    "OccupationBasis",
    "PureState",
    "LocalizedState",
    "LocalizingOperator",
    "DeFinettiMeasure",
    "ManyBodyOperator",
    "ModelSpec",
    "OneBodyOperator",
    "TwoBodyOperator",
]
