"""Uniform sampling of balanced joint-degree-matrix realizations with a
restricted swap chain, plus exact checks of that chain's mixing structure."""

__version__ = "0.1.0"

from .jdm_core import (
    JointDegreeMatrix,
    Realization,
    class_sizes,
    degree_spectrum,
    is_balanced,
    is_graphical,
    jdm_of,
    theta_table,
)
from .construct import construct_balanced
from .chain import ChainState, RsoMove, Sampler, rso_apply, sample, step, transition_prob
from .enumeration import brute_force_realizations, enumerate_balanced

__all__ = [
    "JointDegreeMatrix",
    "Realization",
    "class_sizes",
    "degree_spectrum",
    "is_balanced",
    "is_graphical",
    "jdm_of",
    "theta_table",
    "construct_balanced",
    "ChainState",
    "RsoMove",
    "Sampler",
    "rso_apply",
    "sample",
    "step",
    "transition_prob",
    "brute_force_realizations",
    "enumerate_balanced",
]
