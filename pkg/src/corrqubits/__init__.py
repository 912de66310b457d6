"""Dynamics and entanglement of two driven qubits under spatially correlated
classical and quantum noise.

Units: hbar = 1; times in microseconds, angular frequencies and rates in
rad/us, distances in micrometers.
"""

from . import analytic, dynamics, entanglement, noise, rates, specfun
from .analytic import DephasingParams, MarkovianParams
from .dynamics import (
    GeneratorSpec,
    Trajectory,
    evolve,
    generator_apply,
    named_state,
    steady_state,
    steady_state_nullspace,
    validate_state,
)
from .entanglement import concurrence, entanglement_of_formation
from .noise import CorrelationGeometry, LinearDispersion, OneOverF, Tabulated
from .rates import CoefficientSet

__version__ = "0.1.0"

__all__ = [
    "analytic",
    "dynamics",
    "entanglement",
    "noise",
    "rates",
    "specfun",
    "DephasingParams",
    "MarkovianParams",
    "GeneratorSpec",
    "Trajectory",
    "evolve",
    "generator_apply",
    "named_state",
    "steady_state",
    "steady_state_nullspace",
    "validate_state",
    "concurrence",
    "entanglement_of_formation",
    "CorrelationGeometry",
    "LinearDispersion",
    "OneOverF",
    "Tabulated",
    "CoefficientSet",
    "__version__",
]
