"""Induced vortex tunneling across a cylindrical superconducting wire.

Mode-by-mode evolution of the dual vortex field under a current pulse,
together with the adiabatic, instanton and core-fermion analytic results
used to cross-check it.
"""

__version__ = "0.1.0"

from .params import MaterialParams, PhysicalConstants, SimulationParams
from .pulse import PulseProfile, evaluate_pulse, make_pulse

__all__ = [
    "MaterialParams",
    "PhysicalConstants",
    "SimulationParams",
    "PulseProfile",
    "evaluate_pulse",
    "make_pulse",
    "__version__",
]
