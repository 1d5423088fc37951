"""Structure-preserving space-time solver for 2D Lagrangian barotropic flow.

All computation happens on a fixed unit-square reference domain. Kinematic
variables (flow map, velocity, deformation gradient) live on a primal
tensor-product space-time mesh; dynamic variables (momentum and its traces)
live in the dual spaces, so that duality pairings reduce to coefficient
dot products and the discrete invariants (mass, linear momentum, angular
momentum, energy balance) hold to round-off.
"""

from .basis import Basis1D, GllRule, gauss_rule, gll_rule
from .topology import IncidenceSet, SlabTopology, build_topology, verify_complex
from .fields import LevelState, SampleGrid, SlabSpace
from .constitutive import MaterialLaw, assemble_m_pw, assemble_m_rho0
from .assembly import SlabOperators, SlabSolution, SolverConfig, picard_solve, time_stack
from .errors import (
    ConfigError,
    InvertedElementError,
    PicardConvergenceError,
    SingularSystemError,
)

__version__ = "0.1.0"

__all__ = [
    "Basis1D",
    "GllRule",
    "gauss_rule",
    "gll_rule",
    "IncidenceSet",
    "SlabTopology",
    "build_topology",
    "verify_complex",
    "LevelState",
    "SampleGrid",
    "SlabSpace",
    "MaterialLaw",
    "assemble_m_pw",
    "assemble_m_rho0",
    "SlabOperators",
    "SlabSolution",
    "SolverConfig",
    "picard_solve",
    "time_stack",
    "ConfigError",
    "InvertedElementError",
    "PicardConvergenceError",
    "SingularSystemError",
    "__version__",
]
