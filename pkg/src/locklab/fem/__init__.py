"""Near-incompressible plane-strain finite elements for strain-locking materials."""

from locklab.fem.cases import (
    run_single_element_displacement,
    run_single_element_traction,
    run_three_element_strip,
)
from locklab.fem.mesh import Mesh2D, NominalTraction, PrescribedDisplacement, rectangle
from locklab.fem.solver import FemProblem, FemState, SolverConfig, assemble, solve, solve_increment

__all__ = [
    "FemProblem",
    "FemState",
    "Mesh2D",
    "NominalTraction",
    "PrescribedDisplacement",
    "SolverConfig",
    "assemble",
    "rectangle",
    "run_single_element_displacement",
    "run_single_element_traction",
    "run_three_element_strip",
    "solve",
    "solve_increment",
]
