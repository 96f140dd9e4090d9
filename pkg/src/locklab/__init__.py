"""Strain-locking hyperelasticity: closed forms, dead-load paths and a small FE solver."""

from locklab.errors import (
    DomainError,
    ElementInversionError,
    EvaluationError,
    LockingViolation,
    ParameterError,
    SingularTangentError,
)
from locklab.kinematics import DefGrad, InvariantSet, deviatoric, invariants, polar_stretch_eigen
from locklab.materials import (
    EnergyEval,
    LockingMode,
    MaterialModel,
    ModelKind,
    StressState,
    cauchy_stress_general,
    energy,
    locking_limit,
    tangent_tensor,
)

__version__ = "0.1.0"

__all__ = [
    "DefGrad",
    "DomainError",
    "ElementInversionError",
    "EnergyEval",
    "EvaluationError",
    "InvariantSet",
    "LockingMode",
    "LockingViolation",
    "MaterialModel",
    "ModelKind",
    "ParameterError",
    "SingularTangentError",
    "StressState",
    "cauchy_stress_general",
    "deviatoric",
    "energy",
    "invariants",
    "locking_limit",
    "polar_stretch_eigen",
    "tangent_tensor",
]
