"""Finite-element versions of the single-element and three-element locking tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from locklab.fem.mesh import NominalTraction, PrescribedDisplacement, rectangle
from locklab.fem.solver import FemProblem, SolverConfig, SolveResult, solve
from locklab.paths import Branch, EquilibriumCurve, PathSample


def single_element_traction_problem(model, S, config=SolverConfig()):
    """Unit square, symmetry supports, dead load ``S`` normal to the face x = 1."""
    mesh = rectangle(1, 1)
    bcs = (
        PrescribedDisplacement(mesh.nodes_where(x=0.0), 0),
        PrescribedDisplacement(mesh.nodes_where(y=0.0), 1),
        NominalTraction(mesh.boundary_edges(x=1.0), S),
    )
    return FemProblem(mesh, model, bcs, config)


def single_element_displacement_problem(model, stretch, config=SolverConfig()):
    """Unit square, symmetry supports, face x = 1 moved to ``x = stretch``."""
    mesh = rectangle(1, 1)
    bcs = (
        PrescribedDisplacement(mesh.nodes_where(x=0.0), 0),
        PrescribedDisplacement(mesh.nodes_where(y=0.0), 1),
        PrescribedDisplacement(mesh.nodes_where(x=1.0), 0, stretch - 1.0),
    )
    return FemProblem(mesh, model, bcs, config)


def strip_problem(model, u2, config=SolverConfig(), fix_u1_driven=False, length=3):
    """``length`` x 1 strip of unit squares, clamped at x = 0, face x = length moved by ``u2``."""
    mesh = rectangle(length, 1, float(length), 1.0)
    left = mesh.nodes_where(x=0.0)
    right = mesh.nodes_where(x=float(length))
    bcs = [
        PrescribedDisplacement(left, 0),
        PrescribedDisplacement(left, 1),
        PrescribedDisplacement(right, 1, u2),
    ]
    if fix_u1_driven:
        bcs.append(PrescribedDisplacement(right, 0))
    return FemProblem(mesh, model, tuple(bcs), config)


def _element_curve(result: SolveResult, S_of_state):
    samples = []
    for st in result.history:
        rec = st.records
        margin = float(rec.margin.min())
        samples.append(
            PathSample(
                S=float(S_of_state(st)),
                stretch1=float(rec.stretch1()[0].mean()),
                stretch2=float(np.linalg.norm((rec.F * (rec.J ** (-1.0 / 3.0))[..., None, None])[0, :, :, 1], axis=-1).mean()),
                branch=Branch.PLANE_STRAIN,
                sigma11=float(rec.sigma[0, :, 0, 0].mean()),
                locking_margin=margin,
                in_domain=bool(rec.in_domain.all()),
            )
        )
    meta = {
        "termination": result.termination,
        "limiting_element": result.limiting_element,
        "limiting_margin": result.limiting_margin,
    }
    return EquilibriumCurve(tuple(samples), terminated_by_lock=not result.completed, meta=meta)


def run_single_element_traction(model, S, config=SolverConfig()):
    """Dead-load ramp ``0 -> S`` on one element; returns ``(curve, result)``."""
    problem = single_element_traction_problem(model, S, config)
    result = solve(problem)
    return _element_curve(result, lambda st: st.load_factor * S), result


def run_single_element_displacement(model, stretch, config=SolverConfig()):
    """Displacement ramp to ``stretch`` on one element; returns ``(curve, result)``.

    ``sample.S`` is the nominal traction recovered from the reaction forces.
    Samples with ``in_domain`` False lie past the lock (unguarded runs).
    """
    problem = single_element_displacement_problem(model, stretch, config)
    right = np.array(problem.mesh.nodes_where(x=1.0))
    result = solve(problem)
    return _element_curve(result, lambda st: st.internal[2 * right].sum()), result


@dataclass
class StripReport:
    """Per-element trajectories of the three-element strip.

    Arrays are shaped ``(n_states, n_elements)``. ``element_exp_le1`` holds
    the largest principal stretch of the isochoric left stretch tensor over
    each element's quadrature points and ``element_exp_le11`` the
    exponential of the ``11`` component of ``1/2 log B``.
    """

    result: SolveResult
    control: np.ndarray
    element_margin: np.ndarray
    element_bound: np.ndarray
    element_exp_le1: np.ndarray
    element_exp_le11: np.ndarray
    max_exp_le1: float
    max_exp_le1_total: float
    termination: str
    limiting_element: int
    locked_elements: tuple
    limit: float

    def elements_near_lock(self, rtol=1e-3):
        """Elements whose final smallest margin is within ``rtol * limit`` of the lock."""
        last = self.element_margin[-1]
        return tuple(int(e) for e in np.flatnonzero(last <= rtol * self.limit))

    def violated_states(self):
        """Indices of converged states with some quadrature point past the lock."""
        return tuple(int(k) for k in np.flatnonzero((self.element_margin <= 0).any(axis=1)))

    def max_bound(self):
        return float(self.element_bound.max())


def run_three_element_strip(model, u2, config=SolverConfig(), fix_u1_driven=False):
    """Clamped 3x1 strip with the transverse displacement of the far face ramped to ``u2``.

    ``locked_elements`` lists the elements whose guard fired in the
    rejected attempt that ended a guarded run (empty otherwise).
    """
    from locklab.materials import locking_limit

    problem = strip_problem(model, u2, config, fix_u1_driven=fix_u1_driven)
    result = solve(problem)
    margins, bounds, le, le11 = [], [], [], []
    for st in result.history:
        rec = st.records
        margins.append(rec.margin.min(axis=1))
        bounds.append(rec.bound_value.max(axis=1))
        le.append(np.exp(rec.max_principal_log_strain()).max(axis=1))
        le11.append(np.exp(rec.log_strain[..., 0, 0]).max(axis=1))
    final = result.final.records
    return StripReport(
        result=result,
        control=np.array([st.load_factor * u2 for st in result.history]),
        element_margin=np.array(margins),
        element_bound=np.array(bounds),
        element_exp_le1=np.array(le),
        element_exp_le11=np.array(le11),
        max_exp_le1=float(np.max(le[-1])),
        max_exp_le1_total=float(np.exp(final.max_principal_log_strain(isochoric=False)).max()),
        termination=result.termination,
        limiting_element=result.limiting_element,
        locked_elements=result.violating_elements if result.termination == "locking" else (),
        limit=locking_limit(model)[1],
    )
