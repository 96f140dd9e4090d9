"""Incremental Newton solver with automatic step cutting."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from locklab.errors import ElementInversionError, EvaluationError, LockingViolation, ParameterError
from locklab.fem.element import QuadratureRecords, element_residual_tangent
from locklab.fem.mesh import Mesh2D, dead_load_vector, prescribed_dofs
from locklab.materials import LockingMode, MaterialModel, ModelKind

# max |V_e (J_c - 1 + p_e/kappa)| accepted at convergence
CONSTRAINT_TOL = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    locking_mode: LockingMode = LockingMode.GUARDED
    kappa: float = math.inf
    tolerance: float = 1e-9
    absolute_tolerance: float = 1e-10
    max_iterations: int = 25
    initial_increment: float = 0.05
    min_increment: float = 1e-6
    max_increment: float = 0.1
    cut_factor: float = 0.5
    growth_factor: float = 1.5
    max_increments: int = 20000

    def __post_init__(self):
        object.__setattr__(self, "locking_mode", LockingMode(self.locking_mode))
        if not 0.0 < self.cut_factor < 1.0:
            raise ParameterError("step-cut factor must lie in (0, 1)")
        if not 0.0 < self.min_increment <= self.initial_increment <= self.max_increment <= 1.0:
            raise ParameterError("increments must satisfy 0 < min <= initial <= max <= 1")
        if self.growth_factor < 1.0:
            raise ParameterError("growth factor must be >= 1")
        if self.tolerance <= 0 or self.max_iterations < 1:
            raise ParameterError("tolerance must be positive and max_iterations >= 1")


@dataclass(frozen=True)
class FemProblem:
    mesh: Mesh2D
    model: MaterialModel
    bcs: tuple
    config: SolverConfig = SolverConfig()

    def __post_init__(self):
        object.__setattr__(self, "bcs", tuple(self.bcs))
        if self.model.kind is ModelKind.KILIAN and self.model.f != 0.0:
            raise ParameterError("finite-element runs require f = 0")
        if self.config.kappa / self.model.mu0 < 1e3:
            raise ParameterError("penalty kappa must be at least 1e3 mu0")
        prescribed = prescribed_dofs(self.mesh, self.bcs)
        object.__setattr__(self, "_prescribed", prescribed)
        object.__setattr__(self, "_fext", dead_load_vector(self.mesh, self.bcs))

    @property
    def n_unknowns(self):
        return self.mesh.n_dofs + self.mesh.n_elements

    @property
    def constrained(self):
        return np.array(sorted(self._prescribed), dtype=int)

    @property
    def free(self):
        mask = np.ones(self.n_unknowns, dtype=bool)
        mask[self.constrained] = False
        return np.flatnonzero(mask)

    def prescribed_values(self, load_factor):
        c = self.constrained
        return load_factor * np.array([self._prescribed[d] for d in c])

    def external_force(self, load_factor):
        return load_factor * self._fext

    def external_full(self, load_factor):
        """External force padded with zeros for the pressure unknowns."""
        return np.concatenate([self.external_force(load_factor), np.zeros(self.mesh.n_elements)])

    def with_config(self, **changes):
        return replace(self, config=replace(self.config, **changes))


@dataclass(frozen=True)
class Assembly:
    residual: np.ndarray
    tangent: np.ndarray
    internal: np.ndarray
    records: QuadratureRecords


def assemble(problem: FemProblem, x, load_factor, mode=None) -> Assembly:
    """Residual and symmetric tangent of the mixed system at ``x = [u, p]``.

    The first ``2 n_nodes`` residual entries are ``f_int - f_ext``; the
    trailing ``n_elements`` entries are the element constraints
    ``-V_e (J_c - 1 + p_e / kappa)``.

    Raises ``ElementInversionError`` or (guarded) ``LockingViolation``.
    """
    mesh = problem.mesh
    mode = problem.config.locking_mode if mode is None else LockingMode(mode)
    nu = mesh.n_dofs
    n = problem.n_unknowns
    x = np.asarray(x, dtype=float)
    U = x[:nu].reshape(-1, 2)
    pressures = x[nu:]
    R = np.zeros(n)
    K = np.zeros((n, n))
    records = QuadratureRecords.empty(mesh.n_elements)
    for e, conn in enumerate(mesh.elements):
        X = mesh.nodes[conn]
        fe, Ke, ge, re, kpp = element_residual_tangent(
            problem.model, X, U[conn], pressures[e], problem.config.kappa, mode, element=e, records=records
        )
        dofs = np.column_stack([2 * conn, 2 * conn + 1]).ravel()
        pd = nu + e
        R[dofs] += fe.ravel()
        R[pd] += re
        K[np.ix_(dofs, dofs)] += Ke.reshape(8, 8)
        K[dofs, pd] += ge.ravel()
        K[pd, dofs] += ge.ravel()
        K[pd, pd] += kpp
    internal = R[:nu].copy()
    R[:nu] -= problem.external_force(load_factor)
    return Assembly(R, K, internal, records)


@dataclass(frozen=True)
class FemState:
    """Converged (or initial) solution: ``x = [u, p]`` plus quadrature records."""

    x: np.ndarray
    load_factor: float
    records: QuadratureRecords
    tangent: np.ndarray | None = None
    internal: np.ndarray | None = None

    @property
    def u(self):
        return self.x[: len(self.x) - len(self.records.pressure)]

    @property
    def pressures(self):
        return self.records.pressure

    def limiting_element(self):
        m = self.records.element_margin()
        e = int(np.argmin(m))
        return e, float(m[e])


@dataclass(frozen=True)
class IncrementReport:
    converged: bool
    increment: float
    iterations: int
    residual_history: tuple
    attempts: tuple = ()
    termination: str | None = None
    limiting_element: int | None = None
    limiting_margin: float | None = None
    violating_elements: tuple = ()


class IncrementFailure(Exception):
    def __init__(self, reason, residual_history=(), violating_elements=()):
        self.reason = reason
        self.residual_history = tuple(residual_history)
        self.violating_elements = tuple(violating_elements)
        super().__init__(reason)


def _violators(problem, x, lf):
    """Elements with a quadrature point past the lock at a rejected iterate."""
    try:
        asm = assemble(problem, x, lf, mode=LockingMode.UNGUARDED)
    except (ElementInversionError, EvaluationError):
        return ()
    return tuple(int(e) for e in np.flatnonzero((asm.records.margin <= 0).any(axis=1)))


def initial_state(problem: FemProblem) -> FemState:
    x = np.zeros(problem.n_unknowns)
    asm = assemble(problem, x, 0.0)
    return FemState(x, 0.0, asm.records, asm.tangent, asm.internal)


def _converged(problem, R, fext):
    cfg = problem.config
    nu = problem.mesh.n_dofs
    free_u = problem.free[problem.free < nu]
    rn = float(np.linalg.norm(R[free_u]))
    ref = max(float(np.linalg.norm(fext)), float(np.linalg.norm(R[problem.constrained])))
    force_ok = rn <= cfg.tolerance * ref or rn <= cfg.absolute_tolerance * problem.model.mu0
    volume_ok = float(np.max(np.abs(R[nu:]), initial=0.0)) <= CONSTRAINT_TOL
    return force_ok and volume_ok, rn


def _linear_solve(K, rhs, history=()):
    try:
        # near the lock the tangent legitimately spans ~1e13 mu0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            return scipy.linalg.solve(K, rhs, assume_a="sym")
    except (np.linalg.LinAlgError, ValueError):
        raise IncrementFailure("singular-tangent", history) from None


def _newton(problem, state, dlf):
    cfg = problem.config
    free, con = problem.free, problem.constrained
    lf = state.load_factor + dlf
    x = state.x.copy()
    xc = problem.prescribed_values(lf)
    dxc = xc - x[con]
    if state.tangent is not None and (np.any(dxc) or dlf):
        K = state.tangent
        rhs = (problem.external_full(lf) - problem.external_full(state.load_factor))[free]
        rhs = rhs - K[np.ix_(free, con)] @ dxc
        x[free] += _linear_solve(K[np.ix_(free, free)], rhs)
    x[con] = xc
    history = []
    fext = problem.external_force(lf)
    for it in range(cfg.max_iterations + 1):
        try:
            asm = assemble(problem, x, lf)
        except LockingViolation:
            raise IncrementFailure("locking", history, _violators(problem, x, lf)) from None
        except ElementInversionError:
            raise IncrementFailure("inversion", history) from None
        except EvaluationError:
            raise IncrementFailure("evaluation", history) from None
        R = asm.residual
        if not np.all(np.isfinite(R)) or not np.all(np.isfinite(asm.tangent)):
            raise IncrementFailure("non-finite", history)
        done, rn = _converged(problem, R, fext)
        history.append(rn)
        if done:
            return FemState(x, lf, asm.records, asm.tangent, asm.internal), it, history
        if it == cfg.max_iterations:
            break
        x = x.copy()
        x[free] += _linear_solve(asm.tangent[np.ix_(free, free)], -R[free], history)
    raise IncrementFailure("no-convergence", history)


def solve_increment(problem: FemProblem, state: FemState, dlf):
    """Advance by ``dlf`` in load factor, cutting the step on failure.

    Returns ``(state, report)``. If the increment falls below the minimum
    without converging, ``state`` is the input (last converged) state and
    ``report.termination`` names the last failure reason.
    """
    cfg = problem.config
    attempts = []
    d = float(dlf)
    while True:
        try:
            new, iters, history = _newton(problem, state, d)
        except IncrementFailure as exc:
            attempts.append((d, exc.reason))
            d *= cfg.cut_factor
            if d < cfg.min_increment:
                e, m = state.limiting_element()
                return state, IncrementReport(
                    converged=False,
                    increment=0.0,
                    iterations=0,
                    residual_history=exc.residual_history,
                    attempts=tuple(attempts),
                    termination=exc.reason,
                    limiting_element=e,
                    limiting_margin=m,
                    violating_elements=exc.violating_elements,
                )
            continue
        return new, IncrementReport(
            converged=True,
            increment=d,
            iterations=iters,
            residual_history=tuple(history),
            attempts=tuple(attempts),
        )


@dataclass
class SolveResult:
    history: list
    reports: list
    termination: str
    limiting_element: int
    limiting_margin: float
    violating_elements: tuple = ()

    @property
    def final(self) -> FemState:
        return self.history[-1]

    @property
    def completed(self):
        return self.termination == "completed"


def solve(problem: FemProblem, callback=None) -> SolveResult:
    """Ramp the load factor from 0 to 1; stop early at the minimum increment."""
    cfg = problem.config
    state = initial_state(problem)
    history = [state]
    reports = []
    d = cfg.initial_increment
    termination = "completed"
    violators = ()
    for _ in range(cfg.max_increments):
        remaining = 1.0 - state.load_factor
        if remaining <= 1e-14:
            break
        step = min(d, remaining)
        state, rep = solve_increment(problem, state, step)
        reports.append(rep)
        if not rep.converged:
            termination = rep.termination
            violators = rep.violating_elements
            break
        history.append(state)
        if callback is not None:
            callback(state, rep)
        d = rep.increment
        if rep.increment == step and not rep.attempts:
            d = min(d * cfg.growth_factor, cfg.max_increment)
    else:
        termination = "max-increments"
    e, m = history[-1].limiting_element()
    if math.isinf(m):
        e = -1
    return SolveResult(history, reports, termination, e, m, violators)
