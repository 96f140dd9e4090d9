"""Dead-load equilibrium paths for homogeneous plane deformations.

Two problems are traced, both with ``l3 = 1`` and ``l1 l2 = 1``:

* a cube with equal nominal traction ``S`` normal to faces 1 and 2. It
  has the trivial branch ``l1 = l2 = 1`` and a non-trivial branch which
  meets it at ``S = 2 mu0``;
* a block loaded normal to face 1 only (plane-strain tension).

Stationarity of ``W(l1, l2, 1) - S (l1 + l2 - 2)`` under ``l1 l2 = 1`` gives
``(l1 - l2) S = l1 dW/dl1 - l2 dW/dl2``. With ``W = W(I1, I2)`` the right
hand side factors as ``(l1^2 - l2^2) * 2 (W1 + l3^2 W2)``, so the
non-trivial branch is ``S = 2 (l1 + l2)(W1 + W2)``.

The curves returned here are traced branches. They are not claimed to be
the complete solution set of either problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from locklab.errors import ParameterError
from locklab.materials import LockingMode, MaterialModel, energy_invariants

BIFURCATION_RTOL = 1e-12


class Branch(str, Enum):
    TRIVIAL = "trivial"
    NON_TRIVIAL = "non-trivial"
    PLANE_STRAIN = "plane-strain"


@dataclass(frozen=True)
class PathSample:
    S: float
    stretch1: float
    stretch2: float
    branch: Branch
    sigma11: float = math.nan
    locking_margin: float = math.inf
    in_domain: bool = True
    bifurcation: bool = False


@dataclass(frozen=True)
class BifurcationPoint:
    S: float
    stretch1: float
    deviation: float


@dataclass(frozen=True)
class EquilibriumCurve:
    samples: tuple
    bifurcation: BifurcationPoint | None = None
    terminated_by_lock: bool = False
    terminated_at: float | None = None
    meta: dict = field(default_factory=dict)

    def column(self, name):
        return np.array([getattr(s, name) for s in self.samples])

    def __len__(self):
        return len(self.samples)


def _state(model, l1, l2, l3=1.0):
    sq = (l1 * l1, l2 * l2, l3 * l3)
    I1 = sq[0] + sq[1] + sq[2]
    I2 = sq[0] * sq[1] + sq[1] * sq[2] + sq[0] * sq[2]
    return energy_invariants(model, I1, I2)


def stretch_derivatives(model, l1, l2, l3=1.0):
    """``(dW/dl1, dW/dl2, dW/dl3)`` at an incompressible principal state."""
    ev = _state(model, l1, l2, l3)
    l = np.array([l1, l2, l3], dtype=float)
    I1 = float(np.sum(l * l))
    # dI1/dli = 2 li, dI2/dli = 2 li (I1 - li^2)
    return 2.0 * l * (ev.dW_dI1 + ev.dW_dI2 * (I1 - l * l))


def _cube_S(model, l1):
    l2 = 1.0 / l1
    ev = _state(model, l1, l2)
    return 2.0 * (l1 + l2) * (ev.dW_dI1 + ev.dW_dI2), ev


def cube_nontrivial_path(model: MaterialModel, stretches, mode=LockingMode.GUARDED) -> EquilibriumCurve:
    """Non-trivial branch of the equal-biaxial dead-load cube, parameterized by ``l1``.

    In guarded mode the sweep stops at the first stretch outside the
    locking domain and the curve is marked ``terminated_by_lock``.
    """
    guarded = LockingMode(mode) is LockingMode.GUARDED
    samples = []
    stopped = None
    for l1 in np.asarray(stretches, dtype=float):
        if not l1 > 0 or l1 == 1.0:
            raise ParameterError("non-trivial branch needs l1 > 0, l1 != 1")
        S, ev = _cube_S(model, float(l1))
        if guarded and not ev.in_domain:
            stopped = float(l1)
            break
        samples.append(
            PathSample(
                S=float(S),
                stretch1=float(l1),
                stretch2=1.0 / float(l1),
                branch=Branch.NON_TRIVIAL,
                locking_margin=ev.locking_margin,
                in_domain=ev.in_domain,
            )
        )
    return EquilibriumCurve(tuple(samples), terminated_by_lock=stopped is not None, terminated_at=stopped)


def bifurcation_load(model: MaterialModel):
    """Load at which the branches meet: the non-trivial formula at ``l1 = 1``."""
    S, _ = _cube_S(model, 1.0)
    return float(S)


def cube_trivial_path(model: MaterialModel, loads) -> EquilibriumCurve:
    """Trivial branch ``l1 = l2 = 1``; the equal dead load is balanced by pressure."""
    S_star = bifurcation_load(model)
    samples = []
    for S in np.asarray(loads, dtype=float):
        ev = _state(model, 1.0, 1.0)
        samples.append(
            PathSample(
                S=float(S),
                stretch1=1.0,
                stretch2=1.0,
                branch=Branch.TRIVIAL,
                locking_margin=ev.locking_margin,
                bifurcation=abs(S - S_star) <= BIFURCATION_RTOL * max(1.0, abs(S_star)),
            )
        )
    return EquilibriumCurve(tuple(samples))


def block_plane_strain_path(model: MaterialModel, stretches, mode=LockingMode.GUARDED) -> EquilibriumCurve:
    """Plane-strain block under a dead load normal to face 1.

    ``sigma11 = l1 dW/dl1 - l2 dW/dl2`` (lateral face traction free) and the
    nominal traction is ``S = sigma11 / l1``.
    """
    guarded = LockingMode(mode) is LockingMode.GUARDED
    samples = []
    stopped = None
    for l1 in np.asarray(stretches, dtype=float):
        if not l1 > 0:
            raise ParameterError("stretch must be positive")
        l1 = float(l1)
        l2 = 1.0 / l1
        ev = _state(model, l1, l2)
        if guarded and not ev.in_domain:
            stopped = l1
            break
        sigma11 = (l1 * l1 - l2 * l2) * 2.0 * (ev.dW_dI1 + ev.dW_dI2)
        samples.append(
            PathSample(
                S=sigma11 / l1,
                stretch1=l1,
                stretch2=l2,
                branch=Branch.PLANE_STRAIN,
                sigma11=sigma11,
                locking_margin=ev.locking_margin,
                in_domain=ev.in_domain,
            )
        )
    return EquilibriumCurve(tuple(samples), terminated_by_lock=stopped is not None, terminated_at=stopped)


def _neville_at_zero(x, y):
    x = list(x)
    p = list(y)
    n = len(x)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (x[i + k] * p[i] - x[i] * p[i + 1]) / (x[i + k] - x[i])
    return p[0]


def bifurcation_detect(trivial: EquilibriumCurve, nontrivial: EquilibriumCurve, order=4, mu0=1.0) -> BifurcationPoint:
    """Intersect the non-trivial branch with ``l1 = l2 = 1``.

    The load is Richardson-extrapolated to ``l1 -> 1`` by a polynomial in
    ``|ln l1|`` through the ``order`` samples closest to the trivial
    branch. ``deviation`` is ``|S* - 2 mu0|``.
    """
    pts = [(abs(math.log(s.stretch1)), s.S) for s in nontrivial.samples if s.stretch1 != 1.0]
    if not pts:
        raise ParameterError("non-trivial branch has no samples off the trivial branch")
    if not trivial.samples:
        raise ParameterError("trivial branch is empty")
    pts.sort()
    uniq = []
    for t, S in pts:
        if not uniq or t > uniq[-1][0]:
            uniq.append((t, S))
    uniq = uniq[: max(1, order)]
    S_star = float(_neville_at_zero([u[0] for u in uniq], [u[1] for u in uniq]))
    return BifurcationPoint(S=S_star, stretch1=1.0, deviation=abs(S_star - 2.0 * mu0))


def plane_strain_lock(model: MaterialModel):
    """Stretch above one at which the plane-strain block locks (``inf`` if never)."""
    from locklab.homogeneous import CaseKind, asymptote

    return asymptote(model, CaseKind.PLANE_STRAIN)[-1]
