"""Closed-form Cauchy stresses for homogeneous prescribed-displacement tests.

Simple shear reports the deviatoric state (``tr sigma = 0``); a traction
free ``sigma_33 = 0`` convention differs from it by a hydrostatic shift.
Uniaxial and equibiaxial stretch are traction free in the lateral
directions, so only the loaded normal components are non-zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import bisect

from locklab import kinematics as kin
from locklab.errors import LockingViolation, ParameterError
from locklab.materials import (
    LockingMode,
    MaterialModel,
    ModelKind,
    energy_invariants,
    locking_limit,
)

MARGIN_TOL = 1e-9
ROOT_XTOL = 1e-12


class CaseKind(str, Enum):
    SHEAR = "shear"
    UNIAXIAL = "uniaxial"
    BIAXIAL = "biaxial"
    PLANE_STRAIN = "plane-strain"


@dataclass(frozen=True)
class DeformationCase:
    kind: CaseKind
    control: float

    def __post_init__(self):
        object.__setattr__(self, "kind", CaseKind(self.kind))
        if self.kind is not CaseKind.SHEAR and not self.control > 0:
            raise ParameterError("principal stretch must be positive")

    def F(self):
        return deformation_gradient(self.kind, self.control)


@dataclass(frozen=True)
class ResponseSample:
    kind: CaseKind
    control: float
    sigma11: float
    sigma22: float
    sigma33: float
    sigma12: float
    I1bar: float
    locking_margin: float
    at_asymptote: bool

    def as_matrix(self):
        return np.array(
            [
                [self.sigma11, self.sigma12, 0.0],
                [self.sigma12, self.sigma22, 0.0],
                [0.0, 0.0, self.sigma33],
            ]
        )


def deformation_gradient(kind, control):
    kind = CaseKind(kind)
    return {
        CaseKind.SHEAR: kin.simple_shear,
        CaseKind.UNIAXIAL: kin.uniaxial,
        CaseKind.BIAXIAL: kin.equibiaxial,
        CaseKind.PLANE_STRAIN: kin.plane_strain,
    }[kind](control)


def case_invariants(kind, control):
    """``(I1bar, I2bar)`` of the isochoric deformation along a case."""
    kind = CaseKind(kind)
    x = float(control)
    if kind is CaseKind.SHEAR:
        return 3.0 + x * x, 3.0 + x * x
    if kind is CaseKind.UNIAXIAL:
        return x * x + 2.0 / x, 2.0 * x + 1.0 / (x * x)
    if kind is CaseKind.BIAXIAL:
        return 2.0 * x * x + 1.0 / x**4, x**4 + 2.0 / (x * x)
    return x * x + 1.0 / (x * x) + 1.0, x * x + 1.0 / (x * x) + 1.0


def _margin(model, kind, control):
    I1, I2 = case_invariants(kind, control)
    _, limit = locking_limit(model)
    return I1, limit - model.bounding_value(I1, I2)


def _closed_form_applies(model):
    return model.kind is not ModelKind.KILIAN or (model.alpha == 0.0 and model.f == 0.0)


def _check(model, kind, control, mode):
    I1, margin = _margin(model, kind, control)
    if LockingMode(mode) is LockingMode.GUARDED and margin <= 0:
        raise LockingViolation(margin, f"{kind.value} control {control:g} is at or past the lock")
    return I1, margin


def _principal_deviator(model, stretches):
    """In-plane principal deviatoric Kirchhoff stresses for any model."""
    l = np.asarray(stretches, dtype=float)
    sq = l * l
    I1 = float(sq.sum())
    I2 = float(sq[0] * sq[1] + sq[1] * sq[2] + sq[0] * sq[2])
    ev = energy_invariants(model, I1, I2)
    return 2.0 * (ev.dW_dI1 + I1 * ev.dW_dI2) * sq - 2.0 * ev.dW_dI2 * sq * sq


def shear_response(model: MaterialModel, gamma, mode=LockingMode.GUARDED) -> ResponseSample:
    kind = CaseKind.SHEAR
    g = np.float64(gamma)
    I1, margin = _check(model, kind, g, mode)
    mu0 = model.mu0
    with np.errstate(divide="ignore", invalid="ignore"):
        if model.kind is ModelKind.NEO_HOOKEAN:
            k = np.float64(1.0)
        elif model.kind is ModelKind.GENT:
            k = model.a / (model.a - g * g)
        elif _closed_form_applies(model):
            b = np.sqrt(g * g / (model.a**2 - 3.0))
            k = 1.0 / (1.0 - b)
        else:
            k = None
    if k is not None:
        s12 = mu0 * k * g
        s11 = 2.0 / 3.0 * mu0 * k * g * g
        s22 = s33 = -1.0 / 3.0 * mu0 * k * g * g
    else:
        B = kin.simple_shear(g) @ kin.simple_shear(g).T
        ev = energy_invariants(model, I1, I1)
        s = 2.0 * (ev.dW_dI1 + I1 * ev.dW_dI2) * kin.deviatoric(B) - 2.0 * ev.dW_dI2 * kin.deviatoric(B @ B)
        s12, s11, s22, s33 = s[0, 1], s[0, 0], s[1, 1], s[2, 2]
    return ResponseSample(kind, float(g), float(s11), float(s22), float(s33), float(s12), I1, margin, margin <= MARGIN_TOL)


def uniaxial_response(model: MaterialModel, stretch, mode=LockingMode.GUARDED) -> ResponseSample:
    kind = CaseKind.UNIAXIAL
    x = np.float64(DeformationCase(kind, stretch).control)
    I1, margin = _check(model, kind, x, mode)
    mu0 = model.mu0
    with np.errstate(divide="ignore", invalid="ignore"):
        if model.kind is ModelKind.NEO_HOOKEAN:
            s11 = mu0 * (x * x - 1.0 / x)
        elif model.kind is ModelKind.GENT:
            a = model.a
            s11 = mu0 * a * (x**3 - 1.0) / (-(x**3) + (3.0 + a) * x - 2.0)
        elif _closed_form_applies(model):
            b = np.sqrt((x - 1.0) ** 2 * (x + 2.0) / ((model.a**2 - 3.0) * x))
            s11 = mu0 * (1.0 - x**3) / (x * (b - 1.0))
        else:
            s = _principal_deviator(model, (x, 1.0 / np.sqrt(x), 1.0 / np.sqrt(x)))
            s11 = s[0] - s[1]
    return ResponseSample(kind, float(x), float(s11), 0.0, 0.0, 0.0, I1, margin, margin <= MARGIN_TOL)


def biaxial_response(model: MaterialModel, stretch, mode=LockingMode.GUARDED) -> ResponseSample:
    kind = CaseKind.BIAXIAL
    x = np.float64(DeformationCase(kind, stretch).control)
    I1, margin = _check(model, kind, x, mode)
    mu0 = model.mu0
    with np.errstate(divide="ignore", invalid="ignore"):
        if model.kind is ModelKind.NEO_HOOKEAN:
            s11 = mu0 * (x * x - 1.0 / x**4)
        elif model.kind is ModelKind.GENT:
            a = model.a
            s11 = mu0 * a * (x**6 - 1.0) / (-2.0 * x**6 + (3.0 + a) * x**4 - 1.0)
        elif _closed_form_applies(model):
            b = np.sqrt((2.0 * x * x + 1.0 / x**4 - 3.0) / (model.a**2 - 3.0))
            s11 = mu0 * (1.0 - x**6) / (x**4 * (b - 1.0))
        else:
            s = _principal_deviator(model, (x, x, 1.0 / (x * x)))
            s11 = s[0] - s[2]
    return ResponseSample(kind, float(x), float(s11), float(s11), 0.0, 0.0, I1, margin, margin <= MARGIN_TOL)


RESPONSES = {
    CaseKind.SHEAR: shear_response,
    CaseKind.UNIAXIAL: uniaxial_response,
    CaseKind.BIAXIAL: biaxial_response,
}


def response(model, kind, control, mode=LockingMode.GUARDED) -> ResponseSample:
    kind = CaseKind(kind)
    if kind not in RESPONSES:
        raise ParameterError(f"no prescribed-displacement response for {kind.value}")
    return RESPONSES[kind](model, control, mode)


def asymptote(model: MaterialModel, case_kind):
    """Positive control values at which the bounding invariant hits its limit.

    Both roots are returned for stretch cases, the sub-unity one first.
    The neo-Hookean model is unbounded and yields ``(inf,)``.
    """
    kind = CaseKind(case_kind)
    _, limit = locking_limit(model)
    if math.isinf(limit):
        return (math.inf,)
    if kind is CaseKind.SHEAR:
        # It = 3 + gamma^2 independently of f
        return (math.sqrt(limit - 3.0),)

    def residual(x):
        I1, I2 = case_invariants(kind, x)
        return model.bounding_value(I1, I2) - limit

    lo = 0.5
    while residual(lo) <= 0:
        lo *= 0.5
    hi = 2.0
    while residual(hi) <= 0:
        hi *= 2.0
    below = bisect(residual, lo, 1.0, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=500)
    above = bisect(residual, 1.0, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=500)
    return (below, above)


@dataclass(frozen=True)
class EnergySurface:
    stretch1: np.ndarray
    stretch2: np.ndarray
    W: np.ndarray
    bound_value: np.ndarray
    in_domain: np.ndarray


def energy_surface(model: MaterialModel, stretch1, stretch2) -> EnergySurface:
    """Energy on a grid of in-plane principal stretches, ``l3 = 1/(l1 l2)``.

    ``W[i, j]`` belongs to ``(stretch1[i], stretch2[j])``; out-of-domain
    cells hold NaN and ``in_domain`` is False there.
    """
    l1 = np.asarray(stretch1, dtype=float)
    l2 = np.asarray(stretch2, dtype=float)
    if np.any(l1 <= 0) or np.any(l2 <= 0):
        raise ParameterError("stretches must be positive")
    W = np.full((l1.size, l2.size), np.nan)
    q = np.empty_like(W)
    mask = np.zeros(W.shape, dtype=bool)
    for i, x in enumerate(l1):
        for j, y in enumerate(l2):
            sq = np.array([x * x, y * y, 1.0 / (x * y) ** 2])
            I1 = float(sq.sum())
            I2 = float(sq[0] * sq[1] + sq[1] * sq[2] + sq[0] * sq[2])
            ev = energy_invariants(model, I1, I2)
            q[i, j] = ev.bound_value
            mask[i, j] = ev.in_domain
            if ev.in_domain:
                W[i, j] = ev.W
    return EnergySurface(l1, l2, W, q, mask)
