"""Strain-locking stored-energy functions and incompressible stress evaluation.

Three isotropic models are provided, all written in terms of the isochoric
invariants of ``Bbar``:

* Gent:        ``W = -mu0/2 * a * ln(1 - (I1bar - 3)/a)``, bounded by ``I1bar < 3 + a``
* Kilian (Van der Waals):
                ``W = -mu0 * {(a^2-3)[ln(1-eta) + eta] - 2/3 alpha ((It-3)/2)^(3/2)}``
                with ``eta = sqrt((It-3)/(a^2-3))`` and ``It = (1-f) I1bar + f I2bar``,
                bounded by ``It < a^2``
* neo-Hookean: ``W = mu0/2 * (I1bar - 3)``, the ``a -> inf`` limit of both.

Models are evaluated *raw*: past the locking bound the energy is NaN but
the derivative formulas are still evaluated wherever they are real. Guarded
callers turn an out-of-domain evaluation into :class:`LockingViolation`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from locklab.errors import (
    DomainError,
    EvaluationError,
    LockingViolation,
    ParameterError,
    SingularTangentError,
)
from locklab.kinematics import as_defgrad, deviatoric, invariants

# Offset applied to I1bar inside the tangent only (Kilian natural state).
TANGENT_EPS = 1e-8
INCOMPRESSIBLE_TOL = 1e-8


class ModelKind(str, Enum):
    KILIAN = "kilian"
    GENT = "gent"
    NEO_HOOKEAN = "neo-hookean"


class LockingMode(str, Enum):
    GUARDED = "guarded"
    UNGUARDED = "unguarded"


def _mode(mode):
    return LockingMode(mode)


@dataclass(frozen=True)
class MaterialModel:
    """Parameters of one of the three strain-locking models.

    ``mu0`` is the initial shear modulus; ``a`` the locking parameter
    (Gent: ``I1bar < 3 + a``; Kilian: ``It < a**2``). ``alpha`` and ``f``
    only apply to Kilian.
    """

    kind: ModelKind
    mu0: float = 1.0
    a: float | None = None
    alpha: float = 0.0
    f: float = 0.0

    def __post_init__(self):
        try:
            kind = ModelKind(self.kind)
        except ValueError:
            raise ParameterError(f"unknown model kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        if not (math.isfinite(self.mu0) and self.mu0 > 0):
            raise ParameterError("mu0 must be positive")
        if kind is ModelKind.NEO_HOOKEAN:
            if self.a is not None or self.alpha != 0.0 or self.f != 0.0:
                raise ParameterError("neo-Hookean takes no a, alpha or f")
            return
        if self.a is None or not math.isfinite(self.a):
            raise ParameterError(f"{kind.value} requires a finite locking parameter a")
        object.__setattr__(self, "a", float(self.a))
        if kind is ModelKind.GENT:
            if self.a <= 0:
                raise ParameterError("Gent requires a > 0")
            if self.alpha != 0.0 or self.f != 0.0:
                raise ParameterError("Gent takes no alpha or f")
        else:
            if self.a <= math.sqrt(3.0):
                raise ParameterError("Kilian requires a > sqrt(3)")
            if not 0.0 <= self.f <= 1.0:
                raise ParameterError("Kilian mixing weight f must lie in [0, 1]")

    @classmethod
    def kilian(cls, a, mu0=1.0, alpha=0.0, f=0.0):
        return cls(ModelKind.KILIAN, mu0=mu0, a=a, alpha=alpha, f=f)

    @classmethod
    def gent(cls, a, mu0=1.0):
        return cls(ModelKind.GENT, mu0=mu0, a=a)

    @classmethod
    def neo_hookean(cls, mu0=1.0):
        return cls(ModelKind.NEO_HOOKEAN, mu0=mu0)

    @property
    def label(self):
        if self.kind is ModelKind.NEO_HOOKEAN:
            return "neo-hookean"
        return f"{self.kind.value}(a={self.a:g})"

    def bounding_value(self, I1bar, I2bar=3.0):
        """The invariant compared against :func:`locking_limit`."""
        if self.kind is ModelKind.KILIAN:
            return (1.0 - self.f) * I1bar + self.f * I2bar
        return I1bar


@dataclass(frozen=True)
class EnergyEval:
    W: float
    dW_dI1: float
    dW_dI2: float
    d2W_dI1I1: float
    d2W_dI1I2: float
    d2W_dI2I2: float
    bound_value: float
    locking_margin: float
    in_domain: bool


@dataclass(frozen=True)
class StressState:
    cauchy: np.ndarray
    kirchhoff: np.ndarray
    pk1: np.ndarray
    pk2: np.ndarray
    pressure: float


def locking_limit(model: MaterialModel):
    """Return ``(quantity, limit)``; neo-Hookean is unbounded (``inf``)."""
    if model.kind is ModelKind.GENT:
        return "I1bar", 3.0 + model.a
    if model.kind is ModelKind.KILIAN:
        return "Itilde", model.a**2
    return "I1bar", math.inf


def _log1p_plus(eta):
    """``ln(1 - eta) + eta`` without cancellation for small ``eta``."""
    if eta < 1e-4:
        return -sum(eta**k / k for k in range(2, 9))
    return math.log1p(-eta) + eta


def _kilian_scalar(model, It):
    """Energy and derivatives of the Kilian model with respect to ``It``."""
    mu0, alpha = model.mu0, model.alpha
    A = model.a**2 - 3.0
    t = max(It - 3.0, 0.0)
    eta = math.sqrt(t / A)
    if eta == 1.0:
        raise EvaluationError("Kilian derivative evaluated at the locking pole")
    inter = (t / 2.0) ** 1.5 if alpha else 0.0
    if eta < 1.0:
        W = -mu0 * (A * _log1p_plus(eta) - 2.0 / 3.0 * alpha * inter)
    else:
        W = math.nan
    d1 = mu0 / (2.0 * (1.0 - eta))
    if alpha:
        d1 += 0.5 * mu0 * alpha * math.sqrt(t / 2.0)
    if eta == 0.0:
        d2 = math.inf
    else:
        d2 = mu0 / (4.0 * (1.0 - eta) ** 2 * eta * A)
        if alpha:
            d2 += mu0 * alpha / (8.0 * math.sqrt(t / 2.0))
    return W, d1, d2


def energy_invariants(model: MaterialModel, I1bar, I2bar=3.0) -> EnergyEval:
    """Raw energy evaluation at given isochoric invariants."""
    I1bar = float(I1bar)
    I2bar = float(I2bar)
    q = model.bounding_value(I1bar, I2bar)
    _, limit = locking_limit(model)
    margin = limit - q
    in_domain = margin > 0
    kind = model.kind
    if kind is ModelKind.NEO_HOOKEAN:
        mu0 = model.mu0
        return EnergyEval(0.5 * mu0 * (I1bar - 3.0), 0.5 * mu0, 0.0, 0.0, 0.0, 0.0, q, margin, True)
    if kind is ModelKind.GENT:
        mu0, a = model.mu0, model.a
        x = I1bar - 3.0
        if a - x == 0.0:
            raise EvaluationError("Gent derivative evaluated at the locking pole")
        W = -0.5 * mu0 * a * math.log1p(-x / a) if in_domain else math.nan
        d1 = 0.5 * mu0 * a / (a - x)
        d2 = 0.5 * mu0 * a / (a - x) ** 2
        return EnergyEval(W, d1, 0.0, d2, 0.0, 0.0, q, margin, in_domain)
    W, d1, d2 = _kilian_scalar(model, q)
    f = model.f
    return EnergyEval(
        W,
        (1.0 - f) * d1,
        f * d1,
        (1.0 - f) ** 2 * d2,
        f * (1.0 - f) * d2 if f else 0.0,
        f * f * d2 if f else 0.0,
        q,
        margin,
        in_domain,
    )


def energy(model: MaterialModel, inv) -> EnergyEval:
    """Energy and invariant derivatives for an :class:`InvariantSet` (or F)."""
    if not hasattr(inv, "I1bar"):
        inv = invariants(inv)
    return energy_invariants(model, inv.I1bar, inv.I2bar)


def guard(ev: EnergyEval, mode) -> EnergyEval:
    if _mode(mode) is LockingMode.GUARDED and not ev.in_domain:
        raise LockingViolation(ev.locking_margin)
    return ev


def deviatoric_kirchhoff(model, inv, ev):
    """``s = 2(W1 + I1bar W2) dev Bbar - 2 W2 dev(Bbar^2)``."""
    Bb = np.asarray(inv.Bbar)
    s = 2.0 * (ev.dW_dI1 + inv.I1bar * ev.dW_dI2) * deviatoric(Bb)
    if ev.dW_dI2:
        s = s - 2.0 * ev.dW_dI2 * deviatoric(Bb @ Bb)
    return s


def cauchy_stress_general(model: MaterialModel, F, p=0.0, mode=LockingMode.GUARDED) -> StressState:
    """Stress of the incompressible material at ``F`` for a given pressure ``p``.

    ``tau = -p I + s`` and the remaining measures follow from
    ``tau = J sigma = S F^T = F T F^T``.

    Raises
    ------
    DomainError
        If ``|det F - 1| > 1e-8``.
    LockingViolation
        In guarded mode outside the locking domain.
    """
    d = as_defgrad(F)
    if abs(d.J - 1.0) > INCOMPRESSIBLE_TOL:
        raise DomainError(f"incompressible evaluation needs det F = 1, got {d.J:.12g}")
    inv = invariants(d)
    ev = guard(energy(model, inv), mode)
    s = deviatoric_kirchhoff(model, inv, ev)
    tau = s - p * np.eye(3)
    Finv = np.linalg.inv(d.F)
    S = tau @ Finv.T
    T = Finv @ S
    return StressState(cauchy=tau / d.J, kirchhoff=tau, pk1=S, pk2=T, pressure=float(p))


def _tangent_second_derivative(model, I1bar, mode, regularize):
    if regularize and model.kind is ModelKind.KILIAN:
        d2 = energy_invariants(model, max(I1bar, 3.0 + TANGENT_EPS)).d2W_dI1I1
    else:
        d2 = energy_invariants(model, I1bar).d2W_dI1I1
    if not math.isfinite(d2):
        raise SingularTangentError(f"d2W/dI1^2 is singular at I1bar = {I1bar:.12g}")
    return d2


def _require_I1_only(model):
    if model.kind is ModelKind.KILIAN and model.f != 0.0:
        raise ParameterError("tangent is only available for I1bar-only energies (f = 0)")


def diamond(A, B):
    """``(A <> B)_ijkl = 1/2 (A_ik B_jl + A_il B_jk)``."""
    return 0.5 * (np.einsum("ik,jl->ijkl", A, B) + np.einsum("il,jk->ijkl", A, B))


def tangent_tensor(model: MaterialModel, F, mode=LockingMode.GUARDED, regularize=True):
    """Spatial tangent of the Jaumann rate of ``s`` with respect to ``dev D``.

    ``c_d = 4 U'' Bb(x)Bb - 4/3 (U' + I1bar U'') (I(x)Bb + Bb(x)I) + 2 U' (I<>Bb + Bb<>I)``
    for ``W = U(I1bar)``. With ``regularize`` the Kilian second derivative is
    taken at ``max(I1bar, 3 + 1e-8)``; without it the natural state raises
    :class:`SingularTangentError`.
    """
    _require_I1_only(model)
    inv = invariants(F)
    ev = guard(energy(model, inv), mode)
    d1 = ev.dW_dI1
    d2 = _tangent_second_derivative(model, inv.I1bar, mode, regularize)
    Bb = np.asarray(inv.Bbar)
    I = np.eye(3)
    return (
        4.0 * d2 * np.einsum("ij,kl->ijkl", Bb, Bb)
        - 4.0 / 3.0 * (d1 + inv.I1bar * d2) * (np.einsum("ij,kl->ijkl", I, Bb) + np.einsum("ij,kl->ijkl", Bb, I))
        + 2.0 * d1 * (diamond(I, Bb) + diamond(Bb, I))
    )


def isochoric_pk1_tangent(model: MaterialModel, F, mode=LockingMode.GUARDED, regularize=True):
    """First Piola-Kirchhoff stress of ``U(I1bar(F))`` and ``dP/dF``.

    Valid for any ``det F > 0``; this is the deviatoric part of the
    near-incompressible finite-element formulation.

    Returns
    -------
    P : ndarray (3, 3)
    A : ndarray (3, 3, 3, 3)
        ``A[i, J, k, L] = dP_iJ / dF_kL``.
    ev : EnergyEval
    """
    _require_I1_only(model)
    d = as_defgrad(F)
    F = np.asarray(d.F)
    G = np.linalg.inv(F).T
    c = d.J ** (-2.0 / 3.0)
    I1 = float(np.sum(F * F))
    I1bar = c * I1
    ev = guard(energy_invariants(model, I1bar), mode)
    d1 = ev.dW_dI1
    d2 = _tangent_second_derivative(model, I1bar, mode, regularize)
    g = c * (2.0 * F - 2.0 / 3.0 * I1 * G)
    I = np.eye(3)
    H = (
        -2.0 / 3.0 * np.einsum("kl,ij->ijkl", G, g)
        + c
        * (
            2.0 * np.einsum("ik,jl->ijkl", I, I)
            - 4.0 / 3.0 * np.einsum("kl,ij->ijkl", F, G)
            + 2.0 / 3.0 * I1 * np.einsum("il,kj->ijkl", G, G)
        )
    )
    P = d1 * g
    A = d2 * np.einsum("ij,kl->ijkl", g, g) + d1 * H
    return P, A, ev


@dataclass(frozen=True)
class LimitReport:
    a_values: tuple
    errors: tuple
    rates: tuple
    decreasing: bool


def neo_hookean_limit_check(model_family, a_sequence, I1bar_values=(4.0,), mu0=1.0) -> LimitReport:
    """How fast a locking model approaches neo-Hookean as ``a`` grows.

    ``errors[k]`` is ``max |W_a - W_NH|`` over ``I1bar_values``; ``rates``
    are the log-log slopes between successive ``a`` values.
    """
    family = ModelKind(model_family)
    nh = MaterialModel.neo_hookean(mu0)
    a_values = tuple(float(a) for a in a_sequence)
    errors = []
    for a in a_values:
        m = nh if family is ModelKind.NEO_HOOKEAN else MaterialModel(family, mu0=mu0, a=a)
        errors.append(
            max(abs(energy_invariants(m, I).W - energy_invariants(nh, I).W) for I in I1bar_values)
        )
    rates = []
    for k in range(1, len(a_values)):
        e0, e1 = errors[k - 1], errors[k]
        if e0 > 0 and e1 > 0:
            rates.append(math.log(e1 / e0) / math.log(a_values[k] / a_values[k - 1]))
        else:
            rates.append(math.nan)
    decreasing = all(errors[k] <= errors[k - 1] for k in range(1, len(errors)))
    return LimitReport(a_values, tuple(errors), tuple(rates), decreasing)
