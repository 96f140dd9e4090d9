"""Finite-strain kinematics on dense 3x3 matrices.

Everything here is a pure function of the deformation gradient. Arrays
stored on the returned objects are marked read-only so the objects can be
shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from locklab.errors import DomainError

DET_TOL = 1e-12

IDENTITY = np.eye(3)
IDENTITY.flags.writeable = False


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class DefGrad:
    """Deformation gradient ``F_ij = d x_i / d X_j``.

    Construction rejects ``det F <= 1e-12``.
    """

    F: np.ndarray
    J: float = field(init=False)

    def __post_init__(self):
        F = np.asarray(self.F, dtype=float)
        if F.shape == (2, 2):
            F = embed_plane(F)
        if F.shape != (3, 3):
            raise DomainError(f"deformation gradient must be 3x3, got shape {F.shape}")
        if not np.all(np.isfinite(F)):
            raise DomainError("deformation gradient has non-finite entries")
        J = float(np.linalg.det(F))
        if J <= DET_TOL:
            raise DomainError(f"det F = {J:.6g} is not positive")
        object.__setattr__(self, "F", _frozen(F))
        object.__setattr__(self, "J", J)

    @property
    def B(self):
        return self.F @ self.F.T

    @property
    def C(self):
        return self.F.T @ self.F

    @property
    def Fbar(self):
        return self.J ** (-1.0 / 3.0) * self.F

    @property
    def Bbar(self):
        return self.J ** (-2.0 / 3.0) * self.B


@dataclass(frozen=True)
class InvariantSet:
    I1: float
    I2: float
    I3: float
    J: float
    I1bar: float
    I2bar: float
    B: np.ndarray
    Bbar: np.ndarray
    C: np.ndarray
    Fbar: np.ndarray


def as_defgrad(F) -> DefGrad:
    return F if isinstance(F, DefGrad) else DefGrad(F)


def embed_plane(F2):
    """Embed an in-plane 2x2 gradient as a plane-strain 3x3 one (F33 = 1)."""
    F = np.eye(3)
    F[:2, :2] = F2
    return F


def _principal_invariants(A):
    I1 = float(np.trace(A))
    I2 = 0.5 * (I1 * I1 - float(np.trace(A @ A)))
    return I1, I2


def invariants(F) -> InvariantSet:
    """Invariants of ``C`` and the isochoric invariants of ``Bbar = Fbar Fbar^T``.

    Raises
    ------
    DomainError
        If ``det F <= 1e-12``.
    """
    d = as_defgrad(F)
    B = d.B
    Bbar = d.Bbar
    I1, I2 = _principal_invariants(B)
    I1bar, I2bar = _principal_invariants(Bbar)
    return InvariantSet(
        I1=I1,
        I2=I2,
        I3=d.J * d.J,
        J=d.J,
        I1bar=I1bar,
        I2bar=I2bar,
        B=_frozen(B),
        Bbar=_frozen(Bbar),
        C=_frozen(d.C),
        Fbar=_frozen(d.Fbar),
    )


def deviatoric(A):
    """``dev A = A - tr(A)/3 I``."""
    A = np.asarray(A, dtype=float)
    return A - np.trace(A) / 3.0 * np.eye(3)


def polar_stretch_eigen(F):
    """Principal stretches (descending) and the right principal axes.

    Returns
    -------
    stretches : ndarray, shape (3,)
        Square roots of the eigenvalues of ``C``, ``s[0] >= s[1] >= s[2]``.
    axes : ndarray, shape (3, 3)
        Column ``k`` is the Lagrangian axis of ``stretches[k]``.
    """
    d = as_defgrad(F)
    w, v = np.linalg.eigh(d.C)
    order = np.argsort(-w, kind="stable")
    w = np.clip(w[order], 0.0, None)
    v = v[:, order]
    # deterministic sign: largest-magnitude component of each axis positive
    for k in range(3):
        i = int(np.argmax(np.abs(v[:, k])))
        if v[i, k] < 0:
            v[:, k] = -v[:, k]
    return np.sqrt(w), v


def log_strain(F):
    """Spatial logarithmic strain ``1/2 log B`` via the eigen-decomposition of B."""
    d = as_defgrad(F)
    w, v = np.linalg.eigh(d.B)
    return (v * (0.5 * np.log(w))) @ v.T


# Homogeneous deformation gradients in the basis b_1, b_2, b_3.


def simple_shear(gamma):
    F = np.eye(3)
    F[0, 1] = gamma
    return F


def uniaxial(stretch):
    t = 1.0 / np.sqrt(stretch)
    return np.diag([stretch, t, t])


def equibiaxial(stretch):
    return np.diag([stretch, stretch, 1.0 / stretch**2])


def plane_strain(stretch):
    return np.diag([stretch, 1.0 / stretch, 1.0])


def isochoric_from_stretches(l1, l2):
    """Diagonal incompressible F with ``l3 = 1/(l1 l2)``."""
    return np.diag([l1, l2, 1.0 / (l1 * l2)])
