"""Q1/P0 plane-strain element with selective reduced integration.

The isochoric energy is integrated with 2x2 Gauss points. Each element
carries one pressure unknown ``p`` entering through the perturbed
Lagrangian ``-p (J_c - 1) - p^2 / (2 kappa)`` evaluated at the centroid,
so the element constraint reads ``J_c - 1 + p / kappa = 0``. With
``kappa = inf`` the centroid volume is preserved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from locklab.errors import DomainError, ElementInversionError
from locklab.kinematics import embed_plane, log_strain
from locklab.materials import isochoric_pk1_tangent
from locklab.fem.mesh import CENTROID, CENTROID_WEIGHT, DEVIATORIC_POINTS, DEVIATORIC_WEIGHTS, shape_gradients

N_QP = len(DEVIATORIC_POINTS)


@dataclass
class QuadratureRecords:
    """Per-element, per-quadrature-point state, arrays shaped ``(n_elements, 4, ...)``."""

    F: np.ndarray
    J: np.ndarray
    bound_value: np.ndarray
    margin: np.ndarray
    in_domain: np.ndarray
    sigma: np.ndarray
    log_strain: np.ndarray
    J_centroid: np.ndarray
    pressure: np.ndarray

    @classmethod
    def empty(cls, n_elements):
        z = np.zeros
        return cls(
            F=z((n_elements, N_QP, 3, 3)),
            J=z((n_elements, N_QP)),
            bound_value=z((n_elements, N_QP)),
            margin=z((n_elements, N_QP)),
            in_domain=np.ones((n_elements, N_QP), dtype=bool),
            sigma=z((n_elements, N_QP, 3, 3)),
            log_strain=z((n_elements, N_QP, 3, 3)),
            J_centroid=z(n_elements),
            pressure=z(n_elements),
        )

    def element_margin(self):
        return self.margin.min(axis=1)

    def isochoric_F(self):
        return self.F * (self.J ** (-1.0 / 3.0))[..., None, None]

    def max_principal_log_strain(self, isochoric=True):
        """Largest eigenvalue of ``1/2 log B`` (or ``B-bar``) at each quadrature point."""
        F = self.isochoric_F() if isochoric else self.F
        B = np.einsum("...ij,...kj->...ik", F, F)
        return 0.5 * np.log(np.linalg.eigvalsh(B)[..., -1])

    def stretch1(self):
        """Isochoric stretch of the material fiber along direction 1."""
        return np.linalg.norm(self.isochoric_F()[..., :, 0], axis=-1)


def reference_gradients(X):
    """Shape gradients w.r.t. X and ``det(dX/dxi)`` at every integration point."""
    out = []
    for xi in (*DEVIATORIC_POINTS, CENTROID):
        dN = shape_gradients(xi)
        jac = dN.T @ X
        out.append((dN @ np.linalg.inv(jac).T, float(np.linalg.det(jac))))
    return out


def _deformation(dNdX, ue):
    return embed_plane(np.eye(2) + ue.T @ dNdX)


def _gauss_kernel(dNdX, P2, A2, scale):
    f = scale * (dNdX @ P2.T)  # (4, 2): f[a, i] = P_iJ dN_a/dX_J
    K = scale * np.einsum("aJ,iJkL,bL->aibk", dNdX, A2, dNdX)
    return f, K


def volumetric_terms(F, p):
    """PK1 stress ``-p J F^-T``, its ``dP/dF`` and ``dP/dp`` at fixed pressure."""
    J = float(np.linalg.det(F))
    G = np.linalg.inv(F).T
    GG = np.einsum("ij,kl->ijkl", G, G)
    Gx = np.einsum("il,kj->ijkl", G, G)
    P = -p * J * G
    A = -p * J * (GG - Gx)
    return P, A, -J * G


def element_residual_tangent(model, X, ue, pe, kappa, mode, element=0, records=None, regularize=True):
    """Element forces and tangent blocks.

    Returns
    -------
    f : (4, 2) internal nodal forces
    K : (4, 2, 4, 2) ``df/du``
    g : (4, 2) ``df/dp`` (also the transpose coupling ``dr/du``)
    r : float, constraint residual ``-V (J_c - 1 + p/kappa)``
    kpp : float, ``dr/dp = -V/kappa``

    Raises
    ------
    ElementInversionError
        Non-positive ``J`` at any integration point.
    LockingViolation
        Guarded mode with a quadrature point outside the locking domain.
    """
    geo = reference_gradients(X)
    f = np.zeros((4, 2))
    K = np.zeros((4, 2, 4, 2))
    tau_dev = []
    for q in range(N_QP):
        dNdX, detj = geo[q]
        F = _deformation(dNdX, ue)
        J = float(np.linalg.det(F))
        if J <= 0:
            raise ElementInversionError(element, J)
        try:
            P, A, ev = isochoric_pk1_tangent(model, F, mode=mode, regularize=regularize)
        except DomainError:
            raise ElementInversionError(element, J) from None
        fq, Kq = _gauss_kernel(dNdX, P[:2, :2], A[:2, :2, :2, :2], DEVIATORIC_WEIGHTS[q] * detj)
        f += fq
        K += Kq
        if records is not None:
            records.F[element, q] = F
            records.J[element, q] = J
            records.bound_value[element, q] = ev.bound_value
            records.margin[element, q] = ev.locking_margin
            records.in_domain[element, q] = ev.in_domain
            tau_dev.append(P @ F.T)
    dNdX, detj = geo[N_QP]
    V = CENTROID_WEIGHT * detj
    Fc = _deformation(dNdX, ue)
    Jc = float(np.linalg.det(Fc))
    if Jc <= 0:
        raise ElementInversionError(element, Jc)
    P, A, dPdp = volumetric_terms(Fc, pe)
    fq, Kq = _gauss_kernel(dNdX, P[:2, :2], A[:2, :2, :2, :2], V)
    f += fq
    K += Kq
    g = V * (dNdX @ dPdp[:2, :2].T)
    inv_kappa = 0.0 if np.isinf(kappa) else 1.0 / kappa
    r = -V * (Jc - 1.0 + pe * inv_kappa)
    kpp = -V * inv_kappa
    if records is not None:
        records.J_centroid[element] = Jc
        records.pressure[element] = pe
        for q in range(N_QP):
            records.sigma[element, q] = tau_dev[q] / records.J[element, q] - pe * np.eye(3)
            records.log_strain[element, q] = log_strain(records.F[element, q])
    return f, K, g, r, kpp
