"""Plane-strain quadrilateral meshes and boundary conditions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from locklab.errors import ParameterError

GAUSS = 1.0 / np.sqrt(3.0)
# counter-clockwise reference corners
CORNERS = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
DEVIATORIC_POINTS = CORNERS * GAUSS
DEVIATORIC_WEIGHTS = np.ones(4)
CENTROID = np.zeros(2)
CENTROID_WEIGHT = 4.0


def shape_gradients(xi):
    """``dN_a/dxi_j`` of the bilinear shape functions, shape (4, 2)."""
    x, e = xi
    return 0.25 * np.column_stack(
        [CORNERS[:, 0] * (1.0 + CORNERS[:, 1] * e), CORNERS[:, 1] * (1.0 + CORNERS[:, 0] * x)]
    )


def shape_values(xi):
    x, e = xi
    return 0.25 * (1.0 + CORNERS[:, 0] * x) * (1.0 + CORNERS[:, 1] * e)


@dataclass(frozen=True)
class Mesh2D:
    """Q1 mesh in the reference configuration.

    Each element carries one constant pressure; ``pressure_dof[e] == e``.
    """

    nodes: np.ndarray
    elements: np.ndarray

    def __post_init__(self):
        nodes = np.array(self.nodes, dtype=float)
        elements = np.array(self.elements, dtype=int)
        if nodes.ndim != 2 or nodes.shape[1] != 2:
            raise ParameterError("nodes must have shape (n, 2)")
        if elements.ndim != 2 or elements.shape[1] != 4:
            raise ParameterError("elements must have shape (m, 4)")
        if elements.min() < 0 or elements.max() >= len(nodes):
            raise ParameterError("connectivity references a missing node")
        nodes.flags.writeable = False
        elements.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "elements", elements)
        for e in range(len(elements)):
            X = nodes[elements[e]]
            for xi in np.vstack([DEVIATORIC_POINTS, CENTROID]):
                if np.linalg.det(shape_gradients(xi).T @ X) <= 0:
                    raise ParameterError(f"element {e} has a non-positive reference Jacobian")

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_elements(self):
        return len(self.elements)

    @property
    def n_dofs(self):
        return 2 * self.n_nodes

    @property
    def pressure_dof(self):
        return np.arange(self.n_elements)

    def nodes_where(self, x=None, y=None, tol=1e-12):
        sel = np.ones(self.n_nodes, dtype=bool)
        if x is not None:
            sel &= np.abs(self.nodes[:, 0] - x) <= tol
        if y is not None:
            sel &= np.abs(self.nodes[:, 1] - y) <= tol
        return tuple(int(i) for i in np.flatnonzero(sel))

    def boundary_edges(self, x=None, y=None, tol=1e-12):
        """Element edges whose two end nodes both satisfy the coordinate filter."""
        on = set(self.nodes_where(x=x, y=y, tol=tol))
        edges = []
        for conn in self.elements:
            for k in range(4):
                a, b = int(conn[k]), int(conn[(k + 1) % 4])
                if a in on and b in on:
                    edges.append((a, b))
        return tuple(edges)


def rectangle(nx, ny, lx=1.0, ly=1.0):
    """Structured ``nx`` x ``ny`` mesh of ``[0, lx] x [0, ly]``."""
    xs = np.linspace(0.0, lx, nx + 1)
    ys = np.linspace(0.0, ly, ny + 1)
    nodes = np.array([[x, y] for y in ys for x in xs])
    elements = []
    for j in range(ny):
        for i in range(nx):
            n0 = j * (nx + 1) + i
            elements.append([n0, n0 + 1, n0 + nx + 2, n0 + nx + 1])
    return Mesh2D(nodes, np.array(elements))


@dataclass(frozen=True)
class PrescribedDisplacement:
    """``u[node, component] = load_factor * value`` on every listed node."""

    nodes: tuple
    component: int
    value: float = 0.0

    def __post_init__(self):
        if self.component not in (0, 1):
            raise ParameterError("displacement component must be 0 or 1")
        object.__setattr__(self, "nodes", tuple(int(n) for n in self.nodes))


@dataclass(frozen=True)
class NominalTraction:
    """Dead load: force per unit reference length, ramped with the load factor.

    ``direction`` defaults to the outward reference normal of each edge.
    """

    edges: tuple
    magnitude: float
    direction: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))
        if self.direction is not None:
            d = np.asarray(self.direction, dtype=float)
            object.__setattr__(self, "direction", tuple(d / np.linalg.norm(d)))


def prescribed_dofs(mesh, bcs):
    """``{dof: full-load value}``; a DOF may appear in at most one BC."""
    out = {}
    for bc in bcs:
        if not isinstance(bc, PrescribedDisplacement):
            continue
        for n in bc.nodes:
            dof = 2 * n + bc.component
            if dof in out:
                raise ParameterError(f"dof {dof} is constrained twice")
            out[dof] = float(bc.value)
    return out


def dead_load_vector(mesh, bcs):
    """Consistent nodal forces of all dead loads at unit load factor."""
    f = np.zeros(mesh.n_dofs)
    for bc in bcs:
        if not isinstance(bc, NominalTraction):
            continue
        for a, b in bc.edges:
            Xa, Xb = mesh.nodes[a], mesh.nodes[b]
            t = Xb - Xa
            length = float(np.hypot(*t))
            if bc.direction is None:
                # ccw element boundary: outward normal is the tangent rotated clockwise
                d = np.array([t[1], -t[0]]) / length
            else:
                d = np.asarray(bc.direction)
            for n in (a, b):
                f[2 * n : 2 * n + 2] += 0.5 * bc.magnitude * length * d
    return f
