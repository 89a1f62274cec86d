"""Meshes on [-1, 1] with the cubic Hermite basis.

Each mesh node carries two degrees of freedom, the function value and the
physical slope, so discrete functions are globally C^1 piecewise cubics.
This module owns the reference shape functions, DOF bookkeeping with
Dirichlet/constrained flags, Gauss-Legendre quadrature on [0, 1], nodal
interpolation, and evaluation of discrete functions up to the second
derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

#: Domain endpoints; everything in this package lives on [-1, 1].
DOMAIN = (-1.0, 1.0)

#: Maximum supported Gauss point count.
MAX_GAUSS_POINTS = 16


def _frozen(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass
class Mesh:
    """Partition of [-1, 1] into intervals.

    Parameters
    ----------
    nodes : array_like
        Strictly increasing coordinates with ``nodes[0] == -1`` and
        ``nodes[-1] == 1``.  Use :func:`build_mesh` for uniform meshes.
    """

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("mesh needs at least two nodes")
        if nodes[0] != DOMAIN[0] or nodes[-1] != DOMAIN[1]:
            raise ValueError("mesh must span exactly [-1, 1]")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("mesh nodes must be strictly increasing")
        self.nodes = _frozen(nodes)
        self.h = _frozen(np.diff(nodes))
        if abs(float(np.sum(self.h)) - 2.0) > 1e-14:
            raise ValueError("element widths must sum to the domain length")

    @property
    def n_elements(self) -> int:
        return self.nodes.size - 1

    @property
    def n_nodes(self) -> int:
        return self.nodes.size

    @property
    def mesh_size(self) -> float:
        """Largest element width."""
        return float(np.max(self.h))

    def element_of(self, x):
        """Index of the element containing ``x`` (right element at nodes)."""
        idx = np.searchsorted(self.nodes, x, side="right") - 1
        return np.clip(idx, 0, self.n_elements - 1)


def build_mesh(n_elements: int) -> Mesh:
    """Uniform mesh of ``n_elements`` intervals on [-1, 1] (h = 2/n)."""
    if not isinstance(n_elements, (int, np.integer)) or n_elements < 1:
        raise ValueError(f"n_elements must be a positive integer, got {n_elements!r}")
    return Mesh(np.linspace(-1.0, 1.0, int(n_elements) + 1))


@dataclass(frozen=True)
class DofMap:
    """Global DOF layout: node i owns value DOF 2i and slope DOF 2i+1.

    The two value DOFs at the endpoints are Dirichlet DOFs (homogeneous
    boundary condition); the slope DOFs at every node, endpoints included,
    are the constrained DOFs that carry the obstacle bounds.
    """

    n_nodes: int

    def __post_init__(self):
        if self.n_nodes < 2:
            raise ValueError("DofMap needs at least two nodes")

    @property
    def n_dofs(self) -> int:
        return 2 * self.n_nodes

    def value_dof(self, node: int) -> int:
        return 2 * node

    def deriv_dof(self, node: int) -> int:
        return 2 * node + 1

    @property
    def value_dofs(self) -> np.ndarray:
        return np.arange(0, self.n_dofs, 2)

    @property
    def deriv_dofs(self) -> np.ndarray:
        return np.arange(1, self.n_dofs, 2)

    @property
    def dirichlet_dofs(self) -> np.ndarray:
        return np.array([0, self.n_dofs - 2])

    @property
    def constrained_dofs(self) -> np.ndarray:
        return self.deriv_dofs

    def node_of_dof(self, dof: int) -> int:
        return dof // 2


def _shape_matrix(xi, h, deriv_order: int) -> np.ndarray:
    """Hermite shape values at reference points, shape ``(..., 4)``.

    Local DOF order is (value_left, slope_left, value_right, slope_right).
    The slope functions carry a factor h so that global slope DOFs are
    physical derivatives; x-derivatives use the chain rule d/dx = (1/h) d/dxi.
    """
    xi = np.asarray(xi, dtype=float)
    if deriv_order == 0:
        cols = (
            1.0 - 3.0 * xi**2 + 2.0 * xi**3,
            h * (xi - 2.0 * xi**2 + xi**3),
            3.0 * xi**2 - 2.0 * xi**3,
            h * (-(xi**2) + xi**3),
        )
    elif deriv_order == 1:
        cols = (
            (-6.0 * xi + 6.0 * xi**2) / h,
            1.0 - 4.0 * xi + 3.0 * xi**2,
            (6.0 * xi - 6.0 * xi**2) / h,
            -2.0 * xi + 3.0 * xi**2,
        )
    elif deriv_order == 2:
        cols = (
            (-6.0 + 12.0 * xi) / h**2,
            (-4.0 + 6.0 * xi) / h,
            (6.0 - 12.0 * xi) / h**2,
            (-2.0 + 6.0 * xi) / h,
        )
    else:
        raise ValueError(f"deriv_order must be 0, 1 or 2, got {deriv_order!r}")
    return np.stack([np.broadcast_to(c, xi.shape) for c in cols], axis=-1)


def reference_shape(xi: float, h: float, deriv_order: int = 0) -> np.ndarray:
    """The four cubic Hermite shape functions (or derivatives) at ``xi``.

    Parameters
    ----------
    xi : float
        Reference coordinate in [0, 1].
    h : float
        Element width used to scale the slope DOFs.
    deriv_order : int
        0 for values, 1 and 2 for physical-space derivatives.

    Returns
    -------
    numpy.ndarray
        Shape ``(4,)``, ordered (value_left, slope_left, value_right,
        slope_right).
    """
    xi = float(xi)
    if not 0.0 <= xi <= 1.0:
        raise ValueError(f"reference coordinate must lie in [0, 1], got {xi}")
    if h <= 0.0:
        raise ValueError("element width must be positive")
    return _shape_matrix(np.asarray(xi), float(h), deriv_order)


@dataclass(frozen=True)
class QuadRule:
    """Quadrature points/weights on the reference element [0, 1]."""

    points: np.ndarray
    weights: np.ndarray
    order: int  # degree of exact polynomial integration

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(self.points))
        object.__setattr__(self, "weights", _frozen(self.weights))


def gauss_rule(m: int) -> QuadRule:
    """m-point Gauss-Legendre rule on [0, 1], exact to degree 2m-1."""
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= MAX_GAUSS_POINTS:
        raise ValueError(f"point count must lie in [1, {MAX_GAUSS_POINTS}], got {m!r}")
    x, w = np.polynomial.legendre.leggauss(int(m))
    return QuadRule(points=(x + 1.0) / 2.0, weights=w / 2.0, order=2 * int(m) - 1)


def split_segments(lo: float, hi: float, breakpoints: Iterable[float]) -> list[tuple[float, float]]:
    """Split [lo, hi] at the breakpoints strictly inside it.

    Breakpoints closer than ``1e-12 * (hi - lo)`` to a segment end are
    ignored; slivers that thin contribute nothing but noise to quadrature.
    """
    tol = 1e-12 * (hi - lo)
    cuts = sorted(b for b in breakpoints if lo + tol < b < hi - tol)
    edges = [lo, *cuts, hi]
    return list(zip(edges[:-1], edges[1:]))


def composite_integral(
    fn: Callable,
    lo: float = -1.0,
    hi: float = 1.0,
    breakpoints: Sequence[float] = (),
    panels: int = 64,
    quad_points: int = 10,
) -> float:
    """Composite Gauss quadrature of ``fn`` over [lo, hi].

    The interval is first split at the supplied breakpoints, then each piece
    is subdivided into panels proportional to its length (at least one), so
    discontinuities land on panel boundaries and each panel sees a smooth
    integrand.  ``fn`` must accept numpy arrays.
    """
    rule = gauss_rule(quad_points)
    total = 0.0
    for a, b in split_segments(lo, hi, breakpoints):
        n_sub = max(1, math.ceil(panels * (b - a) / (hi - lo)))
        edges = np.linspace(a, b, n_sub + 1)
        for s0, s1 in zip(edges[:-1], edges[1:]):
            xs = s0 + (s1 - s0) * rule.points
            vals = np.asarray(fn(xs), dtype=float)
            if vals.ndim == 0:
                vals = np.full_like(xs, float(vals))
            total += (s1 - s0) * float(np.dot(rule.weights, vals))
    return total


@dataclass
class DiscreteSolution:
    """Coefficient vector over all Hermite DOFs plus solve metadata."""

    coefficients: np.ndarray
    mesh: Mesh
    iterations: int = 0
    active_nodes: tuple = ()
    kkt: "KktResidual | None" = None

    def __post_init__(self):
        coeffs = np.array(self.coefficients, dtype=float)
        if coeffs.shape != (2 * self.mesh.n_nodes,):
            raise ValueError(
                f"expected {2 * self.mesh.n_nodes} coefficients, got {coeffs.shape}"
            )
        coeffs.setflags(write=False)
        self.coefficients = coeffs

    def __call__(self, x, deriv_order: int = 0):
        return evaluate(self, x, deriv_order)

    def element_coefficients(self, element: int) -> np.ndarray:
        base = 2 * int(element)
        return self.coefficients[base : base + 4]


def hermite_interpolant(g: Callable, dg: Callable, mesh: Mesh) -> DiscreteSolution:
    """Nodal Hermite interpolant: coefficients (g(x_i), g'(x_i)) per node.

    No Dirichlet zeroing is applied; callers decide whether the boundary
    values should be clamped.
    """
    coeffs = np.empty(2 * mesh.n_nodes)
    coeffs[0::2] = [float(g(x)) for x in mesh.nodes]
    coeffs[1::2] = [float(dg(x)) for x in mesh.nodes]
    return DiscreteSolution(coeffs, mesh)


def evaluate_element(sol: DiscreteSolution, element: int, xi, deriv_order: int = 0):
    """Evaluate on a single element at reference coordinates ``xi``."""
    element = int(element)
    if not 0 <= element < sol.mesh.n_elements:
        raise ValueError(f"element index out of range: {element}")
    h = float(sol.mesh.h[element])
    shapes = _shape_matrix(np.asarray(xi, dtype=float), h, deriv_order)
    out = shapes @ sol.element_coefficients(element)
    return float(out) if np.isscalar(xi) else out


def evaluate(sol: DiscreteSolution, x, deriv_order: int = 0):
    """Value (or 1st/2nd derivative) of the discrete function at ``x``.

    ``x`` may be a scalar or an array inside [-1, 1].  Values and first
    derivatives are continuous; the second derivative is double-valued at
    interior nodes and is taken from the element to the right.
    """
    scalar = np.isscalar(x) or np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if xs.size and (xs.min() < DOMAIN[0] or xs.max() > DOMAIN[1]):
        raise ValueError("evaluation point outside [-1, 1]")
    mesh = sol.mesh
    elem = np.asarray(mesh.element_of(xs), dtype=int)
    h = mesh.h[elem]
    xi = (xs - mesh.nodes[elem]) / h
    shapes = _shape_matrix(xi, h, deriv_order)
    base = 2 * elem
    idx = base[:, None] + np.arange(4)[None, :]
    vals = np.einsum("ij,ij->i", shapes, sol.coefficients[idx])
    return float(vals[0]) if scalar else vals
