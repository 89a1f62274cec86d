"""Assembly of the energy form, load functional, slope bounds and Dirichlet
elimination.

The energy bilinear form combines an L2 mass term with a width-scaled
bending term,

    a(v, w) = int v w dx + beta * int v'' w'' dx,

so the assembled matrix is symmetric positive definite with half-bandwidth 3
in the interleaved (value, slope) DOF ordering.  Load assembly splits any
element containing a registered data breakpoint so that each quadrature
segment sees a smooth integrand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .mesh import DofMap, Mesh, _shape_matrix, gauss_rule, split_segments

#: Half-bandwidth of the Hermite energy matrix in interleaved DOF order.
HALF_BANDWIDTH = 3

#: Default Gauss point count for assembly; exact for the degree-6 mass
#: integrands with headroom for smooth data.
DEFAULT_QUAD_POINTS = 6


class MatrixNotSpdError(Exception):
    """Raised when a Cholesky factorization of a system matrix fails."""


@dataclass
class SymmetricBandedMatrix:
    """Symmetric band matrix in LAPACK diagonal-ordered storage.

    ``data[half_bandwidth + i - j, j]`` holds entry (i, j); both triangles
    are stored so assembly round-off symmetry can be checked rather than
    assumed.
    """

    dim: int
    half_bandwidth: int
    data: np.ndarray

    @classmethod
    def zeros(cls, dim: int, half_bandwidth: int = HALF_BANDWIDTH) -> "SymmetricBandedMatrix":
        hbw = min(half_bandwidth, dim - 1)
        return cls(dim=dim, half_bandwidth=hbw, data=np.zeros((2 * hbw + 1, dim)))

    @classmethod
    def from_dense(cls, a: np.ndarray) -> "SymmetricBandedMatrix":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("expected a square matrix")
        dim = a.shape[0]
        out = cls.zeros(dim, dim - 1)
        for i in range(dim):
            for j in range(dim):
                out.data[out.half_bandwidth + i - j, j] = a[i, j]
        return out

    def get(self, i: int, j: int) -> float:
        if abs(i - j) > self.half_bandwidth:
            return 0.0
        return float(self.data[self.half_bandwidth + i - j, j])

    def add(self, i: int, j: int, value: float) -> None:
        self.data[self.half_bandwidth + i - j, j] += value

    def add_block(self, dofs: Sequence[int], block: np.ndarray) -> None:
        for a, i in enumerate(dofs):
            for b, j in enumerate(dofs):
                self.data[self.half_bandwidth + i - j, j] += block[a, b]

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        hbw = self.half_bandwidth
        for off in range(-hbw, hbw + 1):
            row = hbw + off  # stores A[j + off, j]
            j0, j1 = max(0, -off), min(self.dim, self.dim - off)
            cols = np.arange(j0, j1)
            out[cols + off, cols] = self.data[row, j0:j1]
        return out

    def symmetry_error(self) -> float:
        """max |A[i,j] - A[j,i]| over the stored band."""
        worst = 0.0
        hbw = self.half_bandwidth
        for off in range(1, hbw + 1):
            lo = self.data[hbw + off, : self.dim - off]  # A[j+off, j]
            up = self.data[hbw - off, off:]              # A[j, j+off]
            if lo.size:
                worst = max(worst, float(np.max(np.abs(lo - up))))
        return worst

    def matvec(self, x: np.ndarray) -> np.ndarray:
        """A @ x in long double.

        The bending block scales like 1/h^3, so double-precision products
        lose enough bits on fine meshes to drown KKT residuals; carrying the
        product in long double (80-bit on x86) keeps them measurable.
        """
        hbw = self.half_bandwidth
        xl = np.asarray(x, dtype=np.longdouble)
        y = np.zeros(self.dim, dtype=np.longdouble)
        for d in range(-hbw, hbw + 1):
            j0, j1 = max(0, -d), min(self.dim, self.dim - d)
            if j1 > j0:
                band = self.data[hbw + d, j0:j1].astype(np.longdouble)
                y[j0 + d : j1 + d] += band * xl[j0:j1]
        return y

    def residual(self, x: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        """rhs - A @ x in long double."""
        hbw = self.half_bandwidth
        xl = np.asarray(x, dtype=np.longdouble)
        r = np.asarray(rhs, dtype=np.longdouble).copy()
        for d in range(-hbw, hbw + 1):
            j0, j1 = max(0, -d), min(self.dim, self.dim - d)
            if j1 > j0:
                band = self.data[hbw + d, j0:j1].astype(np.longdouble)
                r[j0 + d : j1 + d] -= band * xl[j0:j1]
        return r

    def upper_band(self) -> np.ndarray:
        """Upper band in the form scipy's *h_banded solvers expect."""
        return self.data[: self.half_bandwidth + 1]

    def factor(self):
        """Banded Cholesky factor; raises MatrixNotSpdError on failure."""
        try:
            return cholesky_banded(self.upper_band(), lower=False)
        except np.linalg.LinAlgError as exc:
            raise MatrixNotSpdError(str(exc)) from exc

    def solve(self, rhs: np.ndarray, refine: int = 3) -> np.ndarray:
        """Solve A x = rhs with iterative refinement, in long double.

        The correction steps run in double precision but the iterate and its
        residual are carried in long double, so the returned solution
        satisfies the system beyond double-precision roundoff in A @ x.
        """
        factor = self.factor()
        x = cho_solve_banded((factor, False), np.asarray(rhs, dtype=float)).astype(np.longdouble)
        for _ in range(refine):
            r = self.residual(x, rhs).astype(float)
            x = x + cho_solve_banded((factor, False), r)
        return x

    def submatrix(self, keep: np.ndarray) -> "SymmetricBandedMatrix":
        """Principal submatrix on the (sorted) retained indices.

        Removing rows/columns never widens the band: retained indices that
        end up adjacent were at least as close originally, and any pair that
        was outside the band contributes an exact zero.
        """
        keep = np.asarray(keep, dtype=int)
        dim = keep.size
        hbw = min(self.half_bandwidth, max(dim - 1, 0))
        out = SymmetricBandedMatrix.zeros(dim, hbw)
        for off in range(-out.half_bandwidth, out.half_bandwidth + 1):
            j0, j1 = max(0, -off), min(dim, dim - off)
            for j in range(j0, j1):
                out.data[out.half_bandwidth + off, j] = self.get(keep[j + off], keep[j])
        return out


def assemble_energy(mesh: Mesh, beta: float, quad_points: int = DEFAULT_QUAD_POINTS) -> SymmetricBandedMatrix:
    """Assemble int v w + beta int v'' w'' over the global Hermite basis.

    No boundary conditions are applied; use :func:`apply_dirichlet` next.
    """
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta!r}")
    rule = gauss_rule(quad_points)
    a = SymmetricBandedMatrix.zeros(2 * mesh.n_nodes, HALF_BANDWIDTH)
    local = np.empty((4, 4))
    for e in range(mesh.n_elements):
        h = float(mesh.h[e])
        w = rule.weights * h
        s0 = _shape_matrix(rule.points, h, 0)
        s2 = _shape_matrix(rule.points, h, 2)
        # fill by symmetric pairs so the band is exactly symmetric
        for i in range(4):
            for j in range(i, 4):
                v = float(np.dot(w, s0[:, i] * s0[:, j]) + beta * np.dot(w, s2[:, i] * s2[:, j]))
                local[i, j] = v
                local[j, i] = v
        a.add_block(range(2 * e, 2 * e + 4), local)
    return a


def assemble_load(
    mesh: Mesh,
    y_d: Callable,
    f: Callable,
    beta: float,
    breakpoints: Sequence[float] = (),
    quad_points: int = DEFAULT_QUAD_POINTS,
) -> np.ndarray:
    """Assemble b[i] = int y_d phi_i dx - beta int f phi_i'' dx.

    Elements containing a registered breakpoint of the data are integrated
    piecewise so kinks or jumps never sit inside a Gauss panel.
    """
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta!r}")
    rule = gauss_rule(quad_points)
    b = np.zeros(2 * mesh.n_nodes)
    for e in range(mesh.n_elements):
        x0, x1 = float(mesh.nodes[e]), float(mesh.nodes[e + 1])
        h = x1 - x0
        dofs = slice(2 * e, 2 * e + 4)
        for s0x, s1x in split_segments(x0, x1, breakpoints):
            xs = s0x + (s1x - s0x) * rule.points
            xi = (xs - x0) / h
            ws = rule.weights * (s1x - s0x)
            sv = _shape_matrix(xi, h, 0)
            sdd = _shape_matrix(xi, h, 2)
            yv = np.asarray(y_d(xs), dtype=float)
            fv = np.asarray(f(xs), dtype=float)
            b[dofs] += sv.T @ (ws * yv) - beta * (sdd.T @ (ws * fv))
    return b


def constraint_bounds(mesh: Mesh, psi: Callable) -> np.ndarray:
    """Upper bound for the slope DOF at each node: psi evaluated there."""
    return np.array([float(psi(x)) for x in mesh.nodes])


@dataclass
class AssembledSystem:
    """Energy matrix and load after Dirichlet elimination.

    ``retained`` maps reduced indices back to full DOF indices;
    ``constrained`` are the reduced indices of the slope DOFs, aligned with
    ``bounds`` (one entry per mesh node).
    """

    a: SymmetricBandedMatrix
    b: np.ndarray
    dof_map: DofMap
    retained: np.ndarray
    full_to_reduced: np.ndarray
    constrained: np.ndarray
    bounds: np.ndarray | None = None

    def embed(self, x_reduced: np.ndarray) -> np.ndarray:
        """Expand a reduced vector to all DOFs, zeros at Dirichlet DOFs."""
        full = np.zeros(self.dof_map.n_dofs)
        full[self.retained] = x_reduced
        return full

    def to_qp(self):
        from .qp import BoundQp

        if self.bounds is None:
            raise ValueError("system has no slope bounds attached")
        return BoundQp(a=self.a, b=self.b, constrained=self.constrained, bounds=self.bounds)


def apply_dirichlet(
    a: SymmetricBandedMatrix,
    b: np.ndarray,
    dof_map: DofMap,
    bounds: np.ndarray | None = None,
) -> AssembledSystem:
    """Eliminate the endpoint value DOFs (homogeneous boundary data).

    Rows and columns are dropped; with zero boundary values there is no
    right-hand-side correction.  The returned index maps let solutions be
    re-embedded with zeros.
    """
    n_dofs = dof_map.n_dofs
    if a.dim != n_dofs or len(b) != n_dofs:
        raise ValueError("system size does not match the DOF map")
    retained = np.setdiff1d(np.arange(n_dofs), dof_map.dirichlet_dofs)
    full_to_reduced = np.full(n_dofs, -1, dtype=int)
    full_to_reduced[retained] = np.arange(retained.size)
    constrained = full_to_reduced[dof_map.constrained_dofs]
    if np.any(constrained < 0):
        raise ValueError("constrained DOFs overlap Dirichlet DOFs")
    bounds_arr = None if bounds is None else np.asarray(bounds, dtype=float)
    if bounds_arr is not None and bounds_arr.shape != (dof_map.n_nodes,):
        raise ValueError("expected one bound per node")
    return AssembledSystem(
        a=a.submatrix(retained),
        b=np.asarray(b, dtype=float)[retained],
        dof_map=dof_map,
        retained=retained,
        full_to_reduced=full_to_reduced,
        constrained=constrained,
        bounds=bounds_arr,
    )
