"""Bound-constrained SPD quadratic programs.

Solves min 1/2 x'Ax - b'x subject to x_i <= u_i on a subset of coordinates
with a primal-dual active set (PDAS) iteration: guess the active set, solve
the equality-constrained system, update multipliers, repeat until the set is
stable.  For SPD matrices with simple bounds this terminates finitely at the
exact minimizer.  A brute-force enumeration over candidate active sets is
provided as an independent test oracle, along with KKT residual diagnostics.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import cho_solve_banded

from .assembly import MatrixNotSpdError, SymmetricBandedMatrix

#: Refused above this many bounded coordinates (2^n candidate sets).
BRUTEFORCE_LIMIT = 20


class NonConvergenceError(Exception):
    """PDAS failed to settle; carries the last iterate for inspection."""

    def __init__(self, message, x=None, multipliers=None, active_set=(), iterations=0):
        super().__init__(message)
        self.x = x
        self.multipliers = multipliers
        self.active_set = tuple(active_set)
        self.iterations = iterations


class KktResidual(NamedTuple):
    """Violations of the four KKT conditions, computed fresh from (x, lambda)."""

    stationarity: float       # ||Ax - b + lambda||_inf
    primal_violation: float   # max(0, x_i - u_i) over bounded coordinates
    min_multiplier: float     # most negative multiplier (dual feasibility)
    complementarity: float    # max |lambda_i * (x_i - u_i)|


@dataclass
class BoundQp:
    """SPD quadratic program with upper bounds on selected coordinates.

    ``a`` may be a SymmetricBandedMatrix or a dense symmetric array; bounds
    may include +inf for coordinates that are listed but unconstrained.
    """

    a: SymmetricBandedMatrix
    b: np.ndarray
    constrained: np.ndarray
    bounds: np.ndarray

    def __post_init__(self):
        if isinstance(self.a, np.ndarray):
            self.a = SymmetricBandedMatrix.from_dense(self.a)
        self.b = np.asarray(self.b, dtype=float)
        self.constrained = np.asarray(self.constrained, dtype=int)
        self.bounds = np.asarray(self.bounds, dtype=float)
        dim = self.a.dim
        if self.b.shape != (dim,):
            raise ValueError("load vector length does not match the matrix")
        if self.constrained.size != self.bounds.size:
            raise ValueError("need exactly one bound per constrained coordinate")
        if self.constrained.size and (
            self.constrained.min() < 0 or self.constrained.max() >= dim
        ):
            raise ValueError("constrained index out of range")
        if np.any(np.isnan(self.bounds)) or np.any(self.bounds == -np.inf):
            raise ValueError("bounds must be finite or +inf")
        self.a.factor()  # fail early if not SPD

    @property
    def dim(self) -> int:
        return self.a.dim

    def objective(self, x: np.ndarray) -> float:
        return 0.5 * float(x @ self.a.matvec(x)) - float(self.b @ x)


@dataclass
class QpSolution:
    """Minimizer, multipliers (nonzero only on the active set), and counts.

    ``x`` and ``multipliers`` are long-double arrays so the stationarity
    residual of fine-mesh systems stays resolvable; cast to float for
    downstream double-precision work.
    """

    x: np.ndarray
    multipliers: np.ndarray
    active_set: tuple
    iterations: int


def _equality_step(qp: BoundQp, active: frozenset):
    """Solve with x fixed to its bound on ``active``; multipliers there.

    Returns (x, multipliers); stationarity holds on free rows by the solve
    and on fixed rows by the definition of the multiplier.
    """
    pos = {int(c): k for k, c in enumerate(qp.constrained)}
    fixed = np.array(sorted(active), dtype=int)
    free = np.setdiff1d(np.arange(qp.dim), fixed)
    x = np.zeros(qp.dim, dtype=np.longdouble)
    if fixed.size:
        x[fixed] = qp.bounds[[pos[int(i)] for i in fixed]]
    if free.size:
        factor = qp.a.submatrix(free).factor()
        # iterate in long double, refining against the full-row residual, so
        # stationarity holds beyond the quantization of a double-precision x
        for _ in range(4):
            r = qp.a.residual(x, qp.b)[free].astype(float)
            x[free] += cho_solve_banded((factor, False), r)
    multipliers = np.zeros(qp.dim, dtype=np.longdouble)
    if fixed.size:
        multipliers[fixed] = (np.asarray(qp.b, dtype=np.longdouble) - qp.a.matvec(x))[fixed]
    return x, multipliers


def solve_pdas(qp: BoundQp, c: float = 1.0, max_iter: int = 100) -> QpSolution:
    """Primal-dual active set iteration for the bound QP.

    Starts from the unconstrained solve with the violated bounds as the
    initial active set.  A coordinate i is activated when
    ``lambda_i + c * (x_i - u_i) > 0`` (ties leave the set).  Terminates when
    the active set repeats; an immediate repeat is optimality, any longer
    cycle or hitting ``max_iter`` raises :class:`NonConvergenceError`.
    """
    if c <= 0.0:
        raise ValueError("complementarity scaling c must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    x0 = qp.a.solve(qp.b)
    active = frozenset(
        int(i) for i, u in zip(qp.constrained, qp.bounds) if x0[i] > u
    )
    seen = {active}
    x, multipliers = x0, np.zeros(qp.dim)
    for it in range(1, max_iter + 1):
        x, multipliers = _equality_step(qp, active)
        updated = frozenset(
            int(i)
            for i, u in zip(qp.constrained, qp.bounds)
            if multipliers[i] + c * (x[i] - u) > 0
        )
        if updated == active:
            return QpSolution(
                x=x,
                multipliers=multipliers,
                active_set=tuple(sorted(active)),
                iterations=it,
            )
        if updated in seen:
            raise NonConvergenceError(
                "active set cycled without converging",
                x=x, multipliers=multipliers, active_set=sorted(active), iterations=it,
            )
        seen.add(updated)
        active = updated
    raise NonConvergenceError(
        f"no stable active set within {max_iter} iterations",
        x=x, multipliers=multipliers, active_set=sorted(active), iterations=max_iter,
    )


def solve_bruteforce(qp: BoundQp) -> QpSolution:
    """Enumerate candidate active sets; independent oracle for small QPs.

    Every subset of the finitely-bounded coordinates is tried as an active
    set; the equality-constrained stationary point is kept if it is primal
    and dual feasible.  Strict convexity makes the minimizer unique, so the
    feasible candidate with the lowest objective is the solution.  Uses
    dense linear algebra on purpose: a code path disjoint from the PDAS
    solver.
    """
    finite = [
        (int(i), float(u))
        for i, u in zip(qp.constrained, qp.bounds)
        if np.isfinite(u)
    ]
    if len(finite) > BRUTEFORCE_LIMIT:
        raise ValueError(
            f"{len(finite)} bounded coordinates exceed the enumeration limit "
            f"({BRUTEFORCE_LIMIT})"
        )
    a = qp.a.to_dense()
    al = a.astype(np.longdouble)
    best = None
    tried = 0
    for size in range(len(finite) + 1):
        for combo in itertools.combinations(finite, size):
            tried += 1
            fixed = np.array([i for i, _ in combo], dtype=int)
            vals = np.array([u for _, u in combo])
            free = np.setdiff1d(np.arange(qp.dim), fixed)
            x = np.zeros(qp.dim)
            if fixed.size:
                x[fixed] = vals
            if free.size:
                rhs = qp.b[free] - a[np.ix_(free, fixed)] @ x[fixed]
                xf = np.linalg.solve(a[np.ix_(free, free)], rhs)
                r = rhs.astype(np.longdouble) - al[np.ix_(free, free)] @ xf.astype(np.longdouble)
                xf = xf + np.linalg.solve(a[np.ix_(free, free)], r.astype(float))
                x[free] = xf
            multipliers = np.zeros(qp.dim)
            if fixed.size:
                multipliers[fixed] = qp.b[fixed] - a[fixed] @ x
            feasible = all(x[i] <= u + 1e-9 for i, u in finite)
            dual_ok = not fixed.size or multipliers[fixed].min() >= -1e-11
            if feasible and dual_ok:
                obj = qp.objective(x)
                if best is None or obj < best[0]:
                    best = (obj, x, multipliers, tuple(int(i) for i in fixed))
    if best is None:
        raise RuntimeError("no KKT-consistent active set found (not SPD?)")
    _, x, multipliers, active = best
    return QpSolution(x=x, multipliers=multipliers, active_set=tuple(sorted(active)), iterations=tried)


def kkt_residual(qp: BoundQp, sol: QpSolution) -> KktResidual:
    """Recompute the four KKT residuals for a candidate solution."""
    r = qp.a.matvec(sol.x) - qp.b + sol.multipliers
    stationarity = float(np.max(np.abs(r))) if r.size else 0.0
    if qp.constrained.size:
        gap = sol.x[qp.constrained] - qp.bounds
        lam = sol.multipliers[qp.constrained]
        primal = float(max(0.0, np.max(gap)))
        min_mult = float(np.min(lam))
        comp = float(np.max(np.abs(lam * gap)))
    else:
        primal, min_mult, comp = 0.0, 0.0, 0.0
    return KktResidual(stationarity, primal, min_mult, comp)
