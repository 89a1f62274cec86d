"""Error norms against exact solutions, observed convergence rates, and
table rendering (markdown or CSV)."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .mesh import DiscreteSolution, _shape_matrix, evaluate, gauss_rule, split_segments
from .problems import ProblemSpec
from .qp import KktResidual
from .solver import solve_problem

#: Gauss points per (split) element segment for the integrated norms.
NORM_QUAD_POINTS = 8

#: Equispaced sample intervals per element for the max-norm scan.
LINF_SAMPLES_PER_ELEMENT = 1000


@dataclass
class ErrorReport:
    """Error norms of one discrete solve against the exact state."""

    n_elements: int
    h: float
    l2: float
    linf: float
    h1: float
    h2: float
    control_l2: float
    qp_iterations: int = 0
    kkt: KktResidual | None = None

    NORM_FIELDS = ("l2", "linf", "h1", "h2", "control_l2")


def _norm_pass(sol: DiscreteSolution, spec: ProblemSpec, quad_points: int):
    """One quadrature sweep accumulating all squared error norms."""
    ex = spec.exact
    rule = gauss_rule(quad_points)
    mesh = sol.mesh
    bps = tuple(sorted(set(spec.breakpoints) | set(ex.breakpoints)))
    sq = np.zeros(4)  # l2, h1, h2, control
    for e in range(mesh.n_elements):
        x0, x1 = float(mesh.nodes[e]), float(mesh.nodes[e + 1])
        h = x1 - x0
        ce = sol.element_coefficients(e)
        for s0, s1 in split_segments(x0, x1, bps):
            xs = s0 + (s1 - s0) * rule.points
            xi = (xs - x0) / h
            ws = rule.weights * (s1 - s0)
            d0 = _shape_matrix(xi, h, 0) @ ce - ex.y_bar(xs)
            d1 = _shape_matrix(xi, h, 1) @ ce - ex.p(xs)
            y2h = _shape_matrix(xi, h, 2) @ ce
            d2 = y2h - ex.p_prime(xs)
            fu = np.asarray(spec.f(xs), dtype=float)
            du = -(y2h + fu) - ex.u_bar(xs)
            sq[0] += float(np.dot(ws, d0 * d0))
            sq[1] += float(np.dot(ws, d1 * d1))
            sq[2] += float(np.dot(ws, d2 * d2))
            sq[3] += float(np.dot(ws, du * du))
    return np.sqrt(sq)


def error_norms(
    sol: DiscreteSolution,
    spec: ProblemSpec,
    samples_per_element: int = LINF_SAMPLES_PER_ELEMENT,
    quad_points: int = NORM_QUAD_POINTS,
) -> ErrorReport:
    """L2/max/H1/H2 errors of the state plus the L2 control error.

    Integrated norms use per-element Gauss quadrature split at the data
    breakpoints; the max norm scans a dense equispaced grid (element
    endpoints included).
    """
    if spec.exact is None:
        raise ValueError("problem has no exact solution bundle")
    l2, h1, h2, control = _norm_pass(sol, spec, quad_points)
    mesh = sol.mesh
    offsets = np.linspace(0.0, 1.0, samples_per_element + 1)
    xs = (mesh.nodes[:-1, None] + mesh.h[:, None] * offsets[None, :]).ravel()
    linf = float(np.max(np.abs(evaluate(sol, xs, 0) - spec.exact.y_bar(xs))))
    return ErrorReport(
        n_elements=mesh.n_elements,
        h=mesh.mesh_size,
        l2=float(l2),
        linf=linf,
        h1=float(h1),
        h2=float(h2),
        control_l2=float(control),
        qp_iterations=sol.iterations,
        kkt=sol.kkt,
    )


def control_error(sol: DiscreteSolution, spec: ProblemSpec, quad_points: int = NORM_QUAD_POINTS) -> float:
    """L2 distance between -(y_h'' + f) and the exact control.

    Computed in the same quadrature pass as the H2 seminorm error, to which
    it is algebraically identical.
    """
    if spec.exact is None:
        raise ValueError("problem has no exact solution bundle")
    return float(_norm_pass(sol, spec, quad_points)[3])


@dataclass
class ConvergenceReport:
    """Ordered error reports plus per-norm observed rates between levels."""

    reports: list
    rates: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rates = {
            name: [
                math.log(getattr(a, name) / getattr(b, name)) / math.log(a.h / b.h)
                for a, b in zip(self.reports[:-1], self.reports[1:])
            ]
            for name in ErrorReport.NORM_FIELDS
        }


def convergence_rates(reports: Sequence[ErrorReport]) -> ConvergenceReport:
    """Rates log(e_k / e_{k+1}) / log(h_k / h_{k+1}) between levels."""
    reports = list(reports)
    if len(reports) < 2:
        raise ValueError("need at least two levels to compute rates")
    hs = [r.h for r in reports]
    if any(b >= a for a, b in zip(hs[:-1], hs[1:])):
        raise ValueError("levels must be strictly refining (h decreasing)")
    return ConvergenceReport(reports=reports)


def run_convergence_study(
    spec: ProblemSpec,
    element_counts: Sequence[int],
    quad_points: int = 6,
    max_iter: int = 100,
    samples_per_element: int = LINF_SAMPLES_PER_ELEMENT,
) -> ConvergenceReport:
    """Solve each level and collect error norms and rates."""
    reports = []
    for n in element_counts:
        result = solve_problem(spec, n_elements=int(n), quad_points=quad_points, max_iter=max_iter)
        reports.append(error_norms(result.solution, spec, samples_per_element=samples_per_element))
    return convergence_rates(reports)


_COLUMNS = (
    ("nodes", None),
    ("L2", "l2"),
    ("Linf", "linf"),
    ("H1", "h1"),
    ("H2", "h2"),
    ("control_L2", "control_l2"),
)


def _table_cells(report: ConvergenceReport) -> tuple[list, list]:
    header = [name for name, _ in _COLUMNS]
    header += [f"rate_{name}" for name, attr in _COLUMNS if attr]
    rows = []
    for k, rep in enumerate(report.reports):
        row = [str(rep.n_elements + 1)]
        row += [f"{getattr(rep, attr):.6e}" for _, attr in _COLUMNS[1:]]
        for _, attr in _COLUMNS[1:]:
            row.append(f"{report.rates[attr][k - 1]:.2f}" if k > 0 else "")
        rows.append(row)
    return header, rows


def render_report(report: ConvergenceReport, format: str = "markdown") -> str:
    """Render the study as a GitHub pipe table or CSV text.

    The mesh column lists the node count of each level; norms use
    scientific notation with six decimals.
    """
    header, rows = _table_cells(report)
    if format in ("markdown", "md"):
        widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
                  for i, h in enumerate(header)]
        def fmt(cells):
            return "| " + " | ".join(c.ljust(w) for c, w in zip(cells, widths)) + " |"
        lines = [fmt(header), "|" + "|".join("-" * (w + 2) for w in widths) + "|"]
        lines += [fmt(r) for r in rows]
        return "\n".join(lines) + "\n"
    if format == "csv":
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for r in rows:
            buf.write(",".join(r) + "\n")
        return buf.getvalue()
    raise ValueError(f"unknown report format {format!r} (expected markdown or csv)")
