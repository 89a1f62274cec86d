import numpy as np
import pytest

import hermvi as hv

from table1_reference import ACCEPTANCE_ELEMENTS


@pytest.fixture(scope="session")
def paper():
    return hv.paper_example()


@pytest.fixture(scope="session")
def solve_cache(paper):
    """Memoized benchmark solves shared across test modules."""
    cache = {}

    def solve(n):
        if n not in cache:
            cache[n] = hv.solve_problem(paper, n_elements=n)
        return cache[n]

    return solve


@pytest.fixture(scope="session")
def study(paper):
    """Convergence study over the acceptance levels (4..128 elements)."""
    return hv.run_convergence_study(paper, ACCEPTANCE_ELEMENTS)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


def random_bound_qp(rng, dim=None):
    """Random SPD bound QP with a random constrained subset."""
    if dim is None:
        dim = int(rng.integers(2, 11))
    m = rng.normal(size=(dim, dim))
    a = m @ m.T + dim * np.eye(dim)
    b = rng.normal(size=dim)
    n_con = int(rng.integers(1, dim + 1))
    cons = np.sort(rng.choice(dim, size=n_con, replace=False))
    bounds = rng.normal(size=n_con)
    return hv.BoundQp(a=a, b=b, constrained=cons, bounds=bounds)
