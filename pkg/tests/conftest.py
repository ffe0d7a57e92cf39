import numpy as np
import pytest

from loopcorr import bp, generate_regular, zoo


@pytest.fixture(scope="session")
def small_regular_graphs():
    """A deterministic spread of small biregular graphs."""
    return [
        generate_regular(6, 3, 6, seed=0),
        generate_regular(8, 3, 6, seed=1),
        generate_regular(8, 3, 4, seed=2),
        generate_regular(8, 3, 4, seed=3),
    ]


@pytest.fixture(scope="session")
def triple_check():
    return zoo.triple_check_graph()


def solve_uniform(g, h):
    """BP fixed point for uniform all-plus fields of magnitude h."""
    h_fields = np.full(g.n, float(h))
    res = bp.bp_solve(g, h_fields)
    assert res.converged
    return h_fields, res.messages
