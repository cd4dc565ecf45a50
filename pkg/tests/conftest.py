import numpy as np
import pytest

from w1flow import simplex
from w1flow.network import build_network
from w1flow.spanner import build_split_tree, build_wspd


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger kernel compilation once so timed tests measure runtime only."""
    net = build_network([2, -2], [0, 1], [1, 0], [1.0, 1.0])
    simplex.solve(net, collect_objectives=True)
    simplex.solve(net, pivot_rule="dantzig")
    simplex.find_entering_arc(net, np.zeros(2))
    tree = build_split_tree(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 0.5]]))
    build_wspd(tree, 4.0)
