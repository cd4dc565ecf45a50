import math

import numpy as np
import pytest

from helpers import random_diagram
from w1flow.diagram import PersistenceDiagram, diagonal_distances, zero_condense
from w1flow.oracle import (
    OracleSizeError,
    dense_network,
    exact_w1_bruteforce,
    exact_w1_dense,
)

SQRT2 = math.sqrt(2.0)


class TestBruteForce:
    def test_identical(self):
        d = PersistenceDiagram([(0, 2), (1, 3)])
        assert exact_w1_bruteforce(d, d) == 0.0

    def test_forced_diagonal(self):
        assert exact_w1_bruteforce(
            PersistenceDiagram([(0, 2)]), PersistenceDiagram()
        ) == pytest.approx(SQRT2, abs=1e-12)

    def test_partial_matching_example(self):
        value = exact_w1_bruteforce(
            PersistenceDiagram([(0, 2), (0, 4)]), PersistenceDiagram([(0, 3)])
        )
        assert value == pytest.approx(1 + SQRT2, abs=1e-12)

    def test_size_guard(self):
        big = PersistenceDiagram([(0, i + 1.0) for i in range(13)])
        with pytest.raises(OracleSizeError):
            exact_w1_bruteforce(big, PersistenceDiagram())


class TestDense:
    def test_two_points(self):
        assert exact_w1_dense(
            PersistenceDiagram([(0, 2)]), PersistenceDiagram([(0, 3)])
        ) == pytest.approx(1.0, abs=1e-12)

    def test_one_empty_side_pays_all_diagonals(self):
        rng = np.random.default_rng(127)
        d = random_diagram(rng, max_points=10, min_points=1)
        expected = float(diagonal_distances(d.points).sum())
        assert exact_w1_dense(d, PersistenceDiagram()) == pytest.approx(
            expected, abs=1e-9
        )
        assert exact_w1_dense(PersistenceDiagram(), d) == pytest.approx(
            expected, abs=1e-9
        )

    def test_agrees_with_bruteforce(self):
        rng = np.random.default_rng(131)
        for _ in range(150):
            a = random_diagram(rng, max_points=6)
            b = random_diagram(rng, max_points=6)
            assert exact_w1_dense(a, b) == pytest.approx(
                exact_w1_bruteforce(a, b), abs=1e-9
            )

    def test_dual_membership_nodes_handled(self):
        a = PersistenceDiagram([(0, 2), (1, 4)])
        b = PersistenceDiagram([(0, 2), (5, 9)])
        assert exact_w1_dense(a, b) == pytest.approx(
            exact_w1_bruteforce(a, b), abs=1e-9
        )

    def test_arc_guard(self):
        nodes = zero_condense(
            PersistenceDiagram([(0, 1 + i * 1e-6) for i in np.arange(4000)]),
            PersistenceDiagram([(5, 6 + i * 1e-6) for i in np.arange(4000)]),
        )
        with pytest.raises(OracleSizeError):
            dense_network(nodes)


def test_metric_sanity():
    rng = np.random.default_rng(137)
    for _ in range(40):
        a = random_diagram(rng, max_points=6)
        b = random_diagram(rng, max_points=6)
        c = random_diagram(rng, max_points=6)
        dab = exact_w1_dense(a, b)
        dba = exact_w1_dense(b, a)
        assert dab == pytest.approx(dba, abs=1e-9)
        assert exact_w1_dense(a, a) == pytest.approx(0.0, abs=1e-9)
        dac = exact_w1_dense(a, c)
        dcb = exact_w1_dense(c, b)
        assert dab <= dac + dcb + 1e-9
