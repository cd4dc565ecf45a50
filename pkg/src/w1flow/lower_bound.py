"""Cheap lower bounds on the 1-Wasserstein distance.

Two bounds are provided: the relaxed transport bound obtained by dropping one
constraint family of the min-cost flow (each source simply ships everything to
its cheapest target), and the centroid-difference bound.  Both are sound:
they never exceed the true distance.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

from .diagram import (
    PersistenceDiagram,
    SuppliedNodes,
    diagonal_distances,
    diagonal_projections,
)


class PlanarIndex:
    """Exact Euclidean nearest-neighbor index over a finite planar point set."""

    def __init__(self, points: np.ndarray):
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        if pts.shape[0] == 0:
            raise ValueError("cannot index an empty point set")
        self.points = pts
        self._tree = cKDTree(pts)

    def nn_query(self, q) -> tuple[int, float]:
        """Index and distance of the nearest indexed point to q."""
        d, i = self._tree.query(np.asarray(q, dtype=np.float64))
        return int(i), float(d)

    def query(self, points: np.ndarray, workers: int = 1) -> np.ndarray:
        """Nearest-neighbor distances for a batch of query points."""
        d, _ = self._tree.query(np.asarray(points, dtype=np.float64), workers=workers)
        return np.atleast_1d(d)


def _one_sided(
    src_points: np.ndarray,
    src_mass: np.ndarray,
    dst_points: np.ndarray,
    workers: int,
) -> float:
    """Sum of src_mass * min(nn distance to dst, diagonal distance)."""
    if src_points.shape[0] == 0:
        return 0.0
    diag = diagonal_distances(src_points)
    if dst_points.shape[0] == 0:
        best = diag
    else:
        nnd = PlanarIndex(dst_points).query(src_points, workers=workers)
        best = np.minimum(nnd, diag)
    return float(np.sum(src_mass * best))


def rwmd(nodes: SuppliedNodes, workers: int = 1) -> float:
    """Relaxed-transport lower bound on W1 for a condensed node set.

    Every source node routes its whole mass along its cheapest outgoing arc:
    either to the nearest opposite-side node or to the diagonal, whichever is
    closer.  The value is the larger of the two one-sided relaxations (the
    virtual source contributes 0 through its free arc to the virtual sink).
    """
    a_sel = nodes.a_member
    b_sel = nodes.b_member
    a_pts = nodes.points[a_sel]
    b_pts = nodes.points[b_sel]
    l_a = _one_sided(a_pts, nodes.a_mass[a_sel], b_pts, workers)
    l_b = _one_sided(b_pts, nodes.b_mass[b_sel], a_pts, workers)
    return max(l_a, l_b)


def wcd(a: PersistenceDiagram, b: PersistenceDiagram) -> float:
    """Centroid-difference lower bound on W1.

    Augments each diagram with the diagonal projections of the other so both
    multisets have equal cardinality N = |A~| + |B~|, then returns
    N * ||centroid(X) - centroid(Y)|| / 2.  The halving converts the bound on
    the classical transport cost of the augmented sets into a bound on W1.
    """
    n = len(a) + len(b)
    if n == 0:
        return 0.0
    x = np.concatenate([a.points, diagonal_projections(b.points)], axis=0)
    y = np.concatenate([b.points, diagonal_projections(a.points)], axis=0)
    gap = x.mean(axis=0) - y.mean(axis=0)
    return float(n * np.hypot(gap[0], gap[1]) / 2.0)
