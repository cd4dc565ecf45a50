"""Exact W1 references for testing: matching enumeration and dense flow.

The brute-force path enumerates every partial matching between the two point
multisets (unmatched points pay their diagonal distance) and is limited to
tiny inputs.  The dense path materializes the complete bipartite
transshipment network over the 0-condensed nodes and solves it exactly; the
two routes are independent enough that one guards the other in tests.
"""

from __future__ import annotations

import numpy as np

from . import simplex
from .diagram import (
    PersistenceDiagram,
    SuppliedNodes,
    diagonal_distance,
    diagonal_distances,
    zero_condense,
)
from .network import TransshipmentNetwork, build_network
from .spanner import abar_index, bbar_index

BRUTE_FORCE_LIMIT = 12
DENSE_ARC_LIMIT = 10_000_000


class OracleSizeError(ValueError):
    """Input exceeds the size guard of an exact oracle."""


def exact_w1_bruteforce(a: PersistenceDiagram, b: PersistenceDiagram) -> float:
    """Minimum over all partial matchings, by exhaustive enumeration."""
    if len(a) + len(b) > BRUTE_FORCE_LIMIT:
        raise OracleSizeError(
            f"brute-force oracle limited to {BRUTE_FORCE_LIMIT} total points"
        )
    a_pts = [p for p in a]
    b_pts = [p for p in b]
    nb = len(b_pts)
    b_diag = [diagonal_distance(q) for q in b_pts]
    dist = [
        [float(np.hypot(p.birth - q.birth, p.death - q.death)) for q in b_pts]
        for p in a_pts
    ]

    def rest_diag(used: int) -> float:
        return sum(b_diag[j] for j in range(nb) if not (used >> j) & 1)

    def best_from(i: int, used: int) -> float:
        if i == len(a_pts):
            return rest_diag(used)
        best = diagonal_distance(a_pts[i]) + best_from(i + 1, used)
        row = dist[i]
        for j in range(nb):
            if not (used >> j) & 1:
                cand = row[j] + best_from(i + 1, used | (1 << j))
                if cand < best:
                    best = cand
        return best

    return best_from(0, 0)


def dense_network(nodes: SuppliedNodes) -> TransshipmentNetwork:
    """Complete bipartite transshipment network over condensed nodes."""
    k = nodes.points.shape[0]
    a_idx = np.flatnonzero(nodes.a_member)
    b_idx = np.flatnonzero(nodes.b_member)
    if int(a_idx.shape[0]) * int(b_idx.shape[0]) > DENSE_ARC_LIMIT:
        raise OracleSizeError("dense oracle arc guard exceeded")
    tails = np.repeat(a_idx, b_idx.shape[0])
    heads = np.tile(b_idx, a_idx.shape[0])
    keep = tails != heads  # merged dual nodes cancel internally at zero cost
    tails = tails[keep]
    heads = heads[keep]
    diff = nodes.points[tails] - nodes.points[heads]
    costs = np.hypot(diff[:, 0], diff[:, 1])
    diag = diagonal_distances(nodes.points) if k else np.zeros(0)
    abar = abar_index(k)
    bbar = bbar_index(k)
    tails = np.concatenate(
        [tails, a_idx, np.full(b_idx.shape[0], bbar, dtype=np.int64), [bbar]]
    )
    heads = np.concatenate(
        [heads, np.full(a_idx.shape[0], abar, dtype=np.int64), b_idx, [abar]]
    )
    costs = np.concatenate([costs, diag[a_idx], diag[b_idx], [0.0]])
    supplies = np.concatenate(
        [nodes.supply, [nodes.abar_supply, nodes.bbar_supply]]
    ).astype(np.int64)
    return build_network(supplies, tails, heads, costs)


def exact_w1_nodes(nodes: SuppliedNodes) -> float:
    """Exact W1 of the diagrams represented by a condensed node set."""
    if nodes.points.shape[0] == 0:
        return 0.0
    result = simplex.solve(dense_network(nodes))
    if result.status != simplex.OPTIMAL:
        raise RuntimeError("dense oracle solve did not reach optimality")
    return result.objective


def exact_w1_dense(a: PersistenceDiagram, b: PersistenceDiagram) -> float:
    """Exact W1 via 0-condensation and a dense min-cost flow solve."""
    return exact_w1_nodes(zero_condense(a, b))
