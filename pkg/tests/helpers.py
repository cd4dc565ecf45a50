"""Shared generators and small utilities for the test suite."""

from __future__ import annotations

import numpy as np

from w1flow.diagram import PersistenceDiagram


def random_diagram(rng, max_points=12, scale=10.0, min_points=0):
    """Random diagram with up to max_points points above the diagonal."""
    n = int(rng.integers(min_points, max_points + 1))
    if n == 0:
        return PersistenceDiagram()
    births = rng.uniform(0.0, scale, n)
    lifetimes = rng.uniform(1e-3, scale / 2.0, n)
    return PersistenceDiagram(np.stack([births, births + lifetimes], axis=1))


def random_pair(rng, max_points=12, scale=10.0):
    return random_diagram(rng, max_points, scale), random_diagram(rng, max_points, scale)


def random_balanced_network_arrays(rng, max_n=15, max_supply=5):
    """Random strongly connected balanced network (always feasible).

    Costs are multiples of 1/8 so reference and solver arithmetic agree
    exactly and reduced-cost ties occur often.
    """
    n = int(rng.integers(2, max_n + 1))
    supplies = rng.integers(-max_supply, max_supply + 1, n).astype(np.int64)
    supplies[-1] -= supplies.sum()
    tails = list(range(n))
    heads = [(v + 1) % n for v in range(n)]
    extra = int(rng.integers(0, 2 * n + 1))
    for _ in range(extra):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u != v:
            tails.append(u)
            heads.append(v)
    costs = rng.integers(0, 80, len(tails)).astype(np.float64) / 8.0
    return supplies, np.array(tails), np.array(heads), costs


def tree_subsets(tree):
    """Point-index set below every split tree node."""
    subs = [None] * tree.n_nodes
    for nid in range(tree.n_nodes - 1, -1, -1):
        if tree.left[nid] < 0:
            subs[nid] = frozenset([int(tree.rep[nid])])
        else:
            subs[nid] = subs[int(tree.left[nid])] | subs[int(tree.right[nid])]
    return subs


def sequential_wspd_reference(tree, s):
    """Plain recursive WSPD over the split tree, for differential tests."""
    from w1flow.spanner import well_separated

    pairs = []

    def diag_sq(nid):
        w = tree.bbox[nid, 2] - tree.bbox[nid, 0]
        h = tree.bbox[nid, 3] - tree.bbox[nid, 1]
        return w * w + h * h

    def find(u, v):
        if well_separated(tree.bbox[u], tree.bbox[v], s):
            pairs.append((u, v))
            return
        if diag_sq(u) > diag_sq(v):
            find(int(tree.left[u]), v)
            find(int(tree.right[u]), v)
        else:
            find(u, int(tree.left[v]))
            find(u, int(tree.right[v]))

    for nid in range(tree.n_nodes):
        if tree.left[nid] >= 0:
            find(int(tree.left[nid]), int(tree.right[nid]))
    return pairs


def flow_conservation_violation(network, flows):
    """Max |net outflow - supply| over nodes, given per-arc flows."""
    n = network.node_count
    out = np.bincount(network.tails, weights=flows, minlength=n)
    inc = np.bincount(network.heads, weights=flows, minlength=n)
    return float(np.max(np.abs(out - inc - network.supplies)))
