"""Arc sparsification: split tree, well-separated pair decomposition, arcs.

The split tree recursively halves the longest side of the (tight) bounding
box until every leaf holds one point.  The WSPD is built with the two-pass
scheme: one traversal per internal node counts the well-separated pairs it
will produce, a prefix sum turns the counts into disjoint write offsets, and
a second traversal writes the pairs into its own range.  The output layout is
therefore deterministic and independent of how the internal nodes are
partitioned across workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .diagram import SuppliedNodes, diagonal_distances

# Node index layout of the transshipment network built from k supplied nodes:
# points occupy 0..k-1, the diagonal demand sink sits at k and the diagonal
# source at k+1.
ABAR_OFFSET = 0
BBAR_OFFSET = 1


def abar_index(n_points: int) -> int:
    return n_points + ABAR_OFFSET


def bbar_index(n_points: int) -> int:
    return n_points + BBAR_OFFSET


@dataclass(frozen=True)
class SplitTree:
    """Array-backed binary spatial decomposition of a planar point set.

    ``left``/``right`` hold child node ids (-1 for leaves), ``bbox`` the tight
    axis-aligned box of each node's points, ``rep`` the point index of the
    node's representative (leftmost point, ties by smaller y) and ``size`` the
    number of points below the node.  Children always carry larger ids than
    their parent.
    """

    points: np.ndarray  # (n, 2) float64
    left: np.ndarray  # (N,) int64
    right: np.ndarray  # (N,) int64
    bbox: np.ndarray  # (N, 4) float64: xmin, ymin, xmax, ymax
    rep: np.ndarray  # (N,) int64 point index
    size: np.ndarray  # (N,) int64
    root: int  # -1 for an empty tree

    @property
    def n_nodes(self) -> int:
        return self.left.shape[0]

    def internal_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.left >= 0)

    def leaf_count(self) -> int:
        return int(np.count_nonzero(self.left < 0))


@dataclass(frozen=True)
class WSPairList:
    """Well-separated pairs of a split tree.

    ``node_pairs`` holds (tree node id, tree node id) per pair; ``indices``
    the corresponding representative point indices.  Every unordered pair of
    distinct input points is covered by exactly one entry.
    """

    node_pairs: np.ndarray  # (P, 2) int64 tree node ids
    indices: np.ndarray  # (P, 2) int64 point indices (representatives)
    points: np.ndarray  # (n, 2) the underlying point set

    def __len__(self) -> int:
        return self.node_pairs.shape[0]


@dataclass(frozen=True)
class ArcList:
    """Directed arcs (tail, head, cost) over supplied-node indices."""

    tails: np.ndarray  # (m,) int64
    heads: np.ndarray  # (m,) int64
    costs: np.ndarray  # (m,) float64

    def __len__(self) -> int:
        return self.tails.shape[0]


def build_split_tree(points: np.ndarray) -> SplitTree:
    """Build the split tree of a set of distinct planar points."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    n = pts.shape[0]
    if n == 0:
        e = np.empty(0, dtype=np.int64)
        return SplitTree(pts, e, e.copy(), np.empty((0, 4)), e.copy(), e.copy(), -1)
    n_nodes = 2 * n - 1
    left = np.full(n_nodes, -1, dtype=np.int64)
    right = np.full(n_nodes, -1, dtype=np.int64)
    bbox = np.empty((n_nodes, 4), dtype=np.float64)
    rep = np.full(n_nodes, -1, dtype=np.int64)
    size = np.zeros(n_nodes, dtype=np.int64)

    order = np.arange(n, dtype=np.int64)
    next_id = 0
    # frames: (lo, hi, parent id, is_right_child); node ids are assigned on
    # pop so children always get larger ids than their parent.
    stack: list[tuple[int, int, int, bool]] = [(0, n, -1, False)]
    while stack:
        lo, hi, parent, is_right = stack.pop()
        nid = next_id
        next_id += 1
        if parent >= 0:
            if is_right:
                right[parent] = nid
            else:
                left[parent] = nid
        sub = order[lo:hi]
        xs = pts[sub, 0]
        ys = pts[sub, 1]
        bbox[nid] = (xs.min(), ys.min(), xs.max(), ys.max())
        size[nid] = hi - lo
        if hi - lo == 1:
            rep[nid] = sub[0]
            continue
        ext_x = bbox[nid, 2] - bbox[nid, 0]
        ext_y = bbox[nid, 3] - bbox[nid, 1]
        if ext_x == 0.0 and ext_y == 0.0:
            raise ValueError("split tree input contains duplicate points")
        axis = 0 if ext_x >= ext_y else 1
        mid = 0.5 * (bbox[nid, axis] + bbox[nid, axis + 2])
        mask = pts[sub, axis] <= mid
        n_left = int(np.count_nonzero(mask))
        if n_left == 0 or n_left == hi - lo:
            # adjacent-float coordinates can round the midpoint onto an
            # endpoint; split off the max-attaining points instead
            mask = pts[sub, axis] < bbox[nid, axis + 2]
            n_left = int(np.count_nonzero(mask))
        order[lo:hi] = np.concatenate([sub[mask], sub[~mask]])
        # push right first so the left child is popped (and numbered) first
        stack.append((lo + n_left, hi, nid, True))
        stack.append((lo, lo + n_left, nid, False))
    # representatives bottom-up: children have larger ids than parents
    for nid in range(n_nodes - 1, -1, -1):
        if left[nid] < 0:
            continue
        ri, rj = rep[left[nid]], rep[right[nid]]
        pi, pj = pts[ri], pts[rj]
        if (pi[0], pi[1]) <= (pj[0], pj[1]):
            rep[nid] = ri
        else:
            rep[nid] = rj
    return SplitTree(pts, left, right, bbox, rep, size, 0)


def well_separated(box_u: np.ndarray, box_v: np.ndarray, s: float) -> bool:
    """Separation predicate on circumscribed balls of two bounding boxes.

    With r the larger half-diagonal, the boxes are s-well separated when the
    gap between the two radius-r balls around the box centers is at least s*r.
    """
    ru = 0.5 * np.hypot(box_u[2] - box_u[0], box_u[3] - box_u[1])
    rv = 0.5 * np.hypot(box_v[2] - box_v[0], box_v[3] - box_v[1])
    r = max(ru, rv)
    dx = 0.5 * (box_u[0] + box_u[2]) - 0.5 * (box_v[0] + box_v[2])
    dy = 0.5 * (box_u[1] + box_u[3]) - 0.5 * (box_v[1] + box_v[3])
    return bool(np.hypot(dx, dy) - 2.0 * r >= s * r)


@njit(cache=True, nogil=True, inline="always")
def _ws_predicate(bbox, u, v, s):
    rux = bbox[u, 2] - bbox[u, 0]
    ruy = bbox[u, 3] - bbox[u, 1]
    rvx = bbox[v, 2] - bbox[v, 0]
    rvy = bbox[v, 3] - bbox[v, 1]
    ru = 0.5 * (rux * rux + ruy * ruy) ** 0.5
    rv = 0.5 * (rvx * rvx + rvy * rvy) ** 0.5
    r = ru if ru > rv else rv
    dx = 0.5 * (bbox[u, 0] + bbox[u, 2]) - 0.5 * (bbox[v, 0] + bbox[v, 2])
    dy = 0.5 * (bbox[u, 1] + bbox[u, 3]) - 0.5 * (bbox[v, 1] + bbox[v, 3])
    return (dx * dx + dy * dy) ** 0.5 - 2.0 * r >= s * r


@njit(cache=True, nogil=True, inline="always")
def _diag_sq(bbox, u):
    w = bbox[u, 2] - bbox[u, 0]
    h = bbox[u, 3] - bbox[u, 1]
    return w * w + h * h


@njit(cache=True, nogil=True)
def _pairs_kernel(left, right, bbox, s, node_ids, counts, offsets, out_pairs, write):
    """Count (write=False) or write (write=True) WS pairs per internal node.

    The recursion rooted at (left[w], right[w]) descends into the children of
    whichever side currently has the larger bounding-box diameter.  Returns 0
    on success, 1 if a write run disagrees with the counts.
    """
    stack = np.empty((2 * left.shape[0] + 8, 2), dtype=np.int64)
    for t in range(node_ids.shape[0]):
        w = node_ids[t]
        found = 0
        pos = offsets[w] if write else 0
        top = 0
        stack[top, 0] = left[w]
        stack[top, 1] = right[w]
        top += 1
        while top > 0:
            top -= 1
            u = stack[top, 0]
            v = stack[top, 1]
            if _ws_predicate(bbox, u, v, s):
                if write:
                    out_pairs[pos, 0] = u
                    out_pairs[pos, 1] = v
                    pos += 1
                else:
                    found += 1
                continue
            if _diag_sq(bbox, u) > _diag_sq(bbox, v):
                stack[top, 0] = left[u]
                stack[top, 1] = v
                stack[top + 1, 0] = right[u]
                stack[top + 1, 1] = v
            else:
                stack[top, 0] = u
                stack[top, 1] = left[v]
                stack[top + 1, 0] = u
                stack[top + 1, 1] = right[v]
            top += 2
        if write:
            if pos != offsets[w] + counts[w]:
                return 1
        else:
            counts[w] = found
    return 0


def _run_over_nodes(tree, s, node_ids, counts, offsets, out_pairs, write, workers):
    args = (tree.left, tree.right, tree.bbox, float(s))
    if workers <= 1 or node_ids.shape[0] < 2:
        rc = _pairs_kernel(*args, node_ids, counts, offsets, out_pairs, write)
        rcs = [rc]
    else:
        chunks = np.array_split(node_ids, min(workers, node_ids.shape[0]))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_pairs_kernel, *args, chunk, counts, offsets, out_pairs, write)
                for chunk in chunks
                if chunk.shape[0]
            ]
            rcs = [f.result() for f in futures]
    if any(rc != 0 for rc in rcs):
        raise AssertionError("WSPD write pass disagrees with counted offsets")


def count_pairs(tree: SplitTree, s: float, workers: int = 1) -> np.ndarray:
    """WS pair count for the recursion rooted at each internal node."""
    if s <= 0:
        raise ValueError("s must be positive")
    internal = tree.internal_nodes()
    counts = np.zeros(tree.n_nodes, dtype=np.int64)
    if internal.shape[0]:
        _run_over_nodes(tree, s, internal, counts, counts, _EMPTY_PAIRS, False, workers)
    return counts[internal]


def write_pairs(
    tree: SplitTree,
    s: float,
    offsets: np.ndarray,
    counts: np.ndarray,
    workers: int = 1,
) -> WSPairList:
    """Write WS pairs into the ranges given by the exclusive prefix sum."""
    internal = tree.internal_nodes()
    if offsets.shape[0] != internal.shape[0] or counts.shape[0] != internal.shape[0]:
        raise AssertionError("offsets/counts do not match the internal node count")
    expected = np.concatenate([[0], np.cumsum(counts)])[:-1].astype(np.int64)
    if not np.array_equal(np.asarray(offsets, dtype=np.int64), expected):
        raise AssertionError("offsets are not the exclusive prefix sum of counts")
    full_counts = np.zeros(tree.n_nodes, dtype=np.int64)
    full_offsets = np.zeros(tree.n_nodes, dtype=np.int64)
    full_counts[internal] = counts
    full_offsets[internal] = offsets
    total = int(counts.sum())
    pairs = np.empty((total, 2), dtype=np.int64)
    if internal.shape[0]:
        _run_over_nodes(tree, s, internal, full_counts, full_offsets, pairs, True, workers)
    indices = tree.rep[pairs] if total else np.empty((0, 2), dtype=np.int64)
    return WSPairList(pairs, indices, tree.points)


_EMPTY_PAIRS = np.empty((0, 2), dtype=np.int64)


def build_wspd(tree: SplitTree, s: float, workers: int = 1) -> WSPairList:
    """Two-pass WSPD construction: count, prefix-sum, write."""
    counts = count_pairs(tree, s, workers=workers)
    offsets = np.concatenate([[0], np.cumsum(counts)])[:-1].astype(np.int64)
    return write_pairs(tree, s, offsets, counts, workers=workers)


def emit_arcs(pairs: WSPairList, nodes: SuppliedNodes) -> ArcList:
    """Spanner biarcs plus diagonal arcs for a supplied node set.

    Every WS pair contributes both directions at Euclidean cost; every node
    with A-side mass gets an arc to the diagonal sink, every node with B-side
    mass an arc from the diagonal source, and one free arc connects the
    source to the sink.
    """
    k = nodes.points.shape[0]
    abar = abar_index(k)
    bbar = bbar_index(k)
    pi = pairs.indices[:, 0]
    pj = pairs.indices[:, 1]
    diff = pairs.points[pi] - pairs.points[pj]
    span_cost = np.hypot(diff[:, 0], diff[:, 1])
    a_nodes = np.flatnonzero(nodes.a_member)
    b_nodes = np.flatnonzero(nodes.b_member)
    diag = diagonal_distances(nodes.points) if k else np.zeros(0)
    tails = np.concatenate(
        [pi, pj, a_nodes, np.full(b_nodes.shape[0], bbar, dtype=np.int64), [bbar]]
    ).astype(np.int64)
    heads = np.concatenate(
        [pj, pi, np.full(a_nodes.shape[0], abar, dtype=np.int64), b_nodes, [abar]]
    ).astype(np.int64)
    costs = np.concatenate(
        [span_cost, span_cost, diag[a_nodes], diag[b_nodes], [0.0]]
    ).astype(np.float64)
    return ArcList(tails, heads, costs)
