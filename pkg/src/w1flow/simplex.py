"""Network simplex for uncapacitated min-cost flow with block pivot search.

The basis is a spanning tree rooted at an artificial node; initialization
routes every supply through big-cost artificial arcs, which keeps the basis
strongly feasible from the start.  Entering arcs are found by scanning the
arc list cyclically in fixed-size blocks and taking the most negative reduced
cost in the first block that contains one.  Prolonged degenerate pivoting is
cut off by a budget on the number of searched blocks; the current (feasible)
solution is returned in that case.

The pivot loop runs as compiled kernels; the solver itself is strictly
single-threaded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .network import TransshipmentNetwork

OPTIMAL = "optimal"
ABORTED_STALLING = "aborted_stalling"

REDUCED_COST_TOL = 1e-9

_BIG = np.int64(2**62)


class InfeasibleNetworkError(RuntimeError):
    """Artificial arcs still carry flow at optimality: no feasible flow."""


@dataclass
class FlowResult:
    objective: float
    flows: np.ndarray  # (m,) int64, network arc order
    status: str  # OPTIMAL or ABORTED_STALLING
    pivots: int
    blocks_searched: int
    potentials: np.ndarray  # (n,) float64 dual values
    objective_trace: np.ndarray | None = None


@njit(cache=True, nogil=True)
def _block_search(tails, heads, costs, pi, cursor, block_size, tol):
    """Most negative reduced-cost arc in the first non-empty block.

    Scans at most one full cycle starting at ``cursor``.  Returns the arc
    index (or -1 when every reduced cost is >= -tol), the advanced cursor and
    the number of blocks examined.
    """
    m = tails.shape[0]
    scanned = 0
    pos = cursor
    blocks = 0
    while scanned < m:
        cnt = block_size if block_size < m - scanned else m - scanned
        best = -1
        best_rc = -tol
        for j in range(cnt):
            e = pos + j
            if e >= m:
                e -= m
            rc = costs[e] - pi[tails[e]] + pi[heads[e]]
            if rc < best_rc:
                best_rc = rc
                best = e
        blocks += 1
        scanned += cnt
        pos += cnt
        if pos >= m:
            pos -= m
        if best >= 0:
            return best, pos, blocks
    return -1, pos, blocks


@njit(cache=True, nogil=True)
def _pivot(e, tails, heads, costs, flow, parent, pred, up, depth, pi, fc, ns, ps, stack):
    """Bring arc e into the basis; returns nonzero on an unbounded cycle."""
    u = tails[e]
    v = heads[e]
    a = u
    b = v
    while a != b:
        da = depth[a]
        db = depth[b]
        if da > db:
            a = parent[a]
        elif db > da:
            b = parent[b]
        else:
            a = parent[a]
            b = parent[b]
    w = a  # apex of the pivot cycle

    # flow change: bounded by the arcs whose flow decreases along the cycle
    t = _BIG
    x = u
    while x != w:
        if up[x]:
            f = flow[pred[x]]
            if f < t:
                t = f
        x = parent[x]
    x = v
    while x != w:
        if not up[x]:
            f = flow[pred[x]]
            if f < t:
                t = f
        x = parent[x]
    if t == _BIG:
        return 1

    # leaving arc: last blocking arc when the cycle is traversed from the
    # apex in the entering direction; this preserves strong feasibility and
    # with it finite termination
    leave = np.int64(-1)
    on_v_side = False
    x = v
    while x != w:
        if (not up[x]) and flow[pred[x]] == t:
            leave = x
            on_v_side = True
        x = parent[x]
    if leave < 0:
        x = u
        while x != w:
            if up[x] and flow[pred[x]] == t:
                leave = x
                break
            x = parent[x]

    x = u
    while x != w:
        if up[x]:
            flow[pred[x]] -= t
        else:
            flow[pred[x]] += t
        x = parent[x]
    x = v
    while x != w:
        if up[x]:
            flow[pred[x]] += t
        else:
            flow[pred[x]] -= t
        x = parent[x]
    flow[e] = t

    # rehang the subtree cut off by the leaving arc: reverse the tree path
    # from the entering endpoint inside it up to the leaving arc
    if on_v_side:
        r0 = v
        other = u
        pup = False  # v is the head of e
    else:
        r0 = u
        other = v
        pup = True  # u is the tail of e
    x = r0
    new_parent = other
    parc = e
    while True:
        op = parent[x]
        oa = pred[x]
        oup = up[x]
        if ps[x] != -1:
            ns[ps[x]] = ns[x]
        else:
            fc[op] = ns[x]
        if ns[x] != -1:
            ps[ns[x]] = ps[x]
        ns[x] = fc[new_parent]
        ps[x] = -1
        if fc[new_parent] != -1:
            ps[fc[new_parent]] = x
        fc[new_parent] = x
        parent[x] = new_parent
        pred[x] = parc
        up[x] = pup
        if x == leave:
            break
        new_parent = x
        parc = oa
        pup = not oup
        x = op

    # refresh depths and potentials of the rehung subtree
    top = 0
    stack[top] = r0
    top += 1
    while top > 0:
        top -= 1
        x = stack[top]
        p = parent[x]
        depth[x] = depth[p] + 1
        c = costs[pred[x]]
        if up[x]:
            pi[x] = pi[p] + c
        else:
            pi[x] = pi[p] - c
        ch = fc[x]
        while ch != -1:
            stack[top] = ch
            top += 1
            ch = ns[ch]
    return 0


@njit(cache=True, nogil=True)
def _solve_kernel(supplies, tails, heads, costs, block_size, budget, tol, art_cost, trace):
    n = supplies.shape[0]
    m = tails.shape[0]
    mt = m + n
    root = n
    atails = np.empty(mt, np.int64)
    aheads = np.empty(mt, np.int64)
    acosts = np.empty(mt, np.float64)
    flow = np.zeros(mt, np.int64)
    atails[:m] = tails
    aheads[:m] = heads
    acosts[:m] = costs

    parent = np.empty(n + 1, np.int64)
    pred = np.empty(n + 1, np.int64)
    up = np.empty(n + 1, np.bool_)
    depth = np.empty(n + 1, np.int64)
    pi = np.zeros(n + 1, np.float64)
    fc = np.full(n + 1, -1, np.int64)
    ns = np.full(n + 1, -1, np.int64)
    ps = np.full(n + 1, -1, np.int64)
    parent[root] = -1
    pred[root] = -1
    depth[root] = 0
    up[root] = False
    for v in range(n):
        e = m + v
        acosts[e] = art_cost
        if supplies[v] >= 0:
            atails[e] = v
            aheads[e] = root
            flow[e] = supplies[v]
            up[v] = True
            pi[v] = art_cost
        else:
            atails[e] = root
            aheads[e] = v
            flow[e] = -supplies[v]
            up[v] = False
            pi[v] = -art_cost
        parent[v] = root
        pred[v] = e
        depth[v] = 1
        ns[v] = fc[root]
        if fc[root] != -1:
            ps[fc[root]] = v
        fc[root] = v
        ps[v] = -1

    stack = np.empty(n + 2, np.int64)
    cursor = 0
    pivots = 0
    blocks_total = 0
    status = 0
    trace_n = 0
    while True:
        e, cursor, nb = _block_search(atails, aheads, acosts, pi, cursor, block_size, tol)
        blocks_total += nb
        if e < 0:
            break
        if blocks_total > budget:
            # abort only once the big-cost artificial arcs are drained, so
            # the returned flows are feasible for the real network
            clear = True
            for j in range(m, mt):
                if flow[j] > 0:
                    clear = False
                    break
            if clear:
                status = 1
                break
        rc = _pivot(
            e, atails, aheads, acosts, flow, parent, pred, up, depth, pi, fc, ns, ps, stack
        )
        if rc != 0:
            status = 3
            break
        pivots += 1
        if trace.shape[0] > 0 and trace_n < trace.shape[0]:
            obj = 0.0
            for j in range(mt):
                obj += acosts[j] * flow[j]
            trace[trace_n] = obj
            trace_n += 1
    if status == 0:
        for j in range(m, mt):
            if flow[j] > 0:
                status = 2
                break
    return status, flow, pi, pivots, blocks_total, trace_n


def default_block_size(arc_count: int) -> int:
    return max(1, math.isqrt(max(arc_count - 1, 0)) + 1) if arc_count else 1


def stall_budget(arc_count: int, node_count: int, stop_c: float, stop_b: float) -> int:
    return int(math.ceil(stop_c * math.sqrt(arc_count * node_count))) + int(stop_b)


def find_entering_arc(
    network: TransshipmentNetwork,
    potentials: np.ndarray,
    cursor: int = 0,
    block_size: int | None = None,
    tol: float = REDUCED_COST_TOL,
) -> tuple[int | None, int, int]:
    """Block search over a network's arcs given node potentials.

    Returns (arc index or None, advanced cursor, blocks examined).
    """
    m = network.arc_count
    if m == 0:
        return None, 0, 0
    if block_size is None:
        block_size = default_block_size(m)
    pi = np.ascontiguousarray(potentials, dtype=np.float64)
    e, cur, blocks = _block_search(
        network.tails, network.heads, network.costs, pi, cursor % m, block_size, tol
    )
    return (None if e < 0 else int(e)), int(cur), int(blocks)


def solve(
    network: TransshipmentNetwork,
    block_size: int | None = None,
    stop_c: float = 4.0,
    stop_b: float = 1e5,
    pivot_rule: str = "block",
    collect_objectives: bool = False,
) -> FlowResult:
    """Solve the min-cost flow on a balanced network.

    ``pivot_rule="dantzig"`` widens the block to the whole arc list (full
    greedy scan); it exists for differential testing only.  When the searched
    block count exceeds ceil(stop_c * sqrt(m*n)) + stop_b the solver stops
    and returns the current feasible solution as ABORTED_STALLING.

    Raises InfeasibleNetworkError when no feasible flow exists.
    """
    m = network.arc_count
    n = network.node_count
    if pivot_rule == "dantzig":
        bsize = max(m, 1)
    elif pivot_rule == "block":
        bsize = block_size if block_size is not None else default_block_size(m)
        if bsize < 1:
            raise ValueError("block size must be positive")
    else:
        raise ValueError(f"unknown pivot rule {pivot_rule!r}")
    budget = stall_budget(m, n, stop_c, stop_b)
    max_cost = float(network.costs.max()) if m else 0.0
    art_cost = 1.0 + n * max_cost
    trace = np.empty(200_000 if collect_objectives else 0, dtype=np.float64)
    status, flow, pi, pivots, blocks, trace_n = _solve_kernel(
        network.supplies,
        network.tails,
        network.heads,
        network.costs,
        np.int64(bsize),
        np.int64(budget),
        float(REDUCED_COST_TOL),
        art_cost,
        trace,
    )
    if status == 2:
        raise InfeasibleNetworkError("no feasible flow: artificial arcs retain flow")
    if status == 3:
        raise RuntimeError("unbounded pivot cycle; arc costs must be nonnegative")
    real_flow = flow[:m].copy()
    objective = float(np.dot(network.costs, real_flow.astype(np.float64)))
    return FlowResult(
        objective=objective,
        flows=real_flow,
        status=OPTIMAL if status == 0 else ABORTED_STALLING,
        pivots=int(pivots),
        blocks_searched=int(blocks),
        potentials=pi[:n].copy(),
        objective_trace=trace[:trace_n].copy() if collect_objectives else None,
    )
