"""Static CSR representation of the transshipment network.

Arcs are sorted lexicographically by (tail, head) and deduplicated before the
solver sees them; the row offsets give each node's contiguous arc range.  The
layout is immutable and deterministic for fixed inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagram import SuppliedNodes
from .spanner import ArcList


class NetworkError(ValueError):
    """Raised for unbalanced supplies, dangling arcs or invalid costs."""


@dataclass(frozen=True)
class TransshipmentNetwork:
    node_count: int
    supplies: np.ndarray  # (n,) int64, sums to zero
    tails: np.ndarray  # (m,) int64, sorted by (tail, head)
    heads: np.ndarray  # (m,) int64
    costs: np.ndarray  # (m,) float64, finite and >= 0
    row_offsets: np.ndarray  # (n + 1,) int64, row_offsets[n] == m

    @property
    def arc_count(self) -> int:
        return self.tails.shape[0]

    def dump(self) -> str:
        """Debug text dump: header lines then one "tail head cost" per arc."""
        lines = [f"{self.node_count} {self.arc_count}"]
        lines.append(" ".join(str(int(s)) for s in self.supplies))
        for t, h, c in zip(self.tails, self.heads, self.costs):
            lines.append(f"{int(t)} {int(h)} {float(c)!r}")
        return "\n".join(lines) + "\n"


def build_network(
    supplies: np.ndarray,
    tails: np.ndarray,
    heads: np.ndarray,
    costs: np.ndarray,
) -> TransshipmentNetwork:
    """Validate, sort and deduplicate raw arc arrays into a CSR network."""
    supplies = np.asarray(supplies, dtype=np.int64)
    tails = np.asarray(tails, dtype=np.int64)
    heads = np.asarray(heads, dtype=np.int64)
    costs = np.asarray(costs, dtype=np.float64)
    n = supplies.shape[0]
    if int(supplies.sum()) != 0:
        raise NetworkError(f"unbalanced supplies (sum = {int(supplies.sum())})")
    if tails.shape != heads.shape or tails.shape != costs.shape:
        raise NetworkError("tail/head/cost arrays must have equal length")
    if tails.size:
        if tails.min() < 0 or tails.max() >= n or heads.min() < 0 or heads.max() >= n:
            raise NetworkError("arc endpoint out of range")
        if np.any(tails == heads):
            raise NetworkError("self-loop arc")
    if not np.all(np.isfinite(costs)):
        raise NetworkError("non-finite arc cost")
    if np.any(costs < 0):
        raise NetworkError("negative arc cost")

    order = np.lexsort((heads, tails))
    t, h, c = tails[order], heads[order], costs[order]
    if t.size:
        new_group = np.empty(t.shape[0], dtype=bool)
        new_group[0] = True
        new_group[1:] = (t[1:] != t[:-1]) | (h[1:] != h[:-1])
        gid = np.cumsum(new_group) - 1
        m = int(gid[-1]) + 1
        cmin = np.full(m, np.inf)
        np.minimum.at(cmin, gid, c)
        t = t[new_group]
        h = h[new_group]
        c = cmin
    row_offsets = np.zeros(n + 1, dtype=np.int64)
    row_offsets[1:] = np.cumsum(np.bincount(t, minlength=n))
    return TransshipmentNetwork(n, supplies, t, h, c, row_offsets)


def assemble(nodes: SuppliedNodes, arcs: ArcList) -> TransshipmentNetwork:
    """Build the network for supplied nodes plus the two virtual nodes."""
    supplies = np.concatenate(
        [nodes.supply, [nodes.abar_supply, nodes.bbar_supply]]
    ).astype(np.int64)
    return build_network(supplies, arcs.tails, arcs.heads, arcs.costs)
