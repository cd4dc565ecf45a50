"""Node sparsification: snap supplied nodes to a lattice and merge.

Points are snapped to a k*delta lattice (k = 0.99 by default), supplies of
points landing on the same lattice point are summed, and each surviving node
is then shifted by a small random offset.  The offset breaks the lattice
symmetry that would otherwise cause repeated reduced-cost ties (and hence
stalling) in the simplex solver; it is drawn per lattice point from a counter
hash of (seed, lattice coordinates) so the output is bit-reproducible and
independent of any worker partitioning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diagram import SuppliedNodes

_SQRT2 = math.sqrt(2.0)

_U64 = np.uint64
_MIX1 = _U64(0x9E3779B97F4A7C15)
_MIX2 = _U64(0xBF58476D1CE4E5B9)
_MIX3 = _U64(0x94D049BB133111EB)


@dataclass(frozen=True)
class CondensationParams:
    """Lattice pitch, fraction and RNG seed for one condensation pass."""

    epsilon: float
    delta: float
    k: float = 0.99
    seed: int = 0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if not (0.5 <= self.k < 1.0):
            raise ValueError("k must lie in [0.5, 1)")


def compute_delta(epsilon: float, lower_bound: float, n_points: int) -> float:
    """Lattice pitch 2*eps*L / (sqrt(2) * n) for n = |A~| + |B~|.

    Returns 0 when the lower bound is 0, in which case condensation becomes a
    no-op.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    if lower_bound < 0:
        raise ValueError("lower bound must be nonnegative")
    return 2.0 * epsilon * lower_bound / (_SQRT2 * n_points)


def _round_half_away(t: np.ndarray) -> np.ndarray:
    return np.sign(t) * np.floor(np.abs(t) + 0.5)


def snap_points(points: np.ndarray, delta: float, k: float) -> tuple[np.ndarray, np.ndarray]:
    """Snap points to the k*delta lattice (round half away from zero).

    Returns (snapped coordinates, integer lattice coordinates).
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    pitch = k * delta
    cells = _round_half_away(np.asarray(points, dtype=np.float64) / pitch)
    if cells.size and np.abs(cells).max() >= 2.0**62:
        raise ValueError("lattice pitch too small for the coordinate range")
    return cells * pitch, cells.astype(np.int64)


def snap_point(p, delta: float, k: float = 0.99) -> tuple[float, float]:
    snapped, _ = snap_points(np.asarray(p, dtype=np.float64).reshape(1, 2), delta, k)
    return (float(snapped[0, 0]), float(snapped[0, 1]))


def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = (x + _MIX1).astype(_U64)
    x = (x ^ (x >> _U64(30))) * _MIX2
    x = (x ^ (x >> _U64(27))) * _MIX3
    return x ^ (x >> _U64(31))


def _lattice_offsets(cells: np.ndarray, seed: int, half_width: float) -> np.ndarray:
    """Uniform offsets in [-half_width, half_width)^2, keyed by lattice cell."""
    ux = cells[:, 0].astype(np.int64).view(_U64) if cells.size else np.zeros(0, _U64)
    uy = cells[:, 1].astype(np.int64).view(_U64) if cells.size else np.zeros(0, _U64)
    base = _splitmix64(np.full(cells.shape[0], _U64(seed & 0xFFFFFFFFFFFFFFFF)))
    h1 = _splitmix64(base ^ ux)
    h2 = _splitmix64(h1 ^ uy)
    h3 = _splitmix64(h2)
    u1 = (h2 >> _U64(11)).astype(np.float64) * 2.0**-53
    u2 = (h3 >> _U64(11)).astype(np.float64) * 2.0**-53
    return half_width * (2.0 * np.stack([u1, u2], axis=1) - 1.0)


def delta_condense(nodes: SuppliedNodes, params: CondensationParams) -> SuppliedNodes:
    """Snap nodes to the lattice, merge supplies, perturb merged nodes.

    The virtual supplies are untouched and total mass per side is conserved.
    With delta == 0 the input is returned unchanged.
    """
    if params.delta == 0.0 or nodes.points.shape[0] == 0:
        return nodes
    _, cells = snap_points(nodes.points, params.delta, params.k)
    uniq_cells, inverse = np.unique(cells, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    k = uniq_cells.shape[0]
    a_mass = np.zeros(k, dtype=np.int64)
    b_mass = np.zeros(k, dtype=np.int64)
    np.add.at(a_mass, inverse, nodes.a_mass)
    np.add.at(b_mass, inverse, nodes.b_mass)
    half_width = (1.0 - params.k) * params.delta / 2.0
    offsets = _lattice_offsets(uniq_cells, params.seed, half_width)
    coords = uniq_cells.astype(np.float64) * (params.k * params.delta) + offsets
    return SuppliedNodes(coords, a_mass, b_mass, nodes.abar_supply, nodes.bbar_supply)
