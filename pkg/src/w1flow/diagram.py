"""Persistence diagrams: parsing, validation, diagonal geometry, 0-condensation.

A diagram is a finite multiset of planar points (birth, death) strictly above
the diagonal y = x.  The diagonal itself carries infinite multiplicity and is
never materialized; it enters the transport problem only through the two
virtual nodes produced by :func:`zero_condense`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

import numpy as np

SQRT2 = math.sqrt(2.0)


class DiagramFormatError(ValueError):
    """Raised when diagram text cannot be parsed or fails validation."""


class PDPoint(NamedTuple):
    birth: float
    death: float


def diagonal_projection(p: PDPoint) -> tuple[float, float]:
    """Nearest point to p on the diagonal: ((b+d)/2, (b+d)/2)."""
    m = 0.5 * (p.birth + p.death)
    return (m, m)


def diagonal_distance(p: PDPoint) -> float:
    """Euclidean distance from p to the diagonal, (death - birth)/sqrt(2)."""
    return (p.death - p.birth) / SQRT2


def diagonal_distances(points: np.ndarray) -> np.ndarray:
    """Vectorized diagonal distance |y - x|/sqrt(2) for an (n, 2) array.

    Uses the absolute value so it stays valid for condensed node coordinates,
    which a random perturbation may push slightly below the diagonal.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    return np.abs(pts[:, 1] - pts[:, 0]) / SQRT2


def diagonal_projections(points: np.ndarray) -> np.ndarray:
    """Vectorized diagonal projection for an (n, 2) array."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    m = 0.5 * (pts[:, 0] + pts[:, 1])
    return np.stack([m, m], axis=1)


class PersistenceDiagram:
    """Finite multiset of (birth, death) points with death > birth.

    Points are kept in insertion order; duplicates encode multiplicity.
    Equality is multiset equality (order independent).
    """

    __slots__ = ("points",)

    def __init__(self, points: Iterable | np.ndarray = ()):
        pts = np.asarray(points, dtype=np.float64)
        if pts.size == 0:
            pts = np.empty((0, 2), dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise DiagramFormatError("expected an (n, 2) array of (birth, death) pairs")
        if not np.all(np.isfinite(pts)):
            raise DiagramFormatError("non-finite coordinate in diagram")
        if np.any(pts[:, 1] <= pts[:, 0]):
            raise DiagramFormatError("every point must satisfy death > birth")
        self.points = pts

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self) -> Iterator[PDPoint]:
        for b, d in self.points:
            yield PDPoint(float(b), float(d))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        if len(self) != len(other):
            return False
        a = self.points[np.lexsort((self.points[:, 1], self.points[:, 0]))]
        b = other.points[np.lexsort((other.points[:, 1], other.points[:, 0]))]
        return bool(np.array_equal(a, b))

    def __repr__(self) -> str:
        return f"PersistenceDiagram({len(self)} points)"


def parse_diagram(text: str) -> tuple[PersistenceDiagram, int]:
    """Parse diagram text ("birth death" per line) into a diagram.

    Lines starting with '#' and blank lines are ignored; repeated identical
    lines encode multiplicity.  Zero-persistence points (death == birth) are
    dropped; their count is returned alongside the diagram.  Any malformed
    line rejects the whole input with its line number.
    """
    births: list[float] = []
    deaths: list[float] = []
    dropped = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise DiagramFormatError(
                f"line {lineno}: expected two numbers, got {len(tokens)} tokens"
            )
        try:
            b, d = float(tokens[0]), float(tokens[1])
        except ValueError:
            raise DiagramFormatError(f"line {lineno}: non-numeric token") from None
        if not (math.isfinite(b) and math.isfinite(d)):
            raise DiagramFormatError(f"line {lineno}: non-finite coordinate")
        if d < b:
            raise DiagramFormatError(f"line {lineno}: death < birth")
        if d == b:
            dropped += 1
            continue
        births.append(b)
        deaths.append(d)
    pts = np.stack([births, deaths], axis=1) if births else np.empty((0, 2))
    return PersistenceDiagram(pts), dropped


def serialize_diagram(diagram: PersistenceDiagram) -> str:
    """Inverse of parse_diagram up to point order."""
    lines = [f"{float(b)!r} {float(d)!r}" for b, d in diagram.points]
    return "\n".join(lines) + ("\n" if lines else "")


def load_diagram(path) -> tuple[PersistenceDiagram, int]:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_diagram(text)
    except DiagramFormatError as exc:
        raise DiagramFormatError(f"{path}: {exc}") from None


@dataclass(frozen=True)
class SuppliedNodes:
    """Deduplicated planar nodes with per-side integer masses.

    ``a_mass[i]`` / ``b_mass[i]`` count how many points of the first / second
    diagram sit at ``points[i]``; the signed supply of a node is their
    difference.  A node with both masses positive is the merged representation
    of coincident A/B points and keeps membership in both diagonal families.
    The two virtual diagonal nodes are carried as scalars: ``abar_supply``
    (the demand sink for A mass) and ``bbar_supply`` (the source feeding B
    demand).
    """

    points: np.ndarray  # (k, 2) float64, pairwise distinct
    a_mass: np.ndarray  # (k,) int64, >= 0
    b_mass: np.ndarray  # (k,) int64, >= 0
    abar_supply: int
    bbar_supply: int

    @property
    def supply(self) -> np.ndarray:
        """Signed supply per non-virtual node."""
        return self.a_mass - self.b_mass

    @property
    def a_member(self) -> np.ndarray:
        return self.a_mass > 0

    @property
    def b_member(self) -> np.ndarray:
        return self.b_mass > 0

    def n_points(self) -> int:
        """Total multiset cardinality |A~| + |B~| represented here."""
        return int(self.a_mass.sum() + self.b_mass.sum())

    def total_balance(self) -> int:
        return int(self.supply.sum()) + self.abar_supply + self.bbar_supply


def zero_condense(a: PersistenceDiagram, b: PersistenceDiagram) -> SuppliedNodes:
    """Merge coincident points of both diagrams into supplied nodes.

    Exact (no coordinates move): multiplicities become supplies, a coordinate
    occupied by both diagrams becomes a single node with both masses recorded,
    and the virtual nodes get supplies -|A~| and +|B~|.
    """
    na, nb = len(a), len(b)
    if na + nb == 0:
        empty = np.empty((0, 2), dtype=np.float64)
        zeros = np.zeros(0, dtype=np.int64)
        return SuppliedNodes(empty, zeros, zeros.copy(), 0, 0)
    stacked = np.concatenate([a.points, b.points], axis=0)
    uniq, inverse = np.unique(stacked, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    k = uniq.shape[0]
    a_mass = np.bincount(inverse[:na], minlength=k).astype(np.int64)
    b_mass = np.bincount(inverse[na:], minlength=k).astype(np.int64)
    return SuppliedNodes(uniq, a_mass, b_mass, -na, nb)
