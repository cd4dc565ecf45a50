"""Synthetic Gaussian-cluster diagrams for benchmarks and stress tests."""

from __future__ import annotations

import numpy as np

from .diagram import PersistenceDiagram

_MIN_LIFE = 1e-6


def _sample_points(rng, centers, weights, n, spread):
    idx = rng.choice(centers.shape[0], size=n, p=weights)
    births = centers[idx, 0] + rng.normal(0.0, spread, size=n)
    lives = np.abs(centers[idx, 1] + rng.normal(0.0, spread, size=n))
    lives = np.maximum(lives, _MIN_LIFE)
    return np.stack([births, births + lives], axis=1)


def gaussian_cluster_diagram(
    n_points: int,
    seed: int = 0,
    n_clusters: int = 8,
    spread: float = 0.5,
    scale: float = 50.0,
) -> PersistenceDiagram:
    """Diagram with points normally scattered around random cluster centers."""
    rng = np.random.default_rng(seed)
    centers = np.stack(
        [rng.uniform(0.0, scale, n_clusters), rng.uniform(1.0, scale / 2, n_clusters)],
        axis=1,
    )
    weights = rng.dirichlet(np.ones(n_clusters))
    return PersistenceDiagram(_sample_points(rng, centers, weights, n_points, spread))


def gaussian_cluster_pair(
    n_a: int,
    n_b: int,
    seed: int = 0,
    n_clusters: int = 8,
    spread: float = 0.5,
    scale: float = 50.0,
) -> tuple[PersistenceDiagram, PersistenceDiagram]:
    """Two diagrams drawn around a shared set of cluster centers."""
    rng = np.random.default_rng(seed)
    centers = np.stack(
        [rng.uniform(0.0, scale, n_clusters), rng.uniform(1.0, scale / 2, n_clusters)],
        axis=1,
    )
    weights = rng.dirichlet(np.ones(n_clusters))
    a = PersistenceDiagram(_sample_points(rng, centers, weights, n_a, spread))
    b = PersistenceDiagram(_sample_points(rng, centers, weights, n_b, spread))
    return a, b
