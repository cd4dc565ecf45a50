"""Top-level approximate W1 computation and nearest-neighbor search.

The distance pipeline runs: 0-condensation, relaxed lower bound, lattice
condensation sized from that bound, split tree, well-separated pair spanner,
diagonal arcs, CSR assembly and the simplex solve.  The sparsity parameter s
controls both sparsifications; the guaranteed relative error for s > 4 is
(1 + 4/s + 4/(s-2)) * (1 + 8/(s-4)) - 1.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import simplex
from .condensation import CondensationParams, compute_delta, delta_condense
from .diagram import PersistenceDiagram, zero_condense
from .lower_bound import rwmd, wcd
from .network import assemble
from .oracle import exact_w1_dense
from .spanner import build_split_tree, build_wspd, emit_arcs

GUARANTEE_MIN_S = 2.0


@dataclass(frozen=True)
class ApproxParams:
    """Knobs for one approximate distance computation."""

    s: float
    use_condensation: bool = True
    seed: int = 0
    best_effort: bool = False
    block_size: int | None = None
    stop_c: float = 4.0
    stop_b: float = 1e5
    threads: int = 1

    def __post_init__(self):
        if self.s <= 0:
            raise ValueError("s must be positive")
        if self.s <= GUARANTEE_MIN_S and not self.best_effort:
            raise ValueError(
                "s <= 2 has no approximation guarantee; pass best_effort=True "
                "to acknowledge"
            )
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class ApproxDiagnostics:
    n_nodes: int = 0
    n_arcs: int = 0
    lower_bound: float = 0.0
    epsilon_condense: float = 0.0
    delta: float = 0.0
    node_drop_pct: float = 0.0
    pivots: int = 0
    blocks_searched: int = 0
    status: str = simplex.OPTIMAL
    short_circuit: bool = False


def condensation_epsilon(s: float) -> float:
    """Intermediate relative error budget used to size the lattice pitch."""
    return 8.0 / (s - 4.0) if s >= 12 else 1.0


def total_error_factor(s: float) -> float:
    """Guaranteed relative error of the full pipeline for s > 4."""
    if s <= 4:
        raise ValueError("the error expression requires s > 4")
    return (1.0 + 4.0 / s + 4.0 / (s - 2.0)) * (1.0 + 8.0 / (s - 4.0)) - 1.0


def s_from_error(eps_target: float) -> int:
    """Smallest integer s >= 12 whose guaranteed error is <= eps_target."""
    if eps_target <= 0:
        raise ValueError("target error must be positive")
    lo = 12
    if total_error_factor(lo) <= eps_target:
        return lo
    hi = lo
    while total_error_factor(hi) > eps_target:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if total_error_factor(mid) <= eps_target:
            hi = mid
        else:
            lo = mid
    return hi


def approx_w1(
    a: PersistenceDiagram,
    b: PersistenceDiagram,
    params: ApproxParams,
) -> tuple[float, ApproxDiagnostics]:
    """Approximate W1(a, b) with sparsity parameter params.s."""
    diag = ApproxDiagnostics()
    nodes0 = zero_condense(a, b)
    if nodes0.points.shape[0] == 0 or np.array_equal(nodes0.a_mass, nodes0.b_mass):
        # empty inputs or identical multisets: the distance is exactly 0
        diag.short_circuit = True
        return 0.0, diag

    lower = rwmd(nodes0, workers=params.threads)
    diag.lower_bound = lower
    eps_c = condensation_epsilon(params.s)
    diag.epsilon_condense = eps_c
    nodes = nodes0
    if params.use_condensation and lower > 0.0:
        delta = compute_delta(eps_c, lower, nodes0.n_points())
        diag.delta = delta
        if delta > 0.0:
            nodes = delta_condense(
                nodes0, CondensationParams(eps_c, delta, seed=params.seed)
            )
    before = nodes0.points.shape[0]
    after = nodes.points.shape[0]
    diag.node_drop_pct = 100.0 * (1.0 - after / before)

    tree = build_split_tree(nodes.points)
    pairs = build_wspd(tree, params.s, workers=params.threads)
    arcs = emit_arcs(pairs, nodes)
    network = assemble(nodes, arcs)
    diag.n_nodes = network.node_count
    diag.n_arcs = network.arc_count
    result = simplex.solve(
        network,
        block_size=params.block_size,
        stop_c=params.stop_c,
        stop_b=params.stop_b,
    )
    diag.pivots = result.pivots
    diag.blocks_searched = result.blocks_searched
    diag.status = result.status
    return result.objective, diag


WCD_STAGE = "wcd"
RWMD_STAGE = "rwmd"
PDFLOW_STAGE = "pdflow"
EXACT_STAGE = "exact"
_STAGE_NAMES = (WCD_STAGE, RWMD_STAGE, PDFLOW_STAGE, EXACT_STAGE)


@dataclass(frozen=True)
class PipelineStage:
    """One filtering stage: a distance algorithm and its survivor count."""

    algorithm: str
    keep: int
    s: float | None = None

    def __post_init__(self):
        if self.algorithm not in _STAGE_NAMES:
            raise ValueError(f"unknown stage algorithm {self.algorithm!r}")
        if self.keep < 1:
            raise ValueError("stage must keep at least one candidate")
        if self.algorithm == PDFLOW_STAGE and (self.s is None or self.s <= 0):
            raise ValueError("pdflow stages need a positive sparsity parameter")


@dataclass(frozen=True)
class PipelineSpec:
    """Staged filtering plan with strictly decreasing survivor counts."""

    stages: tuple[PipelineStage, ...]

    def __post_init__(self):
        if not self.stages:
            raise ValueError("pipeline needs at least one stage")
        keeps = [st.keep for st in self.stages]
        if keeps[-1] != 1:
            raise ValueError("the final stage must keep exactly one candidate")
        if any(x <= y for x, y in zip(keeps, keeps[1:])):
            raise ValueError("survivor counts must be strictly decreasing")


@dataclass
class NNDiagnostics:
    stage_survivors: list[list[int]] = field(default_factory=list)
    stage_scores: list[dict[int, float]] = field(default_factory=list)


def _stage_score(
    stage: PipelineStage,
    query: PersistenceDiagram,
    candidate: PersistenceDiagram,
    seed: int,
    threads: int,
) -> float:
    if stage.algorithm == WCD_STAGE:
        return wcd(query, candidate)
    if stage.algorithm == RWMD_STAGE:
        return rwmd(zero_condense(query, candidate))
    if stage.algorithm == EXACT_STAGE:
        return exact_w1_dense(query, candidate)
    # explicit s in the pipeline spec acknowledges best-effort values s <= 2
    params = ApproxParams(s=stage.s, seed=seed, best_effort=True, threads=1)
    value, _ = approx_w1(query, candidate, params)
    return value


def nn_search(
    query: PersistenceDiagram,
    corpus: list[PersistenceDiagram],
    spec: PipelineSpec,
    seed: int = 0,
    threads: int = 1,
) -> tuple[int, NNDiagnostics]:
    """Index of the corpus diagram the staged pipeline ranks nearest.

    Each stage rescores the surviving candidates with its own algorithm and
    keeps its ``keep`` best; ties break toward the lower corpus index.
    """
    if not corpus:
        raise ValueError("corpus must be nonempty")
    diag = NNDiagnostics()
    survivors = list(range(len(corpus)))
    for stage in spec.stages:
        if threads > 1 and len(survivors) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                scores = list(
                    pool.map(
                        lambda i: _stage_score(stage, query, corpus[i], seed, threads),
                        survivors,
                    )
                )
        else:
            scores = [
                _stage_score(stage, query, corpus[i], seed, threads) for i in survivors
            ]
        ranked = sorted(zip(scores, survivors), key=lambda t: (t[0], t[1]))
        diag.stage_scores.append({i: s for s, i in ranked})
        survivors = [i for _, i in ranked[: stage.keep]]
        diag.stage_survivors.append(list(survivors))
    return survivors[0], diag
