"""Command-line front end.

Exit codes: 0 success (solver optimal), 2 usage error, 3 input validation
error, 4 solver aborted by the stall budget (the feasible value is still
printed).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import simplex
from .diagram import DiagramFormatError, load_diagram, serialize_diagram, zero_condense
from .lower_bound import rwmd, wcd
from .network import NetworkError
from .oracle import OracleSizeError, exact_w1_bruteforce, exact_w1_dense
from .pipeline import (
    ApproxParams,
    PipelineSpec,
    PipelineStage,
    approx_w1,
    nn_search,
    s_from_error,
)
from .synth import gaussian_cluster_pair

JSON_SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_ABORTED = 4


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _load(path: str):
    diagram, dropped = load_diagram(path)
    if dropped:
        print(f"# {path}: dropped {dropped} zero-persistence point(s)", file=sys.stderr)
    return diagram


def _parse_pipeline(text: str) -> PipelineSpec:
    stages = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            raise ValueError("empty pipeline stage")
        name, _, rest = token.partition(":")
        if not rest:
            raise ValueError(f"stage {token!r} needs a candidate count")
        count_text, _, s_text = rest.partition("@")
        keep = int(count_text)
        s = float(s_text) if s_text else None
        stages.append(PipelineStage(algorithm=name.strip(), keep=keep, s=s))
    return PipelineSpec(tuple(stages))


def _cmd_dist(args) -> int:
    start = time.perf_counter()
    a = _load(args.diagram_a)
    b = _load(args.diagram_b)
    s = float(args.s) if args.s is not None else float(s_from_error(args.error))
    params = ApproxParams(
        s=s,
        use_condensation=not args.no_condensation,
        seed=args.seed,
        best_effort=args.best_effort,
        block_size=args.block_size,
        stop_c=args.stop_c,
        stop_b=args.stop_b,
        threads=args.threads,
    )
    value, diag = approx_w1(a, b, params)
    elapsed = time.perf_counter() - start
    if args.json:
        payload = {
            "schema": JSON_SCHEMA_VERSION,
            "distance": value,
            "s": s,
            "n": diag.n_nodes,
            "m": diag.n_arcs,
            "delta": diag.delta,
            "lower_bound": diag.lower_bound,
            "node_drop_pct": diag.node_drop_pct,
            "pivots": diag.pivots,
            "blocks_searched": diag.blocks_searched,
            "status": diag.status,
            "wall_time_s": elapsed,
        }
        print(json.dumps(payload, sort_keys=True))
    else:
        print(_fmt(value))
    return EXIT_OK if diag.status == simplex.OPTIMAL else EXIT_ABORTED


def _cmd_exact(args) -> int:
    a = _load(args.diagram_a)
    b = _load(args.diagram_b)
    if args.method == "bruteforce":
        value = exact_w1_bruteforce(a, b)
    else:
        value = exact_w1_dense(a, b)
    print(_fmt(value))
    return EXIT_OK


def _cmd_rwmd(args) -> int:
    a = _load(args.diagram_a)
    b = _load(args.diagram_b)
    print(_fmt(rwmd(zero_condense(a, b), workers=args.threads)))
    return EXIT_OK


def _cmd_wcd(args) -> int:
    a = _load(args.diagram_a)
    b = _load(args.diagram_b)
    print(_fmt(wcd(a, b)))
    return EXIT_OK


def _cmd_nn(args) -> int:
    query = _load(args.query)
    corpus_dir = Path(args.corpus_dir)
    if not corpus_dir.is_dir():
        raise DiagramFormatError(f"{corpus_dir}: not a directory")
    files = sorted(p for p in corpus_dir.iterdir() if p.is_file())
    if not files:
        raise DiagramFormatError(f"{corpus_dir}: no corpus files")
    corpus = [_load(str(p)) for p in files]
    try:
        spec = _parse_pipeline(args.pipeline)
    except ValueError as exc:
        print(f"error: invalid pipeline: {exc}", file=sys.stderr)
        return EXIT_USAGE
    index, _ = nn_search(query, corpus, spec, seed=args.seed, threads=args.threads)
    print(files[index].name)
    return EXIT_OK


def _cmd_bench(args) -> int:
    sizes = [int(tok) for tok in str(args.points).split(",") if tok.strip()]
    print("points,nodes,arcs,delta,lower_bound,node_drop_pct,pivots,status,objective,wall_time_s")
    for total in sizes:
        n_a = total // 2
        n_b = total - n_a
        a, b = gaussian_cluster_pair(
            n_a, n_b, seed=args.seed, n_clusters=args.clusters, spread=args.spread
        )
        if args.out_dir:
            out = Path(args.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"pair{total}_a.txt").write_text(serialize_diagram(a))
            (out / f"pair{total}_b.txt").write_text(serialize_diagram(b))
        params = ApproxParams(s=args.s, seed=args.seed, best_effort=args.s <= 2)
        start = time.perf_counter()
        value, diag = approx_w1(a, b, params)
        elapsed = time.perf_counter() - start
        row = (
            f"{total},{diag.n_nodes},{diag.n_arcs},{diag.delta!r},{diag.lower_bound!r},"
            f"{diag.node_drop_pct:.2f},{diag.pivots},{diag.status},{_fmt(value)},{elapsed:.4f}"
        )
        print(row)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="w1flow",
        description="Approximate 1-Wasserstein distances between persistence diagrams",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    dist = sub.add_parser("dist", help="approximate W1 distance between two diagrams")
    dist.add_argument("diagram_a")
    dist.add_argument("diagram_b")
    group = dist.add_mutually_exclusive_group(required=True)
    group.add_argument("--s", type=float, help="sparsity parameter")
    group.add_argument("--error", type=float, help="target guaranteed relative error")
    dist.add_argument("--no-condensation", action="store_true")
    dist.add_argument("--seed", type=int, default=0)
    dist.add_argument("--threads", type=int, default=1)
    dist.add_argument("--block-size", type=int, default=None)
    dist.add_argument("--stop-c", type=float, default=4.0)
    dist.add_argument("--stop-b", type=float, default=1e5)
    dist.add_argument("--best-effort", action="store_true")
    dist.add_argument("--json", action="store_true")
    dist.set_defaults(func=_cmd_dist)

    exact = sub.add_parser("exact", help="exact W1 (size-guarded oracle)")
    exact.add_argument("diagram_a")
    exact.add_argument("diagram_b")
    exact.add_argument("--method", choices=("dense", "bruteforce"), default="dense")
    exact.set_defaults(func=_cmd_exact)

    lb = sub.add_parser("rwmd", help="relaxed-transport lower bound")
    lb.add_argument("diagram_a")
    lb.add_argument("diagram_b")
    lb.add_argument("--threads", type=int, default=1)
    lb.set_defaults(func=_cmd_rwmd)

    wc = sub.add_parser("wcd", help="centroid lower bound")
    wc.add_argument("diagram_a")
    wc.add_argument("diagram_b")
    wc.set_defaults(func=_cmd_wcd)

    nn = sub.add_parser("nn", help="nearest corpus diagram under a staged pipeline")
    nn.add_argument("query")
    nn.add_argument("corpus_dir")
    nn.add_argument(
        "--pipeline",
        required=True,
        help='stages "alg:count[@s]", e.g. "rwmd:15,pdflow:3@1,pdflow:1@18"',
    )
    nn.add_argument("--seed", type=int, default=0)
    nn.add_argument("--threads", type=int, default=1)
    nn.set_defaults(func=_cmd_nn)

    bench = sub.add_parser("bench", help="synthetic scaling benchmark (CSV rows)")
    bench.add_argument("--points", required=True, help="total points, or a comma list")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--s", type=float, default=40.0)
    bench.add_argument("--clusters", type=int, default=8)
    bench.add_argument("--spread", type=float, default=0.5)
    bench.add_argument("--out-dir", default=None, help="also write the generated pairs")
    bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DiagramFormatError, OracleSizeError, NetworkError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
