"""Command-line interface: distance reports, benchmarks, validation.

Exit codes: 0 success, 1 failed validation, 2 malformed or unusable
input, 3 disconnected graph, 4 distance overflow.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional

from .cover_distances import (
    CoverTooLargeError,
    VcCounters,
    ecc_wiener_vc,
    find_vertex_cover,
)
from .decomposition import (
    heuristic_td,
    parse_td,
    skew_separator_tree,
    validate_sst,
    validate_td,
)
from .graph import (
    DisconnectedGraphError,
    DistanceOverflowError,
    DistanceReport,
    Graph,
    ParseError,
    check_connected,
    parse_graph,
)
from .generators import gen_partial_ktree
from .oracle import report_oracle
from .rangetree import binomial_bound
from .separator_distances import TwRunCounters, distance_report_tw

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_PARSE = 2
EXIT_DISCONNECTED = 3
EXIT_OVERFLOW = 4


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _load_graph(path: str) -> Graph:
    return parse_graph(_read(path))


def _report_lines(report: DistanceReport) -> list[str]:
    lines = [
        f"eccentricity {v + 1} {e}" for v, e in enumerate(report.eccentricities)
    ]
    lines.append(f"diameter {report.diameter}")
    lines.append(f"radius {report.radius}")
    if report.wiener is not None:
        lines.append(f"wiener {report.wiener}")
    return lines


def _emit_text(report: DistanceReport, algo: str, k: Optional[int], counters: dict, out):
    print(f"# algorithm {algo}" + (f" k={k}" if k is not None else ""), file=out)
    for line in _report_lines(report):
        print(line, file=out)
    for name, value in counters.items():
        print(f"# counter {name} {value}", file=out)


def _emit_json(report: DistanceReport, algo: str, k: Optional[int], counters: dict, n: int, out):
    doc = {
        "n": n,
        "k": k,
        "algorithm": algo,
        "eccentricities": list(report.eccentricities),
        "diameter": report.diameter,
        "radius": report.radius,
        "wiener": report.wiener,
        "counters": counters,
    }
    print(json.dumps(doc, separators=(",", ":"), sort_keys=False), file=out)


def cmd_distances(args, out=None) -> int:
    out = out if out is not None else sys.stdout
    g = _load_graph(args.input)
    if g.n == 0:
        raise ParseError("graph has no vertices")
    if not check_connected(g):
        raise DisconnectedGraphError("input graph is not connected")
    if args.algo == "oracle":
        report = report_oracle(g)
        k = None
        counters: dict = {}
    elif args.algo == "vc":
        if not g.is_unit_weight():
            raise ParseError("--algo vc requires an unweighted graph")
        cover = find_vertex_cover(g, args.kmax)
        cnt = VcCounters()
        report = ecc_wiener_vc(g, cover, cnt)
        k = cover.k
        counters = cnt.as_dict()
    else:
        if args.td is not None:
            td = parse_td(_read(args.td))
            if td.declared_n is not None and td.declared_n != g.n:
                raise ParseError(
                    f"decomposition is for {td.declared_n} vertices, graph has {g.n}"
                )
        else:
            td = heuristic_td(g)
        bad = validate_td(g, td)
        if bad is not None:
            raise ParseError(f"invalid tree decomposition: {bad}")
        k = max(td.width + 1, 1)
        sst = skew_separator_tree(g, td, k)
        cnt = TwRunCounters()
        report = distance_report_tw(
            g, sst, counters=cnt, drop_trivial_dim=args.drop_trivial_dim
        )
        counters = cnt.as_dict()
    if args.format == "json":
        _emit_json(report, args.algo, k, counters, g.n, out)
    else:
        _emit_text(report, args.algo, k, counters, out)
    return EXIT_OK


def _bench_one(task) -> dict:
    n, k, keep_prob, weight_max, seed = task
    g, td = gen_partial_ktree(n, k, keep_prob, weight_max, seed)
    sst = skew_separator_tree(g, td, td.width + 1)
    cnt = TwRunCounters()
    t0 = time.perf_counter()
    distance_report_tw(g, sst, counters=cnt)
    wall_ms = int((time.perf_counter() - t0) * 1000)
    kk = sst.k
    return {
        "n": n,
        "k": kk,
        "build_canonical_total": cnt.max_build_canonical,
        "max_query_visits": cnt.max_query_visited,
        "wall_ms": wall_ms,
        "bound_build": n * kk * binomial_bound(n, kk),
        "bound_query": (1 << kk) * binomial_bound(n, kk),
    }


_BENCH_COLUMNS = [
    "n",
    "k",
    "build_canonical_total",
    "max_query_visits",
    "wall_ms",
    "bound_build",
    "bound_query",
]


def cmd_bench(args, out=None) -> int:
    out = out if out is not None else sys.stdout
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()] if args.sizes else []
    tasks = [
        (n, args.k, args.keep_prob, args.weight_max, args.seed + i)
        for i, n in enumerate(sizes)
    ]
    print(",".join(_BENCH_COLUMNS), file=out)
    if args.parallel and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor() as pool:
            rows = list(pool.map(_bench_one, tasks))
    else:
        rows = [_bench_one(t) for t in tasks]
    for row in rows:
        print(",".join(str(row[c]) for c in _BENCH_COLUMNS), file=out)
    return EXIT_OK


def cmd_validate(args, out=None) -> int:
    out = out if out is not None else sys.stdout
    g = _load_graph(args.input)
    td = parse_td(_read(args.td))
    if td.declared_n is not None and td.declared_n != g.n:
        raise ParseError(f"decomposition is for {td.declared_n} vertices, graph has {g.n}")
    bad = validate_td(g, td)
    if bad is not None:
        print(f"invalid: {bad}", file=out)
        return EXIT_INVALID
    print(f"valid tree decomposition: {len(td.bags)} bags, width {td.width}", file=out)
    if args.check_sst:
        k = args.k if args.k is not None else max(td.width + 1, 1)
        sst = skew_separator_tree(g, td, k)
        bad = validate_sst(g, sst)
        if bad is not None:
            print(f"invalid separator tree: {bad}", file=out)
            return EXIT_INVALID
        print(
            f"valid skew separator tree: k={k}, {sst.node_count()} nodes,"
            f" depth {sst.depth()}",
            file=out,
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="twdist",
        description="Exact eccentricities, diameter, radius, and Wiener index.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("distances", help="compute the distance report of a graph file")
    d.add_argument("input", help="graph file (p tw / p sp format)")
    d.add_argument("--algo", choices=("tw", "vc", "oracle"), default="tw")
    d.add_argument("--td", help="tree decomposition file (.td); only with --algo tw")
    d.add_argument(
        "--heuristic-td",
        action="store_true",
        help="force the min-fill heuristic decomposition (default when no --td)",
    )
    d.add_argument("--kmax", type=int, default=20, help="vertex cover search bound")
    d.add_argument("--format", choices=("text", "json"), default="text")
    d.add_argument("--seed", type=int, default=0, help="accepted for config parity")
    d.add_argument(
        "--drop-trivial-dim",
        action="store_true",
        help="drop the identically-zero coordinate from the range trees",
    )
    d.set_defaults(func=cmd_distances)

    b = sub.add_parser("bench", help="run seeded benchmark instances, emit CSV")
    b.add_argument("--family", choices=("ktree",), default="ktree")
    b.add_argument("--k", type=int, default=2)
    b.add_argument("--sizes", default="", help="comma-separated instance sizes")
    b.add_argument("--keep-prob", type=float, default=0.7)
    b.add_argument("--weight-max", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--parallel", action="store_true", help="run instances concurrently")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("validate", help="validate a tree decomposition file")
    v.add_argument("input", help="graph file")
    v.add_argument("--td", required=True, help="tree decomposition file")
    v.add_argument("--check-sst", action="store_true", help="also extract and check a separator tree")
    v.add_argument("--k", type=int, default=None, help="separator size bound for --check-sst")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CoverTooLargeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DisconnectedGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISCONNECTED
    except (DistanceOverflowError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
