"""Eccentricities, diameter, radius, and Wiener index via separator recursion.

The solver walks a skew k-separator tree.  Below a size threshold it
falls back to all-sources shortest paths.  At an internal node covering
the current vertex set it:

  * runs one shortest-path tree from each separator vertex,
  * adds a shortcut clique on the separator (edge z z' of length d(z,z')),
    which preserves all pairwise distances and makes the two sides
    independent subproblems,
  * for each side, builds one k-dimensional range tree per separator
    vertex z_i over the opposite side's vertices y, placed at coordinates
    d(z_i,y) - d(z_j,y), and queries it once per vertex x with upper
    bounds d(x,z_i) - d(x,z_j), strict (via an integer -1) for j < i.

A point y satisfies the box for exactly the minimum index i attaining
min_j d(x,z_j) + d(z_j,y), which equals d(x,y) because the separator
meets every x,y-path.  Folding d(z_i,y) under max therefore yields the
farthest such y per (x, z_i); adding d(x,z_i) and maximising over i gives
the eccentricity of x into the far side.  Folding (1, d(z_i,y)) under
componentwise addition instead counts each far-side vertex exactly once,
which is what the Wiener cross terms need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .decomposition import SkewSeparatorNode, SkewSeparatorTree
from .graph import (
    UNREACHABLE,
    DisconnectedGraphError,
    DistanceReport,
    DistanceRow,
    Graph,
    add_shortcut_clique,
    distance_rows,
    induced_subgraph,
)
from .rangetree import (
    CountSum,
    MaxDistance,
    Monoid,
    fold_box_batches,
)

_I64_MIN = np.iinfo(np.int64).min


@dataclass
class TwRunCounters:
    """Work accounting for one solver run."""

    sssp_runs: int = 0
    base_case_nodes: int = 0
    internal_nodes: int = 0
    recursion_depth: int = 0
    tree_builds: int = 0
    max_build_canonical: int = 0
    max_query_visited: int = 0

    def as_dict(self) -> dict:
        return {
            "sssp_runs": self.sssp_runs,
            "base_case_nodes": self.base_case_nodes,
            "internal_nodes": self.internal_nodes,
            "recursion_depth": self.recursion_depth,
            "tree_builds": self.tree_builds,
            "max_build_canonical": self.max_build_canonical,
            "max_query_visited": self.max_query_visited,
        }


def base_case_threshold(n: int, k: int) -> bool:
    """Stop recursing when n / ln n < 4k(k+1), or n is tiny."""
    if n <= 3:
        return True
    return n / math.log(n) < 4 * k * (k + 1)


@dataclass
class VisitingEccTable:
    """Per (separator index, source) aggregates over far-side vertices.

    For MaxDistance, ``values[0][i, j]`` holds the largest d(z_i, y) over
    far-side vertices y attributed to z_i for source x_j (int64 minimum
    when no y qualifies).  For CountSum the two arrays hold counts and
    distance sums.
    """

    monoid: Monoid
    values: tuple[np.ndarray, ...]

    @property
    def k(self) -> int:
        return self.values[0].shape[0]

    def entry(self, i: int, x_pos: int):
        return self.monoid.decode([v[i, x_pos] for v in self.values])


def visiting_eccentricities(
    dz_to_y: np.ndarray,
    dz_to_x: np.ndarray,
    monoid: Monoid,
    *,
    drop_trivial_dim: bool = False,
    counters: Optional[TwRunCounters] = None,
) -> VisitingEccTable:
    """Aggregate, per separator vertex, over its attributed far vertices.

    ``dz_to_y[i]`` holds d(z_i, y) for the far-side vertices, ``dz_to_x[i]``
    holds d(z_i, x) for the query vertices.  One range tree is built per
    separator index and queried once per x.  The i-th coordinate is
    identically zero with upper bound zero; ``drop_trivial_dim`` removes
    it, shaving one dimension without changing any result.
    """
    k, ny = dz_to_y.shape
    _, nx = dz_to_x.shape
    if k < 1 or ny < 1:
        raise ValueError("need at least one separator vertex and one target")
    kinds = monoid.channel_kinds
    outs = [
        np.full((k, nx), _I64_MIN, dtype=np.int64)
        if kind == "max"
        else np.zeros((k, nx), dtype=np.int64)
        for kind in kinds
    ]
    for i in range(k):
        dims = [j for j in range(k) if j != i] if drop_trivial_dim else list(range(k))
        values = dz_to_y[i]
        chans = _encode_channels(kinds, values, ny)
        if not dims:
            # single separator vertex with its coordinate dropped: every
            # target qualifies, the fold covers all of them
            for c, kind in enumerate(kinds):
                fold = int(values.max()) if kind == "max" else int(chans[c].sum())
                outs[c][i, :] = fold
            continue
        coords = (dz_to_y[i][None, :] - dz_to_y[dims]).T
        lo = np.full((nx, len(dims)), _I64_MIN, dtype=np.int64)
        hi = (dz_to_x[i][None, :] - dz_to_x[dims]).T.copy()
        strict = [pos for pos, j in enumerate(dims) if j < i]
        if strict:
            hi[:, strict] -= 1
        res = fold_box_batches(coords, kinds, chans, lo, hi)
        for c in range(len(kinds)):
            outs[c][i, :] = res.answers[c]
        if counters is not None:
            counters.tree_builds += 1
            counters.max_build_canonical = max(
                counters.max_build_canonical, res.canonical_size_total
            )
            counters.max_query_visited = max(counters.max_query_visited, res.max_visited())
    return VisitingEccTable(monoid, tuple(outs))


def _encode_channels(kinds, values: np.ndarray, ny: int):
    if kinds == ("max",):
        return (values,)
    if kinds == ("sum", "sum"):
        return (np.ones(ny, dtype=np.int64), values)
    raise ValueError(f"unsupported channel layout {kinds!r}")


def combine_visiting(dist_to_z: Sequence[int], table: VisitingEccTable, x_pos: int) -> int:
    """Eccentricity into the far side: max over i of d(x,z_i) + entry."""
    best = None
    for i in range(table.k):
        e = table.values[0][i, x_pos]
        if e == _I64_MIN:
            continue
        cand = int(dist_to_z[i]) + int(e)
        if best is None or cand > best:
            best = cand
    if best is None:
        raise ValueError("no separator vertex reaches any far-side vertex")
    return best


def _combined_table(
    dz_to_y: np.ndarray,
    dz_to_x: np.ndarray,
    want_ecc: bool,
    want_wiener: bool,
    drop_trivial_dim: bool,
    counters: Optional[TwRunCounters],
) -> tuple[Optional[np.ndarray], Optional[np.ndarray], Optional[np.ndarray]]:
    """One engine pass per separator index computing both aggregates.

    Returns (max values, counts, sums), each of shape (k, nx), with None
    for aggregates that were not requested.
    """
    k, ny = dz_to_y.shape
    _, nx = dz_to_x.shape
    kinds: list[str] = []
    if want_ecc:
        kinds.append("max")
    if want_wiener:
        kinds += ["sum", "sum"]
    out = [
        np.full((k, nx), _I64_MIN, dtype=np.int64)
        if kind == "max"
        else np.zeros((k, nx), dtype=np.int64)
        for kind in kinds
    ]
    for i in range(k):
        dims = [j for j in range(k) if j != i] if drop_trivial_dim else list(range(k))
        values = dz_to_y[i]
        chans = []
        for kind in kinds:
            if kind == "max":
                chans.append(values)
        if want_wiener:
            chans.append(np.ones(ny, dtype=np.int64))
            chans.append(values)
        if not dims:
            pos = 0
            if want_ecc:
                out[pos][i, :] = int(values.max())
                pos += 1
            if want_wiener:
                out[pos][i, :] = ny
                out[pos + 1][i, :] = int(values.sum())
            continue
        coords = (dz_to_y[i][None, :] - dz_to_y[dims]).T
        lo = np.full((nx, len(dims)), _I64_MIN, dtype=np.int64)
        hi = (dz_to_x[i][None, :] - dz_to_x[dims]).T.copy()
        strict = [pos for pos, j in enumerate(dims) if j < i]
        if strict:
            hi[:, strict] -= 1
        res = fold_box_batches(coords, tuple(kinds), tuple(chans), lo, hi)
        for c in range(len(kinds)):
            out[c][i, :] = res.answers[c]
        if counters is not None:
            counters.tree_builds += 1
            counters.max_build_canonical = max(
                counters.max_build_canonical, res.canonical_size_total
            )
            counters.max_query_visited = max(counters.max_query_visited, res.max_visited())
    pos = 0
    maxes = counts = sums = None
    if want_ecc:
        maxes = out[pos]
        pos += 1
    if want_wiener:
        counts = out[pos]
        sums = out[pos + 1]
    return maxes, counts, sums


def _all_rows(g: Graph, counters: TwRunCounters) -> np.ndarray:
    rows = distance_rows(g)
    counters.sssp_runs += g.n
    if np.any(rows == UNREACHABLE):
        raise DisconnectedGraphError("graph is not connected")
    return rows


def _solve(
    g: Graph,
    node: SkewSeparatorNode,
    orig_ids: np.ndarray,
    k: int,
    want_ecc: bool,
    want_wiener: bool,
    counters: TwRunCounters,
    depth: int,
    base_case_limit: Optional[int],
    drop_trivial_dim: bool,
) -> tuple[Optional[np.ndarray], Optional[int]]:
    n = g.n
    counters.recursion_depth = max(counters.recursion_depth, depth)
    forced = base_case_limit is not None and n <= base_case_limit
    if node.is_leaf or forced or base_case_threshold(n, k):
        counters.base_case_nodes += 1
        rows = _all_rows(g, counters)
        ecc = rows.max(axis=1) if want_ecc else None
        wiener = int(rows[np.triu_indices(n, k=1)].sum()) if want_wiener else None
        return ecc, wiener
    counters.internal_nodes += 1

    local_of = {int(o): i for i, o in enumerate(orig_ids)}
    z_local = [local_of[zo] for zo in node.separator]
    kz = len(z_local)
    if kz == 0:
        raise AssertionError("internal separator node with empty separator")

    dz = distance_rows(g, z_local)
    counters.sssp_runs += kz
    if np.any(dz == UNREACHABLE):
        raise DisconnectedGraphError("graph is not connected")

    rows_for_clique = [
        DistanceRow(z_local[i], tuple(int(v) for v in dz[i])) for i in range(kz)
    ]
    g_aug = add_shortcut_clique(g, z_local, rows_for_clique)

    x_local = sorted(local_of[v] for v in node.left.vertices)
    y_local = sorted(local_of[v] for v in node.right.vertices)
    zset = set(z_local)
    x_only = [v for v in x_local if v not in zset]
    y_only = [v for v in y_local if v not in zset]

    ecc_parts: dict[int, int] = {}
    wiener_cross = 0

    for queries, far_all, far_only in ((x_local, y_local, y_only), (y_local, x_local, x_only)):
        dz_to_q = dz[:, queries]
        if want_ecc:
            maxes, _, _ = _combined_table(
                dz[:, far_all], dz_to_q, True, False, drop_trivial_dim, counters
            )
            reach = maxes != _I64_MIN
            totals = np.where(reach, maxes + dz_to_q, _I64_MIN)
            if not np.all(reach.any(axis=0)):
                raise AssertionError("some vertex saw no far-side target")
            far_ecc = totals.max(axis=0)
            for pos, v in enumerate(queries):
                prev = ecc_parts.get(v)
                e = int(far_ecc[pos])
                ecc_parts[v] = e if prev is None or e > prev else prev
        if want_wiener and queries is x_local:
            if far_only and x_only:
                dz_to_xo = dz[:, x_only]
                _, counts, sums = _combined_table(
                    dz[:, far_only], dz_to_xo, False, True, drop_trivial_dim, counters
                )
                contrib = counts * dz_to_xo + sums
                wiener_cross = int(contrib.sum())
                if int(counts.sum(axis=0).min()) != len(far_only) or int(
                    counts.sum(axis=0).max()
                ) != len(far_only):
                    raise AssertionError("attribution must cover each far vertex exactly once")

    # recurse on both sides of the augmented graph
    results = []
    for child, members in ((node.left, x_local), (node.right, y_local)):
        sub, positions = induced_subgraph(g_aug, members)
        child_orig = orig_ids[np.asarray(positions, dtype=np.int64)]
        results.append(
            _solve(
                sub,
                child,
                child_orig,
                k,
                want_ecc,
                want_wiener,
                counters,
                depth + 1,
                base_case_limit,
                drop_trivial_dim,
            )
        )
    (ecc_x, wien_x), (ecc_y, wien_y) = results

    ecc = None
    if want_ecc:
        ecc = np.full(n, -1, dtype=np.int64)
        for members, sub_ecc in ((x_local, ecc_x), (y_local, ecc_y)):
            for pos, v in enumerate(members):
                near = int(sub_ecc[pos])
                cand = max(near, ecc_parts[v])
                if cand > ecc[v]:
                    ecc[v] = cand
        for i, zv in enumerate(z_local):
            ecc[zv] = int(dz[i].max())
        if np.any(ecc < 0):
            raise AssertionError("a vertex was left without an eccentricity")

    wiener = None
    if want_wiener:
        wien_z = 0
        for i in range(kz):
            for j in range(i + 1, kz):
                wien_z += int(dz[i, z_local[j]])
        wiener = wien_x + wien_y - wien_z + wiener_cross
    return ecc, wiener


def _run(
    g: Graph,
    t: SkewSeparatorTree,
    want_ecc: bool,
    want_wiener: bool,
    counters: Optional[TwRunCounters],
    base_case_limit: Optional[int],
    drop_trivial_dim: bool,
) -> tuple[Optional[np.ndarray], Optional[int], TwRunCounters]:
    if g.n == 0:
        raise ValueError("empty graph has no distance report")
    if t.root.vertices != frozenset(range(g.n)):
        raise ValueError("separator tree does not cover the graph's vertices")
    counters = counters if counters is not None else TwRunCounters()
    ecc, wiener = _solve(
        g,
        t.root,
        np.arange(g.n, dtype=np.int64),
        t.k,
        want_ecc,
        want_wiener,
        counters,
        1,
        base_case_limit,
        drop_trivial_dim,
    )
    return ecc, wiener, counters


def eccentricities_tw(
    g: Graph,
    t: SkewSeparatorTree,
    *,
    counters: Optional[TwRunCounters] = None,
    base_case_limit: Optional[int] = None,
    drop_trivial_dim: bool = False,
) -> DistanceReport:
    """Exact eccentricities (and diameter, radius) of a connected graph."""
    ecc, _, _ = _run(g, t, True, False, counters, base_case_limit, drop_trivial_dim)
    return DistanceReport.from_eccentricities(ecc.tolist())


def wiener_tw(
    g: Graph,
    t: SkewSeparatorTree,
    *,
    counters: Optional[TwRunCounters] = None,
    base_case_limit: Optional[int] = None,
    drop_trivial_dim: bool = False,
) -> int:
    """Sum of shortest-path distances over unordered vertex pairs."""
    _, wiener, _ = _run(g, t, False, True, counters, base_case_limit, drop_trivial_dim)
    return wiener


def distance_report_tw(
    g: Graph,
    t: SkewSeparatorTree,
    *,
    counters: Optional[TwRunCounters] = None,
    base_case_limit: Optional[int] = None,
    drop_trivial_dim: bool = False,
) -> DistanceReport:
    """Eccentricities, diameter, radius, and Wiener index in one pass."""
    ecc, wiener, _ = _run(g, t, True, True, counters, base_case_limit, drop_trivial_dim)
    return DistanceReport.from_eccentricities(ecc.tolist(), wiener)
