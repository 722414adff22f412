"""Distance parameters of unweighted graphs with a small vertex cover.

Every vertex outside a cover C has its whole neighbourhood inside C, so
vertices with equal neighbourhoods are interchangeable: there are at most
2^|C| distinct classes and one search per class settles them all.  The
direct algorithm runs one breadth-first search per cover vertex and per
class.  The faster eccentricity algorithm never searches the whole graph:
it inserts length-2 shortcuts between cover vertices sharing an outside
neighbour, runs Dijkstra inside the cover (plus one outside vertex), and
consults a subset table h to decide whether some outside vertex lies one
step beyond the in-cover eccentric set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .graph import (
    UNREACHABLE,
    DisconnectedGraphError,
    DistanceReport,
    Graph,
    check_connected,
    dijkstra,
    distance_rows,
)

_SUBSET_TABLE_LIMIT = 25


class CoverTooLargeError(ValueError):
    """No vertex cover within the requested size bound."""


@dataclass(frozen=True)
class VertexCover:
    vertices: frozenset[int]

    @property
    def k(self) -> int:
        return len(self.vertices)

    def ordered(self) -> tuple[int, ...]:
        return tuple(sorted(self.vertices))


@dataclass
class VcCounters:
    """Search accounting; at most 2^k + k searches per run."""

    sssp_runs: int = 0

    def as_dict(self) -> dict:
        return {"sssp_runs": self.sssp_runs}


def is_vertex_cover(g: Graph, vertices: Iterable[int]) -> bool:
    cs = set(vertices)
    return all(u in cs or v in cs for u, v, _ in g.edges)


def find_vertex_cover(g: Graph, k_max: int) -> VertexCover:
    """Minimum vertex cover, by bounded search over uncovered edges.

    Tries budgets 0..k_max; each budget branches on the two endpoints of
    the first uncovered edge, so the work is within 2^(k_max+1) scans.
    Raises CoverTooLargeError when the minimum exceeds k_max.
    """
    if not g.is_unit_weight():
        raise ValueError("vertex cover algorithms expect an unweighted graph")
    edges = [(u, v) for u, v, _ in g.edges]

    def search(chosen: set[int], budget: int) -> Optional[set[int]]:
        uncovered = None
        for u, v in edges:
            if u not in chosen and v not in chosen:
                uncovered = (u, v)
                break
        if uncovered is None:
            return set(chosen)
        if budget == 0:
            return None
        u, v = uncovered
        for pick in (u, v):
            chosen.add(pick)
            got = search(chosen, budget - 1)
            chosen.discard(pick)
            if got is not None:
                return got
        return None

    for budget in range(0, k_max + 1):
        got = search(set(), budget)
        if got is not None:
            return VertexCover(frozenset(got))
    raise CoverTooLargeError(f"no vertex cover of size <= {k_max}")


def _neighborhood_classes(
    g: Graph, cover: tuple[int, ...]
) -> tuple[dict[int, list[int]], dict[int, int]]:
    """Group outside vertices by their cover-neighbourhood bitmask."""
    bit = {c: i for i, c in enumerate(cover)}
    classes: dict[int, list[int]] = {}
    for v in range(g.n):
        if v in bit:
            continue
        mask = 0
        for u, _ in g.adjacency[v]:
            b = bit.get(u)
            if b is None:
                raise ValueError(f"vertex {v} has neighbour {u} outside the cover")
            mask |= 1 << b
        classes.setdefault(mask, []).append(v)
    return classes, bit


def ecc_wiener_vc(
    g: Graph, c: VertexCover, counters: Optional[VcCounters] = None
) -> DistanceReport:
    """Eccentricities and Wiener index with one search per class.

    Vertices sharing a neighbourhood share a distance profile, so one
    breadth-first search per cover vertex plus one per distinct outside
    neighbourhood suffices.  Half-sums are accumulated doubled and halved
    once at the end, keeping the arithmetic exact.
    """
    if not g.is_unit_weight():
        raise ValueError("this algorithm expects an unweighted graph")
    if not is_vertex_cover(g, c.vertices):
        raise ValueError("the given set is not a vertex cover")
    if g.n == 0:
        raise ValueError("empty graph has no distance report")
    counters = counters if counters is not None else VcCounters()
    cover = c.ordered()
    classes, _ = _neighborhood_classes(g, cover)
    reps = [members[0] for _, members in sorted(classes.items())]
    sources = list(cover) + reps
    rows = distance_rows(g, sources)
    counters.sssp_runs += len(sources)
    if counters.sssp_runs > 2 ** c.k + c.k:
        raise AssertionError("search budget 2^k + k exceeded")
    if np.any(rows == UNREACHABLE):
        raise DisconnectedGraphError("graph is not connected")
    ecc = [0] * g.n
    doubled = 0
    for i, v in enumerate(cover):
        ecc[v] = int(rows[i].max())
        doubled += int(rows[i].sum())
    for j, (_, members) in enumerate(sorted(classes.items())):
        row = rows[len(cover) + j]
        e = int(row.max())
        s = int(row.sum())
        for v in members:
            ecc[v] = e
            doubled += s
    if doubled % 2 != 0:
        raise AssertionError("pair sum must be even")
    return DistanceReport.from_eccentricities(ecc, doubled // 2)


class HTable:
    """For each cover subset: does it contain zero, one, or many outside
    neighbourhoods?

    States per bitmask S: 0 when no outside vertex has all neighbours in
    S, 1 when exactly one does (its id is recorded), 2 otherwise.
    """

    def __init__(self, k: int, state: np.ndarray, witness: np.ndarray):
        self.k = k
        self._state = state
        self._witness = witness

    def kind(self, mask: int) -> str:
        return ("empty", "unique", "many")[int(self._state[mask])]

    def witness(self, mask: int) -> Optional[int]:
        return int(self._witness[mask]) if self._state[mask] == 1 else None

    def excluding(self, mask: int, v: int) -> bool:
        """True iff some outside vertex other than v fits inside mask."""
        s = int(self._state[mask])
        if s == 2:
            return True
        if s == 1:
            return int(self._witness[mask]) != v
        return False


def compute_h(c: VertexCover, outside: Sequence[tuple[int, Iterable[int]]]) -> HTable:
    """Subset table over the cover, built bottom-up by set size.

    ``outside`` pairs each vertex with its neighbourhood (a subset of the
    cover).  Exact-neighbourhood seeds are merged with every child subset
    of each mask, deduplicating witnesses, in O(2^k * k) set operations.
    """
    cover = c.ordered()
    k = len(cover)
    if k > _SUBSET_TABLE_LIMIT:
        raise MemoryError(f"subset table for k={k} exceeds the limit {_SUBSET_TABLE_LIMIT}")
    bit = {v: i for i, v in enumerate(cover)}
    size = 1 << k
    state = np.zeros(size, dtype=np.uint8)
    witness = np.full(size, -1, dtype=np.int64)

    def absorb(mask: int, w: int):
        if state[mask] == 0:
            state[mask] = 1
            witness[mask] = w
        elif state[mask] == 1 and witness[mask] != w:
            state[mask] = 2

    for w, nbrs in outside:
        mask = 0
        for u in nbrs:
            if u not in bit:
                raise ValueError(f"neighbourhood of {w} leaves the cover: {u}")
            mask |= 1 << bit[u]
        absorb(mask, w)

    for mask in sorted(range(size), key=lambda m: m.bit_count()):
        if mask == 0:
            continue
        m = mask
        while m and state[mask] != 2:
            b = m & -m
            child = mask ^ b
            if state[child] == 2:
                state[mask] = 2
            elif state[child] == 1:
                absorb(mask, int(witness[child]))
            m ^= b
    return HTable(k, state, witness)


def ecc_fast_vc(
    g: Graph, c: VertexCover, counters: Optional[VcCounters] = None
) -> list[int]:
    """Eccentricities without ever searching the whole graph.

    Shortcuts of length 2 join cover vertices that share an outside
    neighbour, making the cover-induced subgraph distance-preserving.
    Each search then runs inside the cover (plus one class
    representative); whether the true eccentricity is one more than the
    in-cover maximum is read off the subset table: some other vertex must
    have its entire neighbourhood among the eccentric set.
    """
    if not g.is_unit_weight():
        raise ValueError("this algorithm expects an unweighted graph")
    if not is_vertex_cover(g, c.vertices):
        raise ValueError("the given set is not a vertex cover")
    if not check_connected(g):
        raise DisconnectedGraphError("graph is not connected")
    if g.n == 0:
        raise ValueError("empty graph has no eccentricities")
    counters = counters if counters is not None else VcCounters()
    cover = c.ordered()
    k = len(cover)
    if k == 0:
        # no edges and connected: a single vertex
        return [0] * g.n
    classes, _ = _neighborhood_classes(g, cover)
    h = compute_h(
        c, [(v, _mask_bits(mask, cover)) for mask, members in sorted(classes.items()) for v in members]
    )

    local = {v: i for i, v in enumerate(cover)}
    cover_edges = [
        (local[u], local[v], 1) for u, v, _ in g.edges if u in local and v in local
    ]
    for mask in classes:
        bits = _mask_positions(mask)
        for a_pos in range(len(bits)):
            for b_pos in range(a_pos + 1, len(bits)):
                cover_edges.append((bits[a_pos], bits[b_pos], 2))
    core = Graph(k, cover_edges)

    ecc = [0] * g.n
    for v in cover:
        row = dijkstra(core, local[v]).dist
        counters.sssp_runs += 1
        if any(x is None for x in row):
            raise AssertionError("shortcut core must stay connected")
        d = max(row)
        emask = 0
        for i, dist in enumerate(row):
            if dist == d:
                emask |= 1 << i
        ecc[v] = d + 1 if h.excluding(emask, v) else d

    for mask, members in sorted(classes.items()):
        rep = members[0]
        ext_edges = list(core.edges) + [(b, k, 1) for b in _mask_positions(mask)]
        ext = Graph(k + 1, ext_edges)
        row = dijkstra(ext, k).dist
        counters.sssp_runs += 1
        in_cover = row[:k]
        if any(x is None for x in in_cover):
            raise AssertionError("class search must reach the whole cover")
        d = max(in_cover)
        emask = 0
        for i, dist in enumerate(in_cover):
            if dist == d:
                emask |= 1 << i
        for u in members:
            ecc[u] = d + 1 if h.excluding(emask, u) else d

    if counters.sssp_runs > 2**k + k:
        raise AssertionError("search budget 2^k + k exceeded")
    return ecc


def _mask_positions(mask: int) -> list[int]:
    out = []
    b = 0
    while mask:
        if mask & 1:
            out.append(b)
        mask >>= 1
        b += 1
    return out


def _mask_bits(mask: int, cover: tuple[int, ...]) -> list[int]:
    return [cover[i] for i in _mask_positions(mask)]
