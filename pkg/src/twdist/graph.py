"""Undirected weighted graphs and shortest-path primitives.

Vertices are 0..n-1.  Edge lengths are nonnegative integers that must fit in
an unsigned 64-bit word; all distance arithmetic is checked against that
range.  Graphs and distance rows are immutable after construction, so they
are safe to share between threads.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

U64_MAX = 2**64 - 1

# Distances are exact only while they stay below 2**53 in scipy's float64
# path; larger totals fall back to pure-Python Dijkstra.
_FLOAT_EXACT_LIMIT = 2**53

#: Marker used in integer distance matrices for "no path".
UNREACHABLE = -1


class ParseError(ValueError):
    """Malformed graph or decomposition input."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DisconnectedGraphError(ValueError):
    """Raised when an operation requires a connected graph."""


class DistanceOverflowError(ArithmeticError):
    """A distance sum left the unsigned 64-bit range."""


class Graph:
    """Immutable undirected graph with nonnegative integer edge lengths.

    Parallel edges are collapsed to the minimum length and self-loops are
    rejected, mirroring the duplicate-edge rule used when shortcut cliques
    are added.
    """

    __slots__ = ("n", "edges", "adjacency", "_csr_cache")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, int]]):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        best: dict[tuple[int, int], int] = {}
        for u, v, w in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if w < 0:
                raise ValueError(f"negative edge length {w}")
            if w > U64_MAX:
                raise DistanceOverflowError(f"edge length {w} exceeds 64-bit range")
            key = (u, v) if u < v else (v, u)
            prev = best.get(key)
            if prev is None or w < prev:
                best[key] = w
        self.n = n
        self.edges: tuple[tuple[int, int, int], ...] = tuple(
            (u, v, best[(u, v)]) for (u, v) in sorted(best)
        )
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        self.adjacency: tuple[tuple[tuple[int, int], ...], ...] = tuple(
            tuple(sorted(a)) for a in adj
        )
        self._csr_cache = None

    @property
    def m(self) -> int:
        return len(self.edges)

    def is_unit_weight(self) -> bool:
        return all(w == 1 for _, _, w in self.edges)

    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edges)

    def csr(self):
        """Symmetric CSR adjacency (scipy), cached."""
        if self._csr_cache is None:
            from scipy.sparse import csr_matrix

            rows = []
            cols = []
            data = []
            for u, v, w in self.edges:
                rows += [u, v]
                cols += [v, u]
                data += [w, w]
            self._csr_cache = csr_matrix(
                (np.asarray(data, dtype=np.float64), (rows, cols)),
                shape=(self.n, self.n),
            )
        return self._csr_cache

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class DistanceRow:
    """Shortest-path distances from one source; None marks unreachable."""

    source: int
    dist: tuple[Optional[int], ...]

    def eccentricity(self) -> int:
        if any(d is None for d in self.dist):
            raise DisconnectedGraphError(f"vertex {self.source} cannot reach all vertices")
        return max(self.dist)  # type: ignore[type-var]


@dataclass(frozen=True)
class DistanceReport:
    """Per-vertex eccentricities with the derived graph parameters."""

    eccentricities: tuple[int, ...]
    diameter: int
    radius: int
    wiener: Optional[int] = None

    @staticmethod
    def from_eccentricities(ecc: Sequence[int], wiener: Optional[int] = None) -> "DistanceReport":
        ecc_t = tuple(int(e) for e in ecc)
        return DistanceReport(ecc_t, max(ecc_t), min(ecc_t), wiener)


def dijkstra(g: Graph, source: int) -> DistanceRow:
    """Single-source shortest paths with nonnegative lengths.

    Raises DistanceOverflowError if any relaxed distance would exceed the
    unsigned 64-bit range.
    """
    if not (0 <= source < g.n):
        raise ValueError(f"source {source} out of range")
    dist: list[Optional[int]] = [None] * g.n
    heap: list[tuple[int, int]] = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if dist[u] is not None:
            continue
        dist[u] = d
        for v, w in g.adjacency[u]:
            if dist[v] is None:
                nd = d + w
                if nd > U64_MAX:
                    raise DistanceOverflowError("distance sum exceeds 64-bit range")
                heapq.heappush(heap, (nd, v))
    return DistanceRow(source, tuple(dist))


def bfs(g: Graph, source: int) -> DistanceRow:
    """Hop distances from source; only valid on unit-weight graphs."""
    if not g.is_unit_weight():
        raise ValueError("bfs requires a unit-weight graph")
    if not (0 <= source < g.n):
        raise ValueError(f"source {source} out of range")
    dist: list[Optional[int]] = [None] * g.n
    dist[source] = 0
    q = deque([source])
    while q:
        u = q.popleft()
        du = dist[u]
        for v, _ in g.adjacency[u]:
            if dist[v] is None:
                dist[v] = du + 1
                q.append(v)
    return DistanceRow(source, tuple(dist))


def _rows_python(g: Graph, sources: Sequence[int]) -> np.ndarray:
    out = np.full((len(sources), g.n), UNREACHABLE, dtype=np.int64)
    for i, s in enumerate(sources):
        row = dijkstra(g, s).dist
        for v, d in enumerate(row):
            if d is not None:
                out[i, v] = d
    return out


def distance_rows(g: Graph, sources: Optional[Sequence[int]] = None) -> np.ndarray:
    """Distance rows as an int64 matrix with UNREACHABLE where no path exists.

    Uses the compiled scipy Dijkstra when every possible path length stays
    exactly representable in float64, otherwise the pure-Python routine.
    """
    if sources is None:
        sources = range(g.n)
    sources = list(sources)
    if not sources:
        return np.empty((0, g.n), dtype=np.int64)
    if g.m == 0 or g.total_weight() >= _FLOAT_EXACT_LIMIT:
        return _rows_python(g, sources)
    from scipy.sparse.csgraph import dijkstra as cs_dijkstra

    mat = cs_dijkstra(g.csr(), directed=False, indices=sources)
    mat = np.atleast_2d(mat)
    out = np.full(mat.shape, UNREACHABLE, dtype=np.int64)
    finite = np.isfinite(mat)
    vals = mat[finite]
    if vals.size and np.any(vals != np.floor(vals)):
        raise AssertionError("non-integer distance from integer-weight graph")
    out[finite] = vals.astype(np.int64)
    return out


def check_connected(g: Graph) -> bool:
    """True iff the graph has exactly one connected component."""
    if g.n == 0:
        return True
    seen = bytearray(g.n)
    seen[0] = 1
    stack = [0]
    count = 1
    while stack:
        u = stack.pop()
        for v, _ in g.adjacency[u]:
            if not seen[v]:
                seen[v] = 1
                count += 1
                stack.append(v)
    return count == g.n


def add_shortcut_clique(g: Graph, z: Sequence[int], rows: Sequence[DistanceRow]) -> Graph:
    """Return g with an edge zz' of length d(z,z') for every pair in z.

    rows must hold exact distances from each z (in order).  Duplicate edges
    collapse to the shortest, so existing shorter edges are kept and the
    pairwise distances of the result equal those of g.
    """
    if len(rows) != len(z):
        raise ValueError("one distance row per separator vertex required")
    extra: list[tuple[int, int, int]] = []
    for i, zi in enumerate(z):
        if rows[i].source != zi:
            raise ValueError(f"row {i} has source {rows[i].source}, expected {zi}")
        for zj in z[i + 1 :]:
            d = rows[i].dist[zj]
            if d is None:
                raise DisconnectedGraphError(f"no path between separator vertices {zi} and {zj}")
            extra.append((zi, zj, d))
    return Graph(g.n, list(g.edges) + extra)


def induced_subgraph(g: Graph, u: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """Subgraph on u, keeping edges with both endpoints in u.

    Returns the subgraph and the original vertex id for each new id (new
    ids follow the sorted order of u).
    """
    orig = tuple(sorted(set(u)))
    if orig and not (0 <= orig[0] and orig[-1] < g.n):
        raise ValueError("vertex set not contained in the graph")
    local = {o: i for i, o in enumerate(orig)}
    edges = [
        (local[a], local[b], w)
        for a, b, w in g.edges
        if a in local and b in local
    ]
    return Graph(len(orig), edges), orig


def parse_graph(text: str) -> Graph:
    """Parse a graph file.

    Two line-oriented formats share the layout "header, then one line per
    edge".  Unweighted: header "p tw <n> <m>" with edge lines "u v".
    Weighted: header "p sp <n> <m>" with edge lines "a u v w".  Vertex ids
    in files are 1-based; comment lines start with "c".
    """
    n = None
    m_declared = None
    weighted = False
    edges: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise ParseError("duplicate header", lineno)
            if len(parts) != 4 or parts[1] not in ("tw", "sp"):
                raise ParseError("header must be 'p tw n m' or 'p sp n m'", lineno)
            weighted = parts[1] == "sp"
            try:
                n, m_declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError("non-integer header fields", lineno) from None
            if n < 0 or m_declared < 0:
                raise ParseError("negative header fields", lineno)
            continue
        if n is None:
            raise ParseError("edge line before header", lineno)
        if weighted:
            if len(parts) != 4 or parts[0] != "a":
                raise ParseError("expected 'a u v w'", lineno)
            fields = parts[1:]
        else:
            if len(parts) != 2:
                raise ParseError("expected 'u v'", lineno)
            fields = parts + ["1"]
        try:
            u, v, w = (int(x) for x in fields)
        except ValueError:
            raise ParseError("non-integer edge fields", lineno) from None
        if not (1 <= u <= n and 1 <= v <= n):
            raise ParseError(f"vertex id out of range 1..{n}", lineno)
        if u == v:
            raise ParseError("self-loop", lineno)
        if w < 0:
            raise ParseError("negative edge length", lineno)
        edges.append((u - 1, v - 1, w))
    if n is None:
        raise ParseError("missing header")
    if m_declared is not None and len(edges) != m_declared:
        raise ParseError(f"header declares {m_declared} edges, found {len(edges)}")
    return Graph(n, edges)
