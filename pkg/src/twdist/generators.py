"""Seeded random instance generators for tests and benchmarks.

Randomness comes from a small counter-based SplitMix64 stream so that a
(seed, parameters) pair produces the same instance on every platform,
independent of interpreter hash randomization or numpy versions.
"""

from __future__ import annotations

from .cover_distances import VertexCover
from .decomposition import TreeDecomposition
from .graph import Graph
from .rangetree import Point

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    """Deterministic 64-bit PRNG with trivially portable arithmetic."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the closed range [lo, hi], by rejection."""
        if hi < lo:
            raise ValueError("empty range")
        span = hi - lo + 1
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + (x % span)

    def random(self) -> float:
        return self.next_u64() / float(1 << 64)

    def choice(self, seq):
        return seq[self.randint(0, len(seq) - 1)]

    def split(self, index: int) -> "SplitMix64":
        """Independent substream derived from this seed and an index."""
        return SplitMix64(self._state ^ ((index + 1) * _GOLDEN))


def gen_partial_ktree(
    n: int, k: int, edge_keep_prob: float, weight_max: int, seed: int
) -> tuple[Graph, TreeDecomposition]:
    """Connected partial k-tree with a certified width-k decomposition.

    Builds a k-tree by repeatedly attaching a vertex to a random existing
    k-clique, then deletes non-spanning edges with probability
    1 - edge_keep_prob.  A spanning tree chosen during construction is never
    deleted, so the result stays connected.  The decomposition records the
    construction order: one size-(k+1) bag per attached vertex.
    """
    if not (n > k >= 1):
        raise ValueError("need n > k >= 1")
    if weight_max < 1:
        raise ValueError("need weight_max >= 1")
    rng = SplitMix64(seed)
    base = list(range(k + 1))
    edges: set[tuple[int, int]] = set()
    spanning: set[tuple[int, int]] = set()
    for i in base:
        for j in base[i + 1 :]:
            edges.add((i, j))
    for i in range(1, k + 1):
        spanning.add((i - 1, i))

    # cliques[j] is a k-subset of a bag; bag_of_clique[j] indexes the bag in
    # which that clique appears, giving the decomposition tree its edges.
    cliques: list[tuple[int, ...]] = []
    bag_of_clique: list[int] = []
    bags: list[frozenset[int]] = [frozenset(base)]
    tree_edges: list[tuple[int, int]] = []
    for i in base:
        cliques.append(tuple(v for v in base if v != i))
        bag_of_clique.append(0)

    for v in range(k + 1, n):
        j = rng.randint(0, len(cliques) - 1)
        clique = cliques[j]
        bag_id = len(bags)
        bags.append(frozenset(clique) | {v})
        tree_edges.append((bag_of_clique[j], bag_id))
        for u in clique:
            edges.add((min(u, v), max(u, v)))
        anchor = min(clique)
        spanning.add((min(anchor, v), max(anchor, v)))
        cliques.append(clique)
        bag_of_clique.append(bag_id)
        for u in clique:
            sub = tuple(x for x in clique if x != u) + (v,)
            cliques.append(tuple(sorted(sub)))
            bag_of_clique.append(bag_id)

    kept = []
    for e in sorted(edges):
        if e in spanning or rng.random() < edge_keep_prob:
            kept.append(e)
    weighted = [(u, v, rng.randint(1, weight_max)) for u, v in kept]
    return Graph(n, weighted), TreeDecomposition(bags, tree_edges)


def gen_planted_cover(n: int, k: int, seed: int) -> tuple[Graph, VertexCover]:
    """Connected unweighted graph whose edges all touch vertices 0..k-1.

    Returns the graph and the planted cover.  Every outside vertex gets
    at least one cover neighbour, and a path through the cover keeps the
    whole graph connected.
    """
    if not (n > k >= 1):
        raise ValueError("need n > k >= 1")
    rng = SplitMix64(seed)
    cover = list(range(k))
    edges: set[tuple[int, int]] = set()
    for i in range(k - 1):
        if rng.random() < 0.5:
            edges.add((i, i + 1))
    for v in range(k, n):
        deg = rng.randint(1, min(k, 3))
        nbrs = set()
        while len(nbrs) < deg:
            nbrs.add(rng.randint(0, k - 1))
        for c in nbrs:
            edges.add((c, v))
    extra_cc = rng.randint(0, k)
    for _ in range(extra_cc):
        a = rng.randint(0, k - 1)
        b = rng.randint(0, k - 1)
        if a != b:
            edges.add((min(a, b), max(a, b)))

    # join components through the cover: every component holds a cover
    # vertex (outside vertices always have a cover neighbour), so linking
    # those to vertex 0 keeps the cover property
    g = Graph(n, [(u, v, 1) for u, v in sorted(edges)])
    comp = _components(g)
    if len(comp) > 1:
        for cpart in comp:
            if 0 in cpart:
                continue
            other = min(set(cpart) & set(cover))
            edges.add((0, other))
        g = Graph(n, [(u, v, 1) for u, v in sorted(edges)])
    return g, VertexCover(frozenset(cover))


def _components(g: Graph) -> list[list[int]]:
    seen = bytearray(g.n)
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        stack = [s]
        seen[s] = 1
        cur = [s]
        while stack:
            u = stack.pop()
            for v, _ in g.adjacency[u]:
                if not seen[v]:
                    seen[v] = 1
                    cur.append(v)
                    stack.append(v)
        comps.append(sorted(cur))
    return comps


def gen_points(n: int, d: int, coord_range: int, seed: int) -> list[Point]:
    """n points with uniform coordinates in [-coord_range, coord_range].

    Values enumerate the points (0..n-1) so MaxDistance folds are easy to
    predict in tests; callers can replace values as needed.
    """
    if d < 1:
        raise ValueError("need d >= 1")
    rng = SplitMix64(seed)
    pts = []
    for i in range(n):
        coords = tuple(rng.randint(-coord_range, coord_range) for _ in range(d))
        pts.append(Point(coords, i))
    return pts
