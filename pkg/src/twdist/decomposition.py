"""Tree decompositions and skew separator trees.

A tree decomposition certifies an upper bound on treewidth; this module
parses and validates them, constructs heuristic ones by min-fill
elimination, and extracts the balanced binary separator trees that drive
the divide-and-conquer distance algorithms.  A skew k-separator tree node
covers a vertex set V_t, carries a separator Z_t of at most k vertices,
and splits V_t - Z_t into sides L_t, R_t with no edge between them such
that n/(k+1) <= |L_t u Z_t| <= nk/(k+1) where n = |V_t|; both children
inherit Z_t.  Separation is required to survive adding edges inside any
separator, so validation threads the accumulated cliques down the tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .graph import DisconnectedGraphError, Graph, ParseError, check_connected


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags plus the tree joining them; vertex ids are graph-internal."""

    bags: Sequence[frozenset[int]]
    tree_edges: Sequence[tuple[int, int]]
    declared_n: Optional[int] = None

    @property
    def width(self) -> int:
        if not self.bags:
            return -1
        return max(len(b) for b in self.bags) - 1

    def bag_adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.bags]
        for a, b in self.tree_edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


@dataclass(frozen=True)
class Violation:
    """First failed validation axiom with a human-readable witness."""

    axiom: str
    message: str

    def __str__(self) -> str:
        return f"{self.axiom}: {self.message}"


def parse_td(text: str) -> TreeDecomposition:
    """Parse the PACE .td format.

    Header "s td <#bags> <width+1> <n>", bag lines "b <id> <v...>", then
    one line "<i> <j>" per decomposition tree edge.  Ids are 1-based.
    """
    header = None
    bags: dict[int, frozenset[int]] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if header is not None:
                raise ParseError("duplicate header", lineno)
            if len(parts) != 5 or parts[1] != "td":
                raise ParseError("header must be 's td <bags> <width+1> <n>'", lineno)
            try:
                header = tuple(int(x) for x in parts[2:])
            except ValueError:
                raise ParseError("non-integer header fields", lineno) from None
            if any(x < 0 for x in header):
                raise ParseError("negative header fields", lineno)
            continue
        if header is None:
            raise ParseError("content before header", lineno)
        nbags, _, n = header
        if parts[0] == "b":
            try:
                vals = [int(x) for x in parts[1:]]
            except ValueError:
                raise ParseError("non-integer bag line", lineno) from None
            if not vals:
                raise ParseError("bag line without id", lineno)
            bag_id, verts = vals[0], vals[1:]
            if not (1 <= bag_id <= nbags):
                raise ParseError(f"bag id {bag_id} out of range 1..{nbags}", lineno)
            if bag_id in bags:
                raise ParseError(f"bag {bag_id} defined twice", lineno)
            if any(not (1 <= v <= n) for v in verts):
                raise ParseError(f"bag vertex out of range 1..{n}", lineno)
            bags[bag_id] = frozenset(v - 1 for v in verts)
            continue
        if len(parts) != 2:
            raise ParseError("expected tree edge '<i> <j>'", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError("non-integer tree edge", lineno) from None
        if not (1 <= a <= nbags and 1 <= b <= nbags):
            raise ParseError("tree edge endpoint out of range", lineno)
        edges.append((a - 1, b - 1))
    if header is None:
        raise ParseError("missing header")
    nbags, width_plus_1, n = header
    if len(bags) != nbags:
        raise ParseError(f"header declares {nbags} bags, found {len(bags)}")
    bag_list = [bags.get(i, frozenset()) for i in range(1, nbags + 1)]
    max_size = max((len(b) for b in bag_list), default=0)
    if max_size != width_plus_1:
        raise ParseError(
            f"header declares width+1 = {width_plus_1}, largest bag has {max_size}"
        )
    return TreeDecomposition(bag_list, edges, declared_n=n)


def validate_td(g: Graph, td: TreeDecomposition) -> Optional[Violation]:
    """Check the tree-decomposition axioms; None when all hold.

    Reports the first violated axiom: the bag graph must be a tree, every
    vertex and edge must be covered, and each vertex's bags must induce a
    connected subtree.
    """
    nb = len(td.bags)
    if nb == 0:
        if g.n == 0:
            return None
        return Violation("vertex-coverage", "no bags but the graph has vertices")
    if len(td.tree_edges) != nb - 1:
        return Violation(
            "tree", f"{nb} bags need {nb - 1} tree edges, found {len(td.tree_edges)}"
        )
    adj = td.bag_adjacency()
    seen = [False] * nb
    stack = [0]
    seen[0] = True
    cnt = 1
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                cnt += 1
                stack.append(v)
    if cnt != nb:
        return Violation("tree", "decomposition tree is not connected")

    holders: list[list[int]] = [[] for _ in range(g.n)]
    for i, bag in enumerate(td.bags):
        for v in bag:
            if not (0 <= v < g.n):
                return Violation("vertex-coverage", f"bag {i} mentions unknown vertex {v}")
            holders[v].append(i)
    for v in range(g.n):
        if not holders[v]:
            return Violation("vertex-coverage", f"vertex {v} is in no bag")
    for u, v, _ in g.edges:
        if not any(v in td.bags[i] for i in holders[u]):
            return Violation("edge-coverage", f"edge ({u},{v}) is covered by no bag")
    for v in range(g.n):
        mine = set(holders[v])
        start = holders[v][0]
        stack = [start]
        reached = {start}
        while stack:
            b = stack.pop()
            for nb_id in adj[b]:
                if nb_id in mine and nb_id not in reached:
                    reached.add(nb_id)
                    stack.append(nb_id)
        if reached != mine:
            return Violation(
                "connectivity", f"bags containing vertex {v} do not form a subtree"
            )
    return None


def heuristic_td(g: Graph) -> TreeDecomposition:
    """Tree decomposition from a min-fill elimination ordering.

    The width is whatever the greedy ordering achieves; the result always
    satisfies the decomposition axioms.
    """
    if g.n == 0:
        return TreeDecomposition([], [])
    adj: list[set[int]] = [set(v for v, _ in nbrs) for nbrs in g.adjacency]
    alive = set(range(g.n))
    elim_pos: dict[int, int] = {}
    bag_neighbors: list[tuple[int, frozenset[int]]] = []

    while alive:
        best_v = None
        best_cost = None
        for v in sorted(alive):
            nb = adj[v]
            cost = 0
            nb_list = sorted(nb)
            for i, a in enumerate(nb_list):
                for b in nb_list[i + 1 :]:
                    if b not in adj[a]:
                        cost += 1
            if best_cost is None or cost < best_cost:
                best_cost = cost
                best_v = v
        v = best_v
        nb_list = sorted(adj[v])
        for i, a in enumerate(nb_list):
            for b in nb_list[i + 1 :]:
                adj[a].add(b)
                adj[b].add(a)
        for a in nb_list:
            adj[a].discard(v)
        elim_pos[v] = len(bag_neighbors)
        bag_neighbors.append((v, frozenset(nb_list)))
        alive.discard(v)
        adj[v] = set()

    bags = [frozenset({v}) | nb for v, nb in bag_neighbors]
    edges = []
    for i, (v, nb) in enumerate(bag_neighbors):
        if nb:
            parent_vertex = min(nb, key=lambda u: elim_pos[u])
            edges.append((i, elim_pos[parent_vertex]))
        elif i + 1 < len(bags):
            # isolated remainder (disconnected input): chain onto the next bag
            edges.append((i, i + 1))
    return TreeDecomposition(bags, edges)


class SkewSeparatorNode:
    """One recursion node: separator, covered vertices, two children."""

    __slots__ = ("separator", "vertices", "left", "right")

    def __init__(self, separator, vertices, left=None, right=None):
        self.separator: tuple[int, ...] = tuple(sorted(separator))
        self.vertices: frozenset[int] = frozenset(vertices)
        self.left: Optional[SkewSeparatorNode] = left
        self.right: Optional[SkewSeparatorNode] = right

    @property
    def is_leaf(self) -> bool:
        return self.left is None and self.right is None


@dataclass
class SkewSeparatorTree:
    root: SkewSeparatorNode
    k: int

    def node_count(self) -> int:
        count = 0
        stack = [self.root]
        while stack:
            t = stack.pop()
            count += 1
            if not t.is_leaf:
                stack.append(t.left)
                stack.append(t.right)
        return count

    def depth(self) -> int:
        def rec(t):
            if t.is_leaf:
                return 1
            return 1 + max(rec(t.left), rec(t.right))

        return rec(self.root)


def _components(adj: dict[int, set[int]], banned: set[int]) -> list[list[int]]:
    comps = []
    seen = set(banned)
    for s in sorted(adj):
        if s in seen:
            continue
        stack = [s]
        seen.add(s)
        cur = [s]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    cur.append(v)
                    stack.append(v)
        comps.append(sorted(cur))
    return comps


def _greedy_sides(
    comps: list[list[int]], z_size: int, n: int, k: int
) -> Optional[tuple[list[int], list[int]]]:
    """Split components into sides meeting the balance bound, or None.

    Components are taken largest first; the left side absorbs them until
    |L u Z| reaches n/(k+1).  Both sides must end up nonempty so that the
    recursion shrinks strictly.
    """
    if len(comps) < 2:
        return None
    ordered = sorted(comps, key=lambda c: (-len(c), c[0]))
    left: list[int] = []
    right: list[int] = []
    size_l = 0
    for comp in ordered:
        if (size_l + z_size) * (k + 1) < n:
            left.extend(comp)
            size_l += len(comp)
        else:
            right.extend(comp)
    if not left or not right:
        return None
    if (size_l + z_size) * (k + 1) < n or (size_l + z_size) * (k + 1) > n * k:
        return None
    return left, right


def _centroid_bag(
    bags: Sequence[frozenset[int]],
    bag_adj: list[list[int]],
    vertices: frozenset[int],
    holders: list[list[int]],
    depth: list[int],
    parent: list[int],
    dfs_order: list[int],
) -> int:
    """Bag whose removal splits the decomposition tree into halves.

    Weights count, per bag, the vertices of the current set whose highest
    bag is that bag; node-weighted tree centroids bound every graph
    component of the bag's removal by half the current vertex count.
    """
    nb = len(bags)
    weight = [0] * nb
    for v in vertices:
        top = min(holders[v], key=depth.__getitem__)
        weight[top] += 1
    total = sum(weight)
    subtree = weight[:]
    for b in reversed(dfs_order):
        p = parent[b]
        if p >= 0:
            subtree[p] += subtree[b]
    best = -1
    best_side = None
    for b in range(nb):
        side = total - subtree[b]
        for c in bag_adj[b]:
            if parent[c] == b:
                side = max(side, subtree[c])
        if best_side is None or side < best_side:
            best = b
            best_side = side
    return best


def skew_separator_tree(g: Graph, td: TreeDecomposition, k: int) -> SkewSeparatorTree:
    """Extract a skew k-separator tree from a valid decomposition.

    Every internal node passes the balance bound; a set becomes a leaf
    when it has at most k vertices or no separating bag can meet the
    bound (which only happens below the recursion's base-case scale).
    """
    if g.n == 0:
        raise ValueError("empty graph has no separator tree")
    if k < td.width + 1:
        raise ValueError(f"k={k} is below width+1={td.width + 1}")
    bad = validate_td(g, td)
    if bad is not None:
        raise ValueError(f"invalid tree decomposition: {bad}")
    if not check_connected(g):
        raise DisconnectedGraphError("separator trees require a connected graph")

    bags = list(td.bags)
    bag_adj = td.bag_adjacency()
    nb = len(bags)
    parent = [-1] * nb
    depth = [0] * nb
    dfs_order = []
    stack = [0]
    seen = [False] * nb
    seen[0] = True
    while stack:
        b = stack.pop()
        dfs_order.append(b)
        for c in bag_adj[b]:
            if not seen[c]:
                seen[c] = True
                parent[c] = b
                depth[c] = depth[b] + 1
                stack.append(c)
    holders: list[list[int]] = [[] for _ in range(g.n)]
    for i, bag in enumerate(bags):
        for v in bag:
            holders[v].append(i)

    adj0: dict[int, set[int]] = {
        v: set(u for u, _ in g.adjacency[v]) for v in range(g.n)
    }

    def try_split(adj: dict[int, set[int]], vertices: frozenset[int], bag_id: int):
        z = sorted(bags[bag_id] & vertices)
        if not z:
            return None
        sides = _greedy_sides(_components(adj, set(z)), len(z), len(vertices), k)
        if sides is None:
            return None
        return z, sides[0], sides[1]

    def rec(adj: dict[int, set[int]], vertices: frozenset[int]) -> SkewSeparatorNode:
        n = len(vertices)
        if n <= k:
            return SkewSeparatorNode(vertices, vertices)
        split = try_split(adj, vertices, _centroid_bag(
            bags, bag_adj, vertices, holders, depth, parent, dfs_order
        ))
        if split is None:
            for bag_id in range(nb):
                split = try_split(adj, vertices, bag_id)
                if split is not None:
                    break
        if split is None:
            return SkewSeparatorNode((), vertices)
        z, left_side, right_side = split
        zset = set(z)
        x = frozenset(left_side) | zset
        y = frozenset(right_side) | zset
        # both recursions shrink: |X| <= nk/(k+1), |Y| <= nk/(k+1) + k
        assert len(x) * (k + 1) <= n * k
        assert len(y) * (k + 1) <= n * k + k * (k + 1)
        node = SkewSeparatorNode(z, vertices)
        node.left = rec(_sub_adj(adj, x, zset), x)
        node.right = rec(_sub_adj(adj, y, zset), y)
        return node

    root = rec(adj0, frozenset(range(g.n)))
    return SkewSeparatorTree(root, k)


def _sub_adj(
    adj: dict[int, set[int]], keep: frozenset[int], clique: set[int]
) -> dict[int, set[int]]:
    out = {v: (adj[v] & keep) for v in keep}
    for a in clique:
        others = clique - {a}
        out[a] |= others
    return out


def validate_sst(g: Graph, t: SkewSeparatorTree, k: Optional[int] = None) -> Optional[Violation]:
    """Check separator size, separation, and balance at every node.

    Separation is tested in the graph augmented with the cliques of all
    separators on the path from the root, matching how the recursion
    consumes the tree.
    """
    if k is None:
        k = t.k

    def rec(node: SkewSeparatorNode, adj: dict[int, set[int]]) -> Optional[Violation]:
        z = set(node.separator)
        n = len(node.vertices)
        if len(z) > k:
            return Violation("size", f"separator of {len(z)} vertices exceeds k={k}")
        if not z <= node.vertices:
            return Violation("size", "separator not contained in the node's vertex set")
        if node.is_leaf:
            return None
        if node.left is None or node.right is None:
            return Violation("structure", "internal node with a single child")
        left_side = node.left.vertices - z
        right_side = node.right.vertices - z
        if left_side & right_side:
            return Violation(
                "structure", f"sides share vertices {sorted(left_side & right_side)[:4]}"
            )
        if (left_side | right_side | z) != node.vertices:
            return Violation("structure", "children do not cover the node's vertices")
        for u in sorted(left_side):
            hit = adj[u] & right_side
            if hit:
                return Violation(
                    "separation", f"edge ({u},{min(hit)}) joins the two sides"
                )
        size_x = len(left_side) + len(z)
        if size_x * (k + 1) < n:
            return Violation(
                "balance", f"|L u Z| = {size_x} below {n}/(k+1) at an {n}-vertex node"
            )
        if size_x * (k + 1) > n * k:
            return Violation(
                "balance", f"|L u Z| = {size_x} above {n}k/(k+1) at an {n}-vertex node"
            )
        bad = rec(node.left, _sub_adj(adj, node.left.vertices, z))
        if bad is not None:
            return bad
        return rec(node.right, _sub_adj(adj, node.right.vertices, z))

    if t.root.vertices != frozenset(range(g.n)):
        return Violation("structure", "root does not cover the whole vertex set")
    adj0 = {v: set(u for u, _ in g.adjacency[v]) for v in range(g.n)}
    return rec(t.root, adj0)


def prepare_sst(
    g: Graph, td: Optional[TreeDecomposition] = None, k: Optional[int] = None
) -> SkewSeparatorTree:
    """Separator tree from a given or heuristic decomposition."""
    if td is None:
        td = heuristic_td(g)
    if k is None:
        k = max(td.width + 1, 1)
    return skew_separator_tree(g, td, k)
