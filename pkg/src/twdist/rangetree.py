"""Multidimensional range trees aggregating over a commutative monoid.

Two evaluation paths are provided.  ``build``/``query`` materialise the
recursive node store (left/right children, a next-dimension subtree per
node, min/max coordinate, fold value at the last dimension) and are the
readable reference.  ``fold_box_batches`` evaluates many box queries
against the same point set in one level-synchronous sweep over numpy
arrays without keeping the tree in memory; it visits exactly the same
nodes and maintains identical work counters, which is what makes large
instances tractable.

Work counters certify the combinatorial cost model.  Construction touches
``canonical_size_total`` point slots, never more than n*d*B(n,d) where
``B(n,d) = C(d + ceil(log2 n), d)``.  A query visits a node when the
traversal descends into it; each visited node classifies its children
against the box in constant time, so disjoint children are skipped and
fully contained children are folded (or handed to their next-dimension
subtree) without counting as visits.  Under this charging a single query
visits at most ``2^d * C(h+d, d)`` nodes, and that bound is checked after
every query.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import U64_MAX, DistanceOverflowError

NEG_INFINITY = float("-inf")
POS_INFINITY = float("inf")

_I64_MIN = np.iinfo(np.int64).min
_I64_MAX = np.iinfo(np.int64).max

# Coordinates and values must leave headroom for sums and sentinels.
_COORD_LIMIT = 1 << 61
_VALUE_LIMIT = 1 << 61


class BoundViolationError(RuntimeError):
    """A certified work-counter bound was exceeded (internal bug)."""


class Monoid:
    """Commutative monoid interface: identity plus a combine operation.

    ``channel_kinds`` describes how values vectorise: each channel is an
    int64 array folded either by maximum ("max") or addition ("sum").
    """

    channel_kinds: tuple[str, ...] = ()

    def identity(self):
        raise NotImplementedError

    def combine(self, a, b):
        raise NotImplementedError

    def encode(self, values: Sequence) -> tuple[np.ndarray, ...]:
        raise NotImplementedError

    def decode(self, scalars: Sequence[int]):
        raise NotImplementedError

    def fold(self, values: Iterable):
        acc = self.identity()
        for v in values:
            acc = self.combine(acc, v)
        return acc


class MaxDistance(Monoid):
    """Integers under maximum, with negative infinity as identity."""

    channel_kinds = ("max",)

    def identity(self):
        return NEG_INFINITY

    def combine(self, a, b):
        return max(a, b)

    def encode(self, values):
        arr = np.asarray(
            [(_I64_MIN if v == NEG_INFINITY else int(v)) for v in values], dtype=np.int64
        )
        return (arr,)

    def decode(self, scalars):
        s = int(scalars[0])
        return NEG_INFINITY if s == _I64_MIN else s


class CountSum(Monoid):
    """Pairs (count, total) added componentwise; identity (0, 0)."""

    channel_kinds = ("sum", "sum")

    def identity(self):
        return (0, 0)

    def combine(self, a, b):
        return (a[0] + b[0], a[1] + b[1])

    def encode(self, values):
        counts = np.asarray([int(v[0]) for v in values], dtype=np.int64)
        sums = np.asarray([int(v[1]) for v in values], dtype=np.int64)
        return (counts, sums)

    def decode(self, scalars):
        return (int(scalars[0]), int(scalars[1]))


MAX_DISTANCE = MaxDistance()
COUNT_SUM = CountSum()


@dataclass(frozen=True)
class Point:
    """A d-dimensional integer point carrying a monoid value."""

    coords: tuple[int, ...]
    value: object

    def __init__(self, coords, value):
        object.__setattr__(self, "coords", tuple(int(c) for c in coords))
        object.__setattr__(self, "value", value)


@dataclass(frozen=True)
class QueryBox:
    """Closed box [l_1,r_1] x ... x [l_d,r_d]; sides may be infinite."""

    bounds: tuple[tuple[float, float], ...]

    def __init__(self, bounds):
        norm = []
        for lo, hi in bounds:
            for b in (lo, hi):
                if not (isinstance(b, int) or b in (NEG_INFINITY, POS_INFINITY)):
                    raise ValueError(f"box bound must be an integer or infinite, got {b!r}")
            norm.append((lo, hi))
        object.__setattr__(self, "bounds", tuple(norm))

    @staticmethod
    def unbounded(d: int) -> "QueryBox":
        return QueryBox([(NEG_INFINITY, POS_INFINITY)] * d)

    @staticmethod
    def below(uppers: Sequence[float]) -> "QueryBox":
        """Box with no lower bounds and the given upper bounds."""
        return QueryBox([(NEG_INFINITY, u) for u in uppers])

    @property
    def dim(self) -> int:
        return len(self.bounds)


def ceil_log2(n: int) -> int:
    """ceil(log2 n) with the convention ceil(log2 1) = 0."""
    if n < 1:
        raise ValueError("need n >= 1")
    return (n - 1).bit_length()


def binomial_bound(n: int, d: int) -> int:
    """B(n,d) = C(d + ceil(log2 n), d); errors if it leaves 64-bit range."""
    if n < 1 or d < 0:
        raise ValueError("need n >= 1 and d >= 0")
    b = math.comb(d + ceil_log2(n), d)
    if b > U64_MAX:
        raise OverflowError(f"binomial bound for n={n}, d={d} exceeds 64-bit range")
    return b


def query_visit_bound(n: int, d: int) -> int:
    """Upper bound 2^d * C(h+d, d) on nodes visited by one query."""
    return (1 << d) * binomial_bound(n, d)


def construction_bound(n: int, d: int) -> int:
    """Upper bound n*d*B(n,d) on total canonical-subset size."""
    return n * d * binomial_bound(n, d)


def aggregate(points: Sequence[Point], monoid: Monoid):
    """Fold the monoid over all point values (identity for no points)."""
    return monoid.fold(p.value for p in points)


def _validate_points(points: Sequence[Point], d: int) -> tuple[list[tuple[int, ...]], list]:
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if not points:
        raise ValueError("range trees are built over nonempty point sets")
    coords = []
    values = []
    for p in points:
        if len(p.coords) != d:
            raise ValueError(f"point {p.coords} does not have {d} coordinates")
        if any(abs(c) >= _COORD_LIMIT for c in p.coords):
            raise DistanceOverflowError("coordinate magnitude too large for exact arithmetic")
        coords.append(p.coords)
        values.append(p.value)
    return coords, values


class RangeTree:
    """Node store produced by ``build``; query with ``query``.

    Nodes are integer ids into parallel arrays.  ``visited_nodes`` holds
    the node count of the most recent query on this object; concurrent
    readers should use ``fold_box_batches``, which keeps per-query
    counters instead of mutating shared state.
    """

    def __init__(self, d: int, monoid: Monoid, n: int):
        self.d = d
        self.monoid = monoid
        self.n = n
        self.canonical_size_total = 0
        self.visited_nodes = 0
        self.root = -1
        self._dim: list[int] = []
        self._left: list[int] = []
        self._right: list[int] = []
        self._down: list[int] = []
        self._lo: list[int] = []
        self._hi: list[int] = []
        self._val: list = []
        self._size: list[int] = []

    # accessors used by tests and debugging tools
    def node_count(self) -> int:
        return len(self._dim)

    def node_dim(self, x: int) -> int:
        return self._dim[x]

    def left(self, x: int) -> int:
        return self._left[x]

    def right(self, x: int) -> int:
        return self._right[x]

    def down(self, x: int) -> int:
        return self._down[x]

    def low(self, x: int) -> int:
        return self._lo[x]

    def high(self, x: int) -> int:
        return self._hi[x]

    def fold_value(self, x: int):
        return self._val[x]

    def subset_size(self, x: int) -> int:
        return self._size[x]

    def _new_node(self, dim: int, max_nodes: int) -> int:
        if len(self._dim) >= max_nodes:
            raise MemoryError(
                f"range tree exceeds {max_nodes} nodes; use fold_box_batches for"
                " workloads of this size"
            )
        self._dim.append(dim)
        self._left.append(-1)
        self._right.append(-1)
        self._down.append(-1)
        self._lo.append(0)
        self._hi.append(0)
        self._val.append(None)
        self._size.append(0)
        return len(self._dim) - 1


def _sort_ranks(coords: list[tuple[int, ...]], d: int) -> list[list[int]]:
    n = len(coords)
    ranks = []
    for i in range(d):
        order = sorted(range(n), key=lambda j: (coords[j][i], coords[j], j))
        rk = [0] * n
        for pos, j in enumerate(order):
            rk[j] = pos
        ranks.append(rk)
    return ranks


def build(
    points: Sequence[Point],
    d: int,
    monoid: Monoid,
    *,
    max_nodes: int = 5_000_000,
    check_bounds: bool = True,
) -> RangeTree:
    """Construct the d-dimensional range tree over the given points.

    Median splits order by the current coordinate, breaking ties by the
    full coordinate vector and then input position, so construction is
    deterministic even with duplicate points.
    """
    coords, values = _validate_points(points, d)
    n = len(coords)
    ranks = _sort_ranks(coords, d)
    tree = RangeTree(d, monoid, n)

    def rec(idx: list[int], i: int) -> int:
        x = tree._new_node(i, max_nodes)
        tree.canonical_size_total += len(idx)
        tree._size[x] = len(idx)
        tree._lo[x] = coords[idx[0]][i]
        tree._hi[x] = coords[idx[-1]][i]
        if len(idx) == 1:
            if i < d - 1:
                tree._down[x] = rec(idx, i + 1)
            else:
                tree._val[x] = values[idx[0]]
            return x
        mid = (len(idx) + 1) // 2
        tree._left[x] = rec(idx[:mid], i)
        tree._right[x] = rec(idx[mid:], i)
        if i < d - 1:
            tree._down[x] = rec(sorted(idx, key=ranks[i + 1].__getitem__), i + 1)
        else:
            tree._val[x] = monoid.combine(
                tree._val[tree._left[x]], tree._val[tree._right[x]]
            )
        return x

    order0 = sorted(range(n), key=ranks[0].__getitem__)
    tree.root = rec(order0, 0)
    if check_bounds and tree.canonical_size_total > construction_bound(n, d):
        raise BoundViolationError("construction counter exceeded n*d*B(n,d)")
    return tree


def query(tree: RangeTree, box: QueryBox):
    """Fold of all point values inside the closed box.

    An empty intersection yields the identity.  ``tree.visited_nodes`` is
    set to the number of nodes descended into: a node entirely outside
    the box in the current dimension is rejected by its parent without a
    visit, and an entirely contained node is folded (last dimension) or
    forwarded to its next-dimension subtree by the parent.
    """
    if box.dim != tree.d:
        raise ValueError(f"box has {box.dim} bounds, tree has dimension {tree.d}")
    lows = [b[0] for b in box.bounds]
    highs = [b[1] for b in box.bounds]
    monoid = tree.monoid
    acc = monoid.identity()
    visited = 0
    stack = [tree.root] if tree.root >= 0 else []
    last = tree.d - 1
    while stack:
        x = stack.pop()
        visited += 1
        i = tree._dim[x]
        blo, bhi = lows[i], highs[i]
        lo, hi = tree._lo[x], tree._hi[x]
        if blo > hi or lo > bhi:
            continue
        if blo <= lo and hi <= bhi:
            if i == last:
                acc = monoid.combine(acc, tree._val[x])
            else:
                stack.append(tree._down[x])
            continue
        for c in (tree._left[x], tree._right[x]):
            clo, chi = tree._lo[c], tree._hi[c]
            if blo > chi or clo > bhi:
                continue
            if blo <= clo and chi <= bhi:
                if i == last:
                    acc = monoid.combine(acc, tree._val[c])
                else:
                    stack.append(tree._down[c])
            else:
                stack.append(c)
    tree.visited_nodes = visited
    if visited > query_visit_bound(tree.n, tree.d):
        raise BoundViolationError("query visited more than 2^d * C(h+d,d) nodes")
    return acc


# ---------------------------------------------------------------------------
# Batched evaluation


@dataclass
class BatchFoldResult:
    """Per-query channel folds plus the work counters of the sweep."""

    answers: tuple[np.ndarray, ...]
    visited: np.ndarray
    canonical_size_total: int
    n: int
    d: int

    def max_visited(self) -> int:
        return int(self.visited.max()) if self.visited.size else 0


def boxes_to_arrays(boxes: Sequence[QueryBox], d: int) -> tuple[np.ndarray, np.ndarray]:
    """Convert boxes to int64 bound arrays with saturating sentinels."""
    q = len(boxes)
    lo = np.empty((q, d), dtype=np.int64)
    hi = np.empty((q, d), dtype=np.int64)
    for qi, box in enumerate(boxes):
        if box.dim != d:
            raise ValueError(f"box has {box.dim} bounds, expected {d}")
        for j, (l, h) in enumerate(box.bounds):
            lo[qi, j] = _I64_MIN if l == NEG_INFINITY else int(l)
            hi[qi, j] = _I64_MAX if h == POS_INFINITY else int(h)
    return lo, hi


def _ragged_gather(starts: np.ndarray, lens: np.ndarray) -> np.ndarray:
    """Indices covering [starts[j], starts[j]+lens[j]) for every segment j."""
    total = int(lens.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    offs = np.concatenate(([0], np.cumsum(lens)[:-1]))
    return np.repeat(starts - offs, lens) + np.arange(total, dtype=np.int64)


def canonical_structure_size(n: int, d: int) -> int:
    """Total canonical-subset size Sum_x |P_x| of the tree over n points.

    Median splits depend only on subset sizes, so this is a function of
    (n, d) alone; ``build`` produces exactly this counter value.
    """
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    memo: dict[tuple[int, int], int] = {}

    def c(s: int, i: int) -> int:
        if s == 1:
            return d - i
        key = (s, i)
        got = memo.get(key)
        if got is None:
            got = s + c((s + 1) // 2, i) + c(s // 2, i)
            if i < d - 1:
                got += c(s, i + 1)
            memo[key] = got
        return got

    return c(n, 0)


def _array_ranks(coords: np.ndarray) -> np.ndarray:
    n, d = coords.shape
    idx = np.arange(n, dtype=np.int64)
    ranks = np.empty((d, n), dtype=np.int64)
    for i in range(d):
        keys = [idx]
        keys.extend(coords[:, j] for j in range(d - 1, -1, -1))
        keys.append(coords[:, i])
        order = np.lexsort(tuple(keys))
        ranks[i, order] = idx
    return ranks


class _Accumulator:
    """Per-query fold state for one channel list."""

    def __init__(self, kinds: Sequence[str], q: int):
        self.kinds = kinds
        self.ans = [
            np.full(q, _I64_MIN, dtype=np.int64)
            if kind == "max"
            else np.zeros(q, dtype=np.int64)
            for kind in kinds
        ]

    def add(self, qids: np.ndarray, per_channel_vals: Sequence[np.ndarray]):
        for c, kind in enumerate(self.kinds):
            if kind == "max":
                np.maximum.at(self.ans[c], qids, per_channel_vals[c])
            else:
                np.add.at(self.ans[c], qids, per_channel_vals[c])


def fold_box_batches(
    coords: np.ndarray,
    kinds: Sequence[str],
    channels: Sequence[np.ndarray],
    boxes_lo: np.ndarray,
    boxes_hi: np.ndarray,
    *,
    check_bounds: bool = True,
) -> BatchFoldResult:
    """Evaluate many box queries over one point set in level sweeps.

    Answers and per-query visit counters are exactly those of building
    the range tree and running every query on it.  Subtrees no query
    descends into are never materialised (their shape cannot influence
    any answer), so time and memory scale with the portion of the
    structure the batch reaches; ``canonical_size_total`` still reports
    the full structure's counter, which is a function of (n, d) alone.
    """
    coords = np.ascontiguousarray(coords, dtype=np.int64)
    n, d = coords.shape
    if n < 1 or d < 1:
        raise ValueError("need a nonempty point set and d >= 1")
    if np.abs(coords).max(initial=0) >= _COORD_LIMIT:
        raise DistanceOverflowError("coordinate magnitude too large for exact arithmetic")
    if len(kinds) != len(channels):
        raise ValueError("one kind per channel")
    chans = []
    for kind, ch in zip(kinds, channels):
        if kind not in ("max", "sum"):
            raise ValueError(f"unknown channel kind {kind!r}")
        arr = np.ascontiguousarray(ch, dtype=np.int64)
        if arr.shape != (n,):
            raise ValueError("channel length must match point count")
        finite = arr[arr != _I64_MIN] if kind == "max" else arr
        if finite.size and int(np.abs(finite).max()) * (n if kind == "sum" else 1) >= _VALUE_LIMIT:
            raise DistanceOverflowError("channel values too large for exact aggregation")
        chans.append(arr)
    q = boxes_lo.shape[0]
    if boxes_lo.shape != (q, d) or boxes_hi.shape != (q, d):
        raise ValueError("box arrays must have shape (q, d)")
    boxes_lo = np.ascontiguousarray(boxes_lo, dtype=np.int64)
    boxes_hi = np.ascontiguousarray(boxes_hi, dtype=np.int64)

    ranks = _array_ranks(coords)
    acc = _Accumulator(kinds, q)
    visited = np.zeros(q, dtype=np.int64)
    last = d - 1

    def chain_fold(pts: np.ndarray, qids: np.ndarray, start_dim: int):
        """Descend the single-point chain from start_dim; count and fold."""
        rem = d - start_dim
        cmat = coords[pts, start_dim:d]
        ok = (boxes_lo[qids, start_dim:d] <= cmat) & (cmat <= boxes_hi[qids, start_dim:d])
        run = np.cumprod(ok, axis=1).sum(axis=1)
        full = run == rem
        entered = np.where(full, rem, run + 1)
        nonlocal visited
        visited += np.bincount(qids, weights=entered.astype(np.float64), minlength=q).astype(
            np.int64
        )
        if full.any():
            hit_p = pts[full]
            acc.add(qids[full], [ch[hit_p] for ch in chans])

    # level 0: a single segment holding all points sorted by rank 0
    order = np.empty(n, dtype=np.int64)
    order[ranks[0]] = np.arange(n, dtype=np.int64)
    seg_start = np.zeros(1, dtype=np.int64)
    seg_len = np.array([n], dtype=np.int64)
    seg_dim = np.zeros(1, dtype=np.int64)
    pair_seg = np.zeros(q, dtype=np.int64)
    pair_q = np.arange(q, dtype=np.int64)

    while seg_len.size and pair_q.size:
        nseg = seg_len.size
        dims = seg_dim
        sizes = seg_len
        singles = sizes == 1
        first = order[seg_start]
        last_pt = order[seg_start + sizes - 1]
        lo_val = coords[first, dims]
        hi_val = coords[last_pt, dims]
        islast = dims == last
        n_l = (sizes + 1) // 2

        # half and whole folds for branch segments at the last dimension;
        # every live segment has at least one query on it, so this is
        # already demand-driven
        fold_l = fold_r = fold_whole = None
        lastbr = np.nonzero(islast & ~singles)[0]
        if lastbr.size:
            fold_l = [
                np.full(nseg, _I64_MIN, dtype=np.int64)
                if kind == "max"
                else np.zeros(nseg, dtype=np.int64)
                for kind in kinds
            ]
            fold_r = [a.copy() for a in fold_l]
            l_lens = n_l[lastbr]
            g_idx = _ragged_gather(seg_start[lastbr], sizes[lastbr])
            content = order[g_idx]
            seg_cuts = np.concatenate(([0], np.cumsum(sizes[lastbr])[:-1]))
            cuts = np.empty(2 * lastbr.size, dtype=np.int64)
            cuts[0::2] = seg_cuts
            cuts[1::2] = seg_cuts + l_lens
            for c, (kind, ch) in enumerate(zip(kinds, chans)):
                vals = ch[content]
                red = (np.maximum if kind == "max" else np.add).reduceat(vals, cuts)
                fold_l[c][lastbr] = red[0::2]
                fold_r[c][lastbr] = red[1::2]
            fold_whole = [
                np.maximum(fl, fr) if kind == "max" else fl + fr
                for kind, fl, fr in zip(kinds, fold_l, fold_r)
            ]

        # demand flags for next-level segments: left/right children some
        # query descends into, and next-dimension copies of contained
        # segments (or of their contained children)
        need = [np.zeros(nseg, dtype=bool) for _ in range(5)]  # L,R,DS,DL,DR
        route_kind: list[np.ndarray] = []
        route_seg: list[np.ndarray] = []
        route_q: list[np.ndarray] = []

        def route(kind_id: int, segs: np.ndarray, qids: np.ndarray):
            need[kind_id][segs] = True
            route_kind.append(np.full(segs.size, kind_id, dtype=np.int64))
            route_seg.append(segs)
            route_q.append(qids)

        pdim = dims[pair_seg]
        plo = lo_val[pair_seg]
        phi = hi_val[pair_seg]
        blo = boxes_lo[pair_q, pdim]
        bhi = boxes_hi[pair_q, pdim]
        visited += np.bincount(pair_q, minlength=q).astype(np.int64)
        alive = ~((blo > phi) | (plo > bhi))
        inside = alive & (blo <= plo) & (phi <= bhi)
        psingle = singles[pair_seg]

        m = inside & islast[pair_seg] & ~psingle
        if m.any():
            segs = pair_seg[m]
            acc.add(pair_q[m], [fold_whole[c][segs] for c in range(len(kinds))])
        m = inside & islast[pair_seg] & psingle
        if m.any():
            pts = order[seg_start[pair_seg[m]]]
            acc.add(pair_q[m], [ch[pts] for ch in chans])
        m = inside & ~islast[pair_seg] & psingle
        if m.any():
            for g in np.unique(pdim[m]):
                mg = m & (pdim == g)
                chain_fold(order[seg_start[pair_seg[mg]]], pair_q[mg], int(g) + 1)
        m = inside & ~islast[pair_seg] & ~psingle
        if m.any():
            route(2, pair_seg[m], pair_q[m])

        # partial overlap: classify both children against the box here
        part = alive & ~inside
        if part.any():
            p_seg = pair_seg[part]
            p_q = pair_q[part]
            p_dim = pdim[part]
            p_blo = blo[part]
            p_bhi = bhi[part]
            c_start = seg_start[p_seg]
            c_nl = n_l[p_seg]
            for side in ("L", "R"):
                if side == "L":
                    c_lo = plo[part]
                    c_hi = coords[order[c_start + c_nl - 1], p_dim]
                    c_first = c_start
                    c_size = c_nl
                    kind_child, kind_dchild = 0, 3
                else:
                    c_lo = coords[order[c_start + c_nl], p_dim]
                    c_hi = phi[part]
                    c_first = c_start + c_nl
                    c_size = sizes[p_seg] - c_nl
                    kind_child, kind_dchild = 1, 4
                c_alive = ~((p_blo > c_hi) | (c_lo > p_bhi))
                c_inside = c_alive & (p_blo <= c_lo) & (c_hi <= p_bhi)
                c_single = c_size == 1

                m = c_inside & (p_dim == last)
                if m.any():
                    br_m = m & ~c_single
                    if br_m.any():
                        # half folds are stored under the parent segment
                        fold = fold_l if side == "L" else fold_r
                        acc.add(
                            p_q[br_m],
                            [fold[c][p_seg[br_m]] for c in range(len(kinds))],
                        )
                    sg_m = m & c_single
                    if sg_m.any():
                        pts = order[c_first[sg_m]]
                        acc.add(p_q[sg_m], [ch[pts] for ch in chans])
                m = c_inside & (p_dim < last)
                if m.any():
                    sg_m = m & c_single
                    if sg_m.any():
                        for g in np.unique(p_dim[sg_m]):
                            mg = sg_m & (p_dim == g)
                            chain_fold(order[c_first[mg]], p_q[mg], int(g) + 1)
                    br_m = m & ~c_single
                    if br_m.any():
                        route(kind_dchild, p_seg[br_m], p_q[br_m])
                m = c_alive & ~c_inside
                if m.any():
                    route(kind_child, p_seg[m], p_q[m])

        if not route_q:
            break

        # materialise exactly the demanded children; next-dimension
        # copies are re-sorted by the next coordinate's rank
        maps = np.full((5, nseg), -1, dtype=np.int64)
        specs = []
        offset = 0
        for kind_id in range(5):
            idx = np.nonzero(need[kind_id])[0]
            maps[kind_id, idx] = offset + np.arange(idx.size, dtype=np.int64)
            offset += idx.size
            if kind_id in (0, 3):
                starts, lens = seg_start[idx], n_l[idx]
            elif kind_id in (1, 4):
                starts, lens = seg_start[idx] + n_l[idx], sizes[idx] - n_l[idx]
            else:
                starts, lens = seg_start[idx], sizes[idx]
            dm = dims[idx] + (1 if kind_id >= 2 else 0)
            specs.append((starts, lens, dm, kind_id >= 2))

        contents = []
        lens_all = []
        dims_all = []
        for starts, lens, dm, resort in specs:
            got = order[_ragged_gather(starts, lens)]
            if resort and got.size:
                rank_rows = np.repeat(dm, lens)
                rank_vals = ranks[rank_rows, got]
                seg_ordinal = np.repeat(np.arange(lens.size, dtype=np.int64), lens)
                got = got[np.argsort(seg_ordinal * n + rank_vals)]
            contents.append(got)
            lens_all.append(lens)
            dims_all.append(dm)

        order = np.concatenate(contents)
        seg_len = np.concatenate(lens_all)
        seg_dim = np.concatenate(dims_all)
        seg_start = np.concatenate(([0], np.cumsum(seg_len)[:-1])).astype(np.int64)

        kind_arr = np.concatenate(route_kind)
        seg_arr = np.concatenate(route_seg)
        pair_q = np.concatenate(route_q)
        pair_seg = maps[kind_arr, seg_arr]

    canonical = canonical_structure_size(n, d)
    if check_bounds:
        if canonical > construction_bound(n, d):
            raise BoundViolationError("construction counter exceeded n*d*B(n,d)")
        if visited.size and int(visited.max()) > query_visit_bound(n, d):
            raise BoundViolationError("query visited more than 2^d * C(h+d,d) nodes")
    return BatchFoldResult(tuple(acc.ans), visited, canonical, n, d)


def batch_query(
    points: Sequence[Point],
    d: int,
    monoid: Monoid,
    boxes: Sequence[QueryBox],
    *,
    check_bounds: bool = True,
) -> tuple[list, BatchFoldResult]:
    """Streamed equivalent of build-then-query for a batch of boxes.

    Returns the decoded per-box fold values together with the raw batch
    result carrying counters.
    """
    coords_list, values = _validate_points(points, d)
    coords = np.asarray(coords_list, dtype=np.int64).reshape(len(points), d)
    channels = monoid.encode(values)
    lo, hi = boxes_to_arrays(boxes, d)
    res = fold_box_batches(
        coords, monoid.channel_kinds, channels, lo, hi, check_bounds=check_bounds
    )
    decoded = [
        monoid.decode([int(res.answers[c][i]) for c in range(len(res.answers))])
        for i in range(len(boxes))
    ]
    return decoded, res
