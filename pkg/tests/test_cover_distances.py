import itertools

import pytest

from twdist.cover_distances import (
    CoverTooLargeError,
    HTable,
    VcCounters,
    VertexCover,
    compute_h,
    ecc_fast_vc,
    ecc_wiener_vc,
    find_vertex_cover,
    is_vertex_cover,
)
from twdist.generators import SplitMix64, gen_planted_cover
from twdist.graph import DisconnectedGraphError, Graph
from twdist.oracle import report_oracle


def star(n):
    return Graph(n, [(0, i, 1) for i in range(1, n)])


class TestFindVertexCover:
    def test_star_center(self):
        cover = find_vertex_cover(star(6), 3)
        assert cover.vertices == frozenset({0})

    def test_triangle_needs_two(self):
        g = Graph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
        assert find_vertex_cover(g, 3).k == 2

    def test_p4_matches_brute_force(self):
        g = Graph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
        best = min(
            (len(s) for r in range(5) for s in itertools.combinations(range(4), r)
             if is_vertex_cover(g, s)),
        )
        assert best == 2
        assert find_vertex_cover(g, 4).k == 2

    def test_minimum_found_on_random_graphs(self):
        rng = SplitMix64(7)
        for _ in range(8):
            n = rng.randint(4, 10)
            edges = set()
            for _ in range(rng.randint(n - 1, 2 * n)):
                a, b = rng.randint(0, n - 1), rng.randint(0, n - 1)
                if a != b:
                    edges.add((min(a, b), max(a, b)))
            g = Graph(n, [(u, v, 1) for u, v in sorted(edges)])
            brute = min(
                len(s)
                for r in range(n + 1)
                for s in itertools.combinations(range(n), r)
                if is_vertex_cover(g, s)
            )
            assert find_vertex_cover(g, n).k == brute

    def test_too_large_signalled(self):
        g = Graph(6, [(0, 1, 1), (2, 3, 1), (4, 5, 1)])
        with pytest.raises(CoverTooLargeError):
            find_vertex_cover(g, 2)

    def test_rejects_weighted(self):
        with pytest.raises(ValueError, match="unweighted"):
            find_vertex_cover(Graph(2, [(0, 1, 3)]), 1)


class TestEccWienerVc:
    def test_star_k14(self):
        g = star(5)
        rep = ecc_wiener_vc(g, VertexCover(frozenset({0})))
        assert rep.eccentricities == (1, 2, 2, 2, 2)
        assert rep.wiener == 16  # 4 edges + 2 * C(4,2)

    def test_k2(self):
        rep = ecc_wiener_vc(Graph(2, [(0, 1, 1)]), VertexCover(frozenset({0})))
        assert rep.eccentricities == (1, 1) and rep.wiener == 1

    def test_single_vertex(self):
        rep = ecc_wiener_vc(Graph(1, []), VertexCover(frozenset()))
        assert rep.eccentricities == (0,) and rep.wiener == 0

    def test_disconnected_rejected(self):
        g = Graph(3, [(0, 1, 1)])
        with pytest.raises(DisconnectedGraphError):
            ecc_wiener_vc(g, VertexCover(frozenset({0, 2})))

    def test_invalid_cover_rejected(self):
        g = Graph(3, [(0, 1, 1), (1, 2, 1)])
        with pytest.raises(ValueError, match="not a vertex cover"):
            ecc_wiener_vc(g, VertexCover(frozenset({0})))

    def test_random_planted_instances(self):
        rng = SplitMix64(15)
        for _ in range(12):
            n = rng.randint(4, 200)
            k = rng.randint(1, min(8, n - 1))
            g, cover = gen_planted_cover(n, k, rng.next_u64())
            cnt = VcCounters()
            rep = ecc_wiener_vc(g, cover, cnt)
            want = report_oracle(g)
            assert rep == want
            assert cnt.sssp_runs <= 2**cover.k + cover.k


class TestComputeH:
    def test_no_outside_vertices(self):
        c = VertexCover(frozenset({0, 1, 2}))
        h = compute_h(c, [])
        for mask in range(8):
            assert h.kind(mask) == "empty"

    def test_single_witness_propagates_to_supersets(self):
        c = VertexCover(frozenset({0, 1, 2}))
        h = compute_h(c, [(9, [0])])
        for mask in range(8):
            if mask & 1:
                assert h.kind(mask) == "unique" and h.witness(mask) == 9
            else:
                assert h.kind(mask) == "empty"

    def test_identical_neighbourhoods_are_many(self):
        c = VertexCover(frozenset({0, 1, 2}))
        h = compute_h(c, [(9, [0, 1]), (10, [0, 1])])
        assert h.kind(0b011) == "many"
        assert h.kind(0b111) == "many"
        assert h.kind(0b001) == "empty"

    def test_excluding_semantics(self):
        c = VertexCover(frozenset({0, 1}))
        h = compute_h(c, [(7, [0])])
        assert h.excluding(0b01, 9)
        assert not h.excluding(0b01, 7)
        assert not h.excluding(0b10, 7)

    def test_against_brute_force(self):
        rng = SplitMix64(25)
        for _ in range(10):
            k = rng.randint(1, 8)
            c = VertexCover(frozenset(range(k)))
            outside = []
            for w in range(k, k + rng.randint(0, 10)):
                nb = sorted({rng.randint(0, k - 1) for _ in range(rng.randint(1, k))})
                outside.append((w, nb))
            h = compute_h(c, outside)
            for mask in range(1 << k):
                inside = [w for w, nb in outside
                          if all((mask >> u) & 1 for u in nb)]
                distinct = set(inside)
                if not distinct:
                    assert h.kind(mask) == "empty"
                elif len(distinct) == 1:
                    assert h.kind(mask) == "unique"
                    assert h.witness(mask) == next(iter(distinct))
                else:
                    assert h.kind(mask) == "many"

    def test_limit_enforced(self):
        c = VertexCover(frozenset(range(26)))
        with pytest.raises(MemoryError):
            compute_h(c, [])


class TestEccFastVc:
    def test_far_vertex_one_past_cover(self):
        # v reaches u only through the in-cover eccentric set: e(v) = 3
        g = Graph(9, [(0, 1, 1), (0, 6, 1), (0, 2, 1), (2, 5, 1), (1, 3, 1),
                      (1, 4, 1), (7, 4, 1), (7, 5, 1), (8, 5, 1), (8, 6, 1)])
        cover = VertexCover(frozenset({1, 2, 3, 4, 5, 6}))
        assert is_vertex_cover(g, cover.vertices)
        ecc = ecc_fast_vc(g, cover)
        assert ecc[0] == 3
        assert tuple(ecc) == report_oracle(g).eccentricities

    def test_star_center_edge_case(self):
        g = star(5)
        ecc = ecc_fast_vc(g, VertexCover(frozenset({0})))
        assert ecc == [1, 2, 2, 2, 2]

    def test_k2(self):
        assert ecc_fast_vc(Graph(2, [(0, 1, 1)]), VertexCover(frozenset({0}))) == [1, 1]

    def test_triangle(self):
        g = Graph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
        assert ecc_fast_vc(g, find_vertex_cover(g, 2)) == [1, 1, 1]

    def test_agrees_with_direct_algorithm(self):
        rng = SplitMix64(35)
        for _ in range(15):
            n = rng.randint(4, 250)
            k = rng.randint(1, min(10, n - 1))
            g, cover = gen_planted_cover(n, k, rng.next_u64())
            cnt = VcCounters()
            fast = ecc_fast_vc(g, cover, cnt)
            direct = ecc_wiener_vc(g, cover)
            assert tuple(fast) == direct.eccentricities
            assert cnt.sssp_runs <= 2**cover.k + cover.k

    def test_equal_neighbourhoods_get_equal_eccentricities(self):
        rng = SplitMix64(45)
        g, cover = gen_planted_cover(60, 4, 9)
        ecc = ecc_fast_vc(g, cover)
        groups = {}
        for v in range(g.n):
            if v in cover.vertices:
                continue
            key = tuple(sorted(u for u, _ in g.adjacency[v]))
            groups.setdefault(key, set()).add(ecc[v])
        for key, values in groups.items():
            assert len(values) == 1
