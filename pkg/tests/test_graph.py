import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twdist.graph import (
    U64_MAX,
    UNREACHABLE,
    DisconnectedGraphError,
    DistanceOverflowError,
    Graph,
    ParseError,
    add_shortcut_clique,
    bfs,
    check_connected,
    dijkstra,
    distance_rows,
    induced_subgraph,
    parse_graph,
)
from twdist.generators import SplitMix64
from twdist.oracle import apsp_oracle


def random_graph(rng, n, extra_edges, wmax=10, connected=True):
    edges = []
    if connected:
        for v in range(1, n):
            edges.append((rng.randint(0, v - 1), v, rng.randint(0, wmax)))
    for _ in range(extra_edges):
        u = rng.randint(0, n - 1)
        v = rng.randint(0, n - 1)
        if u != v:
            edges.append((u, v, rng.randint(0, wmax)))
    return Graph(n, edges)


class TestGraphConstruction:
    def test_duplicate_edges_collapse_to_minimum(self):
        g = Graph(3, [(0, 1, 5), (1, 0, 2), (0, 1, 9)])
        assert g.edges == ((0, 1, 2),)

    def test_rejects_self_loop(self):
        with pytest.raises(ValueError, match="self-loop"):
            Graph(2, [(1, 1, 1)])

    def test_rejects_negative_weight(self):
        with pytest.raises(ValueError, match="negative"):
            Graph(2, [(0, 1, -1)])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            Graph(2, [(0, 2, 1)])

    def test_rejects_oversized_weight(self):
        with pytest.raises(DistanceOverflowError):
            Graph(2, [(0, 1, U64_MAX + 1)])


class TestDijkstra:
    def test_single_path(self):
        g = Graph(3, [(0, 1, 2), (1, 2, 3)])
        assert dijkstra(g, 0).dist == (0, 2, 5)

    def test_three_branch_example_graph(self):
        # x fans out to three separator vertices; d(x, y) = 3
        edges = [(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 4, 1), (2, 5, 1),
                 (3, 5, 1), (3, 6, 1), (5, 7, 1)]
        g = Graph(8, edges)
        assert dijkstra(g, 0).dist[7] == 3

    def test_matches_oracle_rows(self):
        rng = SplitMix64(11)
        g = random_graph(rng, 50, 80)
        mat = apsp_oracle(g)
        for s in range(0, 50, 7):
            row = dijkstra(g, s).dist
            assert list(row) == [int(x) for x in mat[s]]

    def test_unreachable_is_none(self):
        g = Graph(3, [(0, 1, 1)])
        assert dijkstra(g, 0).dist[2] is None

    def test_overflow_detected(self):
        big = U64_MAX - 1
        g = Graph(3, [(0, 1, big), (1, 2, big)])
        with pytest.raises(DistanceOverflowError):
            dijkstra(g, 0)

    def test_zero_weight_edges(self):
        g = Graph(3, [(0, 1, 0), (1, 2, 4)])
        assert dijkstra(g, 0).dist == (0, 0, 4)

    @given(st.integers(0, 2**30))
    def test_distance_row_source_zero(self, seed):
        rng = SplitMix64(seed)
        g = random_graph(rng, rng.randint(2, 20), 10)
        s = rng.randint(0, g.n - 1)
        row = dijkstra(g, s)
        assert row.dist[s] == 0
        # triangle inequality over every edge
        for u, v, w in g.edges:
            du, dv = row.dist[u], row.dist[v]
            if du is not None and dv is not None:
                assert dv <= du + w
                assert du <= dv + w


class TestBfs:
    def test_star_center(self):
        g = Graph(5, [(0, i, 1) for i in range(1, 5)])
        assert bfs(g, 0).dist == (0, 1, 1, 1, 1)

    def test_path_endpoint(self):
        g = Graph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
        assert bfs(g, 0).dist == (0, 1, 2, 3)

    def test_rejects_weighted(self):
        g = Graph(2, [(0, 1, 3)])
        with pytest.raises(ValueError, match="unit-weight"):
            bfs(g, 0)

    def test_agrees_with_dijkstra_on_unit_weights(self):
        rng = SplitMix64(23)
        for _ in range(10):
            n = rng.randint(2, 60)
            g = random_graph(rng, n, 2 * n, wmax=1)
            g = Graph(n, [(u, v, 1) for u, v, _ in g.edges])
            for s in range(0, n, max(1, n // 5)):
                assert bfs(g, s).dist == dijkstra(g, s).dist


class TestShortcutClique:
    def test_existing_shorter_edge_unchanged(self):
        g = Graph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
        rows = [dijkstra(g, 0), dijkstra(g, 2)]
        g2 = add_shortcut_clique(g, [0, 2], rows)
        assert g2.edges == g.edges

    def test_path_gets_length_two_shortcut(self):
        # a - z1 - b - z2 - c
        g = Graph(5, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)])
        rows = [dijkstra(g, 1), dijkstra(g, 3)]
        g2 = add_shortcut_clique(g, [1, 3], rows)
        assert (1, 3, 2) in g2.edges

    def test_distances_preserved(self):
        rng = SplitMix64(37)
        for _ in range(8):
            n = rng.randint(4, 50)
            g = random_graph(rng, n, n)
            z = sorted({rng.randint(0, n - 1) for _ in range(rng.randint(2, 6))})
            rows = [dijkstra(g, zi) for zi in z]
            g2 = add_shortcut_clique(g, z, rows)
            assert np.array_equal(apsp_oracle(g), apsp_oracle(g2))


class TestInducedSubgraph:
    def test_whole_vertex_set(self):
        g = Graph(4, [(0, 1, 2), (2, 3, 4)])
        sub, orig = induced_subgraph(g, range(4))
        assert sub.edges == g.edges
        assert orig == (0, 1, 2, 3)

    def test_single_vertex(self):
        g = Graph(4, [(0, 1, 2)])
        sub, orig = induced_subgraph(g, [2])
        assert sub.n == 1 and sub.m == 0 and orig == (2,)

    def test_random_filter_matches(self):
        rng = SplitMix64(41)
        g = random_graph(rng, 30, 60)
        keep = sorted({rng.randint(0, 29) for _ in range(12)})
        sub, orig = induced_subgraph(g, keep)
        kept = set(keep)
        expected = [(u, v, w) for u, v, w in g.edges if u in kept and v in kept]
        assert sub.m == len(expected)
        for u, v, w in sub.edges:
            assert (orig[u], orig[v], w) in expected or (orig[v], orig[u], w) in expected

    def test_subgraph_distances_never_shrink(self):
        rng = SplitMix64(43)
        g = random_graph(rng, 25, 50)
        keep = sorted({rng.randint(0, 24) for _ in range(15)})
        sub, orig = induced_subgraph(g, keep)
        full = apsp_oracle(g)
        small = apsp_oracle(sub)
        for a in range(sub.n):
            for b in range(sub.n):
                if small[a, b] != UNREACHABLE:
                    assert small[a, b] >= full[orig[a], orig[b]]


class TestParseAndConnectivity:
    def test_weighted_k2(self):
        g = parse_graph("p sp 2 1\na 1 2 5\n")
        assert g.n == 2 and g.edges == ((0, 1, 5),)

    def test_empty_edge_list_disconnected(self):
        g = parse_graph("p tw 3 0\n")
        assert not check_connected(g)

    def test_pace_sample_counts_match_header(self):
        text = "c sample\np tw 5 4\n1 2\n2 3\n3 4\n4 5\n"
        g = parse_graph(text)
        assert g.n == 5 and g.m == 4

    def test_header_mismatch_rejected(self):
        with pytest.raises(ParseError, match="declares"):
            parse_graph("p tw 3 2\n1 2\n")

    def test_parse_error_reports_line(self):
        with pytest.raises(ParseError, match="line 3"):
            parse_graph("c x\np tw 2 1\n1 5\n")

    def test_negative_weight_rejected(self):
        with pytest.raises(ParseError):
            parse_graph("p sp 2 1\na 1 2 -3\n")

    def test_self_loop_rejected(self):
        with pytest.raises(ParseError, match="self-loop"):
            parse_graph("p tw 2 1\n1 1\n")

    def test_connected_single_vertex(self):
        assert check_connected(Graph(1, []))


class TestDistanceRows:
    def test_matches_python_dijkstra(self):
        rng = SplitMix64(53)
        g = random_graph(rng, 40, 60, wmax=50)
        rows = distance_rows(g)
        for s in range(40):
            want = dijkstra(g, s).dist
            assert [int(x) for x in rows[s]] == list(want)

    def test_unreachable_marker(self):
        g = Graph(3, [(0, 1, 1)])
        rows = distance_rows(g, [0])
        assert rows[0, 2] == UNREACHABLE
