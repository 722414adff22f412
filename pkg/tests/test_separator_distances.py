import numpy as np
import pytest

from twdist.decomposition import SkewSeparatorNode, SkewSeparatorTree, prepare_sst, skew_separator_tree
from twdist.generators import SplitMix64, gen_partial_ktree
from twdist.graph import DisconnectedGraphError, Graph, dijkstra
from twdist.oracle import apsp_oracle, report_oracle
from twdist.rangetree import COUNT_SUM, MAX_DISTANCE, NEG_INFINITY
from twdist.separator_distances import (
    TwRunCounters,
    base_case_threshold,
    combine_visiting,
    distance_report_tw,
    eccentricities_tw,
    visiting_eccentricities,
    wiener_tw,
)

# fan-out example: x=0 meets three separator vertices 1,2,3; the far side
# holds 4,5,6 and y=7 with d(x,y) = 3
FAN_EDGES = [(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 4, 1), (2, 5, 1),
             (3, 5, 1), (3, 6, 1), (5, 7, 1)]


def fan_graph():
    return Graph(8, FAN_EDGES)


def rows_for(g, sources):
    return np.array([[dijkstra(g, s).dist[v] for v in range(g.n)] for s in sources],
                    dtype=np.int64)


def attribution_oracle(g, z_list, x_list, y_list):
    """Minimum-index attribution by brute force over all pairs."""
    mat = apsp_oracle(g)
    k = len(z_list)
    maxes = {(i, x): NEG_INFINITY for i in range(k) for x in x_list}
    counts = {(i, x): 0 for i in range(k) for x in x_list}
    sums = {(i, x): 0 for i in range(k) for x in x_list}
    for x in x_list:
        for y in y_list:
            through = [mat[x, z] + mat[z, y] for z in z_list]
            best = min(through)
            assert best == mat[x, y]
            i = through.index(best)
            d_zy = int(mat[z_list[i], y])
            maxes[(i, x)] = max(maxes[(i, x)], d_zy)
            counts[(i, x)] += 1
            sums[(i, x)] += d_zy
    return maxes, counts, sums


class TestVisitingEccentricities:
    def test_fan_example_values(self):
        g = fan_graph()
        z = [1, 2, 3]
        ys = [1, 2, 3, 4, 5, 6, 7]
        xs = [0, 1, 2, 3]
        rows = rows_for(g, z)
        table = visiting_eccentricities(rows[:, ys], rows[:, xs], MAX_DISTANCE)
        assert [table.entry(i, 0) for i in range(3)] == [1, 2, 1]

    def test_single_separator_on_path(self):
        g = Graph(5, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1)])
        z = [2]
        ys = [2, 3, 4]
        xs = [0, 1, 2]
        rows = rows_for(g, z)
        table = visiting_eccentricities(rows[:, ys], rows[:, xs], MAX_DISTANCE)
        for pos in range(len(xs)):
            assert table.entry(0, pos) == 2  # the far endpoint is 2 past z

    @pytest.mark.parametrize("drop", [False, True])
    def test_matches_attribution_oracle(self, drop):
        rng = SplitMix64(61)
        for _ in range(12):
            n = rng.randint(6, 30)
            k = rng.randint(1, min(4, n - 2))
            g, td = gen_partial_ktree(n, k, 0.7, 6, rng.next_u64())
            t = skew_separator_tree(g, td, td.width + 1)
            node = t.root
            if node.is_leaf:
                continue
            z = list(node.separator)
            xs = sorted(node.left.vertices)
            ys = sorted(node.right.vertices)
            rows = rows_for(g, z)
            want_max, want_cnt, want_sum = attribution_oracle(g, z, xs, ys)
            tmax = visiting_eccentricities(
                rows[:, ys], rows[:, xs], MAX_DISTANCE, drop_trivial_dim=drop
            )
            tcs = visiting_eccentricities(
                rows[:, ys], rows[:, xs], COUNT_SUM, drop_trivial_dim=drop
            )
            for i in range(len(z)):
                for pos, x in enumerate(xs):
                    assert tmax.entry(i, pos) == want_max[(i, x)]
                    assert tcs.entry(i, pos) == (want_cnt[(i, x)], want_sum[(i, x)])

    def test_attribution_is_exact_partition(self):
        rng = SplitMix64(67)
        for _ in range(8):
            n = rng.randint(8, 30)
            g, td = gen_partial_ktree(n, 2, 0.8, 5, rng.next_u64())
            t = skew_separator_tree(g, td, td.width + 1)
            if t.root.is_leaf:
                continue
            z = list(t.root.separator)
            xs = sorted(t.root.left.vertices)
            ys = sorted(t.root.right.vertices)
            rows = rows_for(g, z)
            table = visiting_eccentricities(rows[:, ys], rows[:, xs], COUNT_SUM)
            mat = apsp_oracle(g)
            counts, sums = table.values
            for pos, x in enumerate(xs):
                assert counts[:, pos].sum() == len(ys)
                total = sum(
                    int(counts[i, pos]) * int(rows[i, x]) + int(sums[i, pos])
                    for i in range(len(z))
                )
                assert total == sum(int(mat[x, y]) for y in ys)


class TestCombineVisiting:
    def test_fan_example(self):
        g = fan_graph()
        z = [1, 2, 3]
        rows = rows_for(g, z)
        table = visiting_eccentricities(
            rows[:, [1, 2, 3, 4, 5, 6, 7]], rows[:, [0]], MAX_DISTANCE
        )
        assert combine_visiting(rows[:, 0], table, 0) == 3

    def test_skips_unreached_entries(self):
        from twdist.separator_distances import VisitingEccTable

        vals = np.array([[np.iinfo(np.int64).min], [4]], dtype=np.int64)
        table = VisitingEccTable(MAX_DISTANCE, (vals,))
        assert combine_visiting([10, 2], table, 0) == 6

    def test_equals_oracle_far_maximum(self):
        rng = SplitMix64(71)
        for _ in range(8):
            n = rng.randint(8, 28)
            g, td = gen_partial_ktree(n, 2, 0.7, 7, rng.next_u64())
            t = skew_separator_tree(g, td, td.width + 1)
            if t.root.is_leaf:
                continue
            z = list(t.root.separator)
            xs = sorted(t.root.left.vertices)
            ys = sorted(t.root.right.vertices)
            rows = rows_for(g, z)
            table = visiting_eccentricities(rows[:, ys], rows[:, xs], MAX_DISTANCE)
            mat = apsp_oracle(g)
            for pos, x in enumerate(xs):
                assert combine_visiting(rows[:, x], table, pos) == max(
                    int(mat[x, y]) for y in ys
                )


class TestEccentricitiesTw:
    def test_p4(self):
        g = Graph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
        rep = eccentricities_tw(g, prepare_sst(g))
        assert rep.eccentricities == (3, 2, 2, 3)
        assert rep.diameter == 3 and rep.radius == 2 and rep.wiener is None

    def test_k2(self):
        g = Graph(2, [(0, 1, 1)])
        rep = eccentricities_tw(g, prepare_sst(g))
        assert rep.eccentricities == (1, 1)

    def test_disconnected_rejected(self):
        g = Graph(3, [(0, 1, 1)])
        root = SkewSeparatorNode((0, 1, 2), {0, 1, 2})
        with pytest.raises(DisconnectedGraphError):
            eccentricities_tw(g, SkewSeparatorTree(root, 3))

    def test_random_partial_ktrees_match_oracle(self):
        rng = SplitMix64(81)
        for _ in range(15):
            n = rng.randint(5, 250)
            k = rng.randint(1, min(5, n - 1))
            g, td = gen_partial_ktree(n, k, 0.6, 100, rng.next_u64())
            t = skew_separator_tree(g, td, td.width + 1)
            rep = eccentricities_tw(g, t)
            assert rep.eccentricities == report_oracle(g).eccentricities


class TestWienerTw:
    def test_p4_unit(self):
        g = Graph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
        assert wiener_tw(g, prepare_sst(g)) == 10

    def test_complete_graph(self):
        n = 7
        g = Graph(n, [(i, j, 1) for i in range(n) for j in range(i + 1, n)])
        assert wiener_tw(g, prepare_sst(g)) == n * (n - 1) // 2

    def test_diameter_two_identity(self):
        # any unweighted graph of diameter <= 2 has pair sum 2*C(n,2) - m
        rng = SplitMix64(91)
        for _ in range(5):
            n = rng.randint(5, 40)
            edges = {(0, v) for v in range(1, n)}  # universal vertex
            for _ in range(n):
                a, b = rng.randint(1, n - 1), rng.randint(1, n - 1)
                if a != b:
                    edges.add((min(a, b), max(a, b)))
            g = Graph(n, [(u, v, 1) for u, v in sorted(edges)])
            w = wiener_tw(g, prepare_sst(g))
            assert w == 2 * (n * (n - 1) // 2) - g.m

    def test_random_weighted_matches_oracle(self):
        rng = SplitMix64(101)
        for _ in range(10):
            n = rng.randint(5, 200)
            k = rng.randint(1, min(4, n - 1))
            g, td = gen_partial_ktree(n, k, 0.7, 100, rng.next_u64())
            t = skew_separator_tree(g, td, td.width + 1)
            assert wiener_tw(g, t) == report_oracle(g).wiener


class TestRecursionStructure:
    def test_base_case_threshold_matches_formula(self):
        import math

        assert base_case_threshold(1, 5)
        assert base_case_threshold(3, 1)
        for n, k in ((100, 2), (2000, 6), (50, 1)):
            want = n / math.log(n) < 4 * k * (k + 1)
            assert base_case_threshold(n, k) == want

    def test_forcing_base_case_anywhere_gives_identical_output(self):
        rng = SplitMix64(111)
        g, td = gen_partial_ktree(160, 2, 0.7, 9, 5150)
        t = skew_separator_tree(g, td, td.width + 1)
        reference = distance_report_tw(g, t)
        for limit in (None, 5, 20, 60, 10_000):
            assert distance_report_tw(g, t, base_case_limit=limit) == reference

    def test_flip_symmetry(self):
        def mirror(node):
            if node.is_leaf:
                return SkewSeparatorNode(node.separator, node.vertices)
            return SkewSeparatorNode(
                node.separator, node.vertices, mirror(node.right), mirror(node.left)
            )

        rng = SplitMix64(121)
        for _ in range(6):
            n = rng.randint(10, 150)
            g, td = gen_partial_ktree(n, 2, 0.7, 8, rng.next_u64())
            t = skew_separator_tree(g, td, td.width + 1)
            flipped = SkewSeparatorTree(mirror(t.root), t.k)
            assert distance_report_tw(g, t) == distance_report_tw(g, flipped)

    def test_counters_populated_on_recursive_run(self):
        g, td = gen_partial_ktree(400, 1, 1.0, 3, 99)
        t = skew_separator_tree(g, td, td.width + 1)
        cnt = TwRunCounters()
        distance_report_tw(g, t, counters=cnt)
        assert cnt.internal_nodes >= 1
        assert cnt.tree_builds >= 2
        assert cnt.max_build_canonical > 0
        assert cnt.sssp_runs > 0

    def test_drop_trivial_dim_equivalence(self):
        rng = SplitMix64(131)
        for _ in range(5):
            n = rng.randint(30, 120)
            k = rng.randint(1, 3)
            g, td = gen_partial_ktree(n, k, 0.8, 6, rng.next_u64())
            t = skew_separator_tree(g, td, td.width + 1)
            a = distance_report_tw(g, t, base_case_limit=8)
            b = distance_report_tw(g, t, base_case_limit=8, drop_trivial_dim=True)
            assert a == b
