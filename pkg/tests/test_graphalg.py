import math
from collections import deque

import numpy as np
import pytest

from threshnet.analytic import clustering, threshold_for_mean_degree
from threshnet.ensemble import Graph, ModelParams, derive_seed, sample_graph
from threshnet.graphalg import (
    ComponentSummary,
    PathStats,
    average_neighbor_degree,
    components,
    degree_histogram,
    largest_component_nodes,
    local_clustering,
    mean_shortest_path,
    transitivity,
    triangle_counts,
    write_node_stats_csv,
)

TRIANGLE = Graph.from_edges(3, [[0, 1], [0, 2], [1, 2]])
PATH3 = Graph.from_edges(3, [[0, 1], [1, 2]])
STAR4 = Graph.from_edges(4, [[0, 1], [0, 2], [0, 3]])


def bfs_flood_components(g):
    """Oracle: component sizes by plain BFS flood fill."""
    seen = [False] * g.n
    sizes = []
    for start in range(g.n):
        if seen[start]:
            continue
        q = deque([start])
        seen[start] = True
        size = 0
        while q:
            v = q.popleft()
            size += 1
            for w in g.adjacency(v):
                if not seen[w]:
                    seen[w] = True
                    q.append(w)
        sizes.append(size)
    return sorted(sizes, reverse=True)


def node_iterator_triangles(g):
    """Oracle: total triangle count by iterating node neighbor pairs."""
    adj = [set(g.adjacency(v).tolist()) for v in range(g.n)]
    total = 0
    for v in range(g.n):
        nbrs = sorted(adj[v])
        for a_idx in range(len(nbrs)):
            for b_idx in range(a_idx + 1, len(nbrs)):
                if nbrs[b_idx] in adj[nbrs[a_idx]]:
                    total += 1
    return total // 3  # each triangle seen from its three corners


def random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    iu = np.transpose(np.triu_indices(n, 1))
    mask = rng.random(len(iu)) < p
    return Graph.from_edges(n, iu[mask])


class TestComponents:
    def test_path_plus_isolated(self):
        g = Graph.from_edges(4, [[0, 1], [1, 2]])
        cs = components(g)
        assert cs.sizes == (3, 1)
        assert cs.largest == 3 and cs.second_largest == 1

    def test_edgeless(self):
        g = Graph.from_edges(5, np.empty((0, 2), dtype=np.int64))
        cs = components(g)
        assert cs.sizes == (1, 1, 1, 1, 1)
        assert cs.largest == 1 and cs.second_largest == 1

    def test_single_component_second_is_zero(self):
        cs = components(TRIANGLE)
        assert cs.largest == 3 and cs.second_largest == 0

    def test_sizes_sum_to_n(self):
        for seed in range(20):
            g = random_graph(40, 0.05, seed)
            assert sum(components(g).sizes) == g.n

    def test_matches_bfs_flood_fill(self):
        rng = np.random.default_rng(0)
        for trial in range(100):
            n = int(rng.integers(2, 65))
            p = float(rng.uniform(0, 0.15))
            g = random_graph(n, p, 1000 + trial)
            assert list(components(g).sizes) == bfs_flood_components(g)

    def test_rho_half_largest_is_kmax_plus_one(self):
        p = ModelParams(n=400, t=threshold_for_mean_degree(400, 4.0), rho=0.5)
        for s in range(3):
            g = sample_graph(p, derive_seed(73, s))
            assert components(g).largest == g.degrees.max() + 1


class TestMeanShortestPath:
    def test_triangle(self):
        stats = mean_shortest_path(TRIANGLE)
        assert stats.mean_distance == 1.0
        assert stats.exact and stats.source_count == 3

    def test_path3(self):
        # ordered pairs: (1+1+2)*2 / 6 = 4/3
        assert mean_shortest_path(PATH3).mean_distance == pytest.approx(4.0 / 3.0)

    def test_scope_is_largest_component(self):
        g = Graph.from_edges(6, [[0, 1], [1, 2], [3, 4]])
        assert mean_shortest_path(g).mean_distance == pytest.approx(4.0 / 3.0)

    def test_degenerate_scope(self):
        g = Graph.from_edges(3, np.empty((0, 2), dtype=np.int64))
        with pytest.raises(ValueError, match="fewer than 2"):
            mean_shortest_path(g)

    def test_sampled_estimate_near_exact(self):
        g = random_graph(400, 0.02, 5)
        exact = mean_shortest_path(g, sources="all")
        members = largest_component_nodes(g)
        per_source = []
        for src in members:
            from threshnet import _kernels

            s, cnt = _kernels.bfs_distance_sum(g.offsets, g.targets, src)
            per_source.append(s / (members.size - 1))
        sampled = mean_shortest_path(g, sources=120, seed=3)
        se = np.std(per_source) / math.sqrt(sampled.source_count)
        assert not sampled.exact
        assert abs(sampled.mean_distance - exact.mean_distance) <= 3 * se

    def test_sampled_deterministic(self):
        g = random_graph(300, 0.02, 9)
        a = mean_shortest_path(g, sources=50, seed=11)
        b = mean_shortest_path(g, sources=50, seed=11)
        assert a == b

    def test_rho_half_giant_distances(self):
        # on the rho = 1/2 giant component all distances are 1 or 2
        p = ModelParams(n=400, t=threshold_for_mean_degree(400, 4.0), rho=0.5)
        g = sample_graph(p, 123)
        stats = mean_shortest_path(g, sources="all")
        assert 1.0 <= stats.mean_distance < 2.0


class TestTransitivity:
    def test_triangle_is_one(self):
        assert transitivity(TRIANGLE) == 1.0

    def test_path_is_zero(self):
        assert transitivity(PATH3) == 0.0

    def test_undefined_without_two_stars(self):
        g = Graph.from_edges(4, [[0, 1], [2, 3]])
        with pytest.raises(ValueError, match="two-star"):
            transitivity(g)

    def test_in_unit_interval_and_matches_node_iterator(self):
        for seed in range(30):
            g = random_graph(60, 0.08, 100 + seed)
            deg = g.degrees
            if np.sum(deg * (deg - 1)) == 0:
                continue
            tr = transitivity(g)
            assert 0.0 <= tr <= 1.0
            assert triangle_counts(g).sum() // 3 == node_iterator_triangles(g)

    def test_matches_analytic_clustering(self):
        # empirical transitivity over 200 samples vs the series value
        n, kbar, rho = 2000, 4.0, 0.3
        t = threshold_for_mean_degree(n, kbar)
        p = ModelParams(n=n, t=t, rho=rho)
        vals = [transitivity(sample_graph(p, derive_seed(79, s), method="skip"))
                for s in range(200)]
        se = np.std(vals) / math.sqrt(len(vals))
        assert abs(np.mean(vals) - clustering(t, rho)) <= 4 * se


class TestLocalClustering:
    def test_triangle(self):
        assert local_clustering(TRIANGLE).tolist() == [1.0, 1.0, 1.0]

    def test_star(self):
        assert local_clustering(STAR4).tolist() == [0.0, 0.0, 0.0, 0.0]

    def test_mean_decreases_with_n(self):
        rho, kbar = 0.3, 4.0
        means = []
        for n in (200, 800, 3200):
            t = threshold_for_mean_degree(n, kbar)
            p = ModelParams(n=n, t=t, rho=rho)
            vals = [local_clustering(sample_graph(p, derive_seed(83, n + s))).mean()
                    for s in range(30)]
            means.append(np.mean(vals))
        assert means[0] > means[1] > means[2]


class TestAverageNeighborDegree:
    def test_star(self):
        annd = average_neighbor_degree(STAR4)
        assert annd[0] == 1.0
        assert annd[1] == annd[2] == annd[3] == 3.0

    def test_ring(self):
        ring = Graph.from_edges(5, [[i, (i + 1) % 5] for i in range(5)])
        assert average_neighbor_degree(ring).tolist() == [2.0] * 5

    def test_path3(self):
        assert average_neighbor_degree(PATH3).tolist() == [2.0, 1.0, 2.0]

    def test_isolated_nodes_zero(self):
        g = Graph.from_edges(4, [[0, 1]])
        annd = average_neighbor_degree(g)
        assert annd[2] == 0.0 and annd[3] == 0.0


class TestDegreeHistogram:
    def test_triangle(self):
        counts = degree_histogram(TRIANGLE)
        assert counts.tolist() == [0, 0, 3]

    def test_edgeless(self):
        g = Graph.from_edges(5, np.empty((0, 2), dtype=np.int64))
        assert degree_histogram(g).tolist() == [5]

    def test_handshake(self):
        for seed in range(20):
            g = random_graph(50, 0.06, 300 + seed)
            counts = degree_histogram(g)
            assert counts.sum() == g.n
            assert np.dot(np.arange(counts.size), counts) == 2 * g.num_edges


class TestNodeStatsCsv:
    def test_schema_and_values(self, tmp_path):
        path = tmp_path / "stats.csv"
        write_node_stats_csv(STAR4, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "node,degree,local_clustering,avg_neighbor_degree"
        assert len(lines) == 5
        row = lines[1].split(",")
        assert row[0] == "0" and row[1] == "3"
        assert float(row[3]) == 1.0
