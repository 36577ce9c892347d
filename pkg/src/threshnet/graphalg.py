"""Graph statistics for sampled ensembles.

Connected components (union-find), average shortest path length on the
largest component (exact all-sources BFS or seeded source sampling),
transitivity, per-node local clustering and average neighbor degree, and
degree histograms.  All operations are read-only on immutable graphs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .ensemble import Graph, _rng

# all-sources BFS up to this component size; beyond it, sample sources
_EXACT_BFS_LIMIT = 2000
_DEFAULT_SOURCES = 200


@dataclass(frozen=True)
class ComponentSummary:
    """Connected component sizes, largest first."""

    sizes: tuple[int, ...]
    largest: int
    second_largest: int


@dataclass(frozen=True)
class PathStats:
    """Average shortest path length over ordered pairs of distinct nodes
    in the largest component; exact marks all-sources BFS versus a
    sampled-source estimate."""

    mean_distance: float
    source_count: int
    exact: bool


def components(g: Graph) -> ComponentSummary:
    """Exact partition into connected components via union-find."""
    labels = _kernels.component_labels(g.n, g.edges)
    sizes = np.sort(np.bincount(labels, minlength=0)[np.unique(labels)])[::-1]
    return ComponentSummary(
        sizes=tuple(int(s) for s in sizes),
        largest=int(sizes[0]),
        second_largest=int(sizes[1]) if sizes.size > 1 else 0,
    )


def largest_component_nodes(g: Graph) -> np.ndarray:
    """Sorted node indices of the largest component (ties: smallest root)."""
    labels = _kernels.component_labels(g.n, g.edges)
    counts = np.bincount(labels)
    return np.nonzero(labels == counts.argmax())[0]


def mean_shortest_path(g: Graph, sources: int | str | None = None, seed: int = 0) -> PathStats:
    """Average hop distance on the largest component.

    Averages d_ij over ordered pairs of distinct nodes.  sources:
    "all" forces exact all-sources BFS; an integer samples that many
    distinct source nodes uniformly (deterministic in seed); None picks
    all sources for components up to 2000 nodes and 200 sampled sources
    beyond that.  The sampled estimator is the mean over sources of the
    per-source mean distance, which is unbiased for the ordered-pair
    average.

    Raises ValueError when the largest component has fewer than 2 nodes.
    """
    members = largest_component_nodes(g)
    size = members.size
    if size < 2:
        raise ValueError("largest component has fewer than 2 nodes")
    if sources is None:
        n_src = size if size <= _EXACT_BFS_LIMIT else _DEFAULT_SOURCES
    elif sources == "all":
        n_src = size
    else:
        n_src = int(sources)
        if n_src < 1:
            raise ValueError("source count must be >= 1")
        n_src = min(n_src, size)
    if n_src == size:
        chosen = members
    else:
        chosen = members[_rng(seed).choice(size, size=n_src, replace=False)]
        chosen = np.sort(chosen)
    total = 0
    for src in chosen:
        dist_sum, reached = _kernels.bfs_distance_sum(g.offsets, g.targets, src)
        assert reached == size  # BFS cannot leave the component
        total += dist_sum
    return PathStats(
        mean_distance=total / (n_src * (size - 1)),
        source_count=int(n_src),
        exact=bool(n_src == size),
    )


def triangle_counts(g: Graph) -> np.ndarray:
    """Triangles through each node (sorted-adjacency edge iteration)."""
    return _kernels.triangles_per_vertex(g.offsets, g.targets, g.edges)


def transitivity(g: Graph) -> float:
    """3 * triangles / two-stars, with two-stars = sum_i C(k_i, 2).

    Raises ValueError when the graph has no two-stars.
    """
    deg = g.degrees
    two_stars = int(np.sum(deg * (deg - 1) // 2))
    if two_stars == 0:
        raise ValueError("transitivity undefined: graph has no two-stars")
    # per-vertex counts credit each triangle to all three corners
    return float(triangle_counts(g).sum() / two_stars)


def local_clustering(g: Graph) -> np.ndarray:
    """Per-node c_i = triangles through i / C(k_i, 2); 0 when k_i < 2."""
    deg = g.degrees.astype(float)
    tri = triangle_counts(g).astype(float)
    out = np.zeros(g.n)
    mask = deg >= 2
    out[mask] = tri[mask] / (deg[mask] * (deg[mask] - 1) / 2.0)
    return out


def average_neighbor_degree(g: Graph) -> np.ndarray:
    """Per-node mean degree of neighbors; isolated nodes get 0."""
    deg = g.degrees
    out = np.zeros(g.n)
    mask = deg > 0
    if g.targets.size:
        row_of_entry = np.repeat(np.arange(g.n), deg)
        sums = np.bincount(row_of_entry, weights=deg[g.targets], minlength=g.n)
        out[mask] = sums[mask] / deg[mask]
    return out


def degree_histogram(g: Graph) -> np.ndarray:
    """counts[k] = number of nodes with degree k, length max degree + 1."""
    return np.bincount(g.degrees)


def write_node_stats_csv(g: Graph, path) -> None:
    """Per-node CSV: node,degree,local_clustering,avg_neighbor_degree."""
    deg = g.degrees
    lc = local_clustering(g)
    annd = average_neighbor_degree(g)
    with open(path, "w") as fh:
        fh.write("node,degree,local_clustering,avg_neighbor_degree\n")
        for v in range(g.n):
            fh.write(f"{v},{int(deg[v])},{float(lc[v])!r},{float(annd[v])!r}\n")
