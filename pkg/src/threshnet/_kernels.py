"""Numba kernels for the hot loops: sparse edge sampling, union-find, BFS,
and triangle counting.

The sampler kernel draws its uniforms from an internal splitmix64 stream so
results are bit-reproducible across platforms and worker counts.
"""

from __future__ import annotations

import math

import numpy as np
from numba import float64, int64, njit, uint64

_SM64_GAMMA = uint64(0x9E3779B97F4A7C15)
_SM64_M1 = uint64(0xBF58476D1CE4E5B9)
_SM64_M2 = uint64(0x94D049BB133111EB)


@njit(cache=True)
def _sm64(state):
    """Advance splitmix64; returns (state, uniform in (0, 1])."""
    state = state + _SM64_GAMMA
    z = state
    z = (z ^ (z >> uint64(30))) * _SM64_M1
    z = (z ^ (z >> uint64(27))) * _SM64_M2
    z = z ^ (z >> uint64(31))
    u = (float64(z >> uint64(11)) + 1.0) * (2.0 ** -53)
    return state, u


@njit(cache=True)
def sample_edges_skip(z_desc, t, rho, seed, buf):
    """Geometric-skipping edge sampler over columns sorted by latent value.

    z_desc must be sorted descending.  For row a the acceptance bound is
    the edge probability at the next untried column; since conditional
    edge probabilities are monotone in z, the bound dominates every
    remaining column and geometric gaps at the bound rate plus
    accept-with-p/bound thinning reproduce independent Bernoulli trials.

    Writes (a, j) index pairs into buf; returns the count, or -1 if buf
    is full (caller grows it and retries).
    """
    n = z_desc.shape[0]
    sq_noise = math.sqrt(1.0 - 2.0 * rho)
    sq_rho = math.sqrt(rho)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    state = uint64(seed)
    m = 0
    cap = buf.shape[0]
    for a in range(n - 1):
        za = z_desc[a]
        j = a + 1
        arg = (t - sq_rho * (za + z_desc[j])) / sq_noise
        q = 0.5 * math.erfc(arg * inv_sqrt2)
        while j < n:
            if q <= 0.0:
                break
            if q < 1.0:
                state, u = _sm64(state)
                gap = math.floor(math.log(u) / math.log1p(-q))
                # float-domain guard: the gap can exceed int64 range
                if gap >= float64(n - j):
                    break
                j += int64(gap)
            argj = (t - sq_rho * (za + z_desc[j])) / sq_noise
            p = 0.5 * math.erfc(argj * inv_sqrt2)
            state, u = _sm64(state)
            if u * q < p:
                if m >= cap:
                    return -1
                buf[m, 0] = a
                buf[m, 1] = j
                m += 1
            q = p
            j += 1
    return m


@njit(cache=True)
def component_labels(n, edges):
    """Union-find (path halving, min-root union): root label per node."""
    parent = np.arange(n)
    for e in range(edges.shape[0]):
        i, j = edges[e, 0], edges[e, 1]
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        while parent[j] != j:
            parent[j] = parent[parent[j]]
            j = parent[j]
        if i != j:
            if i < j:
                parent[j] = i
            else:
                parent[i] = j
    labels = np.empty(n, dtype=np.int64)
    for v in range(n):
        r = v
        while parent[r] != r:
            r = parent[r]
        labels[v] = r
    return labels


@njit(cache=True)
def bfs_distance_sum(offsets, targets, source):
    """Sum of hop distances from source to every reachable node.

    Returns (distance_sum, reached_count) with the source included in
    the count at distance 0.
    """
    n = offsets.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    head, tail = 0, 1
    queue[0] = source
    dist[source] = 0
    total = int64(0)
    count = int64(0)
    while head < tail:
        v = queue[head]
        head += 1
        d = dist[v]
        total += d
        count += 1
        for idx in range(offsets[v], offsets[v + 1]):
            w = targets[idx]
            if dist[w] < 0:
                dist[w] = d + 1
                queue[tail] = w
                tail += 1
    return total, count


@njit(cache=True)
def bfs_eccentricity_ok(offsets, targets, source, limit):
    """True if every node reachable from source sits within `limit` hops."""
    n = offsets.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    head, tail = 0, 1
    queue[0] = source
    dist[source] = 0
    ok = True
    while head < tail:
        v = queue[head]
        head += 1
        if dist[v] > limit:
            ok = False
        for idx in range(offsets[v], offsets[v + 1]):
            w = targets[idx]
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue[tail] = w
                tail += 1
    return ok


@njit(cache=True)
def triangles_per_vertex(offsets, targets, edges):
    """Triangle count through each vertex via sorted-adjacency merges.

    For each edge (u, v) every common neighbor w closes one triangle;
    crediting w once per closing edge gives each triangle to each of its
    three vertices exactly once.
    """
    n = offsets.shape[0] - 1
    tri = np.zeros(n, dtype=np.int64)
    for e in range(edges.shape[0]):
        u, v = edges[e, 0], edges[e, 1]
        iu, iv = offsets[u], offsets[v]
        eu, ev = offsets[u + 1], offsets[v + 1]
        while iu < eu and iv < ev:
            a, b = targets[iu], targets[iv]
            if a == b:
                tri[a] += 1
                iu += 1
                iv += 1
            elif a < b:
                iu += 1
            else:
                iv += 1
    return tri
