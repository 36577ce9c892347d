"""Model parameters, graph/weight samplers, and the edge-list format.

A single ensemble member is the triple (n, t, rho): relational weights on
all node pairs are jointly Gaussian with unit variance, correlation rho
between pairs sharing a node, and zero otherwise; thresholding at t gives
the graph.  Sampling goes through the latent decomposition

    W_ij = sqrt(1 - 2 rho) * Y_ij + sqrt(rho) * (Z_i + Z_j)

with i.i.d. standard normal node propensities Z and pair noise Y, which
reproduces exactly that covariance.  Latent vectors are plain numpy float
arrays of length n.

Determinism contract: identical (params, seed) always produce identical
output.  The latent draw happens first, then pair noise in row-major
(i, j), i < j order, so thresholding `sample_weights` at t recovers the
`sample_graph` edge set for the same seed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels

_RHO_HALF_SNAP = 1e-12
# ~4x expected edges; the skip-sampler buffer grows if a draw exceeds it
_SKIP_BUF_MIN = 1024


def derive_seed(master_seed: int, *indices: int) -> int:
    """Deterministic 64-bit stream seed from a master seed and indices.

    Hashing (master_seed, *indices) through numpy's SeedSequence gives
    independent per-sample streams regardless of worker count or
    execution order.
    """
    ss = np.random.SeedSequence((int(master_seed),) + tuple(int(i) for i in indices))
    return int(ss.generate_state(1, np.uint64)[0])


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class ModelParams:
    """Ensemble member: node count n, threshold t, local correlation rho.

    rho is constrained to [0, 1/2] (the pair covariance matrix is not
    positive semi-definite beyond 1/2); values within 1e-12 of 1/2 snap
    to exactly 1/2 so the deterministic no-noise branch is used instead
    of dividing by sqrt(1 - 2 rho) ~ 0.
    """

    n: int
    t: float
    rho: float

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if not math.isfinite(self.t):
            raise ValueError(f"threshold t must be finite, got {self.t!r}")
        if not 0.0 <= self.rho <= 0.5:
            raise ValueError(f"rho must lie in [0, 0.5], got {self.rho!r}")
        if abs(self.rho - 0.5) < _RHO_HALF_SNAP:
            object.__setattr__(self, "rho", 0.5)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "rho", float(self.rho))


class Graph:
    """Simple undirected graph: canonical edge list plus CSR adjacency.

    Edges are stored as (i, j) pairs with i < j in row-major order; the
    adjacency is compressed (offsets + sorted neighbor array) and built
    once, since downstream workloads are BFS-heavy.  Instances are
    treated as immutable.
    """

    __slots__ = ("n", "edges", "offsets", "targets")

    def __init__(self, n: int, edges: np.ndarray, offsets: np.ndarray, targets: np.ndarray):
        self.n = n
        self.edges = edges
        self.offsets = offsets
        self.targets = targets

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        """Build from an (m, 2) array-like of node pairs.

        Pairs are canonicalized to i < j, sorted row-major, and
        de-duplicated; self-loops are rejected.
        """
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e.min() < 0 or e.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise ValueError("self-loops are not allowed")
            lo = np.minimum(e[:, 0], e[:, 1])
            hi = np.maximum(e[:, 0], e[:, 1])
            e = np.unique(np.stack([lo, hi], axis=1), axis=0)
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((dst, src))
        targets = np.ascontiguousarray(dst[order])
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
        return cls(n, e, offsets, targets)

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def adjacency(self, i: int) -> np.ndarray:
        """Sorted neighbor list of node i (a CSR slice view)."""
        return self.targets[self.offsets[i]:self.offsets[i + 1]]


class WeightMatrix:
    """Upper-triangular store of the n(n-1)/2 relational weights.

    Entry (i, j), i < j lives at flat index i*(n-1) - i*(i-1)/2 + j-i-1;
    access is symmetric and the diagonal does not exist.
    """

    __slots__ = ("n", "values")

    def __init__(self, n: int, values: np.ndarray):
        if values.shape != (n * (n - 1) // 2,):
            raise ValueError("values length must be n*(n-1)/2")
        self.n = n
        self.values = values

    def _row_slice(self, i: int) -> slice:
        start = i * (self.n - 1) - i * (i - 1) // 2
        return slice(start, start + self.n - 1 - i)

    def value(self, i: int, j: int) -> float:
        if i == j:
            raise IndexError("diagonal entries are undefined")
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError("node index out of range")
        if i > j:
            i, j = j, i
        return float(self.values[i * (self.n - 1) - i * (i - 1) // 2 + j - i - 1])

    def row_sums(self) -> np.ndarray:
        """All underlying degrees d_i = sum_j X_ij in one pass."""
        sums = np.zeros(self.n)
        for i in range(self.n - 1):
            row = self.values[self._row_slice(i)]
            sums[i] += row.sum()
            sums[i + 1:] += row
        return sums

    def to_dense(self) -> np.ndarray:
        """Symmetric (n, n) matrix with zeros on the (undefined) diagonal."""
        out = np.zeros((self.n, self.n))
        iu = np.triu_indices(self.n, 1)
        out[iu] = self.values
        out[(iu[1], iu[0])] = self.values
        return out


def row_sum(w: WeightMatrix, i: int) -> float:
    """Underlying degree of node i: sum of its n-1 incident weights."""
    if not 0 <= i < w.n:
        raise IndexError(f"node index {i} out of range for n={w.n}")
    total = w.values[w._row_slice(i)].sum()
    for j in range(i):
        total += w.values[j * (w.n - 1) - j * (j - 1) // 2 + i - j - 1]
    return float(total)


def sample_latent(params: ModelParams, seed: int) -> np.ndarray:
    """Node propensity vector z (n i.i.d. standard normals) for this seed."""
    return _rng(seed).standard_normal(params.n)


def _graph_rho_half(params: ModelParams, z: np.ndarray) -> list[np.ndarray]:
    # no noise draw: edge iff sqrt(1/2)(z_i + z_j) >= t
    b = math.sqrt(0.5)
    rows = []
    for i in range(params.n - 1):
        w = b * (z[i] + z[i + 1:])
        js = np.nonzero(w >= params.t)[0]
        if js.size:
            rows.append(np.stack([np.full(js.size, i, dtype=np.int64), js + i + 1], axis=1))
    return rows


def sample_graph(params: ModelParams, seed: int, method: str = "dense") -> Graph:
    """Draw one graph from the ensemble.

    Conditional on the latent vector z, edges are independent with
    P[edge (i,j) | z] = 1 - Phi((t - sqrt(rho)(z_i+z_j)) / sqrt(1-2 rho));
    at rho = 1/2 the noise term vanishes and the edge rule is the
    deterministic sqrt(1/2)(z_i + z_j) >= t.

    method "dense" (default) draws noise for every pair in row-major
    (i, j), i < j order and matches `sample_weights` stream-for-stream.
    method "skip" is the accelerated sparse sampler: identical edge
    distribution (geometric skipping with per-row probability bounds),
    different random stream, so use it for large sparse ensembles, not
    where threshold consistency with `sample_weights` matters.
    """
    n, t, rho = params.n, params.t, params.rho
    rng = _rng(seed)
    z = rng.standard_normal(n)
    if rho == 0.5:
        rows = _graph_rho_half(params, z)
        edges = np.concatenate(rows) if rows else np.empty((0, 2), dtype=np.int64)
        return Graph.from_edges(n, edges)
    if method == "dense":
        a, b = math.sqrt(1.0 - 2.0 * rho), math.sqrt(rho)
        rows = []
        for i in range(n - 1):
            y = rng.standard_normal(n - 1 - i)
            w = a * y + b * (z[i] + z[i + 1:])
            js = np.nonzero(w >= t)[0]
            if js.size:
                rows.append(np.stack([np.full(js.size, i, dtype=np.int64), js + i + 1], axis=1))
        edges = np.concatenate(rows) if rows else np.empty((0, 2), dtype=np.int64)
        return Graph.from_edges(n, edges)
    if method == "skip":
        order = np.argsort(-z, kind="stable")
        z_desc = z[order]
        kernel_seed = derive_seed(seed, 1)
        cap = max(_SKIP_BUF_MIN, 4 * n)
        while True:
            buf = np.empty((cap, 2), dtype=np.int64)
            m = _kernels.sample_edges_skip(z_desc, t, rho, np.uint64(kernel_seed), buf)
            if m >= 0:
                break
            cap *= 4
        edges = order[buf[:m]]
        return Graph.from_edges(n, edges)
    raise ValueError(f"unknown sampling method {method!r}")


def sample_weights(params: ModelParams, seed: int) -> WeightMatrix:
    """Draw the full weight matrix for this seed.

    Uses the same latent draw and the same row-major pair noise stream
    as `sample_graph(..., method="dense")`, so thresholding the result
    at params.t reproduces that graph's edge set exactly.
    """
    n, rho = params.n, params.rho
    rng = _rng(seed)
    z = rng.standard_normal(n)
    a, b = math.sqrt(max(1.0 - 2.0 * rho, 0.0)), math.sqrt(rho)
    values = np.empty(n * (n - 1) // 2)
    pos = 0
    for i in range(n - 1):
        y = rng.standard_normal(n - 1 - i)
        values[pos:pos + n - 1 - i] = a * y + b * (z[i] + z[i + 1:])
        pos += n - 1 - i
    return WeightMatrix(n, values)


def threshold_weights(w: WeightMatrix, t: float) -> Graph:
    """Graph with an edge wherever the stored weight is >= t."""
    idx = np.nonzero(w.values >= t)[0]
    n = w.n
    # invert the flat upper-triangular index
    i = np.empty(idx.size, dtype=np.int64)
    j = np.empty(idx.size, dtype=np.int64)
    starts = np.array([r * (n - 1) - r * (r - 1) // 2 for r in range(n)], dtype=np.int64)
    if idx.size:
        i = np.searchsorted(starts, idx, side="right") - 1
        j = idx - starts[i] + i + 1
    return Graph.from_edges(n, np.stack([i, j], axis=1))


# ---------------------------------------------------------------------------
# Edge-list text format (shared repo-wide): one edge per line, "i j" with
# 0-indexed integers; '#' lines are comments; "# n=<N>" declares the node
# count, otherwise it is inferred as max index + 1.

def write_edge_list(graph: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# n={graph.n}\n")
        for i, j in graph.edges:
            fh.write(f"{i} {j}\n")


def read_edge_list(path) -> tuple[Graph, int]:
    """Parse the shared edge-list format.

    Returns (graph, duplicate_count); duplicates are removed with a
    warning.  Malformed lines raise ValueError with the line number.
    """
    declared_n = None
    pairs = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("n="):
                    try:
                        declared_n = int(body[2:])
                    except ValueError:
                        raise ValueError(f"line {lineno}: bad node-count header {line!r}")
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'i j', got {line!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"line {lineno}: non-integer endpoint in {line!r}")
            if i < 0 or j < 0:
                raise ValueError(f"line {lineno}: negative node index in {line!r}")
            if i == j:
                raise ValueError(f"line {lineno}: self-loop {line!r}")
            pairs.append((min(i, j), max(i, j)))
    if declared_n is None:
        n = max((max(i, j) for i, j in pairs), default=-1) + 1
        if n < 2:
            raise ValueError("cannot infer node count from an empty edge list")
    else:
        n = declared_n
        for i, j in pairs:
            if j >= n:
                raise ValueError(f"edge ({i}, {j}) exceeds declared n={n}")
    unique = sorted(set(pairs))
    n_dup = len(pairs) - len(unique)
    if n_dup:
        warnings.warn(f"{n_dup} duplicate edge(s) removed", stacklevel=2)
    edges = np.array(unique, dtype=np.int64).reshape(-1, 2)
    return Graph.from_edges(n, edges), n_dup
