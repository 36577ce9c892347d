"""Reproducible ensemble experiment drivers.

Giant-component susceptibility sweeps (mean second-largest component
size over a mean-degree grid, whose peak locates the percolation
transition), shortest-path scaling runs, and the CSV tables behind the
analytic/empirical comparison figures.

Seed discipline: every sample's seed is derived as
hash(master_seed, grid_index, sample_index), so results are
byte-identical regardless of worker count; aggregation happens in grid
order.  CSV outputs start with a '# key=value' comment block recording
the full parameters and master seed.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import (
    SeriesControl,
    clustering,
    degree_distribution,
    degree_distribution_laplace,
    degree_variance,
    threshold_for_mean_degree,
    triangles_per_node,
)
from .disparity import apply_filter, solve_alpha
from .ensemble import ModelParams, derive_seed, sample_graph, sample_weights
from .fitting import fit, read_degree_sequence
from .graphalg import (
    average_neighbor_degree,
    components,
    degree_histogram,
    local_clustering,
    mean_shortest_path,
)

FIGURE_TAGS = ("fig2", "fig3", "fig4", "fig7", "fig8", "fig9")


@dataclass(frozen=True)
class SweepRecord:
    """One grid point of an experiment: aggregate of `samples` draws."""

    n: int
    rho: float
    mean_degree_target: float
    statistic_name: str
    value: float
    stderr: float
    samples: int
    master_seed: int


@dataclass(frozen=True)
class TransitionPoint:
    """Grid argmax of the susceptibility curve."""

    n: int
    rho: float
    k_critical: float
    k_grid_step: float


def mean_stderr_twopass(values) -> tuple[float, float]:
    """Mean and standard error, two-pass (exact sample-variance) form."""
    x = np.asarray(values, dtype=float)
    m = float(x.mean())
    if x.size < 2:
        return m, 0.0
    sd = math.sqrt(float(np.sum((x - m) ** 2)) / (x.size - 1))
    return m, sd / math.sqrt(x.size)


def mean_stderr_welford(values) -> tuple[float, float]:
    """Single-pass Welford recurrence; agrees with the two-pass form."""
    count = 0
    mean = 0.0
    m2 = 0.0
    for v in values:
        count += 1
        delta = v - mean
        mean += delta / count
        m2 += delta * (v - mean)
    if count < 2:
        return mean, 0.0
    return mean, math.sqrt(m2 / (count - 1)) / math.sqrt(count)


def _map_tasks(fn, tasks, workers):
    if workers <= 1:
        return [fn(task) for task in tasks]
    chunk = max(1, len(tasks) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def _second_largest_task(task):
    n, t, rho, seed, method = task
    g = sample_graph(ModelParams(n=n, t=t, rho=rho), seed, method)
    return float(components(g).second_largest)


def run_susceptibility_sweep(
    n: int,
    rho: float,
    k_grid,
    samples: int,
    master_seed: int,
    workers: int = 1,
    method: str = "dense",
) -> list[SweepRecord]:
    """Mean and stderr of the second-largest component size per grid k.

    rho = 1/2 is excluded: there the second-largest component is always
    a singleton and the susceptibility carries no signal.
    """
    if not 0.0 <= rho < 0.5:
        raise ValueError("susceptibility sweep requires 0 <= rho < 0.5")
    k_grid = [float(k) for k in k_grid]
    for k in k_grid:
        if not 0.0 < k < n - 1:
            raise ValueError(f"grid mean degree {k} outside (0, {n - 1})")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    tasks = []
    for gi, k in enumerate(k_grid):
        t = threshold_for_mean_degree(n, k)
        for si in range(samples):
            tasks.append((n, t, rho, derive_seed(master_seed, gi, si), method))
    results = _map_tasks(_second_largest_task, tasks, workers)
    records = []
    for gi, k in enumerate(k_grid):
        vals = results[gi * samples:(gi + 1) * samples]
        mean, err = mean_stderr_twopass(vals)
        records.append(SweepRecord(
            n=n, rho=rho, mean_degree_target=k,
            statistic_name="second_largest_component",
            value=mean, stderr=err, samples=samples, master_seed=master_seed,
        ))
    return records


def find_transition(records) -> TransitionPoint:
    """Grid argmax of the susceptibility; ties break toward smaller k.

    Requires >= 3 records sharing (n, rho); an all-equal (flat) curve
    raises, since the argmax would be meaningless.
    """
    if len(records) < 3:
        raise ValueError("need at least 3 grid points to locate a transition")
    heads = {(r.n, r.rho) for r in records}
    if len(heads) != 1:
        raise ValueError("records must share (n, rho)")
    ordered = sorted(records, key=lambda r: r.mean_degree_target)
    values = [r.value for r in ordered]
    if max(values) == min(values):
        raise ValueError("no transition: susceptibility curve is flat")
    best = max(range(len(ordered)), key=lambda i: (values[i], -ordered[i].mean_degree_target))
    ks = [r.mean_degree_target for r in ordered]
    step = min(b - a for a, b in zip(ks, ks[1:]))
    (n, rho), = heads
    return TransitionPoint(n=n, rho=rho, k_critical=ks[best], k_grid_step=step)


def _path_task(task):
    n, t, rho, seed, method = task
    g = sample_graph(ModelParams(n=n, t=t, rho=rho), seed, method)
    try:
        stats = mean_shortest_path(g, sources=None, seed=derive_seed(seed, 2))
    except ValueError:
        return float("nan")
    return stats.mean_distance


def run_path_scaling(
    n_grid,
    rho_grid,
    mean_degree: float,
    samples: int,
    master_seed: int,
    workers: int = 1,
    method: str = "dense",
) -> list[SweepRecord]:
    """Mean shortest path on the largest component per (n, rho).

    Grid order is rho-major then n; degenerate draws (largest component
    below 2 nodes) are dropped from the aggregate, and a grid point with
    no valid draw gets nan (rendered as an empty CSV cell).
    """
    n_grid = [int(n) for n in n_grid]
    rho_grid = [float(r) for r in rho_grid]
    tasks = []
    grid = [(rho, n) for rho in rho_grid for n in n_grid]
    for gi, (rho, n) in enumerate(grid):
        t = threshold_for_mean_degree(n, mean_degree)
        for si in range(samples):
            tasks.append((n, t, rho, derive_seed(master_seed, gi, si), method))
    results = _map_tasks(_path_task, tasks, workers)
    records = []
    for gi, (rho, n) in enumerate(grid):
        vals = np.array(results[gi * samples:(gi + 1) * samples])
        valid = vals[~np.isnan(vals)]
        if valid.size:
            mean, err = mean_stderr_twopass(valid)
        else:
            mean, err = float("nan"), float("nan")
        records.append(SweepRecord(
            n=n, rho=rho, mean_degree_target=mean_degree,
            statistic_name="mean_shortest_path",
            value=mean, stderr=err, samples=int(valid.size), master_seed=master_seed,
        ))
    return records


# ---------------------------------------------------------------------------
# CSV output

def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return "" if math.isnan(x) else repr(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def _write_csv(path_or_file, comments: dict, header: list[str], rows) -> None:
    def emit(fh):
        for key in sorted(comments):
            fh.write(f"# {key}={comments[key]}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w") as fh:
            emit(fh)


def write_records_csv(records, path, extra_comments: dict | None = None) -> None:
    """Sweep records with a self-describing provenance comment block."""
    comments = dict(extra_comments or {})
    if records:
        comments.setdefault("master_seed", records[0].master_seed)
        comments.setdefault("statistic", records[0].statistic_name)
    header = ["n", "rho", "mean_degree_target", "statistic", "value",
              "stderr", "samples", "master_seed"]
    rows = [
        (r.n, r.rho, r.mean_degree_target, r.statistic_name, r.value,
         r.stderr, r.samples, r.master_seed)
        for r in records
    ]
    _write_csv(path, comments, header, rows)


# ---------------------------------------------------------------------------
# Figure tables

def _fig2_rows(params, ctl):
    n = int(params.get("n", 100_000))
    kbar = float(params.get("mean_degree", 4.0))
    axis = params.get("axis", "rho")
    if axis == "rho":
        grid = params.get("grid", [round(0.05 * i, 2) for i in range(11)])
        rows = []
        t = threshold_for_mean_degree(n, kbar)
        for rho in grid:
            rows.append((rho, clustering(t, rho, ctl), triangles_per_node(n, t, rho, ctl)))
        return ["rho", "clustering", "triangles_per_node"], rows
    if axis == "n":
        grid = params.get("grid", [1000, 3162, 10_000, 31_623, 100_000])
        rho = float(params.get("rho", 0.3))
        rows = []
        for n_i in grid:
            t = threshold_for_mean_degree(int(n_i), kbar)
            rows.append((int(n_i), clustering(t, rho, ctl),
                         triangles_per_node(int(n_i), t, rho, ctl)))
        return ["n", "clustering", "triangles_per_node"], rows
    if axis == "k":
        grid = params.get("grid", [1.0, 2.0, 4.0, 8.0, 16.0])
        rho = float(params.get("rho", 0.3))
        rows = []
        for k in grid:
            t = threshold_for_mean_degree(n, float(k))
            rows.append((float(k), clustering(t, rho, ctl), triangles_per_node(n, t, rho, ctl)))
        return ["mean_degree", "clustering", "triangles_per_node"], rows
    raise ValueError(f"fig2 axis must be rho, n, or k, got {axis!r}")


def _fig3_rows(params, ctl):
    n = int(params.get("n", 100_000))
    k_grid = params.get("mean_degree_grid", [1.0, 2.0, 4.0, 8.0, 16.0])
    rho_grid = params.get("rho_grid", [round(0.025 * i, 3) for i in range(21)])
    rows = []
    for k in k_grid:
        t = threshold_for_mean_degree(n, float(k))
        for rho in rho_grid:
            rows.append((float(rho), float(k), degree_variance(n, t, rho, ctl)))
    return ["rho", "mean_degree", "degree_variance"], rows


def _fig4_rows(params, ctl):
    n = int(params.get("n", 100_000))
    kbar = float(params.get("mean_degree", 100.0))
    rho_grid = params.get("rho_grid", [0.1, 0.3, 0.5])
    order = int(params.get("order", 60))
    p_min = float(params.get("p_min", 1e-12))
    t = threshold_for_mean_degree(n, kbar)
    rows = []
    for rho in rho_grid:
        quad = degree_distribution(n, t, rho, order=order)
        lap = degree_distribution_laplace(n, t, rho)
        for k in range(n):
            if quad.probs[k] > p_min:
                rows.append((float(rho), k, float(quad.probs[k]), float(lap.probs[k])))
    return ["rho", "k", "p_quadrature", "p_laplace"], rows


def _fig7_rows(params, ctl):
    edges_path = params["edges"]
    order = int(params.get("order", 40))
    degrees, n = read_degree_sequence(edges_path)
    result = fit(degrees, n, ctl)
    dd = degree_distribution(n, result.t, max(result.rho, 0.0), order=order)
    observed = np.bincount(degrees, minlength=n)
    rows = []
    for k in range(n):
        if observed[k] == 0 and dd.probs[k] < 1e-12:
            continue
        rows.append((k, int(observed[k]), observed[k] / n, float(dd.probs[k])))
    header = ["k", "observed_count", "observed_frequency", "p_model"]
    return header, rows, {"fit": result.to_json()}


def _fig8_rows(params, ctl):
    n = int(params.get("n", 1000))
    kbar = float(params.get("mean_degree", 4.0))
    rho = float(params.get("rho", 0.3))
    samples = int(params.get("samples", 20))
    master_seed = int(params.get("master_seed", 0))
    method = params.get("method", "dense")
    t = threshold_for_mean_degree(n, kbar)
    lc_sum = {}
    annd_sum = {}
    count = {}
    for si in range(samples):
        g = sample_graph(ModelParams(n=n, t=t, rho=rho),
                         derive_seed(master_seed, 0, si), method)
        deg = g.degrees
        lc = local_clustering(g)
        annd = average_neighbor_degree(g)
        for v in range(n):
            k = int(deg[v])
            lc_sum[k] = lc_sum.get(k, 0.0) + lc[v]
            annd_sum[k] = annd_sum.get(k, 0.0) + annd[v]
            count[k] = count.get(k, 0) + 1
    rows = []
    for k in sorted(count):
        c = count[k]
        rows.append((k, lc_sum[k] / c, annd_sum[k] / c, c))
    return ["degree", "mean_local_clustering", "mean_avg_neighbor_degree", "nodes"], rows


def _fig9_rows(params, ctl):
    n = int(params.get("n", 2000))
    kbar = float(params.get("mean_degree", 4.0))
    rho_grid = params.get("rho_grid", [0.1, 0.3, 0.45])
    samples = int(params.get("samples", 100))
    master_seed = int(params.get("master_seed", 0))
    order = int(params.get("order", 80))
    rows = []
    for gi, rho in enumerate(rho_grid):
        alpha = solve_alpha(n, float(rho), kbar, order=order)
        pooled = np.zeros(1, dtype=np.int64)
        for si in range(samples):
            w = sample_weights(ModelParams(n=n, t=0.0, rho=float(rho)),
                               derive_seed(master_seed, gi, si))
            hist = degree_histogram(apply_filter(w, alpha))
            if hist.size > pooled.size:
                pooled = np.pad(pooled, (0, hist.size - pooled.size))
            pooled[:hist.size] += hist
        for k, c in enumerate(pooled):
            if c:
                rows.append((float(rho), float(alpha), k, int(c)))
    return ["rho", "alpha", "k", "count"], rows


def run_figure_table(figure: str, params: dict | None, out_path) -> None:
    """Emit the CSV behind one comparison figure.

    Tags: fig2 (clustering and triangles per node along a rho/n/k axis),
    fig3 (degree variance over a rho x mean-degree grid), fig4
    (quadrature vs asymptotic degree distributions), fig7 (observed
    degree histogram vs the fitted model), fig8 (per-degree local
    clustering and average neighbor degree from samples), fig9
    (disparity-filter degree histograms at solved alpha).  Unknown tags
    raise ValueError.
    """
    params = dict(params or {})
    ctl = SeriesControl(max_terms=int(params.pop("max_terms", 800)))
    extra = {}
    if figure == "fig2":
        header, rows = _fig2_rows(params, ctl)
    elif figure == "fig3":
        header, rows = _fig3_rows(params, ctl)
    elif figure == "fig4":
        header, rows = _fig4_rows(params, ctl)
    elif figure == "fig7":
        header, rows, extra = _fig7_rows(params, ctl)
    elif figure == "fig8":
        header, rows = _fig8_rows(params, ctl)
    elif figure == "fig9":
        header, rows = _fig9_rows(params, ctl)
    else:
        raise ValueError(f"unknown figure tag {figure!r} (expected one of {FIGURE_TAGS})")
    comments = {"figure": figure, **{k: v for k, v in params.items()}, **extra}
    _write_csv(out_path, comments, header, rows)
