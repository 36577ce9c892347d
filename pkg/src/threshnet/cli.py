"""Command-line interface.

Subcommands: sample, analytic, degree-dist, fit, sweep-gc, paths,
disparity, figure.  Exactly one of --t / --mean-degree selects the
threshold (--mean-degree is inverted at parse time).  Exit codes:
0 success, 1 runtime failure, 2 usage error.  Numeric warnings (series
truncation, clamped fits, duplicate edges) go to stderr without failing
the run.  THRESHNET_SEED serves as the default seed when --seed is not
given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict

import numpy as np

from .analytic import (
    SeriesControl,
    degree_distribution,
    degree_distribution_laplace,
    summarize,
    threshold_for_mean_degree,
)
from .disparity import apply_filter, disparity_edge_density, solve_alpha
from .ensemble import ModelParams, derive_seed, sample_graph, sample_weights, write_edge_list
from .experiments import (
    FIGURE_TAGS,
    find_transition,
    run_figure_table,
    run_path_scaling,
    run_susceptibility_sweep,
    write_records_csv,
)
from .fitting import fit, read_degree_sequence
from .graphalg import degree_histogram


def _default_seed() -> int:
    return int(os.environ.get("THRESHNET_SEED", "0"))


def _add_seed(p):
    p.add_argument("--seed", type=int, default=_default_seed(),
                   help="master seed (default: $THRESHNET_SEED or 0)")


def _add_threshold_group(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--t", type=float, help="edge threshold")
    group.add_argument("--mean-degree", type=float,
                       help="target mean degree (inverted to a threshold)")


def _parse_param(text):
    key, _, raw = text.partition("=")
    if not _:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(raw)
    except json.JSONDecodeError:
        return key, raw


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="threshnet",
        description="Thresholded correlated-Gaussian network ensembles",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("sample", help="sample one graph, write an edge list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    _add_threshold_group(p)
    _add_seed(p)
    p.add_argument("--method", choices=["dense", "skip"], default="dense")
    p.add_argument("--out", help="output path (default: stdout)")

    p = sub.add_parser("analytic", help="closed-form statistics as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    _add_threshold_group(p)
    p.add_argument("--max-terms", type=int, default=200)
    p.add_argument("--out")

    p = sub.add_parser("degree-dist", help="degree distribution as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    _add_threshold_group(p)
    p.add_argument("--method", choices=["quadrature", "laplace"], default="quadrature")
    p.add_argument("--order", type=int, default=40)
    p.add_argument("--out")

    p = sub.add_parser("fit", help="fit (t, rho) to an edge list, JSON out")
    p.add_argument("--edges", required=True)
    p.add_argument("--out")

    p = sub.add_parser("sweep-gc", help="giant-component susceptibility sweep")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--k-min", type=float, default=0.1)
    p.add_argument("--k-max", type=float, default=3.0)
    p.add_argument("--k-step", type=float, default=0.05)
    p.add_argument("--samples", type=int, default=1000)
    _add_seed(p)
    p.add_argument("--workers", type=int, default=os.cpu_count())
    p.add_argument("--method", choices=["dense", "skip"], default="dense")
    p.add_argument("--out", required=True,
                   help="sweep CSV path (transition JSON goes to stdout)")

    p = sub.add_parser("paths", help="shortest-path scaling runs")
    p.add_argument("--n-grid", required=True,
                   help="comma-separated node counts, e.g. 400,800,1600")
    p.add_argument("--rho-grid", required=True,
                   help="comma-separated rho values, e.g. 0,0.4")
    p.add_argument("--mean-degree", type=float, default=5.0)
    p.add_argument("--samples", type=int, default=200)
    _add_seed(p)
    p.add_argument("--workers", type=int, default=os.cpu_count())
    p.add_argument("--method", choices=["dense", "skip"], default="dense")
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = sub.add_parser("disparity", help="solve the filter level alpha; optional simulation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--mean-degree", type=float, required=True,
                   help="target mean degree of the filtered network")
    p.add_argument("--order", type=int, default=80)
    p.add_argument("--samples", type=int, default=0,
                   help="simulate this many filtered networks (degree histogram CSV)")
    _add_seed(p)
    p.add_argument("--out", help="histogram CSV path when --samples > 0")

    p = sub.add_parser("figure", help="regenerate the data behind a figure")
    p.add_argument("--id", required=True, dest="figure_id",
                   help=f"one of {', '.join(FIGURE_TAGS)}, fig5, fig6")
    p.add_argument("--out", required=True)
    p.add_argument("--param", action="append", type=_parse_param, default=[],
                   metavar="KEY=VALUE", help="figure parameter override (repeatable)")
    _add_seed(p)
    p.add_argument("--workers", type=int, default=os.cpu_count())

    return parser


def parse_args(argv=None) -> argparse.Namespace:
    """Parse and validate; resolves --mean-degree into a threshold."""
    ns = build_parser().parse_args(argv)
    if getattr(ns, "mean_degree", None) is not None and hasattr(ns, "t") \
            and ns.subcommand in ("sample", "analytic", "degree-dist"):
        ns.t = threshold_for_mean_degree(ns.n, ns.mean_degree)
    return ns


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _grid(text: str, cast):
    return [cast(x) for x in text.split(",") if x]


def _cmd_sample(ns) -> int:
    g = sample_graph(ModelParams(n=ns.n, t=ns.t, rho=ns.rho), ns.seed, ns.method)
    if ns.out:
        write_edge_list(g, ns.out)
    else:
        sys.stdout.write(f"# n={g.n}\n")
        for i, j in g.edges:
            sys.stdout.write(f"{i} {j}\n")
    return 0


def _cmd_analytic(ns) -> int:
    ctl = SeriesControl(max_terms=ns.max_terms)
    _emit(summarize(ns.n, ns.t, ns.rho, ctl).to_json() + "\n", ns.out)
    return 0


def _cmd_degree_dist(ns) -> int:
    if ns.method == "laplace":
        dd = degree_distribution_laplace(ns.n, ns.t, ns.rho)
    else:
        dd = degree_distribution(ns.n, ns.t, ns.rho, order=ns.order)
    lines = ["k,p_k"] + [f"{k},{float(p)!r}" for k, p in enumerate(dd.probs)]
    _emit("\n".join(lines) + "\n", ns.out)
    return 0


def _cmd_fit(ns) -> int:
    degrees, n = read_degree_sequence(ns.edges)
    _emit(fit(degrees, n).to_json() + "\n", ns.out)
    return 0


def _cmd_sweep_gc(ns) -> int:
    k_grid = []
    k = ns.k_min
    while k <= ns.k_max + 1e-12:
        k_grid.append(round(k, 10))
        k += ns.k_step
    records = run_susceptibility_sweep(
        ns.n, ns.rho, k_grid, ns.samples, ns.seed,
        workers=ns.workers, method=ns.method,
    )
    comments = {"n": ns.n, "rho": ns.rho, "k_min": ns.k_min, "k_max": ns.k_max,
                "k_step": ns.k_step, "samples": ns.samples, "method": ns.method}
    write_records_csv(records, ns.out, comments)
    transition = find_transition(records)
    sys.stdout.write(json.dumps(asdict(transition)) + "\n")
    return 0


def _cmd_paths(ns) -> int:
    records = run_path_scaling(
        _grid(ns.n_grid, int), _grid(ns.rho_grid, float), ns.mean_degree,
        ns.samples, ns.seed, workers=ns.workers, method=ns.method,
    )
    comments = {"n_grid": ns.n_grid, "rho_grid": ns.rho_grid,
                "mean_degree": ns.mean_degree, "samples": ns.samples,
                "method": ns.method}
    write_records_csv(records, ns.out or sys.stdout, comments)
    return 0


def _cmd_disparity(ns) -> int:
    alpha = solve_alpha(ns.n, ns.rho, ns.mean_degree, order=ns.order)
    density = disparity_edge_density(ns.n, alpha, ns.rho, order=ns.order)
    result = {"n": ns.n, "rho": ns.rho, "target_mean_degree": ns.mean_degree,
              "alpha": alpha, "meanfield_density": density,
              "meanfield_mean_degree": (ns.n - 1) * density}
    if ns.samples > 0:
        pooled = np.zeros(1, dtype=np.int64)
        realized = []
        for si in range(ns.samples):
            w = sample_weights(ModelParams(n=ns.n, t=0.0, rho=ns.rho),
                               derive_seed(ns.seed, 0, si))
            g = apply_filter(w, alpha)
            realized.append(2 * g.num_edges / ns.n)
            hist = degree_histogram(g)
            if hist.size > pooled.size:
                pooled = np.pad(pooled, (0, hist.size - pooled.size))
            pooled[:hist.size] += hist
        result["realized_mean_degree"] = float(np.mean(realized))
        result["samples"] = ns.samples
        if ns.out:
            with open(ns.out, "w") as fh:
                fh.write(f"# n={ns.n}\n# rho={ns.rho}\n# alpha={alpha!r}\n")
                fh.write(f"# samples={ns.samples}\n# master_seed={ns.seed}\n")
                fh.write("k,count\n")
                for k, c in enumerate(pooled):
                    fh.write(f"{k},{int(c)}\n")
    sys.stdout.write(json.dumps(result) + "\n")
    return 0


def _cmd_figure(ns) -> int:
    params = dict(ns.param)
    params.setdefault("master_seed", ns.seed)
    fig = ns.figure_id
    if fig == "fig5":
        n = int(params.get("n", 10_000))
        rho = float(params.get("rho", 0.0))
        k_min = float(params.get("k_min", 0.1))
        k_max = float(params.get("k_max", 3.0))
        k_step = float(params.get("k_step", 0.05))
        samples = int(params.get("samples", 1000))
        method = params.get("method", "dense")
        k_grid = []
        k = k_min
        while k <= k_max + 1e-12:
            k_grid.append(round(k, 10))
            k += k_step
        records = run_susceptibility_sweep(n, rho, k_grid, samples, ns.seed,
                                           workers=ns.workers, method=method)
        write_records_csv(records, ns.out, {"figure": "fig5", **params})
        return 0
    if fig == "fig6":
        n_grid = params.get("n_grid", [100, 300, 1000, 3000, 10_000, 30_000])
        rho_grid = params.get("rho_grid", [0.0, 0.1, 0.2, 0.3, 0.4])
        mean_degree = float(params.get("mean_degree", 5.0))
        samples = int(params.get("samples", 200))
        method = params.get("method", "dense")
        records = run_path_scaling(n_grid, rho_grid, mean_degree, samples,
                                   ns.seed, workers=ns.workers, method=method)
        write_records_csv(records, ns.out, {"figure": "fig6", **params})
        return 0
    run_figure_table(fig, params, ns.out)
    return 0


_COMMANDS = {
    "sample": _cmd_sample,
    "analytic": _cmd_analytic,
    "degree-dist": _cmd_degree_dist,
    "fit": _cmd_fit,
    "sweep-gc": _cmd_sweep_gc,
    "paths": _cmd_paths,
    "disparity": _cmd_disparity,
    "figure": _cmd_figure,
}


def main(argv=None) -> int:
    ns = parse_args(argv)
    try:
        return _COMMANDS[ns.subcommand](ns)
    except (ValueError, OSError) as exc:
        print(f"threshnet: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
