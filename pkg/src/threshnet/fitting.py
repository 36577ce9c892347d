"""Fit (t, rho) to an observed degree sequence by moment matching.

The threshold t comes directly from the observed mean degree (the model
mean is rho-free), then rho solves the degree-variance equation by
Newton's method with the analytic series derivative, clamped to
[0, 1/2].  Observed variance uses the population convention (divide by
n), matching the model's ensemble variance; real degree sequences can be
under- or over-dispersed relative to the model, which is reported with
flags rather than errors so comparisons can still be rendered.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .analytic import (
    SeriesControl,
    degree_variance_with_derivative,
    mean_degree,
    threshold_for_mean_degree,
)
from .ensemble import read_edge_list

_DEFAULT_CTL = SeriesControl()
_REL_TOL = 1e-10
_MAX_ITER = 100

SUB_BINOMIAL = "sub_binomial_variance"
EXCESS_VARIANCE = "excess_variance"


@dataclass(frozen=True)
class FitResult:
    """Moment fit of the ensemble to one observed degree sequence."""

    t: float
    rho: float
    iterations: int
    converged: bool
    target_mean: float
    target_variance: float
    model_variance_at_fit: float
    flag: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _variance_at(n, t, rho, ctl):
    var, dvar = degree_variance_with_derivative(n, t, rho, ctl)
    return var, dvar


def _solve_rho_newton(n, t, target, ctl=_DEFAULT_CTL):
    """Newton on the variance residual with bracket safeguarding.

    The variance is strictly increasing in rho, so [0, 1/2] brackets at
    most one root; steps leaving the bracket fall back to its midpoint.
    Returns (rho, iterations, converged).
    """
    lo, hi = 0.0, 0.5
    rho = 0.25
    tol = _REL_TOL * target
    for it in range(1, _MAX_ITER + 1):
        var, dvar = _variance_at(n, t, rho, ctl)
        resid = var - target
        if abs(resid) <= tol:
            return rho, it, True
        if resid > 0:
            hi = rho
        else:
            lo = rho
        step = resid / dvar if dvar > 0 else None
        rho_new = rho - step if step is not None else 0.5 * (lo + hi)
        if not lo < rho_new < hi:
            rho_new = 0.5 * (lo + hi)
        if rho_new == rho:
            return rho, it, abs(resid) <= tol
        rho = rho_new
    return rho, _MAX_ITER, False


def _solve_rho_bisect(n, t, target, ctl=_DEFAULT_CTL, tol_rho=1e-12):
    """Plain bisection on [0, 1/2]; reference route for the Newton solve."""
    lo, hi = 0.0, 0.5
    it = 0
    while hi - lo > tol_rho and it < 200:
        mid = 0.5 * (lo + hi)
        var, _ = _variance_at(n, t, mid, ctl)
        if var < target:
            lo = mid
        else:
            hi = mid
        it += 1
    return 0.5 * (lo + hi), it


def fit_moments(
    n: int,
    target_mean: float,
    target_variance: float,
    ctl: SeriesControl = _DEFAULT_CTL,
) -> FitResult:
    """Fit to explicit moment targets (see `fit` for the sequence entry)."""
    if n < 3:
        raise ValueError("n must be >= 3")
    if not 0.0 < target_mean < n - 1:
        raise ValueError(f"mean degree must lie strictly in (0, {n - 1})")
    t = threshold_for_mean_degree(n, target_mean)
    floor, _ = _variance_at(n, t, 0.0, ctl)
    ceil, _ = _variance_at(n, t, 0.5, ctl)
    if target_variance < floor:
        return FitResult(
            t=t, rho=0.0, iterations=0, converged=False,
            target_mean=target_mean, target_variance=target_variance,
            model_variance_at_fit=floor, flag=SUB_BINOMIAL,
        )
    if target_variance > ceil:
        return FitResult(
            t=t, rho=0.5, iterations=0, converged=False,
            target_mean=target_mean, target_variance=target_variance,
            model_variance_at_fit=ceil, flag=EXCESS_VARIANCE,
        )
    rho, iters, converged = _solve_rho_newton(n, t, target_variance, ctl)
    var_fit, _ = _variance_at(n, t, rho, ctl)
    return FitResult(
        t=t, rho=rho, iterations=iters, converged=converged,
        target_mean=target_mean, target_variance=target_variance,
        model_variance_at_fit=var_fit, flag=None,
    )


def fit(degrees, n: int, ctl: SeriesControl = _DEFAULT_CTL) -> FitResult:
    """Fit (t, rho) to an observed degree sequence of all n nodes.

    t matches the mean exactly by construction; rho solves the variance
    equation.  Observed variance below the rho = 0 binomial floor or
    above the rho = 1/2 value returns the clamped endpoint with
    converged=False and a flag instead of raising.
    """
    deg = np.asarray(degrees)
    if deg.ndim != 1 or deg.shape[0] != n:
        raise ValueError(f"expected {n} degrees, got shape {deg.shape}")
    target_mean = float(deg.mean())
    target_variance = float(deg.var())  # population convention
    return fit_moments(n, target_mean, target_variance, ctl)


def read_degree_sequence(path) -> tuple[np.ndarray, int]:
    """Degrees of nodes 0..n-1 from an edge-list file.

    Uses the shared edge-list format; indices below the declared or
    inferred node count that never appear get degree 0.  Duplicate
    edges are dropped (with a warning); malformed lines raise with
    their line number.
    """
    graph, _ = read_edge_list(path)
    return graph.degrees.copy(), graph.n
