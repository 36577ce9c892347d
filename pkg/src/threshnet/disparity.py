"""Disparity-filter backbone extraction on exponentiated weights.

The filter of Serrano, Boguna, and Vespignani (PNAS 2009) assumes
positive weights spanning orders of magnitude, so it is applied to
e^{X_ij}.  Each directed pair gets the retention score

    alpha_ij = ( sum_{k != j} e^{X_ik} / sum_k e^{X_ik} )^{n-2}

(sums over k != i; the self-weight does not exist), and an undirected
edge is present when either alpha_ij or alpha_ji exceeds the level
alpha.  Under this convention a *larger* alpha keeps *fewer* edges: a
heavy weight makes the leave-one-out ratio small, so raising the bar
alpha toward 1 strips everything and lowering it toward 0 keeps the
complete graph.

A mean-field pass (replace the leave-one-out sum by its lognormal
expectation (n-2) e^{(1-rho)/2}) turns the retention rule into a
Gaussian condition and gives a closed-form edge density: with

    c = [ 2 log((n-2)(alpha^{-1/(n-2)} - 1)) + (1 - rho) ] / (2 sqrt(rho))

the density is

    E[A_ij] = integral (1 - Phi(x sqrt(1/rho - 2) - c)^2) phi(x) dx,

evaluated by Gauss-Hermite quadrature, and a scalar root-find in alpha
hits any target density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import Graph, WeightMatrix
from .specfun import SQRT_2PI, gauss_hermite_rule, norm_cdf, phi

# Phi argument clamp: beyond this the CDF saturates in float64 anyway
_PHI_ARG_LIMIT = 40.0
_ALPHA_FLOOR = 1e-12


@dataclass(frozen=True)
class DisparityParams:
    """Filter configuration: node count, weight correlation, level alpha.

    rho stays strictly below 1/2 (the latent decomposition needs
    sqrt(1 - 2 rho) > 0) and alpha in (0, 1).
    """

    n: int
    rho: float
    alpha: float

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("n must be >= 3")
        if not 0.0 <= self.rho < 0.5:
            raise ValueError(f"rho must lie in [0, 0.5), got {self.rho}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")


def alpha_scores(w: WeightMatrix) -> np.ndarray:
    """The (n, n) asymmetric retention-score matrix.

    Row maxima are subtracted before exponentiation (the score is a
    ratio of exponential sums, so it is invariant under a common weight
    shift and the guard cannot change the result).  Diagonal entries do
    not exist and are set to 0.
    """
    n = w.n
    if n < 3:
        raise ValueError("alpha scores need n >= 3")
    x = w.to_dense()
    np.fill_diagonal(x, -np.inf)
    x -= x.max(axis=1, keepdims=True)
    e = np.exp(x)
    s = e.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore"):
        scores = np.exp((n - 2) * np.log1p(-e / s))
    np.fill_diagonal(scores, 0.0)
    return scores


def apply_filter(w: WeightMatrix, alpha: float) -> Graph:
    """Backbone graph: edge (i, j) iff max(alpha_ij, alpha_ji) > alpha.

    Strictly "exceeds": ties keep no edge (they have probability zero
    for continuous weights).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    scores = alpha_scores(w)
    keep = np.maximum(scores, scores.T) > alpha
    i, j = np.nonzero(np.triu(keep, 1))
    return Graph.from_edges(w.n, np.stack([i, j], axis=1))


def meanfield_c(n: int, alpha: float, rho: float) -> float:
    """The mean-field threshold constant c.

    expm1 keeps alpha^{-1/(n-2)} - 1 accurate when alpha is close to 1;
    rho = 0 is rejected (the constant divides by sqrt(rho)).
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0.0 < rho < 0.5:
        raise ValueError(f"mean-field constant requires 0 < rho < 0.5, got {rho}")
    leave_one_out = (n - 2) * math.expm1(-math.log(alpha) / (n - 2))
    return (2.0 * math.log(leave_one_out) + (1.0 - rho)) / (2.0 * math.sqrt(rho))


def _density_from_c(c: float, rho: float, rule) -> float:
    slope = math.sqrt(1.0 / rho - 2.0)
    u = np.clip(rule.nodes * slope - c, -_PHI_ARG_LIMIT, _PHI_ARG_LIMIT)
    integrand = 1.0 - norm_cdf(u) ** 2
    return float(rule.integrate(integrand) / SQRT_2PI)


def disparity_edge_density(n: int, alpha: float, rho: float, order: int = 80) -> float:
    """Mean-field probability that the filtered graph keeps an edge.

    Gauss-Hermite evaluation of the density integral (the standard
    normal weight phi(x) dx is absorbed into the rule's e^{-x^2/2}
    weight, leaving a 1/sqrt(2 pi) factor).  Value lies in (0, 1) and
    decreases as alpha rises.
    """
    c = meanfield_c(n, alpha, rho)
    rule = gauss_hermite_rule(order)
    return _density_from_c(c, rho, rule)


def solve_alpha(n: int, rho: float, target_mean_degree: float, order: int = 80) -> float:
    """Significance level alpha whose mean-field mean degree hits the target.

    Bisection on log(alpha) over [log 1e-12, log(1 - 1e-12)] brackets
    the root (density is monotone in alpha), then Newton steps with the
    analytic d(density)/d(log alpha) polish it to 1e-8 relative.
    """
    if not 0.0 < target_mean_degree < n - 1:
        raise ValueError(f"target mean degree must lie in (0, {n - 1})")
    if not 0.0 < rho < 0.5:
        raise ValueError(f"solve_alpha requires 0 < rho < 0.5, got {rho}")
    rule = gauss_hermite_rule(order)
    target = target_mean_degree / (n - 1)
    slope = math.sqrt(1.0 / rho - 2.0)

    def residual(log_alpha: float) -> float:
        return _density_from_c(meanfield_c(n, math.exp(log_alpha), rho), rho, rule) - target

    lo, hi = math.log(_ALPHA_FLOOR), math.log1p(-_ALPHA_FLOOR)
    r_lo, r_hi = residual(lo), residual(hi)
    if not (r_lo >= 0.0 >= r_hi):
        raise ValueError(
            f"target density {target} not bracketed by alpha in "
            f"[{_ALPHA_FLOOR}, 1 - {_ALPHA_FLOOR}]"
        )
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if residual(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    log_alpha = 0.5 * (lo + hi)
    # Newton polish: d density / d c via the integrand derivative, times
    # dc/d log(alpha)
    for _ in range(8):
        alpha = math.exp(log_alpha)
        c = meanfield_c(n, alpha, rho)
        u = np.clip(rule.nodes * slope - c, -_PHI_ARG_LIMIT, _PHI_ARG_LIMIT)
        density = float(rule.integrate(1.0 - norm_cdf(u) ** 2) / SQRT_2PI)
        d_density_dc = float(rule.integrate(2.0 * norm_cdf(u) * phi(u)) / SQRT_2PI)
        ratio = math.expm1(-math.log(alpha) / (n - 2))
        dc_dlog = -math.exp(-math.log(alpha) / (n - 2)) / ((n - 2) * ratio * math.sqrt(rho))
        resid = density - target
        if abs(resid) <= 1e-12 * target:
            break
        slope_total = d_density_dc * dc_dlog
        if slope_total == 0.0:
            break
        step = resid / slope_total
        new = log_alpha - step
        if not lo - 1.0 <= new <= hi + 1.0:
            break
        log_alpha = new
    return math.exp(log_alpha)
