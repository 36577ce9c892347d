"""Closed-form and semi-analytic ensemble statistics.

Edge density and mean degree are elementary Gaussian tail formulas.  The
two-star and triangle orthant probabilities are Hermite-series expansions
of the bivariate/trivariate equicorrelated Gaussian orthants:

    P[pair]     = sum_N rho^N / N! * [phi(t) H_{N-1}(t)]^2
    P[triangle] = sum_N sum_{i+j<=N} rho^N phi(t)^3 / (i! j! (N-i-j)!)
                  * H_{N-1-i}(t) H_{N-1-j}(t) H_{i+j-1}(t)

both convergent for rho <= 1/2.  The full degree distribution is the
binomial-weighted Gaussian mixture integral

    p_k = C(n-1, k) * I_{n,k},
    I_{n,k} = integral [1 - Phi(u(z))]^k Phi(u(z))^{n-1-k} phi(z) dz,
    u(z) = (t - sqrt(rho) z) / sqrt(1 - rho)

evaluated, after a change of variables, by Gauss-Hermite quadrature
centered at the maximum of the transformed log-integrand f_k, plus a
closed-form Laplace (first-order) asymptotic.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import gammaln, log_ndtr

from .specfun import (
    SQRT_2PI,
    gauss_hermite_rule,
    hermite_log_row,
    norm_cdf,
    norm_cdf_inv,
    phi,
)

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
# below this, the 1/sqrt(rho) prefactor of the quadrature route is
# numerically meaningless and the ensemble is G_{n,p}: use the exact
# binomial distribution instead
_RHO_BINOMIAL_CUTOFF = 1e-10
# consecutive sub-tolerance terms required before a series is declared
# converged (single-term stops can misfire at zeros of H_{N-1}(t))
_CONSECUTIVE_SMALL = 3


class SeriesConvergenceWarning(UserWarning):
    """A truncated series hit max_terms before reaching abs_tol."""


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the Hermite orthant series."""

    max_terms: int = 200
    abs_tol: float = 1e-12

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")


_DEFAULT_CTL = SeriesControl()


@dataclass(frozen=True)
class DegreeDistribution:
    """Degree probabilities p_0..p_{n-1} with accuracy metadata.

    method is "quadrature" (with the Gauss-Hermite order used),
    "binomial" (exact dispatch for rho ~ 0) or "laplace" (closed-form
    asymptotic, no normalization guarantee).  residual records
    |1 - sum(probs)| as computed.
    """

    n: int
    probs: np.ndarray
    method: str
    order: int | None
    residual: float

    def mean(self) -> float:
        return float(np.dot(np.arange(self.n), self.probs))

    def variance(self) -> float:
        k = np.arange(self.n)
        m = self.mean()
        return float(np.dot(k * k, self.probs) - m * m)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("k,p_k\n")
            for k, p in enumerate(self.probs):
                fh.write(f"{k},{float(p)!r}\n")


@dataclass(frozen=True)
class AnalyticSummary:
    """Bundle of the closed-form statistics for one (n, t, rho)."""

    n: int
    t: float
    rho: float
    edge_density: float
    mean_degree: float
    two_star_prob: float
    triangle_prob: float
    clustering: float
    triangles_per_node: float
    degree_variance: float

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "AnalyticSummary":
        return cls(**json.loads(text))


def edge_density(t: float) -> float:
    """Probability that a single pair weight clears the threshold: 1 - Phi(t)."""
    return 1.0 - norm_cdf(t)


def mean_degree(n: int, t: float) -> float:
    """Expected degree (n-1)(1 - Phi(t)); independent of rho."""
    if n < 2:
        raise ValueError("n must be >= 2")
    return (n - 1) * edge_density(t)


def threshold_for_mean_degree(n: int, k: float) -> float:
    """Threshold giving expected degree k: Phi^{-1}(1 - k/(n-1)).

    Rejects k <= 0 (empty graph) and k >= n-1 (complete graph).
    """
    if not 0.0 < k < n - 1:
        raise ValueError(f"mean degree must lie strictly in (0, {n - 1}), got {k}")
    return norm_cdf_inv(1.0 - k / (n - 1))


def _check_rho(rho: float) -> None:
    if not 0.0 <= rho <= 0.5:
        raise ValueError(f"rho must lie in [0, 0.5], got {rho}")


def _pair_series(t: float, rho: float, ctl: SeriesControl):
    """sum_{N>=1} rho^N [phi(t) H_{N-1}(t)]^2 / N!, its d/drho, and status.

    Runs the recurrence on u_k = H_k(t)/sqrt(k!), which stays bounded,
    so terms rho^N phi^2 u_{N-1}^2 / N never overflow.  Terms are
    nonnegative: partial sums increase toward the limit.
    """
    phi2 = phi(t) ** 2
    total = 0.0
    dtotal = 0.0
    u_prev = 1.0  # u_0
    u = None
    small = 0
    converged = False
    for N in range(1, ctl.max_terms + 1):
        if N == 1:
            u_sq = 1.0  # u_0^2
        else:
            u_sq = u * u
        term = rho**N * phi2 * u_sq / N
        dtotal += rho ** (N - 1) * phi2 * u_sq
        total += term
        if term < ctl.abs_tol:
            small += 1
            if small >= _CONSECUTIVE_SMALL:
                converged = True
                break
        else:
            small = 0
        # advance u_{N} = (t u_{N-1} - sqrt(N-1) u_{N-2}) / sqrt(N)
        if N == 1:
            u_prev, u = 1.0, t
        else:
            u_prev, u = u, (t * u - math.sqrt(N - 1) * u_prev) / math.sqrt(N)
    return total, dtotal, converged


def two_star_prob(t: float, rho: float, ctl: SeriesControl = _DEFAULT_CTL) -> float:
    """P[two weights sharing a node both >= t] via the Hermite series.

    Terms are nonnegative, so the truncated value is a lower bound that
    converges from below.  Emits SeriesConvergenceWarning if max_terms
    is reached before abs_tol.
    """
    _check_rho(rho)
    tail = edge_density(t)
    if rho == 0.0:
        return tail * tail
    series, _, converged = _pair_series(t, rho, ctl)
    if not converged:
        warnings.warn(
            f"two-star series hit max_terms={ctl.max_terms} before abs_tol",
            SeriesConvergenceWarning,
            stacklevel=2,
        )
    return tail * tail + series


def triangle_prob(t: float, rho: float, ctl: SeriesControl = _DEFAULT_CTL) -> float:
    """P[all three weights of a triangle >= t] via the triple Hermite sum.

    Inner blocks are assembled in the log domain (Hermite magnitudes
    overflow float64 past index ~270); the outer sum stops after three
    consecutive blocks below abs_tol, guarding against non-monotone
    blocks.  The N = 0 block is [phi(t) H_{-1}(t)]^3 = (1 - Phi(t))^3,
    the independent-pairs limit.
    """
    _check_rho(rho)
    tail = edge_density(t)
    if rho == 0.0:
        return tail**3
    max_n = ctl.max_terms
    log_h, sign_h = hermite_log_row(max_n, t)
    lgam = gammaln(np.arange(max_n + 2))
    log_rho = math.log(rho)
    log_phi3 = 3.0 * (-0.5 * t * t - _LOG_SQRT_2PI)
    total = 0.0
    small = 0
    converged = False
    for N in range(0, max_n):
        i = np.arange(N + 1)
        ii, jj = np.meshgrid(i, i, indexing="ij")
        mask = ii + jj <= N
        ii, jj = ii[mask], jj[mask]
        kk = N - ii - jj
        # H indices: a = N-1-i, b = N-1-j, c = i+j-1, stored at index+1
        log_terms = (
            N * log_rho
            + log_phi3
            - lgam[ii + 1]
            - lgam[jj + 1]
            - lgam[kk + 1]
            + log_h[N - ii]
            + log_h[N - jj]
            + log_h[ii + jj]
        )
        signs = sign_h[N - ii] * sign_h[N - jj] * sign_h[ii + jj]
        block = float(np.sum(signs * np.exp(log_terms)))
        total += block
        if abs(block) < ctl.abs_tol:
            small += 1
            if small >= _CONSECUTIVE_SMALL:
                converged = True
                break
        else:
            small = 0
    if not converged:
        warnings.warn(
            f"triangle series hit max_terms={ctl.max_terms} before abs_tol",
            SeriesConvergenceWarning,
            stacklevel=2,
        )
    return total


def clustering(t: float, rho: float, ctl: SeriesControl = _DEFAULT_CTL) -> float:
    """P[third edge | the other two exist] = triangle / two-star.

    Degenerate thresholds (two-star probability underflowed to zero)
    yield nan with a warning rather than raising, so parameter sweeps
    can keep going.
    """
    den = two_star_prob(t, rho, ctl)
    num = triangle_prob(t, rho, ctl)
    if den == 0.0:
        warnings.warn(
            "clustering unreliable: two-star probability underflowed",
            stacklevel=2,
        )
        return float("nan")
    return num / den


def triangles_per_node(n: int, t: float, rho: float, ctl: SeriesControl = _DEFAULT_CTL) -> float:
    """Expected triangles per node: C(n-1, 2) * triangle probability."""
    if n < 3:
        raise ValueError("n must be >= 3")
    return math.comb(n - 1, 2) * triangle_prob(t, rho, ctl)


def degree_variance(n: int, t: float, rho: float, ctl: SeriesControl = _DEFAULT_CTL) -> float:
    """Variance of the degree distribution.

    Binomial part (n-1) Phi(t)(1-Phi(t)) plus the excess
    (n-1)(n-2) sum_{N>=1} rho^N [phi(t) H_{N-1}(t)]^2 / N!, which is
    nonnegative and monotone nondecreasing in rho.
    """
    var, _ = degree_variance_with_derivative(n, t, rho, ctl)
    return var


def degree_variance_with_derivative(
    n: int, t: float, rho: float, ctl: SeriesControl = _DEFAULT_CTL
) -> tuple[float, float]:
    """(Var[k], d Var[k] / d rho) with the series differentiated term-wise."""
    if n < 2:
        raise ValueError("n must be >= 2")
    _check_rho(rho)
    cdf = norm_cdf(t)
    binom_part = (n - 1) * cdf * (1.0 - cdf)
    if rho == 0.0 and ctl.max_terms == 0:  # pragma: no cover - defensive
        return binom_part, 0.0
    series, dseries, converged = _pair_series(t, rho, ctl)
    if not converged:
        warnings.warn(
            f"degree-variance series hit max_terms={ctl.max_terms} before abs_tol",
            SeriesConvergenceWarning,
            stacklevel=2,
        )
    scale = (n - 1) * (n - 2)
    return binom_part + scale * series, scale * dseries


# ---------------------------------------------------------------------------
# Degree distribution

def _f_and_derivs(y, k, n, t, rho):
    """Log-integrand f_k(y) of the transformed degree integral, f', f''.

    f_k(y) = k ln(1 - Phi(y)) + (n-1-k) ln Phi(y)
             - (t - sqrt(1-rho) y)^2 / (2 rho)

    log_ndtr keeps the binomial part finite far into both tails; the
    hazard identities phi' = -y phi give closed-form derivatives.
    f is strictly concave, so the maximum is unique.
    """
    sr = math.sqrt(1.0 - rho)
    log_p = log_ndtr(y)
    log_q = log_ndtr(-y)
    f = k * log_q + (n - 1 - k) * log_p - 0.5 * (t - sr * y) ** 2 / rho
    log_phi = -0.5 * y * y - _LOG_SQRT_2PI
    g = np.exp(log_phi - log_p)      # phi/Phi
    h = np.exp(log_phi - log_q)      # phi/(1-Phi)
    f1 = -k * h + (n - 1 - k) * g + sr * (t - sr * y) / rho
    f2 = -k * h * (h - y) - (n - 1 - k) * g * (g + y) - (1.0 - rho) / rho
    return f, f1, f2


def _find_maxima(k, n, t, rho):
    """Vectorized safeguarded Newton for the maximum of each f_k.

    Starts from the large-n location Phi^{-1}(1 - k/(n-1)) (clipped away
    from the endpoints), keeps a sign-change bracket, and bisects
    whenever a Newton step leaves it.  Returns (y0, ok_mask).
    """
    lo = np.full(k.shape, -40.0)
    hi = np.full(k.shape, 40.0)
    _, f1_lo, _ = _f_and_derivs(lo, k, n, t, rho)
    _, f1_hi, _ = _f_and_derivs(hi, k, n, t, rho)
    ok = (f1_lo > 0) & (f1_hi < 0)
    if not np.all(ok):
        lo = np.where(ok, lo, -80.0)
        hi = np.where(ok, hi, 80.0)
        _, f1_lo, _ = _f_and_derivs(lo, k, n, t, rho)
        _, f1_hi, _ = _f_and_derivs(hi, k, n, t, rho)
        ok = (f1_lo > 0) & (f1_hi < 0)
    kk = np.clip(k, 0.5, n - 1.5)
    y = norm_cdf_inv(1.0 - kk / (n - 1))
    y = np.clip(y, lo + 1e-9, hi - 1e-9)
    for _ in range(80):
        _, f1, f2 = _f_and_derivs(y, k, n, t, rho)
        pos = f1 > 0
        lo = np.where(pos, y, lo)
        hi = np.where(pos, hi, y)
        with np.errstate(invalid="ignore"):
            y_new = y - f1 / f2
        outside = ~((y_new > lo) & (y_new < hi))
        y_new = np.where(outside, 0.5 * (lo + hi), y_new)
        delta = np.abs(y_new - y)
        y = y_new
        if delta.max() < 1e-13 * (1.0 + np.abs(y).max()):
            break
    return y, ok


def _binomial_distribution(n: int, t: float) -> np.ndarray:
    k = np.arange(n, dtype=float)
    p = edge_density(t)
    log_c = gammaln(n) - gammaln(k + 1) - gammaln(n - k)
    return np.exp(log_c + k * math.log(p) + (n - 1 - k) * math.log1p(-p))


def degree_distribution(n: int, t: float, rho: float, order: int = 40) -> DegreeDistribution:
    """Degree probabilities p_0..p_{n-1} by Gauss-Hermite quadrature.

    Each p_k is C(n-1, k) * I_{n,k}(order), with the quadrature centered
    at the numerically located maximum y_0 of f_k and the remainder
    R_k(y) = f_k(y) - f_k(y_0) + |f_k''(y_0)| (y - y_0)^2 / 2 summed at
    the rule's nodes; assembly happens in the log domain.  The quadratic
    term of f_k is kept exactly, which matters at small n.

    rho below 1e-10 dispatches to the exact Binomial(n-1, 1-Phi(t))
    distribution.  Sums to 1 within 1e-6 at order >= 30 for n <= 1e5.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if order < 1:
        raise ValueError("order must be >= 1")
    _check_rho(rho)
    if rho < _RHO_BINOMIAL_CUTOFF:
        probs = _binomial_distribution(n, t)
        return DegreeDistribution(n, probs, "binomial", None, float(abs(1.0 - probs.sum())))
    k = np.arange(n, dtype=float)
    y0, ok = _find_maxima(k, n, t, rho)
    if not np.all(ok):
        bad = np.nonzero(~ok)[0]
        warnings.warn(
            f"failed to bracket the integrand maximum for {bad.size} degree(s), "
            f"first: k={bad[:5].tolist()}",
            stacklevel=2,
        )
    f0, _, f2 = _f_and_derivs(y0, k, n, t, rho)
    a = np.abs(f2)
    rule = gauss_hermite_rule(order)
    ys = rule.nodes[None, :] / np.sqrt(a)[:, None] + y0[:, None]
    sr = math.sqrt(1.0 - rho)
    fy = (
        k[:, None] * log_ndtr(-ys)
        + (n - 1 - k[:, None]) * log_ndtr(ys)
        - 0.5 * (t - sr * ys) ** 2 / rho
    )
    resid = fy - f0[:, None] + 0.5 * a[:, None] * (ys - y0[:, None]) ** 2
    peak = resid.max(axis=1)
    quad_sum = np.sum(rule.weights[None, :] * np.exp(resid - peak[:, None]), axis=1)
    log_i = (
        0.5 * (math.log(1.0 - rho) - math.log(2.0 * math.pi * rho) - np.log(a))
        + f0
        + peak
        + np.log(quad_sum)
    )
    log_c = gammaln(n) - gammaln(k + 1) - gammaln(n - k)
    probs = np.exp(log_c + log_i)
    probs[~ok] = np.nan
    residual = float(abs(1.0 - np.nansum(probs)))
    return DegreeDistribution(n, probs, "quadrature", order, residual)


def degree_distribution_laplace(n: int, t: float, rho: float) -> DegreeDistribution:
    """Closed-form asymptotic degree probabilities (large n and k).

    p_k ~ 1/(n-1) sqrt((1-rho)/rho)
          * exp[-(1-2 rho)/(2 rho) y0^2 + t sqrt(1-rho)/rho y0 - t^2/(2 rho)]

    with y_{0,k} = Phi^{-1}(1 - k/(n-1)) from the refined inverse CDF.
    Defined for 0 < k < n-1; the endpoints are set to 0.  There is no
    normalization guarantee.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not 0.0 < rho <= 0.5:
        raise ValueError(f"laplace form requires 0 < rho <= 0.5, got {rho}")
    probs = np.zeros(n)
    if n > 2:
        k = np.arange(1, n - 1, dtype=float)
        y0 = norm_cdf_inv(1.0 - k / (n - 1))
        exponent = (
            -((1.0 - 2.0 * rho) / (2.0 * rho)) * y0**2
            + (t * math.sqrt(1.0 - rho) / rho) * y0
            - t * t / (2.0 * rho)
        )
        probs[1:n - 1] = math.sqrt((1.0 - rho) / rho) / (n - 1) * np.exp(exponent)
    return DegreeDistribution(n, probs, "laplace", None, float(abs(1.0 - probs.sum())))


def summarize(n: int, t: float, rho: float, ctl: SeriesControl = _DEFAULT_CTL) -> AnalyticSummary:
    """All closed-form statistics for one parameter triple."""
    two_star = two_star_prob(t, rho, ctl)
    triangle = triangle_prob(t, rho, ctl)
    return AnalyticSummary(
        n=int(n),
        t=float(t),
        rho=float(rho),
        edge_density=edge_density(t),
        mean_degree=mean_degree(n, t),
        two_star_prob=two_star,
        triangle_prob=triangle,
        clustering=(triangle / two_star) if two_star > 0 else float("nan"),
        triangles_per_node=triangles_per_node(n, t, rho, ctl),
        degree_variance=degree_variance(n, t, rho, ctl),
    )
