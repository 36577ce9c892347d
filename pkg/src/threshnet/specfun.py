"""Scalar special functions for the thresholded-Gaussian ensemble.

Standard-normal density / CDF / inverse CDF, probabilists' Hermite
polynomials extended with the Mills-ratio term of index -1, and
Gauss-Hermite quadrature rules for the weight function e^{-x^2/2}.

Conventions:

    phi(x)  = e^{-x^2/2} / sqrt(2*pi)
    H_0 = 1,  H_1 = x,  H_{k+1}(x) = x*H_k(x) - k*H_{k-1}(x)
    H_{-1}(x) = (1 - Phi(x)) / phi(x)      (Mills ratio)

All functions are pure; QuadratureRule instances are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import erfc

SQRT_2PI = math.sqrt(2.0 * math.pi)
_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Closed-form inverse-CDF approximation, |error| <= 3e-3 on (0, 1):
# Phi^{-1}(x) ~ (a0 + a1*s)/(1 + b1*s + b2*s^2) - s with s = sqrt(-2 ln x)
# for x <= 0.5, reflected for x > 0.5.
_INV_A0 = 2.30753
_INV_A1 = 0.27061
_INV_B1 = 0.99229
_INV_B2 = 0.04481


def phi(x):
    """Standard normal density. Accepts scalars or arrays."""
    return np.exp(-0.5 * np.square(x)) / SQRT_2PI


def norm_cdf(x):
    """Standard normal CDF via the complementary error function.

    erfc keeps full relative accuracy in the tails, so the absolute
    error stays below 1e-12 everywhere (sparse networks need Phi(t)
    for t around 3-5).  Accepts scalars or arrays.
    """
    out = 0.5 * erfc(-np.asarray(x, dtype=float) / _SQRT2)
    return float(out) if out.ndim == 0 else out


def norm_cdf_inv_approx(x):
    """Closed-form rational approximation of Phi^{-1}.

    Absolute error is below 3e-3 over (0, 1).  For x <= 0.5 uses
    s = sqrt(-2 ln x) in a degree-(1,2) rational form; for x > 0.5
    uses the reflection Phi^{-1}(x) = -Phi^{-1}(1-x).

    Raises ValueError outside the open interval (0, 1).
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0) or np.any(x >= 1.0):
        raise ValueError("norm_cdf_inv_approx requires 0 < x < 1")
    lower = np.minimum(x, 1.0 - x)
    s = np.sqrt(-2.0 * np.log(lower))
    val = (_INV_A0 + _INV_A1 * s) / (1.0 + _INV_B1 * s + _INV_B2 * s * s) - s
    out = np.where(x <= 0.5, val, -val)
    return float(out) if out.ndim == 0 else out


def norm_cdf_inv(x):
    """Refined inverse of the standard normal CDF.

    Starts from `norm_cdf_inv_approx` and polishes with Newton steps
    on Phi, giving |Phi(result) - x| <= 1e-12.  Accepts scalars or
    arrays; raises ValueError outside (0, 1).
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0.0) or np.any(xa >= 1.0):
        raise ValueError("norm_cdf_inv requires 0 < x < 1")
    y = np.asarray(norm_cdf_inv_approx(xa), dtype=float)
    # Quadratic convergence from a 3e-3 start: four steps reach the
    # 1e-12 contract with margin, even deep in the tails.
    for _ in range(4):
        f = 0.5 * erfc(-y / _SQRT2) - xa
        y = y - f / phi(y)
    return float(y) if y.ndim == 0 else y


def _mills_ratio(x: float) -> float:
    """(1 - Phi(x)) / phi(x), stable for large x.

    Direct evaluation loses accuracy once 1 - Phi(x) underflows
    relative to phi(x); beyond x = 6 use the continued fraction
    m(x) = 1/(x + 1/(x + 2/(x + 3/(...)))).
    """
    if x <= 6.0:
        return 0.5 * math.erfc(x / _SQRT2) / phi(x)
    acc = 0.0
    for k in range(60, 0, -1):
        acc = k / (x + acc)
    return 1.0 / (x + acc)


def hermite(N: int, x: float) -> float:
    """Probabilists' Hermite polynomial H_N(x), with the index -1 extension.

    H_{-1}(x) = (1 - Phi(x)) / phi(x); otherwise the three-term
    recurrence seeded with H_0 = 1, H_1 = x.  Raises ValueError for
    N < -1.
    """
    if N < -1:
        raise ValueError(f"hermite index must be >= -1, got {N}")
    if N == -1:
        return _mills_ratio(float(x))
    h_prev, h = 1.0, float(x)
    if N == 0:
        return 1.0
    for k in range(1, N):
        h_prev, h = h, x * h - k * h_prev
    return h


def hermite_row(N_max: int, x: float) -> np.ndarray:
    """Evaluate [H_{-1}(x), H_0(x), ..., H_{N_max}(x)] in one pass.

    Returns an array of length N_max + 2; entry k+1 equals hermite(k, x).
    """
    if N_max < 0:
        raise ValueError(f"N_max must be >= 0, got {N_max}")
    out = np.empty(N_max + 2)
    out[0] = _mills_ratio(float(x))
    out[1] = 1.0
    if N_max >= 1:
        out[2] = x
    for k in range(1, N_max):
        out[k + 2] = x * out[k + 1] - k * out[k]
    return out


def hermite_log_row(N_max: int, x: float) -> tuple[np.ndarray, np.ndarray]:
    """Log-magnitudes and signs of H_{-1}..H_{N_max} at x.

    Runs the recurrence with periodic rescaling so indices beyond the
    float64 overflow point (~270 for |x| ~ 5) remain usable.  Returns
    (log_abs, sign) arrays of length N_max + 2; sign is +-1.0, with
    sign 1.0 and log_abs -inf for exact zeros.
    """
    if N_max < 0:
        raise ValueError(f"N_max must be >= 0, got {N_max}")
    log_abs = np.empty(N_max + 2)
    sign = np.ones(N_max + 2)
    log_abs[0] = math.log(_mills_ratio(float(x)))
    log_abs[1] = 0.0
    if N_max >= 1:
        if x == 0.0:
            log_abs[2] = -np.inf
        else:
            log_abs[2] = math.log(abs(x))
            sign[2] = math.copysign(1.0, x)
    h_prev, h, scale = 1.0, float(x), 0.0
    for k in range(1, N_max):
        h_next = x * h - k * h_prev
        if abs(h_next) > 1e250:
            h_next *= 1e-250
            h *= 1e-250
            scale += 250.0 * math.log(10.0)
        if h_next == 0.0:
            log_abs[k + 2] = -np.inf
        else:
            log_abs[k + 2] = math.log(abs(h_next)) + scale
            sign[k + 2] = math.copysign(1.0, h_next)
        h_prev, h = h, h_next
    return log_abs, sign


def _hermite_log_pair(N: int, x: float) -> tuple[float, float, float, float]:
    """(log|H_{N-1}|, sign, log|H_N|, sign) by rescaled recurrence."""
    h_prev, h, scale = 1.0, float(x), 0.0
    if N == 0:
        return -np.inf, 1.0, 0.0, 1.0
    for k in range(1, N):
        h_next = x * h - k * h_prev
        if abs(h_next) > 1e250:
            h_next *= 1e-250
            h *= 1e-250
            scale += 250.0 * math.log(10.0)
        h_prev, h = h, h_next
    la = math.log(abs(h_prev)) + scale if h_prev != 0.0 else -np.inf
    lb = math.log(abs(h)) + scale if h != 0.0 else -np.inf
    return la, math.copysign(1.0, h_prev), lb, math.copysign(1.0, h)


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for the weight e^{-x^2/2} on the real line.

    nodes are the roots of the order-N probabilists' Hermite polynomial
    (strictly increasing, symmetric about 0); weights are positive and
    sum to sqrt(2*pi).  Exact for polynomials of degree <= 2N - 1.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, fvals: np.ndarray) -> float:
        """Sum(w_i * fvals_i): integral of f against e^{-x^2/2} dx."""
        return float(np.dot(self.weights, fvals))


def gauss_hermite_rule(N: int) -> QuadratureRule:
    """Build the order-N Gauss-Hermite rule for the weight e^{-x^2/2}.

    Nodes come from the symmetric tridiagonal Jacobi matrix of the
    probabilists' Hermite recurrence (Golub-Welsch), polished by two
    Newton steps on H_N and symmetrized.  Weights use

        w_i = N! * sqrt(2*pi) / (N^2 * H_{N-1}(x_i)^2)

    assembled in the log domain: N! alone overflows float64 past
    N = 170, but log N! - 2 log|H_{N-1}(x_i)| stays small.

    Raises ValueError unless 1 <= N <= 200.
    """
    if not 1 <= N <= 200:
        raise ValueError(f"quadrature order must be in [1, 200], got {N}")
    if N == 1:
        return QuadratureRule(1, np.zeros(1), np.array([SQRT_2PI]))
    off_diag = np.sqrt(np.arange(1.0, N))
    nodes = eigh_tridiagonal(np.zeros(N), off_diag, eigvals_only=True)
    nodes.sort()
    # Newton polish: x <- x - H_N(x) / (N * H_{N-1}(x)); the log-pair
    # evaluation keeps the ratio finite at any representable order.
    for _ in range(2):
        for i, xi in enumerate(nodes):
            la, sa, lb, sb = _hermite_log_pair(N, xi)
            if lb == -np.inf:
                continue
            step = sb * sa * math.exp(lb - la - math.log(N))
            nodes[i] = xi - step
    nodes = 0.5 * (nodes - nodes[::-1])
    log_wts = np.empty(N)
    for i, xi in enumerate(nodes):
        la, _, _, _ = _hermite_log_pair(N, xi)
        log_wts[i] = (
            math.lgamma(N + 1.0)
            + _LOG_SQRT_2PI
            - 2.0 * math.log(N)
            - 2.0 * la
        )
    weights = np.exp(log_wts)
    return QuadratureRule(N, nodes, weights)
