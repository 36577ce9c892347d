import math

import numpy as np
import pytest

from threshnet.disparity import (
    DisparityParams,
    alpha_scores,
    apply_filter,
    disparity_edge_density,
    meanfield_c,
    solve_alpha,
)
from threshnet.ensemble import ModelParams, WeightMatrix, derive_seed, sample_weights


def weight_matrix_from_dense(x):
    n = x.shape[0]
    return WeightMatrix(n, x[np.triu_indices(n, 1)])


def naive_alpha_scores(w):
    """Independent double-loop transcription of the score definition."""
    n = w.n
    out = np.zeros((n, n))
    for i in range(n):
        denom = math.fsum(math.exp(w.value(i, k)) for k in range(n) if k != i)
        for j in range(n):
            if j == i:
                continue
            numer = math.fsum(
                math.exp(w.value(i, k)) for k in range(n) if k != i and k != j
            )
            out[i, j] = (numer / denom) ** (n - 2)
    return out


class TestDisparityParams:
    def test_valid(self):
        p = DisparityParams(n=10, rho=0.3, alpha=0.05)
        assert p.alpha == 0.05

    def test_validation(self):
        with pytest.raises(ValueError):
            DisparityParams(n=2, rho=0.3, alpha=0.5)
        with pytest.raises(ValueError):
            DisparityParams(n=10, rho=0.5, alpha=0.5)
        with pytest.raises(ValueError):
            DisparityParams(n=10, rho=0.3, alpha=1.0)


class TestAlphaScores:
    def test_equal_weights_n3(self):
        w = weight_matrix_from_dense(np.zeros((3, 3)))
        scores = alpha_scores(w)
        off_diag = scores[~np.eye(3, dtype=bool)]
        assert np.allclose(off_diag, 0.5, atol=1e-14)

    def test_hand_computed_n3(self):
        # e^{X_01} = 3, e^{X_02} = 1: alpha_01 = (1/4)^1
        x = np.zeros((3, 3))
        x[0, 1] = x[1, 0] = math.log(3.0)
        x[0, 2] = x[2, 0] = 0.0
        x[1, 2] = x[2, 1] = 0.7
        scores = alpha_scores(weight_matrix_from_dense(x))
        assert scores[0, 1] == pytest.approx(0.25, rel=1e-14)
        assert scores[0, 2] == pytest.approx(0.75, rel=1e-14)

    def test_asymmetric_and_in_unit_interval(self):
        w = sample_weights(ModelParams(n=8, t=0.0, rho=0.2), 3)
        scores = alpha_scores(w)
        off = ~np.eye(8, dtype=bool)
        assert np.all(scores[off] > 0) and np.all(scores[off] < 1)
        assert not np.allclose(scores, scores.T)

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(11)
        for trial in range(50):
            x = rng.normal(scale=1.5, size=(6, 6))
            x = (x + x.T) / 2
            np.fill_diagonal(x, 0.0)
            w = weight_matrix_from_dense(x)
            assert np.allclose(alpha_scores(w), naive_alpha_scores(w), atol=1e-12)

    def test_scale_invariance(self):
        rng = np.random.default_rng(13)
        x = rng.normal(size=(10, 10))
        x = (x + x.T) / 2
        np.fill_diagonal(x, 0.0)
        a = alpha_scores(weight_matrix_from_dense(x))
        b = alpha_scores(weight_matrix_from_dense(x + 7.25))
        assert np.allclose(a, b, atol=1e-12)


class TestApplyFilter:
    def test_alpha_near_one_empty(self):
        w = sample_weights(ModelParams(n=12, t=0.0, rho=0.2), 5)
        assert apply_filter(w, 1.0 - 1e-12).num_edges == 0

    def test_alpha_near_zero_complete(self):
        w = sample_weights(ModelParams(n=12, t=0.0, rho=0.2), 5)
        assert apply_filter(w, 1e-12).num_edges == 12 * 11 // 2

    def test_equal_weights_triangle(self):
        w = weight_matrix_from_dense(np.zeros((3, 3)))
        g = apply_filter(w, 0.4)
        assert g.num_edges == 3

    def test_monotone_in_alpha(self):
        w = sample_weights(ModelParams(n=40, t=0.0, rho=0.3), 17)
        previous = None
        for alpha in (0.2, 0.5, 0.8, 0.95):
            edges = {tuple(e) for e in apply_filter(w, alpha).edges.tolist()}
            if previous is not None:
                assert edges.issubset(previous)
            previous = edges

    def test_alpha_domain(self):
        w = weight_matrix_from_dense(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            apply_filter(w, 0.0)


class TestMeanfieldC:
    def test_algebra_smoke(self):
        # alpha chosen so (n-2)(alpha^{-1/(n-2)} - 1) = 1: c = (0 + 1 - rho)/(2 sqrt(rho))
        n, rho = 102, 0.25
        alpha = (1.0 + 1.0 / (n - 2)) ** (-(n - 2))
        assert meanfield_c(n, alpha, rho) == pytest.approx(0.75, rel=1e-12)

    def test_strictly_decreasing_in_alpha(self):
        n, rho = 500, 0.3
        alphas = np.linspace(0.01, 0.99, 25)
        cs = [meanfield_c(n, a, rho) for a in alphas]
        assert all(b < a for a, b in zip(cs, cs[1:]))

    def test_dual_transcription(self):
        # independent rearrangement: c = (log((n-2)(a^{-1/(n-2)} - 1)) + (1-rho)/2) / sqrt(rho)
        n, rho, alpha = 2000, 0.3, 0.05
        expect = (math.log((n - 2) * (alpha ** (-1.0 / (n - 2)) - 1.0)) + (1 - rho) / 2) / math.sqrt(rho)
        assert meanfield_c(n, alpha, rho) == pytest.approx(expect, rel=1e-12)

    def test_rejects_rho_zero(self):
        with pytest.raises(ValueError):
            meanfield_c(100, 0.05, 0.0)


class TestDisparityEdgeDensity:
    def test_monotone_decreasing_in_alpha(self):
        n, rho = 2000, 0.3
        vals = [disparity_edge_density(n, a, rho) for a in (0.05, 0.2, 0.5, 0.8, 0.95)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert all(0.0 < v < 1.0 for v in vals)

    def test_order_doubling_stability(self):
        n, rho, alpha = 2000, 0.3, 0.05
        d40 = disparity_edge_density(n, alpha, rho, order=40)
        d80 = disparity_edge_density(n, alpha, rho, order=80)
        assert abs(d80 - d40) < 1e-10

    def test_matches_monte_carlo_of_meanfield_rule(self):
        # direct MC of the mean-field keep rule, independent of quadrature
        n, rho, alpha = 2000, 0.3, 0.6
        c = meanfield_c(n, alpha, rho)
        rng = np.random.default_rng(29)
        draws = 2_000_000
        y = rng.standard_normal(draws)
        zi = rng.standard_normal(draws)
        zj = rng.standard_normal(draws)
        scale = math.sqrt((1 - 2 * rho) / rho)
        kept = (zi < c - y * scale) | (zj < c - y * scale)
        p_mc = kept.mean()
        se = math.sqrt(p_mc * (1 - p_mc) / draws)
        assert abs(disparity_edge_density(n, alpha, rho) - p_mc) <= 4 * se


class TestSolveAlpha:
    def test_round_trip(self):
        for rho in (0.1, 0.3, 0.45):
            alpha = solve_alpha(2000, rho, 4.0)
            realized = 1999 * disparity_edge_density(2000, alpha, rho)
            assert realized == pytest.approx(4.0, rel=1e-8)

    def test_alpha_decreases_with_target(self):
        # fewer edges wanted -> stricter (larger) alpha
        n, rho = 2000, 0.3
        a_sparse = solve_alpha(n, rho, 2.0)
        a_dense = solve_alpha(n, rho, 20.0)
        assert a_sparse > a_dense

    def test_target_validation(self):
        with pytest.raises(ValueError):
            solve_alpha(100, 0.3, 0.0)
        with pytest.raises(ValueError):
            solve_alpha(100, 0.3, 99.5)

    def test_realized_degree_on_simulation(self):
        # one-rho spot check against the exact-score pipeline (the full
        # three-rho sweep with 100 samples runs in the acceptance suite)
        n, rho, target = 600, 0.3, 4.0
        alpha = solve_alpha(n, rho, target)
        degs = []
        for s in range(30):
            w = sample_weights(ModelParams(n=n, t=0.0, rho=rho), derive_seed(97, s))
            degs.append(2 * apply_filter(w, alpha).num_edges / n)
        assert np.mean(degs) == pytest.approx(target, rel=0.15)
