import numpy as np
from scipy import stats


def pooled_chisquare_pvalue(observed_counts, expected_probs, total, min_expected=5.0):
    """Goodness-of-fit p-value with tail bins pooled to min expected count.

    observed_counts[k] are category counts (sum = total); expected_probs
    must cover the same categories and sum to ~1.
    """
    observed = np.asarray(observed_counts, dtype=float)
    expected = np.asarray(expected_probs, dtype=float) * total
    # pool left-to-right into bins with enough expected mass
    obs_bins, exp_bins = [], []
    o_acc = e_acc = 0.0
    for o, e in zip(observed, expected):
        o_acc += o
        e_acc += e
        if e_acc >= min_expected:
            obs_bins.append(o_acc)
            exp_bins.append(e_acc)
            o_acc = e_acc = 0.0
    if obs_bins:
        obs_bins[-1] += o_acc
        exp_bins[-1] += e_acc
    obs = np.array(obs_bins)
    exp = np.array(exp_bins)
    # renormalize away the residual probability mass outside the categories
    exp *= obs.sum() / exp.sum()
    chi2 = np.sum((obs - exp) ** 2 / exp)
    dof = len(obs) - 1
    return float(stats.chi2.sf(chi2, dof))


def two_sample_chisquare_pvalue(counts_a, counts_b, min_total=10.0):
    """Homogeneity test between two pooled histograms."""
    width = max(len(counts_a), len(counts_b))
    a = np.zeros(width)
    b = np.zeros(width)
    a[:len(counts_a)] = counts_a
    b[:len(counts_b)] = counts_b
    a_bins, b_bins = [], []
    a_acc = b_acc = 0.0
    for x, y in zip(a, b):
        a_acc += x
        b_acc += y
        if a_acc + b_acc >= min_total:
            a_bins.append(a_acc)
            b_bins.append(b_acc)
            a_acc = b_acc = 0.0
    if a_bins:
        a_bins[-1] += a_acc
        b_bins[-1] += b_acc
    table = np.array([a_bins, b_bins])
    table = table[:, table.sum(axis=0) > 0]
    chi2, p, dof, _ = stats.chi2_contingency(table)
    return float(p)
