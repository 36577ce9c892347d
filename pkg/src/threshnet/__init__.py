"""Thresholded correlated-Gaussian network ensembles.

Pair weights on n nodes are jointly Gaussian, unit variance, with
correlation rho between pairs sharing a node; thresholding at t yields a
random graph ensemble with heavy-tailed degrees, abundant triangles, and
short paths.  The package provides exact samplers, Hermite-series and
quadrature statistics, moment fitting, percolation and path-length
experiment drivers, and a disparity-filter variant.
"""

from .analytic import (
    AnalyticSummary,
    DegreeDistribution,
    SeriesControl,
    SeriesConvergenceWarning,
    clustering,
    degree_distribution,
    degree_distribution_laplace,
    degree_variance,
    edge_density,
    mean_degree,
    summarize,
    threshold_for_mean_degree,
    triangle_prob,
    triangles_per_node,
    two_star_prob,
)
from .disparity import (
    DisparityParams,
    alpha_scores,
    apply_filter,
    disparity_edge_density,
    meanfield_c,
    solve_alpha,
)
from .ensemble import (
    Graph,
    ModelParams,
    WeightMatrix,
    derive_seed,
    read_edge_list,
    row_sum,
    sample_graph,
    sample_latent,
    sample_weights,
    threshold_weights,
    write_edge_list,
)
from .experiments import (
    SweepRecord,
    TransitionPoint,
    find_transition,
    run_figure_table,
    run_path_scaling,
    run_susceptibility_sweep,
    write_records_csv,
)
from .fitting import FitResult, fit, fit_moments, read_degree_sequence
from .graphalg import (
    ComponentSummary,
    PathStats,
    average_neighbor_degree,
    components,
    degree_histogram,
    local_clustering,
    mean_shortest_path,
    transitivity,
)
from .specfun import (
    QuadratureRule,
    gauss_hermite_rule,
    hermite,
    hermite_row,
    norm_cdf,
    norm_cdf_inv,
    norm_cdf_inv_approx,
    phi,
)

__version__ = "0.1.0"
