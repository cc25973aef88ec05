"""Monte Carlo and quadrature experiments on hollow Wishart matrices with log-concave entries."""
from .distributions import Kind, UnivariateLogConcave, make_distribution, parse_distribution, sample
from .ensembles import gaussian_hollow, sample_data_matrix, wishart_hollow
from .errors import WishartLabError
from .estimators import Estimate, McConfig, estimate_statistic, knn_entropy, tv_lower_bound
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [
    "Kind", "UnivariateLogConcave", "make_distribution", "parse_distribution", "sample",
    "gaussian_hollow", "sample_data_matrix", "wishart_hollow", "WishartLabError",
    "Estimate", "McConfig", "estimate_statistic", "knn_entropy", "tv_lower_bound", "RngStream",
]
