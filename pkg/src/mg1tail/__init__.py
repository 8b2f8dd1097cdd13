"""Waiting-time tail toolkit for the M/G/1 queue with regularly varying or
exponential service: closed-form approximations spanning the heavy-traffic
and heavy-tail regimes, the transition threshold between them, and exact /
Monte Carlo ground truth to judge them against.
"""

__version__ = "0.1.0"

from .approx import (
    ApproximationPoint,
    approximation_point,
    big_m,
    gamma_factor,
    geometric_term,
    h_approx,
    h_clt,
    heavy_tail,
    heavy_traffic,
    j_approx,
    s_sum,
    subexp_sum_approx,
    t_tail,
    t_tail_z,
)
from .distributions import (
    ExponentialIntegrated,
    Lattice,
    ParetoIntegratedTail,
    QueueModel,
    ServiceMoments,
    atom_prob,
    load_lattice_file,
    mean_integrated,
    parse_model,
    sample_x,
    service_moments,
    tail_index,
    tail_prob,
    variance_integrated,
)
from .errors import (
    Mg1TailError,
    NoCrossingError,
    ResourceBudgetError,
    UnsupportedModelError,
)
from .geom import GeomModel, geom_gamma, geom_tail_approx, geom_threshold
from .kernels import available_backends, get_backend, set_backend
from .light_tails import (
    AdjustmentCoefficient,
    adjustment_coefficient,
    corrected_heavy_traffic,
    cramer_lundberg_tail,
)
from .mc import (
    Method,
    PkExact,
    SimulationEstimate,
    ak_estimate,
    compound_geometric_sample,
    convolve_tail,
    convolve_tail_grid,
    crude_mc,
    geom_crude_mc,
    lattice_brackets,
    pk_truncated,
)
from .transition import (
    Regime,
    RegimeReport,
    RhoThreshold,
    crossing_point,
    kappa,
    regime_classify,
    threshold_rho,
    threshold_x,
)

__all__ = [
    "ApproximationPoint",
    "AdjustmentCoefficient",
    "ExponentialIntegrated",
    "GeomModel",
    "Lattice",
    "Method",
    "Mg1TailError",
    "NoCrossingError",
    "ParetoIntegratedTail",
    "PkExact",
    "QueueModel",
    "Regime",
    "RegimeReport",
    "ResourceBudgetError",
    "RhoThreshold",
    "ServiceMoments",
    "SimulationEstimate",
    "UnsupportedModelError",
    "adjustment_coefficient",
    "ak_estimate",
    "approximation_point",
    "atom_prob",
    "available_backends",
    "big_m",
    "compound_geometric_sample",
    "convolve_tail",
    "convolve_tail_grid",
    "corrected_heavy_traffic",
    "cramer_lundberg_tail",
    "crossing_point",
    "crude_mc",
    "gamma_factor",
    "geom_crude_mc",
    "geom_gamma",
    "geom_tail_approx",
    "geom_threshold",
    "geometric_term",
    "get_backend",
    "h_approx",
    "h_clt",
    "heavy_tail",
    "heavy_traffic",
    "j_approx",
    "kappa",
    "lattice_brackets",
    "load_lattice_file",
    "mean_integrated",
    "parse_model",
    "pk_truncated",
    "regime_classify",
    "s_sum",
    "sample_x",
    "service_moments",
    "set_backend",
    "subexp_sum_approx",
    "t_tail",
    "t_tail_z",
    "tail_index",
    "tail_prob",
    "threshold_rho",
    "threshold_x",
    "variance_integrated",
]
