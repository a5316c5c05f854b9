"""Seed selection for two-stage influence spread.

A set of providers activates consumers through a bipartite probability
matrix, and the activated consumers then spread through a social network
under the independent cascade model. The solver enumerates a coordinate
net over the low-rank image of the bipartite matrix and runs a sampled
double greedy over it, with a multiplicative guarantee controlled by the
net resolution epsilon.
"""

__version__ = "0.1.0"

from .diffusion import (
    SpreadEstimate,
    default_sample_count,
    estimate_ic_spread,
    estimate_sigma,
    estimate_sigma_hat,
    exact_ic_spread,
    exact_rho_bar,
    exact_sigma,
    generalized_sigma,
    simulate_ic,
    with_background,
)
from .generators import (
    gen_classic_im,
    gen_from_params,
    gen_planted_biclique,
    gen_rank_r,
    gen_three_layer,
)
from .greedy import GreedyTrace, greedy_max
from .instance import (
    AimInstance,
    InstanceFormatError,
    InstanceValidationError,
    RankBasis,
    min_bit_precision,
    numerical_rank,
    parse_instance,
    serialize_instance,
    validate,
)
from .net import EpsilonNet, Grid, NetSizeError, build_grid, build_net, build_weak_net, covering_point
from .relaxation import concave_relaxation, indicator, initial_activation, net_relaxation
from .sdg import SdgConfig, SeedSolution, approximation_ratio, brute_force_opt, solve

__all__ = [
    "AimInstance",
    "EpsilonNet",
    "GreedyTrace",
    "Grid",
    "InstanceFormatError",
    "InstanceValidationError",
    "NetSizeError",
    "RankBasis",
    "SdgConfig",
    "SeedSolution",
    "SpreadEstimate",
    "approximation_ratio",
    "brute_force_opt",
    "build_grid",
    "build_net",
    "build_weak_net",
    "concave_relaxation",
    "covering_point",
    "default_sample_count",
    "estimate_ic_spread",
    "estimate_sigma",
    "estimate_sigma_hat",
    "exact_ic_spread",
    "exact_rho_bar",
    "exact_sigma",
    "gen_classic_im",
    "gen_from_params",
    "gen_planted_biclique",
    "gen_rank_r",
    "gen_three_layer",
    "generalized_sigma",
    "greedy_max",
    "indicator",
    "initial_activation",
    "min_bit_precision",
    "net_relaxation",
    "numerical_rank",
    "parse_instance",
    "serialize_instance",
    "simulate_ic",
    "solve",
    "validate",
    "with_background",
]
