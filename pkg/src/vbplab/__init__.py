"""Vector bin packing: configuration LPs, iterative randomized rounding and Match & Round."""

from .config_lp import FractionalSolution, check_fractional, solve_config_lp
from .core import Instance, MultiConfiguration, Packing, check_configuration, classify, first_fit, split_huge
from .irr import IrrParams, run_irr
from .match_round import run_2vbp, run_match_round
from .matching import build_matching_graph, decompose, max_weight_matching, sample_matching, solve_mlp

__version__ = "0.1.0"

__all__ = [
    "FractionalSolution", "Instance", "IrrParams", "MultiConfiguration", "Packing", "build_matching_graph",
    "check_configuration", "check_fractional", "classify", "decompose", "first_fit", "max_weight_matching",
    "run_2vbp", "run_irr", "run_match_round", "sample_matching", "solve_config_lp", "solve_mlp", "split_huge",
]
