"""Weighted domination probabilities and weighted colouring of random graphs."""

from .coloring import (chi_upper_bound_mad, chromatic_number_exact, exact_coloring,
                       greedy_stable_set, max_stable_set_exact, stable_set_removal_coloring)
from .density import max_average_degree_exact
from .domination import (DominationSchema, check_strict_nested, check_weak_nested,
                         domination_probability_bruteforce, domination_probability_formula,
                         expected_rtot, independence_check, p_dom, simulate_domination)
from .graph import Graph, sample_graph
from .rng import RngStream
from .weighted import (EdgeWeights, chi_w_exact, greedy_weighted_coloring,
                       is_proper_weighted_coloring, randomized_weighted_coloring, span)

__version__ = "0.1.0"
