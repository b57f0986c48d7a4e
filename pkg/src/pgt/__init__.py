"""Difference-based tests and constructions for potential games."""

from .construct import (ConstructionError, PotentialFn, construct_from_pairs, construct_from_reverse_path,
                        construct_rosenthal, export_potential, potential_difference_along_path,
                        potential_from_dict, rosenthal_value, table_potential, verify_exact_potential,
                        verify_gradient_match)
from .criteria import (OracleSizeError, find_aggregative_witness, oracle_finite_potential,
                       test_cross_hessian, test_four_cycles, test_hp_decomposition, test_pairwise)
from .equilibrium import DynamicsResult, better_response_dynamics, grid_game, minimize_potential, verify_nash
from .expr import (DomainError, ExpressionError, ExprSyntaxError, UnknownVariableError, compile_expression,
                   differentiate_expression, evaluate_expression, parse_expression, to_text)
from .game import (AllSpace, Box, CongestionNetwork, ExprCosts, Finite, GameSpec, GameSpecError, TableCosts,
                   detect_abnormal, dump_game_spec, evaluate_cost, expand_congestion_game, game_from_dict,
                   game_to_dict, load_game_spec, sample_strategies)
from .ordinal import (ConvexityCertificate, OrdinalCandidate, check_assumption1,
                      check_concave_subgradient_certificate, check_cross_partial_signs,
                      check_strong_convexity_certificate, estimate_constants, verify_ordinal_potential)
from .paths import (DeviationPath, PairDeviation, PathError, canonical_path, enumerate_four_cycles, four_cycle,
                    h_pair, h_path, path_integral)
from .report import TestReport

__version__ = "0.1.0"

__all__ = [
    "ConstructionError",
    "PotentialFn",
    "construct_from_pairs",
    "construct_from_reverse_path",
    "construct_rosenthal",
    "export_potential",
    "potential_difference_along_path",
    "potential_from_dict",
    "rosenthal_value",
    "table_potential",
    "verify_exact_potential",
    "verify_gradient_match",
    "OracleSizeError",
    "find_aggregative_witness",
    "oracle_finite_potential",
    "test_cross_hessian",
    "test_four_cycles",
    "test_hp_decomposition",
    "test_pairwise",
    "DynamicsResult",
    "better_response_dynamics",
    "grid_game",
    "minimize_potential",
    "verify_nash",
    "DomainError",
    "ExpressionError",
    "ExprSyntaxError",
    "UnknownVariableError",
    "compile_expression",
    "differentiate_expression",
    "evaluate_expression",
    "parse_expression",
    "to_text",
    "AllSpace",
    "Box",
    "CongestionNetwork",
    "ExprCosts",
    "Finite",
    "GameSpec",
    "GameSpecError",
    "TableCosts",
    "detect_abnormal",
    "dump_game_spec",
    "evaluate_cost",
    "expand_congestion_game",
    "game_from_dict",
    "game_to_dict",
    "load_game_spec",
    "sample_strategies",
    "ConvexityCertificate",
    "OrdinalCandidate",
    "check_assumption1",
    "check_concave_subgradient_certificate",
    "check_cross_partial_signs",
    "check_strong_convexity_certificate",
    "estimate_constants",
    "verify_ordinal_potential",
    "DeviationPath",
    "PairDeviation",
    "PathError",
    "canonical_path",
    "enumerate_four_cycles",
    "four_cycle",
    "h_pair",
    "h_path",
    "path_integral",
    "TestReport",
]
