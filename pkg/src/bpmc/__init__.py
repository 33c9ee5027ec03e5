"""Qualitative model checking of branching processes against LTL and omega-automata."""

from .automata import Dpa, Nba, check_unambiguous, dump_automaton, lasso_membership, parse_automaton
from .bp import BranchingProcess, dump_bp, make_bp, mean_matrix, parse_bp, validate_bp
from .checkers import (
    Verdict,
    check_conba_one_exact,
    check_couba_one,
    check_dpa_one,
    check_finite_one,
    check_ltl_one,
    check_nba_one,
    check_reach_one,
)
from .errors import BpmcError
from .finiteness import almost_surely_finite, almost_surely_reach
from .linalg import RationalMatrix, Trichotomy, rho_trichotomy
from .ltl import eval_lasso, ltl_to_uba, negate, parse_ltl
from .safra import determinize_to_dpa

__version__ = "0.1.0"

__all__ = [
    "BpmcError",
    "BranchingProcess",
    "Dpa",
    "Nba",
    "RationalMatrix",
    "Trichotomy",
    "Verdict",
    "almost_surely_finite",
    "almost_surely_reach",
    "check_conba_one_exact",
    "check_couba_one",
    "check_dpa_one",
    "check_finite_one",
    "check_ltl_one",
    "check_nba_one",
    "check_reach_one",
    "check_unambiguous",
    "determinize_to_dpa",
    "dump_automaton",
    "dump_bp",
    "eval_lasso",
    "lasso_membership",
    "ltl_to_uba",
    "make_bp",
    "mean_matrix",
    "negate",
    "parse_automaton",
    "parse_bp",
    "parse_ltl",
    "rho_trichotomy",
    "validate_bp",
]
