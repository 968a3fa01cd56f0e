"""Checking records of achievement for answer set programs."""

from .assertions import (RecordOfAchievement, a_star, enumerate_satisfying,
                         enumerate_satisfying_exhaustive, eval_assertion, parse_assertion)
from .checker import (CheckReport, Verdict, check, check_achievement, check_completeness,
                      hamiltonian_correctness, validate_input)
from .engine import (EnumerationBudget, brute_force_stable_models, enumerate_stable_models,
                     is_stable, minimal_model, reduct, translate_choice)
from .errors import (AchieveError, BudgetExceeded, GroundingError, ParseError, SafetyError,
                     SpecViolation)
from .grounder import ground, herbrand_terms
from .model import Atom, InputInstance, InputSpec, Interpretation, Program, preds, prefix
from .parser import parse_instance, parse_instance_file, parse_program, parse_program_file

__all__ = [
    "AchieveError", "Atom", "BudgetExceeded", "CheckReport", "EnumerationBudget", "GroundingError",
    "InputInstance", "InputSpec", "Interpretation", "ParseError", "Program", "RecordOfAchievement",
    "SafetyError", "SpecViolation", "Verdict", "a_star", "brute_force_stable_models", "check",
    "check_achievement", "check_completeness", "enumerate_satisfying",
    "enumerate_satisfying_exhaustive", "enumerate_stable_models", "eval_assertion", "ground",
    "hamiltonian_correctness", "herbrand_terms", "is_stable", "minimal_model", "parse_assertion",
    "parse_instance", "parse_instance_file", "parse_program", "parse_program_file", "preds",
    "prefix", "reduct", "translate_choice", "validate_input",
]
