"""Open call-by-value: the fireball calculus, its split variant and multi types."""
from .syntax import (
    Abstraction,
    Application,
    Program,
    Var,
    Variable,
    alpha_eq,
    alpha_eq_program,
    parse_expression,
    parse_program,
    parse_term,
    print_expression,
    print_program,
    print_term,
)
from .evaluation import (
    StepKind,
    bisimulation_check,
    plain_evaluate,
    split_evaluate,
    unfold,
)
from .multitypes import EMPTY, LinearType, MultiType, TypeContext, parse_multitype
from .derivations import Derivation, check_derivation, derivation_size, deserialize, serialize
from .synthesis import Diverged, TypedTrace, type_normal_tight, type_program
from .demo import counterexample_demo, variable_judgement_derivable

__all__ = [
    "Abstraction", "Application", "Program", "Var", "Variable",
    "alpha_eq", "alpha_eq_program", "parse_expression", "parse_program", "parse_term",
    "print_expression", "print_program", "print_term",
    "StepKind", "bisimulation_check", "plain_evaluate", "split_evaluate", "unfold",
    "EMPTY", "LinearType", "MultiType", "TypeContext", "parse_multitype",
    "Derivation", "check_derivation", "derivation_size", "deserialize", "serialize",
    "Diverged", "TypedTrace", "type_normal_tight", "type_program",
    "counterexample_demo", "variable_judgement_derivable",
]
