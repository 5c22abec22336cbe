"""LL(1) parsing with derivatives and zippers.

The main entry points are re-exported here; see the submodules for the
rest.
"""

from .analysis import (
    analyse,
    conflicts,
    first_set,
    is_ll1,
    is_nullable,
    nullable_value,
    productive,
    snf_set,
    snf_witness,
)
from .combinators import Level, many, many1, operator_table, opt, rep1sep, repsep, tagged_disjunction
from .printing import enumerate_sequences, pretty_print
from .simple import derive_simple, parse_simple, run_simple
from .syntax import (
    TOKEN,
    Disjunction,
    Elem,
    Environment,
    Epsilon,
    Failure,
    Grammar,
    Kind,
    Map,
    PairTag,
    Sequence,
    Syntax,
    Tag,
    Token,
    Transform,
    Var,
)
from .zippy import FocusedSyntax, Parsed, UnexpectedEnd, UnexpectedToken, focus, parse

__all__ = [
    "analyse",
    "conflicts",
    "first_set",
    "is_ll1",
    "is_nullable",
    "nullable_value",
    "productive",
    "snf_set",
    "snf_witness",
    "Level",
    "many",
    "many1",
    "operator_table",
    "opt",
    "rep1sep",
    "repsep",
    "tagged_disjunction",
    "enumerate_sequences",
    "pretty_print",
    "derive_simple",
    "parse_simple",
    "run_simple",
    "TOKEN",
    "Disjunction",
    "Elem",
    "Environment",
    "Epsilon",
    "Failure",
    "Grammar",
    "Kind",
    "Map",
    "PairTag",
    "Sequence",
    "Syntax",
    "Tag",
    "Token",
    "Transform",
    "Var",
    "FocusedSyntax",
    "Parsed",
    "UnexpectedEnd",
    "UnexpectedToken",
    "focus",
    "parse",
]
