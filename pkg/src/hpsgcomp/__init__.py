"""Compile typed feature structure constraint grammars into definite
clause programs and run queries against them."""

from importlib import resources

from .classifier import TypeClassification, classify, interact
from .compiler import (
    Clause,
    Goal,
    Program,
    compile_naive,
    compile_program,
    compile_type,
    compute_rhs,
    inherit,
    prune,
)
from .descriptions import (
    Constraint,
    Grammar,
    desc_to_fs,
    load_grammar,
    parse_grammar,
    parse_query,
    to_dnf,
)
from .fstruct import Node, copy, fill_approp, print_avm, retype, unify
from .interpreter import Resolver, Solution, SolutionStream, query, solve
from .signature import Signature, load_signature

__all__ = [
    "Clause", "Constraint", "Goal", "Grammar", "Node", "Program", "Resolver",
    "Signature", "Solution", "SolutionStream", "TypeClassification",
    "bundled_grammar", "classify", "compile_naive", "compile_program",
    "compile_type", "compute_rhs", "copy", "desc_to_fs", "fill_approp",
    "inherit", "interact", "load_grammar", "load_signature", "parse_grammar",
    "parse_query", "print_avm", "prune", "query", "retype", "solve", "to_dnf",
    "unify",
]


def bundled_grammar(name):
    """Path of a grammar shipped with the package, e.g. ``"append_c"``."""
    return resources.files(__name__).joinpath("grammars", f"{name}.gram")
