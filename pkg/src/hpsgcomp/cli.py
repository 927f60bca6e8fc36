"""Command line front end.

    hpsgcomp compile GRAMMAR [--dump-classes] [--dump-program]
    hpsgcomp query GRAMMAR -e DESCRIPTION [--depth N] [--max-solutions N]
    hpsgcomp repl GRAMMAR

GRAMMAR is a file path; the name of a bundled grammar ("append_c",
"appendix_a.gram", ...) also works when no such file exists.
Exit status: 0 on success, 1 when a batch query has no solution,
2 on usage, file and grammar errors.
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field

from . import bundled_grammar
from .classifier import classify, format_classification
from .compiler import compile_naive, compile_program, format_program
from .descriptions import load_grammar, parse_query
from .errors import GrammarError
from .fstruct import print_avm
from .interpreter import query

log = logging.getLogger("hpsgcomp")


@dataclass
class SessionConfig:
    grammar_path: str
    depth_bound: int = None
    max_solutions: int = None
    suppressed_features: list = field(default_factory=list)
    dump_classes: bool = False
    dump_program: bool = False
    naive: bool = False


def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _feature_list(text):
    return [f.strip().lower() for f in text.split(",") if f.strip()]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hpsgcomp",
        description="Compile typed feature structure grammars and run queries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("grammar", help="grammar file (or the name of a bundled grammar)")
        p.add_argument("--dump-classes", action="store_true",
                       help="print the constrained / hiding / simple classification")
        p.add_argument("--dump-program", action="store_true",
                       help="print the compiled clauses")
        p.add_argument("--naive", action="store_true",
                       help="use the naive run-time inheritance encoding")
        p.add_argument("--suppress", type=_feature_list, default=[],
                       metavar="F1,F2", help="features to hide in printed results")
        p.add_argument("-v", "--verbose", action="store_true")

    def solving(p):
        p.add_argument("--depth", type=_positive, default=None, metavar="N",
                       help="depth bound on derivations")
        p.add_argument("--max-solutions", type=_positive, default=None, metavar="N")

    common(sub.add_parser("compile", help="check a grammar and optionally dump it"))
    q = sub.add_parser("query", help="solve one query and print every solution")
    common(q)
    solving(q)
    q.add_argument("-e", dest="description", required=True, metavar="DESCRIPTION",
                   help="query description")
    r = sub.add_parser("repl", help="interactive Query>/Result> loop")
    common(r)
    solving(r)
    return parser


def resolve_grammar_path(name):
    if os.path.exists(name):
        return name
    stem = os.path.basename(name)
    if stem.endswith(".gram"):
        stem = stem[: -len(".gram")]
    candidate = bundled_grammar(stem)
    if candidate.is_file():
        return str(candidate)
    raise FileNotFoundError(f"no such grammar file: {name}")


def _config(args):
    return SessionConfig(
        grammar_path=resolve_grammar_path(args.grammar),
        depth_bound=getattr(args, "depth", None),
        max_solutions=getattr(args, "max_solutions", None),
        suppressed_features=args.suppress,
        dump_classes=args.dump_classes,
        dump_program=args.dump_program,
        naive=args.naive,
    )


def _load(config, out):
    grammar = load_grammar(config.grammar_path)
    program = compile_naive(grammar) if config.naive else compile_program(grammar)
    if config.dump_classes:
        out.write(format_classification(grammar.signature, classify(grammar)))
    if config.dump_program:
        out.write(format_program(program))
    return grammar, program


def _batch(config, grammar, program, text, out):
    d = parse_query(grammar.signature, text)
    stream = query(program, d, depth_bound=config.depth_bound,
                   max_solutions=config.max_solutions)
    found = 0
    for sol in stream:
        if found:
            out.write("\n")
        out.write(print_avm(grammar.signature, sol.fs, config.suppressed_features) + "\n")
        found += 1
    if stream.depth_exceeded:
        print(f"warning: depth bound {config.depth_bound} reached, "
              "solutions may be missing", file=sys.stderr)
    if not found:
        out.write("no\n")
        return 1
    return 0


def repl(config, grammar, program, inp, out):
    """Read queries from ``inp`` until EOF or an empty line.

    After each result a line holding ``;`` asks for the next solution;
    anything else ends the current query.
    """
    sig = grammar.signature

    def ask(prompt):
        out.write(prompt)
        out.flush()
        line = inp.readline()
        return None if not line else line.strip()

    while True:
        text = ask("Query> ")
        if not text:
            return 0
        try:
            d = parse_query(sig, text)
        except GrammarError as e:
            out.write(f"error: {e}\n")
            continue
        stream = query(program, d, depth_bound=config.depth_bound,
                       max_solutions=config.max_solutions)
        shown = 0
        for sol in stream:
            shown += 1
            out.write("Result> " + print_avm(sig, sol.fs, config.suppressed_features) + "\n")
            if ask("") != ";":
                break
        else:
            out.write("no more solutions\n" if shown else "no\n")
            if stream.depth_exceeded:
                out.write(f"(depth bound {config.depth_bound} reached)\n")


def run(argv=None, stdin=None, stdout=None):
    stdin = sys.stdin if stdin is None else stdin
    out = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s: %(message)s")
    try:
        config = _config(args)
        grammar, program = _load(config, out)
        if args.command == "compile":
            return 0
        if args.command == "query":
            return _batch(config, grammar, program, args.description, out)
        return repl(config, grammar, program, stdin, out)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except GrammarError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())
