import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

import hpsgcomp  # noqa: E402
from hpsgcomp import bundled_grammar, compile_naive, compile_program, descriptions, interpreter, load_grammar  # noqa: E402
from oracles import Hierarchy, constraints_of, grammar_source, violations  # noqa: E402

# Every solution produced anywhere in the test suite is checked against the
# independent satisfaction oracle.  Grammar sources are remembered by
# signature so the oracle can be built from the text, not from the package.

_sources = {}
_oracles = {}
RECORDED = []
CHECKED = {"solutions": 0, "violations": 0}

_parse_grammar = descriptions.parse_grammar


def _remembering_parse_grammar(source):
    g = _parse_grammar(source)
    _sources[id(g.signature)] = (g.signature, source)
    return g


descriptions.parse_grammar = _remembering_parse_grammar
hpsgcomp.parse_grammar = _remembering_parse_grammar

_next = interpreter.SolutionStream.__next__


def _recording_next(self):
    sol = _next(self)
    RECORDED.append((self.program.signature, self.description, sol.fs))
    return sol


interpreter.SolutionStream.__next__ = _recording_next


def oracle_for(sig):
    entry = _sources.get(id(sig))
    if entry is None or entry[0] is not sig:
        return None
    source = entry[1]
    if source not in _oracles:
        _oracles[source] = (Hierarchy(source), constraints_of(source))
    return _oracles[source]


def check_recorded():
    """Check and clear the recorded solutions; returns the problems found."""
    problems = []
    while RECORDED:
        sig, d, fs = RECORDED.pop()
        oracle = oracle_for(sig)
        assert oracle is not None, "solution from a grammar with unknown source"
        found = violations(oracle[0], oracle[1], fs, d)
        CHECKED["solutions"] += 1
        CHECKED["violations"] += len(found)
        problems.extend(found)
    return problems


@pytest.fixture(autouse=True)
def soundness():
    RECORDED.clear()
    yield
    assert check_recorded() == []

GRAMMARS = ["append_c", "appendix_a", "ab", "diamond", "empty"]


class Bundle:
    """A bundled grammar together with its compiled programs and oracles."""

    def __init__(self, name):
        self.name = name
        self.source = grammar_source(name)
        self.grammar = load_grammar(bundled_grammar(name))
        self.sig = self.grammar.signature
        self.program = compile_program(self.grammar)
        self.naive = compile_naive(self.grammar)
        self.h = Hierarchy(self.source)
        self.constraints = constraints_of(self.source)


_cache = {}


def bundle(name):
    if name not in _cache:
        _cache[name] = Bundle(name)
    return _cache[name]


@pytest.fixture
def append_c():
    return bundle("append_c")


@pytest.fixture
def appendix_a():
    return bundle("appendix_a")


@pytest.fixture
def ab():
    return bundle("ab")


@pytest.fixture
def diamond():
    return bundle("diamond")


# Acceptance reporting: one line per criterion, printed after the run.

REPORT = {}


def report(number, ok, detail=""):
    REPORT[number] = (ok, detail)
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if not REPORT and not CHECKED["solutions"]:
        return
    tr = terminalreporter
    tr.section("acceptance")
    for number in sorted(REPORT):
        ok, detail = REPORT[number]
        tr.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    failed_soundness = any(
        rep.when == "teardown" and rep.failed for rep in tr.stats.get("error", [])
    )
    ok = CHECKED["violations"] == 0 and not failed_soundness
    tr.write_line(
        f"suite-wide soundness: {'PASS' if ok else 'FAIL'} "
        f"{CHECKED['solutions']} solutions checked, {CHECKED['violations']} violations"
    )
