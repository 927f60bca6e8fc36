"""Compilation of type constraints into definite clause programs.

Two back ends share the same ``Program`` shape:

* ``compile_program`` does off-line inheritance and uses the type
  classification to put only the necessary goals into clause bodies,
  pruning goals that sit below another goal's node.
* ``compile_naive`` emits the plain ``_type`` / ``_hier`` / ``_cons``
  encoding with run-time inheritance.  It is slow and exists as an
  independent route to the same solutions.

A relation is a unary predicate over a feature structure.  In compiled
programs relations are named by types; goals on non-minimal types are
resolved through ``dispatch`` to the minimal subtypes.
"""

import logging
from dataclasses import dataclass, field

from . import fstruct
from .classifier import classify
from .descriptions import apply_description, rename_variables, to_dnf
from .errors import InconsistentConstraint
from .fstruct import Node, deref
from .signature import TOP, _reorder
from .syntax import Conj, TypeLit

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Goal:
    relation: str
    node: Node


@dataclass
class Clause:
    relation: str
    head: Node
    body: tuple = ()
    counts_depth: bool = True

    @property
    def head_type(self):
        return deref(self.head).type


@dataclass
class Program:
    signature: object
    classification: object
    clauses: dict = field(default_factory=dict)
    dispatch: dict = field(default_factory=dict)
    relation_info: dict = field(default_factory=dict)
    naive: bool = False
    expandable: frozenset = frozenset()

    def covers(self, proven, wanted):
        """Does a proof of relation ``proven`` on a node discharge ``wanted``?"""
        if proven == wanted:
            return True
        kind_p, type_p = self.relation_info[proven]
        kind_w, type_w = self.relation_info[wanted]
        return kind_p == kind_w == "type" and self.signature.subsumes(type_w, type_p)

    def seed(self, root, trail=None):
        """Initial goals for a query whose structure is rooted at ``root``."""
        root = deref(root)
        if self.naive:
            return [Goal(f"{root.type}_type", root)]
        _, goals = compute_rhs(
            self.classification, self.signature, root,
            trail=trail, at_root="step2", expandable=self.expandable,
        )
        return prune(goals)

    def all_clauses(self):
        for rel in self.clauses:
            yield from self.clauses[rel]


# ---------------------------------------------------------------------------
# inheritance and right-hand sides
# ---------------------------------------------------------------------------


def inherit(grammar, t):
    """Conjunction of ``t`` with every constraint whose antecedent subsumes it.

    Ordered top-down through the hierarchy, then by declaration order.
    Variables are qualified by antecedent so each constraint keeps its
    own scope.
    """
    sig = grammar.signature
    sig.check(t)
    applicable = [c for c in grammar.constraints if sig.subsumes(c.antecedent, t)]
    index = {name: i for i, name in enumerate(sig.types)}
    applicable.sort(key=lambda c: (sig.depth[c.antecedent], index[c.antecedent]))
    result = TypeLit(t)
    for c in applicable:
        result = Conj(result, rename_variables(c.consequent, f"{c.antecedent}."))
    return result


def expandable_hiding(sig, cls):
    """Hiding types whose hiding subtypes all share their hiding features.

    Nodes of these types are walked through instead of becoming goals.
    """
    result = set()
    for t in cls.hiding:
        hf = cls.hiding_features[t]
        if all(cls.hiding_features[s] == hf for s in sig.subtypes(t) if s in cls.hiding):
            result.add(t)
    return frozenset(result)


def compute_rhs(cls, sig, fs, trail=None, at_root="step1", expandable=None):
    """Fill hiding features and collect the goals a clause body needs.

    Starts with step 1 on the root (the clause-head case) or, with
    ``at_root="step2"``, classifies the root itself the way a query is
    seeded.  Each node is visited once; goals come out in visit order.
    """
    if expandable is None:
        expandable = expandable_hiding(sig, cls)
    goals = []
    visited = set()

    def step1(n):
        hf = cls.hiding_features.get(n.type, frozenset())
        fstruct.fill_approp(sig, n, [f for f in sig.features(n.type) if f in hf], trail)
        for f in sig.ordered_features(n.type):
            if f in hf:
                step2(n.arcs[f])

    def step2(n):
        n = deref(n)
        if n.id in visited:
            return
        visited.add(n.id)
        t = n.type
        if t in cls.constrained:
            goals.append(Goal(t, n))
        elif t in cls.hiding:
            if t in expandable:
                step1(n)
            else:
                goals.append(Goal(t, n))

    root = deref(fs)
    if at_root == "step2":
        step2(root)
    else:
        visited.add(root.id)
        step1(root)
    return root, goals


def prune(goals, fs=None):
    """Drop goals whose node lies strictly below another kept goal's node."""
    reach = {}

    def below(g):
        key = deref(g.node).id
        if key not in reach:
            reach[key] = fstruct.reachable_from(g.node)
        return reach[key]

    kept = []
    for g in goals:
        nid = deref(g.node).id
        if any(nid in below(k) for k in kept):
            continue
        kept.append(g)
    return [
        g for g in kept
        if not any(k is not g and deref(g.node).id in below(k) for k in kept)
    ]


# ---------------------------------------------------------------------------
# optimised back end
# ---------------------------------------------------------------------------


def _clause_from_root(cls, sig, relation, root, expandable):
    root, goals = compute_rhs(cls, sig, root, expandable=expandable)
    body = []
    for g in prune(goals):
        if all(not (g.relation == b.relation and deref(g.node) is deref(b.node)) for b in body):
            body.append(g)
    return Clause(relation, root, tuple(body))


def compile_type(grammar, cls, t, expandable=None):
    """Clauses defining the minimal type ``t``."""
    sig = grammar.signature
    if expandable is None:
        expandable = expandable_hiding(sig, cls)
    if t in cls.constrained:
        clauses = []
        for i, d in enumerate(to_dnf(inherit(grammar, t))):
            root = Node(TOP)
            if not apply_description(sig, root, d, {}):
                log.warning("dropping inconsistent disjunct %d of %s", i + 1, t)
                continue
            clauses.append(_clause_from_root(cls, sig, t, deref(root), expandable))
        if not clauses:
            raise InconsistentConstraint(f"every disjunct of the constraints on {t} is inconsistent")
        return clauses
    if t in cls.hiding:
        return [_clause_from_root(cls, sig, t, Node(t), expandable)]
    return [Clause(t, Node(t))]


def compile_program(grammar):
    sig = grammar.signature
    cls = classify(grammar)
    expandable = expandable_hiding(sig, cls)
    program = Program(sig, cls, expandable=expandable)
    for t in sig.types:
        program.relation_info[t] = ("type", t)
        if sig.is_minimal(t):
            program.clauses[t] = compile_type(grammar, cls, t, expandable)
        else:
            program.dispatch[t] = sig.minimal_subtypes(t)
    return program


# ---------------------------------------------------------------------------
# naive back end
# ---------------------------------------------------------------------------


def _tree_parent(sig, t):
    supers = sig.immediate_supertypes[t]
    return supers[0] if supers else None


def compile_naive(grammar):
    """The tripartite ``_cons`` / ``_hier`` / ``_type`` encoding.

    Multiple inheritance is handled by walking the hierarchy along each
    type's first supertype and calling the ``_cons`` relations of the
    remaining ancestors from the ``_hier`` clause of the type itself.
    """
    sig = grammar.signature
    program = Program(sig, classify(grammar), naive=True)
    for t in sig.types:
        for kind in ("cons", "hier", "type"):
            program.relation_info[f"{t}_{kind}"] = (kind, t)

    for t in sig.types:
        program.clauses[f"{t}_cons"] = _naive_cons(grammar, t)

    for t in sig.types:
        children = _reorder(
            [s for s in sig.immediate_subtypes[t] if _tree_parent(sig, s) == t],
            sig.type_order,
        )
        parent = _tree_parent(sig, t)
        extra = []
        if parent is not None:
            extra = [u for u in sig.ancestors(t) if not sig.subsumes(u, parent)]
        clauses = []
        rel = f"{t}_hier"
        if children:
            for c in children:
                head = Node(t)
                body = [Goal(f"{c}_hier", head), Goal(f"{t}_cons", head)]
                body += [Goal(f"{u}_cons", head) for u in extra]
                clauses.append(Clause(rel, head, tuple(body), counts_depth=False))
        elif sig.is_minimal(t):
            head = Node(t)
            body = [Goal(f"{t}_cons", head)] + [Goal(f"{u}_cons", head) for u in extra]
            clauses.append(Clause(rel, head, tuple(body), counts_depth=False))
        program.clauses[rel] = clauses

        head = Node(t)
        program.clauses[f"{t}_type"] = [
            Clause(f"{t}_type", head, (Goal(f"{TOP}_hier", head),), counts_depth=False)
        ]
    return program


def _naive_cons(grammar, t):
    sig = grammar.signature
    own = [f for f in sig.features(t) if sig.introducer[f] == t]
    constraint = grammar.constraint_for(t)
    if constraint is None:
        disjuncts = [None]
    else:
        disjuncts = to_dnf(rename_variables(constraint.consequent, f"{t}."))
    clauses = []
    for d in disjuncts:
        root = Node(t)
        if d is not None and not apply_description(sig, root, d, {}):
            log.warning("dropping inconsistent disjunct of %s", t)
            continue
        root = fstruct.fill_approp(sig, root, own)
        body, seen = [], set()
        for f in sig.ordered_features(root.type):
            if f in root.arcs:
                n = deref(root.arcs[f])
                if n.id not in seen:
                    seen.add(n.id)
                    body.append(Goal(f"{n.type}_type", n))
        clauses.append(Clause(f"{t}_cons", root, tuple(body)))
    if not clauses:
        raise InconsistentConstraint(f"every disjunct of the constraint on {t} is inconsistent")
    return clauses


# ---------------------------------------------------------------------------
# listing
# ---------------------------------------------------------------------------


def format_clause(sig, clause, suppress=()):
    head = deref(clause.head)
    text, tags = fstruct.render(sig, head, suppress=suppress, tagged=[g.node for g in clause.body],
                               bracket_root=False)
    if not clause.body:
        return f"{clause.relation}({text})."
    goals = []
    for g in clause.body:
        n = deref(g.node)
        goals.append(f"{g.relation}(#{tags[n.id]})" if n.id in tags else f"{g.relation}(?)")
    return f"{clause.relation}({text}) :- {', '.join(goals)}."


def format_program(program, suppress=()):
    sig = program.signature
    lines = []
    for rel, clauses in program.clauses.items():
        for c in clauses:
            lines.append(format_clause(sig, c, suppress))
    for rel, alts in program.dispatch.items():
        lines.append(f"{rel} -> {' ; '.join(alts)}.")
    return "\n".join(lines) + "\n"
