"""Descriptions: grammar loading, DNF conversion and description-to-structure."""

from dataclasses import dataclass, field

from . import fstruct
from .errors import (
    DisjunctLimitExceeded,
    UnknownFeature,
    UnknownTypeInDescription,
)
from .fstruct import Node, deref
from .signature import Signature, signature_from_statements
from .syntax import (
    Conj,
    ConstraintDecl,
    Disj,
    Feat,
    ListSugar,
    OrderFeats,
    OrderTypes,
    TypeLit,
    Var,
    conj_all,
    parse_description,
    parse_statements,
)

DEFAULT_DISJUNCT_LIMIT = 4096


@dataclass(frozen=True)
class Constraint:
    antecedent: str
    consequent: object


@dataclass
class Grammar:
    signature: Signature
    constraints: list = field(default_factory=list)
    order_types: tuple = ()
    order_feats: dict = field(default_factory=dict)

    def constraint_for(self, t):
        for c in self.constraints:
            if c.antecedent == t:
                return c
        return None

    @property
    def defined_types(self):
        return [c.antecedent for c in self.constraints]


def parse_grammar(source):
    statements = parse_statements(source)
    sig = signature_from_statements(statements)
    order_types = []
    order_feats = {}
    merged = {}
    for s in statements:
        if isinstance(s, OrderTypes):
            order_types.extend(s.names)
        elif isinstance(s, OrderFeats):
            order_feats[s.type] = s.feats
            for f in s.feats:
                if not sig.has_feature(f):
                    raise UnknownFeature(f"unknown feature {f!r}", *s.pos)
        elif isinstance(s, ConstraintDecl):
            if s.antecedent not in sig:
                raise UnknownTypeInDescription(
                    f"constraint on unknown type {s.antecedent!r}", *s.pos
                )
            validate_description(sig, s.consequent)
            merged.setdefault(s.antecedent, []).append(s.consequent)
    constraints = [Constraint(t, conj_all(ds)) for t, ds in merged.items()]
    return Grammar(sig, constraints, tuple(order_types), order_feats)


def load_grammar(path):
    with open(path, encoding="utf-8") as fh:
        return parse_grammar(fh.read())


def validate_description(sig, d):
    """Raise if ``d`` names a type or feature the signature lacks."""
    stack = [d]
    while stack:
        d = stack.pop()
        if isinstance(d, TypeLit):
            if d.name not in sig:
                pos = d.pos or (None, None)
                raise UnknownTypeInDescription(f"unknown type {d.name!r}", *pos)
        elif isinstance(d, Feat):
            if not sig.has_feature(d.feat):
                pos = d.pos or (None, None)
                raise UnknownFeature(f"unknown feature {d.feat!r}", *pos)
            stack.append(d.value)
        elif isinstance(d, (Conj, Disj)):
            stack.extend((d.right, d.left))
        elif isinstance(d, ListSugar):
            stack.extend(d.elements)
            if d.tail is not None:
                stack.append(d.tail)


def parse_query(sig, text):
    d = parse_description(text)
    validate_description(sig, d)
    return d


def desugar(d):
    """Replace list sugar by ``ne_list``/``hd``/``tl`` descriptions."""
    if isinstance(d, ListSugar):
        tail = TypeLit("e_list") if d.tail is None else desugar(d.tail)
        for element in reversed(d.elements):
            tail = conj_all(
                [TypeLit("ne_list"), Feat("hd", desugar(element)), Feat("tl", tail)]
            )
        return tail
    if isinstance(d, Feat):
        return Feat(d.feat, desugar(d.value), d.pos)
    if isinstance(d, Conj):
        return Conj(desugar(d.left), desugar(d.right))
    if isinstance(d, Disj):
        return Disj(desugar(d.left), desugar(d.right))
    return d


def to_dnf(d, limit=DEFAULT_DISJUNCT_LIMIT):
    """Disjunction-free descriptions whose disjunction is equivalent to ``d``.

    Disjuncts come out in source order, distributing left to right.
    """

    def go(d):
        if isinstance(d, Disj):
            result = go(d.left) + go(d.right)
        elif isinstance(d, Conj):
            result = [Conj(x, y) for x in go(d.left) for y in go(d.right)]
        elif isinstance(d, Feat):
            result = [Feat(d.feat, x, d.pos) for x in go(d.value)]
        elif isinstance(d, ListSugar):
            return go(desugar(d))
        else:
            result = [d]
        if len(result) > limit:
            raise DisjunctLimitExceeded(
                f"description expands to more than {limit} disjuncts"
            )
        return result

    return go(d)


def rename_variables(d, prefix):
    """Qualify every variable in ``d`` so distinct scopes cannot collide."""
    if isinstance(d, Var):
        return Var(f"{prefix}{d.name}")
    if isinstance(d, Feat):
        return Feat(d.feat, rename_variables(d.value, prefix), d.pos)
    if isinstance(d, Conj):
        return Conj(rename_variables(d.left, prefix), rename_variables(d.right, prefix))
    if isinstance(d, Disj):
        return Disj(rename_variables(d.left, prefix), rename_variables(d.right, prefix))
    if isinstance(d, ListSugar):
        tail = None if d.tail is None else rename_variables(d.tail, prefix)
        return ListSugar(tuple(rename_variables(e, prefix) for e in d.elements), tail)
    return d


def _attach(sig, node, f, trail):
    node = deref(node)
    if sig.approp(node.type, f) is None:
        intro = sig.introducer.get(f)
        if intro is None:
            raise UnknownFeature(f"unknown feature {f!r}")
        node = fstruct.retype(sig, node, intro, trail)
        if node is None:
            return None
    child = node.arcs.get(f)
    if child is None:
        child = Node(sig.approp(node.type, f))
        fstruct._add_arc(node, f, child, trail)
    return child


def apply_description(sig, node, d, env, trail=None):
    """Destructively make ``node`` satisfy the conjunctive description ``d``.

    ``env`` maps variable names to nodes and is extended in place.
    Returns False on a clash.
    """
    stack = [(node, d)]
    while stack:
        node, d = stack.pop()
        if isinstance(d, TypeLit):
            if fstruct.retype(sig, node, d.name, trail) is None:
                return False
        elif isinstance(d, Feat):
            child = _attach(sig, node, d.feat, trail)
            if child is None:
                return False
            stack.append((child, d.value))
        elif isinstance(d, Conj):
            stack.append((node, d.right))
            stack.append((node, d.left))
        elif isinstance(d, Var):
            bound = env.get(d.name)
            if bound is None:
                env[d.name] = node
            elif not fstruct.unify_nodes(sig, bound, node, trail):
                return False
        elif isinstance(d, ListSugar):
            stack.append((node, desugar(d)))
        else:
            raise ValueError(f"description is not conjunctive: {d!r}")
    return True


def desc_to_fs(sig, d, env=None):
    """Most general structure satisfying the conjunctive description ``d``.

    Returns the root node, or ``None`` when ``d`` is inconsistent.
    """
    root = Node("top")
    env = {} if env is None else env
    if not apply_description(sig, root, d, env):
        return None
    return deref(root)
