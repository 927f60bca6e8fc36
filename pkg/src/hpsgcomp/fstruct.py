"""Typed feature structures as mutable, possibly cyclic graphs.

A feature structure is represented by its root ``Node``.  Nodes are merged
by unification through forwarding pointers (``ref``); always ``deref`` a
node before looking at it.  Destructive operations accept an optional
``trail`` list; every change they make is recorded there so that
``undo(trail, mark)`` restores the exact previous state.  There is no
occurs check: cyclic graphs are ordinary values.
"""

import itertools
from collections import Counter

from .errors import FeatureNotAppropriate

_ids = itertools.count(1)

LIST_TYPES = ("list", "e_list", "ne_list")
HEAD, TAIL = "hd", "tl"


class Node:
    __slots__ = ("type", "arcs", "ref", "id")

    def __init__(self, type, arcs=None):
        self.type = type
        self.arcs = {} if arcs is None else arcs
        self.ref = None
        self.id = next(_ids)

    def __repr__(self):
        n = deref(self)
        return f"<Node {n.id} {n.type} {sorted(n.arcs)}>"


def deref(n):
    while n.ref is not None:
        n = n.ref
    return n


def walk(root):
    """Yield each distinct node reachable from ``root`` once (depth first)."""
    root = deref(root)
    seen = {root.id}
    stack = [root]
    while stack:
        n = stack.pop()
        yield n
        for v in reversed(list(n.arcs.values())):
            v = deref(v)
            if v.id not in seen:
                seen.add(v.id)
                stack.append(v)


def path(root, *feats):
    """Follow a feature path; returns ``None`` if some arc is missing."""
    n = deref(root)
    for f in feats:
        nxt = n.arcs.get(f)
        if nxt is None:
            return None
        n = deref(nxt)
    return n


def reachable_from(n):
    """Ids of nodes reachable from ``n`` through at least one arc."""
    n = deref(n)
    seen = set()
    stack = [deref(v) for v in n.arcs.values()]
    while stack:
        m = stack.pop()
        if m.id in seen:
            continue
        seen.add(m.id)
        stack.extend(deref(v) for v in m.arcs.values())
    return seen


# ---------------------------------------------------------------------------
# trail
# ---------------------------------------------------------------------------


def undo(trail, mark):
    while len(trail) > mark:
        entry = trail.pop()
        kind, node = entry[0], entry[1]
        if kind == "ref":
            node.ref = None
        elif kind == "type":
            node.type = entry[2]
        else:
            del node.arcs[entry[2]]


def _set_type(n, t, trail):
    if trail is not None:
        trail.append(("type", n, n.type))
    n.type = t


def _add_arc(n, f, v, trail):
    if trail is not None:
        trail.append(("arc", n, f))
    n.arcs[f] = v


def _forward(n, target, trail):
    if trail is not None:
        trail.append(("ref", n))
    n.ref = target


# ---------------------------------------------------------------------------
# destructive operations
# ---------------------------------------------------------------------------


def unify_nodes(sig, a, b, trail=None):
    """Destructively unify ``a`` and ``b``; the result lives at ``deref(a)``.

    Returns False on a type clash, leaving partial changes on the trail
    for the caller to undo.  Arc values are coerced to the appropriateness
    restriction of the merged type.
    """
    pending = [(a, b)]
    coerce = []
    while pending or coerce:
        if pending:
            x, y = pending.pop()
            x, y = deref(x), deref(y)
            if x is y:
                continue
            t = sig.glb(x.type, y.type)
            if t is None:
                return False
            changed = t != x.type or t != y.type
            _forward(y, x, trail)
            if t != x.type:
                _set_type(x, t, trail)
            for f, v in y.arcs.items():
                mine = x.arcs.get(f)
                if mine is None:
                    _add_arc(x, f, v, trail)
                else:
                    pending.append((mine, v))
            if changed:
                for f, v in x.arcs.items():
                    coerce.append((v, sig.approp(t, f)))
        else:
            n, t = coerce.pop()
            n = deref(n)
            g = sig.glb(n.type, t)
            if g is None:
                return False
            if g != n.type:
                _set_type(n, g, trail)
                for f, v in n.arcs.items():
                    coerce.append((v, sig.approp(g, f)))
    return True


def retype(sig, n, t, trail=None):
    """Narrow the type of ``n`` to its meet with ``t``.

    Returns the (dereferenced) node, or ``None`` when the types clash.
    Arc values are narrowed as the new type's appropriateness demands.
    Without a trail a failed retype may leave ``n`` partly changed.
    """
    n = deref(n)
    probe = Node(t)
    mark = len(trail) if trail is not None else 0
    if not unify_nodes(sig, n, probe, trail):
        if trail is not None:
            undo(trail, mark)
        return None
    return deref(n)


def fill_approp(sig, n, feats, trail=None):
    """Add a most general value for each feature in ``feats`` missing on ``n``."""
    n = deref(n)
    for f in feats:
        value = sig.approp(n.type, f)
        if value is None:
            raise FeatureNotAppropriate(f"feature {f} is not appropriate for {n.type}")
        if f not in n.arcs:
            _add_arc(n, f, Node(value), trail)
    return n


def copy(root, memo=None):
    """Copy the graph under ``root`` with fresh node identities.

    ``memo`` maps original node ids to copies and is filled in place, so
    callers can locate the images of particular nodes.
    """
    memo = {} if memo is None else memo
    root = deref(root)
    if root.id in memo:
        return memo[root.id]
    memo[root.id] = Node(root.type)
    stack = [root]
    while stack:
        n = stack.pop()
        image = memo[n.id]
        for f, v in n.arcs.items():
            v = deref(v)
            vi = memo.get(v.id)
            if vi is None:
                vi = memo[v.id] = Node(v.type)
                stack.append(v)
            image.arcs[f] = vi
    return memo[root.id]


def unify(sig, a, b):
    """Non-destructive unification of two feature structures.

    Returns the root of a fresh structure or ``None`` on failure; the
    inputs are never modified.  Sharing between ``a`` and ``b`` is kept.
    """
    memo = {}
    ca = copy(a, memo)
    cb = copy(b, memo)
    if not unify_nodes(sig, ca, cb):
        return None
    return deref(ca)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def well_formedness_errors(sig, root):
    """List appropriateness violations in the structure under ``root``."""
    errors = []
    for n in walk(root):
        if n.type not in sig:
            errors.append(f"node {n.id}: unknown type {n.type}")
            continue
        for f, v in n.arcs.items():
            restriction = sig.approp(n.type, f)
            if restriction is None:
                errors.append(f"node {n.id}: {f} not appropriate for {n.type}")
            elif not sig.subsumes(restriction, deref(v).type):
                errors.append(
                    f"node {n.id}: value of {f} is {deref(v).type}, not within {restriction}"
                )
    return errors


def canonical(sig, root, suppress=()):
    """A string that is equal for two structures iff they are isomorphic."""
    return render(sig, root, suppress=suppress, sugar=False)[0]


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------


def _ordered_arcs(sig, n, suppress):
    order = sig.features(n.type) if n.type in sig else ()
    arcs = [(f, n.arcs[f]) for f in order if f in n.arcs and f not in suppress]
    extra = sorted(f for f in n.arcs if f not in order and f not in suppress)
    arcs.extend((f, n.arcs[f]) for f in extra)
    return arcs


def render(sig, root, suppress=(), tagged=(), sugar=True, bracket_root=True):
    """Render ``root`` as AVM text.

    Returns ``(text, tags)`` where ``tags`` maps node ids to tag numbers.
    Nodes referenced more than once (the root's own external reference
    counts) get a ``#n`` tag, numbered in depth-first first-visit order
    with features in declaration order.  Nodes whose ids are in ``tagged``
    are tagged regardless.  List cells print as ``[a,b|T]`` when ``sugar``.
    A root without features prints as ``[t]`` unless ``bracket_root`` is
    false; the bare form is the one that reads back as the same structure.
    """
    suppress = {f.lower() for f in suppress}
    tagged = {deref(n).id if isinstance(n, Node) else n for n in tagged}
    root = deref(root)

    indegree = Counter({root.id: 1})
    seen = {root.id}
    stack = [root]
    while stack:
        n = stack.pop()
        for _, v in _ordered_arcs(sig, n, suppress):
            v = deref(v)
            indegree[v.id] += 1
            if v.id not in seen:
                seen.add(v.id)
                stack.append(v)
    needs_tag = {i for i, k in indegree.items() if k >= 2} | tagged

    tags = {}
    use_sugar = sugar and all(t in sig for t in LIST_TYPES)

    def is_cell(n):
        if n.type != "ne_list":
            return False
        keys = {f for f, _ in _ordered_arcs(sig, n, suppress)}
        return keys == {HEAD, TAIL}

    def fmt(n, top_level=False):
        n = deref(n)
        if n.id in tags:
            return f"#{tags[n.id]}"
        prefix = ""
        if n.id in needs_tag:
            tags[n.id] = len(tags) + 1
            prefix = f"#{tags[n.id]}="
        if use_sugar and is_cell(n):
            return prefix + fmt_list(n)
        arcs = _ordered_arcs(sig, n, suppress)
        if not arcs and not (top_level and bracket_root):
            return prefix + n.type
        inner = [n.type] + [f"{f.upper()}:{fmt(v)}" for f, v in arcs]
        return prefix + "[" + " ".join(inner) + "]"

    def fmt_list(cell):
        items = []
        while True:
            items.append(fmt(cell.arcs[HEAD]))
            nxt = deref(cell.arcs[TAIL])
            if nxt.id not in needs_tag and nxt.id not in tags and is_cell(nxt):
                cell = nxt
                continue
            break
        if (
            nxt.type == "e_list"
            and nxt.id not in needs_tag
            and not _ordered_arcs(sig, nxt, suppress)
        ):
            return "[" + ",".join(items) + "]"
        return "[" + ",".join(items) + "|" + fmt(nxt) + "]"

    return fmt(root, top_level=True), tags


def print_avm(sig, root, suppress=()):
    """Deterministic AVM text for the structure under ``root``."""
    return render(sig, root, suppress=suppress)[0]
