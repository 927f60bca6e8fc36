"""Closed-world type hierarchies with appropriateness conditions."""

from collections import defaultdict

from .errors import (
    CycleInHierarchy,
    FeatureIntroductionViolation,
    MissingRoot,
    NonMonotonicApprop,
    NonUniqueGLB,
    UnknownFeature,
    UnknownType,
)
from .syntax import OrderFeats, OrderTypes, TypeDecl, parse_statements

TOP = "top"


def _reorder(seq, order):
    """Permute the members of ``seq`` named in ``order`` into that order.

    Slots held by unlisted members are left alone.
    """
    if not order:
        return tuple(seq)
    rank = {t: i for i, t in enumerate(order)}
    listed = sorted((t for t in seq if t in rank), key=rank.__getitem__)
    it = iter(listed)
    return tuple(next(it) if t in rank else t for t in seq)


class Signature:
    """A type hierarchy plus appropriateness table.

    Immutable once built.  ``glb`` returns ``None`` for inconsistent pairs.
    Declaration order is kept everywhere and is the default order for
    subtype alternatives and features; ``type_order`` and ``feat_order``
    carry the ``order_types`` / ``order_feats`` directives.
    """

    def __init__(self, decls, type_order=(), feat_order=()):
        subs = {}
        intro_decls = defaultdict(dict)
        positions = {}
        for d in decls:
            positions.setdefault(d.name, d.pos)
            subs.setdefault(d.name, [])
            for s in d.subs:
                if s not in subs[d.name]:
                    subs[d.name].append(s)
                subs.setdefault(s, [])
                positions.setdefault(s, d.pos)
            for f, v in d.intro:
                prev = intro_decls[d.name].get(f)
                if prev is not None and prev != v:
                    raise NonMonotonicApprop(
                        f"feature {f} declared twice on {d.name} ({prev}, {v})", *d.pos
                    )
                intro_decls[d.name][f] = v

        if TOP not in subs:
            raise MissingRoot("the hierarchy has no type named 'top'")
        self.types = tuple(subs)
        self.immediate_subtypes = {t: tuple(s) for t, s in subs.items()}
        supers = {t: [] for t in self.types}
        for t, ss in self.immediate_subtypes.items():
            for s in ss:
                supers[s].append(t)
        self.immediate_supertypes = {t: tuple(s) for t, s in supers.items()}

        self._check_acyclic(positions)
        for t in self.types:
            if t != TOP and not supers[t]:
                raise MissingRoot(f"type {t} has no supertype", *positions[t])

        self._index = {t: i for i, t in enumerate(self.types)}
        self._topo = self._topological_order()
        self.depth = {}
        for t in self._topo:
            ps = self.immediate_supertypes[t]
            self.depth[t] = 1 + max(self.depth[p] for p in ps) if ps else 0
        self._desc = {}
        for t in reversed(self._topo):
            mask = 1 << self._index[t]
            for s in self.immediate_subtypes[t]:
                mask |= self._desc[s]
            self._desc[t] = mask
        self._glb = self._build_meets()

        for t in tuple(type_order):
            self.check(t)
        self.type_order = tuple(type_order)
        self.feat_order = []
        for t, feats in feat_order:
            self.check(t)
            self.feat_order.append((t, tuple(feats)))
        self.feat_order = tuple(self.feat_order)

        self._build_approp(intro_decls, positions)
        self._minimal_cache = {}
        self._ordered_feats_cache = {}

    # construction helpers

    def _check_acyclic(self, positions):
        WHITE, GREY, BLACK = 0, 1, 2
        colour = dict.fromkeys(self.types, WHITE)
        for start in self.types:
            if colour[start] != WHITE:
                continue
            stack = [(start, iter(self.immediate_subtypes[start]))]
            colour[start] = GREY
            while stack:
                t, children = stack[-1]
                for s in children:
                    if colour[s] == GREY:
                        raise CycleInHierarchy(
                            f"cycle in type hierarchy through {t} and {s}", *positions[s]
                        )
                    if colour[s] == WHITE:
                        colour[s] = GREY
                        stack.append((s, iter(self.immediate_subtypes[s])))
                        break
                else:
                    colour[t] = BLACK
                    stack.pop()

    def _topological_order(self):
        remaining = {t: len(self.immediate_supertypes[t]) for t in self.types}
        order = []
        ready = [t for t in self.types if remaining[t] == 0]
        while ready:
            t = ready.pop(0)
            order.append(t)
            for s in self.immediate_subtypes[t]:
                remaining[s] -= 1
                if remaining[s] == 0:
                    ready.append(s)
        return order

    def _build_meets(self):
        by_mask = {mask: t for t, mask in self._desc.items()}
        table = {}
        for i, t1 in enumerate(self.types):
            for t2 in self.types[i:]:
                common = self._desc[t1] & self._desc[t2]
                if not common:
                    continue
                g = by_mask.get(common)
                if g is None:
                    members = self._members(common)
                    maximal = [
                        m for m in members
                        if not any(o != m and self.subsumes(o, m) for o in members)
                    ]
                    raise NonUniqueGLB(t1, t2, maximal)
                table[t1, t2] = table[t2, t1] = g
        return table

    def _members(self, mask):
        return [t for t in self.types if mask >> self._index[t] & 1]

    def _build_approp(self, intro_decls, positions):
        declarers = defaultdict(list)
        self.features_in_order = []
        for t in self.types:
            for f, v in intro_decls.get(t, {}).items():
                self.check(v)
                declarers[f].append(t)
        # global feature order: first appearance in the source
        seen = set()
        for t in intro_decls:
            for f in intro_decls[t]:
                if f not in seen:
                    seen.add(f)
                    self.features_in_order.append(f)
        self.features_in_order = tuple(self.features_in_order)

        self.introducer = {}
        for f, ds in declarers.items():
            tops = [d for d in ds if not any(o != d and self.subsumes(o, d) for o in ds)]
            if len(tops) != 1 or not all(self.subsumes(tops[0], d) for d in ds):
                raise FeatureIntroductionViolation(
                    f"feature {f} has no unique introducing type "
                    f"(declared on {', '.join(ds)})", *positions[ds[0]]
                )
            self.introducer[f] = tops[0]
            for d in ds:
                for o in ds:
                    if o != d and self.subsumes(o, d):
                        vo, vd = intro_decls[o][f], intro_decls[d][f]
                        if not self.subsumes(vo, vd):
                            raise NonMonotonicApprop(
                                f"{d} restricts {f} to {vd}, which is not subsumed "
                                f"by {vo} declared on {o}", *positions[d]
                            )

        self._approp = {}
        for f, intro in self.introducer.items():
            for t in self._members(self._desc[intro]):
                value = None
                for d in declarers[f]:
                    if self.subsumes(d, t):
                        v = intro_decls[d][f]
                        value = v if value is None else self.glb(value, v)
                        if value is None:
                            raise NonMonotonicApprop(
                                f"inherited restrictions on {f} are inconsistent at {t}",
                                *positions[t],
                            )
                self._approp[t, f] = value
        self._features = {
            t: tuple(f for f in self.features_in_order if (t, f) in self._approp)
            for t in self.types
        }

    # queries

    def check(self, t):
        if t not in self._index:
            raise UnknownType(f"unknown type {t!r}")
        return t

    def __contains__(self, t):
        return t in self._index

    def subsumes(self, t1, t2):
        """True iff ``t1`` is ``t2`` or a supertype of it."""
        self.check(t1)
        self.check(t2)
        return bool(self._desc[t1] >> self._index[t2] & 1)

    def glb(self, t1, t2):
        """Greatest common subtype of ``t1`` and ``t2``, or ``None``."""
        if t1 == t2:
            return self.check(t1)
        try:
            return self._glb[t1, t2]
        except KeyError:
            self.check(t1)
            self.check(t2)
            return None

    def interact(self, t1, t2):
        return self.glb(t1, t2) is not None

    def subtypes(self, t):
        """Strict subtypes of ``t`` in declaration order."""
        return tuple(s for s in self._members(self._desc[self.check(t)]) if s != t)

    def ancestors(self, t):
        """Strict supertypes of ``t`` in declaration order."""
        self.check(t)
        return tuple(s for s in self.types if s != t and self.subsumes(s, t))

    def is_minimal(self, t):
        return not self.immediate_subtypes[self.check(t)]

    def minimal_subtypes(self, t):
        """Leaf types below ``t`` in depth-first declaration order.

        ``order_types`` reorders sibling subtypes and then the leaves.
        """
        self.check(t)
        cached = self._minimal_cache.get(t)
        if cached is not None:
            return cached
        leaves, seen = [], set()
        stack = [t]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            children = _reorder(self.immediate_subtypes[u], self.type_order)
            if not children:
                leaves.append(u)
            stack.extend(reversed(children))
        result = _reorder(leaves, self.type_order)
        self._minimal_cache[t] = result
        return result

    def approp(self, t, f):
        """Value restriction of ``f`` on ``t``, or ``None`` if inappropriate."""
        return self._approp.get((t, f))

    def has_feature(self, f):
        return f in self.introducer

    def check_feature(self, f):
        if f not in self.introducer:
            raise UnknownFeature(f"unknown feature {f!r}")
        return f

    def features(self, t):
        """Appropriate features of ``t`` in declaration order."""
        return self._features[self.check(t)]

    def ordered_features(self, t):
        """Appropriate features of ``t`` in expansion order.

        The most specific ``order_feats`` directive whose type subsumes
        ``t`` puts its features first; the rest follow in declaration order.
        """
        cached = self._ordered_feats_cache.get(t)
        if cached is not None:
            return cached
        feats = self.features(t)
        best = None
        for dt, order in self.feat_order:
            if self.subsumes(dt, t) and (best is None or self.subsumes(best[0], dt)):
                best = (dt, order)
        if best is not None:
            first = [f for f in best[1] if f in feats]
            feats = tuple(first) + tuple(f for f in feats if f not in first)
        self._ordered_feats_cache[t] = feats
        return feats

    def __repr__(self):
        return f"<Signature {len(self.types)} types, {len(self.introducer)} features>"


def signature_from_statements(statements):
    decls = [s for s in statements if isinstance(s, TypeDecl)]
    type_order = []
    feat_order = []
    for s in statements:
        if isinstance(s, OrderTypes):
            type_order.extend(s.names)
        elif isinstance(s, OrderFeats):
            feat_order.append((s.type, s.feats))
    return Signature(decls, type_order, feat_order)


def load_signature(source):
    """Build a signature from grammar text; constraint statements are ignored."""
    return signature_from_statements(parse_statements(source))
