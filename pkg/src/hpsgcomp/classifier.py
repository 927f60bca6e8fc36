"""Static type classification: constrained, hiding and simple types."""

from collections import defaultdict
from dataclasses import dataclass


@dataclass(frozen=True)
class TypeClassification:
    defined: frozenset
    constrained: frozenset
    hiding: frozenset
    simple: frozenset
    hiding_features: dict

    def kind(self, t):
        if t in self.constrained:
            return "constrained"
        if t in self.hiding:
            return "hiding"
        return "simple"

    def needs_check(self, t):
        return t in self.constrained or t in self.hiding


def interact(sig, t1, t2):
    """Two types interact iff they have a common subtype."""
    return sig.glb(t1, t2) is not None


def _hiding_worklist(sig, constrained):
    # value type -> types t0 carrying a feature restricted to it
    carriers = defaultdict(set)
    for t0 in sig.types:
        for f in sig.features(t0):
            carriers[sig.approp(t0, f)].add(t0)
    hiding = set()
    work = list(constrained)
    while work:
        value = work.pop()
        for t0 in carriers.get(value, ()):
            for t in (t0,) + sig.ancestors(t0):
                if t not in constrained and t not in hiding:
                    hiding.add(t)
                    work.append(t)
    return hiding


def _hiding_roundrobin(sig, constrained):
    hiding = set()
    changed = True
    while changed:
        changed = False
        for t in sig.types:
            if t in constrained or t in hiding:
                continue
            below = (t,) + sig.subtypes(t)
            if any(
                sig.approp(t0, f) in constrained or sig.approp(t0, f) in hiding
                for t0 in below
                for f in sig.features(t0)
            ):
                hiding.add(t)
                changed = True
    return hiding


def classify(grammar, strategy="worklist"):
    """Partition the grammar's types and compute hiding features.

    ``strategy`` picks the fixpoint iteration for hiding types
    ("worklist" or "roundrobin"); both compute the same least fixpoint.
    """
    sig = grammar.signature
    defined = frozenset(c.antecedent for c in grammar.constraints)
    constrained = frozenset(
        t for t in sig.types if any(sig.glb(t, d) is not None for d in defined)
    )
    if strategy == "worklist":
        hiding = _hiding_worklist(sig, constrained)
    elif strategy == "roundrobin":
        hiding = _hiding_roundrobin(sig, constrained)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    hiding = frozenset(hiding)
    checked = constrained | hiding
    simple = frozenset(t for t in sig.types if t not in checked)
    hiding_features = {
        t: frozenset(f for f in sig.features(t) if sig.approp(t, f) in checked)
        for t in sig.types
        if t in checked
    }
    return TypeClassification(defined, constrained, hiding, simple, hiding_features)


def format_classification(sig, cls):
    """Text for ``--dump-classes``."""
    lines = [
        "constrained: " + " ".join(sorted(cls.constrained)),
        "hiding: " + " ".join(sorted(cls.hiding)),
        "simple: " + " ".join(sorted(cls.simple)),
        "hiding features:",
    ]
    for t in sorted(cls.hiding_features):
        feats = [f for f in sig.features(t) if f in cls.hiding_features[t]]
        lines.append(f"  {t}: " + " ".join(feats) if feats else f"  {t}:")
    return "\n".join(lines) + "\n"
