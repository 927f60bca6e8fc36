"""Depth-first, left-to-right resolution over compiled programs.

The resolver keeps a list of (relation, node) pairs already visited on the
current derivation.  A goal whose node was visited for the same or a more
specific relation succeeds at once; this stops repeated work and lets
cyclic queries terminate.  The check is coinductive: a node may justify
itself through a cycle, and a visited node is not re-checked if it is
further instantiated later.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field

from . import fstruct
from .compiler import Goal
from .descriptions import apply_description, desugar, to_dnf
from .fstruct import Node, deref

log = logging.getLogger(__name__)


@dataclass
class Stats:
    goals: int = 0            # goals taken off the goal stack
    visited_hits: int = 0     # goals discharged by the visited list
    attempts: int = 0         # clause heads tried
    resolutions: int = 0      # clause heads that unified
    per_node: Counter = field(default_factory=Counter)  # (relation, node id) -> resolutions


@dataclass(frozen=True)
class Solution:
    fs: Node
    disjunct: int = 0


class _Pending:
    """Immutable goal-stack cell."""

    __slots__ = ("relation", "node", "depth", "rest")

    def __init__(self, relation, node, depth, rest):
        self.relation = relation
        self.node = node
        self.depth = depth
        self.rest = rest


_FAIL = object()


class _Choice:
    __slots__ = ("trail_mark", "visited_mark", "goal", "alternatives", "index")

    def __init__(self, trail_mark, visited_mark, goal, alternatives):
        self.trail_mark = trail_mark
        self.visited_mark = visited_mark
        self.goal = goal
        self.alternatives = alternatives
        self.index = 0


class Resolver:
    """One resolution session over a program.

    ``depth_bound`` limits the number of depth-counting clause resolutions
    on the chain of ancestors of a goal.  Alternatives cut off by the bound
    fail and set ``depth_exceeded``.  With ``trace=True`` every clause
    attempt is logged to ``trace`` as ``(relation, clause index, node id)``.
    """

    def __init__(self, program, depth_bound=None, trace=False):
        self.program = program
        self.sig = program.signature
        self.depth_bound = depth_bound
        self.depth_exceeded = False
        self.stats = Stats()
        self.trace = [] if trace else None
        self.trail = []
        self.visited = []

    # public

    def solve(self, goals):
        """Yield once per derivation of ``goals``; the graph is instantiated
        while the consumer runs and restored when the generator finishes."""
        base = len(self.trail)
        visited_base = len(self.visited)
        stack = None
        for g in reversed(goals):
            stack = _Pending(g.relation, g.node, 0, stack)
        try:
            yield from self._run(stack)
        finally:
            fstruct.undo(self.trail, base)
            del self.visited[visited_base:]

    # internals

    def _covered(self, relation, node):
        covers = self.program.covers
        for rel, n in self.visited:
            if deref(n) is node and covers(rel, relation):
                return True
        return False

    def _alternatives(self, relation, node):
        program = self.program
        alts = program.dispatch.get(relation)
        if alts is not None:
            return [("goal", m) for m in alts if self.sig.glb(node.type, m) is not None]
        return [
            ("clause", i, c)
            for i, c in enumerate(program.clauses.get(relation, ()))
            if self.sig.glb(node.type, c.head_type) is not None
        ]

    def _try(self, choice, choices):
        goal = choice.goal
        node = deref(goal.node)
        while choice.index < len(choice.alternatives):
            alt = choice.alternatives[choice.index]
            choice.index += 1
            fstruct.undo(self.trail, choice.trail_mark)
            del self.visited[choice.visited_mark:]
            if alt[0] == "goal":
                result = _Pending(alt[1], node, goal.depth, goal.rest)
            else:
                result = self._resolve(goal, node, alt[1], alt[2])
                if result is _FAIL:
                    continue
            if choice.index < len(choice.alternatives):
                choices.append(choice)
            return result
        fstruct.undo(self.trail, choice.trail_mark)
        del self.visited[choice.visited_mark:]
        return _FAIL

    def _resolve(self, goal, node, index, clause):
        depth = goal.depth + 1 if clause.counts_depth else goal.depth
        if self.depth_bound is not None and depth > self.depth_bound:
            self.depth_exceeded = True
            return _FAIL
        self.stats.attempts += 1
        if self.trace is not None:
            self.trace.append((goal.relation, index, node.id))
        memo = {}
        head = fstruct.copy(clause.head, memo)
        if not fstruct.unify_nodes(self.sig, node, head, self.trail):
            return _FAIL
        self.stats.resolutions += 1
        self.stats.per_node[goal.relation, node.id] += 1
        self.visited.append((goal.relation, node))
        rest = goal.rest
        for b in reversed(clause.body):
            rest = _Pending(b.relation, memo[deref(b.node).id], depth, rest)
        return rest

    def _run(self, stack):
        choices = []
        failed = _FAIL
        while True:
            if stack is None:
                yield
                stack = failed
            elif stack is not failed:
                node = deref(stack.node)
                self.stats.goals += 1
                if self._covered(stack.relation, node):
                    self.stats.visited_hits += 1
                    stack = stack.rest
                    continue
                choice = _Choice(
                    len(self.trail), len(self.visited), stack,
                    self._alternatives(stack.relation, node),
                )
                stack = self._try(choice, choices)
                continue
            # backtrack
            while choices:
                nxt = self._try(choices.pop(), choices)
                if nxt is not _FAIL:
                    stack = nxt
                    break
            else:
                return


class SolutionStream:
    """Lazy stream of solutions to a query.

    Iterating yields ``Solution`` objects holding copies of the solved
    query structure.  After exhaustion ``depth_exceeded`` tells whether
    the depth bound cut off any part of the search (the stream is then
    incomplete rather than a plain failure).
    """

    def __init__(self, program, description, depth_bound=None, max_solutions=None, trace=False):
        self.program = program
        self.description = description
        self.max_solutions = max_solutions
        self.resolver = Resolver(program, depth_bound=depth_bound, trace=trace)
        self.count = 0
        self.exhausted = False
        self.roots = []
        self._it = self._generate()

    @property
    def depth_exceeded(self):
        return self.resolver.depth_exceeded

    @property
    def stats(self):
        return self.resolver.stats

    @property
    def status(self):
        """"open" while solutions may remain, then "exhausted", or
        "depth-limit" when the bound cut some derivation off."""
        if not self.exhausted:
            return "open"
        return "depth-limit" if self.depth_exceeded else "exhausted"

    @property
    def trace(self):
        return self.resolver.trace

    def __iter__(self):
        return self

    def __next__(self):
        return next(self._it)

    def _generate(self):
        sig = self.program.signature
        resolver = self.resolver
        for i, d in enumerate(to_dnf(desugar(self.description))):
            if self.max_solutions is not None and self.count >= self.max_solutions:
                return
            root = Node("top")
            if not apply_description(sig, root, d, {}):
                continue
            root = deref(root)
            mark = len(resolver.trail)
            self.roots.append(root)
            goals = self.program.seed(root, resolver.trail)
            try:
                for _ in resolver.solve(goals):
                    self.count += 1
                    yield Solution(fstruct.copy(root), i)
                    if self.max_solutions is not None and self.count >= self.max_solutions:
                        return
            finally:
                fstruct.undo(resolver.trail, mark)
        self.exhausted = True
        if resolver.depth_exceeded:
            log.warning("depth bound %s reached; solutions may be missing", resolver.depth_bound)


def query(program, description, depth_bound=None, max_solutions=None, trace=False):
    """Solve a parsed query description against ``program``.

    Returns a ``SolutionStream``; nothing is computed until it is iterated.
    """
    return SolutionStream(program, description, depth_bound, max_solutions, trace)


def solve(program, goals, depth_bound=None):
    """Yield a copy of each goal node tuple per derivation of ``goals``."""
    resolver = Resolver(program, depth_bound=depth_bound)
    for _ in resolver.solve(goals):
        yield tuple(fstruct.copy(g.node) for g in goals)
