from hypothesis import given, settings, strategies as st

from hpsgcomp import Goal, parse_query, query, solve
from hpsgcomp.descriptions import desc_to_fs, desugar, to_dnf
from hpsgcomp.fstruct import Node, canonical, path, print_avm
from oracles import list_items, reference_append

CONSTANTS = ["a", "b", "c", "d"]


def run(b, text, program=None, **kw):
    stream = query(program or b.program, parse_query(b.sig, text), **kw)
    return stream, [s.fs for s in stream]


def as_list(items):
    return "[" + ",".join(items) + "]"


def test_append_two_and_one(append_c):
    stream, sols = run(append_c, "append_c, arg1:[a,b], arg2:[c]")
    assert len(sols) == 1
    assert list_items(path(sols[0], "arg3")) == reference_append(["a", "b"], ["c"])
    assert stream.status == "exhausted"


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(CONSTANTS), max_size=4), st.lists(st.sampled_from(CONSTANTS), max_size=4))
def test_append_matches_reference(xs, ys):
    from conftest import bundle
    b = bundle("append_c")
    _, sols = run(b, f"append_c, arg1:{as_list(xs)}, arg2:{as_list(ys)}")
    assert [list_items(path(s, "arg3")) for s in sols] == [reference_append(xs, ys)]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(CONSTANTS), max_size=5))
def test_split_enumerates_every_prefix(zs):
    from conftest import bundle
    b = bundle("append_c")
    _, sols = run(b, f"append_c, arg3:{as_list(zs)}")
    splits = [(list_items(path(s, "arg1")), list_items(path(s, "arg2"))) for s in sols]
    assert splits == [(zs[:i], zs[i:]) for i in range(len(zs) + 1)]


def test_simple_query_succeeds_once(append_c):
    stream, sols = run(append_c, "constant")
    assert [canonical(append_c.sig, s) for s in sols] == ["[constant]"]
    assert stream.stats.goals == 0


def test_cyclic_list(append_c):
    for program in (append_c.program, append_c.naive):
        stream, sols = run(append_c, "X=(ne_list, hd:a, tl:X)", program)
        assert len(sols) == 1
        assert print_avm(append_c.sig, sols[0]) == "#1=[a|#1]"
        assert stream.status == "exhausted"
        type_level = {k: n for k, n in stream.stats.per_node.items()
                      if program.relation_info[k[0]][0] == "type"}
        assert all(n <= 1 for n in type_level.values())


def test_cyclic_list_as_goal(append_c):
    from hpsgcomp.interpreter import Resolver
    x = desc_to_fs(append_c.sig, desugar(parse_query(append_c.sig, "X=(ne_list, hd:a, tl:X)")))
    r = Resolver(append_c.program)
    assert sum(1 for _ in r.solve([Goal("list", x)])) == 1
    assert r.stats.per_node[("ne_list", x.id)] == 1
    assert r.stats.visited_hits == 1


def test_unbounded_chain_hits_depth_bound(ab):
    stream, sols = run(ab, "b", depth_bound=4)
    assert sols == []
    assert stream.depth_exceeded and stream.status == "depth-limit"


def test_cyclic_seed_uses_visited_list(ab):
    stream, sols = run(ab, "X=(c, f:X, g:X)")
    assert len(sols) == 1 and stream.status == "exhausted"
    assert stream.stats.visited_hits >= 1
    assert print_avm(ab.sig, sols[0]) == "#1=[c F:#1 G:#1]"


def test_failure_is_not_depth_limit(append_c):
    stream, sols = run(append_c, "append_c, arg1:[a], arg3:[b]")
    assert sols == [] and stream.status == "exhausted"


def test_depth_bound_is_tight(append_c):
    text = "append_c, arg1:[a,b,c], arg2:[d]"
    bound = 1
    while True:
        stream, sols = run(append_c, text, depth_bound=bound)
        if sols:
            break
        assert stream.status == "depth-limit"
        bound += 1
    assert bound > 3
    stream, sols = run(append_c, text, depth_bound=bound - 1)
    assert sols == [] and stream.depth_exceeded


def test_query_structure_restored(append_c):
    d = parse_query(append_c.sig, "append_c, arg3:[a,b]")
    stream = query(append_c.program, d)
    assert len(list(stream)) == 3
    (root,) = stream.roots
    fresh = desc_to_fs(append_c.sig, to_dnf(desugar(d))[0])
    assert canonical(append_c.sig, root) == canonical(append_c.sig, fresh)


def test_solution_order_is_stable(appendix_a):
    first = [canonical(appendix_a.sig, s) for s in run(appendix_a, "word")[1]]
    second = [canonical(appendix_a.sig, s) for s in run(appendix_a, "word")[1]]
    assert first == second and len(first) == 10


def test_query_disjuncts_in_order(appendix_a):
    _, sols = run(appendix_a, "word, phon:[(runs ; john)]")
    assert [list_items(path(s, "phon")) for s in sols] == [["runs"], ["john"]]


def test_max_solutions(append_c):
    stream, sols = run(append_c, "append_c, arg3:[a,b,c]", max_solutions=2)
    assert len(sols) == 2 and stream.status == "open"


def test_trace_records_attempts(append_c):
    stream = query(append_c.program, parse_query(append_c.sig, "append_c, arg1:[], arg2:[a]"), trace=True)
    list(stream)
    assert stream.trace[0][:2] == ("append_c", 0)


def test_solve_goals_directly(append_c):
    n = Node("list")
    results = []
    for (fs,) in solve(append_c.program, [Goal("list", n)], depth_bound=3):
        results.append(canonical(append_c.sig, fs))
        if len(results) == 3:
            break
    assert results[0] == "[e_list]"
    assert results[1].startswith("[ne_list")
    # the goal node is restored after the generator closes
    assert n.type == "list" and not n.arcs
