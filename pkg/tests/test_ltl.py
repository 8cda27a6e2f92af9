from hypothesis import given, settings, strategies as st

from stratqctl.formulas import FALSE, TRUE, And, Atom, Const, Next, Not, Or, Until, parse
from stratqctl.ltl import exists_path_states, lasso_accepts, ltl_to_buchi, solve_buchi_game

PROPS = ("p", "q")


def evaluate(f, prefix, loop):
    """Truth of ``f`` at position 0 of ``prefix . loop^omega`` by least fixpoints."""
    word = list(prefix) + list(loop)
    n = len(word)
    nxt = [i + 1 if i + 1 < n else len(prefix) for i in range(n)]

    def val(g):
        if isinstance(g, Const):
            return [g.value] * n
        if isinstance(g, Atom):
            return [g.name in word[i] for i in range(n)]
        if isinstance(g, Not):
            return [not v for v in val(g.sub)]
        if isinstance(g, And):
            a, b = val(g.left), val(g.right)
            return [x and y for x, y in zip(a, b)]
        if isinstance(g, Or):
            a, b = val(g.left), val(g.right)
            return [x or y for x, y in zip(a, b)]
        if isinstance(g, Next):
            a = val(g.sub)
            return [a[nxt[i]] for i in range(n)]
        if isinstance(g, Until):
            a, b = val(g.left), val(g.right)
            cur = [False] * n
            for _ in range(n + 1):
                cur = [b[i] or (a[i] and cur[nxt[i]]) for i in range(n)]
            return cur
        raise TypeError(g)

    return val(f)[0]


def ltl_formulas():
    def extend(sub):
        return st.one_of(
            sub.map(Not),
            sub.map(Next),
            st.tuples(sub, sub).map(lambda t: And(*t)),
            st.tuples(sub, sub).map(lambda t: Or(*t)),
            st.tuples(sub, sub).map(lambda t: Until(*t)),
        )

    leaves = st.one_of(st.sampled_from(PROPS).map(Atom), st.sampled_from([TRUE, FALSE]))
    return st.recursive(leaves, extend, max_leaves=8)


letters = st.frozensets(st.sampled_from(PROPS))


@settings(max_examples=400, deadline=None)
@given(ltl_formulas(), st.lists(letters, max_size=3), st.lists(letters, min_size=1, max_size=3))
def test_automaton_matches_lasso_oracle(f, prefix, loop):
    assert lasso_accepts(ltl_to_buchi(f), prefix, loop) == evaluate(f, prefix, loop)


def _path(text):
    return parse("qctl", f"E {text}").sub


def test_next_automaton():
    a = ltl_to_buchi(_path("X p"))
    P, E = frozenset({"p"}), frozenset()
    assert lasso_accepts(a, [E, P], [E])
    assert not lasso_accepts(a, [P, E], [P])
    assert not lasso_accepts(a, [P], [E])


def test_until_automaton():
    a = ltl_to_buchi(_path("p U q"))
    P, Q, E = frozenset({"p"}), frozenset({"q"}), frozenset()
    assert lasso_accepts(a, [Q], [E])
    assert lasso_accepts(a, [P, P], [Q])
    assert not lasso_accepts(a, [P], [P])
    assert not lasso_accepts(a, [E], [Q])


def test_false_until_is_first_letter():
    a = ltl_to_buchi(Until(FALSE, Atom("p")))
    assert lasso_accepts(a, [frozenset({"p"})], [frozenset()])
    assert not lasso_accepts(a, [frozenset()], [frozenset({"p"})])


def test_exists_path_states_globally():
    # s -> t -> t, p everywhere except t: E G p holds nowhere but on a p-loop
    succ = {"s": ["t", "s"], "t": ["t"]}
    labels = {"s": {"p"}, "t": set()}
    a = ltl_to_buchi(_path("G p"))
    hits = exists_path_states(list(succ), lambda q: succ[q], a, lambda q, atom, pos: (atom in labels[q]) == pos)
    assert hits == {"s"}


def test_buchi_game_choice_matters():
    nodes = ["a", "b", "acc"]
    succ = {"a": ["b", "acc"], "b": ["a"], "acc": ["a"]}
    # the Büchi player picks at a: it can always go through acc
    assert solve_buchi_game(nodes, {"a": True, "b": False, "acc": False}, succ, {"acc"}) == set(nodes)
    # the opponent picks at a: it loops through b forever
    assert solve_buchi_game(nodes, {"a": False, "b": False, "acc": False}, succ, {"acc"}) == set()


def test_buchi_game_dead_ends():
    succ = {"x": [], "y": []}
    assert solve_buchi_game(["x", "y"], {"x": True, "y": False}, succ, set()) == {"y"}
