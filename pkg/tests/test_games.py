import itertools
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from stratqctl.direct import check_atlsc_direct
from stratqctl.formulas import parse
from stratqctl.games import (Cgs, FiniteMemoryStrategy, GameError, Kripke, StrategyContext, cgs_from_dict,
                             cgs_to_dict, concurrent_cgs, enumerate_strategies, kripke, memoryless_strategy,
                             move_annotated_kripke, next_states, outcome_product, reduce_agents, turn_based_cgs,
                             underlying_kripke, unwind)

from conftest import loop, pennies, random_concurrent, random_turn_based


def test_next_states_pennies(mp):
    assert next_states(mp, "q0", ["a1"], {"a1": "1"}) == {"qW", "qL"}
    assert next_states(mp, "q0", ["a1", "a2"], {"a1": "1", "a2": "2"}) == {"qL"}
    assert next_states(mp, "q0", [], {}) == {"qW", "qL"}


def test_next_states_rejects_unavailable_move():
    g = turn_based_cgs(["s", "t"], ["a1", "a2"], {"s": "a1", "t": "a1"}, {"s": ["t"], "t": ["t"]})
    with pytest.raises(GameError):
        next_states(g, "s", ["a1"], {"a1": "2"})


def test_underlying_kripke_labels():
    g = turn_based_cgs(["s", "t"], ["a1", "a2"], {"s": "a1", "t": "a2"}, {"s": ["t"], "t": ["s"]}, {"s": ["p"]})
    k = underlying_kripke(g)
    assert k.labels["s"] == {"p", "st_s", "turn_a1"}
    assert k.labels["t"] == {"st_t", "turn_a2"}
    assert k.succ["s"] == ("t",)


def test_underlying_kripke_concurrent_has_no_turns(mp):
    k = underlying_kripke(mp)
    assert k.labels["q0"] == {"st_q0"}
    assert set(k.succ["q0"]) == {"qW", "qL"}


def test_underlying_kripke_rejects_reserved_labels():
    g = loop(props=("st_x",))
    with pytest.raises(GameError):
        underlying_kripke(g)


def test_empty_structure_rejected():
    with pytest.raises(GameError):
        Kripke((), {}, {})
    with pytest.raises(GameError):
        Cgs((), ("a1",), ("1",), {}, {}, {})


def test_missing_edge_is_an_error():
    with pytest.raises(GameError) as info:
        concurrent_cgs(["s"], ["a1"], ["1", "2"], {("s", ("1",)): "s"})
    assert info.value.key == "edg"


def test_turn_based_owner_independence_checked():
    edg = {("s", (m1, m2)): "s" if m2 == "1" else "t" for m1, m2 in itertools.product("12", repeat=2)}
    edg.update({("t", v): "t" for v in itertools.product("12", repeat=2)})
    with pytest.raises(GameError) as info:
        Cgs(("s", "t"), ("a1", "a2"), ("1", "2"), {}, {(q, a): ("1", "2") for q in "st" for a in ("a1", "a2")},
            edg, {"s": "a1", "t": "a1"})
    assert info.value.key == "owner"


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 4))
def test_edges_refine_transitions(seed, n):
    rng = random.Random(seed)
    for g in (random_turn_based(rng, n), random_concurrent(rng, n)):
        k = underlying_kripke(g)
        image = {(q, g.edg[(q, v)]) for q in g.states for v in g.vectors(q)}
        assert image == {(q, r) for q in k.states for r in k.succ[q]}
        if g.turn_based:
            for q in g.states:
                i = g.index(g.owner[q])
                for v, w in itertools.product(list(g.vectors(q)), repeat=2):
                    if v[i] == w[i]:
                        assert g.edg[(q, v)] == g.edg[(q, w)]


# ---------------------------------------------------------------------------
# outcomes


def test_outcome_empty_context_is_reachable_kripke(mp):
    prod = outcome_product(mp, "q0", {})
    assert {q for q, _ in prod.states} == {"q0", "qW", "qL"}
    assert {r for r, _ in prod.succ[("q0", ())]} == {"qW", "qL"}


def test_outcome_fixing_everyone_on_a_loop():
    g = loop()
    prod = outcome_product(g, "s", {"a1": memoryless_strategy("a1", {"s": "1"})})
    assert len(prod.states) == 1


def test_outcome_pennies_one_strategy(mp):
    s = memoryless_strategy("a1", {q: "1" for q in mp.states})
    prod = outcome_product(mp, "q0", {"a1": s})
    assert {r for r, _ in prod.succ[("q0", (0,))]} == {"qW", "qL"}
    t = memoryless_strategy("a2", {q: "2" for q in mp.states})
    prod = outcome_product(mp, "q0", {"a1": s, "a2": t})
    assert [r for r, _ in prod.succ[("q0", (0, 0))]] == ["qL"]


def _paths(k: Kripke, start, length):
    out = {(start,)}
    for _ in range(length):
        out = {p + (r,) for p in out for r in k.succ[p[-1]]}
    return out


def _project(paths):
    return {tuple(q for q, _ in p) for p in paths}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_stacked_products_match_joint_product(seed):
    rng = random.Random(seed)
    g = random_concurrent(rng, 3)
    f = rng.choice(list(enumerate_strategies(g, "a1", 2)))
    h = rng.choice(list(enumerate_strategies(g, "a2", 1)))
    joint = outcome_product(g, "s0", {"a1": f, "a2": h})
    only_f = outcome_product(g, "s0", {"a1": f})
    # both agents fixed: the joint product paths are the common outcomes
    both = _project(_paths(joint, joint.initial, 5))
    assert both <= _project(_paths(only_f, only_f.initial, 5))
    for p in both:
        m = 0
        for i, q in enumerate(p[:-1]):
            v = (f.move(m, q), h.move(0, q))
            assert g.edg[(q, v)] == p[i + 1]
            m = f.next_memory(m, p[i + 1])


def test_context_algebra():
    s1 = memoryless_strategy("a1", {"s": "1"})
    s2 = memoryless_strategy("a2", {"s": "1"})
    s2b = memoryless_strategy("a2", {"s": "2"})
    s3 = memoryless_strategy("a3", {"s": "1"})
    f = StrategyContext({"a1": s1, "a2": s2, "a3": s3})
    assert f.restrict(["a1", "a2"]).restrict(["a2", "a3"]) == f.restrict(["a2"])
    g = StrategyContext({"a2": s2b})
    composed = g.compose(f)
    assert composed["a2"] is s2b
    assert composed.restrict(g.dom) == g
    assert f.without(["a1"]).dom == {"a2", "a3"}


def test_strategy_play_and_validate():
    g = turn_based_cgs(["s", "u"], ["a"], {"s": "a", "u": "a"}, {"s": ["s", "u"], "u": ["u"]})
    alt = FiniteMemoryStrategy("a", 2, {(0, "s"): "1", (1, "s"): "2", (0, "u"): "1", (1, "u"): "1"},
                               {(0, "s"): 1, (1, "s"): 1, (0, "u"): 0, (1, "u"): 0})
    alt.validate(g)
    assert alt.play(["s"]) == "1"
    assert alt.play(["s", "s"]) == "2"
    bad = memoryless_strategy("a", {"s": "1", "u": "2"})
    with pytest.raises(GameError):
        bad.validate(g)


def test_enumerate_strategy_counts(mp):
    assert len(list(enumerate_strategies(mp, "a1", 1))) == 2 ** 3
    assert len(list(enumerate_strategies(mp, "a1", 2))) == 2 ** 6 * 2 ** 6


# ---------------------------------------------------------------------------
# agent reduction


def _three_agent_game(rng):
    return random_concurrent(rng, 3, agents=("a1", "a2", "a3"))


def test_reduce_agents_collapses_others():
    g = _three_agent_game(random.Random(1))
    r = reduce_agents(g, parse("atlsc", "<<a1>> X p"))
    assert r.agents == ("a1", "a0")
    assert set(r.chc[("s0", "a0")]) == {"1_1", "1_2", "2_1", "2_2"}


def test_reduce_agents_identity_when_sizes_match(mp):
    assert reduce_agents(mp, parse("atlsc", "<<a1>> X win")) is mp


def test_reduce_agents_adds_inert_agent(mp):
    r = reduce_agents(mp, parse("atlsc", "<<a1, a2>> X win"))
    assert r.agents == ("a1", "a2", "a0")
    assert check_atlsc_direct(r, "q0", parse("atlsc", "<<a1, a2>> X win"), mode="exact-horizon").is_true


@pytest.mark.parametrize("seed", range(15))
def test_reduce_agents_preserves_verdicts(seed):
    rng = random.Random(seed)
    g = _three_agent_game(rng)
    for text in ("<<a1>> X p", "<<a1>> X (p & !q)", "!<<a1>> X !p"):
        f = parse("atlsc", text)
        r = reduce_agents(g, f)
        for q in g.states:
            a = check_atlsc_direct(g, q, f, mode="exact-horizon").value
            b = check_atlsc_direct(r, q, f, mode="exact-horizon").value
            assert a is b


# ---------------------------------------------------------------------------
# unwinding


def test_unwind_self_loop():
    k = underlying_kripke(loop())
    t = unwind(k, "s", 2)
    assert t.nodes == (("s",), ("s", "s"), ("s", "s", "s"))
    assert len(set(t.labels.values())) == 1


def test_unwind_branching():
    k = kripke({"r": ["x", "y"], "x": ["x"], "y": ["y"]})
    t = unwind(k, "r", 1)
    assert len(t.nodes) == 3
    assert t.children(("r",)) == [("r", "x"), ("r", "y")]


@pytest.mark.parametrize("depth", range(6))
def test_unwind_binary_node_count(depth):
    k = kripke({"a": ["a", "b"], "b": ["a", "b"]})
    assert len(unwind(k, "a", depth).nodes) == 2 ** (depth + 1) - 1


def test_unwind_prefix_closed():
    k = kripke({"a": ["a", "b"], "b": ["a"]}, {"a": ["p"]})
    t = unwind(k, "a", 4)
    nodes = set(t.nodes)
    for h in t.nodes:
        assert h[:-1] in nodes or len(h) == 1
        assert t.labels[h] == k.labels[h[-1]]


# ---------------------------------------------------------------------------
# JSON and move annotation


def test_json_round_trip(mp, gadget):
    for g in (mp, gadget):
        doc = cgs_to_dict(g)
        assert cgs_from_dict(json.loads(json.dumps(doc))) == g


def test_json_errors_cite_key(mp):
    doc = cgs_to_dict(mp)
    del doc["edg"]["q0/1,2"]
    with pytest.raises(GameError) as info:
        cgs_from_dict(doc)
    assert info.value.key == "edg"
    doc = cgs_to_dict(mp)
    doc["chc"]["q0/a1"] = []
    with pytest.raises(GameError) as info:
        cgs_from_dict(doc)
    assert info.value.key == "chc"
    doc = cgs_to_dict(mp)
    doc["initial"] = "nowhere"
    with pytest.raises(GameError) as info:
        cgs_from_dict(doc)
    assert info.value.key == "initial"


def test_move_annotated_kripke(mp):
    k = move_annotated_kripke(mp, "q0")
    root = k.initial
    assert len(k.succ[root]) == 4
    child = ("qW", ("1", "1"))
    assert k.labels[child] == {"win", "st_qW", "mov_a1_1", "mov_a2_1"}
    assert "mov_a1_1" not in k.labels[root]
