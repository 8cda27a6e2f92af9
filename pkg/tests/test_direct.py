import dataclasses
import random

import pytest
from hypothesis import given, settings, strategies as st

from stratqctl.direct import (DirectError, check_atl_fixpoint, check_atlsc_direct, check_memoryless, check_sl_direct,
                              sl_outcome)
from stratqctl.formulas import Formula, StratQuant, parse
from stratqctl.games import FiniteMemoryStrategy, concurrent_cgs, memoryless_strategy

from conftest import loop, random_concurrent, random_state, random_turn_based


def atl(text):
    return parse("atlsc", text)


def sl(text):
    return parse("sl", text)


def memoryless(f: Formula) -> Formula:
    """Mark every strategy quantifier of ``f`` memoryless."""
    changes = {}
    for field in dataclasses.fields(f):
        v = getattr(f, field.name)
        if isinstance(v, Formula):
            changes[field.name] = memoryless(v)
    if isinstance(f, StratQuant):
        changes["memoryless"] = True
    return dataclasses.replace(f, **changes) if changes else f


# ---------------------------------------------------------------------------
# the ATL fixpoint oracle


def test_fixpoint_pennies(mp):
    assert not check_atl_fixpoint(mp, "q0", atl("<<a1>> X win"))
    assert check_atl_fixpoint(mp, "q0", atl("<<a1, a2>> X win"))


def test_fixpoint_globally_on_loop():
    assert check_atl_fixpoint(loop(), "s", atl("<<>> G p"))
    assert not check_atl_fixpoint(loop(props=()), "s", atl("<<>> G p"))


def test_fixpoint_until(mp):
    assert not check_atl_fixpoint(mp, "q0", atl("<<a1>> F win"))
    assert check_atl_fixpoint(mp, "q0", atl("<<a1, a2>> F win"))
    # neither player alone controls the coin
    assert not check_atl_fixpoint(mp, "q0", atl("<<a2>> G !win"))
    assert check_atl_fixpoint(mp, "q0", atl("!<<a2>> G !win"))


def test_fixpoint_rejects_context_capture():
    with pytest.raises(DirectError):
        check_atl_fixpoint(loop(), "s", atl("<<a1>> X <<>> X p"))
    # relaxing the inherited agent puts the formula back into the fragment
    assert check_atl_fixpoint(loop(), "s", atl("<<a1>> X relax(a1) <<>> X p"))


# ---------------------------------------------------------------------------
# ATLsc, exact horizon and bounded memory


@pytest.mark.parametrize("mode", ["exact-horizon", "bounded"])
def test_pennies(mp, mode):
    assert check_atlsc_direct(mp, "q0", atl("<<a1>> X win"), mode=mode).is_false
    assert check_atlsc_direct(mp, "q0", atl("<<a1, a2>> X win"), mode=mode).is_true


@pytest.mark.parametrize("mode", ["exact-horizon", "bounded"])
def test_every_successor_good(mode):
    g = concurrent_cgs(["s", "t", "u"], ["a1"], ["1", "2"], {("s", ("1",)): "t", ("s", ("2",)): "u",
                                                            ("t", ("1",)): "t", ("t", ("2",)): "t",
                                                            ("u", ("1",)): "u", ("u", ("2",)): "u"},
                       {"t": ["p"], "u": ["p"]}, initial="s")
    assert check_atlsc_direct(g, "s", atl("<<a1>> X p"), mode=mode).is_true


@pytest.mark.parametrize("mode", ["exact-horizon", "bounded"])
def test_context_composition(mp, mode):
    play1 = memoryless_strategy("a2", {q: "1" for q in mp.states})
    f = atl("<<a1>> X win")
    assert check_atlsc_direct(mp, "q0", f, context={"a2": play1}, mode=mode).is_true
    # releasing a2 from the context restores the matching-pennies answer
    assert check_atlsc_direct(mp, "q0", atl("relax(a2) <<a1>> X win"), context={"a2": play1}, mode=mode).is_false


def test_bounded_until(mp):
    assert check_atlsc_direct(mp, "q0", atl("<<a1>> F win")).is_false
    assert check_atlsc_direct(mp, "q0", atl("<<a1, a2>> F win")).is_true
    assert check_atlsc_direct(mp, "q0", atl("<<a1>> G !win")).is_false


def test_true_verdict_carries_witness(mp):
    v = check_atlsc_direct(mp, "q0", atl("<<a1, a2>> F win"))
    assert v.is_true and set(v.witness) == {"a1", "a2"}
    # without the exact-horizon shortcut X formulas go through enumeration too
    v = check_atlsc_direct(mp, "q0", atl("<<a1, a2>> X win"), horizon=False)
    assert v.is_true and set(v.witness) == {"a1", "a2"}
    assert v.witness["a1"]["choose"]["0/q0"] == v.witness["a2"]["choose"]["0/q0"]


def test_errors(mp):
    with pytest.raises(DirectError):
        check_atlsc_direct(mp, "nowhere", atl("<<a1>> X win"))
    with pytest.raises(DirectError):
        check_atlsc_direct(mp, "q0", atl("<<a1>> F win"), mode="exact-horizon")
    with pytest.raises(DirectError):
        check_atlsc_direct(mp, "q0", atl("<<a1>> X win"), mode="psychic")


# ---------------------------------------------------------------------------
# memoryless semantics and the memory gap

PING = "<<a>>0 F (<<>>0 X at_s & <<>>0 X <<>>0 X r)"


def test_memoryless_loop():
    assert check_memoryless(loop(), "s", atl("<<a1>>0 G p"))


def test_ping_pong_needs_memory(gadget):
    f = atl(PING)
    assert not check_memoryless(gadget, "s", f)
    assert check_atlsc_direct(gadget, "s", f, memory_bound=1).is_unknown
    two = check_atlsc_direct(gadget, "s", f, memory_bound=2)
    assert two.is_true and two.witness


def test_ping_pong_witness_replays(gadget):
    # stay once at s, then leave for u: the play reaches r after exactly two steps
    stay_then_go = FiniteMemoryStrategy("a", 2, {(0, "s"): "1", (1, "s"): "2", (0, "u"): "1", (1, "u"): "1"},
                                        {(0, "s"): 1, (1, "s"): 0, (0, "u"): 0, (1, "u"): 0})
    prod = sl_outcome(gadget, "s", {"a": stay_then_go})
    run, node = [], prod.initial
    for _ in range(3):
        run.append(node[0])
        (node,) = prod.succ[node]
    assert run == ["s", "s", "u"]


def test_memoryless_rejects_memoryful_quantifier(mp):
    with pytest.raises(DirectError):
        check_memoryless(mp, "q0", atl("<<a1>> X win"))


def test_memoryless_opponents_stay_memoryful():
    # a0 owns s and can loop through t once before heading to the p-state;
    # a1's empty coalition cannot stop a memoryful opponent from doing so
    g = concurrent_cgs(["s", "t"], ["a1"], ["1", "2"], {("s", ("1",)): "t", ("s", ("2",)): "s",
                                                       ("t", ("1",)): "s", ("t", ("2",)): "t"},
                       {"t": ["p"]}, initial="s")
    assert not check_memoryless(g, "s", atl("<<>>0 G !p"))
    assert check_memoryless(g, "s", atl("<<a1>>0 G !p"))


def test_sl_memoryless_pennies(mp):
    # both strategies are existential, so matching moves are available
    assert check_memoryless(mp, "q0", sl("<x>0 <y>0 (a1,x) (a2,y) X win"))
    assert not check_memoryless(mp, "q0", sl("<x>0 <y>0 (a1,x) (a2,y) X !(win | !win)"))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.integers(1, 3))
def test_memoryless_implies_bounded(seed, n):
    rng = random.Random(seed)
    g = random_turn_based(rng, n)
    f = random_state(rng, 2)
    f0 = memoryless(f)
    if check_memoryless(g, "s0", f0):
        assert not check_atlsc_direct(g, "s0", f, memory_bound=1).is_false


# ---------------------------------------------------------------------------
# strategy logic


def test_sl_preassigned_opponent(mp):
    play1 = memoryless_strategy("a2", {q: "1" for q in mp.states})
    assert check_sl_direct(mp, "q0", sl("<x> (a1,x) X win"), assignment={"a2": play1}).is_true


def test_sl_shared_strategy(mp):
    # one strategy object bound to both agents always matches
    assert check_sl_direct(mp, "q0", sl("<x> (a1,x) (a2,x) X win")).is_true
    assert check_sl_direct(mp, "q0", sl("<x> (a1,x) (a2,x) X !win")).is_false


def test_sl_complete_assignment_reads_label(mp):
    s1 = memoryless_strategy("a1", {q: "1" for q in mp.states})
    s2 = memoryless_strategy("a2", {q: "2" for q in mp.states})
    assert check_sl_direct(mp, "q0", sl("X !win"), assignment={"a1": s1, "a2": s2}).is_true
    assert check_sl_direct(mp, "q0", sl("X win"), assignment={"a1": s1, "a2": s1.rename("a2")}).is_true


def test_sl_unassigned_variable(mp):
    with pytest.raises(DirectError):
        check_sl_direct(mp, "q0", sl("(a1,x) (a2,x) X win"))


def test_sl_outcome_requires_every_agent(mp):
    with pytest.raises(DirectError):
        sl_outcome(mp, "q0", {"a1": memoryless_strategy("a1", {q: "1" for q in mp.states})})


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_sl_unique_run(seed):
    rng = random.Random(seed)
    g = random_concurrent(rng, 3)
    asg = {a: memoryless_strategy(a, {q: rng.choice(g.chc[(q, a)]) for q in g.states}) for a in g.agents}
    prod = sl_outcome(g, "s0", asg)
    assert all(len(prod.succ[n]) == 1 for n in prod.states)


# ---------------------------------------------------------------------------
# agreement between the oracles on the ATL fragment


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 4), st.integers(1, 2))
def test_atl_oracles_agree(seed, n, depth):
    rng = random.Random(seed)
    g = random_turn_based(rng, n)
    f = random_state(rng, depth, until=False)
    expected = check_atl_fixpoint(g, "s0", f)
    assert check_atlsc_direct(g, "s0", f, mode="exact-horizon").is_true is expected
    bounded = check_atlsc_direct(g, "s0", f, memory_bound=1)
    if not bounded.is_unknown:
        assert bounded.is_true is expected


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_atl_fixpoint_agrees_with_bounded_on_until(seed, n):
    rng = random.Random(seed)
    g = random_turn_based(rng, n)
    f = random_state(rng, 2)
    expected = check_atl_fixpoint(g, "s0", f)
    bounded = check_atlsc_direct(g, "s0", f, memory_bound=1)
    if not bounded.is_unknown:
        assert bounded.is_true is expected
