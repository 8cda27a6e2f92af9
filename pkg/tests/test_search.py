import itertools
import json

import pytest

from stratqctl.direct import check_atlsc_direct, check_sl_direct
from stratqctl.formulas import And, Atom, FormulaError, atoms_of, parse, to_text
from stratqctl.games import cgs_from_dict, turn_based_cgs
from stratqctl.search import (ABORTED, MODEL, NO_MODEL, alphabet_candidates, at_prop, count_alphabet,
                              count_turn_based, describe_game, sat_bounded_alphabet, sat_turn_based,
                              turn_based_candidates)
from stratqctl.search import _Constraints, _locally_ok

from conftest import loop, pennies


def atl(text):
    return parse("atlsc", text)


def replay(report, formula, budget=1):
    assert report.outcome == MODEL
    v = check_atlsc_direct(report.cgs, report.state, formula, memory_bound=budget)
    assert v.is_true
    return report.cgs


# ---------------------------------------------------------------------------
# turn-based search


def test_two_different_successors():
    f = atl("<<a1>> X p & <<a1>> X !p")
    g = replay(sat_turn_based(f, max_states=3), f)
    root = g.initial
    assert g.owner[root] == "a1"
    assert {"p" in g.labels[r] for r in g.successors(root)} == {True, False}


def test_contradiction_has_no_model():
    for n in range(1, 4):
        assert sat_turn_based(atl("p & !p"), max_states=n).outcome == NO_MODEL


def test_globally_single_loop():
    g = replay(sat_turn_based(atl("<<a1>> G p")), atl("<<a1>> G p"))
    assert len(g.states) == 1 and g.labels[g.initial] == {"p"}


def test_qctl_engine_agrees():
    f = atl("<<a1>> X p & !<<a2>> X p")
    direct = sat_turn_based(f, max_states=3)
    both = sat_turn_based(f, max_states=3, engine="both")
    assert direct.outcome == both.outcome == MODEL
    assert not both.disagreements


def test_sl_turn_based():
    f = parse("sl", "<x> <y> (a0,y) (a1,x) X p")
    report = sat_turn_based(f, max_states=2)
    assert report.found
    assert check_sl_direct(report.cgs, report.state, f).is_true


def test_reserved_propositions_rejected():
    with pytest.raises(FormulaError):
        sat_turn_based(parse("atlsc", "st_x", allow_reserved=True))


def test_candidate_cap_aborts():
    report = sat_turn_based(atl("<<a1>> X p & <<a1>> G !q & <<a2>> F q"), max_states=4, max_candidates=5)
    assert report.outcome == ABORTED and report.candidates == 6


def test_report_json_round_trips():
    report = sat_turn_based(atl("<<a1>> G p"))
    doc = json.loads(json.dumps(report.to_json()))
    assert doc["outcome"] == "model"
    assert cgs_from_dict(doc["model"]) == report.cgs


# ---------------------------------------------------------------------------
# bounded alphabet search


def test_single_move_is_a_kripke_structure():
    f = atl("<<a1>> X p")
    report = sat_bounded_alphabet(f, alphabet=1)
    g = replay(report, f)
    assert len(g.moves) == 1 and len(g.states) <= 2


def test_pennies_style_requirement():
    f = atl("!<<a1>> X p & <<a1, a2>> X p")
    g = replay(sat_bounded_alphabet(f, alphabet=2, max_states=3), f)
    assert len(g.states) <= 3
    # a1 alone cannot, the grand coalition can: the root's successors disagree on p
    assert {"p" in g.labels[r] for r in g.successors(g.initial)} == {True, False}


def test_dual_unsatisfiable():
    report = sat_bounded_alphabet(atl("<<a1, a2>> X p & <<>> X !p"), alphabet=2, max_states=3)
    assert report.outcome == NO_MODEL


def test_alphabet_must_be_positive():
    with pytest.raises(FormulaError):
        sat_bounded_alphabet(atl("p"), alphabet=0)


# ---------------------------------------------------------------------------
# enumeration counts against an independent brute force


def _bfs_order(succ):
    order, seen = [0], {0}
    for s in order:
        for t in succ[s]:
            if t not in seen:
                seen.add(t)
                order.append(t)
    return order


def brute_turn_based(n_agents, n_labels, n):
    # states with one successor have a fixed owner
    subsets = [c for r in range(1, n + 1) for c in itertools.combinations(range(n), r)]
    count = 0
    for succ in itertools.product(subsets, repeat=n):
        if _bfs_order(succ) == list(range(n)):
            owners = 1
            for s in succ:
                owners *= n_agents if len(s) > 1 else 1
            count += owners
    return count * n_labels ** n


def brute_alphabet(n_vectors, n_labels, n):
    count = 0
    for rows in itertools.product(itertools.product(range(n), repeat=n_vectors), repeat=n):
        if _bfs_order(rows) == list(range(n)):
            count += 1
    return count * n_labels ** n


@pytest.mark.parametrize("n", [1, 2, 3])
def test_turn_based_count(n):
    assert count_turn_based(["a0", "a1"], ["p"], n) == brute_turn_based(2, 2, n)


@pytest.mark.parametrize("n", [1, 2])
def test_alphabet_count(n):
    assert count_alphabet(["a0", "a1"], ["p"], ["1", "2"], n) == brute_alphabet(4, 2, n)


def test_counts_frozen():
    assert [count_turn_based(["a0", "a1"], ["p"], n) for n in (1, 2)] == [2, 48]
    assert [count_alphabet(["a0", "a1"], ["p"], ["1", "2"], n) for n in (1, 2)] == [2, 960]


def test_candidates_are_fully_reachable():
    for g in itertools.chain(turn_based_candidates(["a0", "a1"], ["p"], 3),
                             alphabet_candidates(["a0", "a1"], [], ["1", "2"], 2)):
        seen, todo = {g.initial}, [g.initial]
        while todo:
            for r in g.successors(todo.pop()):
                if r not in seen:
                    seen.add(r)
                    todo.append(r)
        assert seen == set(g.states)


# ---------------------------------------------------------------------------
# game descriptions


def test_describe_self_loop():
    assert to_text(describe_game(loop())) == "<<>> G (at_s & p) & <<>> G (at_s -> <<a1>> X at_s)"


def test_describe_chain_has_negative_conjunct():
    g = turn_based_cgs(["s", "t"], ["a1"], {"s": "a1", "t": "a1"}, {"s": ["t"], "t": ["t"]}, {"s": ["p"]}, "s")
    text = to_text(describe_game(g))
    assert "at_s -> <<a1>> X at_t & !<<a1>> X at_s" in text
    assert "at_t -> <<a1>> X at_t & !<<a1>> X at_s" in text


def test_describe_needs_turn_based():
    from stratqctl.games import GameError

    with pytest.raises(GameError):
        describe_game(pennies())


def _mirrors(model, game):
    """Every model state carries exactly one mark and behaves like the marked game state."""
    for m in model.states:
        marks = [q for q in game.states if at_prop(q) in model.labels[m]]
        if len(marks) != 1:
            return False
        (q,) = marks
        if (model.labels[m] - {at_prop(r) for r in game.states}) != game.labels[q]:
            return False
        nxt = {r for s in model.successors(m) for r in game.states if at_prop(r) in model.labels[s]}
        if nxt != set(game.successors(q)):
            return False
    return True


@pytest.mark.parametrize("index", range(0, 48, 3))
def test_description_models_mirror_the_game(index):
    game = list(turn_based_candidates(["a0", "a1"], ["p"], 2))[index]
    for q in game.states:
        report = sat_turn_based(And(describe_game(game, ["p"]), Atom(at_prop(q))), max_states=4)
        assert report.found
        assert _mirrors(report.cgs, game)
        assert at_prop(q) in report.cgs.labels[report.cgs.initial]


# ---------------------------------------------------------------------------
# incremental pruning and the residual formula


PRUNING_FORMULAS = [
    "<<a1>> X p & <<>> G (p -> <<a2>> X !p) & !<<a1, a2>> X q",
    "<<>> G (p | <<a1>> X p) & <<a2>> X !p",
]


@pytest.mark.parametrize("text", PRUNING_FORMULAS)
def test_pruned_generation_keeps_exactly_the_locally_valid_candidates(text):
    f = atl(text)
    c = _Constraints.of(f)
    props = sorted(atoms_of(f))
    agents = ["a1", "a2"]
    for n in (1, 2, 3):
        full = [g for g in turn_based_candidates(agents, props, n, None, c.label_ok) if _locally_ok(g, c)]
        pruned = list(turn_based_candidates(agents, props, n, None, c.label_ok, c.state_ok))
        assert sorted(map(repr, full)) == sorted(map(repr, pruned))
    for n in (1, 2):
        full = [g for g in alphabet_candidates(agents, props, ["1", "2"], n, None, c.label_ok) if _locally_ok(g, c)]
        pruned = list(alphabet_candidates(agents, props, ["1", "2"], n, None, c.label_ok, c.state_ok))
        assert sorted(map(repr, full)) == sorted(map(repr, pruned))


def test_residual_drops_settled_conjuncts():
    f = atl("<<>> G (p -> <<a1>> X q) & <<a2>> X p & <<a1>> G p")
    assert to_text(_Constraints.residual(f)) == "<<a1>> G p"
    assert _Constraints.residual(atl("<<a1>> X p & !q")) == atl("true")


def test_settled_only_formula_agrees_across_engines():
    # every conjunct is settled locally, so both engines see the formula true
    report = sat_turn_based(atl("<<a1>> X p & !<<a2>> X p"), max_states=3, engine="both")
    assert report.found and not report.disagreements
