"""Shared games, formulas and random generators for the test suite."""
from __future__ import annotations

import itertools
import random

import pytest

from stratqctl.formulas import And, Atom, Next, Not, Or, StratQuant, Until, conj
from stratqctl.games import concurrent_cgs, kripke, turn_based_cgs


def pennies():
    """Matching pennies: a1 wins when both agents show the same move."""
    edg = {}
    for m1, m2 in itertools.product("12", repeat=2):
        edg[("q0", (m1, m2))] = "qW" if m1 == m2 else "qL"
    for q in ("qW", "qL"):
        for v in itertools.product("12", repeat=2):
            edg[(q, v)] = q
    return concurrent_cgs(["q0", "qW", "qL"], ["a1", "a2"], ["1", "2"], edg, {"qW": ["win"]}, initial="q0")


def ping_pong():
    """a must pass through ``s`` twice and then leave for ``u``: memoryless play cannot."""
    return turn_based_cgs(["s", "u"], ["a"], {"s": "a", "u": "a"}, {"s": ["s", "u"], "u": ["u"]},
                          {"s": ["at_s"], "u": ["r"]}, "s")


def loop(props=("p",), agent="a1"):
    return turn_based_cgs(["s"], [agent], {"s": agent}, {"s": ["s"]}, {"s": list(props)}, "s")


@pytest.fixture
def mp():
    return pennies()


@pytest.fixture
def gadget():
    return ping_pong()


# ---------------------------------------------------------------------------
# random instances (seeded, deterministic)


def random_turn_based(rng: random.Random, n_states: int, agents=("a1", "a2"), props=("p", "q")):
    states = [f"s{i}" for i in range(n_states)]
    owner = {q: rng.choice(agents) for q in states}
    succ = {q: rng.sample(states, rng.randint(1, min(2, n_states))) for q in states}
    labels = {q: [p for p in props if rng.random() < 0.5] for q in states}
    return turn_based_cgs(states, list(agents), owner, succ, labels, states[0])


def random_concurrent(rng: random.Random, n_states: int, agents=("a1", "a2"), moves=("1", "2"), props=("p", "q")):
    states = [f"s{i}" for i in range(n_states)]
    edg = {}
    for q in states:
        for v in itertools.product(moves, repeat=len(agents)):
            edg[(q, v)] = rng.choice(states)
    labels = {q: [p for p in props if rng.random() < 0.5] for q in states}
    return concurrent_cgs(states, list(agents), list(moves), edg, labels, initial=states[0])


def random_literal_conj(rng: random.Random, props=("p", "q")):
    lits = []
    for p in props:
        r = rng.random()
        if r < 0.4:
            lits.append(Atom(p))
        elif r < 0.8:
            lits.append(Not(Atom(p)))
    if not lits:
        lits.append(Atom(rng.choice(props)))
    return conj(lits)


def random_state(rng: random.Random, depth: int, agents=("a1", "a2"), props=("p", "q"), until=True):
    """Random ATLsc state formula whose quantifiers keep the ATL shape
    (every nested quantifier names a superset of the enclosing coalition)."""
    return _state(rng, depth, agents, props, until, ())


def _state(rng, depth, agents, props, until, ctx):
    if depth == 0:
        p = Atom(rng.choice(props))
        return p if rng.random() < 0.6 else Not(p)
    r = rng.random()
    if r < 0.15:
        return Not(_state(rng, depth - 1, agents, props, until, ctx))
    if r < 0.35:
        cls = And if rng.random() < 0.5 else Or
        return cls(_state(rng, depth - 1, agents, props, until, ctx), _state(rng, depth - 1, agents, props, until, ctx))
    extra = [a for a in agents if a not in ctx and rng.random() < 0.5]
    coalition = tuple(a for a in agents if a in ctx or a in extra)
    inner = set(coalition)
    sub = lambda: _state(rng, depth - 1, agents, props, until, inner)  # noqa: E731
    kind = rng.random()
    if not until or kind < 0.4:
        path = Next(sub())
    elif kind < 0.7:
        path = Until(sub(), sub())
    else:
        path = Not(Until(Atom(rng.choice(props)), sub()))
    return StratQuant(coalition, path)
