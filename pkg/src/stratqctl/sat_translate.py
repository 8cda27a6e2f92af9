"""Satisfiability reductions from ATLsc and SL to QCTL*.

Turn-based mode marks one successor of each owned state with ``mov_<a>``;
bounded-alphabet mode labels every node with the move vector that led to
it and encodes strategies with ``choose_<a>_<m>`` markers.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .formulas import (AG, AX, EX, And, Atom, Bind, Const, Formula, FormulaError, Next, Not, Or, PathQ, PropQ,
                       Quant, RESERVED_AGENT, Relax, StratQuant, StratVar, Until, agents_of, atoms_of, ba_move_prop,
                       check_sl_sentence, choose_prop, conj, disj, globally, implies, sl_choose_prop, sl_move_prop,
                       tb_move_prop, turn_prop)

MODES = ("tb-atlsc", "ba-atlsc", "tb-sl", "ba-sl")


def padded_agents(formula: Formula) -> tuple[str, ...]:
    """Agents of the formula plus the extra agent ``a0``."""
    return (RESERVED_AGENT,) + tuple(sorted(agents_of(formula) - {RESERVED_AGENT}))


def phi_tb(agents: Sequence[str]) -> Formula:
    """Every node is owned by exactly one agent."""
    agents = list(agents)
    if not agents:
        raise FormulaError("at least one agent is required")
    return AG(disj([conj([Atom(turn_prop(a))] + [Not(Atom(turn_prop(b))) for b in agents if b != a])
                    for a in agents]))


class _Fresh:
    def __init__(self, avoid: Iterable[str] = ()):
        self.avoid = set(avoid)
        self.n = 0

    def __call__(self) -> str:
        while True:
            self.n += 1
            name = f"fresh_{self.n}"
            if name not in self.avoid:
                self.avoid.add(name)
                return name


def ex1(inner: Formula, fresh: Optional[_Fresh] = None) -> Formula:
    """Exactly one successor satisfies ``inner``."""
    fresh = fresh or _Fresh()
    fresh.avoid |= atoms_of(inner)
    p = Atom(fresh())
    return And(EX(inner), PropQ(Quant.FORALL, p.name, implies(EX(And(inner, p)), AX(implies(inner, p)))))


def move_vector_formula(agents: Sequence[str], vec: Sequence[str]) -> Formula:
    return conj([Atom(ba_move_prop(a, m)) for a, m in zip(agents, vec)])


def phi_edg(agents: Sequence[str], alphabet: Sequence[str], fresh: Optional[_Fresh] = None) -> Formula:
    """Every node has exactly one child per move vector and every child carries a move vector."""
    if not alphabet:
        raise FormulaError("the move alphabet must have at least one move")
    fresh = fresh or _Fresh()
    vectors = list(itertools.product(alphabet, repeat=len(agents)))
    unique = conj([ex1(move_vector_formula(agents, v), fresh) for v in vectors])
    covered = AX(disj([move_vector_formula(agents, v) for v in vectors]))
    return AG(And(unique, covered))


def exactly_one(atoms: Sequence[Formula]) -> Formula:
    return disj([conj([a] + [Not(b) for b in atoms if b is not a]) for a in atoms])


def alphabet_of(size: int) -> tuple[str, ...]:
    if size < 1:
        raise FormulaError("alphabet size must be at least 1")
    return tuple(str(i) for i in range(1, size + 1))


@dataclass
class SatTranslation:
    mode: str
    agents: tuple
    alphabet: tuple
    output: Formula
    quantified: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# ATLsc


def translate_sat_tb(formula: Formula, agents: Optional[Sequence[str]] = None) -> Formula:
    return translate_sat_tb_unit(formula, agents).output


def translate_sat_tb_unit(formula: Formula, agents: Optional[Sequence[str]] = None) -> SatTranslation:
    """Turn-based translation over ``agents`` (default: the padded agents of the formula)."""
    if agents is None:
        agents = padded_agents(formula)
    elif not agents_of(formula) <= set(agents):
        raise FormulaError("the formula mentions agents outside the given list")
    agents = tuple(agents)
    fresh = _Fresh(atoms_of(formula))
    counter = [0]
    quantified: list = []

    def state(f: Formula, ctx: frozenset, tags: dict) -> Formula:
        if isinstance(f, (Const, Atom)):
            return f
        if isinstance(f, Not):
            return Not(state(f.sub, ctx, tags))
        if isinstance(f, And):
            return And(state(f.left, ctx, tags), state(f.right, ctx, tags))
        if isinstance(f, Or):
            return Or(state(f.left, ctx, tags), state(f.right, ctx, tags))
        if isinstance(f, Relax):
            return state(f.sub, ctx - set(f.coalition), tags)
        if isinstance(f, StratQuant):
            coalition = list(f.coalition)
            inner_tags = dict(tags)
            if coalition:
                counter[0] += 1
                for a in coalition:
                    inner_tags[a] = counter[0]
            inner_ctx = ctx | set(coalition)
            mov = {a: Atom(tb_move_prop(a, inner_tags[a])) for a in inner_ctx}
            guard = [implies(Atom(turn_prop(a)), Next(mov[a])) for a in sorted(inner_ctx)]
            body = path(f.sub, inner_ctx, inner_tags)
            outcome = PathQ(Quant.FORALL, implies(globally(conj(guard)), body) if guard else body)
            if not coalition:
                return outcome
            strategy = AG(conj([implies(Atom(turn_prop(a)), ex1(mov[a], fresh)) for a in coalition]))
            result: Formula = And(strategy, outcome)
            names = [mov[a].name for a in coalition]
            quantified.extend(names)
            for p in reversed(names):
                result = PropQ(Quant.EXISTS, p, result)
            return result
        raise FormulaError(f"unexpected {type(f).__name__} at a state position")

    def path(f: Formula, ctx, tags) -> Formula:
        if isinstance(f, Next):
            return Next(state(f.sub, ctx, tags))
        if isinstance(f, Until):
            return Until(state(f.left, ctx, tags), state(f.right, ctx, tags))
        if isinstance(f, Not):
            return Not(path(f.sub, ctx, tags))
        return state(f, ctx, tags)

    out = And(phi_tb(agents), state(formula, frozenset(), {}))
    return SatTranslation("tb-atlsc", agents, (), out, quantified)


def translate_sat_ba(formula: Formula, agents: Sequence[str], alphabet) -> Formula:
    return translate_sat_ba_unit(formula, agents, alphabet).output


def _alphabet(alphabet) -> tuple[str, ...]:
    if isinstance(alphabet, int):
        return alphabet_of(alphabet)
    alphabet = tuple(str(m) for m in alphabet)
    if not alphabet:
        raise FormulaError("alphabet size must be at least 1")
    return alphabet


def translate_sat_ba_unit(formula: Formula, agents: Sequence[str], alphabet) -> SatTranslation:
    moves = _alphabet(alphabet)
    agents = tuple(agents)
    missing = agents_of(formula) - set(agents)
    if missing:
        raise FormulaError(f"agents {sorted(missing)} missing from the agent set")
    fresh = _Fresh(atoms_of(formula))
    counter = [0]
    quantified: list = []

    def state(f: Formula, ctx: frozenset, tags: dict) -> Formula:
        if isinstance(f, (Const, Atom)):
            return f
        if isinstance(f, Not):
            return Not(state(f.sub, ctx, tags))
        if isinstance(f, And):
            return And(state(f.left, ctx, tags), state(f.right, ctx, tags))
        if isinstance(f, Or):
            return Or(state(f.left, ctx, tags), state(f.right, ctx, tags))
        if isinstance(f, Relax):
            return state(f.sub, ctx - set(f.coalition), tags)
        if isinstance(f, StratQuant):
            coalition = list(f.coalition)
            inner_tags = dict(tags)
            if coalition:
                counter[0] += 1
                for a in coalition:
                    inner_tags[a] = counter[0]
            inner_ctx = ctx | set(coalition)

            def ch(a, m):
                return Atom(choose_prop(a, m, inner_tags[a]))

            guard = [implies(ch(a, m), Next(Atom(ba_move_prop(a, m)))) for a in sorted(inner_ctx) for m in moves]
            body = path(f.sub, inner_ctx, inner_tags)
            outcome = PathQ(Quant.FORALL, implies(globally(conj(guard)), body) if guard else body)
            if not coalition:
                return outcome
            strategy = AG(conj([exactly_one([ch(a, m) for m in moves]) for a in coalition]))
            result: Formula = And(strategy, outcome)
            names = [ch(a, m).name for a in coalition for m in moves]
            quantified.extend(names)
            for p in reversed(names):
                result = PropQ(Quant.EXISTS, p, result)
            return result
        raise FormulaError(f"unexpected {type(f).__name__} at a state position")

    def path(f: Formula, ctx, tags) -> Formula:
        if isinstance(f, Next):
            return Next(state(f.sub, ctx, tags))
        if isinstance(f, Until):
            return Until(state(f.left, ctx, tags), state(f.right, ctx, tags))
        if isinstance(f, Not):
            return Not(path(f.sub, ctx, tags))
        return state(f, ctx, tags)

    out = And(phi_edg(agents, moves, fresh), state(formula, frozenset(), {}))
    return SatTranslation("ba-atlsc", agents, moves, out, quantified)


# ---------------------------------------------------------------------------
# SL


def sl_agents(formula: Formula, agents: Optional[Sequence[str]] = None) -> tuple[str, ...]:
    if agents is None:
        return tuple(sorted(agents_of(formula)))
    agents = tuple(agents)
    extra = agents_of(formula) - set(agents)
    if extra:
        raise FormulaError(f"agents {sorted(extra)} missing from the agent set")
    return agents


class _VarNames:
    """Per-quantifier proposition names; a reused variable name gets a suffix."""

    def __init__(self):
        self.seen: dict[str, int] = {}

    def allocate(self, var: str) -> str:
        n = self.seen.get(var, 0)
        self.seen[var] = n + 1
        return var if n == 0 else f"{var}__{n + 1}"


def translate_sl_tb(formula: Formula, agents: Optional[Sequence[str]] = None) -> Formula:
    return translate_sl_tb_unit(formula, agents).output


def translate_sl_tb_unit(formula: Formula, agents: Optional[Sequence[str]] = None) -> SatTranslation:
    agents = sl_agents(formula, agents)
    check_sl_sentence(formula, agents)
    fresh = _Fresh(atoms_of(formula))
    names = _VarNames()
    quantified: list = []

    def go(f: Formula, V: dict, keys: dict, owners: dict) -> Formula:
        if isinstance(f, (Const, Atom)):
            return f
        if isinstance(f, Not):
            return Not(go(f.sub, V, keys, owners))
        if isinstance(f, And):
            return And(go(f.left, V, keys, owners), go(f.right, V, keys, owners))
        if isinstance(f, Or):
            return Or(go(f.left, V, keys, owners), go(f.right, V, keys, owners))
        if isinstance(f, StratVar):
            key = names.allocate(f.var)
            prop = sl_move_prop(key)
            quantified.append(prop)
            inner = go(f.sub, V, {**keys, f.var: key}, owners)
            return PropQ(Quant.EXISTS, prop, And(AG(ex1(Atom(prop), fresh)), inner))
        if isinstance(f, Bind):
            key = keys[f.var]
            owner = owners.get(key)
            if owner is not None and owner != f.agent:
                raise FormulaError(f"strategy {f.var!r} bound to both {owner!r} and {f.agent!r} in a turn-based game")
            return go(f.sub, {**V, f.agent: key}, keys, {**owners, key: f.agent})
        if isinstance(f, (Next, Until)):
            missing = [a for a in agents if a not in V]
            if missing:
                raise FormulaError(f"agents {missing} unbound under a temporal operator")
            guard = globally(conj([implies(Atom(turn_prop(a)), Next(Atom(sl_move_prop(V[a])))) for a in agents]))
            if isinstance(f, Next):
                body = Next(go(f.sub, V, keys, owners))
            else:
                body = Until(go(f.left, V, keys, owners), go(f.right, V, keys, owners))
            return PathQ(Quant.FORALL, implies(guard, body))
        raise FormulaError(f"unexpected {type(f).__name__} in an SL formula")

    out = And(phi_tb(agents), go(formula, {}, {}, {}))
    return SatTranslation("tb-sl", agents, (), out, quantified)


def translate_sl_ba(formula: Formula, agents: Optional[Sequence[str]] = None, alphabet=2) -> Formula:
    return translate_sl_ba_unit(formula, agents, alphabet).output


def translate_sl_ba_unit(formula: Formula, agents: Optional[Sequence[str]] = None, alphabet=2) -> SatTranslation:
    moves = _alphabet(alphabet)
    agents = sl_agents(formula, agents)
    check_sl_sentence(formula, agents)
    fresh = _Fresh(atoms_of(formula))
    names = _VarNames()
    quantified: list = []

    def go(f: Formula, V: dict, keys: dict) -> Formula:
        if isinstance(f, (Const, Atom)):
            return f
        if isinstance(f, Not):
            return Not(go(f.sub, V, keys))
        if isinstance(f, And):
            return And(go(f.left, V, keys), go(f.right, V, keys))
        if isinstance(f, Or):
            return Or(go(f.left, V, keys), go(f.right, V, keys))
        if isinstance(f, StratVar):
            key = names.allocate(f.var)
            props = [sl_choose_prop(key, m) for m in moves]
            quantified.extend(props)
            result: Formula = And(AG(exactly_one([Atom(p) for p in props])), go(f.sub, V, {**keys, f.var: key}))
            for p in reversed(props):
                result = PropQ(Quant.EXISTS, p, result)
            return result
        if isinstance(f, Bind):
            return go(f.sub, {**V, f.agent: keys[f.var]}, keys)
        if isinstance(f, (Next, Until)):
            missing = [a for a in agents if a not in V]
            if missing:
                raise FormulaError(f"agents {missing} unbound under a temporal operator")
            guard = globally(conj([implies(Atom(sl_choose_prop(V[a], m)), Next(Atom(ba_move_prop(a, m))))
                                   for a in agents for m in moves]))
            if isinstance(f, Next):
                body = Next(go(f.sub, V, keys))
            else:
                body = Until(go(f.left, V, keys), go(f.right, V, keys))
            return PathQ(Quant.FORALL, implies(guard, body))
        raise FormulaError(f"unexpected {type(f).__name__} in an SL formula")

    out = And(phi_edg(agents, moves, fresh), go(formula, {}, {}))
    return SatTranslation("ba-sl", agents, moves, out, quantified)


def translate(mode: str, formula: Formula, agents: Optional[Sequence[str]] = None, alphabet=2) -> Formula:
    if mode == "tb-atlsc":
        return translate_sat_tb(formula)
    if mode == "ba-atlsc":
        return translate_sat_ba(formula, agents or padded_agents(formula), alphabet)
    if mode == "tb-sl":
        return translate_sl_tb(formula, agents)
    if mode == "ba-sl":
        return translate_sl_ba(formula, agents, alphabet)
    raise ValueError(f"unknown mode {mode!r}")
