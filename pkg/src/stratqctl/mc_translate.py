"""Model-checking reduction: ATLsc formula + game -> QCTL* formula.

Strategies of an agent are encoded by move propositions ``mov_<a>_<m>``
labelling the execution tree of the underlying Kripke structure.  Each
strategy quantifier gets its own copy of the family, suffixed by its
preorder index, so nested quantifiers never capture each other.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .formulas import (AG, And, Atom, Const, Formula, FormulaError, Next, Not, Or, PathQ, PropQ, Quant, Relax,
                       StratQuant, Until, agents_of, conj, disj, globally, implies, mc_move_prop, state_prop)
from .games import Cgs, FiniteMemoryStrategy, Kripke, next_states


def _move_atom(agent: str, move: str, tag: int) -> Formula:
    return Atom(mc_move_prop(agent, move, tag))


def phi_strat(cgs: Cgs, agent: str, tag: int = 0) -> Formula:
    """The labelling by ``mov_<agent>_*`` describes a feasible strategy of ``agent``."""
    if agent not in cgs.agents:
        raise FormulaError(f"unknown agent {agent!r}")
    disjuncts = []
    for q in cgs.states:
        options = []
        for mi in cgs.chc[(q, agent)]:
            others = [Not(_move_atom(agent, ml, tag)) for ml in cgs.moves if ml != mi]
            options.append(conj([_move_atom(agent, mi, tag)] + others))
        disjuncts.append(And(Atom(state_prop(str(q))), disj(options)))
    return disj(disjuncts)


def phi_out(cgs: Cgs, coalition: Iterable[str], tags: Mapping[str, int] = None) -> Formula:
    """Path formula characterising the outcomes of the strategies labelled for ``coalition``."""
    tags = tags or {}
    coalition = [a for a in cgs.agents if a in set(coalition)]
    unknown = set(coalition) - set(cgs.agents)
    if unknown:
        raise FormulaError(f"unknown agents {sorted(unknown)}")
    clauses = []
    for q in cgs.states:
        for vec in _coalition_moves(cgs, q, coalition):
            partial = dict(zip(coalition, vec))
            guard = conj([Atom(state_prop(str(q)))] + [_move_atom(a, m, tags.get(a, 0)) for a, m in partial.items()])
            targets = [t for t in cgs.states if t in next_states(cgs, q, coalition, partial)]
            clauses.append(implies(guard, Next(disj([Atom(state_prop(str(t))) for t in targets]))))
    return globally(conj(clauses))


def _coalition_moves(cgs: Cgs, q, coalition: list[str]):
    return itertools.product(*(cgs.chc[(q, a)] for a in coalition))


@dataclass
class McTranslation:
    source: Formula
    cgs: Cgs
    context: tuple
    output: Formula
    allocated: dict = field(default_factory=dict)  # quantifier index -> move propositions


def translate_mc(formula: Formula, context: Iterable[str], cgs: Cgs) -> Formula:
    return translate_mc_unit(formula, context, cgs).output


def translate_mc_unit(formula: Formula, context: Iterable[str], cgs: Cgs) -> McTranslation:
    context = tuple(a for a in cgs.agents if a in set(context))
    missing = (agents_of(formula) | set(context)) - set(cgs.agents)
    if missing:
        raise FormulaError(f"agents {sorted(missing)} are not in the game")
    unit = McTranslation(formula, cgs, context, Const(True))
    counter = [0]

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
            coalition = [a for a in cgs.agents if a in f.coalition]
            inner_tags = dict(tags)
            props = []
            if coalition:
                counter[0] += 1
                tag = counter[0]
                for a in coalition:
                    inner_tags[a] = tag
                    props.extend(mc_move_prop(a, m, tag) for m in cgs.moves)
                unit.allocated[tag] = props
            inner_ctx = ctx | set(coalition)
            body = path(f.sub, inner_ctx, inner_tags)
            out_formula = PathQ(Quant.FORALL, implies(phi_out(cgs, inner_ctx, inner_tags), body))
            if not coalition:
                return out_formula
            strat_part = conj([AG(phi_strat(cgs, a, inner_tags[a])) for a in coalition])
            result: Formula = And(strat_part, out_formula)
            for p in reversed(props):
                result = PropQ(Quant.EXISTS, p, result)
            return result
        if isinstance(f, (Next, Until)):
            raise FormulaError("temporal operator outside a strategy quantifier")
        raise FormulaError(f"unsupported construct {type(f).__name__}")

    def path(f: Formula, ctx: frozenset, tags: dict) -> Formula:
        if isinstance(f, Next):
            return Next(state(f.sub, ctx, tags))
        if isinstance(f, Until):
            return Until(state(f.left, ctx, tags), state(f.right, ctx, tags))
        if isinstance(f, Not):
            return Not(path(f.sub, ctx, tags))
        return state(f, ctx, tags)

    unit.output = state(formula, frozenset(context), {a: 0 for a in context})
    return unit


def label_context(k: Kripke, context: Mapping[str, FiniteMemoryStrategy]) -> Kripke:
    """Product of ``k`` with the context's memories, each node labelled with the
    move every context agent plays there (``mov_<a>_<m>``)."""
    order = sorted(context)
    if not order:
        return k
    mem_vectors = list(itertools.product(*(range(context[a].size) for a in order)))
    states = [(q, mv) for mv in mem_vectors for q in k.states]
    succ = {}
    labels = {}
    for q, mv in states:
        succ[(q, mv)] = tuple((r, tuple(context[a].next_memory(m, r) for a, m in zip(order, mv)))
                              for r in k.succ[q])
        extra = {mc_move_prop(a, context[a].move(m, q)) for a, m in zip(order, mv)}
        labels[(q, mv)] = frozenset(k.labels.get(q, frozenset())) | extra
    zero = tuple(0 for _ in order)
    init = (k.initial, zero) if k.initial is not None else None
    return Kripke(tuple(states), succ, labels, init).restrict(init) if init is not None else \
        Kripke(tuple(states), succ, labels, None)
