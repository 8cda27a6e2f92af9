"""Kripke structures, concurrent game structures and finite-memory strategies."""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from .formulas import Formula, agents_of, ba_move_prop, is_reserved, state_prop, turn_prop

State = Hashable


class GameError(ValueError):
    """Structural validation failure; ``key`` names the offending JSON key."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


@dataclass(frozen=True)
class Kripke:
    states: tuple
    succ: Mapping[State, tuple]
    labels: Mapping[State, frozenset]
    initial: Optional[State] = None

    def __post_init__(self):
        if not self.states:
            raise GameError("a Kripke structure needs at least one state", "states")
        known = set(self.states)
        for q in self.states:
            nxt = self.succ.get(q, ())
            if not nxt:
                raise GameError(f"state {q!r} has no successor", "succ")
            for r in nxt:
                if r not in known:
                    raise GameError(f"unknown successor {r!r} of {q!r}", "succ")

    def props(self) -> set[str]:
        out: set[str] = set()
        for q in self.states:
            out |= self.labels.get(q, frozenset())
        return out

    def reachable(self, start: State) -> list:
        seen = {start}
        order = [start]
        for q in order:
            for r in self.succ[q]:
                if r not in seen:
                    seen.add(r)
                    order.append(r)
        return order

    def restrict(self, start: State) -> "Kripke":
        keep = self.reachable(start)
        return Kripke(tuple(keep), {q: self.succ[q] for q in keep},
                      {q: self.labels.get(q, frozenset()) for q in keep}, start)

    def with_labels(self, extra: Mapping[State, Iterable[str]]) -> "Kripke":
        labels = {q: frozenset(self.labels.get(q, frozenset())) | frozenset(extra.get(q, ())) for q in self.states}
        return Kripke(self.states, self.succ, labels, self.initial)


def kripke(succ: Mapping[State, Sequence[State]], labels: Mapping[State, Iterable[str]] = None,
           initial: Optional[State] = None) -> Kripke:
    """Convenience constructor; state order follows ``succ``."""
    labels = labels or {}
    states = tuple(succ)
    return Kripke(states, {q: tuple(dict.fromkeys(succ[q])) for q in states},
                  {q: frozenset(labels.get(q, ())) for q in states}, initial)


@dataclass(frozen=True)
class Cgs:
    states: tuple
    agents: tuple
    moves: tuple
    labels: Mapping[State, frozenset]
    chc: Mapping[tuple, tuple]
    edg: Mapping[tuple, State]
    owner: Optional[Mapping[State, str]] = None
    initial: Optional[State] = None

    def __post_init__(self):
        if not self.states:
            raise GameError("no states", "states")
        if len(set(self.agents)) != len(self.agents):
            raise GameError("duplicate agent", "agents")
        known = set(self.states)
        for q in self.states:
            for a in self.agents:
                opts = self.chc.get((q, a))
                if not opts:
                    raise GameError(f"empty or missing choice set for {q}/{a}", "chc")
                for m in opts:
                    if m not in self.moves:
                        raise GameError(f"move {m!r} not in the move alphabet", "chc")
            for vec in self.vectors(q):
                if (q, vec) not in self.edg:
                    raise GameError(f"missing transition for {q}/{','.join(map(str, vec))}", "edg")
                if self.edg[(q, vec)] not in known:
                    raise GameError(f"unknown target {self.edg[(q, vec)]!r}", "edg")
        for (q, vec) in self.edg:
            if q not in known or len(vec) != len(self.agents) or any(
                    m not in self.chc[(q, a)] for a, m in zip(self.agents, vec)):
                raise GameError(f"transition {q}/{vec} outside the choice sets", "edg")
        if self.owner is not None:
            for q in self.states:
                a = self.owner.get(q)
                if a not in self.agents:
                    raise GameError(f"state {q!r} has no valid owner", "owner")
                i = self.agents.index(a)
                by_owner: dict = {}
                for vec in self.vectors(q):
                    t = self.edg[(q, vec)]
                    if by_owner.setdefault(vec[i], t) != t:
                        raise GameError(f"state {q!r} is not controlled by {a!r} alone", "owner")

    @property
    def turn_based(self) -> bool:
        return self.owner is not None

    def vectors(self, q: State, fixed: Mapping[str, str] = None):
        """All move vectors at ``q`` (agents in order), optionally with some agents fixed."""
        fixed = fixed or {}
        pools = []
        for a in self.agents:
            if a in fixed:
                if fixed[a] not in self.chc[(q, a)]:
                    raise GameError(f"move {fixed[a]!r} not available to {a} at {q}", "chc")
                pools.append((fixed[a],))
            else:
                pools.append(self.chc[(q, a)])
        return itertools.product(*pools)

    def successors(self, q: State) -> tuple:
        return tuple(dict.fromkeys(self.edg[(q, v)] for v in self.vectors(q)))

    def index(self, agent: str) -> int:
        return self.agents.index(agent)


def next_states(cgs: Cgs, q: State, coalition: Iterable[str], partial_move: Mapping[str, str]) -> set:
    """Successors reachable from ``q`` when ``coalition`` plays ``partial_move``."""
    coalition = set(coalition)
    fixed = {a: m for a, m in partial_move.items() if a in coalition}
    return {cgs.edg[(q, v)] for v in cgs.vectors(q, fixed)}


def underlying_kripke(cgs: Cgs) -> Kripke:
    """Kripke structure of ``cgs`` with ``st_q`` state markers and ``turn_a`` owner markers."""
    user = set()
    for q in cgs.states:
        user |= cgs.labels.get(q, frozenset())
    for p in user:
        if is_reserved(p):
            raise GameError(f"label {p!r} clashes with a generated proposition", "labels")
    labels = {}
    for q in cgs.states:
        lab = set(cgs.labels.get(q, frozenset())) | {state_prop(str(q))}
        if cgs.owner is not None:
            lab.add(turn_prop(cgs.owner[q]))
        labels[q] = frozenset(lab)
    return Kripke(cgs.states, {q: cgs.successors(q) for q in cgs.states}, labels, cgs.initial)


def move_annotated_kripke(cgs: Cgs, root: State) -> Kripke:
    """Kripke structure whose unwinding is the move-labelled tree of the bounded-alphabet encoding.

    States are pairs (q, incoming move vector); every move vector of the full
    alphabet yields its own child, labelled ``mov_<agent>_<move>`` for each
    component.  The root carries no move labels.
    """
    for q in cgs.states:
        for a in cgs.agents:
            if tuple(cgs.chc[(q, a)]) != tuple(cgs.moves):
                raise GameError("bounded-alphabet encoding needs every move available everywhere", "chc")
    all_vecs = list(itertools.product(cgs.moves, repeat=len(cgs.agents)))
    start = (root, None)
    states = [start]
    succ = {}
    labels = {}
    for node in states:
        q, vec = node
        lab = set(cgs.labels.get(q, frozenset())) | {state_prop(str(q))}
        if vec is not None:
            lab |= {ba_move_prop(a, m) for a, m in zip(cgs.agents, vec)}
        labels[node] = frozenset(lab)
        kids = []
        for v in all_vecs:
            child = (cgs.edg[(q, v)], v)
            kids.append(child)
            if child not in succ and child not in states:
                states.append(child)
        succ[node] = tuple(kids)
    return Kripke(tuple(states), succ, labels, start)


# ---------------------------------------------------------------------------
# strategies


@dataclass(frozen=True)
class FiniteMemoryStrategy:
    """Moore machine: memory starts at 0; ``choose[(m, q)]`` is the move at the
    current state ``q``; after moving to ``q'`` the memory becomes ``update[(m, q')]``."""

    agent: str
    size: int
    choose: Mapping[tuple, str]
    update: Mapping[tuple, int] = field(default_factory=dict)

    @property
    def memoryless(self) -> bool:
        return self.size == 1

    def next_memory(self, m: int, q: State) -> int:
        if self.size == 1:
            return 0
        return self.update[(m, q)]

    def move(self, m: int, q: State) -> str:
        return self.choose[(m, q)]

    def play(self, history: Sequence[State]) -> str:
        m = 0
        for q in history[1:]:
            m = self.next_memory(m, q)
        return self.move(m, history[-1])

    def validate(self, cgs: Cgs) -> None:
        for m in range(self.size):
            for q in cgs.states:
                if self.choose[(m, q)] not in cgs.chc[(q, self.agent)]:
                    raise GameError(f"strategy for {self.agent} plays an unavailable move at {q}", "chc")
                if self.size > 1 and not 0 <= self.update[(m, q)] < self.size:
                    raise GameError("memory update out of range")

    def rename(self, agent: str) -> "FiniteMemoryStrategy":
        return FiniteMemoryStrategy(agent, self.size, self.choose, self.update)


def memoryless_strategy(agent: str, table: Mapping[State, str]) -> FiniteMemoryStrategy:
    return FiniteMemoryStrategy(agent, 1, {(0, q): m for q, m in table.items()})


def enumerate_strategies(cgs: Cgs, agent: str, size: int):
    """All strategies of ``agent`` with exactly ``size`` memory states, in canonical order."""
    states = cgs.states
    choice_pools = [cgs.chc[(q, agent)] for q in states] * size
    keys = [(m, q) for m in range(size) for q in states]
    upd_keys = keys if size > 1 else []
    for moves in itertools.product(*choice_pools):
        choose = dict(zip(keys, moves))
        for ups in itertools.product(range(size), repeat=len(upd_keys)):
            yield FiniteMemoryStrategy(agent, size, choose, dict(zip(upd_keys, ups)))


def strategies_up_to(cgs: Cgs, agent: str, bound: int):
    for size in range(1, bound + 1):
        yield from enumerate_strategies(cgs, agent, size)


class StrategyContext(dict):
    """Map agent -> FiniteMemoryStrategy; ``dom`` is the context domain."""

    @property
    def dom(self) -> frozenset:
        return frozenset(self)

    def restrict(self, coalition: Iterable[str]) -> "StrategyContext":
        keep = set(coalition)
        return StrategyContext({a: s for a, s in self.items() if a in keep})

    def without(self, coalition: Iterable[str]) -> "StrategyContext":
        drop = set(coalition)
        return StrategyContext({a: s for a, s in self.items() if a not in drop})

    def compose(self, other: Mapping[str, FiniteMemoryStrategy]) -> "StrategyContext":
        """``self o other``: strategies of ``self`` win on the overlap."""
        out = StrategyContext(other)
        out.update(self)
        return out


def outcome_product(cgs: Cgs, q0: State, context: Mapping[str, FiniteMemoryStrategy],
                    memory: Mapping[str, int] = None) -> Kripke:
    """Product of ``cgs`` with the memory of ``context``, reachable from ``q0``.

    States are ``(q, memories)`` with memories ordered as ``sorted(context)``;
    its paths from the initial state project exactly onto the outcomes.
    """
    order = sorted(context)
    memory = memory or {}
    start = (q0, tuple(memory.get(a, 0) for a in order))
    succ: dict = {}
    labels: dict = {}
    queue = [start]
    seen = {start}
    for node in queue:
        q, mems = node
        labels[node] = frozenset(cgs.labels.get(q, frozenset()))
        fixed = {a: context[a].move(m, q) for a, m in zip(order, mems)}
        kids = []
        for tgt in dict.fromkeys(cgs.edg[(q, v)] for v in cgs.vectors(q, fixed)):
            child = (tgt, tuple(context[a].next_memory(m, tgt) for a, m in zip(order, mems)))
            kids.append(child)
            if child not in seen:
                seen.add(child)
                queue.append(child)
        succ[node] = tuple(kids)
    return Kripke(tuple(queue), succ, labels, start)


def reduce_agents(cgs: Cgs, formula: Formula, collapsed: str = "a0") -> Cgs:
    """Keep the agents of ``formula`` and merge all others into one agent.

    The merged agent plays tuples of the original moves (written ``m1_m2``).
    With no other agent an inert one-move agent is added.
    """
    keep = [a for a in cgs.agents if a in agents_of(formula)]
    missing = agents_of(formula) - set(cgs.agents)
    if missing:
        raise GameError(f"agents {sorted(missing)} not in the game", "agents")
    rest = [a for a in cgs.agents if a not in keep]
    if len(rest) == 1:
        return cgs
    if not rest:
        agents = tuple(keep) + (collapsed,)
        moves = tuple(cgs.moves) if "0" in cgs.moves else tuple(cgs.moves) + ("0",)
        chc = dict(cgs.chc)
        edg = {}
        for q in cgs.states:
            chc[(q, collapsed)] = ("0",)
            for v in cgs.vectors(q):
                edg[(q, v + ("0",))] = cgs.edg[(q, v)]
        owner = None
        if cgs.owner is not None:
            owner = dict(cgs.owner)
        return Cgs(cgs.states, agents, moves, cgs.labels, chc, edg, owner, cgs.initial)
    agents = tuple(keep) + (collapsed,)
    ki = [cgs.index(a) for a in keep]
    ri = [cgs.index(a) for a in rest]
    chc = {}
    edg = {}
    moves = set(cgs.moves)
    for q in cgs.states:
        for a in keep:
            chc[(q, a)] = cgs.chc[(q, a)]
        tuples = ["_".join(t) for t in itertools.product(*(cgs.chc[(q, a)] for a in rest))]
        chc[(q, collapsed)] = tuple(tuples)
        moves.update(tuples)
        for v in cgs.vectors(q):
            nv = tuple(v[i] for i in ki) + ("_".join(v[i] for i in ri),)
            edg[(q, nv)] = cgs.edg[(q, v)]
    owner = None
    if cgs.owner is not None:
        owner = {q: (a if a in keep else collapsed) for q, a in cgs.owner.items()}
    ordered_moves = tuple(sorted(moves, key=lambda m: (len(m), m)))
    return Cgs(cgs.states, agents, ordered_moves, cgs.labels, chc, edg, owner, cgs.initial)


# ---------------------------------------------------------------------------
# unwinding


@dataclass(frozen=True)
class TreePrefix:
    nodes: tuple  # histories, as tuples of states, prefix-closed
    labels: Mapping[tuple, frozenset]

    def children(self, node: tuple) -> list:
        return [n for n in self.nodes if len(n) == len(node) + 1 and n[:-1] == node]


def unwind(k: Kripke, q: State, depth: int) -> TreePrefix:
    if depth < 0:
        raise ValueError("depth must be non-negative")
    level = [(q,)]
    nodes = list(level)
    for _ in range(depth):
        level = [h + (r,) for h in level for r in k.succ[h[-1]]]
        nodes.extend(level)
    return TreePrefix(tuple(nodes), {h: k.labels.get(h[-1], frozenset()) for h in nodes})


# ---------------------------------------------------------------------------
# JSON


def cgs_from_dict(doc: Mapping) -> Cgs:
    for key in ("states", "agents", "moves", "chc", "edg"):
        if key not in doc:
            raise GameError("missing key", key)
    states = tuple(str(s) for s in doc["states"])
    agents = tuple(str(a) for a in doc["agents"])
    moves = tuple(str(m) for m in doc["moves"])
    labels = {q: frozenset(doc.get("labels", {}).get(q, ())) for q in states}
    for q in doc.get("labels", {}):
        if q not in states:
            raise GameError(f"unknown state {q!r}", "labels")
    chc = {}
    for key, ms in doc["chc"].items():
        q, _, a = key.partition("/")
        if q not in states or a not in agents:
            raise GameError(f"bad key {key!r}", "chc")
        chc[(q, a)] = tuple(str(m) for m in ms)
    edg = {}
    for key, tgt in doc["edg"].items():
        q, _, vec = key.partition("/")
        if q not in states:
            raise GameError(f"bad key {key!r}", "edg")
        edg[(q, tuple(vec.split(",")))] = str(tgt)
    owner = doc.get("owner")
    if owner is not None:
        owner = {str(q): str(a) for q, a in owner.items()}
    initial = doc.get("initial")
    if initial is not None and initial not in states:
        raise GameError(f"unknown initial state {initial!r}", "initial")
    return Cgs(states, agents, moves, labels, chc, edg, owner, initial)


def cgs_to_dict(cgs: Cgs) -> dict:
    doc = {
        "states": [str(q) for q in cgs.states],
        "agents": list(cgs.agents),
        "moves": list(cgs.moves),
        "labels": {str(q): sorted(cgs.labels.get(q, ())) for q in cgs.states},
        "chc": {f"{q}/{a}": list(cgs.chc[(q, a)]) for q in cgs.states for a in cgs.agents},
        "edg": {f"{q}/{','.join(v)}": str(cgs.edg[(q, v)]) for q in cgs.states for v in cgs.vectors(q)},
    }
    if cgs.owner is not None:
        doc["owner"] = {str(q): a for q, a in cgs.owner.items()}
    if cgs.initial is not None:
        doc["initial"] = str(cgs.initial)
    return doc


def load_cgs(path: str) -> Cgs:
    with open(path, encoding="utf-8") as fh:
        return cgs_from_dict(json.load(fh))


def dump_cgs(cgs: Cgs) -> str:
    return json.dumps(cgs_to_dict(cgs), indent=2, sort_keys=False)


def turn_based_cgs(states: Sequence[str], agents: Sequence[str], owner: Mapping[str, str],
                   succ: Mapping[str, Sequence[str]], labels: Mapping[str, Iterable[str]] = None,
                   initial: Optional[str] = None) -> Cgs:
    """Turn-based game: the owner of ``q`` picks successor number i with move ``i+1``."""
    labels = labels or {}
    width = max(len(succ[q]) for q in states)
    moves = tuple(str(i + 1) for i in range(width))
    chc = {}
    edg = {}
    for q in states:
        for a in agents:
            chc[(q, a)] = moves[:len(succ[q])] if a == owner[q] else ("1",)
        oi = list(agents).index(owner[q])
        for v in itertools.product(*(chc[(q, a)] for a in agents)):
            edg[(q, v)] = succ[q][int(v[oi]) - 1]
    return Cgs(tuple(states), tuple(agents), moves, {q: frozenset(labels.get(q, ())) for q in states},
               chc, edg, dict(owner), initial)


def concurrent_cgs(states: Sequence[str], agents: Sequence[str], moves: Sequence[str],
                   edg: Mapping[tuple, str], labels: Mapping[str, Iterable[str]] = None,
                   chc: Mapping[tuple, Sequence[str]] = None, initial: Optional[str] = None) -> Cgs:
    labels = labels or {}
    full = {(q, a): tuple(moves) for q in states for a in agents}
    if chc:
        full.update({k: tuple(v) for k, v in chc.items()})
    return Cgs(tuple(states), tuple(agents), tuple(moves), {q: frozenset(labels.get(q, ())) for q in states},
               full, dict(edg), None, initial)
