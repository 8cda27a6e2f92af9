"""Bounded satisfiability search for ATLsc and SL.

Candidate structures are generated in canonical form: states are numbered
in breadth-first discovery order from the initial state ``q0``, so each
reachable structure is produced once per numbering.  Every candidate is
handed to a checker; a TRUE verdict yields a model, and the search reports
whether all candidates up to the bound were refuted or some stayed unknown.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .direct import DirectError, check_atlsc_direct, check_sl_direct
from .formulas import (And, Atom, Const, Formula, FormulaError, Next, Not, Or, StratQuant, Until, agents_of,
                       atoms_of, conj, disj, globally, implies, is_reserved, strat, subformulas, temporal_depth)
from .games import Cgs, GameError, move_annotated_kripke, turn_based_cgs, underlying_kripke
from .qctl import check_qctl
from .sat_translate import alphabet_of, padded_agents, translate_sat_ba, translate_sat_tb, translate_sl_ba, \
    translate_sl_tb
from .verdict import Value, Verdict

MODEL, NO_MODEL, UNKNOWN, ABORTED = "model", "no-model-up-to-bound", "unknown", "aborted"


@dataclass
class SearchReport:
    outcome: str
    max_states: int
    budget: int
    cgs: Optional[Cgs] = None
    state: Optional[str] = None
    candidates: int = 0
    checked: int = 0
    unknown: int = 0
    elapsed: float = 0.0
    verdict: Optional[Verdict] = None
    disagreements: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.outcome == MODEL

    def to_json(self) -> dict:
        from .games import cgs_to_dict

        return {
            "outcome": self.outcome,
            "max_states": self.max_states,
            "budget": self.budget,
            "state": self.state,
            "model": cgs_to_dict(self.cgs) if self.cgs is not None else None,
            "candidates": self.candidates,
            "checked": self.checked,
            "unknown": self.unknown,
            "elapsed": round(self.elapsed, 3),
        }


def _name(i: int) -> str:
    return f"q{i}"


# ---------------------------------------------------------------------------
# local constraints


def _is_prop(f: Formula) -> bool:
    return all(isinstance(g, (Const, Atom, Not, And, Or)) for g in subformulas(f))


def _one_step(f: Formula) -> bool:
    """Boolean combination of propositions and ``<<A>> X prop``."""
    if isinstance(f, (Const, Atom)):
        return True
    if isinstance(f, (Not, And, Or)):
        return all(_one_step(g) for g in f.children())
    if isinstance(f, StratQuant):
        core = f.sub
        while isinstance(core, Not):
            core = core.sub
        if isinstance(core, Next):
            return _is_prop(core.sub)
        if isinstance(core, Until) and core.left == Const(False):
            return _one_step(core.right)
    return False


def _prop_value(f: Formula, label: frozenset) -> bool:
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Atom):
        return f.name in label
    if isinstance(f, Not):
        return not _prop_value(f.sub, label)
    if isinstance(f, And):
        return _prop_value(f.left, label) and _prop_value(f.right, label)
    return _prop_value(f.left, label) or _prop_value(f.right, label)


def _local_value(f: Formula, label: frozenset, power) -> bool:
    """Value of a one-step formula at a node; ``power(coalition, prop)`` decides
    whether the coalition can force the next label to satisfy ``prop``."""
    if isinstance(f, (Const, Atom)):
        return _prop_value(f, label)
    if isinstance(f, Not):
        return not _local_value(f.sub, label, power)
    if isinstance(f, And):
        return _local_value(f.left, label, power) and _local_value(f.right, label, power)
    if isinstance(f, Or):
        return _local_value(f.left, label, power) or _local_value(f.right, label, power)
    core, negated = f.sub, False
    while isinstance(core, Not):
        core, negated = core.sub, not negated
    if isinstance(core, Next):
        target = Not(core.sub) if negated else core.sub
        return power(f.coalition, target)
    value = _local_value(core.right, label, power)
    return value != negated


def _kleene_value(f: Formula, label: frozenset, power) -> Optional[bool]:
    """Like ``_local_value`` with a three-valued ``power``; None is unknown."""
    if isinstance(f, (Const, Atom)):
        return _prop_value(f, label)
    if isinstance(f, Not):
        v = _kleene_value(f.sub, label, power)
        return None if v is None else not v
    if isinstance(f, (And, Or)):
        stop = isinstance(f, Or)
        left = _kleene_value(f.left, label, power)
        if left is stop:
            return stop
        right = _kleene_value(f.right, label, power)
        if right is stop:
            return stop
        return None if left is None or right is None else not stop
    core, negated = f.sub, False
    while isinstance(core, Not):
        core, negated = core.sub, not negated
    if isinstance(core, Next):
        return power(f.coalition, Not(core.sub) if negated else core.sub)
    v = _kleene_value(core.right, label, power)
    return None if v is None else v != negated


def _kleene_any(values) -> Optional[bool]:
    values = list(values)
    if True in values:
        return True
    return None if None in values else False


def _kleene_all(values) -> Optional[bool]:
    values = list(values)
    if False in values:
        return False
    return None if None in values else True


def _top_conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return _top_conjuncts(f.left) + _top_conjuncts(f.right)
    return [f]


def _always_body(f: Formula) -> Optional[Formula]:
    """``chi`` when ``f`` is ``<<>> G chi``."""
    if isinstance(f, StratQuant) and not f.coalition and isinstance(f.sub, Not):
        inner = f.sub.sub
        if isinstance(inner, Until) and inner.left == Const(True) and isinstance(inner.right, Not):
            return inner.right.sub
    return None


def _settled(f: Formula) -> bool:
    """Whether a candidate passing ``_locally_ok`` certainly satisfies the top conjunct ``f``."""
    body = _always_body(f)
    if body is not None:
        return all(_one_step(g) for g in _top_conjuncts(body))
    return _one_step(f)


@dataclass
class _Constraints:
    everywhere: list
    at_root: list
    _split: dict = field(default_factory=dict)
    _labels: dict = field(default_factory=dict)

    @staticmethod
    def of(formula: Formula) -> "_Constraints":
        everywhere, at_root = [], []
        for c in _top_conjuncts(formula):
            body = _always_body(c)
            if body is not None:
                everywhere.extend(g for g in _top_conjuncts(body) if _one_step(g))
            elif _one_step(c):
                at_root.append(c)
        return _Constraints(everywhere, at_root)

    def _active(self, root: bool) -> tuple[list, list]:
        """(propositional, modal) constraints at the root or elsewhere."""
        hit = self._split.get(root)
        if hit is None:
            active = self.everywhere + (self.at_root if root else [])
            hit = self._split[root] = ([c for c in active if _is_prop(c)], [c for c in active if not _is_prop(c)])
        return hit

    def state_ok(self, index: int, label: frozenset, power) -> bool:
        """False when a modal one-step constraint at state ``index`` (0 is the
        root) certainly fails; ``power`` may answer None for unknown."""
        return all(_kleene_value(c, label, power) is not False for c in self._active(index == 0)[1])

    @staticmethod
    def residual(formula: Formula) -> Formula:
        """Top conjuncts of ``formula`` that the local checks do not settle exactly."""
        rest = [c for c in _top_conjuncts(formula) if not _settled(c)]
        if not rest:
            return Const(True)
        out = rest[0]
        for c in rest[1:]:
            out = And(out, c)
        return out

    def label_ok(self, label: frozenset, root: bool) -> bool:
        key = (label, root)
        hit = self._labels.get(key)
        if hit is None:
            hit = self._labels[key] = all(_prop_value(c, label) for c in self._active(root)[0])
        return hit


# ---------------------------------------------------------------------------
# candidate generation


def _labels(props: Sequence[str]) -> list[frozenset]:
    props = sorted(props)
    return [frozenset(c) for r in range(len(props) + 1) for c in itertools.combinations(props, r)]


def _extend(discovered: int, targets: Sequence[int], n: int) -> Optional[int]:
    """New discovery count if ``targets`` (in first-appearance order) respect BFS numbering."""
    for t in targets:
        if t >= n:
            return None
        if t == discovered:
            discovered += 1
        elif t > discovered:
            return None
    return discovered


def _generate(n: int, labels: list, edge_options, depth: Optional[int], default_edges,
              label_filter=None, state_ok=None) -> Iterator[tuple]:
    """Yield (labels, edges) per state, states in canonical BFS order.

    ``edge_options(i)`` lists pairs (edges, targets in first-appearance order).
    States deeper than ``depth`` (BFS distance) keep the empty label; states
    at distance ``depth`` or more keep ``default_edges``: past the horizon of
    an X-only formula nothing else is observable.  Labels are chosen before
    edges; ``state_ok(j, labs, edges)`` is asked about every state ``j`` whose
    edges are known, with ``None`` for labels not chosen yet, and a state is
    only rejected when its constraints fail whatever those labels will be.
    """
    labs: list = [None] * n
    edges: list = [None] * n
    dist = [0] + [None] * (n - 1)

    def go(i: int, discovered: int):
        if i == n:
            if discovered == n:
                yield tuple(labs), tuple(edges)
            return
        if i >= discovered:
            return
        d = dist[i]
        lab_opts = labels if depth is None or d <= depth else [frozenset()]
        if label_filter is not None:
            lab_opts = [lab for lab in lab_opts if label_filter(lab, i == 0)]
        edge_opts = edge_options(i) if depth is None or d < depth else [default_edges(i)]
        for lab in lab_opts:
            labs[i] = lab
            if state_ok is not None and not all(state_ok(j, labs, edges) for j in range(i)):
                continue
            for e, targets in edge_opts:
                order = list(dict.fromkeys(targets))
                nd = _extend(discovered, order, n)
                if nd is None:
                    continue
                edges[i] = e
                if state_ok is not None and not state_ok(i, labs, edges):
                    continue
                for t in range(discovered, nd):
                    dist[t] = d + 1
                yield from go(i + 1, nd)
        labs[i] = None

    yield from go(0, 1)


def _nonempty_subsets(n: int) -> list[tuple]:
    return [c for r in range(1, n + 1) for c in itertools.combinations(range(n), r)]


def turn_based_candidates(agents: Sequence[str], props: Sequence[str], n: int,
                          depth: Optional[int] = None, label_filter=None, local_ok=None) -> Iterator[Cgs]:
    """Canonical turn-based structures with exactly ``n`` reachable states.

    A state with a single successor is owned by the first agent: every agent
    has exactly one move there, so its owner cannot be observed.
    """
    labels = _labels(props)
    agents = tuple(agents)
    options = [((o, s), s) for s in _nonempty_subsets(n) for o in (agents if len(s) > 1 else agents[:1])]

    def edge_options(i):
        return options

    def default(i):
        return (agents[0], (i,)), (i,)

    def state_ok(j, labs, edges):
        owner, targets = edges[j]

        def power(coalition, prop):
            hits = [None if labs[t] is None else _prop_value(prop, labs[t]) for t in targets]
            return _kleene_any(hits) if owner in coalition else _kleene_all(hits)

        return local_ok(j, labs[j], power)

    checker = state_ok if local_ok is not None else None
    for labs, edges in _generate(n, labels, edge_options, depth, default, label_filter, checker):
        states = [_name(i) for i in range(n)]
        yield turn_based_cgs(states, agents, {_name(i): edges[i][0] for i in range(n)},
                             {_name(i): [_name(t) for t in edges[i][1]] for i in range(n)},
                             {_name(i): labs[i] for i in range(n)}, _name(0))


def alphabet_candidates(agents: Sequence[str], props: Sequence[str], alphabet: Sequence[str], n: int,
                        depth: Optional[int] = None, label_filter=None, local_ok=None) -> Iterator[Cgs]:
    """Canonical concurrent structures over the full alphabet with ``n`` reachable states."""
    labels = _labels(props)
    agents = tuple(agents)
    vectors = list(itertools.product(alphabet, repeat=len(agents)))

    def edge_options(i):
        return [(e, e) for e in itertools.product(range(n), repeat=len(vectors))]

    def default(i):
        e = tuple(i for _ in vectors)
        return e, e

    def state_ok(j, labs, edges):
        row = edges[j]

        def power(coalition, prop):
            fixed = [k for k, a in enumerate(agents) if a in coalition]
            groups: dict = {}
            for v, t in zip(vectors, row):
                groups.setdefault(tuple(v[k] for k in fixed), []).append(
                    None if labs[t] is None else _prop_value(prop, labs[t]))
            return _kleene_any(_kleene_all(g) for g in groups.values())

        return local_ok(j, labs[j], power)

    checker = state_ok if local_ok is not None else None
    for labs, edges in _generate(n, labels, edge_options, depth, default, label_filter, checker):
        states = [_name(i) for i in range(n)]
        edg = {(_name(i), v): _name(edges[i][j]) for i in range(n) for j, v in enumerate(vectors)}
        yield Cgs(tuple(states), agents, tuple(alphabet), {_name(i): labs[i] for i in range(n)},
                  {(s, a): tuple(alphabet) for s in states for a in agents}, edg, None, _name(0))


def count_turn_based(agents: Sequence[str], props: Sequence[str], n: int) -> int:
    return sum(1 for _ in turn_based_candidates(agents, props, n))


def count_alphabet(agents: Sequence[str], props: Sequence[str], alphabet: Sequence[str], n: int) -> int:
    return sum(1 for _ in alphabet_candidates(agents, props, alphabet, n))


# ---------------------------------------------------------------------------
# local pruning on complete candidates


def _locally_ok(cgs: Cgs, constraints: _Constraints) -> bool:
    root = cgs.initial
    for q in cgs.states:
        active = constraints.everywhere + (constraints.at_root if q == root else [])
        if not active:
            continue
        def power(coalition, prop, q=q):
            fixed_agents = [a for a in cgs.agents if a in coalition]
            for moves in itertools.product(*(cgs.chc[(q, a)] for a in fixed_agents)):
                fixed = dict(zip(fixed_agents, moves))
                if all(_prop_value(prop, cgs.labels[cgs.edg[(q, v)]]) for v in cgs.vectors(q, fixed)):
                    return True
            return False

        for c in active:
            if not _local_value(c, cgs.labels[q], power):
                return False
    return True


# ---------------------------------------------------------------------------
# checking


def _logic_of(formula: Formula) -> str:
    from .formulas import Bind, StratVar

    return "sl" if any(isinstance(g, (StratVar, Bind)) for g in subformulas(formula)) else "atlsc"


class CandidateChecker:
    """Checks a formula on candidate structures with the direct or the QCTL* engine."""

    def __init__(self, formula: Formula, agents: Sequence[str], budget: int, engine: str,
                 alphabet: Optional[Sequence[str]] = None, qctl_options: Optional[dict] = None):
        if engine not in ("direct", "qctl", "both"):
            raise ValueError(f"unknown engine {engine!r}")
        self.formula = formula
        self.agents = tuple(agents)
        self.budget = budget
        self.engine = engine
        self.alphabet = alphabet
        self.logic = _logic_of(formula)
        self.qctl_options = qctl_options or {}
        self._translated = None

    def restricted(self, formula: Formula) -> "CandidateChecker":
        """The same checker on an equivalent-on-candidates ``formula``."""
        out = CandidateChecker(formula, self.agents, self.budget, self.engine, self.alphabet, self.qctl_options)
        out.logic = self.logic
        return out

    def translated(self) -> Formula:
        if self._translated is None:
            if self.alphabet is None:
                tr = translate_sl_tb if self.logic == "sl" else translate_sat_tb
                self._translated = tr(self.formula, self.agents)
            elif self.logic == "sl":
                self._translated = translate_sl_ba(self.formula, self.agents, self.alphabet)
            else:
                self._translated = translate_sat_ba(self.formula, self.agents, self.alphabet)
        return self._translated

    def direct(self, cgs: Cgs) -> Verdict:
        if self.logic == "sl":
            return check_sl_direct(cgs, cgs.initial, self.formula, memory_bound=self.budget)
        return check_atlsc_direct(cgs, cgs.initial, self.formula, memory_bound=self.budget)

    def qctl(self, cgs: Cgs) -> Verdict:
        if self.alphabet is None:
            k = underlying_kripke(cgs)
            return check_qctl(k, cgs.initial, self.translated(), budget=self.budget, **self.qctl_options)
        k = move_annotated_kripke(cgs, cgs.initial)
        return check_qctl(k, k.initial, self.translated(), budget=self.budget, **self.qctl_options)

    def __call__(self, cgs: Cgs) -> tuple[Verdict, Optional[tuple]]:
        if self.engine == "direct":
            return self.direct(cgs), None
        if self.engine == "qctl":
            return self.qctl(cgs), None
        d, q = self.direct(cgs), self.qctl(cgs)
        clash = None
        if d.value.definite and q.value.definite and d.value != q.value:
            clash = (d.value, q.value)
        value = d.value if d.value.definite else q.value
        return Verdict(value, d.witness if value is d.value else q.witness, f"direct {d.value.value}, "
                       f"qctl {q.value.value}"), clash


def _search(formula: Formula, candidates_for, checker: CandidateChecker, max_states: int, budget: int,
            max_candidates: Optional[int]) -> SearchReport:
    start = time.perf_counter()
    constraints = _Constraints.of(formula)
    report = SearchReport(NO_MODEL, max_states, budget)
    # conjuncts settled by the local checks need not be re-checked per candidate
    checker = checker.restricted(constraints.residual(formula))
    for n in range(1, max_states + 1):
        for cgs in candidates_for(n, constraints):
            report.candidates += 1
            if max_candidates is not None and report.candidates > max_candidates:
                report.outcome = ABORTED
                report.elapsed = time.perf_counter() - start
                return report
            if not _locally_ok(cgs, constraints):
                continue
            report.checked += 1
            verdict, clash = checker(cgs)
            if clash is not None:
                report.disagreements.append((cgs, clash))
            if verdict.is_true:
                report.outcome = MODEL
                report.cgs = cgs
                report.state = cgs.initial
                report.verdict = verdict
                report.elapsed = time.perf_counter() - start
                return report
            if verdict.is_unknown:
                report.unknown += 1
    if report.unknown:
        report.outcome = UNKNOWN
    report.elapsed = time.perf_counter() - start
    return report


def _check_closed(formula: Formula) -> None:
    for p in atoms_of(formula):
        if is_reserved(p):
            raise FormulaError(f"proposition {p!r} uses a reserved prefix")


def sat_turn_based(formula: Formula, max_states: int = 4, budget: int = 1, engine: str = "direct",
                   agents: Optional[Sequence[str]] = None, max_candidates: Optional[int] = None,
                   **qctl_options) -> SearchReport:
    """Search for a turn-based model with at most ``max_states`` states."""
    _check_closed(formula)
    logic = _logic_of(formula)
    if agents is None:
        agents = sorted(agents_of(formula)) if logic == "sl" else padded_agents(formula)
    if not agents:
        agents = ("a0",)
    props = sorted(atoms_of(formula))
    depth = temporal_depth(formula)
    checker = CandidateChecker(formula, agents, budget, engine, None, qctl_options)

    def candidates(n, constraints):
        return turn_based_candidates(agents, props, n, depth, constraints.label_ok, constraints.state_ok)

    return _search(formula, candidates, checker, max_states, budget, max_candidates)


def sat_bounded_alphabet(formula: Formula, agents: Optional[Sequence[str]] = None, alphabet=2,
                         max_states: int = 3, budget: int = 1, engine: str = "direct",
                         max_candidates: Optional[int] = None, **qctl_options) -> SearchReport:
    """Search for a concurrent model over the alphabet {1..alphabet}."""
    _check_closed(formula)
    moves = alphabet_of(alphabet) if isinstance(alphabet, int) else tuple(alphabet)
    if not moves:
        raise FormulaError("alphabet size must be at least 1")
    logic = _logic_of(formula)
    if agents is None:
        agents = sorted(agents_of(formula)) if logic == "sl" else padded_agents(formula)
    if not agents:
        agents = ("a0",)
    props = sorted(atoms_of(formula))
    depth = temporal_depth(formula)
    checker = CandidateChecker(formula, agents, budget, engine, moves, qctl_options)

    def candidates(n, constraints):
        return alphabet_candidates(agents, props, moves, n, depth, constraints.label_ok, constraints.state_ok)

    return _search(formula, candidates, checker, max_states, budget, max_candidates)


# ---------------------------------------------------------------------------
# game description


def at_prop(q) -> str:
    return f"at_{q}"


def describe_game(cgs: Cgs, props: Optional[Sequence[str]] = None) -> Formula:
    """Formula whose turn-based models behave like ``cgs`` from the state marked ``at_q``."""
    if not cgs.turn_based:
        raise GameError("describe_game needs a turn-based game", "owner")
    if props is None:
        props = sorted(set().union(*(cgs.labels.get(q, frozenset()) for q in cgs.states)))
    marks = {q: Atom(at_prop(q)) for q in cgs.states}
    cells = []
    for q in cgs.states:
        lab = cgs.labels.get(q, frozenset())
        lits = [marks[q]] + [Not(marks[r]) for r in cgs.states if r != q]
        lits += [Atom(p) if p in lab else Not(Atom(p)) for p in props]
        cells.append(conj(lits))
    always = lambda f: strat((), globally(f))  # noqa: E731
    parts = [always(disj(cells))]
    for q in cgs.states:
        own = (cgs.owner[q],)
        succ = set(cgs.successors(q))
        moves = [strat(own, Next(marks[r])) for r in cgs.states if r in succ]
        moves += [Not(strat(own, Next(marks[r]))) for r in cgs.states if r not in succ]
        parts.append(always(implies(marks[q], conj(moves))))
    return conj(parts)
