"""Game-semantic checkers for ATLsc and SL, used as oracles.

* ``check_atl_fixpoint``: classic controllable-predecessor fixpoints, exact
  on the fragment where no quantifier inherits a context it cannot override.
* exact-horizon mode: for formulas whose only temporal operator is ``X``,
  strategies matter on finitely many histories and are enumerated as tables.
* bounded mode: finite-memory strategies up to a memory bound; outcome sets
  are products of the game with the strategies' memories.  Results are
  three-valued.
* ``check_memoryless``: exact for ATLsc0 (opponents stay memoryful) and SL0.
"""
from __future__ import annotations

import itertools
from typing import Callable, Hashable, Mapping, Optional, Sequence

from . import ltl
from .formulas import (And, Atom, Bind, Const, Formula, Next, Not, Or, PathQ, PropQ, Relax, StratQuant, StratVar,
                       Until, free_strategy_vars, subformulas, temporal_depth)
from .games import Cgs, FiniteMemoryStrategy, StrategyContext, outcome_product
from .verdict import Value, Verdict


class DirectError(ValueError):
    pass


def _unsupported(f: Formula):
    return DirectError(f"unsupported construct {type(f).__name__}")


def _strip_negations(path: Formula) -> tuple[Formula, bool]:
    negated = False
    while isinstance(path, Not):
        path = path.sub
        negated = not negated
    return path, negated


def _has_quantifier(f: Formula) -> bool:
    return any(isinstance(g, (StratQuant, StratVar, Bind, Relax)) for g in subformulas(f))


def strategy_to_json(s: FiniteMemoryStrategy) -> dict:
    return {
        "agent": s.agent,
        "size": s.size,
        "choose": {f"{m}/{q}": mv for (m, q), mv in sorted(s.choose.items(), key=str)},
        "update": {f"{m}/{q}": n for (m, q), n in sorted(s.update.items(), key=str)},
    }


# ---------------------------------------------------------------------------
# classic ATL


def _check_atl_fragment(f: Formula, ctx: frozenset = frozenset()) -> None:
    if isinstance(f, StratQuant):
        if not ctx <= set(f.coalition):
            raise DirectError("quantifier inherits a context it does not override; outside the ATL fragment")
        _check_atl_fragment(f.sub, frozenset(f.coalition))
        return
    if isinstance(f, Relax):
        _check_atl_fragment(f.sub, ctx - set(f.coalition))
        return
    if isinstance(f, (StratVar, Bind, PropQ, PathQ)):
        raise _unsupported(f)
    for g in f.children():
        _check_atl_fragment(g, ctx)


def pre(cgs: Cgs, coalition: Sequence[str], target: frozenset) -> frozenset:
    """States where ``coalition`` can force the next state into ``target``."""
    out = set()
    for q in cgs.states:
        pools = [cgs.chc[(q, a)] for a in coalition]
        for moves in itertools.product(*pools):
            fixed = dict(zip(coalition, moves))
            if all(cgs.edg[(q, v)] in target for v in cgs.vectors(q, fixed)):
                out.add(q)
                break
    return frozenset(out)


def atl_states(cgs: Cgs, f: Formula, memo: Optional[dict] = None) -> frozenset:
    """States satisfying an ATL-shaped formula."""
    memo = {} if memo is None else memo
    if f in memo:
        return memo[f]
    every = frozenset(cgs.states)
    if isinstance(f, Const):
        res = every if f.value else frozenset()
    elif isinstance(f, Atom):
        res = frozenset(q for q in cgs.states if f.name in cgs.labels.get(q, ()))
    elif isinstance(f, Not):
        res = every - atl_states(cgs, f.sub, memo)
    elif isinstance(f, And):
        res = atl_states(cgs, f.left, memo) & atl_states(cgs, f.right, memo)
    elif isinstance(f, Or):
        res = atl_states(cgs, f.left, memo) | atl_states(cgs, f.right, memo)
    elif isinstance(f, Relax):
        res = atl_states(cgs, f.sub, memo)
    elif isinstance(f, StratQuant):
        coalition = [a for a in cgs.agents if a in f.coalition]
        core, negated = _strip_negations(f.sub)
        if isinstance(core, Next):
            s = atl_states(cgs, core.sub, memo)
            res = pre(cgs, coalition, every - s if negated else s)
        elif isinstance(core, Until) and core.left == Const(False):
            s = atl_states(cgs, core.right, memo)
            res = every - s if negated else s
        elif isinstance(core, Until):
            a = atl_states(cgs, core.left, memo)
            b = atl_states(cgs, core.right, memo)
            if not negated:
                z: frozenset = frozenset()
                while True:
                    nz = b | (a & pre(cgs, coalition, z))
                    if nz == z:
                        break
                    z = nz
            else:
                # not (a U b) == (not b) W (not a and not b)
                z = every
                while True:
                    nz = (every - b) & ((every - a) | pre(cgs, coalition, z))
                    if nz == z:
                        break
                    z = nz
            res = z
        else:
            res = atl_states(cgs, core, memo)
            res = every - res if negated else res
    else:
        raise _unsupported(f)
    memo[f] = res
    return res


def check_atl_fixpoint(cgs: Cgs, state: Hashable, formula: Formula) -> bool:
    _check_atl_fragment(formula)
    if state not in cgs.states:
        raise DirectError(f"unknown state {state!r}")
    return state in atl_states(cgs, formula)


# ---------------------------------------------------------------------------
# exact horizon: strategies as tables over histories


def _machine_fn(s: FiniteMemoryStrategy, m0: int = 0) -> Callable[[tuple], str]:
    def play(h: tuple) -> str:
        m = m0
        for q in h[1:]:
            m = s.next_memory(m, q)
        return s.move(m, h[-1])

    return play


class HorizonEngine:
    """Exact evaluation of X-only formulas at histories starting at a root."""

    def __init__(self, cgs: Cgs, limit: int = 1 << 16):
        self.cgs = cgs
        self.limit = limit
        self.tables = 0

    def histories(self, h: tuple, depth: int) -> list[tuple]:
        """Histories extending ``h`` by fewer than ``depth`` steps."""
        out = []
        frontier = [h]
        for _ in range(depth):
            out.extend(frontier)
            frontier = [g + (r,) for g in frontier for r in self.cgs.successors(g[-1])]
        return out

    def _tables(self, keys: list, pools: list):
        size = 1
        for p in pools:
            size *= len(p)
            if size > self.limit:
                raise DirectError(f"more than {self.limit} strategy tables")
        for moves in itertools.product(*pools):
            self.tables += 1
            yield dict(zip(keys, moves))

    def clamp(self, agent: str, q, move: str) -> str:
        chc = self.cgs.chc[(q, agent)]
        if move in chc:
            return move
        return min(chc, key=self.cgs.moves.index)

    # ATLsc

    def atl(self, h: tuple, ctx: Mapping[str, Callable], f: Formula) -> bool:
        if isinstance(f, Const):
            return f.value
        if isinstance(f, Atom):
            return f.name in self.cgs.labels.get(h[-1], ())
        if isinstance(f, Not):
            return not self.atl(h, ctx, f.sub)
        if isinstance(f, And):
            return self.atl(h, ctx, f.left) and self.atl(h, ctx, f.right)
        if isinstance(f, Or):
            return self.atl(h, ctx, f.left) or self.atl(h, ctx, f.right)
        if isinstance(f, Relax):
            drop = set(f.coalition)
            return self.atl(h, {a: s for a, s in ctx.items() if a not in drop}, f.sub)
        if isinstance(f, StratQuant):
            return self._quant(h, ctx, f)
        raise _unsupported(f)

    def _quant(self, h: tuple, ctx: Mapping[str, Callable], f: StratQuant) -> bool:
        depth = temporal_depth(f.sub)
        if depth is None:
            raise DirectError("exact-horizon mode needs a formula without until")
        coalition = [a for a in self.cgs.agents if a in f.coalition]
        hist = self.histories(h, depth) if coalition else []
        keys = [(a, g) for a in coalition for g in hist]
        pools = [self.cgs.chc[(g[-1], a)] for a, g in keys]
        core, negated = _strip_negations(f.sub)
        for table in self._tables(keys, pools):
            inner = dict(ctx)
            for a in coalition:
                inner[a] = (lambda a: lambda g: table[(a, g)])(a)
            if self._all_outcomes(h, inner, core, negated):
                return True
        return False

    def _all_outcomes(self, h: tuple, ctx: Mapping[str, Callable], core: Formula, negated: bool) -> bool:
        """Every outcome satisfies ``core`` (or its negation, path by path)."""
        if isinstance(core, Next):
            q = h[-1]
            fixed = {a: s(h) for a, s in ctx.items()}
            succ = dict.fromkeys(self.cgs.edg[(q, v)] for v in self.cgs.vectors(q, fixed))
            return all(self.atl(h + (r,), ctx, core.sub) != negated for r in succ)
        if isinstance(core, Until):  # left is false
            return self.atl(h, ctx, core.right) != negated
        return self.atl(h, ctx, core) != negated

    # SL

    def sl(self, h: tuple, asg: Mapping[str, Callable], f: Formula) -> bool:
        if isinstance(f, Const):
            return f.value
        if isinstance(f, Atom):
            return f.name in self.cgs.labels.get(h[-1], ())
        if isinstance(f, Not):
            return not self.sl(h, asg, f.sub)
        if isinstance(f, And):
            return self.sl(h, asg, f.left) and self.sl(h, asg, f.right)
        if isinstance(f, Or):
            return self.sl(h, asg, f.left) or self.sl(h, asg, f.right)
        if isinstance(f, Bind):
            if ("var", f.var) not in asg:
                raise DirectError(f"unassigned strategy variable {f.var!r}")
            return self.sl(h, {**asg, ("agent", f.agent): asg[("var", f.var)]}, f.sub)
        if isinstance(f, StratVar):
            depth = temporal_depth(f.sub)
            if depth is None:
                raise DirectError("exact-horizon mode needs a formula without until")
            keys = self.histories(h, depth)
            pools = [self.cgs.moves] * len(keys)
            for table in self._tables(keys, pools):
                if self.sl(h, {**asg, ("var", f.var): table.__getitem__}, f.sub):
                    return True
            return False
        if isinstance(f, Next):
            return self.sl(h + (self._step(h, asg),), asg, f.sub)
        if isinstance(f, Until):
            if f.left != Const(False):
                raise DirectError("exact-horizon mode needs a formula without until")
            return self.sl(h, asg, f.right)
        raise _unsupported(f)

    def _step(self, h: tuple, asg: Mapping) -> Hashable:
        q = h[-1]
        vec = []
        for a in self.cgs.agents:
            if ("agent", a) not in asg:
                raise DirectError(f"agent {a!r} unbound under a temporal operator")
            vec.append(self.clamp(a, q, asg[("agent", a)](h)))
        return self.cgs.edg[(q, tuple(vec))]


# ---------------------------------------------------------------------------
# bounded memory


def _uses_top_memory(size: int, ups: tuple) -> bool:
    return size == 1 or (size - 1) in ups


def machines(agent: str, states: Sequence, pools: Callable[[Hashable], Sequence[str]], size: int):
    """Strategies with exactly ``size`` memory states defined on ``states``."""
    keys = [(m, q) for m in range(size) for q in states]
    choice_pools = [pools(q) for _, q in keys]
    upd_keys = keys if size > 1 else []
    for moves in itertools.product(*choice_pools):
        choose = dict(zip(keys, moves))
        for ups in itertools.product(range(size), repeat=len(upd_keys)):
            if _uses_top_memory(size, ups):
                yield FiniteMemoryStrategy(agent, size, choose, dict(zip(upd_keys, ups)))


class _Budget(Exception):
    pass


class DirectChecker:
    """Bounded-memory checker for ATLsc and SL with three-valued answers.

    ``memoryless_exact`` switches to the memoryless semantics: quantified
    strategies are memoryless and the enumeration is then exhaustive, so
    failure of every candidate is a definite FALSE.
    """

    def __init__(self, cgs: Cgs, memory_bound: int = 1, max_candidates: int = 200_000,
                 memoryless_exact: bool = False, horizon: bool = True, horizon_limit: int = 1 << 12):
        if memory_bound < 1:
            raise DirectError("memory bound must be at least 1")
        self.cgs = cgs
        self.bound = 1 if memoryless_exact else memory_bound
        self.max_candidates = max_candidates
        self.memoryless_exact = memoryless_exact
        self.horizon = horizon and not memoryless_exact
        self.horizon_limit = horizon_limit
        self.memo: dict = {}
        self.keep: list = []
        self.witness: dict = {}
        self.stats = {"candidates": 0, "games": 0, "horizon": 0}
        self.notes: set = set()
        self._reach: dict = {}
        self._clamped: dict = {}

    # helpers

    def reach(self, q) -> list:
        hit = self._reach.get(q)
        if hit is None:
            seen = {q}
            order = [q]
            for s in order:
                for r in self.cgs.successors(s):
                    if r not in seen:
                        seen.add(r)
                        order.append(r)
            hit = self._reach[q] = order
        return hit

    def _key(self, entries: tuple) -> tuple:
        return tuple((name, id(s), m) for name, s, m in entries)

    def _hold(self, s):
        self.keep.append(s)
        return s

    def _strategy_options(self, agent: Optional[str], q, pools) -> list:
        out = []
        states = self.reach(q)
        for size in range(1, self.bound + 1):
            out.extend(self._hold(s) for s in machines(agent or "", states, pools, size))
        return out

    def _candidates(self, pools: list):
        total = 1
        for p in pools:
            total *= len(p)
        if total > self.max_candidates:
            self.notes.add(f"more than {self.max_candidates} candidates; enumeration truncated")
            raise _Budget()
        for combo in itertools.product(*pools):
            self.stats["candidates"] += 1
            yield combo

    # ATLsc

    def atlsc(self, q, ctx: tuple, f: Formula) -> Value:
        """Value at ``q`` under the context ``ctx`` = sorted (agent, strategy, memory) triples."""
        key = (q, self._key(ctx), f)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if isinstance(f, Const):
            res = Value.of(f.value)
        elif isinstance(f, Atom):
            res = Value.of(f.name in self.cgs.labels.get(q, ()))
        elif isinstance(f, Not):
            res = ~self.atlsc(q, ctx, f.sub)
        elif isinstance(f, And):
            res = self.atlsc(q, ctx, f.left)
            if res is not Value.FALSE:
                res = res & self.atlsc(q, ctx, f.right)
        elif isinstance(f, Or):
            res = self.atlsc(q, ctx, f.left)
            if res is not Value.TRUE:
                res = res | self.atlsc(q, ctx, f.right)
        elif isinstance(f, Relax):
            drop = set(f.coalition)
            res = self.atlsc(q, tuple(e for e in ctx if e[0] not in drop), f.sub)
        elif isinstance(f, StratQuant):
            res = self._quantify(q, ctx, f)
        else:
            raise _unsupported(f)
        self.memo[key] = res
        return res

    def _quantify(self, q, ctx: tuple, f: StratQuant) -> Value:
        if self.horizon and temporal_depth(f) is not None:
            engine = HorizonEngine(self.cgs, self.horizon_limit)
            fns = {a: _machine_fn(s, m) for a, s, m in ctx}
            try:
                res = Value.of(engine.atl((q,), fns, f))
                self.stats["horizon"] += 1
                return res
            except DirectError:
                pass
        coalition = [a for a in self.cgs.agents if a in f.coalition]
        outer = tuple(e for e in ctx if e[0] not in set(coalition))
        options = [self._strategy_options(a, q, lambda r, a=a: self.cgs.chc[(r, a)]) for a in coalition]
        neg_aut, leaves = ltl.path_automaton(f.sub, positive=False)
        complete = True
        try:
            for combo in self._candidates(options):
                inner = tuple(sorted(outer + tuple((a, s, 0) for a, s in zip(coalition, combo)), key=lambda e: e[0]))
                v = self._all_paths(q, inner, neg_aut, leaves)
                if v is Value.TRUE:
                    self.witness[(q, self._key(ctx), f)] = dict(zip(coalition, combo))
                    return Value.TRUE
                if v is Value.UNKNOWN:
                    complete = False
        except _Budget:
            complete = False
        if self.memoryless_exact and complete:
            return Value.FALSE
        if not any(_has_quantifier(leaf) for leaf in leaves):
            if self._spoiler_wins(q, outer, coalition, neg_aut, leaves):
                return Value.FALSE
        return Value.UNKNOWN

    def _all_paths(self, q, ctx: tuple, neg_aut: ltl.Automaton, leaves: list) -> Value:
        """Do all outcomes from ``q`` under ``ctx`` satisfy the path formula?"""
        strategies = {a: s for a, s, _ in ctx}
        memory = {a: m for a, _, m in ctx}
        k = outcome_product(self.cgs, q, strategies, memory)
        order = sorted(strategies)
        agents_of_ctx = {a: s for a, s, _ in ctx}

        def value(node, leaf) -> Value:
            r, mems = node
            inner = tuple((a, agents_of_ctx[a], m) for a, m in zip(order, mems))
            return self.atlsc(r, inner, leaf)

        def holds(optimistic: bool):
            def h(node, leaf, positive):
                v = value(node, leaf)
                if v is Value.UNKNOWN:
                    return optimistic
                return (v is Value.TRUE) == positive

            return h

        succ = k.succ.__getitem__
        if k.initial not in ltl.exists_path_states([k.initial], succ, neg_aut, holds(True)):
            return Value.TRUE
        if k.initial in ltl.exists_path_states([k.initial], succ, neg_aut, holds(False)):
            return Value.FALSE
        return Value.UNKNOWN

    def _spoiler_wins(self, q0, ctx: tuple, coalition: list, neg_aut: ltl.Automaton, leaves: list) -> bool:
        """Büchi game: the coalition moves first, then the opponents pick the
        rest of the move vector and a run of the automaton for the negated path
        formula.  A win for the opponents refutes every coalition strategy."""
        self.stats["games"] += 1
        cgs = self.cgs
        order = [e[0] for e in ctx]
        strategies = {a: s for a, s, _ in ctx}
        untils = neg_aut.untils
        n = len(untils)
        label_of = {}

        def leaf_holds(q, leaf, positive):
            key = (q, leaf)
            if key not in label_of:
                label_of[key] = self.atlsc(q, (), leaf)
            return (label_of[key] is Value.TRUE) == positive

        start = ("A", q0, tuple(m for _, _, m in ctx), neg_aut.initial, 0)
        owner, succ, accepting = {}, {}, set()
        queue = [start]
        seen = {start}

        def push(node):
            if node not in seen:
                seen.add(node)
                queue.append(node)

        while queue:
            node = queue.pop()
            if node[0] == "A":
                _, q, mems, s, i = node
                owner[node] = False
                kids = []
                for amove in itertools.product(*(cgs.chc[(q, a)] for a in coalition)):
                    kid = ("S", q, mems, s, i, amove)
                    kids.append(kid)
                    push(kid)
                succ[node] = kids
            elif node[0] == "S":
                _, q, mems, s, i, amove = node
                owner[node] = True
                fixed = {a: strategies[a].move(m, q) for a, m in zip(order, mems)}
                fixed.update(zip(coalition, amove))
                kids = []
                pos_ok = frozenset(a for a in neg_aut.atoms if leaf_holds(q, a, True))
                for t in neg_aut.transitions_at(s, pos_ok, frozenset(neg_aut.atoms) - pos_ok):
                    if n == 0:
                        i2, acc = 0, True
                    elif untils[i] not in t.promises:
                        i2, acc = (i + 1) % n, i == n - 1
                    else:
                        i2, acc = i, False
                    for r in dict.fromkeys(cgs.edg[(q, v)] for v in cgs.vectors(q, fixed)):
                        mems2 = tuple(strategies[a].next_memory(m, r) for a, m in zip(order, mems))
                        kid = ("T", r, mems2, t.target, i2, acc)
                        kids.append(kid)
                        push(kid)
                succ[node] = kids
            else:
                _, r, mems2, s2, i2, acc = node
                owner[node] = True
                if acc:
                    accepting.add(node)
                kid = ("A", r, mems2, s2, i2)
                succ[node] = [kid]
                push(kid)
        return start in ltl.solve_buchi_game(list(seen), owner, succ, accepting)

    # SL

    def clamped(self, agent: str, s: FiniteMemoryStrategy) -> FiniteMemoryStrategy:
        key = (agent, id(s))
        hit = self._clamped.get(key)
        if hit is None:
            choose = {}
            for (m, q), mv in s.choose.items():
                chc = self.cgs.chc[(q, agent)]
                choose[(m, q)] = mv if mv in chc else min(chc, key=self.cgs.moves.index)
            hit = self._hold(FiniteMemoryStrategy(agent, s.size, choose, s.update))
            self._clamped[key] = hit
        return hit

    def sl(self, q, asg: tuple, f: Formula) -> Value:
        """Value at ``q``; ``asg`` = sorted ((kind, name), strategy, memory) triples."""
        key = (q, self._key(asg), f)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if isinstance(f, Const):
            res = Value.of(f.value)
        elif isinstance(f, Atom):
            res = Value.of(f.name in self.cgs.labels.get(q, ()))
        elif isinstance(f, Not):
            res = ~self.sl(q, asg, f.sub)
        elif isinstance(f, And):
            res = self.sl(q, asg, f.left)
            if res is not Value.FALSE:
                res = res & self.sl(q, asg, f.right)
        elif isinstance(f, Or):
            res = self.sl(q, asg, f.left)
            if res is not Value.TRUE:
                res = res | self.sl(q, asg, f.right)
        elif isinstance(f, Bind):
            entry = dict((k, (s, m)) for k, s, m in asg).get(("var", f.var))
            if entry is None:
                raise DirectError(f"unassigned strategy variable {f.var!r}")
            s, m = entry
            res = self.sl(q, _assign(asg, ("agent", f.agent), self.clamped(f.agent, s), m), f.sub)
        elif isinstance(f, StratVar):
            res = self._sl_quantify(q, asg, f)
        elif isinstance(f, (Next, Until)):
            res = self._sl_temporal(q, asg, f)
        else:
            raise _unsupported(f)
        self.memo[key] = res
        return res

    def _sl_quantify(self, q, asg: tuple, f: StratVar) -> Value:
        if self.horizon and temporal_depth(f) is not None:
            engine = HorizonEngine(self.cgs, self.horizon_limit)
            fns = {k: _machine_fn(s, m) for k, s, m in asg}
            try:
                res = Value.of(engine.sl((q,), fns, f))
                self.stats["horizon"] += 1
                return res
            except DirectError:
                pass
        options = self._strategy_options(None, q, lambda r: self.cgs.moves)
        complete = True
        try:
            for (s,) in self._candidates([options]):
                v = self.sl(q, _assign(asg, ("var", f.var), s, 0), f.sub)
                if v is Value.TRUE:
                    self.witness[(q, self._key(asg), f)] = {f.var: s}
                    return Value.TRUE
                if v is Value.UNKNOWN:
                    complete = False
        except _Budget:
            complete = False
        if self.memoryless_exact and complete:
            return Value.FALSE
        return Value.UNKNOWN

    def _sl_step(self, q, asg: tuple) -> tuple:
        cgs = self.cgs
        entries = dict((k, (s, m)) for k, s, m in asg)
        vec = []
        for a in cgs.agents:
            if ("agent", a) not in entries:
                raise DirectError(f"agent {a!r} unbound under a temporal operator")
            s, m = entries[("agent", a)]
            vec.append(s.move(m, q))
        r = cgs.edg[(q, tuple(vec))]
        return r, tuple((k, s, s.next_memory(m, r)) for k, s, m in asg)

    def _sl_temporal(self, q, asg: tuple, f: Formula) -> Value:
        if isinstance(f, Next):
            r, nxt = self._sl_step(q, asg)
            return self.sl(r, nxt, f.sub)
        # the run is a lasso over (state, memories); every position repeats a
        # configuration seen before it closes
        res, prefix_ok = Value.FALSE, Value.TRUE
        seen = set()
        config = (q, asg)
        while True:
            key = (config[0], self._key(config[1]))
            if key in seen:
                return res
            seen.add(key)
            res = res | (prefix_ok & self.sl(config[0], config[1], f.right))
            prefix_ok = prefix_ok & self.sl(config[0], config[1], f.left)
            if res is Value.TRUE or prefix_ok is Value.FALSE:
                return res
            config = self._sl_step(*config)


def _assign(asg: tuple, name: tuple, s: FiniteMemoryStrategy, m: int) -> tuple:
    rest = [e for e in asg if e[0] != name]
    return tuple(sorted(rest + [(name, s, m)], key=lambda e: e[0]))


def _context_entries(cgs: Cgs, context: Optional[Mapping[str, FiniteMemoryStrategy]]) -> tuple:
    context = StrategyContext(context or {})
    for a, s in context.items():
        if a not in cgs.agents:
            raise DirectError(f"context names unknown agent {a!r}")
        s.validate(cgs)
    return tuple(sorted(((a, s, 0) for a, s in context.items()), key=lambda e: e[0]))


def _verdict(checker: DirectChecker, value: Value, root_key, note: str) -> Verdict:
    witness = checker.witness.get(root_key)
    if witness is not None:
        witness = {str(k): strategy_to_json(s) for k, s in witness.items()}
    notes = [note] + sorted(checker.notes)
    return Verdict(value, witness, "; ".join(notes), dict(checker.stats))


def check_atlsc_direct(cgs: Cgs, state: Hashable, formula: Formula, context=None, memory_bound: int = 1,
                       mode: str = "bounded", **options) -> Verdict:
    """Check an ATLsc formula at ``state`` with strategy context ``context``."""
    if state not in cgs.states:
        raise DirectError(f"unknown state {state!r}")
    entries = _context_entries(cgs, context)
    if mode == "exact-horizon":
        if temporal_depth(formula) is None:
            raise DirectError("exact-horizon mode needs a formula without until")
        engine = HorizonEngine(cgs, options.get("horizon_limit", 1 << 16))
        fns = {a: _machine_fn(s) for a, s, _ in entries}
        value = Value.of(engine.atl((state,), fns, formula))
        return Verdict(value, None, "exact horizon", {"tables": engine.tables})
    if mode != "bounded":
        raise DirectError(f"unknown mode {mode!r}")
    checker = DirectChecker(cgs, memory_bound, **options)
    value = checker.atlsc(state, entries, formula)
    return _verdict(checker, value, (state, checker._key(entries), formula), f"memory {memory_bound}")


def _sl_entries(cgs: Cgs, assignment) -> tuple:
    out = []
    for name, s in (assignment or {}).items():
        kind = "agent" if name in cgs.agents else "var"
        out.append(((kind, name), s, 0))
    return tuple(sorted(out, key=lambda e: e[0]))


def check_sl_direct(cgs: Cgs, state: Hashable, formula: Formula, assignment=None, memory_bound: int = 1,
                    **options) -> Verdict:
    """Check an SL formula; ``assignment`` maps agents and variables to strategies."""
    if state not in cgs.states:
        raise DirectError(f"unknown state {state!r}")
    entries = _sl_entries(cgs, assignment)
    missing = free_strategy_vars(formula) - {k[1] for k, _, _ in entries if k[0] == "var"}
    if missing:
        raise DirectError(f"unassigned strategy variables {sorted(missing)}")
    checker = DirectChecker(cgs, memory_bound, **options)
    entries = tuple((k, checker.clamped(k[1], s) if k[0] == "agent" else s, m) for k, s, m in entries)
    value = checker.sl(state, entries, formula)
    return _verdict(checker, value, (state, checker._key(entries), formula), f"memory {memory_bound}")


def _is_sl(formula: Formula) -> bool:
    return any(isinstance(g, (StratVar, Bind)) for g in subformulas(formula))


def check_memoryless(cgs: Cgs, state: Hashable, formula: Formula, context=None, **options) -> bool:
    """Exact check under the memoryless semantics (ATLsc0 or SL0)."""
    for g in subformulas(formula):
        if isinstance(g, (StratQuant, StratVar)) and not g.memoryless:
            raise DirectError("every strategy quantifier must be memoryless")
    if state not in cgs.states:
        raise DirectError(f"unknown state {state!r}")
    checker = DirectChecker(cgs, 1, memoryless_exact=True, **options)
    if _is_sl(formula):
        entries = tuple((k, checker.clamped(k[1], s) if k[0] == "agent" else s, m)
                        for k, s, m in _sl_entries(cgs, context))
        value = checker.sl(state, entries, formula)
    else:
        value = checker.atlsc(state, _context_entries(cgs, context), formula)
    if not value.definite:
        raise DirectError("memoryless enumeration was truncated; raise max_candidates")
    return value is Value.TRUE


def sl_outcome(cgs: Cgs, state: Hashable, assignment: Mapping[str, FiniteMemoryStrategy]):
    """Outcome product for a complete assignment of agents (a single lasso)."""
    missing = set(cgs.agents) - set(assignment)
    if missing:
        raise DirectError(f"agents {sorted(missing)} unassigned")
    checker = DirectChecker(cgs)
    return outcome_product(cgs, state, {a: checker.clamped(a, assignment[a]) for a in cgs.agents})
