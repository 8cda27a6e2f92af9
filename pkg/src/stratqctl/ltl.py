"""LTL core: tableau automata, product emptiness and Büchi games.

Path formulas are interned into negation normal form over integer ids.
The automaton built from a formula is a transition-based generalized
Büchi automaton: states are sets of obligations, a transition postponing
``a U b`` carries that until as a *promise*, and an accepting run must
infinitely often take a transition free of each promise.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

from .formulas import And, Atom, Const, Formula, Next, Not, Or, Until

# node kinds
TRUE_K, FALSE_K, LIT, AND, OR, NEXT, UNTIL, RELEASE = range(8)


class Nnf:
    """Interning table for NNF nodes; ids are small ints."""

    def __init__(self):
        self.nodes: list[tuple] = []
        self.index: dict[tuple, int] = {}
        self.true = self._mk((TRUE_K,))
        self.false = self._mk((FALSE_K,))

    def _mk(self, node: tuple) -> int:
        i = self.index.get(node)
        if i is None:
            i = len(self.nodes)
            self.nodes.append(node)
            self.index[node] = i
        return i

    def lit(self, atom: Hashable, positive: bool) -> int:
        return self._mk((LIT, atom, positive))

    def conj(self, a: int, b: int) -> int:
        if a == self.false or b == self.false:
            return self.false
        if a == self.true:
            return b
        if b == self.true:
            return a
        return self._mk((AND, a, b))

    def disj(self, a: int, b: int) -> int:
        if a == self.true or b == self.true:
            return self.true
        if a == self.false:
            return b
        if b == self.false:
            return a
        return self._mk((OR, a, b))

    def nxt(self, a: int) -> int:
        return self._mk((NEXT, a))

    def until(self, a: int, b: int) -> int:
        if b == self.true or b == self.false:
            return b
        if a == self.false:
            return b
        return self._mk((UNTIL, a, b))

    def release(self, a: int, b: int) -> int:
        if b == self.true or b == self.false:
            return b
        if a == self.true:
            return b
        return self._mk((RELEASE, a, b))

    def convert(self, f: Formula, atom_of: Callable[[Formula], Hashable], positive: bool = True) -> int:
        """NNF of ``f`` (or of its negation); ``atom_of`` maps leaves to atom keys."""
        if isinstance(f, Const):
            return self.true if f.value == positive else self.false
        if isinstance(f, Not):
            return self.convert(f.sub, atom_of, not positive)
        if isinstance(f, And):
            l, r = self.convert(f.left, atom_of, positive), self.convert(f.right, atom_of, positive)
            return self.conj(l, r) if positive else self.disj(l, r)
        if isinstance(f, Or):
            l, r = self.convert(f.left, atom_of, positive), self.convert(f.right, atom_of, positive)
            return self.disj(l, r) if positive else self.conj(l, r)
        if isinstance(f, Next):
            return self.nxt(self.convert(f.sub, atom_of, positive))
        if isinstance(f, Until):
            l, r = self.convert(f.left, atom_of, positive), self.convert(f.right, atom_of, positive)
            return self.until(l, r) if positive else self.release(l, r)
        key = atom_of(f)
        return self.lit(key, positive)

    def untils(self, root: int) -> list[int]:
        seen, out, stack = set(), [], [root]
        while stack:
            i = stack.pop()
            if i in seen:
                continue
            seen.add(i)
            node = self.nodes[i]
            if node[0] == UNTIL:
                out.append(i)
            if node[0] in (AND, OR, UNTIL, RELEASE):
                stack.extend(node[1:3])
            elif node[0] == NEXT:
                stack.append(node[1])
        return sorted(out)


@dataclass(frozen=True)
class Transition:
    pos: frozenset  # atoms required true
    neg: frozenset  # atoms required false
    target: frozenset  # obligations for the next position
    promises: frozenset  # untils postponed on this transition


class Automaton:
    """On-the-fly generalized Büchi automaton for an NNF formula."""

    def __init__(self, nnf: Nnf, root: int):
        self.nnf = nnf
        self.root = root
        self.initial = frozenset([root])
        self.untils = nnf.untils(root)
        self._cache: dict[frozenset, list[Transition]] = {}
        self._letter_cache: dict[tuple, list[Transition]] = {}
        self.atoms = sorted({n[1] for n in nnf.nodes if n[0] == LIT}, key=str)
        self._prop = self._propositional_nodes()

    def _propositional_nodes(self) -> set[int]:
        """Ids of nodes built from literals and boolean connectives only."""
        out: set[int] = set()
        for i, node in enumerate(self.nnf.nodes):  # children are interned before parents
            k = node[0]
            if k in (TRUE_K, FALSE_K, LIT) or (k in (AND, OR) and node[1] in out and node[2] in out):
                out.add(i)
        return out

    def _kleene(self, i: int, pos_ok: frozenset, neg_ok: frozenset) -> Optional[bool]:
        """Value of a propositional node under a letter; None when undetermined."""
        node = self.nnf.nodes[i]
        k = node[0]
        if k == TRUE_K:
            return True
        if k == FALSE_K:
            return False
        if k == LIT:
            ok, other = (pos_ok, neg_ok) if node[2] else (neg_ok, pos_ok)
            if node[1] in ok and node[1] not in other:
                return True
            if node[1] not in ok:
                return False
            return None
        a = self._kleene(node[1], pos_ok, neg_ok)
        if k == AND:
            if a is False:
                return False
            b = self._kleene(node[2], pos_ok, neg_ok)
            if b is False:
                return False
            return True if a and b else None
        if a is True:
            return True
        b = self._kleene(node[2], pos_ok, neg_ok)
        if b is True:
            return True
        return False if a is False and b is False else None

    def transitions_at(self, state: frozenset, pos_ok: frozenset, neg_ok: frozenset) -> list[Transition]:
        """Transitions from ``state`` enabled by a letter.

        ``pos_ok``/``neg_ok`` are the atoms allowed true/false at this
        position (an atom in both is undetermined and may be chosen either
        way, consistently within one transition).
        """
        key = (state, pos_ok, neg_ok)
        out = self._letter_cache.get(key)
        if out is None:
            out = self._expand(state, (pos_ok, neg_ok))
            self._letter_cache[key] = out
        return out

    def transitions(self, state: frozenset) -> list[Transition]:
        out = self._cache.get(state)
        if out is None:
            out = self._expand(state)
            self._cache[state] = out
        return out

    def _expand(self, state: frozenset, letter: Optional[tuple] = None) -> list[Transition]:
        nodes = self.nnf.nodes
        results: dict[tuple, Transition] = {}
        prop = self._prop
        pos_ok, neg_ok = letter if letter is not None else (None, None)

        def decided(i: int) -> Optional[bool]:
            if letter is None or i not in prop:
                return None
            return self._kleene(i, pos_ok, neg_ok)

        def go(todo: list, pos: frozenset, neg: frozenset, nxt: frozenset, prom: frozenset, done: frozenset):
            while todo:
                i = todo.pop()
                if i in done:
                    continue
                done = done | {i}
                node = nodes[i]
                k = node[0]
                if k == TRUE_K:
                    continue
                if k == FALSE_K:
                    return
                if k == LIT:
                    if letter is not None and node[1] not in (pos_ok if node[2] else neg_ok):
                        return
                    if node[2]:
                        if node[1] in neg:
                            return
                        pos = pos | {node[1]}
                    else:
                        if node[1] in pos:
                            return
                        neg = neg | {node[1]}
                elif k == AND:
                    todo.append(node[1])
                    todo.append(node[2])
                elif k == NEXT:
                    nxt = nxt | {node[1]}
                elif k == OR:
                    left, right = decided(node[1]), decided(node[2])
                    if left is True or right is True:
                        continue
                    if left is False:
                        todo.append(node[2])
                        continue
                    if right is False:
                        todo.append(node[1])
                        continue
                    go(todo + [node[1]], pos, neg, nxt, prom, done)
                    todo.append(node[2])
                elif k == UNTIL:
                    go(todo + [node[2]], pos, neg, nxt, prom, done)
                    todo.append(node[1])
                    nxt = nxt | {i}
                    prom = prom | {i}
                elif k == RELEASE:
                    go(todo + [node[1], node[2]], pos, neg, nxt, prom, done)
                    todo.append(node[2])
                    nxt = nxt | {i}
            key = (pos, neg, nxt, prom)
            if key not in results:
                results[key] = Transition(pos, neg, nxt, prom)

        go(list(state), frozenset(), frozenset(), frozenset(), frozenset(), frozenset())
        # drop transitions subsumed by a weaker one (same target/promises, fewer constraints)
        trans = list(results.values())
        if letter is not None:
            trans = list({(t.target, t.promises): Transition(frozenset(), frozenset(), t.target, t.promises)
                          for t in trans}.values())
        keep = []
        for t in trans:
            dominated = any(
                u is not t and u.pos <= t.pos and u.neg <= t.neg and u.target <= t.target and u.promises <= t.promises
                and (u.pos, u.neg, u.target, u.promises) != (t.pos, t.neg, t.target, t.promises)
                for u in trans)
            if not dominated:
                keep.append(t)
        keep.sort(key=lambda t: (sorted(map(str, t.pos)), sorted(map(str, t.neg)), sorted(t.target),
                                 sorted(t.promises)))
        return keep


def ltl_to_buchi(path: Formula) -> Automaton:
    """Automaton over letters = sets of atom names accepting exactly the models of ``path``."""
    nnf = Nnf()
    root = nnf.convert(path, _atom_name)
    return Automaton(nnf, root)


_PATH_AUTOMATA: dict = {}


def path_automaton(psi: Formula, positive: bool = True) -> tuple[Automaton, list]:
    """Automaton for ``psi`` (or its negation) whose atoms are the maximal
    non-temporal subformulas of ``psi``; returns it with the list of those leaves."""
    key = (psi, positive)
    hit = _PATH_AUTOMATA.get(key)
    if hit is None:
        leaves: list = []

        def leaf(f):
            if isinstance(f, (Next, Until)):
                raise TypeError("unexpected temporal leaf")
            leaves.append(f)
            return f

        nnf = Nnf()
        root = nnf.convert(psi, leaf, positive)
        hit = (Automaton(nnf, root), list(dict.fromkeys(leaves)))
        _PATH_AUTOMATA[key] = hit
    return hit


def _atom_name(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    raise TypeError(f"not a pure LTL formula: {f!r}")


# ---------------------------------------------------------------------------
# graph utilities


def sccs(nodes: Sequence, succ: Callable[[Hashable], Iterable]) -> list[list]:
    """Tarjan's algorithm, iterative."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list[list] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


class ProductTooLarge(Exception):
    pass


def exists_path_states(states: Sequence, succ: Callable[[Hashable], Sequence], automaton: Automaton,
                       holds: Callable[[Hashable, Hashable, bool], bool], cap: int = 100_000) -> set:
    """States from which some path satisfies the automaton's formula.

    ``holds(state, atom, positive)`` decides literals at a structure state.
    Raises ProductTooLarge when the product exceeds ``cap`` nodes.
    """
    edges: dict = {}
    atoms = automaton.atoms
    letters: dict = {}
    start_nodes = [(q, automaton.initial) for q in states]
    order = []
    seen = set()
    queue = list(start_nodes)
    for n in start_nodes:
        seen.add(n)
    while queue:
        node = queue.pop()
        order.append(node)
        if len(seen) > cap:
            raise ProductTooLarge(len(seen))
        q, s = node
        outs = []
        letter = letters.get(q)
        if letter is None:
            letter = (frozenset(a for a in atoms if holds(q, a, True)),
                      frozenset(a for a in atoms if holds(q, a, False)))
            letters[q] = letter
        for t in automaton.transitions_at(s, *letter):
            for r in succ(q):
                child = (r, t.target)
                outs.append((child, t.promises))
                if child not in seen:
                    seen.add(child)
                    queue.append(child)
        edges[node] = outs
    untils = automaton.untils
    comp_of = {}
    comps = sccs(order, lambda n: [c for c, _ in edges[n]])
    good = set()
    for idx, comp in enumerate(comps):
        for n in comp:
            comp_of[n] = idx
    for idx, comp in enumerate(comps):
        members = set(comp)
        internal = [p for n in comp for c, p in edges[n] if c in members]
        if not internal:
            continue
        if all(any(u not in p for p in internal) for u in untils):
            good.update(comp)
    # backward reachability to accepting components
    preds: dict = {}
    for n, outs in edges.items():
        for c, _ in outs:
            preds.setdefault(c, []).append(n)
    stack = list(good)
    while stack:
        n = stack.pop()
        for p in preds.get(n, ()):
            if p not in good:
                good.add(p)
                stack.append(p)
    return {q for q, s in start_nodes if (q, s) in good}


def lasso_accepts(automaton: Automaton, prefix: Sequence[frozenset], loop: Sequence[frozenset]) -> bool:
    """Does the automaton accept ``prefix . loop^omega`` (letters = sets of atoms)?"""
    if not loop:
        raise ValueError("loop must be nonempty")
    word = list(prefix) + list(loop)
    n = len(word)
    back = len(prefix)
    succ = {i: ((i + 1) if i + 1 < n else back,) for i in range(n)}
    hits = exists_path_states([0], lambda i: succ[i], automaton, lambda i, a, pos: (a in word[i]) == pos)
    return 0 in hits


# ---------------------------------------------------------------------------
# Büchi games


def solve_buchi_game(nodes: Sequence, owner: Mapping, succ: Mapping, accepting: set) -> set:
    """Winning region of the Büchi player.

    ``owner[n]`` is True for nodes of the Büchi player (who wants to visit
    ``accepting`` infinitely often) and False for the opponent.  A player
    stuck at a dead end loses.
    """
    nodes = list(nodes)
    preds: dict = {n: [] for n in nodes}
    for n in nodes:
        for m in succ[n]:
            preds[m].append(n)

    def attractor(target: set, player: bool, arena: set) -> set:
        attr = set(target) & arena
        count = {n: sum(1 for m in succ[n] if m in arena) for n in arena}
        stack = list(attr)
        while stack:
            m = stack.pop()
            for n in preds[m]:
                if n not in arena or n in attr:
                    continue
                if owner[n] == player:
                    attr.add(n)
                    stack.append(n)
                else:
                    count[n] -= 1
                    if count[n] == 0:
                        attr.add(n)
                        stack.append(n)
        return attr

    arena = set(nodes)
    opponent_wins: set = set()
    while True:
        # nodes where the Büchi player is stuck belong to the opponent
        stuck = {n for n in arena if owner[n] and not any(m in arena for m in succ[n])}
        blocked = {n for n in arena if not owner[n] and not any(m in arena for m in succ[n])}
        recur = attractor((accepting & arena) | blocked, True, arena)
        trap = (arena - recur) | stuck
        if not trap:
            break
        lose = attractor(trap, False, arena)
        opponent_wins |= lose
        arena -= lose
        if not arena:
            break
    return set(nodes) - opponent_wins
