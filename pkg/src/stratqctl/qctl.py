"""Three-valued QCTL* model checking under the tree semantics.

State formulas are evaluated bottom-up on a finite structure.  Path
quantifiers go through the tableau automaton of ``ltl``.  A block of
existential proposition quantifiers is resolved, in order, by

* dropping it when the propositions do not occur in the body;
* exact enumeration when every occurrence sits at a bounded X-depth
  (only finitely many tree nodes matter);
* enumerating finite-memory labelers up to the memory budget (TRUE);
* a Büchi game between the labeler and a path-picking spoiler, when the
  body has a shape the game can encode (FALSE).

Anything else stays UNKNOWN.  TRUE and FALSE answers are sound for the
tree semantics whatever the budget.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Optional, Sequence

from . import ltl
from .formulas import (And, Atom, Const, FALSE as F_FALSE, Formula, Next, Not, Or, PathQ, PropQ, Quant,
                       TRUE as F_TRUE, Until, atoms_of)
from .games import Kripke
from .verdict import FALSE, TRUE, UNKNOWN, Value, Verdict


class QctlError(ValueError):
    pass


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class LabelingWitness:
    """Moore machine labelling the unwinding: memory 0 at the root,
    ``output[(m, q)]`` is the set of ``props`` true at a node ending in ``q``,
    and moving to ``q'`` sets the memory to ``update[(m, q')]``."""

    props: tuple
    size: int
    output: Mapping[tuple, frozenset]
    update: Mapping[tuple, int]

    @property
    def proposition(self) -> str:
        if len(self.props) != 1:
            raise ValueError("witness labels several propositions")
        return self.props[0]

    def next_memory(self, m: int, q) -> int:
        return 0 if self.size == 1 else self.update[(m, q)]

    def label_of(self, history: Sequence) -> frozenset:
        m = 0
        for q in history[1:]:
            m = self.next_memory(m, q)
        return self.output[(m, history[-1])]

    def to_json(self) -> dict:
        rows = []
        for (m, q), lab in sorted(self.output.items(), key=lambda kv: (kv[0][0], str(kv[0][1]))):
            row = {"memory": m, "state": _show_state(q), "true": sorted(lab)}
            if self.size > 1:
                row["next"] = {_show_state(r): self.update[(m, r)]
                               for (mm, r) in sorted(self.update, key=lambda k: str(k[1])) if mm == m}
            rows.append(row)
        return {"props": list(self.props), "memory": self.size, "table": rows}

    def dump(self) -> str:
        lines = [f"labeler for {', '.join(self.props)} with {self.size} memory state(s)"]
        for row in self.to_json()["table"]:
            nxt = ""
            if "next" in row:
                nxt = "  next: " + " ".join(f"{k}->{v}" for k, v in row["next"].items())
            lines.append(f"  m{row['memory']} @ {row['state']}: {{{', '.join(row['true'])}}}{nxt}")
        return "\n".join(lines)


def _show_state(q) -> str:
    return str(q) if not isinstance(q, tuple) else "(" + ",".join(_show_state(x) for x in q) + ")"


def product_with_labeler(k: Kripke, witness: LabelingWitness) -> Kripke:
    """Product of ``k`` with the labeler; node (q, m) carries the labeler's output."""
    clash = set(witness.props) & k.props()
    if clash:
        raise QctlError(f"propositions {sorted(clash)} already label the structure")
    states = [(q, m) for m in range(witness.size) for q in k.states]
    succ = {(q, m): tuple((r, witness.next_memory(m, r)) for r in k.succ[q]) for (q, m) in states}
    labels = {(q, m): frozenset(k.labels.get(q, frozenset())) | witness.output[(m, q)] for (q, m) in states}
    init = (k.initial, 0) if k.initial is not None else None
    return Kripke(tuple(states), succ, labels, init)


# ---------------------------------------------------------------------------
# evaluation structures


class _Struct:
    """Structure under evaluation.

    A derived structure (labeler product, tree prefix) maps each node to a
    node of its parent and only adds the propositions ``added``; formulas
    not mentioning them are evaluated on the parent.
    """

    def __init__(self, states, succ, labels, parent: Optional["_Struct"] = None,
                 base: Optional[Mapping] = None, added: frozenset = frozenset()):
        self.states = list(states)
        self.succ = succ
        self.labels = labels
        self.parent = parent
        self.base = base
        self.added = added
        self.memo: dict = {}

    @staticmethod
    def of(k: Kripke) -> "_Struct":
        return _Struct(k.states, k.succ, k.labels)


_FREE: dict = {}


def _free(f: Formula) -> frozenset:
    out = _FREE.get(f)
    if out is None:
        out = frozenset(atoms_of(f))
        _FREE[f] = out
    return out


def _strip_block(f: PropQ) -> tuple[Quant, list[str], Formula]:
    quant = f.quant
    props = []
    while isinstance(f, PropQ) and f.quant is quant:
        props.append(f.prop)
        f = f.sub
    # a prop bound twice in one block: the inner binding wins; keep order
    return quant, list(dict.fromkeys(props)), f


def _prop_depths(f: Formula, props: frozenset, depth: int = 0, out: Optional[dict] = None) -> Optional[dict]:
    """X-depths of the free occurrences of ``props``; None if one sits under an until."""
    if out is None:
        out = {}
    if not (_free(f) & props):
        return out
    if isinstance(f, Atom):
        out.setdefault(f.name, set()).add(depth)
        return out
    if isinstance(f, Next):
        return _prop_depths(f.sub, props, depth + 1, out)
    if isinstance(f, Until):
        if f.left == F_FALSE:
            return _prop_depths(f.right, props, depth, out)
        return None
    if isinstance(f, PropQ):
        return _prop_depths(f.sub, props - {f.prop}, depth, out)
    for c in f.children():
        if _prop_depths(c, props, depth, out) is None:
            return None
    return out


def _conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        return _conjuncts(f.left) + _conjuncts(f.right)
    return [f]


def _as_ag(f: Formula) -> Optional[Formula]:
    if (isinstance(f, PathQ) and f.quant is Quant.FORALL and isinstance(f.sub, Not)
            and isinstance(f.sub.sub, Until) and f.sub.sub.left == F_TRUE and isinstance(f.sub.sub.right, Not)):
        return f.sub.sub.right.sub
    return None


def _has_until_over(f: Formula, props: frozenset) -> bool:
    """Does a prop-bearing part of ``f`` use an until (other than false U s)?"""
    if not (_free(f) & props):
        return False
    if isinstance(f, Until) and f.left != F_FALSE:
        return True
    if isinstance(f, PropQ):
        return _has_until_over(f.sub, props - {f.prop})
    return any(_has_until_over(c, props) for c in f.children())


def _prop_bearing_state_subformulas_are_flat(psi: Formula, props: frozenset) -> bool:
    """Inside the path formula ``psi``, every maximal state subformula that
    mentions ``props`` must be propositional (evaluated on the current letter)."""
    if not (_free(psi) & props):
        return True
    if isinstance(psi, (PathQ, PropQ)):
        return False
    return all(_prop_bearing_state_subformulas_are_flat(c, props) for c in psi.children())


def _powerset(items: Sequence[str]) -> list[frozenset]:
    return [frozenset(c) for r in range(len(items) + 1) for c in itertools.combinations(items, r)]


# ---------------------------------------------------------------------------
# checker


class QctlChecker:
    """Evaluator with a memory budget for labelers and a product-size cap."""

    def __init__(self, budget: int = 1, cap: int = 100_000, max_machines: int = 50_000,
                 horizon_bits: int = 14, refute: bool = True):
        if budget < 1:
            raise ValueError("memory budget must be at least 1")
        self.budget = budget
        self.cap = cap
        self.max_machines = max_machines
        self.horizon_bits = horizon_bits
        self.refute = refute
        self.witnesses: dict = {}
        self.exhausted = False
        self.notes: list[str] = []

    # -- public ------------------------------------------------------------

    def check(self, k: Kripke, state: Hashable, f: Formula) -> Verdict:
        if state not in k.succ:
            raise QctlError(f"unknown state {state!r}")
        s = _Struct.of(k)
        value = self.values(s, f)[state]
        witness = None
        if value is TRUE and isinstance(f, PropQ) and f.quant is Quant.EXISTS:
            witness = self.witnesses.get((id(s), f, state))
            witness = [witness] if witness else None
        note = f"budget {self.budget}"
        if self.notes:
            note += "; " + "; ".join(dict.fromkeys(self.notes))
        return Verdict(value, witness, note)

    # -- evaluation ----------------------------------------------------------

    def values(self, s: _Struct, f: Formula) -> dict:
        hit = s.memo.get(f)
        if hit is not None:
            return hit
        if s.parent is not None and not (_free(f) & s.added):
            up = self.values(s.parent, f)
            out = {q: up[s.base[q]] for q in s.states}
        else:
            out = self._compute(s, f)
        s.memo[f] = out
        return out

    def _compute(self, s: _Struct, f: Formula) -> dict:
        if isinstance(f, Const):
            v = Value.of(f.value)
            return {q: v for q in s.states}
        if isinstance(f, Atom):
            return {q: Value.of(f.name in s.labels[q]) for q in s.states}
        if isinstance(f, Not):
            sub = self.values(s, f.sub)
            return {q: ~sub[q] for q in s.states}
        if isinstance(f, And):
            l, r = self.values(s, f.left), self.values(s, f.right)
            return {q: l[q] & r[q] for q in s.states}
        if isinstance(f, Or):
            l, r = self.values(s, f.left), self.values(s, f.right)
            return {q: l[q] | r[q] for q in s.states}
        if isinstance(f, PathQ):
            if f.quant is Quant.FORALL:
                sub = self._exists_path(s, Not(f.sub))
                return {q: ~sub[q] for q in s.states}
            return self._exists_path(s, f.sub)
        if isinstance(f, PropQ):
            quant, props, body = _strip_block(f)
            if quant is Quant.FORALL:
                inner = self._exists_block(s, props, Not(body), f)
                return {q: ~inner[q] for q in s.states}
            return self._exists_block(s, props, body, f)
        if isinstance(f, (Next, Until)):
            raise QctlError("temporal operator outside a path quantifier")
        raise QctlError(f"not a QCTL* formula: {type(f).__name__}")

    def _exists_path(self, s: _Struct, psi: Formula) -> dict:
        aut, leaves = _automaton(psi)
        vals = {leaf: self.values(s, leaf) for leaf in leaves}
        any_unknown = any(v is UNKNOWN for d in vals.values() for v in d.values())

        def holder(optimistic: bool):
            def holds(q, leaf, positive):
                v = vals[leaf][q]
                if v is UNKNOWN:
                    return optimistic
                return (v is TRUE) == positive
            return holds

        succ = s.succ
        try:
            pess = ltl.exists_path_states(s.states, lambda q: succ[q], aut, holder(False), self.cap)
            opt = ltl.exists_path_states(s.states, lambda q: succ[q], aut, holder(True), self.cap) \
                if any_unknown else pess
        except ltl.ProductTooLarge:
            self.notes.append("product cap exceeded")
            self.exhausted = True
            return {q: UNKNOWN for q in s.states}
        return {q: TRUE if q in pess else (UNKNOWN if q in opt else FALSE) for q in s.states}

    # -- proposition quantifiers ---------------------------------------------

    def _exists_block(self, s: _Struct, props: list[str], body: Formula, source: Formula) -> dict:
        pset = frozenset(props)
        props = [p for p in props if p in _free(body)]
        if not props:
            return dict(self.values(s, body))
        pset = frozenset(props)
        depths = _prop_depths(body, pset)
        if depths is not None:
            nodes_needed = self._horizon_size(s, depths)
            if nodes_needed is not None and nodes_needed <= self.horizon_bits:
                return self._horizon_exact(s, props, depths, body)
        result = {q: UNKNOWN for q in s.states}
        self._enumerate_witnesses(s, props, body, result, source)
        pending = [q for q in s.states if result[q] is UNKNOWN]
        if pending and self.refute:
            refuted = self._refutation_game(s, props, body)
            if refuted is not None:
                for q in pending:
                    if q in refuted:
                        result[q] = FALSE
        return result

    # exact enumeration over a bounded tree prefix

    def _horizon_size(self, s: _Struct, depths: dict) -> Optional[int]:
        worst = 0
        max_d = max((max(d) for d in depths.values()), default=0)
        for q in s.states:
            level = [q]
            counts = [1]
            for _ in range(max_d):
                level = [r for x in level for r in s.succ[x]]
                counts.append(len(level))
                if len(level) > 64:
                    return None
            bits = sum(counts[d] for ds in depths.values() for d in ds)
            worst = max(worst, bits)
        return worst

    def _horizon_exact(self, s: _Struct, props: list[str], depths: dict, body: Formula) -> dict:
        max_d = max((max(d) for d in depths.values()), default=0)
        out = {}
        for q in s.states:
            nodes = [(q,)]
            level = [(q,)]
            for _ in range(max_d):
                level = [h + (r,) for h in level for r in s.succ[h[-1]]]
                nodes.extend(level)
            slots = [(h, p) for p in props for h in nodes if len(h) - 1 in depths.get(p, ())]
            value = FALSE
            for bits in itertools.product((False, True), repeat=len(slots)):
                lab = {}
                for (h, p), b in zip(slots, bits):
                    if b:
                        lab.setdefault(h, set()).add(p)
                prefix = _prefix_struct(s, nodes, max_d, lab, frozenset(props))
                v = self.values(prefix, body)[("t", (q,))]
                value = value | v
                if value is TRUE:
                    break
            out[q] = value
        return out

    # witness enumeration

    def _enumerate_witnesses(self, s: _Struct, props: list[str], body: Formula, result: dict,
                             source: Formula) -> None:
        pset = frozenset(props)
        options = self._label_options(s, props, body)
        machines = 0
        for size in range(1, self.budget + 1):
            states = s.states
            slot_opts = [options[q] for q in states] * size
            keys = [(m, q) for m in range(size) for q in states]
            upd_keys = keys if size > 1 else []
            for outs in itertools.product(*slot_opts):
                output = dict(zip(keys, outs))
                for ups in itertools.product(range(size), repeat=len(upd_keys)):
                    machines += 1
                    if machines > self.max_machines:
                        self.notes.append("labeler enumeration cut off")
                        self.exhausted = True
                        return
                    if size > 1 and not _uses_all_memory(size, ups, upd_keys):
                        continue
                    w = LabelingWitness(tuple(props), size, output, dict(zip(upd_keys, ups)))
                    prod = _labeler_struct(s, w, pset)
                    vals = self.values(prod, body)
                    for q in states:
                        if result[q] is UNKNOWN and vals[(q, 0)] is TRUE:
                            result[q] = TRUE
                            self.witnesses[(id(s), source, q)] = w
                    if all(result[q] is TRUE for q in states):
                        return

    def _label_options(self, s: _Struct, props: list[str], body: Formula) -> dict:
        """Labels allowed at each state by the propositional AG-constraints of the body."""
        pset = frozenset(props)
        local = []
        for c in _conjuncts(body):
            chi = _as_ag(c)
            if chi is None or not (_free(chi) & pset):
                continue
            d = _prop_depths(chi, pset)
            if d is not None and all(ds <= {0} for ds in d.values()) and _depth0_flat(chi, pset):
                local.append(chi)
        every = _powerset(props)
        if not local:
            return {q: every for q in s.states}
        out = {}
        for q in s.states:
            ok = [lab for lab in every
                  if all(self._flat_value(s, chi, q, lab, pset) is not FALSE for chi in local)]
            out[q] = ok or every
        return out

    def _flat_value(self, s: _Struct, f: Formula, q, lab: frozenset, pset: frozenset) -> Value:
        """Value of a state formula whose prop-bearing parts are propositional."""
        if not (_free(f) & pset):
            return self.values(s, f)[q]
        if isinstance(f, Atom):
            return Value.of(f.name in lab)
        if isinstance(f, Not):
            return ~self._flat_value(s, f.sub, q, lab, pset)
        if isinstance(f, And):
            return self._flat_value(s, f.left, q, lab, pset) & self._flat_value(s, f.right, q, lab, pset)
        if isinstance(f, Or):
            return self._flat_value(s, f.left, q, lab, pset) | self._flat_value(s, f.right, q, lab, pset)
        raise QctlError("not a propositional constraint")

    # refutation game

    def _refutation_game(self, s: _Struct, props: list[str], body: Formula) -> Optional[set]:
        pset = frozenset(props)
        node_constraints: list[Formula] = []   # AG chi, chi propositional in props
        step_constraints: list[Formula] = []   # AG chi, props at depth <= 1
        root_constraints: list[Formula] = []
        paths: list[Formula] = []
        facts: list[Formula] = []
        for c in _conjuncts(body):
            if not (_free(c) & pset):
                facts.append(c)
                continue
            chi = _as_ag(c)
            if chi is not None:
                d = _prop_depths(chi, pset)
                if d is not None and all(ds <= {0, 1} for ds in d.values()) and not _has_until_over(chi, pset):
                    if all(ds <= {0} for ds in d.values()) and _depth0_flat(chi, pset):
                        node_constraints.append(chi)
                    else:
                        step_constraints.append(chi)
                    continue
            if isinstance(c, PathQ) and c.quant is Quant.FORALL \
                    and _prop_bearing_state_subformulas_are_flat(c.sub, pset):
                paths.append(c.sub)
                continue
            d = _prop_depths(c, pset)
            if d is not None and all(ds <= {0, 1} for ds in d.values()) and not _has_until_over(c, pset):
                root_constraints.append(c)
                continue
            return None
        fact_vals = [self.values(s, c) for c in facts]
        every = _powerset(props)

        def node_ok(q, lab) -> bool:
            return all(self._flat_value(s, chi, q, lab, pset) is not FALSE for chi in node_constraints)

        allowed = {q: [lab for lab in every if node_ok(q, lab)] for q in s.states}
        step_cache: dict = {}

        def step_ok(q, lab, vec, constraints) -> bool:
            if not constraints:
                return True
            key = (q, lab, vec, id(constraints))
            hit = step_cache.get(key)
            if hit is None:
                prefix = _local_struct(s, q, lab, vec, pset)
                root = ("t", (q,))
                hit = all(self.values(prefix, chi)[root] is not FALSE for chi in constraints)
                step_cache[key] = hit
            return hit

        psi = Not(_conj(paths)) if paths else None
        aut = leaves = None
        if psi is not None:
            aut, leaves = _automaton(psi)
            leaf_free = {leaf: self.values(s, leaf) for leaf in leaves if not (_free(leaf) & pset)}
        k = len(aut.untils) if aut else 0

        letters: dict = {}

        def letter(q, lab) -> tuple:
            # the spoiler may only use literals that hold for every completion of unknowns
            hit = letters.get((q, lab))
            if hit is None:
                pos, neg = set(), set()
                for leaf in aut.atoms:
                    if leaf in leaf_free:
                        v = leaf_free[leaf][q]
                    else:
                        v = self._flat_value(s, leaf, q, lab, pset)
                    if v is TRUE:
                        pos.add(leaf)
                    elif v is FALSE:
                        neg.add(leaf)
                hit = letters[(q, lab)] = (frozenset(pos), frozenset(neg))
            return hit

        def advance(c, promises):
            flag = False
            while c < k and aut.untils[c] not in promises:
                c += 1
            if c == k:
                flag, c = True, 0
            return c, flag

        # nodes: ("R", q) labeler picks root label; ("E", q, lab, a, c) spoiler picks automaton step;
        # ("L", q, lab, a, c, flag) labeler picks children labels; ("X", q, vec, a, c) spoiler picks child
        owner: dict = {}
        succ: dict = {}
        accepting: set = set()
        init_aut = aut.initial if aut else frozenset()
        stack = []
        roots = {}
        for q in s.states:
            if any(fv[q] is FALSE for fv in fact_vals):
                roots[q] = None  # false already
                continue
            r = ("R", q)
            roots[q] = r
            stack.append(r)
        budget = self.cap
        while stack:
            n = stack.pop()
            if n in succ:
                continue
            if len(succ) > budget:
                self.notes.append("refutation game cap exceeded")
                return None
            kind = n[0]
            kids = []
            if kind == "R":
                q = n[1]
                owner[n] = False
                for lab in allowed[q]:
                    if root_constraints and not step_ok_root(self, s, q, lab, root_constraints, pset):
                        continue
                    kids.append(("E", q, lab, init_aut, 0))
            elif kind == "E":
                _, q, lab, a, c = n
                owner[n] = True
                if aut is None:
                    kids.append(("L", q, lab, a, c, False))
                else:
                    for t in aut.transitions_at(a, *letter(q, lab)):
                        c2, flag = advance(c, t.promises)
                        kids.append(("L", q, lab, t.target, c2, flag))
            elif kind == "L":
                _, q, lab, a, c, flag = n
                owner[n] = False
                if flag:
                    accepting.add(n)
                children = s.succ[q]
                for vec in itertools.product(*(allowed[r] for r in children)):
                    if step_ok(q, lab, vec, step_constraints):
                        kids.append(("X", q, vec, a, c))
            else:
                _, q, vec, a, c = n
                owner[n] = True
                for r, lab_r in zip(s.succ[q], vec):
                    kids.append(("E", r, lab_r, a, c))
            kids = list(dict.fromkeys(kids))
            succ[n] = kids
            for m in kids:
                if m not in succ:
                    stack.append(m)
        nodes = list(succ)
        spoiler = ltl.solve_buchi_game(nodes, owner, succ, accepting)
        out = set()
        for q, r in roots.items():
            if r is None or r in spoiler:
                out.add(q)
        return out


def step_ok_root(checker: QctlChecker, s: _Struct, q, lab, constraints, pset) -> bool:
    """Root constraints of depth <= 1: some labelling of the children must satisfy them."""
    children = s.succ[q]
    every = _powerset(sorted(pset))
    for vec in itertools.product(every, repeat=len(children)):
        prefix = _local_struct(s, q, lab, vec, pset)
        if all(checker.values(prefix, c)[("t", (q,))] is not FALSE for c in constraints):
            return True
    return False


def _depth0_flat(chi: Formula, pset: frozenset) -> bool:
    if not (_free(chi) & pset):
        return True
    if isinstance(chi, Atom):
        return True
    if isinstance(chi, (Not, And, Or)):
        return all(_depth0_flat(c, pset) for c in chi.children())
    return False


def _conj(items: list[Formula]) -> Formula:
    out = items[0]
    for f in items[1:]:
        out = And(out, f)
    return out


def _uses_all_memory(size: int, ups: tuple, keys: list) -> bool:
    """Skip machines whose update table never reaches the top memory state (covered by smaller sizes)."""
    return (size - 1) in ups


def _automaton(psi: Formula):
    return ltl.path_automaton(psi)


def _labeler_struct(s: _Struct, w: LabelingWitness, added: frozenset) -> _Struct:
    states = [(q, m) for m in range(w.size) for q in s.states]
    succ = {(q, m): tuple((r, w.next_memory(m, r)) for r in s.succ[q]) for (q, m) in states}
    labels = {(q, m): (s.labels[q] - added) | w.output[(m, q)] for (q, m) in states}
    base = {(q, m): q for (q, m) in states}
    return _Struct(states, succ, labels, s, base, added)


def _prefix_struct(s: _Struct, nodes: list, depth: int, lab: Mapping, added: frozenset) -> _Struct:
    """Tree prefix of the given histories (labelled by ``lab``) continued by a copy of ``s``."""
    states = [("t", h) for h in nodes] + [("s", q) for q in s.states]
    succ = {}
    labels = {}
    base = {}
    for h in nodes:
        n = ("t", h)
        if len(h) - 1 < depth:
            succ[n] = tuple(("t", h + (r,)) for r in s.succ[h[-1]])
        else:
            succ[n] = tuple(("s", r) for r in s.succ[h[-1]])
        labels[n] = s.labels[h[-1]] - added | frozenset(lab.get(h, ()))
        base[n] = h[-1]
    for q in s.states:
        n = ("s", q)
        succ[n] = tuple(("s", r) for r in s.succ[q])
        labels[n] = s.labels[q] - added
        base[n] = q
    return _Struct(states, succ, labels, s, base, added)


def _local_struct(s: _Struct, q, lab: frozenset, vec: tuple, added: frozenset) -> _Struct:
    children = s.succ[q]
    nodes = [(q,)] + [(q, r) for r in children]
    labmap = {(q,): lab}
    for r, l in zip(children, vec):
        labmap[(q, r)] = l
    return _prefix_struct(s, nodes, 1, labmap, added)


# ---------------------------------------------------------------------------
# module-level helpers


def check_qctl(k: Kripke, state: Hashable, f: Formula, budget: int = 1, cap: int = 100_000,
               **options) -> Verdict:
    return QctlChecker(budget=budget, cap=cap, **options).check(k, state, f)


def check_ctl_star(k: Kripke, state: Hashable, f: Formula) -> bool:
    """Exact CTL* check for formulas without proposition quantifiers."""
    if any(isinstance(g, PropQ) for g in _walk(f)):
        raise QctlError("check_ctl_star expects a formula without proposition quantifiers")
    v = QctlChecker(cap=10**9).check(k, state, f).value
    if v is UNKNOWN:
        raise QctlError("unexpected unknown verdict")
    return v is TRUE


def _walk(f: Formula):
    yield f
    for c in f.children():
        yield from _walk(c)
