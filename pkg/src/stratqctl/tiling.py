"""Tiling-problem formulas for ATLsc with memoryless strategies.

The generated formula describes a turn-based game shaped as a grid of
four-state cells whose choice states pick tiles, so that a memoryless
strategy of player ``a1`` in the choice states is a tiling respecting the
horizontal and vertical relations.  Player ``a1`` owns square states
(``sq``), player ``a2`` circle states (``ci``).

Every strategy quantifier is memoryless.  Universal path quantification
is ``<<>>0`` (exact under an empty context), ``X^k`` inside a quantifier
is written ``X <<>>0 X ...`` to stay within the state/path layering.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Hashable, Optional, Sequence

from .direct import check_memoryless
from .formulas import (FALSE, And, Atom, Formula, FormulaError, Next, Not, Or, StratQuant, Until, conj, disj,
                       globally, iff, implies, is_reserved, subformulas)
from .games import Cgs, turn_based_cgs

P1, P2 = "a1", "a2"
SQUARE, CIRCLE = "sq", "ci"
FIXED_PROPS = ("m", "c", "v1", "v2", "alpha", "beta", SQUARE, CIRCLE)
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


@dataclass(frozen=True)
class TilingInstance:
    tiles: tuple
    h: frozenset
    v: frozenset

    def __post_init__(self):
        if not self.tiles:
            raise FormulaError("a tiling instance needs at least one tile")
        for t in self.tiles:
            if not _IDENT.match(t) or t in FIXED_PROPS or is_reserved(t) or t in ("X", "U", "F", "G", "E", "A"):
                raise FormulaError(f"tile name {t!r} is not a usable proposition")
        if len(set(self.tiles)) != len(self.tiles):
            raise FormulaError("duplicate tile names")
        for rel in (self.h, self.v):
            for a, b in rel:
                if a not in self.tiles or b not in self.tiles:
                    raise FormulaError(f"relation mentions undeclared tile in {(a, b)!r}")

    @staticmethod
    def of(tiles: Sequence[str], h=(), v=()) -> "TilingInstance":
        return TilingInstance(tuple(tiles), frozenset(map(tuple, h)), frozenset(map(tuple, v)))

    @staticmethod
    def from_dict(doc: dict) -> "TilingInstance":
        return TilingInstance.of(doc["tiles"], doc.get("h", ()), doc.get("v", ()))

    @staticmethod
    def load(path: str) -> "TilingInstance":
        with open(path, encoding="utf-8") as fh:
            return TilingInstance.from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# vocabulary


def _a(name: str) -> Formula:
    return Atom(name)


def _q(coalition, path: Formula) -> Formula:
    return StratQuant(tuple(coalition), path, True)


def _all(path: Formula) -> Formula:
    """Universal path quantifier, valid under an empty context."""
    return _q((), path)


def _ex_next(f: Formula) -> Formula:
    return Not(_all(Next(Not(f))))


def _ag(f: Formula) -> Formula:
    return _all(globally(f))


def _ax(f: Formula) -> Formula:
    return _all(Next(f))


def xs(k: int, f: Formula) -> Formula:
    """Path formula ``X^k f`` as ``X <<>>0 X ... f``."""
    if k < 1:
        raise ValueError("k must be positive")
    path = Next(f)
    for _ in range(k - 1):
        path = Next(_q((), path))
    return path


def _dia(coalition, path: Formula) -> Formula:
    return _q(coalition, path)


def _box(coalition, path: Formula) -> Formula:
    return Not(_q(coalition, Not(path)))


def _box_state(coalition, f: Formula) -> Formula:
    return Not(_q(coalition, Until(FALSE, Not(f))))


def _weak_until(a: Formula, b: Formula) -> Formula:
    """``a W b`` = ``G a | a U b`` = ``!(!b U (!a & !b))``."""
    return Not(Until(Not(b), And(Not(a), Not(b))))


# ---------------------------------------------------------------------------
# conjuncts


def conjuncts(inst: TilingInstance) -> dict[str, Formula]:
    """Named conjuncts of the tiling formula, in order."""
    m, c, v1, v2 = _a("m"), _a("c"), _a("v1"), _a("v2")
    al, be, sq, ci = _a("alpha"), _a("beta"), _a(SQUARE), _a(CIRCLE)
    tiles = [_a(t) for t in inst.tiles]
    ap_prime = [m, c] + tiles
    ap = ap_prime + [v1, v2, al, be, sq, ci]
    out: dict[str, Formula] = {}

    out["exactly_one"] = _ag(disj([conj([p] + [Not(r) for r in ap_prime if r != p]) for p in ap_prime]))
    out["main_until_choice"] = _all(_weak_until(m, c))
    out["choice_states"] = _ag(implies(c, conj([sq] + [_dia([P1], Next(t)) for t in tiles]
                                               + [_ax(disj([_ag(t) for t in tiles]))])))
    out["turn_based"] = _ag(conj([
        iff(sq, Not(ci)),
        implies(sq, conj([iff(_ex_next(p), _dia([P1], Next(p))) for p in ap])),
        implies(ci, conj([iff(_ex_next(p), _dia([P2], Next(p))) for p in ap])),
    ]))

    corner = And(m, sq)
    final = conj([m, ci, Not(al), Not(be)])
    out["cell_states"] = _ag(implies(m, Or(conj([sq, Not(al), Not(be)]), And(ci, Not(And(al, be))))))
    out["cell_marks"] = _ag(And(implies(corner, iff(v1, Not(v2))), implies(Or(v1, v2), corner)))
    out["cell_moves"] = _ag(implies(corner, conj([
        _ax(conj([m, ci, Or(al, be), _ax(final)])),
        _dia([P1], Next(al)),
        _dia([P1], Next(be)),
    ])))
    out["cell_exits"] = And(
        _ag(implies(disj([_ex_next(c), _ex_next(v1), _ex_next(v2)]), final)),
        _ag(implies(final, conj([_ex_next(c), _ex_next(v1), _ex_next(v2), _ax(disj([c, v1, v2]))]))),
    )

    def neighbours(rel, there: Formula) -> Formula:
        return disj([And(_dia([P2], xs(2, _a(t1))), _dia([P2], Next(And(there, _q((), xs(2, _a(t2)))))))
                     for t1, t2 in sorted(rel)])

    out["tiling"] = _dia([P1], globally(conj([
        implies(v1, neighbours(inst.h, v2)),
        implies(v2, neighbours(inst.h, v1)),
        implies(v1, neighbours(inst.v, v1)),
        implies(v2, neighbours(inst.v, v2)),
    ])))

    out["confluence"] = _ag(implies(corner, _box_state([P2], Or(_all(xs(3, Or(c, v1))), _all(xs(3, Or(c, v2)))))))
    out["two_successors"] = _ag(implies(corner, _box_state([P1], implies(
        And(_dia([P2], xs(3, And(v1, _q((), Next(al))))), _dia([P2], xs(3, And(v2, _q((), Next(al)))))),
        _box_state([P2], _all(xs(4, al)))))))

    def common(va: Formula) -> Formula:
        premise = _dia([P2], xs(3, And(va, _box([P2], xs(4, al)))))
        conclusion = _dia([P2], xs(3, And(Not(va), _q((), xs(3, And(Not(va), _q((), Next(al))))))))
        return _box_state([P1], _all(globally(implies(conj([m, sq, va]), implies(premise, conclusion)))))

    out["common_successor"] = common(v1)
    out["common_successor_v2"] = common(v2)
    out["initial"] = And(sq, m)
    return out


NON_LOCAL = ("main_until_choice",)


def generate_tiling_formula(inst: TilingInstance) -> Formula:
    return conj(conjuncts(inst).values())


def x_nesting(f: Formula) -> int:
    """Largest number of ``X`` operators on a branch of the syntax tree."""
    best = 0
    for g in f.children():
        best = max(best, x_nesting(g))
    return best + 1 if isinstance(f, Next) else best


def only_memoryless(f: Formula) -> bool:
    return all(g.memoryless for g in subformulas(f) if isinstance(g, StratQuant))


def local_nesting(inst: TilingInstance) -> dict[str, int]:
    return {name: x_nesting(f) for name, f in conjuncts(inst).items() if name not in NON_LOCAL}


# ---------------------------------------------------------------------------
# candidates


def check_candidate(inst: TilingInstance, cgs: Cgs, state: Hashable) -> bool:
    return check_memoryless(cgs, state, generate_tiling_formula(inst))


def failing_conjuncts(inst: TilingInstance, cgs: Cgs, state: Hashable) -> list[str]:
    return [name for name, f in conjuncts(inst).items() if not check_memoryless(cgs, state, f)]


def grid_candidate(tile: Optional[str] = None) -> Cgs:
    """Two cells (one per column parity) closing the grid onto itself, one tile state.

    Each cell is a square corner owned by ``a1`` choosing ``alpha`` or ``beta``,
    two circle states and a final circle state owned by ``a2`` that leads to
    the cell's choice state and to the top (same parity) and right (other
    parity) corners.
    """
    tile = tile or "t"
    owner, succ, labels = {}, {}, {}
    for cell, mark, other in (("A", "v1", "B"), ("B", "v2", "A")):
        sq_, al_, be_, fn_, ch_ = (f"{x}{cell}" for x in ("sq", "al", "be", "fn", "ch"))
        owner.update({sq_: P1, al_: P2, be_: P2, fn_: P2, ch_: P1})
        succ.update({sq_: [al_, be_], al_: [fn_], be_: [fn_], fn_: [ch_, f"sq{cell}", f"sq{other}"],
                     ch_: ["tile"]})
        labels.update({sq_: ["m", SQUARE, mark], al_: ["m", CIRCLE, "alpha"], be_: ["m", CIRCLE, "beta"],
                       fn_: ["m", CIRCLE], ch_: ["c", SQUARE]})
    owner["tile"] = P1
    succ["tile"] = ["tile"]
    labels["tile"] = [tile, SQUARE]
    states = list(succ)
    return turn_based_cgs(states, [P1, P2], owner, succ, labels, "sqA")
