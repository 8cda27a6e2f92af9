"""Formula ASTs, parser and printer for ATLsc, SL and QCTL*.

One immutable AST serves the three logics.  Derived operators (``F``,
``G``, ``->``, ``<<A>> phi`` with a state operand) are expanded by the
parser and re-sugared by the printer, so ``parse(print(f)) == f``.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union


class Quant(enum.Enum):
    EXISTS = "E"
    FORALL = "A"

    @property
    def dual(self) -> "Quant":
        return Quant.FORALL if self is Quant.EXISTS else Quant.EXISTS


# the E/A of path quantification and exists/forall of propositions share a type
PathQuant = Quant


class Formula:
    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)

    def children(self) -> tuple["Formula", ...]:
        return ()


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Next(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class StratQuant(Formula):
    """``<<A>> path``; ``memoryless`` marks the ATLsc0 quantifier ``<<A>>0``."""

    coalition: tuple[str, ...]
    sub: Formula
    memoryless: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coalition", tuple(sorted(set(self.coalition))))

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Relax(Formula):
    coalition: tuple[str, ...]
    sub: Formula

    def __post_init__(self):
        object.__setattr__(self, "coalition", tuple(sorted(set(self.coalition))))

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class PathQ(Formula):
    quant: Quant
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class PropQ(Formula):
    quant: Quant
    prop: str
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class StratVar(Formula):
    """SL strategy quantifier ``<x> phi`` (``<x>0`` when memoryless)."""

    var: str
    sub: Formula
    memoryless: bool = False

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Bind(Formula):
    agent: str
    var: str
    sub: Formula

    def children(self):
        return (self.sub,)


def _cached_hash(self) -> int:
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))
        object.__setattr__(self, "_hash", h)
    return h


# formulas are hashed constantly by memo tables; cache the recursive hash
for _cls in (Const, Atom, Not, And, Or, Next, Until, StratQuant, Relax, PathQ, PropQ, StratVar, Bind):
    _cls.__hash__ = _cached_hash

TRUE = Const(True)
FALSE = Const(False)

LOGICS = ("atlsc", "sl", "qctl")

# Reserved proposition families produced by the translations.
RESERVED_PREFIXES = ("st_", "turn_", "mov_", "choose_", "vmov_", "vchoose_", "fresh_")
RESERVED_AGENT = "a0"


def state_prop(state: str) -> str:
    return f"st_{state}"


def turn_prop(agent: str) -> str:
    return f"turn_{agent}"


def mc_move_prop(agent: str, move: str, tag: int = 0) -> str:
    base = f"mov_{agent}_{move}"
    return base if tag == 0 else f"{base}__{tag}"


def tb_move_prop(agent: str, tag: int) -> str:
    return f"mov_{agent}__{tag}"


def ba_move_prop(agent: str, move: str) -> str:
    return f"mov_{agent}_{move}"


def choose_prop(agent: str, move: str, tag: int) -> str:
    return f"choose_{agent}_{move}__{tag}"


def sl_move_prop(var: str) -> str:
    return f"vmov_{var}"


def sl_choose_prop(var: str, move: str) -> str:
    return f"vchoose_{var}_{move}"


def is_reserved(prop: str) -> bool:
    return prop.startswith(RESERVED_PREFIXES)


# ---------------------------------------------------------------------------
# smart constructors


def neg(f: Formula) -> Formula:
    return Not(f)


def conj(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        return TRUE
    out = items[0]
    for f in items[1:]:
        out = And(out, f)
    return out


def disj(items: Iterable[Formula]) -> Formula:
    items = list(items)
    if not items:
        return FALSE
    out = items[0]
    for f in items[1:]:
        out = Or(out, f)
    return out


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return And(implies(a, b), implies(b, a))


def eventually(f: Formula) -> Formula:
    return Until(TRUE, f)


def globally(f: Formula) -> Formula:
    return Not(Until(TRUE, Not(f)))


def AG(f: Formula) -> Formula:
    return PathQ(Quant.FORALL, globally(f))


def AX(f: Formula) -> Formula:
    return PathQ(Quant.FORALL, Next(f))


def EX(f: Formula) -> Formula:
    return PathQ(Quant.EXISTS, Next(f))


def next_n(f: Formula, n: int) -> Formula:
    for _ in range(n):
        f = Next(f)
    return f


def strat(coalition: Iterable[str], path: Formula, memoryless: bool = False) -> Formula:
    return StratQuant(tuple(coalition), path, memoryless)


def strat_state(coalition: Iterable[str], state: Formula, memoryless: bool = False) -> Formula:
    """``<<A>> phi`` for a state formula, i.e. ``<<A>> (false U phi)``."""
    return StratQuant(tuple(coalition), Until(FALSE, state), memoryless)


def box(coalition: Iterable[str], path: Formula, memoryless: bool = False) -> Formula:
    """Dual quantifier: every A-strategy has an outcome satisfying ``path``."""
    return Not(StratQuant(tuple(coalition), Not(path), memoryless))


# ---------------------------------------------------------------------------
# traversal


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    for c in f.children():
        yield from subformulas(c)


def atoms_of(f: Formula) -> set[str]:
    """Free atomic propositions (quantified ones excluded)."""
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, PropQ):
        return atoms_of(f.sub) - {f.prop}
    out: set[str] = set()
    for c in f.children():
        out |= atoms_of(c)
    return out


def agents_of(f: Formula) -> set[str]:
    """Agents appearing in strategy quantifiers, relax coalitions and bindings."""
    out: set[str] = set()
    for g in subformulas(f):
        if isinstance(g, (StratQuant, Relax)):
            out.update(g.coalition)
        elif isinstance(g, Bind):
            out.add(g.agent)
    return out


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def is_path_body(f: Formula) -> bool:
    """True for the ATLsc path shapes ``X s``, ``s U s`` and their negations."""
    while isinstance(f, Not):
        f = f.sub
    return isinstance(f, (Next, Until))


def strat_quantifier_count(f: Formula) -> int:
    return sum(isinstance(g, (StratQuant, StratVar)) for g in subformulas(f))


def prop_quantifiers(f: Formula) -> list[PropQ]:
    return [g for g in subformulas(f) if isinstance(g, PropQ)]


def quantifier_block_depth(f: Formula) -> int:
    """Maximal number of nested blocks of proposition quantifiers.

    Consecutive quantifiers of the same kind form one block; a negation
    between quantifiers flips the polarity so ``exists . not exists`` counts
    as two blocks.
    """

    def walk(g: Formula, last: Optional[Quant]) -> int:
        if isinstance(g, PropQ):
            inner = walk(g.sub, g.quant)
            return inner if last is g.quant else inner + 1
        if isinstance(g, Not):
            return walk(g.sub, last.dual if last else None)
        best = 0
        for c in g.children():
            best = max(best, walk(c, last if isinstance(g, (And, Or)) else None))
        return best

    return walk(f, None)


def temporal_depth(f: Formula) -> Optional[int]:
    """Nesting depth of ``X``; ``None`` when an ``U`` occurs (unbounded)."""
    if isinstance(f, Until):
        if f.left == FALSE:
            return temporal_depth(f.right)
        return None
    best = 0
    for c in f.children():
        d = temporal_depth(c)
        if d is None:
            return None
        best = max(best, d)
    return best + 1 if isinstance(f, Next) else best


# ---------------------------------------------------------------------------
# negation pushing


def push_path_negation(f: Formula, context_domain: Iterable[str], universe: Iterable[str]) -> Formula:
    """Remove negations directly below strategy quantifiers.

    ``<<A>> !psi`` becomes ``<<A>> (false U !<<Agt \\ (A u B)>> psi)`` where
    B is the context domain at that point; ``<<A>> G phi`` thus turns into
    ``<<A>> !<<Agt \\ A>> F !phi`` under an empty context.
    """
    universe = set(universe)
    return _push(f, frozenset(context_domain), universe)


def _push(f: Formula, ctx: frozenset, universe: set) -> Formula:
    if isinstance(f, StratQuant):
        inner_ctx = ctx | set(f.coalition)
        body = f.sub
        if isinstance(body, Not):
            positive = body.sub
            negations = 1
            while isinstance(positive, Not):
                positive = positive.sub
                negations += 1
            if negations % 2 == 0:
                return StratQuant(f.coalition, _push_path(positive, inner_ctx, universe), f.memoryless)
            opponents = tuple(sorted(universe - inner_ctx))
            spoiler = StratQuant(opponents, _push_path(positive, inner_ctx | set(opponents), universe),
                                 f.memoryless)
            return StratQuant(f.coalition, Until(FALSE, Not(spoiler)), f.memoryless)
        return StratQuant(f.coalition, _push_path(body, inner_ctx, universe), f.memoryless)
    if isinstance(f, Relax):
        return Relax(f.coalition, _push(f.sub, ctx - set(f.coalition), universe))
    if isinstance(f, Not):
        return Not(_push(f.sub, ctx, universe))
    if isinstance(f, And):
        return And(_push(f.left, ctx, universe), _push(f.right, ctx, universe))
    if isinstance(f, Or):
        return Or(_push(f.left, ctx, universe), _push(f.right, ctx, universe))
    return f


def _push_path(p: Formula, ctx: frozenset, universe: set) -> Formula:
    if isinstance(p, Next):
        return Next(_push(p.sub, ctx, universe))
    if isinstance(p, Until):
        return Until(_push(p.left, ctx, universe), _push(p.right, ctx, universe))
    return _push(p, ctx, universe)


# ---------------------------------------------------------------------------
# lexer


class FormulaError(Exception):
    """Syntax or well-formedness error, located at ``line``/``column``."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


KEYWORDS = {"X", "U", "F", "G", "E", "A", "exists", "forall", "relax", "true", "false"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<sym><<|>>0|>>|->|>0|[<>()!&|,.])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "sym", "ident", "kw", "eof"
    text: str
    line: int
    column: int


def tokenize(text: str, line_offset: int = 0) -> list[Token]:
    tokens = []
    pos = 0
    line, col = 1 + line_offset, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaError(f"unexpected character {text[pos]!r}", line, col)
        chunk = m.group(0)
        if m.lastgroup == "sym":
            tokens.append(Token("sym", chunk, line, col))
        elif m.lastgroup == "ident":
            tokens.append(Token("kw" if chunk in KEYWORDS else "ident", chunk, line, col))
        for ch in chunk:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# parser
#
# Precedence, loosest first: '->' (right) < '|' < '&' < 'U' (right) < unary.
# Binders (exists/forall, <x>, (a,x)) extend as far right as possible.
# Prefix operators <<A>>, relax(A), E and A take a U-level operand, so
# "<<a>> X p & q" reads "(<<a>> X p) & q".

_LEVEL_IMPLIES, _LEVEL_OR, _LEVEL_AND, _LEVEL_UNTIL = 0, 1, 2, 3


class _Parser:
    def __init__(self, tokens: list[Token], logic: str):
        self.tokens = tokens
        self.i = 0
        self.logic = logic
        self.positions: dict[int, tuple[int, int]] = {}

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise FormulaError(msg, tok.line, tok.column)

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("sym", "kw") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.tok
        if not self.accept(text):
            self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return tok

    def ident(self) -> str:
        tok = self.tok
        if tok.kind != "ident":
            self.error(f"expected identifier, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok.text

    def note(self, f: Formula, tok: Token) -> Formula:
        self.positions.setdefault(id(f), (tok.line, tok.column))
        return f

    def parse(self) -> Formula:
        f = self.expr(_LEVEL_IMPLIES)
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")
        return f

    def expr(self, level: int) -> Formula:
        if level == _LEVEL_IMPLIES:
            tok = self.tok
            left = self.expr(_LEVEL_OR)
            if self.accept("->"):
                right = self.expr(_LEVEL_IMPLIES)
                return self.note(implies(left, right), tok)
            return left
        if level == _LEVEL_OR:
            tok = self.tok
            left = self.expr(_LEVEL_AND)
            while self.accept("|"):
                left = self.note(Or(left, self.expr(_LEVEL_AND)), tok)
            return left
        if level == _LEVEL_AND:
            tok = self.tok
            left = self.expr(_LEVEL_UNTIL)
            while self.accept("&"):
                left = self.note(And(left, self.expr(_LEVEL_UNTIL)), tok)
            return left
        tok = self.tok
        left = self.unary()
        if self.accept("U"):
            right = self.expr(_LEVEL_UNTIL)
            return self.note(Until(left, right), tok)
        return left

    def coalition(self) -> tuple[str, ...]:
        names = []
        if self.tok.kind == "ident":
            names.append(self.ident())
            while self.accept(","):
                names.append(self.ident())
        return tuple(names)

    def unary(self) -> Formula:
        tok = self.tok
        t = tok.text
        if tok.kind == "sym":
            if t == "!":
                self.i += 1
                return self.note(Not(self.unary()), tok)
            if t == "(":
                if self.logic == "sl" and self.peek(1).kind == "ident" and self.peek(2).text == "," \
                        and self.peek(3).kind == "ident" and self.peek(4).text == ")":
                    self.i += 1
                    agent = self.ident()
                    self.expect(",")
                    var = self.ident()
                    self.expect(")")
                    return self.note(Bind(agent, var, self.expr(_LEVEL_IMPLIES)), tok)
                self.i += 1
                inner = self.expr(_LEVEL_IMPLIES)
                self.expect(")")
                return inner
            if t == "<<":
                self.i += 1
                agents = self.coalition()
                if self.accept(">>0"):
                    memoryless = True
                else:
                    self.expect(">>")
                    memoryless = False
                body = self.expr(_LEVEL_UNTIL)
                if not is_path_body(body):
                    body = Until(FALSE, body)
                return self.note(StratQuant(agents, body, memoryless), tok)
            if t == "<":
                self.i += 1
                var = self.ident()
                if self.accept(">0"):
                    memoryless = True
                else:
                    self.expect(">")
                    memoryless = False
                return self.note(StratVar(var, self.expr(_LEVEL_IMPLIES), memoryless), tok)
        elif tok.kind == "kw":
            if t in ("X", "F", "G"):
                self.i += 1
                sub = self.unary()
                f = Next(sub) if t == "X" else eventually(sub) if t == "F" else globally(sub)
                return self.note(f, tok)
            if t in ("E", "A"):
                self.i += 1
                return self.note(PathQ(Quant(t), self.expr(_LEVEL_UNTIL)), tok)
            if t in ("exists", "forall"):
                self.i += 1
                prop = self.ident()
                self.expect(".")
                quant = Quant.EXISTS if t == "exists" else Quant.FORALL
                return self.note(PropQ(quant, prop, self.expr(_LEVEL_IMPLIES)), tok)
            if t == "relax":
                self.i += 1
                self.expect("(")
                agents = self.coalition()
                self.expect(")")
                return self.note(Relax(agents, self.expr(_LEVEL_UNTIL)), tok)
            if t in ("true", "false"):
                self.i += 1
                return Const(t == "true")
        elif tok.kind == "ident":
            self.i += 1
            return self.note(Atom(t), tok)
        self.error(f"unexpected {t or 'end of input'!r}")


_ALLOWED = {
    "atlsc": (Const, Atom, Not, And, Or, Next, Until, StratQuant, Relax),
    "sl": (Const, Atom, Not, And, Or, Next, Until, StratVar, Bind),
    "qctl": (Const, Atom, Not, And, Or, Next, Until, PathQ, PropQ),
}


@dataclass
class Document:
    formula: Formula
    agents: Optional[tuple[str, ...]] = None
    props: Optional[tuple[str, ...]] = None


def parse_document(logic: str, text: str, allow_reserved: bool = False) -> Document:
    """Parse a formula file: optional ``agents:``/``props:`` header lines, then a formula."""
    if logic not in LOGICS:
        raise ValueError(f"unknown logic {logic!r}")
    lines = text.split("\n")
    agents = props = None
    skip = 0
    for line in lines:
        stripped = line.strip()
        if stripped.startswith("agents:"):
            agents = tuple(a.strip() for a in stripped[len("agents:"):].split(",") if a.strip())
        elif stripped.startswith("props:"):
            props = tuple(p.strip() for p in stripped[len("props:"):].split(",") if p.strip())
        elif stripped.startswith("#") or not stripped:
            pass
        else:
            break
        skip += 1
    body = "\n".join(lines[skip:])
    parser = _Parser(tokenize(body, line_offset=skip), logic)
    f = parser.parse()
    _validate(f, logic, parser.positions, agents, props, allow_reserved)
    return Document(f, agents, props)


def parse(logic: str, text: str, allow_reserved: bool = False) -> Formula:
    return parse_document(logic, text, allow_reserved).formula


def _validate(f, logic, positions, agents, props, allow_reserved):
    def where(g):
        return positions.get(id(g), (1, 1))

    def fail(msg, g):
        line, col = where(g)
        raise FormulaError(msg, line, col)

    for g in subformulas(f):
        if not isinstance(g, _ALLOWED[logic]):
            fail(f"{type(g).__name__} is not part of {logic}", g)
        if isinstance(g, Atom) and not allow_reserved and logic != "qctl" and is_reserved(g.name):
            fail(f"proposition {g.name!r} uses a reserved prefix", g)
        if isinstance(g, Atom) and props is not None and g.name not in props:
            fail(f"undeclared proposition {g.name!r}", g)
        names = ()
        if isinstance(g, (StratQuant, Relax)):
            names = g.coalition
        elif isinstance(g, Bind):
            names = (g.agent,)
        for a in names:
            if agents is not None and a not in agents:
                fail(f"unknown agent {a!r}", g)
            if logic == "atlsc" and a == RESERVED_AGENT and not allow_reserved:
                fail(f"agent name {a!r} is reserved", g)
    try:
        if logic == "atlsc":
            check_atlsc(f)
        elif logic == "qctl":
            check_qctl_syntax(f)
    except FormulaError as exc:
        line, col = where(getattr(exc, "node", f))
        raise FormulaError(exc.message, line, col) from None


def _strat_error(msg, node):
    err = FormulaError(msg)
    err.node = node
    return err


def check_atlsc(f: Formula) -> None:
    """Raise FormulaError unless ``f`` respects the ATLsc state/path layering."""

    def state(g):
        if isinstance(g, (Next, Until)):
            raise _strat_error("temporal operator at a state position (missing <<A>>)", g)
        if isinstance(g, StratQuant):
            path(g.sub)
            return
        for c in g.children():
            state(c)

    def path(g):
        if isinstance(g, Not):
            path(g.sub)
        elif isinstance(g, Next):
            state(g.sub)
        elif isinstance(g, Until):
            state(g.left)
            state(g.right)
        else:
            raise _strat_error("strategy quantifier expects X, U, F or G", g)

    state(f)


def check_qctl_syntax(f: Formula) -> None:
    def walk(g, in_path):
        if isinstance(g, (Next, Until)) and not in_path:
            raise _strat_error("temporal operator outside a path quantifier", g)
        if isinstance(g, PathQ):
            walk(g.sub, True)
        elif isinstance(g, PropQ):
            walk(g.sub, False)
        else:
            for c in g.children():
                walk(c, in_path)

    walk(f, False)


def is_state_formula(f: Formula) -> bool:
    """No temporal operator outside path/strategy quantifiers."""
    if isinstance(f, (Next, Until)):
        return False
    if isinstance(f, (PathQ, StratQuant)):
        return True
    return all(is_state_formula(c) for c in f.children())


# ---------------------------------------------------------------------------
# SL well-formedness


def free_strategy_vars(f: Formula) -> set[str]:
    if isinstance(f, StratVar):
        return free_strategy_vars(f.sub) - {f.var}
    if isinstance(f, Bind):
        return free_strategy_vars(f.sub) | {f.var}
    out: set[str] = set()
    for c in f.children():
        out |= free_strategy_vars(c)
    return out


def check_sl_sentence(f: Formula, agents: Iterable[str]) -> None:
    """Closed, fresh variables, and all agents bound under every temporal operator."""
    agents = set(agents)
    free = free_strategy_vars(f)
    if free:
        raise FormulaError(f"free strategy variables {sorted(free)}")

    def walk(g, bound_vars, bound_agents):
        if isinstance(g, StratVar):
            if g.var in bound_vars:
                raise FormulaError(f"strategy variable {g.var!r} is not fresh")
            walk(g.sub, bound_vars | {g.var}, bound_agents)
        elif isinstance(g, Bind):
            walk(g.sub, bound_vars, bound_agents | {g.agent})
        elif isinstance(g, (Next, Until)):
            missing = agents - bound_agents
            if missing:
                raise FormulaError(f"agents {sorted(missing)} unbound under a temporal operator")
            for c in g.children():
                walk(c, bound_vars, bound_agents)
        else:
            for c in g.children():
                walk(c, bound_vars, bound_agents)

    walk(f, frozenset(), frozenset())


# ---------------------------------------------------------------------------
# printer


def to_text(f: Formula) -> str:
    return _show(f)


def _as_implication(f: Formula):
    if isinstance(f, Or) and isinstance(f.left, Not):
        return f.left.sub, f.right
    return None


def _as_globally(f: Formula):
    if isinstance(f, Not) and isinstance(f.sub, Until) and f.sub.left == TRUE and isinstance(f.sub.right, Not):
        return f.sub.right.sub
    return None


def _as_eventually(f: Formula):
    if isinstance(f, Until) and f.left == TRUE:
        return f.right
    return None


def _kind(f: Formula):
    """Classify for parenthesisation: ('bin', level, right_assoc) / 'unary' / 'prefix' / 'binder' / 'atom'."""
    if _as_implication(f) is not None:
        return ("bin", _LEVEL_IMPLIES, True)
    if _as_globally(f) is not None or _as_eventually(f) is not None:
        return "unary"
    if isinstance(f, Or):
        return ("bin", _LEVEL_OR, False)
    if isinstance(f, And):
        return ("bin", _LEVEL_AND, False)
    if isinstance(f, Until):
        return ("bin", _LEVEL_UNTIL, True)
    if isinstance(f, (Not, Next)):
        return "unary"
    if isinstance(f, (StratQuant, Relax, PathQ)):
        return "prefix"
    if isinstance(f, (PropQ, StratVar, Bind)):
        return "binder"
    return "atom"


def _wrap(s: str) -> str:
    return f"({s})"


def _operand(f: Formula, ctx: str, level: int = 0, side: str = "") -> str:
    k = _kind(f)
    text = _show(f)
    if ctx == "unary":
        need = k == "binder" or isinstance(k, tuple)
    elif ctx == "prefix":
        need = k == "binder" or (isinstance(k, tuple) and k[1] < _LEVEL_UNTIL)
    else:  # binary operand
        if k == "binder":
            need = True
        elif k == "prefix":
            need = level == _LEVEL_UNTIL and side == "left"
        elif isinstance(k, tuple):
            _, lv, right_assoc = k
            if lv != level:
                need = lv < level
            else:
                need = (side == "left") == right_assoc
        else:
            need = False
    return _wrap(text) if need else text


def _coal(names) -> str:
    return ",".join(names)


def _show(f: Formula) -> str:
    imp = _as_implication(f)
    if imp is not None:
        a, b = imp
        return f"{_operand(a, 'bin', _LEVEL_IMPLIES, 'left')} -> {_operand(b, 'bin', _LEVEL_IMPLIES, 'right')}"
    g = _as_globally(f)
    if g is not None:
        return f"G {_operand(g, 'unary')}"
    ev = _as_eventually(f)
    if ev is not None:
        return f"F {_operand(ev, 'unary')}"
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return f"!{_operand(f.sub, 'unary')}"
    if isinstance(f, Next):
        return f"X {_operand(f.sub, 'unary')}"
    if isinstance(f, And):
        return f"{_operand(f.left, 'bin', _LEVEL_AND, 'left')} & {_operand(f.right, 'bin', _LEVEL_AND, 'right')}"
    if isinstance(f, Or):
        return f"{_operand(f.left, 'bin', _LEVEL_OR, 'left')} | {_operand(f.right, 'bin', _LEVEL_OR, 'right')}"
    if isinstance(f, Until):
        return f"{_operand(f.left, 'bin', _LEVEL_UNTIL, 'left')} U {_operand(f.right, 'bin', _LEVEL_UNTIL, 'right')}"
    if isinstance(f, StratQuant):
        head = f"<<{_coal(f.coalition)}>>" + ("0" if f.memoryless else "")
        body = f.sub
        if isinstance(body, Until) and body.left == FALSE and not is_path_body(body.right):
            body = body.right
        return f"{head} {_operand(body, 'prefix')}"
    if isinstance(f, Relax):
        return f"relax({_coal(f.coalition)}) {_operand(f.sub, 'prefix')}"
    if isinstance(f, PathQ):
        return f"{f.quant.value} {_operand(f.sub, 'prefix')}"
    if isinstance(f, PropQ):
        word = "exists" if f.quant is Quant.EXISTS else "forall"
        return f"{word} {f.prop}. {_show(f.sub)}"
    if isinstance(f, StratVar):
        return f"<{f.var}>{'0' if f.memoryless else ''} {_show(f.sub)}"
    if isinstance(f, Bind):
        return f"({f.agent},{f.var}) {_show(f.sub)}"
    raise TypeError(f"not a formula: {f!r}")


Logic = str
AnyFormula = Union[Formula]
