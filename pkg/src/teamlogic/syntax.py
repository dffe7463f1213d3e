"""Formulas of the four team logics: representation, parsing, printing, grammars.

Terms inside inclusion atoms are plain strings: ``"1"`` and ``"0"`` stand for
the constants top and bottom, anything else is a proposition symbol.
"""

from __future__ import annotations

import re
import weakref
from dataclasses import dataclass, fields
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence

TOP_TERM = "1"
BOT_TERM = "0"
CONSTANTS = (TOP_TERM, BOT_TERM)

PLAIN = "plain"
NONEMPTY = "nonempty"
FULL = "full"
FLAVORS = (PLAIN, NONEMPTY, FULL)

SINGLE = "single"
SUBTEAM = "subteam"
NONEMPTY_SUBTEAM = "nonempty-subteam"
MIGHT_KINDS = (SINGLE, SUBTEAM, NONEMPTY_SUBTEAM)

KEYWORDS = frozenset({"bot", "top", "full", "might1", "might", "MIGHT"})

_REL_OF_FLAVOR = {PLAIN: "<=", NONEMPTY: "<=!", FULL: "<=*"}
_FLAVOR_OF_REL = {v: k for k, v in _REL_OF_FLAVOR.items()}
_MIGHT_WORD = {SINGLE: "might1", SUBTEAM: "might", NONEMPTY_SUBTEAM: "MIGHT"}
_MIGHT_OF_WORD = {v: k for k, v in _MIGHT_WORD.items()}

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


class Logic(str, Enum):
    QU = "qu"
    U = "u"
    QD = "qd"
    D = "d"

    @classmethod
    def parse(cls, text: str) -> "Logic":
        key = text.strip().lower()
        if key.startswith("l_") or key.startswith("l"):
            key = key[2:] if key.startswith("l_") else key[1:]
        return cls(key)


def is_constant(term: str) -> bool:
    return term in CONSTANTS


def is_symbol(term: str) -> bool:
    return term not in CONSTANTS


# ---------------------------------------------------------------------------
# Formula nodes


_CANON: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()


class Formula:
    """Base class of immutable formula nodes.

    Equality is structural.  Hashes are cached since formulas are used as
    dictionary keys all over the proof checker.
    """

    _names: tuple = ()

    def _fields(self) -> tuple:
        return tuple(getattr(self, n) for n in self._names)

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + self._fields())
            object.__setattr__(self, "_hash", h)
        return h

    def __getstate__(self):
        return {k: v for k, v in self.__dict__.items() if k not in ("_canon", "_hash")}

    def __setstate__(self, state):
        self.__dict__.update(state)

    def canonical(self) -> "Formula":
        """The interned representative of this formula's structure."""
        c = self.__dict__.get("_canon")
        if c is None:
            key = (type(self),) + tuple(v.canonical() if isinstance(v, Formula) else v
                                        for v in self._fields())
            c = _CANON.setdefault(key, self)
            object.__setattr__(self, "_canon", c)
        return c

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        return self.canonical() is other.canonical()

    def __ne__(self, other: object) -> bool:
        return not self == other

    def __str__(self) -> str:
        return to_text(self)

    def children(self) -> tuple["Formula", ...]:
        return ()


def _node(cls):
    cls = dataclass(frozen=True, eq=False)(cls)
    cls._names = tuple(f.name for f in fields(cls))
    return cls


@_node
class Bot(Formula):
    pass


@_node
class Top(Formula):
    pass


@_node
class FullAtom(Formula):
    pass


@_node
class Incl(Formula):
    lhs: tuple
    rhs: tuple
    flavor: str = PLAIN

    def __post_init__(self):
        object.__setattr__(self, "lhs", tuple(self.lhs))
        object.__setattr__(self, "rhs", tuple(self.rhs))
        if len(self.lhs) != len(self.rhs):
            raise ValueError(
                f"inclusion atom sides differ in length: {len(self.lhs)} vs {len(self.rhs)}")
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown inclusion flavor {self.flavor!r}")

    @property
    def columns(self) -> tuple[tuple[str, str], ...]:
        return tuple(zip(self.lhs, self.rhs))


@_node
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@_node
class SplitOr(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@_node
class GlobalOr(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@_node
class StrictOr(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@_node
class Might(Formula):
    kind: str
    body: Formula

    def __post_init__(self):
        if self.kind not in MIGHT_KINDS:
            raise ValueError(f"unknown might modality {self.kind!r}")

    def children(self):
        return (self.body,)


BOT = Bot()
TOP = Top()
FULL_ATOM = FullAtom()
EMPTY_INCL = Incl((), (), PLAIN)

BINARY = (And, SplitOr, GlobalOr, StrictOr)


def incl(lhs: Iterable[str], rhs: Iterable[str], flavor: str = PLAIN) -> Incl:
    return Incl(tuple(lhs), tuple(rhs), flavor)


def _fold(op, items: Sequence[Formula], empty: Optional[Formula]) -> Formula:
    items = list(items)
    if not items:
        if empty is None:
            raise ValueError("empty big operator")
        return empty
    acc = items[0]
    for item in items[1:]:
        acc = op(acc, item)
    return acc


def big_and(items: Sequence[Formula], empty: Formula = TOP) -> Formula:
    """Left-associated conjunction; ``empty`` stands in for the empty one."""
    return _fold(And, items, empty)


def big_split_or(items: Sequence[Formula], empty: Formula = BOT) -> Formula:
    return _fold(SplitOr, items, empty)


def big_global_or(items: Sequence[Formula]) -> Formula:
    return _fold(GlobalOr, items, None)


def flatten(f: Formula, op: type) -> list[Formula]:
    """Operands of a maximal ``op``-tree, left to right."""
    out: list[Formula] = []
    stack = [f]
    while stack:
        g = stack.pop()
        if type(g) is op:
            stack.append(g.right)
            stack.append(g.left)
        else:
            out.append(g)
    return out


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(g.children()))


def free_props(f: Formula) -> frozenset[str]:
    """Proposition symbols occurring in ``f``."""
    out: set[str] = set()
    for g in subformulas(f):
        if isinstance(g, Incl):
            out.update(t for t in g.lhs + g.rhs if is_symbol(t))
    return frozenset(out)


def contains(f: Formula, kind: type) -> bool:
    return any(isinstance(g, kind) for g in subformulas(f))


def depth(f: Formula) -> int:
    kids = f.children()
    return 0 if not kids else 1 + max(depth(k) for k in kids)


# ---------------------------------------------------------------------------
# Parsing


class FormulaSyntaxError(ValueError):
    """Raised for malformed formula text; ``pos`` is a character offset."""

    def __init__(self, message: str, pos: int = -1, text: str = ""):
        self.pos = pos
        self.text = text
        where = f" at position {pos}" if pos >= 0 else ""
        super().__init__(f"{message}{where}")


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<empty>\[\])
  | (?P<rel><=!|<=\*|<=)
  | (?P<gor>\|\|)
  | (?P<sor>\|s(?![A-Za-z0-9_']))
  | (?P<or>\|)
  | (?P<and>&)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<const>[01])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "ident" and value in KEYWORDS:
                kind = "kw"
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, symbols: Optional[frozenset[str]]):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.symbols = symbols

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str, tok=None):
        tok = tok or self.peek()
        raise FormulaSyntaxError(message, tok[2], self.text)

    def formula(self) -> Formula:
        left = self.sor()
        while self.peek()[0] == "gor":
            self.take()
            left = GlobalOr(left, self.sor())
        return left

    def sor(self) -> Formula:
        left = self.conj()
        while self.peek()[0] in ("or", "sor"):
            kind = self.take()[0]
            right = self.conj()
            left = SplitOr(left, right) if kind == "or" else StrictOr(left, right)
        return left

    def conj(self) -> Formula:
        left = self.atom()
        while self.peek()[0] == "and":
            self.take()
            left = And(left, self.atom())
        return left

    def atom(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "kw":
            self.take()
            if value == "bot":
                return BOT
            if value == "top":
                return TOP
            if value == "full":
                return FULL_ATOM
            return Might(_MIGHT_OF_WORD[value], self.atom())
        if kind == "lpar":
            self.take()
            inner = self.formula()
            if self.peek()[0] != "rpar":
                self.fail("expected ')'")
            self.take()
            return inner
        if kind in ("empty", "const", "ident"):
            start = self.peek()
            lhs = self.seq()
            if self.peek()[0] != "rel":
                self.fail("expected '<=', '<=!' or '<=*'")
            flavor = _FLAVOR_OF_REL[self.take()[1]]
            rhs = self.seq()
            if len(lhs) != len(rhs):
                self.fail(f"inclusion atom sides differ in length ({len(lhs)} vs {len(rhs)})", start)
            return Incl(lhs, rhs, flavor)
        if kind == "eof":
            self.fail("unexpected end of input")
        self.fail(f"unexpected token {value!r}")

    def seq(self) -> tuple[str, ...]:
        kind, value, pos = self.peek()
        if kind == "empty":
            self.take()
            return ()
        terms = []
        while self.peek()[0] in ("const", "ident"):
            tok = self.take()
            if tok[0] == "ident" and self.symbols is not None and tok[1] not in self.symbols:
                raise FormulaSyntaxError(f"unknown proposition symbol {tok[1]!r}", tok[2], self.text)
            terms.append(tok[1])
        if not terms:
            self.fail("expected a term sequence")
        return tuple(terms)


def parse(text: str, ctx=None) -> Formula:
    """Parse formula text.

    ``ctx`` is a ``PropContext`` (or any iterable of symbols); when given, every
    proposition symbol in ``text`` must belong to it.
    """
    symbols = None
    if ctx is not None:
        symbols = frozenset(getattr(ctx, "props", ctx))
    p = _Parser(text, symbols)
    f = p.formula()
    if p.peek()[0] != "eof":
        p.fail(f"unexpected token {p.peek()[1]!r}")
    return f


# ---------------------------------------------------------------------------
# Printing

_PREC = {GlobalOr: 1, SplitOr: 2, StrictOr: 2, And: 3}
_OP_TEXT = {GlobalOr: "||", SplitOr: "|", StrictOr: "|s", And: "&"}


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), 4)


def _seq_text(seq: tuple[str, ...]) -> str:
    return " ".join(seq) if seq else "[]"


def to_text(f: Formula) -> str:
    """Canonical text: minimal parentheses under left associativity."""
    t = type(f)
    if t is Bot:
        return "bot"
    if t is Top:
        return "top"
    if t is FullAtom:
        return "full"
    if t is Incl:
        return f"{_seq_text(f.lhs)} {_REL_OF_FLAVOR[f.flavor]} {_seq_text(f.rhs)}"
    if t is Might:
        body = to_text(f.body)
        if _prec(f.body) < 4:
            body = f"({body})"
        return f"{_MIGHT_WORD[f.kind]} {body}"
    p = _PREC[t]
    left = to_text(f.left)
    if _prec(f.left) < p:
        left = f"({left})"
    right = to_text(f.right)
    if _prec(f.right) <= p:
        right = f"({right})"
    return f"{left} {_OP_TEXT[t]} {right}"


# ---------------------------------------------------------------------------
# Grammars

_ATOM_SHAPES = {
    # logic: (flavor, lhs constants?, constant atom)
    Logic.QU: (PLAIN, True, Bot),
    Logic.U: (NONEMPTY, True, Top),
    Logic.QD: (FULL, False, FullAtom),
    Logic.D: (PLAIN, False, Bot),
}

_CONNECTIVES = {
    Logic.QU: (And, GlobalOr),
    Logic.U: (And, GlobalOr),
    Logic.QD: (And, SplitOr, GlobalOr),
    Logic.D: (And, SplitOr, GlobalOr),
}


def atom_violation(a: Incl, logic: Logic) -> Optional[str]:
    flavor, constants_left, _ = _ATOM_SHAPES[logic]
    if a.flavor != flavor:
        return f"{a.flavor} inclusion atom is not in L_{logic.value}"
    if constants_left:
        if not all(is_constant(t) for t in a.lhs):
            return "left side of a primitive atom must be constants"
        if not all(is_symbol(t) for t in a.rhs):
            return "right side of a primitive atom must be proposition symbols"
        if len(set(a.rhs)) != len(a.rhs):
            return "repeated proposition symbol on the right side"
    else:
        if not all(is_symbol(t) for t in a.lhs):
            return "left side of a dual atom must be proposition symbols"
        if not all(is_constant(t) for t in a.rhs):
            return "right side of a dual atom must be constants"
    return None


def membership_violation(f: Formula, logic: Logic) -> Optional[tuple[Formula, str]]:
    """First subformula (preorder) that takes ``f`` outside ``logic``, with a reason."""
    logic = Logic(logic)
    _, _, const = _ATOM_SHAPES[logic]
    allowed = _CONNECTIVES[logic]
    for g in subformulas(f):
        t = type(g)
        if t in allowed:
            continue
        if t is const:
            continue
        if t is Incl:
            why = atom_violation(g, logic)
            if why:
                return g, why
            continue
        return g, f"{t.__name__} is not in the grammar of L_{logic.value}"
    return None


def logic_membership(f: Formula, logic: Logic) -> bool:
    return membership_violation(f, logic) is None
