"""Team semantics over a fixed finite proposition context.

A valuation is an integer ``v`` in ``range(2**n)`` read as a bitstring in
context order with the first proposition as the most significant bit.  A team
is an integer bitmask over valuations, and a team property is an integer
bitmask over team masks.  Everything is exact; nothing is sampled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .syntax import (
    BOT_TERM, FULL, IDENT_RE, NONEMPTY, PLAIN, SINGLE, SUBTEAM, TOP, TOP_TERM,
    And, Bot, Formula, FullAtom, GlobalOr, Incl, Might, SplitOr, StrictOr, Top, big_and,
    free_props, is_constant, Logic,
)


class ContextError(ValueError):
    """A formula, team or property does not fit the proposition context."""


class TeamTooLarge(ValueError):
    """Per-team evaluation would enumerate too many covers; use ``denotation``."""


class ContextTooLarge(ValueError):
    """Exhaustive enumeration over all teams would be too expensive."""


@dataclass(frozen=True)
class PropContext:
    props: tuple = ()
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        props = tuple(self.props)
        object.__setattr__(self, "props", props)
        for p in props:
            if not isinstance(p, str) or not IDENT_RE.match(p) or p in ("bot", "top", "full"):
                raise ContextError(f"not a proposition symbol: {p!r}")
        if len(set(props)) != len(props):
            raise ContextError("proposition symbols must be distinct")
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(props)})

    @classmethod
    def parse(cls, text: str) -> "PropContext":
        return cls(tuple(text.replace(",", " ").split()))

    @classmethod
    def of(cls, ctx) -> "PropContext":
        if isinstance(ctx, PropContext):
            return ctx
        if isinstance(ctx, str):
            return cls.parse(ctx)
        return cls(tuple(ctx))

    @property
    def n(self) -> int:
        return len(self.props)

    @property
    def n_vals(self) -> int:
        return 1 << self.n

    @property
    def full(self) -> int:
        """Mask of the full team."""
        return (1 << self.n_vals) - 1

    @property
    def n_teams(self) -> int:
        return 1 << self.n_vals

    @property
    def all_teams_property(self) -> int:
        return (1 << self.n_teams) - 1

    def index(self, p: str) -> int:
        try:
            return self._index[p]
        except KeyError:
            raise ContextError(f"proposition {p!r} not in context {self.props}") from None

    def value(self, v: int, term: str) -> int:
        if term == TOP_TERM:
            return 1
        if term == BOT_TERM:
            return 0
        return (v >> (self.n - 1 - self.index(term))) & 1

    def values(self, v: int, terms: Sequence[str]) -> tuple[int, ...]:
        return tuple(self.value(v, t) for t in terms)

    def valuation_of_bits(self, bits: Sequence[int]) -> int:
        v = 0
        for b in bits:
            v = (v << 1) | (1 if b else 0)
        return v

    def bits(self, v: int) -> tuple[int, ...]:
        return tuple((v >> (self.n - 1 - i)) & 1 for i in range(self.n))

    def check_formula(self, f: Formula) -> None:
        extra = free_props(f) - set(self.props)
        if extra:
            raise ContextError(f"symbols {sorted(extra)} not in context {self.props}")


# ---------------------------------------------------------------------------
# Bit helpers


def members(mask: int) -> Iterator[int]:
    """Indices of set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, from ``mask`` down to 0."""
    s = mask
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & mask


def team_of(vals: Iterable[int]) -> int:
    t = 0
    for v in vals:
        t |= 1 << v
    return t


def prop_of(teams: Iterable[int]) -> int:
    c = 0
    for t in teams:
        c |= 1 << t
    return c


def has(prop: int, team: int) -> bool:
    return (prop >> team) & 1 == 1


# ---------------------------------------------------------------------------
# Literals


def format_valuation(ctx: PropContext, v: int) -> str:
    return "".join(str(b) for b in ctx.bits(v))


def format_team(ctx: PropContext, team: int) -> str:
    if team == 0:
        return "EMPTY"
    if team == ctx.full:
        return "FULL"
    return ",".join(format_valuation(ctx, v) for v in members(team))


def parse_team(ctx: PropContext, text) -> int:
    """Parse ``"10,01"``, ``FULL``, ``EMPTY`` or a list of bitstrings."""
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        s = text.strip()
        if s.upper() == "EMPTY" or s == "":
            return 0
        if s.upper() == "FULL":
            return ctx.full
        items = [x.strip() for x in s.split(",")]
    team = 0
    for bits in items:
        bits = str(bits)
        if len(bits) != ctx.n or any(c not in "01" for c in bits):
            raise ContextError(f"valuation {bits!r} is not a {ctx.n}-bit string")
        team |= 1 << (int(bits, 2) if bits else 0)
    return team


def format_property(ctx: PropContext, prop: int) -> str:
    return ";".join(format_team(ctx, t) for t in members(prop))


def parse_property(ctx: PropContext, text: str) -> int:
    """Parse ``"EMPTY;10,01"`` or a JSON array of arrays of bitstrings."""
    s = text.strip()
    if s.startswith("["):
        return prop_of(parse_team(ctx, item) for item in json.loads(s))
    if not s:
        return 0
    return prop_of(parse_team(ctx, part) for part in s.split(";"))


def property_to_json(ctx: PropContext, prop: int) -> list[list[str]]:
    return [[format_valuation(ctx, v) for v in members(t)] for t in members(prop)]


# ---------------------------------------------------------------------------
# Single-team evaluation


def _incl_holds(ctx: PropContext, team: int, a: Incl) -> bool:
    lhs = {ctx.values(v, a.lhs) for v in members(team)}
    if not lhs:
        return True
    rhs = {ctx.values(v, a.rhs) for v in members(team)}
    return lhs <= rhs


def eval_incl(ctx: PropContext, team: int, a: Incl) -> bool:
    if a.flavor == NONEMPTY:
        return team != 0 and _incl_holds(ctx, team, a)
    if a.flavor == FULL:
        return team == ctx.full or _incl_holds(ctx, team, a)
    return _incl_holds(ctx, team, a)


class _Evaluator:
    def __init__(self, ctx: PropContext, max_members: int):
        self.ctx = ctx
        self.max_members = max_members
        self.memo: dict = {}

    def __call__(self, team: int, f: Formula) -> bool:
        key = (f, team)
        hit = self.memo.get(key)
        if hit is None:
            hit = self.memo[key] = self._eval(team, f)
        return hit

    def _guard(self, team: int) -> None:
        if team.bit_count() > self.max_members:
            raise TeamTooLarge(
                f"team has {team.bit_count()} members; cover enumeration bound is {self.max_members}")

    def _eval(self, team: int, f: Formula) -> bool:
        t = type(f)
        if t is Bot:
            return team == 0
        if t is Top:
            return True
        if t is FullAtom:
            return team == self.ctx.full
        if t is Incl:
            return eval_incl(self.ctx, team, f)
        if t is And:
            return self(team, f.left) and self(team, f.right)
        if t is GlobalOr:
            return self(team, f.left) or self(team, f.right)
        if t is SplitOr:
            self._guard(team)
            # T = T1 u T2: pick T1, then T2 covers the rest plus any part of T1.
            for t1 in submasks(team):
                if not self(t1, f.left):
                    continue
                rest = team & ~t1
                for x in submasks(t1):
                    if self(rest | x, f.right):
                        return True
            return False
        if t is StrictOr:
            self._guard(team)
            return any(self(t1, f.left) and self(team & ~t1, f.right) for t1 in submasks(team))
        if t is Might:
            if f.kind == SINGLE:
                return team == 0 or any(self(1 << v, f.body) for v in members(team))
            if f.kind == SUBTEAM and team == 0:
                return True
            self._guard(team)
            return any(self(s, f.body) for s in submasks(team) if s)
        raise TypeError(f"not a formula: {f!r}")


def evaluate(team: int, f: Formula, ctx, max_members: int = 12) -> bool:
    """Whether ``team`` satisfies ``f``.

    Split disjunction walks all 3^|T| covers, strict disjunction all 2^|T|
    partitions.  Teams with more than ``max_members`` members raise
    ``TeamTooLarge`` when such an enumeration is needed.
    """
    ctx = PropContext.of(ctx)
    ctx.check_formula(f)
    if team < 0 or team > ctx.full:
        raise ContextError("team is not over this context")
    return _Evaluator(ctx, max_members)(team, f)


# ---------------------------------------------------------------------------
# Whole-property evaluation


def _check_size(ctx: PropContext, max_props: int) -> None:
    if ctx.n > max_props:
        raise ContextTooLarge(f"|P|={ctx.n} exceeds the exhaustive bound {max_props}")


def _prop_from_array(hits) -> int:
    packed = np.packbits(hits, bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def _product(ctx: PropContext, a: int, b: int, disjoint: bool) -> int:
    xs = list(members(a))
    ys = list(members(b))
    if len(xs) * len(ys) <= 256:
        out = 0
        for s in xs:
            for t in ys:
                if not (disjoint and s & t):
                    out |= 1 << (s | t)
        return out
    xa = np.array(xs, dtype=np.int64)[:, None]
    ya = np.array(ys, dtype=np.int64)[None, :]
    joined = xa | ya
    if disjoint:
        joined = joined[(xa & ya) == 0]
    hits = np.zeros(ctx.n_teams, dtype=bool)
    hits[joined.ravel()] = True
    return _prop_from_array(hits)


def union_product(ctx: PropContext, a: int, b: int) -> int:
    """{S u T : S in a, T in b}."""
    return _product(ctx, a, b, False)


def disjoint_union_product(ctx: PropContext, a: int, b: int) -> int:
    return _product(ctx, a, b, True)


def _incl_property(ctx: PropContext, a: Incl) -> int:
    vals = range(ctx.n_vals)
    lhs = [ctx.values(v, a.lhs) for v in vals]
    rhs = [ctx.values(v, a.rhs) for v in vals]
    out = 0
    for team in range(ctx.n_teams):
        if a.flavor == NONEMPTY and team == 0:
            continue
        if a.flavor == FULL and team == ctx.full:
            out |= 1 << team
            continue
        have = {rhs[v] for v in members(team)}
        if all(lhs[v] in have for v in members(team)):
            out |= 1 << team
    return out


def _upward_from(ctx: PropContext, prop: int) -> int:
    """Teams that include some member of ``prop``."""
    out = prop
    for team in range(ctx.n_teams):
        if has(out, team):
            for v in range(ctx.n_vals):
                out |= 1 << (team | (1 << v))
    return out


def _downward_from(ctx: PropContext, prop: int) -> int:
    out = prop
    for team in range(ctx.n_teams - 1, -1, -1):
        if has(out, team):
            for v in members(team):
                out |= 1 << (team & ~(1 << v))
    return out


def denotation(f: Formula, ctx, max_props: int = 3, full_blind: bool = False) -> int:
    """The team property of ``f`` over ``ctx``, as a bitmask over team masks.

    With ``full_blind`` the full-team escape is ignored: full inclusion atoms
    behave as plain ones and the full atom has the empty property.  This
    auxiliary semantics is used by the proof builders.
    """
    ctx = PropContext.of(ctx)
    ctx.check_formula(f)
    _check_size(ctx, max_props)
    memo: dict = {}

    def den(g: Formula) -> int:
        hit = memo.get(g)
        if hit is not None:
            return hit
        t = type(g)
        if t is Bot:
            r = 1
        elif t is Top:
            r = ctx.all_teams_property
        elif t is FullAtom:
            r = 0 if full_blind else 1 << ctx.full
        elif t is Incl:
            a = Incl(g.lhs, g.rhs, PLAIN) if (full_blind and g.flavor == FULL) else g
            r = _incl_property(ctx, a)
        elif t is And:
            r = den(g.left) & den(g.right)
        elif t is GlobalOr:
            r = den(g.left) | den(g.right)
        elif t is SplitOr:
            r = union_product(ctx, den(g.left), den(g.right))
        elif t is StrictOr:
            r = disjoint_union_product(ctx, den(g.left), den(g.right))
        elif t is Might:
            body = den(g.body)
            if g.kind == SINGLE:
                singles = team_of(v for v in range(ctx.n_vals) if has(body, 1 << v))
                r = 1 | prop_of(team for team in range(1, ctx.n_teams) if team & singles)
            else:
                r = _upward_from(ctx, body & ~1)
                if g.kind == SUBTEAM:
                    r |= 1
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = r
        return r

    return den(f)


def satisfying_teams(f: Formula, ctx, **kw) -> list[int]:
    return list(members(denotation(f, ctx, **kw)))


def entails(gamma: Sequence[Formula], psi: Formula, ctx, max_props: int = 3) -> bool:
    """Whether every team satisfying all of ``gamma`` satisfies ``psi``."""
    return counterexample(gamma, psi, ctx, max_props) is None


def counterexample(gamma: Sequence[Formula], psi: Formula, ctx, max_props: int = 3) -> Optional[int]:
    """Smallest team satisfying ``gamma`` but not ``psi``, if any."""
    ctx = PropContext.of(ctx)
    common = ctx.all_teams_property
    for g in gamma:
        common &= denotation(g, ctx, max_props)
    bad = common & ~denotation(psi, ctx, max_props)
    if not bad:
        return None
    return next(members(bad))


def equivalent(f: Formula, g: Formula, ctx, max_props: int = 3) -> bool:
    return denotation(f, ctx, max_props) == denotation(g, ctx, max_props)


# ---------------------------------------------------------------------------
# Closure


class ClosureKind(str, Enum):
    DOWNWARD = "d"
    QUASI_DOWNWARD = "qd"
    UPWARD = "u"
    QUASI_UPWARD = "qu"
    UNION = "union"
    EMPTY_TEAM = "empty"
    FULL_TEAM = "full"

    @classmethod
    def parse(cls, text: str) -> "ClosureKind":
        aliases = {
            "downward": "d", "quasi-downward": "qd", "upward": "u", "quasi-upward": "qu",
            "union-closed": "union", "empty-team": "empty", "full-team": "full",
        }
        key = text.strip().lower()
        return cls(aliases.get(key, key))


KIND_OF_LOGIC = {
    Logic.QU: ClosureKind.QUASI_UPWARD,
    Logic.U: ClosureKind.UPWARD,
    Logic.QD: ClosureKind.QUASI_DOWNWARD,
    Logic.D: ClosureKind.DOWNWARD,
}


def _downward_closed(ctx: PropContext, prop: int) -> bool:
    for team in members(prop):
        for v in members(team):
            if not has(prop, team & ~(1 << v)):
                return False
    return True


def _upward_closed(ctx: PropContext, prop: int) -> bool:
    for team in members(prop):
        for v in members(ctx.full & ~team):
            if not has(prop, team | (1 << v)):
                return False
    return True


def _union_closed(ctx: PropContext, prop: int) -> bool:
    teams = list(members(prop))
    return all(has(prop, s | t) for i, s in enumerate(teams) for t in teams[i + 1:])


def check_closure(prop: int, kind, ctx) -> bool:
    """The closure predicate ``kind`` applied to ``prop``.

    Single-step neighbours suffice: a property is downward closed iff removing
    any one member from any of its teams stays inside it, and dually.
    """
    ctx = PropContext.of(ctx)
    kind = ClosureKind(kind)
    if kind is ClosureKind.DOWNWARD:
        return _downward_closed(ctx, prop)
    if kind is ClosureKind.UPWARD:
        return _upward_closed(ctx, prop)
    if kind is ClosureKind.QUASI_DOWNWARD:
        return has(prop, ctx.full) and _downward_closed(ctx, prop & ~(1 << ctx.full))
    if kind is ClosureKind.QUASI_UPWARD:
        return has(prop, 0) and _upward_closed(ctx, prop & ~1)
    if kind is ClosureKind.UNION:
        return _union_closed(ctx, prop)
    if kind is ClosureKind.EMPTY_TEAM:
        return has(prop, 0)
    return has(prop, ctx.full)


def close(prop: int, kind, ctx) -> int:
    """The closure operators qu, u, qd and d."""
    ctx = PropContext.of(ctx)
    kind = ClosureKind(kind)
    if prop == 0:
        raise ValueError("closure of the empty team property is undefined")
    if kind is ClosureKind.UPWARD:
        return _upward_from(ctx, prop)
    if kind is ClosureKind.DOWNWARD:
        return _downward_from(ctx, prop)
    if kind is ClosureKind.QUASI_UPWARD:
        return 1 | _upward_from(ctx, prop & ~1)
    if kind is ClosureKind.QUASI_DOWNWARD:
        top = 1 << ctx.full
        return top | _downward_from(ctx, prop & ~top)
    raise ValueError(f"no closure operator for kind {kind.value!r}")


def dual_atom_expand(a: Incl) -> Formula:
    """Rewrite a dual atom ``p <= x`` as the conjunction of ``p_i <= x_i``.

    The result uses plain atoms, so for the full flavour it loses exactly the
    full-team escape: its denotation is the original one minus possibly F.
    """
    if not isinstance(a, Incl) or a.flavor == NONEMPTY:
        raise ValueError("expected a plain or full inclusion atom")
    if any(is_constant(t) for t in a.lhs) or not all(is_constant(t) for t in a.rhs):
        raise ValueError("expected propositions on the left and constants on the right")
    return big_and([Incl((p,), (x,), PLAIN) for p, x in zip(a.lhs, a.rhs)], TOP)
