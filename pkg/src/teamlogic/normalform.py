"""Characteristic formulas and normal forms for the four logics.

Every normal form is a global disjunction, in ascending team-mask order, of one
characteristic formula per team.  Big conjunctions and split disjunctions are
folded to the left in ascending valuation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .semantics import (
    KIND_OF_LOGIC, PropContext, check_closure, denotation, members, prop_of,
)
from .syntax import (
    BOT, BOT_TERM, EMPTY_INCL, FULL, FULL_ATOM, NONEMPTY, PLAIN, TOP, TOP_TERM,
    And, Bot, Formula, FullAtom, GlobalOr, Incl, Logic, SplitOr, Top,
    big_and, big_global_or, big_split_or, flatten, membership_violation,
)


class NotClosed(ValueError):
    """The team property lacks the closure property required by the logic."""


def signature(ctx: PropContext, v: int) -> tuple[str, ...]:
    """The constant sequence listing v's truth values in context order."""
    return tuple(TOP_TERM if b else BOT_TERM for b in ctx.bits(v))


def valuation_of_signature(ctx: PropContext, sig) -> int:
    return ctx.valuation_of_bits([t == TOP_TERM for t in sig])


def psi_prime(ctx: PropContext, team: int) -> Formula:
    return big_and([Incl(signature(ctx, v), ctx.props, PLAIN) for v in members(team)], EMPTY_INCL)


def psi_star(ctx: PropContext, team: int) -> Formula:
    return big_and([Incl(signature(ctx, v), ctx.props, NONEMPTY) for v in members(team)], TOP)


def empty_team_atom(ctx: PropContext) -> Incl:
    """The full atom satisfied by exactly the empty and the full team."""
    if ctx.n == 0:
        raise ValueError("the empty-team characteristic atom needs at least one proposition")
    return Incl((ctx.props[0],) + ctx.props, (TOP_TERM,) + (BOT_TERM,) * ctx.n, FULL)


def theta_prime(ctx: PropContext, team: int) -> Formula:
    if team == 0:
        return empty_team_atom(ctx)
    return big_split_or([Incl(ctx.props, signature(ctx, v), FULL) for v in members(team)])


def theta_star(ctx: PropContext, team: int) -> Formula:
    return big_split_or([Incl(ctx.props, signature(ctx, v), PLAIN) for v in members(team)], BOT)


CHARACTERISTIC = {
    Logic.QU: psi_prime,
    Logic.U: psi_star,
    Logic.QD: theta_prime,
    Logic.D: theta_star,
}


def characteristic(logic: Logic, ctx: PropContext, team: int) -> Formula:
    return CHARACTERISTIC[Logic(logic)](ctx, team)


@dataclass(frozen=True)
class NormalForm:
    """A normal form: either a special constant or a list of disjunct teams.

    ``special`` is ``"bot"`` (the empty-team property of the quasi upward
    logic) or ``"full"`` (the full atom), otherwise ``teams`` lists the
    disjunct teams in ascending mask order.
    """

    logic: Logic
    ctx: PropContext
    teams: tuple = ()
    special: Optional[str] = None
    _formula: list = field(default_factory=list, repr=False, compare=False, hash=False)

    @property
    def formula(self) -> Formula:
        if not self._formula:
            if self.special == "bot":
                f = BOT
            elif self.special == "full":
                f = FULL_ATOM
            else:
                f = big_global_or([characteristic(self.logic, self.ctx, t) for t in self.teams])
            self._formula.append(f)
        return self._formula[0]

    @property
    def property(self) -> int:
        """The team property the normal form is indexed by."""
        if self.special == "bot":
            return 1
        if self.special == "full":
            return 1 << self.ctx.full
        return prop_of(self.teams)

    def disjuncts(self) -> list[Formula]:
        if self.special:
            return [self.formula]
        return [characteristic(self.logic, self.ctx, t) for t in self.teams]

    def __str__(self) -> str:
        return str(self.formula)


def _from_index(logic: Logic, ctx: PropContext, prop: int) -> NormalForm:
    if logic is Logic.QU and prop & ~1 == 0:
        return NormalForm(logic, ctx, special="bot")
    if logic is Logic.QD and prop & ~(1 << ctx.full) == 0:
        return NormalForm(logic, ctx, special="full")
    if logic is Logic.QU:
        prop &= ~1
    elif logic is Logic.QD:
        prop &= ~(1 << ctx.full)
    return NormalForm(logic, ctx, teams=tuple(members(prop)))


def synthesize(prop: int, logic, ctx) -> NormalForm:
    """A formula of ``logic`` whose denotation is exactly ``prop``."""
    logic = Logic(logic)
    ctx = PropContext.of(ctx)
    if prop == 0:
        raise ValueError("team property must be nonempty")
    kind = KIND_OF_LOGIC[logic]
    if not check_closure(prop, kind, ctx):
        raise NotClosed(f"team property is not {kind.name.lower().replace('_', '-')} closed")
    return _from_index(logic, ctx, prop)


def synthesize_closure(prop: int, logic, ctx) -> NormalForm:
    """The normal form built from ``prop`` as is; it denotes the closure of ``prop``."""
    logic = Logic(logic)
    ctx = PropContext.of(ctx)
    if prop == 0:
        raise ValueError("team property must be nonempty")
    return _from_index(logic, ctx, prop)


def nf_from_teams(logic, ctx, teams) -> NormalForm:
    """A normal form over an explicit team list (no closure or special checks)."""
    return NormalForm(Logic(logic), PropContext.of(ctx), teams=tuple(sorted(set(teams))))


def normalize_semantic(f: Formula, logic, ctx, max_props: int = 3) -> NormalForm:
    logic = Logic(logic)
    ctx = PropContext.of(ctx)
    bad = membership_violation(f, logic)
    if bad:
        raise ValueError(f"formula is not in L_{logic.value}: {bad[1]}")
    return synthesize(denotation(f, ctx, max_props), logic, ctx)


def _recognize_team(f: Formula, logic: Logic, ctx: PropContext) -> Optional[int]:
    if logic in (Logic.QU, Logic.U):
        flavor = PLAIN if logic is Logic.QU else NONEMPTY
        if logic is Logic.U and isinstance(f, Top):
            return 0
        team = 0
        for a in flatten(f, And):
            if not (isinstance(a, Incl) and a.flavor == flavor and a.rhs == ctx.props):
                return None
            if not all(t in (TOP_TERM, BOT_TERM) for t in a.lhs):
                return None
            team |= 1 << valuation_of_signature(ctx, a.lhs)
        return team
    flavor = FULL if logic is Logic.QD else PLAIN
    if logic is Logic.D and isinstance(f, Bot):
        return 0
    if logic is Logic.QD and ctx.n and f == empty_team_atom(ctx):
        return 0
    team = 0
    for a in flatten(f, SplitOr):
        if not (isinstance(a, Incl) and a.flavor == flavor and a.lhs == ctx.props):
            return None
        if not all(t in (TOP_TERM, BOT_TERM) for t in a.rhs):
            return None
        team |= 1 << valuation_of_signature(ctx, a.rhs)
    return team


def is_normal_form(f: Formula, logic, ctx) -> Optional[int]:
    """The indexing team property if ``f`` has the shape of a normal form of ``logic``.

    Disjunct order and association are not required to be canonical.  The
    empty team is rejected as a disjunct of the quasi upward logic, since that
    case is covered by bot alone.
    """
    logic = Logic(logic)
    ctx = PropContext.of(ctx)
    if logic is Logic.QU and isinstance(f, Bot):
        return 1
    if logic is Logic.QD and isinstance(f, FullAtom):
        return 1 << ctx.full
    prop = 0
    for d in flatten(f, GlobalOr):
        team = _recognize_team(d, logic, ctx)
        if team is None or (logic is Logic.QU and team == 0):
            return None
        prop |= 1 << team
    return prop
