"""Brute-force reference machinery used to validate the rest of the package.

Nothing in here reuses the optimised paths of :mod:`teamlogic.semantics`:
teams are frozensets of bit tuples and split disjunction is decided by trying
every pair of subteams.
"""

from __future__ import annotations

import csv
import io
import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional, Union

from .semantics import ClosureKind, PropContext, check_closure, close, members, prop_of
from .syntax import (
    BOT, BOT_TERM, FULL, FULL_ATOM, MIGHT_KINDS, NONEMPTY, PLAIN, TOP, TOP_TERM, FLAVORS,
    And, Bot, Formula, FullAtom, GlobalOr, Incl, Logic, Might, SplitOr, StrictOr, Top,
)

MIXED = "mixed"


class BoundExceeded(ValueError):
    pass


def enumerate_teams(ctx) -> list[int]:
    ctx = PropContext.of(ctx)
    if ctx.n > 4:
        raise BoundExceeded("team enumeration is limited to |P| <= 4")
    return list(range(ctx.n_teams))


@lru_cache(maxsize=None)
def _closed(props: tuple, kind: ClosureKind) -> tuple[int, ...]:
    ctx = PropContext(props)
    return tuple(c for c in range(1, 1 << ctx.n_teams) if check_closure(c, kind, ctx))


def enumerate_closed_properties(ctx, kind) -> Iterator[int]:
    """Every nonempty team property over ``ctx`` with the given closure property."""
    ctx = PropContext.of(ctx)
    if ctx.n > 2:
        raise BoundExceeded("closed-property enumeration is limited to |P| <= 2")
    return iter(_closed(ctx.props, ClosureKind(kind)))


def closed_property_counts(max_n: int = 2) -> list[dict]:
    rows = []
    for n in range(max_n + 1):
        ctx = PropContext(tuple(f"p{i + 1}" for i in range(n)))
        for kind in ("d", "qd", "u", "qu"):
            rows.append({"n": n, "kind": kind,
                         "count": sum(1 for _ in enumerate_closed_properties(ctx, kind))})
    return rows


# ---------------------------------------------------------------------------
# Generators


DEFAULT_WEIGHTS = {
    "and": 1.0, "split_or": 1.0, "global_or": 1.0, "strict_or": 0.5, "might": 0.5,
}

CONNECTIVES = {
    Logic.QU: ("and", "global_or"),
    Logic.U: ("and", "global_or"),
    Logic.QD: ("and", "split_or", "global_or"),
    Logic.D: ("and", "split_or", "global_or"),
    MIXED: ("and", "split_or", "global_or", "strict_or", "might"),
}


@dataclass
class GenConfig:
    seed: int = 0
    max_depth: int = 3
    ctx: PropContext = field(default_factory=lambda: PropContext(("p", "q")))
    weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    leaf_prob: float = 0.3

    def rng(self) -> random.Random:
        return random.Random(self.seed)


def _constants(rng: random.Random, k: int) -> tuple[str, ...]:
    return tuple(rng.choice((TOP_TERM, BOT_TERM)) for _ in range(k))


def random_atom(rng: random.Random, ctx: PropContext, logic) -> Formula:
    props = ctx.props
    n = len(props)
    if logic == MIXED:
        r = rng.random()
        if r < 0.1:
            return rng.choice((BOT, TOP, FULL_ATOM))
        k = rng.randint(0, min(3, n + 1)) if n else 0
        terms = props + (TOP_TERM, BOT_TERM) if n else (TOP_TERM, BOT_TERM)
        lhs = tuple(rng.choice(terms) for _ in range(k))
        rhs = tuple(rng.choice(terms) for _ in range(k))
        return Incl(lhs, rhs, rng.choice(FLAVORS))
    logic = Logic(logic)
    if logic in (Logic.QU, Logic.U):
        if rng.random() < 0.15:
            return BOT if logic is Logic.QU else TOP
        k = rng.randint(0, n)
        flavor = PLAIN if logic is Logic.QU else NONEMPTY
        return Incl(_constants(rng, k), tuple(rng.sample(props, k)), flavor)
    if rng.random() < 0.12:
        return FULL_ATOM if logic is Logic.QD else BOT
    k = rng.choice((0, 1, 1, 2, 2, 2, 3)) if n else 0
    flavor = FULL if logic is Logic.QD else PLAIN
    return Incl(tuple(rng.choice(props) for _ in range(k)), _constants(rng, k), flavor)


def random_formula(cfg: GenConfig, logic, rng: Optional[random.Random] = None,
                   depth: Optional[int] = None) -> Formula:
    """A random formula of ``logic`` (or of the mixed language) of depth <= max_depth."""
    rng = rng or cfg.rng()
    depth = cfg.max_depth if depth is None else depth
    key = logic if logic == MIXED else Logic(logic)
    if depth <= 0 or rng.random() < cfg.leaf_prob:
        return random_atom(rng, cfg.ctx, key)
    ops = CONNECTIVES[key]
    op = rng.choices(ops, [cfg.weights.get(o, 1.0) for o in ops])[0]
    if op == "might":
        return Might(rng.choice(MIGHT_KINDS), random_formula(cfg, logic, rng, depth - 1))
    left = random_formula(cfg, logic, rng, depth - 1)
    right = random_formula(cfg, logic, rng, depth - 1)
    cls = {"and": And, "split_or": SplitOr, "global_or": GlobalOr, "strict_or": StrictOr}[op]
    return cls(left, right)


def random_closed_property(cfg: GenConfig, kind, rng: Optional[random.Random] = None) -> int:
    """The closure of a few random teams."""
    rng = rng or cfg.rng()
    seeds = [rng.randrange(cfg.ctx.n_teams) for _ in range(rng.randint(1, 3))]
    return close(prop_of(seeds), kind, cfg.ctx)


def corpus(cfg: GenConfig, logic, count: int) -> list[Formula]:
    rng = cfg.rng()
    return [random_formula(cfg, logic, rng) for _ in range(count)]


# ---------------------------------------------------------------------------
# Reference evaluator


def _powerset(items: tuple) -> list[frozenset]:
    return [frozenset(c) for r in range(len(items) + 1) for c in itertools.combinations(items, r)]


class ReferenceEvaluator:
    """Clause-by-clause evaluator over explicit sets of valuation tuples."""

    def __init__(self, ctx, max_members: int = 8):
        self.ctx = PropContext.of(ctx)
        self.max_members = max_members
        self.full = frozenset(itertools.product((0, 1), repeat=self.ctx.n))
        self.memo: dict = {}

    def team(self, mask: int) -> frozenset:
        return frozenset(self.ctx.bits(v) for v in members(mask))

    def _val(self, v: tuple, term: str) -> int:
        if term == TOP_TERM:
            return 1
        if term == BOT_TERM:
            return 0
        return v[self.ctx.props.index(term)]

    def _incl(self, team: frozenset, a: Incl) -> bool:
        ok = all(any(all(self._val(v, x) == self._val(w, y) for x, y in zip(a.lhs, a.rhs))
                     for w in team) for v in team)
        if a.flavor == NONEMPTY:
            return bool(team) and ok
        if a.flavor == FULL:
            return team == self.full or ok
        return ok

    def __call__(self, team: Union[int, frozenset], f: Formula) -> bool:
        if isinstance(team, int):
            team = self.team(team)
        if len(team) > self.max_members:
            raise BoundExceeded(f"reference evaluator handles at most {self.max_members} valuations")
        key = (f, team)
        if key not in self.memo:
            self.memo[key] = self._eval(team, f)
        return self.memo[key]

    def _eval(self, team: frozenset, f: Formula) -> bool:
        if isinstance(f, Bot):
            return not team
        if isinstance(f, Top):
            return True
        if isinstance(f, FullAtom):
            return team == self.full
        if isinstance(f, Incl):
            return self._incl(team, f)
        if isinstance(f, And):
            return self(team, f.left) and self(team, f.right)
        if isinstance(f, GlobalOr):
            return self(team, f.left) or self(team, f.right)
        if isinstance(f, (SplitOr, StrictOr)):
            subs = _powerset(tuple(sorted(team)))
            strict = isinstance(f, StrictOr)
            for a in subs:
                for b in subs:
                    if a | b != team or (strict and a & b):
                        continue
                    if self(a, f.left) and self(b, f.right):
                        return True
            return False
        if isinstance(f, Might):
            if f.kind == "single":
                return not team or any(self(frozenset([v]), f.body) for v in team)
            found = any(self(s, f.body) for s in _powerset(tuple(sorted(team))) if s)
            return found or (f.kind == "subteam" and not team)
        raise TypeError(f"not a formula: {f!r}")


def reference_eval(team, f: Formula, ctx, evaluator: Optional[ReferenceEvaluator] = None) -> bool:
    ev = evaluator or ReferenceEvaluator(ctx)
    return ev(team, f)


def reference_denotation(f: Formula, ctx) -> int:
    ev = ReferenceEvaluator(ctx)
    return prop_of(t for t in range(ev.ctx.n_teams) if ev(t, f))


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
