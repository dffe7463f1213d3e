"""Semantic soundness audit of single rule applications.

An instance is a rule step together with a random set of side assumptions
Gamma.  Its contract: every team satisfying Gamma and all premises satisfies
the conclusion.  A minor premise that discharges a hypothesis H stands for a
subderivation from Gamma plus H, so it is only sampled when Gamma, H entail it
semantically.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..oracle import GenConfig, random_atom, random_formula
from ..semantics import PropContext, denotation
from ..syntax import (
    BOT, BOT_TERM, FULL, FULL_ATOM, TOP_TERM, And, Formula, GlobalOr, Incl, Logic, SplitOr,
    membership_violation, to_text,
)
from .rules import ATOM_FLAVOR, SYSTEMS, TOP_OF, StepContext, check_step, discharge_slots, upward


@dataclass
class Instance:
    rule: str
    premises: list
    discharge: list
    conclusion: Formula
    gamma: list = field(default_factory=list)

    def describe(self) -> str:
        g = ", ".join(to_text(f) for f in self.gamma) or "-"
        ps = "; ".join(to_text(f) for f in self.premises) or "-"
        ds = "; ".join(to_text(f) for f in self.discharge)
        extra = f" [discharging {ds}]" if ds else ""
        return f"{self.rule}: gamma {g}; premises {ps}{extra} => {to_text(self.conclusion)}"


@dataclass
class RuleStats:
    valid: int = 0
    attempts: int = 0


@dataclass
class AuditReport:
    logic: Logic
    samples: int
    stats: dict = field(default_factory=dict)      # rule -> RuleStats
    failures: list = field(default_factory=list)   # [(rule, description, counterexample team)]

    @property
    def ok(self) -> bool:
        return not self.failures and all(s.valid >= self.samples for s in self.stats.values())

    def rows(self) -> list[dict]:
        fails = {}
        for rule, _, _ in self.failures:
            fails[rule] = fails.get(rule, 0) + 1
        return [{"logic": self.logic.value, "rule": r, "valid": s.valid, "attempts": s.attempts,
                 "failures": fails.get(r, 0)} for r, s in sorted(self.stats.items())]


class _Sampler:
    def __init__(self, logic: Logic, ctx: PropContext, rng: random.Random, sc: StepContext,
                 full_blind: bool = False):
        self.logic = logic
        self.full_blind = full_blind
        self.ctx = ctx
        self.rng = rng
        self.sc = sc
        self.flavor = ATOM_FLAVOR[logic]
        self.cfg = GenConfig(seed=0, max_depth=2, ctx=ctx)
        self._den: dict = {}

    def formula(self, depth: int = 2) -> Formula:
        return random_formula(self.cfg, self.logic, self.rng, depth=self.rng.randint(0, depth))

    def atom(self) -> Incl:
        while True:
            a = random_atom(self.rng, self.ctx, self.logic)
            if isinstance(a, Incl):
                return a

    def den(self, f: Formula) -> int:
        hit = self._den.get(f)
        if hit is None:
            hit = self._den[f] = denotation(f, self.ctx, full_blind=self.full_blind)
        return hit

    def chi(self, h1: Formula, h2: Formula) -> Formula:
        r = self.rng.random()
        if r < 0.35:
            return GlobalOr(h1, h2)
        if r < 0.6 and not upward(self.logic):
            return SplitOr(h1, h2)
        if r < 0.8:
            return self.rng.choice((h1, h2))
        return self.formula()

    def lit(self, q: str, c: str) -> Incl:
        if upward(self.logic):
            return Incl((c,), (q,), self.flavor)
        return Incl((q,), (c,), self.flavor)

    def instance(self, rule: str) -> Instance:
        f, rng, logic = self.formula, self.rng, self.logic
        if rule == "topI":
            return Instance(rule, [], [], TOP_OF[logic])
        if rule == "botE":
            if logic is Logic.QU:
                return Instance(rule, [BOT], [], f())
            q = rng.choice(self.ctx.props)
            return Instance(rule, [self.lit(q, TOP_TERM), self.lit(q, BOT_TERM)], [], f())
        if rule == "andI":
            a, b = f(), f()
            return Instance(rule, [a, b], [], And(a, b))
        if rule in ("andEl", "andEr"):
            a, b = f(), f()
            return Instance(rule, [And(a, b)], [], a if rule == "andEl" else b)
        if rule in ("gorIl", "gorIr"):
            a, b = f(), f()
            return Instance(rule, [a if rule == "gorIl" else b], [], GlobalOr(a, b))
        if rule in ("orIl", "orIr"):
            a, b = f(), f()
            return Instance(rule, [a if rule == "orIl" else b], [], SplitOr(a, b))
        if rule in ("gorE", "orE"):
            a, b = f(), f()
            c = self.chi(a, b)
            major = GlobalOr(a, b) if rule == "gorE" else SplitOr(a, b)
            return Instance(rule, [major, c, c], [a, b], c)
        if rule == "proj":
            a = self.atom()
            while not a.lhs:
                a = self.atom()
            return Instance(rule, [a], [], Incl(a.lhs[:-1], a.rhs[:-1], a.flavor))
        if rule == "perm":
            a = self.atom()
            n = len(a.lhs)
            i = rng.randint(0, n)
            j = rng.randint(i, n)
            dst = Incl(a.lhs[:i] + a.lhs[j:] + a.lhs[i:j], a.rhs[:i] + a.rhs[j:] + a.rhs[i:j], a.flavor)
            return Instance(rule, [a], [], dst)
        if rule == "ext":
            a = self.atom()
            if upward(logic):
                fresh = [p for p in self.ctx.props if p not in a.rhs]
                q = rng.choice(fresh or list(self.ctx.props))
                h1 = Incl(a.lhs + (TOP_TERM,), a.rhs + (q,), a.flavor)
                h0 = Incl(a.lhs + (BOT_TERM,), a.rhs + (q,), a.flavor)
                c = self.chi(h1, h0)
                return Instance(rule, [a, c, c], [h1, h0], c)
            q = rng.choice(self.ctx.props)
            c = SplitOr(Incl(a.lhs + (q,), a.rhs + (TOP_TERM,), a.flavor),
                        Incl(a.lhs + (q,), a.rhs + (BOT_TERM,), a.flavor))
            return Instance(rule, [a], [], c)
        if rule == "bulletI":
            return Instance(rule, [SplitOr(f(), FULL_ATOM)], [], FULL_ATOM)
        if rule == "bulletE":
            return Instance(rule, [FULL_ATOM], [], f())
        if rule == "botOrE":
            a = f()
            if logic is Logic.QD:
                q = rng.choice(self.ctx.props)
                marker = Incl((q, q), (TOP_TERM, BOT_TERM), FULL)
            else:
                marker = BOT
            return Instance(rule, [SplitOr(a, marker)], [], a)
        if rule == "orCom":
            a, b = f(), f()
            return Instance(rule, [SplitOr(a, b)], [], SplitOr(b, a))
        if rule == "orMon":
            a, b = f(), f()
            g = self.chi(b, f()) if rng.random() < 0.5 else b
            return Instance(rule, [SplitOr(a, b), g], [b], SplitOr(a, g))
        if rule == "orGorDistr":
            a, b, c = f(), f(), f()
            return Instance(rule, [SplitOr(a, GlobalOr(b, c))], [],
                            GlobalOr(SplitOr(a, b), SplitOr(a, c)))
        raise ValueError(f"no sampler for rule {rule!r}")

    def well_formed(self, inst: Instance) -> bool:
        for g in [*inst.premises, *inst.discharge, inst.conclusion, *inst.gamma]:
            if membership_violation(g, self.logic):
                return False
        return check_step(inst.rule, inst.conclusion, inst.premises, inst.discharge, self.sc) is None

    def verify(self, inst: Instance) -> tuple[bool, Optional[int]]:
        """(usable, counterexample team or None)."""
        full = (1 << self.ctx.n_teams) - 1
        gamma = full
        for g in inst.gamma:
            gamma &= self.den(g)
        slots = discharge_slots(inst.rule, self.logic) if inst.discharge else ()
        minor = {i: h for i, h in zip(slots, inst.discharge)}
        holds = gamma
        for i, p in enumerate(inst.premises):
            if i in minor:
                if (gamma & self.den(minor[i])) & ~self.den(p):
                    return False, None
            else:
                holds &= self.den(p)
        bad = holds & ~self.den(inst.conclusion)
        if bad:
            return True, (bad & -bad).bit_length() - 1
        return True, None


def audit_soundness(logic, ctx=("p", "q"), samples: int = 500, seed: int = 0,
                    rules: Optional[Iterable[str]] = None, disabled: Iterable[str] = (),
                    max_attempts_factor: int = 40, max_failures: int = 20,
                    full_blind: bool = False) -> AuditReport:
    """Sample rule instances until ``samples`` usable ones per rule have been checked.

    With ``full_blind`` every denotation reads full atoms as plain atoms and
    the full atom as unsatisfiable.
    """
    logic = Logic(logic)
    ctx = PropContext.of(ctx)
    rng = random.Random(seed)
    sc = StepContext(logic, frozenset(disabled))
    sampler = _Sampler(logic, ctx, rng, sc, full_blind)
    report = AuditReport(logic, samples)
    for rule in sorted(rules if rules is not None else SYSTEMS[logic]):
        st = report.stats[rule] = RuleStats()
        while st.valid < samples and st.attempts < samples * max_attempts_factor:
            st.attempts += 1
            inst = sampler.instance(rule)
            inst.gamma = [sampler.formula() for _ in range(rng.choice((0, 0, 1, 2)))]
            if not sampler.well_formed(inst):
                continue
            usable, team = sampler.verify(inst)
            if not usable:
                continue
            st.valid += 1
            if team is not None and len(report.failures) < max_failures:
                report.failures.append((rule, inst.describe(), team))
    return report
