"""Proof checking against one of the four rule systems."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from ..syntax import Formula, Logic, membership_violation, to_text
from .derivation import Assume, Derivation, Infer
from .rules import SYSTEMS, StepContext, arity, check_step, discharge_slots


@dataclass
class CheckReport:
    ok: bool
    open_assumptions: Counter
    conclusion: Formula
    violations: list = field(default_factory=list)  # [(path, message)]

    def open_formulas(self) -> set:
        return set(self.open_assumptions)

    def summary(self) -> str:
        if self.ok:
            opens = ", ".join(sorted(to_text(f) for f in self.open_assumptions)) or "none"
            return f"ok: {to_text(self.conclusion)} (open assumptions: {opens})"
        return "\n".join(f"{path}: {msg}" for path, msg in self.violations)


def format_path(path: tuple) -> str:
    return "root" + "".join(f".{i}" for i in path)


@dataclass
class _Info:
    free: dict          # tag -> {formula: relative path of one leaf}
    opens: Counter
    introduced: frozenset


class _Checker:
    def __init__(self, logic: Logic, disabled: Iterable[str]):
        self.logic = logic
        self.sc = StepContext(logic, frozenset(disabled))
        self.rules = SYSTEMS[logic]
        self.memo: dict[int, _Info] = {}
        self.member_memo: dict = {}
        self.violations: list = []

    def flag(self, path: tuple, msg: str) -> None:
        self.violations.append((format_path(path), msg))

    def member(self, f: Formula, path: tuple, what: str) -> None:
        bad = self.member_memo.get(f, 0)
        if bad == 0:
            bad = self.member_memo[f] = membership_violation(f, self.logic)
        if bad:
            self.flag(path, f"{what} {to_text(f)} is not in L_{self.logic.value}: {bad[1]}")

    def visit(self, d: Derivation, path: tuple) -> _Info:
        hit = self.memo.get(id(d))
        if hit is not None:
            return hit
        info = self._visit(d, path)
        self.memo[id(d)] = info
        return info

    def _visit(self, d: Derivation, path: tuple) -> _Info:
        if isinstance(d, Assume):
            self.member(d.formula, path, "assumption")
            if d.tag is None:
                return _Info({}, Counter([d.formula]), frozenset())
            return _Info({d.tag: {d.formula: ()}}, Counter(), frozenset())
        if not isinstance(d, Infer):
            self.flag(path, f"not a derivation node: {d!r}")
            return _Info({}, Counter(), frozenset())

        kids = [self.visit(p, path + (i,)) for i, p in enumerate(d.premises)]
        self.member(d.conclusion, path, "conclusion")
        rule = d.rule
        slots = ()
        if rule not in self.rules:
            self.flag(path, f"rule {rule!r} is not in the system for L_{self.logic.value}")
        else:
            slots = discharge_slots(rule, self.logic)
            want = arity(rule, self.logic)
            if len(d.premises) != want:
                self.flag(path, f"{rule} takes {want} premises, got {len(d.premises)}")
            elif len(d.discharge) != len(slots):
                self.flag(path, f"{rule} has {len(slots)} discharge entries, got {len(d.discharge)}")
            else:
                for _, f in d.discharge:
                    self.member(f, path, "discharged formula")
                why = check_step(rule, d.conclusion, [p.conclusion for p in d.premises],
                                 [f for _, f in d.discharge], self.sc)
                if why:
                    self.flag(path, why)

        free: dict = {}
        opens: Counter = Counter()
        introduced = set()
        by_premise: dict[int, list] = {}
        if len(d.discharge) == len(slots) and len(d.premises) == arity(rule, self.logic):
            for (tag, f), i in zip(d.discharge, slots):
                by_premise.setdefault(i, []).append((tag, f))
        for i, k in enumerate(kids):
            opens.update(k.opens)
            introduced |= k.introduced
            closing = dict(by_premise.get(i, []))
            for tag, f in closing.items():
                if tag is None:
                    continue
                if tag in k.introduced:
                    self.flag(path, f"tag {tag!r} is already discharged inside premise {i}")
                leaves = k.free.get(tag, {})
                for g, rel in leaves.items():
                    if g != f:
                        self.flag(path + (i,) + rel,
                                  f"assumption tagged {tag!r} is {to_text(g)}, but the discharge is for {to_text(f)}")
            for tag, leaves in k.free.items():
                if tag in closing:
                    continue
                slot = free.setdefault(tag, {})
                for g, rel in leaves.items():
                    slot.setdefault(g, (i,) + rel)
        introduced |= {t for t, _ in d.discharge if t is not None}
        return _Info(free, opens, frozenset(introduced))


def check(d: Derivation, logic, disabled: Iterable[str] = ()) -> CheckReport:
    """Check ``d`` against the rule system of ``logic``.

    ``disabled`` names side conditions to ignore (used by the soundness audit's
    mutation run).  Leaves whose tag is never discharged are reported as
    violations and also listed among the open assumptions.
    """
    logic = Logic(logic)
    ck = _Checker(logic, disabled)
    info = ck.visit(d, ())
    opens = Counter(info.opens)
    for tag, leaves in info.free.items():
        for g, rel in leaves.items():
            ck.flag(rel, f"assumption tagged {tag!r} is never discharged")
            opens[g] += 1
    return CheckReport(not ck.violations, opens, d.conclusion, ck.violations)
