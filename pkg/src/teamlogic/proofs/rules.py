"""The four rule systems and the single-step rule checker.

Rule ids are ASCII: ``botE topI andI andEl andEr gorIl gorIr gorE proj perm
ext bulletI bulletE botOrE orIl orIr orE orCom orMon orGorDistr``.  ``orIl``
keeps the premise on the left (``phi / phi | psi``), ``orIr`` on the right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from ..syntax import (
    BOT, BOT_TERM, EMPTY_INCL, FULL, FULL_ATOM, NONEMPTY, PLAIN, TOP, TOP_TERM,
    And, Formula, FullAtom, GlobalOr, Incl, Logic, SplitOr, contains, is_symbol,
)

# Side-condition ids; the audit can switch them off one by one.
EXT_FRESH = "ext-fresh"
BOT_E_BULLET_FREE = "botE-bullet-free"
OR_I_BULLET_FREE = "orI-bullet-free"
OR_E_GOR_FREE = "orE-gor-free"
SIDE_CONDITIONS = (EXT_FRESH, BOT_E_BULLET_FREE, OR_I_BULLET_FREE, OR_E_GOR_FREE)

_COMMON = ("andI", "andEl", "andEr", "gorIl", "gorIr", "gorE", "proj", "perm", "ext", "topI")
_SPLIT = ("botE", "botOrE", "orIl", "orIr", "orE", "orCom", "orMon", "orGorDistr")

SYSTEMS: dict[Logic, frozenset] = {
    Logic.QU: frozenset(_COMMON + ("botE",)),
    Logic.U: frozenset(_COMMON),
    Logic.QD: frozenset(_COMMON + _SPLIT + ("bulletI", "bulletE")),
    Logic.D: frozenset(_COMMON + _SPLIT),
}

ATOM_FLAVOR = {Logic.QU: PLAIN, Logic.U: NONEMPTY, Logic.QD: FULL, Logic.D: PLAIN}

TOP_OF = {
    Logic.QU: EMPTY_INCL,
    Logic.U: TOP,
    Logic.QD: Incl((), (), FULL),
    Logic.D: EMPTY_INCL,
}


def upward(logic: Logic) -> bool:
    return logic in (Logic.QU, Logic.U)


def arity(rule: str, logic: Logic) -> int:
    if rule == "botE":
        return 1 if logic is Logic.QU else 2
    if rule == "ext":
        return 3 if upward(logic) else 1
    return _ARITY[rule]


def discharge_slots(rule: str, logic: Logic) -> tuple[int, ...]:
    """Premise index of each discharge entry of ``rule``."""
    if rule in ("gorE", "orE"):
        return (1, 2)
    if rule == "ext" and upward(logic):
        return (1, 2)
    if rule == "orMon":
        return (1,)
    return ()


_ARITY = {
    "topI": 0, "andI": 2, "andEl": 1, "andEr": 1, "gorIl": 1, "gorIr": 1, "gorE": 3,
    "proj": 1, "perm": 1, "bulletI": 1, "bulletE": 1, "botOrE": 1, "orIl": 1, "orIr": 1,
    "orE": 3, "orCom": 1, "orMon": 2, "orGorDistr": 1,
}

@dataclass(frozen=True)
class StepContext:
    logic: Logic
    disabled: frozenset = frozenset()

    def on(self, cond: str) -> bool:
        return cond not in self.disabled


def _bullet_free(f: Formula) -> bool:
    return not contains(f, FullAtom)


def _gor_free(f: Formula) -> bool:
    return not contains(f, GlobalOr)


def perm_split(src: Incl, dst: Incl) -> Optional[tuple[int, int]]:
    """Block bounds (i, j) with dst = src[:i] + src[j:] + src[i:j] on both sides."""
    n = len(src.lhs)
    if len(dst.lhs) != n:
        return None
    for i in range(n + 1):
        for j in range(i, n + 1):
            if (dst.lhs == src.lhs[:i] + src.lhs[j:] + src.lhs[i:j]
                    and dst.rhs == src.rhs[:i] + src.rhs[j:] + src.rhs[i:j]):
                return i, j
    return None


def check_step(rule: str, concl: Formula, prem: Sequence[Formula],
               disch: Sequence[Formula], sc: StepContext) -> Optional[str]:
    """Why the step is not an instance of ``rule`` (None if it is).

    ``prem`` are the premise conclusions and ``disch`` the formulas named by
    the discharge entries.  Arity and slot counts are checked by the caller.
    """
    logic = sc.logic
    flavor = ATOM_FLAVOR[logic]
    c = concl

    if rule == "topI":
        return None if c == TOP_OF[logic] else f"topI concludes {TOP_OF[logic]}"

    if rule == "botE":
        if logic is Logic.QU:
            return None if prem[0] == BOT else "botE needs bot as premise"
        a, b = prem
        if not (isinstance(a, Incl) and isinstance(b, Incl) and a.flavor == flavor == b.flavor):
            return "botE needs two single-column atoms"
        if not (len(a.lhs) == 1 and a.lhs == b.lhs and is_symbol(a.lhs[0])
                and a.rhs == (TOP_TERM,) and b.rhs == (BOT_TERM,)):
            return "botE premises must be q <= 1 and q <= 0 for one symbol q"
        if logic is Logic.QD and sc.on(BOT_E_BULLET_FREE) and not _bullet_free(c):
            return "botE conclusion must be free of the full atom"
        return None

    if rule == "andI":
        return None if c == And(prem[0], prem[1]) else "andI concludes the conjunction of its premises"
    if rule in ("andEl", "andEr"):
        p = prem[0]
        if not isinstance(p, And):
            return f"{rule} needs a conjunction"
        want = p.left if rule == "andEl" else p.right
        return None if c == want else f"{rule} concludes the {'left' if rule == 'andEl' else 'right'} conjunct"
    if rule in ("gorIl", "gorIr"):
        if not isinstance(c, GlobalOr):
            return f"{rule} concludes a global disjunction"
        part = c.left if rule == "gorIl" else c.right
        return None if part == prem[0] else f"{rule} premise must be the {'left' if rule == 'gorIl' else 'right'} disjunct"
    if rule in ("gorE", "orE"):
        major = prem[0]
        kind = GlobalOr if rule == "gorE" else SplitOr
        if type(major) is not kind:
            return f"{rule} major premise must be a {'global' if rule == 'gorE' else 'split'} disjunction"
        if tuple(disch) != (major.left, major.right):
            return f"{rule} discharges the two disjuncts"
        if not (prem[1] == c and prem[2] == c):
            return f"{rule} minor premises must both be the conclusion"
        if rule == "orE" and sc.on(OR_E_GOR_FREE) and not _gor_free(c):
            return "orE conclusion must be free of global disjunction"
        return None

    if rule == "proj":
        p = prem[0]
        if not (isinstance(p, Incl) and p.flavor == flavor and p.lhs):
            return "proj needs a nonempty inclusion atom"
        want = Incl(p.lhs[:-1], p.rhs[:-1], p.flavor)
        return None if c == want else "proj drops exactly the last column"
    if rule == "perm":
        p = prem[0]
        if not (isinstance(p, Incl) and isinstance(c, Incl) and p.flavor == c.flavor == flavor):
            return "perm relates two inclusion atoms"
        return None if perm_split(p, c) else "perm must swap two adjacent blocks ending the sequence"

    if rule == "ext":
        p = prem[0]
        if not (isinstance(p, Incl) and p.flavor == flavor):
            return "ext needs an inclusion atom"
        if upward(logic):
            h1, h2 = disch
            if not (isinstance(h1, Incl) and isinstance(h2, Incl) and len(h1.lhs) == len(p.lhs) + 1):
                return "ext discharges the two extended atoms"
            q = h1.rhs[-1]
            if not is_symbol(q):
                return "ext extends by a proposition symbol"
            if h1 != Incl(p.lhs + (TOP_TERM,), p.rhs + (q,), flavor) or \
                    h2 != Incl(p.lhs + (BOT_TERM,), p.rhs + (q,), flavor):
                return "ext discharges x1 <= p q and x0 <= p q"
            if sc.on(EXT_FRESH) and q in p.rhs:
                return f"ext variable {q} is not fresh"
            if not (prem[1] == c and prem[2] == c):
                return "ext minor premises must both be the conclusion"
            return None
        if not (isinstance(c, SplitOr) and isinstance(c.left, Incl) and c.left.lhs):
            return "ext concludes a split disjunction of extended atoms"
        q = c.left.lhs[-1]
        if not is_symbol(q):
            return "ext extends by a proposition symbol"
        want = SplitOr(Incl(p.lhs + (q,), p.rhs + (TOP_TERM,), flavor),
                       Incl(p.lhs + (q,), p.rhs + (BOT_TERM,), flavor))
        return None if c == want else "ext concludes p q <= x 1 | p q <= x 0"

    if rule == "bulletI":
        p = prem[0]
        if not (isinstance(p, SplitOr) and isinstance(p.right, FullAtom)):
            return "bulletI needs a premise of the form phi | full"
        return None if c == FULL_ATOM else "bulletI concludes full"
    if rule == "bulletE":
        return None if prem[0] == FULL_ATOM else "bulletE needs full as premise"

    if rule == "botOrE":
        p = prem[0]
        if not isinstance(p, SplitOr):
            return "botOrE needs a split disjunction"
        r = p.right
        if logic is Logic.QD:
            ok = (isinstance(r, Incl) and r.flavor == FULL and len(r.lhs) == 2
                  and r.lhs[0] == r.lhs[1] and is_symbol(r.lhs[0])
                  and r.rhs == (TOP_TERM, BOT_TERM))
            if not ok:
                return "botOrE right disjunct must be q q <=* 1 0"
        elif r != BOT:
            return "botOrE right disjunct must be bot"
        return None if c == p.left else "botOrE concludes the left disjunct"

    if rule in ("orIl", "orIr"):
        if not isinstance(c, SplitOr):
            return f"{rule} concludes a split disjunction"
        kept, new = (c.left, c.right) if rule == "orIl" else (c.right, c.left)
        if kept != prem[0]:
            return f"{rule} premise must be the {'left' if rule == 'orIl' else 'right'} disjunct"
        if logic is Logic.QD and sc.on(OR_I_BULLET_FREE) and not _bullet_free(new):
            return "introduced disjunct must be free of the full atom"
        return None
    if rule == "orCom":
        p = prem[0]
        if not isinstance(p, SplitOr):
            return "orCom needs a split disjunction"
        return None if c == SplitOr(p.right, p.left) else "orCom swaps the disjuncts"
    if rule == "orMon":
        p = prem[0]
        if not isinstance(p, SplitOr):
            return "orMon needs a split disjunction"
        if tuple(disch) != (p.right,):
            return "orMon discharges the right disjunct"
        return None if c == SplitOr(p.left, prem[1]) else "orMon concludes phi | gamma"
    if rule == "orGorDistr":
        p = prem[0]
        if not (isinstance(p, SplitOr) and isinstance(p.right, GlobalOr)):
            return "orGorDistr needs phi | (psi || theta)"
        want = GlobalOr(SplitOr(p.left, p.right.left), SplitOr(p.left, p.right.right))
        return None if c == want else "orGorDistr concludes (phi | psi) || (phi | theta)"

    return f"unknown rule {rule!r}"
