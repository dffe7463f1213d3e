"""Constructive derivations: normal forms and completeness.

Builders pass derivations around rather than formulas: ``to_nf(f, d)`` turns a
derivation ``d`` of ``f`` into a derivation of f's normal form, and
``from_nf(f, d)`` turns a derivation of the normal form into one of ``f``.
Each subformula is handled once, with hypotheses standing in for the input,
so derivation size stays polynomial in the size of the normal forms.

The quasi downward system cannot see the full team: every rule stays sound
when full atoms are read as plain atoms and the full atom as unsatisfiable.
Normal forms for that logic are therefore indexed by that blind denotation,
which may contain F, and entailments that only hold because of F are
reported as not derivable.
"""

from __future__ import annotations

from typing import Callable, Optional

from ..normalform import NormalForm, characteristic, empty_team_atom
from ..semantics import PropContext, counterexample, denotation, members
from ..syntax import (
    BOT, BOT_TERM, FULL, FULL_ATOM, TOP_TERM, And, Bot, Formula, FullAtom, GlobalOr, Incl,
    Logic, SplitOr, Top, big_split_or, membership_violation,
)
from .derivation import Assume, Derivation, Infer
from .rules import ATOM_FLAVOR, TOP_OF, upward


class NotEntailed(ValueError):
    def __init__(self, message: str, team: int):
        super().__init__(message)
        self.team = team


class NotDerivable(ValueError):
    """Semantically valid, but outside what the rule system can derive."""


Cont = Callable[[Derivation], Derivation]


class _NF:
    """A normal form with its disjuncts and left-fold prefixes precomputed."""

    def __init__(self, logic: Logic, ctx: PropContext, teams: tuple, special: Optional[str]):
        self.logic = logic
        self.ctx = ctx
        self.teams = teams
        self.special = special
        self.index = {t: i for i, t in enumerate(teams)}
        self.disjuncts = [characteristic(logic, ctx, t) for t in teams]
        self.prefix = [None]
        acc = None
        for d in self.disjuncts:
            acc = d if acc is None else GlobalOr(acc, d)
            self.prefix.append(acc)
        if special == "bot":
            self.formula = BOT
        elif special == "full":
            self.formula = FULL_ATOM
        else:
            self.formula = self.prefix[-1]

    def public(self) -> NormalForm:
        return NormalForm(self.logic, self.ctx, teams=self.teams, special=self.special)

    def same(self, other: "_NF") -> bool:
        return self.teams == other.teams and self.special == other.special


class Builder:
    def __init__(self, logic, ctx):
        self.logic = Logic(logic)
        self.ctx = PropContext.of(ctx)
        if self.logic is Logic.QD and self.ctx.n == 0:
            raise ValueError("the quasi downward normal form needs at least one proposition")
        self.flavor = ATOM_FLAVOR[self.logic]
        self.up = upward(self.logic)
        self._tags = 0
        self._nf: dict = {}
        self._memo: dict = {}

    # -- plumbing ---------------------------------------------------------

    def tag(self) -> str:
        self._tags += 1
        return f"h{self._tags}"

    def hyp(self, f: Formula) -> tuple[str, Assume]:
        t = self.tag()
        return t, Assume(f, t)

    def index_of(self, f: Formula) -> int:
        """The team property a formula's normal form is indexed by."""
        blind = self.logic is Logic.QD
        return denotation(f, self.ctx, max_props=4, full_blind=blind)

    def nf(self, f: Formula) -> _NF:
        hit = self._nf.get(f)
        if hit is None:
            hit = self._nf[f] = self.nf_of_index(self.index_of(f))
        return hit

    def nf_of_index(self, prop: int) -> _NF:
        key = ("index", prop)
        hit = self._nf.get(key)
        if hit is not None:
            return hit
        logic = self.logic
        if logic is Logic.QU:
            prop &= ~1
            out = _NF(logic, self.ctx, (), "bot") if prop == 0 else _NF(logic, self.ctx, tuple(members(prop)), None)
        elif logic is Logic.QD and prop == 0:
            out = _NF(logic, self.ctx, (), "full")
        else:
            out = _NF(logic, self.ctx, tuple(members(prop)), None)
        self._nf[key] = out
        return out

    def char(self, team: int) -> Formula:
        return characteristic(self.logic, self.ctx, team)

    def marker(self) -> Formula:
        """Characteristic formula of the empty team in the downward logics."""
        return BOT if self.logic is Logic.D else empty_team_atom(self.ctx)

    # -- primitive steps --------------------------------------------------

    def top_i(self) -> Derivation:
        return Infer("topI", TOP_OF[self.logic])

    def and_i(self, a: Derivation, b: Derivation) -> Derivation:
        return Infer("andI", And(a.conclusion, b.conclusion), (a, b))

    def and_e(self, d: Derivation, left: bool) -> Derivation:
        key = ("andE", id(d), left)
        hit = self._memo.get(key)
        if hit is None:
            c = d.conclusion
            hit = Infer("andEl" if left else "andEr", c.left if left else c.right, (d,))
            self._memo[key] = hit
        return hit

    def gor_il(self, d: Derivation, right: Formula) -> Derivation:
        return Infer("gorIl", GlobalOr(d.conclusion, right), (d,))

    def gor_ir(self, d: Derivation, left: Formula) -> Derivation:
        return Infer("gorIr", GlobalOr(left, d.conclusion), (d,))

    def _elim(self, rule: str, d: Derivation, on_left: Cont, on_right: Cont, concl: Formula) -> Derivation:
        major = d.conclusion
        t1, h1 = self.hyp(major.left)
        t2, h2 = self.hyp(major.right)
        return Infer(rule, concl, (d, on_left(h1), on_right(h2)),
                     ((t1, major.left), (t2, major.right)))

    def gor_e(self, d, on_left: Cont, on_right: Cont, concl: Formula) -> Derivation:
        return self._elim("gorE", d, on_left, on_right, concl)

    def or_e(self, d, on_left: Cont, on_right: Cont, concl: Formula) -> Derivation:
        return self._elim("orE", d, on_left, on_right, concl)

    def or_il(self, d: Derivation, right: Formula) -> Derivation:
        return Infer("orIl", SplitOr(d.conclusion, right), (d,))

    def or_ir(self, d: Derivation, left: Formula) -> Derivation:
        return Infer("orIr", SplitOr(left, d.conclusion), (d,))

    def or_com(self, d: Derivation) -> Derivation:
        c = d.conclusion
        return Infer("orCom", SplitOr(c.right, c.left), (d,))

    def or_mon(self, d: Derivation, on_right: Cont) -> Derivation:
        c = d.conclusion
        t, h = self.hyp(c.right)
        sub = on_right(h)
        if sub is h:
            return d
        return Infer("orMon", SplitOr(c.left, sub.conclusion), (d, sub), ((t, c.right),))

    def or_gor_distr(self, d: Derivation) -> Derivation:
        c = d.conclusion
        return Infer("orGorDistr", GlobalOr(SplitOr(c.left, c.right.left), SplitOr(c.left, c.right.right)), (d,))

    def mon_both(self, d: Derivation, on_left: Cont, on_right: Cont) -> Derivation:
        """From A | B derive A' | B' given A |- A' and B |- B'."""
        d1 = self.or_mon(d, on_right)
        t, h = self.hyp(d1.conclusion.left)
        probe = on_left(h)
        if probe is h:
            return d1
        d2 = self.or_com(d1)
        d3 = Infer("orMon", SplitOr(d2.conclusion.left, probe.conclusion), (d2, probe),
                   ((t, d2.conclusion.right),))
        return self.or_com(d3)

    def bot_e(self, d: Derivation, concl: Formula) -> Derivation:
        return Infer("botE", concl, (d,))

    def bot_e2(self, top_lit: Derivation, bot_lit: Derivation, concl: Formula) -> Derivation:
        return Infer("botE", concl, (top_lit, bot_lit))

    def bullet_e(self, d: Derivation, concl: Formula) -> Derivation:
        if d.conclusion == concl:
            return d
        return Infer("bulletE", concl, (d,))

    def bullet_i(self, d: Derivation) -> Derivation:
        return Infer("bulletI", FULL_ATOM, (d,))

    def bot_or_e(self, d: Derivation) -> Derivation:
        return Infer("botOrE", d.conclusion.left, (d,))

    # -- atom surgery -----------------------------------------------------

    @staticmethod
    def cols(a: Incl) -> list[tuple[str, str]]:
        return list(zip(a.lhs, a.rhs))

    def _atom(self, cols, flavor) -> Incl:
        return Incl(tuple(c[0] for c in cols), tuple(c[1] for c in cols), flavor)

    def move_to_end(self, d: Derivation, i: int) -> Derivation:
        a = d.conclusion
        cols = self.cols(a)
        if i == len(cols) - 1:
            return d
        new = cols[:i] + cols[i + 1:] + [cols[i]]
        return Infer("perm", self._atom(new, a.flavor), (d,))

    def proj(self, d: Derivation) -> Derivation:
        a = d.conclusion
        return Infer("proj", Incl(a.lhs[:-1], a.rhs[:-1], a.flavor), (d,))

    def project_to(self, d: Derivation, target: list) -> Derivation:
        """Rearrange and project an atom down to exactly the columns ``target``.

        Every target column must occur in the atom at least as often as it
        occurs in ``target``.
        """
        a = d.conclusion
        cur = self.cols(a)
        pool = list(cur)
        for col in target:
            pool.remove(col)
        desired = list(target) + pool
        k = 0
        while k < len(cur) and cur[k] == desired[k]:
            k += 1
        moved = 0
        for idx in range(k, len(desired)):
            col = desired[idx]
            hi = len(cur) - moved
            pos = cur.index(col, k, hi)
            d = self.move_to_end(d, pos)
            cur = cur[:pos] + cur[pos + 1:] + [cur[pos]]
            moved += 1
        for _ in range(len(pool)):
            d = self.proj(d)
        return d

    def inconsistent_symbol(self, a: Incl) -> Optional[str]:
        """A symbol the atom forces both true and false (downward shapes)."""
        seen: dict = {}
        for s, c in zip(a.lhs, a.rhs):
            if seen.setdefault(s, c) != c:
                return s
        return None

    def contradiction(self, d: Derivation, concl: Formula) -> Derivation:
        """bot-elimination from an atom that forces some symbol both ways."""
        s = self.inconsistent_symbol(d.conclusion)
        return self.bot_e2(self.project_to(d, [(s, TOP_TERM)]), self.project_to(d, [(s, BOT_TERM)]), concl)

    def clash(self, d1: Derivation, d2: Derivation, concl: Formula) -> Derivation:
        """bot-elimination from two consistent atoms that disagree on a symbol."""
        v1 = dict(self.cols(d1.conclusion))
        v2 = dict(self.cols(d2.conclusion))
        for s in self.ctx.props:
            if s in v1 and s in v2 and v1[s] != v2[s]:
                top, bot = (d1, d2) if v1[s] == TOP_TERM else (d2, d1)
                return self.bot_e2(self.project_to(top, [(s, TOP_TERM)]),
                                   self.project_to(bot, [(s, BOT_TERM)]), concl)
        raise AssertionError("atoms do not clash")

    def from_empty(self, d: Derivation, concl: Formula) -> Derivation:
        """From a leaf denoting only the empty team (bot or an inconsistent atom)."""
        f = d.conclusion
        if f == concl:
            return d
        if isinstance(f, Bot):
            return self.bot_or_e(self.or_ir(d, concl))
        return self.contradiction(d, concl)

    def ext_down(self, d: Derivation, q: str) -> Derivation:
        a = d.conclusion
        concl = SplitOr(Incl(a.lhs + (q,), a.rhs + (TOP_TERM,), a.flavor),
                        Incl(a.lhs + (q,), a.rhs + (BOT_TERM,), a.flavor))
        return Infer("ext", concl, (d,))

    def ext_up(self, d: Derivation, q: str, on_top: Cont, on_bot: Cont, concl: Formula) -> Derivation:
        a = d.conclusion
        h1f = Incl(a.lhs + (TOP_TERM,), a.rhs + (q,), a.flavor)
        h0f = Incl(a.lhs + (BOT_TERM,), a.rhs + (q,), a.flavor)
        t1 = self.tag()
        t0 = self.tag()
        return Infer("ext", concl, (d, on_top(Assume(h1f, t1)), on_bot(Assume(h0f, t0))),
                     ((t1, h1f), (t0, h0f)))

    def add_column(self, d: Derivation, sym: str, const: str, source: Optional[Derivation] = None) -> Derivation:
        """Append the column (sym, const) to a downward atom.

        ``source`` proves ``sym <= const`` when the atom itself does not
        already fix sym; the other branch of the extension clashes with it.
        """
        a = d.conclusion
        good = Incl(a.lhs + (sym,), a.rhs + (const,), a.flavor)
        lit = source if source is not None else self.project_to(d, [(sym, const)])

        def branch(h):
            if h.conclusion == good:
                return h
            return self.bot_e2(*self._order_lits(lit, self.project_to(h, [(sym, _flip(const))])), good)

        return self.or_e(self.ext_down(d, sym), branch, branch, good)

    @staticmethod
    def _order_lits(a: Derivation, b: Derivation):
        return (a, b) if a.conclusion.rhs == (TOP_TERM,) else (b, a)

    def weaken_atom(self, d: Derivation, target: Incl) -> Derivation:
        """From a consistent downward atom derive any atom it implies column-wise."""
        need = self.cols(target)
        have = self.cols(d.conclusion)
        for col in set(need):
            extra = need.count(col) - have.count(col)
            for _ in range(extra):
                d = self.add_column(d, col[0], col[1])
                have.append(col)
        return self.project_to(d, need)

    # -- normal-form navigation --------------------------------------------

    def inject(self, d: Derivation, nf: _NF, team: int) -> Derivation:
        """From the disjunct for ``team`` derive the whole normal form."""
        i = nf.index[team]

        def rec(k: int) -> Derivation:
            if k == 1:
                return d
            if i == k - 1:
                return self.gor_ir(d, nf.prefix[k - 1])
            return self.gor_il(rec(k - 1), nf.disjuncts[k - 1])

        return rec(len(nf.teams))

    def gor_cases(self, d: Derivation, nf: _NF, fn: Callable[[int, Derivation], Derivation],
                  concl: Formula) -> Derivation:
        """Global-disjunction elimination over every disjunct of a normal form."""

        def rec(k: int, dk: Derivation) -> Derivation:
            if k == 1:
                return fn(nf.teams[0], dk)
            return self.gor_e(dk, lambda h: rec(k - 1, h), lambda h: fn(nf.teams[k - 1], h), concl)

        return rec(len(nf.teams), d)

    def weaken(self, d: Derivation, src: _NF, dst: _NF) -> Derivation:
        """From src's normal form derive dst's, given src's index is dominated by dst's."""
        if src.same(dst):
            return d
        if src.special == "bot":
            return self.bot_e(d, dst.formula)
        if src.special == "full":
            return self.bullet_e(d, dst.formula)
        return self.gor_cases(d, src, lambda t, h: self.dominate(h, t, dst), dst.formula)

    def dominate(self, d: Derivation, team: int, dst: _NF) -> Derivation:
        if team in dst.index:
            return self.inject(d, dst, team)
        if self.up:
            cands = [s for s in dst.teams if s & ~team == 0]
            s = max(cands, key=lambda x: (x.bit_count(), x))
            return self.inject(self.conj_from(s, [(d, team)]), dst, s)
        cands = [s for s in dst.teams if team & ~s == 0]
        s = min(cands, key=lambda x: (x.bit_count(), x))
        return self.inject(self.split_into(d, s), dst, s)

    # -- characteristic formulas, upward --------------------------------------

    def conj_extract(self, d: Derivation, team: int, v: int) -> Derivation:
        ms = list(members(team))
        i = ms.index(v)
        k = len(ms)
        while k > 1:
            if i == k - 1:
                return self.and_e(d, left=False)
            d = self.and_e(d, left=True)
            k -= 1
        return d

    def conj_from(self, team: int, sources: list) -> Derivation:
        """Build the characteristic conjunction of ``team`` from conjunctions of covering teams."""
        atoms = []
        for v in members(team):
            src, src_team = next((s, t) for s, t in sources if (t >> v) & 1)
            atoms.append(self.conj_extract(src, src_team, v))
        if not atoms:
            return self.top_i()
        acc = atoms[0]
        for a in atoms[1:]:
            acc = self.and_i(acc, a)
        return acc

    def canonical_leaf(self, d: Derivation) -> tuple[int, Derivation]:
        """Put an atom mentioning every symbol into canonical column order.

        Returns the valuation it pins down and the rearranged derivation.
        """
        a = d.conclusion
        if self.up:
            const_of = {s: c for c, s in self.cols(a)}
            target = [(const_of[p], p) for p in self.ctx.props]
        else:
            const_of = {}
            for s, c in self.cols(a):
                const_of.setdefault(s, c)
            target = [(p, const_of[p]) for p in self.ctx.props]
        bits = [const_of[p] == TOP_TERM for p in self.ctx.props]
        return self.ctx.valuation_of_bits(bits), self.project_to(d, target)

    def ext_all(self, d: Derivation, leaf: Cont, concl: Formula) -> Derivation:
        """Extend an atom by every missing symbol, then finish each case with ``leaf``."""
        a = d.conclusion
        present = set(a.rhs if self.up else a.lhs)
        missing = [p for p in self.ctx.props if p not in present]
        if not missing:
            return leaf(d)
        q = missing[0]
        if self.up:
            return self.ext_up(d, q, lambda h: self.ext_all(h, leaf, concl),
                               lambda h: self.ext_all(h, leaf, concl), concl)
        return self.or_e(self.ext_down(d, q), lambda h: self.ext_all(h, leaf, concl),
                         lambda h: self.ext_all(h, leaf, concl), concl)

    # -- characteristic formulas, downward ------------------------------------

    def or_cases(self, d: Derivation, concl: Formula, leaf: Callable[[int, Derivation], Derivation]) -> Derivation:
        """Split-disjunction elimination down to the leaves of a characteristic tree.

        ``leaf`` receives the valuation of each consistent full-context leaf;
        leaves denoting only the empty team are discharged directly.
        """
        f = d.conclusion
        if isinstance(f, SplitOr):
            return self.or_e(d, lambda h: self.or_cases(h, concl, leaf),
                             lambda h: self.or_cases(h, concl, leaf), concl)
        if isinstance(f, Bot) or self.inconsistent_symbol(f) is not None:
            return self.from_empty(d, concl)
        v, _ = self._leaf_valuation(f)
        return leaf(v, d)

    def _leaf_valuation(self, a: Incl) -> tuple[int, dict]:
        vals = dict(zip(a.lhs, a.rhs))
        return self.ctx.valuation_of_bits([vals[p] == TOP_TERM for p in self.ctx.props]), vals

    def embed(self, d: Derivation, v: int, team: int) -> Derivation:
        """From the leaf atom for v derive the characteristic split disjunction of ``team``."""
        ms = list(members(team))
        i = ms.index(v)
        leaves = [Incl(self.ctx.props, _sig(self.ctx, w), self.flavor) for w in ms]

        def rec(k: int) -> Derivation:
            if k == 1:
                return d
            if i == k - 1:
                return self.or_ir(d, big_split_or(leaves[:k - 1]))
            return self.or_il(rec(k - 1), leaves[k - 1])

        return rec(len(ms))

    def split_into(self, d: Derivation, team: int) -> Derivation:
        """From any characteristic split tree whose leaves lie in ``team`` derive theta(team)."""
        target = self.char(team)
        if d.conclusion == target:
            return d
        return self.or_cases(d, target, lambda v, h: self.embed(h, v, team))

    def meet(self, d1: Derivation, t1: int, d2: Derivation, t2: int) -> Derivation:
        target = self.char(t1 & t2)

        def outer(v, h1):
            def inner(w, h2):
                if v == w:
                    return self.embed(h1, v, t1 & t2)
                return self.clash(h1, h2, target)
            return self.or_cases(d2, target, inner)

        return self.or_cases(d1, target, outer)

    def dist_right(self, d: Derivation, nf: _NF, fn: Callable[[int, Derivation], Derivation],
                   concl: Formula) -> Derivation:
        """From A | NF derive ``concl`` by cases over A | disjunct."""

        def rec(k: int, dk: Derivation) -> Derivation:
            if k == 1:
                return fn(nf.teams[0], dk)
            return self.gor_e(self.or_gor_distr(dk), lambda h: rec(k - 1, h),
                              lambda h: fn(nf.teams[k - 1], h), concl)

        return rec(len(nf.teams), d)

    # -- the normal-form lemma -------------------------------------------------

    def to_nf(self, f: Formula, d: Derivation) -> Derivation:
        nf = self.nf(f)
        if isinstance(f, (Bot, FullAtom)):
            return d
        if isinstance(f, Top):
            return self.inject(d, nf, 0)
        if isinstance(f, Incl):
            return self._atom_to_nf(f, d, nf)
        if isinstance(f, And):
            return self._and_to_nf(f, d, nf)
        if isinstance(f, GlobalOr):
            n1, n2 = self.nf(f.left), self.nf(f.right)
            return self.gor_e(d, lambda h: self.weaken(self.to_nf(f.left, h), n1, nf),
                              lambda h: self.weaken(self.to_nf(f.right, h), n2, nf), nf.formula)
        if isinstance(f, SplitOr):
            return self._or_to_nf(f, d, nf)
        raise TypeError(f"unexpected formula {f!r}")

    def _atom_to_nf(self, f: Incl, d: Derivation, nf: _NF) -> Derivation:
        if self.up:
            def leaf(h):
                v, h2 = self.canonical_leaf(h)
                return self.inject(h2, nf, 1 << v)
            return self.ext_all(d, leaf, nf.formula)
        if self.inconsistent_symbol(f) is not None:
            return self.contradiction(d, nf.formula)
        team = nf.teams[-1]  # the largest team of a principal downset
        target = self.char(team)

        def leaf(h):
            v, h2 = self.canonical_leaf(h)
            return self.embed(h2, v, team)

        return self.inject(self.ext_all(d, leaf, target), nf, team)

    def _and_to_nf(self, f: And, d: Derivation, nf: _NF) -> Derivation:
        n1, n2 = self.nf(f.left), self.nf(f.right)
        d1 = self.to_nf(f.left, self.and_e(d, True))
        d2 = self.to_nf(f.right, self.and_e(d, False))
        if n1.special:
            return self.weaken(d1, n1, nf)
        if n2.special:
            return self.weaken(d2, n2, nf)
        if self.up:
            def pair(t, h1):
                return self.gor_cases(d2, n2, lambda s, h2: self.inject(
                    self.conj_from(t | s, [(h1, t), (h2, s)]), nf, t | s), nf.formula)
        else:
            def pair(t, h1):
                return self.gor_cases(d2, n2, lambda s, h2: self.inject(
                    self.meet(h1, t, h2, s), nf, t & s), nf.formula)
        return self.gor_cases(d1, n1, pair, nf.formula)

    def _or_to_nf(self, f: SplitOr, d: Derivation, nf: _NF) -> Derivation:
        n1, n2 = self.nf(f.left), self.nf(f.right)
        both = self.mon_both(d, lambda h: self.to_nf(f.left, h), lambda h: self.to_nf(f.right, h))
        if n2.special == "full":
            return self.bullet_i(both)
        if n1.special == "full":
            return self.bullet_i(self.or_com(both))

        def with_s(s, ds):
            swapped = self.or_com(ds)
            return self.dist_right(swapped, n1, lambda t, dts: self.inject(
                self.split_into(dts, t | s), nf, t | s), nf.formula)

        return self.dist_right(both, n2, with_s, nf.formula)

    def from_nf(self, f: Formula, d: Derivation) -> Derivation:
        nf = self.nf(f)
        if nf.formula == f:
            return d
        if nf.special == "bot":
            return self.bot_e(d, f)
        if nf.special == "full":
            return self.bullet_e(d, f)
        if isinstance(f, Top):
            return self.top_i()
        if isinstance(f, Incl):
            if f == TOP_OF[self.logic]:
                return self.top_i()
            return self._nf_to_atom(f, d, nf)
        if isinstance(f, And):
            n1, n2 = self.nf(f.left), self.nf(f.right)
            return self.and_i(self.from_nf(f.left, self.weaken(d, nf, n1)),
                              self.from_nf(f.right, self.weaken(d, nf, n2)))
        if isinstance(f, GlobalOr):
            n1, n2 = self.nf(f.left), self.nf(f.right)
            two = GlobalOr(n1.formula, n2.formula)

            def split(t, h):
                if t in n1.index:
                    return self.gor_il(self.inject(h, n1, t), n2.formula)
                return self.gor_ir(self.inject(h, n2, t), n1.formula)

            dd = self.gor_cases(d, nf, split, two)
            return self.gor_e(dd, lambda h: self.gor_il(self.from_nf(f.left, h), f.right),
                              lambda h: self.gor_ir(self.from_nf(f.right, h), f.left), f)
        if isinstance(f, SplitOr):
            return self._nf_to_or(f, d, nf)
        raise TypeError(f"unexpected formula {f!r}")

    def _nf_to_atom(self, f: Incl, d: Derivation, nf: _NF) -> Derivation:
        target = self.cols(f)
        if self.up:
            def case(t, h):
                v = next(w for w in members(t) if self._agrees_up(w, f))
                return self.project_to(self.conj_extract(h, t, v), target)
        else:
            def case(t, h):
                return self.or_cases(h, f, lambda v, hv: self.weaken_atom(hv, f))
        return self.gor_cases(d, nf, case, f)

    def _agrees_up(self, v: int, a: Incl) -> bool:
        return all(self.ctx.value(v, s) == (c == TOP_TERM) for c, s in zip(a.lhs, a.rhs))

    def _nf_to_or(self, f: SplitOr, d: Derivation, nf: _NF) -> Derivation:
        n1, n2 = self.nf(f.left), self.nf(f.right)
        two = SplitOr(n1.formula, n2.formula)

        def case(t, h):
            t1, t2 = next((a, b) for a in n1.teams for b in n2.teams if a | b == t)
            pair = SplitOr(self.char(t1), self.char(t2))

            def leaf(v, hv):
                if (t1 >> v) & 1:
                    return self.or_il(self.embed(hv, v, t1), pair.right)
                return self.or_ir(self.embed(hv, v, t2), pair.left)

            dp = self.or_cases(h, pair, leaf)
            return self.mon_both(dp, lambda x: self.inject(x, n1, t1), lambda x: self.inject(x, n2, t2))

        dd = self.gor_cases(d, nf, case, two)
        return self.mon_both(dd, lambda h: self.from_nf(f.left, h), lambda h: self.from_nf(f.right, h))


def _sig(ctx: PropContext, v: int) -> tuple[str, ...]:
    return tuple(TOP_TERM if b else BOT_TERM for b in ctx.bits(v))


def _flip(c: str) -> str:
    return BOT_TERM if c == TOP_TERM else TOP_TERM


def _full_atoms(*fs: Formula) -> bool:
    return all(isinstance(f, Incl) and f.flavor == FULL for f in fs)


def _require(f: Formula, logic: Logic) -> None:
    bad = membership_violation(f, logic)
    if bad:
        raise ValueError(f"formula is not in L_{logic.value}: {bad[1]}")


def derive_normal_form(f: Formula, logic, ctx):
    """Normal form of ``f`` together with derivations ``f |- NF`` and ``NF |- f``."""
    logic = Logic(logic)
    _require(f, logic)
    b = Builder(logic, ctx)
    nf = b.nf(f)
    fwd = b.to_nf(f, Assume(f))
    bwd = b.from_nf(f, Assume(nf.formula))
    return nf.public(), fwd, bwd


def derive_entailment(gamma: Formula, f: Formula, logic, ctx) -> Derivation:
    """A derivation of ``f`` from the single open assumption ``gamma``."""
    logic = Logic(logic)
    _require(gamma, logic)
    _require(f, logic)
    ctx = PropContext.of(ctx)
    team = counterexample([gamma], f, ctx, max_props=4)
    if team is not None:
        raise NotEntailed("premise does not entail conclusion", team)
    if gamma == f:
        return Assume(gamma)
    if logic is Logic.QD and isinstance(gamma, And) and _full_atoms(gamma.left, gamma.right):
        from .derived import aug
        whole = Assume(gamma)
        b0 = Builder(logic, ctx)
        d = aug(gamma.left, gamma.right, b0.and_e(whole, True), b0.and_e(whole, False))
        if d.conclusion == f:
            return d
    b = Builder(logic, ctx)
    if logic is Logic.QD:
        blind_g = b.index_of(gamma)
        blind_f = b.index_of(f)
        if blind_g & ~blind_f:
            raise NotDerivable(
                "the entailment relies on the full team in a way the quasi downward rules cannot express")
    ng, nf = b.nf(gamma), b.nf(f)
    d = b.to_nf(gamma, Assume(gamma))
    return b.from_nf(f, b.weaken(d, ng, nf))
