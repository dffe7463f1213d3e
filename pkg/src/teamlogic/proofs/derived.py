"""Derived rules of the quasi downward system, built from its primitive rules.

Each function returns a derivation whose open assumptions are the stated
premises.  ``derived_rule(name, *formulas)`` dispatches by name.
"""

from __future__ import annotations

from ..semantics import PropContext
from ..syntax import (
    FULL, FULL_ATOM, And, Formula, FullAtom, GlobalOr, Incl, Logic, SplitOr, contains, parse,
)
from .builders import Builder
from .derivation import Assume, Derivation, Infer

QD = Logic.QD


class FragmentError(ValueError):
    """An instance formula is outside the fragment the rule is stated for."""


def _builder(*formulas: Formula) -> Builder:
    props = []
    for f in formulas:
        for a in _atoms(f):
            for s in a.lhs:
                if s not in props:
                    props.append(s)
    return Builder(QD, PropContext(tuple(props) or ("p",)))


def _atoms(f: Formula):
    if isinstance(f, Incl):
        yield f
    for k in getattr(f, "_names", ()):
        sub = getattr(f, k)
        if isinstance(sub, Formula):
            yield from _atoms(sub)


def _plain_fragment(*fs: Formula) -> None:
    for f in fs:
        if contains(f, FullAtom) or contains(f, GlobalOr):
            raise FragmentError("formula must be free of the full atom and of global disjunction")


def _full_atom(f: Formula) -> Incl:
    if not (isinstance(f, Incl) and f.flavor == FULL):
        raise FragmentError("expected a full inclusion atom")
    return f


def bullet_split(phi: Formula) -> Derivation:
    """phi | full |- full."""
    return Infer("bulletI", FULL_ATOM, (Assume(SplitOr(phi, FULL_ATOM)),))


def bullet_split_converse(phi: Formula) -> Derivation:
    """full |- phi | full."""
    return Infer("bulletE", SplitOr(phi, FULL_ATOM), (Assume(FULL_ATOM),))


def bullet_gor(phi: Formula) -> Derivation:
    """phi || full |- phi."""
    b = _builder(phi)
    return b.gor_e(Assume(GlobalOr(phi, FULL_ATOM)), lambda h: h, lambda h: b.bullet_e(h, phi), phi)


def bullet_gor_converse(phi: Formula) -> Derivation:
    """phi |- phi || full."""
    return Infer("gorIl", GlobalOr(phi, FULL_ATOM), (Assume(phi),))


def aug(left: Formula, right: Formula, d_left=None, d_right=None) -> Derivation:
    """p <=* x, q <=* y |- p q <=* x y, one extension per column of the right atom.

    ``d_left``/``d_right`` replace the two premise leaves when given.
    """
    a1, a2 = _full_atom(left), _full_atom(right)
    b = _builder(a1, a2)
    src = d_right or Assume(a2)
    d: Derivation = d_left or Assume(a1)
    for s, c in zip(a2.lhs, a2.rhs):
        lit = b.project_to(src, [(s, c)])
        d = b.add_column(d, s, c, source=lit)
    return d


def aug_unary_table() -> Derivation:
    """The unary case p <=* 1, q <=* 0 |- p q <=* 1 0, step for step."""
    b = Builder(QD, PropContext(("p", "q")))
    p1 = Assume(parse("p <=* 1"))
    q0 = Assume(parse("q <=* 0"))
    target = parse("p q <=* 1 0")
    left = b.ext_down(p1, "q")
    right = b.mon_both(b.ext_down(q0, "p"), lambda h: b.move_to_end(h, 0), lambda h: b.move_to_end(h, 0))

    def first(ha):
        def inner_bad(hc):
            return b.bot_e2(b.proj(ha), b.proj(hc), target)
        return b.or_e(right, lambda hb: hb, inner_bad, target)

    return b.or_e(left, first, lambda hd: hd, target)


def weaken_duplicate(atom: Formula) -> Derivation:
    """p q <=* x y |- p q q <=* x y y (the last column duplicated)."""
    a = _full_atom(atom)
    if not a.lhs:
        raise FragmentError("the atom needs at least one column")
    b = _builder(a)
    return b.add_column(Assume(a), a.lhs[-1], a.rhs[-1])


def weaken_duplicate_converse(atom: Formula) -> Derivation:
    """p q q <=* x y y |- p q <=* x y."""
    a = _full_atom(atom)
    dup = Incl(a.lhs + a.lhs[-1:], a.rhs + a.rhs[-1:], a.flavor)
    return Infer("proj", a, (Assume(dup),))


def or_gor_or_distr(phi: Formula, psi: Formula, chi: Formula) -> Derivation:
    """(phi | psi) || (phi | chi) |- phi | (psi || chi)."""
    b = _builder(phi, psi, chi)
    prem = GlobalOr(SplitOr(phi, psi), SplitOr(phi, chi))
    concl = SplitOr(phi, GlobalOr(psi, chi))
    return b.gor_e(Assume(prem),
                   lambda h: b.or_mon(h, lambda k: b.gor_il(k, chi)),
                   lambda h: b.or_mon(h, lambda k: b.gor_ir(k, psi)), concl)


def and_gor_distr(phi: Formula, psi1: Formula, psi2: Formula) -> Derivation:
    """phi & (psi1 || psi2) |- (phi & psi1) || (phi & psi2)."""
    b = _builder(phi, psi1, psi2)
    h = Assume(And(phi, GlobalOr(psi1, psi2)))
    left = b.and_e(h, True)
    concl = GlobalOr(And(phi, psi1), And(phi, psi2))
    return b.gor_e(b.and_e(h, False),
                   lambda k: b.gor_il(b.and_i(left, k), concl.right),
                   lambda k: b.gor_ir(b.and_i(left, k), concl.left), concl)


def and_gor_distr_converse(phi: Formula, psi1: Formula, psi2: Formula) -> Derivation:
    b = _builder(phi, psi1, psi2)
    h = Assume(GlobalOr(And(phi, psi1), And(phi, psi2)))
    concl = And(phi, GlobalOr(psi1, psi2))

    def case(k, other, right_side):
        inj = b.gor_ir(b.and_e(k, False), other) if right_side else b.gor_il(b.and_e(k, False), other)
        return b.and_i(b.and_e(k, True), inj)

    return b.gor_e(h, lambda k: case(k, psi2, False), lambda k: case(k, psi1, True), concl)


def and_or_distr(alpha: Formula, beta1: Formula, beta2: Formula) -> Derivation:
    """alpha & (beta1 | beta2) |- (alpha & beta1) | (alpha & beta2), plain fragment only."""
    _plain_fragment(alpha, beta1, beta2)
    b = _builder(alpha, beta1, beta2)
    h = Assume(And(alpha, SplitOr(beta1, beta2)))
    a = b.and_e(h, True)
    concl = SplitOr(And(alpha, beta1), And(alpha, beta2))
    return b.or_e(b.and_e(h, False),
                  lambda k: b.or_il(b.and_i(a, k), concl.right),
                  lambda k: b.or_ir(b.and_i(a, k), concl.left), concl)


def and_or_distr_converse(alpha: Formula, beta1: Formula, beta2: Formula) -> Derivation:
    _plain_fragment(alpha, beta1, beta2)
    b = _builder(alpha, beta1, beta2)
    h = Assume(SplitOr(And(alpha, beta1), And(alpha, beta2)))
    first = b.or_e(h, lambda k: b.and_e(k, True), lambda k: b.and_e(k, True), alpha)
    second = b.mon_both(h, lambda k: b.and_e(k, False), lambda k: b.and_e(k, False))
    return b.and_i(first, second)


DERIVED_RULES = {
    "bullet-split": bullet_split,
    "bullet-split-converse": bullet_split_converse,
    "bullet-gor": bullet_gor,
    "bullet-gor-converse": bullet_gor_converse,
    "aug": aug,
    "aug-unary": aug_unary_table,
    "weaken-duplicate": weaken_duplicate,
    "weaken-duplicate-converse": weaken_duplicate_converse,
    "or-gor-or-distr": or_gor_or_distr,
    "and-gor-distr": and_gor_distr,
    "and-gor-distr-converse": and_gor_distr_converse,
    "and-or-distr": and_or_distr,
    "and-or-distr-converse": and_or_distr_converse,
}


def derived_rule(name: str, *formulas: Formula) -> Derivation:
    try:
        fn = DERIVED_RULES[name]
    except KeyError:
        raise ValueError(f"unknown derived rule {name!r}; known: {', '.join(DERIVED_RULES)}") from None
    return fn(*formulas)
