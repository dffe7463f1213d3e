import random

import pytest
from hypothesis import given, settings, strategies as st

from teamlogic.oracle import MIXED, GenConfig, random_formula
from teamlogic.semantics import PropContext
from teamlogic.syntax import (
    BOT, EMPTY_INCL, FULL, FULL_ATOM, NONEMPTY, PLAIN, TOP, And, Bot, FormulaSyntaxError, GlobalOr,
    Incl, Logic, Might, SplitOr, StrictOr, contains, depth, free_props, logic_membership,
    membership_violation, parse, subformulas, to_text,
)


def test_parse_literals():
    assert parse("bot") == BOT
    assert parse("top") == TOP
    assert parse("full") == FULL_ATOM


def test_parse_nonempty_atom():
    assert parse("1 0 <=! p q") == Incl(("1", "0"), ("p", "q"), NONEMPTY)


def test_conjunction_binds_tighter_than_atoms_are_grouped():
    assert parse("p q <=* 1 0 & full") == And(Incl(("p", "q"), ("1", "0"), FULL), FULL_ATOM)


def test_precedence_and_associativity():
    f = parse("a <= 1 || b <= 1 | c <= 0 & d <= 1 || bot")
    assert isinstance(f, GlobalOr) and f.right == BOT
    assert isinstance(f.left, GlobalOr)
    assert isinstance(f.left.right, SplitOr)
    assert isinstance(f.left.right.right, And)
    assert parse("p<=1 | p<=0 | q<=1").left == parse("p<=1 | p<=0")


def test_parse_might_and_strict():
    f = parse("might1 (p <= 1) |s MIGHT 1 <=! p")
    assert isinstance(f, StrictOr)
    assert f.left == Might("single", parse("p <= 1"))
    assert f.right == Might("nonempty-subteam", Incl(("1",), ("p",), NONEMPTY))


def test_print_examples():
    assert to_text(BOT) == "bot"
    assert to_text(EMPTY_INCL) == "[] <= []"
    assert to_text(GlobalOr(Incl(("1",), ("q",), PLAIN), Incl(("0",), ("q",), PLAIN))) == "1 <= q || 0 <= q"


def test_print_parenthesizes_right_nested():
    f = GlobalOr(BOT, GlobalOr(BOT, BOT))
    assert to_text(f) == "bot || (bot || bot)"
    assert parse(to_text(f)) == f


@pytest.mark.parametrize("text", ["p <= ", "p q <= 1", "(bot", "bot bot", "p <=> 1", "& bot", ""])
def test_syntax_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse(text)


def test_syntax_error_position():
    with pytest.raises(FormulaSyntaxError) as info:
        parse("bot & (top")
    assert info.value.pos >= 6


def test_unknown_symbol_in_context():
    with pytest.raises(ValueError):
        parse("r <= 1", PropContext(("p", "q")))


@pytest.mark.parametrize("f,logic,ok", [
    (Incl(("1", "0"), ("p1", "p1"), NONEMPTY), Logic.U, False),
    (Incl(("p1", "p1"), ("1", "0"), FULL), Logic.QD, True),
    (SplitOr(BOT, BOT), Logic.QU, False),
    (parse("1 <= p & (bot || 0 1 <= q p)"), Logic.QU, True),
    (parse("1 <= p"), Logic.U, False),
    (parse("top"), Logic.QU, False),
    (parse("full | p <=* 1"), Logic.QD, True),
    (parse("full"), Logic.D, False),
    (parse("p <= q"), Logic.D, False),
    (parse("1 <= 0"), Logic.QU, False),
    (parse("bot | p p <= 1 0"), Logic.D, True),
])
def test_membership(f, logic, ok):
    assert logic_membership(f, logic) is ok


def test_membership_diagnostic_points_at_subterm():
    f = parse("1 <= p & 0 0 <= p p")
    bad = membership_violation(f, Logic.QU)
    assert bad is not None and bad[0] == parse("0 0 <= p p")


def test_evaluator_only_connectives_excluded_everywhere():
    cfg = GenConfig(seed=4)
    rng = random.Random(4)
    for _ in range(300):
        f = random_formula(cfg, MIXED, rng)
        if contains(f, StrictOr) or contains(f, Might):
            assert not any(logic_membership(f, lg) for lg in Logic)


def test_free_props():
    assert free_props(BOT) == frozenset()
    assert free_props(Incl(("1",), ("q",), PLAIN)) == {"q"}
    assert free_props(And(Incl(("p",), ("1",), FULL), FULL_ATOM)) == {"p"}


def test_helpers():
    f = parse("(p <= 1 | bot) & full")
    assert depth(f) == 2
    assert sum(1 for _ in subformulas(f)) == 5
    assert contains(f, Bot)


def test_logic_parse_aliases():
    assert Logic.parse("Lqu") is Logic.QU
    assert Logic.parse("l_d") is Logic.D
    assert Logic.parse("qd") is Logic.QD


def test_length_mismatch():
    with pytest.raises(ValueError):
        Incl(("p",), ("1", "0"), PLAIN)


@pytest.mark.parametrize("logic", list(Logic) + [MIXED])
def test_round_trip_corpus(logic):
    ctx = PropContext(("p", "q", "r"))
    cfg = GenConfig(seed=21, max_depth=4, ctx=ctx)
    rng = random.Random(21)
    for _ in range(10_000 if logic != MIXED else 2_000):
        f = random_formula(cfg, logic, rng)
        assert parse(to_text(f), ctx) == f


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**32), st.integers(min_value=0, max_value=5))
def test_round_trip_property(seed, d):
    cfg = GenConfig(seed=seed, max_depth=d)
    f = random_formula(cfg, MIXED)
    text = to_text(f)
    assert parse(text) == f
    assert to_text(parse(text)) == text
