import random

import pytest
from hypothesis import given, settings, strategies as st

from teamlogic.normalform import (
    NotClosed, characteristic, empty_team_atom, is_normal_form, normalize_semantic, psi_prime,
    psi_star, signature, synthesize, synthesize_closure, theta_prime, theta_star,
    valuation_of_signature,
)
from teamlogic.oracle import GenConfig, random_closed_property, random_formula
from teamlogic.semantics import (
    KIND_OF_LOGIC, PropContext, close, denotation, entails, evaluate, members, prop_of,
)
from teamlogic.syntax import (
    BOT, EMPTY_INCL, FULL, FULL_ATOM, NONEMPTY, PLAIN, TOP, And, Incl, Logic, SplitOr, big_global_or,
)

PQ = PropContext(("p", "q"))


def test_signature(pq):
    v = pq.valuation_of_bits([1, 0])
    assert signature(pq, v) == ("1", "0")
    assert signature(PropContext(()), 0) == ()
    for w in range(pq.n_vals):
        assert valuation_of_signature(pq, signature(pq, w)) == w


def test_signature_atom_pins_down_its_valuation(pq):
    for v in range(pq.n_vals):
        atom = Incl(signature(pq, v), pq.props, PLAIN)
        assert [w for w in range(pq.n_vals) if evaluate(1 << w, atom, pq)] == [v]


def test_characteristic_small_cases(p_only):
    assert psi_prime(p_only, 0) == EMPTY_INCL
    assert psi_prime(p_only, 0b10) == Incl(("1",), ("p",), PLAIN)
    assert psi_star(p_only, 0) == TOP
    assert psi_star(p_only, p_only.full) == And(Incl(("0",), ("p",), NONEMPTY), Incl(("1",), ("p",), NONEMPTY))
    assert theta_prime(p_only, 0b10) == Incl(("p",), ("1",), FULL)
    assert theta_star(p_only, 0) == BOT
    assert theta_star(p_only, 0b11) == SplitOr(Incl(("p",), ("0",), PLAIN), Incl(("p",), ("1",), PLAIN))
    assert denotation(theta_prime(p_only, 0), p_only) == prop_of([0, p_only.full])


def test_empty_team_atom_needs_a_symbol():
    assert empty_team_atom(PropContext(("p", "q"))) == Incl(("p", "p", "q"), ("1", "0", "0"), FULL)
    with pytest.raises(ValueError):
        empty_team_atom(PropContext(()))


def _supersets(ctx, t):
    return prop_of(s for s in range(ctx.n_teams) if s & t == t)


def _subsets(ctx, t):
    return prop_of(s for s in range(ctx.n_teams) if s & ~t == 0)


@pytest.mark.parametrize("team", range(16))
def test_characteristic_denotations(team):
    ctx = PQ
    assert denotation(psi_prime(ctx, team), ctx) == 1 | _supersets(ctx, team)
    assert denotation(psi_star(ctx, team), ctx) == _supersets(ctx, team)
    assert denotation(theta_prime(ctx, team), ctx) == _subsets(ctx, team) | (1 << ctx.full)
    assert denotation(theta_star(ctx, team), ctx) == _subsets(ctx, team)


def test_synthesize_specials(pq):
    assert synthesize(1, Logic.QU, pq).formula == BOT
    assert synthesize(1 << pq.full, Logic.QD, pq).formula == FULL_ATOM
    with pytest.raises(NotClosed, match="quasi-upward"):
        synthesize(1 << 3, Logic.QU, pq)
    with pytest.raises(ValueError):
        synthesize(0, Logic.D, pq)


def test_synthesize_closure(pq):
    assert synthesize_closure(1, Logic.QU, pq).formula == BOT
    assert synthesize_closure(1 << pq.full, Logic.QD, pq).formula == FULL_ATOM
    rng = random.Random(6)
    for _ in range(100):
        c = prop_of(rng.randrange(pq.n_teams) for _ in range(rng.randint(1, 4)))
        for logic in Logic:
            nf = synthesize_closure(c, logic, pq)
            assert denotation(nf.formula, pq) == close(c, KIND_OF_LOGIC[logic], pq)


def test_normalize_examples():
    q = PropContext(("q",))
    nf = normalize_semantic(Incl(("1",), ("q",), PLAIN), Logic.QU, q)
    assert nf.teams == (0b10, 0b11)
    assert normalize_semantic(BOT, Logic.QU, q).formula == BOT
    assert normalize_semantic(FULL_ATOM, Logic.QD, q).formula == FULL_ATOM
    with pytest.raises(ValueError):
        normalize_semantic(TOP, Logic.QU, q)


@pytest.mark.parametrize("logic", list(Logic))
def test_normalize_preserves_denotation(logic, pq):
    cfg = GenConfig(seed=41, max_depth=3, ctx=pq)
    rng = random.Random(41)
    for _ in range(150):
        f = random_formula(cfg, logic, rng)
        assert denotation(normalize_semantic(f, logic, pq).formula, pq) == denotation(f, pq)


def test_recognizer(pq):
    assert is_normal_form(psi_prime(pq, 0b0110), Logic.QU, pq) == prop_of([0b0110])
    assert is_normal_form(And(BOT, BOT), Logic.QU, pq) is None
    cfg = GenConfig(seed=13, ctx=pq)
    rng = random.Random(13)
    for logic in Logic:
        for _ in range(40):
            c = random_closed_property(cfg, KIND_OF_LOGIC[logic], rng)
            nf = synthesize(c, logic, pq)
            assert is_normal_form(nf.formula, logic, pq) == nf.property


def test_recognizer_accepts_any_disjunct_order(pq):
    teams = [0b0011, 0b1000, 0b0110]
    f = big_global_or([psi_star(pq, t) for t in teams])
    assert is_normal_form(f, Logic.U, pq) == prop_of(teams)


@settings(max_examples=150, deadline=None)
@given(st.sets(st.integers(1, 15), min_size=1, max_size=4), st.sets(st.integers(1, 15), min_size=1, max_size=4))
def test_upward_entailment_is_domination(src, dst):
    for logic in (Logic.QU, Logic.U):
        a = big_global_or([characteristic(logic, PQ, t) for t in sorted(src)])
        b = big_global_or([characteristic(logic, PQ, t) for t in sorted(dst)])
        dominated = all(any(s & t == t for t in dst) for s in src)
        assert entails([a], b, PQ) == dominated


@settings(max_examples=150, deadline=None)
@given(st.sets(st.integers(0, 14), min_size=1, max_size=4), st.sets(st.integers(0, 14), min_size=1, max_size=4))
def test_downward_entailment_is_domination(src, dst):
    for logic in (Logic.QD, Logic.D):
        a = big_global_or([characteristic(logic, PQ, t) for t in sorted(src)])
        b = big_global_or([characteristic(logic, PQ, t) for t in sorted(dst)])
        dominated = all(any(s & ~t == 0 for t in dst) for s in src)
        assert entails([a], b, PQ) == dominated


def test_synthesized_disjuncts_are_canonical(pq):
    nf = synthesize(prop_of([0, 0b0001, 0b0010, 0b0011]), Logic.D, pq)
    assert list(nf.teams) == sorted(nf.teams)
    assert nf.disjuncts()[0] == BOT
    assert list(members(nf.property)) == [0, 0b0001, 0b0010, 0b0011]
