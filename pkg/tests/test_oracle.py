import random

import pytest

from teamlogic.oracle import (
    MIXED, BoundExceeded, GenConfig, corpus, ReferenceEvaluator, closed_property_counts,
    enumerate_closed_properties, enumerate_teams, random_closed_property, random_formula,
    reference_denotation, reference_eval, rows_to_csv,
)
from teamlogic.semantics import PropContext, close, denotation, evaluate, has
from teamlogic.syntax import BOT, Logic, SplitOr, StrictOr, logic_membership, parse


def ctx_of(n):
    return PropContext(tuple(f"p{i + 1}" for i in range(n)))


@pytest.mark.parametrize("n,count", [(0, 2), (1, 4), (2, 16), (3, 256)])
def test_team_counts(n, count):
    teams = enumerate_teams(ctx_of(n))
    assert len(teams) == count
    assert teams[0] == 0
    assert teams[-1] == ctx_of(n).full


def test_team_bound():
    with pytest.raises(BoundExceeded):
        enumerate_teams(ctx_of(5))
    with pytest.raises(BoundExceeded):
        list(enumerate_closed_properties(ctx_of(3), "d"))


def test_downward_closed_over_empty_context():
    # two teams (empty and full); the nonempty subset-closed collections
    props = list(enumerate_closed_properties(ctx_of(0), "d"))
    assert sorted(props) == [0b01, 0b11]


def test_quasi_properties_contain_anchor_teams():
    ctx = ctx_of(2)
    assert all(has(c, 0) for c in enumerate_closed_properties(ctx, "qu"))
    assert all(has(c, ctx.full) for c in enumerate_closed_properties(ctx, "qd"))


def test_closed_counts_match_dedekind_numbers():
    # nonempty down-sets of the lattice of teams: 2, 5, 167
    counts = {(r["n"], r["kind"]): r["count"] for r in closed_property_counts(2)}
    for kind in ("d", "qd", "u", "qu"):
        assert [counts[(n, kind)] for n in range(3)] == [2, 5, 167]


def test_generator_is_deterministic():
    cfg = GenConfig(seed=11)
    assert corpus(cfg, Logic.QD, 20) == corpus(cfg, Logic.QD, 20)
    assert corpus(cfg, Logic.QD, 20) != corpus(GenConfig(seed=12), Logic.QD, 20)


@pytest.mark.parametrize("logic", list(Logic))
def test_generated_formulas_are_members(logic):
    cfg = GenConfig(seed=3)
    rng = random.Random(3)
    for _ in range(1000 if logic is Logic.U else 300):
        assert logic_membership(random_formula(cfg, logic, rng), logic)


def test_depth_zero_quasi_upward_is_atom_or_bot():
    cfg = GenConfig(seed=0, max_depth=0)
    rng = random.Random(0)
    for _ in range(50):
        f = random_formula(cfg, Logic.QU, rng)
        assert f == BOT or f.__class__.__name__ == "Incl"


@pytest.mark.parametrize("kind", ["d", "qd", "u", "qu"])
def test_random_closed_property_is_closed(kind):
    cfg = GenConfig(seed=5)
    rng = random.Random(5)
    for _ in range(30):
        c = random_closed_property(cfg, kind, rng)
        assert close(c, kind, cfg.ctx) == c


def test_reference_agrees_on_empty_team_bot():
    assert reference_eval(0, BOT, ctx_of(1)) is True
    assert evaluate(0, BOT, ctx_of(1)) is True


def test_reference_bound():
    ev = ReferenceEvaluator(ctx_of(3), max_members=4)
    with pytest.raises(BoundExceeded):
        ev(0b11111, BOT)


def test_strict_and_split_disjunction_differ_somewhere(pq):
    # search for a pair where overlap matters, then check both evaluators agree on it
    ev = ReferenceEvaluator(pq)
    phi = parse("1 <=! p", pq)
    found = None
    for team in range(pq.n_teams):
        a = ev(team, SplitOr(phi, phi))
        b = ev(team, StrictOr(phi, phi))
        if a != b:
            found = team
            assert evaluate(team, SplitOr(phi, phi), pq) == a
            assert evaluate(team, StrictOr(phi, phi), pq) == b
    assert found is not None


def test_reference_matches_eval_on_mixed_corpus(pq):
    cfg = GenConfig(seed=17, ctx=pq)
    rng = random.Random(17)
    ev = ReferenceEvaluator(pq)
    for _ in range(300):
        f = random_formula(cfg, MIXED, rng)
        assert reference_denotation(f, pq) == denotation(f, pq)
        for team in range(pq.n_teams):
            assert ev(team, f) == evaluate(team, f, pq)


def test_rows_to_csv():
    assert rows_to_csv([]) == ""
    assert rows_to_csv([{"a": 1, "b": 2}]) == "a,b\n1,2\n"
