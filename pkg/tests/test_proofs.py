import json
import random

import pytest

from golden_mutations import mutation_cases
from teamlogic.oracle import GenConfig, random_formula
from teamlogic.proofs import (
    Assume, Infer, NotDerivable, NotEntailed, check, derive_entailment, derive_normal_form, dumps,
    loads, size,
)
from teamlogic.proofs.audit import audit_soundness
from teamlogic.proofs.derived import FragmentError, derived_rule
from teamlogic.proofs.golden import BUILDERS, GOLDEN_FILES, load_golden
from teamlogic.proofs.rules import OR_E_GOR_FREE, SYSTEMS
from teamlogic.semantics import PropContext, counterexample, denotation, entails
from teamlogic.syntax import BOT, FULL_ATOM, Logic, parse, to_text
from teamlogic.normalform import psi_prime, synthesize
from teamlogic.semantics import close, prop_of

P = parse


def sound(report, concl, ctx):
    return counterexample(list(report.open_assumptions), concl, ctx) is None


# -- goldens and mutations ----------------------------------------------------

def test_quasi_upward_example():
    logic, d = load_golden("example_qu.json")
    rep = check(d, logic)
    assert rep.ok and not rep.open_assumptions
    assert to_text(rep.conclusion) == "1 <= q || 0 <= q"


def test_upward_example():
    logic, d = load_golden("example_u.json")
    rep = check(d, logic)
    assert rep.ok
    assert set(rep.open_assumptions) == {P("1 <=! p")}
    assert rep.conclusion == P("1 1 <=! p q || 1 0 <=! p q")


def test_aug_table():
    logic, d = load_golden("aug_unary.json")
    rep = check(d, logic)
    assert rep.ok
    assert set(rep.open_assumptions) == {P("p <=* 1"), P("q <=* 0")}
    assert rep.conclusion == P("p q <=* 1 0")


def test_golden_files_match_builders():
    for name in GOLDEN_FILES:
        logic, fn = BUILDERS[name]
        assert json.loads(dumps(fn(), logic)) == json.loads(dumps(load_golden(name)[1], logic))


@pytest.mark.parametrize("name,d,logic,path", list(mutation_cases()), ids=lambda x: x if isinstance(x, str) else "")
def test_mutation_rejected_at_node(name, d, logic, path):
    rep = check(d, logic)
    assert not rep.ok
    assert path in {p for p, _ in rep.violations}


def test_non_fresh_extension_message():
    name, d, logic, path = next(c for c in mutation_cases() if c[0] == "non-fresh-ext")
    assert any("not fresh" in m for p, m in check(d, logic).violations if p == path)


def test_rule_outside_system():
    d = Infer("orCom", P("p <= 1 | q <= 1"), (Assume(P("q <= 1 | p <= 1")),))
    assert check(d, "d").ok
    rep = check(Infer("orCom", P("1 <= p"), (Assume(P("1 <= p")),)), "qu")
    assert not rep.ok and "not in the system" in rep.violations[0][1]


def test_nested_reuse_of_tag_is_flagged():
    inner = Infer("gorE", P("p <= 1"), (Assume(P("p <= 1 || p <= 1"), "t"), Assume(P("p <= 1"), "t"),
                                          Assume(P("p <= 1"), "t")), (("t", P("p <= 1")), ("t", P("p <= 1"))))
    outer = Infer("gorE", P("p <= 1"), (Assume(P("p<=1 || p<=1")), inner, Assume(P("p <= 1"), "t")),
                  (("t", P("p <= 1")), ("t", P("p <= 1"))))
    assert not check(outer, "d").ok


def test_json_round_trip():
    for name in GOLDEN_FILES:
        logic, d = load_golden(name)
        logic2, d2 = loads(dumps(d, logic))
        assert logic2 is logic and dumps(d2, logic) == dumps(d, logic)
    with pytest.raises(ValueError):
        loads('{"logic": "d", "root": {"premises": []}}')


# -- builders -------------------------------------------------------------------

def test_trivial_normal_forms():
    ctx = PropContext(("p",))
    nf, fwd, bwd = derive_normal_form(BOT, Logic.QU, ctx)
    assert nf.formula == BOT and isinstance(fwd, Assume) and isinstance(bwd, Assume)
    nf, fwd, bwd = derive_normal_form(FULL_ATOM, Logic.QD, ctx)
    assert nf.formula == FULL_ATOM and isinstance(fwd, Assume) and isinstance(bwd, Assume)


def test_membership_is_required():
    with pytest.raises(ValueError):
        derive_normal_form(P("top"), Logic.QU, ("p",))


@pytest.mark.parametrize("logic", list(Logic))
def test_normal_form_derivations(logic, pq):
    cfg = GenConfig(seed=101, max_depth=3, ctx=pq)
    rng = random.Random(101)
    for _ in range(25):
        f = random_formula(cfg, logic, rng)
        nf, fwd, bwd = derive_normal_form(f, logic, pq)
        r1, r2 = check(fwd, logic), check(bwd, logic)
        assert r1.ok and r2.ok
        assert r1.conclusion == nf.formula and r2.conclusion == f
        assert set(r1.open_assumptions) <= {f} and set(r2.open_assumptions) <= {nf.formula}
        assert denotation(nf.formula, pq) == denotation(f, pq)


def test_reflexive_entailment_is_a_leaf():
    f = P("p <= 1 | q <= 0")
    assert isinstance(derive_entailment(f, f, "d", ("p", "q")), Assume)


def test_entailment_into_closure_of_full_team():
    ctx = PropContext(("p",))
    gamma = psi_prime(ctx, ctx.full)
    target = synthesize(close(prop_of([ctx.full]), "qu", ctx), Logic.QU, ctx).formula
    d = derive_entailment(gamma, target, Logic.QU, ctx)
    rep = check(d, Logic.QU)
    assert rep.ok and rep.conclusion == target
    assert sound(rep, target, ctx)


def test_aug_entailment():
    d = derive_entailment(P("p <=* 1 & q <=* 0"), P("p q <=* 1 0"), Logic.QD, ("p", "q"))
    rep = check(d, Logic.QD)
    assert rep.ok and set(rep.open_assumptions) == {P("p <=* 1 & q <=* 0")}
    assert any(isinstance(n, Infer) and n.rule == "ext" for n in _nodes(d))


def _nodes(d):
    seen, stack = set(), [d]
    while stack:
        n = stack.pop()
        if id(n) not in seen:
            seen.add(id(n))
            yield n
            stack.extend(n.premises)


def test_not_entailed_carries_counterexample():
    with pytest.raises(NotEntailed) as info:
        derive_entailment(P("p <= 1"), P("p <= 0"), "d", ("p",))
    assert info.value.team == 0b10


def test_full_team_only_entailment_is_not_derivable():
    # valid only because the full team satisfies both sides; the rules cannot see that
    with pytest.raises(NotDerivable):
        derive_entailment(P("[] <=* []"), P("p <=* 1 || p <=* 0"), Logic.QD, ("p",))


def test_quasi_downward_rules_are_blind_to_the_full_team():
    # why the entailment above is out of reach: no rule needs the full team
    rep = audit_soundness(Logic.QD, ("p", "q"), samples=150, seed=4, full_blind=True)
    assert rep.ok, rep.failures[:3]


def test_full_team_disjunct_survives_in_builder_normal_form(pq):
    f = P("p q <=* 0 0 | p q <=* 0 1 | p q <=* 1 0 | p q <=* 1 1")
    nf, fwd, bwd = derive_normal_form(f, Logic.QD, pq)
    assert pq.full in nf.teams
    assert denotation(nf.formula, pq) == denotation(f, pq)
    with pytest.raises(NotDerivable):
        derive_entailment(f, synthesize(denotation(f, pq), Logic.QD, pq).formula, Logic.QD, pq)


@pytest.mark.parametrize("logic", list(Logic))
def test_entailment_derivations(logic, pq):
    cfg = GenConfig(seed=202, max_depth=2, ctx=pq)
    rng = random.Random(202)
    done = 0
    while done < 15:
        g, f = random_formula(cfg, logic, rng), random_formula(cfg, logic, rng)
        if not entails([g], f, pq):
            continue
        try:
            d = derive_entailment(g, f, logic, pq)
        except NotDerivable:
            assert logic is Logic.QD
            continue
        rep = check(d, logic)
        assert rep.ok and rep.conclusion == f and set(rep.open_assumptions) <= {g}
        assert sound(rep, f, pq)
        done += 1


# -- derived rules ----------------------------------------------------------------

@pytest.mark.parametrize("name,args", [
    ("bullet-split", ("p <=* 1",)),
    ("bullet-gor", ("p <=* 1 | q <=* 0",)),
    ("aug", ("p <=* 1", "q <=* 0")),
    ("aug", ("p q <=* 1 0", "q p <=* 0 0")),
    ("aug-unary", ()),
    ("weaken-duplicate", ("p q <=* 1 0",)),
    ("weaken-duplicate-converse", ("p q <=* 1 0",)),
    ("or-gor-or-distr", ("p <=* 1", "q <=* 1", "full")),
    ("and-gor-distr", ("p <=* 1", "q <=* 1", "full")),
    ("and-gor-distr-converse", ("p <=* 1", "q <=* 1", "full")),
    ("and-or-distr", ("p <=* 1", "q <=* 1", "q <=* 0")),
    ("and-or-distr-converse", ("p <=* 1", "q <=* 1", "q <=* 0")),
])
def test_derived_rules_check(name, args, pq):
    d = derived_rule(name, *[P(a) for a in args])
    rep = check(d, Logic.QD)
    assert rep.ok
    assert sound(rep, rep.conclusion, pq)


def test_bullet_split_is_one_step():
    d = derived_rule("bullet-split", P("p <=* 1"))
    assert d.rule == "bulletI" and size(d) == 2


def test_fragment_conditions():
    with pytest.raises(FragmentError):
        derived_rule("and-or-distr", P("full"), P("p <=* 1"), P("q <=* 1"))
    with pytest.raises(FragmentError):
        derived_rule("aug", P("p <=* 1 | q <=* 1"), P("q <=* 1"))
    with pytest.raises(ValueError):
        derived_rule("no-such-rule")


def test_and_gor_distribution_on_random_formulas(pq):
    cfg = GenConfig(seed=12, max_depth=2, ctx=pq)
    rng = random.Random(12)
    for _ in range(30):
        a, b, c = (random_formula(cfg, Logic.QD, rng) for _ in range(3))
        d = derived_rule("and-gor-distr", a, b, c)
        rep = check(d, Logic.QD)
        assert rep.ok
        (prem,) = rep.open_assumptions
        assert denotation(prem, pq) == denotation(rep.conclusion, pq)


# -- audit ------------------------------------------------------------------------

@pytest.mark.parametrize("logic", list(Logic))
def test_audit_small(logic):
    rep = audit_soundness(logic, samples=60, seed=3)
    assert rep.ok, rep.failures[:3]
    assert set(rep.stats) == set(SYSTEMS[logic])


def test_audit_global_introduction_always_sound():
    rep = audit_soundness("qu", samples=200, seed=1, rules=["gorIl", "gorIr"])
    assert rep.ok


def test_audit_mutation_finds_counterexample():
    rep = audit_soundness("qd", samples=200, seed=1, rules=["orE"], disabled=[OR_E_GOR_FREE])
    assert rep.failures


# -- hygiene --------------------------------------------------------------------

def _tags_discharged(d, above=frozenset()):
    if isinstance(d, Assume):
        return d.tag is None or d.tag in above
    from teamlogic.proofs.rules import discharge_slots
    slots = discharge_slots(d.rule, Logic.QD) if d.discharge else ()
    extra = {}
    for (t, _), i in zip(d.discharge, slots):
        extra.setdefault(i, set()).add(t)
    return all(_tags_discharged(p, above | extra.get(i, set())) for i, p in enumerate(d.premises))


def test_passing_derivations_discharge_every_tag(pq):
    rng = random.Random(77)
    cfg = GenConfig(seed=77, max_depth=2, ctx=pq)
    for _ in range(30):
        f = random_formula(cfg, Logic.QD, rng)
        _, fwd, _ = derive_normal_form(f, Logic.QD, pq)
        obj = json.loads(dumps(fwd, Logic.QD))
        leaves = []
        stack = [obj["root"]]
        while stack:
            n = stack.pop()
            if "assume" in n and "tag" in n:
                leaves.append(n)
            stack.extend(n.get("premises", []))
        if leaves:
            rng.choice(leaves)["tag"] = rng.choice(["zz", leaves[0]["tag"]])
        _, d = loads(json.dumps(obj))
        if check(d, Logic.QD).ok:
            assert _tags_discharged(d)
