"""Command-line interface: ``teamlogic <command> [flags]``.

Exit status is 0 for success or a true answer, 1 for a false answer or a
failed check, and 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Optional

from . import oracle
from .normalform import NotClosed, normalize_semantic, synthesize
from .proofs import NotDerivable, NotEntailed, check, derive_entailment, derive_normal_form, load
from .proofs.audit import audit_soundness
from .proofs.derivation import to_json_obj
from .proofs.rules import SIDE_CONDITIONS
from .semantics import (
    ClosureKind, ContextError, PropContext, check_closure, close, counterexample, denotation,
    evaluate, format_property, format_team, parse_property, parse_team, property_to_json,
)
from .syntax import FormulaSyntaxError, Logic, membership_violation, parse, to_text

LOGICS = ("qu", "u", "qd", "d")
KINDS = ("d", "qd", "u", "qu")


class UsageError(Exception):
    pass


def _ctx(args) -> PropContext:
    return PropContext.parse(args.props or "")


def _p(ctx: PropContext, text: str):
    return parse(text, ctx)


def _formula(ctx: PropContext, text: Optional[str], flag: str = "--formula"):
    if text is None:
        raise UsageError(f"{flag} is required")
    return _p(ctx, text)


def _emit(args, obj: dict, text: str) -> None:
    print(json.dumps(obj) if args.json else text)


def _need_seed(args) -> None:
    if args.seed is None:
        raise UsageError("--seed is required for randomized commands")


def _member(f, logic: Logic) -> None:
    bad = membership_violation(f, logic)
    if bad:
        raise UsageError(f"{to_text(f)} is not in L_{logic.value}: {bad[1]}")


def cmd_eval(args) -> int:
    ctx = _ctx(args)
    if args.team is None:
        raise UsageError("--team is required")
    team = parse_team(ctx, args.team)
    f = _formula(ctx, args.formula)
    val = evaluate(team, f, ctx)
    _emit(args, {"team": format_team(ctx, team), "formula": to_text(f), "value": val},
          "true" if val else "false")
    return 0 if val else 1


def cmd_denote(args) -> int:
    ctx = _ctx(args)
    f = _formula(ctx, args.formula)
    prop = denotation(f, ctx, max_props=4)
    _emit(args, {"formula": to_text(f), "property": property_to_json(ctx, prop)}, format_property(ctx, prop))
    return 0


def _property(args, ctx) -> int:
    if args.property is None:
        raise UsageError("--property is required")
    prop = parse_property(ctx, args.property)
    if prop == 0:
        raise UsageError("the team property must be nonempty")
    return prop


def cmd_closure(args) -> int:
    ctx = _ctx(args)
    prop = _property(args, ctx)
    kinds = [args.kind] if args.kind else list(KINDS) + ["union", "empty", "full"]
    res = {k: check_closure(prop, ClosureKind.parse(k), ctx) for k in kinds}
    _emit(args, res, "\n".join(f"{k}: {'true' if v else 'false'}" for k, v in res.items()))
    if args.kind:
        return 0 if res[args.kind] else 1
    return 0


def cmd_close(args) -> int:
    ctx = _ctx(args)
    prop = _property(args, ctx)
    if not args.kind:
        raise UsageError("--kind is required")
    out = close(prop, args.kind, ctx)
    _emit(args, {"kind": args.kind, "property": property_to_json(ctx, out)}, format_property(ctx, out))
    return 0


def cmd_synth(args) -> int:
    ctx = _ctx(args)
    prop = _property(args, ctx)
    logic = Logic.parse(args.logic)
    try:
        nf = synthesize(prop, logic, ctx)
    except NotClosed as e:
        print(str(e), file=sys.stderr)
        return 1
    _emit(args, {"logic": logic.value, "formula": to_text(nf.formula)}, to_text(nf.formula))
    return 0


def cmd_normalize(args) -> int:
    ctx = _ctx(args)
    logic = Logic.parse(args.logic)
    f = _formula(ctx, args.formula)
    _member(f, logic)
    nf = normalize_semantic(f, logic, ctx, max_props=4)
    _emit(args, {"logic": logic.value, "formula": to_text(nf.formula),
                 "property": property_to_json(ctx, nf.property)}, to_text(nf.formula))
    return 0


def cmd_entail(args) -> int:
    ctx = _ctx(args)
    lhs = [_p(ctx, t) for t in (args.lhs or [])]
    rhs = _formula(ctx, args.rhs, "--rhs")
    team = counterexample(lhs, rhs, ctx, max_props=4)
    if team is None:
        _emit(args, {"entailed": True}, "true")
        return 0
    _emit(args, {"entailed": False, "counterexample": format_team(ctx, team)},
          f"false\ncounterexample: {format_team(ctx, team)}")
    return 1


def cmd_check_proof(args) -> int:
    if not args.file:
        raise UsageError("--file is required")
    ctx = PropContext.parse(args.props) if args.props else None
    file_logic, d = load(args.file, ctx)
    logic = Logic.parse(args.logic) if args.logic else file_logic
    rep = check(d, logic)
    if args.json:
        print(json.dumps({"ok": rep.ok, "conclusion": to_text(rep.conclusion),
                          "open_assumptions": sorted(to_text(f) for f in rep.open_assumptions.elements()),
                          "violations": [{"path": p, "message": m} for p, m in rep.violations]}))
    else:
        print(rep.summary())
    return 0 if rep.ok else 1


def cmd_derive(args) -> int:
    ctx = _ctx(args)
    logic = Logic.parse(args.logic)
    if args.formula is not None:
        f = _p(ctx, args.formula)
        _member(f, logic)
        nf, fwd, bwd = derive_normal_form(f, logic, ctx)
        obj = {"logic": logic.value, "normal_form": to_text(nf.formula),
               "forward": {"logic": logic.value, "root": to_json_obj(fwd)},
               "backward": {"logic": logic.value, "root": to_json_obj(bwd)}}
        print(json.dumps(obj, indent=None if args.json else 2))
        return 0
    if args.lhs is None or args.rhs is None:
        raise UsageError("derive needs --formula, or --lhs and --rhs")
    if len(args.lhs) != 1:
        raise UsageError("derive takes exactly one --lhs")
    g, f = _p(ctx, args.lhs[0]), _p(ctx, args.rhs)
    _member(g, logic)
    _member(f, logic)
    try:
        d = derive_entailment(g, f, logic, ctx)
    except NotEntailed as e:
        print(f"not entailed; counterexample: {format_team(ctx, e.team)}", file=sys.stderr)
        return 1
    except NotDerivable as e:
        print(f"not derivable: {e}", file=sys.stderr)
        return 1
    print(json.dumps({"logic": logic.value, "root": to_json_obj(d)}, indent=None if args.json else 2))
    return 0


def cmd_audit(args) -> int:
    _need_seed(args)
    ctx = PropContext.parse(args.props or "p q")
    logics = [Logic.parse(args.logic)] if args.logic else list(Logic)
    ok = True
    rows = []
    failures = []
    for logic in logics:
        rep = audit_soundness(logic, ctx, samples=args.samples or 500, seed=args.seed,
                              rules=args.rule or None, disabled=args.disable or ())
        ok &= rep.ok
        rows += rep.rows()
        failures += [{"logic": logic.value, "rule": r, "instance": desc, "team": format_team(ctx, t)}
                     for r, desc, t in rep.failures]
    if args.json:
        print(json.dumps({"ok": ok, "rules": rows, "failures": failures}))
    else:
        sys.stdout.write(oracle.rows_to_csv(rows))
        for fl in failures:
            print(f"# counterexample ({fl['logic']}) at team {fl['team']}: {fl['instance']}")
    return 0 if ok else 1


def cmd_oracle(args) -> int:
    if args.action == "counts":
        rows = oracle.closed_property_counts(args.max_props)
        sys.stdout.write(oracle.rows_to_csv(rows))
        return 0
    _need_seed(args)
    ctx = PropContext.parse(args.props or "p q")
    cfg = oracle.GenConfig(seed=args.seed, max_depth=args.depth, ctx=ctx)
    rng = random.Random(args.seed)
    ref = oracle.ReferenceEvaluator(ctx, max_members=ctx.n_vals)
    rows = []
    for _ in range(args.samples or 200):
        f = oracle.random_formula(cfg, oracle.MIXED, rng)
        for team in range(ctx.n_teams):
            a, b = evaluate(team, f, ctx), ref(team, f)
            if a != b:
                rows.append({"formula": to_text(f), "team": format_team(ctx, team), "eval": a, "reference": b})
    if rows:
        sys.stdout.write(oracle.rows_to_csv(rows))
    else:
        print("formula,team,eval,reference")
    return 1 if rows else 0


COMMANDS = {
    "eval": cmd_eval, "denote": cmd_denote, "closure": cmd_closure, "close": cmd_close,
    "synth": cmd_synth, "normalize": cmd_normalize, "entail": cmd_entail,
    "check-proof": cmd_check_proof, "derive": cmd_derive, "audit": cmd_audit, "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="teamlogic", description="Propositional team logic toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_text, *flags):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        for flag in flags:
            flag(sp)
        return sp

    props = lambda sp: sp.add_argument("--props", help='proposition symbols, e.g. "p q"')
    formula = lambda sp: sp.add_argument("--formula")
    logic = lambda sp: sp.add_argument("--logic", choices=LOGICS)
    kind = lambda sp: sp.add_argument("--kind", choices=KINDS)
    prop = lambda sp: sp.add_argument("--property", help='teams separated by ";", e.g. "EMPTY;10,01"')
    lhs = lambda sp: sp.add_argument("--lhs", action="append", help="premise (repeatable)")
    rhs = lambda sp: sp.add_argument("--rhs")
    seed = lambda sp: sp.add_argument("--seed", type=int)
    samples = lambda sp: sp.add_argument("--samples", type=int)

    add("eval", "evaluate a formula on a team", props, formula,
        lambda sp: sp.add_argument("--team", help='"EMPTY", "FULL" or bitstrings like "10,01"'))
    add("denote", "list every team satisfying a formula", props, formula)
    add("closure", "test closure properties of a team property", props, prop, kind)
    add("close", "apply a closure operator", props, prop, kind)
    add("synth", "build a formula defining a closed team property", props, prop, logic)
    add("normalize", "semantic normal form of a formula", props, formula, logic)
    add("entail", "decide an entailment", props, lhs, rhs)
    add("check-proof", "check a derivation file", props, logic, lambda sp: sp.add_argument("--file"))
    add("derive", "build a normal-form or entailment derivation", props, formula, logic, lhs, rhs)
    add("audit", "sample rule instances and test their soundness", props, logic, seed, samples,
        lambda sp: sp.add_argument("--rule", action="append"),
        lambda sp: sp.add_argument("--disable", action="append", choices=SIDE_CONDITIONS))
    add("oracle", "brute-force reference checks (CSV output)", props, seed, samples,
        lambda sp: sp.add_argument("action", choices=("counts", "crosscheck")),
        lambda sp: sp.add_argument("--max-props", type=int, default=2),
        lambda sp: sp.add_argument("--depth", type=int, default=3))
    for name in ("synth", "normalize", "derive"):
        for action in sub.choices[name]._actions:
            if action.dest == "logic":
                action.required = True
    return p


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, FormulaSyntaxError, ContextError, ValueError, OSError) as e:
        print(f"teamlogic {args.command}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
