"""Worked derivations shipped as JSON files in ``teamlogic/golden``."""

from __future__ import annotations

from importlib import resources

from ..semantics import PropContext
from ..syntax import Logic, parse
from .builders import Builder
from .derivation import Assume, Derivation, loads

GOLDEN_FILES = ("example_qu.json", "example_u.json", "aug_unary.json")


def example_qu() -> Derivation:
    """|- 1 <= q || 0 <= q from top by one extension."""
    b = Builder(Logic.QU, PropContext(("q",)))
    top = b.top_i()
    concl = parse("1 <= q || 0 <= q")
    return b.ext_up(top, "q", lambda h: b.gor_il(h, concl.right), lambda h: b.gor_ir(h, concl.left), concl)


def example_u() -> Derivation:
    """1 <=! p |- 1 1 <=! p q || 1 0 <=! p q."""
    b = Builder(Logic.U, PropContext(("p", "q")))
    concl = parse("1 1 <=! p q || 1 0 <=! p q")
    return b.ext_up(Assume(parse("1 <=! p")), "q", lambda h: b.gor_il(h, concl.right),
                    lambda h: b.gor_ir(h, concl.left), concl)


def aug_unary() -> Derivation:
    from .derived import aug_unary_table
    return aug_unary_table()


BUILDERS = {
    "example_qu.json": (Logic.QU, example_qu),
    "example_u.json": (Logic.U, example_u),
    "aug_unary.json": (Logic.QD, aug_unary),
}


def load_golden(name: str) -> tuple[Logic, Derivation]:
    text = resources.files("teamlogic").joinpath("golden", name).read_text(encoding="utf-8")
    return loads(text)
