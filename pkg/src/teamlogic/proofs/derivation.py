"""Natural-deduction derivations and their JSON interchange format.

Nodes compare by identity, so a builder may share one subderivation in several
places; the checker walks the resulting DAG once per node.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

from ..syntax import Formula, Logic, parse, to_text


@dataclass(frozen=True, eq=False)
class Assume:
    formula: Formula
    tag: Optional[str] = None

    @property
    def conclusion(self) -> Formula:
        return self.formula

    premises = ()


@dataclass(frozen=True, eq=False)
class Infer:
    rule: str
    conclusion: Formula
    premises: tuple = ()
    discharge: tuple = ()  # ((tag, formula), ...), one entry per discharge slot

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))
        object.__setattr__(self, "discharge", tuple((t, f) for t, f in self.discharge))


Derivation = Union[Assume, Infer]


def size(d: Derivation) -> int:
    """Number of distinct nodes."""
    seen = set()
    stack = [d]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        stack.extend(n.premises)
    return len(seen)


def to_json_obj(d: Derivation) -> dict:
    if isinstance(d, Assume):
        out = {"assume": to_text(d.formula)}
        if d.tag is not None:
            out["tag"] = d.tag
        return out
    return {
        "rule": d.rule,
        "conclusion": to_text(d.conclusion),
        "premises": [to_json_obj(p) for p in d.premises],
        "discharge": [{"tag": t, "formula": to_text(f)} for t, f in d.discharge],
    }


def from_json_obj(obj: dict, ctx=None) -> Derivation:
    if "assume" in obj:
        return Assume(parse(obj["assume"], ctx), obj.get("tag"))
    if "rule" not in obj or "conclusion" not in obj:
        raise ValueError("derivation node needs either 'assume' or 'rule' and 'conclusion'")
    return Infer(
        obj["rule"],
        parse(obj["conclusion"], ctx),
        tuple(from_json_obj(p, ctx) for p in obj.get("premises", [])),
        tuple((e.get("tag"), parse(e["formula"], ctx)) for e in obj.get("discharge", [])),
    )


def dumps(d: Derivation, logic, indent: Optional[int] = 2) -> str:
    return json.dumps({"logic": Logic(logic).value, "root": to_json_obj(d)}, indent=indent)


def loads(text: str, ctx=None) -> tuple[Logic, Derivation]:
    obj = json.loads(text)
    return Logic.parse(obj["logic"]), from_json_obj(obj["root"], ctx)


def load(path, ctx=None) -> tuple[Logic, Derivation]:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), ctx)
