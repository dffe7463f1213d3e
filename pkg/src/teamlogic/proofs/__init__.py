"""Derivations, rule systems, checking and proof construction."""

from .builders import NotDerivable, NotEntailed, derive_entailment, derive_normal_form
from .checker import CheckReport, check
from .derivation import Assume, Infer, dumps, load, loads, size
from .rules import SIDE_CONDITIONS, SYSTEMS

__all__ = [
    "Assume", "Infer", "CheckReport", "NotDerivable", "NotEntailed", "SIDE_CONDITIONS",
    "SYSTEMS", "check", "derive_entailment", "derive_normal_form", "dumps", "load", "loads", "size",
]
