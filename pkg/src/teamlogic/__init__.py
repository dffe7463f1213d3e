"""Propositional team logics: semantics, normal forms and natural deduction."""

from .semantics import PropContext, denotation, entails, evaluate
from .syntax import Formula, Logic, parse, to_text

__version__ = "0.1.0"

__all__ = ["Formula", "Logic", "PropContext", "denotation", "entails", "evaluate", "parse", "to_text"]
