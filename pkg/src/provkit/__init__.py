"""Arithmetization toolkit: formulas, Goedel codes, derivability conditions, provability logic."""
from . import syntax, coding, hierarchy  # noqa: F401  (coding wires atom interpretations)

__version__ = "0.1.0"
