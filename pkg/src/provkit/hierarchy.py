"""Where a formula sits in the arithmetical hierarchy.

Classification is purely syntactic.  For each formula we compute the least
n with the formula in Sigma_n and the least m with it in Pi_m, closing under
the four rules: the inclusions between levels, closure of Sigma (Pi) under
the connectives, bounded quantifiers and the matching unbounded quantifier,
duality under negation, and the mixed rule for implication.  Registered
Delta1 atoms count as bounded.
"""
from __future__ import annotations

from .levels import DELTA0, Level, LevelKind, pi, sigma
from .syntax import (
    ATOMS, And, BExists, BForall, Eq, Exists, ExtAtom, Forall, Formula, Imp, Not, Or,
)

HierarchyLevel = Level


class UnregisteredAtom(KeyError):
    pass


def _close(s: int, p: int) -> tuple[int, int]:
    # Sigma_n and Pi_n both sit inside Sigma_{n+1} and Pi_{n+1}
    return min(s, p + 1), min(p, s + 1)


def level_pair(phi: Formula) -> tuple[int, int]:
    """(least Sigma index, least Pi index); (0, 0) means Delta0."""
    if isinstance(phi, Eq):
        return 0, 0
    if isinstance(phi, ExtAtom):
        spec = ATOMS.get(phi.symbol)
        if spec is None:
            raise UnregisteredAtom(phi.symbol)
        lvl = spec.level
        if lvl.kind is LevelKind.DELTA0:
            return 0, 0
        n = lvl.index
        return (n, n + 1) if lvl.kind is LevelKind.SIGMA else (n + 1, n)
    if isinstance(phi, Not):
        s, p = level_pair(phi.body)
        return p, s
    if isinstance(phi, (And, Or)):
        s1, p1 = level_pair(phi.left)
        s2, p2 = level_pair(phi.right)
        return _close(max(s1, s2), max(p1, p2))
    if isinstance(phi, Imp):
        s1, p1 = level_pair(phi.left)
        s2, p2 = level_pair(phi.right)
        if (s1, p1, s2, p2) == (0, 0, 0, 0):
            return 0, 0
        return _close(max(p1, s2, 1), max(s1, p2, 1))
    if isinstance(phi, (BForall, BExists)):
        return level_pair(phi.body)
    if isinstance(phi, Exists):
        s, _ = level_pair(phi.body)
        s = max(s, 1)
        return s, s + 1
    if isinstance(phi, Forall):
        _, p = level_pair(phi.body)
        p = max(p, 1)
        return p + 1, p
    raise TypeError(f"not a formula: {phi!r}")


def classify(phi: Formula) -> Level:
    """Least level of ``phi``.

    When a formula reaches Sigma_n and Pi_n at the same n (e.g. a
    conjunction of a Sigma_1 and a Pi_1 formula) Sigma_n is reported;
    ``is_in`` still answers both memberships exactly.
    """
    s, p = level_pair(phi)
    if s == 0 and p == 0:
        return DELTA0
    if p < s:
        return pi(p)
    return sigma(s)


def is_in(phi: Formula, level: Level) -> bool:
    s, p = level_pair(phi)
    if level.kind is LevelKind.DELTA0:
        return s == 0 and p == 0
    if level.kind is LevelKind.SIGMA:
        return s <= level.index
    return p <= level.index


def is_delta0(phi: Formula) -> bool:
    return level_pair(phi) == (0, 0)
