"""Executable fixed points.

Given a context psi(x), put theta(x) := psi(sub(x, x)) and phi := theta(<theta>),
where <theta> is the numeral of theta's code.  The certificate records both
sides of the numeric identity sub(<theta>, <theta>) = <phi>; the left side is
computed by decoding the number, the right side by encoding the formula.
"""
from __future__ import annotations

from dataclasses import dataclass

from .coding import DIAGONAL_VAR, Code, gn, sub_eval, to_int
from .syntax import ExtAtom, FnApp, Formula, Not, Var, free_vars, numeral, substitute


class ContextError(ValueError):
    pass


@dataclass(frozen=True)
class FixedPointCertificate:
    theta: Formula
    phi: Formula
    lhs: Code
    rhs: Code

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


def diagonal_term(var: str = DIAGONAL_VAR) -> FnApp:
    return FnApp("sub", (Var(var), Var(var)))


def fixed_point(psi: Formula, var: str = DIAGONAL_VAR) -> tuple[Formula, FixedPointCertificate]:
    """Return (phi, certificate) with phi the diagonal sentence of ``psi``.

    ``psi`` may mention no free variable other than ``var``.  A context in
    which ``var`` does not occur is allowed and yields a constant fixed point.
    """
    extra = free_vars(psi) - {var}
    if extra:
        raise ContextError(f"context has free variables besides {var}: {sorted(extra)}")
    theta = substitute(psi, var, diagonal_term(var))
    code = to_int(gn(theta))
    phi = substitute(theta, var, numeral(code))
    cert = FixedPointCertificate(theta, phi, sub_eval(code, code, var), gn(phi))
    return phi, cert


def goedel_context(predicate: str = "Phi") -> Formula:
    """not Phi(x): its fixed point says of itself that it is unprovable."""
    return Not(ExtAtom(predicate, (Var(DIAGONAL_VAR),)))


def jeroslow_context(predicate: str = "Phi") -> Formula:
    """Phi(neg(x)): its fixed point says its own negation is provable."""
    return ExtAtom(predicate, (FnApp("neg", (Var(DIAGONAL_VAR),)),))
