"""Quantifier-free formulas to existential disjunctions of flat equation systems.

Pipeline: ``eliminate_atoms`` turns every literal into positive equations
under fresh existentials, the matrix is expanded into disjunctive normal
form, and ``flatten_terms`` decomposes right-hand sides until each has
complexity at most 1 (0, s(v), v + w, v * w or a bare variable).
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Mapping

from .syntax import (
    Add, And, Eq, Exists, ExtAtom, FnApp, Formula, Imp, Not, Or, Succ, Term, Var,
    all_vars, eval_term, evaluate, free_vars, fresh_name, nnf, subterms, term_complexity, term_vars,
    Truth,
)

MAX_LITERALS = 12


class FlattenError(ValueError):
    pass


@dataclass(frozen=True)
class EquationSystem:
    equations: tuple[tuple[str, Term], ...]
    auxiliaries: tuple[str, ...] = ()

    def variables(self) -> frozenset[str]:
        out: set[str] = set()
        for lhs, rhs in self.equations:
            out.add(lhs)
            out |= term_vars(rhs)
        return frozenset(out)

    def max_complexity(self) -> int:
        return max((term_complexity(r) for _, r in self.equations), default=0)

    def as_formula(self) -> Formula:
        eqs = [Eq(Var(l), r) for l, r in self.equations]
        out = eqs[0]
        for e in eqs[1:]:
            out = And(out, e)
        return out

    def to_json(self) -> dict:
        from .syntax import to_text

        return {
            "equations": [[l, to_text(r)] for l, r in self.equations],
            "auxiliaries": list(self.auxiliaries),
        }


@dataclass(frozen=True)
class MTLNormalForm:
    existential_vars: tuple[str, ...]
    disjuncts: tuple[EquationSystem, ...]

    def to_json(self) -> dict:
        return {
            "existential_vars": list(self.existential_vars),
            "disjuncts": [d.to_json() for d in self.disjuncts],
        }

    def as_formula(self) -> Formula:
        body = self.disjuncts[0].as_formula()
        for d in self.disjuncts[1:]:
            body = Or(body, d.as_formula())
        for v in reversed(self.existential_vars):
            body = Exists(v, body)
        return body


class _Namer:
    def __init__(self, avoid: Iterable[str]):
        self.used = set(avoid)

    def fresh(self, base: str) -> str:
        name = base if base not in self.used else fresh_name(base, self.used)
        self.used.add(name)
        return name


def _check_core(phi: Formula) -> None:
    if isinstance(phi, Eq):
        for t in (phi.left, phi.right):
            for sub in subterms(t):
                if isinstance(sub, FnApp):
                    raise FlattenError(f"function symbol {sub.symbol} is outside the core signature")
        return
    if isinstance(phi, ExtAtom):
        raise FlattenError(f"atom {phi.symbol} is outside the core signature")
    if isinstance(phi, Not):
        _check_core(phi.body)
        return
    if isinstance(phi, (And, Or, Imp)):
        _check_core(phi.left)
        _check_core(phi.right)
        return
    raise FlattenError("quantifier encountered; input must be quantifier-free")


def count_literals(phi: Formula) -> int:
    if isinstance(phi, (Eq, ExtAtom)):
        return 1
    if isinstance(phi, Not):
        return count_literals(phi.body)
    if isinstance(phi, (And, Or, Imp)):
        return count_literals(phi.left) + count_literals(phi.right)
    return 1


def _eliminate(phi: Formula, namer: _Namer, hoisted: list[str]) -> Formula:
    if isinstance(phi, Eq):
        z = namer.fresh("z")
        hoisted.append(z)
        return And(Eq(Var(z), phi.left), Eq(Var(z), phi.right))
    if isinstance(phi, Not):
        t0, t1 = phi.body.left, phi.body.right
        z0, z1 = namer.fresh("z0"), namer.fresh("z1")
        hoisted += [z0, z1]
        return Or(Eq(Add(t0, Succ(Var(z0))), t1), Eq(Add(t1, Succ(Var(z1))), t0))
    return type(phi)(_eliminate(phi.left, namer, hoisted), _eliminate(phi.right, namer, hoisted))


def _split_eliminated(phi: Formula) -> tuple[list[str], Formula]:
    vars_: list[str] = []
    while isinstance(phi, Exists):
        vars_.append(phi.var)
        phi = phi.body
    return vars_, phi


def eliminate_atoms(phi: Formula) -> Formula:
    """Replace literals by positive equations under hoisted existentials.

    t0 = t1 becomes Ez (z = t0 & z = t1); the negation becomes
    Ez0 Ez1 (t0 + s(z0) = t1 | t1 + s(z1) = t0).
    """
    _check_core(phi)
    matrix = nnf(phi)
    namer = _Namer(all_vars(phi))
    hoisted: list[str] = []
    body = _eliminate(matrix, namer, hoisted)
    for v in reversed(hoisted):
        body = Exists(v, body)
    return body


def _dnf(phi: Formula) -> list[list[Eq]]:
    if isinstance(phi, Eq):
        return [[phi]]
    if isinstance(phi, Or):
        return _dnf(phi.left) + _dnf(phi.right)
    if isinstance(phi, And):
        return [a + b for a, b in product(_dnf(phi.left), _dnf(phi.right))]
    raise FlattenError(f"unexpected node in eliminated matrix: {type(phi).__name__}")


def _aux_base(i: int) -> str:
    return "wu"[i % 2] if i < 2 else f"w{i}"


def flatten_terms(system: Iterable[tuple[str, Term]], avoid: Iterable[str] = (),
                  max_steps: int | None = None, _namer: _Namer | None = None) -> EquationSystem:
    """Decompose right-hand sides to complexity <= 1 with fresh auxiliaries.

    Each step takes an equation z = f(..., t, ...) whose right side is too
    complex and rewrites it to z = f(..., w, ...) followed by w = t.  With
    ``max_steps`` the rewriting stops early, which is handy for tracing.
    """
    pending = list(system)
    used = set(avoid)
    for lhs, rhs in pending:
        used.add(lhs)
        used |= term_vars(rhs)
    namer = _namer or _Namer(used)
    if _namer is not None:
        namer.used |= used
    out: list[tuple[str, Term]] = []
    aux: list[str] = []
    steps = 0
    counter = [0]

    def new_aux() -> str:
        name = namer.fresh(_aux_base(counter[0]))
        counter[0] += 1
        aux.append(name)
        return name

    stack = list(reversed(pending))
    while stack:
        lhs, rhs = stack.pop()
        if term_complexity(rhs) <= 1 or (max_steps is not None and steps >= max_steps):
            out.append((lhs, rhs))
            continue
        if isinstance(rhs, FnApp):
            raise FlattenError(f"function symbol {rhs.symbol} is outside the core signature")
        steps += 1
        follow: list[tuple[str, Term]] = []
        if isinstance(rhs, Succ):
            w = new_aux()
            out.append((lhs, Succ(Var(w))))
            follow.append((w, rhs.peel()))
        else:
            parts = []
            for arg in (rhs.left, rhs.right):
                if isinstance(arg, Var):
                    parts.append(arg)
                else:
                    w = new_aux()
                    parts.append(Var(w))
                    follow.append((w, arg))
            out.append((lhs, type(rhs)(*parts)))
        stack.extend(reversed(follow))
    return EquationSystem(tuple(out), tuple(aux))


def mtl_normal_form(phi: Formula) -> MTLNormalForm:
    """Eliminate atoms, expand to DNF, then flatten each disjunct."""
    _check_core(phi)
    lits = count_literals(phi)
    if lits > MAX_LITERALS:
        raise FlattenError(f"{lits} literals exceeds the cap of {MAX_LITERALS}")
    eliminated = eliminate_atoms(phi)
    hoisted, matrix = _split_eliminated(eliminated)
    namer = _Namer(all_vars(eliminated))
    systems: list[EquationSystem] = []
    extra: list[str] = []
    for conj in _dnf(matrix):
        pairs: list[tuple[str, Term]] = []
        for eq in conj:
            if isinstance(eq.left, Var):
                pairs.append((eq.left.name, eq.right))
            elif isinstance(eq.right, Var):
                pairs.append((eq.right.name, eq.left))
            else:
                # an equation between compound terms is split through a fresh variable
                w = namer.fresh("z")
                extra.append(w)
                pairs += [(w, eq.left), (w, eq.right)]
        system = flatten_terms(pairs, _namer=namer)
        systems.append(system)
        extra += list(system.auxiliaries)
    seen: dict[str, None] = {}
    for v in hoisted + extra:
        seen.setdefault(v, None)
    return MTLNormalForm(tuple(seen), tuple(systems))


def check_invariants(nf: MTLNormalForm, inputs: Iterable[str] = ()) -> list[str]:
    """Structural problems with a normal form (empty list when fine)."""
    problems = []
    inputs = set(inputs)
    for i, system in enumerate(nf.disjuncts):
        for lhs, rhs in system.equations:
            if term_complexity(rhs) > 1:
                problems.append(f"disjunct {i}: {lhs} = {rhs} has complexity {term_complexity(rhs)}")
        lhs_names = [l for l, _ in system.equations]
        for a in system.auxiliaries:
            if lhs_names.count(a) != 1:
                problems.append(f"disjunct {i}: auxiliary {a} defined {lhs_names.count(a)} times")
            if a in inputs:
                problems.append(f"disjunct {i}: auxiliary {a} collides with an input variable")
    for v in nf.existential_vars:
        if v in inputs:
            problems.append(f"existential {v} collides with an input variable")
    return problems


# ------------------------------------------------------------------ oracle


def _solutions(system: EquationSystem, env: Mapping[str, int], free: list[str], bound: int) -> Iterator[dict]:
    """All extensions of env solving the system, branching only on undetermined variables."""
    assign = dict(env)

    def propagate(a: dict) -> dict | None:
        changed = True
        while changed:
            changed = False
            for lhs, rhs in system.equations:
                if term_vars(rhs) <= a.keys():
                    val = eval_term(rhs, a)
                    if lhs in a:
                        if a[lhs] != val:
                            return None
                    else:
                        a[lhs] = val
                        changed = True
        return a

    def search(a: dict) -> Iterator[dict]:
        a = propagate(dict(a))
        if a is None:
            return
        open_vars = [v for v in free if v not in a]
        if not open_vars:
            yield a
            return
        v = open_vars[0]
        for n in range(bound + 1):
            b = dict(a)
            b[v] = n
            yield from search(b)

    yield from search(assign)


def witness_bound(phi: Formula, env: Mapping[str, int], domain_bound: int) -> int:
    """Largest value any subterm of phi takes under env, plus domain_bound."""
    top = 0

    def walk(f: Formula) -> None:
        nonlocal top
        if isinstance(f, Eq):
            for t in (f.left, f.right):
                for sub in subterms(t):
                    top = max(top, eval_term(sub, env))
        elif isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, (And, Or, Imp)):
            walk(f.left)
            walk(f.right)

    walk(phi)
    return top + domain_bound


def nf_holds(nf: MTLNormalForm, env: Mapping[str, int], bound: int) -> bool:
    for system in nf.disjuncts:
        free = sorted(system.variables() - env.keys())
        for _ in _solutions(system, env, free, bound):
            return True
    return False


def equivalence_oracle(phi: Formula, nf: MTLNormalForm, domain_bound: int, slack: int = 0) -> bool:
    """Compare phi with the normal form on every assignment over {0..domain_bound}.

    Existential witnesses that are not forced by an equation are searched up
    to ``witness_bound`` (+ ``slack``); forced values are computed exactly.
    """
    names = sorted(free_vars(phi))
    for values in product(range(domain_bound + 1), repeat=len(names)):
        env = dict(zip(names, values))
        truth = evaluate(phi, env) is Truth.TRUE
        bound = witness_bound(phi, env, domain_bound) + slack
        if nf_holds(nf, env, bound) != truth:
            return False
    return True
