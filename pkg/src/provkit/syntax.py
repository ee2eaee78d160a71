"""Terms and formulas of first-order arithmetic.

The core signature is {0, s, +, *}.  Extra predicate symbols (``ExtAtom``)
and function symbols (``FnApp``) come from a registry that records how each
one sits in the arithmetical hierarchy and, optionally, how to compute it.

Successor chains are stored compactly: ``Succ(t, times=k)`` is s applied k
times to t, and nested ``Succ`` nodes are merged on construction, so
``Succ(Succ(Zero()))`` and ``Succ(Zero(), 2)`` are the same value.  This
keeps numerals for very large numbers (Goedel numbers of formulas) usable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, Mapping, Union

from .levels import DELTA0, Level, sigma

# --------------------------------------------------------------------- terms


@dataclass(frozen=True)
class Zero:
    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Succ:
    arg: "Term"
    times: int = 1

    def __post_init__(self) -> None:
        if self.times < 1:
            raise ValueError("Succ needs times >= 1")
        if isinstance(self.arg, Succ):
            object.__setattr__(self, "times", self.times + self.arg.times)
            object.__setattr__(self, "arg", self.arg.arg)

    def peel(self) -> "Term":
        """The term under the outermost s."""
        return self.arg if self.times == 1 else Succ(self.arg, self.times - 1)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Add:
    left: "Term"
    right: "Term"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Mul:
    left: "Term"
    right: "Term"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class FnApp:
    symbol: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        return to_text(self)


Term = Union[Zero, Succ, Add, Mul, Var, FnApp]

# ------------------------------------------------------------------ formulas


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class ExtAtom:
    symbol: str
    args: tuple[Term, ...] = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Not:
    body: "Formula"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class BForall:
    var: str
    bound: Term
    body: "Formula"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class BExists:
    var: str
    bound: Term
    body: "Formula"

    def __str__(self) -> str:
        return to_text(self)


Formula = Union[Eq, ExtAtom, Not, And, Or, Imp, Forall, Exists, BForall, BExists]
Node = Union[Term, Formula]

TERM_TYPES = (Zero, Succ, Add, Mul, Var, FnApp)
FORMULA_TYPES = (Eq, ExtAtom, Not, And, Or, Imp, Forall, Exists, BForall, BExists)
BINARY_CONNECTIVES = (And, Or, Imp)
QUANTIFIERS = (Forall, Exists)
BOUNDED = (BForall, BExists)


def numeral(n: int) -> Term:
    """s applied n times to 0."""
    if n < 0:
        raise ValueError("numerals are for naturals")
    return Zero() if n == 0 else Succ(Zero(), n)


def numeral_value(t: Term) -> int | None:
    """n if t is literally the numeral for n, else None."""
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Succ) and isinstance(t.arg, Zero):
        return t.times
    return None


def neq(a: Term, b: Term) -> Formula:
    return Not(Eq(a, b))


def iff(a: Formula, b: Formula) -> Formula:
    # the biconditional is only an abbreviation
    return And(Imp(a, b), Imp(b, a))


def conj(parts: list[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: list[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


# ------------------------------------------------------------------ registry


@dataclass(frozen=True)
class AtomSpec:
    """A registered predicate symbol.

    ``level`` is where the atom sits in the hierarchy; Delta1 atoms are
    recorded with level Delta0 and ``delta1=True``, since the classifier
    treats them as bounded.
    """

    name: str
    arity: int
    level: Level
    delta1: bool = False
    interpret: Callable[..., bool] | None = field(default=None, compare=False)
    doc: str = ""


@dataclass(frozen=True)
class FunctionSpec:
    name: str
    arity: int
    interpret: Callable[..., int] | None = field(default=None, compare=False)
    doc: str = ""


ATOMS: dict[str, AtomSpec] = {}
FUNCTIONS: dict[str, FunctionSpec] = {}


def register_atom(spec: AtomSpec) -> AtomSpec:
    ATOMS[spec.name] = spec
    return spec


def register_function(spec: FunctionSpec) -> FunctionSpec:
    FUNCTIONS[spec.name] = spec
    return spec


def _le(a: int, b: int) -> bool:
    return a <= b


for _spec in (
    AtomSpec("Prf_T", 2, DELTA0, True, doc="y codes a T-proof of x (uninterpreted)"),
    AtomSpec("Prf_a0", 2, DELTA0, True, doc="proof predicate of the first numeration"),
    AtomSpec("Prf_a1", 2, DELTA0, True, doc="proof predicate of the second numeration"),
    AtomSpec("PrfL", 2, DELTA0, True, doc="proof predicate of pure logic"),
    AtomSpec("Fml", 1, DELTA0, True, doc="x codes a formula"),
    AtomSpec("Sent", 1, DELTA0, True, doc="x codes a sentence"),
    AtomSpec("Sigma_z", 2, DELTA0, True, doc="x codes a Sigma_z formula"),
    AtomSpec("Even", 1, DELTA0, True, doc="x codes a formula with an even number of logical symbols"),
    AtomSpec("le", 2, DELTA0, True, _le, doc="less than or equal"),
    AtomSpec("Phi", 1, sigma(1), doc="an abstract provability predicate"),
    AtomSpec("PrL", 1, sigma(1), doc="provability in pure logic"),
    AtomSpec("xi", 0, DELTA0, doc="a sentence parameter"),
):
    register_atom(_spec)

for _fspec in (
    FunctionSpec("n", 1, doc="number of negation symbols in the coded formula"),
    FunctionSpec("sub", 2, doc="diagonal substitution on codes"),
    FunctionSpec("neg", 1, doc="code of the negation of the coded formula"),
    FunctionSpec("imp", 2, doc="code of the implication between two coded formulas"),
):
    register_function(_fspec)


def set_interpretation(name: str, interpret: Callable) -> None:
    """Attach executable meaning to an already registered symbol."""
    if name in ATOMS:
        old = ATOMS[name]
        ATOMS[name] = AtomSpec(old.name, old.arity, old.level, old.delta1, interpret, old.doc)
    elif name in FUNCTIONS:
        old_f = FUNCTIONS[name]
        FUNCTIONS[name] = FunctionSpec(old_f.name, old_f.arity, interpret, old_f.doc)
    else:
        raise KeyError(name)


# ------------------------------------------------------------- traversal


def term_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, Zero):
        return frozenset()
    if isinstance(t, Succ):
        return term_vars(t.arg)
    if isinstance(t, (Add, Mul)):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, FnApp):
        out: frozenset[str] = frozenset()
        for a in t.args:
            out |= term_vars(a)
        return out
    raise TypeError(f"not a term: {t!r}")


def free_vars(phi: Node) -> frozenset[str]:
    if isinstance(phi, TERM_TYPES):
        return term_vars(phi)
    if isinstance(phi, Eq):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, ExtAtom):
        out: frozenset[str] = frozenset()
        for a in phi.args:
            out |= term_vars(a)
        return out
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, BINARY_CONNECTIVES):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, QUANTIFIERS):
        return free_vars(phi.body) - {phi.var}
    if isinstance(phi, BOUNDED):
        return term_vars(phi.bound) | (free_vars(phi.body) - {phi.var})
    raise TypeError(f"not a formula: {phi!r}")


def all_vars(phi: Node) -> frozenset[str]:
    """Every variable name occurring anywhere, bound or free."""
    if isinstance(phi, TERM_TYPES) or isinstance(phi, (Eq, ExtAtom)):
        return free_vars(phi)
    if isinstance(phi, Not):
        return all_vars(phi.body)
    if isinstance(phi, BINARY_CONNECTIVES):
        return all_vars(phi.left) | all_vars(phi.right)
    if isinstance(phi, QUANTIFIERS):
        return all_vars(phi.body) | {phi.var}
    if isinstance(phi, BOUNDED):
        return term_vars(phi.bound) | all_vars(phi.body) | {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def fresh_name(base: str, avoid: frozenset[str] | set[str]) -> str:
    """First of base', base'', ... not in ``avoid``."""
    stem = base.rstrip("'")
    k = 1
    while True:
        cand = stem + "'" * k
        if cand not in avoid:
            return cand
        k += 1


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Succ):
        yield from subterms(t.arg)
    elif isinstance(t, (Add, Mul)):
        yield from subterms(t.left)
        yield from subterms(t.right)
    elif isinstance(t, FnApp):
        for a in t.args:
            yield from subterms(a)


# ----------------------------------------------------------- substitution


def substitute_term(t: Term, v: str, s: Term) -> Term:
    if isinstance(t, Var):
        return s if t.name == v else t
    if isinstance(t, Zero):
        return t
    if isinstance(t, Succ):
        return Succ(substitute_term(t.arg, v, s), t.times)
    if isinstance(t, Add):
        return Add(substitute_term(t.left, v, s), substitute_term(t.right, v, s))
    if isinstance(t, Mul):
        return Mul(substitute_term(t.left, v, s), substitute_term(t.right, v, s))
    if isinstance(t, FnApp):
        return FnApp(t.symbol, tuple(substitute_term(a, v, s) for a in t.args))
    raise TypeError(f"not a term: {t!r}")


def substitute(phi: Formula, v: str, t: Term) -> Formula:
    """Replace free occurrences of ``v`` by ``t``, renaming binders that would capture."""
    if isinstance(phi, Eq):
        return Eq(substitute_term(phi.left, v, t), substitute_term(phi.right, v, t))
    if isinstance(phi, ExtAtom):
        return ExtAtom(phi.symbol, tuple(substitute_term(a, v, t) for a in phi.args))
    if isinstance(phi, Not):
        return Not(substitute(phi.body, v, t))
    if isinstance(phi, BINARY_CONNECTIVES):
        return type(phi)(substitute(phi.left, v, t), substitute(phi.right, v, t))
    if isinstance(phi, (Forall, Exists, BForall, BExists)):
        bounded = isinstance(phi, BOUNDED)
        bound = substitute_term(phi.bound, v, t) if bounded else None
        var, body = phi.var, phi.body
        if var != v and v in free_vars(body):
            if var in term_vars(t):
                new = fresh_name(var, all_vars(body) | term_vars(t) | {v})
                body = substitute(body, var, Var(new))
                var = new
            body = substitute(body, v, t)
        if bounded:
            return type(phi)(var, bound, body)
        return type(phi)(var, body)
    raise TypeError(f"not a formula: {phi!r}")


def substitute_all(phi: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Simultaneous substitution for closed replacement terms."""
    for v, t in mapping.items():
        if term_vars(t):
            raise ValueError("substitute_all expects closed terms")
        phi = substitute(phi, v, t)
    return phi


# ------------------------------------------------------------------- nnf


def nnf(phi: Formula) -> Formula:
    """Negation normal form; atoms (equations and ExtAtoms) are the literals."""
    if isinstance(phi, (Eq, ExtAtom)):
        return phi
    if isinstance(phi, And):
        return And(nnf(phi.left), nnf(phi.right))
    if isinstance(phi, Or):
        return Or(nnf(phi.left), nnf(phi.right))
    if isinstance(phi, Imp):
        return Or(nnf(Not(phi.left)), nnf(phi.right))
    if isinstance(phi, QUANTIFIERS):
        return type(phi)(phi.var, nnf(phi.body))
    if isinstance(phi, BOUNDED):
        return type(phi)(phi.var, phi.bound, nnf(phi.body))
    if isinstance(phi, Not):
        b = phi.body
        if isinstance(b, (Eq, ExtAtom)):
            return phi
        if isinstance(b, Not):
            return nnf(b.body)
        if isinstance(b, And):
            return Or(nnf(Not(b.left)), nnf(Not(b.right)))
        if isinstance(b, Or):
            return And(nnf(Not(b.left)), nnf(Not(b.right)))
        if isinstance(b, Imp):
            return And(nnf(b.left), nnf(Not(b.right)))
        if isinstance(b, Forall):
            return Exists(b.var, nnf(Not(b.body)))
        if isinstance(b, Exists):
            return Forall(b.var, nnf(Not(b.body)))
        if isinstance(b, BForall):
            return BExists(b.var, b.bound, nnf(Not(b.body)))
        if isinstance(b, BExists):
            return BForall(b.var, b.bound, nnf(Not(b.body)))
    raise TypeError(f"not a formula: {phi!r}")


# -------------------------------------------------------------- measures


def count_logical_symbols(phi: Formula) -> int:
    """Connectives and quantifiers, bounded ones included."""
    if isinstance(phi, (Eq, ExtAtom)):
        return 0
    if isinstance(phi, Not):
        return 1 + count_logical_symbols(phi.body)
    if isinstance(phi, BINARY_CONNECTIVES):
        return 1 + count_logical_symbols(phi.left) + count_logical_symbols(phi.right)
    if isinstance(phi, (Forall, Exists, BForall, BExists)):
        return 1 + count_logical_symbols(phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def count_negations(phi: Formula) -> int:
    if isinstance(phi, (Eq, ExtAtom)):
        return 0
    if isinstance(phi, Not):
        return 1 + count_negations(phi.body)
    if isinstance(phi, BINARY_CONNECTIVES):
        return count_negations(phi.left) + count_negations(phi.right)
    return count_negations(phi.body)


def term_complexity(t: Term) -> int:
    """Number of occurrences of 0, s, + and * (registered function symbols count too)."""
    if isinstance(t, Var):
        return 0
    if isinstance(t, Zero):
        return 1
    if isinstance(t, Succ):
        return t.times + term_complexity(t.arg)
    if isinstance(t, (Add, Mul)):
        return 1 + term_complexity(t.left) + term_complexity(t.right)
    if isinstance(t, FnApp):
        return 1 + sum(term_complexity(a) for a in t.args)
    raise TypeError(f"not a term: {t!r}")


def term_depth(t: Term) -> int:
    if isinstance(t, (Var, Zero)):
        return 0
    if isinstance(t, Succ):
        return t.times + term_depth(t.arg)
    if isinstance(t, (Add, Mul)):
        return 1 + max(term_depth(t.left), term_depth(t.right))
    return 1 + max((term_depth(a) for a in t.args), default=0)


def is_quantifier_free(phi: Formula) -> bool:
    if isinstance(phi, (Eq, ExtAtom)):
        return True
    if isinstance(phi, Not):
        return is_quantifier_free(phi.body)
    if isinstance(phi, BINARY_CONNECTIVES):
        return is_quantifier_free(phi.left) and is_quantifier_free(phi.right)
    return False


# ------------------------------------------------------------- evaluation


class Truth(Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, b: bool) -> Truth:
        return cls.TRUE if b else cls.FALSE

    def negate(self) -> Truth:
        if self is Truth.TRUE:
            return Truth.FALSE
        if self is Truth.FALSE:
            return Truth.TRUE
        return self


class EvaluationError(Exception):
    pass


def eval_term(t: Term, env: Mapping[str, int]) -> int:
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise EvaluationError(f"variable {t.name} is unassigned") from None
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Succ):
        return eval_term(t.arg, env) + t.times
    if isinstance(t, Add):
        return eval_term(t.left, env) + eval_term(t.right, env)
    if isinstance(t, Mul):
        return eval_term(t.left, env) * eval_term(t.right, env)
    if isinstance(t, FnApp):
        spec = FUNCTIONS.get(t.symbol)
        if spec is None or spec.interpret is None:
            raise EvaluationError(f"function symbol {t.symbol} has no interpretation")
        return spec.interpret(*(eval_term(a, env) for a in t.args))
    raise TypeError(f"not a term: {t!r}")


def _and(a: Truth, b: Truth) -> Truth:
    if a is Truth.FALSE or b is Truth.FALSE:
        return Truth.FALSE
    if a is Truth.TRUE and b is Truth.TRUE:
        return Truth.TRUE
    return Truth.UNKNOWN


def _or(a: Truth, b: Truth) -> Truth:
    return _and(a.negate(), b.negate()).negate()


def evaluate(phi: Formula, env: Mapping[str, int] | None = None, witness_bound: int = 0) -> Truth:
    """Truth in the standard model.

    Bounded quantifiers are decided exactly.  An unbounded existential is
    searched over 0..witness_bound; finding no witness gives UNKNOWN, never
    FALSE, and universals behave dually.
    """
    env = dict(env or {})
    return _eval(phi, env, witness_bound)


def _eval(phi: Formula, env: dict[str, int], k: int) -> Truth:
    if isinstance(phi, Eq):
        return Truth.of(eval_term(phi.left, env) == eval_term(phi.right, env))
    if isinstance(phi, ExtAtom):
        spec = ATOMS.get(phi.symbol)
        if spec is None or spec.interpret is None:
            raise EvaluationError(f"atom {phi.symbol} has no interpretation")
        return Truth.of(bool(spec.interpret(*(eval_term(a, env) for a in phi.args))))
    if isinstance(phi, Not):
        return _eval(phi.body, env, k).negate()
    if isinstance(phi, And):
        left = _eval(phi.left, env, k)
        if left is Truth.FALSE:
            return left
        return _and(left, _eval(phi.right, env, k))
    if isinstance(phi, Or):
        left = _eval(phi.left, env, k)
        if left is Truth.TRUE:
            return left
        return _or(left, _eval(phi.right, env, k))
    if isinstance(phi, Imp):
        left = _eval(phi.left, env, k)
        if left is Truth.FALSE:
            return Truth.TRUE
        return _or(left.negate(), _eval(phi.right, env, k))
    if isinstance(phi, (Exists, BExists, Forall, BForall)):
        existential = isinstance(phi, (Exists, BExists))
        bounded = isinstance(phi, BOUNDED)
        top = eval_term(phi.bound, env) if bounded else k
        seen_unknown = False
        inner = dict(env)
        for n in range(top + 1):
            inner[phi.var] = n
            val = _eval(phi.body, inner, k)
            if existential and val is Truth.TRUE:
                return Truth.TRUE
            if not existential and val is Truth.FALSE:
                return Truth.FALSE
            seen_unknown |= val is Truth.UNKNOWN
        if seen_unknown or not bounded:
            return Truth.UNKNOWN
        return Truth.FALSE if existential else Truth.TRUE
    raise TypeError(f"not a formula: {phi!r}")


# ------------------------------------------------------------------ printing

_SUCC_LIMIT = 16


def _count_text(n: int) -> str:
    # hex sidesteps the interpreter's cap on decimal conversion of huge ints
    return str(n) if n.bit_length() < 200 else hex(n)


def _term_text(t: Term, prec: int) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Succ):
        inner = _term_text(t.arg, 0)
        if t.times > _SUCC_LIMIT:
            return f"s^{_count_text(t.times)}({inner})"
        return "s(" * t.times + inner + ")" * t.times
    if isinstance(t, FnApp):
        return f"Fn[{t.symbol}](" + ", ".join(_term_text(a, 0) for a in t.args) + ")"
    op, mine = (" + ", 1) if isinstance(t, Add) else (" * ", 2)
    text = _term_text(t.left, mine) + op + _term_text(t.right, mine + 1)
    return f"({text})" if mine < prec else text


def _formula_text(phi: Formula, prec: int) -> str:
    if isinstance(phi, Eq):
        return f"{_term_text(phi.left, 0)} = {_term_text(phi.right, 0)}"
    if isinstance(phi, ExtAtom):
        return f"Atom[{phi.symbol}](" + ", ".join(_term_text(a, 0) for a in phi.args) + ")"
    if isinstance(phi, Not):
        body = phi.body
        if isinstance(body, Eq):
            return f"~({_formula_text(body, 0)})"
        return "~" + _formula_text(body, 4)
    if isinstance(phi, QUANTIFIERS):
        q = "!A" if isinstance(phi, Forall) else "!E"
        return f"{q} {phi.var} {_formula_text(phi.body, 4)}"
    if isinstance(phi, BOUNDED):
        q = "!A" if isinstance(phi, BForall) else "!E"
        return f"{q} {phi.var} <= {_term_text(phi.bound, 0)} . {_formula_text(phi.body, 4)}"
    if isinstance(phi, Imp):
        text = _formula_text(phi.left, 2) + " -> " + _formula_text(phi.right, 1)
        return f"({text})" if prec > 1 else text
    op, mine = (" | ", 2) if isinstance(phi, Or) else (" & ", 3)
    text = _formula_text(phi.left, mine) + op + _formula_text(phi.right, mine + 1)
    return f"({text})" if prec > mine else text


def to_text(node: Node) -> str:
    """ASCII rendering that ``parse`` reads back to the same tree."""
    if isinstance(node, TERM_TYPES):
        return _term_text(node, 0)
    return _formula_text(node, 0)


_UNICODE = {"¬": "~", "∧": "&", "∨": "|", "→": "->", "↔": "<->", "∀": "!A", "∃": "!E",
            "×": "*", "·": "*", "≤": "<=", "≠": "!="}


def to_unicode(node: Node) -> str:
    text = to_text(node)
    for uni, asc in sorted(_UNICODE.items(), key=lambda kv: -len(kv[1])):
        if uni in ("·", "↔"):
            continue
        text = text.replace(asc, uni)
    return text


# ------------------------------------------------------------------ parsing


class ParseError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


_PUNCT = ["<->", "->", "!A", "!E", "!=", "<=", "~", "&", "|", "(", ")", ",", ".", "=", "+", "*", "[", "]", "^"]


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, line, col = 0, 1, 1
    while i < len(text):
        c = text[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c.isspace():
            i, col = i + 1, col + 1
            continue
        if c in _UNICODE:
            toks.append(_Tok(_UNICODE[c], c, line, col))
            i, col = i + 1, col + 1
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                toks.append(_Tok(p, p, line, col))
                i, col = i + len(p), col + len(p)
                break
        else:
            if c.isdigit():
                j = i
                if text.startswith(("0x", "0X"), i):
                    j = i + 2
                    while j < len(text) and text[j] in "0123456789abcdefABCDEF":
                        j += 1
                while j < len(text) and text[j].isdigit():
                    j += 1
                toks.append(_Tok("num", text[i:j], line, col))
            elif c.isalpha() or c == "_":
                j = i
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                while j < len(text) and text[j] == "'":
                    j += 1
                toks.append(_Tok("ident", text[i:j], line, col))
            else:
                raise ParseError(f"unexpected character {c!r}", line, col)
            col += j - i
            i = j
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self, offset: int = 0) -> _Tok:
        return self.toks[min(self.pos + offset, len(self.toks) - 1)]

    def take(self, kind: str | None = None) -> _Tok:
        tok = self.peek()
        if kind is not None and tok.kind != kind:
            want = "identifier" if kind == "ident" else repr(kind)
            got = tok.text or "end of input"
            raise ParseError(f"expected {want}, found {got!r}", tok.line, tok.col)
        self.pos += 1
        return tok

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col)

    # formulas
    def formula(self) -> Formula:
        left = self.implication()
        if self.peek().kind == "<->":
            self.take()
            return iff(left, self.implication())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek().kind == "->":
            self.take()
            return Imp(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        out = self.conjunction()
        while self.peek().kind == "|":
            self.take()
            out = Or(out, self.conjunction())
        return out

    def conjunction(self) -> Formula:
        out = self.unary()
        while self.peek().kind == "&":
            self.take()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "~":
            self.take()
            return Not(self.unary())
        if tok.kind in ("!A", "!E"):
            self.take()
            var = self.take("ident").text
            if self.peek().kind == "<=":
                self.take()
                bound = self.term()
                self.take(".")
                body = self.unary()
                return BForall(var, bound, body) if tok.kind == "!A" else BExists(var, bound, body)
            body = self.unary()
            return Forall(var, body) if tok.kind == "!A" else Exists(var, body)
        return self.atomic()

    def atomic(self) -> Formula:
        tok = self.peek()
        if tok.kind == "(":
            save = self.pos
            try:
                self.take()
                inner = self.formula()
                self.take(")")
                return inner
            except ParseError:
                self.pos = save
        if tok.kind == "ident" and tok.text == "Atom" and self.peek(1).kind == "[":
            self.take()
            self.take("[")
            name_tok = self.take("ident")
            self.take("]")
            spec = ATOMS.get(name_tok.text)
            if spec is None:
                raise ParseError(f"unknown atom symbol {name_tok.text!r}", name_tok.line, name_tok.col)
            args = self.arguments()
            if len(args) != spec.arity:
                raise ParseError(f"atom {spec.name} takes {spec.arity} arguments", name_tok.line, name_tok.col)
            return ExtAtom(spec.name, args)
        left = self.term()
        op = self.peek()
        if op.kind == "=":
            self.take()
            return Eq(left, self.term())
        if op.kind == "!=":
            self.take()
            return Not(Eq(left, self.term()))
        if op.kind == "<=":
            self.take()
            return ExtAtom("le", (left, self.term()))
        raise self.error(f"expected '=' after term, found {op.text or 'end of input'!r}")

    def arguments(self) -> tuple[Term, ...]:
        self.take("(")
        args: list[Term] = []
        if self.peek().kind != ")":
            args.append(self.term())
            while self.peek().kind == ",":
                self.take()
                args.append(self.term())
        self.take(")")
        return tuple(args)

    # terms
    def term(self) -> Term:
        out = self.product()
        while self.peek().kind == "+":
            self.take()
            out = Add(out, self.product())
        return out

    def product(self) -> Term:
        out = self.primary()
        while self.peek().kind == "*":
            self.take()
            out = Mul(out, self.primary())
        return out

    def primary(self) -> Term:
        tok = self.peek()
        if tok.kind == "num":
            self.take()
            return numeral(int(tok.text, 0))
        if tok.kind == "(":
            self.take()
            inner = self.term()
            self.take(")")
            return inner
        if tok.kind == "ident":
            if tok.text == "s" and self.peek(1).kind in ("(", "^"):
                self.take()
                times = 1
                if self.peek().kind == "^":
                    self.take()
                    times = int(self.take("num").text, 0)
                    if times < 1:
                        raise ParseError("s^k needs k >= 1", tok.line, tok.col)
                self.take("(")
                inner = self.term()
                self.take(")")
                return Succ(inner, times)
            if tok.text == "Fn" and self.peek(1).kind == "[":
                self.take()
                self.take("[")
                name_tok = self.take("ident")
                self.take("]")
                spec = FUNCTIONS.get(name_tok.text)
                if spec is None:
                    raise ParseError(f"unknown function symbol {name_tok.text!r}", name_tok.line, name_tok.col)
                args = self.arguments()
                if len(args) != spec.arity:
                    raise ParseError(f"function {spec.name} takes {spec.arity} arguments", name_tok.line, name_tok.col)
                return FnApp(spec.name, args)
            self.take()
            return Var(tok.text)
        raise self.error(f"expected a term, found {tok.text or 'end of input'!r}")


def parse(text: str) -> Formula:
    """Read a formula in the ASCII grammar (Unicode connectives also accepted)."""
    p = _Parser(text)
    phi = p.formula()
    if p.peek().kind != "eof":
        raise p.error(f"unexpected {p.peek().text!r}")
    return phi


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    if p.peek().kind != "eof":
        raise p.error(f"unexpected {p.peek().text!r}")
    return t


# --------------------------------------------------------------------- json


def to_json(node: Node) -> dict:
    """One object per node, tagged with ``kind``."""
    kind = type(node).__name__
    if isinstance(node, Var):
        return {"kind": kind, "name": node.name}
    if isinstance(node, Zero):
        return {"kind": kind}
    if isinstance(node, Succ):
        out = {"kind": kind, "arg": to_json(node.arg)}
        if node.times != 1:
            out["times"] = node.times
        return out
    if isinstance(node, (Add, Mul, Eq, And, Or, Imp)):
        return {"kind": kind, "left": to_json(node.left), "right": to_json(node.right)}
    if isinstance(node, (FnApp, ExtAtom)):
        return {"kind": kind, "symbol": node.symbol, "args": [to_json(a) for a in node.args]}
    if isinstance(node, Not):
        return {"kind": kind, "body": to_json(node.body)}
    if isinstance(node, QUANTIFIERS):
        return {"kind": kind, "var": node.var, "body": to_json(node.body)}
    if isinstance(node, BOUNDED):
        return {"kind": kind, "var": node.var, "bound": to_json(node.bound), "body": to_json(node.body)}
    raise TypeError(f"not a syntax node: {node!r}")


_KINDS = {cls.__name__: cls for cls in TERM_TYPES + FORMULA_TYPES}


def from_json(data: dict) -> Node:
    kind = data["kind"]
    cls = _KINDS.get(kind)
    if cls is None:
        raise ValueError(f"unknown node kind {kind!r}")
    if cls is Var:
        return Var(data["name"])
    if cls is Zero:
        return Zero()
    if cls is Succ:
        return Succ(from_json(data["arg"]), data.get("times", 1))
    if cls in (Add, Mul, Eq, And, Or, Imp):
        return cls(from_json(data["left"]), from_json(data["right"]))
    if cls in (FnApp, ExtAtom):
        return cls(data["symbol"], tuple(from_json(a) for a in data["args"]))
    if cls is Not:
        return Not(from_json(data["body"]))
    if cls in (Forall, Exists):
        return cls(data["var"], from_json(data["body"]))
    return cls(data["var"], from_json(data["bound"]), from_json(data["body"]))
