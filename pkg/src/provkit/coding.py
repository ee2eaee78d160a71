"""Goedel numbering by tag-and-pair over Cantor's pairing function.

Codes of ordinary size are plain ``int``.  Once a code would exceed
``INLINE_BITS`` bits it is kept in a canonical symbolic form instead:
``Tower(count, base)`` is the map b -> <0, b> applied ``count`` times to
``base`` (this is how numerals grow), and ``BigPair(left, right)`` is
<left, right> with ``left != 0``.  Every natural has exactly one
representation, so ``==`` on codes is equality of numbers.  ``to_int``
expands a symbolic code when that is affordable.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from math import isqrt
from typing import Mapping, Union

from . import syntax as sx
from .levels import sigma
from .syntax import (
    Add, And, BExists, BForall, Eq, Exists, ExtAtom, FnApp, Forall, Formula, Imp,
    Mul, Node, Not, Or, Succ, Term, Var, Zero,
)

INLINE_BITS = 4096


@dataclass(frozen=True)
class Tower:
    count: int
    base: "Code"

    def __str__(self) -> str:
        return f"<0,·>^{int_str(self.count)}({code_str(self.base)})"


@dataclass(frozen=True)
class BigPair:
    left: "Code"
    right: "Code"

    def __str__(self) -> str:
        return f"<{code_str(self.left)}, {code_str(self.right)}>"


Code = Union[int, Tower, BigPair]
GoedelNumber = Code


def _cantor(a: int, b: int) -> int:
    s = a + b
    return s * (s + 1) // 2 + b


def pair(a: Code, b: Code) -> Code:
    """Cantor pairing <a, b> = (a+b)(a+b+1)/2 + b."""
    if isinstance(a, int) and isinstance(b, int):
        if a < 0 or b < 0:
            raise ValueError("pairing is defined on naturals")
        v = _cantor(a, b)
        if v.bit_length() <= INLINE_BITS:
            return v
    if a == 0:
        if isinstance(b, Tower):
            return Tower(b.count + 1, b.base)
        return Tower(1, b)
    return BigPair(a, b)


def unpair(c: Code) -> tuple[Code, Code]:
    if isinstance(c, int):
        if c < 0:
            raise ValueError("codes are naturals")
        w = (isqrt(8 * c + 1) - 1) // 2
        b = c - w * (w + 1) // 2
        return w - b, b
    if isinstance(c, Tower):
        return 0, (c.base if c.count == 1 else Tower(c.count - 1, c.base))
    return c.left, c.right


def lift(c: Code, times: int) -> Code:
    """Apply b -> <0, b> ``times`` times without walking a huge tower step by step."""
    while times > 0 and isinstance(c, int):
        c = pair(0, c)
        times -= 1
    if times == 0:
        return c
    if isinstance(c, Tower):
        return Tower(c.count + times, c.base)
    return Tower(times, c)


def to_int(c: Code, max_bits: int = 1 << 24) -> int:
    """Expand a code to a plain integer (refuses beyond ``max_bits``)."""
    if isinstance(c, int):
        return c
    if isinstance(c, Tower):
        v = to_int(c.base, max_bits)
        for _ in range(c.count):
            v = _cantor(0, v)
            if v.bit_length() > max_bits:
                raise OverflowError("code too large to expand")
        return v
    v = _cantor(to_int(c.left, max_bits), to_int(c.right, max_bits))
    if v.bit_length() > max_bits:
        raise OverflowError("code too large to expand")
    return v


DECIMAL_DIGITS_MAX = 4000


def int_str(n: int) -> str:
    """Decimal, or hex once the decimal form would be unwieldy (and trip int->str limits)."""
    if n.bit_length() * 0.30103 < DECIMAL_DIGITS_MAX:
        return str(n)
    return hex(n)


def code_str(c: Code) -> str:
    return int_str(c) if isinstance(c, int) else c.__str__()


def code_to_json(c: Code):
    if isinstance(c, int):
        return int_str(c)
    if isinstance(c, Tower):
        return {"tower": int_str(c.count), "base": code_to_json(c.base)}
    return {"pair": [code_to_json(c.left), code_to_json(c.right)]}


# ------------------------------------------------------------- the scheme

# Succ must be tag 0 so that gn(s(t)) = <0, gn(t)> holds literally.
TAGS: dict[str, int] = {
    "Succ": 0, "Zero": 1, "Var": 2, "Add": 3, "Mul": 4, "FnApp": 5,
    "Eq": 6, "ExtAtom": 7, "Not": 8, "And": 9, "Or": 10, "Imp": 11,
    "Forall": 12, "Exists": 13, "BForall": 14, "BExists": 15,
}
_BY_TAG = {v: k for k, v in TAGS.items()}
SCHEME_VERSION = "tag-pair/cantor/1"


@dataclass(frozen=True)
class CodingScheme:
    tags: Mapping[str, int]
    pairing: str
    version: str

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "pairing": self.pairing,
            "tags": dict(sorted(self.tags.items(), key=lambda kv: kv[1])),
            "names": "int.from_bytes(utf8(name), 'big')",
            "sequences": "<length, <a1, <a2, ... <ak, 0>>>>",
        }


SCHEME = CodingScheme(TAGS, "cantor: (a+b)(a+b+1)/2 + b", SCHEME_VERSION)


def name_code(name: str) -> int:
    if not name or "\x00" in name:
        raise ValueError("bad identifier")
    return int.from_bytes(name.encode("utf-8"), "big")


def name_decode(c: Code) -> str:
    if not isinstance(c, int) or c <= 0:
        raise DecodeError("identifier code out of range")
    try:
        return c.to_bytes((c.bit_length() + 7) // 8, "big").decode("utf-8")
    except UnicodeDecodeError:
        raise DecodeError("identifier code is not UTF-8") from None


def _seq(codes: list[Code]) -> Code:
    out: Code = 0
    for c in reversed(codes):
        out = pair(c, out)
    return pair(len(codes), out)


def _unseq(c: Code) -> list[Code]:
    n, rest = unpair(c)
    if not isinstance(n, int) or n > 64:
        raise DecodeError("implausible argument count")
    out = []
    for _ in range(n):
        head, rest = unpair(rest)
        out.append(head)
    if rest != 0:
        raise DecodeError("argument list not terminated")
    return out


def gn(node: Node) -> Code:
    """Goedel number of a term or formula."""
    if isinstance(node, Succ):
        return lift(gn(node.arg), node.times)
    if isinstance(node, Zero):
        return pair(TAGS["Zero"], 0)
    if isinstance(node, Var):
        return pair(TAGS["Var"], name_code(node.name))
    if isinstance(node, (Add, Mul, Eq, And, Or, Imp)):
        return pair(TAGS[type(node).__name__], pair(gn(node.left), gn(node.right)))
    if isinstance(node, (FnApp, ExtAtom)):
        body = pair(name_code(node.symbol), _seq([gn(a) for a in node.args]))
        return pair(TAGS[type(node).__name__], body)
    if isinstance(node, Not):
        return pair(TAGS["Not"], gn(node.body))
    if isinstance(node, (Forall, Exists)):
        return pair(TAGS[type(node).__name__], pair(name_code(node.var), gn(node.body)))
    if isinstance(node, (BForall, BExists)):
        inner = pair(gn(node.bound), gn(node.body))
        return pair(TAGS[type(node).__name__], pair(name_code(node.var), inner))
    raise TypeError(f"not a syntax node: {node!r}")


class DecodeError(ValueError):
    pass


def decode(c: Code) -> Node:
    """Inverse of ``gn``; raises DecodeError on numbers that code nothing."""
    tag, body = unpair(c)
    if tag == 0:
        times = 1
        inner = body
        while True:
            if isinstance(inner, Tower):
                times += inner.count
                inner = inner.base
                continue
            if inner == 0:
                raise DecodeError("successor chain never reaches a term")
            t2, b2 = unpair(inner)
            if t2 != 0:
                break
            times += 1
            inner = b2
        arg = decode(inner)
        if not isinstance(arg, sx.TERM_TYPES):
            raise DecodeError("successor of a non-term")
        return Succ(arg, times)
    if not isinstance(tag, int) or tag not in _BY_TAG:
        raise DecodeError(f"unknown tag {code_str(tag)[:40]}")
    kind = _BY_TAG[tag]
    if kind == "Zero":
        if body != 0:
            raise DecodeError("bad zero code")
        return Zero()
    if kind == "Var":
        return Var(name_decode(body))
    if kind in ("Add", "Mul", "Eq", "And", "Or", "Imp"):
        a, b = unpair(body)
        left, right = decode(a), decode(b)
        want_terms = kind in ("Add", "Mul", "Eq")
        for part in (left, right):
            if isinstance(part, sx.TERM_TYPES) != want_terms:
                raise DecodeError(f"ill-sorted {kind}")
        cls = {"Add": Add, "Mul": Mul, "Eq": Eq, "And": And, "Or": Or, "Imp": Imp}[kind]
        return cls(left, right)
    if kind in ("FnApp", "ExtAtom"):
        s, rest = unpair(body)
        args = tuple(decode(a) for a in _unseq(rest))
        if not all(isinstance(a, sx.TERM_TYPES) for a in args):
            raise DecodeError("non-term argument")
        return (FnApp if kind == "FnApp" else ExtAtom)(name_decode(s), args)
    if kind == "Not":
        inner = decode(body)
        if isinstance(inner, sx.TERM_TYPES):
            raise DecodeError("negation of a term")
        return Not(inner)
    v, rest = unpair(body)
    var = name_decode(v)
    if kind in ("Forall", "Exists"):
        inner = decode(rest)
        if isinstance(inner, sx.TERM_TYPES):
            raise DecodeError("quantified term")
        return (Forall if kind == "Forall" else Exists)(var, inner)
    b, f = unpair(rest)
    bound, inner = decode(b), decode(f)
    if not isinstance(bound, sx.TERM_TYPES) or isinstance(inner, sx.TERM_TYPES):
        raise DecodeError("ill-sorted bounded quantifier")
    return (BForall if kind == "BForall" else BExists)(var, bound, inner)


def decode_formula(c: Code) -> Formula:
    node = decode(c)
    if isinstance(node, sx.TERM_TYPES):
        raise DecodeError("code is a term, not a formula")
    return node


def numeral(n: int) -> Term:
    return sx.numeral(n)


def num_value(n: int) -> Code:
    """Code of the numeral for n: num(0) = gn(0), num(n+1) = <0, num(n)>."""
    return lift(gn(Zero()), n)


def dotted_instance(phi: Formula, env: Mapping[str, int]) -> Code:
    """Code of the sentence obtained by plugging numerals for the free variables."""
    missing = sx.free_vars(phi) - set(env)
    if missing:
        raise ValueError(f"assignment misses {sorted(missing)}")
    closed = sx.substitute_all(phi, {v: numeral(env[v]) for v in sx.free_vars(phi)})
    return gn(closed)


DIAGONAL_VAR = "x"


def sub_eval(a: Code, b: Code, var: str = DIAGONAL_VAR) -> Code:
    """Code of the formula coded by ``a`` with the numeral for ``b`` put in for ``var``."""
    try:
        phi = decode_formula(a)
    except DecodeError as exc:
        raise DecodeError(f"first argument does not code a formula: {exc}") from None
    if not isinstance(b, int):
        b = to_int(b)
    return gn(sx.substitute(phi, var, numeral(b)))


def scheme_json() -> str:
    return json.dumps(SCHEME.to_json(), indent=2)


# ------------------------------------------- executable meaning of atoms


def _formula_or_none(x: int) -> Formula | None:
    try:
        return decode_formula(x)
    except (DecodeError, ValueError, RecursionError):
        return None


def _is_fml(x: int) -> bool:
    return _formula_or_none(x) is not None


def _is_sent(x: int) -> bool:
    phi = _formula_or_none(x)
    return phi is not None and not sx.free_vars(phi)


def _is_even(x: int) -> bool:
    phi = _formula_or_none(x)
    return phi is not None and sx.count_logical_symbols(phi) % 2 == 0


def _is_sigma_z(x: int, z: int) -> bool:
    from .hierarchy import is_in

    phi = _formula_or_none(x)
    if phi is None:
        return False
    try:
        return is_in(phi, sigma(z))
    except Exception:
        return False


def _neg_count(x: int) -> int:
    phi = _formula_or_none(x)
    return 0 if phi is None else sx.count_negations(phi)


def _neg_code(x: int) -> int:
    return to_int(pair(TAGS["Not"], x))


def _imp_code(x: int, y: int) -> int:
    return to_int(pair(TAGS["Imp"], pair(x, y)))


def _sub(x: int, y: int) -> int:
    return to_int(sub_eval(x, y))


sx.set_interpretation("Fml", _is_fml)
sx.set_interpretation("Sent", _is_sent)
sx.set_interpretation("Even", _is_even)
sx.set_interpretation("Sigma_z", _is_sigma_z)
sx.set_interpretation("n", _neg_count)
sx.set_interpretation("neg", _neg_code)
sx.set_interpretation("imp", _imp_code)
sx.set_interpretation("sub", _sub)
