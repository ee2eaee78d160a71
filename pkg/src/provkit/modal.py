"""Propositional provability logics: GL and the bimodal CS2.

GL is decided by a signed tableau whose open branches are read off as
finite irreflexive transitive tree models.  For CS2 there is a model
checker over finite rooted models, a Hilbert-derivation checker and a
bounded countermodel search; no full decision procedure is attempted.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, permutations, product
from typing import Iterable, Iterator, Mapping, Union


# ------------------------------------------------------------------ formulas


@dataclass(frozen=True)
class PropVar:
    name: str


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class MNot:
    body: ModalFormula


@dataclass(frozen=True)
class MAnd:
    left: ModalFormula
    right: ModalFormula


@dataclass(frozen=True)
class MOr:
    left: ModalFormula
    right: ModalFormula


@dataclass(frozen=True)
class MImp:
    left: ModalFormula
    right: ModalFormula


@dataclass(frozen=True)
class Box:
    index: int
    body: ModalFormula

    def __post_init__(self):
        if self.index not in (0, 1):
            raise ValueError(f"box index must be 0 or 1, got {self.index}")


ModalFormula = Union[PropVar, Bottom, MNot, MAnd, MOr, MImp, Box]
BOT = Bottom()
TOP = MNot(BOT)
_BINARY = (MAnd, MOr, MImp)


def box(body: ModalFormula, index: int = 0) -> Box:
    return Box(index, body)


def diamond(body: ModalFormula, index: int = 0) -> ModalFormula:
    return MNot(Box(index, MNot(body)))


def prop_vars(a: ModalFormula) -> frozenset[str]:
    if isinstance(a, PropVar):
        return frozenset({a.name})
    if isinstance(a, Bottom):
        return frozenset()
    if isinstance(a, (MNot, Box)):
        return prop_vars(a.body)
    return prop_vars(a.left) | prop_vars(a.right)


def subformulas(a: ModalFormula) -> Iterator[ModalFormula]:
    yield a
    if isinstance(a, (MNot, Box)):
        yield from subformulas(a.body)
    elif isinstance(a, _BINARY):
        yield from subformulas(a.left)
        yield from subformulas(a.right)


def modal_depth(a: ModalFormula) -> int:
    if isinstance(a, Box):
        return 1 + modal_depth(a.body)
    if isinstance(a, MNot):
        return modal_depth(a.body)
    if isinstance(a, _BINARY):
        return max(modal_depth(a.left), modal_depth(a.right))
    return 0


def box_indices(a: ModalFormula) -> frozenset[int]:
    return frozenset(s.index for s in subformulas(a) if isinstance(s, Box))


def is_unimodal(a: ModalFormula) -> bool:
    return box_indices(a) <= {0}


def msubstitute(a: ModalFormula, sub: Mapping[str, ModalFormula]) -> ModalFormula:
    """Uniform substitution of formulas for propositional variables."""
    if isinstance(a, PropVar):
        return sub.get(a.name, a)
    if isinstance(a, Bottom):
        return a
    if isinstance(a, MNot):
        return MNot(msubstitute(a.body, sub))
    if isinstance(a, Box):
        return Box(a.index, msubstitute(a.body, sub))
    return type(a)(msubstitute(a.left, sub), msubstitute(a.right, sub))


# ------------------------------------------------------------------ text


_PREC = {MImp: 1, MOr: 2, MAnd: 3}
_OPS = {MImp: "->", MOr: "|", MAnd: "&"}


def mformat(a: ModalFormula) -> str:
    """ASCII rendering that ``mparse`` reads back."""
    return _fmt(a, 0)


def _fmt(a: ModalFormula, ctx: int) -> str:
    if isinstance(a, PropVar):
        return a.name
    if isinstance(a, Bottom):
        return "F"
    if isinstance(a, MNot):
        return "~" + _fmt(a.body, 4)
    if isinstance(a, Box):
        return f"[{a.index}]" + _fmt(a.body, 4)
    prec = _PREC[type(a)]
    # -> is right associative, & and | left associative
    lctx, rctx = (prec + 1, prec) if isinstance(a, MImp) else (prec, prec + 1)
    text = f"{_fmt(a.left, lctx)} {_OPS[type(a)]} {_fmt(a.right, rctx)}"
    return f"({text})" if prec < ctx else text


class ModalParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_MTOKEN = re.compile(r"\s*(?:(\[\d*\]|<\d*>|<->|->|[()~&|□◇¬∧∨→↔⊥⊤]|_\|_)|([A-Za-z][A-Za-z0-9_']*))")


def _mtokens(text: str) -> list[tuple[str, int]]:
    out, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _MTOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ModalParseError(f"unexpected character {text[pos]!r}", pos)
        out.append((m.group(1) or m.group(2), m.start(1) if m.group(1) else m.start(2)))
        pos = m.end()
    return out


class _MParser:
    def __init__(self, text: str):
        self.toks = _mtokens(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def pos(self) -> int:
        return self.toks[self.i][1] if self.i < len(self.toks) else -1

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ModalParseError("unexpected end of input", -1)
        self.i += 1
        return tok

    def parse(self) -> ModalFormula:
        a = self.iff()
        if self.peek() is not None:
            raise ModalParseError(f"unexpected {self.peek()!r}", self.pos())
        return a

    def iff(self) -> ModalFormula:
        a = self.imp()
        while self.peek() in ("<->", "↔"):
            self.take()
            b = self.imp()
            a = MAnd(MImp(a, b), MImp(b, a))
        return a

    def imp(self) -> ModalFormula:
        a = self.disj()
        if self.peek() in ("->", "→"):
            self.take()
            return MImp(a, self.imp())
        return a

    def disj(self) -> ModalFormula:
        a = self.conj()
        while self.peek() in ("|", "∨"):
            self.take()
            a = MOr(a, self.conj())
        return a

    def conj(self) -> ModalFormula:
        a = self.unary()
        while self.peek() in ("&", "∧"):
            self.take()
            a = MAnd(a, self.unary())
        return a

    def unary(self) -> ModalFormula:
        tok = self.peek()
        if tok in ("~", "¬"):
            self.take()
            return MNot(self.unary())
        if tok == "□":
            self.take()
            return Box(0, self.unary())
        if tok == "◇":
            self.take()
            return diamond(self.unary())
        if tok is not None and tok.startswith("["):
            self.take()
            idx = int(tok[1:-1] or 0)
            if idx not in (0, 1):
                raise ModalParseError(f"box index {idx} out of range", self.pos())
            return Box(idx, self.unary())
        if tok is not None and tok.startswith("<") and tok.endswith(">") and tok != "<->":
            self.take()
            return diamond(self.unary(), int(tok[1:-1] or 0))
        return self.atom()

    def atom(self) -> ModalFormula:
        where = self.pos()
        tok = self.take()
        if tok == "(":
            a = self.iff()
            if self.take() != ")":
                raise ModalParseError("expected ')'", self.pos())
            return a
        if tok in ("F", "⊥", "_|_"):
            return BOT
        if tok in ("T", "⊤"):
            return TOP
        if re.fullmatch(r"[A-Za-z][A-Za-z0-9_']*", tok) and tok[0].islower():
            return PropVar(tok)
        raise ModalParseError(f"unexpected {tok!r}", where)


def mparse(text: str) -> ModalFormula:
    """Read a modal formula.

    Boxes are written ``[0]A``/``[1]A`` (``[]A`` and ``□A`` mean ``[0]A``),
    diamonds ``<0>A``/``◇A``; ``F``/``⊥`` is falsum and ``T``/``⊤`` its
    negation; variables start with a lowercase letter.
    """
    return _MParser(text).parse()


def mto_json(a: ModalFormula) -> dict:
    if isinstance(a, PropVar):
        return {"kind": "var", "name": a.name}
    if isinstance(a, Bottom):
        return {"kind": "bottom"}
    if isinstance(a, MNot):
        return {"kind": "not", "body": mto_json(a.body)}
    if isinstance(a, Box):
        return {"kind": "box", "index": a.index, "body": mto_json(a.body)}
    kind = {MAnd: "and", MOr: "or", MImp: "imp"}[type(a)]
    return {"kind": kind, "left": mto_json(a.left), "right": mto_json(a.right)}


def mfrom_json(d) -> ModalFormula:
    if isinstance(d, str):
        return mparse(d)
    kind = d["kind"]
    if kind == "var":
        return PropVar(d["name"])
    if kind == "bottom":
        return BOT
    if kind == "not":
        return MNot(mfrom_json(d["body"]))
    if kind == "box":
        return Box(int(d["index"]), mfrom_json(d["body"]))
    cls = {"and": MAnd, "or": MOr, "imp": MImp}[kind]
    return cls(mfrom_json(d["left"]), mfrom_json(d["right"]))


# ------------------------------------------------------------------ models


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class CS2Model:
    worlds: tuple[str, ...]
    k0: frozenset[str]
    k1: frozenset[str]
    order: frozenset[tuple[str, str]]
    root: str
    valuation: Mapping[str, frozenset[str]] = field(default_factory=dict, hash=False, compare=True)

    @cached_property
    def successors(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {w: [] for w in self.worlds}
        for a, b in sorted(self.order):
            out.setdefault(a, []).append(b)
        return {w: tuple(v) for w, v in out.items()}

    def true_at(self, world: str, var: str) -> bool:
        return var in self.valuation.get(world, frozenset())

    def to_json(self) -> dict:
        return {
            "worlds": list(self.worlds),
            "K0": sorted(self.k0),
            "K1": sorted(self.k1),
            "order": [list(p) for p in sorted(self.order)],
            "root": self.root,
            "valuation": {w: sorted(self.valuation.get(w, ())) for w in self.worlds},
        }

    @classmethod
    def from_json(cls, d: Mapping) -> CS2Model:
        worlds = tuple(d["worlds"])
        return cls(worlds, frozenset(d["K0"]), frozenset(d["K1"]), frozenset(tuple(p) for p in d["order"]),
                   d["root"], {w: frozenset(v) for w, v in d.get("valuation", {}).items()})


def gl_model(worlds: Iterable[str], order: Iterable[tuple[str, str]], root: str,
             valuation: Mapping[str, Iterable[str]]) -> CS2Model:
    """A unimodal Kripke model packaged as a CS2 model with K0 = K1 = W."""
    ws = tuple(worlds)
    return CS2Model(ws, frozenset(ws), frozenset(ws), frozenset(order), root,
                    {w: frozenset(valuation.get(w, ())) for w in ws})


def check_cs2_model(m: CS2Model) -> list[str]:
    """Violations of the five model conditions; empty when the model is fine."""
    problems = []
    W = set(m.worlds)
    if not W:
        problems.append("nonempty: W is empty")
    if len(W) != len(m.worlds):
        problems.append("nonempty: duplicate world names")
    if not (m.k0 <= W and m.k1 <= W):
        problems.append("subsets: K0 and K1 must be subsets of W")
    if set(m.k0) | set(m.k1) != W:
        problems.append("cover: W must equal K0 ∪ K1")
    if any(a not in W or b not in W for a, b in m.order):
        problems.append("order: relates worlds outside W")
    if any(a == b for a, b in m.order):
        problems.append("strictness: the order is reflexive somewhere")
    rel = set(m.order)
    if any((a, d) not in rel for a, b in rel for c, d in rel if b == c):
        problems.append("transitivity: the order is not transitive")
    if m.root not in W:
        problems.append("root membership: root is not a world")
    elif m.root not in m.k0 or m.root not in m.k1:
        problems.append("root membership: root must lie in K0 ∩ K1")
    missing = [w for w in m.worlds if w != m.root and (m.root, w) not in rel]
    if m.root in W and missing:
        problems.append(f"root order: root must precede every other world, not {missing}")
    extra = set(m.valuation) - W
    if extra:
        problems.append(f"valuation: mentions unknown worlds {sorted(extra)}")
    return problems


def _require_model(m: CS2Model) -> None:
    problems = check_cs2_model(m)
    if problems:
        raise ModelError("; ".join(problems))


def _eval(m: CS2Model, w: str, a: ModalFormula, memo: dict) -> bool:
    key = (w, a)
    if key in memo:
        return memo[key]
    if isinstance(a, PropVar):
        val = m.true_at(w, a.name)
    elif isinstance(a, Bottom):
        val = False
    elif isinstance(a, MNot):
        val = not _eval(m, w, a.body, memo)
    elif isinstance(a, MAnd):
        val = _eval(m, w, a.left, memo) and _eval(m, w, a.right, memo)
    elif isinstance(a, MOr):
        val = _eval(m, w, a.left, memo) or _eval(m, w, a.right, memo)
    elif isinstance(a, MImp):
        val = (not _eval(m, w, a.left, memo)) or _eval(m, w, a.right, memo)
    else:
        kset = m.k0 if a.index == 0 else m.k1
        # x forces [i]A iff every y in K_i with x < y forces A
        val = all(_eval(m, y, a.body, memo) for y in m.successors.get(w, ()) if y in kset)
    memo[key] = val
    return val


def mc_cs2(m: CS2Model, world: str, a: ModalFormula, validate: bool = True) -> bool:
    """Does ``world`` force ``a`` in the model?"""
    if validate:
        _require_model(m)
    if world not in m.worlds:
        raise ModelError(f"unknown world {world!r}")
    return _eval(m, world, a, {})


def isomorphic(m1: CS2Model, m2: CS2Model, variables: Iterable[str] | None = None) -> bool:
    """Root-preserving isomorphism respecting K0, K1, the order and the valuation.

    With ``variables`` only those variables are compared.
    """
    if len(m1.worlds) != len(m2.worlds):
        return False
    vs = None if variables is None else frozenset(variables)

    def val(m, w):
        v = m.valuation.get(w, frozenset())
        return v if vs is None else v & vs

    rest1 = [w for w in m1.worlds if w != m1.root]
    rest2 = [w for w in m2.worlds if w != m2.root]
    for perm in permutations(rest2):
        f = dict(zip(rest1, perm))
        f[m1.root] = m2.root
        if all(((w in m1.k0) == (f[w] in m2.k0)) and ((w in m1.k1) == (f[w] in m2.k1))
               and val(m1, w) == val(m2, f[w]) for w in m1.worlds) \
                and {(f[a], f[b]) for a, b in m1.order} == set(m2.order):
            return True
    return False


def mt2_model() -> CS2Model:
    """The three-world model showing CS2 does not prove [0]p & [1]~p -> [0]F | [1]F."""
    return CS2Model(("b", "x0", "x1"), frozenset({"b", "x0"}), frozenset({"b", "x1"}),
                    frozenset({("b", "x0"), ("b", "x1")}), "b",
                    {"b": frozenset(), "x0": frozenset({"p"}), "x1": frozenset()})


MT2_FORMULA = "[0]p & [1]~p -> [0]F | [1]F"
MT2_ROOT_FACT = "[0]p & [1]~p & ~[0]F & ~[1]F"


# ------------------------------------------------------------------ model enumeration


def strict_orders(n: int) -> list[frozenset[tuple[int, int]]]:
    """All strict partial orders on range(n), fewest pairs first."""
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    found = []
    for k in range(len(pairs) + 1):
        for rel in combinations(pairs, k):
            s = set(rel)
            if any((b, a) in s for a, b in s):
                continue
            if all((a, d) in s for a, b in s for c, d in s if b == c):
                found.append(frozenset(s))
    return found


_ORDER_CACHE: dict[int, list] = {}


def _orders(n: int):
    if n not in _ORDER_CACHE:
        _ORDER_CACHE[n] = strict_orders(n)
    return _ORDER_CACHE[n]


def _world_names(n: int) -> tuple[str, ...]:
    return ("b",) + tuple(f"w{i}" for i in range(1, n))


def enumerate_cs2_models(variables: Iterable[str], max_worlds: int) -> Iterator[CS2Model]:
    """CS2 models with up to ``max_worlds`` worlds, pruning some isomorphic copies.

    Non-root worlds are listed in non-decreasing order of (membership
    pattern, valuation); models differing only by a permutation of worlds
    that share that key are still produced more than once.
    """
    variables = sorted(set(variables))
    valuations = [frozenset(v for v, bit in zip(variables, bits) if bit)
                  for bits in product((0, 1), repeat=len(variables))]
    patterns = ((True, False), (False, True), (True, True))  # K0 only, K1 only, both
    labels = [(p, i) for p in range(len(patterns)) for i in range(len(valuations))]
    for n in range(1, max_worlds + 1):
        names = _world_names(n)
        for root_val in valuations:
            for combo in _sorted_tuples(labels, n - 1):
                for rel in _orders(n - 1):
                    order = {("b", names[i + 1]) for i in range(n - 1)}
                    order |= {(names[a + 1], names[b + 1]) for a, b in rel}
                    k0 = {"b"} | {names[i + 1] for i, (p, _) in enumerate(combo) if patterns[p][0]}
                    k1 = {"b"} | {names[i + 1] for i, (p, _) in enumerate(combo) if patterns[p][1]}
                    val = {"b": root_val}
                    val.update({names[i + 1]: valuations[v] for i, (_, v) in enumerate(combo)})
                    yield CS2Model(names, frozenset(k0), frozenset(k1), frozenset(order), "b", val)


def _sorted_tuples(items: list, k: int) -> Iterator[tuple]:
    """Non-decreasing k-tuples from items (multisets in canonical order)."""
    if k == 0:
        yield ()
        return

    def rec(start: int, left: int, acc: tuple):
        if left == 0:
            yield acc
            return
        for i in range(start, len(items)):
            yield from rec(i, left - 1, acc + (items[i],))

    yield from rec(0, k, ())


def cs2_countermodel_search(a: ModalFormula, max_worlds: int) -> CS2Model | None:
    """First enumerated CS2 model whose root does not force ``a``.

    None only means no countermodel exists up to ``max_worlds`` worlds; it
    is not a proof of theoremhood.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    for m in enumerate_cs2_models(prop_vars(a), max_worlds):
        if not _eval(m, m.root, a, {}):
            return m
    return None


# ------------------------------------------------------------------ GL


@dataclass(frozen=True)
class GLResult:
    formula: ModalFormula
    theorem: bool
    countermodel: CS2Model | None = None

    def __str__(self) -> str:
        if self.theorem:
            return "theorem"
        return f"countermodel with {len(self.countermodel.worlds)} worlds"

    def to_json(self) -> dict:
        out = {"formula": mformat(self.formula), "verdict": "theorem" if self.theorem else "countermodel"}
        if self.countermodel is not None:
            out["countermodel"] = self.countermodel.to_json()
        return out


@dataclass
class _Node:
    atoms: frozenset[str]
    children: list[_Node]


class _GLTableau:
    def __init__(self):
        self.memo: dict[tuple[frozenset, frozenset], _Node | None] = {}

    def sat(self, trues: frozenset, falses: frozenset) -> _Node | None:
        key = (trues, falses)
        if key not in self.memo:
            self.memo[key] = None  # guard; GL successors never revisit a node
            self.memo[key] = self._sat(trues, falses)
        return self.memo[key]

    def _sat(self, trues: frozenset, falses: frozenset) -> _Node | None:
        if trues & falses or BOT in trues:
            return None
        for f in trues:
            if isinstance(f, MNot):
                return self.sat(trues - {f}, falses | {f.body})
            if isinstance(f, MAnd):
                return self.sat((trues - {f}) | {f.left, f.right}, falses)
            if isinstance(f, MOr):
                rest = trues - {f}
                return self.sat(rest | {f.left}, falses) or self.sat(rest | {f.right}, falses)
            if isinstance(f, MImp):
                rest = trues - {f}
                return self.sat(rest, falses | {f.left}) or self.sat(rest | {f.right}, falses)
        for f in falses:
            if isinstance(f, MNot):
                return self.sat(trues | {f.body}, falses - {f})
            if isinstance(f, MOr):
                return self.sat(trues, (falses - {f}) | {f.left, f.right})
            if isinstance(f, MImp):
                return self.sat(trues | {f.left}, (falses - {f}) | {f.right})
            if isinstance(f, MAnd):
                rest = falses - {f}
                return self.sat(trues, rest | {f.left}) or self.sat(trues, rest | {f.right})
            if isinstance(f, Bottom):
                return self.sat(trues, falses - {f})
        # saturated: only variables and boxes remain
        boxed = [f for f in trues if isinstance(f, Box)]
        carried = frozenset(boxed) | frozenset(f.body for f in boxed)
        children = []
        for f in sorted((f for f in falses if isinstance(f, Box)), key=mformat):
            # Loeb step: the successor keeps the boxes, their bodies, and []B true with B false
            child = self.sat(carried | {f}, frozenset({f.body}))
            if child is None:
                return None
            children.append(child)
        return _Node(frozenset(f.name for f in trues if isinstance(f, PropVar)), children)


def _tree_to_model(root: _Node) -> CS2Model:
    names: list[str] = []
    val: dict[str, frozenset[str]] = {}
    edges: list[tuple[str, str]] = []

    def walk(node: _Node, ancestors: list[str]) -> None:
        name = "b" if not names else f"w{len(names)}"
        names.append(name)
        val[name] = node.atoms
        edges.extend((a, name) for a in ancestors)
        for child in node.children:
            walk(child, ancestors + [name])

    walk(root, [])
    return gl_model(names, edges, "b", val)


def gl_decide(a: ModalFormula) -> GLResult:
    """Decide GL-theoremhood; non-theorems come with a verified countermodel."""
    if not is_unimodal(a):
        raise ValueError("gl_decide expects a unimodal formula (box index 0 only)")
    node = _GLTableau().sat(frozenset(), frozenset({a}))
    if node is None:
        return GLResult(a, True)
    model = _tree_to_model(node)
    if mc_cs2(model, model.root, a):
        raise AssertionError(f"tableau countermodel does not refute {mformat(a)}")
    return GLResult(a, False, model)


def gl_frames(max_worlds: int) -> Iterator[tuple[int, list[int]]]:
    """Rooted finite strict partial orders as (size, successor bitmasks); root is 0."""
    for n in range(1, max_worlds + 1):
        for rel in _orders(n - 1):
            succ = [0] * n
            succ[0] = sum(1 << i for i in range(1, n))
            for x, y in rel:
                succ[x + 1] |= 1 << (y + 1)
            yield n, succ


def _mask_eval(a: ModalFormula, n: int, succ: list[int], vals: Mapping[str, int], full: int) -> int:
    if isinstance(a, PropVar):
        return vals.get(a.name, 0)
    if isinstance(a, Bottom):
        return 0
    if isinstance(a, MNot):
        return full & ~_mask_eval(a.body, n, succ, vals, full)
    if isinstance(a, MAnd):
        return _mask_eval(a.left, n, succ, vals, full) & _mask_eval(a.right, n, succ, vals, full)
    if isinstance(a, MOr):
        return _mask_eval(a.left, n, succ, vals, full) | _mask_eval(a.right, n, succ, vals, full)
    if isinstance(a, MImp):
        return (full & ~_mask_eval(a.left, n, succ, vals, full)) | _mask_eval(a.right, n, succ, vals, full)
    body = _mask_eval(a.body, n, succ, vals, full)
    return sum(1 << w for w in range(n) if succ[w] & ~body == 0)


def gl_model_search(a: ModalFormula, max_worlds: int) -> CS2Model | None:
    """Brute force: a rooted finite strict partial order refuting ``a`` at its root."""
    variables = sorted(prop_vars(a))
    for n, succ in gl_frames(max_worlds):
        full = (1 << n) - 1
        for masks in product(range(1 << n), repeat=len(variables)):
            vals = dict(zip(variables, masks))
            if not _mask_eval(a, n, succ, vals, full) & 1:
                names = _world_names(n)
                edges = [(names[x], names[y]) for x in range(n) for y in range(n) if succ[x] >> y & 1]
                valuation = {names[w]: frozenset(v for v in variables if vals[v] >> w & 1) for w in range(n)}
                return gl_model(names, edges, "b", valuation)
    return None


# ------------------------------------------------------------------ derivations


class DerivationError(ValueError):
    pass


@dataclass(frozen=True)
class Justification:
    kind: str  # "taut", "axiom", "mp", "nec", "subst"
    refs: tuple[int, ...] = ()
    box: int | None = None
    axiom: str | None = None
    subst: Mapping[str, ModalFormula] | None = None

    def to_json(self) -> dict:
        out: dict = {"rule": self.kind}
        if self.refs:
            out["refs"] = list(self.refs)
        if self.box is not None:
            out["box"] = self.box
        if self.axiom is not None:
            out["axiom"] = self.axiom
        if self.subst is not None:
            out["subst"] = {k: mformat(v) for k, v in sorted(self.subst.items())}
        return out


@dataclass(frozen=True)
class DerivationLine:
    formula: ModalFormula
    why: Justification


@dataclass(frozen=True)
class DerivationCertificate:
    lines: tuple[DerivationLine, ...]

    def to_json(self) -> dict:
        return {"lines": [{"formula": mformat(l.formula), **l.why.to_json()} for l in self.lines]}

    @classmethod
    def from_json(cls, d: Mapping) -> DerivationCertificate:
        lines = []
        for raw in d["lines"]:
            subst = raw.get("subst")
            why = Justification(raw["rule"], tuple(raw.get("refs", ())), raw.get("box"), raw.get("axiom"),
                                None if subst is None else {k: mfrom_json(v) for k, v in subst.items()})
            lines.append(DerivationLine(mfrom_json(raw["formula"]), why))
        return cls(tuple(lines))


def _prop_atoms(a: ModalFormula, out: list) -> None:
    # boxed subformulas and variables act as propositional atoms
    if isinstance(a, (PropVar, Box)):
        if a not in out:
            out.append(a)
    elif isinstance(a, MNot):
        _prop_atoms(a.body, out)
    elif isinstance(a, _BINARY):
        _prop_atoms(a.left, out)
        _prop_atoms(a.right, out)


def _prop_eval(a: ModalFormula, env: Mapping) -> bool:
    if isinstance(a, (PropVar, Box)):
        return env[a]
    if isinstance(a, Bottom):
        return False
    if isinstance(a, MNot):
        return not _prop_eval(a.body, env)
    if isinstance(a, MAnd):
        return _prop_eval(a.left, env) and _prop_eval(a.right, env)
    if isinstance(a, MOr):
        return _prop_eval(a.left, env) or _prop_eval(a.right, env)
    return (not _prop_eval(a.left, env)) or _prop_eval(a.right, env)


MAX_TAUT_ATOMS = 16


def is_tautology_instance(a: ModalFormula) -> bool:
    atoms: list = []
    _prop_atoms(a, atoms)
    if len(atoms) > MAX_TAUT_ATOMS:
        raise DerivationError(f"{len(atoms)} propositional atoms exceeds the truth-table cap")
    return all(_prop_eval(a, dict(zip(atoms, bits))) for bits in product((False, True), repeat=len(atoms)))


def axiom_kind(a: ModalFormula) -> str | None:
    """Name of the CS2 axiom schema ``a`` instantiates, if any.

    K: [i](A -> B) -> ([i]A -> [i]B); 4: [i]A -> [j][i]A; L: [i]([i]A -> A) -> [i]A.
    """
    if not isinstance(a, MImp):
        return None
    lhs, rhs = a.left, a.right
    if (isinstance(lhs, Box) and isinstance(lhs.body, MImp) and isinstance(rhs, MImp)
            and rhs.left == Box(lhs.index, lhs.body.left) and rhs.right == Box(lhs.index, lhs.body.right)):
        return "K"
    if isinstance(lhs, Box) and isinstance(rhs, Box) and rhs.body == lhs:
        return "4"
    if (isinstance(lhs, Box) and isinstance(lhs.body, MImp) and isinstance(rhs, Box)
            and rhs.index == lhs.index and lhs.body.left == rhs and lhs.body.right == rhs.body):
        return "L"
    return None


def derivation_report(cert: DerivationCertificate, goal: ModalFormula | None = None) -> list[str]:
    """Per-line problems with a certificate (empty when every line checks)."""
    problems: list[str] = []
    lines = cert.lines
    if not lines:
        return ["empty certificate"]
    for k, line in enumerate(lines):
        why, f = line.why, line.formula
        for r in why.refs:
            if not isinstance(r, int) or r < 0 or r >= k:
                raise DerivationError(f"line {k}: reference {r!r} does not point to an earlier line")
        if why.kind == "taut":
            if not is_tautology_instance(f):
                problems.append(f"line {k}: not a tautology instance")
        elif why.kind == "axiom":
            kind = axiom_kind(f)
            if kind is None or (why.axiom is not None and why.axiom != kind):
                problems.append(f"line {k}: not an instance of axiom {why.axiom or 'K/4/L'}")
        elif why.kind == "mp":
            if len(why.refs) != 2:
                raise DerivationError(f"line {k}: modus ponens needs two references")
            minor, major = lines[why.refs[0]].formula, lines[why.refs[1]].formula
            if major != MImp(minor, f):
                problems.append(f"line {k}: modus ponens does not apply to lines {why.refs}")
        elif why.kind == "nec":
            if len(why.refs) != 1 or why.box not in (0, 1):
                raise DerivationError(f"line {k}: necessitation needs one reference and a box index")
            if f != Box(why.box, lines[why.refs[0]].formula):
                problems.append(f"line {k}: not [{why.box}] of line {why.refs[0]}")
        elif why.kind == "subst":
            if len(why.refs) != 1 or why.subst is None:
                raise DerivationError(f"line {k}: substitution needs one reference and a substitution")
            if f != msubstitute(lines[why.refs[0]].formula, why.subst):
                problems.append(f"line {k}: not the stated substitution instance of line {why.refs[0]}")
        else:
            raise DerivationError(f"line {k}: unknown justification {why.kind!r}")
    if goal is not None and lines[-1].formula != goal:
        problems.append("last line is not the goal")
    return problems


def cs2_check_derivation(cert: DerivationCertificate, goal: ModalFormula) -> bool:
    return not derivation_report(cert, goal)


def _line(text_or_formula, kind: str, *refs: int, box_index=None, axiom=None, subst=None) -> DerivationLine:
    f = mparse(text_or_formula) if isinstance(text_or_formula, str) else text_or_formula
    return DerivationLine(f, Justification(kind, tuple(refs), box_index, axiom, subst))


def lob_certificate(index: int = 0) -> DerivationCertificate:
    return DerivationCertificate((_line(f"[{index}]([{index}]p -> p) -> [{index}]p", "axiom", axiom="L"),))


def second_incompleteness_certificate() -> DerivationCertificate:
    """A GL derivation of []~[]F -> []F."""
    return DerivationCertificate((
        _line("~[]F -> ([]F -> F)", "taut"),
        _line("[](~[]F -> ([]F -> F))", "nec", 0, box_index=0),
        _line("[](~[]F -> ([]F -> F)) -> ([]~[]F -> []([]F -> F))", "axiom", axiom="K"),
        _line("[]~[]F -> []([]F -> F)", "mp", 1, 2),
        _line("[]([]F -> F) -> []F", "axiom", axiom="L"),
        _line("([]~[]F -> []([]F -> F)) -> (([]([]F -> F) -> []F) -> ([]~[]F -> []F))", "taut"),
        _line("([]([]F -> F) -> []F) -> ([]~[]F -> []F)", "mp", 3, 5),
        _line("[]~[]F -> []F", "mp", 4, 6),
    ))


def load_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
