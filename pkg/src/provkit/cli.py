"""Command-line front end: ``provkit <command> ...`` or ``python -m provkit``.

Exit codes: 0 ok, 1 domain error (bad formula, failed check, ...), 2 usage error.
``--json`` (or PROVKIT_OUTPUT=json) switches to machine output.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Any, Sequence

from . import lattice, modal
from .coding import DecodeError, code_str, code_to_json, gn, scheme_json
from .diagonal import ContextError, fixed_point, goedel_context, jeroslow_context
from .flatten import FlattenError, check_invariants, equivalence_oracle, mtl_normal_form
from .gallery import MetadataOnly, UnknownWitness, catalog, gallery
from .hierarchy import UnregisteredAtom, classify
from .syntax import EvaluationError, ParseError, evaluate, free_vars, parse, parse_term, to_json, to_text

SCHEMA = "provkit-cli/1"
OUTPUT_ENV = "PROVKIT_OUTPUT"

DOMAIN_ERRORS = (ParseError, modal.ModalParseError, modal.ModelError, modal.DerivationError, FlattenError,
                 ContextError, UnknownWitness, UnregisteredAtom, EvaluationError, DecodeError, ValueError,
                 KeyError, OSError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")

    def exit(self, status=0, message=None):
        # --help lands here; keep it out of the result plumbing
        if message:
            sys.stderr.write(message)
        raise SystemExit(status)


@dataclass
class CommandResult:
    status: str
    payload: Any = None
    citations: list = field(default_factory=list)
    code: str | None = None
    message: str | None = None
    text: str = ""
    exit_code: int = 0

    def to_json(self) -> dict:
        out: dict = {"schema": SCHEMA, "status": self.status}
        if self.status == "ok":
            out["payload"] = self.payload
            out["citations"] = self.citations
        else:
            out["error"] = {"code": self.code, "message": self.message}
        return out

    def render(self, as_json: bool) -> str:
        if as_json:
            return json.dumps(self.to_json(), sort_keys=True, ensure_ascii=True, indent=2)
        if self.status != "ok":
            return f"error ({self.code}): {self.message}"
        return self.text


def ok(payload, text: str, citations=(), failed: str | None = None) -> CommandResult:
    cites = [{"citation": c, "quote": q} for c, q in citations]
    if failed:
        return CommandResult("error", payload, cites, "check-failed", failed, text, 1)
    return CommandResult("ok", payload, cites, text=text)


def _cites_text(citations) -> str:
    return "\n".join(f"  [{c}] {q}" for c, q in citations)


# ------------------------------------------------------------------ syntax commands


def cmd_parse(a) -> CommandResult:
    phi = parse(a.formula)
    return ok({"text": to_text(phi), "ast": to_json(phi)}, to_text(phi))


def cmd_classify(a) -> CommandResult:
    level = classify(parse(a.formula))
    return ok({**level.to_json(), "level": str(level)}, str(level))


def cmd_gn(a) -> CommandResult:
    if a.scheme:
        doc = json.loads(scheme_json())
        return ok(doc, json.dumps(doc, indent=2))
    if not a.expr:
        raise UsageError("gn: an expression is required unless --scheme is given")
    node = parse_term(a.expr) if a.term else parse(a.expr)
    code = gn(node)
    payload = {"code": code_to_json(code)}
    if isinstance(code, int):
        payload["hex"] = hex(code)
    text = payload.get("hex") if a.hex and isinstance(code, int) else code_str(code)
    return ok(payload, text)


def cmd_diagonalize(a) -> CommandResult:
    if a.goedel:
        psi = goedel_context(a.predicate)
    elif a.jeroslow:
        psi = jeroslow_context(a.predicate)
    elif a.context:
        psi = parse(a.context)
    else:
        raise UsageError("diagonalize: give --context, --goedel or --jeroslow")
    phi, cert = fixed_point(psi)
    gn_theta = gn(cert.theta)
    payload = {"context": to_text(psi), "theta": to_text(cert.theta), "theta_code": code_to_json(gn_theta),
               "phi": to_text(phi), "lhs": code_to_json(cert.lhs), "rhs": code_to_json(cert.rhs),
               "holds": cert.holds}
    text = (f"theta = {to_text(cert.theta)}\n<theta> = {code_str(gn_theta)}\nphi = {to_text(phi)}\n"
            f"sub(<theta>, <theta>) = {code_str(cert.lhs)}\n<phi> = {code_str(cert.rhs)}\n"
            f"identity {'holds' if cert.holds else 'FAILS'}")
    return ok(payload, text, failed=None if cert.holds else "fixed-point identity does not hold")


def cmd_flatten(a) -> CommandResult:
    phi = parse(a.formula)
    nf = mtl_normal_form(phi)
    payload: dict = {"normal_form": nf.to_json(), "formula": to_text(nf.as_formula())}
    problems = check_invariants(nf, free_vars(phi))
    payload["invariant_problems"] = problems
    text = to_text(nf.as_formula())
    failed = "; ".join(problems) or None
    if a.verify:
        same = equivalence_oracle(phi, nf, a.bound)
        payload["oracle"] = {"bound": a.bound, "equivalent": same}
        text += f"\noracle over 0..{a.bound}: {'equivalent' if same else 'MISMATCH'}"
        if not same:
            failed = failed or f"normal form differs from the input on 0..{a.bound}"
    return ok(payload, text, failed=failed)


def cmd_witness(a) -> CommandResult:
    if not a.name:
        rows = []
        for name, entry in sorted(catalog().items()):
            kind = "metadata" if isinstance(entry, MetadataOnly) else "template"
            rows.append({"name": name, "kind": kind, "provenance": entry.provenance})
        return ok({"catalog": rows}, "\n".join(f"{r['name']:<14} {r['kind']:<9} {r['provenance']}" for r in rows))
    entry = gallery(a.name)
    if isinstance(entry, MetadataOnly):
        payload = {"name": entry.name, "kind": "metadata", "description": entry.description,
                   "provenance": entry.provenance, "reason": entry.reason}
        return ok(payload, f"{entry.name}: {entry.description} ({entry.provenance}); {entry.reason}")
    level = classify(entry.formula)
    payload = {"name": entry.name, "kind": "template", "formula": to_text(entry.formula),
               "declared_level": str(entry.declared_level), "level": str(level), "provenance": entry.provenance}
    if a.classify:
        text = f"{entry.name}: {level} (declared {entry.declared_level})"
    else:
        text = f"{entry.name}(x) := {to_text(entry.formula)}\n  {entry.provenance}"
    return ok(payload, text)


def cmd_eval(a) -> CommandResult:
    phi = parse(a.formula)
    env = {}
    for item in a.env or []:
        for part in filter(None, item.split(",")):
            key, _, val = part.partition("=")
            if not val.strip().isdigit():
                raise ValueError(f"bad assignment {part!r}; expected name=number")
            env[key.strip()] = int(val)
    truth = evaluate(phi, env, a.bound)
    return ok({"truth": truth.value, "env": env, "bound": a.bound}, truth.value)


# ------------------------------------------------------------------ lattice


def _kb(a) -> lattice.KnowledgeBase:
    return lattice.KnowledgeBase.load(a.kb) if a.kb else lattice.default_kb()


def _flags_and_have(a):
    flags = lattice.parse_atoms(",".join(a.flags or []))
    more_flags, have = lattice.split_flags(lattice.parse_atoms(",".join(a.have or [])))
    return flags | more_flags, have


def cmd_lattice(a) -> CommandResult:
    kb = _kb(a)
    if a.lattice_cmd == "sanity":
        report = lattice.kb_sanity(kb)
        text = "KB passes the audit" if not report else "\n".join(report)
        return ok({"report": report}, text, failed=f"{len(report)} audit findings" if report else None)
    if a.lattice_cmd == "export":
        return ok(kb.to_json(), kb.dumps())
    if a.lattice_cmd == "figure":
        checks = lattice.check_figure(kb)
        rows = [{"source": c.source, "target": c.target, "forward": c.forward, "ok": c.ok,
                 "reverse": c.reverse.to_json() if c.reverse else None} for c in checks]
        text = "\n".join(f"{'ok  ' if c.ok else 'FAIL'} {c.source} -> {c.target}; reverse: {c.reverse}"
                         for c in checks)
        bad = sum(not c.ok for c in checks)
        return ok({"arrows": rows}, text, failed=f"{bad} arrows mismatch" if bad else None)
    flags, have = _flags_and_have(a)
    if a.lattice_cmd == "closure":
        cl = lattice.closure(flags, have, kb)
        lines = []
        for cert in cl.certificates:
            how = " -> ".join(cert.chain) if cert.chain else "given"
            lines.append(f"{lattice.display(cert.atom):<12} {how}")
        cites = sorted({c for cert in cl.certificates for c in cert.citations})
        return ok(cl.to_json(), "\n".join(lines), cites)
    if a.lattice_cmd == "entails":
        query = lattice.parse_atom(a.query)
        v = lattice.entails(flags, have, query, kb)
        return ok(v.to_json(), f"{v}\n{_cites_text(v.citations)}", v.citations)
    if a.lattice_cmd == "separate":
        target = lattice.parse_atom(a.target)
        name = lattice.separation(flags | have, target, kb)
        if name is None:
            return ok({"witness": None}, "no recorded witness separates these")
        w = kb.witness(name)
        return ok({"witness": name}, f"{name}\n{_cites_text([(w.citation, w.quote)])}", [(w.citation, w.quote)])
    if a.lattice_cmd == "unprovability":
        certs = lattice.unprovability(flags, have, kb)
        cites = sorted({c for cert in certs.values() for c in cert.citations})
        text = "\n".join(f"{lattice.display(k)}: {' -> '.join(c.chain)}" for k, c in certs.items()) or "nothing derived"
        return ok({k: c.to_json() for k, c in certs.items()}, text, cites)
    raise UsageError(f"lattice: unknown subcommand {a.lattice_cmd}")


# ------------------------------------------------------------------ modal


def _model_text(m: modal.CS2Model) -> str:
    rows = [f"root {m.root}; K0 = {sorted(m.k0)}; K1 = {sorted(m.k1)}",
            "order: " + (", ".join(f"{x}<{y}" for x, y in sorted(m.order)) or "empty")]
    rows += [f"  {w}: {', '.join(sorted(m.valuation.get(w, ()))) or '-'}" for w in m.worlds]
    return "\n".join(rows)


def cmd_modal(a) -> CommandResult:
    if a.modal_cmd == "gl":
        res = modal.gl_decide(modal.mparse(a.formula))
        text = "theorem" if res.theorem else "countermodel\n" + _model_text(res.countermodel)
        return ok(res.to_json(), text)
    if a.cs2_cmd == "mc":
        m = modal.CS2Model.from_json(modal.load_json(a.model))
        f = modal.mparse(a.formula)
        world = a.world or m.root
        val = modal.mc_cs2(m, world, f)
        return ok({"world": world, "formula": modal.mformat(f), "forced": val},
                  f"{world} {'forces' if val else 'does not force'} {modal.mformat(f)}")
    if a.cs2_cmd == "find":
        f = modal.mparse(a.formula)
        m = modal.cs2_countermodel_search(f, a.max_worlds)
        if m is None:
            return ok({"formula": modal.mformat(f), "model": None, "max_worlds": a.max_worlds},
                      f"no countermodel with at most {a.max_worlds} worlds (not a proof)")
        return ok({"formula": modal.mformat(f), "model": m.to_json(), "max_worlds": a.max_worlds},
                  _model_text(m))
    if a.cs2_cmd == "check":
        doc = modal.load_json(a.cert)
        cert = modal.DerivationCertificate.from_json(doc)
        goal = modal.mparse(a.goal) if a.goal else (modal.mfrom_json(doc["goal"]) if "goal" in doc
                                                    else cert.lines[-1].formula)
        problems = modal.derivation_report(cert, goal)
        text = "certificate checks" if not problems else "\n".join(problems)
        return ok({"goal": modal.mformat(goal), "valid": not problems, "problems": problems}, text,
                  failed="; ".join(problems) or None)
    raise UsageError("modal: unknown subcommand")


# ------------------------------------------------------------------ wiring


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    p = _Parser(prog="provkit", description="Arithmetization, derivability conditions and provability logic.",
                parents=[common])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(fn=fn)
        return sp

    sp = add("parse", cmd_parse, "parse and reprint a formula")
    sp.add_argument("formula")
    sp = add("classify", cmd_classify, "arithmetical-hierarchy level of a formula")
    sp.add_argument("formula")
    sp = add("gn", cmd_gn, "Goedel number of a formula or term")
    sp.add_argument("expr", nargs="?")
    sp.add_argument("--term", action="store_true", help="read EXPR as a term")
    sp.add_argument("--hex", action="store_true")
    sp.add_argument("--scheme", action="store_true", help="print the coding scheme table")
    sp = add("diagonalize", cmd_diagonalize, "fixed point of a context in x")
    sp.add_argument("--context")
    sp.add_argument("--goedel", action="store_true")
    sp.add_argument("--jeroslow", action="store_true")
    sp.add_argument("--predicate", default="Phi")
    sp = add("flatten", cmd_flatten, "normal form of a quantifier-free formula")
    sp.add_argument("formula")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--bound", type=int, default=4)
    sp = add("witness", cmd_witness, "catalog of example predicates")
    sp.add_argument("name", nargs="?")
    sp.add_argument("--print", action="store_true", help="print the template (default)")
    sp.add_argument("--classify", action="store_true")
    sp = add("eval", cmd_eval, "evaluate a formula in the standard model")
    sp.add_argument("formula")
    sp.add_argument("--env", action="append", help="assignments like x=3,y=0")
    sp.add_argument("--bound", type=int, default=0, help="search bound for unbounded quantifiers")

    lat = add("lattice", cmd_lattice, "derivability-condition knowledge base")
    lsub = lat.add_subparsers(dest="lattice_cmd", required=True, parser_class=_Parser)
    for name in ("closure", "entails", "separate", "unprovability", "sanity", "export", "figure"):
        lp = lsub.add_parser(name, parents=[common])
        lp.add_argument("--kb", help="JSON knowledge base replacing the embedded one")
        if name in ("closure", "entails", "separate", "unprovability"):
            lp.add_argument("--flags", action="append", help="side conditions, e.g. sigma1")
            lp.add_argument("--have", action="append", help="conditions, e.g. D1,BU2")
        if name == "entails":
            lp.add_argument("--query", required=True)
        if name == "separate":
            lp.add_argument("--target", required=True)

    mod = add("modal", cmd_modal, "GL and CS2 provability logics")
    msub = mod.add_subparsers(dest="modal_cmd", required=True, parser_class=_Parser)
    gl = msub.add_parser("gl", parents=[common])
    gl.add_argument("formula")
    cs2 = msub.add_parser("cs2", parents=[common])
    csub = cs2.add_subparsers(dest="cs2_cmd", required=True, parser_class=_Parser)
    mc = csub.add_parser("mc", parents=[common])
    mc.add_argument("model")
    mc.add_argument("formula")
    mc.add_argument("--world")
    find = csub.add_parser("find", parents=[common])
    find.add_argument("formula")
    find.add_argument("--max-worlds", type=int, default=3)
    chk = csub.add_parser("check", parents=[common])
    chk.add_argument("cert")
    chk.add_argument("--goal")
    return p


def run(argv: Sequence[str]) -> CommandResult:
    try:
        args = build_parser().parse_args(list(argv))
    except UsageError as e:
        return CommandResult("error", code="usage", message=str(e), exit_code=2)
    try:
        res = args.fn(args)
    except UsageError as e:
        return CommandResult("error", code="usage", message=str(e), exit_code=2)
    except DOMAIN_ERRORS as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        return CommandResult("error", code=type(e).__name__, message=str(msg), exit_code=1)
    res.json_requested = getattr(args, "json", False)
    return res


def _wants_json(argv: Sequence[str]) -> bool:
    return "--json" in argv or os.environ.get(OUTPUT_ENV, "").lower() == "json"


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    res = run(argv)
    out = res.render(_wants_json(argv))
    stream = sys.stdout if res.exit_code == 0 or res.payload is not None else sys.stderr
    print(out, file=stream)
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
