import json
import os
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from provkit import lattice as L
from provkit import modal as md
from provkit.cli import main, run

ROOT = Path(__file__).resolve().parents[1]
SCHEMAS = {p.stem.split(".")[0]: json.loads(p.read_text()) for p in (ROOT / "docs" / "schemas").glob("*.json")}


def run_json(*argv):
    res = run([*argv, "--json"])
    doc = res.to_json()
    jsonschema.validate(doc, SCHEMAS["cli-result"])
    return res, doc


def test_entails_example():
    res, doc = run_json("lattice", "entails", "--flags", "sigma1", "--have", "D1,BU2", "--query", "SCU")
    assert res.exit_code == 0 and doc["payload"]["answer"] == "yes"
    assert "MT" in doc["payload"]["certificate"]["chain"]
    assert any(c["citation"] == "Theorem MT" for c in doc["citations"])


def test_find_example():
    res, doc = run_json("modal", "cs2", "find", "[0]p & [1]~p -> [0]F | [1]F", "--max-worlds", "3")
    assert res.exit_code == 0
    model = doc["payload"]["model"]
    jsonschema.validate(model, SCHEMAS["cs2-model"])
    assert len(model["worlds"]) == 3
    assert md.isomorphic(md.CS2Model.from_json(model), md.mt2_model())


def test_unknown_subcommand():
    res = run(["nope"])
    assert res.exit_code == 2 and res.status == "error" and res.code == "usage"


def test_domain_error_exit_code():
    res = run(["parse", "x = = 0"])
    assert res.exit_code == 1 and res.code == "ParseError"
    assert run(["witness", "nope"]).exit_code == 1


def test_determinism():
    argv = ["lattice", "closure", "--flags", "sigma1", "--have", "D1,BU2", "--json"]
    assert run(argv).render(True) == run(argv).render(True)


def test_json_is_ascii():
    res = run(["parse", "∀x (x = x)", "--json"])
    text = res.render(True)
    assert text.isascii()
    assert json.loads(text)["payload"]["text"] == "!A x x = x"


@pytest.mark.parametrize("argv", [
    ["parse", "!A x (x = x)"],
    ["classify", "!E y Atom[Prf_T](x, y)"],
    ["gn", "0 = 0"],
    ["gn", "s(0)", "--term"],
    ["gn", "--scheme"],
    ["diagonalize", "--goedel"],
    ["diagonalize", "--context", "~(x = 0)"],
    ["flatten", "~(x = s(y))", "--verify", "--bound", "3"],
    ["witness"],
    ["witness", "Mostowski", "--classify"],
    ["witness", "PR_IV"],
    ["eval", "x + 1 = 3", "--env", "x=2"],
    ["lattice", "sanity"],
    ["lattice", "figure"],
    ["lattice", "separate", "--flags", "sigma1", "--have", "D1,D2,SC", "--target", "~ConSigma1"],
    ["lattice", "unprovability", "--flags", "sigma1", "--have", "D1,DG2,PCG"],
    ["modal", "gl", "[]p -> p"],
])
def test_commands_succeed(argv):
    res, doc = run_json(*argv)
    assert res.exit_code == 0, doc
    assert json.loads(json.dumps(doc)) == doc


def test_specific_payloads():
    assert run_json("classify", "!E y Atom[Prf_T](x, y)")[1]["payload"] == {"class": "Sigma", "index": 1, "level": "Sigma1"}
    assert run_json("gn", "0 = 0")[1]["payload"]["code"] == "59"
    assert run_json("eval", "x + 1 = 3", "--env", "x=2")[1]["payload"]["truth"] == "true"
    sep = run_json("lattice", "separate", "--flags", "sigma1", "--have", "D1,D2,SC", "--target", "~ConSigma1")[1]
    assert sep["payload"]["witness"] == "PR^II"
    diag = run_json("diagonalize", "--jeroslow")[1]["payload"]
    assert diag["holds"] and diag["lhs"] == diag["rhs"]


def test_mc_and_check_with_files(tmp_path):
    model = tmp_path / "m.json"
    model.write_text(json.dumps(md.mt2_model().to_json()))
    res, doc = run_json("modal", "cs2", "mc", str(model), "[0]p & [1]~p & ~[0]F & ~[1]F")
    assert doc["payload"]["forced"] is True
    cert = tmp_path / "c.json"
    body = md.second_incompleteness_certificate().to_json()
    jsonschema.validate(body, SCHEMAS["derivation-certificate"])
    cert.write_text(json.dumps(body))
    res, doc = run_json("modal", "cs2", "check", str(cert), "--goal", "[]~[]F -> []F")
    assert res.exit_code == 0 and doc["payload"]["valid"]
    body["lines"][3]["refs"] = [2, 1]
    cert.write_text(json.dumps(body))
    res, doc = run_json("modal", "cs2", "check", str(cert))
    assert res.exit_code == 1 and doc["error"]["code"] == "check-failed"


def test_shipped_data_files():
    data = ROOT / "docs" / "data"
    assert run(["modal", "cs2", "mc", str(data / "mt2-model.json"), md.MT2_ROOT_FACT]).payload["forced"]
    assert run(["modal", "cs2", "check", str(data / "g2-certificate.json")]).exit_code == 0


def test_kb_override(tmp_path):
    kb_file = tmp_path / "kb.json"
    kb_file.write_text(L.default_kb().without_rules("MT").dumps())
    res = run(["lattice", "entails", "--kb", str(kb_file), "--flags", "sigma1", "--have", "D1,BU2", "--query", "SCU"])
    assert "MT" not in res.payload["certificate"]["chain"]
    assert run(["lattice", "sanity", "--kb", str(kb_file)]).exit_code == 1
    doc = json.loads(run(["lattice", "export"]).text)
    jsonschema.validate(doc, SCHEMAS["kb"])


def test_main_prints(capsys):
    assert main(["modal", "gl", "[]([]p -> p) -> []p"]) == 0
    assert capsys.readouterr().out.strip() == "theorem"


def test_env_var_selects_json():
    env = {**os.environ, "PROVKIT_OUTPUT": "json"}
    out = subprocess.run([sys.executable, "-m", "provkit", "modal", "gl", "[]p -> [][]p"],
                         capture_output=True, text=True, env=env, check=True).stdout
    assert json.loads(out)["payload"]["verdict"] == "theorem"
