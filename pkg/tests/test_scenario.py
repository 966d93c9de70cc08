import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrauth import lra, qcore
from lrauth.locc import simulate
from lrauth.scenario import (
    Report,
    ScenarioError,
    StateDecl,
    parse_scenario,
    serialize_scenario,
    tokenize,
    tree_to_ast,
)

import properties as P

DEMOS = Path(__file__).resolve().parent.parent / "demos" / "scenarios"

BELL_TRIPLE = """\
# the three-Bell-state set
parties 2 2
state phi_plus = bell:phi+
state phi_minus = bell:phi-
state psi_plus = bell:psi+
"""


def _errors(text):
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(text)
    return exc.value.diagnostics


def test_bell_triple_parses():
    sf = parse_scenario(BELL_TRIPLE)
    assert sf.dims == (2, 2)
    scn = sf.scenario()
    assert scn.names == ("phi_plus", "phi_minus", "psi_plus")
    assert scn.state(3) == qcore.bell_state("psi_plus")
    assert parse_scenario(serialize_scenario(sf)) == sf


def test_state_kinds():
    sf = parse_scenario("parties 3 3\nstate a = psi4\nstate b = basis:0\n"
                        "state c = amps [0,0; 0,0; 0,1; 0,0; 0,0; 0,0; 0,0; 0,0; 0,0]\n")
    scn = sf.scenario()
    assert scn.state(1) == qcore.psi4()
    assert scn.state(2) == qcore.basis_state((3, 3), 0)
    assert scn.state(3).amplitudes[2] == 1j


def test_psi4_amplitudes_round_trip_exactly():
    amps = tuple(complex(x) for x in qcore.psi4().amplitudes)
    sf = parse_scenario(serialize_scenario(
        P.ScenarioFile((3, 3), (StateDecl("p", "amps", amps),))))
    assert sf.states[0].arg == amps
    got = sf.scenario().state(1).amplitudes
    assert np.array_equal(got, np.array(amps))
    assert all(f"{a.real:.15g}" == f"{b.real:.15g}" for a, b in zip(got, amps))


def test_non_orthogonal_names_both():
    d = _errors("parties 2\nstate up = basis:0\nstate diag = amps [0.6,0; 0.8,0]\n")
    assert len(d) == 1 and d[0].kind == "semantic"
    assert "orthogonality" in d[0].message and "up" in d[0].message and "diag" in d[0].message
    assert d[0].line == 3


def test_norm_error():
    d = _errors("parties 2\nstate a = amps [1,0; 1,0]\n")
    assert "norm" in d[0].message and "a" in d[0].message and d[0].line == 2


def test_empty_input():
    for text in ("", "   \n# only a comment\n"):
        d = _errors(text)
        assert "empty" in d[0].message


def test_missing_parties_and_no_states():
    assert "parties" in _errors("state a = psi4\n")[0].message
    assert "empty" in _errors("parties 2 2\n")[0].message


def test_dimension_errors():
    assert "dimension" in _errors("parties 2 1\nstate a = basis:0\n")[0].message
    assert "dimension" in _errors("parties 2 2\nstate a = amps [1,0; 0,0]\n")[0].message
    assert "dimension" in _errors("parties 64 65\nstate a = basis:0\n")[0].message
    d = _errors("parties 3 3\nstate a = psi4\nprotocol p {\n  measure party=0 instrument=pauli:z {\n"
                "    outcome +1 { answer 1 }\n    outcome -1 { answer 0 }\n  }\n}\n")
    assert "Pauli" in d[0].message and d[0].line == 4


def test_lexical_and_syntax_positions():
    d = _errors("parties 2 2\nstate a = bell:phi+ @\n")
    assert d[0].kind == "lexical" and d[0].line == 2 and d[0].col == 21
    d = _errors("parties 2 2\nstate a bell:phi+\n")
    assert d[0].kind == "syntax" and d[0].line == 2
    d = _errors("parties 2 2\nstate a = bell:phi+\nprotocol p {\n  measure party=0 instrument=pauli:z {\n"
                "    outcome +1 { answer 1 }\n")
    assert d[0].kind == "syntax" and d[0].line >= 5


def test_outcome_coverage_checked():
    d = _errors("parties 2 2\nstate a = bell:phi+\nprotocol p {\n  measure party=0 instrument=pauli:z {\n"
                "    outcome +1 { answer 1 }\n  }\n}\n")
    assert any("-1" in x.message for x in d)


def test_protocol_and_analysis_checks():
    base = BELL_TRIPLE + "protocol t = product:1\n"
    assert "not fully product" in _errors(base)[0].message
    assert "out of range" in _errors(BELL_TRIPLE + "protocol t for=4 {\n  answer 0\n}\n")[0].message
    assert "unknown protocol" in _errors(BELL_TRIPLE + "analyze verify question=1 protocol=nope\n")[0].message
    assert "integer" in _errors(BELL_TRIPLE + "analyze nullspace question=x party=0\n")[0].message
    assert "party" in _errors(BELL_TRIPLE + "analyze nullspace question=1 party=5\n")[0].message


def test_duplicate_names():
    assert "duplicate" in _errors("parties 2\nstate a = basis:0\nstate a = basis:1\n")[0].message


def test_protocol_round_trip_and_semantics():
    sf = parse_scenario((DEMOS / "bell_triple.lra").read_text())
    scn = sf.scenario()
    tree = sf.tree("yy")
    ref = lra.bell_strategy()[1]
    for s in scn.states:
        assert simulate(tree, s).probabilities.get(1, 0) == pytest.approx(
            simulate(ref, s).probabilities.get(1, 0), abs=1e-12)
    assert set(sf.strategy()) == {1, 2, 3}
    assert parse_scenario(serialize_scenario(sf)) == sf


def test_tree_to_ast_round_trip():
    scn = lra.bell_product_triple()
    trees = {"y": lra.bell_strategy()[1], "prod": lra.product_authentication_protocol(scn, 3),
             "lvl": lra.level_click_tree(1, "x", dims=(2, 2))}
    for tree in trees.values():
        ast = tree_to_ast(tree)
        text = serialize_scenario(P.ScenarioFile(
            (2, 2), (StateDecl("x", "basis", 0),), (P.ProtocolDecl("t", None, ast),)))
        rebuilt = parse_scenario(text).tree("t")
        for s in scn.states:
            a = simulate(tree, s).probabilities
            b = simulate(rebuilt, s).probabilities
            assert set(a) == set(b) and all(abs(a[k] - b[k]) < 1e-12 for k in a)


def test_product_ref_in_file():
    sf = parse_scenario((DEMOS / "bell_product_triple.lra").read_text())
    tree = sf.tree([p.name for p in sf.protocols if p.question == 3][0])
    assert lra.verify_authentication(sf.scenario(), 3, tree).passed


def test_demo_files_parse():
    files = sorted(DEMOS.glob("*.lra"))
    assert len(files) >= 4
    for f in files:
        sf = parse_scenario(f.read_text())
        assert parse_scenario(serialize_scenario(sf)) == sf


def test_round_trip_sweep():
    assert P.check_parser_roundtrip(200) == []


def test_fuzz_sweep():
    assert P.check_parser_fuzz(500) == []


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from(list("= { } [ ] ; , # : . + - 0 1 2 3 | \n @".split(" ")) + [
    "parties", "state", "protocol", "measure", "outcome", "answer", "analyze", "bell:phi+", "pauli:z",
    "projectors:", "rest", "psi4", "amps", "party", "instrument", "\n"]), max_size=60).map(" ".join))
def test_hypothesis_fuzz(text):
    try:
        parse_scenario(text)
    except ScenarioError as e:
        assert e.diagnostics and all(d.line >= 1 and d.col >= 1 for d in e.diagnostics)


@settings(max_examples=100, deadline=None)
@given(st.binary(max_size=300))
def test_hypothesis_bytes(raw):
    try:
        parse_scenario(raw.decode("utf-8", "replace"))
    except ScenarioError as e:
        assert all(d.line >= 1 for d in e.diagnostics)


def test_tokenizer_comments_and_lines():
    toks = tokenize("parties 2 # trailing\n\nstate a = basis:0\n")
    words = [(t.kind, t.text, t.line) for t in toks if t.kind == "WORD"]
    assert words[0] == ("WORD", "parties", 1)
    assert ("WORD", "state", 3) in words
    assert all("trailing" not in t.text for t in toks)


def test_report_json():
    verdict = lra.verify_complete_lra(lra.bell_triple(), lra.bell_strategy())
    rep = Report.build("lrauth demo bell", [("complete", verdict), ("extra", {"pass": True, "x": math.inf})])
    text = rep.to_json()
    d = json.loads(text)
    assert list(d) == ["command", "verdicts", "pass"]
    assert d["pass"] is True and d["verdicts"][1]["x"] == "Infinity"
    assert Report.from_json(text).to_json() == text
    assert "overall: PASS" in rep.to_text()


def test_report_twelve_significant_digits():
    rep = Report.build("x", [("a", {"pass": True, "v": 1 / 3, "tiny": 1e-17, "z": 0.0})])
    row = json.loads(rep.to_json())["verdicts"][0]
    assert row["v"] == 0.333333333333
    assert row["tiny"] == 1e-17


def test_report_fail_propagates():
    rep = Report.build("x", [("a", {"pass": True}), ("b", lra.Verdict("k", False))])
    assert rep.passed is False
