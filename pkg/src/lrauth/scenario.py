"""Scenario text format, parser, serializer and JSON reports.

A scenario file is line oriented::

    # three Bell states
    parties 2 2
    state e1 = bell:phi+
    state e2 = bell:phi-
    state e3 = amps [0,0; 0.5,0; 0.5,0; ...]
    protocol q3 for=3 {
      measure party=0 instrument=pauli:z {
        outcome +1 { measure party=1 instrument=pauli:z {
          outcome +1 { answer 0 }
          outcome -1 { answer 1 } } }
        outcome -1 { ... }
      }
    }
    protocol t3 for=3 = product:3
    analyze verify question=3 protocol=q3

Instruments are ``pauli:x|y|z`` (outcomes ``+1``/``-1``) or
``projectors:[ket | ket | rest]`` with outcomes ``0``, ``1``, ... by
position; ``rest`` is the complement of the listed rank-one projectors.
Complex literals are ``re,im`` decimal pairs separated by ``;``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np

from . import lra
from .locc import INCONCLUSIVE, Label, Leaf, Node, ProtocolTree, _Inconclusive
from .measure import Instrument, pauli_measurement
from .qcore import ATOL, PartyLayout, PureState, basis_state, bell_state, is_fully_product, psi4

BELL_ALIASES = {"phi+": "phi_plus", "phi-": "phi_minus", "psi+": "psi_plus", "psi-": "psi_minus"}
MAX_TOTAL_DIM = 4096
ANALYSES = ("verify", "complete", "nullspace", "classify", "conclusive", "prop2")


# --------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    kind: str  # lexical | syntax | semantic
    message: str

    def __str__(self):
        return f"line {self.line}, col {self.col}: {self.kind} error: {self.message}"


class ScenarioError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


# --------------------------------------------------------------------------
# syntax tree


@dataclass(frozen=True)
class StateDecl:
    name: str
    kind: str  # bell | basis | psi4 | amps
    arg: object = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class InstrumentSpec:
    kind: str  # pauli | projectors
    axis: str | None = None
    kets: tuple | None = None  # tuple of (tuple of complex) or None for the complement

    def outcome_labels(self) -> tuple[str, ...]:
        if self.kind == "pauli":
            return ("+1", "-1")
        return tuple(str(i) for i in range(len(self.kets)))


@dataclass(frozen=True)
class AnswerAst:
    value: str  # "0" | "1" | "label:<name>" | "inconclusive"
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class MeasureAst:
    party: int
    instrument: InstrumentSpec
    outcomes: tuple  # ((label, body), ...)
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ProductRef:
    question: int


TreeAst = Union[AnswerAst, MeasureAst]


@dataclass(frozen=True)
class ProtocolDecl:
    name: str
    question: int | None
    body: Union[AnswerAst, MeasureAst, ProductRef]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class AnalyzeDecl:
    kind: str
    params: tuple  # ((key, value), ...)
    line: int = field(default=0, compare=False)

    def param(self, key: str, default=None):
        return dict(self.params).get(key, default)


@dataclass(frozen=True)
class ScenarioFile:
    dims: tuple[int, ...]
    states: tuple[StateDecl, ...]
    protocols: tuple[ProtocolDecl, ...] = ()
    analyses: tuple[AnalyzeDecl, ...] = ()

    @property
    def layout(self) -> PartyLayout:
        return PartyLayout(self.dims)

    def scenario(self) -> lra.LraScenario:
        return lra.LraScenario([build_state(s, self.layout) for s in self.states],
                               [s.name for s in self.states], self.layout)

    def protocol(self, name: str) -> ProtocolDecl:
        for p in self.protocols:
            if p.name == name:
                return p
        raise KeyError(f"no protocol named {name!r}")

    def tree(self, name: str) -> ProtocolTree:
        return build_protocol(self.protocol(name), self.scenario())

    def strategy(self) -> dict[int, ProtocolTree]:
        scn = self.scenario()
        return {p.question: build_protocol(p, scn) for p in self.protocols if p.question is not None}


# --------------------------------------------------------------------------
# building library objects


def _complex_vec(values) -> np.ndarray:
    return np.array(values, dtype=complex)


def build_state(decl: StateDecl, layout: PartyLayout) -> PureState:
    if decl.kind == "bell":
        return bell_state(BELL_ALIASES[decl.arg], layout)
    if decl.kind == "basis":
        return basis_state(layout, decl.arg)
    if decl.kind == "psi4":
        return psi4(layout)
    return PureState(layout, _complex_vec(decl.arg))


def build_instrument(spec: InstrumentSpec, dim: int | None = None) -> Instrument:
    if spec.kind == "pauli":
        return pauli_measurement(spec.axis)
    kets = [None if k is None else _complex_vec(k) for k in spec.kets]
    return Instrument.from_kets(kets, dim=dim)


def _answer(value: str):
    if value in ("0", "1"):
        return int(value)
    if value == "inconclusive":
        return INCONCLUSIVE
    return Label(value[len("label:"):])


def build_tree(ast: TreeAst, dims: Sequence[int] | None = None) -> ProtocolTree:
    if isinstance(ast, AnswerAst):
        return Leaf(_answer(ast.value))
    d = dims[ast.party] if dims is not None and ast.party < len(dims) else None
    instr = build_instrument(ast.instrument, d)
    by_label = dict(ast.outcomes)
    file_labels = ast.instrument.outcome_labels()
    return Node(ast.party, instr, [build_tree(by_label[lab], dims) for lab in file_labels])


def build_protocol(decl: ProtocolDecl, scn: lra.LraScenario) -> ProtocolTree:
    if isinstance(decl.body, ProductRef):
        return lra.product_authentication_protocol(scn, decl.body.question)
    return build_tree(decl.body, scn.layout.dims)


# --------------------------------------------------------------------------
# tokenizer


@dataclass(frozen=True)
class Token:
    kind: str  # WORD | LBRACE | RBRACE | EQ | BRACKET | NEWLINE | EOF
    text: str
    line: int
    col: int


_WORD_STOP = set(" \t\r\n{}=[]#")
_WORD_CHARS = re.compile(r"[A-Za-z0-9_+\-.:,;|]")


def tokenize(text: str) -> list[Token]:
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            tokens.append(Token("NEWLINE", "\n", line, col))
            i, line, col = i + 1, line + 1, 1
        elif ch in " \t\r":
            i, col = i + 1, col + 1
        elif ch == "#":
            while i < n and text[i] != "\n":
                i, col = i + 1, col + 1
        elif ch in "{}=":
            tokens.append(Token({"{": "LBRACE", "}": "RBRACE", "=": "EQ"}[ch], ch, line, col))
            i, col = i + 1, col + 1
        elif ch == "[":
            start_line, start_col = line, col
            j = i + 1
            while j < n and text[j] != "]":
                if text[j] == "[" or text[j] == "#":
                    raise ScenarioError([Diagnostic(line, col, "lexical", f"unexpected {text[j]!r} inside brackets")])
                if text[j] == "\n":
                    line, col = line + 1, 0
                j += 1
                col += 1
            if j >= n:
                raise ScenarioError([Diagnostic(start_line, start_col, "lexical", "unterminated '['")])
            tokens.append(Token("BRACKET", text[i + 1:j], start_line, start_col))
            i, col = j + 1, col + 1
        elif ch == "]":
            raise ScenarioError([Diagnostic(line, col, "lexical", "unmatched ']'")])
        else:
            j = i
            while j < n and text[j] not in _WORD_STOP:
                if not _WORD_CHARS.match(text[j]):
                    raise ScenarioError([Diagnostic(line, col + j - i, "lexical",
                                                    f"unexpected character {text[j]!r}")])
                j += 1
            tokens.append(Token("WORD", text[i:j], line, col))
            col += j - i
            i = j
    tokens.append(Token("EOF", "", line, col))
    return tokens


# --------------------------------------------------------------------------
# parser

_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_INT = re.compile(r"^\d+$")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_+\-.]*$")


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    # token helpers
    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        tok = self.toks[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def fail(self, tok: Token, message: str):
        raise ScenarioError([Diagnostic(tok.line, tok.col, "syntax", message)])

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind.lower()
            got = tok.text if tok.kind == "WORD" else tok.kind.lower()
            self.fail(tok, f"expected {want!r}, got {got!r}")
        return tok

    def skip_newlines(self):
        while self.peek().kind == "NEWLINE":
            self.next()

    def end_of_statement(self):
        tok = self.next()
        if tok.kind not in ("NEWLINE", "EOF"):
            self.fail(tok, f"unexpected {tok.text or tok.kind.lower()!r} at end of statement")

    def name(self) -> Token:
        tok = self.expect("WORD")
        if not _NAME.match(tok.text):
            self.fail(tok, f"invalid name {tok.text!r}")
        return tok

    def integer(self, tok: Token | None = None) -> int:
        tok = tok or self.expect("WORD")
        if not _INT.match(tok.text):
            self.fail(tok, f"expected a non-negative integer, got {tok.text!r}")
        return int(tok.text)

    def key_value(self, key: str) -> Token:
        self.expect("WORD", key)
        self.expect("EQ")
        return self.expect("WORD")

    # grammar
    def file(self):
        dims = None
        dims_tok = None
        states, protocols, analyses = [], [], []
        while True:
            self.skip_newlines()
            tok = self.peek()
            if tok.kind == "EOF":
                break
            if tok.kind != "WORD":
                self.fail(tok, f"expected a statement, got {tok.kind.lower()!r}")
            kw = tok.text
            if kw == "parties":
                self.next()
                if dims is not None:
                    self.fail(tok, "duplicate 'parties' declaration")
                dims_tok = tok
                ds = []
                while self.peek().kind == "WORD":
                    ds.append(self.integer())
                if not ds:
                    self.fail(tok, "'parties' needs at least one dimension")
                dims = tuple(ds)
                self.end_of_statement()
            elif kw == "state":
                states.append(self.state())
            elif kw == "protocol":
                protocols.append(self.protocol())
            elif kw == "analyze":
                analyses.append(self.analyze())
            else:
                self.fail(tok, f"unknown statement {kw!r}")
        return dims, dims_tok, states, protocols, analyses

    def state(self) -> StateDecl:
        kw = self.expect("WORD", "state")
        name = self.name().text
        self.expect("EQ")
        tok = self.expect("WORD")
        text = tok.text
        if text.startswith("bell:"):
            alias = text[5:]
            if alias not in BELL_ALIASES:
                self.fail(tok, f"unknown Bell state {alias!r}")
            decl = StateDecl(name, "bell", alias, kw.line)
        elif text.startswith("basis:"):
            idx = text[6:]
            if not _INT.match(idx):
                self.fail(tok, f"basis index must be an integer, got {idx!r}")
            decl = StateDecl(name, "basis", int(idx), kw.line)
        elif text == "psi4":
            decl = StateDecl(name, "psi4", None, kw.line)
        elif text == "amps":
            br = self.expect("BRACKET")
            decl = StateDecl(name, "amps", self.complex_list(br), kw.line)
        else:
            self.fail(tok, f"unknown state constructor {text!r}")
        self.end_of_statement()
        return decl

    def complex_list(self, br: Token) -> tuple[complex, ...]:
        entries = [e.strip() for e in br.text.split(";")]
        if entries and entries[-1] == "" and len(entries) > 1:
            entries.pop()
        values = []
        for e in entries:
            parts = [p.strip() for p in e.split(",")]
            if len(parts) not in (1, 2) or not all(_NUMBER.match(p) for p in parts):
                raise ScenarioError([Diagnostic(br.line, br.col, "syntax", f"bad complex literal {e!r}")])
            re_, im = float(parts[0]), float(parts[1]) if len(parts) == 2 else 0.0
            values.append(complex(re_, im))
        return tuple(values)

    def protocol(self) -> ProtocolDecl:
        kw = self.expect("WORD", "protocol")
        name = self.name().text
        question = None
        if self.peek().kind == "WORD" and self.peek().text == "for":
            question = self.integer(self.key_value("for"))
        tok = self.next()
        if tok.kind == "EQ":
            ref = self.expect("WORD")
            if not ref.text.startswith("product:") or not _INT.match(ref.text[8:]):
                self.fail(ref, f"expected 'product:<question>', got {ref.text!r}")
            body = ProductRef(int(ref.text[8:]))
        elif tok.kind == "LBRACE":
            self.skip_newlines()
            body = self.tree()
            self.skip_newlines()
            self.expect("RBRACE")
        else:
            self.fail(tok, "expected '{' or '=' after protocol name")
        self.end_of_statement()
        return ProtocolDecl(name, question, body, kw.line)

    def tree(self) -> TreeAst:
        tok = self.expect("WORD")
        if tok.text == "answer":
            val = self.expect("WORD")
            v = val.text
            if v not in ("0", "1", "inconclusive") and not (v.startswith("label:") and _NAME.match(v[6:])):
                self.fail(val, f"bad answer {v!r}")
            return AnswerAst(v, tok.line)
        if tok.text != "measure":
            self.fail(tok, f"expected 'measure' or 'answer', got {tok.text!r}")
        party = self.integer(self.key_value("party"))
        inst_tok = self.key_value("instrument")
        spec = self.instrument(inst_tok)
        self.expect("LBRACE")
        outcomes = []
        while True:
            self.skip_newlines()
            if self.peek().kind == "RBRACE":
                self.next()
                break
            self.expect("WORD", "outcome")
            label = self.expect("WORD")
            self.expect("LBRACE")
            self.skip_newlines()
            body = self.tree()
            self.skip_newlines()
            self.expect("RBRACE")
            outcomes.append((label.text, body))
        wanted = spec.outcome_labels()
        got = [lab for lab, _ in outcomes]
        if sorted(got) != sorted(wanted):
            self.fail(tok, f"branch count: instrument outcomes {list(wanted)}, blocks {got}")
        return MeasureAst(party, spec, tuple(outcomes), tok.line)

    def instrument(self, tok: Token) -> InstrumentSpec:
        text = tok.text
        if text.startswith("pauli:"):
            axis = text[6:]
            if axis not in ("x", "y", "z"):
                self.fail(tok, f"unknown Pauli axis {axis!r}")
            return InstrumentSpec("pauli", axis=axis)
        if text == "projectors:":
            br = self.expect("BRACKET")
            kets = []
            for part in br.text.split("|"):
                part = part.strip()
                if part == "rest":
                    kets.append(None)
                else:
                    kets.append(self.complex_list(Token("BRACKET", part, br.line, br.col)))
            return InstrumentSpec("projectors", kets=tuple(kets))
        self.fail(tok, f"unknown instrument {text!r}")

    def analyze(self) -> AnalyzeDecl:
        kw = self.expect("WORD", "analyze")
        kind = self.expect("WORD")
        if kind.text not in ANALYSES:
            self.fail(kind, f"unknown analysis {kind.text!r}")
        params = []
        while self.peek().kind == "WORD":
            key = self.next()
            self.expect("EQ")
            params.append((key.text, self.expect("WORD").text))
        self.end_of_statement()
        return AnalyzeDecl(kind.text, tuple(params), kw.line)


# --------------------------------------------------------------------------
# semantic checks


def _walk_trees(ast) -> Iterator[MeasureAst]:
    if isinstance(ast, MeasureAst):
        yield ast
        for _, body in ast.outcomes:
            yield from _walk_trees(body)


def _check(sf: ScenarioFile, dims_line: int) -> list[Diagnostic]:
    diags: list[Diagnostic] = []

    def err(line, msg):
        diags.append(Diagnostic(line, 1, "semantic", msg))

    try:
        layout = PartyLayout(sf.dims)
    except ValueError as e:
        return [Diagnostic(dims_line, 1, "semantic", f"dimension: {e}")]
    if layout.total_dim > MAX_TOTAL_DIM:
        return [Diagnostic(dims_line, 1, "semantic",
                           f"dimension: total dimension {layout.total_dim} exceeds {MAX_TOTAL_DIM}")]
    if not sf.states:
        err(dims_line, "empty scenario: no states declared")
        return diags

    seen = set()
    built = []
    for decl in sf.states:
        if decl.name in seen:
            err(decl.line, f"duplicate state name {decl.name!r}")
            continue
        seen.add(decl.name)
        try:
            s = build_state(decl, layout)
        except ValueError as e:
            kind = "norm" if "norm" in str(e) else "dimension"
            err(decl.line, f"{kind}: state {decl.name}: {e}")
            continue
        built.append((decl, s))
    for i in range(len(built)):
        for j in range(i + 1, len(built)):
            (da, a), (db, b) = built[i], built[j]
            ov = abs(a.inner(b))
            if ov >= ATOL:
                err(db.line, f"orthogonality: states {da.name} and {db.name} overlap |<.|.>| = {ov:.3g}")
    if diags:
        return diags

    N = len(sf.states)
    names = set()
    for p in sf.protocols:
        if p.name in names:
            err(p.line, f"duplicate protocol name {p.name!r}")
        names.add(p.name)
        if p.question is not None and not 1 <= p.question <= N:
            err(p.line, f"protocol {p.name}: question {p.question} out of range 1..{N}")
        if isinstance(p.body, ProductRef):
            q = p.body.question
            if not 1 <= q <= N:
                err(p.line, f"protocol {p.name}: product question {q} out of range 1..{N}")
            elif not is_fully_product(built[q - 1][1]):
                err(p.line, f"protocol {p.name}: state {sf.states[q - 1].name} is not fully product")
            continue
        for node in _walk_trees(p.body):
            if not 0 <= node.party < layout.n_parties:
                err(node.line, f"dimension: protocol {p.name}: party {node.party} not in layout")
                continue
            d = layout.dims[node.party]
            spec = node.instrument
            if spec.kind == "pauli" and d != 2:
                err(node.line, f"dimension: protocol {p.name}: Pauli measurement on a {d}-level party")
            if spec.kind == "projectors":
                if any(k is not None and len(k) != d for k in spec.kets):
                    err(node.line, f"dimension: protocol {p.name}: projector kets must have {d} entries")
                    continue
                try:
                    build_instrument(spec, d)
                except ValueError as e:
                    err(node.line, f"protocol {p.name}: invalid projectors: {e}")
    by_name = {p.name: p for p in sf.protocols}
    for a in sf.analyses:
        for key, value in a.params:
            if key in ("question", "party") and not _INT.match(value):
                err(a.line, f"analyze {a.kind}: {key} must be an integer")
            elif key == "question" and not 1 <= int(value) <= N:
                err(a.line, f"analyze {a.kind}: question {value} out of range 1..{N}")
            elif key == "party" and not int(value) < layout.n_parties:
                err(a.line, f"analyze {a.kind}: party {value} not in layout")
            elif key == "protocol" and value not in by_name:
                err(a.line, f"analyze {a.kind}: unknown protocol {value!r}")
    return diags


def parse_scenario(text: str) -> ScenarioFile:
    """Parse and check a scenario file; raise :class:`ScenarioError` with diagnostics."""
    tokens = tokenize(text)
    if all(t.kind in ("NEWLINE", "EOF") for t in tokens):
        raise ScenarioError([Diagnostic(1, 1, "semantic", "empty scenario")])
    dims, dims_tok, states, protocols, analyses = _Parser(tokens).file()
    if dims is None:
        raise ScenarioError([Diagnostic(1, 1, "semantic", "missing 'parties' declaration")])
    sf = ScenarioFile(dims, tuple(states), tuple(protocols), tuple(analyses))
    diags = _check(sf, dims_tok.line)
    if diags:
        raise ScenarioError(diags)
    return sf


# --------------------------------------------------------------------------
# serializer


def _fmt_complex_list(values) -> str:
    values = [complex(c) for c in values]
    return "; ".join(f"{c.real!r},{c.imag!r}" for c in values)


def _fmt_instrument(spec: InstrumentSpec) -> str:
    if spec.kind == "pauli":
        return f"pauli:{spec.axis}"
    parts = ["rest" if k is None else _fmt_complex_list(k) for k in spec.kets]
    return "projectors:[" + " | ".join(parts) + "]"


def _fmt_tree(ast: TreeAst, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(ast, AnswerAst):
        return [f"{pad}answer {ast.value}"]
    lines = [f"{pad}measure party={ast.party} instrument={_fmt_instrument(ast.instrument)} {{"]
    for label, body in ast.outcomes:
        lines.append(f"{pad}  outcome {label} {{")
        lines += _fmt_tree(body, indent + 2)
        lines.append(f"{pad}  }}")
    lines.append(f"{pad}}}")
    return lines


def _fmt_state(s: StateDecl) -> str:
    if s.kind == "bell":
        rhs = f"bell:{s.arg}"
    elif s.kind == "basis":
        rhs = f"basis:{s.arg}"
    elif s.kind == "psi4":
        rhs = "psi4"
    else:
        rhs = f"amps [{_fmt_complex_list(s.arg)}]"
    return f"state {s.name} = {rhs}"


def serialize_scenario(sf: ScenarioFile) -> str:
    lines = ["parties " + " ".join(str(d) for d in sf.dims)]
    lines += [_fmt_state(s) for s in sf.states]
    for p in sf.protocols:
        head = f"protocol {p.name}" + (f" for={p.question}" if p.question is not None else "")
        if isinstance(p.body, ProductRef):
            lines.append(f"{head} = product:{p.body.question}")
        else:
            lines.append(head + " {")
            lines += _fmt_tree(p.body, 1)
            lines.append("}")
    for a in sf.analyses:
        lines.append(" ".join([f"analyze {a.kind}"] + [f"{k}={v}" for k, v in a.params]))
    return "\n".join(lines) + "\n"


def tree_to_ast(tree: ProtocolTree) -> TreeAst:
    """Syntax tree for a protocol whose instruments came from Pauli or ket constructors."""
    if isinstance(tree, Leaf):
        a = tree.answer
        if isinstance(a, Label):
            return AnswerAst(f"label:{a.name}")
        if isinstance(a, _Inconclusive):
            return AnswerAst("inconclusive")
        return AnswerAst(str(int(a)))
    src = tree.instrument.source
    if isinstance(src, str) and src.startswith("pauli:"):
        spec = InstrumentSpec("pauli", axis=src[6:])
        labels = ["+1" if lab == 1 else "-1" for lab in tree.instrument.labels]
    elif isinstance(src, tuple) and src and src[0] == "kets":
        spec = InstrumentSpec("projectors", kets=src[1])
        labels = [str(i) for i in range(len(src[1]))]
    else:
        raise ValueError("instrument has no textual form")
    return MeasureAst(tree.party, spec, tuple(
        (lab, tree_to_ast(child)) for lab, child in zip(labels, tree.children)))


# --------------------------------------------------------------------------
# reports

SIG_DIGITS = 12


def _jsonable(x):
    if isinstance(x, lra.Verdict):
        return {"kind": x.kind, "pass": bool(x.passed), "message": x.message,
                "evidence": _jsonable(x.evidence)}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_jsonable(float(x.real)), _jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        if math.isnan(x):
            return "NaN"
        r = float(f"{x:.{SIG_DIGITS}g}")
        return 0.0 if r == 0 else r
    if x is None or isinstance(x, str):
        return x
    return str(x)


@dataclass
class Report:
    command: str
    verdicts: list[dict]
    passed: bool

    @classmethod
    def build(cls, command: str, verdicts: list[tuple[str, object]]) -> Report:
        """``verdicts`` is a list of (analysis name, Verdict or dict with a "pass" key)."""
        rows = []
        for analysis, v in verdicts:
            row = {"analysis": analysis}
            row.update(_jsonable(v))
            rows.append(row)
        return cls(command, rows, all(r.get("pass", False) for r in rows))

    def to_json(self) -> str:
        return json.dumps({"command": self.command, "verdicts": self.verdicts, "pass": self.passed},
                          indent=2, allow_nan=False)

    @classmethod
    def from_json(cls, text: str) -> Report:
        d = json.loads(text)
        return cls(d["command"], d["verdicts"], d["pass"])

    def to_text(self) -> str:
        lines = [f"command: {self.command}"]
        for v in self.verdicts:
            status = "PASS" if v.get("pass") else "FAIL"
            head = f"[{status}] {v.get('analysis')}"
            if "kind" in v:
                head += f": {v['kind']}"
            if v.get("message"):
                head += f" ({v['message']})"
            lines.append(head)
            body = v.get("evidence", {k: val for k, val in v.items() if k not in ("analysis", "pass")})
            lines += _text_lines(body, 1)
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _text_lines(obj, depth: int) -> list[str]:
    pad = "  " * depth
    out = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, dict) and v:
                out.append(f"{pad}{k}:")
                out += _text_lines(v, depth + 1)
            else:
                out.append(f"{pad}{k}: {_short(v)}")
    else:
        out.append(f"{pad}{_short(obj)}")
    return out


def _short(v) -> str:
    s = json.dumps(v)
    return s if len(s) <= 160 else s[:157] + "..."
