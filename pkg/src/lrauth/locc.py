"""Finite adaptive LOCC protocols as outcome-branching trees.

Classical communication is implicit: every subtree may depend on the whole
outcome history above it. Simulation is exact (recursive Born rule).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Union

import numpy as np

from .measure import PROB_CUTOFF, Instrument, born_probabilities, completeness_residual
from .qcore import ATOL, DensityOperator, PartyLayout, PureState


@dataclass(frozen=True)
class Label:
    """A conclusive identification answer, e.g. ``Label("psi4")``."""

    name: str

    def __str__(self):
        return f"label:{self.name}"


class _Inconclusive:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INCONCLUSIVE"

    __str__ = lambda self: "inconclusive"  # noqa: E731

    def __reduce__(self):
        return (_Inconclusive, ())


INCONCLUSIVE = _Inconclusive()

Answer = Union[int, Label, _Inconclusive]


@dataclass(frozen=True)
class Leaf:
    answer: Answer


@dataclass(frozen=True, eq=False)
class Node:
    party: int
    instrument: Instrument
    children: tuple

    def __init__(self, party: int, instrument: Instrument, children):
        object.__setattr__(self, "party", int(party))
        object.__setattr__(self, "instrument", instrument)
        object.__setattr__(self, "children", tuple(children))

    def child(self, label: Hashable):
        return self.children[self.instrument.labels.index(label)]


ProtocolTree = Union[Leaf, Node]


def depth(tree: ProtocolTree) -> int:
    if isinstance(tree, Leaf):
        return 0
    return 1 + max((depth(c) for c in tree.children), default=0)


def map_leaves(tree: ProtocolTree, fn: Callable[[Answer], Answer]) -> ProtocolTree:
    """Copy of ``tree`` with every leaf answer replaced by ``fn(answer)``."""
    if isinstance(tree, Leaf):
        return Leaf(fn(tree.answer))
    return Node(tree.party, tree.instrument, [map_leaves(c, fn) for c in tree.children])


def measure_then(party: int, instrument: Instrument, branches: dict | Callable) -> Node:
    """Build a node from a label -> subtree mapping (or callable on the label)."""
    pick = branches if callable(branches) else branches.__getitem__
    return Node(party, instrument, [pick(lab) for lab in instrument.labels])


@dataclass
class Transcript:
    steps: tuple[tuple[int, Hashable], ...]
    answer: Answer
    probability: float


@dataclass
class AnswerDistribution:
    probabilities: dict
    transcripts: list[Transcript] = field(default_factory=list)
    pruned_mass: float = 0.0

    def __getitem__(self, answer) -> float:
        return self.probabilities.get(answer, 0.0)

    def total(self) -> float:
        return float(sum(self.probabilities.values()))


class LayoutMismatch(ValueError):
    pass


def _check_fits(tree: ProtocolTree, layout: PartyLayout) -> None:
    report = validate_locc_structure(tree, layout)
    for v in report.violations:
        if v.kind in ("party", "dimension"):
            raise LayoutMismatch(v.message)
        if v.kind in ("branch count", "node", "depth"):
            raise ValueError(f"malformed protocol tree at {v.path}: {v.message}")


def _walk(tree, state: PureState, weight: float, history: tuple, dist: AnswerDistribution, keep: bool):
    if isinstance(tree, Leaf):
        dist.probabilities[tree.answer] = dist.probabilities.get(tree.answer, 0.0) + weight
        if keep:
            dist.transcripts.append(Transcript(history, tree.answer, weight))
        return
    for branch, child in zip(born_probabilities(tree.instrument, tree.party, state), tree.children):
        if branch.post_state is None:
            dist.pruned_mass += weight * branch.probability
            continue
        _walk(child, branch.post_state, weight * branch.probability,
              history + ((tree.party, branch.label),), dist, keep)


def simulate(tree: ProtocolTree, state: PureState | DensityOperator,
             transcripts: bool = False) -> AnswerDistribution:
    """Exact answer distribution of ``tree`` on ``state``.

    Mixed inputs are handled by linearity over the eigendecomposition.
    Branches with probability below 1e-12 are dropped; their total is kept
    in ``pruned_mass``.
    """
    _check_fits(tree, state.layout)
    dist = AnswerDistribution({})
    if isinstance(state, PureState):
        _walk(tree, state, 1.0, (), dist, transcripts)
        return dist
    w, v = state.eigh()
    for lam, vec in zip(w, v.T):
        if lam <= PROB_CUTOFF:
            dist.pruned_mass += max(float(lam), 0.0)
            continue
        _walk(tree, PureState(state.layout, vec, normalize=True), float(lam), (), dist, transcripts)
    return dist


def answer_probability(tree: ProtocolTree, state, answer) -> float:
    return simulate(tree, state)[answer]


@dataclass
class Violation:
    path: tuple
    kind: str
    message: str


@dataclass
class StructureReport:
    valid: bool
    violations: list[Violation]
    depth: int


def validate_locc_structure(tree: ProtocolTree, layout, max_depth: int = 64) -> StructureReport:
    """Check party range, local dimensions, Kraus completeness, branch counts and leaves."""
    layout = layout if isinstance(layout, PartyLayout) else PartyLayout(layout)
    violations: list[Violation] = []
    deepest = 0

    def visit(t, path, level):
        nonlocal deepest
        deepest = max(deepest, level)
        if level > max_depth:
            violations.append(Violation(path, "depth", f"tree deeper than {max_depth}"))
            return
        if isinstance(t, Leaf):
            a = t.answer
            if not (isinstance(a, (Label, _Inconclusive)) or (isinstance(a, (int, np.integer)) and a in (0, 1))):
                violations.append(Violation(path, "answer", f"unsupported leaf answer {a!r}"))
            return
        if not isinstance(t, Node):
            violations.append(Violation(path, "node", f"not a protocol tree node: {t!r}"))
            return
        if not 0 <= t.party < layout.n_parties:
            violations.append(Violation(path, "party", f"party {t.party} not in layout {layout.dims}"))
        elif t.instrument.dim != layout.dims[t.party]:
            violations.append(Violation(
                path, "dimension",
                f"instrument dimension {t.instrument.dim} != party {t.party} dimension {layout.dims[t.party]}"))
        res = completeness_residual(t.instrument.kraus)
        if res > ATOL:
            violations.append(Violation(path, "completeness", f"sum K^dag K - I residual {res:.3g}"))
        if len(t.children) != t.instrument.n_outcomes:
            violations.append(Violation(
                path, "branch count",
                f"{t.instrument.n_outcomes} outcomes but {len(t.children)} children"))
        for lab, c in zip(t.instrument.labels, t.children):
            visit(c, path + ((t.party, lab),), level + 1)

    visit(tree, (), 0)
    return StructureReport(not violations, violations, deepest)
