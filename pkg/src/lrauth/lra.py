"""Local random authentication of orthogonal state sets.

A scenario is an orthogonal set {psi_1, ..., psi_N}; question ``k`` (1-based)
asks the separated parties "is the shared state psi_k?". A protocol tree
answers it perfectly when it outputs 1 with certainty on psi_k and never
outputs 1 on any other member.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import null_space

from .locc import (
    INCONCLUSIVE,
    Label,
    Leaf,
    Node,
    ProtocolTree,
    map_leaves,
    measure_then,
    simulate,
    validate_locc_structure,
)
from .measure import Instrument, pauli_measurement
from .qcore import (
    ATOL,
    Bipartition,
    PartyLayout,
    PureState,
    basis_state,
    bell_state,
    is_fully_product,
    product_factors,
    psi4,
    schmidt_rank,
)

COMPLETE = "complete_lra_verified"
PARTIAL = "partial_lra"
NO_PARTIAL = "no_partial_lra_entangled_basis"
TRIVIAL = "trivial_constraint_space"
NONTRIVIAL = "nontrivial_constraint_space"
INCONCLUSIVE_VERDICT = "inconclusive"
AUTHENTICATED = "authenticated"
NOT_AUTHENTICATED = "not_authenticated"
CONCLUSIVE = "conclusive_discrimination"


@dataclass(frozen=True, eq=False)
class LraScenario:
    layout: PartyLayout
    states: tuple[PureState, ...]
    names: tuple[str, ...]

    def __init__(self, states: Sequence[PureState], names: Sequence[str] | None = None, layout=None):
        states = tuple(states)
        if not states:
            raise ValueError("scenario needs at least one state")
        layout = states[0].layout if layout is None else (
            layout if isinstance(layout, PartyLayout) else PartyLayout(layout))
        names = tuple(names) if names is not None else tuple(f"psi{i + 1}" for i in range(len(states)))
        if len(names) != len(states):
            raise ValueError("need one name per state")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate state names {names}")
        for name, s in zip(names, states):
            if s.layout != layout:
                raise ValueError(f"state {name} has layout {s.layout.dims}, expected {layout.dims}")
        for i in range(len(states)):
            for j in range(i + 1, len(states)):
                ov = abs(states[i].inner(states[j]))
                if ov >= ATOL:
                    raise ValueError(
                        f"orthogonality: states {names[i]} and {names[j]} overlap |<.|.>| = {ov:.3g}")
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "names", names)

    def __len__(self):
        return len(self.states)

    def state(self, k: int) -> PureState:
        self._check_question(k)
        return self.states[k - 1]

    def name(self, k: int) -> str:
        self._check_question(k)
        return self.names[k - 1]

    def _check_question(self, k: int) -> None:
        if not 1 <= k <= len(self.states):
            raise IndexError(f"question {k} out of range 1..{len(self.states)}")


Strategy = dict  # question index (1-based) -> ProtocolTree


@dataclass
class Verdict:
    kind: str
    passed: bool
    evidence: dict = field(default_factory=dict)
    message: str = ""


# --------------------------------------------------------------------------
# verification


def _yes_probabilities(scn: LraScenario, tree: ProtocolTree) -> list[float]:
    return [simulate(tree, s)[1] for s in scn.states]


def verify_authentication(scn: LraScenario, k: int, tree: ProtocolTree) -> Verdict:
    """Check that ``tree`` answers question ``k`` perfectly on every member."""
    scn._check_question(k)
    structure = validate_locc_structure(tree, scn.layout)
    if not structure.valid:
        return Verdict(NOT_AUTHENTICATED, False, {
            "question": k,
            "structure_violations": [f"{v.kind}: {v.message}" for v in structure.violations],
        }, "protocol tree is not a valid LOCC tree for this layout")
    probs = _yes_probabilities(scn, tree)
    ok_target = probs[k - 1] >= 1 - ATOL
    ok_others = all(p <= ATOL for j, p in enumerate(probs) if j != k - 1)
    passed = ok_target and ok_others
    return Verdict(AUTHENTICATED if passed else NOT_AUTHENTICATED, passed, {
        "question": k,
        "target": scn.name(k),
        "yes_probabilities": dict(zip(scn.names, probs)),
    })


def verify_complete_lra(scn: LraScenario, strategy: Strategy) -> Verdict:
    missing = [k for k in range(1, len(scn) + 1) if k not in strategy]
    if missing:
        raise KeyError(f"strategy has no protocol for questions {missing}")
    per_question = {k: verify_authentication(scn, k, strategy[k]) for k in range(1, len(scn) + 1)}
    ok = [k for k, v in per_question.items() if v.passed]
    evidence = {
        "authenticated": [scn.name(k) for k in ok],
        "questions": {scn.name(k): v.evidence for k, v in per_question.items()},
    }
    if len(ok) == len(scn):
        return Verdict(COMPLETE, True, evidence)
    if ok:
        return Verdict(PARTIAL, False, evidence, f"strategy authenticates {len(ok)} of {len(scn)} members")
    return Verdict(INCONCLUSIVE_VERDICT, False, evidence, "strategy authenticates no member")


# --------------------------------------------------------------------------
# constructive strategies


def product_authentication_protocol(scn: LraScenario, k: int) -> ProtocolTree:
    """Each party tests its own factor of a fully product psi_k.

    Party p measures {|x_p><x_p|, I - |x_p><x_p|}; the answer is 1 only if
    every party's projector clicks.
    """
    target = scn.state(k)
    if not is_fully_product(target):
        raise ValueError(f"state {scn.name(k)} is not fully product")
    factors = product_factors(target)

    def build(p: int) -> ProtocolTree:
        if p == len(factors):
            return Leaf(1)
        instr = Instrument.from_kets([factors[p], None], labels=("hit", "miss"))
        return measure_then(p, instr, {"hit": build(p + 1), "miss": Leaf(0)})

    return build(0)


def pauli_correlation_tree(axis: str, yes_on: int = -1) -> ProtocolTree:
    """Both qubits measure the same Pauli; answer 1 iff the outcome product equals ``yes_on``."""
    m = pauli_measurement(axis)
    return measure_then(0, m, lambda a: measure_then(
        1, m, lambda b: Leaf(1 if a * b == yes_on else 0)))


def bell_strategy() -> Strategy:
    """Pauli strategy for {phi+, phi-, psi+}: YY, XX and ZZ, answering yes on anticorrelation."""
    return {1: pauli_correlation_tree("y"), 2: pauli_correlation_tree("x"), 3: pauli_correlation_tree("z")}


def product_strategy(scn: LraScenario) -> Strategy:
    return {k: product_authentication_protocol(scn, k) for k in range(1, len(scn) + 1)}


# --------------------------------------------------------------------------
# standard scenarios


def bell_triple(layout=(2, 2)) -> LraScenario:
    """{phi+, phi-, psi+}: not perfectly LOCC distinguishable, yet completely authenticable."""
    names = ("phi_plus", "phi_minus", "psi_plus")
    return LraScenario([bell_state(n, layout) for n in names], names)


def bell_product_triple() -> LraScenario:
    """{phi+, phi-, |01>}."""
    return LraScenario(
        [bell_state("phi_plus"), bell_state("phi_minus"), basis_state((2, 2), 1)],
        ("phi_plus", "phi_minus", "ket01"))


def bell_basis(layout=(2, 2)) -> LraScenario:
    names = ("phi_plus", "phi_minus", "psi_plus", "psi_minus")
    return LraScenario([bell_state(n, layout) for n in names], names)


def computational_basis(layout=(2, 2)) -> LraScenario:
    layout = layout if isinstance(layout, PartyLayout) else PartyLayout(layout)
    dig = [np.unravel_index(i, layout.dims) for i in range(layout.total_dim)]
    return LraScenario([basis_state(layout, i) for i in range(layout.total_dim)],
                       ["ket" + "".join(str(int(x)) for x in d) for d in dig])


def qutrit_bell_psi4_set() -> LraScenario:
    """phi+, phi-, psi+ inside C3 x C3 together with psi4 = (|01> - |10> + |22>)/sqrt(3)."""
    names = ("phi_plus", "phi_minus", "psi_plus")
    states = [bell_state(n, (3, 3)) for n in names] + [psi4()]
    return LraScenario(states, names + ("psi4",))


# --------------------------------------------------------------------------
# first-round orthogonality constraints


def hermitian_basis(d: int) -> list[np.ndarray]:
    """Frobenius-orthonormal basis of d x d Hermitian matrices."""
    basis = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1
        basis.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[i, j] = s[j, i] = 1 / math.sqrt(2)
            a = np.zeros((d, d), dtype=complex)
            a[i, j], a[j, i] = -1j / math.sqrt(2), 1j / math.sqrt(2)
            basis += [s, a]
    return basis


@dataclass
class ConstraintSpace:
    basis: list[np.ndarray]
    trivial: bool
    contains_identity: bool
    constraint_rank: int
    max_residual: float

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _party_matrix(s: PureState, party: int) -> np.ndarray:
    return np.moveaxis(s.tensor, party, 0).reshape(s.layout.dims[party], -1)


def orthogonality_constraint_space(scn: LraScenario, k: int, party: int,
                                   tol: float = 1e-9) -> ConstraintSpace:
    """Hermitian H on ``party`` with <psi_j| H x I |psi_k> = 0 for every j != k.

    Any first-round effect M^dag M of a perfect authentication protocol for
    psi_k started by ``party`` must lie in this real vector space. When the
    space is span{I}, that party has no nontrivial first move.
    """
    target = scn.state(k)
    scn.layout.check_parties([party])
    d = scn.layout.dims[party]
    herm = hermitian_basis(d)
    psi_k = _party_matrix(target, party)
    rows = []
    for j, other in enumerate(scn.states):
        if j == k - 1:
            continue
        cross = psi_k @ _party_matrix(other, party).conj().T  # <psi_j|H x I|psi_k> = Tr(H cross)
        coeffs = np.array([np.trace(b @ cross) for b in herm])
        rows += [coeffs.real, coeffs.imag]
    A = np.array(rows).reshape(-1, d * d)
    if A.shape[0] == 0:
        null = np.eye(d * d)
        rank = 0
    else:
        null = null_space(A, rcond=tol)
        rank = d * d - null.shape[1]

    # rotate the basis so that the identity (when present) comes first
    ident = np.array([np.trace(b) for b in herm]).real / math.sqrt(d)
    proj = null.T @ ident
    contains_identity = abs(np.linalg.norm(proj) - 1) < 1e-8
    if contains_identity and null.shape[1] > 0:
        u, _, _ = np.linalg.svd(null - np.outer(ident, proj), full_matrices=False)
        null = np.column_stack([ident, u[:, : null.shape[1] - 1]])

    mats = [sum(c * b for c, b in zip(col, herm)) for col in null.T]
    residual = float(np.abs(A @ null).max()) if A.size and null.size else 0.0
    trivial = False
    if len(mats) == 1:
        m = mats[0]
        trivial = bool(np.abs(m - np.trace(m) / d * np.eye(d)).max() < 1e-8)
    return ConstraintSpace(mats, trivial, contains_identity, rank, residual)


def constraint_verdict(scn: LraScenario, k: int, party: int) -> Verdict:
    """Verdict wrapper; ``passed`` reports a sound computation, ``kind`` the triviality."""
    space = orthogonality_constraint_space(scn, k, party)
    sound = space.contains_identity and space.max_residual <= ATOL
    return Verdict(TRIVIAL if space.trivial else NONTRIVIAL, sound, {
        "question": k,
        "party": party,
        "dimension": space.dimension,
        "contains_identity": space.contains_identity,
        "basis": space.basis,
        "residual": space.max_residual,
    }, "trivial: span{I}" if space.trivial else f"nontrivial: dimension {space.dimension}")


# --------------------------------------------------------------------------
# conclusive discrimination


@dataclass
class ConclusiveResult:
    tree: ProtocolTree
    success_probability: float
    mislabel_probability: float
    detail: dict = field(default_factory=dict)


def evaluate_conclusive(scn: LraScenario, tree: ProtocolTree) -> ConclusiveResult:
    """Success and worst mislabelling probability of a conclusive tree under a uniform prior.

    Leaves must be ``Label(name)`` for scenario members or ``INCONCLUSIVE``.
    """
    N = len(scn)
    labels = {Label(n): i for i, n in enumerate(scn.names)}
    success = 0.0
    worst = 0.0
    detail = {}
    for i, s in enumerate(scn.states):
        dist = simulate(tree, s)
        row = {}
        for ans, p in dist.probabilities.items():
            if ans is INCONCLUSIVE:
                continue
            if ans not in labels:
                raise ValueError(f"leaf answer {ans!r} is not a member label")
            row[scn.names[labels[ans]]] = p
            if labels[ans] == i:
                success += p / N
            else:
                worst = max(worst, p)
        detail[scn.names[i]] = row
    return ConclusiveResult(tree, success, worst, detail)


def lra_to_conclusive(scn: LraScenario, k: int, tree: ProtocolTree) -> ConclusiveResult:
    """Turn a perfect authentication of psi_k into conclusive identification of psi_k."""
    if not verify_authentication(scn, k, tree).passed:
        raise ValueError(f"tree does not authenticate {scn.name(k)}")
    label = Label(scn.name(k))
    conclusive = map_leaves(tree, lambda a: label if a == 1 else INCONCLUSIVE)
    return evaluate_conclusive(scn, conclusive)


def level_click_tree(level: int, target: str, dims=(3, 3)) -> ProtocolTree:
    """Every party projects onto |level>; all clicking identifies ``target``."""

    def build(p: int) -> ProtocolTree:
        if p == len(dims):
            return Leaf(Label(target))
        ket = np.zeros(dims[p], dtype=complex)
        ket[level] = 1
        instr = Instrument.from_kets([ket, None], labels=("hit", "miss"))
        return measure_then(p, instr, {"hit": build(p + 1), "miss": Leaf(INCONCLUSIVE)})

    return build(0)


# --------------------------------------------------------------------------
# complete bases


def classify_complete_basis(scn: LraScenario) -> Verdict:
    """Classify a complete orthonormal basis by its fully product members.

    A complete basis with no fully product member admits no local
    authentication of any member at all. Product members can always be
    authenticated, and the evidence carries verified trees for each.
    """
    D = scn.layout.total_dim
    N = len(scn)
    product = [is_fully_product(s) for s in scn.states]
    single_cut_ranks = {
        name: [schmidt_rank(s, Bipartition(scn.layout, {p})) for p in range(scn.layout.n_parties)]
        if scn.layout.n_parties > 1 else [1]
        for name, s in zip(scn.names, scn.states)
    }
    evidence = {"n_states": N, "total_dim": D, "single_party_schmidt_ranks": single_cut_ranks}
    if N < D:
        return Verdict(INCONCLUSIVE_VERDICT, False, evidence, "set is not a complete basis")
    if not any(product):
        return Verdict(NO_PARTIAL, True, evidence,
                       "complete basis without fully product members: no member is locally authenticable")
    members = [k for k in range(1, N + 1) if product[k - 1]]
    checks = {scn.name(k): verify_authentication(scn, k, product_authentication_protocol(scn, k)).passed
              for k in members}
    evidence["authenticatable"] = [scn.name(k) for k in members]
    evidence["verified"] = checks
    evidence["complete"] = len(members) == N
    return Verdict(PARTIAL, all(checks.values()), evidence,
                   f"{len(members)} fully product member(s) authenticable")
