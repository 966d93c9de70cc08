"""Local measurements: POVMs, Kraus instruments and the Born rule."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, NamedTuple, Sequence

import numpy as np

from .qcore import ATOL, PartyLayout, PureState, is_hermitian, psd_sqrt, random_unitary

PROB_CUTOFF = 1e-12

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _mat(op) -> np.ndarray:
    op = np.array(op, dtype=complex)
    if op.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {op.shape}")
    op.setflags(write=False)
    return op


@dataclass(frozen=True, eq=False)
class POVM:
    """Ordered effects on one party. Not validated on construction; see :func:`validate_povm`."""

    effects: tuple[np.ndarray, ...]

    def __init__(self, effects: Sequence[np.ndarray]):
        effects = tuple(_mat(e) for e in effects)
        if not effects:
            raise ValueError("POVM needs at least one effect")
        shapes = {e.shape for e in effects}
        if len(shapes) != 1 or effects[0].shape[0] != effects[0].shape[1]:
            raise ValueError(f"effects must be square and of equal size, got {sorted(shapes)}")
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]


@dataclass
class PovmCertificate:
    valid: bool
    hermiticity_residual: float
    min_eigenvalue: float
    max_eigenvalue: float
    completeness_residual: float
    violations: list[str] = field(default_factory=list)


def validate_povm(p: POVM, atol: float = ATOL) -> PovmCertificate:
    """Check Hermiticity, positivity and completeness of every effect. Never raises."""
    herm = max(float(np.abs(e - e.conj().T).max()) for e in p.effects)
    eigs = np.concatenate([np.linalg.eigvalsh((e + e.conj().T) / 2) for e in p.effects])
    completeness = float(np.abs(sum(p.effects) - np.eye(p.dim)).max())
    violations = []
    if herm > atol:
        violations.append("hermiticity")
    if eigs.min() < -atol:
        violations.append("positivity")
    if eigs.max() > 1 + atol:
        violations.append("effect bound")
    if completeness > atol:
        violations.append("completeness")
    return PovmCertificate(
        valid=not violations,
        hermiticity_residual=herm,
        min_eigenvalue=float(eigs.min()),
        max_eigenvalue=float(eigs.max()),
        completeness_residual=completeness,
        violations=violations,
    )


def completeness_residual(kraus: Sequence[np.ndarray]) -> float:
    d = kraus[0].shape[1]
    return float(np.abs(sum(k.conj().T @ k for k in kraus) - np.eye(d)).max())


@dataclass(frozen=True, eq=False)
class Instrument:
    """Kraus operators on a single party, one per outcome label.

    ``source`` optionally records a textual description (e.g. ``"pauli:z"``),
    used by the scenario serializer.
    """

    kraus: tuple[np.ndarray, ...]
    labels: tuple[Hashable, ...]
    source: object = None

    def __init__(self, kraus, labels=None, source=None, check: bool = True):
        kraus = tuple(_mat(k) for k in kraus)
        if not kraus:
            raise ValueError("instrument needs at least one Kraus operator")
        d = kraus[0].shape[1]
        if any(k.shape != (d, d) for k in kraus):
            raise ValueError("Kraus operators must all be square and of equal size")
        labels = tuple(range(len(kraus))) if labels is None else tuple(labels)
        if len(labels) != len(kraus):
            raise ValueError("need one label per Kraus operator")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate outcome labels {labels}")
        if check:
            res = completeness_residual(kraus)
            if res > ATOL:
                raise ValueError(f"Kraus operators are not complete (residual {res:.3g})")
        object.__setattr__(self, "kraus", kraus)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "source", source)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.kraus)

    def effects(self) -> POVM:
        return POVM([k.conj().T @ k for k in self.kraus])

    @classmethod
    def from_povm(cls, povm: POVM, labels=None, source=None) -> Instrument:
        """Refine a POVM through the PSD square root of each effect."""
        return cls([psd_sqrt(e) for e in povm.effects], labels, source)

    @classmethod
    def projective(cls, projectors: Sequence[np.ndarray], labels=None, source=None) -> Instrument:
        for P in projectors:
            P = np.asarray(P)
            if not is_hermitian(P) or not np.allclose(P @ P, P, atol=ATOL, rtol=0):
                raise ValueError("projective instrument needs Hermitian idempotent operators")
        return cls(projectors, labels, source)

    @classmethod
    def from_kets(cls, kets: Sequence[np.ndarray | None], labels=None, dim: int | None = None) -> Instrument:
        """Rank-one projectors onto ``kets``; a ``None`` entry becomes the complement.

        At most one ``None`` is allowed, and the kets must be orthonormal.
        ``dim`` is only needed when every entry is ``None``.
        """
        sizes = [np.asarray(k).size for k in kets if k is not None]
        d = sizes[0] if sizes else dim
        if d is None:
            raise ValueError("cannot infer the dimension of a complement-only measurement")
        holes = [i for i, k in enumerate(kets) if k is None]
        if len(holes) > 1:
            raise ValueError("only one complement outcome allowed")
        projectors = []
        for k in kets:
            if k is None:
                projectors.append(np.zeros((d, d)))
                continue
            v = np.asarray(k, dtype=complex).reshape(d)
            if np.linalg.norm(v) < ATOL:
                raise ValueError("projector ket is zero")
            v = v / np.linalg.norm(v)
            projectors.append(np.outer(v, v.conj()))
        if holes:
            projectors[holes[0]] = np.eye(d) - sum(projectors)
        source = ("kets", tuple(
            None if k is None else tuple(complex(x) for x in np.asarray(k, complex).reshape(d))
            for k in kets))
        return cls.projective(projectors, labels, source)


def pauli_measurement(axis: str) -> Instrument:
    """Projective measurement of a Pauli observable; outcomes labelled +1 and -1."""
    try:
        sigma = PAULI[axis]
    except KeyError:
        raise ValueError(f"unknown Pauli axis {axis!r}") from None
    eye = np.eye(2)
    return Instrument.projective(
        [(eye + sigma) / 2, (eye - sigma) / 2], labels=(+1, -1), source=f"pauli:{axis}"
    )


def embed_local(op: np.ndarray, party: int, layout) -> np.ndarray:
    """I x .. x op x .. x I with ``op`` acting on ``party``."""
    layout = layout if isinstance(layout, PartyLayout) else PartyLayout(layout)
    layout.check_parties([party])
    op = np.asarray(op, dtype=complex)
    d = layout.dims[party]
    if op.shape != (d, d):
        raise ValueError(f"operator shape {op.shape} does not match party {party} dimension {d}")
    before = int(np.prod(layout.dims[:party], dtype=int))
    after = int(np.prod(layout.dims[party + 1 :], dtype=int))
    return np.kron(np.kron(np.eye(before), op), np.eye(after))


def apply_local(op: np.ndarray, party: int, state_vec: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """Apply a local matrix to a flat amplitude vector without forming the D x D operator."""
    t = np.asarray(state_vec).reshape(dims)
    t = np.tensordot(op, t, axes=([1], [party]))
    return np.moveaxis(t, 0, party).reshape(-1)


class Branch(NamedTuple):
    label: Hashable
    probability: float
    post_state: PureState | None


def born_probabilities(instr: Instrument, party: int, state: PureState) -> list[Branch]:
    """Outcome probabilities and normalized post-measurement states.

    Branches with probability at or below 1e-12 carry no post state.
    """
    layout = state.layout
    layout.check_parties([party])
    if instr.dim != layout.dims[party]:
        raise ValueError(
            f"instrument dimension {instr.dim} does not match party {party} dimension {layout.dims[party]}"
        )
    out = []
    for label, k in zip(instr.labels, instr.kraus):
        v = apply_local(k, party, state.amplitudes, layout.dims)
        p = float(np.vdot(v, v).real)
        post = PureState(layout, v / np.sqrt(p)) if p > PROB_CUTOFF else None
        out.append(Branch(label, p, post))
    return out


def random_instrument(d: int, n_outcomes: int, rng: np.random.Generator) -> Instrument:
    """Kraus operators cut from a random (n_outcomes*d) x d isometry."""
    z = rng.normal(size=(n_outcomes * d, d)) + 1j * rng.normal(size=(n_outcomes * d, d))
    q, _ = np.linalg.qr(z)
    return Instrument([q[i * d : (i + 1) * d] for i in range(n_outcomes)])


def random_projective(d: int, n_outcomes: int, rng: np.random.Generator) -> Instrument:
    """Projectors onto a random basis, split into ``n_outcomes`` nonempty groups."""
    u = random_unitary(d, rng)
    cuts = np.sort(rng.choice(np.arange(1, d), size=n_outcomes - 1, replace=False)) if n_outcomes > 1 else []
    groups = np.split(np.arange(d), cuts)
    return Instrument.projective([u[:, g] @ u[:, g].conj().T for g in groups])
