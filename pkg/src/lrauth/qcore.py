"""Multipartite pure and mixed states over an ordered tensor layout.

All vectors and matrices use big-endian ordering: party 0 is the most
significant index of the flattened amplitude vector.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.stats import unitary_group

ATOL = 1e-9
RANK_TOL = 1e-9


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


# --------------------------------------------------------------------------
# operator predicates


def is_hermitian(op: np.ndarray, atol: float = ATOL) -> bool:
    op = np.asarray(op)
    return op.shape[0] == op.shape[1] and np.allclose(op, op.conj().T, atol=atol, rtol=0)


def is_psd(op: np.ndarray, atol: float = ATOL) -> bool:
    if not is_hermitian(op, atol):
        return False
    return bool(np.linalg.eigvalsh((op + op.conj().T) / 2).min() >= -atol)


def is_unitary(op: np.ndarray, atol: float = ATOL) -> bool:
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        return False
    return np.allclose(op.conj().T @ op, np.eye(op.shape[0]), atol=atol, rtol=0)


def psd_sqrt(op: np.ndarray) -> np.ndarray:
    """Principal square root of a PSD matrix (negative rounding noise is clipped)."""
    op = np.asarray(op, dtype=complex)
    w, v = np.linalg.eigh((op + op.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


# --------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class PartyLayout:
    dims: tuple[int, ...]

    def __init__(self, dims: Iterable[int]):
        dims = tuple(int(d) for d in dims)
        if not dims:
            raise ValueError("layout needs at least one party")
        if any(d < 2 for d in dims):
            raise ValueError(f"every local dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def __len__(self) -> int:
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)

    def __add__(self, other: PartyLayout) -> PartyLayout:
        return PartyLayout(self.dims + other.dims)

    def check_parties(self, parties: Iterable[int]) -> tuple[int, ...]:
        parties = tuple(parties)
        for p in parties:
            if not 0 <= p < self.n_parties:
                raise ValueError(f"party {p} out of range for layout {self.dims}")
        return parties


def _as_layout(layout) -> PartyLayout:
    return layout if isinstance(layout, PartyLayout) else PartyLayout(layout)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over a :class:`PartyLayout`."""

    layout: PartyLayout
    amplitudes: np.ndarray

    def __init__(self, layout, amplitudes, normalize: bool = False):
        layout = _as_layout(layout)
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amps.size != layout.total_dim:
            raise ValueError(
                f"{amps.size} amplitudes do not fit layout {layout.dims} (D={layout.total_dim})"
            )
        norm = np.linalg.norm(amps)
        if normalize:
            if norm < ATOL:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / norm
        elif abs(norm - 1) > ATOL:
            raise ValueError(f"state norm is {norm:.12g}, expected 1")
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped with one axis per party."""
        return self.amplitudes.reshape(self.layout.dims)

    def inner(self, other: PureState) -> complex:
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def density(self) -> DensityOperator:
        return DensityOperator(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))

    def allclose(self, other: PureState, atol: float = ATOL) -> bool:
        return self.layout == other.layout and np.allclose(
            self.amplitudes, other.amplitudes, atol=atol, rtol=0
        )

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        return self.allclose(other)

    def __hash__(self):
        return hash(self.layout)

    def __repr__(self):
        return f"PureState(dims={self.layout.dims}, amplitudes={np.round(self.amplitudes, 6)})"


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, PSD, unit-trace matrix over a :class:`PartyLayout`."""

    layout: PartyLayout
    matrix: np.ndarray

    def __init__(self, layout, matrix, check: bool = True):
        layout = _as_layout(layout)
        mat = np.asarray(matrix, dtype=complex)
        D = layout.total_dim
        if mat.shape != (D, D):
            raise ValueError(f"matrix shape {mat.shape} does not fit layout {layout.dims}")
        if check:
            if not is_hermitian(mat):
                raise ValueError("density operator is not Hermitian")
            if abs(np.trace(mat) - 1) > ATOL:
                raise ValueError(f"density operator trace is {np.trace(mat).real:.12g}")
            if np.linalg.eigvalsh((mat + mat.conj().T) / 2).min() < -ATOL:
                raise ValueError("density operator has a negative eigenvalue")
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "matrix", _frozen(mat))

    @classmethod
    def mixture(cls, weights: Sequence[float], states: Sequence[PureState]) -> DensityOperator:
        if len(weights) != len(states) or not states:
            raise ValueError("need one weight per state")
        layout = states[0].layout
        mat = sum(w * np.outer(s.amplitudes, s.amplitudes.conj()) for w, s in zip(weights, states))
        return cls(layout, mat)

    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        m = self.matrix
        return np.linalg.eigh((m + m.conj().T) / 2)

    def __repr__(self):
        return f"DensityOperator(dims={self.layout.dims})"


@dataclass(frozen=True)
class Bipartition:
    layout: PartyLayout
    left: frozenset[int]

    def __init__(self, layout, left: Iterable[int]):
        layout = _as_layout(layout)
        left = frozenset(layout.check_parties(left))
        if not left or len(left) == layout.n_parties:
            raise ValueError("bipartition side must be a nonempty proper subset of the parties")
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "left", left)

    @property
    def right(self) -> frozenset[int]:
        return frozenset(range(self.layout.n_parties)) - self.left

    @property
    def left_dim(self) -> int:
        return math.prod(self.layout.dims[p] for p in sorted(self.left))

    @property
    def right_dim(self) -> int:
        return math.prod(self.layout.dims[p] for p in sorted(self.right))


# --------------------------------------------------------------------------
# operations


def tensor(*states: PureState) -> PureState:
    """Kronecker product of states; layouts are concatenated in argument order."""
    if not states:
        raise ValueError("tensor of nothing")
    layout = states[0].layout
    amps = states[0].amplitudes
    for s in states[1:]:
        layout = layout + s.layout
        amps = np.kron(amps, s.amplitudes)
    return PureState(layout, amps)


def permute_parties(state: PureState, order: Sequence[int]) -> PureState:
    """Reorder tensor factors so that new party ``i`` is old party ``order[i]``."""
    order = tuple(order)
    if sorted(order) != list(range(state.layout.n_parties)):
        raise ValueError(f"{order} is not a permutation of the parties")
    dims = [state.layout.dims[p] for p in order]
    return PureState(dims, np.transpose(state.tensor, order).reshape(-1))


class SchmidtDecomposition(NamedTuple):
    coefficients: np.ndarray
    left_vectors: np.ndarray  # columns, over the left parties in layout order
    right_vectors: np.ndarray  # columns, over the right parties in layout order

    @property
    def rank(self) -> int:
        return int(np.sum(self.coefficients > RANK_TOL))

    def reconstruct(self) -> np.ndarray:
        """Amplitude matrix of shape (left_dim, right_dim)."""
        return (self.left_vectors * self.coefficients) @ self.right_vectors.T


def _cut_matrix(s: PureState, cut: Bipartition) -> np.ndarray:
    left, right = sorted(cut.left), sorted(cut.right)
    return np.transpose(s.tensor, left + right).reshape(cut.left_dim, cut.right_dim)


def schmidt_decomposition(s: PureState, cut: Bipartition) -> SchmidtDecomposition:
    if cut.layout != s.layout:
        raise ValueError("bipartition is over a different layout")
    u, c, vh = np.linalg.svd(_cut_matrix(s, cut), full_matrices=False)
    return SchmidtDecomposition(c, u, vh.T)


def schmidt_rank(s: PureState, cut: Bipartition) -> int:
    return schmidt_decomposition(s, cut).rank


def is_fully_product(s: PureState) -> bool:
    n = s.layout.n_parties
    if n == 1:
        return True
    return all(schmidt_rank(s, Bipartition(s.layout, {p})) == 1 for p in range(n))


def product_factors(s: PureState) -> list[np.ndarray]:
    """Local unit vectors whose tensor product is ``s`` up to a global phase.

    Raises ``ValueError`` if ``s`` is not fully product.
    """
    if not is_fully_product(s):
        raise ValueError("state is not fully product")
    factors = []
    for p in range(s.layout.n_parties):
        m = np.moveaxis(s.tensor, p, 0).reshape(s.layout.dims[p], -1)
        u, _, _ = np.linalg.svd(m, full_matrices=False)
        factors.append(u[:, 0])
    return factors


def partial_trace(rho: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Reduced state on the parties in ``keep`` (returned in layout order)."""
    layout = rho.layout
    keep = sorted(set(layout.check_parties(keep)))
    if not keep:
        raise ValueError("must keep at least one party")
    n = layout.n_parties
    trace_out = [p for p in range(n) if p not in keep]
    t = rho.matrix.reshape(layout.dims + layout.dims)
    # move kept row axes, then kept column axes, then traced pairs to the end
    perm = keep + [n + p for p in keep] + trace_out + [n + p for p in trace_out]
    t = np.transpose(t, perm)
    dk = math.prod(layout.dims[p] for p in keep)
    dt = math.prod(layout.dims[p] for p in trace_out)
    t = t.reshape(dk, dk, dt, dt)
    reduced = np.trace(t, axis1=2, axis2=3)
    return DensityOperator([layout.dims[p] for p in keep], reduced)


def reduced_state(s: PureState, keep: Iterable[int]) -> DensityOperator:
    """Reduced density operator of a pure state, computed without forming |s><s|."""
    keep = sorted(set(s.layout.check_parties(keep)))
    rest = [p for p in range(s.layout.n_parties) if p not in keep]
    dk = math.prod(s.layout.dims[p] for p in keep)
    m = np.transpose(s.tensor, keep + rest).reshape(dk, -1)
    return DensityOperator([s.layout.dims[p] for p in keep], m @ m.conj().T)


# --------------------------------------------------------------------------
# named constructors


def basis_state(layout, index: int | Sequence[int]) -> PureState:
    """Computational basis vector, by flat index or by per-party digits."""
    layout = _as_layout(layout)
    if not isinstance(index, (int, np.integer)):
        index = int(np.ravel_multi_index(tuple(index), layout.dims))
    if not 0 <= index < layout.total_dim:
        raise ValueError(f"basis index {index} out of range for D={layout.total_dim}")
    amps = np.zeros(layout.total_dim, dtype=complex)
    amps[index] = 1
    return PureState(layout, amps)


def phi_plus(layout, order: str = "interleaved") -> PureState:
    """Product of maximally entangled pairs (A_k, B_k).

    ``order="interleaved"`` expects parties A1 B1 A2 B2 ...; ``"grouped"``
    expects A1 .. An B1 .. Bn.
    """
    layout = _as_layout(layout)
    dims = layout.dims
    if len(dims) % 2:
        raise ValueError("phi_plus needs an even number of parties")
    n = len(dims) // 2
    if order == "interleaved":
        pairs = [(2 * k, 2 * k + 1) for k in range(n)]
    elif order == "grouped":
        pairs = [(k, n + k) for k in range(n)]
    else:
        raise ValueError(f"unknown party order {order!r}")
    for a, b in pairs:
        if dims[a] != dims[b]:
            raise ValueError(f"pair ({a}, {b}) has mismatched dimensions {dims[a]} != {dims[b]}")
    # build interleaved then permute into the requested order
    amps = np.ones(1, dtype=complex)
    for a, _ in pairs:
        d = dims[a]
        amps = np.kron(amps, np.eye(d).reshape(-1) / math.sqrt(d))
    interleaved = PureState([dims[a] for pair in pairs for a in pair], amps)
    if order == "interleaved":
        return interleaved
    # interleaved axis 2k -> A_k (grouped position k), 2k+1 -> B_k (grouped position n+k)
    perm = [2 * k for k in range(n)] + [2 * k + 1 for k in range(n)]
    return permute_parties(interleaved, perm)


_BELL = {
    "phi_plus": ((0, 0), (1, 1), 1),
    "phi_minus": ((0, 0), (1, 1), -1),
    "psi_plus": ((0, 1), (1, 0), 1),
    "psi_minus": ((0, 1), (1, 0), -1),
}
BELL_NAMES = tuple(_BELL)
_ETA = ("phi_plus", "phi_minus", "psi_plus", "psi_minus")


def bell_state(name: str, layout=(2, 2)) -> PureState:
    """Bell state on levels {0, 1} of a two-party (d, d) layout."""
    layout = _as_layout(layout)
    if layout.n_parties != 2:
        raise ValueError("Bell states need a two-party layout")
    first, second, sign = _BELL[name]
    amps = np.zeros(layout.dims, dtype=complex)
    amps[first] = 1 / math.sqrt(2)
    amps[second] = sign / math.sqrt(2)
    return PureState(layout, amps.reshape(-1))


def psi4(layout=(3, 3)) -> PureState:
    """(|01> - |10> + |22>)/sqrt(3) on two qutrits."""
    if _as_layout(layout).dims != (3, 3):
        raise ValueError("psi4 lives in a (3, 3) layout")
    amps = np.zeros((3, 3), dtype=complex)
    amps[0, 1], amps[1, 0], amps[2, 2] = 1, -1, 1
    return PureState((3, 3), amps.reshape(-1) / math.sqrt(3))


def eta(k: int, layout=(3, 3)) -> PureState:
    """eta_1..eta_4 are the Bell states inside C3 x C3, eta_5 = |22>."""
    if _as_layout(layout).dims != (3, 3):
        raise ValueError("eta states live in a (3, 3) layout")
    if 1 <= k <= 4:
        return bell_state(_ETA[k - 1], (3, 3))
    if k == 5:
        return basis_state((3, 3), (2, 2))
    raise ValueError(f"eta index must be in 1..5, got {k}")


_NAME_ARG = re.compile(r"^(\w+)\((\d+)\)$")


def named_state(name: str, layout=(2, 2), index: int | None = None) -> PureState:
    """Look up a state family by name.

    Accepted names: ``phi_plus``, ``phi_minus``, ``psi_plus``, ``psi_minus``,
    ``psi4``, ``basis`` and ``eta`` (the last two take ``index``, or the
    ``"basis(3)"`` / ``"eta(5)"`` spelling).
    """
    m = _NAME_ARG.match(name)
    if m:
        name, index = m.group(1), int(m.group(2))
    layout = _as_layout(layout)
    if name in _BELL:
        return bell_state(name, layout)
    if name == "psi4":
        return psi4(layout)
    if name in ("basis", "eta"):
        if index is None:
            raise ValueError(f"{name} needs an index")
        return basis_state(layout, index) if name == "basis" else eta(index, layout)
    raise ValueError(f"unknown state name {name!r}")


# --------------------------------------------------------------------------
# random sampling


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(d, random_state=rng)


def random_state(layout, rng: np.random.Generator) -> PureState:
    layout = _as_layout(layout)
    v = rng.normal(size=layout.total_dim) + 1j * rng.normal(size=layout.total_dim)
    return PureState(layout, v, normalize=True)


def random_product_state(layout, rng: np.random.Generator) -> PureState:
    layout = _as_layout(layout)
    return tensor(*(random_state((d,), rng) for d in layout.dims))


def orthonormal_completion(vectors: Sequence[np.ndarray], rng: np.random.Generator) -> np.ndarray:
    """Unitary whose leading columns are the given orthonormal vectors."""
    vectors = np.column_stack(vectors)
    D, k = vectors.shape
    filler = rng.normal(size=(D, D - k)) + 1j * rng.normal(size=(D, D - k))
    filler -= vectors @ (vectors.conj().T @ filler)
    q, _ = np.linalg.qr(filler)
    return np.column_stack([vectors, q[:, : D - k]])
