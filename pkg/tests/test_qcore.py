import math

import numpy as np
import pytest

from lrauth import qcore
from lrauth.qcore import Bipartition, DensityOperator, PartyLayout, PureState

import properties as P

R2 = 1 / math.sqrt(2)


def test_layout_validation():
    assert PartyLayout((2, 3)).total_dim == 6
    assert (PartyLayout((2,)) + PartyLayout((3, 4))).dims == (2, 3, 4)
    with pytest.raises(ValueError):
        PartyLayout(())
    with pytest.raises(ValueError):
        PartyLayout((2, 1))
    with pytest.raises(ValueError):
        PartyLayout((2, 2)).check_parties([2])


def test_state_validation_and_immutability():
    with pytest.raises(ValueError, match="norm"):
        PureState((2, 2), [1, 1, 0, 0])
    with pytest.raises(ValueError, match="fit"):
        PureState((2, 2), [1, 0, 0])
    s = PureState((2, 2), [1, 1, 0, 0], normalize=True)
    assert np.isclose(s.amplitudes[0], R2)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0
    with pytest.raises(ValueError, match="zero"):
        PureState((2,), [0, 0], normalize=True)


def test_density_validation():
    with pytest.raises(ValueError, match="trace"):
        DensityOperator((2,), np.eye(2))
    with pytest.raises(ValueError, match="Hermitian"):
        DensityOperator((2,), [[0.5, 1], [0, 0.5]])
    with pytest.raises(ValueError, match="negative"):
        DensityOperator((2,), np.diag([1.5, -0.5]))


def test_big_endian_ordering():
    s = qcore.basis_state((2, 3), (1, 2))
    assert np.flatnonzero(s.amplitudes).tolist() == [1 * 3 + 2]
    assert qcore.basis_state((2, 3), 5) == s
    t = qcore.tensor(qcore.basis_state((2,), 1), qcore.basis_state((3,), 2))
    assert t == s and t.layout.dims == (2, 3)


def test_permute_parties():
    s = qcore.basis_state((2, 3, 4), (1, 2, 3))
    p = qcore.permute_parties(s, (2, 0, 1))
    assert p.layout.dims == (4, 2, 3)
    assert p == qcore.basis_state((4, 2, 3), (3, 1, 2))


def test_bell_states():
    phi = qcore.bell_state("phi_plus")
    assert np.allclose(phi.amplitudes, [R2, 0, 0, R2])
    psi_m = qcore.bell_state("psi_minus")
    assert np.allclose(psi_m.amplitudes, [0, R2, -R2, 0])
    gram = np.array([[qcore.bell_state(a).inner(qcore.bell_state(b)) for b in qcore.BELL_NAMES]
                     for a in qcore.BELL_NAMES])
    assert np.allclose(gram, np.eye(4))


def test_qutrit_embedding():
    etas = [qcore.eta(k) for k in range(1, 6)]
    gram = np.array([[a.inner(b) for b in etas] for a in etas])
    assert np.allclose(gram, np.eye(5))
    assert qcore.eta(5) == qcore.basis_state((3, 3), (2, 2))
    p4 = qcore.psi4()
    expected = np.zeros(9)
    expected[[1, 3, 8]] = np.array([1, -1, 1]) / math.sqrt(3)
    assert np.allclose(p4.amplitudes, expected)
    assert abs(p4.inner(qcore.eta(4))) ** 2 == pytest.approx(2 / 3)


def test_named_state_parsing():
    assert qcore.named_state("basis(3)", (2, 2)) == qcore.basis_state((2, 2), 3)
    assert qcore.named_state("eta(5)", (3, 3)) == qcore.eta(5)
    with pytest.raises(ValueError):
        qcore.named_state("nonsense", (2, 2))


def test_schmidt_bell():
    cut = Bipartition((2, 2), {0})
    dec = qcore.schmidt_decomposition(qcore.bell_state("phi_plus"), cut)
    assert np.allclose(dec.coefficients, [R2, R2])
    assert dec.rank == 2
    assert qcore.schmidt_rank(qcore.basis_state((2, 2), 2), cut) == 1


def test_schmidt_reconstruction_sweep():
    assert P.check_schmidt_reconstruction(1000) == []


def test_fully_product(rng):
    for _ in range(200):
        layout = P.random_layout(rng)
        s = qcore.tensor(*(qcore.random_state((d,), rng) for d in layout.dims))
        assert qcore.is_fully_product(s)
        factors = qcore.product_factors(s)
        rebuilt = factors[0]
        for f in factors[1:]:
            rebuilt = np.kron(rebuilt, f)
        assert abs(abs(np.vdot(rebuilt, s.amplitudes)) - 1) < 1e-9
    # bipartite product but entangled inside one side
    s = qcore.tensor(qcore.bell_state("phi_plus"), qcore.basis_state((2,), 0))
    assert qcore.schmidt_rank(s, Bipartition(s.layout, {2})) == 1
    assert not qcore.is_fully_product(s)
    with pytest.raises(ValueError):
        qcore.product_factors(s)


def test_single_party_is_product():
    assert qcore.is_fully_product(qcore.random_state((5,), np.random.default_rng(0)))


def test_partial_trace(rng):
    for _ in range(100):
        layout = P.random_layout(rng, max_total=24, max_parties=3)
        rho = DensityOperator.mixture([0.3, 0.7], [qcore.random_state(layout, rng) for _ in range(2)])
        keep = sorted(rng.choice(layout.n_parties, size=int(rng.integers(1, layout.n_parties + 1)),
                                 replace=False).tolist())
        red = qcore.partial_trace(rho, keep)
        assert abs(np.trace(red.matrix) - 1) < 1e-9
        assert np.linalg.eigvalsh(red.matrix).min() > -1e-9
        assert red.layout.dims == tuple(layout.dims[p] for p in keep)


def test_partial_trace_of_product_and_bell():
    a = qcore.random_state((2,), np.random.default_rng(1))
    b = qcore.random_state((3,), np.random.default_rng(2))
    red = qcore.partial_trace(qcore.tensor(a, b).density(), [1])
    assert np.allclose(red.matrix, np.outer(b.amplitudes, b.amplitudes.conj()))
    red = qcore.reduced_state(qcore.bell_state("psi_minus"), [0])
    assert np.allclose(red.matrix, np.eye(2) / 2)


def test_reduced_state_matches_partial_trace(rng):
    for _ in range(50):
        layout = P.random_layout(rng, max_total=24, max_parties=3)
        s = qcore.random_state(layout, rng)
        keep = [int(rng.integers(layout.n_parties))]
        assert np.allclose(qcore.reduced_state(s, keep).matrix,
                           qcore.partial_trace(s.density(), keep).matrix, atol=1e-12)


def test_phi_plus_orders():
    inter = qcore.phi_plus((2, 2, 3, 3))  # A1 B1 A2 B2
    grouped = qcore.phi_plus((2, 3, 2, 3), order="grouped")  # A1 A2 B1 B2
    assert grouped == qcore.permute_parties(inter, (0, 2, 1, 3))
    assert abs(qcore.schmidt_decomposition(grouped, Bipartition(grouped.layout, {0, 1})).coefficients
               - 1 / math.sqrt(6)).max() < 1e-12
    with pytest.raises(ValueError):
        qcore.phi_plus((2, 3))


def test_uu_star_invariance():
    assert P.check_uu_star_invariance(50, (2, 3, 4, 6)) == []


def test_orthonormal_completion(rng):
    v = qcore.random_state((6,), rng).amplitudes
    u = qcore.orthonormal_completion([v], rng)
    assert qcore.is_unitary(u)
    assert np.allclose(u[:, 0], v)


def test_predicates():
    assert qcore.is_hermitian(np.diag([1, 2]))
    assert not qcore.is_psd(np.diag([1, -1]))
    m = np.array([[2, 1], [1, 2]], dtype=float)
    r = qcore.psd_sqrt(m)
    assert np.allclose(r @ r, m)
