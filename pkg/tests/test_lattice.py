import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relscott.errors import EigendecompositionFailure  # noqa: F401
from relscott.spectral import (
    GaugeLattice,
    SpinorOperator,
    build_pauli_lattice,
    free_symbol_spectrum,
    kinetic_function,
    relativistic_hamiltonian,
    trace_neg,
)


def _spectrum(lat, h=1.0):
    return np.linalg.eigvalsh(build_pauli_lattice(lat, h).matrix)


def test_free_spectrum_matches_symbol():
    lat = GaugeLattice.cube(4, spacing=0.7)
    np.testing.assert_allclose(_spectrum(lat, h=1.3), free_symbol_spectrum(lat, h=1.3), atol=1e-12)


def test_constant_commensurate_field_is_a_momentum_shift():
    n, s = 5, 0.5
    A = np.zeros((3, n, n, n))
    A[0] = 2 * np.pi / (n * s)
    lat = GaugeLattice.cube(n, s)
    np.testing.assert_allclose(_spectrum(lat.with_fields(A=A)), _spectrum(lat), atol=1e-11)


@pytest.mark.parametrize("periodic", [True, False])
def test_random_gauge_transform_preserves_spectrum(periodic, rng):
    lat = GaugeLattice.cube(4, 0.6, A=rng.normal(size=(3, 4, 4, 4)), periodic=(periodic,) * 3)
    chi = rng.normal(size=lat.shape) * 3
    np.testing.assert_allclose(_spectrum(lat.gauge_transform(chi)), _spectrum(lat), atol=1e-12)


def test_link_phases_unimodular(rng):
    lat = GaugeLattice.cube(3, 0.9, A=rng.normal(size=(3, 3, 3, 3)) * 10)
    assert np.max(np.abs(np.abs(lat.link_phases()) - 1)) <= 1e-15


def test_pauli_square_hermitian_psd(rng):
    lat = GaugeLattice.cube(4, 0.5, A=rng.normal(size=(3, 4, 4, 4)) * 2, periodic=(True, False, True))
    L = build_pauli_lattice(lat)
    assert L.hermiticity_defect() <= 1e-12
    lam = np.linalg.eigvalsh(L.matrix)
    assert lam.min() >= -1e-10 * np.abs(lam).max()


def test_relativistic_hamiltonian_examples():
    lat = GaugeLattice.cube(3)
    rh = relativistic_hamiltonian(build_pauli_lattice(lat), np.zeros(lat.shape), 0.7)
    assert np.min(np.abs(np.linalg.eigvalsh(rh.H.matrix))) <= 1e-12  # the k = 0 mode
    Lop = SpinorOperator(3.0 * np.eye(4))
    H = relativistic_hamiltonian(Lop, np.zeros(2), 1.0).H.matrix
    np.testing.assert_allclose(H, np.eye(4), atol=1e-14)
    np.testing.assert_allclose(relativistic_hamiltonian(Lop, np.zeros(2), 1.0).S(), 2 * np.eye(4), atol=1e-14)


@given(gamma=st.floats(1e-4, 0.3))
def test_pauli_limit_bound(gamma):
    lat = GaugeLattice.cube(3, 1.0, A=np.full((3, 3, 3, 3), 0.3))
    L = build_pauli_lattice(lat)
    lam = np.clip(np.linalg.eigvalsh(L.matrix), 0, None)
    dev = np.max(np.abs(kinetic_function(lam, gamma) - lam / 2))
    assert dev <= gamma**2 * lam.max() ** 2 / 8 + 1e-12


def test_spectral_function_commutes_with_unitaries(rng):
    n = 6
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    L = X @ X.conj().T
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    a = relativistic_hamiltonian(SpinorOperator(L), np.zeros(n), 0.4).H.matrix
    b = relativistic_hamiltonian(SpinorOperator(Q @ L @ Q.conj().T), np.zeros(n), 0.4).H.matrix
    np.testing.assert_allclose(Q @ a @ Q.conj().T, b, atol=1e-12)


def test_trace_neg_examples():
    assert trace_neg(np.diag([1.0, 2.0, 0.0])).trace == 0
    t = trace_neg(np.diag([-2.0, -1.0, 3.0]))
    assert t.trace == -3 and t.count == 2
    assert trace_neg(np.diag([-2.0, -1.0, 3.0]), tau=-1.5).trace == pytest.approx(-0.5)


def test_trace_neg_density_and_monotonicity(rng):
    lat = GaugeLattice.cube(8, 0.5, A=rng.normal(size=(3, 8, 8, 8)) * 0.5, periodic=(False,) * 3)
    Lop = build_pauli_lattice(lat)
    V1 = np.abs(rng.normal(size=lat.shape)) * 3
    V2 = V1 + np.abs(rng.normal(size=lat.shape))
    t1 = trace_neg(relativistic_hamiltonian(Lop, V1, 0.2).H)
    t2 = trace_neg(relativistic_hamiltonian(Lop, V2, 0.2).H)
    assert t2.trace <= t1.trace
    assert np.all(t1.density >= 0)
    assert t1.density.sum() == pytest.approx(t1.count, rel=1e-12)
