import numpy as np
import pytest
import scipy.linalg

from qrclab import (
    EigenSystem,
    ShapeError,
    SizeError,
    ValidationError,
    frobenius_distance,
    hermitian_eig,
    kron,
    partial_trace_first,
    propagator,
    random_density_matrix,
)
from qrclab.linalg import check_density_matrix


def random_hermitian(dim, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (g + g.conj().T)


# ---------------------------------------------------------------------------
# kron

def test_kron_most_significant_bit_convention():
    sz = np.diag([1.0, -1.0]).astype(complex)
    eye = np.eye(2, dtype=complex)
    np.testing.assert_array_equal(np.diagonal(kron(sz, eye)), [1, 1, -1, -1])
    np.testing.assert_array_equal(np.diagonal(kron(eye, sz)), [1, -1, 1, -1])


def test_kron_matches_numpy():
    rng = np.random.default_rng(0)
    a = rng.standard_normal((3, 2))
    b = rng.standard_normal((4, 5))
    np.testing.assert_array_equal(kron(a, b), np.kron(a, b))


def test_kron_size_cap():
    wide = np.ones((1, 1 << 20))
    with pytest.raises(SizeError):
        kron(wide, np.ones((1, 2)))


def test_kron_rejects_non_finite():
    bad = np.array([[np.nan, 0.0], [0.0, 1.0]])
    with pytest.raises(ValidationError):
        kron(bad, np.eye(2))


# ---------------------------------------------------------------------------
# partial trace

def brute_force_trace_first(rho, sub_dim):
    d = rho.shape[0]
    r = d // sub_dim
    out = np.zeros((r, r), dtype=rho.dtype)
    for i in range(sub_dim):
        out += rho[i * r : (i + 1) * r, i * r : (i + 1) * r]
    return out


@pytest.mark.parametrize("seed", [0, 1, 2])
@pytest.mark.parametrize("sub_dim", [2, 4, 8])
def test_partial_trace_matches_block_sum(seed, sub_dim):
    rho = random_density_matrix(8 * sub_dim, np.random.default_rng(seed))
    got = partial_trace_first(rho, sub_dim)
    np.testing.assert_allclose(got, brute_force_trace_first(rho, sub_dim), atol=1e-14)
    assert abs(np.trace(got) - np.trace(rho)) < 1e-13


def test_partial_trace_roundtrip_bit_exact():
    # coefficients exactly representable: (1, 0) and (0.5, 0.5)
    rng = np.random.default_rng(3)
    rest = random_density_matrix(8, rng)
    for q in (np.diag([1.0, 0.0]), np.full((2, 2), 0.5)):
        prod = np.kron(q.astype(complex), rest)
        back = partial_trace_first(prod, 2)
        assert np.array_equal(back, rest)


def test_partial_trace_bad_subdim():
    with pytest.raises(ShapeError):
        partial_trace_first(np.eye(6), 4)
    with pytest.raises(ShapeError):
        partial_trace_first(np.ones((2, 3)), 1)


# ---------------------------------------------------------------------------
# distance

def test_frobenius_distance_manual():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    b = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    manual = np.sqrt(np.sum(np.abs(a - b) ** 2))
    assert abs(frobenius_distance(a, b) - manual) < 1e-12
    assert frobenius_distance(a, a) == 0.0


def test_frobenius_distance_shape_mismatch():
    with pytest.raises(ShapeError):
        frobenius_distance(np.eye(2), np.eye(3))


# ---------------------------------------------------------------------------
# eigendecomposition and propagator

def test_eigh_diagonal_field_term():
    h = 0.7
    eig = hermitian_eig(np.diag([h / 2, -h / 2]).astype(complex))
    np.testing.assert_allclose(eig.eigenvalues, [-h / 2, h / 2])


def test_eigh_sigma_x_spectrum():
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    eig = hermitian_eig(sx)
    np.testing.assert_allclose(eig.eigenvalues, [-1.0, 1.0], atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_eigh_reconstruction_and_order(seed):
    dim = 4 + 7 * seed
    h = random_hermitian(dim, seed)
    eig = hermitian_eig(h)
    assert isinstance(eig, EigenSystem) and eig.dim == dim
    assert np.all(np.diff(eig.eigenvalues) >= 0)
    v = eig.eigenvectors
    np.testing.assert_allclose(v @ v.conj().T, np.eye(dim), atol=1e-12)
    recon = (v * eig.eigenvalues) @ v.conj().T
    assert np.linalg.norm(recon - 0.5 * (h + h.conj().T)) < 1e-10 * np.linalg.norm(h)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


@pytest.mark.parametrize("seed,dt", [(0, 0.1), (1, 1.0), (2, 10.0)])
def test_propagator_matches_expm(seed, dt):
    h = random_hermitian(12, seed)
    u = propagator(hermitian_eig(h), dt)
    np.testing.assert_allclose(u, scipy.linalg.expm(-1j * h * dt), atol=1e-11)


def test_propagator_unitarity_large():
    h = random_hermitian(256, 9)
    u = propagator(hermitian_eig(h), 10.0)
    assert np.linalg.norm(u @ u.conj().T - np.eye(256)) < 1e-10


def test_propagator_zero_dt_is_identity():
    h = random_hermitian(16, 5)
    u = propagator(hermitian_eig(h), 0.0)
    assert np.linalg.norm(u - np.eye(16)) < 1e-12


# ---------------------------------------------------------------------------
# random states

def test_random_density_matrix_properties():
    rho = random_density_matrix(1024, np.random.default_rng(7))
    assert abs(np.trace(rho) - 1.0) < 1e-12
    assert np.array_equal(rho, rho.conj().T)
    purity = float(np.trace(rho @ rho).real)
    assert abs(purity - 2.0 / 1024) < 0.1 * (2.0 / 1024)
    assert np.linalg.eigvalsh(rho)[0] > -1e-10


def test_random_density_matrix_seeded():
    a = random_density_matrix(32, np.random.default_rng(11))
    b = random_density_matrix(32, np.random.default_rng(11))
    assert np.array_equal(a, b)
    with pytest.raises(ValidationError):
        random_density_matrix(0, np.random.default_rng(0))


def test_check_density_matrix():
    rho = random_density_matrix(16, np.random.default_rng(2))
    check_density_matrix(rho, check_psd=True)
    with pytest.raises(ValidationError):
        check_density_matrix(2.0 * rho)
    bad = rho.copy()
    bad[0, 1] += 1e-6
    with pytest.raises(ValidationError):
        check_density_matrix(bad)
