import numpy as np
import pytest

from qrclab import (
    DisorderRealization,
    ModelParams,
    ObservableDescriptor,
    ValidationError,
    build_hamiltonian,
    build_sector_hamiltonian,
    default_observables,
    observable_operator,
    sample_realization,
)
from qrclab.spinmodel import (
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Z,
    parity_signs,
    sector_indices,
    site_mask,
    sz_signs,
)


def kron_chain(factors):
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def oracle_hamiltonian(real):
    """Explicit Kronecker-placement assembly, term by term."""
    n = real.params.n_spins
    h = np.zeros((1 << n, 1 << n), dtype=complex)
    for i in range(n):
        for j in range(i):
            ops = [IDENTITY_2] * n
            ops[i] = SIGMA_X
            ops[j] = SIGMA_X
            h += real.couplings[i, j] * kron_chain(ops)
    for i in range(n):
        ops = [IDENTITY_2] * n
        ops[i] = SIGMA_Z
        h += 0.5 * (real.params.h + real.fields[i]) * kron_chain(ops)
    return h


# ---------------------------------------------------------------------------
# parameters and sampling

def test_params_validation():
    with pytest.raises(ValidationError):
        ModelParams(n_spins=1, h=1.0, w=0.0)
    with pytest.raises(ValidationError):
        ModelParams(n_spins=13, h=1.0, w=0.0)
    with pytest.raises(ValidationError):
        ModelParams(n_spins=4, h=-1.0, w=0.0)
    with pytest.raises(ValidationError):
        ModelParams(n_spins=4, h=1.0, w=0.0, j_s=0.0)
    assert ModelParams(n_spins=10, h=1.0, w=0.0).dim == 1024


def test_sample_bounds_and_mean():
    # >= 1e4 coupling draws stay inside [-j_s/2, j_s/2] with near-zero mean
    draws = []
    fields = []
    for k in range(250):
        real = sample_realization(ModelParams(n_spins=10, h=1.0, w=3.0, seed=k))
        iu = np.tril_indices(10, -1)
        draws.append(real.couplings[iu])
        fields.append(real.fields)
    draws = np.concatenate(draws)
    fields = np.concatenate(fields)
    assert draws.size >= 10_000
    assert draws.min() >= -0.5 and draws.max() <= 0.5
    assert abs(draws.mean()) < 0.01
    assert fields.min() >= -3.0 and fields.max() <= 3.0


def test_sample_zero_disorder_gives_zero_fields():
    real = sample_realization(ModelParams(n_spins=6, h=2.0, w=0.0, seed=1))
    assert np.array_equal(real.fields, np.zeros(6))


def test_sample_deterministic_from_seed():
    p = ModelParams(n_spins=5, h=1.0, w=2.0, seed=42)
    a = sample_realization(p)
    b = sample_realization(p)
    assert np.array_equal(a.couplings, b.couplings)
    assert np.array_equal(a.fields, b.fields)


def test_serialization_roundtrip():
    real = sample_realization(ModelParams(n_spins=7, h=0.3, w=1.5, seed=9))
    data = real.to_json_dict()
    assert set(data) == {"n_spins", "h", "w", "seed", "couplings", "fields"}
    assert len(data["couplings"]) == 7 * 6 // 2
    back = DisorderRealization.from_json(real.to_json())
    assert np.array_equal(back.couplings, real.couplings)
    assert np.array_equal(back.fields, real.fields)
    assert back.params == real.params


# ---------------------------------------------------------------------------
# Hamiltonian assembly

def test_two_spin_example():
    # J_12 = 1/4, h = 1, D = 0: diagonal (1, 0, 0, -1) plus 1/4 on the antidiagonal
    params = ModelParams(n_spins=2, h=1.0, w=0.0)
    couplings = np.array([[0.0, 0.25], [0.25, 0.0]])
    real = DisorderRealization(params=params, couplings=couplings, fields=np.zeros(2))
    h = build_hamiltonian(real)
    expected = np.diag([1.0, 0.0, 0.0, -1.0]).astype(complex)
    expected += 0.25 * np.fliplr(np.eye(4))
    np.testing.assert_allclose(h, expected, atol=1e-15)


def test_decoupled_diagonal_spectrum():
    # J = 0, D = 0: eigenvalues are (h/2)(n - 2 popcount(b))
    n, hval = 5, 0.8
    params = ModelParams(n_spins=n, h=hval, w=0.0)
    real = DisorderRealization(
        params=params, couplings=np.zeros((n, n)), fields=np.zeros(n)
    )
    h = build_hamiltonian(real)
    pop = np.array([bin(b).count("1") for b in range(1 << n)])
    np.testing.assert_allclose(np.diagonal(h).real, 0.5 * hval * (n - 2 * pop))
    assert np.count_nonzero(h - np.diag(np.diagonal(h))) == 0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_hamiltonian_matches_kron_oracle(seed):
    real = sample_realization(ModelParams(n_spins=3, h=0.7, w=1.2, seed=seed))
    np.testing.assert_allclose(
        build_hamiltonian(real), oracle_hamiltonian(real), atol=1e-14
    )


def test_hamiltonian_hermitian_and_parity_commutes():
    real = sample_realization(ModelParams(n_spins=6, h=2.0, w=0.5, seed=4))
    h = build_hamiltonian(real)
    assert np.linalg.norm(h - h.conj().T) == 0.0
    p = np.diag(parity_signs(6)).astype(complex)
    assert np.linalg.norm(h @ p - p @ h) == 0.0


# ---------------------------------------------------------------------------
# parity sectors

@pytest.mark.parametrize("n", [4, 6, 8])
def test_sector_union_equals_full_spectrum(n):
    real = sample_realization(ModelParams(n_spins=n, h=1.3, w=0.7, seed=n))
    full = np.linalg.eigvalsh(build_hamiltonian(real))
    even = np.linalg.eigvalsh(build_sector_hamiltonian(real, "even"))
    odd = np.linalg.eigvalsh(build_sector_hamiltonian(real, "odd"))
    assert even.size == odd.size == 1 << (n - 1)
    np.testing.assert_allclose(np.sort(np.concatenate([even, odd])), full, atol=1e-11)


def test_sector_matches_projection_of_full():
    real = sample_realization(ModelParams(n_spins=5, h=0.9, w=2.0, seed=12))
    h = build_hamiltonian(real)
    for sector in ("even", "odd"):
        idx = sector_indices(5, sector)
        assert np.all(np.diff(idx) > 0)  # ascending original index
        np.testing.assert_array_equal(
            build_sector_hamiltonian(real, sector), h[np.ix_(idx, idx)]
        )


def test_sector_rejects_unknown():
    real = sample_realization(ModelParams(n_spins=4, h=1.0, w=0.0, seed=0))
    with pytest.raises(ValidationError):
        build_sector_hamiltonian(real, "all")


# ---------------------------------------------------------------------------
# observables

def test_default_observable_count_and_order():
    obs = default_observables(10)
    assert len(obs) == 75
    labels = [d.label for d in obs]
    assert labels[0] == "x1" and labels[10] == "y1" and labels[20] == "z1"
    assert labels[30] == "zz1_2" and labels[-1] == "zz9_10"
    assert len(default_observables(8)) == 52


def test_single_site_operator_msb():
    op = observable_operator(ObservableDescriptor.single(1, "z"), 2)
    np.testing.assert_array_equal(np.diagonal(op).real, [1, 1, -1, -1])
    op2 = observable_operator(ObservableDescriptor.single(2, "z"), 2)
    np.testing.assert_array_equal(np.diagonal(op2).real, [1, -1, 1, -1])


def test_single_operators_square_to_identity():
    for axis in ("x", "y", "z"):
        op = observable_operator(ObservableDescriptor.single(2, axis), 3)
        np.testing.assert_allclose(op @ op, np.eye(8), atol=1e-15)


def test_pair_zz_site_order_irrelevant():
    a = ObservableDescriptor.pair_zz(3, 1)
    b = ObservableDescriptor.pair_zz(1, 3)
    assert a == b and a.label == "zz1_3"
    op = observable_operator(a, 3)
    expected = np.diag(sz_signs(3)[0] * sz_signs(3)[2]).astype(complex)
    np.testing.assert_array_equal(op, expected)


def test_parity_operator_popcount_signs():
    op = observable_operator(ObservableDescriptor.parity(), 3)
    expected = [(-1) ** bin(b).count("1") for b in range(8)]
    np.testing.assert_array_equal(np.diagonal(op).real, expected)


def test_observable_validation():
    with pytest.raises(ValidationError):
        ObservableDescriptor.single(0, "x")
    with pytest.raises(ValidationError):
        ObservableDescriptor.single(1, "q")
    with pytest.raises(ValidationError):
        ObservableDescriptor.pair_zz(2, 2)
    with pytest.raises(ValidationError):
        observable_operator(ObservableDescriptor.single(5, "x"), 4)
    with pytest.raises(ValidationError):
        observable_operator(ObservableDescriptor.energy(), 4)


def test_site_mask_convention():
    assert site_mask(1, 4) == 0b1000
    assert site_mask(4, 4) == 0b0001
    with pytest.raises(ValidationError):
        site_mask(5, 4)
