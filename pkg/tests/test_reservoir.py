import numpy as np
import pytest
import scipy.linalg

from qrclab import (
    ModelParams,
    NumericError,
    ObservableDescriptor,
    Reservoir,
    ValidationError,
    check_density_matrix,
    initial_state,
    kron,
    observable_operator,
    partial_trace_first,
    run_trajectory,
    sample_realization,
)
from qrclab.reservoir import (
    NAMED_INITIAL_STATES,
    clamp_distances,
    convergence_run,
    encode_input,
)


def small_reservoir(n=3, h=1.0, w=0.0, seed=7, dt=10.0):
    real = sample_realization(ModelParams(n_spins=n, h=h, w=w, seed=seed))
    return Reservoir(real, dt=dt)


def test_encode_input_state():
    q = encode_input(0.25)
    check_density_matrix(q, check_psd=True)
    # pure state sqrt(0.75)|0> + sqrt(0.25)|1>
    np.testing.assert_allclose(q[0, 0], 0.75)
    np.testing.assert_allclose(q[1, 1], 0.25)
    np.testing.assert_allclose(q[0, 1], np.sqrt(0.75 * 0.25))
    np.testing.assert_allclose(np.trace(q @ q), 1.0)
    with pytest.raises(ValidationError):
        encode_input(-0.1)
    with pytest.raises(ValidationError):
        encode_input(1.2)


def test_named_initial_states_are_density_matrices():
    rng = np.random.default_rng(30)
    for name in NAMED_INITIAL_STATES:
        rho = initial_state(name, 3, rng)
        check_density_matrix(rho, check_psd=True)


def test_initial_state_z_patterns():
    res = small_reservoir(n=4)
    zs = [ObservableDescriptor.single(i, "z") for i in range(1, 5)]
    want = {
        "all_up_z": [1, 1, 1, 1],
        "all_down_z": [-1, -1, -1, -1],
        "half_half_z": [1, 1, -1, -1],
    }
    for name, pattern in want.items():
        rho = initial_state(name, 4)
        vals = [res.expectation(rho, d) for d in zs]
        np.testing.assert_allclose(vals, pattern, atol=1e-13)


def test_initial_state_x_patterns():
    res = small_reservoir(n=4)
    xs = [ObservableDescriptor.single(i, "x") for i in range(1, 5)]
    rho = initial_state("half_half_x", 4)
    np.testing.assert_allclose([res.expectation(rho, d) for d in xs], [1, 1, -1, -1], atol=1e-13)
    rho = initial_state("maximal_coherent", 4)
    np.testing.assert_allclose([res.expectation(rho, d) for d in xs], [1, 1, 1, 1], atol=1e-13)


def test_initial_state_random_and_errors():
    rho = initial_state("random", 3, np.random.default_rng(3))
    check_density_matrix(rho, check_psd=True)
    with pytest.raises(ValidationError):
        initial_state("random", 3)
    with pytest.raises(ValidationError):
        initial_state("no_such_state", 3)


def test_inject_sets_first_spin():
    res = small_reservoir(n=4, seed=2)
    z1 = ObservableDescriptor.single(1, "z")
    rho = initial_state("maximal_coherent", 4)
    for s in (0.0, 0.3, 1.0):
        out = res.inject(rho, s)
        check_density_matrix(out)
        np.testing.assert_allclose(res.expectation(out, z1), 1.0 - 2.0 * s, atol=1e-12)


def test_inject_preserves_rest_of_register():
    res = small_reservoir(n=4, seed=9)
    rho = initial_state("random", 4, np.random.default_rng(40))
    before = partial_trace_first(rho, 2)
    after = partial_trace_first(res.inject(rho, 0.7), 2)
    np.testing.assert_allclose(after, before, atol=1e-14)


def test_step_matches_dense_oracle():
    # one full update = fresh first qubit, then unitary evolution
    res = small_reservoir(n=3, h=0.8, w=1.5, seed=13, dt=2.5)
    u = scipy.linalg.expm(-1j * res.hamiltonian * 2.5)
    rho = initial_state("random", 3, np.random.default_rng(8))
    s = 0.42
    expected = u @ kron(encode_input(s), partial_trace_first(rho, 2)) @ u.conj().T
    got = res.step(rho, s)
    np.testing.assert_allclose(got, expected, atol=1e-13)


def test_measurement_fast_paths_match_dense_traces():
    res = small_reservoir(n=3, h=1.3, w=2.0, seed=21)
    rho = res.step(initial_state("random", 3, np.random.default_rng(0)), 0.6)
    descs = [
        ObservableDescriptor.single(2, "x"),
        ObservableDescriptor.single(1, "y"),
        ObservableDescriptor.single(3, "z"),
        ObservableDescriptor.pair_zz(1, 3),
        ObservableDescriptor.parity(),
        ObservableDescriptor.energy(),
    ]
    for d in descs:
        op = observable_operator(d, 3, hamiltonian=res.hamiltonian)
        dense = np.trace(op @ rho).real
        np.testing.assert_allclose(res.expectation(rho, d), dense, atol=1e-12)


def test_expectation_rejects_imaginary_leak():
    res = small_reservoir(n=2)
    bad = np.zeros((4, 4), dtype=complex)
    bad[0, 1] = 1.0j  # non-Hermitian: x on the last site reads this element
    with pytest.raises(NumericError):
        res.expectation(bad, ObservableDescriptor.single(2, "x"))


def test_trajectory_shapes_and_bias():
    res = small_reservoir(n=3, seed=4)
    inputs = np.random.default_rng(1).uniform(0.0, 0.2, 17)
    traj = run_trajectory(res, inputs, init="all_up_z", record_conserved=True)
    n_cols = len(res.observables) + 1
    assert traj.design.data.shape == (17, n_cols)
    assert traj.design.labels[-1] == "bias"
    np.testing.assert_array_equal(traj.design.data[:, -1], 1.0)
    assert traj.conserved.shape == (17, 3)
    assert run_trajectory(res, inputs).conserved is None
    with pytest.raises(ValidationError):
        run_trajectory(res, [0.5, 1.5])


def test_trajectory_determinism():
    inputs = np.random.default_rng(2).uniform(0.0, 1.0, 9)
    a = run_trajectory(small_reservoir(n=3, seed=5), inputs)
    b = run_trajectory(small_reservoir(n=3, seed=5), inputs)
    np.testing.assert_array_equal(a.design.data, b.design.data)


def test_energy_and_parity_conserved_between_injections():
    res = small_reservoir(n=4, h=2.0, w=3.0, seed=17)
    inputs = np.random.default_rng(6).uniform(0.0, 1.0, 25)
    traj = run_trajectory(res, inputs, record_conserved=True)
    e_inj, e_evo, par = traj.conserved.T
    np.testing.assert_allclose(e_evo, e_inj, atol=1e-10)
    # parity magnitude survives the evolution half-step (injection may move it)
    assert np.all(np.abs(par) <= 1.0 + 1e-12)


def test_first_spin_reads_back_input_when_frozen():
    # with dt=0 the evolve half-step is the identity, so z1 = 1 - 2s exactly
    res = small_reservoir(n=3, seed=3, dt=0.0)
    inputs = np.array([0.1, 0.9, 0.4])
    traj = run_trajectory(res, inputs)
    z1_col = res.labels.index("z1")
    np.testing.assert_allclose(traj.design.data[:, z1_col], 1.0 - 2.0 * inputs, atol=1e-13)


def test_dt_zero_freezes_evolution():
    res = small_reservoir(n=3, seed=11, dt=0.0)
    rho = initial_state("random", 3, np.random.default_rng(12))
    np.testing.assert_allclose(res.evolve(rho), rho, atol=1e-14)


def test_dt_setter_rederives_propagator():
    res = small_reservoir(n=3, seed=11, dt=5.0)
    rho = initial_state("random", 3, np.random.default_rng(12))
    moved = res.evolve(rho)
    assert np.linalg.norm(moved - rho) > 1e-3
    res.dt = 0.0
    np.testing.assert_allclose(res.evolve(rho), rho, atol=1e-14)
    with pytest.raises(ValidationError):
        res.dt = -1.0


def test_convergence_contracts_in_ergodic_phase():
    real = sample_realization(ModelParams(n_spins=6, h=10.0, w=0.0, seed=31))
    res = Reservoir(real)
    inputs = np.random.default_rng(14).uniform(0.0, 1.0, 150)
    dist = convergence_run(res, inputs, seed_a=1, seed_b=2)
    assert dist.shape == (151,)
    assert dist[0] > 0.1
    assert dist[-1] < 1e-8
    # overwhelmingly monotone decay
    assert np.mean(np.diff(dist) <= 1e-12) > 0.95


def test_convergence_identical_seeds_is_zero():
    res = small_reservoir(n=4, seed=19)
    inputs = np.random.default_rng(15).uniform(0.0, 1.0, 10)
    dist = convergence_run(res, inputs, seed_a=5, seed_b=5)
    np.testing.assert_array_equal(dist, 0.0)


def test_clamp_distances_floor():
    raw = np.array([1.0, 1e-3, 1e-12, 0.0])
    np.testing.assert_allclose(clamp_distances(raw), [1.0, 1e-3, 1e-8, 1e-8])
