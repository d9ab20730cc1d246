"""Input-driven reservoir dynamics on a disordered spin network.

One processing step for input s in [0, 1]:

  1. inject: replace spin 1 (the most significant bit) by the pure state
     sqrt(1-s)|0> + sqrt(s)|1>, keeping the reduced state of the rest:
     rho -> |psi_s><psi_s| (x) Tr_1[rho].  This is the only non-unitary,
     information-erasing part of the map.
  2. evolve: conjugate by exp(-i H dt).

Observables are measured after the evolve half-step.  The injection forces
<sz_1> = 1 - 2s exactly; repeated injection drives any two initial states
together in the ergodic phase (fading memory), while strong onsite disorder
suppresses that contraction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ShapeError, ValidationError
from .learn import DesignMatrix
from .linalg import hermitian_eig, partial_trace_first, propagator, random_density_matrix
from .spinmodel import (
    DisorderRealization,
    ObservableDescriptor,
    default_observables,
    parity_signs,
    site_mask,
    sz_signs,
)

#: Imaginary residue allowed on any measured expectation value.
IMAG_TOL = 1e-10

#: Raw inter-trajectory distances below this are clamped in reports;
#: raw values are always retained alongside.
DISTANCE_FLOOR = 1e-8

NAMED_INITIAL_STATES = (
    "all_up_z",
    "all_down_z",
    "half_half_z",
    "half_half_x",
    "maximal_coherent",
    "random",
)

CONSERVED_COLUMNS = ("e_post_inject", "e_post_evolve", "parity")


def encode_input(s: float) -> np.ndarray:
    """Pure-state density matrix of sqrt(1-s)|0> + sqrt(s)|1>.

    Carries <sz> = 1 - 2s with real amplitudes; s must lie in [0, 1].
    """
    if not 0.0 <= s <= 1.0:
        raise ValidationError(f"input must lie in [0, 1], got {s}")
    a = np.sqrt(1.0 - s)
    b = np.sqrt(s)
    return np.array([[a * a, a * b], [a * b, b * b]], dtype=np.complex128)


def initial_state(
    name: str, n_spins: int, rng: np.random.Generator | None = None
) -> np.ndarray:
    """Named initial density matrices used by the experiments.

    half_half_z: first ceil stays |0>, the rest |1>; half_half_x the same
    split with |+> / |->; maximal_coherent: the rank-one projector with all
    matrix elements equal to 1/2^n (every basis string in equal
    superposition); random: a Ginibre draw (requires ``rng``).
    """
    dim = 1 << n_spins
    if name == "all_up_z":
        rho = np.zeros((dim, dim), dtype=np.complex128)
        rho[0, 0] = 1.0
        return rho
    if name == "all_down_z":
        rho = np.zeros((dim, dim), dtype=np.complex128)
        rho[dim - 1, dim - 1] = 1.0
        return rho
    if name == "half_half_z":
        n_down = n_spins - n_spins // 2
        b = (1 << n_down) - 1  # low bits set: trailing sites point down
        rho = np.zeros((dim, dim), dtype=np.complex128)
        rho[b, b] = 1.0
        return rho
    if name == "half_half_x":
        n_down = n_spins - n_spins // 2
        minus_mask = (1 << n_down) - 1  # trailing sites carry |->
        idx = np.arange(dim)
        shifts = np.arange(n_spins)
        pops = (((idx & minus_mask)[:, None] >> shifts[None, :]) & 1).sum(axis=1)
        # amplitude (+-1)/sqrt(dim): sign flips once per down bit on a |-> site
        psi = np.where(pops % 2 == 0, 1.0, -1.0) / np.sqrt(dim)
        return np.outer(psi, psi).astype(np.complex128)
    if name == "maximal_coherent":
        return np.full((dim, dim), 1.0 / dim, dtype=np.complex128)
    if name == "random":
        if rng is None:
            raise ValidationError("random initial state needs a generator")
        return random_density_matrix(dim, rng)
    raise ValidationError(
        f"unknown initial state {name!r}; choose from {NAMED_INITIAL_STATES}"
    )


@dataclass(frozen=True)
class TrajectoryResult:
    """Design matrix of one driven run plus optional conserved-quantity log."""

    design: DesignMatrix
    inputs: np.ndarray
    conserved: np.ndarray | None = None  # columns: CONSERVED_COLUMNS


class Reservoir:
    """A fixed network with cached spectral data and measurement tables.

    Diagonalizes H once at construction; the propagator is re-derived when
    ``dt`` changes.  ``dt`` >= 0 is accepted (0 gives the identity
    propagator, useful for isolating the injection map).
    """

    def __init__(
        self,
        realization: DisorderRealization,
        dt: float = 10.0,
        observables: tuple[ObservableDescriptor, ...] | None = None,
    ):
        from .spinmodel import build_hamiltonian  # local import to keep module load light

        self.realization = realization
        self.n_spins = realization.params.n_spins
        self.dim = 1 << self.n_spins
        self.hamiltonian = build_hamiltonian(realization)
        self.eig = hermitian_eig(self.hamiltonian)
        if observables is None:
            observables = default_observables(self.n_spins)
        observables = tuple(observables)
        if not observables:
            raise ValidationError("observable list must not be empty")
        if len(set(observables)) != len(observables):
            raise ValidationError("observable list contains duplicates")
        for d in observables:
            if d.sites and max(d.sites) > self.n_spins:
                raise ValidationError(f"observable {d.label} outside the network")
        self.observables = observables
        self._sz = sz_signs(self.n_spins)
        self._parity = parity_signs(self.n_spins)
        self._masks = [site_mask(i, self.n_spins) for i in range(1, self.n_spins + 1)]
        self._idx = np.arange(self.dim)
        self._dt = None
        self._u = None
        self.dt = dt

    @property
    def dt(self) -> float:
        return self._dt

    @dt.setter
    def dt(self, value: float):
        if value < 0 or not np.isfinite(value):
            raise ValidationError(f"dt must be finite and >= 0, got {value}")
        self._dt = float(value)
        self._u = propagator(self.eig, self._dt)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(d.label for d in self.observables) + ("bias",)

    # -- dynamics ----------------------------------------------------------

    def inject(self, rho: np.ndarray, s: float) -> np.ndarray:
        """Replace spin 1 with the encoded input, keeping the rest."""
        if rho.shape != (self.dim, self.dim):
            raise ShapeError(f"state must be {self.dim}x{self.dim}")
        rest = partial_trace_first(rho, 2)
        q = encode_input(s)
        r = self.dim // 2
        out = np.empty((self.dim, self.dim), dtype=np.complex128)
        out[:r, :r] = q[0, 0] * rest
        out[:r, r:] = q[0, 1] * rest
        out[r:, :r] = q[1, 0] * rest
        out[r:, r:] = q[1, 1] * rest
        return out

    def evolve(self, rho: np.ndarray) -> np.ndarray:
        out = self._u @ rho @ self._u.conj().T
        return 0.5 * (out + out.conj().T)  # keep exactly Hermitian over long runs

    def step(self, rho: np.ndarray, s: float) -> np.ndarray:
        """One full processing step: inject then evolve."""
        return self.evolve(self.inject(rho, s))

    # -- measurement -------------------------------------------------------

    def _expect(self, rho: np.ndarray, diag: np.ndarray, d: ObservableDescriptor) -> complex:
        if d.kind == "single":
            i = d.sites[0] - 1
            if d.axis == "z":
                return self._sz[i] @ diag
            col = rho[self._idx ^ self._masks[i], self._idx]
            if d.axis == "x":
                return col.sum()
            return (-1j * self._sz[i]) @ col  # y: phase +i on bit 1, -i on bit 0
        if d.kind == "pair_zz":
            i, j = d.sites[0] - 1, d.sites[1] - 1
            return (self._sz[i] * self._sz[j]) @ diag
        if d.kind == "parity":
            return self._parity @ diag
        # energy
        return np.einsum("ij,ji->", self.hamiltonian, rho)

    def expectation(self, rho: np.ndarray, desc: ObservableDescriptor) -> float:
        """Expectation value of one observable; raises on large imaginary part."""
        val = self._expect(rho, np.diagonal(rho), desc)
        if abs(val.imag) > IMAG_TOL:
            raise NumericError(
                f"imaginary residue {val.imag:.3e} on {desc.label} exceeds {IMAG_TOL}"
            )
        return float(val.real)

    def measure(
        self,
        rho: np.ndarray,
        observables: tuple[ObservableDescriptor, ...] | None = None,
    ) -> np.ndarray:
        """Expectation values in descriptor order (the configured set by default)."""
        obs = self.observables if observables is None else tuple(observables)
        diag = np.diagonal(rho)
        vals = np.array([self._expect(rho, diag, d) for d in obs])
        worst = float(np.abs(vals.imag).max()) if vals.size else 0.0
        if worst > IMAG_TOL:
            raise NumericError(f"imaginary residue {worst:.3e} exceeds {IMAG_TOL}")
        return vals.real.astype(float)

    def expect_energy(self, rho: np.ndarray) -> float:
        return self.expectation(rho, ObservableDescriptor.energy())

    def expect_parity(self, rho: np.ndarray) -> float:
        return self.expectation(rho, ObservableDescriptor.parity())


def resolve_initial(
    res: Reservoir,
    init: str | np.ndarray,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    if isinstance(init, str):
        return initial_state(init, res.n_spins, rng)
    rho = np.asarray(init, dtype=np.complex128)
    if rho.shape != (res.dim, res.dim):
        raise ShapeError(f"initial state must be {res.dim}x{res.dim}")
    return rho


def run_trajectory(
    res: Reservoir,
    inputs,
    init: str | np.ndarray = "maximal_coherent",
    init_rng: np.random.Generator | None = None,
    record_conserved: bool = False,
) -> TrajectoryResult:
    """Drive the reservoir and collect the design matrix.

    Row k holds the observables measured after processing input k, plus the
    trailing bias 1.  With ``record_conserved`` the energy is logged after
    the injection and after the evolution of each step, together with the
    global parity (both are constants of the unitary half-step).
    """
    s = np.asarray(inputs, dtype=float)
    if s.ndim != 1:
        raise ShapeError("inputs must be a 1-D sequence")
    if s.size and (s.min() < 0.0 or s.max() > 1.0):
        raise ValidationError("inputs must lie in [0, 1]")
    rho = resolve_initial(res, init, init_rng)
    n_cols = len(res.observables) + 1
    design = np.empty((s.size, n_cols))
    conserved = np.empty((s.size, 3)) if record_conserved else None
    for k, sk in enumerate(s):
        rho_inj = res.inject(rho, sk)
        if record_conserved:
            conserved[k, 0] = res.expect_energy(rho_inj)
        rho = res.evolve(rho_inj)
        design[k, :-1] = res.measure(rho)
        design[k, -1] = 1.0
        if record_conserved:
            conserved[k, 1] = res.expect_energy(rho)
            conserved[k, 2] = res.expect_parity(rho)
    return TrajectoryResult(
        design=DesignMatrix(data=design, labels=res.labels),
        inputs=s,
        conserved=conserved,
    )


def convergence_run(
    res: Reservoir,
    inputs,
    seed_a: int,
    seed_b: int,
) -> np.ndarray:
    """Frobenius distance between two driven copies, step by step.

    Both copies start from independent Ginibre states (seeded) and receive
    the identical input sequence.  Returns raw distances of length
    ``len(inputs) + 1`` including the initial separation; clamping at
    ``DISTANCE_FLOOR`` is left to the reporting layer.
    """
    s = np.asarray(inputs, dtype=float)
    if s.ndim != 1 or s.size < 1:
        raise ShapeError("inputs must be a non-empty 1-D sequence")
    if s.min() < 0.0 or s.max() > 1.0:
        raise ValidationError("inputs must lie in [0, 1]")
    rho_a = random_density_matrix(res.dim, np.random.default_rng(seed_a))
    rho_b = random_density_matrix(res.dim, np.random.default_rng(seed_b))
    dist = np.empty(s.size + 1)
    dist[0] = np.linalg.norm(rho_a - rho_b)
    for k, sk in enumerate(s):
        rho_a = res.step(rho_a, sk)
        rho_b = res.step(rho_b, sk)
        dist[k + 1] = np.linalg.norm(rho_a - rho_b)
    return dist


def clamp_distances(dist: np.ndarray, floor: float = DISTANCE_FLOOR) -> np.ndarray:
    """Reported companion of a raw distance trace (floored at ``floor``)."""
    return np.maximum(np.asarray(dist, dtype=float), floor)
