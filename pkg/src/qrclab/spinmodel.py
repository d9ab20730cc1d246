"""Disordered spin networks with transverse field and random x-x couplings.

The Hamiltonian acting on n spins is

    H = sum_{i>j} J_ij sx_i sx_j + (1/2) sum_i (h + D_i) sz_i

with all-to-all couplings J_ij drawn uniformly from [-j_s/2, j_s/2] and
onsite disorder D_i uniform on [-w, w].  Energies are expressed in units of
the coupling scale j_s.

Conventions: sites are 1-based in the public API; site 1 sits on the most
significant index bit; |0> is the sz = +1 eigenstate.  The x-x coupling
flips pairs of bits, so H commutes with the global parity prod_i sz_i and
splits into even/odd parity sectors.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ShapeError, ValidationError

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
IDENTITY_2 = np.eye(2, dtype=np.complex128)

_PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

MIN_SPINS = 2
MAX_SPINS = 12


@dataclass(frozen=True)
class ModelParams:
    """Ensemble parameters of the disordered network.

    ``h`` is the uniform transverse-field strength, ``w`` the half-width of
    the onsite disorder, ``j_s`` the coupling scale (the unit of energy),
    and ``seed`` the default seed used when sampling a realization.
    """

    n_spins: int = 10
    h: float = 1.0
    w: float = 0.0
    j_s: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not MIN_SPINS <= self.n_spins <= MAX_SPINS:
            raise ValidationError(
                f"n_spins must lie in [{MIN_SPINS}, {MAX_SPINS}], got {self.n_spins}"
            )
        if self.h < 0 or self.w < 0 or self.j_s <= 0:
            raise ValidationError("h and w must be >= 0 and j_s > 0")
        for name in ("h", "w", "j_s"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")

    @property
    def dim(self) -> int:
        return 1 << self.n_spins


@dataclass(frozen=True)
class DisorderRealization:
    """One draw of couplings and onsite fields for given parameters.

    ``couplings`` is the full symmetric n x n matrix with zero diagonal;
    ``fields`` holds the onsite offsets D_i.
    """

    params: ModelParams
    couplings: np.ndarray = field(repr=False)
    fields: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.params.n_spins
        if self.couplings.shape != (n, n):
            raise ShapeError(f"couplings must be {n}x{n}")
        if self.fields.shape != (n,):
            raise ShapeError(f"fields must have length {n}")
        if not np.allclose(self.couplings, self.couplings.T):
            raise ValidationError("couplings must be symmetric")

    def to_json_dict(self) -> dict:
        """Serialize as {n_spins, h, w, seed, couplings, fields}.

        ``couplings`` is stored as the lower triangle in row-major order:
        J_21, J_31, J_32, J_41, ... (1-based sites).
        """
        n = self.params.n_spins
        rows, cols = np.tril_indices(n, -1)
        return {
            "n_spins": n,
            "h": self.params.h,
            "w": self.params.w,
            "seed": self.params.seed,
            "couplings": self.couplings[rows, cols].tolist(),
            "fields": self.fields.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict) -> "DisorderRealization":
        params = ModelParams(
            n_spins=int(data["n_spins"]),
            h=float(data["h"]),
            w=float(data["w"]),
            seed=int(data["seed"]),
        )
        n = params.n_spins
        tri = np.asarray(data["couplings"], dtype=float)
        if tri.shape != (n * (n - 1) // 2,):
            raise ShapeError("couplings list has wrong length")
        couplings = np.zeros((n, n))
        rows, cols = np.tril_indices(n, -1)
        couplings[rows, cols] = tri
        couplings += couplings.T
        fields = np.asarray(data["fields"], dtype=float)
        return cls(params=params, couplings=couplings, fields=fields)

    @classmethod
    def from_json(cls, text: str) -> "DisorderRealization":
        return cls.from_json_dict(json.loads(text))


def sample_realization(
    params: ModelParams, rng: np.random.Generator | None = None
) -> DisorderRealization:
    """Draw couplings and fields for one network.

    Uses ``default_rng(params.seed)`` when no generator is given, so a
    realization is reproducible from its serialized parameters alone.
    """
    if rng is None:
        rng = np.random.default_rng(params.seed)
    n = params.n_spins
    rows, cols = np.tril_indices(n, -1)
    tri = rng.uniform(-params.j_s / 2.0, params.j_s / 2.0, size=rows.size)
    couplings = np.zeros((n, n))
    couplings[rows, cols] = tri
    couplings += couplings.T
    fields = rng.uniform(-params.w, params.w, size=n) if params.w > 0 else np.zeros(n)
    return DisorderRealization(params=params, couplings=couplings, fields=fields)


def with_seed(params: ModelParams, seed: int) -> ModelParams:
    return replace(params, seed=seed)


# ---------------------------------------------------------------------------
# bit bookkeeping (site 1 <-> most significant bit)

def site_mask(site: int, n_spins: int) -> int:
    """Index bit carrying the given 1-based site."""
    if not 1 <= site <= n_spins:
        raise ValidationError(f"site {site} outside [1, {n_spins}]")
    return 1 << (n_spins - site)


def sz_signs(n_spins: int) -> np.ndarray:
    """(n, 2^n) array: entry [i, b] is the sz eigenvalue of site i+1 on |b>."""
    idx = np.arange(1 << n_spins)
    shifts = n_spins - 1 - np.arange(n_spins)
    return 1.0 - 2.0 * ((idx[None, :] >> shifts[:, None]) & 1)


def parity_signs(n_spins: int) -> np.ndarray:
    """Diagonal of prod_i sz_i: (-1)^popcount(b)."""
    idx = np.arange(1 << n_spins)
    bits = (idx[:, None] >> np.arange(n_spins)[None, :]) & 1
    return 1.0 - 2.0 * (bits.sum(axis=1) % 2)


def sector_indices(n_spins: int, sector: str = "even") -> np.ndarray:
    """Computational-basis indices of one parity sector, ascending.

    Even sector: even number of down spins (parity +1).
    """
    if sector not in ("even", "odd"):
        raise ValidationError(f"sector must be 'even' or 'odd', got {sector!r}")
    idx = np.arange(1 << n_spins)
    bits = (idx[:, None] >> np.arange(n_spins)[None, :]) & 1
    want = 0 if sector == "even" else 1
    return idx[bits.sum(axis=1) % 2 == want]


# ---------------------------------------------------------------------------
# observables

@dataclass(frozen=True)
class ObservableDescriptor:
    """Structured name of a measurable quantity.

    kinds: ``single`` (one Pauli on one site), ``pair_zz`` (sz_i sz_j),
    ``energy`` (the Hamiltonian itself), ``parity`` (prod_i sz_i).
    """

    kind: str
    sites: tuple[int, ...] = ()
    axis: str = ""

    def __post_init__(self):
        if self.kind == "single":
            if len(self.sites) != 1 or self.sites[0] < 1:
                raise ValidationError("single observable needs one site >= 1")
            if self.axis not in ("x", "y", "z"):
                raise ValidationError(f"axis must be x, y or z, got {self.axis!r}")
        elif self.kind == "pair_zz":
            if len(self.sites) != 2 or len(set(self.sites)) != 2 or min(self.sites) < 1:
                raise ValidationError("pair_zz needs two distinct sites >= 1")
        elif self.kind in ("energy", "parity"):
            if self.sites or self.axis:
                raise ValidationError(f"{self.kind} takes no sites or axis")
        else:
            raise ValidationError(f"unknown observable kind {self.kind!r}")

    @classmethod
    def single(cls, site: int, axis: str) -> "ObservableDescriptor":
        return cls(kind="single", sites=(site,), axis=axis)

    @classmethod
    def pair_zz(cls, site_i: int, site_j: int) -> "ObservableDescriptor":
        lo, hi = sorted((site_i, site_j))
        return cls(kind="pair_zz", sites=(lo, hi))

    @classmethod
    def energy(cls) -> "ObservableDescriptor":
        return cls(kind="energy")

    @classmethod
    def parity(cls) -> "ObservableDescriptor":
        return cls(kind="parity")

    @property
    def label(self) -> str:
        if self.kind == "single":
            return f"{self.axis}{self.sites[0]}"
        if self.kind == "pair_zz":
            return f"zz{self.sites[0]}_{self.sites[1]}"
        return self.kind


def default_observables(n_spins: int) -> tuple[ObservableDescriptor, ...]:
    """The standard readout set: all single-site x, y, z and all zz pairs.

    Size 3n + n(n-1)/2 (75 at n = 10).  Column order: x1..xn, y1..yn,
    z1..zn, then zz pairs with i < j in row-major order.
    """
    singles = [
        ObservableDescriptor.single(site, axis)
        for axis in ("x", "y", "z")
        for site in range(1, n_spins + 1)
    ]
    pairs = [
        ObservableDescriptor.pair_zz(i, j)
        for i in range(1, n_spins + 1)
        for j in range(i + 1, n_spins + 1)
    ]
    return tuple(singles + pairs)


def observable_operator(
    desc: ObservableDescriptor,
    n_spins: int,
    hamiltonian: np.ndarray | None = None,
) -> np.ndarray:
    """Dense matrix of an observable, built by Kronecker placement.

    ``energy`` requires the Hamiltonian matrix to be passed in.
    """
    if desc.kind == "energy":
        if hamiltonian is None:
            raise ValidationError("energy observable needs the Hamiltonian matrix")
        return hamiltonian
    if desc.kind in ("single", "pair_zz") and max(desc.sites) > n_spins:
        raise ValidationError(f"site {max(desc.sites)} outside [1, {n_spins}]")
    factors = [IDENTITY_2] * n_spins
    if desc.kind == "single":
        factors[desc.sites[0] - 1] = _PAULI[desc.axis]
    elif desc.kind == "pair_zz":
        for site in desc.sites:
            factors[site - 1] = SIGMA_Z
    else:  # parity
        factors = [SIGMA_Z] * n_spins
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


# ---------------------------------------------------------------------------
# Hamiltonian assembly

def _diagonal_part(real: DisorderRealization) -> np.ndarray:
    """Diagonal of H: (1/2) sum_i (h + D_i) sz_i evaluated per basis state."""
    return 0.5 * ((real.params.h + real.fields) @ sz_signs(real.params.n_spins))


def build_hamiltonian(real: DisorderRealization) -> np.ndarray:
    """Dense 2^n x 2^n Hamiltonian (complex dtype, real symmetric entries).

    The field term is diagonal; each coupling J_ij connects basis states
    differing exactly in bits i and j.
    """
    n = real.params.n_spins
    dim = 1 << n
    h = np.zeros((dim, dim), dtype=np.complex128)
    idx = np.arange(dim)
    h[idx, idx] = _diagonal_part(real)
    for i in range(1, n + 1):
        for j in range(1, i):
            mask = site_mask(i, n) | site_mask(j, n)
            h[idx, idx ^ mask] = real.couplings[i - 1, j - 1]
    return h


def build_sector_hamiltonian(
    real: DisorderRealization, sector: str = "even"
) -> np.ndarray:
    """Hamiltonian restricted to one global-parity sector.

    Basis: sector computational states in ascending original index.  The
    coupling term preserves parity (it flips two bits at once), so the
    restriction is exact.  Dimension 2^(n-1) for each sector.
    """
    n = real.params.n_spins
    idx = sector_indices(n, sector)
    m = idx.size
    pos = np.full(1 << n, -1, dtype=np.int64)
    pos[idx] = np.arange(m)
    hs = np.zeros((m, m), dtype=np.complex128)
    hs[np.arange(m), np.arange(m)] = _diagonal_part(real)[idx]
    for i in range(1, n + 1):
        for j in range(1, i):
            mask = site_mask(i, n) | site_mask(j, n)
            hs[np.arange(m), pos[idx ^ mask]] = real.couplings[i - 1, j - 1]
    return hs
