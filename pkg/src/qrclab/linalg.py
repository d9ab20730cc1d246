"""Dense complex linear algebra kernels for systems of up to ~12 qubits.

All matrices are plain ``numpy.ndarray`` objects in the computational basis.
Tensor factors follow the convention that the *first* (leftmost) subsystem
occupies the most significant index bits, i.e. ``kron(a, b)`` places ``a``
on the leading bits; ``partial_trace_first`` removes that subsystem.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ShapeError, SizeError, ValidationError

#: Hard cap on the linear dimension a kron product may reach.
MAX_KRON_DIM = 1 << 20

#: Relative Frobenius tolerance accepted for "Hermitian" inputs.
HERMITICITY_RTOL = 1e-10


@dataclass(frozen=True)
class EigenSystem:
    """Spectral decomposition of a Hermitian matrix.

    ``eigenvalues`` are real and sorted ascending; ``eigenvectors`` holds the
    corresponding orthonormal eigenvectors as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])


def _as_square_matrix(a, name: str) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"{name} must be a square matrix, got shape {a.shape}")
    return a


def kron(a, b) -> np.ndarray:
    """Kronecker product with the left factor on the most significant bits.

    Raises a size error if the product dimension would exceed
    ``MAX_KRON_DIM`` on either side, and a validation error on non-finite
    entries.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError("kron expects 2-D operands")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValidationError("kron operands must be finite")
    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if rows > MAX_KRON_DIM or cols > MAX_KRON_DIM:
        raise SizeError(
            f"kron result {rows}x{cols} exceeds the {MAX_KRON_DIM} per-side cap"
        )
    return np.kron(a, b)


def partial_trace_first(rho, sub_dim: int) -> np.ndarray:
    """Trace out the leading tensor factor of dimension ``sub_dim``.

    For ``rho`` acting on C^sub_dim (x) C^r this returns the reduced matrix
    on C^r.  Block view: the result is the sum of the ``sub_dim`` diagonal
    blocks of size r x r.
    """
    rho = _as_square_matrix(rho, "rho")
    d = rho.shape[0]
    if sub_dim < 1 or d % sub_dim != 0:
        raise ShapeError(
            f"subsystem dimension {sub_dim} does not divide matrix dimension {d}"
        )
    r = d // sub_dim
    return np.einsum("isit->st", rho.reshape(sub_dim, r, sub_dim, r))


def frobenius_distance(a, b) -> float:
    """Frobenius norm of ``a - b``; the distance measure used throughout."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def hermitian_eig(h) -> EigenSystem:
    """Full spectral decomposition of a Hermitian matrix.

    The input must be Hermitian within ``HERMITICITY_RTOL`` relative
    Frobenius error; it is symmetrized before solving so the decomposition
    is exactly that of ``(h + h^dag)/2``.  Real-valued inputs take the
    faster real-symmetric path.
    """
    h = _as_square_matrix(h, "h")
    norm = np.linalg.norm(h)
    defect = np.linalg.norm(h - h.conj().T)
    if defect > HERMITICITY_RTOL * max(norm, 1.0):
        raise ValidationError(
            f"matrix is not Hermitian: relative defect {defect / max(norm, 1e-300):.3e}"
        )
    hs = 0.5 * (h + h.conj().T)
    if np.iscomplexobj(hs) and not np.any(hs.imag):
        hs = hs.real  # real-symmetric solver is several times faster
    try:
        w, v = np.linalg.eigh(hs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigh rarely fails
        raise NumericError(f"eigensolver failed to converge: {exc}") from exc
    return EigenSystem(eigenvalues=w, eigenvectors=v)


def propagator(eig: EigenSystem, dt: float) -> np.ndarray:
    """Unitary time-step ``exp(-i H dt)`` from the eigendecomposition of H."""
    if not np.isfinite(dt):
        raise ValidationError("dt must be finite")
    v = eig.eigenvectors
    phases = np.exp(-1j * eig.eigenvalues * dt)
    return (v * phases) @ v.conj().T


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Random full-rank density matrix from the Ginibre ensemble.

    Draws G with i.i.d. standard complex Gaussian entries and returns
    G G^dag normalized to unit trace.  The expected purity is close to
    2/dim, and the Frobenius distance between two independent draws
    concentrates around sqrt(2/dim) for large ``dim``.
    """
    if dim < 1:
        raise ValidationError(f"dim must be >= 1, got {dim}")
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def check_density_matrix(rho, *, check_psd: bool = False) -> None:
    """Validate Hermiticity and unit trace (and optionally positivity).

    Tolerances: Hermiticity within 1e-12 relative Frobenius error, trace
    within 1e-12 of one, and, when requested, smallest eigenvalue above
    -1e-10.  Raises a validation error describing the first failure.
    """
    rho = _as_square_matrix(rho, "rho")
    norm = max(float(np.linalg.norm(rho)), 1e-300)
    defect = float(np.linalg.norm(rho - rho.conj().T))
    if defect > 1e-12 * max(norm, 1.0):
        raise ValidationError(f"not Hermitian: relative defect {defect / norm:.3e}")
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > 1e-12:
        raise ValidationError(f"trace deviates from one by {abs(tr - 1.0):.3e}")
    if check_psd:
        w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
        if w[0] < -1e-10:
            raise ValidationError(f"not positive semidefinite: min eigenvalue {w[0]:.3e}")
