"""Benchmark targets: nonlinear recurrences, delays, and the information
processing capacity (IPC) decomposition over Legendre polynomials.

IPC measures how much of each orthogonal polynomial function of the input
history a readout can reconstruct.  Targets are products of Legendre
polynomials of the input at distinct delays; summed capacities over a
complete family are bounded by the number of readout variables.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ShapeError, SizeError, ValidationError
from .learn import SV_CUTOFF, as_feature_array

#: Enumerating more than this many polynomial targets is refused.
MAX_IPC_TARGETS = 1_000_000

#: Delay windows per total degree: how far back targets of that degree look.
DEFAULT_DELAY_WINDOWS = {1: 100, 2: 30, 3: 15, 4: 15, 5: 15, 6: 15}

#: NARMA trajectories beyond this magnitude are reported as divergent.
NARMA_DIVERGENCE_LIMIT = 1e3


# ---------------------------------------------------------------------------
# input sequences

def uniform_inputs(
    length: int, lo: float = 0.0, hi: float = 1.0, *, rng: np.random.Generator
) -> np.ndarray:
    """I.i.d. uniform draws on [lo, hi)."""
    if length < 0:
        raise ValidationError("length must be >= 0")
    if not lo < hi:
        raise ValidationError(f"need lo < hi, got [{lo}, {hi}]")
    return rng.uniform(lo, hi, size=length)


def binary_inputs(length: int, *, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. equiprobable 0/1 draws."""
    if length < 0:
        raise ValidationError("length must be >= 0")
    return rng.integers(0, 2, size=length).astype(float)


def generate_inputs(
    kind: str,
    length: int,
    *,
    rng: np.random.Generator,
    lo: float = 0.0,
    hi: float = 1.0,
) -> np.ndarray:
    if kind == "uniform":
        return uniform_inputs(length, lo, hi, rng=rng)
    if kind == "binary":
        return binary_inputs(length, rng=rng)
    raise ValidationError(f"unknown input kind {kind!r}")


# ---------------------------------------------------------------------------
# recurrence and delay targets

def narma_target(inputs, order: int, constant: float = 0.1) -> np.ndarray:
    """Order-n NARMA series driven by ``inputs``.

    y_k = 0.3 y_{k-1} + 0.05 y_{k-1} sum_{j=1..n} y_{k-j}
          + 1.5 s_{k-n} s_{k-1} + constant,

    with zeros for every index before the series starts.  Inputs are
    expected in [0, 0.2]; values outside provoke a warning because the
    recurrence can then blow up, and an actual divergence (|y| > 1e3)
    raises a numeric error naming the step.
    """
    s = np.asarray(inputs, dtype=float)
    if s.ndim != 1:
        raise ShapeError("inputs must be 1-D")
    if order < 1:
        raise ValidationError("order must be >= 1")
    if s.size and (s.min() < 0.0 or s.max() > 0.2):
        warnings.warn(
            "inputs outside [0, 0.2]; the recurrence may diverge", stacklevel=2
        )
    y = np.zeros(s.size)
    window_sum = 0.0  # sum of the previous `order` outputs
    for k in range(s.size):
        y_prev = y[k - 1] if k >= 1 else 0.0
        s_prev = s[k - 1] if k >= 1 else 0.0
        s_back = s[k - order] if k >= order else 0.0
        val = 0.3 * y_prev + 0.05 * y_prev * window_sum + 1.5 * s_back * s_prev + constant
        if abs(val) > NARMA_DIVERGENCE_LIMIT:
            raise NumericError(f"recurrence diverged at step {k}: |y| = {abs(val):.3e}")
        y[k] = val
        window_sum += val
        if k - order >= 0:
            window_sum -= y[k - order]
    return y


def delay_target(inputs, delay: int) -> np.ndarray:
    """Targets y_k = s_{k-delay}, zero-padded before the start."""
    s = np.asarray(inputs, dtype=float)
    if s.ndim != 1:
        raise ShapeError("inputs must be 1-D")
    if delay < 0:
        raise ValidationError("delay must be >= 0")
    if delay == 0:
        return s.copy()
    out = np.zeros(s.size)
    out[delay:] = s[: s.size - delay]
    return out


# ---------------------------------------------------------------------------
# Legendre polynomials and IPC target enumeration

def legendre_poly(degree: int, x) -> np.ndarray | float:
    """Legendre polynomial P_degree evaluated on [-1, 1] inputs.

    Three-term recurrence (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1};
    orthogonal on [-1, 1] with mean P_i P_j = delta_ij / (2i + 1) under the
    uniform distribution.
    """
    if degree < 0:
        raise ValidationError("degree must be >= 0")
    xv = np.asarray(x, dtype=float)
    p_prev = np.ones_like(xv)
    if degree == 0:
        return p_prev if xv.ndim else float(p_prev)
    p = xv.copy()
    for k in range(1, degree):
        p, p_prev = ((2 * k + 1) * xv * p - k * p_prev) / (k + 1), p
    return p if xv.ndim else float(p)


@dataclass(frozen=True)
class PolynomialTarget:
    """Product of Legendre polynomials at distinct delays.

    ``terms`` holds (delay, degree) pairs with strictly increasing delays
    and all degrees >= 1.
    """

    terms: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValidationError("target needs at least one term")
        delays = [d for d, _ in self.terms]
        if sorted(set(delays)) != delays:
            raise ValidationError("delays must be strictly increasing")
        if min(delays) < 0 or min(deg for _, deg in self.terms) < 1:
            raise ValidationError("delays must be >= 0 and degrees >= 1")

    @property
    def degree(self) -> int:
        return sum(deg for _, deg in self.terms)

    @property
    def max_delay(self) -> int:
        return self.terms[-1][0]

    @property
    def label(self) -> str:
        return "*".join(f"d{deg}@{delay}" for delay, deg in self.terms)


def _compositions(total: int, min_delay: int, window: int):
    """All (delay, degree) tuples summing to ``total`` with ascending delays."""
    for delay in range(min_delay, window):
        for deg in range(1, total + 1):
            head = ((delay, deg),)
            if deg == total:
                yield head
            else:
                for rest in _compositions(total - deg, delay + 1, window):
                    yield head + rest


def _count_compositions(total: int, window: int) -> int:
    """Size of the degree-``total`` family without materializing it.

    Choosing k of ``window`` delays and splitting the degree over them
    gives C(window, k) * C(total-1, k-1) targets.
    """
    return sum(
        math.comb(window, k) * math.comb(total - 1, k - 1)
        for k in range(1, min(total, window) + 1)
    )


def enumerate_ipc_targets(
    max_degree: int = 6,
    delay_windows: dict[int, int] | None = None,
) -> list[PolynomialTarget]:
    """Canonically ordered polynomial targets up to ``max_degree``.

    For each total degree d the delays range over [0, window_d).  Order:
    ascending degree, then lexicographic delay tuples, then degree tuples.
    Refuses to build more than ``MAX_IPC_TARGETS``.
    """
    if max_degree < 1:
        raise ValidationError("max_degree must be >= 1")
    windows = dict(DEFAULT_DELAY_WINDOWS)
    if delay_windows:
        windows.update(delay_windows)
    out: list[PolynomialTarget] = []
    for d in range(1, max_degree + 1):
        window = windows.get(d)
        if window is None or window < 1:
            raise ValidationError(f"no delay window for degree {d}")
        if len(out) + _count_compositions(d, window) > MAX_IPC_TARGETS:
            raise SizeError(
                f"more than {MAX_IPC_TARGETS} targets; reduce delay windows or degree"
            )
        group = [PolynomialTarget(terms=t) for t in _compositions(d, 0, window)]
        group.sort(key=lambda t: (tuple(d_ for d_, _ in t.terms), tuple(g for _, g in t.terms)))
        out.extend(group)
    return out


def target_series(
    target: PolynomialTarget, raw_inputs: np.ndarray, washout: int
) -> np.ndarray:
    """Evaluate a polynomial target on the post-washout window."""
    s = np.asarray(raw_inputs, dtype=float)
    if washout <= target.max_delay:
        raise ValidationError("washout must exceed the largest delay")
    if washout >= s.size:
        raise ValidationError("empty post-washout window")
    n = s.size - washout
    y = np.ones(n)
    for delay, deg in target.terms:
        seg = s[washout - delay : washout - delay + n]
        y = y * legendre_poly(deg, seg)
    return y


# ---------------------------------------------------------------------------
# capacity accounting

@dataclass(frozen=True)
class TargetCapacity:
    target: PolynomialTarget
    raw_capacity: float
    passed: bool


@dataclass(frozen=True)
class CapacityReport:
    """IPC decomposition of one trajectory.

    ``per_degree`` sums only capacities above threshold; ``total`` is their
    sum and ``normalized_total`` divides by the number of readout variables
    (bias excluded), the theoretical ceiling.
    """

    per_target: tuple[TargetCapacity, ...]
    per_degree: dict[int, float]
    thresholds: dict[int, float]
    counted: dict[int, int]
    total: float
    n_variables: int
    threshold_mode: str

    @property
    def normalized_total(self) -> float:
        return self.total / self.n_variables

    def degree_share(self, degree: int) -> float:
        return self.per_degree.get(degree, 0.0) / self.total if self.total > 0 else 0.0

    def to_json_dict(self, include_targets: bool = False) -> dict:
        out = {
            "per_degree": {str(k): v for k, v in sorted(self.per_degree.items())},
            "thresholds": {str(k): v for k, v in sorted(self.thresholds.items())},
            "counted": {str(k): v for k, v in sorted(self.counted.items())},
            "total": self.total,
            "normalized_total": self.normalized_total,
            "n_variables": self.n_variables,
            "threshold_mode": self.threshold_mode,
        }
        if include_targets:
            out["targets"] = [
                {"label": tc.target.label, "capacity": tc.raw_capacity, "passed": tc.passed}
                for tc in self.per_target
            ]
        return out


def _column_space_basis(a: np.ndarray) -> np.ndarray:
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s[0] == 0:
        return u[:, :0]
    return u[:, s > SV_CUTOFF * s[0]]


def _projection_capacities(basis: np.ndarray, targets_block: np.ndarray) -> np.ndarray:
    """Capacity 1 - min_w MSE/<y^2> = |U^T y|^2 / |y|^2 per column."""
    norms = np.einsum("ij,ij->j", targets_block, targets_block)
    proj = basis.T @ targets_block
    caps = np.einsum("ij,ij->j", proj, proj)
    out = np.zeros_like(norms)
    nz = norms > 0
    out[nz] = np.clip(caps[nz] / norms[nz], 0.0, 1.0)
    return out


def _capacities_for_targets(
    basis: np.ndarray,
    targets: list[PolynomialTarget],
    raw: np.ndarray,
    washout: int,
    block: int = 256,
) -> np.ndarray:
    n = raw.size - washout
    caps = np.empty(len(targets))
    # cache P_deg(raw) full series per (degree) once; slice per delay
    poly_cache: dict[int, np.ndarray] = {}

    def poly(deg: int) -> np.ndarray:
        if deg not in poly_cache:
            poly_cache[deg] = np.asarray(legendre_poly(deg, raw))
        return poly_cache[deg]

    for start in range(0, len(targets), block):
        chunk = targets[start : start + block]
        ys = np.empty((n, len(chunk)))
        for c, t in enumerate(chunk):
            y = np.ones(n)
            for delay, deg in t.terms:
                y = y * poly(deg)[washout - delay : washout - delay + n]
            ys[:, c] = y
        caps[start : start + len(chunk)] = _projection_capacities(basis, ys)
    return caps


def ipc_capacity(
    x,
    raw_inputs,
    *,
    max_degree: int = 6,
    delay_windows: dict[int, int] | None = None,
    washout: int = 1000,
    threshold_mode: str = "surrogate",
    surrogate_seed: int = 987654321,
    surrogate_percentile: float = 99.9,
    early_stop: bool = True,
) -> CapacityReport:
    """Thresholded IPC decomposition of a design matrix.

    ``x`` holds the measured trajectory (rows aligned with ``raw_inputs``,
    inputs on [-1, 1]); the first ``washout`` rows are discarded.  Raw
    capacities are projections of each polynomial target onto the design
    matrix column space, identical to a least-squares fit evaluated in
    sample with the standard singular-value cutoff.

    Thresholds separate genuine capacity from sampling noise:
    ``surrogate`` calibrates the given percentile of capacities measured
    against an independent input stream of the same length (per degree);
    ``analytic`` uses 2 * columns / rows.  With ``early_stop``, targets of
    a degree are processed in blocks of ascending maximal delay and the
    family stops extending once a block's summed counted capacity falls at
    or below the degree threshold.
    """
    a = as_feature_array(x)
    raw = np.asarray(raw_inputs, dtype=float)
    if raw.ndim != 1 or raw.size != a.shape[0]:
        raise ShapeError("raw_inputs must be 1-D and match the design matrix rows")
    if raw.size and (raw.min() < -1.0 or raw.max() > 1.0):
        raise ValidationError("raw inputs must lie in [-1, 1]")
    if raw.size >= 64 and raw.min() >= 0.0:
        # a symmetric stream this long never stays non-negative; the caller
        # probably passed the injected [0, 1] stream instead of its source
        warnings.warn(
            "raw_inputs never go negative; Legendre targets assume a "
            "symmetric stream on [-1, 1], not the injected [0, 1] image",
            stacklevel=2,
        )
    if not 0 <= washout < raw.size:
        raise ValidationError("washout must leave a non-empty window")
    if threshold_mode not in ("surrogate", "analytic"):
        raise ValidationError(f"unknown threshold mode {threshold_mode!r}")

    targets = enumerate_ipc_targets(max_degree, delay_windows)
    max_delay = max(t.max_delay for t in targets)
    if washout <= max_delay:
        raise ValidationError(
            f"washout {washout} must exceed the largest target delay {max_delay}"
        )
    n_rows = raw.size - washout
    basis = _column_space_basis(a[washout:])
    n_vars = a.shape[1] - 1  # bias column is not a dynamical variable

    by_degree: dict[int, list[PolynomialTarget]] = {}
    for t in targets:
        by_degree.setdefault(t.degree, []).append(t)

    thresholds: dict[int, float] = {}
    if threshold_mode == "analytic":
        for d in by_degree:
            thresholds[d] = 2.0 * a.shape[1] / n_rows
    else:
        sur_rng = np.random.default_rng(surrogate_seed)
        sur_raw = sur_rng.uniform(-1.0, 1.0, size=raw.size)
        for d, group in by_degree.items():
            caps = _capacities_for_targets(basis, group, sur_raw, washout)
            thresholds[d] = float(np.percentile(caps, surrogate_percentile))

    per_target: list[TargetCapacity] = []
    per_degree: dict[int, float] = {}
    counted: dict[int, int] = {}
    for d, group in sorted(by_degree.items()):
        thr = thresholds[d]
        total_d = 0.0
        count_d = 0
        # blocks of ascending maximal delay let long families stop early
        blocks: dict[int, list[PolynomialTarget]] = {}
        for t in group:
            blocks.setdefault(t.max_delay, []).append(t)
        for max_d in sorted(blocks):
            blk = blocks[max_d]
            caps = _capacities_for_targets(basis, blk, raw, washout)
            block_sum = 0.0
            for t, c in zip(blk, caps):
                ok = bool(c >= thr)
                per_target.append(TargetCapacity(target=t, raw_capacity=float(c), passed=ok))
                if ok:
                    total_d += float(c)
                    block_sum += float(c)
                    count_d += 1
            if early_stop and block_sum <= thr:
                break
        per_degree[d] = total_d
        counted[d] = count_d

    return CapacityReport(
        per_target=tuple(per_target),
        per_degree=per_degree,
        thresholds=thresholds,
        counted=counted,
        total=float(sum(per_degree.values())),
        n_variables=n_vars,
        threshold_mode=threshold_mode,
    )
