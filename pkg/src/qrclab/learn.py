"""Linear readout training and capacity evaluation.

A readout is a linear map from measured observables (plus a bias column) to
a scalar target, fit by least squares on a training window and scored by
the capacity

    C = cov(prediction, target)^2 / (var(prediction) var(target)),

the squared Pearson correlation, which lies in [0, 1] and equals 1 exactly
for a perfect linear reconstruction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, ValidationError

#: Relative singular-value cutoff used by the least-squares solver.
SV_CUTOFF = 1e-10

#: Series with variance below this are treated as constant (capacity 0).
VARIANCE_FLOOR = 1e-24


@dataclass(frozen=True)
class DesignMatrix:
    """Measured trajectory features: one row per step, one column per
    observable, plus a trailing bias column of ones."""

    data: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ShapeError("design matrix must be 2-D")
        if len(self.labels) != self.data.shape[1]:
            raise ShapeError(
                f"{len(self.labels)} labels for {self.data.shape[1]} columns"
            )
        if not np.all(np.isfinite(self.data)):
            raise ValidationError("design matrix contains non-finite entries")
        if self.data.shape[0] and self.labels and self.labels[-1] == "bias":
            if not np.all(self.data[:, -1] == 1.0):
                raise ValidationError("bias column must be identically one")

    @property
    def n_rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def n_columns(self) -> int:
        return int(self.data.shape[1])


def as_feature_array(x) -> np.ndarray:
    """Accept a DesignMatrix or a plain 2-D array of features."""
    data = x.data if isinstance(x, DesignMatrix) else np.asarray(x, dtype=float)
    if data.ndim != 2:
        raise ShapeError("features must be 2-D (rows x columns)")
    return data


@dataclass(frozen=True)
class SplitSpec:
    """Washout / train / test partition of a trajectory, in steps."""

    washout: int = 1000
    train: int = 2000
    test: int = 2000

    def __post_init__(self):
        if self.washout < 0 or self.train < 1 or self.test < 1:
            raise ValidationError("washout >= 0 and train, test >= 1 required")

    @property
    def total(self) -> int:
        return self.washout + self.train + self.test

    @property
    def train_slice(self) -> slice:
        return slice(self.washout, self.washout + self.train)

    @property
    def test_slice(self) -> slice:
        return slice(self.washout + self.train, self.total)


@dataclass(frozen=True)
class RegressionSolution:
    """Least-squares readout weights and training diagnostics."""

    weights: np.ndarray
    train_mse: float
    effective_rank: int
    warning: str | None = None


def fit_readout(
    x, target, ridge: float = 0.0, sv_cutoff: float = SV_CUTOFF
) -> RegressionSolution:
    """Least-squares fit of ``x @ w ~ target`` via SVD.

    Singular values below ``sv_cutoff`` times the largest are discarded;
    ``effective_rank`` counts the retained ones.  ``ridge > 0`` switches to
    Tikhonov shrinkage s/(s^2 + ridge) on the retained directions.  An
    all-zero design matrix yields zero weights and a warning instead of an
    error.
    """
    a = as_feature_array(x)
    y = np.asarray(target, dtype=float)
    if y.ndim != 1 or y.size != a.shape[0]:
        raise ShapeError(f"target length {y.size} does not match {a.shape[0]} rows")
    if ridge < 0:
        raise ValidationError("ridge must be >= 0")
    if not np.all(np.isfinite(y)):
        raise ValidationError("target contains non-finite entries")
    if a.shape[0] == 0:
        raise ValidationError("cannot fit on an empty window")
    if not np.any(a):
        return RegressionSolution(
            weights=np.zeros(a.shape[1]),
            train_mse=float(np.mean(y**2)),
            effective_rank=0,
            warning="all-zero design matrix; returning zero weights",
        )
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    keep = s > sv_cutoff * s[0]
    uty = u.T[keep] @ y
    if ridge > 0:
        coef = s[keep] / (s[keep] ** 2 + ridge)
    else:
        coef = 1.0 / s[keep]
    w = vt[keep].T @ (coef * uty)
    resid = a @ w - y
    return RegressionSolution(
        weights=w,
        train_mse=float(np.mean(resid**2)),
        effective_rank=int(keep.sum()),
    )


def predict(x, weights: np.ndarray) -> np.ndarray:
    return as_feature_array(x) @ weights


def capacity(prediction, target) -> float:
    """Squared Pearson correlation between prediction and target.

    Returns 0 when either series is constant (variance below
    ``VARIANCE_FLOOR``); both inputs must be equal-length with >= 2 samples.
    """
    p = np.asarray(prediction, dtype=float)
    t = np.asarray(target, dtype=float)
    if p.shape != t.shape or p.ndim != 1:
        raise ShapeError("prediction and target must be equal-length 1-D")
    if p.size < 2:
        raise ValidationError("need at least two samples")
    var_p = float(np.var(p))
    var_t = float(np.var(t))
    if var_p < VARIANCE_FLOOR or var_t < VARIANCE_FLOOR:
        return 0.0
    cov = float(np.mean((p - p.mean()) * (t - t.mean())))
    return min(cov * cov / (var_p * var_t), 1.0)


@dataclass(frozen=True)
class TrainEvalResult:
    """Readout performance on a washout/train/test split."""

    c_train: float
    c_test: float
    solution: RegressionSolution


def train_eval(x, target, split: SplitSpec, ridge: float = 0.0) -> TrainEvalResult:
    """Fit on the training window and score capacity on train and test.

    The trajectory must have exactly ``split.total`` rows; washout rows are
    discarded unseen.
    """
    a = as_feature_array(x)
    y = np.asarray(target, dtype=float)
    if a.shape[0] != split.total:
        raise ValidationError(
            f"trajectory has {a.shape[0]} rows, split needs {split.total}"
        )
    if y.shape != (split.total,):
        raise ShapeError("target length must equal split total")
    sol = fit_readout(a[split.train_slice], y[split.train_slice], ridge=ridge)
    c_tr = capacity(a[split.train_slice] @ sol.weights, y[split.train_slice])
    c_te = capacity(a[split.test_slice] @ sol.weights, y[split.test_slice])
    return TrainEvalResult(c_train=c_tr, c_test=c_te, solution=sol)


def solution_json_dict(result: TrainEvalResult, split: SplitSpec, ridge: float) -> dict:
    """JSON-ready record of a trained readout."""
    return {
        "weights": result.solution.weights.tolist(),
        "train_mse": result.solution.train_mse,
        "effective_rank": result.solution.effective_rank,
        "c_train": result.c_train,
        "c_test": result.c_test,
        "split": {"washout": split.washout, "train": split.train, "test": split.test},
        "ridge": ridge,
    }
