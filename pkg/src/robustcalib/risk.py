"""Class-conditional risks and the robust 0-1 loss of linear classifiers."""

from dataclasses import dataclass

import numpy as np

from robustcalib import kernels
from robustcalib.losses import LossSpec, eval as loss_eval, structural_report

# Grid size and alpha tolerance for the generic CCR minimiser.
MIN_CCR_GRID = 4001
MIN_CCR_TOL = 1e-10


@dataclass(frozen=True)
class CcrQuery:
    """Minimise the CCR at posterior ``eta`` over [alpha_lo, alpha_hi]."""

    eta: float
    alpha_lo: float = -1.0
    alpha_hi: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if not -1.0 <= self.alpha_lo <= self.alpha_hi <= 1.0:
            raise ValueError(f"need -1 <= alpha_lo <= alpha_hi <= 1, got "
                             f"[{self.alpha_lo}, {self.alpha_hi}]")


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    bias: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64))
        object.__setattr__(self, "bias", float(self.bias))

    def decision(self, features: np.ndarray) -> np.ndarray:
        return features @ self.weights + self.bias

    @property
    def params(self) -> np.ndarray:
        """Weights followed by the bias."""
        return np.append(self.weights, self.bias)


@dataclass(frozen=True)
class Dataset:
    """Labelled points; ``scale`` records any rescaling applied on load."""

    features: np.ndarray
    labels: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.features, dtype=np.float64))
        y = np.asarray(self.labels, dtype=np.float64).ravel()
        if x.shape[0] != y.size:
            raise ValueError(f"{x.shape[0]} feature rows but {y.size} labels")
        if not np.all(np.abs(y) == 1.0):
            raise ValueError("labels must be +1 or -1")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)

    def __len__(self) -> int:
        return self.labels.size


def ccr(loss: LossSpec, alpha, eta):
    """Class-conditional risk eta*phi(alpha) + (1 - eta)*phi(-alpha)."""
    eta_arr = np.asarray(eta, dtype=np.float64)
    if np.any((eta_arr < 0.0) | (eta_arr > 1.0)):
        raise ValueError("eta must lie in [0, 1]")
    alpha_arr = np.asarray(alpha, dtype=np.float64)
    out = eta_arr * loss_eval(loss, alpha_arr) + (1.0 - eta_arr) * loss_eval(loss, -alpha_arr)
    return float(out) if np.ndim(out) == 0 else out


def uses_endpoint_rule(loss: LossSpec) -> bool:
    """Whether the CCR minimum over an interval is attained at an endpoint."""
    rep = structural_report(loss)
    return rep.quasiconcave_even and rep.nonincreasing and rep.bounded


def min_ccr(loss: LossSpec, query: CcrQuery, grid: int = MIN_CCR_GRID) -> tuple[float, float]:
    """Infimum of the CCR over the query interval and a minimiser.

    Quasiconcave-even nonincreasing losses attain the minimum at an
    interval endpoint. Other losses use a dense grid followed by
    golden-section refinement on the bracket around the best node.
    """
    lo, hi, eta = query.alpha_lo, query.alpha_hi, query.eta
    if lo == hi:
        return ccr(loss, lo, eta), lo
    if uses_endpoint_rule(loss):
        c_lo, c_hi = ccr(loss, lo, eta), ccr(loss, hi, eta)
        return (c_lo, lo) if c_lo <= c_hi else (c_hi, hi)
    vals, idx = kernels.ccr_grid_min(loss.code, loss.shift, np.array([eta]), lo, hi, grid)
    return refine_alpha(loss, eta, lo, hi, grid, int(idx[0]), float(vals[0]))


def refine_alpha(loss: LossSpec, eta: float, lo: float, hi: float, grid: int, k: int,
                 value: float) -> tuple[float, float]:
    """Golden-section refinement around grid node ``k`` of a CCR grid search."""
    step = (hi - lo) / (grid - 1)
    a = max(lo, lo + (k - 1) * step)
    b = min(hi, lo + (k + 1) * step)
    ref_val, ref_arg = kernels.golden_ccr(loss.code, loss.shift, eta, a, b, MIN_CCR_TOL)
    node = lo + k * step
    if ref_val < value:
        return ref_val, ref_arg
    return value, node


def robust_loss_linear(weights, bias: float, x, y: float, gamma: float) -> int:
    """Robust 0-1 loss of an affine classifier under an l2 attack of radius gamma."""
    w = np.asarray(weights, dtype=np.float64)
    norm = float(np.linalg.norm(w))
    if norm == 0.0:
        raise ValueError("weight vector must be nonzero")
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    margin = y * (float(np.dot(w, x)) + bias)
    return int(margin <= gamma * norm)


def _check(model: LinearModel, data: Dataset) -> float:
    if len(data) == 0:
        raise ValueError("dataset is empty")
    norm = float(np.linalg.norm(model.weights))
    if norm == 0.0:
        raise ValueError("weight vector must be nonzero")
    return norm


def robust_risk(model: LinearModel, data: Dataset, gamma: float) -> float:
    norm = _check(model, data)
    margins = data.labels * model.decision(data.features)
    return float(np.mean(margins <= gamma * norm))


def zero_one_risk(model: LinearModel, data: Dataset) -> float:
    _check(model, data)
    margins = data.labels * model.decision(data.features)
    return float(np.mean(margins <= 0.0))


def vulnerable_fraction(model: LinearModel, data: Dataset, gamma: float) -> float:
    """Fraction of points within distance gamma of the decision hyperplane."""
    norm = _check(model, data)
    return float(np.mean(np.abs(model.decision(data.features)) <= gamma * norm))


def surrogate_risk(loss: LossSpec, model: LinearModel, data: Dataset) -> float:
    margins = data.labels * model.decision(data.features)
    return float(np.mean(loss_eval(loss, margins)))
