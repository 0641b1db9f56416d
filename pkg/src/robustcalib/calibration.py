"""Numerical calibration functions, their convex envelopes and verdicts.

The calibration function of a surrogate wrt the gamma-robust 0-1 loss over
unit-norm linear models is the infimum over the posterior eta of a three
case quantity ``delta_bar``. The cases split the eta axis into intervals
whose endpoints depend on epsilon, so the engine tabulates the eta
dependent CCR infima once and then minimises piece by piece.
"""

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from robustcalib import kernels
from robustcalib.losses import LossSpec, StructuralReport, eval as loss_eval, structural_report
from robustcalib.risk import MIN_CCR_TOL, CcrQuery, min_ccr, uses_endpoint_rule

DEFAULT_EPSILONS = np.linspace(0.02, 0.98, 97)
DEFAULT_ETA_POINTS = 2001
DEFAULT_ALPHA_GRID = 2001
ETA_TOL = 1e-8
# A sampled delta above this counts as strictly positive.
POSITIVE_DELTA = 1e-6
# Margin by which phi(gamma) + phi(-gamma) must exceed B.
STRICT_MARGIN_TOL = 1e-12


class CurveKind(str, enum.Enum):
    RAW_DELTA = "raw_delta"
    CHECK_DELTA = "check_delta"
    BICONJUGATE = "biconjugate"


@dataclass(frozen=True)
class CalibrationCurve:
    """Sampled values of a calibration function on an epsilon grid."""

    epsilons: np.ndarray
    deltas: np.ndarray
    kind: CurveKind = CurveKind.RAW_DELTA

    def __post_init__(self):
        eps = np.asarray(self.epsilons, dtype=np.float64).ravel()
        dlt = np.asarray(self.deltas, dtype=np.float64).ravel()
        if eps.size == 0 or eps.size != dlt.size:
            raise ValueError("epsilons and deltas must be nonempty and equally long")
        if eps[0] <= 0.0 or eps[-1] > 1.0 or np.any(np.diff(eps) <= 0.0):
            raise ValueError("epsilons must be strictly increasing within (0, 1]")
        if np.any(np.isnan(dlt)) or np.any(dlt < 0.0):
            raise ValueError("deltas must be nonnegative")
        object.__setattr__(self, "epsilons", eps)
        object.__setattr__(self, "deltas", dlt)
        object.__setattr__(self, "kind", CurveKind(self.kind))

    def __call__(self, eps):
        """Piecewise-linear interpolant through (0, 0) and the samples.

        Arguments beyond the last finite sample are clamped to it.
        """
        finite = np.isfinite(self.deltas)
        xs = np.concatenate(([0.0], self.epsilons[finite]))
        ys = np.concatenate(([0.0], self.deltas[finite]))
        out = np.interp(eps, xs, ys)
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class Verdict:
    """Calibration decision for one loss and budget.

    Attributes:
        calibrated: Whether the loss is calibrated wrt the target.
        target: ``"phi_gamma"`` for the robust 0-1 loss.
        rule: Which criterion decided, one of ``thm6_convex``,
            ``thm9_condition`` or ``numeric_delta``.
        witness: For ``thm9_condition`` the margin phi(gamma) + phi(-gamma) - B.
            For ``thm6_convex`` the CCR gap at eta = 1/2 between the band
            |alpha| <= gamma and all of [-1, 1], which is zero and certifies
            delta(1/2) = 0. For ``numeric_delta`` the smallest sampled delta.
        zero_one_calibrated: Calibration wrt the plain 0-1 loss when the
            decision rule establishes it, else None.
    """

    calibrated: bool
    target: str
    rule: str
    witness: float
    zero_one_calibrated: bool | None = None


class ExcessBound(NamedTuple):
    target_excess: float
    invertible: bool


def _check_gamma(gamma: float) -> None:
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")


def _inf(loss: LossSpec, eta: float, lo: float, hi: float, alpha_grid: int) -> float:
    return min_ccr(loss, CcrQuery(eta, lo, hi), grid=alpha_grid)[0]


def delta_bar(loss: LossSpec, gamma: float, epsilon: float, eta: float,
              alpha_grid: int = DEFAULT_ALPHA_GRID) -> float:
    """Pointwise calibration quantity at one (epsilon, eta) pair.

    Returns +inf when the target excess epsilon is unreachable at eta.
    """
    _check_gamma(gamma)
    if not epsilon > 0.0:
        raise ValueError("epsilon must be positive")
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    if alpha_grid < 2001:
        raise ValueError("alpha_grid must be at least 2001")
    if epsilon > max(eta, 1.0 - eta):
        return math.inf
    cstar = _inf(loss, eta, -1.0, 1.0, alpha_grid)
    if abs(2.0 * eta - 1.0) < epsilon:
        lo, hi = -gamma, gamma
    elif eta > 0.5:
        lo, hi = -1.0, gamma
    else:
        lo, hi = -gamma, 1.0
    return max(0.0, _inf(loss, eta, lo, hi, alpha_grid) - cstar)


class _Engine:
    """Tabulated CCR infima on an eta grid for one loss and budget."""

    def __init__(self, loss: LossSpec, gamma: float, etas: np.ndarray, alpha_grid: int):
        self.loss, self.gamma, self.alpha_grid = loss, gamma, alpha_grid
        self.etas = etas
        self.endpoint = uses_endpoint_rule(loss)
        self.sets = {
            "band": (-gamma, gamma),
            "upper": (-1.0, gamma),
            "lower": (-gamma, 1.0),
        }
        args = (loss.code, loss.shift, etas)
        tail = (self.endpoint, alpha_grid, MIN_CCR_TOL)
        cstar = kernels.interval_table(*args, -1.0, 1.0, *tail)
        self.tables = {}
        for name, (lo, hi) in self.sets.items():
            if name == "lower" and etas[0] >= 0.5:
                continue
            self.tables[name] = kernels.interval_table(*args, lo, hi, *tail) - cstar

    def _args(self, name: str) -> tuple:
        lo, hi = self.sets[name]
        return (self.loss.code, self.loss.shift, lo, hi, self.endpoint, self.alpha_grid,
                MIN_CCR_TOL)

    def gap(self, name: str, eta: float) -> float:
        code, beta, lo, hi, endpoint, n, tol = self._args(name)
        return kernels.gap(code, beta, eta, lo, hi, endpoint, n, tol)

    def piece_min(self, name: str, a: float, b: float) -> float:
        """Minimum of one case's gap over eta in [a, b]."""
        best = min(self.gap(name, a), self.gap(name, b))
        table = self.tables[name]
        inside = np.flatnonzero((self.etas > a) & (self.etas < b))
        if inside.size == 0:
            return best
        k = int(inside[np.argmin(table[inside])])
        if table[k] >= best:
            return best
        # Golden-section refinement on the bracket around an interior best node.
        lo = max(a, float(self.etas[max(k - 1, 0)]))
        hi = min(b, float(self.etas[min(k + 1, self.etas.size - 1)]))
        refined = kernels.golden_gap(*self._args(name), lo, hi, ETA_TOL)
        return min(float(table[k]), refined)

    def delta(self, eps: float, full: bool) -> float:
        best = math.inf
        mid_lo, mid_hi = max(eps, 0.5), 0.5 * (1.0 + eps)
        if mid_lo < mid_hi:
            best = min(best, self.piece_min("band", mid_lo, mid_hi))
        best = min(best, self.piece_min("upper", mid_hi, 1.0))
        if full:
            low_lo, low_hi = 0.5 * (1.0 - eps), min(1.0 - eps, 0.5)
            if low_lo < low_hi:
                best = min(best, self.piece_min("band", low_lo, low_hi))
            best = min(best, self.piece_min("lower", 0.0, low_lo))
        return max(0.0, best)


def calibration_fn_numeric(loss: LossSpec, gamma: float, epsilon_grid=None,
                           eta_points: int = DEFAULT_ETA_POINTS,
                           alpha_grid: int = DEFAULT_ALPHA_GRID,
                           eta_range: str = "half") -> CalibrationCurve:
    """Numerical calibration function on an epsilon grid.

    Args:
        loss: Surrogate loss.
        gamma: Perturbation budget in (0, 1).
        epsilon_grid: Target excess levels in (0, 1]; defaults to 97 points
            on [0.02, 0.98].
        eta_points: Grid size on [1/2, 1]. With ``eta_range="full"`` the
            grid covers [0, 1] at the same spacing.
        alpha_grid: Grid size per margin interval for losses without the
            endpoint rule.
        eta_range: ``"half"`` scans eta in [1/2, 1], which suffices by the
            eta-symmetry of the CCR; ``"full"`` scans [0, 1].

    Returns:
        A raw_delta curve.
    """
    _check_gamma(gamma)
    if eta_points < 2001:
        raise ValueError("eta_points must be at least 2001")
    if alpha_grid < 2001:
        raise ValueError("alpha_grid must be at least 2001")
    if eta_range not in ("half", "full"):
        raise ValueError("eta_range must be 'half' or 'full'")
    eps = DEFAULT_EPSILONS if epsilon_grid is None else np.asarray(epsilon_grid, dtype=np.float64)
    if np.any(eps <= 0.0) or np.any(eps > 1.0):
        raise ValueError("epsilons must lie in (0, 1]")
    full = eta_range == "full"
    etas = (np.linspace(0.0, 1.0, 2 * eta_points - 1) if full
            else np.linspace(0.5, 1.0, eta_points))
    engine = _Engine(loss, gamma, etas, alpha_grid)
    deltas = np.array([engine.delta(float(e), full) for e in eps])
    return CalibrationCurve(eps, deltas, CurveKind.RAW_DELTA)


def lower_hull(xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lower convex hull of points sorted by x (monotone chain)."""
    hx: list[float] = []
    hy: list[float] = []
    for x, y in zip(xs, ys):
        while len(hx) >= 2:
            cross = (hx[-1] - hx[-2]) * (y - hy[-2]) - (hy[-1] - hy[-2]) * (x - hx[-2])
            if cross > 0.0:
                break
            hx.pop()
            hy.pop()
        hx.append(float(x))
        hy.append(float(y))
    return np.array(hx), np.array(hy)


def biconjugate(curve: CalibrationCurve) -> CalibrationCurve:
    """Largest convex minorant of a sampled curve with delta(0) = 0.

    Infinite samples are excluded from the hull and stay infinite.
    """
    finite = np.isfinite(curve.deltas)
    if finite.sum() < 2:
        raise ValueError("need at least two finite samples")
    xs = np.concatenate(([0.0], curve.epsilons[finite]))
    ys = np.concatenate(([0.0], curve.deltas[finite]))
    hx, hy = lower_hull(xs, ys)
    out = np.full(curve.epsilons.size, math.inf)
    out[finite] = np.interp(curve.epsilons[finite], hx, hy)
    # Hull vertices keep their sampled values exactly.
    out[finite] = np.where(np.isin(curve.epsilons[finite], hx), curve.deltas[finite], out[finite])
    return CalibrationCurve(curve.epsilons, np.maximum(out, 0.0), CurveKind.BICONJUGATE)


def excess_risk_transform(biconj: CalibrationCurve, surrogate_excess: float) -> ExcessBound:
    """Bound the target excess risk from a surrogate excess risk.

    Returns the largest epsilon in the curve's domain whose envelope value
    does not exceed ``surrogate_excess``. The flag ``invertible`` is False
    when the envelope vanishes at the first grid point, in which case no
    nontrivial bound exists.
    """
    if biconj.kind is not CurveKind.BICONJUGATE:
        raise ValueError("expected a biconjugate curve")
    if not surrogate_excess >= 0.0:
        raise ValueError("surrogate_excess must be nonnegative")
    finite = np.isfinite(biconj.deltas)
    xs = np.concatenate(([0.0], biconj.epsilons[finite]))
    ys = np.concatenate(([0.0], biconj.deltas[finite]))
    invertible = bool(ys[1] > POSITIVE_DELTA)
    feasible = np.flatnonzero(ys <= surrogate_excess)
    j = int(feasible[-1])
    if j == xs.size - 1:
        return ExcessBound(float(xs[-1]), invertible)
    # The envelope is nondecreasing, so the crossing lies on segment j.
    t = (surrogate_excess - ys[j]) / (ys[j + 1] - ys[j])
    return ExcessBound(float(xs[j] + t * (xs[j + 1] - xs[j])), invertible)


def verdict(loss: LossSpec, gamma: float, report: StructuralReport | None = None,
            epsilon_grid=None) -> Verdict:
    """Decide calibration wrt the gamma-robust 0-1 loss."""
    _check_gamma(gamma)
    if report is None:
        report = structural_report(loss)
    if report.loss is not None and report.loss != loss:
        raise ValueError("structural report belongs to a different loss")
    if report.convex:
        band = min_ccr(loss, CcrQuery(0.5, -gamma, gamma))[0]
        whole = min_ccr(loss, CcrQuery(0.5, -1.0, 1.0))[0]
        return Verdict(False, "phi_gamma", "thm6_convex", band - whole)
    if (report.bounded and report.nonincreasing and report.quasiconcave_even
            and report.strict_at_endpoints):
        margin = loss_eval(loss, gamma) + loss_eval(loss, -gamma) - report.B
        return Verdict(bool(margin > STRICT_MARGIN_TOL), "phi_gamma", "thm9_condition", margin, True)
    curve = calibration_fn_numeric(loss, gamma, epsilon_grid)
    low = float(curve.deltas.min())
    return Verdict(bool(low > POSITIVE_DELTA), "phi_gamma", "numeric_delta", low)
