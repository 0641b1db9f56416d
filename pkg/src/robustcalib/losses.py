"""Shifted margin losses, their even parts, derivatives and structure flags.

A loss is identified by a family and a horizontal shift ``beta``; the
shifted loss is ``phi_beta(alpha) = phi(alpha - beta)``. All evaluation
functions accept scalars or arrays and return a float for scalar input.
"""

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from robustcalib import kernels


class Family(str, enum.Enum):
    RAMP = "ramp"
    SIGMOID = "sigmoid"
    MODIFIED_SQUARED = "modified_squared"
    HINGE = "hinge"
    LOGISTIC = "logistic"
    SQUARED = "squared"


_CODES = {
    Family.RAMP: kernels.RAMP,
    Family.SIGMOID: kernels.SIGMOID,
    Family.MODIFIED_SQUARED: kernels.MODSQ,
    Family.HINGE: kernels.HINGE,
    Family.LOGISTIC: kernels.LOGISTIC,
    Family.SQUARED: kernels.SQUARED,
}
BOUNDED_FAMILIES = frozenset({Family.RAMP, Family.SIGMOID, Family.MODIFIED_SQUARED})
CONVEX_FAMILIES = frozenset({Family.HINGE, Family.LOGISTIC, Family.SQUARED})
# The squared loss increases again past its minimum at alpha = 1 + beta.
NONINCREASING_FAMILIES = frozenset(Family) - {Family.SQUARED}


@dataclass(frozen=True)
class LossSpec:
    """A shifted margin-based surrogate loss.

    Attributes:
        family: Loss family; strings such as ``"ramp"`` are accepted.
        shift: Horizontal shift beta.
    """

    family: Family
    shift: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        shift = float(self.shift)
        if not math.isfinite(shift):
            raise ValueError(f"shift must be finite, got {self.shift}")
        object.__setattr__(self, "shift", shift)

    @property
    def code(self) -> int:
        return _CODES[self.family]

    @property
    def B(self) -> float:
        """phi_beta(1) + phi_beta(-1)."""
        return float(eval(self, 1.0) + eval(self, -1.0))


@dataclass(frozen=True)
class RobustTarget:
    """The gamma-robust 0-1 loss 1{alpha <= gamma}."""

    gamma: float

    def __post_init__(self):
        gamma = float(self.gamma)
        if not 0.0 < gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        object.__setattr__(self, "gamma", gamma)

    def __call__(self, alpha):
        return np.asarray(alpha) <= self.gamma


@dataclass(frozen=True)
class StructuralReport:
    bounded: bool
    nonincreasing: bool
    quasiconcave_even: bool
    convex: bool
    B: float
    strict_at_endpoints: bool
    loss: LossSpec | None = None


def _as_array(alpha) -> tuple[np.ndarray, bool]:
    arr = np.asarray(alpha, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("alpha must be finite")
    return arr, arr.ndim == 0


def eval(loss: LossSpec, alpha):  # noqa: A001 - name mirrors the operation
    """Evaluate phi_beta(alpha)."""
    arr, scalar = _as_array(alpha)
    out = kernels.loss_values(loss.code, loss.shift, np.atleast_1d(arr)).reshape(arr.shape)
    return float(out) if scalar else out


def even_part(loss: LossSpec, alpha):
    """phi_beta(alpha) + phi_beta(-alpha), summed in a fixed order.

    The sum is formed from the pair sorted by margin, so the result is
    bitwise symmetric in alpha.
    """
    arr, scalar = _as_array(alpha)
    mag = np.abs(np.atleast_1d(arr))
    out = eval(loss, -mag) + eval(loss, mag)
    out = out.reshape(arr.shape)
    return float(out) if scalar else out


def one_sided_derivatives(loss: LossSpec, alpha):
    """Left and right derivatives of phi_beta at alpha."""
    arr, scalar = _as_array(alpha)
    left, right = kernels.loss_derivs(loss.code, loss.shift, np.atleast_1d(arr))
    left, right = left.reshape(arr.shape), right.reshape(arr.shape)
    if scalar:
        return float(left), float(right)
    return left, right


def contiguous_superlevels(values: np.ndarray, tol: float = 1e-9) -> bool:
    """Check that every superlevel set of a sampled sequence is an index interval.

    A sequence has this property iff no entry dips below both the largest
    value to its left and the largest value to its right.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.size < 3:
        return True
    prefix = np.maximum.accumulate(v)
    suffix = np.maximum.accumulate(v[::-1])[::-1]
    inner = v[1:-1]
    floor = np.minimum(prefix[:-2], suffix[2:])
    return bool(np.all(inner >= floor - tol))


def _midpoint_violations(loss: LossSpec, radius: float, count: int, seed: int = 0) -> int:
    rng = np.random.default_rng(seed)
    a = rng.uniform(-radius, radius, count)
    b = rng.uniform(-radius, radius, count)
    mid = eval(loss, 0.5 * (a + b))
    chord = 0.5 * (eval(loss, a) + eval(loss, b))
    scale = 1.0 + np.abs(chord)
    return int(np.sum(mid > chord + 1e-12 * scale))


@functools.lru_cache(maxsize=256)
def structural_report(loss: LossSpec, grid_radius: float | None = None,
                      grid_points: int = 4001) -> StructuralReport:
    """Report the structural properties that decide calibration.

    Args:
        loss: The loss to inspect.
        grid_radius: Half-width of the sampling grid; defaults to 4 + |beta|.
        grid_points: Odd number of grid nodes, at least 1001.

    Returns:
        A report whose convexity, boundedness and monotonicity flags come
        from family knowledge, each confirmed on the grid, and whose
        quasiconcave-even flag comes from the superlevel-set test.
    """
    beta = loss.shift
    radius = 4.0 + abs(beta) if grid_radius is None else float(grid_radius)
    if radius < 2.0 + abs(beta):
        raise ValueError(f"grid_radius must be at least 2 + |beta| = {2.0 + abs(beta)}")
    if grid_points < 1001 or grid_points % 2 == 0:
        raise ValueError("grid_points must be odd and at least 1001")

    grid = np.linspace(-radius, radius, grid_points)
    values = eval(loss, grid)
    fam = loss.family

    bounded = fam in BOUNDED_FAMILIES
    if bounded and values.max() > 1.0:
        raise RuntimeError(f"{fam.value} exceeds 1 on the grid")

    nonincreasing = fam in NONINCREASING_FAMILIES
    rises = bool(np.any(np.diff(values) > 1e-12))
    if nonincreasing == rises:
        raise RuntimeError(f"monotonicity metadata disagrees with samples for {fam.value}")

    convex = fam in CONVEX_FAMILIES
    if convex and _midpoint_violations(loss, radius, 1000):
        raise RuntimeError(f"{fam.value} fails the midpoint convexity check")
    if not convex and not np.any(values[:-2] + values[2:] - 2.0 * values[1:-1] < -1e-12):
        raise RuntimeError(f"{fam.value} looks convex on the grid")

    qc_even = contiguous_superlevels(even_part(loss, grid))
    lo, hi = eval(loss, -1.0), eval(loss, 1.0)
    return StructuralReport(
        bounded=bounded,
        nonincreasing=nonincreasing,
        quasiconcave_even=qc_even,
        convex=convex,
        B=lo + hi,
        strict_at_endpoints=lo > hi,
        loss=loss,
    )
