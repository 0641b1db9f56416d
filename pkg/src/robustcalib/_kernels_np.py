"""Pure-numpy reference implementations of the hot kernels.

Every function here has a numba twin in ``_kernels_nb`` with the same
signature and semantics. Family codes are the integers defined in
``kernels``.
"""

import math

import numpy as np

RAMP, SIGMOID, MODSQ, HINGE, LOGISTIC, SQUARED = range(6)

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
# Rows of the eta x alpha matrix materialised at once in ccr_grid_min.
_CHUNK_CELLS = 1 << 22


def loss_values(code: int, beta: float, alpha: np.ndarray) -> np.ndarray:
    """Evaluate the shifted loss phi(alpha - beta) elementwise."""
    z = np.asarray(alpha, dtype=np.float64) - beta
    if code == RAMP:
        return np.clip((1.0 - z) / 2.0, 0.0, 1.0)
    if code == SIGMOID:
        # Both branches are overflow free.
        e = np.exp(-np.abs(z))
        return np.where(z > 0, e / (1.0 + e), 1.0 / (1.0 + e))
    if code == MODSQ:
        return np.where(z <= 0, 1.0, np.where(z <= 1.0, (1.0 - z) ** 2, 0.0))
    if code == HINGE:
        return np.maximum(0.0, 1.0 - z)
    if code == LOGISTIC:
        return np.logaddexp(0.0, -z)
    if code == SQUARED:
        return (1.0 - z) ** 2
    raise ValueError(f"unknown loss code {code}")


def loss_derivs(code: int, beta: float, alpha: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Left and right derivatives of the shifted loss."""
    z = np.asarray(alpha, dtype=np.float64) - beta
    if code == RAMP:
        left = np.where((z > -1.0) & (z <= 1.0), -0.5, 0.0)
        right = np.where((z >= -1.0) & (z < 1.0), -0.5, 0.0)
        return left, right
    if code == SIGMOID:
        s = loss_values(SIGMOID, 0.0, z)
        d = -s * (1.0 - s)
        return d, d.copy()
    if code == MODSQ:
        inner = -2.0 * (1.0 - z)
        left = np.where((z > 0.0) & (z <= 1.0), inner, 0.0)
        right = np.where((z >= 0.0) & (z < 1.0), inner, 0.0)
        return left, right
    if code == HINGE:
        left = np.where(z <= 1.0, -1.0, 0.0)
        right = np.where(z < 1.0, -1.0, 0.0)
        return left, right
    if code == LOGISTIC:
        d = -loss_values(SIGMOID, 0.0, z)
        return d, d.copy()
    if code == SQUARED:
        d = -2.0 * (1.0 - z)
        return d, d.copy()
    raise ValueError(f"unknown loss code {code}")


def ccr_grid_min(code: int, beta: float, etas: np.ndarray, lo: float, hi: float,
                 n: int) -> tuple[np.ndarray, np.ndarray]:
    """Minimise the class-conditional risk over an alpha grid for each eta.

    Returns the minimum values and the grid index of each minimiser
    (first index on ties).
    """
    etas = np.asarray(etas, dtype=np.float64)
    alphas = np.linspace(lo, hi, n)
    pos = loss_values(code, beta, alphas)
    neg = loss_values(code, beta, -alphas)
    vals = np.empty(etas.size)
    idx = np.empty(etas.size, dtype=np.int64)
    rows = max(1, _CHUNK_CELLS // max(n, 1))
    for start in range(0, etas.size, rows):
        e = etas[start:start + rows, None]
        c = e * pos[None, :] + (1.0 - e) * neg[None, :]
        k = np.argmin(c, axis=1)
        idx[start:start + rows] = k
        vals[start:start + rows] = c[np.arange(k.size), k]
    return vals, idx


def _ccr_scalar(code: int, beta: float, eta: float, a: float) -> float:
    pair = loss_values(code, beta, np.array([a, -a]))
    return eta * pair[0] + (1.0 - eta) * pair[1]


def golden_ccr(code: int, beta: float, eta: float, a: float, b: float,
               tol: float) -> tuple[float, float]:
    """Golden-section search for the CCR minimum on [a, b].

    The bracket endpoints are also evaluated, so the result is never worse
    than the better endpoint.
    """
    best_x, best_f = a, _ccr_scalar(code, beta, eta, a)
    fb = _ccr_scalar(code, beta, eta, b)
    if fb < best_f:
        best_x, best_f = b, fb
    lo, hi = a, b
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc = _ccr_scalar(code, beta, eta, c)
    fd = _ccr_scalar(code, beta, eta, d)
    while hi - lo > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = _ccr_scalar(code, beta, eta, c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = _ccr_scalar(code, beta, eta, d)
    for x, f in ((c, fc), (d, fd)):
        if f < best_f:
            best_x, best_f = x, f
    return best_f, best_x


def surrogate_grad(code: int, beta: float, features: np.ndarray, labels: np.ndarray,
                   params: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean surrogate loss and its gradient for an affine model.

    ``params`` holds the weights followed by the bias. At kinks the mean of
    the one-sided derivatives is used.
    """
    w = params[:-1]
    margins = labels * (features @ w + params[-1])
    loss = float(np.mean(loss_values(code, beta, margins)))
    left, right = loss_derivs(code, beta, margins)
    coef = 0.5 * (left + right) * labels / labels.size
    grad = np.empty_like(params)
    grad[:-1] = coef @ features
    grad[-1] = coef.sum()
    return loss, grad


def interval_inf(code: int, beta: float, eta: float, lo: float, hi: float,
                 endpoint: bool, n: int, tol: float) -> float:
    """CCR infimum over [lo, hi] at one eta.

    With ``endpoint`` set the minimum of the two endpoint values is
    returned; otherwise a grid search is refined by golden section.
    """
    if endpoint or lo == hi:
        return min(_ccr_scalar(code, beta, eta, lo), _ccr_scalar(code, beta, eta, hi))
    vals, idx = ccr_grid_min(code, beta, np.array([eta]), lo, hi, n)
    k = int(idx[0])
    step = (hi - lo) / (n - 1)
    a = max(lo, lo + (k - 1) * step)
    b = min(hi, lo + (k + 1) * step)
    return min(float(vals[0]), golden_ccr(code, beta, eta, a, b, tol)[0])


def gap(code: int, beta: float, eta: float, lo: float, hi: float, endpoint: bool,
        n: int, tol: float) -> float:
    """CCR infimum over [lo, hi] minus the infimum over [-1, 1]."""
    return (interval_inf(code, beta, eta, lo, hi, endpoint, n, tol)
            - interval_inf(code, beta, eta, -1.0, 1.0, endpoint, n, tol))


def golden_gap(code: int, beta: float, lo: float, hi: float, endpoint: bool, n: int,
               tol: float, a: float, b: float, eta_tol: float) -> float:
    """Golden-section search in eta for the smallest gap on [a, b]."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = gap(code, beta, c, lo, hi, endpoint, n, tol)
    fd = gap(code, beta, d, lo, hi, endpoint, n, tol)
    while b - a > eta_tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = gap(code, beta, c, lo, hi, endpoint, n, tol)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = gap(code, beta, d, lo, hi, endpoint, n, tol)
    return min(fc, fd)


def interval_table(code: int, beta: float, etas: np.ndarray, lo: float, hi: float,
                   endpoint: bool, n: int, tol: float) -> np.ndarray:
    """``interval_inf`` for every eta in an array."""
    etas = np.asarray(etas, dtype=np.float64)
    if endpoint or lo == hi:
        lo_vals = etas * loss_values(code, beta, lo) + (1.0 - etas) * loss_values(code, beta, -lo)
        hi_vals = etas * loss_values(code, beta, hi) + (1.0 - etas) * loss_values(code, beta, -hi)
        return np.minimum(lo_vals, hi_vals)
    vals, idx = ccr_grid_min(code, beta, etas, lo, hi, n)
    step = (hi - lo) / (n - 1)
    out = np.empty_like(vals)
    for i, eta in enumerate(etas):
        a = max(lo, lo + (idx[i] - 1) * step)
        b = min(hi, lo + (idx[i] + 1) * step)
        out[i] = min(vals[i], golden_ccr(code, beta, float(eta), a, b, tol)[0])
    return out
