"""Numba-compiled twins of the kernels in ``_kernels_np``."""

import math

import numpy as np
from numba import njit

RAMP, SIGMOID, MODSQ, HINGE, LOGISTIC, SQUARED = range(6)

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@njit(cache=True)
def _sigmoid(z):
    if z > 0.0:
        e = math.exp(-z)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(z))


@njit(cache=True)
def _phi(code, beta, a):
    z = a - beta
    if code == RAMP:
        return min(1.0, max(0.0, (1.0 - z) / 2.0))
    if code == SIGMOID:
        return _sigmoid(z)
    if code == MODSQ:
        if z <= 0.0:
            return 1.0
        if z <= 1.0:
            return (1.0 - z) ** 2
        return 0.0
    if code == HINGE:
        return max(0.0, 1.0 - z)
    if code == LOGISTIC:
        if z < 0.0:
            return -z + math.log1p(math.exp(z))
        return math.log1p(math.exp(-z))
    return (1.0 - z) ** 2


@njit(cache=True)
def _dphi(code, beta, a):
    z = a - beta
    if code == RAMP:
        left = -0.5 if (z > -1.0 and z <= 1.0) else 0.0
        right = -0.5 if (z >= -1.0 and z < 1.0) else 0.0
        return left, right
    if code == SIGMOID:
        s = _sigmoid(z)
        return -s * (1.0 - s), -s * (1.0 - s)
    if code == MODSQ:
        inner = -2.0 * (1.0 - z)
        left = inner if (z > 0.0 and z <= 1.0) else 0.0
        right = inner if (z >= 0.0 and z < 1.0) else 0.0
        return left, right
    if code == HINGE:
        left = -1.0 if z <= 1.0 else 0.0
        right = -1.0 if z < 1.0 else 0.0
        return left, right
    if code == LOGISTIC:
        s = _sigmoid(z)
        return -s, -s
    return -2.0 * (1.0 - z), -2.0 * (1.0 - z)


@njit(cache=True)
def loss_values(code, beta, alpha):
    flat = alpha.ravel()
    out = np.empty(flat.size)
    for i in range(flat.size):
        out[i] = _phi(code, beta, flat[i])
    return out.reshape(alpha.shape)


@njit(cache=True)
def loss_derivs(code, beta, alpha):
    flat = alpha.ravel()
    left = np.empty(flat.size)
    right = np.empty(flat.size)
    for i in range(flat.size):
        left[i], right[i] = _dphi(code, beta, flat[i])
    return left.reshape(alpha.shape), right.reshape(alpha.shape)


@njit(cache=True)
def ccr_grid_min(code, beta, etas, lo, hi, n):
    alphas = np.linspace(lo, hi, n)
    pos = np.empty(n)
    neg = np.empty(n)
    for j in range(n):
        pos[j] = _phi(code, beta, alphas[j])
        neg[j] = _phi(code, beta, -alphas[j])
    vals = np.empty(etas.size)
    idx = np.empty(etas.size, dtype=np.int64)
    for i in range(etas.size):
        e = etas[i]
        best = np.inf
        arg = 0
        for j in range(n):
            c = e * pos[j] + (1.0 - e) * neg[j]
            if c < best:
                best = c
                arg = j
        vals[i] = best
        idx[i] = arg
    return vals, idx


@njit(cache=True)
def _ccr(code, beta, eta, a):
    return eta * _phi(code, beta, a) + (1.0 - eta) * _phi(code, beta, -a)


@njit(cache=True)
def golden_ccr(code, beta, eta, a, b, tol):
    best_x = a
    best_f = _ccr(code, beta, eta, a)
    fb = _ccr(code, beta, eta, b)
    if fb < best_f:
        best_x = b
        best_f = fb
    lo = a
    hi = b
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc = _ccr(code, beta, eta, c)
    fd = _ccr(code, beta, eta, d)
    while hi - lo > tol:
        if fc <= fd:
            hi = d
            d = c
            fd = fc
            c = hi - _INVPHI * (hi - lo)
            fc = _ccr(code, beta, eta, c)
        else:
            lo = c
            c = d
            fc = fd
            d = lo + _INVPHI * (hi - lo)
            fd = _ccr(code, beta, eta, d)
    if fc < best_f:
        best_x = c
        best_f = fc
    if fd < best_f:
        best_x = d
        best_f = fd
    return best_f, best_x


@njit(cache=True)
def surrogate_grad(code, beta, features, labels, params):
    n, d = features.shape
    grad = np.zeros(d + 1)
    total = 0.0
    for i in range(n):
        f = params[d]
        for k in range(d):
            f += features[i, k] * params[k]
        m = labels[i] * f
        total += _phi(code, beta, m)
        left, right = _dphi(code, beta, m)
        coef = 0.5 * (left + right) * labels[i] / n
        for k in range(d):
            grad[k] += coef * features[i, k]
        grad[d] += coef
    return total / n, grad


@njit(cache=True)
def interval_inf(code, beta, eta, lo, hi, endpoint, n, tol):
    if endpoint or lo == hi:
        return min(_ccr(code, beta, eta, lo), _ccr(code, beta, eta, hi))
    step = (hi - lo) / (n - 1)
    best = np.inf
    k = 0
    for j in range(n):
        a = lo + j * step
        if j == n - 1:
            a = hi
        c = _ccr(code, beta, eta, a)
        if c < best:
            best = c
            k = j
    a = max(lo, lo + (k - 1) * step)
    b = min(hi, lo + (k + 1) * step)
    ref = golden_ccr(code, beta, eta, a, b, tol)[0]
    return min(best, ref)


@njit(cache=True)
def gap(code, beta, eta, lo, hi, endpoint, n, tol):
    return (interval_inf(code, beta, eta, lo, hi, endpoint, n, tol)
            - interval_inf(code, beta, eta, -1.0, 1.0, endpoint, n, tol))


@njit(cache=True)
def golden_gap(code, beta, lo, hi, endpoint, n, tol, a, b, eta_tol):
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = gap(code, beta, c, lo, hi, endpoint, n, tol)
    fd = gap(code, beta, d, lo, hi, endpoint, n, tol)
    while b - a > eta_tol:
        if fc <= fd:
            b = d
            d = c
            fd = fc
            c = b - _INVPHI * (b - a)
            fc = gap(code, beta, c, lo, hi, endpoint, n, tol)
        else:
            a = c
            c = d
            fc = fd
            d = a + _INVPHI * (b - a)
            fd = gap(code, beta, d, lo, hi, endpoint, n, tol)
    return min(fc, fd)


@njit(cache=True)
def interval_table(code, beta, etas, lo, hi, endpoint, n, tol):
    out = np.empty(etas.size)
    if endpoint or lo == hi:
        for i in range(etas.size):
            out[i] = min(_ccr(code, beta, etas[i], lo), _ccr(code, beta, etas[i], hi))
        return out
    vals, idx = ccr_grid_min(code, beta, etas, lo, hi, n)
    step = (hi - lo) / (n - 1)
    for i in range(etas.size):
        a = max(lo, lo + (idx[i] - 1) * step)
        b = min(hi, lo + (idx[i] + 1) * step)
        out[i] = min(vals[i], golden_ccr(code, beta, etas[i], a, b, tol)[0])
    return out
