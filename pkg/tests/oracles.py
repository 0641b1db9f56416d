"""Independent brute-force oracles.

None of these call into the package's numerical engines; they restate
definitions directly with plain numpy so they can catch engine mistakes.
"""

import numpy as np


def phi(family: str, beta: float, alpha):
    """Loss formulas written out directly from their definitions."""
    z = np.asarray(alpha, dtype=float) - beta
    if family == "ramp":
        return np.minimum(1.0, np.maximum(0.0, (1.0 - z) / 2.0))
    if family == "sigmoid":
        return 1.0 / (1.0 + np.exp(z))
    if family == "modified_squared":
        return np.where(z <= 0.0, 1.0, np.where(z <= 1.0, (1.0 - z) ** 2, 0.0))
    if family == "hinge":
        return np.maximum(0.0, 1.0 - z)
    if family == "logistic":
        return np.log1p(np.exp(-z))
    if family == "squared":
        return (1.0 - z) ** 2
    raise ValueError(family)


def brute_delta(family: str, beta: float, gamma: float, eps_list, n_alpha: int = 4001,
                n_eta: int = 1001) -> np.ndarray:
    """Calibration function straight from its definition.

    For every (eta, alpha) cell the surrogate excess CCR and the robust 0-1
    excess CCR are tabulated; delta(eps) is the smallest surrogate excess
    among cells whose target excess reaches eps. Eta covers the full [0, 1].
    """
    alphas = np.union1d(np.linspace(-1.0, 1.0, n_alpha), [gamma, -gamma, 0.0])
    etas = np.linspace(0.0, 1.0, n_eta)[:, None]
    pos, neg = phi(family, beta, alphas), phi(family, beta, -alphas)
    c = etas * pos + (1.0 - etas) * neg
    dc = c - c.min(axis=1, keepdims=True)
    # Robust 0-1 loss 1{alpha <= gamma} for y = +1 and 1{-alpha <= gamma} for y = -1.
    t = etas * (alphas <= gamma) + (1.0 - etas) * (-alphas <= gamma)
    dt = t - t.min(axis=1, keepdims=True)
    out = []
    for e in eps_list:
        mask = dt >= e - 1e-12
        out.append(dc[mask].min() if mask.any() else np.inf)
    return np.array(out)


def grid_min_ccr(family: str, beta: float, eta: float, lo: float, hi: float,
                 n: int = 200001) -> float:
    a = np.linspace(lo, hi, n)
    return float(np.min(eta * phi(family, beta, a) + (1.0 - eta) * phi(family, beta, -a)))


def chord_envelope(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Convex envelope at each sample via all pairs of bracketing points.

    In one dimension the envelope at x is the smallest chord value over
    pairs of samples with x_j <= x <= x_k.
    """
    n = xs.size
    out = ys.astype(float).copy()
    for i in range(n):
        for j in range(i + 1):
            for k in range(i, n):
                if xs[k] == xs[j]:
                    continue
                t = (xs[i] - xs[j]) / (xs[k] - xs[j])
                out[i] = min(out[i], ys[j] + t * (ys[k] - ys[j]))
    return out


def superlevels_contiguous(values: np.ndarray, tol: float = 1e-9) -> bool:
    """Check each distinct threshold's superlevel set for index gaps."""
    for level in np.unique(values):
        idx = np.flatnonzero(values >= level - tol)
        if idx[-1] - idx[0] + 1 != idx.size:
            return False
    return True


def attack_succeeds(w, b, x, y, gamma, rng, samples: int = 1000) -> int:
    """Search for a perturbation of norm <= gamma that makes y f(x') <= 0.

    Candidates are random directions on the gamma-sphere plus the analytic
    worst case -y gamma w/||w||; each perturbed point is projected back onto
    the unit ball, which cannot increase its distance to x.
    """
    w = np.asarray(w, dtype=float)
    d = w.size
    dirs = rng.standard_normal((samples, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    dirs = np.vstack([dirs, -y * w / np.linalg.norm(w)])
    cand = x + gamma * dirs
    norms = np.linalg.norm(cand, axis=1, keepdims=True)
    cand = np.where(norms > 1.0, cand / norms, cand)
    assert np.all(np.linalg.norm(cand - x, axis=1) <= gamma + 1e-12)
    return int(np.any(y * (cand @ w + b) <= 0.0))
