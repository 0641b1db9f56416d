"""Backend selection for the hot numerical kernels.

The numba backend is used when numba imports cleanly, unless the
environment variable ``ROBUSTCALIB_DISABLE_NUMBA`` is set to a truthy
value, in which case the pure-numpy reference backend is used. Both
backends share one calling convention, so callers never branch on it.
"""

import os
from types import ModuleType

import numpy as np

from robustcalib import _kernels_np

RAMP, SIGMOID, MODSQ, HINGE, LOGISTIC, SQUARED = range(6)

_FLAG = "ROBUSTCALIB_DISABLE_NUMBA"


def _load_numba() -> ModuleType | None:
    try:
        from robustcalib import _kernels_nb
    except ImportError:
        return None
    return _kernels_nb


def numba_requested() -> bool:
    """True unless the environment flag disables numba."""
    return os.environ.get(_FLAG, "").strip().lower() in ("", "0", "false", "no")


NUMBA_MODULE = _load_numba() if numba_requested() else None
BACKEND = "numba" if NUMBA_MODULE is not None else "numpy"
_impl = NUMBA_MODULE if NUMBA_MODULE is not None else _kernels_np


def loss_values(code: int, beta: float, alpha: np.ndarray) -> np.ndarray:
    return _impl.loss_values(code, float(beta), np.ascontiguousarray(alpha, dtype=np.float64))


def loss_derivs(code: int, beta: float, alpha: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return _impl.loss_derivs(code, float(beta), np.ascontiguousarray(alpha, dtype=np.float64))


def ccr_grid_min(code: int, beta: float, etas: np.ndarray, lo: float, hi: float,
                 n: int) -> tuple[np.ndarray, np.ndarray]:
    return _impl.ccr_grid_min(code, float(beta), np.ascontiguousarray(etas, dtype=np.float64),
                              float(lo), float(hi), int(n))


def golden_ccr(code: int, beta: float, eta: float, a: float, b: float,
               tol: float) -> tuple[float, float]:
    val, arg = _impl.golden_ccr(code, float(beta), float(eta), float(a), float(b), float(tol))
    return float(val), float(arg)


def surrogate_grad(code: int, beta: float, features: np.ndarray, labels: np.ndarray,
                   params: np.ndarray) -> tuple[float, np.ndarray]:
    loss, grad = _impl.surrogate_grad(
        code, float(beta),
        np.ascontiguousarray(features, dtype=np.float64),
        np.ascontiguousarray(labels, dtype=np.float64),
        np.ascontiguousarray(params, dtype=np.float64))
    return float(loss), grad


def interval_inf(code: int, beta: float, eta: float, lo: float, hi: float, endpoint: bool,
                 n: int, tol: float) -> float:
    return float(_impl.interval_inf(code, float(beta), float(eta), float(lo), float(hi),
                                    bool(endpoint), int(n), float(tol)))


def gap(code: int, beta: float, eta: float, lo: float, hi: float, endpoint: bool,
        n: int, tol: float) -> float:
    return float(_impl.gap(code, float(beta), float(eta), float(lo), float(hi),
                           bool(endpoint), int(n), float(tol)))


def golden_gap(code: int, beta: float, lo: float, hi: float, endpoint: bool, n: int,
               tol: float, a: float, b: float, eta_tol: float) -> float:
    return float(_impl.golden_gap(code, float(beta), float(lo), float(hi), bool(endpoint),
                                  int(n), float(tol), float(a), float(b), float(eta_tol)))


def interval_table(code: int, beta: float, etas: np.ndarray, lo: float, hi: float,
                   endpoint: bool, n: int, tol: float) -> np.ndarray:
    return _impl.interval_table(code, float(beta), np.ascontiguousarray(etas, dtype=np.float64),
                                float(lo), float(hi), bool(endpoint), int(n), float(tol))
