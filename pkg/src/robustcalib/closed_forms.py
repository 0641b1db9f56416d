"""Analytic calibration functions and their convex envelopes.

Each family splits the (beta, gamma) plane into regimes with their own
piecewise formula. Combinations outside the supported regimes raise
``UnsupportedRegimeError`` instead of guessing; the numeric engine covers
them.

For bounded, nonincreasing, quasiconcave-even losses the formulas are
written with the constants

    D  = phi(-1) - phi(1)
    A1 = (phi(gamma) + phi(-gamma) - phi(1) - phi(-1)) / 2
    A0 = phi(gamma) - phi(-gamma) - phi(1) + phi(-1)
    eta0 = 1/2 - A1 / A0

so that the band gap at posterior eta >= 1/2 is A1 + A0 (eta - 1/2).
"""

import math
from dataclasses import dataclass, field

from robustcalib.losses import Family, LossSpec, eval as loss_eval

SQRT_HALF = math.sqrt(0.5)


class UnsupportedRegimeError(ValueError):
    """No closed form is available for this (family, beta, gamma)."""


@dataclass(frozen=True)
class RegimeTag:
    family: Family
    regime: str
    constants: dict = field(default_factory=dict, compare=False)


def _check(beta: float, gamma: float, epsilon: float) -> None:
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    if not math.isfinite(beta):
        raise ValueError("beta must be finite")


def _endpoint_constants(family: Family, beta: float, gamma: float) -> dict:
    loss = LossSpec(family, beta)
    pg, pmg = loss_eval(loss, gamma), loss_eval(loss, -gamma)
    p1, pm1 = loss_eval(loss, 1.0), loss_eval(loss, -1.0)
    a0 = pg - pmg - p1 + pm1
    a1 = (pg + pmg - p1 - pm1) / 2.0
    consts = {"D": pm1 - p1, "A0": a0, "A1": a1, "B": p1 + pm1}
    if a0 > 0.0:
        consts["eta0"] = 0.5 - a1 / a0
    return consts


# Ramp: 0 <= beta, four regimes.

def _ramp_regime(beta: float, gamma: float) -> str:
    if beta < 0.0:
        raise UnsupportedRegimeError(
            f"ramp closed form requires beta >= 0 (regimes A: 0<=beta<1-gamma, "
            f"B: 1-gamma<=beta<1+gamma, C: 1+gamma<=beta<2, D: beta>=2); got beta={beta}")
    if beta < 1.0 - gamma:
        return "A"
    if beta < 1.0 + gamma:
        return "B"
    if beta < 2.0:
        return "C"
    return "D"


def _ramp(beta: float, gamma: float, eps: float) -> tuple[float, RegimeTag]:
    regime = _ramp_regime(beta, gamma)
    slope = 1.0 - beta / 2.0
    if regime == "A":
        knee = beta / (2.0 * (2.0 - beta))
        consts = {"eps0": knee, "plateau": beta / 4.0}
        if eps <= knee:
            val = slope * eps
        elif eps <= 0.5:
            val = beta / 4.0
        else:
            val = (1.0 - gamma - beta / 2.0) * (eps - 0.5) + beta / 4.0
    elif regime == "B":
        knee = (1.0 - gamma) / (2.0 * (2.0 - beta))
        consts = {"eps0": knee, "plateau": (1.0 - gamma) / 4.0}
        if eps <= knee:
            val = slope * eps
        elif eps <= 0.5:
            val = (1.0 - gamma) / 4.0
        else:
            val = (1.0 - gamma) * eps / 2.0
    elif regime == "C":
        consts = {}
        val = slope * eps
    else:
        consts = {}
        val = 0.0
    return val, RegimeTag(Family.RAMP, regime, consts)


def _ramp_biconj(beta: float, gamma: float, eps: float) -> float:
    regime = _ramp_regime(beta, gamma)
    if regime == "A":
        if eps <= 0.5:
            return beta * eps / 2.0
        return _ramp(beta, gamma, eps)[0]
    if regime == "B":
        return (1.0 - gamma) * eps / 2.0
    if regime == "C":
        return (1.0 - beta / 2.0) * eps
    return 0.0


# Sigmoid: beta >= 0.

def _sigmoid(beta: float, gamma: float, eps: float) -> tuple[float, RegimeTag]:
    if beta < 0.0:
        raise UnsupportedRegimeError(
            f"sigmoid closed form requires beta >= 0 (regimes beta=0, beta>0); got beta={beta}")
    consts = _endpoint_constants(Family.SIGMOID, beta, gamma)
    regime = "beta_zero" if beta == 0.0 else "beta_positive"
    if eps <= 0.5:
        val = min(consts["D"] * eps, consts["A1"])
    else:
        val = consts["A1"] + consts["A0"] * (eps - 0.5)
    return val, RegimeTag(Family.SIGMOID, regime, consts)


def _sigmoid_biconj(beta: float, gamma: float, eps: float) -> float:
    val, tag = _sigmoid(beta, gamma, eps)
    if eps <= 0.5:
        return 2.0 * tag.constants["A1"] * eps
    return val


# Modified squared: beta >= 0 in three regimes, plus a negative window.

def _modsq_regime(beta: float, gamma: float) -> str:
    if beta >= 1.0:
        return "C"
    if beta >= gamma:
        return "B"
    if beta >= 0.0:
        return "A"
    if beta > SQRT_HALF - 1.0 and gamma < 0.25 and gamma <= -beta:
        return "negative"
    raise UnsupportedRegimeError(
        "modified_squared closed form requires beta >= 0 (A: 0<=beta<gamma, B: gamma<=beta<1, "
        "C: beta>=1) or the negative window -1+1/sqrt(2) < beta < 0 with gamma < 1/4 and "
        f"gamma <= -beta; got beta={beta}, gamma={gamma}")


def _modsq(beta: float, gamma: float, eps: float) -> tuple[float, RegimeTag]:
    regime = _modsq_regime(beta, gamma)
    if regime == "A":
        top = (1.0 - gamma) * (1.0 - gamma + 2.0 * beta)
        eps0 = top / (2.0 * (1.0 - beta * beta))
        consts = {"eps0": eps0, "plateau": top / 2.0}
        if eps <= eps0:
            val = (1.0 - beta * beta) * eps
        elif eps <= 0.5:
            val = top / 2.0
        else:
            val = top * eps
    elif regime == "B":
        consts = {}
        val = (1.0 - beta * beta) * eps
    elif regime == "C":
        consts = {}
        val = 0.0
    else:
        b1 = 1.0 + beta
        eps0 = beta * beta + 2.0 * beta + 0.5
        eta_c = 0.5 + gamma / (2.0 * b1)

        def band_gap(eta: float) -> float:
            # Unconstrained band minimiser inside the band up to eta_c, else alpha = gamma.
            if eta <= eta_c:
                return (1.0 - eta) * (4.0 * b1 * b1 * eta - 1.0)
            return (1.0 - 4.0 * gamma * b1) * eta + (1.0 + gamma + beta) ** 2 - 1.0

        consts = {"eps0": eps0, "eta_c": eta_c}
        if eps <= eps0:
            val = eps
        elif eps <= 0.5:
            val = eps0
        else:
            val = min(band_gap(eps), band_gap(max(eps, eta_c)))
    return val, RegimeTag(Family.MODIFIED_SQUARED, regime, consts)


def _modsq_biconj(beta: float, gamma: float, eps: float) -> float:
    regime = _modsq_regime(beta, gamma)
    if regime == "A":
        return (1.0 - gamma) * (1.0 - gamma + 2.0 * beta) * eps
    if regime == "B":
        return (1.0 - beta * beta) * eps
    if regime == "C":
        return 0.0
    raise UnsupportedRegimeError(
        "modified_squared with negative beta has no closed-form biconjugate")


# Convex families. Their calibration functions are convex, hence self-conjugate.

def _hinge(beta: float, gamma: float, eps: float) -> tuple[float, RegimeTag]:
    if beta < 0.0:
        raise UnsupportedRegimeError(f"hinge closed form requires beta >= 0; got beta={beta}")
    val = 0.0 if eps <= 0.5 else (1.0 - gamma) * (2.0 * eps - 1.0)
    return val, RegimeTag(Family.HINGE, "all", {})


def _squared(beta: float, gamma: float, eps: float) -> tuple[float, RegimeTag]:
    if beta <= -1.0:
        raise UnsupportedRegimeError(f"squared closed form requires beta > -1; got beta={beta}")
    b1 = 1.0 + beta
    eta0 = (1.0 + gamma + beta) / (2.0 * b1)
    eta1 = (3.0 + gamma + 2.0 * beta) / (4.0 * b1)
    eta2 = (2.0 + beta) / (2.0 * b1)
    consts = {"eta0": eta0, "eta1": eta1, "eta2": eta2}
    if eps < eta0:
        val = 0.0
    elif eps < eta2:
        val = 4.0 * b1 * b1 * (eps - eta0) ** 2
    else:
        val = 4.0 * (1.0 - gamma) * b1 * (eps - eta1)
    return val, RegimeTag(Family.SQUARED, "all", consts)


_DELTA = {
    Family.RAMP: _ramp,
    Family.SIGMOID: _sigmoid,
    Family.MODIFIED_SQUARED: _modsq,
    Family.HINGE: _hinge,
    Family.SQUARED: _squared,
}
_BICONJ = {
    Family.RAMP: _ramp_biconj,
    Family.SIGMOID: _sigmoid_biconj,
    Family.MODIFIED_SQUARED: _modsq_biconj,
    Family.HINGE: lambda b, g, e: _hinge(b, g, e)[0],
    Family.SQUARED: lambda b, g, e: _squared(b, g, e)[0],
}


def delta_closed(family, beta: float, gamma: float, epsilon: float) -> tuple[float, RegimeTag]:
    """Closed-form calibration function value and the regime that produced it."""
    fam = Family(family)
    _check(beta, gamma, epsilon)
    if fam not in _DELTA:
        raise UnsupportedRegimeError(f"no closed form for the {fam.value} family")
    val, tag = _DELTA[fam](float(beta), float(gamma), float(epsilon))
    return max(0.0, val), tag


def biconjugate_closed(family, beta: float, gamma: float, epsilon: float) -> float:
    """Closed-form convex envelope of the calibration function."""
    fam = Family(family)
    _check(beta, gamma, epsilon)
    if fam not in _BICONJ:
        raise UnsupportedRegimeError(f"no closed form for the {fam.value} family")
    return max(0.0, _BICONJ[fam](float(beta), float(gamma), float(epsilon)))
