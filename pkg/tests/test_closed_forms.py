import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robustcalib.calibration import calibration_fn_numeric, verdict
from robustcalib.closed_forms import UnsupportedRegimeError, biconjugate_closed, delta_closed
from robustcalib.losses import LossSpec

from oracles import brute_delta, phi

EPS = np.linspace(0.02, 0.98, 49)
BOUNDED = ["ramp", "sigmoid", "modified_squared"]

# Supported (family, beta, gamma) points on both sides of every regime boundary.
SWEEP = (
    [("ramp", b, g) for g in (0.1, 0.3) for b in (0.0, 0.3, 1 - g - 0.05, 1 - g + 0.05,
                                                  1 + g - 0.05, 1 + g + 0.05, 1.95, 2.05, 3.0)]
    + [("sigmoid", b, g) for g in (0.1, 0.4) for b in (0.0, 0.2, 1.0, 2.5)]
    + [("modified_squared", b, g) for g in (0.1, 0.3) for b in (0.0, g - 0.05, g + 0.05,
                                                                0.95, 1.05, 2.0)]
    + [("modified_squared", b, g) for b, g in ((-0.2, 0.2), (-0.25, 0.24), (-0.1, 0.05),
                                               (-0.28, 0.15))]
    + [("hinge", b, g) for g in (0.1, 0.5) for b in (0.0, 0.5, 1.5)]
    + [("squared", b, g) for g in (0.1, 0.5) for b in (-0.5, 0.0, 0.2, 1.0)]
)


def endpoint_formula(family, beta, gamma, eps):
    """Three-candidate form valid for the bounded quasiconcave-even families."""
    p = lambda a: float(phi(family, beta, a))
    d = p(-1) - p(1)
    a1 = (p(gamma) + p(-gamma) - p(1) - p(-1)) / 2
    a0 = p(gamma) - p(-gamma) - p(1) + p(-1)
    best = np.inf
    for eta in (max(eps, 0.5), (1 + eps) / 2, 1.0):
        band = a1 + a0 * (eta - 0.5)
        if eta <= (1 + eps) / 2:
            best = min(best, band)
        if eta >= (1 + eps) / 2:
            best = min(best, (2 * eta - 1) * d)
    return max(0.0, best)


class TestExamples:
    def test_ramp_plateau(self):
        val, tag = delta_closed("ramp", 0.5, 0.1, 0.45)
        assert val == pytest.approx(0.125, abs=1e-15)
        assert tag.regime == "A"

    def test_squared_zero_below_eta0(self):
        val, tag = delta_closed("squared", 0.0, 0.2, 0.5)
        assert val == 0.0
        assert tag.constants["eta0"] == pytest.approx(0.6)

    def test_modified_squared_negative(self):
        val, tag = delta_closed("modified_squared", -0.2, 0.2, 0.3)
        assert val == pytest.approx(0.14, abs=1e-14)
        assert tag.regime == "negative"

    def test_biconjugates(self):
        assert biconjugate_closed("ramp", 1.0, 0.2, 0.4) == pytest.approx(0.16, abs=1e-15)
        a1 = (float(phi("sigmoid", 1.0, 0.2)) + float(phi("sigmoid", 1.0, -0.2))
              - float(phi("sigmoid", 1.0, 1.0)) - float(phi("sigmoid", 1.0, -1.0))) / 2
        assert biconjugate_closed("sigmoid", 1.0, 0.2, 0.25) == pytest.approx(0.5 * a1, abs=1e-15)
        assert biconjugate_closed("ramp", 2.5, 0.3, 0.7) == 0.0
        assert delta_closed("ramp", 2.5, 0.3, 0.7)[0] == 0.0

    def test_unsupported(self):
        for args in [("ramp", -0.1, 0.2, 0.3), ("logistic", 0.0, 0.2, 0.3),
                     ("hinge", -0.5, 0.2, 0.3), ("modified_squared", -0.1, 0.2, 0.3),
                     ("modified_squared", -0.5, 0.1, 0.3), ("squared", -1.0, 0.2, 0.3)]:
            with pytest.raises(UnsupportedRegimeError):
                delta_closed(*args)
        with pytest.raises(UnsupportedRegimeError):
            biconjugate_closed("modified_squared", -0.2, 0.2, 0.3)

    def test_domain(self):
        with pytest.raises(ValueError):
            delta_closed("ramp", 0.5, 0.0, 0.3)
        with pytest.raises(ValueError):
            delta_closed("ramp", 0.5, 0.1, 0.0)
        with pytest.raises(ValueError):
            delta_closed("ramp", 0.5, 0.1, 1.1)


class TestAgainstNumeric:
    @pytest.mark.parametrize("family,beta,gamma", SWEEP)
    def test_sweep(self, family, beta, gamma):
        curve = calibration_fn_numeric(LossSpec(family, beta), gamma, EPS)
        closed = np.array([delta_closed(family, beta, gamma, e)[0] for e in EPS])
        np.testing.assert_allclose(curve.deltas, closed, atol=1e-6)

    @pytest.mark.parametrize("family,beta,gamma", [("ramp", 0.5, 0.1), ("sigmoid", 1.0, 0.2),
                                                   ("modified_squared", -0.2, 0.2)])
    def test_brute_force(self, family, beta, gamma):
        eps = EPS[::4]
        closed = np.array([delta_closed(family, beta, gamma, e)[0] for e in eps])
        np.testing.assert_allclose(closed, brute_delta(family, beta, gamma, eps), atol=5e-3)

    @settings(max_examples=150, deadline=None)
    @given(family=st.sampled_from(BOUNDED), beta=st.floats(0.0, 3.0),
           gamma=st.floats(0.01, 0.99), eps=st.floats(0.001, 1.0))
    def test_endpoint_formula(self, family, beta, gamma, eps):
        val = delta_closed(family, beta, gamma, eps)[0]
        assert val == pytest.approx(endpoint_formula(family, beta, gamma, eps), abs=1e-12)


class TestStructure:
    @pytest.mark.parametrize("family,boundaries", [
        ("ramp", lambda g: (1 - g, 1 + g, 2.0)),
        ("modified_squared", lambda g: (g, 1.0)),
    ])
    @pytest.mark.parametrize("gamma", [0.1, 0.3])
    def test_continuity_across_regimes(self, family, boundaries, gamma):
        for b in boundaries(gamma):
            for eps in EPS:
                left = delta_closed(family, b - 1e-6, gamma, eps)[0]
                right = delta_closed(family, b + 1e-6, gamma, eps)[0]
                at = delta_closed(family, b, gamma, eps)[0]
                assert abs(left - right) <= 1e-5
                assert abs(at - right) <= 1e-5

    @pytest.mark.parametrize("family,beta,gamma", [s for s in SWEEP
                                                   if not (s[0] == "modified_squared" and s[1] < 0)])
    def test_biconjugate_below_delta(self, family, beta, gamma):
        for e in EPS:
            assert biconjugate_closed(family, beta, gamma, e) <= delta_closed(family, beta, gamma, e)[0] + 1e-12

    @pytest.mark.parametrize("family", BOUNDED)
    @pytest.mark.parametrize("beta", [0.0, 0.5, 1.0, 1.5, 2.5])
    @pytest.mark.parametrize("gamma", [0.1, 0.3])
    def test_positivity_matches_verdict(self, family, beta, gamma):
        closed = np.array([delta_closed(family, beta, gamma, e)[0] for e in EPS])
        assert bool(np.all(closed > 1e-6)) == verdict(LossSpec(family, beta), gamma).calibrated

    @pytest.mark.parametrize("family", ["hinge", "squared"])
    def test_convex_families_not_positive(self, family):
        closed = [delta_closed(family, 0.2, 0.2, e)[0] for e in EPS]
        assert min(closed) == 0.0
