import os
import subprocess
import sys

import numpy as np
import pytest

from robustcalib import _kernels_np, kernels

nb = pytest.importorskip("robustcalib._kernels_nb")

CODES = range(6)


class TestBackendParity:
    @pytest.mark.parametrize("code", CODES)
    def test_losses_and_derivatives(self, code):
        rng = np.random.default_rng(42)
        a = rng.uniform(-4, 4, 1000)
        for beta in (-0.6, 0.0, 0.4):
            np.testing.assert_allclose(nb.loss_values(code, beta, a),
                                       _kernels_np.loss_values(code, beta, a), rtol=1e-13, atol=1e-15)
            for x, y in zip(nb.loss_derivs(code, beta, a), _kernels_np.loss_derivs(code, beta, a)):
                np.testing.assert_allclose(x, y, rtol=1e-13, atol=1e-15)

    @pytest.mark.parametrize("code", CODES)
    def test_grid_min_and_golden(self, code):
        etas = np.linspace(0.0, 1.0, 41)
        v1, i1 = nb.ccr_grid_min(code, 0.3, etas, -1.0, 0.2, 2001)
        v2, i2 = _kernels_np.ccr_grid_min(code, 0.3, etas, -1.0, 0.2, 2001)
        np.testing.assert_allclose(v1, v2, rtol=1e-13, atol=1e-15)
        np.testing.assert_array_equal(i1, i2)
        g1 = nb.golden_ccr(code, 0.3, 0.7, -1.0, 1.0, 1e-10)
        g2 = _kernels_np.golden_ccr(code, 0.3, 0.7, -1.0, 1.0, 1e-10)
        np.testing.assert_allclose(g1, g2, rtol=1e-9, atol=1e-12)

    @pytest.mark.parametrize("code", CODES)
    def test_gap_tables(self, code):
        etas = np.linspace(0.5, 1.0, 51)
        endpoint = code in (0, 1, 2)
        t1 = nb.interval_table(code, 0.2, etas, -0.2, 0.2, endpoint, 2001, 1e-10)
        t2 = _kernels_np.interval_table(code, 0.2, etas, -0.2, 0.2, endpoint, 2001, 1e-10)
        np.testing.assert_allclose(t1, t2, rtol=1e-12, atol=1e-14)
        args = (code, 0.2, -1.0, 0.2, endpoint, 2001, 1e-10, 0.6, 0.9, 1e-8)
        np.testing.assert_allclose(nb.golden_gap(*args), _kernels_np.golden_gap(*args),
                                   rtol=1e-9, atol=1e-12)

    @pytest.mark.parametrize("code", CODES)
    def test_surrogate_gradient(self, code):
        rng = np.random.default_rng(42)
        x = rng.standard_normal((200, 3)) / 3.0
        y = np.where(rng.random(200) < 0.5, -1.0, 1.0)
        p = rng.standard_normal(4)
        l1, g1 = nb.surrogate_grad(code, 0.2, x, y, p)
        l2, g2 = _kernels_np.surrogate_grad(code, 0.2, x, y, p)
        np.testing.assert_allclose(l1, l2, rtol=1e-12)
        np.testing.assert_allclose(g1, g2, rtol=1e-12, atol=1e-15)

    @pytest.mark.parametrize("code", [1, 4, 5])
    def test_gradient_matches_finite_differences(self, code):
        rng = np.random.default_rng(42)
        x = rng.standard_normal((100, 2)) / 3.0
        y = np.where(rng.random(100) < 0.5, -1.0, 1.0)
        p = rng.standard_normal(3)
        _, g = kernels.surrogate_grad(code, 0.1, x, y, p)
        h = 1e-6
        fd = [(kernels.surrogate_grad(code, 0.1, x, y, p + h * e)[0]
               - kernels.surrogate_grad(code, 0.1, x, y, p - h * e)[0]) / (2 * h) for e in np.eye(3)]
        np.testing.assert_allclose(g, fd, atol=1e-7)


class TestEnvFlag:
    def _backend(self, value):
        env = dict(os.environ)
        env["ROBUSTCALIB_DISABLE_NUMBA"] = value
        out = subprocess.run([sys.executable, "-c",
                              "from robustcalib import kernels; print(kernels.BACKEND)"],
                             env=env, capture_output=True, text=True, check=True)
        return out.stdout.strip()

    def test_flag_selects_numpy(self):
        assert self._backend("1") == "numpy"

    def test_unset_or_false_selects_numba(self):
        assert self._backend("") == "numba"
        assert self._backend("0") == "numba"
