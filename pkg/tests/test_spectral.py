"""Stationary point of the ray phase p(lam, kappa)."""

import numpy as np
import pytest

from llasym.config import DEFAULT
from llasym.elliptic import AnisotropyParams
from llasym.spectral import (d2p_dlambda2, dp_dlambda, find_lambda0, p,
                             phi0)


def test_scan_oracle(params05):
    """Brute-force sign scan of p' on 1e5 points brackets lambda0."""
    kappa = 1.0
    sp = find_lambda0(kappa, params05)
    K = params05.K
    grid = np.linspace(-2 * K + 1e-4, -1e-4, 100_000)
    dp = np.real(dp_dlambda(grid.astype(complex), kappa, params05))
    sign_flips = np.nonzero(np.diff(np.sign(dp)))[0]
    assert sign_flips.size == 1
    i = sign_flips[0]
    # secant refinement of the bracketing pair
    x0, x1 = grid[i], grid[i + 1]
    y0, y1 = dp[i], dp[i + 1]
    root = x0 - y0 * (x1 - x0) / (y1 - y0)
    assert abs(root - sp.lambda0) < 1e-9


def test_stationarity_and_curvature(params05):
    sp = find_lambda0(1.0, params05)
    assert abs(dp_dlambda(np.complex128(sp.lambda0), 1.0, params05)) < 1e-10
    assert sp.phi0 > 0
    h = 1e-4
    fd = np.real(
        p(np.complex128(sp.lambda0 + h), 1.0, params05)
        - 2 * p(np.complex128(sp.lambda0), 1.0, params05)
        + p(np.complex128(sp.lambda0 - h), 1.0, params05)) / (h * h)
    assert abs(-fd - sp.phi0) < 1e-6


def test_second_derivative_closed_form(params05):
    lam = np.complex128(-1.3 + 0.4j)
    h = 1e-5
    fd = (dp_dlambda(lam + h, 1.0, params05)
          - dp_dlambda(lam - h, 1.0, params05)) / (2 * h)
    assert abs(fd - d2p_dlambda2(lam, 1.0, params05)) < 1e-7


def test_p_symmetries(params05):
    lam = np.complex128(-0.9 + 0.7j)
    K, Kp = params05.K, params05.Kprime
    for kappa in (0.5, 1.0, 2.0):
        v = p(lam, kappa, params05)
        assert abs(p(lam + 2 * K, kappa, params05) - v) < 1e-10
        assert abs(p(lam + 2j * Kp, kappa, params05) + v) < 1e-10


def test_phi0_matches_result_field(params05):
    for kappa in (0.6, 1.0, 1.8):
        sp = find_lambda0(kappa, params05)
        assert abs(phi0(sp.lambda0, kappa, params05) - sp.phi0) < 1e-12


@pytest.mark.parametrize("k", [0.3, 0.8])
def test_other_moduli(k):
    params = AnisotropyParams.from_modulus(k, 1.0)
    sp = find_lambda0(1.0, params)
    assert -2 * params.K < sp.lambda0 < 0
    assert abs(dp_dlambda(np.complex128(sp.lambda0), 1.0, params)) < 1e-10
    assert sp.phi0 > 0
