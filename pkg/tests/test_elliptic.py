"""Elliptic layer: Jacobi oracle, w identities, Weierstrass data,
Cauchy kernel."""

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from llasym import checks
from llasym.config import DEFAULT
from llasym.elliptic import (AnisotropyParams, beta0, beta_fn,
                             cauchy_kernel, jacobi_sn_cn_dn, lattice_of,
                             w_functions)
from llasym.errors import PoleProximityError


def test_jacobi_against_mpmath(params05):
    """Independent oracle: mpmath.ellipfun at scattered complex points."""
    pts = [0.3 + 0.2j, -1.1 + 0.8j, 2.2 - 1.4j, 0.05 + 2.9j]
    m = params05.k ** 2
    for z in pts:
        sn, cn, dn = jacobi_sn_cn_dn(np.complex128(z), params05.k)
        assert abs(complex(sn) - complex(mp.ellipfun("sn", z, m=m))) < 1e-12
        assert abs(complex(cn) - complex(mp.ellipfun("cn", z, m=m))) < 1e-12
        assert abs(complex(dn) - complex(mp.ellipfun("dn", z, m=m))) < 1e-12


@pytest.mark.parametrize("k", [0.3, 0.5, 0.8])
def test_identity_suite(k):
    params = AnisotropyParams.from_modulus(k, 1.0)
    rng = np.random.default_rng(11)
    res = checks.elliptic_residuals(params, rng, n=200)
    for name, val in res.items():
        bound = 1e-7 if name.startswith("dw") else 1e-9
        assert val < bound, f"{name} residual {val:.3e} at k={k}"


@settings(max_examples=60, deadline=None)
@given(x=st.floats(-0.99, 0.99), y=st.floats(-0.99, 0.99))
def test_curve_relation_property(x, y):
    """w1^2 - w3^2 = rho^2 and w1^2 - w2^2 = rho^2 k^2 on the torus."""
    params = AnisotropyParams.from_modulus(0.5, 1.0)
    lam = np.complex128(2 * params.K * x + 2j * params.Kprime * y)
    from llasym.elliptic import lattice_distance
    if lattice_distance(lam, params.K, params.Kprime) < 0.05:
        return
    w1, w2, w3 = w_functions(lam, params)
    assert abs(w1 * w1 - w3 * w3 - params.rho ** 2) < 1e-9
    assert abs(w1 * w1 - w2 * w2 - (params.rho * params.k) ** 2) < 1e-9


def test_pole_guard(params05):
    with pytest.raises(PoleProximityError):
        w_functions(np.complex128(2 * params05.K + 1e-10), params05)


def test_zeta_quasi_periodicity(params05):
    lat = lattice_of(params05)
    z = np.complex128(0.37 + 0.61j)
    K, Kp = params05.K, params05.Kprime
    eta1 = lat.zeta(np.complex128(2.0 * K))
    eta3 = lat.zeta(np.complex128(2j * Kp))
    assert abs(lat.zeta(z + 4 * K) - lat.zeta(z) - 2 * eta1) < 1e-12
    assert abs(lat.zeta(z + 4j * Kp) - lat.zeta(z) - 2 * eta3) < 1e-12


def test_sigma_oddness_and_zero(params05):
    lat = lattice_of(params05)
    z = np.complex128(0.52 - 0.33j)
    assert abs(lat.sigma(z) + lat.sigma(-z)) < 1e-12
    # sigma(z) ~ z near the origin
    eps = 1e-6
    assert abs(lat.sigma(np.complex128(eps)) / eps - 1.0) < 1e-9


def test_beta_log_derivative(params05):
    """beta is characterized by d/dlam log beta = w3/rho."""
    lam = np.complex128(0.45 + 0.28j)
    h = 1e-5
    num = (np.log(beta_fn(lam + h, params05))
           - np.log(beta_fn(lam - h, params05))) / (2 * h)
    _, _, w3 = w_functions(lam, params05)
    assert abs(num - w3 / params05.rho) < 1e-8


def test_beta0_real_positive(params05):
    b0 = beta0(params05)
    assert isinstance(b0, float)
    assert b0 > 0.0


def test_kernel_residues(params05):
    res = checks.kernel_residuals(params05)
    assert res["residue_at_lam"] < 1e-8
    assert res["residue_at_iKp"] < 1e-8
    assert res["f_alternating_w1"] < 1e-9
    assert res["f_alternating_w2"] < 1e-9
    assert res["f_period"] < 1e-9


def test_kernel_simple_pole_structure(params05):
    """(mu - lam) * C(mu, lam) -> 1 as mu -> lam."""
    lam = np.complex128(-0.8 + 1.1j)
    for eps in (1e-4, 1e-5):
        mu = lam + eps * np.exp(0.3j)
        val = cauchy_kernel(mu, lam, params05, DEFAULT)
        assert abs((mu - lam) * val - 1.0) < 50 * eps
