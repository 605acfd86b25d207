"""Parabolic-cylinder sector matrix and the conformal coordinate."""

import numpy as np
import pytest

from llasym import checks
from llasym.config import DEFAULT
from llasym.errors import DomainError
from llasym.parametrix import (Dab_matrix, Dab_remainder,
                               ParabolicParams, dab_expansion, pcf_D,
                               pcf_D_deriv, ray_jump, xi_map, xi_tilde)
from llasym.spectral import find_lambda0, p


@pytest.fixture(scope="module")
def pp():
    nu = 0.2
    r0 = np.sqrt(np.expm1(2.0 * np.pi * nu)) * np.exp(0.3j)
    return ParabolicParams.from_scattering(r0, nu, 0.0, 1.0)


def test_connection_constraint(pp):
    assert abs(pp.a * pp.b - 1j * pp.nu) < 1e-13


def test_r0_zero_rejected():
    with pytest.raises(DomainError):
        ParabolicParams.from_scattering(0.0, 0.0, 0.0, 1.0)


def test_pcf_small_argument_series():
    """D_nu(z) for nu = 0 reduces to e^{-z^2/4}."""
    for z in (0.3, 0.8 + 0.4j, -1.1j):
        assert abs(pcf_D(0.0, z) - np.exp(-z * z / 4.0)) < 1e-12


def test_pcf_derivative_consistency():
    z, order = 0.7 + 0.5j, 0.25j
    h = 1e-6
    fd = (pcf_D(order, z + h) - pcf_D(order, z - h)) / (2 * h)
    assert abs(fd - pcf_D_deriv(order, z)) < 1e-9


def test_ray_jumps_and_cycle():
    res = checks.parametrix_residuals()
    assert res["ray_jump_constancy"] < 1e-8
    assert res["ray_jump_det"] < 1e-10
    assert res["cyclic_product"] < 1e-10


def test_unit_determinant(pp):
    for xi in (2.0 * np.exp(0.4j * np.pi), 3.5 * np.exp(1.3j * np.pi)):
        assert abs(np.linalg.det(Dab_matrix(xi, pp)) - 1.0) < 1e-10


def test_expansion_remainder_ratio():
    res = checks.parametrix_residuals()
    assert abs(res["doubling_ratio"] - 8.0) < 0.4 * 8.0


def test_expansion_coefficients_empirical(pp):
    """xi (R - I) recovers m1 = [[0,-a],[b,0]]; the next order
    recovers the trace-consistent m2."""
    xi = 30.0 * np.exp(0.4j * np.pi)
    R = Dab_remainder(xi, pp)
    m1 = np.array([[0.0, -pp.a], [pp.b, 0.0]])
    ab = pp.a * pp.b
    m2 = np.diag([ab * (ab - 1.0) / 2.0, -ab * (ab + 1.0) / 2.0])
    m1_num = xi * (R - np.eye(2))
    assert np.max(np.abs(m1_num - m1)) < 3.0 * np.max(np.abs(m2)) / 30.0
    m2_num = xi * (m1_num - m1)
    assert np.max(np.abs(m2_num - m2)) < 0.2 * np.max(np.abs(m2))
    # the expansion helper agrees with the explicit coefficients
    E = dab_expansion(xi, pp, order=2)
    assert np.max(np.abs(E - (np.eye(2) + m1 / xi + m2 / xi ** 2))) < 1e-14


def test_ray_jump_entries_unimodular_triangular(pp):
    """Each ray jump is unipotent triangular (or the fold closure)."""
    for ray in range(4):
        J = ray_jump(ray, 3.0, pp)
        assert abs(np.linalg.det(J) - 1.0) < 1e-10
        offdiag = min(abs(J[0, 1]), abs(J[1, 0]))
        assert offdiag < 1e-10
        assert abs(J[0, 0] - 1.0) < 1e-10 and abs(J[1, 1] - 1.0) < 1e-10


def test_xi_map_square(params05):
    """xi^2 = 4 i t (p0 - p(lam)) exactly, and 2K-periodicity."""
    kappa, t = 1.0, 40.0
    sp = find_lambda0(kappa, params05)
    for lam in (sp.lambda0 + 0.05 + 0.02j, sp.lambda0 - 0.04 + 0.03j):
        xi = complex(xi_map(lam, t, kappa, sp.lambda0, sp.phi0, params05))
        target = 4j * t * (sp.p_at - p(np.complex128(lam), kappa, params05))
        assert abs(xi * xi - target) < 1e-8 * (1.0 + abs(target))
        xi_shift = complex(xi_map(lam + 2 * params05.K, t, kappa,
                                  sp.lambda0, sp.phi0, params05))
        assert abs(xi_shift - xi) < 1e-8


def test_xi_map_linearization(params05):
    """xi(lam) ~ e^{i pi/4} sqrt(2 phi0 t) (lam - lambda0), verified by
    Richardson extrapolation in the offset."""
    kappa, t = 1.0, 40.0
    sp = find_lambda0(kappa, params05)
    gamma = np.exp(1j * np.pi / 4.0) * np.sqrt(2.0 * sp.phi0 * t)

    def slope(h):
        lam = sp.lambda0 + h * np.exp(0.2j)
        return complex(xi_map(lam, t, kappa, sp.lambda0, sp.phi0,
                              params05)) / (h * np.exp(0.2j))

    s1, s2 = slope(1e-3), slope(5e-4)
    extrap = 2.0 * s2 - s1
    assert abs(extrap - gamma) / abs(gamma) < 1e-6


def test_xi_tilde_shift(params05):
    kappa, t = 1.0, 40.0
    sp = find_lambda0(kappa, params05)
    lam = sp.lambda0 + 0.03 + 0.01j
    a = complex(xi_tilde(lam, t, kappa, sp.lambda0, sp.phi0, params05))
    b = complex(xi_map(lam + 2j * params05.Kprime, t, kappa, sp.lambda0,
                       sp.phi0, params05))
    assert abs(a - b) < 1e-12
