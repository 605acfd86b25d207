"""Closed-form leading-order profile: constants, parametrices, phase."""

import numpy as np
import pytest

from llasym.asymptotics import (AsymptoticInputs, alpha_boundary,
                                alpha_global, asymptotic_L,
                                asymptotics_table, c0_of, delta_fn,
                                nu_of, theta, theta_imag)
from llasym.config import DEFAULT
from llasym.elliptic import beta_fn
from llasym.errors import DomainError
from llasym.scattering import dispersion_a
from llasym.spectral import find_lambda0


@pytest.fixture(scope="module")
def inputs(synthetic_r, params05):
    return AsymptoticInputs.from_reflection(synthetic_r, 1.0, params05)


def test_nu_unit_modulus():
    assert abs(nu_of(1.0) - np.log(2.0) / (2.0 * np.pi)) < 1e-12
    assert abs(nu_of(np.exp(0.7j)) - np.log(2.0) / (2.0 * np.pi)) < 1e-12


def _stirling_loggamma_imag(nu: float) -> float:
    """Independent arg Gamma(i nu): recurrence to |z| ~ 12 + Stirling."""
    z = complex(0.0, nu)
    shift = 0.0 + 0.0j
    n = 12
    for k in range(n):
        shift += np.log(z + k)
    w = z + n
    series = (w - 0.5) * np.log(w) - w + 0.5 * np.log(2.0 * np.pi)
    bern = [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0]
    for j, c in enumerate(bern):
        series += c / w ** (2 * j + 1)
    return float(np.imag(series - shift))


def test_arg_gamma_oracle(inputs):
    from scipy.special import loggamma
    for nu in (inputs.nu, 0.05, 0.4):
        assert abs(float(np.imag(loggamma(1j * nu)))
                   - _stirling_loggamma_imag(nu)) < 1e-10


def test_structural_identities(inputs):
    for t in (25.0, 50.0, 400.0):
        L = asymptotic_L(t, t, inputs)
        assert L[2] == 1.0 - 0.5 * (L[0] ** 2 + L[1] ** 2)
        assert abs(np.linalg.norm(L) - 1.0) < 1e-6


def test_amplitude_scaling_exact(inputs, params05):
    """Envelope extracted from the components is exactly
    sqrt(2 nu / (t phi0)) / rho for every t."""
    from llasym.elliptic import w_functions
    w1, w2, _ = w_functions(np.complex128(inputs.lambda0), params05)
    for t in (25.0, 100.0, 1600.0):
        L = asymptotic_L(t, t, inputs)
        amp = np.hypot(L[0] / np.real(w2), L[1] / np.real(w1))
        target = np.sqrt(2.0 * inputs.nu / (t * inputs.phi0)) / params05.rho
        assert abs(amp - target) < 1e-15


def test_theta_guards(inputs):
    with pytest.raises(DomainError):
        theta(26.0, 25.0, inputs)
    with pytest.raises(DomainError):
        theta(0.0, 0.0, inputs)


def test_theta_imag_negligible(inputs):
    """c0 is real for the symmetric synthetic reflection, so the phase
    is real up to quadrature noise."""
    assert abs(theta_imag(50.0, inputs)) < 1e-7


def test_c0_against_mpmath_quadrature(synthetic_r, params05):
    """Independent oracle: tanh-sinh quadrature of the defining
    integral (integrable log singularity at eta = lambda0)."""
    import mpmath as mp
    sp = find_lambda0(1.0, params05)
    l0 = sp.lambda0
    h = 1e-6

    def integrand(eta):
        eta = float(eta)
        gp = (np.log1p(np.abs(synthetic_r(np.complex128(eta + h))) ** 2)
              - np.log1p(np.abs(synthetic_r(np.complex128(eta - h))) ** 2)
              ) / (2.0 * h)
        lb = complex(np.log(beta_fn(np.complex128(eta - l0), params05)))
        return gp * mp.mpc(lb)

    val = mp.quad(integrand, [l0, 0.0])
    oracle = complex(val) / (2.0 * np.pi)
    mine = c0_of(l0, synthetic_r, params05)
    assert abs(mine - oracle) < 1e-6


def test_alpha_cut_jump(synthetic_r, params05):
    sp = find_lambda0(1.0, params05)
    s = 0.35 * sp.lambda0
    up = alpha_boundary(s, +1, synthetic_r, sp.lambda0, params05)
    dn = alpha_boundary(s, -1, synthetic_r, sp.lambda0, params05)
    jump = 1.0 + abs(synthetic_r(np.complex128(s))) ** 2
    assert abs(up / dn - jump) < 1e-10


def test_alpha_factorization(synthetic_r, params05):
    """alpha(lam) = beta(lambda0 - lam)^{i nu} e^{i c0(lam)} off the
    cut."""
    sp = find_lambda0(1.0, params05)
    lam = sp.lambda0 + 0.3 + 0.25j
    r0 = complex(synthetic_r(np.complex128(sp.lambda0)))
    nu = nu_of(r0)
    direct = complex(alpha_global(lam, synthetic_r, sp.lambda0, params05))
    c0l = c0_of(sp.lambda0, synthetic_r, params05, lam=lam)
    fact = (complex(beta_fn(np.complex128(sp.lambda0 - lam),
                            params05)) ** (1j * nu) * np.exp(1j * c0l))
    assert abs(direct - fact) < 1e-9


def test_delta_equals_inverse_a(synthetic_r, params05):
    """Cross-module: the diagonal dressing equals 1/a from the
    dispersion representation."""
    for lam in (-params05.K + 0.7j * params05.Kprime,
                -0.4 * params05.K + 1.1j * params05.Kprime):
        d = complex(delta_fn(lam, synthetic_r, params05))
        a = complex(dispersion_a(synthetic_r, lam, params05))
        assert abs(d * a - 1.0) < 1e-6


def test_table_layout(synthetic_r, params05):
    rows = asymptotics_table(synthetic_r, 1.0, [25.0, 50.0], params05)
    assert len(rows) == 2
    assert len(rows[0]) == 11
    t, x = rows[0][0], rows[0][1]
    assert t == 25.0 and x == 25.0
    # L3 column honors the unit-deficit identity
    _, _, L1, L2, L3, *_ = rows[0]
    assert L3 == 1.0 - 0.5 * (L1 ** 2 + L2 ** 2)
