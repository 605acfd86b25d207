"""Direct scattering map: Jost coefficients, symmetries, transport."""

import numpy as np
import pytest

from llasym.config import DEFAULT
from llasym.elliptic import w_functions
from llasym.errors import DomainError, SolitonPresentError
from llasym.scattering import (ScatteringData, SpinField, dispersion_a,
                               evolve_scattering, reflection,
                               scattering_coeffs, scattering_grid,
                               synthetic_reflection)


@pytest.fixture(scope="module")
def bump(params05):
    f = SpinField.gaussian_bump(amplitude=0.25, width=2.0, X=12.0, dx=0.1)
    f.params = params05
    return f


@pytest.fixture(scope="module")
def data(bump, params05):
    return reflection(bump, params05, n=24)


def test_unitarity(data):
    res = np.abs(data.a) ** 2 + np.abs(data.b) ** 2 - 1.0
    assert np.max(np.abs(res)) < 1e-6


def test_soliton_free_flag(data):
    assert data.soliton_free


def test_translation_symmetry(bump, params05):
    """a(lam + 2K) = a(lam), b(lam + 2K) = -b(lam)."""
    s = scattering_grid(params05, 24)[[3, 11, 19]]
    a0, b0 = scattering_coeffs(s, bump)
    a1, b1 = scattering_coeffs(s + 2.0 * params05.K, bump)
    assert np.max(np.abs(a1 - a0)) < 1e-8
    assert np.max(np.abs(b1 + b0)) < 1e-8


def test_gamma2_extension(data, params05):
    """The stored Gamma_2 rows follow a -> conj a, b -> -conj b."""
    n = data.lam.size // 2
    assert np.allclose(data.lam[n:], data.lam[:n] + 2j * params05.Kprime)
    assert np.allclose(data.a[n:], np.conj(data.a[:n]))
    assert np.allclose(data.b[n:], -np.conj(data.b[:n]))


def test_dispersion_representation(data, params05):
    """a recovered from r alone through the dispersion integral."""
    from llasym.rhp import reflection_interpolant
    r_func = reflection_interpolant(data)
    idx = [5, 12, 18]
    a_disp = dispersion_a(r_func, data.lam[idx], params05)
    rel = np.abs(a_disp - data.a[idx]) / np.abs(data.a[idx])
    assert np.max(rel) < 1e-3


def test_evolution_invariants(data, params05):
    ev = evolve_scattering(data, 7.3)
    assert np.max(np.abs(ev.a - data.a)) == 0.0
    assert np.max(np.abs(np.abs(ev.b) - np.abs(data.b))) < 1e-14
    w1, w2, _ = w_functions(data.lam, params05, DEFAULT)
    assert np.max(np.abs(ev.b - data.b * np.exp(-4j * 7.3 * w1 * w2))) < 1e-12
    with pytest.raises(DomainError):
        evolve_scattering(data, -1.0)


def test_soliton_rejection(params05):
    f = SpinField.gaussian_bump(amplitude=0.8, width=2.0, X=12.0, dx=0.1)
    f.params = params05
    with pytest.raises(SolitonPresentError):
        reflection(f, params05, n=24)


def test_synthetic_reflection_symmetries(synthetic_r, params05):
    K, Kp = params05.K, params05.Kprime
    s = scattering_grid(params05, 16)
    v = synthetic_r(s)
    assert np.max(np.abs(synthetic_r(s + 2 * K) + v)) < 1e-12
    assert np.max(np.abs(synthetic_r(s + 2j * Kp) + np.conj(v))) < 1e-12


def test_synthetic_reflection_scaling(params05):
    r1 = synthetic_reflection(0.5, 1.0, params05, DEFAULT)
    r2 = synthetic_reflection(1.0, 1.0, params05, DEFAULT)
    s = scattering_grid(params05, 8)
    assert np.max(np.abs(r2(s) - 2.0 * r1(s))) < 1e-12


def test_spinfield_csv_roundtrip(bump, tmp_path):
    path = tmp_path / "field.csv"
    bump.to_csv(path)
    back = SpinField.from_csv(path)
    assert np.array_equal(back.x, bump.x)
    assert np.array_equal(back.L, bump.L)


def test_scattering_csv_roundtrip(data, tmp_path, params05):
    path = tmp_path / "scatter.csv"
    data.to_csv(path)
    back = ScatteringData.from_csv(path, params=params05)
    assert np.allclose(back.lam, data.lam, atol=1e-15)
    assert np.allclose(back.a, data.a, atol=1e-15)
    assert np.allclose(back.b, data.b, atol=1e-15)
    assert back.soliton_free == data.soliton_free
