"""Inverse problem: singular-integral solver invariants."""

import numpy as np
import pytest

from llasym.errors import DomainError
from llasym.pauli import SIGMA1, SIGMA3
from llasym.rhp import solve_rhp, solve_rhp_line


@pytest.fixture(scope="module")
def sol(synthetic_r, params05):
    return solve_rhp(synthetic_r, 12.0, 12.0, params05)


def test_jump_residual_off_node(sol):
    """Boundary values interpolated between nodes still satisfy
    Phi_plus = Phi_minus G to 1e-6."""
    for ci in (0, 1):
        s = sol.contour.nodes[sol.contour.slices[ci]].real
        mids = 0.5 * (s[:-1:11] + s[1::11])
        assert sol.jump_residual(ci, mids) < 1e-6


def test_normalization_at_iKprime(sol, params05):
    phi = sol.phi(np.complex128(1j * params05.Kprime))[0]
    assert np.max(np.abs(phi - np.eye(2))) < 1e-8


def test_det_Y(sol, params05):
    lam = np.array([0.0, 0.3 + 0.9j, -1.2 + 0.4j])
    Y = sol.Y(lam)
    assert np.max(np.abs(np.linalg.det(Y) - 1.0)) < 1e-6


def test_Y_translation_symmetries(sol, params05):
    """sigma3 Y(lam + 2K) sigma3 = Y(lam) and
    sigma1 Y(lam + 2iK') sigma1 = Y(lam)."""
    K, Kp = params05.K, params05.Kprime
    lam = np.array([0.15 + 0.7j, -0.8 + 1.1j])
    Y = sol.Y(lam)
    YK = SIGMA3 @ sol.Y(lam + 2.0 * K) @ SIGMA3
    YKp = SIGMA1 @ sol.Y(lam + 2j * Kp) @ SIGMA1
    assert np.max(np.abs(YK - Y)) < 1e-7
    assert np.max(np.abs(YKp - Y)) < 1e-7


def test_bounded_at_branch_corner(sol, params05):
    """Phi stays O(1) at K + iK' (no spurious pole on the solver
    side); the nearby lattice translates stay bounded as well."""
    K, Kp = params05.K, params05.Kprime
    pts = np.array([K + 1j * Kp, -K + 1j * Kp, K + 3j * Kp])
    phi = sol.phi(pts)
    assert np.all(np.isfinite(phi))
    assert np.max(np.abs(phi)) < 10.0


def test_phi_standoff_guard(sol, params05):
    """Evaluation within the contour floor where the jump is active is
    refused instead of returning a silently inaccurate value."""
    sp = -1.9652939541945078       # stationary point: jump fully on
    with pytest.raises(DomainError):
        sol.phi(np.complex128(sp + 1e-9j))


def test_spin_vector_is_unit(sol):
    L = sol.L()
    assert abs(np.linalg.norm(L) - 1.0) < 1e-9


def test_line_solver_matches_single(synthetic_r, params05):
    """The shared-mesh line solver reproduces the one-shot solve."""
    L_line = solve_rhp_line(synthetic_r, [7.0], 9.0, params05,
                            n_base=256, n_max=1200)
    sol1 = solve_rhp(synthetic_r, 7.0, 9.0, params05,
                     n_base=256, n_max=1200)
    assert np.max(np.abs(L_line[0] - sol1.L())) < 1e-10
