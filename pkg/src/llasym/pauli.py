"""2x2 complex matrix helpers: Pauli matrices, decomposition, inversion.

Matrices are plain numpy arrays of shape (..., 2, 2); helpers are
vectorized over leading axes.
"""

from __future__ import annotations

import numpy as np

from .errors import ConsistencyError

ID2 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA3 = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMAS = (SIGMA1, SIGMA2, SIGMA3)


def det2(m: np.ndarray) -> np.ndarray:
    """Determinant of (..., 2, 2) arrays without LAPACK overhead."""
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def inv2(m: np.ndarray, det_floor: float = 1e-13) -> np.ndarray:
    """Inverse of (..., 2, 2) arrays via the adjugate formula."""
    d = det2(m)
    if np.any(np.abs(d) < det_floor):
        raise ConsistencyError(
            f"2x2 inversion below determinant floor: min |det| = "
            f"{np.min(np.abs(d)):.3e}")
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 1, 1] = m[..., 0, 0]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    return out / d[..., None, None]


def pauli_decompose(m: np.ndarray):
    """Coefficients (c0, c1, c2, c3) with M = c0*I + sum cj*sigma_j."""
    c0 = 0.5 * (m[..., 0, 0] + m[..., 1, 1])
    c1 = 0.5 * (m[..., 0, 1] + m[..., 1, 0])
    c2 = 0.5j * (m[..., 0, 1] - m[..., 1, 0])
    c3 = 0.5 * (m[..., 0, 0] - m[..., 1, 1])
    return c0, c1, c2, c3


def pauli_assemble(c0, c1, c2, c3) -> np.ndarray:
    """Inverse of :func:`pauli_decompose`."""
    c0, c1, c2, c3 = np.broadcast_arrays(c0, c1, c2, c3)
    out = np.empty(np.shape(c0) + (2, 2), dtype=complex)
    out[..., 0, 0] = c0 + c3
    out[..., 1, 1] = c0 - c3
    out[..., 0, 1] = c1 - 1j * np.asarray(c2)
    out[..., 1, 0] = c1 + 1j * np.asarray(c2)
    return out


def conj_by(sigma: np.ndarray, m: np.ndarray) -> np.ndarray:
    """sigma @ m @ sigma for a Pauli matrix (its own inverse)."""
    return sigma @ m @ sigma
