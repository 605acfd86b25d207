"""Elliptic and related special functions on the torus.

Provides, for a rectangular torus with quarter-periods (K, K'):

- complete elliptic integrals via the AGM,
- Jacobi sn/cn/dn for complex argument (real-argument AGM/Landen core
  plus the addition formulas for a complex shift),
- the three meromorphic functions w1 = rho/sn, w2 = rho*dn/sn,
  w3 = rho*cn/sn living on the elliptic curve
  wi^2 - wj^2 = -(Ji - Jj)/4,
- Weierstrass sigma/zeta on the lattice generated by (4K, 4iK'),
  evaluated by theta series on a reference cell and extended by
  quasi-periodicity,
- beta(lam) = sigma(lam)sigma(lam-2K) / (sigma(lam+2iK')sigma(lam-2iK'-2K))
  and its slope beta0 at 0, satisfying d/dlam log beta = w3/rho,
- the genus-1 Cauchy kernel
  C(mu, lam) = zeta(mu-lam) - zeta(mu-iK') + zeta(lam-K-iK') + zeta(K)
  with residues +1 at mu=lam, -1 at mu=iK', +1 at lam=K+iK',
- the four-fold kernel combination f(mu).

All evaluators are vectorized over numpy arrays of points.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import DomainError, PoleProximityError

__all__ = [
    "agm", "complete_elliptic", "jacobi_sn_cn_dn", "AnisotropyParams",
    "reduce_torus", "lattice_distance", "w_functions", "w_derivatives",
    "WeierstrassLattice", "lattice_of", "beta_fn", "beta0",
    "cauchy_kernel", "f_sum",
]


# ---------------------------------------------------------------------------
# Complete elliptic integrals (AGM)
# ---------------------------------------------------------------------------

def agm(a: float, b: float, tol: float = 1e-16) -> float:
    """Arithmetic-geometric mean of two positive reals."""
    a = float(a)
    b = float(b)
    if a <= 0 or b <= 0:
        raise DomainError("agm requires positive arguments")
    while abs(a - b) > tol * a:
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return 0.5 * (a + b)


def complete_elliptic(k: float) -> tuple[float, float]:
    """Complete elliptic integrals (K, K') of modulus k in (0, 1)."""
    if not (0.0 < k < 1.0):
        raise DomainError(f"modulus k={k} outside (0, 1)")
    kp = np.sqrt(1.0 - k * k)
    big_k = np.pi / (2.0 * agm(1.0, kp))
    big_kp = np.pi / (2.0 * agm(1.0, k))
    return float(big_k), float(big_kp)


# ---------------------------------------------------------------------------
# Jacobi elliptic functions
# ---------------------------------------------------------------------------

def _landen_scheme(k: float):
    """Descending-Landen coefficient tables (a_n, c_n) for modulus k."""
    a, b, c = 1.0, float(np.sqrt(1.0 - k * k)), float(k)
    avals, cvals = [a], [c]
    while abs(c) > 1e-16 * a:
        a, b, c = 0.5 * (a + b), float(np.sqrt(a * b)), 0.5 * (a - b)
        avals.append(a)
        cvals.append(c)
    return np.array(avals), np.array(cvals)


def _jacobi_real(u: np.ndarray, k: float):
    """sn, cn, dn for real argument via the AGM / descending Landen
    recursion (amplitude back-substitution)."""
    avals, cvals = _landen_scheme(k)
    n_last = len(avals) - 1
    phi = (2.0 ** n_last) * avals[n_last] * np.asarray(u, dtype=float)
    for n in range(n_last, 0, -1):
        phi = 0.5 * (phi + np.arcsin(
            np.clip(cvals[n] / avals[n], -1.0, 1.0) * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    dn = np.sqrt(np.maximum(1.0 - (k * sn) ** 2, 0.0))
    return sn, cn, dn


def jacobi_sn_cn_dn(lam, k: float):
    """Jacobi sn, cn, dn of a complex argument.

    Real and imaginary parts are handled by the real-argument core at
    moduli k and k' respectively, combined with the addition formulas.
    The common denominator cn(y,k')^2 + k^2 sn(x,k)^2 sn(y,k')^2
    vanishes exactly at the poles of all three functions.
    """
    lam = np.asarray(lam, dtype=complex)
    kp = float(np.sqrt(1.0 - k * k))
    x = lam.real
    y = lam.imag
    s, c, d = _jacobi_real(x, k)
    s1, c1, d1 = _jacobi_real(y, kp)
    den = c1 * c1 + (k * s * s1) ** 2
    sn = (s * d1 + 1j * c * d * s1 * c1) / den
    cn = (c * c1 - 1j * s * d * s1 * d1) / den
    dn = (d * c1 * d1 - 1j * k * k * s * c * s1) / den
    return sn, cn, dn


# ---------------------------------------------------------------------------
# Anisotropy parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnisotropyParams:
    """Anisotropy constants J1 < J2 < J3 and the derived torus data."""

    J1: float
    J2: float
    J3: float
    rho: float
    k: float
    kprime: float
    K: float
    Kprime: float

    @classmethod
    def from_J(cls, J1: float, J2: float, J3: float) -> "AnisotropyParams":
        if not (J1 < J2 < J3):
            raise DomainError("anisotropy constants must satisfy J1 < J2 < J3")
        rho = np.sqrt(J3 - J1) / 2.0
        k = float(np.sqrt((J2 - J1) / (J3 - J1)))
        big_k, big_kp = complete_elliptic(k)
        return cls(J1, J2, J3, float(rho), k, float(np.sqrt(1 - k * k)),
                   big_k, big_kp)

    @classmethod
    def from_modulus(cls, k: float, rho: float = 1.0) -> "AnisotropyParams":
        """Convenience constructor; J1 is gauged to 0 (the dynamics only
        sees J differences)."""
        if rho <= 0:
            raise DomainError("rho must be positive")
        return cls.from_J(0.0, 4.0 * rho * rho * k * k, 4.0 * rho * rho)

    @property
    def lattice_points(self) -> np.ndarray:
        """The four w-pole representatives {0, 2K, 2iK', 2K+2iK'}."""
        return np.array([0.0, 2 * self.K, 2j * self.Kprime,
                         2 * self.K + 2j * self.Kprime])


def reduce_torus(lam, K: float, Kprime: float):
    """Canonical torus representative with Re in [-2K, 2K), Im in
    [-2K', 2K')."""
    lam = np.asarray(lam, dtype=complex)
    x = np.mod(lam.real + 2 * K, 4 * K) - 2 * K
    y = np.mod(lam.imag + 2 * Kprime, 4 * Kprime) - 2 * Kprime
    return x + 1j * y


def lattice_distance(lam, K: float, Kprime: float):
    """Distance to the nearest translate of {0, 2K, 2iK', 2K+2iK'},
    i.e. to the half-period lattice 2K*Z + 2iK'*Z."""
    lam = np.asarray(lam, dtype=complex)
    dx = lam.real - 2 * K * np.round(lam.real / (2 * K))
    dy = lam.imag - 2 * Kprime * np.round(lam.imag / (2 * Kprime))
    return np.hypot(dx, dy)


def _guard_lattice(lam, params: AnisotropyParams, tol: Tolerances):
    dist = lattice_distance(lam, params.K, params.Kprime)
    if np.any(dist < tol.guard_radius):
        lam = np.asarray(lam, dtype=complex)
        idx = np.unravel_index(np.argmin(dist), np.shape(dist)) if np.ndim(dist) else ()
        bad = lam[idx] if np.ndim(lam) else complex(lam)
        pole = (2 * params.K * np.round(bad.real / (2 * params.K))
                + 2j * params.Kprime * np.round(bad.imag / (2 * params.Kprime)))
        raise PoleProximityError(bad, pole, float(np.min(dist)),
                                 what="w-function pole")


def w_functions(lam, params: AnisotropyParams, tol: Tolerances = DEFAULT):
    """The triple (w1, w2, w3) = rho*(1, dn, cn)/sn at complex lam.

    Simple poles with residue rho sit at every translate of
    {0, 2K, 2iK', 2K+2iK'}; evaluation inside the guard radius raises
    :class:`PoleProximityError`.
    """
    _guard_lattice(lam, params, tol)
    sn, cn, dn = jacobi_sn_cn_dn(lam, params.k)
    w1 = params.rho / sn
    w2 = params.rho * dn / sn
    w3 = params.rho * cn / sn
    return w1, w2, w3


def w_derivatives(lam, params: AnisotropyParams, tol: Tolerances = DEFAULT):
    """d(w1,w2,w3)/dlam = -(w2*w3, w1*w3, w1*w2)/rho."""
    w1, w2, w3 = w_functions(lam, params, tol)
    rho = params.rho
    return -w2 * w3 / rho, -w1 * w3 / rho, -w1 * w2 / rho


# ---------------------------------------------------------------------------
# Weierstrass sigma / zeta on the lattice (4K, 4iK')
# ---------------------------------------------------------------------------

class WeierstrassLattice:
    """Weierstrass sigma and zeta for the rectangular lattice generated
    by (4K, 4iK').

    Evaluation uses the Jacobi theta-1 series on the centered reference
    cell |Re z| <= 2K, |Im z| <= 2K' (rapidly convergent there for any
    modulus in the supported range) and the quasi-periodicity constants
    eta = zeta(2K), eta' = zeta(2iK') for the extension to arbitrary
    cells.
    """

    _N_TERMS = 16

    def __init__(self, K: float, Kprime: float):
        self.K = float(K)
        self.Kprime = float(Kprime)
        self.omega1 = 2.0 * self.K            # half-period (real)
        self.omega3 = 2.0j * self.Kprime      # half-period (imaginary)
        self.q = np.exp(-np.pi * self.Kprime / self.K)
        n = np.arange(self._N_TERMS)
        self._sign = (-1.0) ** n
        self._qpow = self.q ** ((n + 0.5) ** 2)
        self._odd = 2 * n + 1
        th1p0 = 2.0 * np.sum(self._sign * self._odd * self._qpow)
        th1ppp0 = -2.0 * np.sum(self._sign * self._odd ** 3 * self._qpow)
        self._theta1p0 = th1p0
        # eta = zeta(omega1) from the classical theta-constant formula
        self.eta1 = -(np.pi ** 2) / (12.0 * self.omega1) * th1ppp0 / th1p0
        # Legendre relation eta1*omega3 - eta3*omega1 = i*pi/2
        self.eta3 = (self.eta1 * self.omega3 - 0.5j * np.pi) / self.omega1

    # -- theta series on the reference cell --------------------------------
    def _theta1(self, v):
        # accumulate term by term: broadcasting all 16 terms at once
        # allocates a (..., 16) temporary that dominates memory for
        # large kernel matrices
        v = np.asarray(v, dtype=complex)
        out = np.zeros(v.shape, dtype=complex)
        for s, qp, m in zip(self._sign, self._qpow, self._odd):
            out += (s * qp) * np.sin(m * v)
        return 2.0 * out

    def _theta1_prime(self, v):
        v = np.asarray(v, dtype=complex)
        out = np.zeros(v.shape, dtype=complex)
        for s, qp, m in zip(self._sign, self._qpow, self._odd):
            out += (s * qp * m) * np.cos(m * v)
        return 2.0 * out

    def _reduce(self, z):
        """Split z = z0 + 2*(n1*omega1 + n3*omega3) with z0 in the
        centered reference cell."""
        z = np.asarray(z, dtype=complex)
        n1 = np.round(z.real / (2.0 * self.omega1))
        n3 = np.round(z.imag / (2.0 * abs(self.omega3)))
        z0 = z - 2.0 * n1 * self.omega1 - 2.0 * n3 * self.omega3
        return z0, n1, n3

    def zeta(self, z):
        """Weierstrass zeta; quasi-periodic: zeta(z+4K) = zeta(z) + 2*eta."""
        z0, n1, n3 = self._reduce(z)
        v = np.pi * z0 / (2.0 * self.omega1)
        # lattice points give theta1 = 0: let the pole surface as inf
        with np.errstate(divide="ignore", invalid="ignore"):
            core = (self.eta1 * z0 / self.omega1
                    + np.pi / (2.0 * self.omega1)
                    * self._theta1_prime(v) / self._theta1(v))
        return core + 2.0 * n1 * self.eta1 + 2.0 * n3 * self.eta3

    def sigma(self, z):
        """Weierstrass sigma; entire, odd, sigma(z)/z -> 1 at 0."""
        z0, n1, n3 = self._reduce(z)
        v = np.pi * z0 / (2.0 * self.omega1)
        core = (2.0 * self.omega1 / np.pi
                * np.exp(self.eta1 * z0 * z0 / (2.0 * self.omega1))
                * self._theta1(v) / self._theta1p0)
        eta_w = n1 * self.eta1 + n3 * self.eta3
        omega_w = n1 * self.omega1 + n3 * self.omega3
        sign = (-1.0) ** (n1 + n3 + n1 * n3)
        return sign * core * np.exp(2.0 * eta_w * (z0 + omega_w))


@lru_cache(maxsize=32)
def _lattice_for(K: float, Kprime: float) -> WeierstrassLattice:
    return WeierstrassLattice(K, Kprime)


def lattice_of(params: AnisotropyParams) -> WeierstrassLattice:
    """Cached Weierstrass lattice for a parameter set."""
    return _lattice_for(params.K, params.Kprime)


# ---------------------------------------------------------------------------
# beta and the Cauchy kernel
# ---------------------------------------------------------------------------

def _beta_raw(lam, params: AnisotropyParams):
    """Sigma-quotient representative of beta, phase not yet fixed."""
    lat = lattice_of(params)
    K, Kp = params.K, params.Kprime
    num = lat.sigma(lam) * lat.sigma(np.asarray(lam) - 2 * K)
    den = (lat.sigma(np.asarray(lam) + 2j * Kp)
           * lat.sigma(np.asarray(lam) - 2j * Kp - 2 * K))
    return num / den


@lru_cache(maxsize=32)
def _beta0_raw(params: AnisotropyParams) -> complex:
    lat = lattice_of(params)
    K, Kp = params.K, params.Kprime
    return complex(lat.sigma(-2 * K)
                   / (lat.sigma(2j * Kp) * lat.sigma(-2j * Kp - 2 * K)))


def beta_fn(lam, params: AnisotropyParams):
    """beta(lam) satisfying d/dlam log beta = w3(lam)/rho.

    The ODE fixes beta only up to a multiplicative constant; the
    constant is chosen so that beta(lam)/lam -> beta0 > 0 as lam -> 0.
    The phase-shift theta of the long-time asymptotics is invariant
    under this choice because the coefficient integral of
    d log(1+|r|^2) over [lambda0, 0] telescopes to -2*pi*nu, which
    cancels the matching beta0**(-2*i*nu) factor exactly.
    """
    b0 = _beta0_raw(params)
    return _beta_raw(lam, params) * (abs(b0) / b0)


def beta0(params: AnisotropyParams) -> float:
    """Slope of beta at 0, real and positive by the phase convention
    of :func:`beta_fn`."""
    return abs(_beta0_raw(params))


def cauchy_kernel(mu, lam, params: AnisotropyParams,
                  tol: Tolerances = DEFAULT, check: bool = True):
    """Gusman-Rodin kernel C(mu, lam), doubly periodic in both
    arguments with periods (4K, 4iK')."""
    lat = lattice_of(params)
    K, Kp = params.K, params.Kprime
    mu = np.asarray(mu, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    if check:
        for point, pole, what in (
                (mu - lam, 0.0, "kernel pole mu=lambda"),
                (mu - 1j * Kp, 0.0, "kernel pole mu=iK'"),
                (lam - K - 1j * Kp, 0.0, "kernel pole lambda=K+iK'")):
            dist = _period_distance(point, 4 * K, 4 * Kp)
            if np.any(dist < tol.guard_radius):
                raise PoleProximityError(point.flat[np.argmin(dist)] if point.ndim
                                         else complex(point),
                                         pole, float(np.min(dist)), what=what)
    return (lat.zeta(mu - lam) - lat.zeta(mu - 1j * Kp)
            + lat.zeta(lam - K - 1j * Kp) + lat.zeta(np.asarray(K)))


def _period_distance(z, px: float, py: float):
    z = np.asarray(z, dtype=complex)
    dx = z.real - px * np.round(z.real / px)
    dy = z.imag - py * np.round(z.imag / py)
    return np.hypot(dx, dy)


def f_sum(mu, params: AnisotropyParams, tol: Tolerances = DEFAULT):
    """f(mu) = C(mu,0) + C(mu+2K,2K) + C(mu+2iK',2iK')
    + C(mu+2K+2iK', 2K+2iK')."""
    K, Kp = params.K, params.Kprime
    shifts = (0.0, 2 * K, 2j * Kp, 2 * K + 2j * Kp)
    mu = np.asarray(mu, dtype=complex)
    total = 0.0 + 0.0j
    for s in shifts:
        total = total + cauchy_kernel(mu + s, s, params, tol)
    return total
