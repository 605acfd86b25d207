"""Parabolic cylinder parametrix diagnostics.

The local model of the field near a stationary point of the phase is
built from the Weber parabolic cylinder function D_order(z) through a
piecewise-analytic 2x2 matrix D_{a,b}(xi) defined on five sectors of
pi/4 <= arg xi <= 9 pi/4. This module evaluates D_{a,b}, its sector
jumps, its large-xi expansion, the conformal map xi(lambda), and the
assembled local parametrix; everything here is used as an independent
check on the singular-integral solver and the closed-form asymptotics,
never inside them.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp
import numpy as np
from scipy.special import gamma as sp_gamma

from .config import DEFAULT, Tolerances
from .elliptic import AnisotropyParams
from .errors import DomainError, RangeError
from .pauli import SIGMA1, SIGMA2, SIGMA3
from .spectral import p

__all__ = [
    "ParabolicParams", "pcf_D", "pcf_D_deriv", "Dab_matrix",
    "Dab_remainder", "dab_expansion", "ray_jump", "xi_map", "xi_tilde",
    "local_parametrix",
]


def _dps_for(z) -> int:
    # Kummer-series cancellation grows like e^{|z|^2/2}
    return int(30 + 0.25 * abs(complex(z)) ** 2)


def pcf_D(order, z) -> complex:
    """Weber parabolic cylinder function D_order(z), complex order and
    argument, evaluated in adaptive precision."""
    with mp.workdps(_dps_for(z)):
        return complex(mp.pcfd(mp.mpmathify(order), mp.mpmathify(z)))


def pcf_D_deriv(order, z) -> complex:
    """d/dz D_order(z) via D'(z) = (z/2) D_order(z) - D_{order+1}(z)."""
    with mp.workdps(_dps_for(z)):
        o = mp.mpmathify(order)
        zz = mp.mpmathify(z)
        return complex(zz / 2 * mp.pcfd(o, zz) - mp.pcfd(o + 1, zz))


@dataclass(frozen=True)
class ParabolicParams:
    """Connection coefficients of the local model.

    a, b solve  -i sqrt(2 pi) e^{-2 pi nu} / (a Gamma(-i nu))
    = -r0 e^{2 i t p0}  and  -sqrt(2 pi) e^{3 pi nu} / (b Gamma(i nu))
    = -conj(r0) e^{-2 i t p0},  so that a b = i nu exactly.
    """

    a: complex
    b: complex
    nu: float
    r0: complex
    p0: float

    def __post_init__(self):
        if abs(self.a * self.b - 1j * self.nu) > 1e-12 * (1.0 + self.nu):
            raise DomainError("a*b differs from i*nu beyond 1e-12")

    @classmethod
    def from_scattering(cls, r0: complex, nu: float, p0: float,
                        t: float) -> "ParabolicParams":
        if r0 == 0:
            raise DomainError("connection coefficients undefined at r0 = 0")
        ph = np.exp(2j * t * p0)
        a = (1j * np.sqrt(2.0 * np.pi) * np.exp(-2.0 * np.pi * nu)
             / (sp_gamma(-1j * nu) * r0 * ph))
        b = (np.sqrt(2.0 * np.pi) * np.exp(3.0 * np.pi * nu) * ph
             / (sp_gamma(1j * nu) * np.conj(r0)))
        # enforce ab = i nu exactly against roundoff in the Gamma moduli
        b = 1j * nu / a
        return cls(a=complex(a), b=complex(b), nu=float(nu),
                   r0=complex(r0), p0=float(p0))


def _sector_of(xi: complex) -> int:
    """Sector index 1..5 for arg xi folded into (pi/4, 9 pi/4)."""
    ang = float(np.angle(xi))
    if ang <= np.pi / 4.0 + 1e-15:
        ang += 2.0 * np.pi
    bounds = (np.pi / 4, np.pi / 2, np.pi, 3 * np.pi / 2,
              2 * np.pi, 9 * np.pi / 4)
    for s in range(5):
        if bounds[s] < ang < bounds[s + 1]:
            return s + 1
    raise DomainError(
        f"arg xi = {ang} lies on a sector ray; pick a side explicitly")


def _dab_sector_mp(xi, pp: ParabolicParams, sector: int):
    """mpmath 2x2 matrix for D_{a,b} on the given sector (1..5)."""
    dps = _dps_for(xi)
    with mp.workdps(dps):
        z = mp.mpmathify(complex(xi))
        a = mp.mpmathify(pp.a)
        ab = mp.mpc(0, 1) * pp.nu

        def D(o, w):
            return mp.pcfd(o, w)

        def Dp(o, w):
            return w / 2 * mp.pcfd(o, w) - mp.pcfd(o + 1, w)

        rot = {1: (-mp.pi / 2, 0), 2: (-mp.pi / 2, -mp.pi),
               3: (-3 * mp.pi / 2, -mp.pi), 4: (-3 * mp.pi / 2, -2 * mp.pi),
               5: (-5 * mp.pi / 2, -2 * mp.pi)}[sector]
        right = {1: (mp.e ** (mp.mpc(0, 1) * mp.pi / 2 * ab), -a),
                 2: (mp.e ** (mp.mpc(0, 1) * mp.pi / 2 * ab),
                     a * mp.e ** (-mp.mpc(0, 1) * mp.pi * ab)),
                 3: (mp.e ** (mp.mpc(0, 1) * 3 * mp.pi / 2 * ab),
                     a * mp.e ** (-mp.mpc(0, 1) * mp.pi * ab)),
                 4: (mp.e ** (mp.mpc(0, 1) * 3 * mp.pi / 2 * ab),
                     -a * mp.e ** (-mp.mpc(0, 1) * 2 * mp.pi * ab)),
                 5: (mp.e ** (mp.mpc(0, 1) * 5 * mp.pi / 2 * ab),
                     -a * mp.e ** (-mp.mpc(0, 1) * 2 * mp.pi * ab))}[sector]
        c1 = mp.e ** (mp.mpc(0, 1) * rot[0])
        c2 = mp.e ** (mp.mpc(0, 1) * rot[1])
        z1, z2 = c1 * z, c2 * z
        # second row is d/dxi of the first, so the rotation chain
        # factors c1, c2 multiply the Weber derivatives
        mid = mp.matrix([[D(ab, z1), D(-ab - 1, z2)],
                         [c1 * Dp(ab, z1), c2 * Dp(-ab - 1, z2)]])
        pre = mp.matrix([[1, 0], [-z / (2 * a), 1 / a]])
        dia = mp.matrix([[right[0], 0], [0, right[1]]])
        return pre * mid * dia, dps


def Dab_matrix(xi, pp: ParabolicParams, sector: int = None) -> np.ndarray:
    """The sector-glued matrix D_{a,b}(xi) as a numpy 2x2 array.

    Raises RangeError if the entries overflow double precision (the
    e^{xi^2/4} growth); use :func:`Dab_remainder` for large xi.
    """
    if sector is None:
        sector = _sector_of(xi)
    m, _ = _dab_sector_mp(xi, pp, sector)
    out = np.array([[complex(m[0, 0]), complex(m[0, 1])],
                    [complex(m[1, 0]), complex(m[1, 1])]])
    if not np.all(np.isfinite(out)):
        raise RangeError(f"D_ab entries overflow at xi = {xi}")
    return out


def Dab_remainder(xi, pp: ParabolicParams, sector: int = None) -> np.ndarray:
    """Scaled remainder D_{a,b}(xi) e^{-xi^2/4 sigma3} xi^{-ab sigma3},
    bounded as xi -> infinity; evaluated entirely in extended precision
    so the e^{xi^2/4} factors cancel before rounding."""
    if sector is None:
        sector = _sector_of(xi)
    m, dps = _dab_sector_mp(xi, pp, sector)
    with mp.workdps(dps):
        z = mp.mpmathify(complex(xi))
        ab = mp.mpc(0, 1) * pp.nu
        # branch of xi^{-ab}: log with arg folded into (pi/4, 9 pi/4)
        ang = mp.arg(z)
        if ang <= mp.pi / 4:
            ang += 2 * mp.pi
        logz = mp.log(abs(z)) + mp.mpc(0, 1) * ang
        d1 = mp.e ** (-z * z / 4 - ab * logz)
        d2 = mp.e ** (z * z / 4 + ab * logz)
        out = mp.matrix([[m[0, 0] * d1, m[0, 1] * d2],
                         [m[1, 0] * d1, m[1, 1] * d2]])
        return np.array([[complex(out[0, 0]), complex(out[0, 1])],
                         [complex(out[1, 0]), complex(out[1, 1])]])


def dab_expansion(xi, pp: ParabolicParams, order: int = 2) -> np.ndarray:
    """Truncated large-xi form (1 + m1/xi + m2/xi^2) with
    m1 = [[0, -a], [b, 0]], m2 = diag(ab(ab-1)/2, -ab(ab+1)/2).

    The sign of the (2,2) entry is forced by det = 1 of the expansion
    (tr m2 = -ab, since tr m1^2 = -2ab) and confirmed numerically by
    the xi^{-3} decay of the remainder.
    """
    ab = 1j * pp.nu
    out = np.eye(2, dtype=complex)
    if order >= 1:
        out += np.array([[0.0, -pp.a], [pp.b, 0.0]]) / xi
    if order >= 2:
        out += np.array([[ab * (ab - 1) / 2, 0.0],
                         [0.0, -ab * (ab + 1) / 2]]) / xi ** 2
    return out


_RAYS = (np.pi / 4, np.pi / 2, np.pi, 3 * np.pi / 2, 2 * np.pi)


def ray_jump(ray_index: int, radius: float,
             pp: ParabolicParams) -> np.ndarray:
    """Jump J = D_minus^{-1} D_plus across the ray arg xi = _RAYS[i],
    where minus/plus are the sectors below/above the ray in arg (the
    ray pi/4 connects sector 5 back to sector 1 via the 2 pi fold)."""
    ang = _RAYS[ray_index]
    xi = radius * np.exp(1j * ang)
    if ray_index == 0:
        s_minus, s_plus = 5, 1
    else:
        s_minus, s_plus = ray_index, ray_index + 1
    m_minus, dps1 = _dab_sector_mp(xi, pp, s_minus)
    m_plus, dps2 = _dab_sector_mp(xi, pp, s_plus)
    with mp.workdps(max(dps1, dps2)):
        det = m_minus[0, 0] * m_minus[1, 1] - m_minus[0, 1] * m_minus[1, 0]
        inv = mp.matrix([[m_minus[1, 1] / det, -m_minus[0, 1] / det],
                         [-m_minus[1, 0] / det, m_minus[0, 0] / det]])
        j = inv * m_plus
        return np.array([[complex(j[0, 0]), complex(j[0, 1])],
                         [complex(j[1, 0]), complex(j[1, 1])]])


def xi_map(lam, t: float, kappa: float, lambda0: float, phi0: float,
           params: AnisotropyParams, tol: Tolerances = DEFAULT):
    """Conformal coordinate xi = sqrt(4 i t (p(lambda0) - p(lam))) with
    the branch fixed by xi ~ gamma sqrt(t) (lam - lambda0),
    gamma = e^{i pi/4} sqrt(2 phi0); invariant under lam -> lam + 2K."""
    lam = np.asarray(lam, dtype=complex)
    p0 = np.real(p(np.complex128(lambda0), kappa, params, tol))
    val = np.sqrt(4j * t * (p0 - p(lam, kappa, params, tol)))
    gamma = np.exp(1j * np.pi / 4.0) * np.sqrt(2.0 * phi0)
    lin = gamma * np.sqrt(t) * (lam - lambda0)
    flip = np.real(val * np.conj(lin)) < 0.0
    return np.where(flip, -val, val) if val.ndim else (
        -val if flip else val)


def xi_tilde(lam, t: float, kappa: float, lambda0: float, phi0: float,
             params: AnisotropyParams, tol: Tolerances = DEFAULT):
    """Shifted coordinate xi(lam + 2iK') for the upper pair of discs."""
    return xi_map(np.asarray(lam, dtype=complex) + 2j * params.Kprime,
                  t, kappa, lambda0, phi0, params, tol)


def local_parametrix(lam, t: float, r_func, inputs,
                     tol: Tolerances = DEFAULT) -> np.ndarray:
    """Local model near the four translates of lambda0:

    alpha^{sigma3} xi^{-i nu sigma3} D_{a,b}(xi) e^{-xi^2/4 sigma3},

    conjugated by sigma3 / sigma1 / sigma2 in the 2K / 2iK' / 2K+2iK'
    discs. `inputs` is an AsymptoticInputs instance.
    """
    from .asymptotics import alpha_global

    lam = complex(lam)
    params = inputs.params
    K, Kp = params.K, params.Kprime
    lam0 = inputs.lambda0
    centers = (lam0, lam0 + 2 * K, lam0 + 2j * Kp, lam0 + 2 * K + 2j * Kp)
    dists = [abs(lam - c) for c in centers]
    disc = int(np.argmin(dists))
    if dists[disc] > 0.5 * min(K, Kp):
        raise DomainError(f"{lam} is not near any stationary-point disc")
    pp = ParabolicParams.from_scattering(inputs.r0, inputs.nu,
                                         inputs.p0, t)
    if disc < 2:
        xi = complex(xi_map(lam, t, inputs.kappa, lam0, inputs.phi0,
                            params, tol))
        al = alpha_global(lam, r_func, lam0, params, tol=tol)
    else:
        xi = complex(xi_tilde(lam, t, inputs.kappa, lam0, inputs.phi0,
                              params, tol))
        al = alpha_global(lam + 2j * Kp if disc == 2
                          else lam + 2 * K + 2j * Kp,
                          r_func, lam0, params, tol=tol)
    rem = Dab_remainder(xi, pp)
    ang = float(np.angle(xi))
    if ang <= np.pi / 4.0:
        ang += 2.0 * np.pi
    xi_ab = np.exp(1j * inputs.nu * (np.log(abs(xi)) + 1j * ang))
    # D e^{-xi^2/4 s3} = rem xi^{ab s3}; the xi^{-i nu s3} prefactor
    # then conjugates the remainder since ab = i nu
    core = (np.diag([al / xi_ab, xi_ab / al]) @ rem
            @ np.diag([xi_ab, 1.0 / xi_ab]))
    if disc == 1:
        core = SIGMA3 @ core @ SIGMA3
    elif disc == 2:
        core = SIGMA1 @ core @ SIGMA1
    elif disc == 3:
        core = SIGMA2 @ core @ SIGMA2
    return core
