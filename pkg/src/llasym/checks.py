"""Identity-residual suites shared by the CLI and the test battery.

Each function evaluates a family of exact identities at sampled points
and returns a {name: max_residual} dict; callers compare against their
own tolerances. All sampling is driven by a caller-supplied Generator
so reruns with the same seed are byte-identical.
"""

from __future__ import annotations

import numpy as np

from .config import DEFAULT, Tolerances
from .elliptic import (AnisotropyParams, cauchy_kernel, f_sum,
                       lattice_distance, lattice_of, w_derivatives,
                       w_functions)
from .spectral import find_lambda0

__all__ = [
    "sample_torus_points",
    "elliptic_residuals",
    "kernel_residuals",
    "parametrix_residuals",
]

# shift -> sign of (w1, w2, w3) under lam -> lam + shift
_W_SHIFT_SIGNS = {
    "2K": (-1.0, -1.0, 1.0),
    "2iKp": (1.0, -1.0, -1.0),
    "2K+2iKp": (-1.0, 1.0, -1.0),
}


def sample_torus_points(params: AnisotropyParams, rng: np.random.Generator,
                        n: int = 200, margin: float = 0.15) -> np.ndarray:
    """Random torus points keeping lattice_distance >= margin*min(K,K').

    The margin keeps every shifted copy lam + {2K, 2iK', 2K+2iK'} away
    from the w-poles as well, since the pole set is the half-period
    lattice itself.
    """
    keep = margin * min(params.K, params.Kprime)
    out = np.empty(n, dtype=complex)
    got = 0
    while got < n:
        z = (rng.uniform(-2 * params.K, 2 * params.K, size=2 * n)
             + 1j * rng.uniform(-2 * params.Kprime, 2 * params.Kprime,
                                size=2 * n))
        z = z[lattice_distance(z, params.K, params.Kprime) >= keep]
        take = min(z.size, n - got)
        out[got:got + take] = z[:take]
        got += take
    return out


def _shift_value(params: AnisotropyParams, tag: str) -> complex:
    return {"2K": 2.0 * params.K, "2iKp": 2j * params.Kprime,
            "2K+2iKp": 2.0 * params.K + 2j * params.Kprime}[tag]


def elliptic_residuals(params: AnisotropyParams, rng: np.random.Generator,
                       n: int = 200, fd_step: float = 4e-4,
                       tol: Tolerances = DEFAULT) -> dict:
    """Max residuals of the w/zeta identity families at n random points.

    Families: the elliptic-curve relations, half-period sign symmetries,
    oddness, Schwarz reflection, derivative formulas vs 4th-order finite
    differences, the zeta representations of w1..w3 and their pairwise
    rewritings, the zeta half-period sum rule, and double periodicity of
    the Cauchy kernel in both arguments.
    """
    lam = sample_torus_points(params, rng, n)
    rho, k = params.rho, params.k
    lat = lattice_of(params)
    w1, w2, w3 = w_functions(lam, params, tol)
    out = {}

    out["curve_w1w3"] = float(np.max(np.abs(w1 * w1 - w3 * w3 - rho * rho)))
    out["curve_w1w2"] = float(np.max(np.abs(w1 * w1 - w2 * w2
                                            - rho * rho * k * k)))

    for tag, signs in _W_SHIFT_SIGNS.items():
        ws = w_functions(lam + _shift_value(params, tag), params, tol)
        res = max(float(np.max(np.abs(ws[j] - signs[j]
                                      * (w1, w2, w3)[j])))
                  for j in range(3))
        out[f"shift_{tag}"] = res

    wneg = w_functions(-lam, params, tol)
    out["odd"] = max(float(np.max(np.abs(wneg[j] + (w1, w2, w3)[j])))
                     for j in range(3))
    wconj = w_functions(np.conj(lam), params, tol)
    out["conjugation"] = max(
        float(np.max(np.abs(np.conj(wconj[j]) - (w1, w2, w3)[j])))
        for j in range(3))

    h = fd_step * params.K
    dw = w_derivatives(lam, params, tol)
    # 4th-order central difference, step shrunk where a pole is near
    wp = [w_functions(lam + s * h, params, tol) for s in (-2, -1, 1, 2)]
    for j, name in enumerate(("dw1", "dw2", "dw3")):
        fd = (wp[0][j] - 8.0 * wp[1][j] + 8.0 * wp[2][j]
              - wp[3][j]) / (12.0 * h)
        out[name] = float(np.max(np.abs(fd - dw[j])))

    z = lat.zeta
    z0 = lam
    zK = lam + 2.0 * params.K
    zKp = lam + 2j * params.Kprime
    zKKp = lam + 2.0 * params.K + 2j * params.Kprime
    c_2K = z(np.complex128(2.0 * params.K))
    c_2iKp = z(np.complex128(2j * params.Kprime))
    c_2K2iKp = z(np.complex128(2.0 * params.K + 2j * params.Kprime))
    out["zeta_halfperiod_sum"] = float(np.abs(c_2K + c_2iKp - c_2K2iKp))

    zl, zk, zp, zkp = z(z0), z(zK), z(zKp), z(zKKp)
    out["w1_zeta"] = float(np.max(np.abs(
        rho * (zl - zk - zkp + zp + c_2K + c_2K2iKp - c_2iKp) - w1)))
    out["w2_zeta"] = float(np.max(np.abs(
        rho * (zl - zk + zkp - zp + c_2K - c_2K2iKp + c_2iKp) - w2)))
    out["w3_zeta"] = float(np.max(np.abs(
        rho * (zl + zk - zkp - zp - c_2K + c_2K2iKp + c_2iKp) - w3)))
    out["pair_2K"] = float(np.max(np.abs(
        zl - zk + c_2K - (w1 + w2) / (2.0 * rho))))
    out["pair_2iKp"] = float(np.max(np.abs(
        zl - zp + c_2iKp - (w2 + w3) / (2.0 * rho))))
    out["pair_2K2iKp"] = float(np.max(np.abs(
        zl - zkp + c_2K2iKp - (w1 + w3) / (2.0 * rho))))

    m = min(64, n)
    mu, lam2 = lam[:m], np.roll(lam, 1)[:m]
    base = cauchy_kernel(mu, lam2, params, tol)
    out["kernel_period_mu"] = max(
        float(np.max(np.abs(cauchy_kernel(mu + 4.0 * params.K, lam2,
                                          params, tol) - base))),
        float(np.max(np.abs(cauchy_kernel(mu + 4j * params.Kprime, lam2,
                                          params, tol) - base))))
    out["kernel_period_lam"] = max(
        float(np.max(np.abs(cauchy_kernel(mu, lam2 + 4.0 * params.K,
                                          params, tol) - base))),
        float(np.max(np.abs(cauchy_kernel(mu, lam2 + 4j * params.Kprime,
                                          params, tol) - base))))
    return out


def kernel_residuals(params: AnisotropyParams, kappa: float = 1.0,
                     n_circle: int = 512,
                     tol: Tolerances = DEFAULT) -> dict:
    """Residue and f-identity residuals of the Cauchy kernel.

    The kernel in mu has a +1 residue at mu = lam and a -1 residue at
    mu = iK'; f(mu) built from the four kernel translates satisfies two
    alternating-sum identities at the stationary point of the ray
    x/t = kappa.
    """
    lam = 0.7 + 0.9j
    th = 2.0 * np.pi * (np.arange(n_circle) + 0.5) / n_circle
    circ = 0.15 * np.exp(1j * th)
    dmu = 1j * circ * (2.0 * np.pi / n_circle)

    def residue_at(center):
        vals = cauchy_kernel(center + circ, lam, params, tol)
        return complex(np.sum(vals * dmu) / (2j * np.pi))

    out = {
        "residue_at_lam": float(abs(residue_at(lam) - 1.0)),
        "residue_at_iKp": float(abs(residue_at(1j * params.Kprime) + 1.0)),
    }

    sp = find_lambda0(kappa, params, tol)
    l0 = np.complex128(sp.lambda0)
    f0 = f_sum(l0, params, tol)
    fK = f_sum(l0 + 2.0 * params.K, params, tol)
    fKp = f_sum(l0 + 2j * params.Kprime, params, tol)
    fKKp = f_sum(l0 + 2.0 * params.K + 2j * params.Kprime, params, tol)
    w1, w2, _ = w_functions(l0, params, tol)
    out["f_alternating_w1"] = float(np.abs(
        f0 - fK + fKp - fKKp - 4.0 * w1 / params.rho))
    out["f_alternating_w2"] = float(np.abs(
        f0 - fK - fKp + fKKp - 4.0 * w2 / params.rho))
    out["f_period"] = float(np.abs(
        f_sum(l0 + 4.0 * params.K, params, tol) - f0))
    return out


def parametrix_residuals(nu: float = 0.2, r0: complex = None,
                         xi_small: float = 15.0,
                         n_ray: int = 7) -> dict:
    """Ray-jump constancy, unit determinant, cyclic consistency, and
    the doubling ratio of the large-xi expansion remainder for the
    parabolic-cylinder sector matrix.

    The remainder after the xi^{-2} term decays like xi^{-3}, so
    doubling |xi| from xi_small must shrink it by ~8.
    """
    from .parametrix import (Dab_matrix, Dab_remainder, ParabolicParams,
                             dab_expansion, ray_jump)

    if r0 is None:
        r0 = np.sqrt(np.expm1(2.0 * np.pi * nu)) * np.exp(0.3j)
    pp = ParabolicParams.from_scattering(r0, nu, 0.0, 1.0)
    out = {}

    jump_dev = 0.0
    det_dev = 0.0
    radii = np.linspace(2.0, 6.0, n_ray)
    for ray in range(5):
        jumps = [ray_jump(ray, rad, pp) for rad in radii]
        ref = jumps[0]
        for J in jumps:
            jump_dev = max(jump_dev, float(np.max(np.abs(J - ref))))
            det_dev = max(det_dev, abs(np.linalg.det(J) - 1.0))
    out["ray_jump_constancy"] = jump_dev
    out["ray_jump_det"] = det_dev

    prod = np.eye(2, dtype=complex)
    for ray in range(5):
        prod = prod @ ray_jump(ray, 4.0, pp)
    out["cyclic_product"] = float(np.max(np.abs(prod - np.eye(2))))

    ang = 0.4 * np.pi

    def residual(scale):
        xi = scale * np.exp(1j * ang)
        return np.max(np.abs(Dab_remainder(xi, pp)
                             - dab_expansion(xi, pp, order=2)))

    out["doubling_ratio"] = float(residual(xi_small)
                                  / residual(2.0 * xi_small))

    xi = 3.3 * np.exp(0.7j * np.pi)
    out["matrix_finite"] = float(np.max(np.abs(Dab_matrix(xi, pp))))
    return out
