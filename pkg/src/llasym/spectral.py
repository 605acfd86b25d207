"""Characteristic phase p(lam, kappa) and its stationary point.

The oscillatory factor of the jump matrices is e^{2 i t p} with
p(lam, kappa) = kappa*w3(lam) - 2*w1(lam)*w2(lam),  kappa = x/t.
On the real interval (-2K, 0) the ratio W = w3*(w1^2+w2^2)/(w1*w2)
decreases monotonically from +inf to -inf, so dp = 0 has exactly one
real root lambda0 there; the curvature phi0 = -p''(lambda0) is positive.
The other stationary points are the 2K / 2iK' translates of lambda0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .elliptic import AnisotropyParams, w_functions
from .errors import ConsistencyError, RangeError

__all__ = [
    "p", "dp_dlambda", "d2p_dlambda2", "StationaryPointResult",
    "find_lambda0", "phi0", "im_p_sign_chart", "kappa_safe_window",
]


def p(lam, kappa: float, params: AnisotropyParams,
      tol: Tolerances = DEFAULT):
    """Phase p(lam, kappa) = kappa*w3 - 2*w1*w2.

    Satisfies p(lam+2K) = p(lam) and p(lam+2iK') = -p(lam); real for
    real lam.
    """
    w1, w2, w3 = w_functions(lam, params, tol)
    return kappa * w3 - 2.0 * w1 * w2


def dp_dlambda(lam, kappa: float, params: AnisotropyParams,
               tol: Tolerances = DEFAULT):
    """d p / d lam = (1/rho)(2*w3*(w1^2 + w2^2) - kappa*w1*w2)."""
    w1, w2, w3 = w_functions(lam, params, tol)
    return (2.0 * w3 * (w1 * w1 + w2 * w2) - kappa * w1 * w2) / params.rho


def d2p_dlambda2(lam, kappa: float, params: AnisotropyParams,
                 tol: Tolerances = DEFAULT):
    """d^2 p / d lam^2 in closed form via the w-derivative relations."""
    w1, w2, w3 = w_functions(lam, params, tol)
    s = w1 * w1 + w2 * w2
    return (kappa * w3 * s - 2.0 * w1 * w2 * s
            - 8.0 * w1 * w2 * w3 * w3) / params.rho ** 2


@dataclass(frozen=True)
class StationaryPointResult:
    """Unique real stationary point of the phase on (-2K, 0).

    Attributes
    ----------
    lambda0 : float
        Root of dp/dlam in (-2K, 0).
    p_at : float
        p(lambda0, kappa).
    phi0 : float
        Curvature -p''(lambda0), positive.
    residual : float
        |dp/dlam| at the returned root.
    kappa : float
        The ray slope x/t the root belongs to.
    """

    lambda0: float
    p_at: float
    phi0: float
    residual: float
    kappa: float


def find_lambda0(kappa: float, params: AnisotropyParams,
                 tol: Tolerances = DEFAULT) -> StationaryPointResult:
    """Locate the unique stationary point lambda0 in (-2K, 0).

    Bisection on the sign of dp over [-2K+delta, -delta] with
    delta = 1e-6*K (dp has a third-order pole at 0, so bisection is
    pole-safe), followed by two Newton polish steps.

    Raises
    ------
    RangeError
        If the root is pushed against either endpoint of the bracket
        (kappa outside the safe window).
    """
    K = params.K
    delta = 1e-6 * K
    lo, hi = -2.0 * K + delta, -delta

    def g(lam):
        return float(np.real(dp_dlambda(lam, kappa, params, tol)))

    glo, ghi = g(lo), g(hi)
    if not (glo > 0.0 and ghi < 0.0):
        end = "-2K" if glo <= 0.0 else "0"
        raise RangeError(
            f"stationary point pushed against endpoint {end} for "
            f"kappa = {kappa}; no sign change on the guarded bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    for _ in range(2):
        root -= (float(np.real(dp_dlambda(root, kappa, params, tol)))
                 / float(np.real(d2p_dlambda2(root, kappa, params, tol))))
    if not (-2.0 * K + delta <= root <= -delta):
        raise RangeError(
            f"polished stationary point {root} left the guarded bracket "
            f"for kappa = {kappa}")
    curvature = phi0(root, kappa, params, tol)
    return StationaryPointResult(
        lambda0=float(root),
        p_at=float(np.real(p(root, kappa, params, tol))),
        phi0=curvature,
        residual=abs(float(np.real(dp_dlambda(root, kappa, params, tol)))),
        kappa=float(kappa),
    )


def phi0(lambda0: float, kappa: float, params: AnisotropyParams,
         tol: Tolerances = DEFAULT) -> float:
    """Curvature phi0 = -p''(lambda0, kappa); positive at the true root.

    phi0 = (1/rho^2)(8*w1*w2*w3^2 + (w1^2+w2^2)(2*w1*w2 - kappa*w3)).
    """
    val = float(np.real(-d2p_dlambda2(lambda0, kappa, params, tol)))
    if val <= 0.0:
        raise ConsistencyError(
            f"phi0 = {val} <= 0 at lambda0 = {lambda0}; not a valid "
            "stationary point of the oscillatory phase")
    return val


def im_p_sign_chart(re_grid, im_grid, kappa: float,
                    params: AnisotropyParams,
                    tol: Tolerances = DEFAULT) -> np.ndarray:
    """Sign of Im p on the rectangular grid re_grid x im_grid.

    Returns an integer array of shape (len(im_grid), len(re_grid)) with
    entries in {-1, 0, +1}; rows with Im lam = 0 are exactly zero. The
    chart is antisymmetric under lam -> lam + 2iK'.
    """
    re = np.asarray(re_grid, dtype=float)
    im = np.asarray(im_grid, dtype=float)
    lam = re[None, :] + 1j * im[:, None]
    from .elliptic import lattice_distance
    near_pole = (lattice_distance(lam, params.K, params.Kprime)
                 < 1e-6 * params.K)
    vals = np.zeros(lam.shape)
    ok = ~near_pole
    pv = p(lam[ok], kappa, params, tol)
    ip = np.imag(pv)
    # rows Im lam in 2K'Z have Im p = 0 analytically; kill the noise
    ip[np.abs(ip) < 1e-10 * (1.0 + np.abs(pv))] = 0.0
    vals[ok] = ip
    return np.sign(vals).astype(int)


def kappa_safe_window(params: AnisotropyParams,
                      kappa_grid=None,
                      margin: float = 1e-3,
                      tol: Tolerances = DEFAULT):
    """Empirical (m, M) window where lambda0 stays margin*2K away from
    both endpoints of (-2K, 0).

    Scans kappa_grid (default: logarithmic grid in [1e-2, 1e2]) and
    returns the widest contiguous sub-interval of safe values.
    """
    if kappa_grid is None:
        kappa_grid = np.geomspace(1e-2, 1e2, 200)
    safe = []
    K = params.K
    for kap in kappa_grid:
        try:
            res = find_lambda0(float(kap), params, tol)
        except (RangeError, ConsistencyError):
            safe.append(False)
            continue
        safe.append(min(res.lambda0 + 2.0 * K, -res.lambda0)
                    > margin * 2.0 * K)
    safe = np.asarray(safe)
    if not np.any(safe):
        raise RangeError("no safe kappa found on the scanned grid")
    idx = np.flatnonzero(safe)
    runs = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)
    best = max(runs, key=len)
    return float(kappa_grid[best[0]]), float(kappa_grid[best[-1]])
