"""Riemann-Hilbert solver on the genus-1 spectral torus.

The inverse problem is posed on the two horizontal contours Gamma_1
(Im lam = 0, oriented left to right) and Gamma_2 (Im lam = 2K',
oriented right to left), with jump

    G = [[1+|r|^2, conj(r) e^{-2 i psi}], [r e^{2 i psi}, 1]],
    psi(mu) = x*w3(mu) - 2*t*w1(mu)*w2(mu),

so the static (t = 0) and time-dependent problems share one code path.
The normalized-at-iK' solution Phi is represented through the singular
integral equation for its minus boundary value chi,

    chi(lam) = I + (1/2 pi i) int chi (G - I) C(mu, lam - i0) dmu,

discretized by a Nystrom scheme on a smoothly graded periodic mesh:
the kernel singularity is removed by subtracting F(lam) C(mu, lam)
(F = chi (G - I)), whose exact signed loop integral over both closed
contours is the constant -i pi, and the removable diagonal limit F'(lam)
is taken with an 8th-order finite-difference stencil. The physical
solution Y follows by the four-fold Pauli symmetrization of Phi, and
the spin field from L_j sigma_j = Y(0) sigma3 Y(0)^{-1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import lu_factor, lu_solve

from .config import DEFAULT, Tolerances
from .elliptic import AnisotropyParams, cauchy_kernel, w_functions
from .errors import DomainError, RangeError, SolverError
from .pauli import ID2, SIGMA1, SIGMA2, SIGMA3, det2, inv2, pauli_decompose
from .scattering import ScatteringData, SpinField, reflection

__all__ = [
    "ContourSystem", "RHPSolution", "build_contours", "build_jump",
    "solve_sie", "solve_rhp", "solve_rhp_line", "reflection_interpolant",
    "reconstruct_L", "ist_roundtrip",
]

# 8th-order central first-derivative stencil, offsets -4..4
_FD_OFFSETS = np.arange(-4, 5)
_FD_COEFFS = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0,
                       4 / 5, -1 / 5, 4 / 105, -1 / 280])

def _smooth_bump(y):
    """C-infinity ramp: 0 for y <= 0, 1 for y >= 1."""
    y = np.clip(y, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f = np.where(y > 0.0, np.exp(-1.0 / np.maximum(y, 1e-300)), 0.0)
        g = np.where(y < 1.0, np.exp(-1.0 / np.maximum(1.0 - y, 1e-300)),
                     0.0)
    return f / (f + g)


@dataclass
class ContourSystem:
    """Graded quadrature mesh on Gamma_1 and Gamma_2.

    nodes/weights are concatenated over the two contours; weights are
    signed by orientation (+ on Gamma_1, - on Gamma_2) and sum, in
    absolute value, to the total contour length. taper multiplies G - I
    so the jump is switched off smoothly where the reflection amplitude
    is below the cut level.  Tapering solves a nearby problem whose
    phase differs from the untruncated one by an O(nu log) term tied
    to the kept window; see solve_rhp for the quantitative note.
    """

    params: AnisotropyParams
    nodes: np.ndarray
    weights: np.ndarray
    taper: np.ndarray
    slices: tuple                  # per-contour index slices
    fine_s: np.ndarray             # fine parameter grid (one period)
    fine_taper: tuple              # per-contour taper samples on fine_s
    mesh_descriptor: dict = dc_field(default_factory=dict)

    @property
    def n_total(self):
        return self.nodes.size

    def contour_of(self, i):
        return 0 if i < self.slices[0].stop else 1


def _phase_rate(s, x, t, params, tol):
    """|d psi / d mu| on a horizontal contour through real parameter s."""
    w1, w2, w3 = w_functions(s, params, tol)
    dpsi = (-x * w1 * w2 + 2.0 * t * w3 * (w1 * w1 + w2 * w2)) / params.rho
    return np.abs(dpsi)


def build_contours(params: AnisotropyParams, r_func, x: float, t: float,
                   n_base: int = 192, n_max: int = 2000,
                   ppw: float = 10.0, amp_cut_min: float = 1e-10,
                   fine: int = 8192,
                   tol: Tolerances = DEFAULT) -> ContourSystem:
    """Build the graded mesh for the jump induced by r at (x, t).

    Node density is the smooth combination of a base density and an
    oscillation density (ppw points per local wavelength of e^{2 i psi})
    restricted to the region where |G - I| exceeds an amplitude cut;
    the cut level is raised until each contour fits in n_max nodes.
    The dropped tail is switched off by a C-infinity taper, so the
    periodic trapezoid rule retains spectral accuracy.
    """
    K, Kp = params.K, params.Kprime
    period = 4.0 * K
    # cell-centered fine grid avoids the w-poles at 0, +-2K
    s_f = -2.0 * K + (np.arange(fine) + 0.5) * (period / fine)
    rate = 2.0 * _phase_rate(s_f, x, t, params, tol)

    nodes_all, weights_all, taper_all, fine_tapers = [], [], [], []
    desc = {"x": x, "t": t, "ppw": ppw}
    for ci, (imag, orient) in enumerate(((0.0, +1.0), (2.0 * Kp, -1.0))):
        lam_f = s_f + 1j * imag
        amp = np.abs(r_func(lam_f))
        amp = np.maximum(amp, 1e-300)
        dens_osc = (ppw / (2.0 * np.pi)) * rate
        base = n_base / period
        # stationary-phase importance: a unit length of contour where
        # the phase turns at rate `rate` contributes O(amp/rate) after
        # integration by parts, so rapidly oscillating stretches can be
        # tapered off even at O(1) amplitude while the stationary
        # windows (rate -> 0) are always kept
        imp = amp / (1.0 + rate)

        def total_nodes(cut):
            d = base + dens_osc * _smooth_bump(
                np.log(imp / (0.3 * cut)) / np.log(10.0))
            return np.sum(d) * (period / fine)

        cut = amp_cut_min
        if total_nodes(cut) > n_max:
            lo, hi = np.log(amp_cut_min), np.log(np.max(imp) + 1e-300)
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if total_nodes(np.exp(mid)) > n_max:
                    lo = mid
                else:
                    hi = mid
            cut = np.exp(hi)
        # C-infinity taper: 1 above 10*cut, 0 below cut (log ramp)
        tpr = _smooth_bump(np.log(imp / cut) / np.log(10.0))
        dens = base + dens_osc * _smooth_bump(
            np.log(imp / (0.3 * cut)) / np.log(10.0))
        # low-pass the density so the grading map stays smooth
        n_est = np.sum(dens) * (period / fine)
        sigma = 3.0 * period / max(n_est, 1.0)
        k = np.fft.fftfreq(fine, d=period / fine) * 2.0 * np.pi
        dens = np.real(np.fft.ifft(np.fft.fft(dens)
                                   * np.exp(-0.5 * (k * sigma) ** 2)))
        dens = np.maximum(dens, base)
        # hard budget clamp: smoothing may re-inflate the total
        tot = np.sum(dens) * (period / fine)
        if tot > 1.05 * n_max:
            dens = base + (dens - base) * ((n_max - n_base)
                                           / max(tot - n_base, 1e-300))
        # cumulative node measure along s_f, closed across the period
        cum = np.concatenate([[0.0], np.cumsum(
            0.5 * (dens[1:] + dens[:-1]) * (period / fine))])
        total = cum[-1] + 0.5 * (dens[-1] + dens[0]) * (period / fine)
        cum_ext = np.concatenate([cum, [total]])
        s_ext = np.concatenate([s_f, [s_f[0] + period]])
        n_c = int(np.round(total))
        targets = (np.arange(n_c) + 0.5) * (total / n_c)
        s_nodes = np.interp(targets, cum_ext, s_ext)
        s_nodes = ((s_nodes + 2.0 * K) % period) - 2.0 * K
        s_nodes = np.sort(s_nodes)
        d_nodes = np.interp(s_nodes, s_f, dens, period=period)
        w_nodes = orient * (total / n_c) / d_nodes
        t_nodes = np.interp(s_nodes, s_f, tpr, period=period)
        nodes_all.append(s_nodes + 1j * imag)
        weights_all.append(w_nodes)
        taper_all.append(t_nodes)
        fine_tapers.append(tpr)
        desc[f"contour{ci}"] = {"n": n_c, "cut": float(cut),
                                "max_amp": float(np.max(amp))}
    n1 = nodes_all[0].size
    n2 = nodes_all[1].size
    return ContourSystem(
        params=params,
        nodes=np.concatenate(nodes_all),
        weights=np.concatenate(weights_all),
        taper=np.concatenate(taper_all),
        slices=(slice(0, n1), slice(n1, n1 + n2)),
        fine_s=s_f,
        fine_taper=tuple(fine_tapers),
        mesh_descriptor=desc,
    )


def build_jump(contour: ContourSystem, r_func, x: float, t: float,
               tol: Tolerances = DEFAULT):
    """Jump matrices G at the mesh nodes; det G = 1 identically."""
    return _jump_at(contour.nodes, contour.params, r_func, x, t, tol)


def _jump_at(lam, params, r_func, x, t, tol):
    lam = np.asarray(lam, dtype=complex)
    w1, w2, w3 = w_functions(lam, params, tol)
    psi = x * w3 - 2.0 * t * w1 * w2
    if np.max(np.abs(np.imag(psi))) * 2.0 > 700.0:
        raise RangeError("oscillation exponent exceeds overflow guard; "
                         "contour appears mis-set (Im psi != 0)")
    r = r_func(lam)
    e = np.exp(2j * np.real(psi))
    G = np.empty(lam.shape + (2, 2), dtype=complex)
    G[..., 0, 0] = 1.0 + np.abs(r) ** 2
    G[..., 0, 1] = np.conj(r) / e
    G[..., 1, 0] = r * e
    G[..., 1, 1] = 1.0
    return G


def _kernel_factor(contour: ContourSystem, tol: Tolerances) -> np.ndarray:
    """Quadrature factor Kfac[j, i] of the Nystrom system; depends on
    the mesh only, so it can be shared across (x, t) on a fixed mesh."""
    n = contour.n_total
    nodes, w = contour.nodes, contour.weights
    C = cauchy_kernel(nodes[:, None], nodes[None, :], contour.params,
                      tol, check=False)
    np.fill_diagonal(C, 0.0)
    two_pi_i = 2j * np.pi
    Kfac = -(w[:, None] * C) / two_pi_i          # [j, i] for j != i
    S = np.sum(w[:, None] * C, axis=0)           # sum_j w_j C_ji
    diag_fac = 1.0 + S / two_pi_i
    idx = np.arange(n)
    Kfac[idx, idx] = diag_fac
    # derivative term: -(w_i/2 pi i) F'_i with F'_i from the stencil
    for sl in contour.slices:
        m = sl.stop - sl.start
        ii = np.arange(sl.start, sl.stop)
        sgn = np.sign(w[sl])
        for off, cf in zip(_FD_OFFSETS, _FD_COEFFS):
            if cf == 0.0:
                continue
            jj = sl.start + (ii - sl.start + off) % m
            Kfac[jj, ii] -= sgn * cf / two_pi_i
    return Kfac


def solve_sie(contour: ContourSystem, G: np.ndarray,
              tol: Tolerances = DEFAULT, Kfac: np.ndarray = None):
    """Solve the Nystrom-discretized singular integral equation.

    Returns (chi, info) with chi of shape (n, 2, 2); info reports the
    post-refinement linear residual and the small-norm gain
    ||chi - I|| / ||G - I||. A precomputed _kernel_factor may be passed
    to amortize the kernel assembly over many jumps on one mesh.
    """
    n = contour.n_total
    taper = contour.taper
    M = (G - ID2) * taper[:, None, None]

    if Kfac is None:
        Kfac = _kernel_factor(contour, tol)

    # A[(i,b),(j,a)] = delta + Kfac[j,i] * M[j,a,b], assembled in place
    A = np.empty((2 * n, 2 * n), dtype=complex)
    Av = A.reshape(n, 2, n, 2)
    np.multiply(Kfac.T[:, None, :, None],
                M.transpose(2, 0, 1)[None, :, :, :], out=Av)
    idx2 = np.arange(2 * n)
    A[idx2, idx2] += 1.0
    B = np.zeros((2 * n, 2), dtype=complex)
    B[0::2, 0] = 1.0
    B[1::2, 1] = 1.0

    def apply(X):
        """A @ X without the dense matrix (for refinement residuals)."""
        V = X.reshape(n, 2, -1)
        FM = np.einsum("jar,jab->jbr", V, M)
        out = V + np.einsum("ji,jbr->ibr", Kfac, FM)
        return out.reshape(2 * n, -1)

    try:
        lu = lu_factor(A, overwrite_a=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"SIE system factorization failed: {exc}")
    del A, Av
    X = lu_solve(lu, B)
    # one step of iterative refinement using the matrix-free residual
    R = B - apply(X)
    X = X + lu_solve(lu, R)
    resid = float(np.max(np.abs(B - apply(X))))
    if not np.isfinite(resid) or resid > 1e-6:
        raise SolverError(
            f"SIE refinement residual {resid:.3e} did not reach target")
    # X[(i, beta), row] = chi_i[row, beta]
    chi = np.empty((n, 2, 2), dtype=complex)
    chi[:, 0, :] = X[:, 0].reshape(n, 2)
    chi[:, 1, :] = X[:, 1].reshape(n, 2)
    gnorm = float(np.max(np.abs(M)))
    cnorm = float(np.max(np.abs(chi - ID2)))
    info = {
        "linear_residual": resid,
        "chi_minus_id": cnorm,
        "jump_minus_id": gnorm,
        "small_norm_gain": cnorm / gnorm if gnorm > 0 else 0.0,
    }
    return chi, info


@dataclass
class RHPSolution:
    """Solved RHP: boundary density plus evaluators for Phi, Y, L."""

    contour: ContourSystem
    r_func: object
    x: float
    t: float
    chi: np.ndarray
    G: np.ndarray
    info: dict
    tol: Tolerances = DEFAULT

    def __post_init__(self):
        self.F = self.chi @ ((self.G - ID2)
                             * self.contour.taper[:, None, None])
        self._interps = []
        for ci, sl in enumerate(self.contour.slices):
            s = self.contour.nodes[sl].real
            vals = self.chi[sl]
            per = 4.0 * self.contour.params.K
            s_ext = np.concatenate([s, [s[0] + per]])
            v_ext = np.concatenate([vals, vals[:1]], axis=0)
            self._interps.append(CubicSpline(
                s_ext, v_ext, axis=0, bc_type="periodic"))

    # -- interpolation helpers ------------------------------------------

    def _chi_at(self, ci, s):
        per = 4.0 * self.contour.params.K
        base = self.contour.nodes[self.contour.slices[ci]][0].real
        return self._interps[ci]((s - base) % per + base)

    def _taper_at(self, ci, s):
        per = 4.0 * self.contour.params.K
        return np.interp(s, self.contour.fine_s,
                         self.contour.fine_taper[ci], period=per)

    def _F_at(self, ci, s):
        imag = 0.0 if ci == 0 else 2.0 * self.contour.params.Kprime
        lam = np.asarray(s, dtype=float) + 1j * imag
        Gs = _jump_at(lam, self.contour.params, self.r_func,
                      self.x, self.t, self.tol)
        M = ((Gs - ID2)
             * np.asarray(self._taper_at(ci, s))[..., None, None])
        return self._chi_at(ci, s) @ M, ID2 + M

    # -- evaluators ------------------------------------------------------

    def _quad_off(self, lam):
        C = cauchy_kernel(self.contour.nodes[:, None],
                          np.atleast_1d(lam)[None, :],
                          self.contour.params, self.tol, check=False)
        acc = np.einsum("j,jab,jl->lab", self.contour.weights, self.F, C)
        return ID2 + acc / (2j * np.pi)

    def phi(self, lam):
        """Phi(lam) away from the contours (or where the jump is off).

        Enforces the evaluation floor dist > c/(1 + |w3|) unless the
        local jump is switched off by the taper.
        """
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        Kp = self.contour.params.Kprime
        y = np.imag(lam) % (4.0 * Kp)
        d0 = np.minimum(y, 4.0 * Kp - y)                  # dist to Gamma_1
        d2 = np.abs(y - 2.0 * Kp)                         # dist to Gamma_2
        params = self.contour.params
        from .elliptic import lattice_distance
        far = lattice_distance(lam, params.K, Kp) > self.tol.guard_radius
        floor = np.zeros(lam.shape)
        if np.any(far):
            _, _, w3 = w_functions(lam[far], params, self.tol)
            floor[far] = self.tol.eval_floor_scale / (1.0 + np.abs(w3))
        close = np.minimum(d0, d2) < floor
        if np.any(close):
            for lc, da, db in zip(lam[close], d0[close], d2[close]):
                ci = 0 if da <= db else 1
                if self._taper_at(ci, lc.real) > 1e-12:
                    raise DomainError(
                        f"evaluation point {lc} is within the contour "
                        f"standoff floor and the jump is active there")
        return self._quad_off(lam)

    def boundary_values(self, ci: int, s):
        """(Phi_plus, Phi_minus, G_eff) at contour points s (off-node
        ok); G_eff is the tapered jump the density actually solves.

        Phi_plus = I + Q, Phi_minus = Phi_plus - F with Q the
        singularity-subtracted quadrature using the exact PV constant.
        """
        s = np.atleast_1d(np.asarray(s, dtype=float))
        imag = 0.0 if ci == 0 else 2.0 * self.contour.params.Kprime
        lam = s + 1j * imag
        Fs, Gs = self._F_at(ci, s)
        C = cauchy_kernel(self.contour.nodes[:, None], lam[None, :],
                          self.contour.params, self.tol, check=False)
        wj = self.contour.weights
        # int (F - F(lam)) C dmu = PV int F C dmu - F(lam) * (-i pi),
        # so I + this quadrature is already the plus boundary value
        quad = np.einsum("j,jlab,jl->lab", wj,
                         self.F[:, None] - Fs[None, :], C) / (2j * np.pi)
        phi_plus = ID2 + quad
        return phi_plus, phi_plus - Fs, Gs

    def jump_residual(self, ci: int, s):
        """max |Phi_plus - Phi_minus G| at contour points s."""
        pp, pm, Gs = self.boundary_values(ci, s)
        return float(np.max(np.abs(pp - pm @ Gs)))

    def Y(self, lam):
        """Symmetrized, unimodular solution of the physical RHP."""
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        K, Kp = self.contour.params.K, self.contour.params.Kprime
        num = (self.phi(lam)
               + SIGMA3 @ self.phi(lam + 2 * K) @ SIGMA3
               + SIGMA1 @ self.phi(lam + 2j * Kp) @ SIGMA1
               + SIGMA2 @ self.phi(lam + 2 * K + 2j * Kp) @ SIGMA2)
        c = det2(num)
        if np.any(np.abs(c) < self.tol.c_floor):
            raise SolverError(
                f"symmetrization determinant |c| = "
                f"{np.min(np.abs(c)):.3e} below floor (Y blow-up point)")
        return num / np.sqrt(c)[..., None, None]

    def L(self):
        """Reconstructed spin vector (L1, L2, L3) at this (x, t)."""
        Y0 = self.Y(np.array([0.0 + 0.0j]))[0]
        return reconstruct_L(Y0, tol=self.tol)


def reconstruct_L(Y0: np.ndarray, tol: Tolerances = DEFAULT):
    """Spin components from sum L_j sigma_j = Y(0) sigma3 Y(0)^{-1}."""
    Q = Y0 @ SIGMA3 @ inv2(Y0, tol.det_floor)
    c0, c1, c2, c3 = pauli_decompose(Q)
    L = np.array([c1, c2, c3])
    im = float(np.max(np.abs(L.imag)))
    if im > 1e-6:
        raise SolverError(
            f"reconstructed spin has imaginary part {im:.3e}")
    L = L.real
    norm = float(np.sum(L ** 2))
    if abs(norm - 1.0) > 1e-6:
        raise SolverError(
            f"reconstructed spin norm^2 = {norm} deviates from 1")
    return L / np.sqrt(norm)


def reflection_interpolant(data: ScatteringData):
    """Periodic interpolant of r usable on both contours.

    Values on Gamma_1 come from the stored grid; Gamma_2 values use
    r(s + 2iK') = -conj r(s).
    """
    params = data.params
    per = 4.0 * params.K
    on_g1 = np.abs(data.lam.imag) < 1e-9
    s = data.lam[on_g1].real
    order = np.argsort(s)
    s, rv = s[order], data.r[on_g1][order]
    s_ext = np.concatenate([s, [s[0] + per]])
    r_ext = np.concatenate([rv, rv[:1]])
    spl = CubicSpline(s_ext, r_ext, bc_type="periodic")

    def r_func(lam):
        lam = np.asarray(lam, dtype=complex)
        base = s_ext[0]
        sv = (lam.real - base) % per + base
        y = lam.imag % (4.0 * params.Kprime)
        on_g2 = np.abs(y - 2.0 * params.Kprime) < 1e-9
        vals = np.where(on_g2, -np.conj(spl(sv)), spl(sv))
        return vals

    return r_func


def solve_rhp(r_func, x: float, t: float, params: AnisotropyParams,
              n_base: int = 192, n_max: int = 2000, ppw: float = 10.0,
              tol: Tolerances = DEFAULT) -> RHPSolution:
    """Build mesh + jump, solve the SIE, return the full solution.

    The taper confines the active jump to the stationary-phase windows
    the node budget can resolve.  Truncating the jump there perturbs
    the reconstructed phase by an O(nu log W) term (W the kept window;
    nu the dressing exponent at the stationary point), which at fixed
    budget drifts like -2 nu log t; widen n_max / lower ppw to push it
    down when nu is large.  For nu below ~0.01 the bias is within the
    leading-order error and the defaults are adequate.
    """
    contour = build_contours(params, r_func, x, t, n_base=n_base,
                             n_max=n_max, ppw=ppw, tol=tol)
    G = build_jump(contour, r_func, x, t, tol)
    chi, info = solve_sie(contour, G, tol)
    return RHPSolution(contour, r_func, x, t, chi, G, info, tol)


def solve_rhp_line(r_func, x_list, t: float, params: AnisotropyParams,
                   n_base: int = 256, n_max: int = 1200,
                   ppw: float = 10.0, tol: Tolerances = DEFAULT):
    """Reconstructed L at every x in x_list on one shared mesh.

    The mesh is graded for the largest |x| (the densest case), so the
    x-independent kernel factor is assembled once; only the jump and
    the LU solve are redone per x. Returns an (len(x_list), 3) array.
    """
    x_list = np.asarray(x_list, dtype=float)
    x_ref = float(np.max(np.abs(x_list)))
    contour = build_contours(params, r_func, x_ref, t, n_base=n_base,
                             n_max=n_max, ppw=ppw, tol=tol)
    Kfac = _kernel_factor(contour, tol)
    L = np.empty((x_list.size, 3))
    for i, xv in enumerate(x_list):
        G = build_jump(contour, r_func, float(xv), t, tol)
        chi, info = solve_sie(contour, G, tol, Kfac=Kfac)
        sol = RHPSolution(contour, r_func, float(xv), t, chi, G, info,
                          tol)
        L[i] = sol.L()
    return L


def ist_roundtrip(field: SpinField, params: AnisotropyParams = None,
                  n_scatter: int = 64, x_eval=None,
                  n_base: int = 256, n_max: int = 1200,
                  tol: Tolerances = DEFAULT):
    """Scattering -> r -> RHP(t=0) per x -> reconstructed SpinField."""
    data = reflection(field, params=params, n=n_scatter, tol=tol)
    r_func = reflection_interpolant(data)
    if x_eval is None:
        x_eval = field.x
    L = solve_rhp_line(r_func, x_eval, 0.0, data.params, n_base=n_base,
                       n_max=n_max, tol=tol)
    return SpinField(np.asarray(x_eval, dtype=float), L)
