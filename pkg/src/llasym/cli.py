"""Experiment orchestration for the inverse-scattering toolkit.

Subcommands wire the pipeline scatter -> evolve -> rhp-solve ->
compare-with-asymptotics / compare-with-pde and emit CSV data plus JSON
summaries. All numeric output is formatted with %.17g so reruns with
identical configs are byte-identical; LLASYM_THREADS caps the BLAS
thread pools (it must be honored before numpy spins them up, hence the
deferred imports below).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import ConfigError, LlasymError

_TOP_KEYS = {"params", "reflection", "kappa", "t_list", "grid",
             "tolerances", "output"}
_PARAM_KEYS = {"k", "rho", "J"}
_REFLECTION_KEYS = {"type", "c", "s", "path", "n"}
_GRID_KEYS = {"n_base", "n_max", "ppw"}
_OUTPUT_KEYS = {"csv", "json"}


def _fail(kind: str, message: str, code: int = 2):
    json.dump({"error": {"type": kind, "message": message}},
              sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    raise SystemExit(code)


def _check_keys(d: dict, allowed: set, where: str):
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) {sorted(unknown)} in {where}; "
            f"allowed: {sorted(allowed)}")


def load_config(path: str) -> dict:
    """Parse and schema-validate an experiment config JSON file."""
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    _check_keys(cfg, _TOP_KEYS, "config root")
    if "params" in cfg:
        p = cfg["params"]
        _check_keys(p, _PARAM_KEYS, "params")
        if "J" in p and ("k" in p or "rho" in p):
            raise ConfigError("params: give either J or (k, rho), not both")
        if "J" in p and (not isinstance(p["J"], list) or len(p["J"]) != 3):
            raise ConfigError("params.J must be a list of three numbers")
    if "reflection" in cfg:
        refl = cfg["reflection"]
        _check_keys(refl, _REFLECTION_KEYS, "reflection")
        if refl.get("type") not in ("synthetic", "field"):
            raise ConfigError(
                "reflection.type must be 'synthetic' or 'field'")
        if refl["type"] == "field" and "path" not in refl:
            raise ConfigError("reflection of type 'field' needs a path")
    if "grid" in cfg:
        _check_keys(cfg["grid"], _GRID_KEYS, "grid")
    if "output" in cfg:
        _check_keys(cfg["output"], _OUTPUT_KEYS, "output")
    if "tolerances" in cfg:
        from .config import Tolerances
        fields = set(Tolerances.__dataclass_fields__)
        _check_keys(cfg["tolerances"], fields, "tolerances")
        for name, val in cfg["tolerances"].items():
            if not isinstance(val, (int, float)) or val <= 0:
                raise ConfigError(f"tolerances.{name} must be positive")
    if "t_list" in cfg:
        if (not isinstance(cfg["t_list"], list)
                or not all(isinstance(t, (int, float)) and t >= 0
                           for t in cfg["t_list"])):
            raise ConfigError("t_list must be a list of times >= 0")
    return cfg


def _params_of(cfg: dict):
    from .elliptic import AnisotropyParams
    p = cfg.get("params", {})
    if "J" in p:
        return AnisotropyParams.from_J(*map(float, p["J"]))
    return AnisotropyParams.from_modulus(float(p.get("k", 0.5)),
                                         float(p.get("rho", 1.0)))


def _tol_of(cfg: dict):
    from .config import DEFAULT
    return DEFAULT.with_(**cfg.get("tolerances", {}))


def _reflection_of(cfg: dict, params, tol):
    from .rhp import reflection_interpolant
    from .scattering import (SpinField, reflection, synthetic_reflection)
    refl = cfg.get("reflection", {"type": "synthetic", "c": 0.5, "s": 1.0})
    if refl["type"] == "synthetic":
        return synthetic_reflection(float(refl.get("c", 0.5)),
                                    float(refl.get("s", 1.0)), params, tol)
    field = SpinField.from_csv(refl["path"])
    data = reflection(field, params=params, n=int(refl.get("n", 64)),
                      tol=tol)
    return reflection_interpolant(data)


def _scatter_data(cfg: dict, params, tol):
    from .scattering import SpinField, reflection
    refl = cfg.get("reflection")
    if refl is None or refl.get("type") != "field":
        raise ConfigError("this subcommand needs reflection.type='field'")
    field = SpinField.from_csv(refl["path"])
    return reflection(field, params=params, n=int(refl.get("n", 64)),
                      tol=tol)


def _write_csv(path: str, header: str, rows):
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join("%.17g" % float(v) for v in row) + "\n")


def _write_json(path, obj):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _out_paths(cfg, args):
    out = cfg.get("output", {})
    return (getattr(args, "out", None) or out.get("csv"),
            out.get("json"))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_elliptic_check(args, cfg):
    import numpy as np

    from . import checks
    from .elliptic import AnisotropyParams
    rng = np.random.default_rng(args.seed)
    moduli = ([_params_of(cfg)] if "params" in cfg else
              [AnisotropyParams.from_modulus(k, 1.0)
               for k in (0.3, 0.5, 0.8)])
    tol = _tol_of(cfg)
    report = {}
    ok = True
    for params in moduli:
        res = checks.elliptic_residuals(params, rng, n=200, tol=tol)
        res.update(checks.kernel_residuals(params, tol=tol))
        for name, val in res.items():
            bound = 1e-7 if name.startswith("dw") else 1e-9
            ok = ok and val < bound
        report["k=%.17g" % params.k] = res
    _, json_path = _out_paths(cfg, args)
    _write_json(json_path, {"residuals": report, "pass": ok})
    return 0 if ok else 1


def cmd_stationary_point(args, cfg):
    from .spectral import find_lambda0
    sp = find_lambda0(args.kappa, _params_of(cfg), _tol_of(cfg))
    _, json_path = _out_paths(cfg, args)
    _write_json(json_path, {
        "kappa": sp.kappa, "lambda0": sp.lambda0, "p0": sp.p_at,
        "phi0": sp.phi0, "residual": sp.residual})
    return 0


def cmd_scatter(args, cfg):
    import numpy as np
    params, tol = _params_of(cfg), _tol_of(cfg)
    data = _scatter_data(cfg, params, tol)
    csv_path, json_path = _out_paths(cfg, args)
    if csv_path is None:
        raise ConfigError("scatter needs an output csv path")
    data.to_csv(csv_path)
    uni = float(np.max(np.abs(np.abs(data.a) ** 2
                              + np.abs(data.b) ** 2 - 1.0)))
    _write_json(json_path, {"nodes": int(data.lam.size),
                            "soliton_free": bool(data.soliton_free),
                            "unitarity_residual": uni})
    return 0


def cmd_evolve(args, cfg):
    from .scattering import evolve_scattering
    params, tol = _params_of(cfg), _tol_of(cfg)
    data = evolve_scattering(_scatter_data(cfg, params, tol), args.t, tol)
    csv_path, _ = _out_paths(cfg, args)
    if csv_path is None:
        raise ConfigError("evolve needs an output csv path")
    data.to_csv(csv_path)
    return 0


def _solve_ray(cfg, params, tol, r_func, t, kappa):
    import numpy as np

    from .rhp import solve_rhp
    grid = cfg.get("grid", {})
    sol = solve_rhp(r_func, kappa * t, t, params,
                    n_base=int(grid.get("n_base", 192)),
                    n_max=int(grid.get("n_max", 2000)),
                    ppw=float(grid.get("ppw", 10.0)), tol=tol)
    L = np.ravel(sol.L())
    mids = sol.contour.nodes[sol.contour.slices[0]].real
    mids = 0.5 * (mids[:-1:37] + mids[1::37])
    jump = max(sol.jump_residual(0, mids), sol.jump_residual(1, mids))
    Y0 = sol.Y(np.array([0.0 + 0.0j]))[0]
    det = abs(np.linalg.det(Y0) - 1.0)
    return L, det, jump


def cmd_rhp_solve(args, cfg):
    params, tol = _params_of(cfg), _tol_of(cfg)
    r_func = _reflection_of(cfg, params, tol)
    kappa = float(cfg.get("kappa", 1.0))
    rows = []
    for t in cfg.get("t_list", [25.0]):
        t = float(t)
        L, det, jump = _solve_ray(cfg, params, tol, r_func, t, kappa)
        rows.append((kappa * t, t, L[0], L[1], L[2], det, jump))
    csv_path, json_path = _out_paths(cfg, args)
    if csv_path is None:
        raise ConfigError("rhp-solve needs an output csv path")
    _write_csv(csv_path, "x,t,L1,L2,L3,det_residual,jump_residual", rows)
    _write_json(json_path, {
        "rows": len(rows),
        "max_det_residual": max(r[5] for r in rows),
        "max_jump_residual": max(r[6] for r in rows)})
    return 0


def cmd_asymptotics(args, cfg):
    from .asymptotics import asymptotics_table
    params, tol = _params_of(cfg), _tol_of(cfg)
    r_func = _reflection_of(cfg, params, tol)
    rows = asymptotics_table(r_func, float(cfg.get("kappa", 1.0)),
                             [float(t) for t in cfg.get("t_list", [25.0])],
                             params, tol)
    csv_path, _ = _out_paths(cfg, args)
    if csv_path is None:
        raise ConfigError("asymptotics needs an output csv path")
    _write_csv(csv_path,
               "t,x,L1,L2,L3,theta,nu,lambda0,phi0,c0_re,c0_im", rows)
    return 0


def cmd_parametrix_check(args, cfg):
    from . import checks
    res = checks.parametrix_residuals()
    ok = (res["ray_jump_constancy"] < 1e-8
          and res["ray_jump_det"] < 1e-10
          and res["cyclic_product"] < 1e-10
          and abs(res["doubling_ratio"] - 8.0) < 0.4 * 8.0)
    _, json_path = _out_paths(cfg, args)
    _write_json(json_path, {"residuals": res, "pass": ok})
    return 0 if ok else 1


def cmd_pde_run(args, cfg):
    import numpy as np

    from .pde import ll_evolve
    from .scattering import SpinField
    field = SpinField.from_csv(args.init)
    if args.dx is not None:
        x = np.arange(field.x[0], field.x[-1] + 0.5 * args.dx, args.dx)
        L = field.interp(x)
        L /= np.linalg.norm(L, axis=1, keepdims=True)
        field = SpinField(x=x, L=L)
    field.params = _params_of(cfg)
    times = sorted(float(t) for t in args.t.split(","))
    base, ext = os.path.splitext(args.out)
    summary = []
    t_now = 0.0
    for t in times:
        state = ll_evolve(field, t - t_now)
        field = state.field
        t_now = t
        path = "%s_t%.17g%s" % (base, t, ext)
        field.to_csv(path)
        summary.append({"t": t, "path": path,
                        "norm_residual": state.norm_residual,
                        "momentum_drift": state.momentum_drift})
    _write_json(cfg.get("output", {}).get("json"),
                {"checkpoints": summary})
    return 0


def cmd_compare(args, cfg):
    import numpy as np

    from .asymptotics import AsymptoticInputs, asymptotic_L
    params, tol = _params_of(cfg), _tol_of(cfg)
    r_func = _reflection_of(cfg, params, tol)
    kappa = float(cfg.get("kappa", 1.0))
    inputs = AsymptoticInputs.from_reflection(r_func, kappa, params,
                                              c0_conv_tol=1e-5, tol=tol)
    t_list = [float(t) for t in cfg.get("t_list", [25.0, 50.0, 100.0])]
    rows = []
    if args.mode == "rhp-vs-asymptotics":
        for t in t_list:
            L, _, _ = _solve_ray(cfg, params, tol, r_func, t, kappa)
            La = asymptotic_L(kappa * t, t, inputs, tol)
            res = np.abs(L - La)
            rows.append((t, kappa * t, L[0], L[1], L[2],
                         La[0], La[1], La[2], res[0], res[1], res[2]))
        header = ("t,x,L1_rhp,L2_rhp,L3_rhp,L1_asym,L2_asym,L3_asym,"
                  "res1,res2,res3")
    else:
        from .pde import ll_evolve
        from .rhp import solve_rhp
        from .scattering import SpinField
        t_pde = max(t_list)
        # reconstruct the t = 0 field on a coarse grid, spline to the
        # PDE grid, evolve, then compare on the ray window
        grid = cfg.get("grid", {})
        dx_recon = float(grid.get("ppw", 0.25))
        xr = np.arange(-25.0, 25.0 + 0.5 * dx_recon, dx_recon)
        Lr = np.empty((xr.size, 3))
        for i, xv in enumerate(xr):
            sol = solve_rhp(r_func, float(xv), 0.0, params,
                            n_base=int(grid.get("n_base", 256)),
                            n_max=int(grid.get("n_max", 1200)), tol=tol)
            Lr[i] = np.ravel(sol.L())
        dx = 0.05
        xp = np.arange(-80.0, kappa * t_pde + 60.0, dx)
        f0 = SpinField(x=xr, L=Lr)
        L0 = f0.interp(xp)
        L0 /= np.linalg.norm(L0, axis=1, keepdims=True)
        field = SpinField(x=xp, L=L0)
        field.params = params
        state = ll_evolve(field, t_pde)
        for xv in np.linspace(kappa * t_pde - 4.0, kappa * t_pde + 4.0, 9):
            inp = AsymptoticInputs.from_reflection(
                r_func, xv / t_pde, params, c0_conv_tol=1e-5, tol=tol)
            La = asymptotic_L(xv, t_pde, inp, tol)
            Lp = state.field.L[np.argmin(np.abs(xp - xv))]
            res = np.abs(Lp - La)
            rows.append((t_pde, xv, Lp[0], Lp[1], Lp[2],
                         La[0], La[1], La[2], res[0], res[1], res[2]))
        header = ("t,x,L1_pde,L2_pde,L3_pde,L1_asym,L2_asym,L3_asym,"
                  "res1,res2,res3")
    arr = np.array(rows)
    sup = float(np.max(arr[:, 8:11]))
    summary = {"mode": args.mode, "rows": len(rows), "sup_residual": sup}
    if args.mode == "rhp-vs-asymptotics" and len(t_list) >= 2:
        lt = np.log(arr[:, 0])
        lr = np.log(np.maximum(np.max(arr[:, 8:11], axis=1), 1e-16))
        summary["decay_fit_slope"] = float(np.polyfit(lt, lr, 1)[0])
        summary["amplitude_bound_ok"] = bool(np.all(
            np.max(arr[:, 8:11], axis=1)
            <= 0.5 * np.sqrt(2.0 * inputs.nu / (arr[:, 0] * inputs.phi0))))
    csv_path, json_path = _out_paths(cfg, args)
    if csv_path is None:
        raise ConfigError("compare needs an output csv path")
    _write_csv(csv_path, header, rows)
    _write_json(json_path, summary)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser():
    ap = argparse.ArgumentParser(
        prog="llasym",
        description="Landau-Lifshitz inverse scattering and large-time "
                    "asymptotics toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("--config", default=None,
                       help="experiment config JSON")
        p.add_argument("--out", default=None, help="output CSV path")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for randomized sampling of test points")
        p.set_defaults(fn=fn)
        return p

    add("elliptic-check", cmd_elliptic_check,
        help="identity residual suite for the elliptic layer")
    p = add("stationary-point", cmd_stationary_point,
            help="locate the stationary point of the phase on a ray")
    p.add_argument("--kappa", type=float, required=True)
    add("scatter", cmd_scatter,
        help="direct scattering of a spin-field CSV")
    p = add("evolve", cmd_evolve,
            help="time-evolve scattering data of a spin-field CSV")
    p.add_argument("--t", type=float, required=True)
    add("rhp-solve", cmd_rhp_solve,
        help="solve the inverse problem along a ray for each t")
    add("asymptotics", cmd_asymptotics,
        help="closed-form leading-order spin field along a ray")
    add("parametrix-check", cmd_parametrix_check,
        help="parabolic-cylinder sector-matrix residual suite")
    p = add("pde-run", cmd_pde_run,
            help="direct PDE integration with checkpoint CSVs")
    p.add_argument("--init", required=True, help="initial field CSV")
    p.add_argument("--t", required=True,
                   help="comma-separated checkpoint times")
    p.add_argument("--dx", type=float, default=None)
    p = add("compare", cmd_compare,
            help="residual table against the asymptotic formula")
    p.add_argument("--mode", required=True,
                   choices=("rhp-vs-asymptotics", "pde-vs-asymptotics"))
    return ap


def main(argv=None) -> int:
    threads = os.environ.get("LLASYM_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else {}
        return args.fn(args, cfg)
    except ConfigError as exc:
        _fail("ConfigError", str(exc), 2)
    except LlasymError as exc:
        _fail(type(exc).__name__, str(exc), 1)


if __name__ == "__main__":
    raise SystemExit(main())
