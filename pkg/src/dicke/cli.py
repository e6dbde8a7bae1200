"""Command-line interface.

One executable with subcommands for simulation, analytic curves, equilibrium
census, branch/orbit continuation, chaos diagnostics, basins, phase-diagram
sweeps and figure-style reproduction recipes.  Options come from a plain
``key = value`` config file and/or flags (flags win).  Exit status: 0 on
success, 1 on a validation error, 2 on a numerical failure (a diagnostics
file is written next to the outputs in that case).

All CSV values are written with 17 significant digits, so identical configs
produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback

import numpy as np

from . import basins as basins_mod
from . import chaos as chaos_mod
from . import continuation as cont_mod
from . import equilibria as eq_mod
from . import homoclinic as hom_mod
from . import integrate as int_mod
from . import phase as phase_mod
from .model import SystemParams

__all__ = ["main", "dispatch", "load_config", "ConfigInvalid"]

FMT = "%.17g"


class ConfigInvalid(ValueError):
    pass


def load_config(path) -> dict:
    """Parse a plain ``key = value`` config file.

    Blank lines and ``#`` comments are ignored; values stay strings and are
    coerced where they are consumed.
    """
    out = {}
    with open(path) as fh:
        for i, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigInvalid(f"{path}:{i}: expected 'key = value'")
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def _params(opts) -> SystemParams:
    try:
        return SystemParams(
            float(opts["kappa"]), float(opts["omega"]), float(opts["omega0"]),
            float(opts["lambda_minus"]), float(opts["lambda_plus"]))
    except (KeyError, ValueError) as exc:
        raise ConfigInvalid(f"invalid or missing system parameters: {exc}")


def _collect(args) -> dict:
    opts = {
        "kappa": "1.0", "omega": "1.0", "omega0": "1.0",
        "lambda_minus": "1.0", "lambda_plus": "1.0",
        "tol": "1e-9",
    }
    if getattr(args, "config", None):
        opts.update(load_config(args.config))
    for key in ("kappa", "omega", "omega0", "lambda_minus", "lambda_plus",
                "tol", "out", "t_final", "seed", "n", "grid", "lp_range",
                "lm_range", "t_span"):
        v = getattr(args, key, None)
        if v is not None:
            opts[key] = str(v)
    return opts


def _outdir(opts) -> str:
    d = os.environ.get("DICKE_OUT_ROOT", "")
    out = opts.get("out", ".")
    path = os.path.join(d, out) if d else out
    os.makedirs(path, exist_ok=True)
    return path


def _seed_state(opts) -> np.ndarray:
    raw = opts.get("seed", "0.001,0.001,0.001,0.4999")
    vals = [float(v) for v in raw.split(",")]
    if len(vals) != 4:
        raise ConfigInvalid("seed must be 'a1,a2,b1(or x),gamma(or y)' reals")
    return np.array(vals)


def _write_rows(path, header, rows):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(
                v if isinstance(v, str) else FMT % v for v in row) + "\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args):
    opts = _collect(args)
    p = _params(opts)
    out = _outdir(opts)
    T = float(opts.get("t_final", "200"))
    y0 = _seed_state(opts)
    full = np.array([y0[0], y0[1], y0[2], y0[2], y0[3]])
    # seed convention: a1, a2, b (both spin components), gamma
    traj = int_mod.integrate_bloch(p, full, T, tol=float(opts["tol"]))
    traj.write_csv(os.path.join(out, "trajectory.csv"))
    return 0


def cmd_curves(args):
    opts = _collect(args)
    p = _params(opts)
    out = _outdir(opts)
    lms = np.linspace(0.0, float(opts.get("lm_max", "4")), 401)
    rows_p, rows_f, rows_sn = [], [], []
    s_lo, s_hi = eq_mod.saddle_node_slopes(p)
    for lm in lms:
        for lp in eq_mod.pitchfork_curve(lm, p):
            rows_p.append((lm, lp))
        rows_f.append((lm, eq_mod.pole_flip_lambda_plus(lm, p)))
        rows_sn.append((lm, s_lo * lm, s_hi * lm))
    _write_rows(os.path.join(out, "curve_pitchfork.csv"), "lm,lp", rows_p)
    _write_rows(os.path.join(out, "curve_pole_flip.csv"), "lm,lp", rows_f)
    _write_rows(os.path.join(out, "curve_saddle_node.csv"),
                "lm,lp_low,lp_high", rows_sn)
    pts = {
        "PSN": eq_mod.psn_points(p),
        "FP": eq_mod.fp_points(p),
        "lambda_star": eq_mod.balanced_critical_coupling(p),
        "omega0_star": eq_mod.critical_omega0(p),
    }
    with open(os.path.join(out, "points.json"), "w") as fh:
        json.dump(pts, fh, indent=2, sort_keys=True)
    return 0


def cmd_equilibria(args):
    opts = _collect(args)
    p = _params(opts)
    out = _outdir(opts)
    rows = []
    for rec in eq_mod.find_equilibria(p):
        rows.append((rec.label, rec.chart, *rec.state, *rec.sphere,
                     rec.unstable_count,
                     FMT % rec.eigenvalues[0].real))
    _write_rows(os.path.join(out, "equilibria.csv"),
                "label,chart,s0,s1,s2,s3,b1,b2,gamma,unstable,max_re", rows)
    return 0


def cmd_branch(args):
    opts = _collect(args)
    p = _params(opts)
    out = _outdir(opts)
    lo, hi = (float(v) for v in opts.get("lp_range", "0,3").split(","))
    state0 = np.zeros(4) if opts.get("branch", "origin") == "origin" else \
        eq_mod.find_equilibria(p)[2].state
    br = cont_mod.continue_equilibrium(p, state0, (lo, hi))
    br.write_csv(os.path.join(out, "branch.csv"))
    return 0


def cmd_orbit(args):
    opts = _collect(args)
    p = _params(opts)
    out = _outdir(opts)
    orb = cont_mod.orbit_from_attractor(p, _seed_state(opts),
                                        tol=float(opts["tol"]))
    rows = [(p.lambda_minus, p.lambda_plus, orb.period,
             *orb.state, *np.abs(orb.multipliers))]
    _write_rows(os.path.join(out, "orbit.csv"),
                "lm,lp,T,s0,s1,s2,s3,m1,m2,m3,m4", rows)
    orb.trajectory().write_csv(os.path.join(out, "orbit_trajectory.csv"))
    return 0


def cmd_lyapunov(args):
    opts = _collect(args)
    p = _params(opts)
    out = _outdir(opts)
    T = float(opts.get("t_final", "2000"))
    spec = chaos_mod.lyapunov_spectrum(p, _seed_state(opts), T=T,
                                       tol=float(opts["tol"]))
    _write_rows(os.path.join(out, "lyapunov.csv"),
                "l1,l2,l3,l4", [tuple(spec)])
    return 0


def cmd_spectrum(args):
    opts = _collect(args)
    p = _params(opts)
    out = _outdir(opts)
    T = float(opts.get("t_final", "500"))
    y = int_mod.flow(p, _seed_state(opts), int_mod.DEFAULT_TRANSIENT)
    traj = int_mod.integrate(p, y, (0.0, T), tol=float(opts["tol"]))
    freq, mag = chaos_mod.power_spectrum(traj)
    _write_rows(os.path.join(out, "spectrum.csv"), "freq,log10_mag",
                zip(freq, mag))
    return 0


def cmd_basins(args):
    opts = _collect(args)
    p = _params(opts)
    out = _outdir(opts)
    n = int(opts.get("n", "256"))
    bm = basins_mod.basin_map(p, n=n)
    bm.write_csv(os.path.join(out, "basins.csv"))
    with open(os.path.join(out, "fractions.json"), "w") as fh:
        json.dump(basins_mod.basin_fractions(bm), fh, indent=2, sort_keys=True)
    return 0


def cmd_sweep(args):
    opts = _collect(args)
    p = _params(opts)
    out = _outdir(opts)
    n = int(opts.get("grid", "40"))
    lms = np.linspace(0.05, 4.0, n)
    lps = np.linspace(0.05, 4.0, n)
    path = os.path.join(out, "regions.csv")
    with open(path, "w") as fh:
        fh.write("lm,lp,label\n")

        def checkpoint(lm, row):
            for (l, lp), lab in sorted(row.items()):
                fh.write((FMT % l) + "," + (FMT % lp) + "," + lab + "\n")
            fh.flush()

        phase_mod.sweep(p, lms, lps, checkpoint=checkpoint)
    cmd_curves(args)
    return 0


def cmd_repro(args):
    opts = _collect(args)
    name = args.recipe
    if name == "fig11":
        # parameters for that figure are under-specified; the nearest fully
        # specified scenario is the fig13 sequence
        name = "fig13"
    if name not in REPRO:
        raise ConfigInvalid(
            f"unknown recipe {args.recipe!r}; have {sorted(REPRO)}")
    opts.setdefault("out", name)
    return REPRO[name](opts)


# ---------------------------------------------------------------------------
# repro recipes: every fully parameter-specified scenario


def _repro_traj(opts, lm, lp, T, tag):
    p = SystemParams(1.0, 1.0, 1.0, lm, lp)
    out = _outdir(opts)
    y0 = np.array([0.001, 0.001, 0.001, 0.001, 0.4999])
    traj = int_mod.integrate_bloch(p, y0, T)
    traj.write_csv(os.path.join(out, f"{tag}.csv"))
    return 0


def _repro_fig2(opts):
    _repro_traj(opts, 0.4, 0.4, 200.0, "fig2a_normal")
    _repro_traj(opts, 1.0, 1.0, 500.0, "fig2b_superradiant")
    _repro_traj(opts, 1.0, 1.45, 500.0, "fig2c_oscillatory")
    return 0


def _repro_fig4(opts):
    p = SystemParams(1.0, 1.0, 1.0, 2.0, 0.9)
    bm = basins_mod.basin_map(p, n=int(opts.get("n", "256")))
    out = _outdir(opts)
    bm.write_csv(os.path.join(out, "fig4_basins.csv"))
    with open(os.path.join(out, "fig4_fractions.json"), "w") as fh:
        json.dump(basins_mod.basin_fractions(bm), fh, indent=2, sort_keys=True)
    return 0


def _repro_fig5(opts):
    p = SystemParams(1.0, 1.0, 1.0, 1.0, 0.0)
    lam_h = cont_mod.hopf_lambda_plus(1.0, p, (1.2, 1.4))
    out = _outdir(opts)
    _write_rows(os.path.join(out, "fig5_hopf.csv"), "lm,lp_hopf",
                [(1.0, lam_h)])
    return 0


def _repro_fig8(opts):
    out = _outdir(opts)
    rows = []
    for lp in (1.67, 2.13, 2.225):
        p = SystemParams(1.0, 1.0, 1.0, 1.5, lp)
        rep = chaos_mod.classify_attractor(
            p, np.array([0.001, 0.001, 10.0, 10.0]))
        rows.append((1.5, lp, rep.kind, rep.lyapunov_max))
    _write_rows(os.path.join(out, "fig8_regimes.csv"),
                "lm,lp,kind,lyapunov_max", rows)
    return 0


def _repro_fig10(opts):
    out = _outdir(opts)
    rows = []
    seed = np.array([-2.0, 1.0, -0.5, 0.5])
    for lm, bracket, side in ((5.75, (7.055, 7.073), -1.0),
                              (5.01, (6.176, 6.183), -1.0)):
        base = SystemParams(1.0, 1.0, 1.0, lm, bracket[0])
        lp, gap = hom_mod.tune_homoclinic(base, bracket, seed, side=side,
                                          t_max=60.0, n_scan=4, xtol=1e-7)
        h = hom_mod.homoclinic_approximation(base, lp, seed, side=side,
                                             T_target=300.0, t_max=60.0)
        rows.append((lm, lp, h.loop_count, h.period, h.miss_distance))
        _write_rows(os.path.join(out, f"fig10_hom_lm{lm}.csv"),
                    "t,a1,a2,x,y",
                    [(t, *s) for t, s in zip(h.times, h.states)])
    _write_rows(os.path.join(out, "fig10_summary.csv"),
                "lm,lp,loops,period,miss", rows)
    return 0


def _repro_fig12(opts):
    ns = argparse.Namespace(config=None, grid=opts.get("grid", "40"),
                            out=opts["out"])
    for key in ("kappa", "omega", "omega0", "lambda_minus", "lambda_plus",
                "tol", "t_final", "seed", "n", "lp_range", "lm_range",
                "t_span"):
        setattr(ns, key, None)
    return cmd_sweep(ns)


def _repro_fig13(opts):
    out = _outdir(opts)
    rows = []
    for lp in (1.61, 1.627, 1.63, 1.78, 4.0 / np.sqrt(5.0)):
        p = SystemParams(1.0, 1.0, 1.0, 0.8, lp)
        d = hom_mod.origin_return_distance(p)
        rep = chaos_mod.classify_attractor(
            p, np.array([0.001, 0.001, 10.0, 10.0]))
        rows.append((0.8, lp, d, rep.kind, rep.locality or ""))
    _write_rows(os.path.join(out, "fig13_manifold.csv"),
                "lm,lp,return_distance,kind,locality", rows)
    return 0


REPRO = {
    "fig2": _repro_fig2,
    "fig4": _repro_fig4,
    "fig5": _repro_fig5,
    "fig8": _repro_fig8,
    "fig10": _repro_fig10,
    "fig12": _repro_fig12,
    "fig13": _repro_fig13,
}


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dicke",
        description="semiclassical unbalanced open Dicke model toolkit")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    for key in ("kappa", "omega", "omega0", "lambda-minus", "lambda-plus",
                "tol", "t-final"):
        common.add_argument(f"--{key}", dest=key.replace("-", "_"),
                            type=float)
    common.add_argument("--seed", help="comma-separated initial state")
    common.add_argument("--out", help="output directory")
    common.add_argument("--n", type=int, help="grid size / point count")
    common.add_argument("--grid", type=int, help="sweep grid size per axis")
    common.add_argument("--lp-range", dest="lp_range",
                        help="lo,hi range in lambda_+")
    common.add_argument("--threads", type=int, default=1,
                        help="worker cap (modules are single-threaded)")
    handlers = {
        "simulate": cmd_simulate, "curves": cmd_curves,
        "equilibria": cmd_equilibria, "branch": cmd_branch,
        "orbit": cmd_orbit, "lyapunov": cmd_lyapunov,
        "spectrum": cmd_spectrum, "basins": cmd_basins, "sweep": cmd_sweep,
    }
    for name, fn in handlers.items():
        sp = sub.add_parser(name, parents=[common])
        sp.set_defaults(handler=fn)
    sp = sub.add_parser("repro", parents=[common])
    sp.add_argument("recipe", help="one of fig2,fig4,fig5,fig8,fig10,"
                                   "fig12,fig13 (fig11 maps to fig13)")
    sp.set_defaults(handler=cmd_repro)
    return ap


def dispatch(argv) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigInvalid, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (int_mod.IntegrationError, cont_mod.ShootingDivergence,
            cont_mod.CorrectorDivergence, eq_mod.NewtonDivergence,
            np.linalg.LinAlgError) as exc:
        out = getattr(args, "out", None) or "."
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "diagnostics.txt"), "w") as fh:
            fh.write(f"{type(exc).__name__}: {exc}\n")
            fh.write(traceback.format_exc())
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
