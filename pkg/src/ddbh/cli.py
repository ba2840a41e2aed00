"""Command-line interface.

Subcommands: meanfield, dynamics, modela, velocity, cavity, sweep, stats.
Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 completed but unconverged.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

import numpy as np

from .config import load_config, write_metadata
from .errors import ConfigError, DdbhError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_UNCONVERGED = 4


def _csv_open(path):
    fh = open(path, "w", newline="")
    fh.write("# schema=1\n")
    return fh, csv.writer(fh, lineterminator="\n")


def _meta_path(out):
    p = Path(out)
    return p.with_suffix(p.suffix + ".meta.json")


def _add_common(sub):
    sub.add_argument("--config", required=True, help="TOML run configuration")
    sub.add_argument("--seed", type=int, default=None, help="override [run] seed")
    sub.add_argument("--out", default=None, help="output CSV path")
    sub.add_argument("--out-dir", default=".", help="directory for default outputs")


def _resolve_out(args, default_name):
    return args.out if args.out else str(Path(args.out_dir) / default_name)


# ---------------------------------------------------------------- meanfield

def cmd_meanfield(args) -> int:
    from .meanfield import steady_state_roots
    from .params import critical_point

    cfg = load_config(args.config)
    p = cfg.model
    cp = critical_point(p)
    kmin = args.kappa_min if args.kappa_min is not None else 0.3 * cp.kappa_c
    kmax = args.kappa_max if args.kappa_max is not None else 1.5 * cp.kappa_c
    omin = args.omega_min if args.omega_min is not None else 0.3 * cp.omega_c
    omax = args.omega_max if args.omega_max is not None else 1.6 * cp.omega_c
    kappas = np.linspace(kmin, kmax, args.kappa_num or args.num)
    omegas = np.linspace(omin, omax, args.omega_num or args.num)
    out = _resolve_out(args, "meanfield.csv")
    t0 = time.time()
    fh, w = _csv_open(out)
    header = ["kappa", "omega"]
    for k in (1, 2, 3):
        header += [f"n_root_{k}", f"stable_{k}"]
    w.writerow(header)
    for kap in kappas:
        for om in omegas:
            branches = steady_state_roots(p.replace(kappa=float(kap), omega=float(om)))
            row = [repr(float(kap)), repr(float(om))]
            for k in range(3):
                if k < len(branches):
                    row += [repr(branches[k].density), int(branches[k].stable)]
                else:
                    row += ["", ""]
            w.writerow(row)
    fh.close()
    write_metadata(_meta_path(out), cfg.raw, seed=0,
                   timings={"wall_seconds": time.time() - t0},
                   extra={"kind": "meanfield"})
    print(f"wrote {out}")
    return EXIT_OK


# ----------------------------------------------------------------- dynamics

def cmd_dynamics(args) -> int:
    from . import sgpe
    from .meanfield import steady_state_roots

    cfg = load_config(args.config)
    p = cfg.model
    run = cfg.run
    seed = args.seed if args.seed is not None else run.seed
    config = sgpe.SgpeRunConfig(
        t_end=args.t_end if args.t_end is not None else run.t_end,
        dt=args.dt if args.dt is not None else run.dt,
        seed=seed,
        record_every=args.record_every if args.record_every is not None else run.record_every,
        noise_on=not args.no_noise and run.noise_on,
        burn_in=run.burn_in,
    )
    start = min(steady_state_roots(p), key=lambda b: b.density)
    field = np.full(cfg.shape, start.amplitude, dtype=complex)
    observers = {"mean_density": lambda f: float(np.mean(np.abs(f) ** 2))}
    if args.dump_field:
        observers["field"] = lambda f: f.ravel().copy()
    t0 = time.time()
    rec = sgpe.integrate(field, p, config, observers=observers)
    out = _resolve_out(args, "dynamics.csv")
    fh, w = _csv_open(out)
    header = ["t", "mean_density"]
    if args.dump_field:
        nsite = int(np.prod(cfg.shape))
        for j in range(nsite):
            header += [f"site_{j}_re", f"site_{j}_im"]
    w.writerow(header)
    for i, t in enumerate(rec.times):
        row = [repr(float(t)), repr(float(rec.observables["mean_density"][i]))]
        if args.dump_field:
            f = rec.observables["field"][i]
            for v in f:
                row += [repr(float(v.real)), repr(float(v.imag))]
        w.writerow(row)
    fh.close()
    write_metadata(_meta_path(out), cfg.raw, seed=seed,
                   timings={"wall_seconds": time.time() - t0},
                   extra={"kind": "dynamics", "dt": rec.dt,
                          "steps_total": rec.steps_total,
                          "shape": list(cfg.shape)})
    print(f"wrote {out}")
    return EXIT_OK


# ------------------------------------------------------------------- modela

def cmd_modela(args) -> int:
    from . import modela as ma

    cfg = load_config(args.config)
    p = ma.derive_modela_params(cfg.model)
    seed = args.seed if args.seed is not None else cfg.run.seed
    if args.two_site_check:
        ks1, ks2, n = ma.two_site_equilibrium_check(p.replace(dims=1), seed=seed)
        print(f"two-site equilibrium check: KS(sigma_1) = {ks1:.4f}, "
              f"KS(sigma_2) = {ks2:.4f} over {n} samples (threshold 0.02)")
        return EXIT_OK if max(ks1, ks2) < 0.02 else EXIT_NUMERICAL
    t_end = args.t_end if args.t_end is not None else cfg.run.t_end
    sigma = np.zeros(cfg.shape)
    t0 = time.time()
    rec = ma.integrate_modela(
        sigma, p, t_end=t_end, dt=args.dt, seed=seed,
        record_every=args.record_every if args.record_every is not None else cfg.run.record_every,
        noise_on=not args.no_noise)
    out = _resolve_out(args, "modela.csv")
    fh, w = _csv_open(out)
    w.writerow(["t", "sigma_mean"])
    for t, s in zip(rec.times, rec.sigma_mean):
        w.writerow([repr(float(t)), repr(float(s))])
    fh.close()
    write_metadata(_meta_path(out), cfg.raw, seed=seed,
                   timings={"wall_seconds": time.time() - t0},
                   extra={"kind": "modela", "dt": rec.dt,
                          "K": p.K, "r": p.r, "h": p.h, "g": p.g, "T_eff": p.T_eff})
    print(f"wrote {out}")
    return EXIT_OK


# ----------------------------------------------------------------- velocity

def cmd_velocity(args) -> int:
    from . import domainwall as dw
    from .params import from_ising_chart, to_ising_chart
    from .sgpe import SgpeRunConfig, default_dt

    cfg = load_config(args.config)
    base = cfg.model
    r = args.r
    h_list = [float(x) for x in args.h_list.split(",")] if args.h_list else []
    out = _resolve_out(args, "velocity.csv")
    t0 = time.time()
    fh, w = _csv_open(out)
    w.writerow(["r", "h", "v", "v_err", "v_analytic", "v_shooting"])
    for h in h_list:
        p = from_ising_chart(r, h, base)
        chart = to_ising_chart(p)
        dt = default_dt(p)
        run = SgpeRunConfig(t_end=args.t_end, dt=dt, noise_on=False,
                            record_every=max(1, int(round(args.t_end / dt / 400))),
                            burn_in=0.0)
        tr = dw.measure_velocity(p, run, L=args.L)
        va = dw.analytic_velocity(chart)
        vs = dw.shooting_velocity(chart)
        w.writerow([repr(r), repr(h), repr(tr.fit_velocity), repr(tr.fit_stderr),
                    repr(va), repr(vs)])
    zero = None
    if args.find_zero:
        zero = dw.zero_velocity_h(base, r, L=args.L, t_end=args.t_end)
        print(f"zero-velocity field: h* = {zero:.6g} (|h*|/|r| = {abs(zero/r):.4f})")
    fh.close()
    write_metadata(_meta_path(out), cfg.raw, seed=0,
                   timings={"wall_seconds": time.time() - t0},
                   extra={"kind": "velocity", "r": r, "h_star": zero})
    print(f"wrote {out}")
    return EXIT_OK


# ------------------------------------------------------------------- cavity

def cmd_cavity(args) -> int:
    from . import singlecavity as sc
    from .rng import generator_for

    cav = sc.CavityParams(delta=args.delta, U=args.U, kappa=args.kappa,
                          Omega=args.omega)
    out = _resolve_out(args, "cavity.csv")
    t0 = time.time()
    fh, w = _csv_open(out)
    if args.mode == "steady":
        res = sc.steady_state(cav, tol=args.tol)
        P = sc.photon_distribution(res.rho)
        w.writerow(["n", "P_n"])
        for n, pn in enumerate(P):
            w.writerow([n, repr(float(pn))])
        extra = {"kind": "cavity_steady", "dim": res.dim,
                 "mean_n": sc.mean_photon_number(res.rho)}
    else:
        tr = sc.mc_trajectory(cav, t_end=args.t_end, rng=generator_for(args.seed or 0),
                              record_every=args.record_every or 10)
        w.writerow(["t", "n_expect"])
        for t, n in zip(tr.times, tr.n_expect):
            w.writerow([repr(float(t)), repr(float(n))])
        extra = {"kind": "cavity_trajectory", "n_jumps": tr.n_jumps}
    fh.close()
    write_metadata(_meta_path(out), {"cavity": {"delta": args.delta, "U": args.U,
                                                "kappa": args.kappa, "Omega": args.omega}},
                   seed=args.seed or 0,
                   timings={"wall_seconds": time.time() - t0}, extra=extra)
    print(f"wrote {out}")
    return EXIT_OK


# -------------------------------------------------------------------- sweep

def cmd_sweep(args) -> int:
    from .sweep import run_sweep, table_to_csv

    cfg = load_config(args.config)
    if args.seed is not None and cfg.sweep is not None:
        cfg.sweep.base_seed = args.seed
    t0 = time.time()
    results = run_sweep(cfg, threads=args.threads)
    out = _resolve_out(args, "sweep.csv")
    with open(out, "w", newline="") as fh:
        fh.write(table_to_csv(cfg, results))
    write_metadata(_meta_path(out), cfg.raw,
                   seed=cfg.sweep.base_seed,
                   timings={"wall_seconds": time.time() - t0,
                            "cells": [
                                {"index": r.index, "wall_seconds": r.wall_seconds}
                                for r in results]},
                   extra={"kind": "sweep"})
    print(f"wrote {out}")
    if any(not r.converged for r in results):
        return EXIT_UNCONVERGED
    return EXIT_OK


# -------------------------------------------------------------------- stats

def cmd_stats(args) -> int:
    from . import stats as st

    rows = []
    with open(args.csv_path) as fh:
        first = fh.readline()
        if not first.startswith("#"):
            fh.seek(0)
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or args.column not in reader.fieldnames:
            raise ConfigError(
                f"column {args.column!r} not in {args.csv_path} "
                f"(have: {reader.fieldnames})")
        for row in reader:
            rows.append(float(row[args.column]))
    verdict = st.converged(np.array(rows), frac_tol=args.frac_tol)
    est = verdict.estimate
    print(f"n = {est.n_samples}")
    print(f"mean = {est.mean:.10g}")
    print(f"stderr = {est.stderr:.10g}")
    print(f"tau_int = {est.tau_int:.6g}")
    print(f"converged = {verdict.converged} (absolute_mode={verdict.absolute_mode})")
    return EXIT_OK if verdict.converged else EXIT_UNCONVERGED


# --------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ddbh",
                                 description="driven-dissipative Bose-Hubbard laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    mf = sub.add_parser("meanfield", help="bistability map on a (kappa, omega) grid")
    _add_common(mf)
    mf.add_argument("--kappa-min", type=float)
    mf.add_argument("--kappa-max", type=float)
    mf.add_argument("--omega-min", type=float)
    mf.add_argument("--omega-max", type=float)
    mf.add_argument("--num", type=int, default=40)
    mf.add_argument("--kappa-num", type=int, default=None)
    mf.add_argument("--omega-num", type=int, default=None)
    mf.set_defaults(func=cmd_meanfield)

    dyn = sub.add_parser("dynamics", help="one stochastic lattice trajectory")
    _add_common(dyn)
    dyn.add_argument("--dt", type=float)
    dyn.add_argument("--t-end", type=float)
    dyn.add_argument("--record-every", type=int)
    dyn.add_argument("--no-noise", action="store_true")
    dyn.add_argument("--dump-field", action="store_true")
    dyn.set_defaults(func=cmd_dynamics)

    ma = sub.add_parser("modela", help="reduced relaxational dynamics")
    _add_common(ma)
    ma.add_argument("--dt", type=float)
    ma.add_argument("--t-end", type=float)
    ma.add_argument("--record-every", type=int)
    ma.add_argument("--no-noise", action="store_true")
    ma.add_argument("--two-site-check", action="store_true",
                    help="run the two-site Boltzmann quadrature check")
    ma.set_defaults(func=cmd_modela)

    vel = sub.add_parser("velocity", help="domain-wall velocity scan")
    _add_common(vel)
    vel.add_argument("--r", type=float, required=True)
    vel.add_argument("--h-list", default="")
    vel.add_argument("--find-zero", action="store_true")
    vel.add_argument("--L", type=int, default=128)
    vel.add_argument("--t-end", type=float, default=600.0)
    vel.set_defaults(func=cmd_velocity)

    cav = sub.add_parser("cavity", help="exact single-cavity solver")
    cav.add_argument("--delta", type=float, default=1.0)
    cav.add_argument("--U", type=float, required=True)
    cav.add_argument("--kappa", type=float, required=True)
    cav.add_argument("--omega", type=float, required=True)
    cav.add_argument("--mode", choices=["steady", "trajectory"], default="steady")
    cav.add_argument("--t-end", type=float, default=500.0)
    cav.add_argument("--tol", type=float, default=1e-7)
    cav.add_argument("--record-every", type=int)
    cav.add_argument("--seed", type=int)
    cav.add_argument("--out")
    cav.add_argument("--out-dir", default=".")
    cav.set_defaults(func=cmd_cavity)

    sw = sub.add_parser("sweep", help="phase-diagram grid sweep")
    _add_common(sw)
    sw.add_argument("--threads", type=int, default=1)
    sw.set_defaults(func=cmd_sweep)

    st = sub.add_parser("stats", help="estimate a trajectory CSV column")
    st.add_argument("csv_path")
    st.add_argument("--column", default="mean_density")
    st.add_argument("--frac-tol", type=float, default=0.01)
    st.set_defaults(func=cmd_stats)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DdbhError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
