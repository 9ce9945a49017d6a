"""Command-line front end: compute, verify, and report.

Subcommands (via --command): classical-stokes, caterpillar, quantum,
isomonodromy, verify-all.  Flat JSON config files can supply any flag value;
explicit flags win.  Exit status 0 iff every residual in the run passes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import io as sio
from .errors import StokescatError
from .linalg import ToleranceConfig, norm


def _parse_args(argv):
    p = argparse.ArgumentParser(prog="stokescat")
    p.add_argument("--command", required=False,
                   choices=["classical-stokes", "caterpillar", "quantum",
                            "isomonodromy", "verify-all"])
    p.add_argument("--input", help="input/config JSON path")
    p.add_argument("--output", help="output JSON path")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--h", type=float, default=1.0)
    p.add_argument("--rep", default="standard(2)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol-eig", type=float, default=1e-8)
    p.add_argument("--tol-residual", type=float, default=1e-9)
    p.add_argument("--tol-ode-rel", type=float, default=1e-11)
    p.add_argument("--tol-ode-abs", type=float, default=1e-13)
    p.add_argument("--tol-series-tail", type=float, default=1e-14)
    args = p.parse_args(argv)
    if args.input and os.path.exists(args.input):
        with open(args.input) as f:
            cfg = json.load(f)
        for key, val in cfg.items():
            attr = key.replace("-", "_")
            if hasattr(args, attr) and f"--{key}" not in (argv or []):
                explicit = any(a.startswith(f"--{key}") for a in (argv or []))
                if not explicit:
                    setattr(args, attr, val)
    return args


def _tol(args) -> ToleranceConfig:
    return ToleranceConfig(eig_tol=args.tol_eig,
                           residual_tol=args.tol_residual,
                           ode_rel_tol=args.tol_ode_rel,
                           ode_abs_tol=args.tol_ode_abs,
                           series_tail_tol=args.tol_series_tail)


def _rand_herm(rng, n, scale=0.7):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2.0


def _default_u(n):
    return np.arange(n, dtype=float)


def cmd_classical_stokes(args):
    from .oracle import classical_system, stokes_and_connection
    if args.input and os.path.exists(args.input):
        cfg = sio.load(args.input)
        a = sio.matrix_from_json(cfg["A"]) if "A" in cfg else None
        u = np.array(cfg.get("u", list(_default_u(args.n))), dtype=float)
    else:
        a, u = None, _default_u(args.n)
    if a is None:
        rng = np.random.default_rng(args.seed)
        a = _rand_herm(rng, args.n)
    sd = stokes_and_connection(classical_system(u, a), _tol(args))
    out = sio.stokes_data_to_json(sd)
    rows = [(k, v, 1e-7) for k, v in sd.residuals.items()]
    return out, rows


def cmd_caterpillar(args):
    from .caterpillar import assemble_caterpillar, spectral_tower
    if args.input and os.path.exists(args.input):
        cfg = sio.load(args.input)
        a = sio.matrix_from_json(cfg["A"])
    else:
        rng = np.random.default_rng(args.seed)
        a = _rand_herm(rng, args.n)
    tw = spectral_tower(a, _tol(args))
    cs = assemble_caterpillar(tw, _tol(args))
    out = {"tower": sio.tower_to_json(tw),
           "caterpillar": sio.caterpillar_to_json(cs)}
    rows = [("monodromy", cs.diagnostics["monodromy"], 1e-8),
            ("gauss_diag", cs.diagnostics["gauss_diag_vs_exp_diag"], 1e-8),
            ("ab_product", tw.diagnostics["ab_product_identity"], 1e-9),
            ("chain_recursion", tw.diagnostics["chain_recursion"], 1e-9)]
    return out, rows


def cmd_quantum(args):
    from .gzrep import build_rep, capelli_spectrum
    from .qcat import appel_gautam, assemble_quantum, fiber_data
    from .rll import dj_relation_check, r_matrix, rll_residuals
    rep = build_rep(args.rep)
    sp = capelli_spectrum(rep, args.h, _tol(args))
    fd = fiber_data(rep, sp, args.h)
    qs = assemble_quantum(fd)
    rll = rll_residuals(r_matrix(rep.n, args.h), qs.Splus, qs.Sminus,
                        rep.n, rep.d)
    ag = appel_gautam(fd, qs)
    dj = dj_relation_check(ag.psi_e, ag.psi_f, ag.cartan, args.h, rep.n)
    out = {"quantum": sio.quantum_to_json(qs, rep.d),
           "gz": sio.gz_to_json(sp),
           "rll": {k: float(v) for k, v in rll.residuals.items()},
           "dj": {k: float(v) for k, v in dj.residuals.items()}}
    rows = [(f"rll_{k}", v, 1e-8) for k, v in rll.residuals.items()]
    rows += [(f"dj_{k}", v, 1e-7) for k, v in dj.residuals.items()]
    rows += [(k, v, 1e-8) for k, v in qs.diagnostics.items()]
    return out, rows


def cmd_isomonodromy(args):
    from .isomon import (flow, poly_times_schedule, spectral_drift,
                         stokes_drift)
    rng = np.random.default_rng(args.seed)
    a0 = _rand_herm(rng, args.n, 0.6)
    sch = poly_times_schedule(args.n, list(np.linspace(1.2, 2.0, 5)))
    states = flow(a0, sch)
    sdrift = spectral_drift(states)
    drift = stokes_drift(states, sch)
    csv_lines = ["t," + ",".join(f"u{i+1}" for i in range(args.n))]
    for t, _ in states:
        u = sch.u_of_t(t)
        csv_lines.append(f"{t}," + ",".join(f"{x:.12g}" for x in u))
    out = {"schema": sio.SCHEMA, "kind": "isomonodromy",
           "spectral_drift": float(sdrift), "stokes_drift": drift,
           "trajectory_csv": "\n".join(csv_lines)}
    rows = [("spectral_drift", sdrift, 1e-8),
            ("stokes_drift_plus", drift["drift_plus"], 1e-4),
            ("stokes_drift_minus", drift["drift_minus"], 1e-4)]
    return out, rows


def verify_all(args):
    """Run every module invariant; returns (payload, rows)."""
    from .verify import all_checks
    threads = int(os.environ.get("STOKES_THREADS", "0")) or None
    checks = all_checks(args.seed)
    rows = []
    with ThreadPoolExecutor(max_workers=threads) as ex:
        for result in ex.map(lambda c: c(), checks):
            rows.extend(result)
    return {"schema": sio.SCHEMA, "kind": "verify_all"}, rows


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    args = _parse_args(argv)
    if not args.command:
        print("error: --command is required", file=sys.stderr)
        return 2
    try:
        if args.command == "classical-stokes":
            payload, rows = cmd_classical_stokes(args)
        elif args.command == "caterpillar":
            payload, rows = cmd_caterpillar(args)
        elif args.command == "quantum":
            payload, rows = cmd_quantum(args)
        elif args.command == "isomonodromy":
            payload, rows = cmd_isomonodromy(args)
        else:
            payload, rows = verify_all(args)
    except StokescatError as exc:
        err = {"schema": sio.SCHEMA, "kind": "error",
               "error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(err))
        return 1
    payload["report"] = sio.report_to_json(rows)
    if args.output:
        sio.dump(payload, args.output)
        base, _ = os.path.splitext(args.output)
        with open(base + ".md", "w") as f:
            f.write(sio.report_to_markdown(rows, title=args.command))
    print(sio.report_to_markdown(rows, title=args.command))
    return 0 if all(r < t for (_, r, t) in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
