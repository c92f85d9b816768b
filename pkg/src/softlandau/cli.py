"""Command-line entry point: ``softlandau {run,verify,experiment,tables}``.

Precedence for run parameters: built-in defaults, then ``--config`` file,
then flags.  ``LANDAU_CACHE_DIR`` overrides ``--cache-dir``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (non-finite
values, or failed invariants in ``verify``), 4 IO error.
"""

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import sym3
from .collision import collision_operator
from .config import make_config, parse_config
from .convolution import convolve_a
from .diagnostics import compute_record, entropy_production
from .grid import integrate, make_grid
from .harness import report, run_experiments
from .integrator import ConfigError, NumericalError, run
from .kernel import cell_averaged_tables, cache_name
from .series import read_checkpoint, write_checkpoint, write_series

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _cache_dir(args):
    return os.environ.get("LANDAU_CACHE_DIR", args.cache_dir)


def _tables(n, L, gamma, args):
    return cell_averaged_tables(make_grid(n, L), gamma, cache_dir=_cache_dir(args))


def _overrides(args):
    keys = ("gamma", "epsilon", "p", "s", "n", "L", "T", "sigma", "ic", "out", "cadence", "threads")
    return {k: getattr(args, k, None) for k in keys}


def cmd_run(args):
    cfg = parse_config(args.config, _overrides(args))
    echo = cfg.to_dict()
    print(json.dumps(echo))
    traj = run(cfg, tables=_tables(cfg.n, cfg.L, cfg.gamma, args))
    last = traj.records[-1]
    print(f"t={last.t:.6g} steps={len(traj.dts)} mass_drift={traj.mass_drift:.3e} "
          f"entropy={last.entropy:.8g} D={last.dissipation:.6g} "
          f"max_clipped={max(traj.step_clipped, default=0.0):.3e}")
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        write_series(traj, out / "series.csv")
        (out / "config.json").write_text(json.dumps(echo, indent=2) + "\n")
        write_checkpoint(out / "final.bin", traj.final, last.t, cfg)
        print(f"wrote {out / 'series.csv'}, {out / 'final.bin'}")
    return EXIT_OK


def cmd_verify(args):
    f, t, meta = read_checkpoint(args.checkpoint)
    cfg = make_config(meta)
    tables = _tables(cfg.n, cfg.L, cfg.gamma, args)
    grid = tables.grid
    checks = []
    checks.append(("finite", bool(np.all(np.isfinite(f)))))
    checks.append(("nonnegative", bool(f.min() >= 0)))
    rec = compute_record(t, f, tables, s_list=cfg.s_list, p_list=cfg.p_list, q=cfg.q,
                         dissipation=None)
    d = entropy_production(f, tables, "pairs")
    abar = convolve_a(f, tables)
    lam = sym3.min_eigenvalue(abar)
    q = collision_operator(f, tables)
    checks += [
        ("D >= 0", d >= 0),
        ("abar positive semidefinite", bool(lam.min() >= -1e-12 * max(abs(lam).max(), 1e-300))),
        ("C_coer > 0", rec.coercivity > 0),
        ("Q conserves mass", abs(integrate(q, grid)) <= 1e-12 * max(rec.mass, 1e-300) + 1e-15),
        ("entropy finite", np.isfinite(rec.entropy)),
        ("M_q finite", np.isfinite(rec.weighted_norm)),
    ]
    print(f"checkpoint t={t:.6g} n={grid.n} L={grid.L:g} gamma={cfg.gamma:g}")
    print(f"mass={rec.mass:.12g} energy={rec.energy:.12g} entropy={rec.entropy:.10g} D={d:.6g}")
    for name, ok in checks:
        print(f"  {'PASS' if ok else 'FAIL'}  {name}")
    return EXIT_OK if all(ok for _, ok in checks) else EXIT_NUMERIC


def cmd_experiment(args):
    gammas = tuple(args.gamma) if args.gamma else (-2.0, -1.5, -1.0)
    ics = tuple(args.ic) if args.ic else ("bimaxwellian", "anisotropic")
    for g in gammas:
        make_config({"gamma": g, "n": args.n, "L": args.L, "T": args.T, "sigma": args.sigma,
                     "epsilon": args.epsilon, "cadence": args.cadence})
    tables = {g: _tables(args.n, args.L, g, args) for g in gammas}
    experiments = run_experiments(gammas, ics, n=args.n, L=args.L, T=args.T,
                                  epsilon=args.epsilon, cadence=args.cadence, sigma=args.sigma,
                                  tables=tables)
    paths = report(experiments, args.out or "report")
    rows = [r for e in experiments for r in e.rows]
    print(f"{len(rows)} checks, {sum(not r.passed for r in rows)} failed; "
          f"wrote {paths[0]} and {paths[1]}")
    return EXIT_OK


def cmd_tables(args):
    gamma = -2.0 if args.gamma is None else args.gamma
    n = 16 if args.n is None else args.n
    L = 5.0 if args.L is None else args.L
    make_config({"gamma": gamma, "n": n, "L": L})
    cache = _cache_dir(args)
    if cache is None:
        raise ConfigError("tables needs --cache-dir or LANDAU_CACHE_DIR")
    tables = _tables(n, L, gamma, args)
    print(Path(cache) / cache_name(tables.grid, gamma))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="softlandau", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--gamma", type=float)
        p.add_argument("--n", type=int)
        p.add_argument("--L", type=float)
        p.add_argument("--threads", type=int)
        p.add_argument("--cache-dir", dest="cache_dir")

    p = sub.add_parser("run", help="simulate and record diagnostics")
    common(p)
    p.add_argument("--config", help="flat JSON configuration file")
    for flag, typ in (("--epsilon", float), ("--p", float), ("--s", float), ("--T", float),
                      ("--sigma", float), ("--cadence", int)):
        p.add_argument(flag, type=typ)
    p.add_argument("--ic", help="shipped initial condition name")
    p.add_argument("--out", help="output directory for series.csv and final checkpoint")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="invariant suite on a checkpoint")
    p.add_argument("checkpoint")
    p.add_argument("--threads", type=int)
    p.add_argument("--cache-dir", dest="cache_dir")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="theorem matrix and report")
    p.add_argument("--gamma", type=float, action="append", help="repeatable")
    p.add_argument("--ic", action="append", help="repeatable shipped initial condition")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--L", type=float, default=5.0)
    p.add_argument("--T", type=float, default=2.0)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--cadence", type=int, default=2)
    p.add_argument("--out", help="report directory (default ./report)")
    p.add_argument("--threads", type=int)
    p.add_argument("--cache-dir", dest="cache_dir")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("tables", help="build and cache kernel tables")
    common(p)
    p.set_defaults(func=cmd_tables)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
