"""Command-line entry points: run, sweep-m, sweep-t, oracle-check.

Exit codes: 0 on success, 2 when the scenario configuration is invalid or
infeasible, 1 on internal errors.  All numeric output uses 9 significant
digits; wall-clock columns stay zero unless --timing is given, keeping
repeated runs byte-identical.
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback

from .ao import AOInfeasible, run
from .experiments import (SCHEMES, run_scheme, sweep_m, sweep_t,
                          write_convergence_csv, write_sweep_csv,
                          write_trajectory_csv)
from .oracle import grid_search_small, recompute_report, scan_rho
from .rsma_swipt import evaluate
from .scenario import NetworkConfig, build_tables, load_config, default_config
from .subproblems import SubproblemInfeasible

CONFIG_ERRORS = (AOInfeasible, SubproblemInfeasible, ValueError, TypeError,
                 OSError, KeyError)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH",
                   help="scenario JSON (default: built-in highway default)")
    p.add_argument("--out", metavar="DIR", default=".",
                   help="directory for CSV output (default: .)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for randomized schemes (default: 0)")
    p.add_argument("--max-iters", type=int, default=100,
                   help="outer iteration cap (default: 100)")
    p.add_argument("--tol", type=float, default=1e-3,
                   help="relative convergence tolerance (default: 1e-3)")
    p.add_argument("--timing", action="store_true",
                   help="record wall-clock columns (breaks byte-identical "
                        "reruns)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="airs-rsma",
        description="Sum-rate optimization for AIRS-assisted vehicular "
                    "networks with rate-splitting SWIPT receivers")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("run", help="optimize one scenario, write "
                                   "fig2_convergence.csv + fig3_trajectory.csv")
    _common(p)
    p.add_argument("--scheme", default="proposed", choices=SCHEMES)

    p = sub.add_parser("sweep-m", help="sweep the element count, write "
                                       "fig4_sweep_m.csv")
    _common(p)
    p.add_argument("--values", type=int, nargs="+", default=[8, 16, 32, 64])
    p.add_argument("--workers", type=int, default=None,
                   help="process-pool size for sweep cells")

    p = sub.add_parser("sweep-t", help="sweep the mission time, write "
                                       "fig5_sweep_t.csv")
    _common(p)
    p.add_argument("--values", type=float, nargs="+", default=[30, 40, 50])
    p.add_argument("--workers", type=int, default=None,
                   help="process-pool size for sweep cells")

    p = sub.add_parser("oracle-check",
                       help="cross-check the evaluator against the scalar "
                            "oracle (and the grid search on toy scenarios)")
    _common(p)
    return parser


def _load(args) -> NetworkConfig:
    if args.config:
        return load_config(args.config)
    return default_config()


def _cmd_run(args, cfg: NetworkConfig) -> int:
    res = run_scheme(args.scheme, cfg, seed=args.seed,
                     max_iters=args.max_iters, conv_tol=args.tol,
                     timing=args.timing)
    os.makedirs(args.out, exist_ok=True)
    conv = os.path.join(args.out, "fig2_convergence.csv")
    traj = os.path.join(args.out, "fig3_trajectory.csv")
    write_convergence_csv(conv, res)
    write_trajectory_csv(traj, cfg, res.state.q)
    print(f"scheme {args.scheme}: sum rate {res.report.sum_rate:.9g} "
          f"bit/s/Hz, rho {res.state.rho:.9g}, "
          f"{res.iterations} iterations ({res.message})")
    print(f"wrote {conv}")
    print(f"wrote {traj}")
    return 0


def _cmd_sweep(args, cfg: NetworkConfig, axis: str) -> int:
    fn = sweep_m if axis == "m" else sweep_t
    rows = fn(cfg, values=tuple(args.values), seed=args.seed,
              max_iters=args.max_iters, conv_tol=args.tol,
              timing=args.timing, workers=args.workers)
    os.makedirs(args.out, exist_ok=True)
    name = "fig4_sweep_m.csv" if axis == "m" else "fig5_sweep_t.csv"
    path = os.path.join(args.out, name)
    write_sweep_csv(path, axis, rows)
    for row in rows:
        if row["error"]:
            print(f"cell ({axis}={row['axis_value']:.9g}, "
                  f"{row['scheme']}) failed: {row['error']}",
                  file=sys.stderr)
        else:
            print(f"{axis}={row['axis_value']:.9g} {row['scheme']}: "
                  f"{row['sum_rate']:.9g} bit/s/Hz")
    print(f"wrote {path}")
    return 0


def _cmd_oracle_check(args, cfg: NetworkConfig) -> int:
    failures = 0
    tables = build_tables(cfg)
    res = run(cfg, tables=tables, max_iters=args.max_iters,
              conv_tol=args.tol)
    fast = evaluate(res.state, cfg, tables)
    slow = recompute_report(res.state, cfg, tables)
    rel = abs(slow.sum_rate - fast.sum_rate) / max(abs(fast.sum_rate), 1e-12)
    ok = rel <= 1e-9
    failures += not ok
    print(f"{'PASS' if ok else 'FAIL'} scalar re-evaluation: "
          f"relative difference {rel:.3e}")

    sc = scan_rho(res.state, cfg, step=1e-4, tables=tables)
    frozen = run(cfg, tables=tables, init_state=res.state, blocks=("split",),
                 max_iters=args.max_iters, conv_tol=args.tol)
    gap = abs(frozen.state.rho - sc.rho)
    ok = gap <= 1e-3
    failures += not ok
    print(f"{'PASS' if ok else 'FAIL'} splitting-ratio scan: "
          f"AO rho {frozen.state.rho:.9g} vs scan {sc.rho:.9g}")

    if cfg.K <= 1 and cfg.I <= 1 and cfg.N <= 4 and cfg.E_th == 0.0:
        grid = grid_search_small(cfg)
        ratio = res.report.sum_rate / grid.sum_rate
        ok = ratio >= 0.98
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'} exhaustive search: AO reaches "
              f"{ratio:.9g} of the grid optimum {grid.sum_rate:.9g}")
    else:
        print("SKIP exhaustive search (needs K <= 1, I <= 1, N <= 4, "
              "E_th = 0)")
    return 1 if failures else 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        if args.verb == "run":
            return _cmd_run(args, cfg)
        if args.verb == "sweep-m":
            return _cmd_sweep(args, cfg, "m")
        if args.verb == "sweep-t":
            return _cmd_sweep(args, cfg, "t")
        return _cmd_oracle_check(args, cfg)
    except CONFIG_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
