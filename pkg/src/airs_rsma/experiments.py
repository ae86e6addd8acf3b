"""Benchmark schemes, sweeps over element count and mission time, CSV output.

Each scheme is the full alternating-optimization driver with a subset of
blocks enabled and, where needed, a modified starting point (random phases,
uniform powers, pinned splitting ratio, no reflecting elements).  Sweep cells
are independent and may run in a process pool; output rows are emitted in
deterministic sorted order regardless of completion order, and wall-clock
fields stay zero unless timing is requested so repeated runs are
byte-identical.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .ao import AOInfeasible, AOResult, BLOCKS, initialize, run
from .rsma_swipt import NetworkState
from .scenario import NetworkConfig, build_tables, straight_line_trajectory
from .subproblems import SubproblemInfeasible

__all__ = [
    "SCHEMES",
    "SweepSpec",
    "run_scheme",
    "sweep",
    "sweep_m",
    "sweep_t",
    "write_convergence_csv",
    "write_trajectory_csv",
    "write_sweep_csv",
]

SCHEMES = ("proposed", "fixed_trajectory", "random_phase", "fixed_power",
           "fixed_rho", "no_airs")

_SCHEME_BLOCKS = {
    "proposed": BLOCKS,
    "fixed_trajectory": ("phases", "power", "split"),
    "random_phase": ("trajectory", "power", "split"),
    "fixed_power": ("trajectory", "phases", "split"),
    "fixed_rho": ("trajectory", "phases", "power"),
    "no_airs": ("power", "split"),
}


def run_scheme(scheme: str, cfg: NetworkConfig, *, seed: int = 0,
               max_iters: int = 100, conv_tol: float = 1e-3,
               solver_tol: float = 1e-6, timing: bool = False) -> AOResult:
    """Run one benchmark scheme and return the full AO result."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
    if scheme == "no_airs":
        cfg = replace(cfg, M=0)
    tables = build_tables(cfg)
    state = initialize(cfg, tables)
    if scheme == "random_phase":
        rng = np.random.default_rng(seed)
        theta = rng.uniform(0.0, 2.0 * np.pi, size=state.theta.shape)
        state = NetworkState(q=state.q, p=state.p, C=state.C, theta=theta,
                             rho=state.rho)
    elif scheme == "fixed_power":
        p = np.zeros_like(state.p)
        for i, n in zip(*np.nonzero(tables.active)):
            served = np.nonzero(tables.assoc[i, :, n])[0]
            share = cfg.P_max / (served.size + 1)
            p[i, 0, n] = share
            p[i, 1 + served, n] = share
        state = NetworkState(q=state.q, p=p, C=state.C, theta=state.theta,
                             rho=state.rho)
    elif scheme == "fixed_rho":
        state = NetworkState(q=state.q, p=state.p, C=state.C,
                             theta=state.theta, rho=0.5)
    return run(cfg, tables=tables, init_state=state,
               blocks=_SCHEME_BLOCKS[scheme], max_iters=max_iters,
               conv_tol=conv_tol, solver_tol=solver_tol, timing=timing)


@dataclass(frozen=True)
class SweepSpec:
    axis: str                        # "M" or "T"
    values: tuple[float, ...]
    schemes: tuple[str, ...] = SCHEMES
    repetitions: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.axis not in ("M", "T"):
            raise ValueError("axis must be 'M' or 'T'")
        if not self.values or any(b <= a for a, b in zip(self.values,
                                                         self.values[1:])):
            raise ValueError("values must be non-empty, strictly increasing")
        if not self.schemes:
            raise ValueError("schemes must be non-empty")
        unknown = set(self.schemes) - set(SCHEMES)
        if unknown:
            raise ValueError(f"unknown schemes: {sorted(unknown)}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")


def _cell_cfg(base: NetworkConfig, axis: str, value: float) -> NetworkConfig:
    if axis == "M":
        return replace(base, M=int(value))
    # horizon sweep: rescale the slot count, keep vehicle arrivals fixed
    return replace(base, N=int(round(value / base.delta)))


def _run_cell(args):
    base, axis, value, scheme, seed, max_iters, conv_tol, solver_tol, \
        timing = args
    row = {"axis_value": value, "scheme": scheme, "sum_rate": float("nan"),
           "iters": 0, "wall_ms": 0.0, "error": ""}
    try:
        cfg = _cell_cfg(base, axis, value)
        res = run_scheme(scheme, cfg, seed=seed, max_iters=max_iters,
                         conv_tol=conv_tol, solver_tol=solver_tol,
                         timing=timing)
    except (AOInfeasible, SubproblemInfeasible, ValueError) as exc:
        row["error"] = str(exc)
        return row
    row["sum_rate"] = res.report.sum_rate
    row["iters"] = res.iterations
    row["wall_ms"] = float(sum(r.wall_ms for r in res.trace))
    return row


def sweep(spec: SweepSpec, base_cfg: NetworkConfig, *,
          max_iters: int = 100, conv_tol: float = 1e-3,
          solver_tol: float = 1e-6, timing: bool = False,
          workers: int | None = None) -> list[dict]:
    """One row per (axis value, scheme): exact sum rate, iterations, wall time.

    Repetitions re-run each cell with derived seeds and average the numeric
    fields (only random_phase actually varies).  Failed cells keep NaN sum
    rates and carry the error text; the sweep continues.
    """
    cells = []
    for value in spec.values:
        for scheme in spec.schemes:
            for rep in range(spec.repetitions):
                cells.append((base_cfg, spec.axis, value, scheme,
                              spec.seed + rep, max_iters, conv_tol,
                              solver_tol, timing))
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, cells))
    else:
        results = [_run_cell(c) for c in cells]

    rows = []
    order = {s: i for i, s in enumerate(spec.schemes)}
    for vi, value in enumerate(spec.values):
        for scheme in spec.schemes:
            group = [r for r, c in zip(results, cells)
                     if c[2] == value and c[3] == scheme]
            good = [r for r in group if not r["error"]]
            row = {"axis_value": value, "scheme": scheme,
                   "sum_rate": float("nan"), "iters": 0, "wall_ms": 0.0,
                   "error": "; ".join(r["error"] for r in group if r["error"])}
            if good:
                row["sum_rate"] = float(np.mean([r["sum_rate"]
                                                 for r in good]))
                row["iters"] = int(round(np.mean([r["iters"]
                                                  for r in good])))
                row["wall_ms"] = float(np.mean([r["wall_ms"]
                                                for r in good]))
            rows.append(row)
    rows.sort(key=lambda r: (r["axis_value"], order[r["scheme"]]))
    return rows


def sweep_m(base_cfg: NetworkConfig, values=(8, 16, 32, 64),
            schemes=SCHEMES, **kwargs) -> list[dict]:
    spec = SweepSpec(axis="M", values=tuple(values), schemes=tuple(schemes),
                     seed=kwargs.pop("seed", 0),
                     repetitions=kwargs.pop("repetitions", 1))
    return sweep(spec, base_cfg, **kwargs)


def sweep_t(base_cfg: NetworkConfig, values=(30, 40, 50),
            schemes=SCHEMES, **kwargs) -> list[dict]:
    spec = SweepSpec(axis="T", values=tuple(values), schemes=tuple(schemes),
                     seed=kwargs.pop("seed", 0),
                     repetitions=kwargs.pop("repetitions", 1))
    return sweep(spec, base_cfg, **kwargs)


# -- CSV emission ---------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.9g}"


def _write(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if not isinstance(v, str) else v
                             for v in row])


def write_convergence_csv(path: str, result: AOResult) -> None:
    """Per-iteration exact objective trace (one row per outer iteration)."""
    _write(path, ["iter", "sum_rate", "rho", "max_violation", "wall_ms"],
           [[r.iteration, r.sum_rate, r.rho, r.max_violation, r.wall_ms]
            for r in result.trace])


def write_trajectory_csv(path: str, cfg: NetworkConfig,
                         q: np.ndarray) -> None:
    """Optimized trajectory next to the straight-line start, 1-based slots."""
    line = straight_line_trajectory(cfg)
    rows = [[n + 1, q[n, 0], q[n, 1], q[n, 2],
             line[n, 0], line[n, 1], line[n, 2]] for n in range(cfg.N)]
    _write(path, ["n", "x", "y", "z", "x_line", "y_line", "z_line"], rows)


def write_sweep_csv(path: str, axis_label: str, rows: list[dict]) -> None:
    """Sweep table with one row per (axis value, scheme)."""
    _write(path, [axis_label, "scheme", "sum_rate", "iters", "wall_ms"],
           [[r["axis_value"], r["scheme"], r["sum_rate"], r["iters"],
             r["wall_ms"]] for r in rows])
