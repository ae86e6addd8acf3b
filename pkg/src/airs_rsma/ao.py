"""Alternating optimization driver for the joint design problem.

Block order per outer iteration: trajectory, phase profile, power/shares,
power splitting.  Each block produces a candidate from its convex surrogate
(closed form for phases); the driver accepts a candidate only when the exact
objective improves and the exact feasibility check passes.  Acceptance on
exact values makes the reported objective monotone by construction, even for
the trajectory surrogate which is tight at the incumbent but not a global
minorant.

Blocks that change the channel (trajectory, phases) re-allocate the common
shares to equal splits of the exact worst-case common rate before the
comparison; power and splitting candidates carry their own share-cap rows.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .channel import phase_profile
from .convex import solve
from .rsma_swipt import NetworkState, check_feasibility, evaluate, RateReport
from .scenario import (NetworkConfig, ScenarioTables, build_tables,
                       straight_line_trajectory)
from .subproblems import (SubproblemInfeasible, power_problem, split_problem,
                          trajectory_is_forced, trajectory_problem)

__all__ = [
    "BLOCKS",
    "AOInfeasible",
    "IterationRecord",
    "AOResult",
    "allocate_equal_shares",
    "initialize",
    "run",
]

BLOCKS = ("trajectory", "phases", "power", "split")


class AOInfeasible(Exception):
    """The scenario admits no feasible operating point."""


@dataclass
class IterationRecord:
    iteration: int
    sum_rate: float
    rho: float
    max_violation: float
    wall_ms: float
    accepted: tuple[str, ...]
    surrogate: dict[str, float] = field(default_factory=dict)


@dataclass
class AOResult:
    state: NetworkState
    report: RateReport
    trace: list[IterationRecord]
    converged: bool
    iterations: int
    message: str = ""


def allocate_equal_shares(state: NetworkState, cfg: NetworkConfig,
                          tables: ScenarioTables,
                          report: RateReport | None = None) -> NetworkState:
    """Split each slot's worst-case common rate equally among served vehicles."""
    if report is None:
        report = evaluate(state, cfg, tables)
    sizes = np.maximum(tables.assoc.sum(axis=1), 1)       # (I, N)
    C = np.where(tables.assoc,
                 (report.R_c_min / sizes)[:, None, :], 0.0)
    return NetworkState(q=state.q, p=state.p, C=C, theta=state.theta,
                        rho=state.rho)


def initialize(cfg: NetworkConfig,
               tables: ScenarioTables | None = None) -> NetworkState:
    """Straight-line path, aligned phases, half budget on the common stream,
    rho = 0.5 lowered if the harvest threshold demands it."""
    if tables is None:
        tables = build_tables(cfg)
    q = straight_line_trajectory(cfg)
    theta = phase_profile(cfg, tables, q)
    p = np.zeros((cfg.I, 1 + cfg.K, cfg.N))
    for i, n in zip(*np.nonzero(tables.active)):
        served = np.nonzero(tables.assoc[i, :, n])[0]
        p[i, 0, n] = 0.5 * cfg.P_max
        p[i, 1 + served, n] = 0.5 * cfg.P_max / served.size
    C = np.zeros((cfg.I, cfg.K, cfg.N))
    rho = 0.5
    state = NetworkState(q=q, p=p, C=C, theta=theta, rho=rho)
    if cfg.E_th > 0.0:
        rep = evaluate(state, cfg, tables)
        base = rep.Q.sum(axis=(0, 2)) / (1.0 - rho)    # harvest per unit (1-rho)
        if base.min() <= 0.0 or base.min() < cfg.E_th * (1.0 - 1e-9):
            raise AOInfeasible(
                "harvest threshold unreachable even at rho = 0: "
                f"min vehicle harvest {base.min():.3e} J < E_th {cfg.E_th:.3e} J")
        rho_cap = 1.0 - cfg.E_th * (1.0 + 1e-6) / base.min()
        state = NetworkState(q=q, p=p, C=C, theta=theta,
                             rho=float(min(0.5, max(rho_cap, 0.0))))
    return state


def _try_accept(state, rep, cand, cfg, tables):
    rep_c = evaluate(cand, cfg, tables)
    if rep_c.sum_rate > rep.sum_rate and \
            not check_feasibility(cand, cfg, tables, report=rep_c):
        return cand, rep_c, True
    return state, rep, False


def _max_violation(state, cfg, tables, rep):
    viols = check_feasibility(state, cfg, tables, report=rep)
    return max((v.amount for v in viols), default=0.0)


def run(cfg: NetworkConfig, *, tables: ScenarioTables | None = None,
        init_state: NetworkState | None = None,
        blocks: tuple[str, ...] = BLOCKS,
        max_iters: int = 100, conv_tol: float = 1e-3,
        solver_tol: float = 1e-6, newton_budget: int = 200,
        timing: bool = False) -> AOResult:
    """Run alternating optimization from a feasible start.

    Raises :class:`AOInfeasible` when the initial state fails the exact
    feasibility check (e.g. the harvest threshold is unreachable).
    ``blocks`` selects which subproblems run; disabled blocks keep their
    variables fixed, which is how the comparison baselines are expressed.
    """
    unknown = set(blocks) - set(BLOCKS)
    if unknown:
        raise ValueError(f"unknown blocks: {sorted(unknown)}")
    if tables is None:
        tables = build_tables(cfg)
    state = init_state if init_state is not None else initialize(cfg, tables)
    rep = evaluate(state, cfg, tables)
    viols = check_feasibility(state, cfg, tables, report=rep)
    if viols:
        worst = max(viols, key=lambda v: v.amount)
        raise AOInfeasible(
            f"initial state infeasible: {worst.constraint} at {worst.index} "
            f"by {worst.amount:.3e}")

    trace = [IterationRecord(0, rep.sum_rate, state.rho,
                             _max_violation(state, cfg, tables, rep), 0.0, ())]
    prev = rep.sum_rate
    converged = False
    message = "iteration limit reached"
    iterations = 0

    for it in range(1, max_iters + 1):
        iterations = it
        t0 = time.perf_counter() if timing else 0.0
        accepted: list[str] = []
        surrogate: dict[str, float] = {}

        if "trajectory" in blocks and not trajectory_is_forced(cfg):
            try:
                built = trajectory_problem(cfg, tables, state)
            except SubproblemInfeasible:
                built = None
            if built is not None:
                res = solve(built.problem, solver_tol=solver_tol,
                            max_iter=newton_budget)
                if res.status != "infeasible" and np.isfinite(res.x).all():
                    surrogate["trajectory"] = res.objective_value
                    q_new = built.extract(res.x)
                    theta_c = phase_profile(cfg, tables, q_new) \
                        if "phases" in blocks else state.theta
                    cand = NetworkState(q=q_new, p=state.p, C=state.C,
                                        theta=theta_c, rho=state.rho)
                    cand = allocate_equal_shares(cand, cfg, tables)
                    state, rep, ok = _try_accept(state, rep, cand, cfg, tables)
                    if ok:
                        accepted.append("trajectory")

        if "phases" in blocks and cfg.M > 0:
            cand = NetworkState(q=state.q, p=state.p, C=state.C,
                                theta=phase_profile(cfg, tables, state.q),
                                rho=state.rho)
            cand = allocate_equal_shares(cand, cfg, tables)
            state, rep, ok = _try_accept(state, rep, cand, cfg, tables)
            if ok:
                accepted.append("phases")

        if "power" in blocks and state.rho > 1e-12:
            try:
                built = power_problem(cfg, tables, state)
            except SubproblemInfeasible:
                built = None
            if built is not None:
                res = solve(built.problem, solver_tol=solver_tol,
                            max_iter=newton_budget)
                if res.status != "infeasible" and np.isfinite(res.x).all():
                    surrogate["power"] = res.objective_value
                    p_new, C_new = built.extract(res.x)
                    cand = NetworkState(q=state.q, p=p_new, C=C_new,
                                        theta=state.theta, rho=state.rho)
                    state, rep, ok = _try_accept(state, rep, cand, cfg, tables)
                    if ok:
                        accepted.append("power")

        if "split" in blocks:
            try:
                built = split_problem(cfg, tables, state)
            except SubproblemInfeasible:
                built = None
            if built is not None:
                res = solve(built.problem, solver_tol=solver_tol,
                            max_iter=newton_budget)
                if res.status != "infeasible" and np.isfinite(res.x).all():
                    surrogate["split"] = res.objective_value
                    rho_new, C_new = built.extract(res.x)
                    cand = NetworkState(q=state.q, p=state.p, C=C_new,
                                        theta=state.theta, rho=rho_new)
                    state, rep, ok = _try_accept(state, rep, cand, cfg, tables)
                    if ok:
                        accepted.append("split")

        wall_ms = (time.perf_counter() - t0) * 1e3 if timing else 0.0
        trace.append(IterationRecord(
            it, rep.sum_rate, state.rho,
            _max_violation(state, cfg, tables, rep), wall_ms,
            tuple(accepted), surrogate))

        delta = rep.sum_rate - prev
        if delta <= conv_tol * max(abs(prev), 1e-9):
            converged = True
            message = "relative improvement below tolerance"
            break
        if not accepted:
            converged = True
            message = "no block produced an accepted candidate"
            break
        prev = rep.sum_rate

    final = check_feasibility(state, cfg, tables, report=rep)
    if final:
        message += "; final state fails feasibility check"
    return AOResult(state=state, report=rep, trace=trace,
                    converged=converged, iterations=iterations,
                    message=message)
