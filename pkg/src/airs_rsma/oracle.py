"""Independent brute-force references used by tests and acceptance checks.

Everything here evaluates exact expressions only, never surrogates.  The
re-evaluator deliberately avoids the vectorized kernels in ``channel`` and
``rsma_swipt``: geometry, channels, rates and energies are recomputed slot by
slot with scalar ``math``/``cmath`` arithmetic and the 1 + SINR rate form, so
the main path and the oracle agree only if both are right.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .rsma_swipt import NetworkState, RateReport, check_feasibility, evaluate
from .scenario import NetworkConfig, ScenarioTables, build_tables

__all__ = [
    "recompute_report",
    "ScanResult",
    "scan_rho",
    "GridResult",
    "grid_search_small",
]


# -- scalar geometry and channel (independent of channel.py) -------------------

def _rsu_xy(cfg: NetworkConfig, i: int):
    return cfg.r_rsu + i * cfg.d_rsu, 0.0


def _veh_xy(cfg: NetworkConfig, k: int, n: int):
    lane = cfg.lane_of[k] - 1
    x = ((n + 1) * cfg.delta - cfg.t_arrival[k]) * cfg.v[lane]
    return x, lane * cfg.d_lane


def _effective_channel(cfg: NetworkConfig, i: int, k: int, n: int,
                       q_n, theta_n) -> complex:
    """h_direct + g^H diag(e^{j theta}) h for one served pair, scalar loop."""
    rx, ry = _rsu_xy(cfg, i)
    vx, vy = _veh_xy(cfg, k, n)
    qx, qy, qz = float(q_n[0]), float(q_n[1]), float(q_n[2])
    d_ik = math.hypot(rx - vx, ry - vy)
    d_ra = math.sqrt((rx - qx) ** 2 + (ry - qy) ** 2 + qz ** 2)
    d_av = math.sqrt((vx - qx) ** 2 + (vy - qy) ** 2 + qz ** 2)
    h = complex(math.sqrt(cfg.h0) / d_ik, 0.0)
    cos_in = (rx - qx) / d_ra
    cos_out = (vx - qx) / d_av
    for m in range(cfg.M):
        kappa = 2.0 * math.pi / cfg.wavelength * cfg.d_M * m
        h_ra = math.sqrt(cfg.h1) / d_ra * cmath.exp(-1j * kappa * cos_in)
        g_av = math.sqrt(cfg.h1) / d_av * cmath.exp(-1j * kappa * cos_out)
        h += g_av.conjugate() * cmath.exp(1j * float(theta_n[m])) * h_ra
    return h


def recompute_report(state: NetworkState, cfg: NetworkConfig,
                     tables: ScenarioTables | None = None) -> RateReport:
    """Slot-by-slot scalar re-evaluation of rates and harvested energy."""
    if tables is None:
        tables = build_tables(cfg)
    R_c = np.zeros((cfg.I, cfg.K, cfg.N))
    R_p = np.zeros((cfg.I, cfg.K, cfg.N))
    Q = np.zeros((cfg.I, cfg.K, cfg.N))
    g2 = np.zeros((cfg.I, cfg.K, cfg.N))
    R_c_min = np.zeros((cfg.I, cfg.N))
    per_slot = np.zeros(cfg.N)
    rho, s2, e2 = state.rho, cfg.sigma2, cfg.eps2
    for n in range(cfg.N):
        for i in range(cfg.I):
            served = [k for k in range(cfg.K) if tables.assoc[i, k, n]]
            if not served:
                continue
            p0 = float(state.p[i, 0, n])
            p_priv = {k: float(state.p[i, 1 + k, n]) for k in served}
            total_priv = sum(p_priv.values())
            worst = math.inf
            for k in served:
                h = _effective_channel(cfg, i, k, n, state.q[n],
                                       state.theta[:, n])
                gain = abs(h) ** 2
                g2[i, k, n] = gain
                den_c = rho * (total_priv * gain + s2) + e2
                rc = math.log2(1.0 + rho * p0 * gain / den_c)
                den_p = rho * ((total_priv - p_priv[k]) * gain + s2) + e2
                rp = math.log2(1.0 + rho * p_priv[k] * gain / den_p)
                R_c[i, k, n] = rc
                R_p[i, k, n] = rp
                Q[i, k, n] = cfg.zeta * (1.0 - rho) * (p0 + total_priv) \
                    * gain * cfg.delta
                worst = min(worst, rc)
                per_slot[n] += float(state.C[i, k, n]) + rp
            R_c_min[i, n] = worst
    return RateReport(R_c=R_c, R_p=R_p, R_c_min=R_c_min, Q=Q, g2=g2,
                      R_tot_per_slot=per_slot, sum_rate=float(per_slot.sum()))


# -- exact-objective scan over the splitting ratio -----------------------------

@dataclass
class ScanResult:
    rho: float
    objective: float
    n_feasible: int
    n_total: int


def scan_rho(state: NetworkState, cfg: NetworkConfig, step: float = 1e-3,
             tables: ScenarioTables | None = None) -> ScanResult:
    """Best exact objective over rho in {0, step, ..., 1}, exact-feasibility
    filtered; ties resolve to the smaller rho."""
    if not 0.0 < step <= 0.5:
        raise ValueError("step must lie in (0, 0.5]")
    if tables is None:
        tables = build_tables(cfg)
    grid = [i * step for i in range(int(math.floor(1.0 / step)) + 1)]
    if grid[-1] < 1.0 - 1e-12:
        grid.append(1.0)
    best_rho, best_obj, feas = math.nan, -math.inf, 0
    for r in grid:
        cand = NetworkState(q=state.q, p=state.p, C=state.C,
                            theta=state.theta, rho=float(r))
        rep = evaluate(cand, cfg, tables)
        if check_feasibility(cand, cfg, tables, report=rep):
            continue
        feas += 1
        if rep.sum_rate > best_obj:
            best_rho, best_obj = float(r), rep.sum_rate
    return ScanResult(rho=best_rho, objective=best_obj,
                      n_feasible=feas, n_total=len(grid))


# -- exhaustive toy search ------------------------------------------------------

@dataclass
class GridResult:
    sum_rate: float
    rho: float
    q: np.ndarray            # (N, 3) best lattice trajectory
    split: np.ndarray        # (N,) common-power fraction per slot
    n_points: int            # rate evaluations performed


def _lattice_positions(cfg: NetworkConfig, n: int, lattice: float):
    """Lattice points reachable from both endpoints at slot n (0-based)."""
    if n == 0:
        return [(float(cfg.q0[0]), float(cfg.q0[1]))]
    if n == cfg.N - 1:
        return [(float(cfg.qf[0]), float(cfg.qf[1]))]
    r_fwd = n * cfg.V_max * cfg.delta
    r_bwd = (cfg.N - 1 - n) * cfg.V_max * cfg.delta
    x0, y0 = cfg.q0[0], cfg.q0[1]
    x1, y1 = cfg.qf[0], cfg.qf[1]
    pts = []
    lo_x = math.floor((min(x0 - r_fwd, x1 - r_bwd)) / lattice)
    hi_x = math.ceil((max(x0 + r_fwd, x1 + r_bwd)) / lattice)
    lo_y = math.floor((min(y0 - r_fwd, y1 - r_bwd)) / lattice)
    hi_y = math.ceil((max(y0 + r_fwd, y1 + r_bwd)) / lattice)
    for ix in range(lo_x, hi_x + 1):
        for iy in range(lo_y, hi_y + 1):
            x, y = ix * lattice, iy * lattice
            if math.hypot(x - x0, y - y0) <= r_fwd + 1e-9 and \
                    math.hypot(x - x1, y - y1) <= r_bwd + 1e-9:
                pts.append((x, y))
    return pts


def grid_search_small(cfg: NetworkConfig, *, lattice: float = 5.0,
                      power_step: float = 0.05, rho_step: float = 1e-2,
                      budget: int = 10 ** 7) -> GridResult:
    """Exhaustive search over (trajectory lattice, power split, rho).

    Requires I <= 1, K <= 1, N <= 4 and E_th = 0: with at most one served
    vehicle per slot and no energy coupling, slots decouple given rho, so the
    search is a per-slot table plus a shortest-path pass over speed-feasible
    transitions.  Phases use the closed-form alignment.  Ties resolve to the
    lowest (rho, lattice index) in scan order.
    """
    if cfg.I > 1 or cfg.K > 1 or cfg.N > 4:
        raise ValueError("exhaustive search limited to I <= 1, K <= 1, N <= 4")
    if cfg.E_th != 0.0:
        raise ValueError("exhaustive search requires E_th = 0 "
                         "(slots decouple only without the energy constraint)")
    tables = build_tables(cfg)
    positions = [_lattice_positions(cfg, n, lattice) for n in range(cfg.N)]
    if any(not p for p in positions):
        raise RuntimeError("lattice too coarse: a slot has no reachable point")

    n_splits = int(round(1.0 / power_step)) + 1
    n_rho = int(round(1.0 / rho_step)) + 1
    n_points = sum(len(p) for p in positions) * n_splits * n_rho
    if n_points > budget:
        raise ValueError(f"search space {n_points} exceeds budget {budget}")

    s2, e2, pw = cfg.sigma2, cfg.eps2, cfg.P_max
    splits = [j * power_step for j in range(n_splits)]
    rhos = [j * rho_step for j in range(n_rho)]

    # aligned |h|^2 per (slot, position); None when the slot serves nobody
    gains: list[list[float] | None] = []
    for n in range(cfg.N):
        sel = np.nonzero(tables.assoc[0, :, n])[0] if cfg.I == 1 else []
        if cfg.I == 0 or len(sel) == 0:
            gains.append(None)
            continue
        k = int(sel[0])
        rx, ry = _rsu_xy(cfg, 0)
        vx, vy = _veh_xy(cfg, k, n)
        d_ik = math.hypot(rx - vx, ry - vy)
        row = []
        for (x, y) in positions[n]:
            d_ra = math.sqrt((rx - x) ** 2 + (ry - y) ** 2 + cfg.H_U ** 2)
            d_av = math.sqrt((vx - x) ** 2 + (vy - y) ** 2 + cfg.H_U ** 2)
            amp = math.sqrt(cfg.h0) / d_ik + cfg.h1 * cfg.M / (d_ra * d_av)
            row.append(amp * amp)
        gains.append(row)

    def slot_table(n: int, rho: float):
        """(value, split) per position: best over the power split."""
        if gains[n] is None:
            return [(0.0, 0.0)] * len(positions[n])
        out = []
        for gain in gains[n]:
            best_v, best_s = -math.inf, 0.0
            for frac in splits:
                p0, p1 = frac * pw, (1.0 - frac) * pw
                rc = math.log2(1.0 + rho * p0 * gain
                               / (rho * (p1 * gain + s2) + e2))
                rp = math.log2(1.0 + rho * p1 * gain / (rho * s2 + e2))
                if rc + rp > best_v:
                    best_v, best_s = rc + rp, frac
            out.append((best_v, best_s))
        return out

    step_cap = cfg.V_max * cfg.delta + 1e-9
    best = (-math.inf, math.nan)     # (objective, rho)
    tables_by_rho = {}
    for rho in rhos:
        node = [slot_table(n, rho) for n in range(cfg.N)]
        dp = [node[0][0][0]]
        for n in range(1, cfg.N):
            nxt = []
            for (x, y) in positions[n]:
                reach = [dp[j] for j, (px, py) in enumerate(positions[n - 1])
                         if math.hypot(x - px, y - py) <= step_cap]
                nxt.append(max(reach) if reach else -math.inf)
            dp = [nxt[j] + node[n][j][0] for j in range(len(positions[n]))]
        total = dp[0]                # slot N-1 holds only qf
        if total > best[0]:
            best = (total, rho)
            tables_by_rho = {"node": node}

    # rebuild the arg-max path at the winning rho with parent pointers
    node = tables_by_rho["node"]
    rho = best[1]
    dp = [node[0][0][0]]
    parents: list[list[int]] = [[0]]
    for n in range(1, cfg.N):
        cur, par = [], []
        for j, (x, y) in enumerate(positions[n]):
            cand = [(dp[m], m) for m, (px, py) in enumerate(positions[n - 1])
                    if math.hypot(x - px, y - py) <= step_cap]
            v, m = max(cand, key=lambda t: t[0]) if cand else (-math.inf, -1)
            cur.append(v + node[n][j][0])
            par.append(m)
        dp = cur
        parents.append(par)
    path = [0]
    for n in range(cfg.N - 1, 0, -1):
        path.append(parents[n][path[-1]])
    path.reverse()
    q = np.zeros((cfg.N, 3))
    split = np.zeros(cfg.N)
    for n, j in enumerate(path):
        q[n, 0], q[n, 1] = positions[n][j]
        q[n, 2] = cfg.H_U
        split[n] = node[n][j][1]
    return GridResult(sum_rate=best[0], rho=rho, q=q, split=split,
                      n_points=n_points)
