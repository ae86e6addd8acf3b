"""Builders mapping the three block subproblems onto the canonical convex form.

* trajectory: maximize affine rate surrogates over the AIRS path and range
  slacks (u >= d_av^2, v >= d_ra^2 as quadratic cones, w / o as first-order
  distance under-estimators, per-(RSU, slot) epigraphs for the worst common
  rate), subject to speed limits and the harvested-energy lower bound.
* power/shares: maximize the DC rate minorants plus common-rate shares over
  transmit powers, subject to budgets, share caps and harvested energy.
* splitting: same DC construction over the scalar rho.

Internally positions are in km and powers in units of P_max so Newton sees
O(1) numbers; extraction undoes the scaling.  Builders always construct a
strictly feasible warm start when one exists near the incumbent; the solver's
phase-I covers incumbents pinned to a constraint boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .convex import (AffineRows, ConvexSubproblem, LogRows, Objective,
                     QuadRows)
from .scenario import (NetworkConfig, ScenarioTables, airside_geometry,
                       straight_line_trajectory)
from .rsma_swipt import NetworkState
from .surrogate import (LN2, power_surrogate, split_surrogate,
                        trajectory_surrogate)

__all__ = [
    "BuiltSubproblem",
    "SubproblemInfeasible",
    "trajectory_problem",
    "power_problem",
    "split_problem",
    "trajectory_is_forced",
]

KM = 1e-3      # meters -> kilometers
KM2 = 1e-6     # square meters -> square kilometers
RELAX = 1e-9   # interior slack on surrogate rate caps (rate units)


class SubproblemInfeasible(Exception):
    """A block subproblem has no feasible point; carries the reason."""


@dataclass
class BuiltSubproblem:
    problem: ConvexSubproblem
    extract: Callable[[np.ndarray], object]
    meta: dict


def _csr(entries, shape):
    if entries:
        rows, cols, vals = (np.array(z, dtype=float) for z in zip(*entries))
    else:
        rows = cols = vals = np.zeros(0)
    return sp.csr_matrix((vals, (rows.astype(int), cols.astype(int))),
                         shape=shape)


def _active_index(tables: ScenarioTables):
    act_i, act_n = np.nonzero(tables.active)
    act_id = -np.ones(tables.active.shape, dtype=int)
    act_id[act_i, act_n] = np.arange(act_i.size)
    return act_i, act_n, act_id


def trajectory_is_forced(cfg: NetworkConfig) -> bool:
    """True when the endpoints pin the trajectory to the straight line."""
    if cfg.N <= 2:
        return True
    span = float(np.linalg.norm(np.asarray(cfg.qf) - np.asarray(cfg.q0)))
    return span >= (cfg.N - 1) * cfg.V_max * cfg.delta * (1.0 - 1e-12)


def _strict_speed_start(cfg: NetworkConfig, q_l: np.ndarray) -> np.ndarray:
    """Blend the incumbent toward the straight line until speeds are strict."""
    line = straight_line_trajectory(cfg)
    cap = cfg.V_max * cfg.delta
    tau = 0.0
    while True:
        q_s = (1.0 - tau) * q_l + tau * line
        step = np.linalg.norm(np.diff(q_s, axis=0), axis=1)
        if step.max() < cap * (1.0 - 1e-12):
            return q_s
        tau = 1e-6 if tau == 0.0 else tau * 10.0
        if tau >= 1.0:
            return line


def trajectory_problem(cfg: NetworkConfig, tables: ScenarioTables,
                       state: NetworkState) -> BuiltSubproblem | None:
    """Build the trajectory step at the incumbent; None when q is forced."""
    if trajectory_is_forced(cfg):
        return None
    surro = trajectory_surrogate(cfg, tables, state)
    P = tables.n_pairs
    pi, pk, pn = tables.pair_i, tables.pair_k, tables.pair_n
    act_i, act_n, act_id = _active_index(tables)
    A_act = act_i.size
    pair_act = act_id[pi, pn]

    nq = cfg.N - 2
    x_off, y_off = 0, nq
    u_off = 2 * nq
    w_off = u_off + P
    v_off = w_off + P
    o_off = v_off + A_act
    eta_off = o_off + A_act
    n_vars = eta_off + A_act

    q_l = state.q
    d_ra_l, d_av_l, _, _ = airside_geometry(tables, q_l)
    u0 = surro.u0                      # d_av^2 per pair (m^2)
    v0_act = d_ra_l[act_i, act_n] ** 2

    def xcol(n):   # free-slot column or None for pinned endpoints
        return x_off + n - 1 if 1 <= n <= cfg.N - 2 else None

    # strictly feasible warm start near the incumbent; built first so rows
    # the incumbent is pinned to can be relaxed just enough to admit it
    q_s = _strict_speed_start(cfg, q_l)
    d_ra_s, d_av_s, _, _ = airside_geometry(tables, q_s)
    u_s = d_av_s[pk, pn] ** 2 * (1.0 + 1e-7) + 1e-6
    v_s = d_ra_s[act_i, act_n] ** 2 * (1.0 + 1e-7) + 1e-6

    def dlin_val(n, px, py, d2_l):
        if xcol(n) is None:
            return d2_l
        return (d2_l + 2.0 * (q_l[n, 0] - px) * (q_s[n, 0] - q_l[n, 0])
                + 2.0 * (q_l[n, 1] - py) * (q_s[n, 1] - q_l[n, 1]))

    w_s = np.array([dlin_val(int(pn[p]), tables.veh_pos[pk[p], 0, pn[p]],
                             tables.veh_pos[pk[p], 1, pn[p]], u0[p])
                    for p in range(P)])
    w_s = w_s * (1.0 - 1e-7) - 1e-6
    o_s = np.array([dlin_val(int(act_n[a]), tables.rsu_pos[act_i[a], 0],
                             tables.rsu_pos[act_i[a], 1], v0_act[a])
                    for a in range(A_act)])
    o_s = o_s * (1.0 - 1e-7) - 1e-6
    rc_start = (surro.common.const + surro.common.cu * u_s
                + surro.common.cv * v_s[pair_act] + surro.common.cw * w_s
                + surro.common.co * o_s[pair_act])
    eta_s = np.full(A_act, np.inf)
    np.minimum.at(eta_s, pair_act, rc_start)
    eta_s -= 1e-6 * (1.0 + np.abs(eta_s))
    q_start_energy = (surro.energy.const + surro.energy.cu * u_s
                      + surro.energy.cv * v_s[pair_act])

    # objective: sum of private-rate bounds plus per-(i, n) worst common rate
    c = np.zeros(n_vars)
    np.add.at(c, u_off + np.arange(P), surro.private.cu / KM2)
    np.add.at(c, w_off + np.arange(P), surro.private.cw / KM2)
    np.add.at(c, v_off + pair_act, surro.private.cv / KM2)
    np.add.at(c, o_off + pair_act, surro.private.co / KM2)
    c[eta_off:eta_off + A_act] = 1.0
    obj_const = float(surro.private.const.sum())

    # quadratic rows: range cones for u and v, speed limits
    sx, sy, qa = [], [], []
    tx, ty, qb = [], [], []
    row = 0
    h2 = (cfg.H_U * KM) ** 2
    for p in range(P):
        n = int(pn[p]); k = int(pk[p])
        vx, vy = tables.veh_pos[k, 0, n] * KM, tables.veh_pos[k, 1, n] * KM
        col = xcol(n)
        if col is None:
            tx.append(vx - q_l[n, 0] * KM); ty.append(vy - q_l[n, 1] * KM)
        else:
            sx.append((row, col, 1.0)); sy.append((row, col + nq, 1.0))
            tx.append(vx); ty.append(vy)
        qa.append((row, u_off + p, -1.0)); qb.append(h2)
        row += 1
    for a in range(A_act):
        n = int(act_n[a]); i = int(act_i[a])
        rx, ry = tables.rsu_pos[i, 0] * KM, tables.rsu_pos[i, 1] * KM
        col = xcol(n)
        if col is None:
            tx.append(rx - q_l[n, 0] * KM); ty.append(ry - q_l[n, 1] * KM)
        else:
            sx.append((row, col, 1.0)); sy.append((row, col + nq, 1.0))
            tx.append(rx); ty.append(ry)
        qa.append((row, v_off + a, -1.0)); qb.append(h2)
        row += 1
    cap2 = (cfg.V_max * cfg.delta * KM) ** 2
    for n in range(1, cfg.N):          # step q[n-1] -> q[n]
        fx = fy = 0.0
        for slot, sign in ((n, 1.0), (n - 1, -1.0)):
            col = xcol(slot)
            if col is None:
                fx -= sign * q_l[slot, 0] * KM
                fy -= sign * q_l[slot, 1] * KM
            else:
                sx.append((row, col, sign)); sy.append((row, col + nq, sign))
        tx.append(fx); ty.append(fy)
        qb.append(-cap2)
        row += 1
    quad = QuadRows(Sx=_csr(sx, (row, n_vars)), tx=np.array(tx),
                    Sy=_csr(sy, (row, n_vars)), ty=np.array(ty),
                    A=_csr(qa, (row, n_vars)), b=np.array(qb), label="cone")

    # affine rows: w / o under-estimator caps, harvested energy, share caps,
    # worst-common-rate epigraphs
    aff, ab = [], []
    row = 0

    def dlin_row(row_id, n, px, py, d2_l, slack_col):
        """slack - first-order-model(d^2) <= 0; returns the constant."""
        cst = -KM2 * d2_l
        col = xcol(n)
        if col is not None:
            cx = -2.0 * (q_l[n, 0] - px) * KM
            cy = -2.0 * (q_l[n, 1] - py) * KM
            aff.append((row_id, col, cx))
            aff.append((row_id, col + nq, cy))
            cst -= cx * q_l[n, 0] * KM + cy * q_l[n, 1] * KM
        aff.append((row_id, slack_col, 1.0))
        return cst

    for p in range(P):
        n = int(pn[p]); k = int(pk[p])
        ab.append(dlin_row(row, n, tables.veh_pos[k, 0, n],
                           tables.veh_pos[k, 1, n], u0[p], w_off + p))
        row += 1
    for a in range(A_act):
        n = int(act_n[a]); i = int(act_i[a])
        ab.append(dlin_row(row, n, tables.rsu_pos[i, 0], tables.rsu_pos[i, 1],
                           v0_act[a], o_off + a))
        row += 1

    if cfg.E_th > 0.0:
        escale = 1.0 / max(cfg.E_th, 1e-12)
        for k in range(cfg.K):
            sel = np.nonzero(pk == k)[0]
            if sel.size == 0:
                raise SubproblemInfeasible(
                    f"vehicle {k} is never served but E_th > 0")
            coefs = 0.0
            for p in sel:
                cu = surro.energy.cu[p] / KM2 * escale
                cv = surro.energy.cv[p] / KM2 * escale
                aff.append((row, u_off + p, -cu))
                aff.append((row, v_off + pair_act[p], -cv))
                coefs += abs(cu) + abs(cv)
            # admit an incumbent pinned to the threshold, but never absorb a
            # violation beyond the feasibility tolerance (rows are scaled so
            # E_th reads as 1.0 here)
            start_val = (cfg.E_th - float(q_start_energy[sel].sum())) * escale
            relax = min(max(0.0, start_val), 2e-6) + 1e-9
            b_val = (cfg.E_th - float(surro.energy.const[sel].sum())) * escale \
                - relax
            if coefs == 0.0 and b_val > 0.0:
                raise SubproblemInfeasible(
                    "harvested energy is identically zero (rho = 1) "
                    "but E_th > 0")
            ab.append(b_val)
            row += 1

    sumC = np.where(tables.assoc, state.C, 0.0).sum(axis=1)
    for p in range(P):
        share = float(sumC[pi[p], pn[p]])
        if share <= 1e-12:
            continue    # zero shares: the cap is vacuous in the exact problem
        aff.append((row, u_off + p, -surro.common.cu[p] / KM2))
        aff.append((row, v_off + pair_act[p], -surro.common.cv[p] / KM2))
        aff.append((row, w_off + p, -surro.common.cw[p] / KM2))
        aff.append((row, o_off + pair_act[p], -surro.common.co[p] / KM2))
        relax = min(max(0.0, share - float(rc_start[p])),
                    1e-6 * (1.0 + abs(share))) + RELAX
        ab.append(share - float(surro.common.const[p]) - relax)
        row += 1
    for p in range(P):
        aff.append((row, eta_off + pair_act[p], 1.0))
        aff.append((row, u_off + p, -surro.common.cu[p] / KM2))
        aff.append((row, v_off + pair_act[p], -surro.common.cv[p] / KM2))
        aff.append((row, w_off + p, -surro.common.cw[p] / KM2))
        aff.append((row, o_off + pair_act[p], -surro.common.co[p] / KM2))
        ab.append(-float(surro.common.const[p]))
        row += 1
    affine = AffineRows(A=_csr(aff, (row, n_vars)), b=np.array(ab),
                        label="lin")

    x0 = np.zeros(n_vars)
    x0[x_off:x_off + nq] = q_s[1:-1, 0] * KM
    x0[y_off:y_off + nq] = q_s[1:-1, 1] * KM
    x0[u_off:u_off + P] = u_s * KM2
    x0[w_off:w_off + P] = w_s * KM2
    x0[v_off:v_off + A_act] = v_s * KM2
    x0[o_off:o_off + A_act] = o_s * KM2
    x0[eta_off:eta_off + A_act] = eta_s

    problem = ConvexSubproblem(
        n=n_vars,
        objective=Objective(c=c, const=obj_const),
        affine=affine, quad=quad, logrows=None, x0=x0,
        var_names={"x": np.arange(x_off, x_off + nq),
                   "y": np.arange(y_off, y_off + nq),
                   "u": np.arange(u_off, u_off + P),
                   "w": np.arange(w_off, w_off + P),
                   "v": np.arange(v_off, v_off + A_act),
                   "o": np.arange(o_off, o_off + A_act),
                   "eta": np.arange(eta_off, eta_off + A_act)},
        name="trajectory")

    def extract(x):
        q_new = q_l.copy()
        q_new[1:-1, 0] = x[x_off:x_off + nq] / KM
        q_new[1:-1, 1] = x[y_off:y_off + nq] / KM
        q_new[:, 2] = cfg.H_U
        return q_new

    return BuiltSubproblem(problem=problem, extract=extract,
                           meta={"surrogate": surro, "pair_act": pair_act,
                                 "offsets": {"u": u_off, "v": v_off,
                                             "w": w_off, "o": o_off,
                                             "eta": eta_off}})


def power_problem(cfg: NetworkConfig, tables: ScenarioTables,
                  state: NetworkState) -> BuiltSubproblem:
    """Build the joint power/share step at the incumbent (q, theta, rho fixed)."""
    surro = power_surrogate(cfg, tables, state)
    P = tables.n_pairs
    pi, pk, pn = tables.pair_i, tables.pair_k, tables.pair_n
    act_i, act_n, act_id = _active_index(tables)
    A_act = act_i.size
    pair_act = act_id[pi, pn]
    members = [np.nonzero(pair_act == a)[0] for a in range(A_act)]

    rho, s2, e2 = state.rho, cfg.sigma2, cfg.eps2
    if rho <= 1e-12:
        raise SubproblemInfeasible(
            "rho = 0 leaves no decodable signal; power step undefined")
    if cfg.E_th > 0.0:
        for k in range(cfg.K):
            sel = np.nonzero(pk == k)[0]
            best = cfg.zeta * (1.0 - rho) * cfg.delta * cfg.P_max \
                * float(surro.g2[sel].sum()) if sel.size else 0.0
            if best < cfg.E_th * (1.0 - 1e-9):
                raise SubproblemInfeasible(
                    f"vehicle {k}: even the full budget harvests "
                    f"{best:.3e} J < E_th")

    p0_off, pp_off, c_off = 0, A_act, A_act + P
    n_vars = A_act + 2 * P
    pw = cfg.P_max

    c = np.zeros(n_vars)
    c[c_off:c_off + P] = 1.0
    obj_const = 0.0
    wlog, alog, blog = [], [], []
    for p in range(P):
        grp = members[pair_act[p]]
        coef = rho * surro.g2[p] * pw
        for p2 in grp:
            alog.append((p, pp_off + p2, coef))
            if p2 != p:
                c[pp_off + p2] -= surro.grad_p[p] * pw
        blog.append(rho * s2 + e2)
        wlog.append(1.0 / LN2)
        obj_const += (-np.log2(surro.denom_p[p])
                      + surro.grad_p[p] * (surro.priv_sum0[p] - surro.own0[p]))
    objective = Objective(c=c, w=np.array(wlog),
                          Alog=_csr(alog, (P, n_vars)), blog=np.array(blog),
                          const=obj_const)

    # share caps: sum_k C - R_c^dc1 <= 0, one log row per served pair
    la, lb, lw, lc, ld = [], [], [], [], []
    for p in range(P):
        grp = members[pair_act[p]]
        for p2 in grp:
            la.append((p, c_off + p2, 1.0))
            la.append((p, pp_off + p2, surro.grad_c[p] * pw))
            lc.append((p, pp_off + p2, rho * surro.g2[p] * pw))
        lc.append((p, p0_off + pair_act[p], rho * surro.g2[p] * pw))
        lb.append(np.log2(surro.denom_c[p])
                  - surro.grad_c[p] * surro.priv_sum0[p] - RELAX)
        lw.append(1.0 / LN2)
        ld.append(rho * s2 + e2)
    logrows = LogRows(A=_csr(la, (P, n_vars)), b=np.array(lb),
                      w=np.array(lw), Cm=_csr(lc, (P, n_vars)),
                      d=np.array(ld), label="share_cap")

    # warm start: blend incumbent toward a uniform half-budget interior point
    tau = 1e-4
    p_priv_l = np.where(tables.assoc, state.p_private, 0.0)
    x0 = np.zeros(n_vars)
    for a in range(A_act):
        share = 0.5 / (members[a].size + 1)
        x0[p0_off + a] = (1 - tau) * state.p_common[act_i[a], act_n[a]] / pw \
            + tau * share
        for p2 in members[a]:
            x0[pp_off + p2] = (1 - tau) * p_priv_l[pi[p2], pk[p2], pn[p2]] / pw \
                + tau * share
    start_rc = np.empty(P)
    for p in range(P):
        grp = members[pair_act[p]]
        tot = x0[p0_off + pair_act[p]] + x0[pp_off + grp].sum()
        priv = x0[pp_off + grp].sum()
        start_rc[p] = (np.log2(rho * (tot * pw * surro.g2[p] + s2) + e2)
                       - np.log2(surro.denom_c[p])
                       - surro.grad_c[p] * (priv * pw - surro.priv_sum0[p]))
    for a in range(A_act):
        grp = members[a]
        cap = min(start_rc[grp].min(), 1.0)
        x0[c_off + grp] = max(cap, 1e-9) * 0.4 / grp.size

    aff, ab = [], []
    row = 0
    if cfg.E_th > 0.0:
        escale = 1.0 / max(cfg.E_th, 1e-12)
        gain = cfg.zeta * (1.0 - rho) * cfg.delta * pw * escale
        for k in range(cfg.K):
            harv_start = 0.0
            for p in np.nonzero(pk == k)[0]:
                aff.append((row, p0_off + pair_act[p], -gain * surro.g2[p]))
                for p2 in members[pair_act[p]]:
                    aff.append((row, pp_off + p2, -gain * surro.g2[p]))
                grp = members[pair_act[p]]
                harv_start += gain * surro.g2[p] * (
                    x0[p0_off + pair_act[p]] + x0[pp_off + grp].sum())
            # admit an incumbent pinned to the threshold (see trajectory step)
            relax = min(max(0.0, cfg.E_th * escale - harv_start), 2e-6) + 1e-9
            ab.append(cfg.E_th * escale - relax)
            row += 1
    for a in range(A_act):
        aff.append((row, p0_off + a, 1.0))
        for p2 in members[a]:
            aff.append((row, pp_off + p2, 1.0))
        ab.append(-1.0)
        row += 1
    for j in range(n_vars):
        aff.append((row, j, -1.0))
        ab.append(0.0)
        row += 1
    affine = AffineRows(A=_csr(aff, (row, n_vars)), b=np.array(ab),
                        label="lin")

    problem = ConvexSubproblem(
        n=n_vars, objective=objective, affine=affine, quad=None,
        logrows=logrows, x0=x0,
        var_names={"p0": np.arange(p0_off, p0_off + A_act),
                   "p": np.arange(pp_off, pp_off + P),
                   "C": np.arange(c_off, c_off + P)},
        name="power_rate")

    def extract(x):
        p_new = np.zeros_like(state.p)
        C_new = np.zeros_like(state.C)
        p_new[act_i, 0, act_n] = x[p0_off:p0_off + A_act] * pw
        p_new[pi, 1 + pk, pn] = x[pp_off:pp_off + P] * pw
        C_new[pi, pk, pn] = x[c_off:c_off + P]
        return p_new, C_new

    return BuiltSubproblem(problem=problem, extract=extract,
                           meta={"surrogate": surro, "members": members})


def split_problem(cfg: NetworkConfig, tables: ScenarioTables,
                  state: NetworkState) -> BuiltSubproblem:
    """Build the power-splitting step at the incumbent (q, theta, p fixed).

    The shares ride along as variables, exactly as in the power step: with
    them frozen at a binding value the concave lower bound of the common rate
    peaks at the expansion point and the splitting ratio cannot move, so the
    step re-optimizes (rho, C) jointly against the surrogate share caps.
    """
    surro = split_surrogate(cfg, tables, state)
    P = tables.n_pairs
    pi, pk, pn = tables.pair_i, tables.pair_k, tables.pair_n
    act_i, act_n, act_id = _active_index(tables)
    pair_act = act_id[pi, pn]
    members = [np.nonzero(pair_act == a)[0] for a in range(act_i.size)]
    e2 = cfg.eps2
    rho0 = surro.rho0
    n_vars = 1 + P

    c = np.zeros(n_vars)
    c[0] = -float(surro.grad_p.sum())
    c[1:] = 1.0
    obj_const = float(
        (-np.log2(rho0 * surro.S_int + e2) + surro.grad_p * rho0).sum())
    alog = [(p, 0, surro.S_priv[p]) for p in range(P)]
    objective = Objective(c=c, w=np.full(P, 1.0 / LN2),
                          Alog=_csr(alog, (P, n_vars)),
                          blog=np.full(P, e2), const=obj_const)

    # share caps: sum_k C - R_c^dc2(rho) <= 0, one log row per served pair
    la, lb, lcm = [], [], []
    for p in range(P):
        la.append((p, 0, surro.grad_c[p]))
        for p2 in members[pair_act[p]]:
            la.append((p, 1 + p2, 1.0))
        lb.append(np.log2(rho0 * surro.S_priv[p] + e2)
                  - surro.grad_c[p] * rho0 - RELAX)
        lcm.append((p, 0, surro.S_full[p]))
    logrows = LogRows(A=_csr(la, (P, n_vars)), b=np.array(lb),
                      w=np.full(P, 1.0 / LN2), Cm=_csr(lcm, (P, n_vars)),
                      d=np.full(P, e2), label="share_cap")

    x0 = np.zeros(n_vars)
    x0[0] = float(np.clip(rho0, 1e-6, 1.0 - 1e-6))
    start_rc = (np.log2(x0[0] * surro.S_full + e2)
                - np.log2(rho0 * surro.S_priv + e2)
                - surro.grad_c * (x0[0] - rho0))
    for a, grp in enumerate(members):
        cap = min(float(start_rc[grp].min()), 1.0)
        x0[1 + grp] = max(cap, 1e-9) * 0.4 / grp.size

    aff, ab = [(0, 0, -1.0), (1, 0, 1.0)], [0.0, -1.0]
    row = 2
    if cfg.E_th > 0.0:
        escale = 1.0 / max(cfg.E_th, 1e-12)
        for k in range(cfg.K):
            sel = np.nonzero(pk == k)[0]
            # S_full - sigma2 is total transmit power times channel gain
            hk = cfg.zeta * cfg.delta * float(
                (surro.S_full[sel] - cfg.sigma2).sum()) if sel.size else 0.0
            if hk <= 0.0:
                raise SubproblemInfeasible(
                    f"vehicle {k} harvests nothing at any rho")
            # admit an incumbent pinned to the threshold (see trajectory step)
            start_val = (cfg.E_th - (1.0 - x0[0]) * hk) * escale
            relax = min(max(0.0, start_val), 2e-6) + 1e-9
            aff.append((row, 0, hk * escale))
            ab.append((cfg.E_th - hk) * escale - relax)
            row += 1
    for p in range(P):
        aff.append((row, 1 + p, -1.0))
        ab.append(0.0)
        row += 1
    affine = AffineRows(A=_csr(aff, (row, n_vars)), b=np.array(ab),
                        label="lin")
    problem = ConvexSubproblem(n=n_vars, objective=objective, affine=affine,
                               quad=None, logrows=logrows, x0=x0,
                               var_names={"rho": np.array([0]),
                                          "C": np.arange(1, n_vars)},
                               name="power_split")

    def extract(x):
        C_new = np.zeros_like(state.C)
        C_new[pi, pk, pn] = np.maximum(x[1:], 0.0)
        return float(np.clip(x[0], 0.0, 1.0)), C_new

    return BuiltSubproblem(problem=problem, extract=extract,
                           meta={"surrogate": surro, "members": members})
