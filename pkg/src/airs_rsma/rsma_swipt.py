"""Exact rate and harvested-energy evaluation for the rate-splitting receiver.

Every vehicle splits its received signal: a fraction rho feeds the decoder,
1 - rho feeds the energy harvester.  The common stream is decoded first
(treating all private streams as interference) and removed; the private
stream then sees only the other private streams.  With |h|^2 = g2 and powers
p_0 (common), p_j (private):

    R_c = log2(1 + rho*p_0*g2 / (rho*(sum_j p_j*g2 + sigma2) + eps2))
    R_p = log2(1 + rho*p_k*g2 / (rho*(sum_{j!=k} p_j*g2 + sigma2) + eps2))
    Q   = zeta*(1 - rho)*(p_0 + sum_j p_j)*g2*delta        (joules per slot)

The common rate is shared through per-vehicle allocations C_{i,k}[n] with
sum_k C_{i,k}[n] <= R_c for every vehicle RSU i serves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import (NetworkConfig, ScenarioTables, Violation, build_tables,
                       validate_trajectory)
from .channel import effective_gains

__all__ = [
    "NetworkState",
    "RateReport",
    "common_rate",
    "private_rate",
    "harvested_energy",
    "evaluate",
    "check_feasibility",
]


@dataclass
class NetworkState:
    """One candidate operating point of the whole system.

    p has a leading stream axis: index 0 is the common stream, index 1 + k
    the private stream of vehicle k (0-based).  Entries outside the
    association mask are kept at zero.
    """

    q: np.ndarray        # (N, 3) AIRS trajectory
    p: np.ndarray        # (I, 1 + K, N) transmit powers (W)
    C: np.ndarray        # (I, K, N) common-rate shares (bit/s/Hz)
    theta: np.ndarray    # (M, N) reflection phases
    rho: float           # power-splitting ratio in [0, 1]

    @property
    def p_common(self) -> np.ndarray:
        return self.p[:, 0, :]

    @property
    def p_private(self) -> np.ndarray:
        return self.p[:, 1:, :]

    def copy(self) -> "NetworkState":
        return NetworkState(self.q.copy(), self.p.copy(), self.C.copy(),
                            self.theta.copy(), float(self.rho))


@dataclass
class RateReport:
    """Exact per-link rates and harvested energy for one state."""

    R_c: np.ndarray             # (I, K, N) common rate at each served vehicle
    R_p: np.ndarray             # (I, K, N) private rates
    R_c_min: np.ndarray         # (I, N) min common rate over served vehicles
    Q: np.ndarray               # (I, K, N) harvested energy (J)
    g2: np.ndarray              # (I, K, N) effective channel gains |h|^2
    R_tot_per_slot: np.ndarray  # (N,) sum of C + R_p over served pairs
    sum_rate: float             # objective: total over all slots


def _rate(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    return np.log2(1.0 + num / den)


def common_rate(rho: float, p0, g2, p_priv_sum, sigma2: float, eps2: float):
    """R_c given total private power p_priv_sum at the decoding vehicle."""
    return _rate(rho * p0 * g2, rho * (p_priv_sum * g2 + sigma2) + eps2)


def private_rate(rho: float, p_k, g2, p_other_sum, sigma2: float, eps2: float):
    """R_p given total interfering private power p_other_sum."""
    return _rate(rho * p_k * g2, rho * (p_other_sum * g2 + sigma2) + eps2)


def harvested_energy(zeta: float, rho: float, p_total, g2, delta: float):
    """Per-slot harvested energy zeta*(1-rho)*p_total*g2*delta."""
    return zeta * (1.0 - rho) * p_total * g2 * delta


def evaluate(state: NetworkState, cfg: NetworkConfig,
             tables: ScenarioTables | None = None) -> RateReport:
    """Exact rates, common-rate minima and harvested energy for a state."""
    if tables is None:
        tables = build_tables(cfg)
    pi, pk, pn = tables.pair_i, tables.pair_k, tables.pair_n
    g2_pairs = effective_gains(cfg, tables, state.q, state.theta)

    p_priv = np.where(tables.assoc, state.p_private, 0.0)
    priv_sum = p_priv.sum(axis=1)                       # (I, N)
    p0 = state.p_common                                  # (I, N)

    s_priv = priv_sum[pi, pn]
    s_other = np.maximum(s_priv - p_priv[pi, pk, pn], 0.0)
    rc = common_rate(state.rho, p0[pi, pn], g2_pairs, s_priv,
                     cfg.sigma2, cfg.eps2)
    rp = private_rate(state.rho, p_priv[pi, pk, pn], g2_pairs, s_other,
                      cfg.sigma2, cfg.eps2)
    q_pairs = harvested_energy(cfg.zeta, state.rho,
                               p0[pi, pn] + s_priv, g2_pairs, cfg.delta)

    shape = (cfg.I, cfg.K, cfg.N)
    R_c = np.zeros(shape); R_c[pi, pk, pn] = rc
    R_p = np.zeros(shape); R_p[pi, pk, pn] = rp
    Q = np.zeros(shape); Q[pi, pk, pn] = q_pairs
    g2 = np.zeros(shape); g2[pi, pk, pn] = g2_pairs

    R_c_min = np.where(tables.active,
                       np.where(tables.assoc, R_c, np.inf).min(axis=1), 0.0)
    C = np.where(tables.assoc, state.C, 0.0)
    per_slot = (C + R_p).sum(axis=(0, 1))
    return RateReport(R_c=R_c, R_p=R_p, R_c_min=R_c_min, Q=Q, g2=g2,
                      R_tot_per_slot=per_slot,
                      sum_rate=float(per_slot.sum()))


def check_feasibility(state: NetworkState, cfg: NetworkConfig,
                      tables: ScenarioTables | None = None,
                      tol_feas: float = 1e-6,
                      report: RateReport | None = None) -> list[Violation]:
    """All violated constraints of the exact problem; [] means feasible.

    Checks harvested energy per vehicle, per-RSU power budgets, power and
    share nonnegativity (and zeroing off the association mask), common-rate
    share caps, trajectory endpoints and speed, the splitting ratio range,
    and phase wrapping.
    """
    if tables is None:
        tables = build_tables(cfg)
    out = list(validate_trajectory(state.q, cfg, tol_feas))
    if report is None:
        report = evaluate(state, cfg, tables)

    if not -tol_feas <= state.rho <= 1.0 + tol_feas:
        out.append(Violation("rho_range", (), float(max(-state.rho,
                                                        state.rho - 1.0))))
    if state.theta.size:
        worst = float(max(-state.theta.min(), state.theta.max() - 2 * np.pi))
        if worst > tol_feas:
            out.append(Violation("phase_range", (), worst))

    # the energy threshold can be many orders below 1 J, so judge it
    # relative to E_th rather than against the absolute tolerance
    harvested = report.Q.sum(axis=(0, 2))               # (K,)
    for k in np.nonzero(harvested < cfg.E_th * (1.0 - tol_feas))[0]:
        out.append(Violation("harvested_energy", (int(k),),
                             float(cfg.E_th - harvested[k])))

    totals = state.p.sum(axis=1)                        # (I, N)
    for i, n in zip(*np.nonzero(totals > cfg.P_max + tol_feas)):
        out.append(Violation("power_budget", (int(i), int(n)),
                             float(totals[i, n] - cfg.P_max)))
    if state.p.min() < -tol_feas:
        idx = np.unravel_index(int(np.argmin(state.p)), state.p.shape)
        out.append(Violation("power_nonneg", tuple(map(int, idx)),
                             float(-state.p.min())))
    if state.C.min() < -tol_feas:
        idx = np.unravel_index(int(np.argmin(state.C)), state.C.shape)
        out.append(Violation("share_nonneg", tuple(map(int, idx)),
                             float(-state.C.min())))

    stray_p = np.abs(np.where(tables.assoc, 0.0, state.p_private))
    if stray_p.max() > tol_feas:
        idx = np.unravel_index(int(np.argmax(stray_p)), stray_p.shape)
        out.append(Violation("power_off_mask", tuple(map(int, idx)),
                             float(stray_p.max())))
    stray_p0 = np.abs(np.where(tables.active, 0.0, state.p_common))
    if stray_p0.max() > tol_feas:
        idx = np.unravel_index(int(np.argmax(stray_p0)), stray_p0.shape)
        out.append(Violation("power_off_mask", (int(idx[0]), 0, int(idx[1])),
                             float(stray_p0.max())))
    stray_c = np.abs(np.where(tables.assoc, 0.0, state.C))
    if stray_c.max() > tol_feas:
        idx = np.unravel_index(int(np.argmax(stray_c)), stray_c.shape)
        out.append(Violation("share_off_mask", tuple(map(int, idx)),
                             float(stray_c.max())))

    share_sum = np.where(tables.assoc, state.C, 0.0).sum(axis=1)  # (I, N)
    gap = share_sum[:, None, :] - report.R_c            # (I, K, N)
    gap = np.where(tables.assoc, gap, -np.inf)
    for i, k, n in zip(*np.nonzero(gap > tol_feas)):
        out.append(Violation("common_share_cap", (int(i), int(k), int(n)),
                             float(gap[i, k, n])))
    return out
