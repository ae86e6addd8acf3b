"""Convex surrogates used by the block subproblems.

Three families, all tight at the expansion point:

1.  Trajectory step: with slack variables u >= d_av^2, v >= d_ra^2 (and
    first-order distance under-estimators w <= d_av^2, o <= d_ra^2), the
    aligned channel power is bracketed by

        A + B/sqrt(f*g) + C/(f*g),   A = h0/d_ik^2,
                                     B = 2*sqrt(h0)*h1*M/d_ik,
                                     C = h1^2*M^2,

    evaluated at (u, v) for the lower and (w, o) for the upper bound.  Rates
    are differences of logs of such terms; each log is linearized in the
    slacks around the incumbent, giving affine rate under-estimators.  The
    harvested-energy bound stays affine in (u, v) directly.

2.  Power step: the rate is a difference of logs that are concave in the
    powers; the subtracted log is linearized at the incumbent powers
    (a difference-of-convex, DC, minorant).

3.  Splitting step: same DC construction in the scalar rho.

The subtracted-log linearizations make 2 and 3 global minorants of the exact
rates.  The trajectory surrogate is tight with matching gradient but not a
global minorant (the subtracted log is linearized in slacks it is convex in),
which is why the driver re-checks candidate steps against exact rates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import NetworkConfig, ScenarioTables, airside_geometry
from .channel import effective_gains
from .rsma_swipt import NetworkState

__all__ = [
    "gain_expansion_constants",
    "bound_gain",
    "bound_gain_df",
    "bound_gain_dg",
    "gain_bounds",
    "taylor_family",
    "TrajectorySurrogate",
    "trajectory_surrogate",
    "PowerSurrogate",
    "power_surrogate",
    "dc1_rates",
    "SplitSurrogate",
    "split_surrogate",
    "dc2_rates",
]

LN2 = np.log(2.0)


# -- aligned-gain bracketing -------------------------------------------------

def gain_expansion_constants(cfg: NetworkConfig, d_ik):
    """Constants (A, B, C) of the squared aligned gain in the slack pair.

    (sqrt(h0)/d_ik + h1*M/(d_ra*d_av))^2 == A + B/sqrt(u*v) + C/(u*v)
    exactly when u = d_av^2 and v = d_ra^2.
    """
    d_ik = np.asarray(d_ik, dtype=float)
    A = cfg.h0 / d_ik ** 2
    B = 2.0 * np.sqrt(cfg.h0) * cfg.h1 * cfg.M / d_ik
    C = (cfg.h1 * cfg.M) ** 2
    return A, B, np.broadcast_to(C, A.shape).astype(float)


def bound_gain(A, B, C, f, g):
    fg = np.asarray(f) * np.asarray(g)
    return A + B / np.sqrt(fg) + C / fg


def bound_gain_df(A, B, C, f, g):
    """d/df of :func:`bound_gain` (negative: gain falls with range)."""
    f = np.asarray(f); g = np.asarray(g)
    return -(B / (2.0 * f ** 1.5 * np.sqrt(g)) + C / (f * f * g))


def bound_gain_dg(A, B, C, f, g):
    f = np.asarray(f); g = np.asarray(g)
    return -(B / (2.0 * np.sqrt(f) * g ** 1.5) + C / (f * g * g))


def gain_bounds(u, v, w, o, A, B, C):
    """(lower, upper) bracketing of the squared aligned gain.

    Valid whenever u >= d_av^2 >= w and v >= d_ra^2 >= o.
    """
    return bound_gain(A, B, C, u, v), bound_gain(A, B, C, w, o)


def taylor_family(P_set, rho, sigma2, eps2, A, B, C, f0, g0):
    """Value and slack-gradients of one log argument at expansion (f0, g0).

    X = rho*(P_set*bound_gain(f0, g0) + sigma2) + eps2, with Y = dX/df and
    Z = dX/dg.  P_set is the total power of the streams inside the log.
    """
    X = rho * (P_set * bound_gain(A, B, C, f0, g0) + sigma2) + eps2
    Y = rho * P_set * bound_gain_df(A, B, C, f0, g0)
    Z = rho * P_set * bound_gain_dg(A, B, C, f0, g0)
    return X, Y, Z


# -- trajectory-step surrogate ------------------------------------------------

@dataclass
class AffineInSlacks:
    """value = const + cu*u + cv*v + cw*w + co*o, arrays indexed per pair."""

    const: np.ndarray
    cu: np.ndarray
    cv: np.ndarray
    cw: np.ndarray
    co: np.ndarray

    def __call__(self, u, v, w, o):
        return self.const + self.cu * u + self.cv * v + self.cw * w + self.co * o


@dataclass
class TrajectorySurrogate:
    """Per-served-pair affine rate/energy bounds around an incumbent state.

    Arrays follow the pair order of :class:`ScenarioTables`; u/v/w/o slacks are
    indexed per pair even though v and o physically belong to the (RSU, slot)
    of the pair.
    """

    u0: np.ndarray           # expansion d_av^2 per pair
    v0: np.ndarray           # expansion d_ra^2 per pair
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    P_all: np.ndarray        # common + private power at the pair's (i, n)
    P_priv: np.ndarray
    P_int: np.ndarray        # private power excluding the pair's own stream
    rho: float
    common: AffineInSlacks   # lower bound on the common rate
    private: AffineInSlacks  # lower bound on the private rate
    energy: AffineInSlacks   # lower bound on harvested energy (cw = co = 0)


def _affine_from_families(X_num, Y_num, Z_num, X_den, Y_den, Z_den, u0, v0):
    cu = Y_num / (X_num * LN2)
    cv = Z_num / (X_num * LN2)
    cw = -Y_den / (X_den * LN2)
    co = -Z_den / (X_den * LN2)
    const = (np.log2(X_num) - np.log2(X_den)
             - cu * u0 - cv * v0 - cw * u0 - co * v0)
    return AffineInSlacks(const=const, cu=cu, cv=cv, cw=cw, co=co)


def trajectory_surrogate(cfg: NetworkConfig, tables: ScenarioTables,
                         state: NetworkState) -> TrajectorySurrogate:
    """Build the affine rate/energy bounds at the state's trajectory.

    Powers, shares and rho are held fixed; all slack expansions are tight
    (u0 = d_av^2, v0 = d_ra^2 of the incumbent trajectory), so every bound
    reproduces the aligned-channel exact value at the expansion.
    """
    pi, pk, pn = tables.pair_i, tables.pair_k, tables.pair_n
    d_ra, d_av, _, _ = airside_geometry(tables, state.q)
    u0 = d_av[pk, pn] ** 2
    v0 = d_ra[pi, pn] ** 2
    A, B, C = gain_expansion_constants(cfg, tables.d_direct[pi, pk, pn])

    p_priv = np.where(tables.assoc, state.p_private, 0.0)
    priv_sum = p_priv.sum(axis=1)
    P_priv = priv_sum[pi, pn]
    P_all = state.p_common[pi, pn] + P_priv
    P_int = np.maximum(P_priv - p_priv[pi, pk, pn], 0.0)

    rho, s2, e2 = state.rho, cfg.sigma2, cfg.eps2
    Xa, Ya, Za = taylor_family(P_all, rho, s2, e2, A, B, C, u0, v0)
    Xp, Yp, Zp = taylor_family(P_priv, rho, s2, e2, A, B, C, u0, v0)
    Xi, Yi, Zi = taylor_family(P_int, rho, s2, e2, A, B, C, u0, v0)

    common = _affine_from_families(Xa, Ya, Za, Xp, Yp, Zp, u0, v0)
    private = _affine_from_families(Xp, Yp, Zp, Xi, Yi, Zi, u0, v0)

    scale = cfg.zeta * (1.0 - rho) * cfg.delta * P_all
    j0 = scale * bound_gain(A, B, C, u0, v0)
    ku = scale * bound_gain_df(A, B, C, u0, v0)
    lv = scale * bound_gain_dg(A, B, C, u0, v0)
    energy = AffineInSlacks(const=j0 - ku * u0 - lv * v0, cu=ku, cv=lv,
                            cw=np.zeros_like(ku), co=np.zeros_like(lv))
    return TrajectorySurrogate(u0=u0, v0=v0, A=A, B=B, C=C,
                               P_all=P_all, P_priv=P_priv, P_int=P_int,
                               rho=rho, common=common, private=private,
                               energy=energy)


# -- power-step surrogate (DC in p) -------------------------------------------

@dataclass
class PowerSurrogate:
    """Per-pair DC minorant data for the power/share subproblem."""

    g2: np.ndarray           # |h_eff|^2 per pair under the incumbent phases
    rho: float
    priv_sum0: np.ndarray    # incumbent private power total at the pair's (i, n)
    own0: np.ndarray         # incumbent own private power of the pair
    denom_c: np.ndarray      # subtracted-log argument for the common rate
    denom_p: np.ndarray      # subtracted-log argument for the private rate
    grad_c: np.ndarray       # d(log2 denom)/d p_j, any private j
    grad_p: np.ndarray


def power_surrogate(cfg: NetworkConfig, tables: ScenarioTables,
                    state: NetworkState) -> PowerSurrogate:
    """Expand the DC power minorant at the state's powers (q, theta, rho fixed)."""
    pi, pk, pn = tables.pair_i, tables.pair_k, tables.pair_n
    g2 = effective_gains(cfg, tables, state.q, state.theta)
    p_priv = np.where(tables.assoc, state.p_private, 0.0)
    priv_sum0 = p_priv.sum(axis=1)[pi, pn]
    own0 = p_priv[pi, pk, pn]
    rho, s2, e2 = state.rho, cfg.sigma2, cfg.eps2
    denom_c = rho * (priv_sum0 * g2 + s2) + e2
    denom_p = rho * (np.maximum(priv_sum0 - own0, 0.0) * g2 + s2) + e2
    return PowerSurrogate(g2=g2, rho=rho, priv_sum0=priv_sum0, own0=own0,
                          denom_c=denom_c, denom_p=denom_p,
                          grad_c=rho * g2 / (denom_c * LN2),
                          grad_p=rho * g2 / (denom_p * LN2))


def dc1_rates(p: np.ndarray, surro: PowerSurrogate, cfg: NetworkConfig,
              tables: ScenarioTables):
    """Evaluate the DC power minorants (R_c, R_p per pair) at powers ``p``."""
    pi, pk, pn = tables.pair_i, tables.pair_k, tables.pair_n
    p_priv = np.where(tables.assoc, p[:, 1:, :], 0.0)
    priv_sum = p_priv.sum(axis=1)[pi, pn]
    own = p_priv[pi, pk, pn]
    p0 = p[:, 0, :][pi, pn]
    rho, s2, e2 = surro.rho, cfg.sigma2, cfg.eps2
    g2 = surro.g2
    rc = (np.log2(rho * ((p0 + priv_sum) * g2 + s2) + e2)
          - np.log2(surro.denom_c)
          - surro.grad_c * (priv_sum - surro.priv_sum0))
    rp = (np.log2(rho * (priv_sum * g2 + s2) + e2)
          - np.log2(surro.denom_p)
          - surro.grad_p * ((priv_sum - own) - (surro.priv_sum0 - surro.own0)))
    return rc, rp


# -- splitting-step surrogate (DC in rho) --------------------------------------

@dataclass
class SplitSurrogate:
    """Per-pair DC minorant data for the power-splitting subproblem."""

    rho0: float
    S_full: np.ndarray       # (p0 + sum p_j)*g2 + sigma2
    S_priv: np.ndarray       # (sum p_j)*g2 + sigma2
    S_int: np.ndarray        # (sum_{j != k} p_j)*g2 + sigma2
    grad_c: np.ndarray       # slope of the subtracted log for the common rate
    grad_p: np.ndarray


def split_surrogate(cfg: NetworkConfig, tables: ScenarioTables,
                    state: NetworkState) -> SplitSurrogate:
    """Expand the DC splitting minorant at the state's rho (all else fixed)."""
    pi, pk, pn = tables.pair_i, tables.pair_k, tables.pair_n
    g2 = effective_gains(cfg, tables, state.q, state.theta)
    p_priv = np.where(tables.assoc, state.p_private, 0.0)
    priv_sum = p_priv.sum(axis=1)[pi, pn]
    own = p_priv[pi, pk, pn]
    p0 = state.p_common[pi, pn]
    s2, e2 = cfg.sigma2, cfg.eps2
    S_full = (p0 + priv_sum) * g2 + s2
    S_priv = priv_sum * g2 + s2
    S_int = np.maximum(priv_sum - own, 0.0) * g2 + s2
    rho0 = state.rho
    return SplitSurrogate(rho0=rho0, S_full=S_full, S_priv=S_priv, S_int=S_int,
                          grad_c=S_priv / ((rho0 * S_priv + e2) * LN2),
                          grad_p=S_int / ((rho0 * S_int + e2) * LN2))


def dc2_rates(rho: float, surro: SplitSurrogate, cfg: NetworkConfig):
    """Evaluate the DC splitting minorants (R_c, R_p per pair) at ``rho``."""
    e2 = cfg.eps2
    d = rho - surro.rho0
    rc = (np.log2(rho * surro.S_full + e2)
          - np.log2(surro.rho0 * surro.S_priv + e2) - surro.grad_c * d)
    rp = (np.log2(rho * surro.S_priv + e2)
          - np.log2(surro.rho0 * surro.S_int + e2) - surro.grad_p * d)
    return rc, rp
