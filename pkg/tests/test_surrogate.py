import numpy as np
import pytest

from airs_rsma.channel import aligned_effective_gain
from airs_rsma.rsma_swipt import common_rate, evaluate, harvested_energy, private_rate
from airs_rsma.scenario import airside_geometry, build_tables
from airs_rsma.surrogate import (bound_gain, bound_gain_df, bound_gain_dg,
                                 dc1_rates, dc2_rates, gain_bounds,
                                 gain_expansion_constants, power_surrogate,
                                 split_surrogate, taylor_family,
                                 trajectory_surrogate)
from conftest import random_state, toy_config


@pytest.fixture(scope="module")
def setup_t1(cfg_hw, tables_hw):
    rng = np.random.default_rng(42)
    state = random_state(cfg_hw, tables_hw, rng, aligned=True)
    return cfg_hw, tables_hw, state


def aligned_rates(cfg, tables, state):
    """Exact rates/energy computed through the aligned closed form."""
    pi, pk, pn = tables.pair_i, tables.pair_k, tables.pair_n
    d_ra, d_av, _, _ = airside_geometry(tables, state.q)
    gain = np.array([
        aligned_effective_gain(cfg, tables.d_direct[i, k, n],
                               d_ra[i, n], d_av[k, n]) ** 2
        for i, k, n in zip(pi, pk, pn)])
    p_priv = np.where(tables.assoc, state.p_private, 0.0)
    priv = p_priv.sum(axis=1)[pi, pn]
    own = p_priv[pi, pk, pn]
    rc = common_rate(state.rho, state.p_common[pi, pn], gain, priv,
                     cfg.sigma2, cfg.eps2)
    rp = private_rate(state.rho, own, gain, priv - own, cfg.sigma2, cfg.eps2)
    q = harvested_energy(cfg.zeta, state.rho,
                         state.p_common[pi, pn] + priv, gain, cfg.delta)
    return rc, rp, q


class TestGainBracketing:
    def test_constants_reproduce_squared_gain(self, setup_t1):
        cfg, tables, state = setup_t1
        surro = trajectory_surrogate(cfg, tables, state)
        pi, pk, pn = tables.pair_i, tables.pair_k, tables.pair_n
        d_ra, d_av, _, _ = airside_geometry(tables, state.q)
        for idx in range(tables.n_pairs):
            want = aligned_effective_gain(
                cfg, tables.d_direct[pi[idx], pk[idx], pn[idx]],
                d_ra[pi[idx], pn[idx]], d_av[pk[idx], pn[idx]]) ** 2
            got = bound_gain(surro.A[idx], surro.B[idx], surro.C[idx],
                             surro.u0[idx], surro.v0[idx])
            assert got == pytest.approx(want, rel=1e-12)

    def test_bracketing_under_slack_inequalities(self, setup_t1):
        cfg, tables, state = setup_t1
        surro = trajectory_surrogate(cfg, tables, state)
        rng = np.random.default_rng(0)
        for _ in range(200):
            infl = rng.uniform(1.0, 3.0, size=(2, tables.n_pairs))
            defl = rng.uniform(0.3, 1.0, size=(2, tables.n_pairs))
            lower, upper = gain_bounds(
                surro.u0 * infl[0], surro.v0 * infl[1],
                surro.u0 * defl[0], surro.v0 * defl[1],
                surro.A, surro.B, surro.C)
            exact = bound_gain(surro.A, surro.B, surro.C, surro.u0, surro.v0)
            assert np.all(lower <= exact * (1 + 1e-12))
            assert np.all(upper >= exact * (1 - 1e-12))

    def test_monotone_decreasing_in_each_slack(self, setup_t1):
        cfg, tables, state = setup_t1
        surro = trajectory_surrogate(cfg, tables, state)
        g0 = bound_gain(surro.A, surro.B, surro.C, surro.u0, surro.v0)
        g1 = bound_gain(surro.A, surro.B, surro.C, surro.u0 * 1.5, surro.v0)
        g2 = bound_gain(surro.A, surro.B, surro.C, surro.u0, surro.v0 * 1.5)
        assert np.all(g1 < g0) and np.all(g2 < g0)


class TestGradients:
    """Coefficients against central finite differences of the exact forms."""

    def check_fd(self, fun, x0, want, rel=1e-6):
        h = 1e-5 * max(abs(x0), 1e-3)
        got = (fun(x0 + h) - fun(x0 - h)) / (2 * h)
        assert got == pytest.approx(want, rel=rel)

    def test_taylor_slack_gradients(self):
        rng = np.random.default_rng(1)
        cfg = toy_config(M=16)
        for _ in range(50):
            A, B, C = gain_expansion_constants(cfg, rng.uniform(50, 500))
            P, rho = rng.uniform(0.01, 1.0), rng.uniform(0.05, 1.0)
            f0, g0 = rng.uniform(1e3, 1e6, size=2)
            X, Y, Z = taylor_family(P, rho, cfg.sigma2, cfg.eps2,
                                    A, B, C, f0, g0)
            self.check_fd(lambda f: taylor_family(
                P, rho, cfg.sigma2, cfg.eps2, A, B, C, f, g0)[0], f0, Y)
            self.check_fd(lambda g: taylor_family(
                P, rho, cfg.sigma2, cfg.eps2, A, B, C, f0, g)[0], g0, Z)

    def test_energy_slack_gradients(self, setup_t1):
        cfg, tables, state = setup_t1
        surro = trajectory_surrogate(cfg, tables, state)
        idx = 7
        A, B, C = surro.A[idx], surro.B[idx], surro.C[idx]
        scale = cfg.zeta * (1 - state.rho) * cfg.delta * surro.P_all[idx]

        def q_of(u, v):
            return scale * bound_gain(A, B, C, u, v)

        self.check_fd(lambda u: q_of(u, surro.v0[idx]), surro.u0[idx],
                      surro.energy.cu[idx])
        self.check_fd(lambda v: q_of(surro.u0[idx], v), surro.v0[idx],
                      surro.energy.cv[idx])

    def test_dc1_power_gradient(self, setup_t1):
        cfg, tables, state = setup_t1
        surro = power_surrogate(cfg, tables, state)
        idx = 3
        rho, g2 = state.rho, surro.g2[idx]

        def sub_log(s):   # subtracted log as a function of total private power
            return np.log2(rho * (s * g2 + cfg.sigma2) + cfg.eps2)

        self.check_fd(sub_log, surro.priv_sum0[idx], surro.grad_c[idx])

    def test_dc2_rho_gradient(self, setup_t1):
        cfg, tables, state = setup_t1
        surro = split_surrogate(cfg, tables, state)
        idx = 3

        def sub_log(r):
            return np.log2(r * surro.S_priv[idx] + cfg.eps2)

        self.check_fd(sub_log, state.rho, surro.grad_c[idx])


class TestTightnessAtExpansion:
    def test_trajectory_rate_surrogates_tight(self, setup_t1):
        cfg, tables, state = setup_t1
        surro = trajectory_surrogate(cfg, tables, state)
        rc, rp, q = aligned_rates(cfg, tables, state)
        u, v = surro.u0, surro.v0
        np.testing.assert_allclose(surro.common(u, v, u, v), rc, rtol=1e-9)
        np.testing.assert_allclose(surro.private(u, v, u, v), rp, rtol=1e-9)
        np.testing.assert_allclose(surro.energy(u, v, u, v), q, rtol=1e-9)

    def test_trajectory_surrogate_first_order_tangent(self, setup_t1):
        # value and slope of the surrogate match the exact aligned rate
        # along the u direction at the expansion
        cfg, tables, state = setup_t1
        surro = trajectory_surrogate(cfg, tables, state)
        idx = 5
        A, B, C = surro.A[idx], surro.B[idx], surro.C[idx]
        rho, s2, e2 = state.rho, cfg.sigma2, cfg.eps2
        u0, v0 = surro.u0[idx], surro.v0[idx]

        def exact_rc(u):
            g = bound_gain(A, B, C, u, v0)
            return common_rate(rho, state.p_common[tables.pair_i[idx],
                                                   tables.pair_n[idx]],
                               g, surro.P_priv[idx], s2, e2)

        h = 1e-4 * u0
        slope_exact = (exact_rc(u0 + h) - exact_rc(u0 - h)) / (2 * h)
        slope_surro = surro.common.cu[idx] + surro.common.cw[idx]
        assert slope_surro == pytest.approx(slope_exact, rel=1e-5)

    def test_dc1_tight_at_incumbent(self, setup_t1):
        cfg, tables, state = setup_t1
        surro = power_surrogate(cfg, tables, state)
        rc, rp = dc1_rates(state.p, surro, cfg, tables)
        rep = evaluate(state, cfg, tables)
        pi, pk, pn = tables.pair_i, tables.pair_k, tables.pair_n
        np.testing.assert_allclose(rc, rep.R_c[pi, pk, pn], rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(rp, rep.R_p[pi, pk, pn], rtol=1e-9, atol=1e-12)

    def test_dc2_tight_at_incumbent(self, setup_t1):
        cfg, tables, state = setup_t1
        surro = split_surrogate(cfg, tables, state)
        rc, rp = dc2_rates(state.rho, surro, cfg)
        rep = evaluate(state, cfg, tables)
        pi, pk, pn = tables.pair_i, tables.pair_k, tables.pair_n
        np.testing.assert_allclose(rc, rep.R_c[pi, pk, pn], rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(rp, rep.R_p[pi, pk, pn], rtol=1e-9, atol=1e-12)


class TestMinorization:
    def test_dc1_never_exceeds_exact(self, cfg_hw, tables_hw):
        rng = np.random.default_rng(5)
        state = random_state(cfg_hw, tables_hw, rng, aligned=True)
        surro = power_surrogate(cfg_hw, tables_hw, state)
        pi, pk, pn = tables_hw.pair_i, tables_hw.pair_k, tables_hw.pair_n
        for _ in range(100):
            probe = random_state(cfg_hw, tables_hw, rng, aligned=True)
            probe.q = state.q; probe.theta = state.theta; probe.rho = state.rho
            rc, rp = dc1_rates(probe.p, surro, cfg_hw, tables_hw)
            rep = evaluate(probe, cfg_hw, tables_hw)
            assert np.all(rc <= rep.R_c[pi, pk, pn] + 1e-9)
            assert np.all(rp <= rep.R_p[pi, pk, pn] + 1e-9)

    def test_dc2_never_exceeds_exact(self, cfg_hw, tables_hw):
        rng = np.random.default_rng(6)
        state = random_state(cfg_hw, tables_hw, rng, aligned=True)
        surro = split_surrogate(cfg_hw, tables_hw, state)
        pi, pk, pn = tables_hw.pair_i, tables_hw.pair_k, tables_hw.pair_n
        for rho in np.linspace(0.0, 1.0, 101):
            rc, rp = dc2_rates(float(rho), surro, cfg_hw)
            probe = state.copy()
            probe.rho = float(rho)
            rep = evaluate(probe, cfg_hw, tables_hw)
            assert np.all(rc <= rep.R_c[pi, pk, pn] + 1e-9)
            assert np.all(rp <= rep.R_p[pi, pk, pn] + 1e-9)

    def test_energy_bound_is_global_minorant_in_slacks(self, setup_t1):
        # Q is convex in (u, v), so the tangent plane stays below it
        cfg, tables, state = setup_t1
        surro = trajectory_surrogate(cfg, tables, state)
        rng = np.random.default_rng(8)
        scale = cfg.zeta * (1 - state.rho) * cfg.delta * surro.P_all
        for _ in range(100):
            u = surro.u0 * rng.uniform(0.3, 4.0, tables.n_pairs)
            v = surro.v0 * rng.uniform(0.3, 4.0, tables.n_pairs)
            exact = scale * bound_gain(surro.A, surro.B, surro.C, u, v)
            assert np.all(surro.energy(u, v, u, v) <= exact + 1e-12)
