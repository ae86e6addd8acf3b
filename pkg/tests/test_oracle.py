"""Scalar oracle against the vectorized evaluator, scans, exhaustive search."""

import numpy as np
import pytest

from airs_rsma.channel import phase_profile
from airs_rsma.oracle import grid_search_small, recompute_report, scan_rho
from airs_rsma.rsma_swipt import NetworkState, evaluate
from airs_rsma.scenario import build_tables, straight_line_trajectory

from conftest import random_state, toy_config


def _assert_close(a, b, rel):
    np.testing.assert_allclose(a, b, rtol=rel, atol=rel * 1e-3)


def _line_state(cfg, tables, seed, aligned=True):
    """Random powers on a valid straight-line trajectory."""
    st = random_state(cfg, tables, np.random.default_rng(seed))
    q = straight_line_trajectory(cfg)
    theta = phase_profile(cfg, tables, q) if aligned else st.theta
    return NetworkState(q=q, p=st.p, C=st.C, theta=theta, rho=st.rho)


class TestRecompute:
    def test_matches_evaluate_on_random_states(self, cfg_hw, tables_hw):
        rng = np.random.default_rng(7)
        for _ in range(3):
            st = random_state(cfg_hw, tables_hw, rng)
            fast = evaluate(st, cfg_hw, tables_hw)
            slow = recompute_report(st, cfg_hw, tables_hw)
            for name in ("R_c", "R_p", "R_c_min", "Q", "g2",
                         "R_tot_per_slot"):
                _assert_close(getattr(slow, name), getattr(fast, name), 1e-9)
            _assert_close(slow.sum_rate, fast.sum_rate, 1e-9)

    def test_matches_on_aligned_toy(self):
        cfg = toy_config()
        tables = build_tables(cfg)
        rng = np.random.default_rng(3)
        st = random_state(cfg, tables, rng, aligned=True)
        fast = evaluate(st, cfg, tables)
        slow = recompute_report(st, cfg, tables)
        _assert_close(slow.R_c, fast.R_c, 1e-9)
        _assert_close(slow.sum_rate, fast.sum_rate, 1e-9)


class TestScanRho:
    def test_no_energy_no_shares_prefers_rho_one(self):
        cfg = toy_config()
        tables = build_tables(cfg)
        st = _line_state(cfg, tables, 0)
        st = NetworkState(q=st.q, p=st.p, C=np.zeros_like(st.C),
                          theta=st.theta, rho=st.rho)
        res = scan_rho(st, cfg, step=1e-2, tables=tables)
        assert res.rho == pytest.approx(1.0)
        assert res.n_feasible == res.n_total

    def test_coarse_grid_has_three_points(self):
        cfg = toy_config()
        tables = build_tables(cfg)
        st = _line_state(cfg, tables, 1)
        res = scan_rho(st, cfg, step=0.5, tables=tables)
        assert res.n_total == 3

    def test_share_caps_filter_low_rho(self):
        # positive common shares are undecodable at rho = 0
        cfg = toy_config()
        tables = build_tables(cfg)
        st = _line_state(cfg, tables, 2)
        rep = evaluate(st, cfg, tables)
        C = np.where(tables.assoc, rep.R_c_min[:, None, :] * 0.5, 0.0)
        st = NetworkState(q=st.q, p=st.p, C=C, theta=st.theta, rho=st.rho)
        res = scan_rho(st, cfg, step=1e-2, tables=tables)
        assert res.n_feasible < res.n_total
        assert np.isfinite(res.objective)

    def test_rejects_bad_step(self):
        cfg = toy_config()
        st = _line_state(cfg, build_tables(cfg), 0)
        with pytest.raises(ValueError):
            scan_rho(st, cfg, step=0.6)


class TestGridSearch:
    def test_rejects_large_scenarios(self, cfg_hw):
        with pytest.raises(ValueError, match="I <= 1"):
            grid_search_small(cfg_hw)

    def test_rejects_energy_constraint(self):
        cfg = toy_config(E_th_dbm=-30.0)
        with pytest.raises(ValueError, match="E_th"):
            grid_search_small(cfg)

    def test_rejects_blown_budget(self):
        cfg = toy_config()
        with pytest.raises(ValueError, match="budget"):
            grid_search_small(cfg, budget=10)

    def test_result_is_exactly_achievable(self):
        # rebuilding the arg-max as a network state reproduces the objective
        cfg = toy_config()
        tables = build_tables(cfg)
        res = grid_search_small(cfg, rho_step=0.05)
        p = np.zeros((cfg.I, 1 + cfg.K, cfg.N))
        for n in range(cfg.N):
            p[0, 0, n] = res.split[n] * cfg.P_max
            p[0, 1, n] = (1.0 - res.split[n]) * cfg.P_max
        theta = phase_profile(cfg, tables, res.q)
        st = NetworkState(q=res.q, p=p, C=np.zeros((cfg.I, cfg.K, cfg.N)),
                          theta=theta, rho=res.rho)
        rep = evaluate(st, cfg, tables)
        C = np.where(tables.assoc, rep.R_c_min[:, None, :], 0.0)
        st = NetworkState(q=st.q, p=st.p, C=C, theta=st.theta, rho=st.rho)
        rep = evaluate(st, cfg, tables)
        assert rep.sum_rate == pytest.approx(res.sum_rate, rel=1e-9)

    def test_finer_lattice_never_loses(self):
        cfg = toy_config()
        coarse = grid_search_small(cfg, lattice=10.0, rho_step=0.1)
        fine = grid_search_small(cfg, lattice=5.0, rho_step=0.1)
        assert fine.sum_rate >= coarse.sum_rate - 1e-9

    def test_beats_straight_line_center_split(self):
        cfg = toy_config()
        tables = build_tables(cfg)
        q = straight_line_trajectory(cfg)
        theta = phase_profile(cfg, tables, q)
        p = np.full((cfg.I, 1 + cfg.K, cfg.N), 0.5 * cfg.P_max)
        st = NetworkState(q=q, p=p, C=np.zeros((cfg.I, cfg.K, cfg.N)),
                          theta=theta, rho=0.5)
        rep = evaluate(st, cfg, tables)
        res = grid_search_small(cfg, rho_step=0.05)
        assert res.sum_rate >= rep.sum_rate - 1e-9
