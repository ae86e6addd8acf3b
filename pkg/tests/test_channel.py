import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airs_rsma.channel import (aligned_effective_gain, direct_channel,
                               effective_channel, effective_gains,
                               optimal_phase, phase_profile, steering_channels)
from airs_rsma.scenario import (airside_geometry, build_tables,
                                slot_geometry, straight_line_trajectory)
from conftest import toy_config


@pytest.fixture(scope="module")
def cfg():
    return toy_config(M=16)


class TestElementResponses:
    def test_direct_channel_value(self):
        assert direct_channel(1.0, 100.0) == pytest.approx(0.01)
        with pytest.raises(ValueError):
            direct_channel(1.0, 0.0)

    def test_steering_phase_ramp(self, cfg):
        # second element, cos(phi)=1: phase -2*pi/0.1 * 0.05 = -pi
        h_ra, _ = steering_channels(cfg, d_ra=50.0, d_av=60.0,
                                    cos_in=1.0, cos_out=0.3)
        assert np.angle(h_ra[1]) == pytest.approx(-np.pi)
        assert np.abs(h_ra) == pytest.approx(np.sqrt(cfg.h1) / 50.0)

    def test_optimal_phase_value(self, cfg):
        # cos difference 0.5: element 1 gets pi/2
        theta = optimal_phase(cfg, cos_in=0.7, cos_out=0.2)
        assert theta[1] == pytest.approx(np.pi / 2)
        assert theta[0] == 0.0
        assert np.all((theta >= 0) & (theta < 2 * np.pi))


class TestAlignment:
    def test_aligned_gain_closed_form(self, cfg):
        # sqrt(1)/100 + 100*16/(50*50) = 0.01 + 0.64
        got = aligned_effective_gain(cfg, d_ik=100.0, d_ra=50.0, d_av=50.0)
        assert got == pytest.approx(0.65, rel=1e-12)

    def test_effective_channel_matches_closed_form(self, cfg):
        d_ik, d_ra, d_av = 120.0, 45.0, 70.0
        cos_in, cos_out = 0.42, -0.8
        h_ra, g_av = steering_channels(cfg, d_ra, d_av, cos_in, cos_out)
        theta = optimal_phase(cfg, cos_in, cos_out)
        h = effective_channel(direct_channel(cfg.h0, d_ik), h_ra, g_av, theta)
        assert h.imag == pytest.approx(0.0, abs=1e-15)
        assert abs(h) == pytest.approx(
            aligned_effective_gain(cfg, d_ik, d_ra, d_av), rel=1e-12)

    @given(cos_in=st.floats(-1.0, 1.0), cos_out=st.floats(-1.0, 1.0),
           d_ra=st.floats(25.0, 500.0), d_av=st.floats(25.0, 500.0))
    @settings(max_examples=100, deadline=None)
    def test_alignment_is_optimal(self, cos_in, cos_out, d_ra, d_av):
        cfg = toy_config(M=16)
        h_ra, g_av = steering_channels(cfg, d_ra, d_av, cos_in, cos_out)
        theta = optimal_phase(cfg, cos_in, cos_out)
        h_d = direct_channel(cfg.h0, 150.0)
        best = abs(effective_channel(h_d, h_ra, g_av, theta))
        rng = np.random.default_rng(7)
        for _ in range(25):
            rand = rng.uniform(0, 2 * np.pi, cfg.M)
            assert abs(effective_channel(h_d, h_ra, g_av, rand)) <= best + 1e-12


class TestProfileAndGains:
    def test_profile_shape_and_range(self, cfg):
        tables = build_tables(cfg)
        q = straight_line_trajectory(cfg)
        theta = phase_profile(cfg, tables, q)
        assert theta.shape == (cfg.M, cfg.N)
        assert np.all((theta >= 0) & (theta < 2 * np.pi))

    def test_profile_aligns_weakest_vehicle_of_nearest_rsu(self):
        # two vehicles under one RSU; the farther one sets the phases
        cfg = toy_config(K=2, t_arrival=(0.0, 0.0), lane_of=(1, 1),
                         v=(30.0,), M=8)
        tables = build_tables(cfg)
        q = straight_line_trajectory(cfg)
        theta = phase_profile(cfg, tables, q)
        n = 0
        i = 0
        served = np.nonzero(tables.assoc[i, :, n])[0]
        far = served[np.argmax(tables.d_direct[i, served, n])]
        d_ra, d_av, cos_in, cos_out = airside_geometry(tables, q)
        want = optimal_phase(cfg, cos_in[i, n], cos_out[far, n])
        assert theta[:, n] == pytest.approx(want)

    def test_effective_gains_match_scalar_path(self, cfg):
        tables = build_tables(cfg)
        q = straight_line_trajectory(cfg)
        rng = np.random.default_rng(3)
        theta = rng.uniform(0, 2 * np.pi, (cfg.M, cfg.N))
        g2 = effective_gains(cfg, tables, q, theta)
        for idx in range(tables.n_pairs):
            i, k, n = (tables.pair_i[idx], tables.pair_k[idx],
                       tables.pair_n[idx])
            geo = slot_geometry(cfg, n + 1, q[n])
            h_ra, g_av = steering_channels(
                cfg, geo.d_ra[i], geo.d_av[k],
                geo.cos_phi_in[i], geo.cos_phi_out[k])
            h = effective_channel(direct_channel(cfg.h0, geo.d_direct[i, k]),
                                  h_ra, g_av, theta[:, n])
            assert g2[idx] == pytest.approx(abs(h) ** 2, rel=1e-12)

    def test_no_airs_reduces_to_direct(self):
        cfg = toy_config(M=0)
        tables = build_tables(cfg)
        q = straight_line_trajectory(cfg)
        g2 = effective_gains(cfg, tables, q, np.zeros((0, cfg.N)))
        d = tables.d_direct[tables.pair_i, tables.pair_k, tables.pair_n]
        assert g2 == pytest.approx(cfg.h0 / d ** 2)

    def test_aligned_profile_hits_closed_form_on_target(self, cfg):
        tables = build_tables(cfg)
        q = straight_line_trajectory(cfg)
        theta = phase_profile(cfg, tables, q)
        g2 = effective_gains(cfg, tables, q, theta)
        # single-vehicle scenario: every served pair is the aligned target
        for idx in range(tables.n_pairs):
            i, k, n = (tables.pair_i[idx], tables.pair_k[idx],
                       tables.pair_n[idx])
            geo = slot_geometry(cfg, n + 1, q[n])
            want = aligned_effective_gain(cfg, geo.d_direct[i, k],
                                          geo.d_ra[i], geo.d_av[k])
            assert g2[idx] == pytest.approx(want ** 2, rel=1e-9)
