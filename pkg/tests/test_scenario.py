import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from airs_rsma.scenario import (NetworkConfig, associate, build_tables,
                                load_config, rsu_position, save_config,
                                slot_geometry, straight_line_trajectory,
                                default_config, validate_trajectory,
                                vehicle_position)
from conftest import toy_config


class TestConfig:
    def test_default_config_unit_conversions(self, cfg_hw):
        assert cfg_hw.h0 == pytest.approx(1.0)
        assert cfg_hw.h1 == pytest.approx(100.0)
        assert cfg_hw.sigma2 == pytest.approx(1e-7)
        assert cfg_hw.eps2 == pytest.approx(1e-7)
        assert cfg_hw.P_max == pytest.approx(0.7943282347, rel=1e-9)
        assert cfg_hw.E_th == pytest.approx(1e-8)
        assert cfg_hw.T == pytest.approx(50.0)

    def test_disabled_energy_threshold(self):
        cfg = toy_config()
        assert cfg.E_th == 0.0

    def test_rejects_bad_lane(self):
        with pytest.raises(ValueError, match="lane_of"):
            default_config(lane_of=(2, 3, 2, 4))

    def test_rejects_unreachable_endpoints(self):
        with pytest.raises(ValueError, match="unreachable"):
            default_config(V_max=10.0)

    def test_rejects_endpoint_off_altitude(self):
        with pytest.raises(ValueError, match="altitude"):
            default_config(q0=(250.0, 10.0, 25.0))

    def test_json_roundtrip(self, tmp_path, cfg_hw):
        path = tmp_path / "scenario.json"
        save_config(cfg_hw, str(path))
        raw = json.loads(path.read_text())
        assert "lambda" in raw and "wavelength" not in raw
        assert load_config(str(path)) == cfg_hw

    def test_json_roundtrip_disabled_eth(self, tmp_path):
        cfg = toy_config()
        path = tmp_path / "toy.json"
        save_config(cfg, str(path))
        assert load_config(str(path)).E_th == 0.0


class TestGeometry:
    def test_rsu_positions(self, cfg_hw):
        assert rsu_position(1, cfg_hw) == pytest.approx([250.0, 0.0])
        assert rsu_position(2, cfg_hw) == pytest.approx([750.0, 0.0])
        assert rsu_position(3, cfg_hw) == pytest.approx([1250.0, 0.0])
        with pytest.raises(IndexError):
            rsu_position(4, cfg_hw)

    def test_vehicle_track(self):
        # lane-1 vehicle entering at t=0 with 25 m/s passes x=250 at n=10
        cfg = default_config(lane_of=(1, 3, 2, 3), K=4)
        assert vehicle_position(1, 10, cfg) == pytest.approx([250.0, 0.0])

    def test_vehicle_before_arrival_negative_x(self, cfg_hw):
        pos = vehicle_position(3, 10, cfg_hw)   # arrives at t=20
        assert pos[0] < 0

    def test_lane_offsets(self, cfg_hw):
        assert vehicle_position(1, 1, cfg_hw)[1] == pytest.approx(4.0)
        assert vehicle_position(2, 1, cfg_hw)[1] == pytest.approx(8.0)


class TestAssociation:
    def test_unarrived_vehicle_unserved(self, cfg_hw):
        served = associate(10, cfg_hw)          # vehicles 3, 4 arrive at t=20
        flat = [k for lst in served for k in lst]
        assert 3 not in flat and 4 not in flat

    def test_boundary_tie_goes_to_lower_index(self):
        # vehicle exactly at x=500 is equidistant from RSUs 1 and 2
        cfg = default_config(t_arrival=(0.0, 5.0, 20.0, 20.0),
                            lane_of=(2, 3, 2, 3), v=(25.0, 25.0, 30.0))
        served = associate(20, cfg)             # vehicle 1: x = 20*25 = 500
        assert 1 in served[0] and 1 not in served[1]

    def test_vehicle_past_last_coverage_unserved(self):
        cfg = toy_config(N=4, v=(600.0,), V_max=250.0,
                         q0=(60.0, 10.0, 20.0), qf=(100.0, 10.0, 20.0))
        served = associate(4, cfg)              # x = 2400 > 250 + 250
        assert served == [[]]

    def test_partition_property(self, cfg_hw):
        # every served vehicle appears under exactly one RSU
        for n in range(1, cfg_hw.N + 1):
            served = associate(n, cfg_hw)
            flat = [k for lst in served for k in lst]
            assert len(flat) == len(set(flat))

    def test_tables_match_associate(self, cfg_hw, tables_hw):
        for n in range(1, cfg_hw.N + 1):
            served = associate(n, cfg_hw)
            for i in range(cfg_hw.I):
                mask = np.nonzero(tables_hw.assoc[i, :, n - 1])[0] + 1
                assert list(mask) == served[i]

    def test_zero_range_rejected(self):
        cfg = default_config(lane_of=(1, 3, 2, 3))   # lane 1 hits RSU 1 at n=10
        with pytest.raises(ValueError, match="zero"):
            build_tables(cfg)


class TestSlotGeometry:
    def test_ranges_use_altitude(self, cfg_hw):
        geo = slot_geometry(cfg_hw, 1, (250.0, 0.0, 20.0))
        assert geo.d_ra[0] == pytest.approx(20.0)
        # vehicle 1 (lane 2, 27 m/s) sits at (27, 4) after one slot
        want = math.sqrt(223.0 ** 2 + 4.0 ** 2 + 20.0 ** 2)
        assert geo.d_av[0] == pytest.approx(want)

    def test_angle_cosines(self, cfg_hw):
        geo = slot_geometry(cfg_hw, 1, (250.0, 0.0, 20.0))
        assert geo.cos_phi_in[0] == pytest.approx(0.0)
        assert geo.cos_phi_out[0] == pytest.approx((27.0 - 250.0) / geo.d_av[0])
        assert np.all(np.abs(geo.cos_phi_in) <= 1.0)
        assert np.all(np.abs(geo.cos_phi_out) <= 1.0)

    def test_served_sets_match_associate(self, cfg_hw):
        geo = slot_geometry(cfg_hw, 30, (600.0, 10.0, 20.0))
        assert [list(s) for s in geo.served] == associate(30, cfg_hw)


class TestTrajectory:
    def test_straight_line_feasible(self, cfg_hw):
        q = straight_line_trajectory(cfg_hw)
        assert validate_trajectory(q, cfg_hw) == []
        assert q[0] == pytest.approx(cfg_hw.q0)
        assert q[-1] == pytest.approx(cfg_hw.qf)
        step = np.linalg.norm(np.diff(q, axis=0), axis=1)
        assert step == pytest.approx(1000.0 / 49.0)

    def test_speed_violation_reported(self, cfg_hw):
        q = straight_line_trajectory(cfg_hw)
        q[10, 0] += 60.0
        bad = validate_trajectory(q, cfg_hw)
        assert bad and bad[0].constraint == "speed"
        assert bad[0].amount > 0

    def test_endpoint_violation_reported(self, cfg_hw):
        q = straight_line_trajectory(cfg_hw)
        q[-1, 1] += 1.0
        bad = validate_trajectory(q, cfg_hw)
        assert any(v.constraint == "final_point" for v in bad)

    @given(n_free=st.integers(2, 30), speed=st.floats(1.0, 50.0))
    @settings(max_examples=50, deadline=None)
    def test_straight_line_always_valid_when_reachable(self, n_free, speed):
        span = 0.9 * speed * (n_free - 1)
        cfg = toy_config(N=n_free, V_max=speed,
                         q0=(0.0, 10.0, 20.0), qf=(span, 10.0, 20.0))
        assert validate_trajectory(straight_line_trajectory(cfg), cfg) == []
