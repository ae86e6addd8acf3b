import numpy as np
import pytest

from airs_rsma.scenario import (NetworkConfig, build_tables,
                                straight_line_trajectory, default_config)
from airs_rsma.channel import phase_profile
from airs_rsma.rsma_swipt import NetworkState


@pytest.fixture(scope="session")
def cfg_hw():
    return default_config()


@pytest.fixture(scope="session")
def tables_hw(cfg_hw):
    return build_tables(cfg_hw)


def toy_config(**overrides) -> NetworkConfig:
    """Single RSU / single vehicle / 4 slots; small enough for brute force.

    E_th is disabled so the per-slot structure is exactly separable, which
    the exhaustive oracle relies on.
    """
    base = dict(
        I=1, K=1, J=1, M=8, N=4, delta=1.0,
        r_rsu=250.0, d_rsu=500.0, d_lane=4.0,
        v=(30.0,), t_arrival=(0.0,), lane_of=(1,),
        q0=(60.0, 10.0, 20.0), qf=(100.0, 10.0, 20.0),
        H_U=20.0, V_max=20.0,
        h0_db=0.0, h1_db=20.0, d_M=0.05, wavelength=0.1,
        sigma2_dbw=-70.0, eps2_dbw=-70.0,
        zeta=0.97, E_th_dbm=float("-inf"), P_max_dbm=29.0,
    )
    base.update(overrides)
    return NetworkConfig(**base)


def random_state(cfg, tables, rng, aligned=False) -> NetworkState:
    """A random feasible-shaped state: bounded-speed trajectory, powers on
    the budget simplex (masked), shares zero, rho in (0.05, 0.95)."""
    steps = rng.uniform(-1.0, 1.0, size=(cfg.N - 1, 3))
    steps[:, 2] = 0.0
    norms = np.linalg.norm(steps, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    steps *= rng.uniform(0.1, 0.999, size=(cfg.N - 1, 1)) \
        * cfg.V_max * cfg.delta / norms
    q = np.vstack([np.asarray(cfg.q0), np.asarray(cfg.q0) + np.cumsum(steps, axis=0)])

    p = np.zeros((cfg.I, 1 + cfg.K, cfg.N))
    for i, n in zip(*np.nonzero(tables.active)):
        served = np.nonzero(tables.assoc[i, :, n])[0]
        raw = rng.uniform(0.05, 1.0, size=1 + served.size)
        raw *= rng.uniform(0.2, 0.98) * cfg.P_max / raw.sum()
        p[i, 0, n] = raw[0]
        p[i, 1 + served, n] = raw[1:]
    C = np.zeros((cfg.I, cfg.K, cfg.N))
    rho = float(rng.uniform(0.05, 0.95))
    if aligned:
        theta = phase_profile(cfg, tables, q)
    else:
        theta = rng.uniform(0.0, 2 * np.pi, size=(cfg.M, cfg.N))
    return NetworkState(q=q, p=p, C=C, theta=theta, rho=rho)
