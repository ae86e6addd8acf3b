"""Network scenario: configuration, road/RSU geometry, vehicle motion, association.

Conventions used throughout the package:

* SI units internally (meters, seconds, watts, joules); dB / dBm only in
  configuration fields, converted once via properties.
* Public helpers (`rsu_position`, `vehicle_position`, `associate`,
  `slot_geometry`) take 1-based RSU / vehicle / slot indices, matching the
  usual system-model notation.  Bulk arrays in :class:`ScenarioTables` are
  0-based.
* Slot n covers time n*delta; vehicle k is on the road once its x-coordinate
  is >= 0 and is served while within coverage radius of its nearest RSU.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict
from typing import Sequence

import numpy as np

__all__ = [
    "NetworkConfig",
    "ScenarioTables",
    "SlotGeometry",
    "Violation",
    "rsu_position",
    "vehicle_position",
    "associate",
    "build_tables",
    "slot_geometry",
    "airside_geometry",
    "straight_line_trajectory",
    "validate_trajectory",
    "default_config",
    "load_config",
    "save_config",
]


def _db_to_lin(db: float) -> float:
    return 10.0 ** (db / 10.0)


def _dbm_to_watt(dbm: float) -> float:
    if dbm == float("-inf"):
        return 0.0
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class NetworkConfig:
    """Static description of one highway scenario.

    Fields mirror the scenario JSON schema documented in the README
    (`lambda` in JSON maps to :attr:`wavelength` here).
    """

    I: int                      # number of RSUs
    K: int                      # number of vehicles
    J: int                      # number of lanes
    M: int                      # reflecting elements on the AIRS (0 = no AIRS)
    N: int                      # number of time slots
    delta: float                # slot length (s)
    r_rsu: float                # RSU coverage radius along the road (m)
    d_rsu: float                # RSU spacing (m)
    d_lane: float               # lane width (m)
    v: tuple[float, ...]        # per-lane speeds (m/s), length J
    t_arrival: tuple[float, ...]  # per-vehicle road-entry times (s), length K
    lane_of: tuple[int, ...]    # per-vehicle lane index in 1..J, length K
    q0: tuple[float, float, float]  # AIRS start position (m)
    qf: tuple[float, float, float]  # AIRS final position (m)
    H_U: float                  # AIRS altitude (m)
    V_max: float                # AIRS speed limit (m/s)
    h0_db: float                # direct-path gain at 1 m (dB)
    h1_db: float                # reflected-path per-hop gain at 1 m (dB)
    d_M: float                  # element spacing (m)
    wavelength: float           # carrier wavelength (m)
    sigma2_dbw: float           # antenna noise power (dB re 1 W)
    eps2_dbw: float             # conversion noise power (dB re 1 W)
    zeta: float                 # energy-harvesting efficiency
    E_th_dbm: float             # per-vehicle harvested-energy threshold (dBm; -inf = none)
    P_max_dbm: float            # per-RSU power budget (dBm)

    def __post_init__(self):
        if min(self.I, self.K, self.J, self.N) < 1:
            raise ValueError("I, K, J, N must all be >= 1")
        if self.M < 0:
            raise ValueError("M must be >= 0")
        for name in ("delta", "r_rsu", "d_rsu", "d_lane", "H_U", "V_max",
                     "d_M", "wavelength"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if len(self.v) != self.J:
            raise ValueError("v must have one speed per lane")
        if any(s <= 0 for s in self.v):
            raise ValueError("lane speeds must be positive")
        if len(self.t_arrival) != self.K or len(self.lane_of) != self.K:
            raise ValueError("t_arrival and lane_of must have one entry per vehicle")
        if any(not 1 <= l <= self.J for l in self.lane_of):
            raise ValueError("lane_of entries must lie in 1..J")
        if any(t < 0 for t in self.t_arrival):
            raise ValueError("arrival times must be >= 0")
        if not 0 <= self.zeta <= 1:
            raise ValueError("zeta must lie in [0, 1]")
        if len(self.q0) != 3 or len(self.qf) != 3:
            raise ValueError("q0 and qf must be 3-vectors")
        if abs(self.q0[2] - self.H_U) > 1e-9 or abs(self.qf[2] - self.H_U) > 1e-9:
            raise ValueError("AIRS endpoints must sit at altitude H_U")
        span = math.dist(self.q0, self.qf)
        if span > (self.N - 1) * self.V_max * self.delta + 1e-9:
            raise ValueError("endpoints unreachable within N slots at V_max")

    # linear-unit views -----------------------------------------------------

    @property
    def h0(self) -> float:
        return _db_to_lin(self.h0_db)

    @property
    def h1(self) -> float:
        return _db_to_lin(self.h1_db)

    @property
    def sigma2(self) -> float:
        return _db_to_lin(self.sigma2_dbw)

    @property
    def eps2(self) -> float:
        return _db_to_lin(self.eps2_dbw)

    @property
    def P_max(self) -> float:
        return _dbm_to_watt(self.P_max_dbm)

    @property
    def E_th(self) -> float:
        """Harvested-energy threshold in joules over the whole mission."""
        return _dbm_to_watt(self.E_th_dbm)

    @property
    def T(self) -> float:
        return self.N * self.delta


# -- scenario JSON ----------------------------------------------------------

_JSON_ALIASES = {"lambda": "wavelength"}


def load_config(path: str) -> NetworkConfig:
    """Load a scenario JSON file (see README for the schema)."""
    with open(path) as fh:
        raw = json.load(fh)
    kwargs = {}
    for key, val in raw.items():
        name = _JSON_ALIASES.get(key, key)
        if isinstance(val, list):
            val = tuple(val)
        kwargs[name] = val
    return NetworkConfig(**kwargs)


def save_config(cfg: NetworkConfig, path: str) -> None:
    raw = asdict(cfg)
    raw["lambda"] = raw.pop("wavelength")
    with open(path, "w") as fh:
        json.dump(raw, fh, indent=2, sort_keys=True)
        fh.write("\n")


def default_config(**overrides) -> NetworkConfig:
    """Reference highway scenario used by the experiments.

    Three RSUs spaced 500 m apart cover a 1500 m segment, four vehicles enter
    at staggered times, and the AIRS flies 250 m -> 1250 m at 20 m altitude.
    Vehicles ride lanes 2/3 so that no trajectory passes through an RSU mast
    (the d^-2 LoS model diverges at zero range).
    """
    base = dict(
        I=3, K=4, J=3, M=16, N=50, delta=1.0,
        r_rsu=250.0, d_rsu=500.0, d_lane=4.0,
        v=(25.0, 27.0, 30.0),
        t_arrival=(0.0, 5.0, 20.0, 20.0),
        lane_of=(2, 3, 2, 3),
        q0=(250.0, 10.0, 20.0), qf=(1250.0, 10.0, 20.0),
        H_U=20.0, V_max=40.0,
        h0_db=0.0, h1_db=20.0,
        d_M=0.05, wavelength=0.1,
        sigma2_dbw=-70.0, eps2_dbw=-70.0,
        zeta=0.97, E_th_dbm=-50.0, P_max_dbm=29.0,
    )
    base.update(overrides)
    return NetworkConfig(**base)


# -- geometry ---------------------------------------------------------------

def rsu_position(i: int, cfg: NetworkConfig) -> np.ndarray:
    """Ground position (x, y) of RSU i (1-based)."""
    if not 1 <= i <= cfg.I:
        raise IndexError(f"RSU index {i} out of range 1..{cfg.I}")
    return np.array([cfg.r_rsu + (i - 1) * cfg.d_rsu, 0.0])


def vehicle_position(k: int, n: int, cfg: NetworkConfig) -> np.ndarray:
    """Ground position (x, y) of vehicle k at slot n (both 1-based).

    Before arrival the x-coordinate is negative; callers exclude such slots
    via the association mask.
    """
    if not 1 <= k <= cfg.K:
        raise IndexError(f"vehicle index {k} out of range 1..{cfg.K}")
    if not 1 <= n <= cfg.N:
        raise IndexError(f"slot index {n} out of range 1..{cfg.N}")
    lane = cfg.lane_of[k - 1]
    x = (n * cfg.delta - cfg.t_arrival[k - 1]) * cfg.v[lane - 1]
    y = (lane - 1) * cfg.d_lane
    return np.array([x, y])


def associate(n: int, cfg: NetworkConfig) -> list[list[int]]:
    """Vehicles served per RSU at slot n: K_i[n] as 1-based id lists.

    A vehicle on the road (x >= 0) attaches to the RSU nearest in x
    (ties to the smaller index) provided it lies within that RSU's
    coverage radius; otherwise it is unserved this slot.
    """
    served: list[list[int]] = [[] for _ in range(cfg.I)]
    rsu_x = np.array([cfg.r_rsu + i * cfg.d_rsu for i in range(cfg.I)])
    for k in range(1, cfg.K + 1):
        x = vehicle_position(k, n, cfg)[0]
        if x < 0:
            continue
        gaps = np.abs(x - rsu_x)
        i = int(np.argmin(gaps))
        if gaps[i] <= cfg.r_rsu:
            served[i].append(k)
    return served


@dataclass(frozen=True)
class ScenarioTables:
    """Trajectory-independent geometry precomputed for all slots (0-based)."""

    rsu_pos: np.ndarray      # (I, 2)
    veh_pos: np.ndarray      # (K, 2, N)
    assoc: np.ndarray        # (I, K, N) bool, True where RSU i serves vehicle k
    active: np.ndarray       # (I, N) bool, True where K_i[n] is nonempty
    d_direct: np.ndarray     # (I, K, N) RSU->vehicle range; +inf off-association
    pair_i: np.ndarray       # (P,) served-pair RSU index
    pair_k: np.ndarray       # (P,) served-pair vehicle index
    pair_n: np.ndarray       # (P,) served-pair slot index

    @property
    def n_pairs(self) -> int:
        return self.pair_i.size


def build_tables(cfg: NetworkConfig) -> ScenarioTables:
    """Precompute vehicle tracks, association masks and direct ranges."""
    rsu_pos = np.stack([rsu_position(i, cfg) for i in range(1, cfg.I + 1)])
    lanes = np.asarray(cfg.lane_of) - 1
    speeds = np.asarray(cfg.v)[lanes]
    t = np.arange(1, cfg.N + 1) * cfg.delta
    veh_x = (t[None, :] - np.asarray(cfg.t_arrival)[:, None]) * speeds[:, None]
    veh_y = np.broadcast_to((lanes * cfg.d_lane)[:, None], veh_x.shape)
    veh_pos = np.stack([veh_x, veh_y], axis=1)           # (K, 2, N)

    gaps = np.abs(veh_x[None, :, :] - rsu_pos[:, 0][:, None, None])
    nearest = np.argmin(gaps, axis=0)                    # (K, N), first-min ties
    arrived = veh_x >= 0
    covered = np.take_along_axis(gaps, nearest[None], axis=0)[0] <= cfg.r_rsu
    assoc = np.zeros((cfg.I, cfg.K, cfg.N), dtype=bool)
    k_idx, n_idx = np.nonzero(arrived & covered)
    assoc[nearest[k_idx, n_idx], k_idx, n_idx] = True

    diff = rsu_pos[:, :, None, None] - veh_pos.transpose(1, 0, 2)[None]  # (I, 2, K, N)
    d_direct = np.sqrt((diff ** 2).sum(axis=1))          # (I, K, N)
    if np.any(d_direct[assoc] == 0.0):
        raise ValueError("vehicle coincides with an RSU mast; direct range is zero")
    d_direct = np.where(assoc, d_direct, np.inf)

    pair_i, pair_k, pair_n = (idx.astype(np.intp) for idx in np.nonzero(assoc))
    return ScenarioTables(
        rsu_pos=rsu_pos,
        veh_pos=veh_pos,
        assoc=assoc,
        active=assoc.any(axis=1),
        d_direct=d_direct,
        pair_i=pair_i,
        pair_k=pair_k,
        pair_n=pair_n,
    )


@dataclass(frozen=True)
class SlotGeometry:
    """Geometry of one slot for a given AIRS position (1-based accessors)."""

    n: int
    q: np.ndarray            # (3,) AIRS position
    rsu_pos: np.ndarray      # (I, 2)
    veh_pos: np.ndarray      # (K, 2)
    served: tuple[tuple[int, ...], ...]  # per-RSU served vehicle ids (1-based)
    d_direct: np.ndarray     # (I, K)
    d_ra: np.ndarray         # (I,) RSU -> AIRS range
    d_av: np.ndarray         # (K,) AIRS -> vehicle range
    cos_phi_in: np.ndarray   # (I,) arrival-angle cosine at the AIRS
    cos_phi_out: np.ndarray  # (K,) departure-angle cosine at the AIRS


def slot_geometry(cfg: NetworkConfig, n: int, q_n: Sequence[float]) -> SlotGeometry:
    """Assemble per-slot geometry for AIRS position ``q_n`` at slot ``n``."""
    q_n = np.asarray(q_n, dtype=float)
    rsu_pos = np.stack([rsu_position(i, cfg) for i in range(1, cfg.I + 1)])
    veh_pos = np.stack([vehicle_position(k, n, cfg) for k in range(1, cfg.K + 1)])
    served = tuple(tuple(lst) for lst in associate(n, cfg))
    d_direct = np.sqrt(
        ((rsu_pos[:, None, :] - veh_pos[None, :, :]) ** 2).sum(axis=2))
    d_ra = np.sqrt(((rsu_pos - q_n[:2]) ** 2).sum(axis=1) + q_n[2] ** 2)
    d_av = np.sqrt(((veh_pos - q_n[:2]) ** 2).sum(axis=1) + q_n[2] ** 2)
    cos_in = (rsu_pos[:, 0] - q_n[0]) / d_ra
    cos_out = (veh_pos[:, 0] - q_n[0]) / d_av
    return SlotGeometry(
        n=n, q=q_n, rsu_pos=rsu_pos, veh_pos=veh_pos, served=served,
        d_direct=d_direct, d_ra=d_ra, d_av=d_av,
        cos_phi_in=cos_in, cos_phi_out=cos_out,
    )


def airside_geometry(tables: ScenarioTables, q: np.ndarray):
    """Vectorized AIRS-dependent ranges and angle cosines for all slots.

    Returns ``(d_ra, d_av, cos_in, cos_out)`` with shapes (I, N), (K, N),
    (I, N), (K, N).  ``q`` is the full (N, 3) trajectory.
    """
    q = np.asarray(q, dtype=float)
    dx_r = tables.rsu_pos[:, 0][:, None] - q[:, 0][None, :]
    dy_r = tables.rsu_pos[:, 1][:, None] - q[:, 1][None, :]
    d_ra = np.sqrt(dx_r ** 2 + dy_r ** 2 + q[:, 2][None, :] ** 2)
    dx_v = tables.veh_pos[:, 0, :] - q[:, 0][None, :]
    dy_v = tables.veh_pos[:, 1, :] - q[:, 1][None, :]
    d_av = np.sqrt(dx_v ** 2 + dy_v ** 2 + q[:, 2][None, :] ** 2)
    return d_ra, d_av, dx_r / d_ra, dx_v / d_av


# -- trajectory -------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """One violated constraint: name, multi-index, and magnitude."""

    constraint: str
    index: tuple
    amount: float

    def __str__(self):
        return f"{self.constraint}{self.index}: violated by {self.amount:.3e}"


def straight_line_trajectory(cfg: NetworkConfig) -> np.ndarray:
    """Uniform q0 -> qf interpolation over N slots, shape (N, 3)."""
    frac = np.linspace(0.0, 1.0, cfg.N)[:, None]
    return (1 - frac) * np.asarray(cfg.q0) + frac * np.asarray(cfg.qf)


def validate_trajectory(q: np.ndarray, cfg: NetworkConfig,
                        tol_feas: float = 1e-6) -> list[Violation]:
    """Check endpoints and the per-slot speed limit; [] means feasible."""
    q = np.asarray(q, dtype=float)
    out: list[Violation] = []
    if q.shape != (cfg.N, 3):
        raise ValueError(f"trajectory must have shape ({cfg.N}, 3)")
    for name, ref, row in (("start_point", cfg.q0, q[0]),
                           ("final_point", cfg.qf, q[-1])):
        err = float(np.linalg.norm(row - np.asarray(ref)))
        if err > tol_feas:
            out.append(Violation(name, (), err))
    step = np.linalg.norm(np.diff(q, axis=0), axis=1)
    cap = cfg.V_max * cfg.delta
    for n in np.nonzero(step > cap + tol_feas)[0]:
        out.append(Violation("speed", (int(n) + 2,), float(step[n] - cap)))
    return out
