"""LoS channel models for the direct and AIRS-reflected links.

The AIRS carries a uniform linear array of M elements along the x-axis with
spacing d_M.  All links are line-of-sight with d^-2 large-scale fading; the
direct link is modeled with zero phase, so a perfectly aligned reflection adds
constructively and the effective gain has the closed form

    h_check = sqrt(h0)/d_ik + h1 * M / (d_ra * d_av).
"""

from __future__ import annotations

import numpy as np

from .scenario import NetworkConfig, ScenarioTables, airside_geometry

__all__ = [
    "direct_channel",
    "steering_channels",
    "effective_channel",
    "optimal_phase",
    "aligned_effective_gain",
    "phase_profile",
    "effective_gains",
]

TWO_PI = 2.0 * np.pi


def direct_channel(h0: float, d_ik: float) -> float:
    """Real-valued direct-link coefficient sqrt(h0)/d."""
    if d_ik <= 0:
        raise ValueError("direct range must be positive")
    return np.sqrt(h0) / d_ik


def steering_channels(cfg: NetworkConfig, d_ra: float, d_av: float,
                      cos_in: float, cos_out: float):
    """RSU->AIRS and AIRS->vehicle element responses, each shape (M,).

    Element m (0-based) contributes a phase ramp exp(-j*2*pi/lambda * m * d_M
    * cos(phi)) on top of the common sqrt(h1)/d amplitude.
    """
    m = np.arange(cfg.M)
    kappa = TWO_PI / cfg.wavelength * cfg.d_M * m
    h_ra = np.sqrt(cfg.h1) / d_ra * np.exp(-1j * kappa * cos_in)
    g_av = np.sqrt(cfg.h1) / d_av * np.exp(-1j * kappa * cos_out)
    return h_ra, g_av


def effective_channel(h_direct: float, h_ra: np.ndarray, g_av: np.ndarray,
                      theta: np.ndarray) -> complex:
    """Combined coefficient h_direct + g^H diag(exp(j*theta)) h."""
    return h_direct + np.sum(np.conj(g_av) * np.exp(1j * theta) * h_ra)

def optimal_phase(cfg: NetworkConfig, cos_in: float, cos_out: float) -> np.ndarray:
    """Per-element phases aligning the reflection with the direct link.

    theta_m = 2*pi/lambda * d_M * m * (cos_in - cos_out), wrapped to [0, 2*pi).
    """
    m = np.arange(cfg.M)
    theta = TWO_PI / cfg.wavelength * cfg.d_M * m * (cos_in - cos_out)
    return np.mod(theta, TWO_PI)


def aligned_effective_gain(cfg: NetworkConfig, d_ik: float, d_ra: float,
                           d_av: float) -> float:
    """|effective channel| under phase alignment (closed form)."""
    return np.sqrt(cfg.h0) / d_ik + cfg.h1 * cfg.M / (d_ra * d_av)


def phase_profile(cfg: NetworkConfig, tables: ScenarioTables,
                  q: np.ndarray) -> np.ndarray:
    """One phase vector per slot, shape (M, N).

    The AIRS serves one link per slot: the active RSU nearest the AIRS, and
    within it the vehicle with the largest direct range (the one that needs
    the reflection most).  Slots with no served vehicle get zero phases.
    """
    theta = np.zeros((cfg.M, cfg.N))
    if cfg.M == 0:
        return theta
    d_ra, d_av, cos_in, cos_out = airside_geometry(tables, q)
    for n in range(cfg.N):
        active = np.nonzero(tables.active[:, n])[0]
        if active.size == 0:
            continue
        i = active[np.argmin(d_ra[active, n])]
        served = np.nonzero(tables.assoc[i, :, n])[0]
        k = served[np.argmax(tables.d_direct[i, served, n])]
        m = np.arange(cfg.M)
        ramp = TWO_PI / cfg.wavelength * cfg.d_M * m
        theta[:, n] = np.mod(ramp * (cos_in[i, n] - cos_out[k, n]), TWO_PI)
    return theta


def effective_gains(cfg: NetworkConfig, tables: ScenarioTables, q: np.ndarray,
                    theta: np.ndarray) -> np.ndarray:
    """|h_eff|^2 for every served (i, k, n), shape (P,) over table pairs.

    Vectorized over pairs; uses the actual per-slot phases, so only the
    link targeted by :func:`phase_profile` is guaranteed aligned.
    """
    pi, pk, pn = tables.pair_i, tables.pair_k, tables.pair_n
    d_ra, d_av, cos_in, cos_out = airside_geometry(tables, q)
    h_d = np.sqrt(cfg.h0) / tables.d_direct[pi, pk, pn]
    if cfg.M == 0:
        return h_d ** 2
    amp = cfg.h1 / (d_ra[pi, pn] * d_av[pk, pn])
    ramp = TWO_PI / cfg.wavelength * cfg.d_M * np.arange(cfg.M)
    mismatch = theta[:, pn].T + ramp[None, :] * (cos_out[pk, pn] - cos_in[pi, pn])[:, None]
    reflected = amp * np.exp(1j * mismatch).sum(axis=1)
    return np.abs(h_d + reflected) ** 2
