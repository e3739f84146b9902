"""Small-scale fading draws and per-UAV SINR computation for both stages.

Fading coefficients are sampled directly and SINRs are formed from channel
coefficients; no symbol waveforms are generated, since decode decisions
depend only on signal and interference powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .geometry import GbsLayout, SwarmLayout
from .scenario import ScenarioConfig

__all__ = [
    "ChannelDrawPhase1",
    "ChannelDrawPhase2",
    "sample_rician",
    "sample_rayleigh",
    "rician_magnitude_pdf",
    "rician_mean_magnitude",
    "rician_moments",
    "draw_phase1",
    "draw_phase2",
    "phase1_sinrs",
    "phase2_sinrs",
]

# beyond this the line-of-sight term is numerically pure
_KAPPA_CAP = 1e12


@dataclass(frozen=True)
class ChannelDrawPhase1:
    """Unit-power Rician fading coefficients, one per (UAV, GBS) link."""

    gains: np.ndarray  # (N, M) complex


@dataclass(frozen=True)
class ChannelDrawPhase2:
    """Unit-power Rayleigh fading coefficients, one per (receiver, relay) link."""

    gains: np.ndarray  # (n_receivers, n_relays) complex


def sample_rayleigh(rng: np.random.Generator, size=None) -> np.ndarray:
    """Circularly symmetric complex normal draws with unit power."""
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return (re + 1j * im) / math.sqrt(2.0)


def sample_rician(kappa: float, rng: np.random.Generator, size=None) -> np.ndarray:
    """Unit-power Rician draws with uniformly random line-of-sight phase.

    The scattered part is CN(0, 1/(kappa+1)); only the ratio of the two
    powers is specified physically, so the deterministic part's phase is
    randomized per draw.
    """
    if kappa < 0:
        raise ValueError(f"kappa must be >= 0, got {kappa}")
    kappa = min(kappa, _KAPPA_CAP)
    los = np.exp(2j * np.pi * rng.random(size))
    scattered = sample_rayleigh(rng, size)
    return math.sqrt(kappa / (kappa + 1.0)) * los + math.sqrt(1.0 / (kappa + 1.0)) * scattered


def rician_magnitude_pdf(v: float, kappa: float) -> float:
    """Density of |h| for the unit-power Rician coefficient, v >= 0."""
    if v < 0:
        return 0.0
    kp1 = kappa + 1.0
    log_env = -kappa - kp1 * v * v
    bessel_arg = 2.0 * math.sqrt(kappa * kp1) * v
    # fold the exponential into the Bessel asymptotic regime to avoid inf*0
    if bessel_arg > 700.0:
        log_i0 = bessel_arg - 0.5 * math.log(2.0 * math.pi * bessel_arg)
        return 2.0 * kp1 * v * math.exp(log_env + log_i0)
    return 2.0 * kp1 * v * math.exp(log_env) * specfun.bessel_i0(bessel_arg)


def rician_mean_magnitude(kappa: float) -> float:
    """E|h| for the unit-power Rician coefficient.

    The constant in front of the Laguerre function is fixed by requiring
    agreement with direct quadrature of the magnitude density (the test
    suite asserts this); it is 1/2 * sqrt(pi/(kappa+1)).
    """
    return 0.5 * math.sqrt(math.pi / (kappa + 1.0)) * specfun.laguerre_half(-kappa)


def rician_moments(kappa: float) -> tuple[float, float, float]:
    """(E|h|, E|h|^2, E|h|^4) for the unit-power Rician coefficient."""
    m4 = (2.0 + 4.0 * kappa + kappa * kappa) / (kappa + 1.0) ** 2
    return rician_mean_magnitude(kappa), 1.0, m4


def draw_phase1(config: ScenarioConfig, rng: np.random.Generator) -> ChannelDrawPhase1:
    """One Rician coefficient per (UAV, GBS) link, i.i.d. across links."""
    return ChannelDrawPhase1(
        gains=sample_rician(config.rician_k, rng, size=(config.n_uavs, config.m_total))
    )


def draw_phase2(n_receivers: int, n_relays: int, rng: np.random.Generator) -> ChannelDrawPhase2:
    """One Rayleigh coefficient per (receiver, relay) link."""
    return ChannelDrawPhase2(gains=sample_rayleigh(rng, size=(n_receivers, n_relays)))


def _phase1_channels(
    gbs: GbsLayout, swarm: SwarmLayout, draw: ChannelDrawPhase1, config: ScenarioConfig
) -> np.ndarray:
    """Full complex channel matrix (N, M): path loss times fading.

    Uses the exact per-UAV distances; no common-distance approximation.
    """
    gbs3d = np.column_stack([gbs.positions, np.zeros(len(gbs.positions))])
    diff = swarm.positions[:, None, :] - gbs3d[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    amp = np.sqrt(config.ref_gain_cell * dist ** (-config.pathloss_exp_cell))
    return amp * draw.gains


def phase1_sinrs(
    gbs: GbsLayout,
    swarm: SwarmLayout,
    draw: ChannelDrawPhase1,
    config: ScenarioConfig,
    combining: str = "head",
    transmitters: np.ndarray | None = None,
) -> np.ndarray:
    """SINR of every UAV in the cellular downlink stage.

    ``combining='head'`` applies each serving GBS's conjugate-phase unit
    weight for the head's channel, so the head combines coherently;
    ``'unit'`` sends unweighted.  ``transmitters`` restricts the serving set
    to a subset of the available indices (defaults to all of them).
    Occupied GBSs always interfere at full power.
    """
    h = _phase1_channels(gbs, swarm, draw, config)
    tx = gbs.available_idx if transmitters is None else np.asarray(transmitters)
    p = config.tx_power_gbs_w
    if combining == "head":
        head_ch = h[swarm.head_idx, tx]
        weights = np.conj(head_ch) / np.abs(head_ch)
    elif combining == "unit":
        weights = np.ones(len(tx))
    else:
        raise ValueError(f"unknown combining mode {combining!r}")
    signal = p * np.abs(h[:, tx] @ weights) ** 2 if len(tx) else np.zeros(config.n_uavs)
    interference = p * (np.abs(h[:, gbs.occupied_idx]) ** 2).sum(axis=1)
    return signal / (interference + config.noise_phase1_w)


def phase2_sinrs(
    swarm: SwarmLayout,
    decoders: np.ndarray,
    draw: ChannelDrawPhase2,
    config: ScenarioConfig,
    receivers: np.ndarray | None = None,
) -> np.ndarray:
    """SINR at each receiver when all decoders relay simultaneously.

    ``receivers`` defaults to the complement of ``decoders``; either way the
    result is ordered by UAV index and has one value per receiver.  With no
    decoders there is no transmission and the SINRs are zero.
    """
    decoders = np.asarray(decoders, dtype=int)
    if receivers is None:
        mask = np.zeros(config.n_uavs, dtype=bool)
        mask[decoders] = True
        receivers = np.flatnonzero(~mask)
    else:
        receivers = np.asarray(receivers, dtype=int)
    if len(decoders) == 0:
        return np.zeros(len(receivers))
    dist = swarm.pair_distances[np.ix_(receivers, decoders)]
    amp = np.sqrt(config.ref_gain_d2d * dist ** (-config.pathloss_exp_d2d))
    combined = (amp * draw.gains).sum(axis=1)
    return config.tx_power_uav_w * np.abs(combined) ** 2 / config.intf_noise_phase2_w
