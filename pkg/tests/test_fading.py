import math

import numpy as np
import pytest
from scipy import integrate

from swarmrel import fading, geometry
from swarmrel.fading import ChannelDrawPhase1, ChannelDrawPhase2

from conftest import make_config


def test_rician_pure_los_limit():
    # huge power ratio: magnitude pinned to 1
    rng = np.random.default_rng(0)
    h = fading.sample_rician(1e15, rng, size=10_000)  # capped internally
    assert np.abs(np.abs(h) - 1.0).max() < 1e-5


def test_rician_rayleigh_case_mean():
    rng = np.random.default_rng(1)
    h = fading.sample_rician(0.0, rng, size=1_000_000)
    m = np.abs(h)
    se = m.std(ddof=1) / np.sqrt(len(m))
    assert abs(m.mean() - math.sqrt(math.pi) / 2.0) < 3.0 * se


def test_rician_unit_power():
    rng = np.random.default_rng(2)
    for kappa in (0.0, 4.0):
        p = np.abs(fading.sample_rician(kappa, rng, size=1_000_000)) ** 2
        se = p.std(ddof=1) / np.sqrt(len(p))
        assert abs(p.mean() - 1.0) < 3.0 * se


def test_rayleigh_unit_power():
    rng = np.random.default_rng(3)
    p = np.abs(fading.sample_rayleigh(rng, size=1_000_000)) ** 2
    se = p.std(ddof=1) / np.sqrt(len(p))
    assert abs(p.mean() - 1.0) < 3.0 * se


def test_magnitude_pdf_normalization_and_moments():
    for kappa in (0.0, 1.0, 4.0, 10.0):
        total = integrate.quad(lambda v: fading.rician_magnitude_pdf(v, kappa), 0.0, 30.0)[0]
        assert total == pytest.approx(1.0, abs=1e-9)
        second = integrate.quad(
            lambda v: v * v * fading.rician_magnitude_pdf(v, kappa), 0.0, 30.0
        )[0]
        assert second == pytest.approx(1.0, abs=1e-9)


def test_magnitude_pdf_rayleigh_case():
    for v in (0.1, 0.5, 1.0, 2.0):
        assert fading.rician_magnitude_pdf(v, 0.0) == pytest.approx(
            2.0 * v * math.exp(-v * v), rel=1e-12
        )


def test_mean_magnitude_matches_pdf_quadrature():
    # fixes the constant in the Laguerre form of E|h|
    for kappa in (0.0, 1.0, 4.0, 10.0):
        ref = integrate.quad(lambda v: v * fading.rician_magnitude_pdf(v, kappa), 0.0, 30.0)[0]
        assert fading.rician_mean_magnitude(kappa) == pytest.approx(ref, abs=1e-10)
    assert fading.rician_mean_magnitude(0.0) == pytest.approx(0.8862269254527580, rel=1e-12)


def test_fourth_moment():
    assert fading.rician_moments(0.0)[2] == pytest.approx(2.0)
    assert fading.rician_moments(4.0)[2] == pytest.approx(1.36)
    rng = np.random.default_rng(4)
    p4 = np.abs(fading.sample_rician(4.0, rng, size=1_000_000)) ** 4
    se = p4.std(ddof=1) / np.sqrt(len(p4))
    assert abs(p4.mean() - 1.36) < 3.0 * se


# --- SINR computation -----------------------------------------------------------


def _scene(config, gbs_xy, uav_xy):
    gbs_xy = np.asarray(gbs_xy, dtype=float)
    uav_xy = np.asarray(uav_xy, dtype=float)
    h = config.swarm_altitude_m
    gbs = geometry.GbsLayout(
        positions=gbs_xy,
        available_idx=np.arange(config.m_available),
        occupied_idx=np.arange(config.m_available, len(gbs_xy)),
        center_distances=np.sqrt((gbs_xy**2).sum(1) + h * h),
    )
    pos3 = np.column_stack([uav_xy, np.full(len(uav_xy), h)])
    diff = uav_xy[:, None, :] - uav_xy[None, :, :]
    swarm = geometry.SwarmLayout(
        positions=pos3, head_idx=0, pair_distances=np.sqrt((diff**2).sum(-1))
    )
    return gbs, swarm


def test_phase1_pure_snr_scales_with_power():
    cfg = make_config(m_available=3, m_occupied=0, n_uavs=2)
    cfg_hi = make_config(m_available=3, m_occupied=0, n_uavs=2, tx_power_gbs_dbm=53.0)
    gbs, swarm = _scene(cfg, [[100, 0], [0, 200], [-50, -50]], [[0, 0], [5, 5]])
    rng = np.random.default_rng(5)
    draw = fading.draw_phase1(cfg, rng)
    s1 = fading.phase1_sinrs(gbs, swarm, draw, cfg)
    s2 = fading.phase1_sinrs(gbs, swarm, draw, cfg_hi)
    # +10 dB transmit power vs essentially zero noise: 10x SINR to within the
    # noise floor's tiny contribution
    assert np.allclose(s2 / s1, 10.0, rtol=1e-6)


def test_phase1_hand_computed_head_sinr():
    # one serving and one interfering GBS at the same distance, unit fading,
    # no receiver noise: head SINR is exactly 1
    cfg = make_config(m_available=1, m_occupied=1, n_uavs=1, noise_phase1_dbm=-math.inf)
    gbs, swarm = _scene(cfg, [[400, 0], [-400, 0]], [[0, 0]])
    draw = ChannelDrawPhase1(gains=np.ones((1, 2), dtype=complex))
    sinr = fading.phase1_sinrs(gbs, swarm, draw, cfg)
    assert sinr[0] == pytest.approx(1.0, rel=1e-12)


def test_phase1_head_sinr_invariant_to_serving_phases():
    cfg = make_config(n_uavs=4)
    gbs, swarm = _scene(
        cfg,
        np.random.default_rng(6).uniform(-600, 600, size=(16, 2)),
        np.random.default_rng(7).uniform(-20, 20, size=(4, 2)),
    )
    rng = np.random.default_rng(8)
    draw = fading.draw_phase1(cfg, rng)
    base = fading.phase1_sinrs(gbs, swarm, draw, cfg)
    rotated = draw.gains.copy()
    phases = np.exp(2j * np.pi * np.random.default_rng(9).random(8))
    rotated[:, :8] *= phases[None, :]
    turned = fading.phase1_sinrs(gbs, swarm, ChannelDrawPhase1(gains=rotated), cfg)
    assert turned[0] == pytest.approx(base[0], rel=1e-12)


def test_phase1_coherent_beats_unit_combining_at_head():
    cfg = make_config(n_uavs=2)
    gbs, swarm = _scene(
        cfg,
        np.random.default_rng(10).uniform(-600, 600, size=(16, 2)),
        [[0, 0], [10, 0]],
    )
    rng = np.random.default_rng(11)
    head_mean = 0.0
    unit_mean = 0.0
    n = 10_000
    for _ in range(n):
        draw = fading.draw_phase1(cfg, rng)
        head_mean += fading.phase1_sinrs(gbs, swarm, draw, cfg, combining="head")[0]
        unit_mean += fading.phase1_sinrs(gbs, swarm, draw, cfg, combining="unit")[0]
    assert head_mean / n > unit_mean / n


def test_phase2_no_decoders_means_silence(config):
    swarm = geometry.sample_swarm_layout(config, np.random.default_rng(12))
    sinrs = fading.phase2_sinrs(
        swarm, np.array([], dtype=int), ChannelDrawPhase2(gains=np.empty((40, 0))), config
    )
    assert sinrs.shape == (40,)
    assert (sinrs == 0.0).all()


def test_phase2_single_relay_hand_value():
    # 23 dBm through -40 dB gain over 10 m at exponent 2 against -40 dBm noise
    cfg = make_config(n_uavs=2)
    _, swarm = _scene(cfg, [[100, 0]], [[0, 0], [10, 0]])
    draw = ChannelDrawPhase2(gains=np.ones((1, 1), dtype=complex))
    sinr = fading.phase2_sinrs(swarm, np.array([0]), draw, cfg)
    assert sinr[0] == pytest.approx(1.9952623149688795, rel=1e-12)


def test_phase2_noise_scaling():
    cfg = make_config(n_uavs=3)
    cfg_noisier = make_config(n_uavs=3, intf_noise_phase2_dbm=-40.0 + 10.0 * math.log10(2.0))
    _, swarm = _scene(cfg, [[100, 0]], [[0, 0], [10, 0], [0, 15]])
    rng = np.random.default_rng(13)
    draw = fading.draw_phase2(2, 1, rng)
    s1 = fading.phase2_sinrs(swarm, np.array([0]), draw, cfg)
    s2 = fading.phase2_sinrs(swarm, np.array([0]), draw, cfg_noisier)
    assert np.allclose(s1 / s2, 2.0, rtol=1e-12)


def test_phase2_permutation_equivariant():
    cfg = make_config(n_uavs=6)
    _, swarm = _scene(
        cfg, [[100, 0]], np.random.default_rng(14).uniform(-20, 20, size=(6, 2))
    )
    rng = np.random.default_rng(15)
    gains = fading.sample_rayleigh(rng, size=(3, 3))
    decoders = np.array([0, 2, 4])
    base = fading.phase2_sinrs(swarm, decoders, ChannelDrawPhase2(gains=gains), cfg)
    perm = np.array([2, 0, 1])  # reorder the relay list and its gain columns
    swapped = fading.phase2_sinrs(
        swarm, decoders[perm], ChannelDrawPhase2(gains=gains[:, perm]), cfg
    )
    assert np.allclose(base, swapped, rtol=1e-12)
