import pytest

from swarmrel import scenario


BASE = dict(
    n_uavs=40,
    m_available=8,
    m_occupied=8,
    coverage_radius_m=900.0,
    swarm_radius_m=30.0,
    swarm_altitude_m=300.0,
    min_separation_m=5.0,
    pathloss_exp_cell=2.0,
    pathloss_exp_d2d=2.0,
    rician_k=4.0,
    ref_gain_cell_db=-40.0,
    ref_gain_d2d_db=-40.0,
    tx_power_gbs_dbm=43.0,
    tx_power_uav_dbm=23.0,
    bandwidth_cell_hz=200e3,
    bandwidth_d2d_hz=200e3,
    sinr_gap_cell=5.0 / 6.0,
    sinr_gap_d2d=5.0 / 6.0,
    intf_noise_phase2_dbm=-40.0,
    message_bits=40.0,
    tau_total_s=1e-3,
    tau_phase1_s=0.5e-3,
)


def make_config(**overrides) -> scenario.ScenarioConfig:
    """Baseline scenario used throughout the suite, with field overrides."""
    params = dict(BASE)
    params.update(overrides)
    return scenario.validate(scenario.ScenarioConfig(**params))


@pytest.fixture
def config() -> scenario.ScenarioConfig:
    return make_config()
