import pytest

from splitsim.accuracy import SynthShape, synth_lut
from splitsim.experiment import default_config_text, parse_config
from splitsim.models import DeviceParams, RadioParams, ServerParams, SplitProfile, db_to_linear

SNR_GRID_DB = (-5, -4, -3, -2, 0, 5, 10, 20)


@pytest.fixture(scope="session")
def default_config():
    return parse_config(default_config_text(), base_dir=".")


@pytest.fixture(scope="session")
def small_profile():
    # 6 splitting points, toy numbers easy to hand-check
    return SplitProfile(
        feature_counts=(1000, 800, 400, 200, 100, 10),
        stage_flops=(0.0, 1e6, 2e6, 4e6, 8e6, 16e6),
    )


@pytest.fixture(scope="session")
def device():
    return DeviceParams(f_l_min=1e8, f_l_max=1.4e9, eta_l=50, kappa=1.097e-27, p_tx_max=0.3)


@pytest.fixture(scope="session")
def server():
    return ServerParams(f_r_max=4.5e9, eta_r=2000)


@pytest.fixture(scope="session")
def radio():
    return RadioParams(
        n0=db_to_linear(-174) * 1e-3,
        noise_figure=db_to_linear(5),
        w_max=1e7,
        beta=0.25,
        snr_grid=tuple(db_to_linear(g) for g in SNR_GRID_DB),
    )


@pytest.fixture(scope="session")
def small_lut(small_profile, radio):
    shape = SynthShape(g_max=0.95, depth_slope=0.8, snr_slope=0.15, midpoint_k=2, midpoint_snr_db=0)
    return synth_lut(small_profile.last_index, radio.snr_grid, shape)
