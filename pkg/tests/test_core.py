import numpy as np
import pytest

from otfsim.core import OtfsParams, as_grid, as_time_signal, validate_params
from otfsim.errors import ConsistencyError, DimensionError


def test_paper_scale_params_valid():
    p = OtfsParams(128, 256, 15e3, 4e9, 1 / 15e3)
    assert validate_params(p) is p
    assert p.frame_len == 128 * 256
    assert p.doppler_resolution_hz == pytest.approx(117.1875)


def test_minimal_params_valid():
    p = OtfsParams(2, 2, 1.0, 1.0, 1.0)
    assert validate_params(p) is p


def test_symbol_duration_defaults_to_inverse_spacing():
    p = OtfsParams(16, 32, 15e3)
    assert p.symbol_duration_s * p.subcarrier_spacing_hz == pytest.approx(1.0)
    validate_params(p)


def test_non_power_of_two_rejected():
    with pytest.raises(DimensionError):
        validate_params(OtfsParams(3, 8, 1.0))
    with pytest.raises(DimensionError):
        validate_params(OtfsParams(8, 12, 1.0))
    with pytest.raises(DimensionError):
        validate_params(OtfsParams(1, 8, 1.0))


def test_nonpositive_frequency_rejected():
    with pytest.raises(ValueError):
        validate_params(OtfsParams(4, 4, 0.0))
    with pytest.raises(ValueError):
        validate_params(OtfsParams(4, 4, 15e3, carrier_freq_hz=-1.0))


def test_inconsistent_duration_rejected():
    with pytest.raises(ConsistencyError):
        validate_params(OtfsParams(4, 4, 15e3, symbol_duration_s=1e-4))


def test_validation_idempotent():
    p = OtfsParams(16, 32, 15e3)
    assert validate_params(validate_params(p)) is p


def test_grid_validation(p_desk):
    g = np.zeros((16, 32), complex)
    assert as_grid(g, p_desk).shape == (16, 32)
    with pytest.raises(DimensionError):
        as_grid(np.zeros((16, 16)), p_desk)
    with pytest.raises(DimensionError):
        as_grid(np.zeros(16), p_desk)
    bad = g.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        as_grid(bad, p_desk)


def test_signal_validation(p_desk):
    s = np.zeros(16 * 32, complex)
    assert as_time_signal(s, p_desk).size == 512
    with pytest.raises(DimensionError):
        as_time_signal(np.zeros(100), p_desk)
    bad = s.copy()
    bad[3] = np.inf
    with pytest.raises(ValueError):
        as_time_signal(bad, p_desk)
