import numpy as np
import pytest

from otfsim.channel import ChannelSpec, PathSpec, add_awgn, apply_channel, gen_channel
from otfsim.core import OtfsParams
from otfsim.detection import build_dd_matrix, csi_vector, lmmse_detect, mrc_detect
from otfsim.errors import SizeError
from otfsim.mapping import qpsk_demap, qpsk_map
from otfsim.transforms import otfs_demodulate, otfs_modulate

from conftest import rand_grid


def _through_channel(x, ch, p, snr_db=np.inf, seed=0):
    s = apply_channel(otfs_modulate(x, p), ch, p)
    s, var = add_awgn(s, snr_db, seed=seed)
    return otfs_demodulate(s, p), var


def test_dd_matrix_identity(p8):
    ch = ChannelSpec((PathSpec(1.0, 0, 0),))
    np.testing.assert_allclose(build_dd_matrix(ch, p8), np.eye(64), atol=1e-14)


def test_dd_matrix_columns_match_pipeline():
    p = OtfsParams(4, 4, 15e3)
    ch = gen_channel(p, 500.0, n_paths=2, max_delay_tap=2, seed=0)
    h = build_dd_matrix(ch, p)
    for j in range(16):
        e = np.zeros(16)
        e[j] = 1.0
        col = otfs_demodulate(
            apply_channel(otfs_modulate(e.reshape(4, 4), p), ch, p), p
        ).reshape(-1)
        np.testing.assert_allclose(h[:, j], col, atol=1e-10)


def test_dd_matrix_frobenius(p8):
    for seed in range(5):
        ch = gen_channel(p8, 650.0, n_paths=3, max_delay_tap=4, seed=seed)
        h = build_dd_matrix(ch, p8)
        # unitary per-path operators: ||H||_F^2 = NM * sum |g_i|^2
        assert np.sum(np.abs(h) ** 2) == pytest.approx(
            64 * ch.total_power, rel=1e-6
        )


def test_dd_matrix_size_guard():
    p = OtfsParams(128, 64, 15e3)
    ch = ChannelSpec((PathSpec(1.0, 0, 0),))
    with pytest.raises(SizeError):
        build_dd_matrix(ch, p)


def test_lmmse_identity_noiseless(p8, rng):
    ch = ChannelSpec((PathSpec(1.0, 0, 0),))
    x = rand_grid(rng, 8, 8)
    eq = lmmse_detect(x, ch, 0.0, p8)
    np.testing.assert_allclose(eq.symbols, x, atol=1e-9)
    assert np.all(eq.post_eq_noise_std > 0)


def test_lmmse_recovers_noiseless_multipath(rng):
    p = OtfsParams(4, 4, 15e3)
    ch = gen_channel(p, 500.0, n_paths=2, max_delay_tap=2, seed=1)
    x = rand_grid(rng, 4, 4)
    y, _ = _through_channel(x, ch, p)
    eq = lmmse_detect(y, ch, 0.0, p)
    np.testing.assert_allclose(eq.symbols, x, atol=1e-8)


def test_lmmse_matches_scalar_closed_form(p8, rng):
    # identity channel at 10 dB: per-symbol MSE = s2 / (1 + s2)
    ch = ChannelSpec((PathSpec(1.0, 0, 0),))
    snr_db = 10.0
    mse = 0.0
    frames = 200
    for f in range(frames):
        bits = rng.integers(0, 2, 2 * 64).astype(np.uint8)
        x = qpsk_map(bits).reshape(8, 8)
        y, var = _through_channel(x, ch, p8, snr_db=snr_db, seed=f)
        eq = lmmse_detect(y, ch, var, p8)
        mse += np.mean(np.abs(eq.symbols - x) ** 2)
    mse /= frames
    s2 = 10 ** (-snr_db / 10)
    assert mse == pytest.approx(s2 / (1 + s2), rel=0.05)


def test_lmmse_error_covariance_positive(p8, rng):
    ch = gen_channel(p8, 500.0, n_paths=3, max_delay_tap=4, seed=2)
    x = rand_grid(rng, 8, 8)
    y, var = _through_channel(x, ch, p8, snr_db=5.0, seed=3)
    eq = lmmse_detect(y, ch, var, p8)
    assert np.all(eq.post_eq_noise_std > 0)
    assert np.all(np.isfinite(eq.csi))


def test_mrc_identity_one_iteration(p8, rng):
    ch = ChannelSpec((PathSpec(1.0, 0, 0),))
    y = rand_grid(rng, 8, 8)
    eq = mrc_detect(y, ch, 0.0, p8)
    assert eq.converged
    assert eq.iterations == 1
    np.testing.assert_allclose(eq.symbols, y, atol=1e-12)


def test_mrc_matches_lmmse_single_path(p8, rng):
    for seed in range(10):
        g = complex(*np.random.default_rng(seed).standard_normal(2))
        ch = ChannelSpec((PathSpec(g / abs(g), 3, 2),))
        x = rand_grid(rng, 8, 8)
        y, _ = _through_channel(x, ch, p8)
        a = lmmse_detect(y, ch, 0.0, p8).symbols
        b = mrc_detect(y, ch, 0.0, p8).symbols
        np.testing.assert_allclose(a, b, atol=1e-6)


def test_mrc_zero_ber_noiseless_multipath(p8):
    rng = np.random.default_rng(99)
    for seed in range(20):
        ch = gen_channel(p8, 500.0, n_paths=2 + seed % 4, max_delay_tap=5, seed=seed)
        bits = rng.integers(0, 2, 2 * 64).astype(np.uint8)
        x = qpsk_map(bits).reshape(8, 8)
        y, _ = _through_channel(x, ch, p8)
        eq = mrc_detect(y, ch, 0.0, p8, max_iter=20)
        assert np.array_equal(qpsk_demap(eq.symbols.reshape(-1)), bits), (
            f"seed {seed}: MRC hard decisions differ"
        )


def test_mrc_mse_close_to_lmmse(p8):
    rng = np.random.default_rng(5)
    mse_mrc = mse_lmmse = 0.0
    for f in range(100):
        ch = gen_channel(p8, 500.0, n_paths=3, max_delay_tap=4, seed=1000 + f)
        bits = rng.integers(0, 2, 2 * 64).astype(np.uint8)
        x = qpsk_map(bits).reshape(8, 8)
        y, var = _through_channel(x, ch, p8, snr_db=10.0, seed=f)
        mse_mrc += np.mean(np.abs(mrc_detect(y, ch, var, p8).symbols - x) ** 2)
        mse_lmmse += np.mean(np.abs(lmmse_detect(y, ch, var, p8).symbols - x) ** 2)
    assert mse_mrc <= 2.0 * mse_lmmse


def test_detectors_phase_equivariant(p8, rng):
    ch = gen_channel(p8, 500.0, n_paths=3, max_delay_tap=4, seed=8)
    bits = rng.integers(0, 2, 2 * 64).astype(np.uint8)
    x = qpsk_map(bits).reshape(8, 8)
    y, var = _through_channel(x, ch, p8, snr_db=15.0, seed=4)
    phi = np.exp(1j * 0.77)
    for detect in (lmmse_detect, mrc_detect):
        base = detect(y, ch, var, p8).symbols
        rot = detect(phi * y, ch, var, p8).symbols
        np.testing.assert_allclose(rot, phi * base, atol=1e-8)


def test_mrc_nonconvergence_flag(p8, rng):
    # a single damped iteration on a dispersive channel cannot reach the
    # 1e-6 tolerance: the best iterate is returned flagged
    ch = gen_channel(p8, 500.0, n_paths=4, max_delay_tap=5, seed=12)
    x = rand_grid(rng, 8, 8)
    y, _ = _through_channel(x, ch, p8)
    eq = mrc_detect(y, ch, 0.0, p8, max_iter=1)
    assert not eq.converged
    assert eq.iterations == 1


def test_csi_vector_shapes(p8):
    ch = gen_channel(p8, 500.0, n_paths=3, max_delay_tap=4, seed=3)
    v = csi_vector(ch, p8)
    assert v.shape == (64,)
    assert np.linalg.norm(v) == pytest.approx(1.0)
    assert csi_vector(ch, p8, 10).shape == (10,)
    tiled = csi_vector(ch, p8, 150)
    assert tiled.shape == (150,)
    np.testing.assert_allclose(tiled[64:128], tiled[:64])
