import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otfsim.core import OtfsParams
from otfsim.errors import CapacityError, LengthError
from otfsim.mapping import (
    pack_latent,
    qpsk_demap,
    qpsk_map,
    read_bits,
    unpack_latent,
    write_bits,
)

SQ2 = np.sqrt(2.0)


def test_gray_map_corners():
    np.testing.assert_allclose(qpsk_map([0, 0]), [(1 + 1j) / SQ2])
    np.testing.assert_allclose(qpsk_map([1, 1]), [(-1 - 1j) / SQ2])
    np.testing.assert_allclose(qpsk_map([0, 1]), [(1 - 1j) / SQ2])
    np.testing.assert_allclose(qpsk_map([1, 0]), [(-1 + 1j) / SQ2])


def test_empty_and_odd():
    assert qpsk_map([]).size == 0
    with pytest.raises(LengthError):
        qpsk_map([0, 1, 0])


def test_unit_average_energy():
    bits = np.random.default_rng(0).integers(0, 2, 1000 * 2)
    syms = qpsk_map(bits)
    np.testing.assert_allclose(np.abs(syms) ** 2, 1.0, atol=1e-15)


def test_demap_quadrants_and_ties():
    assert tuple(qpsk_demap([0.9 + 0.1j])) == (0, 0)
    assert tuple(qpsk_demap([-0.3 + 2j])) == (1, 0)
    assert tuple(qpsk_demap([0j])) == (0, 0)
    assert tuple(qpsk_demap([-0.0 + 0.0j])) == (0, 0)


def test_demap_inverts_map_exhaustive():
    for b1 in (0, 1):
        for b0 in (0, 1):
            assert tuple(qpsk_demap(qpsk_map([b1, b0]))) == (b1, b0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 500))
def test_demap_map_identity_random(seed, n_pairs):
    bits = np.random.default_rng(seed).integers(0, 2, 2 * n_pairs).astype(np.uint8)
    assert np.array_equal(qpsk_demap(qpsk_map(bits)), bits)


def test_pack_round_trip(rng):
    p = OtfsParams(4, 4, 15e3)
    z = rng.standard_normal(20)
    grid, scale = pack_latent(z, p)
    assert np.mean(np.abs(grid) ** 2) == pytest.approx(1.0, rel=1e-12)
    np.testing.assert_allclose(unpack_latent(grid, 20, scale), z, atol=1e-12)


def test_pack_full_and_overflow(rng):
    p = OtfsParams(4, 4, 15e3)
    z = rng.standard_normal(2 * 16)
    grid, scale = pack_latent(z, p)
    np.testing.assert_allclose(unpack_latent(grid, 32, scale), z, atol=1e-12)
    with pytest.raises(CapacityError):
        pack_latent(rng.standard_normal(2 * 16 + 1), p)


def test_pack_zero_latent():
    p = OtfsParams(4, 4, 15e3)
    grid, scale = pack_latent(np.zeros(8), p)
    assert scale == 1.0
    assert np.all(grid == 0)


def test_pack_odd_length(rng):
    p = OtfsParams(4, 4, 15e3)
    z = rng.standard_normal(7)
    grid, scale = pack_latent(z, p)
    np.testing.assert_allclose(unpack_latent(grid, 7, scale), z, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 32))
def test_pack_unpack_property(seed, length):
    p = OtfsParams(4, 4, 15e3)
    z = np.random.default_rng(seed).standard_normal(length)
    grid, scale = pack_latent(z, p)
    np.testing.assert_allclose(unpack_latent(grid, length, scale), z, atol=1e-12)


def test_bit_file_round_trip(tmp_path):
    bits = np.random.default_rng(3).integers(0, 2, 77).astype(np.uint8)
    path = tmp_path / "payload.bits"
    write_bits(path, bits)
    assert np.array_equal(read_bits(path, 77), bits)
    # MSB-first byte order
    write_bits(path, [1, 0, 1, 1, 0, 0, 1, 1])
    assert path.read_bytes() == bytes([0b10110011])
