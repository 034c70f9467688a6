import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otfsim.errors import FormatError, TruncationError
from otfsim.tensorfile import read_tensor, write_tensor

DTYPES = [np.float32, np.float64, np.complex64, np.complex128]


def test_rank2_f64_round_trip(tmp_path):
    path = tmp_path / "t.tns"
    arr = np.array([[1.0, 2.0], [3.0, 4.0]])
    write_tensor(path, arr)
    back = read_tensor(path)
    assert back.dtype == np.float64
    assert np.array_equal(back, arr)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "t.tns"
    write_tensor(path, np.zeros(3))
    raw = bytearray(path.read_bytes())
    raw[:4] = b"XXXX"
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError):
        read_tensor(path)


def test_bad_version_and_dtype_rejected(tmp_path):
    path = tmp_path / "t.tns"
    write_tensor(path, np.zeros(3))
    raw = bytearray(path.read_bytes())
    raw[4] = 99
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError):
        read_tensor(path)
    write_tensor(path, np.zeros(3))
    raw = bytearray(path.read_bytes())
    raw[5] = 7
    path.write_bytes(bytes(raw))
    with pytest.raises(FormatError):
        read_tensor(path)


def test_complex64_rank3_payload_arithmetic(tmp_path):
    # dims (2, 4, 4) complex-f32: 32 entries * 2 components * 4 bytes = 256
    path = tmp_path / "t.tns"
    arr = (np.arange(32, dtype=np.float32) + 1j).astype(np.complex64).reshape(2, 4, 4)
    write_tensor(path, arr)
    raw = path.read_bytes()
    header = 4 + 3 + 4 * 3
    assert len(raw) - header == 256
    assert np.array_equal(read_tensor(path), arr)
    # one f32 component short -> truncation
    path.write_bytes(raw[:-4])
    with pytest.raises(TruncationError):
        read_tensor(path)


def test_trailing_bytes_rejected(tmp_path):
    path = tmp_path / "t.tns"
    write_tensor(path, np.zeros(3))
    path.write_bytes(path.read_bytes() + b"\x00" * 8)
    with pytest.raises(FormatError):
        read_tensor(path)


def test_zero_dim_write_rejected(tmp_path):
    with pytest.raises(ValueError):
        write_tensor(tmp_path / "t.tns", np.zeros((0, 3)))


@settings(max_examples=60, deadline=None)
@given(
    dtype=st.sampled_from(DTYPES),
    shape=st.lists(st.integers(1, 5), min_size=1, max_size=4),
    seed=st.integers(0, 2**32 - 1),
)
def test_round_trip_bit_exact(dtype, shape, seed):
    import tempfile
    from pathlib import Path

    rng = np.random.default_rng(seed)
    arr = rng.standard_normal(shape)
    if np.dtype(dtype).kind == "c":
        arr = arr + 1j * rng.standard_normal(shape)
    arr = arr.astype(dtype)
    with tempfile.TemporaryDirectory() as tmpdir:
        path = Path(tmpdir) / "roundtrip.tns"
        write_tensor(path, arr)
        back = read_tensor(path)
    assert back.dtype == np.dtype(dtype).newbyteorder("<")
    assert back.shape == arr.shape
    assert arr.tobytes() == back.tobytes()
