"""Binary tensor interchange format.

Layout (all integers little-endian):

    magic   4 bytes  b"OTFS"
    version u8       1
    dtype   u8       0 = f32, 1 = f64, 2 = complex-f32, 3 = complex-f64
    rank    u8
    dims    rank * u32
    payload product(dims) * itemsize bytes, row-major; complex values are
            interleaved (re, im) pairs

Round trips are bit-exact, which the file consumers (trainer hand-off,
dataset generation) rely on.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import FormatError, TruncationError

__all__ = ["read_tensor", "write_tensor"]

MAGIC = b"OTFS"
VERSION = 1

# Explicit little-endian dtypes so files are portable across hosts.
_CODE_TO_DTYPE = {
    0: np.dtype("<f4"),
    1: np.dtype("<f8"),
    2: np.dtype("<c8"),
    3: np.dtype("<c16"),
}
_KIND_TO_CODE = {("f", 4): 0, ("f", 8): 1, ("c", 8): 2, ("c", 16): 3}


def write_tensor(path, arr: np.ndarray) -> None:
    """Write ``arr`` to ``path``. Integer/other dtypes are promoted to f64."""
    a = np.asarray(arr)
    if a.ndim < 1:
        raise ValueError("rank-0 tensors are not supported")
    if a.ndim > 255:
        raise ValueError("rank exceeds 255")
    if any(d == 0 for d in a.shape):
        raise ValueError(f"zero-length dimension in shape {a.shape}")
    key = (a.dtype.kind, a.dtype.itemsize)
    if key not in _KIND_TO_CODE:
        a = a.astype(np.complex128 if a.dtype.kind == "c" else np.float64)
        key = (a.dtype.kind, a.dtype.itemsize)
    code = _KIND_TO_CODE[key]
    a = np.ascontiguousarray(a, dtype=_CODE_TO_DTYPE[code])
    header = MAGIC + struct.pack(
        f"<BBB{a.ndim}I", VERSION, code, a.ndim, *a.shape
    )
    Path(path).write_bytes(header + a.tobytes())


def read_tensor(path) -> np.ndarray:
    """Read a tensor written by :func:`write_tensor`.

    Raises
    ------
    FormatError
        on bad magic, unsupported version/dtype code, or trailing bytes.
    TruncationError
        when the payload (or header) is shorter than the dims promise.
    """
    buf = Path(path).read_bytes()
    if len(buf) < 7:
        raise TruncationError(f"{path}: file shorter than fixed header")
    if buf[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic {buf[:4]!r}")
    version, code, rank = struct.unpack_from("<BBB", buf, 4)
    if version != VERSION:
        raise FormatError(f"{path}: unsupported version {version}")
    if code not in _CODE_TO_DTYPE:
        raise FormatError(f"{path}: unknown dtype code {code}")
    if rank < 1:
        raise FormatError(f"{path}: rank must be >= 1")
    dims_end = 7 + 4 * rank
    if len(buf) < dims_end:
        raise TruncationError(f"{path}: header truncated in dims")
    dims = struct.unpack_from(f"<{rank}I", buf, 7)
    if any(d == 0 for d in dims):
        raise FormatError(f"{path}: zero-length dimension in {dims}")
    dtype = _CODE_TO_DTYPE[code]
    nbytes = int(np.prod(dims, dtype=np.int64)) * dtype.itemsize
    payload = buf[dims_end:]
    if len(payload) < nbytes:
        raise TruncationError(
            f"{path}: payload has {len(payload)} bytes, expected {nbytes}"
        )
    if len(payload) > nbytes:
        raise FormatError(f"{path}: {len(payload) - nbytes} trailing bytes")
    return np.frombuffer(payload, dtype=dtype).reshape(dims).copy()
