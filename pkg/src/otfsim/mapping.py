"""Bit/symbol mapping and latent-vector packing onto the DD grid.

QPSK only (modulation order 4); Gray labeling with the bit pair (b1, b0)
mapped to ((1 - 2*b1) + j(1 - 2*b0)) / sqrt(2), so average symbol energy
is exactly 1.
"""

from __future__ import annotations

import numpy as np

from .core import OtfsParams, as_grid
from .errors import CapacityError, LengthError

__all__ = [
    "qpsk_map",
    "qpsk_demap",
    "pack_latent",
    "unpack_latent",
    "write_bits",
    "read_bits",
]

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def qpsk_map(bits) -> np.ndarray:
    """Map a 0/1 sequence (even length) to Gray-coded QPSK symbols."""
    b = np.asarray(bits)
    if b.ndim != 1:
        raise LengthError("bit buffer must be 1-D")
    if b.size % 2 != 0:
        raise LengthError(f"QPSK needs an even bit count, got {b.size}")
    if b.size and not np.isin(b, (0, 1)).all():
        raise ValueError("bit buffer must contain only 0 and 1")
    b = b.astype(np.float64)
    return ((1.0 - 2.0 * b[0::2]) + 1j * (1.0 - 2.0 * b[1::2])) * _INV_SQRT2


def qpsk_demap(symbols) -> np.ndarray:
    """Hard-decision demap by quadrant; ties (zero component) decide bit 0."""
    s = np.asarray(symbols, dtype=np.complex128).ravel()
    bits = np.empty(2 * s.size, dtype=np.uint8)
    bits[0::2] = s.real < 0.0
    bits[1::2] = s.imag < 0.0
    return bits


def pack_latent(z, p: OtfsParams) -> tuple[np.ndarray, float]:
    """Pack a real vector onto a DD grid, normalized to unit symbol energy.

    Consecutive pairs of ``z`` become Re/Im of grid entries row-major; the
    remainder of the grid is zero. Returns ``(grid, scale)`` where ``scale``
    restores the original amplitudes (1.0 for an all-zero latent).
    """
    z = np.asarray(z, dtype=np.float64).ravel()
    nm = p.frame_len
    if z.size > 2 * nm:
        raise CapacityError(
            f"latent of length {z.size} exceeds grid capacity {2 * nm}"
        )
    flat = np.zeros(2 * nm, dtype=np.float64)
    flat[: z.size] = z
    raw = (flat[0::2] + 1j * flat[1::2]).reshape(p.n_doppler, p.m_delay)
    energy = np.mean(np.abs(raw) ** 2)
    scale = float(np.sqrt(energy)) if energy > 0.0 else 1.0
    return raw / scale, scale


def unpack_latent(grid, length: int, scale: float = 1.0) -> np.ndarray:
    """Inverse of :func:`pack_latent` given the stored scale factor."""
    g = as_grid(grid, name="latent grid") * scale
    flat = g.reshape(-1)
    if length > 2 * flat.size:
        raise CapacityError(
            f"requested length {length} exceeds grid capacity {2 * flat.size}"
        )
    out = np.empty(2 * flat.size, dtype=np.float64)
    out[0::2] = flat.real
    out[1::2] = flat.imag
    return out[:length]


def write_bits(path, bits) -> None:
    """Store a bit buffer as raw bytes, MSB-first within each byte."""
    b = np.asarray(bits, dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(np.packbits(b).tobytes())


def read_bits(path, n_bits: int) -> np.ndarray:
    """Read ``n_bits`` back from a file written by :func:`write_bits`."""
    raw = np.frombuffer(open(path, "rb").read(), dtype=np.uint8)
    bits = np.unpackbits(raw)
    if bits.size < n_bits:
        raise LengthError(f"file holds {bits.size} bits, requested {n_bits}")
    return bits[:n_bits]
