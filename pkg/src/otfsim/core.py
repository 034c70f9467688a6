"""Core domain types: grid parameters and array validation helpers.

Data convention used throughout the package:

* delay-Doppler (DD) and time-frequency (TF) grids are complex ndarrays of
  shape ``(n_doppler, m_delay)`` -- rows index Doppler bins k (or time
  symbols n), columns index delay bins l (or subcarriers m);
* baseband time signals are complex 1-D ndarrays of length
  ``n_doppler * m_delay``, critically sampled at ``m_delay * delta_f``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DimensionError

__all__ = [
    "OtfsParams",
    "validate_params",
    "as_grid",
    "as_time_signal",
]


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class OtfsParams:
    """Grid geometry and carrier parameters of one OTFS frame.

    ``symbol_duration_s`` defaults to ``1 / subcarrier_spacing_hz``; if given
    explicitly it must satisfy that relation (rectangular-pulse frames are
    critically sampled, so the two are not independent).
    """

    n_doppler: int
    m_delay: int
    subcarrier_spacing_hz: float
    carrier_freq_hz: float = 4.0e9
    symbol_duration_s: float | None = None

    def __post_init__(self):
        if self.symbol_duration_s is None:
            scs = float(self.subcarrier_spacing_hz)
            # invalid spacings surface later through validate_params
            object.__setattr__(
                self, "symbol_duration_s", 1.0 / scs if scs > 0 else float("nan")
            )

    @property
    def frame_len(self) -> int:
        """Number of time samples (= grid cells) per frame."""
        return self.n_doppler * self.m_delay

    @property
    def frame_duration_s(self) -> float:
        return self.n_doppler * self.symbol_duration_s

    @property
    def doppler_resolution_hz(self) -> float:
        """Doppler bin width 1 / (N T)."""
        return 1.0 / (self.n_doppler * self.symbol_duration_s)

    @property
    def sample_rate_hz(self) -> float:
        return self.m_delay * self.subcarrier_spacing_hz


def validate_params(p: OtfsParams) -> OtfsParams:
    """Check all :class:`OtfsParams` invariants; return ``p`` unchanged.

    Raises
    ------
    DimensionError
        if N or M is below 2 or not a power of two (radix-2 FFTs are used
        everywhere).
    ValueError
        if a frequency or duration is not strictly positive.
    ConsistencyError
        if ``symbol_duration_s * subcarrier_spacing_hz`` deviates from 1 by
        more than 1e-12 relative.
    """
    for name, n in (("n_doppler", p.n_doppler), ("m_delay", p.m_delay)):
        if not isinstance(n, (int, np.integer)) or n < 2 or not _is_pow2(int(n)):
            raise DimensionError(f"{name} must be a power of two >= 2, got {n!r}")
    for name, v in (
        ("subcarrier_spacing_hz", p.subcarrier_spacing_hz),
        ("carrier_freq_hz", p.carrier_freq_hz),
        ("symbol_duration_s", p.symbol_duration_s),
    ):
        if not (v > 0.0) or not np.isfinite(v):
            raise ValueError(f"{name} must be a positive finite number, got {v!r}")
    prod = p.symbol_duration_s * p.subcarrier_spacing_hz
    if abs(prod - 1.0) > 1e-12:
        raise ConsistencyError(
            f"symbol_duration_s * subcarrier_spacing_hz = {prod!r}, expected 1"
        )
    return p


def as_grid(x, p: OtfsParams | None = None, name: str = "grid") -> np.ndarray:
    """Coerce ``x`` to a complex128 (N, M) grid and validate it.

    With ``p`` given, the shape must match ``(p.n_doppler, p.m_delay)``;
    otherwise any 2-D shape passes. Entries must be finite.
    """
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    if p is not None and a.shape != (p.n_doppler, p.m_delay):
        raise DimensionError(
            f"{name} shape {a.shape} does not match grid "
            f"({p.n_doppler}, {p.m_delay})"
        )
    if not np.all(np.isfinite(a.view(np.float64))):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def as_time_signal(s, p: OtfsParams, name: str = "signal") -> np.ndarray:
    """Coerce ``s`` to a complex128 vector of length N*M and validate it."""
    a = np.asarray(s, dtype=np.complex128)
    if a.ndim != 1 or a.size != p.frame_len:
        raise DimensionError(
            f"{name} must be 1-D of length {p.frame_len}, got shape {a.shape}"
        )
    if not np.all(np.isfinite(a.view(np.float64))):
        raise ValueError(f"{name} contains non-finite entries")
    return a
