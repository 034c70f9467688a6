"""Doubly-dispersive channel simulation in the delay-Doppler domain.

A channel realization is a sparse set of propagation paths, each with a
complex gain, an integer delay tap l in [0, M) and an integer Doppler tap
k in (-N/2, N/2]. The channel acts on the transmitted frame as a cyclic
(mod NM) convolution with a Doppler phase ramp per path:

    y[q] = sum_i g_i * s[(q - l_i) mod NM] * exp(j2pi k_i (q - l_i) / NM)

Integer taps keep the DD-domain response exactly sparse; fractional
delay/Doppler is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import OtfsParams, as_time_signal
from .errors import DimensionError
from .transforms import otfs_demodulate, otfs_modulate

__all__ = [
    "C_LIGHT",
    "PathSpec",
    "ChannelSpec",
    "max_doppler_hz",
    "gen_channel",
    "apply_channel",
    "add_awgn",
    "effective_dd_response",
    "channel_to_tensor",
    "channel_from_tensor",
]

C_LIGHT = 299_792_458.0  # m/s


@dataclass(frozen=True)
class PathSpec:
    """One propagation path: complex gain, delay tap, Doppler tap."""

    gain: complex
    delay_tap: int
    doppler_tap: int


@dataclass(frozen=True)
class ChannelSpec:
    """A sparse multipath realization (at least one path)."""

    paths: tuple[PathSpec, ...]

    def __post_init__(self):
        if len(self.paths) == 0:
            raise ValueError("a channel needs at least one path")

    @property
    def total_power(self) -> float:
        """Sum of |gain|^2 over paths (1.0 for generated channels)."""
        return float(sum(abs(p.gain) ** 2 for p in self.paths))

    def validate(self, p: OtfsParams) -> "ChannelSpec":
        half_n = p.n_doppler // 2
        for path in self.paths:
            if not 0 <= path.delay_tap < p.m_delay:
                raise DimensionError(
                    f"delay tap {path.delay_tap} outside [0, {p.m_delay})"
                )
            if not -half_n < path.doppler_tap <= half_n:
                raise DimensionError(
                    f"doppler tap {path.doppler_tap} outside ({-half_n}, {half_n}]"
                )
        return self


def max_doppler_hz(speed_kmh: float, carrier_hz: float) -> float:
    """Maximum Doppler shift v * f_c / c for a UE speed in km/h."""
    if speed_kmh < 0:
        raise ValueError(f"speed must be >= 0, got {speed_kmh}")
    return (speed_kmh / 3.6) * carrier_hz / C_LIGHT


def gen_channel(
    p: OtfsParams,
    speed_kmh: float,
    n_paths: int = 5,
    max_delay_tap: int | None = None,
    seed: int | None = None,
) -> ChannelSpec:
    """Draw a random multipath realization, deterministic per seed.

    Path 0 sits at delay 0; the remaining delays are drawn uniformly
    without replacement from [1, max_delay_tap]. Gains are i.i.d.
    circularly-symmetric Gaussian, normalized so total power is 1. Each
    Doppler shift is nu_max * cos(theta) with theta uniform on [0, 2pi)
    (Jakes-style angle of arrival), rounded to the nearest integer tap.
    """
    if max_delay_tap is None:
        max_delay_tap = max(p.m_delay // 8, 1)
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    if not 0 <= max_delay_tap < p.m_delay:
        raise ValueError(f"max_delay_tap {max_delay_tap} outside [0, {p.m_delay})")
    if n_paths > max_delay_tap + 1:
        raise ValueError(
            f"{n_paths} paths need distinct delays in [0, {max_delay_tap}]"
        )
    rng = np.random.default_rng(seed)
    delays = np.zeros(n_paths, dtype=int)
    if n_paths > 1:
        delays[1:] = rng.choice(
            np.arange(1, max_delay_tap + 1), size=n_paths - 1, replace=False
        )
    gains = rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths)
    gains /= np.linalg.norm(gains)
    nu_max = max_doppler_hz(speed_kmh, p.carrier_freq_hz)
    theta = rng.uniform(0.0, 2.0 * np.pi, n_paths)
    k_taps = np.rint(
        nu_max * np.cos(theta) * p.n_doppler * p.symbol_duration_s
    ).astype(int)
    paths = tuple(
        PathSpec(complex(g), int(l), int(k))
        for g, l, k in zip(gains, delays, k_taps)
    )
    return ChannelSpec(paths).validate(p)


def apply_channel(s, ch: ChannelSpec, p: OtfsParams) -> np.ndarray:
    """Noiseless cyclic delay-Doppler channel (see module docstring)."""
    s = as_time_signal(s, p)
    nm = p.frame_len
    q = np.arange(nm)
    y = np.zeros(nm, dtype=np.complex128)
    for path in ch.paths:
        shifted = np.roll(s, path.delay_tap)
        ramp = np.exp(2j * np.pi * path.doppler_tap * (q - path.delay_tap) / nm)
        y += path.gain * shifted * ramp
    return y


def add_awgn(s, snr_db: float, seed: int | None = None):
    """Add complex AWGN at the given SNR; returns (noisy signal, noise_var).

    The noise variance is measured against the actual frame power
    ``||s||^2 / len(s)``, so the SNR definition is exact per frame.
    ``snr_db = inf`` is the no-noise flag (returns the input, variance 0).
    """
    s = np.asarray(s, dtype=np.complex128)
    if np.isinf(snr_db) and snr_db > 0:
        return s.copy(), 0.0
    p_sig = float(np.mean(np.abs(s) ** 2))
    if p_sig == 0.0:
        raise ValueError("cannot set an SNR on a zero-power signal")
    noise_var = p_sig / 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng(seed)
    noise = np.sqrt(noise_var / 2.0) * (
        rng.standard_normal(s.size) + 1j * rng.standard_normal(s.size)
    )
    return s + noise, noise_var


def effective_dd_response(ch: ChannelSpec, p: OtfsParams) -> np.ndarray:
    """DD-domain impulse response: a unit pulse at (0, 0) sent through the
    noiseless channel and demodulated. Computed exactly, not approximated."""
    delta = np.zeros((p.n_doppler, p.m_delay), dtype=np.complex128)
    delta[0, 0] = 1.0
    return otfs_demodulate(apply_channel(otfs_modulate(delta, p), ch, p), p)


def channel_to_tensor(ch: ChannelSpec) -> np.ndarray:
    """Serialize as a (paths, 4) real matrix: Re g, Im g, delay, doppler."""
    out = np.zeros((len(ch.paths), 4), dtype=np.float64)
    for i, path in enumerate(ch.paths):
        out[i] = (path.gain.real, path.gain.imag, path.delay_tap, path.doppler_tap)
    return out


def channel_from_tensor(mat: np.ndarray) -> ChannelSpec:
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[1] != 4:
        raise DimensionError(f"channel tensor must be (paths, 4), got {mat.shape}")
    return ChannelSpec(
        tuple(
            PathSpec(complex(re, im), int(round(l)), int(round(k)))
            for re, im, l, k in mat
        )
    )
