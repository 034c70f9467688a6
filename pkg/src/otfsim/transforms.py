"""Unitary maps between delay-Doppler, time-frequency, and time domains.

All transforms use unitary (1/sqrt) normalization, so every map preserves
the squared norm exactly and SNR definitions carry over unchanged between
domains. Pulse shaping is rectangular on both ends, which makes the
time-frequency <-> time maps per-symbol DFTs and exact inverses of each
other (ideal bi-orthogonality); frames carry no cyclic prefix and the
channel is applied cyclically over the whole frame.
"""

from __future__ import annotations

import numpy as np

from .core import OtfsParams, as_grid, as_time_signal

__all__ = [
    "isfft",
    "sfft",
    "heisenberg",
    "wigner",
    "otfs_modulate",
    "otfs_demodulate",
]


def isfft(x) -> np.ndarray:
    """Delay-Doppler -> time-frequency.

    X[n, m] = (1/sqrt(NM)) sum_{k,l} x[k, l] exp(j2pi (nk/N - ml/M))
    """
    x = as_grid(x, name="dd grid")
    n, m = x.shape
    return np.fft.fft(np.fft.ifft(x, axis=0), axis=1) * np.sqrt(n / m)


def sfft(y) -> np.ndarray:
    """Time-frequency -> delay-Doppler; exact inverse of :func:`isfft`."""
    y = as_grid(y, name="tf grid")
    n, m = y.shape
    return np.fft.ifft(np.fft.fft(y, axis=0), axis=1) * np.sqrt(m / n)


def heisenberg(x_tf, p: OtfsParams) -> np.ndarray:
    """Time-frequency -> time: per-symbol unitary inverse DFT, serialized.

    s[n*M + q] = (1/sqrt(M)) sum_m X[n, m] exp(j2pi m q / M)
    """
    x_tf = as_grid(x_tf, p, name="tf grid")
    m = p.m_delay
    return (np.fft.ifft(x_tf, axis=1) * np.sqrt(m)).reshape(-1)


def wigner(s, p: OtfsParams) -> np.ndarray:
    """Time -> time-frequency: rectangular matched filter per symbol.

    Y[n, m] = (1/sqrt(M)) sum_q s[n*M + q] exp(-j2pi m q / M)
    """
    s = as_time_signal(s, p)
    n, m = p.n_doppler, p.m_delay
    return np.fft.fft(s.reshape(n, m), axis=1) / np.sqrt(m)


def otfs_modulate(x_dd, p: OtfsParams) -> np.ndarray:
    """Full modulator: ISFFT then Heisenberg transform (unitary end to end)."""
    x_dd = as_grid(x_dd, p, name="dd grid")
    return heisenberg(isfft(x_dd), p)


def otfs_demodulate(s, p: OtfsParams) -> np.ndarray:
    """Full demodulator: TF matched filter then SFFT; inverse of modulate."""
    return sfft(wigner(s, p))
