"""Slow direct-sum reference implementations.

These evaluate the defining double sums literally, in O(N^2 M^2), with no
FFTs and no shared code with the production paths. They exist purely to
cross-check the fast implementations (unit tests and ``sim selftest``);
keep them independent when editing.
"""

from __future__ import annotations

import numpy as np

from .core import OtfsParams

__all__ = [
    "isfft_direct",
    "sfft_direct",
    "heisenberg_direct",
    "wigner_direct",
    "modulate_direct",
    "demodulate_direct",
    "apply_channel_direct",
]


def isfft_direct(x: np.ndarray) -> np.ndarray:
    n, m = x.shape
    out = np.zeros((n, m), dtype=complex)
    for nn in range(n):
        for mm in range(m):
            acc = 0.0 + 0.0j
            for k in range(n):
                for l in range(m):
                    acc += x[k, l] * np.exp(2j * np.pi * (nn * k / n - mm * l / m))
            out[nn, mm] = acc / np.sqrt(n * m)
    return out


def sfft_direct(y: np.ndarray) -> np.ndarray:
    n, m = y.shape
    out = np.zeros((n, m), dtype=complex)
    for k in range(n):
        for l in range(m):
            acc = 0.0 + 0.0j
            for nn in range(n):
                for mm in range(m):
                    acc += y[nn, mm] * np.exp(-2j * np.pi * (nn * k / n - mm * l / m))
            out[k, l] = acc / np.sqrt(n * m)
    return out


def heisenberg_direct(x_tf: np.ndarray, p: OtfsParams) -> np.ndarray:
    n, m = p.n_doppler, p.m_delay
    s = np.zeros(n * m, dtype=complex)
    for nn in range(n):
        for q in range(m):
            acc = 0.0 + 0.0j
            for mm in range(m):
                acc += x_tf[nn, mm] * np.exp(2j * np.pi * mm * q / m)
            s[nn * m + q] = acc / np.sqrt(m)
    return s


def wigner_direct(s: np.ndarray, p: OtfsParams) -> np.ndarray:
    n, m = p.n_doppler, p.m_delay
    out = np.zeros((n, m), dtype=complex)
    for nn in range(n):
        for mm in range(m):
            acc = 0.0 + 0.0j
            for q in range(m):
                acc += s[nn * m + q] * np.exp(-2j * np.pi * mm * q / m)
            out[nn, mm] = acc / np.sqrt(m)
    return out


def modulate_direct(x_dd: np.ndarray, p: OtfsParams) -> np.ndarray:
    return heisenberg_direct(isfft_direct(x_dd), p)


def demodulate_direct(s: np.ndarray, p: OtfsParams) -> np.ndarray:
    return sfft_direct(wigner_direct(s, p))


def apply_channel_direct(s: np.ndarray, paths, p: OtfsParams) -> np.ndarray:
    """Sample-by-sample form of the delay-Doppler channel.

    y[q] = sum_i g_i s[(q - l_i) mod NM] exp(j2pi k_i (q - l_i) / NM)

    ``paths`` is an iterable of (gain, delay_tap, doppler_tap) triples.
    """
    nm = p.frame_len
    y = np.zeros(nm, dtype=complex)
    for q in range(nm):
        acc = 0.0 + 0.0j
        for gain, l_i, k_i in paths:
            acc += gain * s[(q - l_i) % nm] * np.exp(
                2j * np.pi * k_i * (q - l_i) / nm
            )
        y[q] = acc
    return y
