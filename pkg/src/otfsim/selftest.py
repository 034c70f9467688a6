"""Built-in oracle and property checks behind ``sim selftest``.

Each check cross-validates a fast implementation against an independent
slow reference or a closed-form identity, and prints one PASS/FAIL line.
"""

from __future__ import annotations

import numpy as np

from . import reference as ref
from .channel import ChannelSpec, PathSpec, apply_channel, gen_channel
from .core import OtfsParams
from .detection import build_dd_matrix, lmmse_detect, mrc_detect
from .diffusion import (
    Predictor,
    forward_diffuse,
    linear_schedule,
    reverse_denoise,
    select_steps,
)
from .tensorfile import read_tensor, write_tensor
from .transforms import isfft, otfs_demodulate, otfs_modulate, sfft

__all__ = ["run_selftest"]


def _rand_grid(rng, n, m):
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def _check_roundtrips(rng) -> float:
    p = OtfsParams(16, 32, 15e3)
    worst = 0.0
    for _ in range(20):
        x = _rand_grid(rng, 16, 32)
        worst = max(worst, np.max(np.abs(sfft(isfft(x)) - x)))
        worst = max(
            worst, np.max(np.abs(otfs_demodulate(otfs_modulate(x, p), p) - x))
        )
    return worst


def _check_transform_oracle(rng) -> float:
    p = OtfsParams(8, 8, 15e3)
    x = _rand_grid(rng, 8, 8)
    worst = np.max(np.abs(isfft(x) - ref.isfft_direct(x)))
    s = otfs_modulate(x, p)
    worst = max(worst, np.max(np.abs(s - ref.modulate_direct(x, p))))
    worst = max(
        worst, np.max(np.abs(otfs_demodulate(s, p) - ref.demodulate_direct(s, p)))
    )
    return float(worst)


def _check_channel_oracle(rng) -> float:
    p = OtfsParams(8, 8, 15e3)
    ch = gen_channel(p, 650.0, n_paths=3, max_delay_tap=4, seed=7)
    triples = [(pa.gain, pa.delay_tap, pa.doppler_tap) for pa in ch.paths]
    s = rng.standard_normal(64) + 1j * rng.standard_normal(64)
    y_fast = apply_channel(s, ch, p)
    y_ref = ref.apply_channel_direct(s, triples, p)
    return float(np.max(np.abs(y_fast - y_ref)))


def _check_dd_matrix(rng) -> float:
    p = OtfsParams(8, 8, 15e3)
    ch = gen_channel(p, 500.0, n_paths=4, max_delay_tap=5, seed=11)
    h = build_dd_matrix(ch, p)
    worst = 0.0
    for j in range(p.frame_len):
        e = np.zeros(p.frame_len)
        e[j] = 1.0
        col = otfs_demodulate(
            apply_channel(otfs_modulate(e.reshape(8, 8), p), ch, p), p
        ).reshape(-1)
        worst = max(worst, np.max(np.abs(h[:, j] - col)))
    return float(worst)


def _check_detectors(rng) -> float:
    p = OtfsParams(8, 8, 15e3)
    worst = 0.0
    for seed in range(5):
        ch = gen_channel(p, 500.0, n_paths=3, max_delay_tap=4, seed=seed)
        x = _rand_grid(rng, 8, 8)
        y = otfs_demodulate(apply_channel(otfs_modulate(x, p), ch, p), p)
        worst = max(
            worst, np.max(np.abs(lmmse_detect(y, ch, 0.0, p).symbols - x))
        )
        single = ChannelSpec((PathSpec(0.6 - 0.8j, 3, 2),))
        y1 = otfs_demodulate(apply_channel(otfs_modulate(x, p), single, p), p)
        a = lmmse_detect(y1, single, 0.0, p).symbols
        b = mrc_detect(y1, single, 0.0, p).symbols
        worst = max(worst, np.max(np.abs(a - b)))
    return float(worst)


def _check_sampler(rng) -> float:
    sched = linear_schedule(200)
    worst = 0.0
    for m in (1, 10, 50, 200):
        z0 = rng.standard_normal(64)
        w_n = rng.uniform(0.5, 1.5, 64)
        state = forward_diffuse(z0, m, sched, w_n, seed=rng)
        sigma2 = sched.noise_to_signal(m)
        y_r = state.z / np.sqrt(sched.alpha_bar(m))
        pred = Predictor(kind="oracle", eps=state.eps)
        r = reverse_denoise(y_r, None, sigma2, sched, w_n, pred)
        worst = max(worst, np.linalg.norm(r - z0) / np.linalg.norm(z0))
    return float(worst)


def _check_schedule() -> float:
    sched = linear_schedule(200)
    prod = 1.0
    worst = 0.0
    for t in range(200):
        prod *= float(sched.alphas[t])
        worst = max(worst, abs(sched.alpha_bars[t] - prod) / prod)
    return worst


def _check_select_monotone() -> float:
    sched = linear_schedule(200)
    grid = np.logspace(-6, 1, 100)
    steps = [select_steps(v, sched) for v in grid]
    ok = all(b >= a for a, b in zip(steps, steps[1:])) and select_steps(0, sched) == 0
    return 0.0 if ok else 1.0


def _check_tensorfile(rng, tmpdir) -> float:
    import os

    path = os.path.join(tmpdir, "selftest.tns")
    worst = 0.0
    for arr in (
        rng.standard_normal((3, 4)),
        rng.standard_normal((2, 2, 2)).astype(np.float32),
        (rng.standard_normal(5) + 1j * rng.standard_normal(5)),
    ):
        write_tensor(path, arr)
        back = read_tensor(path)
        worst = max(worst, 0.0 if np.array_equal(back, arr) else 1.0)
    return worst


def run_selftest(out=print) -> bool:
    """Run every check; returns True when all pass."""
    import tempfile

    rng = np.random.default_rng(2024)
    with tempfile.TemporaryDirectory() as tmpdir:
        checks = [
            ("transform round-trips (16x32)", _check_roundtrips(rng), 1e-12),
            ("transforms vs direct sums (8x8)", _check_transform_oracle(rng), 1e-10),
            ("channel vs direct sum (8x8)", _check_channel_oracle(rng), 1e-10),
            ("dd matrix vs column push (8x8)", _check_dd_matrix(rng), 1e-10),
            ("detectors on noiseless channels", _check_detectors(rng), 1e-6),
            ("reverse sampler oracle exactness", _check_sampler(rng), 1e-6),
            ("schedule cumulative product", _check_schedule(), 1e-12),
            ("step selection monotone", _check_select_monotone(), 0.5),
            ("tensor file round-trip", _check_tensorfile(rng, tmpdir), 0.5),
        ]
    all_ok = True
    for name, err, tol in checks:
        ok = err <= tol
        all_ok &= ok
        out(f"[{'PASS' if ok else 'FAIL'}] {name}: err={err:.3e} (tol {tol:g})")
    return all_ok
