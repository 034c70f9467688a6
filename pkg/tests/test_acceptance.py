"""Acceptance suite: every release criterion at its stated tolerance.

Each test prints one [PASS]/[FAIL] line (run with ``pytest -s`` to see
them even on success). The speed-ordering clause of the trend criterion
is known not to hold in this idealized channel model; see the test's
docstring for the mechanism.
"""

import dataclasses
import math
import time

import numpy as np
import pytest

from otfsim import reference as ref
from otfsim.channel import ChannelSpec, PathSpec, apply_channel, gen_channel
from otfsim.config import ChannelConfig, DetectorConfig, RunConfig
from otfsim.core import OtfsParams
from otfsim.detection import lmmse_detect, mrc_detect
from otfsim.diffusion import (
    Predictor,
    forward_diffuse,
    linear_schedule,
    reverse_denoise,
    select_steps,
)
from otfsim.harness import run_point, rows_to_csv, sweep
from otfsim.mapping import qpsk_demap, qpsk_map
from otfsim.transforms import (
    heisenberg,
    isfft,
    otfs_demodulate,
    otfs_modulate,
    sfft,
    wigner,
)

SNRS = (0.0, 5.0, 10.0, 15.0)
SPEEDS = (350.0, 500.0, 650.0)


def _report(name, ok, detail=""):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
    return ok


@pytest.fixture(scope="module")
def trend_data():
    """Latent MSE with and without the oracle denoiser over the full
    SNR x speed grid (N=16, M=32, 200 frames per point, MRC detector)."""
    cfg = RunConfig(
        otfs=OtfsParams(16, 32, 15e3),
        channel=ChannelConfig(n_paths=5, max_delay_tap=4),
        detector=DetectorConfig(kind="mrc"),
        snr_grid_db=SNRS,
        speeds_kmh=SPEEDS,
        frames_per_point=200,
        seed=42,
        payload="latent",
        latent_dim=256,
        denoise=True,
        predictor="oracle",
    ).validate()
    denoised, plain = {}, {}
    cfg_plain = dataclasses.replace(cfg, denoise=False)
    for speed in SPEEDS:
        for snr in SNRS:
            denoised[(speed, snr)] = run_point(cfg, snr, speed)
            plain[(speed, snr)] = run_point(cfg_plain, snr, speed)
    return denoised, plain


def test_criterion_transforms():
    """Round-trip identities at 1e-12 over 100 random frames and
    direct-sum oracle agreement at 1e-10, all under 10 s."""
    t0 = time.perf_counter()
    p = OtfsParams(16, 32, 15e3)
    rng = np.random.default_rng(7)
    worst_rt = 0.0
    for _ in range(100):
        x = rng.standard_normal((16, 32)) + 1j * rng.standard_normal((16, 32))
        worst_rt = max(worst_rt, np.max(np.abs(sfft(isfft(x)) - x)))
        worst_rt = max(
            worst_rt,
            np.max(np.abs(wigner(heisenberg(x, p), p) - x)),
            np.max(np.abs(otfs_demodulate(otfs_modulate(x, p), p) - x)),
        )
    worst_oracle = 0.0
    for n, m in ((4, 4), (8, 8), (4, 8)):
        ps = OtfsParams(n, m, 15e3)
        x = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
        s = rng.standard_normal(n * m) + 1j * rng.standard_normal(n * m)
        worst_oracle = max(
            worst_oracle,
            np.max(np.abs(isfft(x) - ref.isfft_direct(x))),
            np.max(np.abs(sfft(x) - ref.sfft_direct(x))),
            np.max(np.abs(heisenberg(x, ps) - ref.heisenberg_direct(x, ps))),
            np.max(np.abs(wigner(s, ps) - ref.wigner_direct(s, ps))),
            np.max(np.abs(otfs_modulate(x, ps) - ref.modulate_direct(x, ps))),
            np.max(np.abs(otfs_demodulate(s, ps) - ref.demodulate_direct(s, ps))),
        )
    elapsed = time.perf_counter() - t0
    ok = worst_rt <= 1e-12 and worst_oracle <= 1e-10 and elapsed < 10.0
    assert _report(
        "transform correctness",
        ok,
        f"round-trip {worst_rt:.2e} (tol 1e-12), oracle {worst_oracle:.2e} "
        f"(tol 1e-10), {elapsed:.1f}s (< 10s)",
    )


def test_criterion_channel_physics():
    """Single-path delay/Doppler channels reproduce the brute-force
    shifted-and-twisted DD grids at 1e-10; identity channel is lossless."""
    p = OtfsParams(8, 8, 15e3)
    rng = np.random.default_rng(11)
    x = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    worst = 0.0
    for gain, l_i, k_i in (
        (1.0, 0, 2),
        (1.0, 3, 0),
        (0.8 - 0.6j, 5, -3),
        (1.0, 7, 4),
    ):
        ch = ChannelSpec((PathSpec(gain, l_i, k_i),))
        fast = otfs_demodulate(apply_channel(otfs_modulate(x, p), ch, p), p)
        s_ref = ref.modulate_direct(x, p)
        oracle = ref.demodulate_direct(
            ref.apply_channel_direct(s_ref, [(gain, l_i, k_i)], p), p
        )
        worst = max(worst, np.max(np.abs(fast - oracle)))
        shifted = np.roll(x, (k_i, l_i), axis=(0, 1))
        worst = max(worst, np.max(np.abs(np.abs(fast / gain) - np.abs(shifted))))
    ident = ChannelSpec((PathSpec(1.0, 0, 0),))
    y = otfs_demodulate(apply_channel(otfs_modulate(x, p), ident, p), p)
    lossless = np.max(np.abs(y - x))
    ok = worst <= 1e-10 and lossless <= 1e-12
    assert _report(
        "channel physics",
        ok,
        f"oracle gap {worst:.2e} (tol 1e-10), identity {lossless:.2e} (tol 1e-12)",
    )


def test_criterion_awgn_calibration():
    """Uncoded QPSK over AWGN hits Q(sqrt(2 Eb/N0)) within 3 binomial
    sigma at 4, 7, 10 dB over >= 1e6 bits, in under 2 minutes."""
    t0 = time.perf_counter()
    p = OtfsParams(16, 32, 15e3)
    frames = 1000  # 1000 frames * 1024 bits = 1.024e6 bits per point
    details = []
    ok = True
    for ebn0_db in (4.0, 7.0, 10.0):
        cfg = RunConfig(
            otfs=p,
            channel=ChannelConfig(n_paths=0),
            snr_grid_db=(ebn0_db,),
            speeds_kmh=(0.0,),
            frames_per_point=frames,
            seed=int(ebn0_db),
            payload="bits",
            denoise=False,
        ).validate()
        row = run_point(cfg, ebn0_db + 10 * math.log10(2), 0.0)
        n_bits = frames * 2 * p.frame_len
        p_th = 0.5 * math.erfc(math.sqrt(2 * 10 ** (ebn0_db / 10)) / math.sqrt(2))
        sigma = math.sqrt(p_th * (1 - p_th) / n_bits)
        dev = abs(row.ber - p_th) / sigma
        details.append(f"{ebn0_db:.0f}dB dev={dev:.2f}sigma")
        ok &= dev <= 3.0
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120.0
    assert _report(
        "awgn calibration", ok, ", ".join(details) + f", {elapsed:.1f}s (< 120s)"
    )


def test_criterion_detection():
    """LMMSE and MRC reach BER 0 on noiseless multipath channels (100
    seeds, 2-5 paths, N=M=8); MRC matches LMMSE to 1e-6 on single-path."""
    p = OtfsParams(8, 8, 15e3)
    rng = np.random.default_rng(99)
    lmmse_errs = mrc_errs = 0
    for seed in range(100):
        ch = gen_channel(p, 500.0, n_paths=2 + seed % 4, max_delay_tap=5, seed=seed)
        bits = rng.integers(0, 2, 128).astype(np.uint8)
        x = qpsk_map(bits).reshape(8, 8)
        y = otfs_demodulate(apply_channel(otfs_modulate(x, p), ch, p), p)
        lmmse_errs += int(
            (qpsk_demap(lmmse_detect(y, ch, 0.0, p).symbols.reshape(-1)) != bits).sum()
        )
        mrc_errs += int(
            (
                qpsk_demap(
                    mrc_detect(y, ch, 0.0, p, max_iter=20).symbols.reshape(-1)
                )
                != bits
            ).sum()
        )
    single_gap = 0.0
    for seed in range(10):
        g = complex(*np.random.default_rng(seed).standard_normal(2))
        ch = ChannelSpec((PathSpec(g / abs(g), 3, 2),))
        x = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        y = otfs_demodulate(apply_channel(otfs_modulate(x, p), ch, p), p)
        single_gap = max(
            single_gap,
            np.max(
                np.abs(
                    lmmse_detect(y, ch, 0.0, p).symbols
                    - mrc_detect(y, ch, 0.0, p).symbols
                )
            ),
        )
    ok = lmmse_errs == 0 and mrc_errs == 0 and single_gap <= 1e-6
    assert _report(
        "detection",
        ok,
        f"lmmse errs {lmmse_errs}, mrc errs {mrc_errs} (100 noiseless seeds), "
        f"single-path gap {single_gap:.2e} (tol 1e-6)",
    )


def test_criterion_sampler_exactness():
    """With the true injected noise the reverse sampler recovers z0 to
    1e-6 relative for m in {1, 10, 50, 200}; schedule product to 1e-12."""
    sched = linear_schedule(200, 0.9999, 0.98)
    prod = 1.0
    worst_sched = 0.0
    for t in range(200):
        prod *= float(sched.alphas[t])
        worst_sched = max(worst_sched, abs(sched.alpha_bars[t] - prod) / prod)
    worst_rec = 0.0
    for m in (1, 10, 50, 200):
        for trial in range(100):
            rng = np.random.default_rng(1000 * m + trial)
            z0 = rng.standard_normal(64)
            w = rng.uniform(0.5, 1.5, 64)
            state = forward_diffuse(z0, m, sched, w, seed=rng)
            y_r = state.z / np.sqrt(sched.alpha_bar(m))
            r = reverse_denoise(
                y_r, None, sched.noise_to_signal(m), sched, w,
                Predictor("oracle", eps=state.eps),
            )
            worst_rec = max(
                worst_rec, np.linalg.norm(r - z0) / np.linalg.norm(z0)
            )
    ok = worst_rec <= 1e-6 and worst_sched <= 1e-12
    assert _report(
        "diffusion sampler exactness",
        ok,
        f"recovery {worst_rec:.2e} (tol 1e-6), schedule {worst_sched:.2e} "
        f"(tol 1e-12), m in {{1,10,50,200}} x 100 latents",
    )


def test_criterion_step_selection():
    """m(s2) is monotone over a 100-point grid, exact at constructed
    match points, and zero at zero variance."""
    sched = linear_schedule(200, 0.9999, 0.98)
    grid = np.logspace(-6, 1, 100)
    steps = [select_steps(float(v), sched) for v in grid]
    monotone = all(b >= a for a, b in zip(steps, steps[1:]))
    exact = all(
        select_steps(sched.noise_to_signal(t), sched) == t
        for t in (1, 7, 25, 50, 100, 161, 200)
    )
    zero = select_steps(0.0, sched) == 0
    ok = monotone and exact and zero
    assert _report(
        "step selection",
        ok,
        f"monotone={monotone}, match-points exact={exact}, m(0)=0 is {zero}",
    )


def test_criterion_denoising_gain(trend_data):
    """The oracle-predictor pipeline strictly reduces latent MSE at every
    (SNR, speed) point of the grid."""
    denoised, plain = trend_data
    gains = {
        k: plain[k].latent_mse - denoised[k].latent_mse for k in denoised
    }
    ok = all(v > 0 for v in gains.values())
    worst_key = min(gains, key=gains.get)
    assert _report(
        "denoising gain",
        ok,
        f"strict at all {len(gains)} points; smallest gain "
        f"{gains[worst_key]:.2e} at speed {worst_key[0]:.0f}/snr {worst_key[1]:.0f}",
    )


def test_criterion_determinism(tmp_path):
    """Re-running a sweep with the same config and seed yields a
    byte-identical CSV."""
    cfg = RunConfig(
        otfs=OtfsParams(16, 32, 15e3),
        channel=ChannelConfig(n_paths=5, max_delay_tap=4),
        snr_grid_db=(5.0, 10.0),
        speeds_kmh=(350.0, 650.0),
        frames_per_point=25,
        seed=33,
        payload="latent",
        latent_dim=128,
        denoise=True,
        predictor="oracle",
    ).validate()
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    sweep(cfg, out_path=a)
    sweep(cfg, out_path=b)
    ok = a.read_bytes() == b.read_bytes()
    assert _report("determinism", ok, f"{len(a.read_bytes())} identical bytes")


def test_criterion_trend_monotone_in_snr(trend_data):
    """Mean latent PSNR is non-decreasing in SNR for each speed."""
    denoised, _ = trend_data
    ok = True
    for speed in SPEEDS:
        psnrs = [denoised[(speed, snr)].psnr_db for snr in sorted(SNRS)]
        ok &= all(b >= a for a, b in zip(psnrs, psnrs[1:]))
    assert _report(
        "trend: psnr monotone in snr",
        ok,
        "; ".join(
            f"{speed:.0f}km/h: "
            + "->".join(f"{denoised[(speed, s)].psnr_db:.2f}" for s in sorted(SNRS))
            for speed in SPEEDS
        ),
    )


def test_criterion_trend_speed_ordering(trend_data):
    """PSNR at 350 km/h >= PSNR at 650 km/h at every SNR.

    Known not to hold in this model: with integer delay/Doppler taps,
    unit-power channels, and perfect receiver CSI, higher UE speed adds
    Doppler-domain diversity and improves the conditioning of the
    effective DD channel, so detection (and hence the denoised latent)
    is slightly better at 650 km/h than at 350 km/h at every SNR, for
    both detectors. The opposite ordering reported for the full learned
    system rests on mobility effects (fractional Doppler, channel
    estimation error) that are explicitly out of scope here.
    """
    denoised, _ = trend_data
    gaps = {
        snr: denoised[(350.0, snr)].psnr_db - denoised[(650.0, snr)].psnr_db
        for snr in SNRS
    }
    ok = all(v >= 0 for v in gaps.values())
    assert _report(
        "trend: psnr(350) >= psnr(650)",
        ok,
        ", ".join(f"snr {s:.0f}: {v:+.3f} dB" for s, v in gaps.items()),
    )
