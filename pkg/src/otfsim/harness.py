"""End-to-end pipelines, Monte-Carlo sweeps, metrics, dataset generation.

All randomness flows from the master seed through named per-stage
substreams keyed by (seed, stage, frame index), so any stage of any frame
is independently reproducible and re-runs are bit-identical. Frame
substreams are shared across sweep points (common random numbers), which
pairs the comparisons across SNRs and speeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSpec, PathSpec, add_awgn, apply_channel, gen_channel
from .config import RunConfig
from .core import OtfsParams
from .detection import EqualizedFrame, csi_vector, lmmse_detect, mrc_detect
from .diffusion import (
    NoiseSchedule,
    Predictor,
    forward_diffuse,
    linear_schedule,
    load_predictor,
    reverse_denoise,
    select_steps,
)
from .errors import DimensionError
from .mapping import pack_latent, qpsk_demap, qpsk_map, unpack_latent
from .tensorfile import read_tensor, write_tensor
from .transforms import otfs_demodulate, otfs_modulate

__all__ = [
    "MetricRow",
    "CSV_HEADER",
    "stage_rng",
    "run_point",
    "sweep",
    "rows_to_csv",
    "gen_dataset",
    "transmit_latents",
    "psnr",
]

CSV_HEADER = (
    "snr_db,speed_kmh,ber,ser,symbol_mse,latent_mse,"
    "psnr_db,denoise_steps_mean,frames"
)

_STAGE_IDS = {"payload": 1, "channel": 2, "noise": 3, "dataset": 4}


def stage_rng(master_seed: int, stage: str, index: int) -> np.random.Generator:
    """Named substream: independent generator per (seed, stage, frame)."""
    return np.random.default_rng((int(master_seed), _STAGE_IDS[stage], int(index)))


@dataclass
class MetricRow:
    """One sweep point. Fields that do not apply to the payload kind are
    None and serialize as empty CSV cells."""

    snr_db: float
    speed_kmh: float
    ber: float | None
    ser: float | None
    symbol_mse: float
    latent_mse: float | None
    psnr_db: float | None
    denoise_steps_mean: float | None
    frames: int

    def to_csv(self) -> str:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return "inf" if math.isinf(v) else f"{v:.10g}"
            return str(v)

        return ",".join(
            fmt(v)
            for v in (
                self.snr_db,
                self.speed_kmh,
                self.ber,
                self.ser,
                self.symbol_mse,
                self.latent_mse,
                self.psnr_db,
                self.denoise_steps_mean,
                self.frames,
            )
        )


def psnr(ref, test, peak: float = 1.0) -> float:
    """10 log10(peak^2 / mse); +inf when the tensors are identical."""
    ref = np.asarray(ref, dtype=np.float64)
    test = np.asarray(test, dtype=np.float64)
    if ref.shape != test.shape:
        raise DimensionError(f"shape mismatch {ref.shape} vs {test.shape}")
    mse = float(np.mean((ref - test) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def _identity_channel() -> ChannelSpec:
    return ChannelSpec((PathSpec(1.0 + 0.0j, 0, 0),))


def _frame_channel(cfg: RunConfig, speed_kmh: float, frame: int) -> ChannelSpec:
    if cfg.channel.bypass:
        return _identity_channel()
    return gen_channel(
        cfg.otfs,
        speed_kmh,
        n_paths=cfg.channel.n_paths,
        max_delay_tap=cfg.channel.max_delay_tap,
        seed=stage_rng(cfg.seed, "channel", frame),
    )


def _detect(cfg: RunConfig, y_dd, ch, noise_var) -> EqualizedFrame:
    if cfg.channel.bypass:
        # Identity channel: equalization is a no-op.
        nm = cfg.otfs.frame_len
        return EqualizedFrame(
            symbols=y_dd,
            post_eq_noise_std=np.full(nm, np.sqrt(max(noise_var, 0.0))),
            csi=np.full(nm, 1.0 / np.sqrt(nm)),
        )
    if cfg.detector.kind == "lmmse":
        return lmmse_detect(y_dd, ch, noise_var, cfg.otfs)
    return mrc_detect(
        y_dd,
        ch,
        noise_var,
        cfg.otfs,
        max_iter=cfg.detector.max_iter,
        damping=cfg.detector.damping,
    )


def _latent_noise_profile(eq: EqualizedFrame, scale: float, dim: int):
    """Per-component noise variance and shaping vector for the denoiser.

    The detector reports per-symbol residual std; each complex symbol
    carries two latent components, so the per-component variance is
    scale^2 * std^2 / 2. The shaping vector w_n is that std pattern
    normalized to unit mean (identity when the detector reports nothing
    useful, e.g. in the noiseless case).
    """
    std = np.repeat(eq.post_eq_noise_std, 2)[:dim]
    var = float(scale * scale * np.mean(std**2) / 2.0)
    mean_std = float(np.mean(std))
    if mean_std > 0.0 and np.all(std > 0.0):
        w_n = std / mean_std
    else:
        w_n = np.ones(dim)
    return var, w_n


def _make_predictor(cfg: RunConfig):
    """Resolve the configured predictor; oracle is constructed per frame."""
    if cfg.predictor == "oracle":
        return "oracle"
    if cfg.predictor == "zero":
        return Predictor(kind="zero")
    return load_predictor(cfg.predictor)


def _load_latents(cfg: RunConfig) -> np.ndarray | None:
    if not cfg.latent_file:
        return None
    mat = np.asarray(read_tensor(cfg.latent_file), dtype=np.float64)
    if mat.ndim == 1:
        mat = mat[None, :]
    if mat.ndim != 2 or mat.shape[1] != cfg.latent_dim:
        raise DimensionError(
            f"latent file must be (count, {cfg.latent_dim}), got {mat.shape}"
        )
    return mat


def run_point(
    cfg: RunConfig, snr_db: float, speed_kmh: float, latents: np.ndarray | None = None
) -> MetricRow:
    """Simulate one (SNR, speed) point over ``cfg.frames_per_point`` frames."""
    p = cfg.otfs
    nm = p.frame_len
    sched = linear_schedule(
        cfg.diffusion.t_steps, cfg.diffusion.alpha_first, cfg.diffusion.alpha_last
    )
    predictor = _make_predictor(cfg) if cfg.denoise else None
    if latents is None:
        latents = _load_latents(cfg)

    bit_errs = sym_errs = 0
    n_bits = n_syms = 0
    symbol_se = 0.0
    latent_se = 0.0
    latent_n = 0
    steps_sum = 0.0

    for frame in range(cfg.frames_per_point):
        payload_rng = stage_rng(cfg.seed, "payload", frame)
        if cfg.payload == "bits":
            bits = payload_rng.integers(0, 2, size=2 * nm).astype(np.uint8)
            tx_grid = qpsk_map(bits).reshape(p.n_doppler, p.m_delay)
            z0 = scale = None
        else:
            if latents is not None:
                z0 = latents[frame % latents.shape[0]]
            else:
                z0 = payload_rng.standard_normal(cfg.latent_dim)
            tx_grid, scale = pack_latent(z0, p)

        s_tx = otfs_modulate(tx_grid, p)
        ch = _frame_channel(cfg, speed_kmh, frame)
        s_clean = apply_channel(s_tx, ch, p)
        s_rx, noise_var = add_awgn(
            s_clean, snr_db, seed=stage_rng(cfg.seed, "noise", frame)
        )
        y_dd = otfs_demodulate(s_rx, p)
        eq = _detect(cfg, y_dd, ch, noise_var)

        symbol_se += float(np.mean(np.abs(eq.symbols - tx_grid) ** 2))

        if cfg.payload == "bits":
            bits_hat = qpsk_demap(eq.symbols.reshape(-1))
            errs = bits != bits_hat
            bit_errs += int(errs.sum())
            sym_errs += int(np.any(errs.reshape(-1, 2), axis=1).sum())
            n_bits += bits.size
            n_syms += nm
        else:
            y_r = unpack_latent(eq.symbols, cfg.latent_dim, scale)
            r = y_r
            if cfg.denoise:
                var_eq, w_n = _latent_noise_profile(eq, scale, cfg.latent_dim)
                m = select_steps(var_eq, sched)
                steps_sum += m
                if m > 0:
                    h_r = csi_vector(ch, p, cfg.latent_dim)
                    if predictor == "oracle":
                        # the receiver's image of the injected channel
                        # noise: equalize the noiseless frame with the same
                        # settings and difference the latents
                        eq_clean = _detect(
                            cfg, otfs_demodulate(s_clean, p), ch, noise_var
                        )
                        y_r_clean = unpack_latent(
                            eq_clean.symbols, cfg.latent_dim, scale
                        )
                        eps = (y_r - y_r_clean) / (np.sqrt(var_eq) * w_n)
                        pred = Predictor(kind="oracle", eps=eps)
                    else:
                        pred = predictor
                    r = reverse_denoise(y_r, h_r, var_eq, sched, w_n, pred)
            latent_se += float(np.mean((r - z0) ** 2))
            latent_n += 1

    frames = cfg.frames_per_point
    if cfg.payload == "bits":
        return MetricRow(
            snr_db=snr_db,
            speed_kmh=speed_kmh,
            ber=bit_errs / n_bits,
            ser=sym_errs / n_syms,
            symbol_mse=symbol_se / frames,
            latent_mse=None,
            psnr_db=None,
            denoise_steps_mean=None,
            frames=frames,
        )
    latent_mse = latent_se / latent_n
    return MetricRow(
        snr_db=snr_db,
        speed_kmh=speed_kmh,
        ber=None,
        ser=None,
        symbol_mse=symbol_se / frames,
        latent_mse=latent_mse,
        psnr_db=(
            math.inf
            if latent_mse == 0.0
            else 10.0 * math.log10(cfg.psnr_peak**2 / latent_mse)
        ),
        denoise_steps_mean=(steps_sum / frames if cfg.denoise else None),
        frames=frames,
    )


def sweep(cfg: RunConfig, out_path=None) -> list[MetricRow]:
    """Run the full Cartesian sweep, rows sorted by (speed, snr)."""
    latents = _load_latents(cfg)
    rows = [
        run_point(cfg, snr, speed, latents=latents)
        for speed in sorted(cfg.speeds_kmh)
        for snr in sorted(cfg.snr_grid_db)
    ]
    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            fh.write(rows_to_csv(rows))
    return rows


def rows_to_csv(rows: list[MetricRow]) -> str:
    return "\n".join([CSV_HEADER] + [r.to_csv() for r in rows]) + "\n"


def gen_dataset(cfg: RunConfig, count: int, out_path, sideband_path=None):
    """Emit (z_t, h_r, t/T, eps) training tuples as a rank-2 tensor.

    Row layout: latent z_t (dim), conditioning h_r (dim), normalized step
    (1), injected noise eps (dim). The clean z0 per row goes to the
    optional sideband file. Clean latents cycle through ``cfg.latent_file``
    when set (so the tuples follow the encoder's latent distribution) and
    are standard normal otherwise. Noise shaping is identity here; channel
    coloring enters through h_r.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    d = cfg.latent_dim
    sched = linear_schedule(
        cfg.diffusion.t_steps, cfg.diffusion.alpha_first, cfg.diffusion.alpha_last
    )
    latents = _load_latents(cfg)
    w_n = np.ones(d)
    rows = np.empty((count, 3 * d + 1), dtype=np.float64)
    z0s = np.empty((count, d), dtype=np.float64)
    for i in range(count):
        rng = stage_rng(cfg.seed, "dataset", i)
        z0 = (
            latents[i % latents.shape[0]]
            if latents is not None
            else rng.standard_normal(d)
        )
        ch = _frame_channel_for_dataset(cfg, rng)
        h_r = csi_vector(ch, cfg.otfs, d)
        t = int(rng.integers(1, sched.t_steps + 1))
        state = forward_diffuse(z0, t, sched, w_n, seed=rng)
        rows[i, :d] = state.z
        rows[i, d : 2 * d] = h_r
        rows[i, 2 * d] = t / sched.t_steps
        rows[i, 2 * d + 1 :] = state.eps
        z0s[i] = z0
    write_tensor(out_path, rows)
    if sideband_path is not None:
        write_tensor(sideband_path, z0s)
    return rows


def _frame_channel_for_dataset(cfg: RunConfig, rng) -> ChannelSpec:
    if cfg.channel.bypass:
        return _identity_channel()
    return gen_channel(
        cfg.otfs,
        cfg.channel.speed_kmh,
        n_paths=cfg.channel.n_paths,
        max_delay_tap=cfg.channel.max_delay_tap,
        seed=rng,
    )


def transmit_latents(
    cfg: RunConfig, z_mat: np.ndarray, snr_db: float, speed_kmh: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Push latent rows through the full link, one frame per row.

    Returns (received latents, csi rows, per-row equalized noise variance);
    with ``cfg.denoise`` set the received latents are denoised. This is the
    file-exchange bridge used by external training loops.
    """
    z_mat = np.asarray(z_mat, dtype=np.float64)
    if z_mat.ndim == 1:
        z_mat = z_mat[None, :]
    if z_mat.shape[1] != cfg.latent_dim:
        raise DimensionError(
            f"latent rows have length {z_mat.shape[1]}, config says {cfg.latent_dim}"
        )
    p = cfg.otfs
    sched = linear_schedule(
        cfg.diffusion.t_steps, cfg.diffusion.alpha_first, cfg.diffusion.alpha_last
    )
    predictor = _make_predictor(cfg) if cfg.denoise else None
    out = np.empty_like(z_mat)
    csi_rows = np.empty_like(z_mat)
    vars_eq = np.empty(z_mat.shape[0])
    for frame, z0 in enumerate(z_mat):
        tx_grid, scale = pack_latent(z0, p)
        s_tx = otfs_modulate(tx_grid, p)
        ch = _frame_channel(cfg, speed_kmh, frame)
        s_clean = apply_channel(s_tx, ch, p)
        s_rx, noise_var = add_awgn(
            s_clean, snr_db, seed=stage_rng(cfg.seed, "noise", frame)
        )
        y_dd = otfs_demodulate(s_rx, p)
        eq = _detect(cfg, y_dd, ch, noise_var)
        y_r = unpack_latent(eq.symbols, cfg.latent_dim, scale)
        var_eq, w_n = _latent_noise_profile(eq, scale, cfg.latent_dim)
        h_r = csi_vector(ch, p, cfg.latent_dim)
        r = y_r
        if cfg.denoise and var_eq > 0.0:
            if predictor == "oracle":
                eq_clean = _detect(cfg, otfs_demodulate(s_clean, p), ch, noise_var)
                y_r_clean = unpack_latent(eq_clean.symbols, cfg.latent_dim, scale)
                pred = Predictor(
                    kind="oracle", eps=(y_r - y_r_clean) / (np.sqrt(var_eq) * w_n)
                )
            else:
                pred = predictor
            r = reverse_denoise(y_r, h_r, var_eq, sched, w_n, pred)
        out[frame] = r
        csi_rows[frame] = h_r
        vars_eq[frame] = var_eq
    return out, csi_rows, vars_eq
