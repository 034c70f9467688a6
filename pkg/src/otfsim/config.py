"""TOML run configuration.

Schema (all sections optional, showing defaults):

    [otfs]
    n = 16
    m = 32
    scs_hz = 15000.0
    carrier_hz = 4.0e9

    [channel]
    paths = 5            # 0 selects the AWGN-only bypass (no multipath)
    max_delay_tap = 4    # defaults to m / 8
    speed_kmh = 500.0
    seed = 0             # optional, standalone channel generation only

    [detector]
    kind = "mrc"         # "mrc" | "lmmse"
    max_iter = 20
    damping = 1.0

    [diffusion]
    t_steps = 200
    alpha_1 = 0.9999
    alpha_t = 0.98

    [sweep]
    snr_db = [0.0, 5.0, 10.0, 15.0]
    speeds_kmh = [350.0, 500.0, 650.0]
    frames_per_point = 200
    seed = 1
    payload = "latent"   # "latent" | "bits"
    latent_dim = 256
    denoise = true
    predictor = "oracle" # "oracle" | "zero" | path to a weight file
    latent_file = ""     # optional tensor file supplying latents
    psnr_peak = 1.0
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

from .core import OtfsParams, validate_params
from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "ChannelConfig",
    "DetectorConfig",
    "DiffusionConfig",
    "RunConfig",
    "load_config",
    "config_from_dict",
]


@dataclass(frozen=True)
class ChannelConfig:
    n_paths: int = 5
    max_delay_tap: int | None = None
    speed_kmh: float = 500.0
    seed: int | None = None

    @property
    def bypass(self) -> bool:
        """True for the AWGN-only mode (no multipath, identity channel)."""
        return self.n_paths == 0


@dataclass(frozen=True)
class DetectorConfig:
    kind: str = "mrc"
    max_iter: int = 20
    damping: float = 1.0


@dataclass(frozen=True)
class DiffusionConfig:
    t_steps: int = 200
    alpha_first: float = 0.9999
    alpha_last: float = 0.98


@dataclass(frozen=True)
class RunConfig:
    otfs: OtfsParams = field(
        default_factory=lambda: OtfsParams(16, 32, 15e3)
    )
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    diffusion: DiffusionConfig = field(default_factory=DiffusionConfig)
    snr_grid_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0)
    speeds_kmh: tuple[float, ...] = (350.0, 500.0, 650.0)
    frames_per_point: int = 200
    seed: int = 1
    payload: str = "latent"
    latent_dim: int = 256
    denoise: bool = True
    predictor: str = "oracle"
    latent_file: str = ""
    psnr_peak: float = 1.0

    def validate(self) -> "RunConfig":
        validate_params(self.otfs)
        if self.detector.kind not in ("mrc", "lmmse"):
            raise ConfigError(f"unknown detector kind {self.detector.kind!r}")
        if self.payload not in ("latent", "bits"):
            raise ConfigError(f"unknown payload kind {self.payload!r}")
        if not self.snr_grid_db:
            raise ConfigError("snr grid must be nonempty")
        if not self.speeds_kmh:
            raise ConfigError("speed list must be nonempty")
        if self.frames_per_point < 1:
            raise ConfigError("frames_per_point must be >= 1")
        if not 1 <= self.latent_dim <= 2 * self.otfs.frame_len:
            raise ConfigError(
                f"latent_dim must be in [1, {2 * self.otfs.frame_len}]"
            )
        if self.channel.n_paths < 0:
            raise ConfigError("channel paths must be >= 0")
        return self


def _section(doc: dict, name: str) -> dict:
    sec = doc.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"[{name}] must be a table")
    return dict(sec)


def config_from_dict(doc: dict) -> RunConfig:
    """Build a validated RunConfig from a parsed TOML document."""
    try:
        otfs_tbl = _section(doc, "otfs")
        otfs = OtfsParams(
            n_doppler=int(otfs_tbl.get("n", 16)),
            m_delay=int(otfs_tbl.get("m", 32)),
            subcarrier_spacing_hz=float(otfs_tbl.get("scs_hz", 15e3)),
            carrier_freq_hz=float(otfs_tbl.get("carrier_hz", 4.0e9)),
        )
        ch_tbl = _section(doc, "channel")
        channel = ChannelConfig(
            n_paths=int(ch_tbl.get("paths", 5)),
            max_delay_tap=(
                int(ch_tbl["max_delay_tap"]) if "max_delay_tap" in ch_tbl else None
            ),
            speed_kmh=float(ch_tbl.get("speed_kmh", 500.0)),
            seed=int(ch_tbl["seed"]) if "seed" in ch_tbl else None,
        )
        det_tbl = _section(doc, "detector")
        detector = DetectorConfig(
            kind=str(det_tbl.get("kind", "mrc")),
            max_iter=int(det_tbl.get("max_iter", 20)),
            damping=float(det_tbl.get("damping", 1.0)),
        )
        dif_tbl = _section(doc, "diffusion")
        diffusion = DiffusionConfig(
            t_steps=int(dif_tbl.get("t_steps", 200)),
            alpha_first=float(dif_tbl.get("alpha_1", 0.9999)),
            alpha_last=float(dif_tbl.get("alpha_t", 0.98)),
        )
        sw = _section(doc, "sweep")
        cfg = RunConfig(
            otfs=otfs,
            channel=channel,
            detector=detector,
            diffusion=diffusion,
            snr_grid_db=tuple(float(v) for v in sw.get("snr_db", (0, 5, 10, 15))),
            speeds_kmh=tuple(
                float(v) for v in sw.get("speeds_kmh", (350, 500, 650))
            ),
            frames_per_point=int(sw.get("frames_per_point", 200)),
            seed=int(sw.get("seed", 1)),
            payload=str(sw.get("payload", "latent")),
            latent_dim=int(sw.get("latent_dim", 256)),
            denoise=bool(sw.get("denoise", True)),
            predictor=str(sw.get("predictor", "oracle")),
            latent_file=str(sw.get("latent_file", "")),
            psnr_peak=float(sw.get("psnr_peak", 1.0)),
        )
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad configuration value: {exc}") from exc
    try:
        return cfg.validate()
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> RunConfig:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        doc = tomllib.loads(p.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: invalid TOML ({exc})") from exc
    return config_from_dict(doc)
