"""otfsim: delay-Doppler (OTFS) link-level simulation with diffusion-based
channel denoising.

The package splits into small functional layers:

* :mod:`otfsim.core` / :mod:`otfsim.tensorfile` -- shared types, parameter
  validation, and the binary tensor interchange format;
* :mod:`otfsim.transforms` -- unitary DD / TF / time-domain maps;
* :mod:`otfsim.mapping` -- QPSK and latent-vector grid packing;
* :mod:`otfsim.channel` -- sparse doubly-dispersive channel + AWGN;
* :mod:`otfsim.detection` -- LMMSE and iterative MRC equalizers;
* :mod:`otfsim.diffusion` -- noise schedule, forward process, and the
  deterministic reverse denoiser with pluggable noise predictors;
* :mod:`otfsim.harness` / :mod:`otfsim.cli` -- Monte-Carlo sweeps, metrics,
  dataset generation, and the ``sim`` command-line tool.
"""

from .channel import (
    ChannelSpec,
    PathSpec,
    add_awgn,
    apply_channel,
    effective_dd_response,
    gen_channel,
    max_doppler_hz,
)
from .config import RunConfig, load_config
from .core import OtfsParams, validate_params
from .detection import (
    EqualizedFrame,
    build_dd_matrix,
    csi_vector,
    lmmse_detect,
    mrc_detect,
)
from .diffusion import (
    LatentState,
    NoiseSchedule,
    Predictor,
    forward_diffuse,
    linear_schedule,
    load_predictor,
    predict_eps,
    reverse_denoise,
    save_predictor,
    select_steps,
)
from .harness import MetricRow, gen_dataset, psnr, run_point, sweep
from .mapping import pack_latent, qpsk_demap, qpsk_map, unpack_latent
from .tensorfile import read_tensor, write_tensor
from .transforms import (
    heisenberg,
    isfft,
    otfs_demodulate,
    otfs_modulate,
    sfft,
    wigner,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelSpec",
    "EqualizedFrame",
    "LatentState",
    "MetricRow",
    "NoiseSchedule",
    "OtfsParams",
    "PathSpec",
    "Predictor",
    "RunConfig",
    "add_awgn",
    "apply_channel",
    "build_dd_matrix",
    "csi_vector",
    "effective_dd_response",
    "forward_diffuse",
    "gen_channel",
    "gen_dataset",
    "heisenberg",
    "isfft",
    "linear_schedule",
    "lmmse_detect",
    "load_config",
    "load_predictor",
    "max_doppler_hz",
    "mrc_detect",
    "otfs_demodulate",
    "otfs_modulate",
    "pack_latent",
    "predict_eps",
    "psnr",
    "qpsk_demap",
    "qpsk_map",
    "read_tensor",
    "reverse_denoise",
    "run_point",
    "save_predictor",
    "select_steps",
    "sfft",
    "sweep",
    "unpack_latent",
    "validate_params",
    "wigner",
    "write_tensor",
]
