"""Command-line entry point (installed as ``sim``).

Subcommands:

    sim sweep       --config cfg.toml --out results.csv
                    [--predictor weights.json] [--no-denoise]
    sim run         --config cfg.toml --snr <dB> --speed <kmh> --out row.csv
    sim gen-dataset --config cfg.toml --count N --out ds.tns
                    [--sideband z0.tns]
    sim denoise     --in rx.tns --csi csi.tns --sigma2 <v>
                    --predictor weights.json --out clean.tns [--config cfg.toml]
    sim transmit    --config cfg.toml --in z0.tns --out rx.tns
                    [--snr <dB>] [--speed <kmh>] [--csi-out csi.tns]
                    [--sigma2-out s2.tns] [--predictor w.json] [--no-denoise]
    sim selftest

Exit codes: 0 ok, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from .config import RunConfig, load_config
from .diffusion import linear_schedule, load_predictor, reverse_denoise
from .errors import ConfigError
from .harness import gen_dataset, rows_to_csv, run_point, sweep, transmit_latents
from .selftest import run_selftest
from .tensorfile import read_tensor, write_tensor

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sim", description="Delay-Doppler link simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="run the SNR x speed Monte-Carlo sweep")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out", required=True)
    sw.add_argument("--predictor", default=None)
    sw.add_argument("--no-denoise", action="store_true")

    rn = sub.add_parser("run", help="run a single sweep point")
    rn.add_argument("--config", required=True)
    rn.add_argument("--snr", type=float, required=True)
    rn.add_argument("--speed", type=float, required=True)
    rn.add_argument("--out", required=True)
    rn.add_argument("--predictor", default=None)
    rn.add_argument("--no-denoise", action="store_true")

    gd = sub.add_parser("gen-dataset", help="emit predictor training tuples")
    gd.add_argument("--config", required=True)
    gd.add_argument("--count", type=int, required=True)
    gd.add_argument("--out", required=True)
    gd.add_argument("--sideband", default=None)

    dn = sub.add_parser("denoise", help="denoise a received latent tensor")
    dn.add_argument("--in", dest="infile", required=True)
    dn.add_argument("--csi", required=True)
    dn.add_argument("--sigma2", type=float, required=True)
    dn.add_argument("--predictor", required=True)
    dn.add_argument("--out", required=True)
    dn.add_argument("--config", default=None)

    tx = sub.add_parser("transmit", help="send latent rows through the link")
    tx.add_argument("--config", required=True)
    tx.add_argument("--in", dest="infile", required=True)
    tx.add_argument("--out", required=True)
    tx.add_argument("--snr", type=float, default=None)
    tx.add_argument("--speed", type=float, default=None)
    tx.add_argument("--csi-out", default=None)
    tx.add_argument("--sigma2-out", default=None)
    tx.add_argument("--predictor", default=None)
    tx.add_argument("--no-denoise", action="store_true")

    sub.add_parser("selftest", help="run the built-in oracle/property suite")
    return parser


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    updates = {}
    if getattr(args, "no_denoise", False):
        updates["denoise"] = False
    if getattr(args, "predictor", None):
        updates["predictor"] = args.predictor
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _cmd_sweep(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    sweep(cfg, out_path=args.out)
    return 0


def _cmd_run(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    row = run_point(cfg, args.snr, args.speed)
    with open(args.out, "w", newline="") as fh:
        fh.write(rows_to_csv([row]))
    return 0


def _cmd_gen_dataset(args) -> int:
    cfg = load_config(args.config)
    if args.count < 1:
        raise ConfigError("--count must be >= 1")
    gen_dataset(cfg, args.count, args.out, sideband_path=args.sideband)
    return 0


def _cmd_denoise(args) -> int:
    if args.config:
        d = load_config(args.config).diffusion
        sched = linear_schedule(d.t_steps, d.alpha_first, d.alpha_last)
    else:
        sched = linear_schedule(200)
    y = np.asarray(read_tensor(args.infile), dtype=np.float64)
    csi = np.asarray(read_tensor(args.csi), dtype=np.float64)
    pred = load_predictor(args.predictor)
    rows = y.reshape(1, -1) if y.ndim == 1 else y
    csi_rows = csi.reshape(1, -1) if csi.ndim == 1 else csi
    w_n = np.ones(rows.shape[1])
    clean = np.stack(
        [
            reverse_denoise(row, c[: rows.shape[1]], args.sigma2, sched, w_n, pred)
            for row, c in zip(rows, csi_rows)
        ]
    )
    write_tensor(args.out, clean if y.ndim > 1 else clean[0])
    return 0


def _cmd_transmit(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    z = np.asarray(read_tensor(args.infile), dtype=np.float64)
    snr = args.snr if args.snr is not None else cfg.snr_grid_db[0]
    speed = args.speed if args.speed is not None else cfg.channel.speed_kmh
    rx, csi_rows, vars_eq = transmit_latents(cfg, z, snr, speed)
    write_tensor(args.out, rx if z.ndim > 1 else rx[0])
    if args.csi_out:
        write_tensor(args.csi_out, csi_rows if z.ndim > 1 else csi_rows[0])
    if args.sigma2_out:
        write_tensor(args.sigma2_out, vars_eq)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "gen-dataset":
            return _cmd_gen_dataset(args)
        if args.command == "denoise":
            return _cmd_denoise(args)
        if args.command == "transmit":
            return _cmd_transmit(args)
        if args.command == "selftest":
            return 0 if run_selftest() else 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
