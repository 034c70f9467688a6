import json
import subprocess
import sys

import numpy as np

from otfsim.cli import main
from otfsim.harness import CSV_HEADER
from otfsim.tensorfile import read_tensor, write_tensor

CONFIG = """
[otfs]
n = 8
m = 8
scs_hz = 15000.0

[channel]
paths = 3
max_delay_tap = 4
speed_kmh = 500.0

[detector]
kind = "mrc"

[sweep]
snr_db = [5.0, 10.0]
speeds_kmh = [350.0, 650.0]
frames_per_point = 3
seed = 11
payload = "latent"
latent_dim = 32
denoise = true
predictor = "oracle"
"""


def _write_cfg(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text(CONFIG)
    return str(path)


def _zero_predictor_file(tmp_path, dim):
    # one dense layer, all-zero weights: predicts zero noise
    doc = {
        "version": 1,
        "layers": [
            {
                "type": "dense",
                "in": 2 * dim + 1,
                "out": dim,
                "w": [0.0] * (dim * (2 * dim + 1)),
                "b": [0.0] * dim,
                "act": "identity",
            }
        ],
    }
    path = tmp_path / "zero.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_run_subcommand(tmp_path):
    cfg = _write_cfg(tmp_path)
    out = tmp_path / "row.csv"
    assert main(["run", "--config", cfg, "--snr", "10", "--speed", "500",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 2


def test_sweep_subcommand_deterministic(tmp_path):
    cfg = _write_cfg(tmp_path)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--config", cfg, "--out", str(a)]) == 0
    assert main(["sweep", "--config", cfg, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 1 + 4


def test_sweep_no_denoise_flag(tmp_path):
    cfg = _write_cfg(tmp_path)
    a, b = tmp_path / "dn.csv", tmp_path / "plain.csv"
    assert main(["sweep", "--config", cfg, "--out", str(a)]) == 0
    assert main(["sweep", "--config", cfg, "--out", str(b), "--no-denoise"]) == 0
    assert a.read_bytes() != b.read_bytes()


def test_gen_dataset_subcommand(tmp_path):
    cfg = _write_cfg(tmp_path)
    ds = tmp_path / "ds.tns"
    z0 = tmp_path / "z0.tns"
    rc = main(["gen-dataset", "--config", cfg, "--count", "4",
               "--out", str(ds), "--sideband", str(z0)])
    assert rc == 0
    assert read_tensor(ds).shape == (4, 3 * 32 + 1)
    assert read_tensor(z0).shape == (4, 32)


def test_denoise_subcommand_zero_net_is_identity(tmp_path):
    # an all-zero predictor makes the reverse pass a pure rescaling chain
    # that telescopes to the identity
    dim = 16
    rng = np.random.default_rng(0)
    y = rng.standard_normal(dim)
    write_tensor(tmp_path / "rx.tns", y)
    write_tensor(tmp_path / "csi.tns", np.full(dim, 1 / np.sqrt(dim)))
    out = tmp_path / "clean.tns"
    rc = main([
        "denoise",
        "--in", str(tmp_path / "rx.tns"),
        "--csi", str(tmp_path / "csi.tns"),
        "--sigma2", "0.05",
        "--predictor", _zero_predictor_file(tmp_path, dim),
        "--out", str(out),
    ])
    assert rc == 0
    np.testing.assert_allclose(read_tensor(out), y, atol=1e-9)


def test_transmit_subcommand(tmp_path):
    cfg = _write_cfg(tmp_path)
    z = np.random.default_rng(1).standard_normal((3, 32))
    write_tensor(tmp_path / "z.tns", z)
    rc = main([
        "transmit", "--config", cfg,
        "--in", str(tmp_path / "z.tns"),
        "--out", str(tmp_path / "rx.tns"),
        "--snr", "30", "--speed", "500",
        "--csi-out", str(tmp_path / "csi.tns"),
        "--sigma2-out", str(tmp_path / "s2.tns"),
        "--no-denoise",
    ])
    assert rc == 0
    rx = read_tensor(tmp_path / "rx.tns")
    assert rx.shape == (3, 32)
    # at 30 dB the latents come through recognizably (bound is loose:
    # single random channels can leave some equalizer residual)
    assert np.mean((rx - z) ** 2) < 0.2
    assert read_tensor(tmp_path / "csi.tns").shape == (3, 32)
    assert read_tensor(tmp_path / "s2.tns").shape == (3,)


def test_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[otfs]\nn = 3\n")
    assert main(["run", "--config", str(bad), "--snr", "1", "--speed", "1",
                 "--out", str(tmp_path / "x.csv")]) == 1
    assert main(["run", "--config", str(tmp_path / "missing.toml"), "--snr", "1",
                 "--speed", "1", "--out", str(tmp_path / "x.csv")]) == 1


def test_runtime_error_exit_code(tmp_path):
    rc = main([
        "denoise",
        "--in", str(tmp_path / "nope.tns"),
        "--csi", str(tmp_path / "nope.tns"),
        "--sigma2", "0.1",
        "--predictor", str(tmp_path / "nope.json"),
        "--out", str(tmp_path / "out.tns"),
    ])
    assert rc == 2


def test_console_script_selftest():
    proc = subprocess.run(
        [sys.executable, "-m", "otfsim.cli", "selftest"],
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "[PASS]" in proc.stdout
    assert "[FAIL]" not in proc.stdout
