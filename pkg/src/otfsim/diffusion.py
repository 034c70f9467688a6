"""Channel denoising by diffusion: noise schedule, forward process,
step-count selection, and the deterministic reverse sampler.

The forward process progressively noises a real latent z0,

    z_t = sqrt(abar_t) z0 + sqrt(1 - abar_t) (w_n * eps),   eps ~ N(0, I)

where ``w_n`` is a positive per-component noise-shaping vector (the
diagonal noise coefficient; identity for plain AWGN) and abar_t is the
running product of the schedule values alpha_1..alpha_t.

The reverse pass is deterministic: each step forms the predictor-implied
clean latent and re-noises it at the next (cumulative) level, injecting
no fresh randomness. A received latent y_r enters the chain as
z_m = sqrt(abar_m) * y_r, with m chosen so that the marginal
noise-to-signal ratio (1 - abar_m)/abar_m matches the post-equalization
noise variance; that matching is exactly the Gaussian KL minimizer over
the step grid. Under this bridge the sampler is algebraically exact: fed
the true injected eps it returns z0 up to float rounding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimChainError, DimensionError, FormatError, RangeError

__all__ = [
    "NoiseSchedule",
    "LatentState",
    "DenseLayer",
    "Predictor",
    "linear_schedule",
    "forward_diffuse",
    "select_steps",
    "reverse_denoise",
    "predict_eps",
    "load_predictor",
    "save_predictor",
]


@dataclass(frozen=True)
class NoiseSchedule:
    """Per-step alpha values and their running products, t = 1..T."""

    alphas: np.ndarray
    alpha_bars: np.ndarray
    t_steps: int

    def __post_init__(self):
        a = np.asarray(self.alphas, dtype=np.float64)
        ab = np.asarray(self.alpha_bars, dtype=np.float64)
        if a.shape != (self.t_steps,) or ab.shape != (self.t_steps,):
            raise DimensionError("schedule arrays must have length t_steps")
        if not (0.0 < a[-1] <= a[0] < 1.0) or np.any(np.diff(a) > 0):
            raise ValueError("alphas must be non-increasing within (0, 1)")
        if np.any(np.diff(ab) >= 0):
            raise ValueError("alpha_bars must be strictly decreasing")

    def alpha_bar(self, t: int) -> float:
        """abar_t for t in [0, T]; abar_0 = 1 by convention."""
        if not 0 <= t <= self.t_steps:
            raise RangeError(f"step {t} outside [0, {self.t_steps}]")
        return 1.0 if t == 0 else float(self.alpha_bars[t - 1])

    def noise_to_signal(self, t: int) -> float:
        """(1 - abar_t) / abar_t, the marginal noise-to-signal ratio."""
        ab = self.alpha_bar(t)
        return (1.0 - ab) / ab


@dataclass
class LatentState:
    """A latent at diffusion step t, with the injected noise kept around
    so an oracle predictor can replay it."""

    z: np.ndarray
    t: int
    w_n: np.ndarray
    eps: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class DenseLayer:
    weights: np.ndarray     # (out, in), row-major per output unit
    bias: np.ndarray        # (out,)
    activation: str         # "relu" | "identity"


@dataclass(frozen=True)
class Predictor:
    """Noise predictor: an analytic variant or a loaded MLP.

    kind = "zero"   -> predicts no noise;
    kind = "oracle" -> replays a stored noise vector;
    kind = "mlp"    -> feed-forward net on [z_t, h_r, t/T].
    """

    kind: str
    layers: tuple[DenseLayer, ...] = ()
    eps: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("zero", "oracle", "mlp"):
            raise ValueError(f"unknown predictor kind {self.kind!r}")
        if self.kind == "mlp":
            if not self.layers:
                raise DimChainError("mlp predictor needs at least one layer")
            for prev, cur in zip(self.layers, self.layers[1:]):
                if cur.weights.shape[1] != prev.weights.shape[0]:
                    raise DimChainError(
                        f"layer input {cur.weights.shape[1]} does not chain "
                        f"with previous output {prev.weights.shape[0]}"
                    )


def linear_schedule(
    t_steps: int, alpha_first: float = 0.9999, alpha_last: float = 0.98
) -> NoiseSchedule:
    """Linearly interpolated alphas from alpha_first down to alpha_last.

    ``t_steps = 1`` degenerates to the single value ``alpha_first``.
    """
    if t_steps < 1:
        raise ValueError("t_steps must be >= 1")
    if not 0.0 < alpha_last <= alpha_first < 1.0:
        raise ValueError(
            f"need 0 < alpha_last <= alpha_first < 1, got "
            f"({alpha_first}, {alpha_last})"
        )
    if t_steps == 1:
        alphas = np.array([alpha_first])
    else:
        alphas = alpha_first + (
            np.arange(t_steps) / (t_steps - 1.0)
        ) * (alpha_last - alpha_first)
    return NoiseSchedule(alphas, np.cumprod(alphas), t_steps)


def _check_w(w_n, size: int) -> np.ndarray:
    w = np.asarray(w_n, dtype=np.float64).ravel()
    if w.size != size:
        raise DimensionError(f"w_n length {w.size} != latent length {size}")
    if np.any(w <= 0.0):
        raise ValueError("w_n entries must be strictly positive")
    return w


def forward_diffuse(
    z0, t: int, sched: NoiseSchedule, w_n, seed: int | None = None
) -> LatentState:
    """Jump directly to step t of the forward process (reparameterized)."""
    z0 = np.asarray(z0, dtype=np.float64).ravel()
    if not 1 <= t <= sched.t_steps:
        raise RangeError(f"step {t} outside [1, {sched.t_steps}]")
    w = _check_w(w_n, z0.size)
    ab = sched.alpha_bar(t)
    eps = np.random.default_rng(seed).standard_normal(z0.size)
    z_t = np.sqrt(ab) * z0 + np.sqrt(1.0 - ab) * (w * eps)
    return LatentState(z=z_t, t=t, w_n=w, eps=eps)


def select_steps(noise_var_eq: float, sched: NoiseSchedule) -> int:
    """Pick the step whose marginal noise-to-signal ratio is closest to the
    post-equalization noise variance (the KL-matching rule); 0 disables
    denoising and wins whenever the variance sits below the first step's
    midpoint."""
    if noise_var_eq < 0:
        raise ValueError("noise variance must be >= 0")
    if noise_var_eq == 0.0:
        return 0
    ratios = (1.0 - sched.alpha_bars) / sched.alpha_bars
    gaps = np.abs(ratios - noise_var_eq)
    best = int(np.argmin(gaps)) + 1
    return 0 if noise_var_eq < gaps[best - 1] else best


def predict_eps(pred: Predictor, z_t, h_r, t: int, t_steps: int) -> np.ndarray:
    """Evaluate the noise predictor at (z_t, h_r, t)."""
    z_t = np.asarray(z_t, dtype=np.float64).ravel()
    if pred.kind == "zero":
        return np.zeros_like(z_t)
    if pred.kind == "oracle":
        if pred.eps is None:
            raise ValueError("oracle predictor has no stored noise vector")
        eps = np.asarray(pred.eps, dtype=np.float64).ravel()
        if eps.size != z_t.size:
            raise DimensionError(
                f"stored noise length {eps.size} != latent length {z_t.size}"
            )
        return eps.copy()
    h_r = np.asarray(h_r, dtype=np.float64).ravel()
    x = np.concatenate([z_t, h_r, [t / t_steps]])
    if x.size != pred.layers[0].weights.shape[1]:
        raise DimensionError(
            f"mlp expects input of length {pred.layers[0].weights.shape[1]}, "
            f"got {x.size}"
        )
    for layer in pred.layers:
        x = layer.weights @ x + layer.bias
        if layer.activation == "relu":
            x = np.maximum(x, 0.0)
    if x.size != z_t.size:
        raise DimensionError(
            f"mlp output length {x.size} != latent length {z_t.size}"
        )
    return x


def reverse_denoise(
    y_r,
    h_r,
    noise_var_eq: float,
    sched: NoiseSchedule,
    w_n,
    predictor: Predictor,
) -> np.ndarray:
    """Deterministic reverse pass from a received latent.

    m = select_steps(noise_var_eq) steps are run; m = 0 returns the input
    unchanged. The chain starts at z_m = sqrt(abar_m) y_r so its marginal
    matches the forward process at the selected step, then repeatedly:

        eps_hat = predictor(z_t, h_r, t)
        z0_hat  = (z_t - sqrt(1 - abar_t) (w_n * eps_hat)) / sqrt(abar_t)
        z_{t-1} = sqrt(abar_{t-1}) z0_hat + sqrt(1 - abar_{t-1}) (w_n * eps_hat)

    and the final step returns z0_hat directly.
    """
    y_r = np.asarray(y_r, dtype=np.float64).ravel()
    w = _check_w(w_n, y_r.size)
    m = select_steps(noise_var_eq, sched)
    if m == 0:
        return y_r.copy()
    z = np.sqrt(sched.alpha_bar(m)) * y_r
    for t in range(m, 0, -1):
        ab_t = sched.alpha_bar(t)
        eps_hat = predict_eps(predictor, z, h_r, t, sched.t_steps)
        z0_hat = (z - np.sqrt(1.0 - ab_t) * (w * eps_hat)) / np.sqrt(ab_t)
        if t == 1:
            return z0_hat
        ab_prev = sched.alpha_bar(t - 1)
        z = np.sqrt(ab_prev) * z0_hat + np.sqrt(1.0 - ab_prev) * (w * eps_hat)
    return z0_hat


_ACTIVATIONS = ("relu", "identity")


def save_predictor(path, pred: Predictor) -> None:
    """Write an MLP predictor to the JSON weight schema."""
    if pred.kind != "mlp":
        raise ValueError("only mlp predictors are serializable")
    doc = {
        "version": 1,
        "layers": [
            {
                "type": "dense",
                "in": int(l.weights.shape[1]),
                "out": int(l.weights.shape[0]),
                "w": [float(v) for v in l.weights.ravel()],
                "b": [float(v) for v in l.bias],
                "act": l.activation,
            }
            for l in pred.layers
        ],
    }
    Path(path).write_text(json.dumps(doc))


def load_predictor(path) -> Predictor:
    """Load an MLP predictor from the JSON weight schema.

    Schema: {"version": 1, "layers": [{"type": "dense", "in": int,
    "out": int, "w": [out*in floats, row-major], "b": [out floats],
    "act": "relu"|"identity"}, ...]}.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("version") != 1:
        raise FormatError(f"{path}: unsupported weight-file version")
    raw_layers = doc.get("layers")
    if not isinstance(raw_layers, list) or not raw_layers:
        raise FormatError(f"{path}: missing layer list")
    layers = []
    for i, spec in enumerate(raw_layers):
        if spec.get("type") != "dense":
            raise FormatError(f"{path}: layer {i} has type {spec.get('type')!r}")
        act = spec.get("act", "identity")
        if act not in _ACTIVATIONS:
            raise FormatError(f"{path}: layer {i} activation {act!r}")
        try:
            n_in, n_out = int(spec["in"]), int(spec["out"])
            w = np.asarray(spec["w"], dtype=np.float64)
            b = np.asarray(spec["b"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{path}: layer {i} is malformed ({exc})") from exc
        if w.size != n_in * n_out or b.size != n_out:
            raise DimChainError(
                f"{path}: layer {i} declares ({n_out}x{n_in}) but carries "
                f"{w.size} weights / {b.size} biases"
            )
        layers.append(DenseLayer(w.reshape(n_out, n_in), b, act))
    return Predictor(kind="mlp", layers=tuple(layers))
