"""Minimal feed-forward network machinery with explicit backpropagation.

Shared by the autoencoder halves and the mutual-information statistics
network: dense layers with ReLU or linear activations, numerically-stable
softmax cross-entropy, a per-vector power normalization layer whose Jacobian
participates in backprop, and an Adam optimizer.  Everything is float64.

Model files use a little-endian binary layout so any implementation can
reload them:

    bytes 0..7   magic b"MLP64LE\\0"
    u32          format version (1)
    u32          L = number of weight layers
    u32 * (L+1)  layer dimensions
    u8  * L      activation tags (0 = linear, 1 = relu)
    then per layer: W (dims[i] x dims[i+1]) row-major float64, b (dims[i+1])
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "Mlp",
    "MlpCache",
    "AdamState",
    "softmax",
    "softmax_xent",
    "normalize_power",
    "normalize_power_backward",
    "save_mlp",
    "load_mlp",
]

MAGIC = b"MLP64LE\x00"
FORMAT_VERSION = 1
ACTIVATIONS = ("linear", "relu")


@dataclass
class MlpCache:
    """Forward-pass intermediates needed by backward()."""

    inputs: np.ndarray | None  # dense input, None for the one-hot fast path
    onehot_indices: np.ndarray | None
    pre_activations: list[np.ndarray]
    post_activations: list[np.ndarray]


class Mlp:
    """Fully-connected network: affine layers with per-layer activations."""

    def __init__(
        self,
        layer_dims: list[int],
        activations: list[str],
        weights: list[np.ndarray],
        biases: list[np.ndarray],
    ) -> None:
        if len(activations) != len(layer_dims) - 1:
            raise ValueError("need one activation per weight layer")
        for act in activations:
            if act not in ACTIVATIONS:
                raise ValueError(f"unknown activation {act!r}")
        for i, (w, b) in enumerate(zip(weights, biases)):
            if w.shape != (layer_dims[i], layer_dims[i + 1]):
                raise ValueError(f"weight {i} has shape {w.shape}")
            if b.shape != (layer_dims[i + 1],):
                raise ValueError(f"bias {i} has shape {b.shape}")
        self.layer_dims = list(layer_dims)
        self.activations = list(activations)
        self.weights = weights
        self.biases = biases

    @classmethod
    def initialize(
        cls, layer_dims: list[int], activations: list[str], rng: np.random.Generator
    ) -> "Mlp":
        """Symmetric uniform fan-in (Glorot-style) initialization, zero biases."""
        weights, biases = [], []
        for fan_in, fan_out in zip(layer_dims, layer_dims[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return cls(layer_dims, activations, weights, biases)

    @property
    def parameters(self) -> list[np.ndarray]:
        """Weights and biases interleaved: [W0, b0, W1, b1, ...]."""
        out: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, MlpCache]:
        """Affine-then-activation composition on a (batch, dim) array."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.layer_dims[0]:
            raise ValueError(
                f"input dim {x.shape[1]} != first layer dim {self.layer_dims[0]}"
            )
        return self._forward_from(x, None)

    def forward_onehot(self, indices: np.ndarray) -> tuple[np.ndarray, MlpCache]:
        """Forward pass when the input is one-hot: the first affine layer
        reduces to a row gather, which is exact and much faster for large
        input alphabets."""
        indices = np.asarray(indices)
        z = self.weights[0][indices] + self.biases[0]
        return self._forward_from(z, indices)

    def _forward_from(
        self, first: np.ndarray, onehot_indices: np.ndarray | None
    ) -> tuple[np.ndarray, MlpCache]:
        pre: list[np.ndarray] = []
        post: list[np.ndarray] = []
        if onehot_indices is None:
            a = first
            inputs = first
            start = 0
        else:
            inputs = None
            z = first
            pre.append(z)
            a = np.maximum(z, 0.0) if self.activations[0] == "relu" else z
            post.append(a)
            start = 1
        for i in range(start, len(self.weights)):
            z = a @ self.weights[i] + self.biases[i]
            pre.append(z)
            a = np.maximum(z, 0.0) if self.activations[i] == "relu" else z
            post.append(a)
        cache = MlpCache(inputs, onehot_indices, pre, post)
        return a, cache

    def backward(
        self, cache: MlpCache, grad_output: np.ndarray
    ) -> tuple[list[np.ndarray], np.ndarray | None]:
        """Exact reverse-mode gradients for a scalar loss.

        Returns (parameter gradients interleaved as in `parameters`,
        gradient w.r.t. the dense input or None on the one-hot path).
        """
        if grad_output.shape != cache.pre_activations[-1].shape:
            raise ValueError("gradient shape does not match cached forward pass")
        n_layers = len(self.weights)
        grads_w: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
        grads_b: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
        delta = grad_output
        for i in range(n_layers - 1, -1, -1):
            if self.activations[i] == "relu":
                delta = delta * (cache.pre_activations[i] > 0.0)
            if i == 0 and cache.onehot_indices is not None:
                gw = np.zeros_like(self.weights[0])
                np.add.at(gw, cache.onehot_indices, delta)
                grads_w[0] = gw
                grads_b[0] = delta.sum(axis=0)
                grad_input = None
                break
            prev = cache.post_activations[i - 1] if i > 0 else cache.inputs
            grads_w[i] = prev.T @ delta
            grads_b[i] = delta.sum(axis=0)
            delta = delta @ self.weights[i].T
        else:
            grad_input = delta
        out: list[np.ndarray] = []
        for gw, gb in zip(grads_w, grads_b):
            out.extend((gw, gb))
        return out, grad_input


def softmax(logits: np.ndarray) -> np.ndarray:
    """Numerically-stabilized softmax along the last axis."""
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_xent(
    logits: np.ndarray, labels: np.ndarray | int
) -> tuple[np.ndarray, np.ndarray]:
    """Cross-entropy -log p_label and its gradient p - onehot(label).

    Works on a single logit vector or a (batch, classes) array; losses come
    back per sample and gradients unreduced.
    """
    logits = np.asarray(logits, dtype=np.float64)
    single = logits.ndim == 1
    logits2 = np.atleast_2d(logits)
    labels2 = np.atleast_1d(np.asarray(labels))
    if np.any(labels2 < 0) or np.any(labels2 >= logits2.shape[1]):
        raise ValueError("label out of range")
    shifted = logits2 - logits2.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    rows = np.arange(logits2.shape[0])
    losses = log_z - shifted[rows, labels2]
    grad = softmax(logits2)
    grad[rows, labels2] -= 1.0
    if single:
        return losses[0], grad[0]
    return losses, grad


def normalize_power(raw: np.ndarray, n_power: float) -> np.ndarray:
    """Scale each vector to squared norm exactly n_power (= n * P)."""
    raw = np.asarray(raw, dtype=np.float64)
    norms = np.linalg.norm(raw, axis=-1, keepdims=True)
    if np.any(norms < 1e-12):
        raise ValueError("cannot power-normalize a (near-)zero vector")
    return raw * (np.sqrt(n_power) / norms)


def normalize_power_backward(
    raw: np.ndarray, grad_output: np.ndarray, n_power: float
) -> np.ndarray:
    """Jacobian-transpose product of normalize_power.

    d/draw [c * raw / |raw|] applied to g is (c/|raw|) (g - raw (raw.g)/|raw|^2).
    """
    raw = np.asarray(raw, dtype=np.float64)
    norms = np.linalg.norm(raw, axis=-1, keepdims=True)
    scale = np.sqrt(n_power) / norms
    inner = np.sum(raw * grad_output, axis=-1, keepdims=True)
    return scale * (grad_output - raw * inner / np.square(norms))


@dataclass
class AdamState:
    """Adam optimizer state for a fixed list of parameter arrays."""

    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0
    first_moments: list[np.ndarray] = field(default_factory=list)
    second_moments: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_parameters(
        cls, params: list[np.ndarray], learning_rate: float = 1e-3
    ) -> "AdamState":
        return cls(
            learning_rate=learning_rate,
            first_moments=[np.zeros_like(p) for p in params],
            second_moments=[np.zeros_like(p) for p in params],
        )

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        """In-place Adam update with bias correction."""
        if len(params) != len(self.first_moments):
            raise ValueError("parameter count does not match optimizer state")
        self.step_count += 1
        t = self.step_count
        bias1 = 1.0 - self.beta1**t
        bias2 = 1.0 - self.beta2**t
        for p, g, m, v in zip(params, grads, self.first_moments, self.second_moments):
            if p.shape != g.shape:
                raise ValueError(f"gradient shape {g.shape} != parameter {p.shape}")
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * np.square(g)
            p -= self.learning_rate * (m / bias1) / (np.sqrt(v / bias2) + self.epsilon)


def save_mlp(net: Mlp, path: str | Path) -> None:
    """Write the documented little-endian binary model format."""
    path = Path(path)
    n_layers = len(net.weights)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", FORMAT_VERSION, n_layers))
        fh.write(struct.pack(f"<{n_layers + 1}I", *net.layer_dims))
        fh.write(bytes(ACTIVATIONS.index(a) for a in net.activations))
        for w, b in zip(net.weights, net.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_mlp(path: str | Path) -> Mlp:
    """Reload a model written by save_mlp, validating the header."""
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise ValueError(f"{path}: not a model file (bad magic)")
    version, n_layers = struct.unpack_from("<II", data, 8)
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format version {version}")
    offset = 16
    dims = list(struct.unpack_from(f"<{n_layers + 1}I", data, offset))
    offset += 4 * (n_layers + 1)
    tags = data[offset : offset + n_layers]
    offset += n_layers
    activations = [ACTIVATIONS[t] for t in tags]
    weights, biases = [], []
    for i in range(n_layers):
        w_count = dims[i] * dims[i + 1]
        w = np.frombuffer(data, dtype="<f8", count=w_count, offset=offset)
        offset += 8 * w_count
        b = np.frombuffer(data, dtype="<f8", count=dims[i + 1], offset=offset)
        offset += 8 * dims[i + 1]
        weights.append(w.reshape(dims[i], dims[i + 1]).copy())
        biases.append(b.copy())
    return Mlp(dims, activations, weights, biases)
