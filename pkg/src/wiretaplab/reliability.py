"""Reliability layer: a learned (n, q) code for the legitimate AWGN channel.

The encoder maps one of Q = 2^q inner words to an n-sample codeword on the
power sphere (one-hot embedding -> dense ReLU -> dense linear -> power
normalization); the decoder maps n received samples to Q logits and decodes
by argmax.  Both halves train jointly with Adam on softmax cross-entropy,
with fresh channel noise drawn for every example of every batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import GaussianSpec, RngStream, snr_to_variance
from .neural import (
    AdamState,
    Mlp,
    normalize_power,
    normalize_power_backward,
    softmax_xent,
)

__all__ = [
    "ReliabilityConfig",
    "ReliabilityCode",
    "PeEstimate",
    "TrainingDivergedError",
    "default_q",
    "train",
    "encode0",
    "decode0",
    "estimate_pe0",
    "wilson_interval",
]


class TrainingDivergedError(RuntimeError):
    """Raised when the training loss becomes non-finite."""


def default_q(n: int) -> int:
    """Inner word width: n-1 bits, dropping to n-2 at n = 16."""
    return n - 2 if n == 16 else n - 1


@dataclass(frozen=True)
class ReliabilityConfig:
    """Training recipe for the reliability layer.

    The paper-scale profile is the default; `fast_profile` trims it for CI.
    """

    n: int
    q: int = 0  # 0 -> default_q(n)
    snr_db: float = 9.0
    learning_rate: float = 1e-3
    epochs: int = 600
    messages_per_epoch: int = 100_000
    batch_size: int = 1000
    encoder_hidden: tuple[int, ...] = ()  # () -> (Q,)
    decoder_hidden: tuple[int, ...] = ()  # () -> (Q,)
    seed: int = 0
    max_q: int = 20  # memory guard: refuse Q = 2^q beyond this

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.q == 0:
            object.__setattr__(self, "q", default_q(self.n))
        if self.q < 1:
            raise ValueError(f"q must be >= 1 (n={self.n} gives q={self.q})")
        if self.q > self.max_q:
            raise ValueError(f"q={self.q} exceeds the memory budget (max_q={self.max_q})")
        if self.messages_per_epoch % self.batch_size != 0:
            raise ValueError("batch_size must divide messages_per_epoch")

    @property
    def alphabet_size(self) -> int:
        return 1 << self.q

    def encoder_dims(self) -> list[int]:
        hidden = self.encoder_hidden or (self.alphabet_size,)
        return [self.alphabet_size, *hidden, self.n]

    def decoder_dims(self) -> list[int]:
        hidden = self.decoder_hidden or (self.alphabet_size,)
        return [self.n, *hidden, self.alphabet_size]

    @classmethod
    def fast_profile(cls, n: int, **overrides) -> "ReliabilityConfig":
        """CI-scale: 100 epochs of 10^4 messages."""
        defaults = dict(epochs=100, messages_per_epoch=10_000)
        defaults.update(overrides)
        return cls(n=n, **defaults)

    @classmethod
    def paper_profile(cls, n: int, **overrides) -> "ReliabilityConfig":
        return cls(n=n, **overrides)


@dataclass
class ReliabilityCode:
    """Trained (encoder, decoder) pair plus its training configuration."""

    encoder: Mlp
    decoder: Mlp
    config: ReliabilityConfig
    loss_trace: list[float] = field(default_factory=list)
    _codeword_table: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def q(self) -> int:
        return self.config.q

    def codeword_table(self) -> np.ndarray:
        """All Q codewords, shape (Q, n); cached after first call."""
        if self._codeword_table is None:
            words = np.arange(self.config.alphabet_size)
            raw, _ = self.encoder.forward_onehot(words)
            self._codeword_table = normalize_power(raw, float(self.n))
            self._codeword_table.setflags(write=False)
        return self._codeword_table

    def invalidate_cache(self) -> None:
        self._codeword_table = None

    def encode_words(self, words: np.ndarray) -> np.ndarray:
        """Codewords for an int array of inner words, shape (..., n)."""
        words = np.asarray(words)
        if np.any(words < 0) or np.any(words >= self.config.alphabet_size):
            raise ValueError("inner word out of range")
        return self.codeword_table()[words]

    def decode_words(self, received: np.ndarray) -> np.ndarray:
        """Argmax decoder on a (batch, n) array; ties break to the lowest index."""
        received = np.atleast_2d(np.asarray(received, dtype=np.float64))
        logits, _ = self.decoder.forward(received)
        return np.argmax(logits, axis=1)


def encode0(code: ReliabilityCode, v: int) -> np.ndarray:
    """Codeword for a single inner word; squared norm is exactly n * P."""
    if not 0 <= v < code.config.alphabet_size:
        raise ValueError(f"inner word {v} out of range")
    return code.encode_words(np.array([v]))[0]


def decode0(code: ReliabilityCode, y: np.ndarray) -> int:
    """Most probable inner word for one received vector."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (code.n,):
        raise ValueError(f"expected a length-{code.n} vector")
    return int(code.decode_words(y[None, :])[0])


def train(config: ReliabilityConfig, rng: RngStream | None = None) -> ReliabilityCode:
    """Train the autoencoder against fresh AWGN noise at the training SNR.

    Gradients flow through the additive channel unchanged (the noise term is
    constant w.r.t. the parameters), through the power normalization Jacobian,
    and into both network halves, updated jointly by one Adam instance.
    """
    if rng is None:
        rng = RngStream(config.seed, "reliability-train")
    enc_acts = ["relu"] * (len(config.encoder_dims()) - 2) + ["linear"]
    dec_acts = ["relu"] * (len(config.decoder_dims()) - 2) + ["linear"]
    all_words = np.arange(config.alphabet_size)
    for attempt in range(100):
        init_gen = rng.substream(f"init{attempt}").gen
        encoder = Mlp.initialize(config.encoder_dims(), enc_acts, init_gen)
        decoder = Mlp.initialize(config.decoder_dims(), dec_acts, init_gen)
        # For small alphabets a one-hot row can start with every hidden unit
        # dead, pinning that word's codeword forever; redraw until every word
        # has a usable (normalizable) representation.
        raw_all, _ = encoder.forward_onehot(all_words)
        if float(np.min(np.linalg.norm(raw_all, axis=1))) > 1e-9:
            break
    else:
        raise TrainingDivergedError("could not initialize a live encoder")
    params = encoder.parameters + decoder.parameters
    n_enc = len(encoder.parameters)
    adam = AdamState.for_parameters(params, learning_rate=config.learning_rate)
    data_gen = rng.substream("data").gen

    n_power = float(config.n)
    sigma = math.sqrt(snr_to_variance(config.snr_db))
    batches = config.messages_per_epoch // config.batch_size
    loss_trace: list[float] = []
    for epoch in range(config.epochs):
        epoch_loss = 0.0
        for _ in range(batches):
            words = data_gen.integers(0, config.alphabet_size, size=config.batch_size)
            raw, enc_cache = encoder.forward_onehot(words)
            x = normalize_power(raw, n_power)
            y = x + sigma * data_gen.standard_normal(x.shape)
            logits, dec_cache = decoder.forward(y)
            losses, grad_logits = softmax_xent(logits, words)
            loss = float(losses.mean())
            if not math.isfinite(loss):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}: {loss}"
                )
            epoch_loss += loss
            grad_logits /= config.batch_size
            dec_grads, grad_y = decoder.backward(dec_cache, grad_logits)
            grad_raw = normalize_power_backward(raw, grad_y, n_power)
            enc_grads, _ = encoder.backward(enc_cache, grad_raw)
            adam.step(params, enc_grads + dec_grads)
        loss_trace.append(epoch_loss / batches)
    return ReliabilityCode(encoder, decoder, config, loss_trace)


@dataclass(frozen=True)
class PeEstimate:
    """Monte Carlo error-rate estimate with a 95% Wilson confidence interval."""

    estimate: float
    ci_low: float
    ci_high: float
    errors: int
    trials: int


def wilson_interval(errors: int, trials: int, z: float = 1.959964) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


def estimate_pe0(
    code: ReliabilityCode,
    snr_db: float,
    trials: int,
    rng: RngStream,
    batch_size: int = 20_000,
) -> PeEstimate:
    """P[decode0(Y) != V] under uniform V, estimated over `trials` codewords.

    Trials run in shards with independent labeled substreams and exact
    integer error-count reduction, so shard layout never changes the answer
    for a fixed (seed, label, batch_size).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    spec = GaussianSpec.from_snr_db(snr_db)
    errors = 0
    done = 0
    shard = 0
    while done < trials:
        count = min(batch_size, trials - done)
        gen = rng.substream(f"pe0-shard{shard}").gen
        words = gen.integers(0, code.config.alphabet_size, size=count)
        x = code.encode_words(words)
        y = x + math.sqrt(spec.variance) * gen.standard_normal(x.shape)
        decoded = code.decode_words(y)
        errors += int(np.sum(decoded != words))
        done += count
        shard += 1
    low, high = wilson_interval(errors, trials)
    return PeEstimate(errors / trials, low, high, errors, trials)
