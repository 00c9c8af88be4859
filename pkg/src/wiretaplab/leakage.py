"""Neural estimation of the leakage I(M; Z^n) from channel samples.

A statistics network T is trained by gradient ascent on the Donsker-Varadhan
lower bound

    I(M; Z^n) >= E_joint[T(m, z)] - log E_product[exp T(m, z)],

with joint samples drawn by encoding uniform messages through the wiretap
code and product samples obtained by permuting the observations against the
messages.  Internal values are in nats; reported values are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import AvcChannel, GaussianSpec, RngStream
from .neural import AdamState, Mlp
from .secrecy import WiretapCode, encode_batch

__all__ = [
    "MineConfig",
    "LeakageEstimate",
    "MineDivergenceError",
    "sample_joint",
    "make_joint_sampler",
    "shuffle_marginal",
    "smooth_trace",
    "mine_estimate",
]


@dataclass(frozen=True)
class MineConfig:
    """Statistics-network architecture and training budget.

    Defaults are the full evaluation profile (4 hidden layers of 400, 10,000
    epochs of 20,000 messages in batches of 2,500); `fast_profile` and
    `search_profile` trim the budget for CI and per-seed ranking.
    """

    input_dim: int  # k + n
    hidden_layers: int = 4
    width: int = 400
    learning_rate: float = 1e-3
    epochs: int = 10_000
    messages_per_epoch: int = 20_000
    batch_size: int = 2_500
    window: int = 100
    ema_rate: float = 0.99
    tail_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self) -> None:
        if self.input_dim < 1:
            raise ValueError("input_dim must be >= 1")
        if self.messages_per_epoch % self.batch_size != 0:
            raise ValueError("batch_size must divide messages_per_epoch")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if not 0.0 < self.tail_fraction <= 1.0:
            raise ValueError("tail_fraction must be in (0, 1]")
        if self.epochs < self.window:
            raise ValueError("need at least `window` epochs to smooth the trace")

    def network_dims(self) -> list[int]:
        return [self.input_dim, *([self.width] * self.hidden_layers), 1]

    @classmethod
    def fast_profile(cls, input_dim: int, **overrides) -> "MineConfig":
        """CI-scale estimator: small network, short run."""
        defaults = dict(
            hidden_layers=2,
            width=100,
            epochs=1_500,
            messages_per_epoch=4_000,
            batch_size=500,
        )
        defaults.update(overrides)
        return cls(input_dim=input_dim, **defaults)

    @classmethod
    def search_profile(cls, input_dim: int, **overrides) -> "MineConfig":
        """Reduced budget for per-seed ranking (2,000 epochs)."""
        defaults = dict(
            hidden_layers=2,
            width=128,
            epochs=2_000,
            messages_per_epoch=5_000,
            batch_size=1_000,
        )
        defaults.update(overrides)
        return cls(input_dim=input_dim, **defaults)

    @classmethod
    def paper_profile(cls, input_dim: int, **overrides) -> "MineConfig":
        return cls(input_dim=input_dim, **overrides)


@dataclass
class LeakageEstimate:
    """Per-epoch estimate trace plus the reported scalar, in bits.

    The reported value is the maximum of the `window`-sample moving average
    over the final `tail_fraction` of epochs: a stable-and-conservative
    statistic for a lower-bound estimator (it errs toward reporting more
    leakage, never less).
    """

    raw_trace_nats: np.ndarray
    window: int
    tail_fraction: float
    metadata: dict = field(default_factory=dict)

    @property
    def smoothed_nats(self) -> np.ndarray:
        return smooth_trace(self.raw_trace_nats, self.window)

    @property
    def reported_bits(self) -> float:
        smoothed = self.smoothed_nats
        tail_start = int(math.floor(len(smoothed) * (1.0 - self.tail_fraction)))
        tail = smoothed[min(tail_start, len(smoothed) - 1):]
        return float(tail.max() / math.log(2.0))


class MineDivergenceError(RuntimeError):
    """Objective became non-finite; carries the last finite trace prefix."""

    def __init__(self, message: str, partial: LeakageEstimate | None) -> None:
        super().__init__(message)
        self.partial = partial


def sample_joint(
    code: WiretapCode,
    eve: GaussianSpec | AvcChannel,
    count: int,
    rng: RngStream,
) -> tuple[np.ndarray, np.ndarray]:
    """(message bits, eavesdropper observation) pairs under uniform messages.

    Messages are returned as `count` rows of k raw bits in {0, 1} (the
    estimator input convention), observations as rows of n reals.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    messages = rng.gen.integers(0, 1 << code.k, size=count)
    x, _ = encode_batch(code, messages, rng)
    if isinstance(eve, AvcChannel):
        z = eve.transmit(x)
    else:
        z = x + math.sqrt(eve.variance) * rng.gen.standard_normal(x.shape)
    shifts = np.arange(code.k - 1, -1, -1, dtype=np.uint32)
    m_bits = ((messages[:, None] >> shifts) & 1).astype(np.float64)
    return m_bits, z


def make_joint_sampler(
    code: WiretapCode, eve: GaussianSpec | AvcChannel, rng: RngStream
):
    """Callable(count) -> (m_bits, z) drawing fresh samples each call."""

    def sampler(count: int) -> tuple[np.ndarray, np.ndarray]:
        return sample_joint(code, eve, count, rng)

    return sampler


def shuffle_marginal(
    m_bits: np.ndarray, z: np.ndarray, gen: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Product-distribution pairs: observations permuted against messages.

    The permutation is uniform (derangement not required), so the multiset of
    observations is preserved exactly.
    """
    if len(m_bits) < 2:
        raise ValueError("need at least 2 pairs to form product samples")
    perm = gen.permutation(len(z))
    return m_bits, z[perm]


def smooth_trace(trace: np.ndarray, window: int = 100) -> np.ndarray:
    """Arithmetic moving average; output length len(trace) - window + 1."""
    trace = np.asarray(trace, dtype=np.float64)
    if window < 1:
        raise ValueError("window must be >= 1")
    if len(trace) < window:
        raise ValueError(f"trace of length {len(trace)} is shorter than window {window}")
    if window == 1:
        return trace.copy()
    cumsum = np.concatenate(([0.0], np.cumsum(trace)))
    return (cumsum[window:] - cumsum[:-window]) / window


def mine_estimate(sample_source, config: MineConfig) -> LeakageEstimate:
    """Train the statistics network and return the leakage estimate.

    `sample_source(count)` must yield fresh (message bits, observation)
    joint samples; each epoch draws `messages_per_epoch` of them, forms
    product samples by permutation, and takes one Adam step per batch.  The
    gradient of the log-partition term uses an exponential moving average of
    the partition estimate (rate `ema_rate`) while the recorded trace uses
    the uncorrected batch statistic; the per-epoch trace entry is the mean of
    the batch statistics within that epoch.
    """
    rng = RngStream(config.seed, "mine")
    net = Mlp.initialize(
        config.network_dims(),
        ["relu"] * config.hidden_layers + ["linear"],
        rng.substream("init").gen,
    )
    params = net.parameters
    adam = AdamState.for_parameters(params, learning_rate=config.learning_rate)
    shuffle_gen = rng.substream("shuffle").gen
    batches = config.messages_per_epoch // config.batch_size
    bsz = config.batch_size
    log_ema: float | None = None
    trace: list[float] = []
    for epoch in range(config.epochs):
        m_bits, z = sample_source(config.messages_per_epoch)
        if m_bits.shape[1] + z.shape[1] != config.input_dim:
            raise ValueError(
                f"sample dims {m_bits.shape[1]}+{z.shape[1]} != input_dim"
                f" {config.input_dim}"
            )
        m_marg, z_marg = shuffle_marginal(m_bits, z, shuffle_gen)
        joint = np.hstack((m_bits, z))
        product = np.hstack((m_marg, z_marg))
        epoch_sum = 0.0
        for b in range(batches):
            rows = slice(b * bsz, (b + 1) * bsz)
            stacked = np.vstack((joint[rows], product[rows]))
            t_all, cache = net.forward(stacked)
            t_joint = t_all[:bsz, 0]
            t_prod = t_all[bsz:, 0]
            # log mean exp of the product-side scores, stabilized.
            t_max = float(t_prod.max())
            log_mean_exp = t_max + math.log(np.mean(np.exp(t_prod - t_max)))
            batch_value = float(t_joint.mean()) - log_mean_exp
            if not math.isfinite(batch_value):
                partial = None
                if len(trace) >= config.window:
                    partial = LeakageEstimate(
                        np.array(trace), config.window, config.tail_fraction
                    )
                raise MineDivergenceError(
                    f"non-finite estimate at epoch {epoch}", partial
                )
            epoch_sum += batch_value
            # Bias-corrected ascent direction: the partition gradient is
            # normalized by an EMA of the partition estimate, not the batch's.
            if log_ema is None:
                log_ema = log_mean_exp
            else:
                log_ema = float(
                    np.logaddexp(
                        math.log(config.ema_rate) + log_ema,
                        math.log(1.0 - config.ema_rate) + log_mean_exp,
                    )
                )
            grad_t = np.empty((2 * bsz, 1))
            grad_t[:bsz, 0] = -1.0 / bsz
            grad_t[bsz:, 0] = np.exp(t_prod - log_ema) / bsz
            grads, _ = net.backward(cache, grad_t)
            adam.step(params, grads)
        trace.append(epoch_sum / batches)
    return LeakageEstimate(
        np.array(trace),
        config.window,
        config.tail_fraction,
        metadata={"config": config},
    )
