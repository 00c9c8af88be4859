"""Gaussian wiretap channel simulation: fixed, compound, and arbitrarily varying.

All noise is zero-mean Gaussian added per symbol.  SNR values are in dB and
map to noise variances as variance = 10^(-snr_db/10) with unit signal power.
Randomness flows through named `RngStream`s so every simulation is exactly
reproducible from (seed, label).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RngStream",
    "GaussianSpec",
    "UncertaintySet",
    "AvcSchedule",
    "AvcChannel",
    "snr_to_variance",
    "transmit_awgn",
    "transmit_avc",
]


def _derive_seed(seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


class RngStream:
    """Deterministic random stream identified by (seed, label).

    Identical (seed, label) pairs produce identical sample sequences; disjoint
    labels give independent streams, one per Monte Carlo shard or worker.
    """

    def __init__(self, seed: int, label: str = "") -> None:
        self.seed = int(seed)
        self.label = label
        self.gen = np.random.default_rng(_derive_seed(self.seed, label))

    def substream(self, label: str) -> "RngStream":
        return RngStream(self.seed, f"{self.label}/{label}")

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, label={self.label!r})"


def snr_to_variance(snr_db: float) -> float:
    """Noise variance 10^(-snr_db/10) for unit transmit power."""
    if not np.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite, got {snr_db}")
    return float(10.0 ** (-snr_db / 10.0))


@dataclass(frozen=True)
class GaussianSpec:
    """Fixed-variance Gaussian noise description.

    The two fields are redundant by construction (variance = 10^(-snr/10)
    at unit power) and validated against each other.
    """

    snr_db: float
    variance: float

    def __post_init__(self) -> None:
        if self.variance <= 0:
            raise ValueError("variance must be positive")
        expected = snr_to_variance(self.snr_db)
        if not math.isclose(self.variance, expected, rel_tol=1e-9):
            raise ValueError(
                f"variance {self.variance} does not match snr {self.snr_db} dB"
                f" (expected {expected})"
            )

    @classmethod
    def from_snr_db(cls, snr_db: float) -> "GaussianSpec":
        return cls(snr_db=snr_db, variance=snr_to_variance(snr_db))

    @classmethod
    def from_variance(cls, variance: float) -> "GaussianSpec":
        return cls(snr_db=-10.0 * math.log10(variance), variance=variance)


@dataclass(frozen=True)
class UncertaintySet:
    """Finite set of candidate SNRs for one terminal of a compound/AVC model.

    For the legitimate receiver the design point is the *worst* SNR (largest
    variance); for the eavesdropper it is the *best* SNR (smallest variance).
    """

    snr_values_db: tuple[float, ...]
    role: str = "eavesdropper"  # "legitimate" or "eavesdropper"

    def __post_init__(self) -> None:
        if not self.snr_values_db:
            raise ValueError("uncertainty set must be non-empty")
        if self.role not in ("legitimate", "eavesdropper"):
            raise ValueError(f"unknown role {self.role!r}")
        object.__setattr__(self, "snr_values_db", tuple(self.snr_values_db))

    @classmethod
    def from_range(
        cls, low_db: float, high_db: float, step_db: float, role: str
    ) -> "UncertaintySet":
        count = int(round((high_db - low_db) / step_db)) + 1
        values = tuple(low_db + i * step_db for i in range(count))
        return cls(values, role)

    @property
    def variances(self) -> np.ndarray:
        return np.array([snr_to_variance(s) for s in self.snr_values_db])

    @property
    def design_snr_db(self) -> float:
        """Worst SNR for the legitimate role, best SNR for the eavesdropper."""
        if self.role == "legitimate":
            return min(self.snr_values_db)
        return max(self.snr_values_db)

    @property
    def design_index(self) -> int:
        return self.snr_values_db.index(self.design_snr_db)


@dataclass(frozen=True)
class AvcSchedule:
    """How per-symbol noise variances are assigned across codewords.

    mode "fixed": one per-symbol variance vector drawn at stream start and
    held for the whole transmission.  mode "per-codeword-block": redrawn every
    `block_size` codewords.  mode "per-symbol-uniform": redrawn every codeword.
    """

    mode: str = "per-codeword-block"
    block_size: int = 50_000

    def __post_init__(self) -> None:
        if self.mode not in ("fixed", "per-codeword-block", "per-symbol-uniform"):
            raise ValueError(f"unknown schedule mode {self.mode!r}")
        if self.mode == "per-codeword-block" and self.block_size < 1:
            raise ValueError("block_size must be >= 1")


def _check_power(x: np.ndarray, power_budget: float) -> None:
    n = x.shape[-1]
    energy = np.sum(np.square(x), axis=-1)
    if np.any(energy > n * power_budget + 1e-9):
        raise ValueError("codeword violates the power-ball constraint")


def transmit_awgn(
    x: np.ndarray,
    spec: GaussianSpec,
    rng: RngStream,
    power_budget: float = 1.0,
    check_power: bool = True,
) -> np.ndarray:
    """x plus i.i.d. zero-mean Gaussian noise of the given variance.

    Accepts a single codeword (n,) or a batch (batch, n).
    """
    x = np.asarray(x, dtype=np.float64)
    if check_power:
        _check_power(x, power_budget)
    noise = rng.gen.standard_normal(x.shape) * np.sqrt(spec.variance)
    return x + noise


class AvcChannel:
    """Stateful arbitrarily-varying channel: counts codewords across calls.

    The per-symbol variance vector is drawn uniformly from the uncertainty
    set and refreshed according to the schedule; every drawn vector is kept
    in `variance_log` (list of (codeword_index, variance_vector)) for audit.
    """

    def __init__(
        self,
        uset: UncertaintySet,
        schedule: AvcSchedule,
        n: int,
        rng: RngStream,
    ) -> None:
        if not uset.snr_values_db:
            raise ValueError("uncertainty set must be non-empty")
        self.uset = uset
        self.schedule = schedule
        self.n = n
        self.rng = rng
        self.codewords_sent = 0
        self.variance_log: list[tuple[int, np.ndarray]] = []
        self._current: np.ndarray | None = None

    def _draw(self) -> np.ndarray:
        variances = self.uset.variances
        idx = self.rng.gen.integers(0, len(variances), size=self.n)
        drawn = variances[idx]
        self.variance_log.append((self.codewords_sent, drawn))
        return drawn

    def _block_length(self) -> int:
        if self.schedule.mode == "fixed":
            return 1 << 62
        if self.schedule.mode == "per-symbol-uniform":
            return 1
        return self.schedule.block_size

    def transmit(self, x: np.ndarray) -> np.ndarray:
        """Send one codeword (n,) or a batch (batch, n) of consecutive codewords."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.n:
            raise ValueError(f"expected codewords of length {self.n}")
        block = self._block_length()
        out = np.empty_like(x)
        start = 0
        while start < x.shape[0]:
            if self._current is None or self.codewords_sent % block == 0:
                self._current = self._draw()
            # Codewords remaining in the current variance block.
            room = block - (self.codewords_sent % block) if block > 1 else 1
            stop = min(start + room, x.shape[0])
            chunk = x[start:stop]
            noise = self.rng.gen.standard_normal(chunk.shape) * np.sqrt(self._current)
            out[start:stop] = chunk + noise
            self.codewords_sent += stop - start
            start = stop
        return out


def transmit_avc(
    x: np.ndarray,
    uset: UncertaintySet,
    schedule: AvcSchedule,
    rng: RngStream,
) -> tuple[np.ndarray, list[tuple[int, np.ndarray]]]:
    """One-shot AVC transmission of a codeword or batch.

    Returns (received, variance_log).  For state that persists across calls
    (e.g. variance blocks spanning many batches) use `AvcChannel` directly.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    chan = AvcChannel(uset, schedule, n, rng)
    y = chan.transmit(x)
    if x.ndim == 1:
        y = y[0]
    return y, chan.variance_log
