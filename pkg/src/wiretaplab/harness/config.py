"""Experiment configuration: flat key-value text files plus CLI overrides.

The file format is one `key = value` pair per line, `#` comments, blank lines
ignored.  Keys are grouped by module prefix (train.*, mine.*, avc.*, ...) but
the file itself is flat and diff-friendly.  Lists are comma-separated.  CLI
flags (--seed, --profile, --out) override file values.
"""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

__all__ = ["ExperimentConfig", "parse_config_file", "config_hash", "CONFIG_KEYS"]


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a pipeline stage needs, with desk-scale defaults."""

    experiment: str = "fig4"
    n_list: tuple[int, ...] = (4, 6, 8)
    k_list: tuple[int, ...] = (1, 2)
    snr_b_db: float = 9.0
    snr_e_db: float = -5.0
    compound_b_list: tuple[float, ...] = (9.0, 10.0)
    compound_e_list: tuple[float, ...] = (-8.0, -6.5, -5.0)
    trials: int = 100_000
    seed: int = 0
    out_dir: str = "runs"
    plots: bool = True
    # training (reliability layer)
    train_profile: str = "fast"  # fast | paper
    train_epochs: int = 0  # 0 -> profile default
    train_messages_per_epoch: int = 0
    train_batch_size: int = 0
    # leakage estimator
    mine_profile: str = "fast"  # fast | search | paper
    mine_epochs: int = 0
    mine_width: int = 0
    mine_hidden_layers: int = 0
    mine_messages_per_epoch: int = 0
    mine_batch_size: int = 0
    mine_window: int = 100
    # seed search
    search_extra_seeds: int = 8
    # bounds
    eps: float = 1e-3
    delta: float = 1e-3
    mc_samples: int = 1_000_000
    bounds_n_list: tuple[int, ...] = (4, 8, 12, 16)
    # arbitrarily varying channel settings
    avc_mode: str = "per-codeword-block"
    avc_block_size: int = 50_000
    avc_pe_low_db: float = 9.0
    avc_pe_high_db: float = 12.0
    avc_pe_step_db: float = 0.1
    avc_leak_low_db: float = -8.0
    avc_leak_high_db: float = -5.0
    avc_leak_step_db: float = 0.01
    avc_alternate_every: int = 5000

    def stage_label(self, *parts) -> str:
        return "/".join(str(p) for p in parts)


# config-file key -> dataclass field
CONFIG_KEYS: dict[str, str] = {
    "experiment": "experiment",
    "n_list": "n_list",
    "k_list": "k_list",
    "snr_b_db": "snr_b_db",
    "snr_e_db": "snr_e_db",
    "compound_b_list": "compound_b_list",
    "compound_e_list": "compound_e_list",
    "trials": "trials",
    "seed": "seed",
    "out_dir": "out_dir",
    "plots": "plots",
    "train.profile": "train_profile",
    "train.epochs": "train_epochs",
    "train.messages_per_epoch": "train_messages_per_epoch",
    "train.batch_size": "train_batch_size",
    "mine.profile": "mine_profile",
    "mine.epochs": "mine_epochs",
    "mine.width": "mine_width",
    "mine.hidden_layers": "mine_hidden_layers",
    "mine.messages_per_epoch": "mine_messages_per_epoch",
    "mine.batch_size": "mine_batch_size",
    "mine.window": "mine_window",
    "search.extra_seeds": "search_extra_seeds",
    "bounds.eps": "eps",
    "bounds.delta": "delta",
    "bounds.mc_samples": "mc_samples",
    "bounds.n_list": "bounds_n_list",
    "avc.mode": "avc_mode",
    "avc.block_size": "avc_block_size",
    "avc.pe_low_db": "avc_pe_low_db",
    "avc.pe_high_db": "avc_pe_high_db",
    "avc.pe_step_db": "avc_pe_step_db",
    "avc.leak_low_db": "avc_leak_low_db",
    "avc.leak_high_db": "avc_leak_high_db",
    "avc.leak_step_db": "avc_leak_step_db",
    "avc.alternate_every": "avc_alternate_every",
}

_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _parse_value(field_name: str, text: str):
    kind = _FIELD_TYPES[field_name]
    text = text.strip()
    if kind == "bool":
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{field_name}: expected a boolean, got {text!r}")
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    if kind == "tuple[int, ...]":
        return tuple(int(t) for t in text.split(",") if t.strip())
    if kind == "tuple[float, ...]":
        return tuple(float(t) for t in text.split(",") if t.strip())
    return text


def parse_config_file(path: str | Path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Read `key = value` lines into an ExperimentConfig."""
    cfg = base or ExperimentConfig()
    overrides = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        field_name = CONFIG_KEYS[key]
        overrides[field_name] = _parse_value(field_name, value)
    return replace(cfg, **overrides)


def config_hash(cfg: ExperimentConfig) -> str:
    """Stable content hash of a configuration snapshot."""
    payload = repr(sorted(asdict(cfg).items())).encode()
    return hashlib.sha256(payload).hexdigest()[:16]
