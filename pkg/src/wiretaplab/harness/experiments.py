"""Experiment pipelines: train, evaluate, search seeds, estimate leakage,
evaluate bounds, and chain them into per-figure reproductions.

Every stage derives its randomness from the global seed through labeled
streams, writes deterministic CSV artifacts (stable ordering, fixed float
formatting), and records everything it produced in the run manifest.
"""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path

import numpy as np

from ..bounds import BoundConfig, channel_M, secrecy_achievability, secrecy_converse
from ..channel import (
    AvcChannel,
    AvcSchedule,
    GaussianSpec,
    RngStream,
    UncertaintySet,
    snr_to_variance,
)
from ..gf2q import FieldSpec
from ..leakage import LeakageEstimate, MineConfig, make_joint_sampler, mine_estimate
from ..neural import load_mlp, save_mlp
from ..reliability import (
    ReliabilityCode,
    ReliabilityConfig,
    default_q,
    estimate_pe0,
    wilson_interval,
)
from ..reliability import train as train_reliability
from ..secrecy import (
    WiretapCode,
    decode_batch,
    default_seed_candidates,
    encode_batch,
    estimate_pe,
    seed_search,
)
from .config import ExperimentConfig
from .manifest import RunManifest, file_sha256

__all__ = [
    "cmd_train",
    "cmd_eval",
    "cmd_seed_search",
    "cmd_leakage",
    "cmd_bounds",
    "cmd_rates",
    "cmd_reproduce",
    "FIGURE_TAGS",
    "write_csv",
]

FIGURE_TAGS = ("fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9")

EVAL_HEADER = [
    "n", "q", "k", "snr_db", "metric", "estimate", "ci_low", "ci_high",
    "trials", "uncertainty",
]
SEEDS_HEADER = ["n", "q", "k", "seed_binary_string", "leakage_bits", "mine_profile"]
LEAKAGE_HEADER = [
    "n", "q", "k", "snr_e_db", "schedule", "leakage_bits", "tail_sd_bits",
    "window", "epochs", "uncertainty",
]
TRACE_HEADER = ["epoch", "raw_estimate_nats", "smoothed_nats"]
BOUNDS_HEADER = [
    "n", "eps", "delta", "snr_b_db", "snr_e_db", "bound_type",
    "value_bits_per_use", "stderr",
]
RATES_HEADER = [
    "n", "q", "rate_bits_per_use", "pe0", "ci_low", "ci_high",
    "normal_approx_rate", "uncertainty",
]


def _fmt(x) -> str:
    """Deterministic scalar formatting for CSV cells."""
    if isinstance(x, float):
        return format(x, ".10g")
    return str(x)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _maybe_plot(cfg: ExperimentConfig, fn_name: str, *args) -> list[Path]:
    if not cfg.plots:
        return []
    from .. import plotting

    return [getattr(plotting, fn_name)(*args)]


def reliability_config(cfg: ExperimentConfig, n: int) -> ReliabilityConfig:
    base = (
        ReliabilityConfig.fast_profile(n, snr_db=cfg.snr_b_db, seed=cfg.seed)
        if cfg.train_profile == "fast"
        else ReliabilityConfig.paper_profile(n, snr_db=cfg.snr_b_db, seed=cfg.seed)
    )
    overrides = {}
    if cfg.train_epochs:
        overrides["epochs"] = cfg.train_epochs
    if cfg.train_messages_per_epoch:
        overrides["messages_per_epoch"] = cfg.train_messages_per_epoch
    if cfg.train_batch_size:
        overrides["batch_size"] = cfg.train_batch_size
    return dataclasses.replace(base, **overrides) if overrides else base


def mine_config(cfg: ExperimentConfig, input_dim: int, role: str = "full") -> MineConfig:
    """`role` is "full" for final estimates, "search" for per-seed ranking."""
    profile = cfg.mine_profile
    if role == "search" and profile == "paper":
        profile = "search"  # two-stage budget: reduced ranking, full winner
    maker = {
        "fast": MineConfig.fast_profile,
        "search": MineConfig.search_profile,
        "paper": MineConfig.paper_profile,
    }[profile]
    base = maker(input_dim, seed=cfg.seed, window=cfg.mine_window)
    overrides = {}
    if cfg.mine_epochs:
        overrides["epochs"] = cfg.mine_epochs
    if cfg.mine_width:
        overrides["width"] = cfg.mine_width
    if cfg.mine_hidden_layers:
        overrides["hidden_layers"] = cfg.mine_hidden_layers
    if cfg.mine_messages_per_epoch:
        overrides["messages_per_epoch"] = cfg.mine_messages_per_epoch
    if cfg.mine_batch_size:
        overrides["batch_size"] = cfg.mine_batch_size
    return dataclasses.replace(base, **overrides) if overrides else base


def _model_stem(cfg: ExperimentConfig, n: int) -> str:
    return f"n{n}_q{default_q(n)}_{cfg.train_profile}_seed{cfg.seed}"


def persist_reliability(code: ReliabilityCode, root: Path, stem: str) -> list[Path]:
    models = root / "models"
    models.mkdir(parents=True, exist_ok=True)
    enc = models / f"{stem}.enc.mlp"
    dec = models / f"{stem}.dec.mlp"
    save_mlp(code.encoder, enc)
    save_mlp(code.decoder, dec)
    meta = models / f"{stem}.meta.json"
    rc = code.config
    meta.write_text(
        json.dumps(
            {
                "n": rc.n,
                "q": rc.q,
                "snr_db": rc.snr_db,
                "learning_rate": rc.learning_rate,
                "epochs": rc.epochs,
                "messages_per_epoch": rc.messages_per_epoch,
                "batch_size": rc.batch_size,
                "seed": rc.seed,
                "final_loss": code.loss_trace[-1] if code.loss_trace else None,
                "encoder_sha256": file_sha256(enc),
                "decoder_sha256": file_sha256(dec),
                "model_format": "MLP64LE v1",
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    return [enc, dec, meta]


def load_reliability(root: Path, cfg: ExperimentConfig, n: int) -> ReliabilityCode | None:
    stem = _model_stem(cfg, n)
    enc = root / "models" / f"{stem}.enc.mlp"
    dec = root / "models" / f"{stem}.dec.mlp"
    if not (enc.exists() and dec.exists()):
        return None
    return ReliabilityCode(load_mlp(enc), load_mlp(dec), reliability_config(cfg, n))


def _ensure_code(
    root: Path, cfg: ExperimentConfig, n: int, manifest: RunManifest
) -> ReliabilityCode:
    code = load_reliability(root, cfg, n)
    if code is not None:
        return code
    with manifest.timed_stage(f"train/n{n}"):
        code = train_reliability(reliability_config(cfg, n))
    for path in persist_reliability(code, root, _model_stem(cfg, n)):
        manifest.add_artifact(root, path)
    return code


def cmd_train(cfg: ExperimentConfig, root: Path, manifest: RunManifest | None = None) -> RunManifest:
    """Train and persist one reliability code per blocklength."""
    root.mkdir(parents=True, exist_ok=True)
    manifest = manifest or RunManifest.for_config(cfg)
    for n in cfg.n_list:
        _ensure_code(root, cfg, n, manifest)
    manifest.write(root)
    return manifest


def _seed_for(root: Path, cfg: ExperimentConfig, n: int, k: int) -> int:
    """Seed from a prior seed-search artifact when present, else the first
    default candidate for (n, k)."""
    seeds_csv = root / "seeds.csv"
    q = default_q(n)
    if seeds_csv.exists():
        for line in seeds_csv.read_text().splitlines()[1:]:
            cells = line.split(",")
            if int(cells[0]) == n and int(cells[2]) == k:
                return int(cells[3], 2)
    return default_seed_candidates(
        n, k, q, RngStream(cfg.seed, f"seed-pick/{n}/{k}"), extra=1
    )[0]


def cmd_eval(cfg: ExperimentConfig, root: Path, manifest: RunManifest | None = None) -> RunManifest:
    """P_e(e0,d0) and P_e(e,d) per (n, k, SNR), with Wilson intervals.

    Compound experiments (fig6) sweep the whole legitimate uncertainty set;
    everything else evaluates at the single design SNR.
    """
    snrs = cfg.compound_b_list if cfg.experiment == "fig6" else (cfg.snr_b_db,)
    if not snrs:
        raise ValueError("no evaluation SNRs configured (empty compound set)")
    root.mkdir(parents=True, exist_ok=True)
    manifest = manifest or RunManifest.for_config(cfg)
    rows = []
    for n in cfg.n_list:
        code = _ensure_code(root, cfg, n, manifest)
        q = code.q
        for snr in snrs:
            with manifest.timed_stage(f"eval/pe0/n{n}/snr{snr}"):
                pe0 = estimate_pe0(
                    code, snr, cfg.trials, RngStream(cfg.seed, f"eval/pe0/{n}/{snr}")
                )
            rows.append(
                [n, q, "", snr, "pe0", pe0.estimate, pe0.ci_low, pe0.ci_high,
                 pe0.trials, "wilson95"]
            )
            for k in cfg.k_list:
                if k > q:
                    continue
                wcode = WiretapCode(code, _seed_for(root, cfg, n, k), k, FieldSpec(q))
                with manifest.timed_stage(f"eval/pe/n{n}/k{k}/snr{snr}"):
                    pe = estimate_pe(
                        wcode, snr, cfg.trials,
                        RngStream(cfg.seed, f"eval/pe/{n}/{k}/{snr}"),
                    )
                rows.append(
                    [n, q, k, snr, "pe", pe.estimate, pe.ci_low, pe.ci_high,
                     pe.trials, "wilson95"]
                )
    out = root / "eval.csv"
    write_csv(out, EVAL_HEADER, rows)
    manifest.add_artifact(root, out)
    for png in _maybe_plot(cfg, "plot_error_rates", out, root / "eval.png"):
        manifest.add_artifact(root, png)
    manifest.write(root)
    return manifest


def cmd_seed_search(cfg: ExperimentConfig, root: Path, manifest: RunManifest | None = None) -> RunManifest:
    """Rank candidate seeds per (n, k) by estimated leakage at the design SNR."""
    root.mkdir(parents=True, exist_ok=True)
    manifest = manifest or RunManifest.for_config(cfg)
    rows = []
    for n in cfg.n_list:
        code = _ensure_code(root, cfg, n, manifest)
        q = code.q
        for k in cfg.k_list:
            if k > q:
                continue
            rng = RngStream(cfg.seed, f"seed-search/{n}/{k}")
            candidates = default_seed_candidates(
                n, k, q, rng.substream("candidates"), extra=cfg.search_extra_seeds
            )
            with manifest.timed_stage(f"seed-search/n{n}/k{k}"):
                result = seed_search(
                    code, k, cfg.snr_e_db, candidates,
                    mine_config(cfg, k + n, role="search"),
                    rng,
                    full_config=mine_config(cfg, k + n, role="full"),
                    field=FieldSpec(q),
                )
            rows.append(
                [n, q, k, format(result.best_seed, f"0{q}b"),
                 result.best_leakage_bits, cfg.mine_profile]
            )
    out = root / "seeds.csv"
    write_csv(out, SEEDS_HEADER, rows)
    manifest.add_artifact(root, out)
    manifest.write(root)
    return manifest


def _write_trace(root: Path, name: str, estimate: LeakageEstimate) -> Path:
    raw = estimate.raw_trace_nats
    smoothed = estimate.smoothed_nats
    window = estimate.window
    rows: list[list] = []
    for i, value in enumerate(raw, start=1):
        smoothed_cell = float(smoothed[i - window]) if i >= window else ""
        rows.append([i, float(value), smoothed_cell])
    traces = root / "traces"
    traces.mkdir(parents=True, exist_ok=True)
    path = traces / name
    write_csv(path, TRACE_HEADER, rows)
    return path


def _tail_sd_bits(estimate: LeakageEstimate) -> float:
    smoothed = estimate.smoothed_nats
    start = int(math.floor(len(smoothed) * (1.0 - estimate.tail_fraction)))
    tail = smoothed[min(start, len(smoothed) - 1):]
    return float(np.std(tail) / math.log(2.0))


def cmd_leakage(cfg: ExperimentConfig, root: Path, manifest: RunManifest | None = None) -> RunManifest:
    """Leakage vs blocklength (plus per-epoch traces) at the configured
    eavesdropper SNRs; compound experiments iterate the whole SNR set."""
    root.mkdir(parents=True, exist_ok=True)
    manifest = manifest or RunManifest.for_config(cfg)
    snrs = cfg.compound_e_list if cfg.experiment == "fig7" else (cfg.snr_e_db,)
    rows: list[list] = []
    for n in cfg.n_list:
        code = _ensure_code(root, cfg, n, manifest)
        for k in cfg.k_list:
            if k > code.q:
                continue
            wcode = WiretapCode(code, _seed_for(root, cfg, n, k), k, FieldSpec(code.q))
            for snr in snrs:
                label = f"n{n}/k{k}/snr{snr}"
                sampler = make_joint_sampler(
                    wcode,
                    GaussianSpec.from_snr_db(snr),
                    RngStream(cfg.seed, f"leakage/{label}"),
                )
                with manifest.timed_stage(f"leakage/{label}"):
                    estimate = mine_estimate(sampler, mine_config(cfg, k + n))
                trace = _write_trace(
                    root, f"trace_{label.replace('/', '_')}.csv", estimate
                )
                manifest.add_artifact(root, trace)
                rows.append(
                    [n, code.q, k, snr, "fixed", estimate.reported_bits,
                     _tail_sd_bits(estimate), estimate.window,
                     len(estimate.raw_trace_nats), "tail-sd"]
                )
    out = root / "leakage.csv"
    write_csv(out, LEAKAGE_HEADER, rows)
    manifest.add_artifact(root, out)
    summary = root / "leakage_summary.json"
    summary.write_text(
        json.dumps(
            {
                "config_digest": manifest.config_digest,
                "rows": [dict(zip(LEAKAGE_HEADER, r)) for r in rows],
            },
            indent=2, sort_keys=True, default=str,
        )
        + "\n"
    )
    manifest.add_artifact(root, summary)
    for png in _maybe_plot(cfg, "plot_leakage", out, root / "leakage.png"):
        manifest.add_artifact(root, png)
    manifest.write(root)
    return manifest


def _measured_points(root: Path) -> list[list]:
    """Measured (k/n, eps, leakage) rows assembled from prior artifacts; the
    eps and delta columns carry the measurements, value is the rate k/n."""
    eval_csv = root / "eval.csv"
    leak_csv = root / "leakage.csv"
    if not (eval_csv.exists() and leak_csv.exists()):
        return []
    pe: dict[tuple[int, int], float] = {}
    snr_b: dict[tuple[int, int], float] = {}
    for line in eval_csv.read_text().splitlines()[1:]:
        cells = line.split(",")
        if cells[4] == "pe" and cells[2]:
            key = (int(cells[0]), int(cells[2]))
            pe[key] = float(cells[5])
            snr_b[key] = float(cells[3])
    rows = []
    for line in leak_csv.read_text().splitlines()[1:]:
        cells = line.split(",")
        if not cells[2] or cells[3] == "":
            continue
        key = (int(cells[0]), int(cells[2]))
        if key in pe:
            leakage = max(0.0, float(cells[5]))
            rows.append(
                [key[0], pe[key], leakage, snr_b[key], float(cells[3]),
                 "measured", key[1] / key[0], 0.0]
            )
    return rows


def cmd_bounds(cfg: ExperimentConfig, root: Path, manifest: RunManifest | None = None) -> RunManifest:
    """Achievability and converse rates per blocklength, plus measured points."""
    root.mkdir(parents=True, exist_ok=True)
    manifest = manifest or RunManifest.for_config(cfg)
    rows = []
    for n in cfg.bounds_n_list:
        bcfg = BoundConfig(
            n=n, eps=cfg.eps, delta=cfg.delta,
            snr_b_db=cfg.snr_b_db, snr_e_db=cfg.snr_e_db,
            mc_samples=cfg.mc_samples, seed=cfg.seed,
        )
        with manifest.timed_stage(f"bounds/n{n}"):
            ach = secrecy_achievability(bcfg)
            conv = secrecy_converse(bcfg)
        for result in (ach, conv):
            rows.append(
                [n, cfg.eps, cfg.delta, cfg.snr_b_db, cfg.snr_e_db,
                 result.bound_type, result.rate_bits_per_use, result.stderr]
            )
    rows.extend(_measured_points(root))
    out = root / "bounds.csv"
    write_csv(out, BOUNDS_HEADER, rows)
    manifest.add_artifact(root, out)
    for png in _maybe_plot(cfg, "plot_bounds", out, root / "bounds.png"):
        manifest.add_artifact(root, png)
    manifest.write(root)
    return manifest


def cmd_rates(cfg: ExperimentConfig, root: Path, manifest: RunManifest | None = None) -> RunManifest:
    """Reliability-layer rate q/n next to the normal-approximation rate at
    the measured error probability (the channel-coding comparison)."""
    root.mkdir(parents=True, exist_ok=True)
    manifest = manifest or RunManifest.for_config(cfg)
    rows = []
    for n in cfg.n_list:
        code = _ensure_code(root, cfg, n, manifest)
        with manifest.timed_stage(f"rates/n{n}"):
            pe0 = estimate_pe0(
                code, cfg.snr_b_db, cfg.trials, RngStream(cfg.seed, f"rates/{n}")
            )
        eps = max(pe0.estimate, 1.0 / cfg.trials)  # the quantile needs eps > 0
        rows.append(
            [n, code.q, code.q / n, pe0.estimate, pe0.ci_low, pe0.ci_high,
             channel_M(n, eps, cfg.snr_b_db) / n, "wilson95"]
        )
    out = root / "rates.csv"
    write_csv(out, RATES_HEADER, rows)
    manifest.add_artifact(root, out)
    for png in _maybe_plot(cfg, "plot_rates", out, root / "rates.png"):
        manifest.add_artifact(root, png)
    manifest.write(root)
    return manifest


def _message_bits(messages: np.ndarray, k: int) -> np.ndarray:
    shifts = np.arange(k - 1, -1, -1, dtype=np.uint32)
    return ((messages[:, None] >> shifts) & 1).astype(np.float64)


def _avc_pe(cfg: ExperimentConfig, root: Path, manifest: RunManifest) -> list[Path]:
    """Error rates over an arbitrarily varying legitimate channel: per-symbol
    variances drawn from the configured dB grid, redrawn per block."""
    uset = UncertaintySet.from_range(
        cfg.avc_pe_low_db, cfg.avc_pe_high_db, cfg.avc_pe_step_db, "legitimate"
    )
    sched = AvcSchedule(cfg.avc_mode, cfg.avc_block_size)
    rows = []
    for n in cfg.n_list:
        code = _ensure_code(root, cfg, n, manifest)
        for k in cfg.k_list:
            if k > code.q:
                continue
            wcode = WiretapCode(code, _seed_for(root, cfg, n, k), k, FieldSpec(code.q))
            rng = RngStream(cfg.seed, f"avc-pe/{n}/{k}")
            chan = AvcChannel(uset, sched, n, rng.substream("chan"))
            errors = 0
            done = 0
            with manifest.timed_stage(f"avc-pe/n{n}/k{k}"):
                while done < cfg.trials:
                    count = min(20_000, cfg.trials - done)
                    stream = rng.substream(f"shard{done}")
                    messages = stream.gen.integers(0, 1 << k, size=count)
                    x, _ = encode_batch(wcode, messages, stream)
                    y = chan.transmit(x)
                    errors += int(np.sum(decode_batch(wcode, y) != messages))
                    done += count
            low, high = wilson_interval(errors, cfg.trials)
            rows.append(
                [n, code.q, k, f"{cfg.avc_pe_low_db}..{cfg.avc_pe_high_db}",
                 "pe-avc", errors / cfg.trials, low, high, cfg.trials, "wilson95"]
            )
    out = root / "avc_pe.csv"
    write_csv(out, EVAL_HEADER, rows)
    manifest.add_artifact(root, out)
    return [out]


def _avc_sample(
    wcode: WiretapCode, per_symbol_variance: np.ndarray, count: int, rng: RngStream
) -> tuple[np.ndarray, np.ndarray]:
    messages = rng.gen.integers(0, 1 << wcode.k, size=count)
    x, _ = encode_batch(wcode, messages, rng)
    z = x + np.sqrt(per_symbol_variance) * rng.gen.standard_normal(x.shape)
    return _message_bits(messages, wcode.k), z


def _avc_leakage(cfg: ExperimentConfig, root: Path, manifest: RunManifest) -> list[Path]:
    """Leakage traces for the arbitrarily varying eavesdropper channel: the
    per-symbol variance vector is redrawn each epoch (uniform over the dB
    grid), and separately a two-point schedule alternating between the grid
    extremes every `avc_alternate_every` epochs."""
    uset = UncertaintySet.from_range(
        cfg.avc_leak_low_db, cfg.avc_leak_high_db, cfg.avc_leak_step_db,
        "eavesdropper",
    )
    variances = uset.variances
    artifacts: list[Path] = []
    rows: list[list] = []
    for n in cfg.n_list:
        code = _ensure_code(root, cfg, n, manifest)
        k = cfg.k_list[0]
        if k > code.q:
            continue
        wcode = WiretapCode(code, _seed_for(root, cfg, n, k), k, FieldSpec(code.q))
        mcfg = mine_config(cfg, k + n)

        def uniform_source(count, _rng=RngStream(cfg.seed, f"avc-leak/{n}/{k}"),
                           _wcode=wcode, _n=n):
            per_symbol = variances[_rng.gen.integers(0, len(variances), size=_n)]
            return _avc_sample(_wcode, per_symbol, count, _rng)

        with manifest.timed_stage(f"avc-leak/uniform/n{n}"):
            est = mine_estimate(uniform_source, mcfg)
        trace = _write_trace(root, f"trace_avc_uniform_n{n}_k{k}.csv", est)
        manifest.add_artifact(root, trace)
        artifacts.append(trace)
        rows.append(
            [n, code.q, k, f"{cfg.avc_leak_low_db}..{cfg.avc_leak_high_db}",
             "avc-uniform", est.reported_bits, _tail_sd_bits(est),
             est.window, len(est.raw_trace_nats), "tail-sd"]
        )

        lo = snr_to_variance(cfg.avc_leak_low_db)
        hi = snr_to_variance(cfg.avc_leak_high_db)
        epoch_counter = {"epoch": 0}

        def alternating_source(count, _rng=RngStream(cfg.seed, f"avc-alt/{n}/{k}"),
                               _wcode=wcode, _n=n, _state=epoch_counter):
            phase = (_state["epoch"] // cfg.avc_alternate_every) % 2
            _state["epoch"] += 1
            variance = lo if phase == 0 else hi
            return _avc_sample(_wcode, np.full(_n, variance), count, _rng)

        with manifest.timed_stage(f"avc-leak/alternating/n{n}"):
            est = mine_estimate(alternating_source, mcfg)
        trace = _write_trace(root, f"trace_avc_alternating_n{n}_k{k}.csv", est)
        manifest.add_artifact(root, trace)
        artifacts.append(trace)
        rows.append(
            [n, code.q, k, f"{cfg.avc_leak_low_db}|{cfg.avc_leak_high_db}",
             "avc-alternating", est.reported_bits, _tail_sd_bits(est),
             est.window, len(est.raw_trace_nats), "tail-sd"]
        )
    out = root / "avc_leakage.csv"
    write_csv(out, LEAKAGE_HEADER, rows)
    manifest.add_artifact(root, out)
    artifacts.append(out)
    if cfg.plots:
        from .. import plotting

        for trace_file in sorted((root / "traces").glob("trace_avc_*.csv")):
            png = plotting.plot_trace(trace_file, trace_file.with_suffix(".png"))
            manifest.add_artifact(root, png)
            artifacts.append(png)
    return artifacts


def cmd_reproduce(figure_tag: str, cfg: ExperimentConfig, root: Path) -> RunManifest:
    """Chain the stages needed for one figure at the configured scale."""
    if figure_tag not in FIGURE_TAGS:
        raise ValueError(f"unknown figure tag {figure_tag!r}; known: {FIGURE_TAGS}")
    cfg = dataclasses.replace(cfg, experiment=figure_tag)
    root.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest.for_config(cfg)
    stages = {
        "fig3": (cmd_train, cmd_rates),
        "fig4": (cmd_train, cmd_seed_search, cmd_leakage),
        "fig5": (cmd_train, cmd_eval),
        "fig6": (cmd_train, cmd_eval),
        "fig7": (cmd_train, cmd_seed_search, cmd_leakage),
        "fig8": (cmd_train, cmd_seed_search, cmd_eval, cmd_leakage, cmd_bounds),
    }
    if figure_tag in stages:
        for stage in stages[figure_tag]:
            stage(cfg, root, manifest)
    else:  # fig9: arbitrarily varying channels
        cmd_train(cfg, root, manifest)
        _avc_pe(cfg, root, manifest)
        _avc_leakage(cfg, root, manifest)
    manifest.write(root)
    return manifest
