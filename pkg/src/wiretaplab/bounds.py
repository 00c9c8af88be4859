"""Monte Carlo evaluation of finite-blocklength secrecy rate bounds for the
degraded Gaussian wiretap channel.

Achievability: R_s(n, eps, delta) >= (1/n) log2( M(eps, n) / L(n, delta) ),
where M is a pluggable channel-coding codebook size (normal approximation by
default) and L is minimized over a threshold gamma on samples of the
eavesdropper information density B_n.

Converse: 2^k <= inf_tau (tau + delta) / (tau * beta), where beta is the
minimal type-II error of the likelihood-ratio test between the code-induced
joint and a product-form auxiliary distribution, evaluated from samples of
the log-likelihood ratio under each side (Bbar under the joint, Dbar under
the auxiliary).  Because beta decays like 2^(-n*Cs), the default estimator
uses the exact change-of-measure identity beta = E[2^(-Bbar); Bbar >= gamma]
on the Bbar samples; the direct counting estimator P[Dbar >= gamma] is kept
as an optional route and cross-checked at small n.

The secrecy capacity Cs used inside Bbar/Dbar is the degraded-Gaussian
closed form (1/2)log2(1 + P/var_Y) - (1/2)log2(1 + P/var_Z).

All expectations for a given configuration reuse one common sample set
across the gamma (resp. tau) grid, so the optimized objectives are
deterministic functions of the samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .channel import RngStream, snr_to_variance

__all__ = [
    "BoundConfig",
    "BoundResult",
    "secrecy_capacity",
    "awgn_capacity",
    "awgn_dispersion",
    "channel_M",
    "sample_Bn",
    "compute_L",
    "secrecy_achievability",
    "sample_Bbar",
    "sample_Dbar",
    "secrecy_converse",
]

LOG2E = math.log2(math.e)
LN2 = math.log(2.0)


@dataclass(frozen=True)
class BoundConfig:
    """Inputs for one bound evaluation."""

    n: int
    eps: float
    delta: float
    snr_b_db: float
    snr_e_db: float
    power: float = 1.0
    mc_samples: int = 1_000_000
    gamma_grid: int = 200
    golden_rounds: int = 2
    golden_iters: int = 40
    tau_grid: int = 50
    seed: int = 0
    z_model: str = "standard"  # B_n inner variable: "standard" or "channel-noise"
    beta_route: str = "change-of-measure"  # or "direct"
    injected_log2_M: float | None = None
    stderr_shards: int = 10

    def __post_init__(self) -> None:
        if not (0.0 < self.eps < 1.0 and 0.0 < self.delta < 1.0):
            raise ValueError("eps and delta must be in (0, 1)")
        if self.eps + self.delta >= 1.0:
            raise ValueError("eps + delta must be < 1")
        if snr_to_variance(self.snr_e_db) <= snr_to_variance(self.snr_b_db):
            raise ValueError(
                "the eavesdropper channel must be noisier (var_Z > var_Y)"
            )
        if self.z_model not in ("standard", "channel-noise"):
            raise ValueError(f"unknown z_model {self.z_model!r}")
        if self.beta_route not in ("change-of-measure", "direct"):
            raise ValueError(f"unknown beta_route {self.beta_route!r}")

    @property
    def var_y(self) -> float:
        return snr_to_variance(self.snr_b_db)

    @property
    def var_z(self) -> float:
        return snr_to_variance(self.snr_e_db)


@dataclass(frozen=True)
class BoundResult:
    """One evaluated bound with its intermediates and Monte Carlo errors."""

    bound_type: str  # "achievability" or "converse"
    rate_bits_per_use: float
    stderr: float
    log2_M: float | None = None
    log2_L: float | None = None
    gamma_star_nats: float | None = None
    tau_star: float | None = None
    log2_beta: float | None = None
    details: dict = field(default_factory=dict)


def awgn_capacity(snr_linear: float) -> float:
    """Real-AWGN capacity (1/2) log2(1 + S) in bits per use."""
    return 0.5 * math.log2(1.0 + snr_linear)


def awgn_dispersion(snr_linear: float) -> float:
    """Real-AWGN dispersion S(S+2)/(2(S+1)^2) * log2(e)^2 in bits^2."""
    s = snr_linear
    return (s * (s + 2.0)) / (2.0 * (s + 1.0) ** 2) * LOG2E**2


def secrecy_capacity(snr_b_db: float, snr_e_db: float, power: float = 1.0) -> float:
    """Degraded Gaussian wiretap secrecy capacity in bits per use."""
    var_y = snr_to_variance(snr_b_db)
    var_z = snr_to_variance(snr_e_db)
    if var_z <= var_y:
        raise ValueError("not degraded: need var_Z > var_Y")
    return 0.5 * math.log2(1.0 + power / var_y) - 0.5 * math.log2(1.0 + power / var_z)


def channel_M(
    n: int,
    eps: float,
    snr_b_db: float,
    power: float = 1.0,
    injected_log2_M: float | None = None,
) -> float:
    """log2 of the channel-coding codebook size at error probability eps.

    Default is the Gaussian normal approximation
    log2 M = n*C - sqrt(n*V) * Qinv(eps) + (1/2) log2 n; a value obtained
    from an external bound evaluation (or a measured code) may be injected
    instead and is returned unchanged.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must be in (0, 1)")
    if injected_log2_M is not None:
        return float(injected_log2_M)
    snr = power / snr_to_variance(snr_b_db)
    qinv = -float(ndtri(eps))  # Qinv(eps) = -Phi^{-1}(eps)
    return n * awgn_capacity(snr) - math.sqrt(n * awgn_dispersion(snr)) * qinv + 0.5 * math.log2(n)


def sample_Bn(
    n: int,
    snr_e_db: float,
    count: int,
    rng: RngStream,
    power: float = 1.0,
    z_model: str = "standard",
    chunk: int = 200_000,
) -> np.ndarray:
    """Samples of the eavesdropper information density B_n, in bits.

    B_n = (n/2) log2(1 + P/var_Z)
          + (log2 e / 2) * sum_t [ 1 - (sqrt(P) Z_t - sqrt(var_Z))^2 / (P + var_Z) ].

    With z_model="standard" (default), Z_t is a standard normal, which makes
    the correction sum mean-zero and B_n the exact information density of the
    spherical input against the Gaussian output distribution.  With
    z_model="channel-noise", Z_t ~ N(0, var_Z) (the alternative literal
    reading); kept for comparison only.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    var_z = snr_to_variance(snr_e_db)
    scale = 1.0 if z_model == "standard" else math.sqrt(var_z)
    if z_model not in ("standard", "channel-noise"):
        raise ValueError(f"unknown z_model {z_model!r}")
    lead = 0.5 * n * math.log2(1.0 + power / var_z)
    out = np.empty(count)
    gen = rng.gen
    done = 0
    while done < count:
        m = min(chunk, count - done)
        z = scale * gen.standard_normal((m, n))
        term = 1.0 - np.square(math.sqrt(power) * z - math.sqrt(var_z)) / (power + var_z)
        out[done : done + m] = lead + 0.5 * LOG2E * term.sum(axis=1)
        done += m
    return out


def _log_mean_exp(values: np.ndarray) -> float:
    """log( mean( exp(values) ) ), stabilized."""
    vmax = float(values.max())
    return vmax + math.log(float(np.mean(np.exp(values - vmax))))


def _l_objective_log(g: float, b_nats: np.ndarray, delta: float) -> float:
    """log of sqrt-L's ratio at threshold g = log(gamma); +inf when infeasible.

    numerator   = sqrt( gamma * E[exp(-|B - g|)] )
    denominator = 2 (delta + E[exp(-max(B - g, 0))]) - 1   (must be positive)
    """
    den = 2.0 * (delta + float(np.mean(np.exp(-np.maximum(b_nats - g, 0.0))))) - 1.0
    if den <= 0.0:
        return math.inf
    log_num = 0.5 * (g + _log_mean_exp(-np.abs(b_nats - g)))
    return log_num - math.log(den)


def _golden_section(fn, lo: float, hi: float, iters: int) -> float:
    """Deterministic golden-section minimizer on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fn(d)
    return c if fc <= fd else d


def compute_L(
    n: int,
    delta: float,
    snr_e_db: float,
    config: BoundConfig,
    b_bits: np.ndarray | None = None,
) -> tuple[float, float, float]:
    """(log2 L(n, delta), argmin log-gamma in nats, stderr of log2 L).

    Minimizes over a log-spaced gamma grid spanning the sample range of B_n,
    followed by golden-section refinement around the grid argmin; both
    expectations reuse the same sample set.  Raises if no grid point has a
    positive denominator.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    if b_bits is None:
        b_bits = sample_Bn(
            n, snr_e_db, config.mc_samples, RngStream(config.seed, "Bn"),
            power=config.power, z_model=config.z_model,
        )
    b_nats = b_bits * LN2
    grid = np.linspace(float(b_nats.min()), float(b_nats.max()), config.gamma_grid)
    values = np.array([_l_objective_log(g, b_nats, delta) for g in grid])
    if not np.isfinite(values).any():
        raise ValueError(
            "no gamma on the grid yields a positive denominator; the secrecy"
            f" constraint delta={delta} is infeasible for these samples"
        )
    best = int(np.argmin(values))
    g_star = float(grid[best])
    span = grid[1] - grid[0] if len(grid) > 1 else 1.0
    for _ in range(config.golden_rounds):
        lo, hi = g_star - span, g_star + span
        g_star = _golden_section(
            lambda g: _l_objective_log(g, b_nats, delta), lo, hi, config.golden_iters
        )
        span /= 8.0
    best_log = _l_objective_log(g_star, b_nats, delta)
    if best_log > values[best]:  # refinement must never lose to the grid
        best_log, g_star = float(values[best]), float(grid[best])
    log2_l = 2.0 * float(best_log) / LN2
    # Shard-wise re-evaluation at the optimized gamma for a standard error.
    shards = np.array_split(b_nats, config.stderr_shards)
    shard_vals = [
        2.0 * _l_objective_log(g_star, s, delta) / LN2
        for s in shards
        if len(s) > 0
    ]
    shard_vals = [v for v in shard_vals if math.isfinite(v)]
    stderr = (
        float(np.std(shard_vals, ddof=1) / math.sqrt(len(shard_vals)))
        if len(shard_vals) > 1
        else math.inf
    )
    return log2_l, g_star, stderr


def secrecy_achievability(config: BoundConfig) -> BoundResult:
    """Lower bound (1/n)(log2 M - log2 L), clamped below at zero."""
    log2_m = channel_M(
        config.n, config.eps, config.snr_b_db, config.power, config.injected_log2_M
    )
    b_bits = sample_Bn(
        config.n, config.snr_e_db, config.mc_samples, RngStream(config.seed, "Bn"),
        power=config.power, z_model=config.z_model,
    )
    log2_l, g_star, stderr = compute_L(
        config.n, config.delta, config.snr_e_db, config, b_bits=b_bits
    )
    rate = max(0.0, float(log2_m - log2_l) / config.n)
    return BoundResult(
        bound_type="achievability",
        rate_bits_per_use=rate,
        stderr=stderr / config.n,
        log2_M=log2_m,
        log2_L=log2_l,
        gamma_star_nats=g_star,
        details={"clamped": (log2_m - log2_l) < 0.0},
    )


def sample_Bbar(
    n: int,
    snr_b_db: float,
    snr_e_db: float,
    count: int,
    rng: RngStream,
    power: float = 1.0,
    chunk: int = 200_000,
) -> np.ndarray:
    """Log-likelihood ratio samples under the code-induced joint, in bits.

    Bbar_n = n*Cs + (log2 e / 2) * sum_t [ (N_Y + Nbar_Y)^2 / var_Z
             - N_Y^2 / var_Y + (sqrt(P) + N_Y)^2 / (P + var_Y)
             - (sqrt(P) + N_Y + Nbar_Y)^2 / (P + var_Z) ],
    with N_Y ~ N(0, var_Y) and Nbar_Y ~ N(0, var_Z - var_Y).
    """
    var_y = snr_to_variance(snr_b_db)
    var_z = snr_to_variance(snr_e_db)
    if var_z <= var_y:
        raise ValueError("not degraded: need var_Z > var_Y")
    n_cs = n * secrecy_capacity(snr_b_db, snr_e_db, power)
    sqrt_p = math.sqrt(power)
    out = np.empty(count)
    gen = rng.gen
    done = 0
    while done < count:
        m = min(chunk, count - done)
        n_y = math.sqrt(var_y) * gen.standard_normal((m, n))
        nbar_y = math.sqrt(var_z - var_y) * gen.standard_normal((m, n))
        term = (
            np.square(n_y + nbar_y) / var_z
            - np.square(n_y) / var_y
            + np.square(sqrt_p + n_y) / (power + var_y)
            - np.square(sqrt_p + n_y + nbar_y) / (power + var_z)
        )
        out[done : done + m] = n_cs + 0.5 * LOG2E * term.sum(axis=1)
        done += m
    return out


def sample_Dbar(
    n: int,
    snr_b_db: float,
    snr_e_db: float,
    count: int,
    rng: RngStream,
    power: float = 1.0,
    chunk: int = 200_000,
) -> np.ndarray:
    """Log-likelihood ratio samples under the auxiliary product side, in bits.

    Dbar_n = n*Cs + (log2 e / 2) * sum_t [ N_Z^2 / var_Z
             - (Nbar_Z - c0 (N_Z + sqrt(P)))^2 / (P + var_Z)
             + Nbar_Z^2 / (P + var_Y)
             - (c1^2 N_Z + c0 Nbar_Z - c0^2 sqrt(P))^2 / var_Y ],
    with N_Z ~ N(0, var_Z), Nbar_Z ~ N(0, P + var_Y),
    c0 = sqrt((var_Z - var_Y)/(P + var_Z)), c1 = sqrt((P + var_Y)/(P + var_Z)).

    The last term enters with a minus sign and coefficient c1^2: that is the
    unique version under which Dbar equals, pointwise, the same log-likelihood
    ratio that Bbar samples on the joint side (re-derived from the Gaussian
    conditionals) and under which E[2^Dbar] = 1; the module tests check both,
    as well as agreement of the two beta routes.
    """
    var_y = snr_to_variance(snr_b_db)
    var_z = snr_to_variance(snr_e_db)
    if var_z <= var_y:
        raise ValueError("not degraded: need var_Z > var_Y")
    n_cs = n * secrecy_capacity(snr_b_db, snr_e_db, power)
    sqrt_p = math.sqrt(power)
    c0 = math.sqrt((var_z - var_y) / (power + var_z))
    c1 = math.sqrt((power + var_y) / (power + var_z))
    out = np.empty(count)
    gen = rng.gen
    done = 0
    while done < count:
        m = min(chunk, count - done)
        n_z = math.sqrt(var_z) * gen.standard_normal((m, n))
        nbar_z = math.sqrt(power + var_y) * gen.standard_normal((m, n))
        term = (
            np.square(n_z) / var_z
            - np.square(nbar_z - c0 * (n_z + sqrt_p)) / (power + var_z)
            + np.square(nbar_z) / (power + var_y)
            - np.square(c1 * c1 * n_z + c0 * nbar_z - c0 * c0 * sqrt_p) / var_y
        )
        out[done : done + m] = n_cs + 0.5 * LOG2E * term.sum(axis=1)
        done += m
    return out


def _nearest_rank_quantile(sorted_values: np.ndarray, level: float) -> float:
    """Nearest-rank lower quantile of a pre-sorted ascending array."""
    count = len(sorted_values)
    rank = min(max(int(math.ceil(level * count)), 1), count)
    return float(sorted_values[rank - 1])


def _log2_beta_change_of_measure(
    bbar_sorted_bits: np.ndarray, gamma_bits: float
) -> tuple[float, float]:
    """(log2 beta, stderr of log2 beta) via beta = E[2^(-Bbar); Bbar >= gamma].

    Under the joint measure, weighting by 2^(-Bbar) converts the tail event
    into the auxiliary-measure probability exactly, so the estimator stays
    accurate even when beta is far below 1/samples.
    """
    tail = bbar_sorted_bits[bbar_sorted_bits >= gamma_bits]
    count = len(bbar_sorted_bits)
    if len(tail) == 0:
        return -math.inf, math.inf
    log_weights = -tail * LN2
    wmax = float(log_weights.max())
    weights = np.exp(log_weights - wmax)
    total = float(weights.sum())
    log2_beta = (wmax + math.log(total / count)) / LN2
    # Delta-method standard error of log2(mean weight).
    mean_w = total / count
    var_w = float(np.sum(np.square(weights))) / count - mean_w**2
    stderr = math.sqrt(max(var_w, 0.0) / count) / mean_w / LN2
    return log2_beta, stderr


def secrecy_converse(config: BoundConfig) -> BoundResult:
    """Upper bound on k: log2 of inf_tau (tau + delta)/(tau beta_{1-eps-delta-tau}).

    For each tau on a uniform open grid in (0, 1 - eps - delta), the threshold
    gamma is the nearest-rank quantile with P[Bbar >= gamma] = 1-eps-delta-tau
    and beta is estimated at that threshold (change-of-measure by default,
    direct Dbar counting when beta_route="direct").
    """
    rng = RngStream(config.seed, "converse")
    bbar = np.sort(
        sample_Bbar(
            config.n, config.snr_b_db, config.snr_e_db, config.mc_samples,
            rng.substream("Bbar"), power=config.power,
        )
    )
    dbar_sorted: np.ndarray | None = None
    if config.beta_route == "direct":
        dbar_sorted = np.sort(
            sample_Dbar(
                config.n, config.snr_b_db, config.snr_e_db, config.mc_samples,
                rng.substream("Dbar"), power=config.power,
            )
        )
    budget = 1.0 - config.eps - config.delta
    taus = (np.arange(1, config.tau_grid + 1) / (config.tau_grid + 1)) * budget
    best: tuple[float, float, float, float] | None = None  # (log2 bound, tau, log2beta, stderr)
    any_feasible = False
    for tau in taus:
        level = config.eps + config.delta + tau  # P[Bbar < gamma] target
        gamma = _nearest_rank_quantile(bbar, level)
        if config.beta_route == "direct":
            hits = int(len(dbar_sorted) - np.searchsorted(dbar_sorted, gamma, side="left"))
            if hits == 0:
                continue
            beta = hits / len(dbar_sorted)
            log2_beta = math.log2(beta)
            stderr_beta = math.sqrt(beta * (1 - beta) / len(dbar_sorted)) / beta / LN2
        else:
            log2_beta, stderr_beta = _log2_beta_change_of_measure(bbar, gamma)
            if not math.isfinite(log2_beta):
                continue
        any_feasible = True
        log2_bound = math.log2(tau + config.delta) - math.log2(tau) - log2_beta
        if best is None or log2_bound < best[0]:
            best = (log2_bound, float(tau), log2_beta, stderr_beta)
    if not any_feasible or best is None:
        raise ValueError(
            "beta estimate is zero at every tau grid point; increase mc_samples"
            " or use beta_route='change-of-measure'"
        )
    log2_bound, tau_star, log2_beta, stderr = best
    return BoundResult(
        bound_type="converse",
        rate_bits_per_use=log2_bound / config.n,
        stderr=stderr / config.n,
        tau_star=tau_star,
        log2_beta=log2_beta,
        details={"beta_route": config.beta_route},
    )
