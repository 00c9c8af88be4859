"""Desk-scale laboratory for short-blocklength Gaussian wiretap codes.

Layers a hash-based secrecy map over a learned autoencoder reliability code,
measures error rate and leakage (via a neural mutual-information estimator)
by Monte Carlo simulation, and evaluates finite-blocklength achievability and
converse bounds for comparison, including compound and arbitrarily-varying
channel settings.
"""

__version__ = "0.1.0"

from .channel import (
    AvcChannel,
    AvcSchedule,
    GaussianSpec,
    RngStream,
    UncertaintySet,
    snr_to_variance,
    transmit_avc,
    transmit_awgn,
)
from .gf2q import (
    REDUCTION_POLYS,
    BitString,
    FieldSpec,
    encode_phi,
    field_inv,
    field_mul,
    hash_f,
    two_universality_check,
)
from .leakage import (
    LeakageEstimate,
    MineConfig,
    MineDivergenceError,
    make_joint_sampler,
    mine_estimate,
    sample_joint,
    shuffle_marginal,
    smooth_trace,
)
from .neural import AdamState, Mlp, load_mlp, normalize_power, save_mlp, softmax_xent
from .reliability import (
    PeEstimate,
    ReliabilityCode,
    ReliabilityConfig,
    TrainingDivergedError,
    decode0,
    encode0,
    estimate_pe0,
    train,
)
from .secrecy import (
    SEED_CANDIDATES,
    Metrics,
    SeedSearchResult,
    WiretapCode,
    decode,
    default_seed_candidates,
    encode,
    estimate_pe,
    seed_search,
)
from .bounds import (
    BoundConfig,
    BoundResult,
    channel_M,
    compute_L,
    sample_Bn,
    secrecy_achievability,
    secrecy_capacity,
    secrecy_converse,
)
