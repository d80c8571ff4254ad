"""Distances between a true and a learnt causal DAG over shared data.

The structural baselines (SHD, SID) live in :mod:`contsid.graph`; the
kernel-embedding distance and its per-pair breakdown in :mod:`contsid.metric`;
synthetic models and closed-form ground truth in :mod:`contsid.synth` and
:mod:`contsid.oracle`.
"""

__version__ = "0.1.0"

from .embeddings import (
    EmbeddingCoefficients,
    RegressionWeights,
    embedding_norm,
    fit_regression_weights,
    ime_coefficients,
    observational_coefficients,
    rkhs_distance,
)
from .graph import (
    Dag,
    ancestors,
    build_dag,
    causal_nodes,
    d_separated,
    descendants,
    has_directed_path,
    is_valid_adjustment,
    shd,
    sid,
)
from .kernels import (
    GramMatrix,
    KernelConfig,
    gram,
    median_bandwidth,
    product_eval,
    rbf_eval,
)
from .metric import (
    MetricConfig,
    MetricReport,
    PairCase,
    PairResult,
    classify_pair,
    cont_sid,
    data_fingerprint,
    one_sided_distance,
    pair_distance,
    two_sided_distance,
)
from .oracle import (
    GaussianLaw,
    adjusted_gaussian,
    empirical_mmd,
    gaussian_moments,
    gaussian_rbf_mmd,
    interventional_gaussian,
    observational_gaussian,
)
from .synth import (
    LinearScm,
    NoiseSpec,
    erdos_renyi_dag,
    intro_example,
    random_linear_scm,
    sample_interventional,
    sample_observational,
)

__all__ = [name for name in dir() if not name.startswith("_")]
