"""Numerical laboratory for exact linear-optical sampling distributions.

Submodules: permanent (exact permanents), fock (outcome patterns and click
statistics), randmat (Haar unitaries and truncations), distribution
(outcome probabilities and anticoncentration), embedding (worst-case 0/1
permanents inside outcome probabilities), interpolation (random-to-target
matrix paths and extrapolation), gbs (uniform-squeezing Gaussian variant),
cli (experiment drivers).
"""

from ._version import __version__
from .errors import BosonLabError, CapacityError, ContractViolation, DomainError
from .fock import (
    ClickStats,
    OutcomePattern,
    as_pattern,
    click_concentration_check,
    click_mean,
    click_pmf,
    click_stats,
    dim_fock,
    enumerate_outcomes,
    rank_outcome,
    sample_uniform_outcome,
    unrank_outcome,
)
from .permanent import per_exact, per_exact_int, per_oracle
from .randmat import (
    HaarDraw,
    haar_unitary,
    log_density_unnormalized,
    scaled_truncation,
    singular_spectrum,
    submatrix_with_repetitions,
    truncation,
)
from .distribution import exact_sampler, full_distribution, outcome_probability
from .embedding import (
    EmbeddingSpec,
    GbsEmbeddingSpec,
    build_embedding,
    build_embedding_gbs,
    verify_embedding_gbs_identity,
    verify_embedding_identity,
)
from .interpolation import (
    PolySamplePath,
    SmugglePathSpec,
    end_to_end_smuggle_demo,
    fit_and_extrapolate,
    make_smuggle_path,
    path_value,
)
from .gbs import (
    GbsConfig,
    gbs_probability,
    photon_number_mean,
    photon_number_mode,
    photon_number_pmf,
    postselected_probability,
    submatrix_rows_cols,
)

__all__ = [
    "__version__",
    "BosonLabError",
    "CapacityError",
    "ContractViolation",
    "DomainError",
    "OutcomePattern",
    "ClickStats",
    "as_pattern",
    "dim_fock",
    "enumerate_outcomes",
    "rank_outcome",
    "unrank_outcome",
    "sample_uniform_outcome",
    "click_stats",
    "click_pmf",
    "click_mean",
    "click_concentration_check",
    "per_exact",
    "per_oracle",
    "per_exact_int",
    "HaarDraw",
    "haar_unitary",
    "truncation",
    "scaled_truncation",
    "submatrix_with_repetitions",
    "singular_spectrum",
    "log_density_unnormalized",
    "outcome_probability",
    "full_distribution",
    "exact_sampler",
    "EmbeddingSpec",
    "GbsEmbeddingSpec",
    "build_embedding",
    "verify_embedding_identity",
    "build_embedding_gbs",
    "verify_embedding_gbs_identity",
    "SmugglePathSpec",
    "PolySamplePath",
    "make_smuggle_path",
    "path_value",
    "fit_and_extrapolate",
    "end_to_end_smuggle_demo",
    "GbsConfig",
    "photon_number_pmf",
    "photon_number_mean",
    "photon_number_mode",
    "submatrix_rows_cols",
    "postselected_probability",
    "gbs_probability",
]
