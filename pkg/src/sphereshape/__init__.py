"""Sphere shaping for arbitrary discrete channel-input distributions.

Integer weight functions generalize energy-based enumerative shaping to
any target distribution: quantized self-information plays the role of
symbol energy, a bounded-weight trellis enumerates the codebook, and
exact index arithmetic maps payloads to amplitude sequences and back.
"""

from .alphabet import (
    TargetDistribution,
    WeightedAlphabet,
    classical_ess_alphabet,
    normalize_weights,
    quantize_weights,
    reversed_alphabet,
)
from .analysis import (
    CodebookReport,
    PrefixStats,
    codebook_prefix_stats,
    divergence_bits,
    rate_loss_bits,
    summarize_codebook,
)
from .channel_capacity import (
    BAResult,
    CapacityResult,
    blahut_arimoto,
    optimize_ppc_distribution,
)
from .codec import (
    bits_to_index,
    deshape,
    deshape_bits,
    index_to_bits,
    shape,
    shape_bits,
)
from .distributions import (
    entropy,
    entropy_tune,
    find_lambda_for_entropy,
    maxwell_boltzmann,
)
from .trellis import (
    InfeasibleRateError,
    Trellis,
    build_trellis,
    select_l_max,
    trellis_to_classical_energy_view,
)
from .weight_levels import WeightLevelSet, compute_weight_levels

__version__ = "0.1.0"

__all__ = [
    "TargetDistribution",
    "WeightedAlphabet",
    "classical_ess_alphabet",
    "normalize_weights",
    "quantize_weights",
    "reversed_alphabet",
    "WeightLevelSet",
    "compute_weight_levels",
    "Trellis",
    "build_trellis",
    "select_l_max",
    "InfeasibleRateError",
    "trellis_to_classical_energy_view",
    "shape",
    "deshape",
    "shape_bits",
    "deshape_bits",
    "bits_to_index",
    "index_to_bits",
    "PrefixStats",
    "codebook_prefix_stats",
    "divergence_bits",
    "rate_loss_bits",
    "CodebookReport",
    "summarize_codebook",
    "entropy",
    "maxwell_boltzmann",
    "entropy_tune",
    "find_lambda_for_entropy",
    "BAResult",
    "CapacityResult",
    "blahut_arimoto",
    "optimize_ppc_distribution",
    "ccdm",
]

from . import ccdm  # noqa: E402  (namespaced: ccdm.encode, ccdm.decode, ...)
