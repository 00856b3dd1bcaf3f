"""Plotkin/Reed-Muller codes, SC decoding and moment-based polar code design."""

__version__ = "0.1.0"

from .codebook import (  # noqa: E402
    CodeSpec,
    Path,
    encode_monomial_sum,
    encode_plotkin,
    monomial_codeword,
    rm_info_set,
)
from .channel import (  # noqa: E402
    Bsc,
    ChannelMoments,
    CompoundBsc,
    SoftObservation,
    bhattacharyya_bounds,
    bsc_observe,
    bsc_soft,
    degrade,
    moment_step,
    moments,
    moments_along_path,
    upgrade,
)
from .scdecoder import (  # noqa: E402
    DecodeOutput,
    GenieReport,
    degrade_combine,
    exact_leaf_posterior,
    genie_error_rates,
    sc_decode,
    upgrade_combine,
)
from .polarization import expected_v, ratio_R, r_func  # noqa: E402
from .ordering import construct_code, order_scan  # noqa: E402

__all__ = [
    "__version__",
    "CodeSpec",
    "Path",
    "encode_monomial_sum",
    "encode_plotkin",
    "monomial_codeword",
    "rm_info_set",
    "Bsc",
    "ChannelMoments",
    "CompoundBsc",
    "SoftObservation",
    "bhattacharyya_bounds",
    "bsc_observe",
    "bsc_soft",
    "degrade",
    "moment_step",
    "moments",
    "moments_along_path",
    "upgrade",
    "DecodeOutput",
    "GenieReport",
    "degrade_combine",
    "exact_leaf_posterior",
    "genie_error_rates",
    "sc_decode",
    "upgrade_combine",
    "expected_v",
    "ratio_R",
    "r_func",
    "construct_code",
    "order_scan",
]
