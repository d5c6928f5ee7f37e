"""Zero-distribution characteristics of entire functions of exponential type
and finite-window checks of logarithmic-sum growth criteria."""

__version__ = "0.1.0"

from .sequences import (  # noqa: E402
    ZeroSequence,
    radial_counting,
    read_sequence,
    separation_margin,
    upper_density,
    write_sequence,
)
from .log_sums import WindowGrid, half_plane_log_sum, log_sum, log_sum_table  # noqa: E402
from .axis_integrals import LogModulus, QuadratureError, axis_integral, axis_integral_grid  # noqa: E402
from .entire_functions import (  # noqa: E402
    CanonicalProduct,
    ConvexCompactPoly,
    indicator_estimate,
    product_axis_logmod,
    product_log_modulus,
    sin_axis_logmod,
    sin_log_modulus,
    support_function,
    width0,
)
from .growth import GrowthFunction, d_to_q, mirror_sequence, q_to_d, synthesize_sequence  # noqa: E402
from .criteria import (  # noqa: E402
    CriterionReport,
    Thresholds,
    completeness_diagnostic,
    dominance_check,
    excess_table,
    lemma_gap,
    logmod_dominance_check,
    majorant_pipeline,
    mr_check,
    multiplier_check,
    width_check,
)
