"""Past-only finite-difference stencils with exact coefficients and error bounds."""

from pastdiff.exact_math import (
    elementary_symmetric,
    format_rational,
    parse_rational,
    solve_vandermonde,
    vandermonde_det,
    vandermonde_minor_det,
)
from pastdiff.stencil import (
    NodeSet,
    ReferenceInterval,
    Stencil,
    closed_form_coefficient,
    evaluate_stencil,
    generate_stencil,
    moment_report,
    special_case_coefficients,
    weighted_power_sum,
)
from pastdiff.error_analysis import (
    Bias,
    DerivativeSign,
    ErrorModel,
    LeadingTerm,
    bias_direction,
    coefficient_magnitude_bound,
    leading_error_term,
    worst_case_bound,
)
from pastdiff.stream import (
    Sample,
    SampleWindow,
    StreamConfig,
    StreamProcessor,
    estimate_derivative,
    stream_process,
    window_to_nodes,
)

__version__ = "0.1.0"
