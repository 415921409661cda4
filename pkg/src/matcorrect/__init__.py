"""Deterministic correction of integer matrix products with few wrong entries."""

from .core_math import (
    CapacityError,
    Certificate,
    build_certificate,
    certificate_width,
    smallest_prime_above,
    vandermonde_det_mod,
)
from .correction import (
    CorrectionReport,
    PreconditionError,
    correct_baseline,
    correct_fast,
    freivalds_verify,
    oracle_product,
    recompute_column,
    recompute_entry,
    recompute_row,
)
from .counting import OpCounter
from .indicators import IndicatorState, apply_correction, col_indicator, row_indicator

__all__ = [
    "CapacityError",
    "Certificate",
    "CorrectionReport",
    "IndicatorState",
    "OpCounter",
    "PreconditionError",
    "apply_correction",
    "build_certificate",
    "certificate_width",
    "col_indicator",
    "correct_baseline",
    "correct_fast",
    "freivalds_verify",
    "oracle_product",
    "recompute_column",
    "recompute_entry",
    "recompute_row",
    "row_indicator",
    "smallest_prime_above",
    "vandermonde_det_mod",
]
