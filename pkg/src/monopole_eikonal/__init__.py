"""Eikonal and classical small-angle scattering on planar systems of dyons."""

from .chargeconf import (
    ChargeSpec,
    ScatteringConfig,
    complex_charges,
    load_config,
    make_config,
    parse_config,
    serialize_config,
)
from .classical import (
    FocalPoint,
    classical_cross_section,
    cross_section_two_dyons_closed,
    focal_points,
    momentum_map,
    potential,
    preimages,
)
from .eikonal import (
    AmplitudeSample,
    amplitude_dyon,
    amplitude_two_identical_monopoles,
    amplitude_two_monopoles,
)
from .errors import MonopoleEikonalError, NumericalError, SchemaError, ValidationError
from .oracle import (
    ComparisonReport,
    OracleResult,
    amplitude_oracle,
    closed_form_amplitude,
    compare_amplitudes,
    contour_integral,
)
from .scan import ScanTable, emit_csv, focal_zoom, read_csv, scan_cross_section

__version__ = "0.1.0"

__all__ = [
    "AmplitudeSample",
    "ChargeSpec",
    "ComparisonReport",
    "FocalPoint",
    "MonopoleEikonalError",
    "NumericalError",
    "OracleResult",
    "ScanTable",
    "ScatteringConfig",
    "SchemaError",
    "ValidationError",
    "amplitude_dyon",
    "amplitude_oracle",
    "amplitude_two_identical_monopoles",
    "amplitude_two_monopoles",
    "classical_cross_section",
    "closed_form_amplitude",
    "compare_amplitudes",
    "complex_charges",
    "contour_integral",
    "cross_section_two_dyons_closed",
    "emit_csv",
    "focal_points",
    "focal_zoom",
    "load_config",
    "make_config",
    "momentum_map",
    "parse_config",
    "potential",
    "preimages",
    "read_csv",
    "scan_cross_section",
    "serialize_config",
]
