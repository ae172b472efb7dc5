"""Discrete averaging for iterated maps.

Builds interpolating vector fields from weighted orbit averages, extracts
adiabatic invariants symbolically via exact-rational truncated-jet
algebra, measures time-one-flow approximation errors, and maps the domain
of validity of the averaging approximation.
"""

from .diagnostics import (
    DecayFit,
    GProfile,
    ScanGrid,
    decay_fit,
    g_profile,
    loglog_slope,
    scan,
    select_optimal_order,
)
from .errors import (
    CapabilityError,
    DimensionMismatchError,
    DomainError,
    EscapeError,
    InsufficientDataError,
)
from .flows import (
    C0,
    FlowErrorReport,
    IntegratorConfig,
    flow_error,
    flow_time_one,
    flow_time_one_with_estimate,
    optimal_order_select,
)
from .interpolation import (
    InterpolationScheme,
    NumericVectorField,
    evaluate_field,
    formal_interpolator_coefficients,
    forward_scheme,
    invert_jet,
    jet_interpolating_field,
    lagrange_weights,
    newton_forward_field,
    stirling_symmetric_field,
    symmetric_scheme,
)
from .invariants import (
    DefectValuations,
    DriftStats,
    InvariantReport,
    conservation_defect,
    defect_valuations,
    extract_invariant,
    henon_resonance_invariant,
    hidden_symmetry_check,
    htilde2_reference,
    numeric_drift,
)
from .jets import (
    Caps,
    JetVectorField,
    Rational,
    TruncatedSeries,
    compose_map_jets,
    divergence,
    hamiltonian_field,
    homotopy_hamiltonian,
    identity_jet,
    series_from_json_dict,
    series_to_json_dict,
)
from .maps import (
    MapSystem,
    exp_family_jet,
    exp_scalar_model,
    henon_model,
    identity_model,
    iterate,
    iterated_map,
    jet_iterate,
    jet_of_map,
    make_model,
    orbit_segment,
    reversor_conjugate_jet,
    rotation_model,
)
from .reporting import TOOL_VERSION as __version__

__all__ = [name for name in dir() if not name.startswith("_")]
