"""Adiabatic invariants: the published-polynomial regression, defect
valuations, hidden symmetry, numeric drift."""

import math
from fractions import Fraction

import numpy as np
import pytest

from discavg.diagnostics import loglog_slope
from discavg.errors import DomainError
from discavg.interpolation import symmetric_scheme
from discavg.invariants import (
    DISPLAY_CAPS,
    conservation_defect,
    defect_valuations,
    extract_invariant,
    henon_resonance_invariant,
    hidden_symmetry_check,
    htilde2_reference,
    numeric_drift,
)
from discavg.jets import Caps, TruncatedSeries, divergence, hamiltonian_field
from discavg.maps import henon_model, jet_of_map, rotation_model

HENON_CAPS = Caps(10, (None, None, 2))


def henon_jet():
    return jet_of_map(henon_model(symbolic_eps=True), (0, 0), HENON_CAPS)


def test_reference_coefficients_from_the_publication():
    h = htilde2_reference()
    assert h.coefficient((2, 2, 0)) == -1
    assert h.coefficient((4, 2, 1)) == Fraction(-17, 3)
    assert h.coefficient((2, 0, 1)) == 2
    assert h.coefficient((6, 0, 0)) == Fraction(-1, 3)
    assert h.coefficient((3, 3, 1)) == 8
    assert len(h.terms) == 26


def test_pipeline_reproduces_reference_exactly():
    report = henon_resonance_invariant(symmetric_scheme(1), cap_xy=8, cap_eps=2)
    assert report.hamiltonian.truncated(DISPLAY_CAPS) == htilde2_reference()


def test_defect_valuations_match_publication():
    report = henon_resonance_invariant(symmetric_scheme(1), cap_xy=8, cap_eps=2)
    assert report.defect_valuations.pure == 9
    assert report.defect_valuations.eps_linear == 7


def test_divergence_leading_term():
    report = henon_resonance_invariant(symmetric_scheme(1))
    pure = divergence(report.field).select_var_degree(2, 0)
    assert pure.valuation((0, 1)) == 7
    assert pure.coefficient((2, 5, 0)) == -12
    assert pure.coefficient((5, 2, 0)) == -12


def test_field_minus_hamiltonian_field_valuations():
    report = henon_resonance_invariant(symmetric_scheme(1))
    ham = hamiltonian_field(report.hamiltonian)
    caps = report.field.caps
    diff = [
        (a - b).truncated(caps)
        for a, b in zip(report.field.components, ham.components)
    ]
    assert min(c.select_var_degree(2, 0).valuation((0, 1)) for c in diff) == 8
    assert min(c.select_var_degree(2, 1).valuation((0, 1)) for c in diff) == 5


def test_scheme_upgrade_moves_errors_to_higher_order():
    r2 = henon_resonance_invariant(symmetric_scheme(1), cap_xy=12, cap_eps=2)
    r4 = henon_resonance_invariant(symmetric_scheme(2), cap_xy=12, cap_eps=2)
    assert r4.defect_valuations.dominates(r2.defect_valuations)
    h2d = r2.hamiltonian.truncated(DISPLAY_CAPS)
    h4d = r4.hamiltonian.truncated(DISPLAY_CAPS)
    diff = {
        e
        for e in set(h2d.terms) | set(h4d.terms)
        if h2d.coefficient(e) != h4d.coefficient(e)
    }
    assert diff == {(4, 2, 1), (2, 4, 1)}
    assert h4d.coefficient((4, 2, 1)) == Fraction(-13, 3)
    assert h4d.coefficient((2, 4, 1)) == Fraction(-13, 3)


def test_hidden_symmetry_under_first_iterate():
    vals = hidden_symmetry_check(henon_jet(), htilde2_reference())
    assert vals.pure >= 9
    assert vals.eps_linear >= 7


def test_broken_invariant_is_detected():
    x3 = TruncatedSeries(3, DISPLAY_CAPS, {(3, 0, 0): 1})
    vals = hidden_symmetry_check(henon_jet(), htilde2_reference() + x3)
    assert vals.pure == 3


def test_exact_orthogonal_map_conserves_quadratic_exactly():
    # rational rotation-like map from the 3-4-5 triangle: cos=3/5, sin=4/5
    caps = Caps(6)
    x = TruncatedSeries.variable(0, 2, caps)
    y = TruncatedSeries.variable(1, 2, caps)
    jet = [
        x.scaled(Fraction(3, 5)) - y.scaled(Fraction(4, 5)),
        x.scaled(Fraction(4, 5)) + y.scaled(Fraction(3, 5)),
    ]
    h = x * x + y * y
    defect = conservation_defect(h, jet)
    assert not defect.terms  # exact symmetry, defect identically zero


def test_lifted_rotation_conserves_quadratic_up_to_lift_error():
    caps = Caps(4)
    jet = jet_of_map(rotation_model(0.3), (0, 0), caps)
    x = TruncatedSeries.variable(0, 2, caps)
    y = TruncatedSeries.variable(1, 2, caps)
    defect = conservation_defect(x * x + y * y, jet)
    assert all(abs(float(c)) <= 1e-11 for c in defect.terms.values())


def test_extract_invariant_on_exact_rotation_lift():
    # the averaged invariant of a lifted rotation is proportional to x^2+y^2
    caps = Caps(5)
    jet = jet_of_map(rotation_model(0.2), (0, 0), caps)
    report = extract_invariant(jet, 1, symmetric_scheme(1))
    h = report.hamiltonian
    cxx = float(h.coefficient((2, 0)))
    assert abs(cxx - float(h.coefficient((0, 2)))) <= 1e-11
    off_diag = [c for e, c in h.terms.items() if e not in ((2, 0), (0, 2))]
    assert all(abs(float(c)) <= 1e-11 for c in off_diag)
    # field sin(theta)*(-y, x) has Hamiltonian -sin(theta)/2 * (x^2 + y^2)
    assert abs(cxx + math.sin(0.2) / 2) <= 1e-10


def test_extract_invariant_guards():
    with pytest.raises(DomainError):
        extract_invariant(henon_jet(), 0, symmetric_scheme(1))
    with pytest.raises(DomainError):
        extract_invariant([henon_jet()[0]], 4, symmetric_scheme(1))


def test_drift_zero_at_fixed_point_and_for_constants():
    m = henon_model(eps=1e-3)
    fixed = numeric_drift(m, htilde2_reference(), (0.0, 0.0), 1000, params=(1e-3,))
    assert fixed.max_abs == 0.0
    const = TruncatedSeries.constant(Fraction(5, 3), 3, DISPLAY_CAPS)
    st = numeric_drift(m, const, (0.3, 0.1), 500, params=(1e-3,))
    assert st.max_abs == 0.0


def test_drift_escape_gives_partial_report():
    m = henon_model(eps=0.0)
    st = numeric_drift(m, htilde2_reference(), (5.0, 5.0), 1000, params=(0.0,))
    assert st.escape_index is not None
    assert st.steps == st.escape_index
    assert st.steps < 1000


def test_drift_radius_scaling_at_zero_eps():
    # O(r^9) per-step defect integrated along slow dynamics: slope >= 6.5
    m = henon_model(eps=0.0)
    h = htilde2_reference()
    radii = [0.02, 0.05, 0.1, 0.2]
    drifts = [
        numeric_drift(m, h, (r, 0.0), 5000, params=(0.0,)).max_abs for r in radii
    ]
    assert loglog_slope(radii, drifts, floor=1e-18) >= 6.5


def test_drift_records_values_when_asked():
    m = henon_model(eps=1e-3)
    st = numeric_drift(m, htilde2_reference(), (0.05, 0.0), 50, params=(1e-3,), record=True)
    assert st.values is not None and len(st.values) == 51
    assert st.values[0] == st.initial_value
