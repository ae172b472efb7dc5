"""Interpolation stencils, weights and interpolating vector fields.

The vector field of order n with backward offset n0 is the t-derivative at
t = 0 of the degree-n polynomial through the orbit points F^k(x),
k = -n0..n-n0:

    X_n(x) = sum_k p_nk F^k(x),      p_nk = b_k'(0)

with b_k the Lagrange basis polynomials of the stencil.  Weights are exact
rationals, converted to floats once per scheme for numeric evaluation.
Two independent finite-difference forms (forward Newton and symmetric
Stirling-Newton) are provided and must agree with the Lagrange evaluation;
they are kept as separate code paths on purpose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import CapabilityError, DimensionMismatchError, DomainError
from .jets import (
    Caps,
    JetVectorField,
    TruncatedSeries,
    compose_map_jets,
    identity_jet,
)
from .maps import MapSystem, orbit_segment

MAX_ORDER = 32  # weights grow binomially; covers scan half-orders to 15


@dataclass(frozen=True)
class InterpolationScheme:
    """Stencil {-n0, ..., n-n0} with derivative weights p_nk = b_k'(0).

    The weights satisfy exactly: sum p_k = 0, sum k p_k = 1 and
    sum k^j p_k = 0 for j = 2..n.
    """

    n0: int
    n: int
    weights: tuple[Fraction, ...]

    @property
    def offsets(self) -> range:
        return range(-self.n0, self.n - self.n0 + 1)

    @property
    def float_weights(self) -> tuple[float, ...]:
        return tuple(float(w) for w in self.weights)

    def __str__(self) -> str:
        return f"scheme({self.n0},{self.n})"


def lagrange_weights(n0: int, n: int) -> InterpolationScheme:
    """Exact rational derivative weights for the stencil {-n0..n-n0}."""
    if not (0 <= n0 <= n) or n < 1:
        raise DomainError("n0 must satisfy 0 <= n0 <= n and n >= 1")
    if n > MAX_ORDER:
        raise DomainError(f"order {n} exceeds the supported maximum {MAX_ORDER}")
    nodes = list(range(-n0, n - n0 + 1))
    weights = []
    for k in nodes:
        total = Fraction(0)
        for j in nodes:
            if j == k:
                continue
            prod = Fraction(1, k - j)
            for i in nodes:
                if i == k or i == j:
                    continue
                prod *= Fraction(-i, k - i)
            total += prod
        weights.append(total)
    return InterpolationScheme(n0, n, tuple(weights))


def forward_scheme(m: int) -> InterpolationScheme:
    return lagrange_weights(0, m)


def symmetric_scheme(m: int) -> InterpolationScheme:
    """Central scheme of order 2m on the stencil -m..m."""
    return lagrange_weights(m, 2 * m)


# ----------------------------------------------------------------------
# Numeric evaluation on orbits
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class NumericVectorField:
    """Interpolating vector field of a map, evaluated from orbit segments."""

    scheme: InterpolationScheme
    map: MapSystem

    def __call__(self, x) -> np.ndarray:
        return evaluate_field(self.map, x, self.scheme)

    @property
    def order(self) -> int:
        return self.scheme.n


def evaluate_field(system: MapSystem, x, scheme: InterpolationScheme) -> np.ndarray:
    """X_n(x) = sum_k p_nk F^k(x) over the scheme's stencil.

    Since the weights sum to zero, the sum is taken over the displacements
    F^k(x) - x; this keeps the field exactly zero on the identity map and
    well conditioned near it.
    """
    if scheme.n0 > 0 and not system.has_inverse:
        raise CapabilityError(
            f"scheme with backward offset {scheme.n0} needs an inverse map"
        )
    orbit = orbit_segment(system, x, -scheme.n0, scheme.n - scheme.n0)
    base = orbit[0]
    out = np.zeros(system.dimension)
    for k, w in zip(scheme.offsets, scheme.float_weights):
        if w != 0.0 and k != 0:
            out += w * (orbit[k] - base)
    return out


def _difference_table(points: list[np.ndarray], depth: int) -> list[list[np.ndarray]]:
    """Forward differences by the recursion D_k(x) = D_{k-1}(F x) - D_{k-1}(x)
    laid out over consecutive orbit points.  Row k has len(points)-k entries;
    on the identity map every row past the zeroth is exactly zero."""
    table = [points]
    for k in range(1, depth + 1):
        prev = table[-1]
        table.append([prev[i + 1] - prev[i] for i in range(len(prev) - 1)])
    return table


def newton_forward_field(system: MapSystem, x, m: int) -> np.ndarray:
    """X_m(x) = sum_{k=1}^m (-1)^(k-1)/k Delta_k(x) from forward finite
    differences Delta_k(x) = Delta_{k-1}(F(x)) - Delta_{k-1}(x).

    Agrees with the Lagrange evaluation at (n0, n) = (0, m); kept as an
    independent formula so the two can cross-check each other.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    orbit = orbit_segment(system, x, 0, m)
    table = _difference_table([orbit[k] for k in range(m + 1)], m)
    out = np.zeros(system.dimension)
    for k in range(1, m + 1):
        out += ((-1) ** (k - 1) / k) * table[k][0]
    return out


def stirling_symmetric_field(system: MapSystem, x, m: int) -> np.ndarray:
    """Symmetric interpolating field of order 2m,

        X_2m(x) = sum_{k=0}^{m-1} (-1)^k (k!)^2/(2k+1)!
                  * (D^(2k+1)(x_{-k-1}) + D^(2k+1)(x_{-k})) / 2,

    with D the forward difference along the orbit x_j = F^j(x).  Agrees
    with the Lagrange evaluation at (n0, n) = (m, 2m).
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    if not system.has_inverse:
        raise CapabilityError("symmetric scheme needs an inverse map")
    orbit = orbit_segment(system, x, -m, m)
    table = _difference_table([orbit[k] for k in range(-m, m + 1)], 2 * m)
    out = np.zeros(system.dimension)
    for k in range(m):
        coeff = (-1) ** k * math.factorial(k) ** 2 / math.factorial(2 * k + 1)
        # D^(2k+1) at orbit offset j sits at table[2k+1][j + m]
        pair = table[2 * k + 1][m - k - 1] + table[2 * k + 1][m - k]
        out += coeff * 0.5 * pair
    return out


# ----------------------------------------------------------------------
# Symbolic evaluation on jets
# ----------------------------------------------------------------------
def invert_jet(jet: Sequence[TruncatedSeries]) -> list[TruncatedSeries]:
    """Inverse map jet by fixed-point iteration on j o g = id.

    Writing j = A u + N with A the linear part in the phase variables at
    zero parameter order, iterate g <- A^{-1} (id - N o g); each pass fixes
    one more total degree, so at most cap_total passes are needed.
    """
    phase = len(jet)
    num_vars = jet[0].num_vars
    caps = jet[0].caps
    zero = (0,) * num_vars

    a_rows = []
    for comp in jet:
        if comp.coefficient(zero) != 0:
            raise DomainError("jet does not fix the origin")
        row = []
        for i in range(phase):
            e = [0] * num_vars
            e[i] = 1
            row.append(comp.coefficient(tuple(e)))
        a_rows.append(row)
    a_inv = _invert_rational_matrix(a_rows)

    ident = identity_jet(phase, num_vars, caps)
    linear = [
        sum(
            (TruncatedSeries.variable(i, num_vars, caps).scaled(a_rows[r][i])
             for i in range(phase)),
            TruncatedSeries.zero(num_vars, caps),
        )
        for r in range(phase)
    ]
    tail = [jet[r] - linear[r] for r in range(phase)]

    def apply_a_inv(vec: Sequence[TruncatedSeries]) -> list[TruncatedSeries]:
        return [
            sum(
                (vec[i].scaled(a_inv[r][i]) for i in range(phase)),
                TruncatedSeries.zero(num_vars, caps),
            )
            for r in range(phase)
        ]

    g = apply_a_inv(ident)
    for _ in range(caps.total):
        correction = compose_map_jets(tail, g)
        g_next = apply_a_inv([ident[r] - correction[r] for r in range(phase)])
        if g_next == g:
            break
        g = g_next
    return g


def _invert_rational_matrix(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(rows)
    aug = [list(map(Fraction, rows[i])) + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise DomainError("linear part of the jet is not invertible")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def jet_interpolating_field(
    jet: Sequence[TruncatedSeries],
    scheme: InterpolationScheme,
    inverse_jet: Sequence[TruncatedSeries] | None = None,
) -> JetVectorField:
    """Exact-rational interpolating field sum_k p_nk jet^(o k).

    Negative stencil offsets use ``inverse_jet`` when supplied (e.g. the
    reversor-conjugate inverse of the Henon map) and fixed-point jet
    inversion otherwise.
    """
    phase = len(jet)
    num_vars = jet[0].num_vars
    caps = jet[0].caps
    zero = (0,) * num_vars
    for comp in jet:
        if comp.coefficient(zero) != 0:
            raise DomainError("jet does not fix the origin")

    need_backward = scheme.n0 > 0
    if need_backward and inverse_jet is None:
        inverse_jet = invert_jet(jet)

    powers: dict[int, list[TruncatedSeries]] = {0: identity_jet(phase, num_vars, caps)}

    def jet_power(k: int) -> list[TruncatedSeries]:
        if k not in powers:
            if k > 0:
                powers[k] = compose_map_jets(jet_power(k - 1), jet)
            else:
                powers[k] = compose_map_jets(jet_power(k + 1), inverse_jet)
        return powers[k]

    comps = [TruncatedSeries.zero(num_vars, caps) for _ in range(phase)]
    for k, w in zip(scheme.offsets, scheme.weights):
        if w == 0:
            continue
        pk = jet_power(k)
        comps = [acc + pk[i].scaled(w) for i, acc in enumerate(comps)]
    return JetVectorField(comps)


def formal_interpolator_coefficients(
    family_jet: Sequence[TruncatedSeries],
    order: int,
    eps_var: int | None = None,
) -> list[JetVectorField]:
    """Polynomial-in-eps coefficients g_0..g_{order-1} of the unique field
    whose time-one flow matches a tangent-to-identity family to O(eps^order).

    Extracted as the eps-Taylor coefficients of the forward interpolating
    field of order ``order``: the eps^k coefficient of X_m equals g_{k-1}
    for 1 <= k <= m.  The family jet must reduce to the identity at eps = 0.
    """
    phase = len(family_jet)
    num_vars = family_jet[0].num_vars
    if eps_var is None:
        eps_var = num_vars - 1
    ident = identity_jet(phase, num_vars, family_jet[0].caps)
    for comp, idc in zip(family_jet, ident):
        if comp.select_var_degree(eps_var, 0) != idc:
            raise DomainError("family is not tangent to the identity at eps = 0")

    field = jet_interpolating_field(family_jet, forward_scheme(order))
    out = []
    for k in range(1, order + 1):
        comps = []
        for c in field.components:
            picked = c.select_var_degree(eps_var, k)
            stripped = TruncatedSeries(
                c.num_vars,
                picked.caps,
                {e[:eps_var] + (0,) + e[eps_var + 1:]: v for e, v in picked.terms.items()},
            )
            comps.append(stripped.drop_variable(eps_var))
        out.append(JetVectorField(comps))
    return out
