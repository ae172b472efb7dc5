"""Discrete-time maps: numeric evaluation, exact inverses, jet extraction.

Ships the conservative Henon model written as

    H_c : (x, y) -> (c (1 - (x+1)^2) + 2x + y, -x)

together with two analytic reference maps whose exact embedding flows are
known in closed form (a scalar exponential and a planar rotation), used as
oracles by the approximation-order tests.  The Henon inverse is the exact
polynomial map R o H_c o R with the reversor R(x, y) = (-y, -x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import CapabilityError, DimensionMismatchError, DomainError, EscapeError
from .jets import Caps, TruncatedSeries, compose_map_jets, identity_jet

Point = np.ndarray

#: Denominator bound when lifting non-rational jet coefficients (cos/sin/exp)
#: into exact rationals.  Symbolic exactness is only ever claimed for maps
#: with truly rational coefficients (Henon); lifted jets carry this bound.
LIFT_MAX_DENOMINATOR = 10**12

#: Numeric tolerance at which forward o inverse = id is enforced (the
#: polynomial reversor inverse is exact in real arithmetic; this absorbs
#: double-precision rounding).
INVERSE_TOLERANCE = 1e-12


def lift_to_rational(value: float) -> Fraction:
    """Best rational approximation with denominator <= LIFT_MAX_DENOMINATOR."""
    return Fraction(value).limit_denominator(LIFT_MAX_DENOMINATOR)


@dataclass(frozen=True)
class MapSystem:
    """A discrete-time map with optional inverse, jet builder and oracles.

    ``forward`` and ``inverse`` act on 1-d float arrays of length
    ``dimension``.  ``jet_builder(center, caps)`` returns the displacement
    jet about ``center``: the series of F(center + u) - center in the phase
    variables u (plus any parameter variables), so a jet about a fixed
    point has zero constant terms and can be iterated symbolically.
    ``embedding_field``/``exact_flow``, when present, give the exact
    autonomous field the map embeds into and its time-t flow (analytic
    oracle models only).
    """

    name: str
    dimension: int
    forward: Callable[[Point], Point]
    inverse: Callable[[Point], Point] | None = None
    jet_builder: Callable[[Sequence[float], Caps], list[TruncatedSeries]] | None = None
    parameters: dict[str, float] = field(default_factory=dict)
    embedding_field: Callable[[Point], Point] | None = None
    exact_flow: Callable[[Point, float], Point] | None = None

    @property
    def has_inverse(self) -> bool:
        return self.inverse is not None


def _as_point(p) -> Point:
    a = np.asarray(p, dtype=float).reshape(-1)
    return a


def iterate(system: MapSystem, p, k: int) -> Point:
    """k-th iterate of the map.  Negative k needs an inverse; non-finite
    intermediate values raise EscapeError with the last finite index."""
    x = _as_point(p)
    if x.size != system.dimension:
        raise DimensionMismatchError(
            f"point of dimension {x.size} for a {system.dimension}-d map"
        )
    if k < 0 and system.inverse is None:
        raise CapabilityError(f"map '{system.name}' has no inverse")
    step = system.forward if k >= 0 else system.inverse
    sign = 1 if k >= 0 else -1
    for i in range(abs(k)):
        try:
            x_next = step(x)
        except OverflowError:
            raise EscapeError(
                f"orbit escaped after {sign * i} iterates", sign * i, x
            ) from None
        if not np.all(np.isfinite(x_next)):
            raise EscapeError(f"orbit escaped after {sign * i} iterates", sign * i, x)
        x = x_next
    return x


def orbit_segment(system: MapSystem, p, lo: int, hi: int) -> dict[int, Point]:
    """Orbit points F^k(p) for k = lo..hi, computed once in each direction."""
    if lo > hi:
        raise DomainError("empty orbit range")
    x0 = _as_point(p)
    orbit = {0: x0}
    x = x0
    for k in range(1, hi + 1):
        x = iterate(system, x, 1)
        orbit[k] = x
    x = x0
    for k in range(-1, lo - 1, -1):
        x = iterate(system, x, -1)
        orbit[k] = x
    return {k: orbit[k] for k in range(lo, hi + 1)}


def iterated_map(system: MapSystem, power: int) -> MapSystem:
    """The map F^power as a MapSystem (power >= 1); jets iterate symbolically."""
    if power < 1:
        raise DomainError("power must be >= 1")
    if power == 1:
        return system

    def fwd(p: Point) -> Point:
        return iterate(system, p, power)

    inv = None
    if system.inverse is not None:
        def inv(p: Point) -> Point:
            return iterate(system, p, -power)

    jet_builder = None
    if system.jet_builder is not None:
        def jet_builder(center, caps):
            return jet_iterate(system.jet_builder(center, caps), power)

    emb = None
    if system.embedding_field is not None:
        def emb(p: Point) -> Point:
            return power * system.embedding_field(p)

    flow = None
    if system.exact_flow is not None:
        def flow(p: Point, t: float) -> Point:
            return system.exact_flow(p, power * t)

    return MapSystem(
        name=f"{system.name}^{power}",
        dimension=system.dimension,
        forward=fwd,
        inverse=inv,
        jet_builder=jet_builder,
        parameters=dict(system.parameters),
        embedding_field=emb,
        exact_flow=flow,
    )


def jet_of_map(system: MapSystem, center: Sequence[float], caps: Caps) -> list[TruncatedSeries]:
    """Displacement jet of the map about ``center`` (see MapSystem)."""
    if system.jet_builder is None:
        raise CapabilityError(f"map '{system.name}' has no closed-form jet")
    return system.jet_builder(center, caps)


def jet_iterate(jet: Sequence[TruncatedSeries], k: int) -> list[TruncatedSeries]:
    """k-fold self-composition of a map jet, truncating after every step.

    The jet must fix the origin (zero constant terms), otherwise the
    truncated composition is not well defined to the cap.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    zero = (0,) * jet[0].num_vars
    for comp in jet:
        if comp.coefficient(zero) != 0:
            raise DomainError("jet does not fix the origin")
    result = list(jet)
    for _ in range(k - 1):
        result = compose_map_jets(result, jet)
    return result


# ----------------------------------------------------------------------
# Henon model
# ----------------------------------------------------------------------
def henon_forward(p, c: float) -> Point:
    x, y = float(p[0]), float(p[1])
    return np.array([c * (1.0 - (x + 1.0) ** 2) + 2.0 * x + y, -x])


def reversor(p) -> Point:
    """R(x, y) = (-y, -x); conjugates the Henon map to its inverse."""
    return np.array([-float(p[1]), -float(p[0])])


def henon_inverse(p, c: float) -> Point:
    return reversor(henon_forward(reversor(p), c))


HENON_FIXED_POINTS = (np.array([0.0, 0.0]), np.array([-2.0, 2.0]))


def _check_caps_arity(caps: Caps, num_vars: int, what: str) -> None:
    if caps.per_var is not None and len(caps.per_var) != num_vars:
        raise DimensionMismatchError(
            f"{what} jet uses {num_vars} series variables, "
            f"per-variable caps have {len(caps.per_var)}"
        )


def _henon_jet(center, caps: Caps, eps: Fraction, symbolic_eps: bool) -> list[TruncatedSeries]:
    """Exact jet of H_(1+eps) about ``center`` in displacement variables
    (u, v); with ``symbolic_eps`` a third series variable holds eps."""
    num_vars = 3 if symbolic_eps else 2
    _check_caps_arity(caps, num_vars, "henon")
    a = Fraction(center[0]) if isinstance(center[0], (int, Fraction)) else lift_to_rational(float(center[0]))
    b = Fraction(center[1]) if isinstance(center[1], (int, Fraction)) else lift_to_rational(float(center[1]))

    u = TruncatedSeries.variable(0, num_vars, caps)
    v = TruncatedSeries.variable(1, num_vars, caps)
    one = TruncatedSeries.constant(1, num_vars, caps)
    if symbolic_eps:
        c_series = one + TruncatedSeries.variable(2, num_vars, caps)
    else:
        c_series = TruncatedSeries.constant(1 + eps, num_vars, caps)
    xa = u + one.scaled(a)          # x = a + u
    yb = v + one.scaled(b)          # y = b + v
    w = xa + one                    # x + 1
    img1 = c_series * (one - w * w) + xa.scaled(2) + yb
    img2 = -xa
    return [img1 - one.scaled(a), img2 - one.scaled(b)]


def henon_model(eps: float | Fraction = 0.0, symbolic_eps: bool = False) -> MapSystem:
    """Conservative Henon map with c = 1 + eps.

    With ``symbolic_eps`` the jet builder produces series in (x, y, eps)
    so the parameter stays a formal variable; numeric evaluation always
    uses the concrete eps value.
    """
    eps_frac = Fraction(eps) if isinstance(eps, (int, Fraction)) else lift_to_rational(float(eps))
    c = 1.0 + float(eps)

    return MapSystem(
        name="henon",
        dimension=2,
        forward=lambda p: henon_forward(p, c),
        inverse=lambda p: henon_inverse(p, c),
        jet_builder=lambda center, caps: _henon_jet(center, caps, eps_frac, symbolic_eps),
        parameters={"eps": float(eps)},
    )


def reversor_conjugate_jet(jet: Sequence[TruncatedSeries]) -> list[TruncatedSeries]:
    """Exact inverse jet of a reversible planar map: R o jet o R with
    R(x, y) = (-y, -x).  Parameter variables pass through."""
    if len(jet) != 2:
        raise DomainError("reversor conjugation is planar")
    num_vars = jet[0].num_vars
    caps = jet[0].caps
    rx = -TruncatedSeries.variable(1, num_vars, caps)
    ry = -TruncatedSeries.variable(0, num_vars, caps)
    inner = compose_map_jets(jet, [rx, ry])
    return [-inner[1], -inner[0]]


# ----------------------------------------------------------------------
# Analytic oracle models
# ----------------------------------------------------------------------
def exp_scalar_model(s: float) -> MapSystem:
    """x -> e^s x; embeds exactly into the flow of s*x."""
    factor = math.exp(s)
    inv_factor = math.exp(-s)

    def jet_builder(center, caps: Caps):
        _check_caps_arity(caps, 1, "exp_scalar")
        u = TruncatedSeries.variable(0, 1, caps)
        return [u.scaled(lift_to_rational(factor))]

    return MapSystem(
        name="exp_scalar",
        dimension=1,
        forward=lambda p: np.array([factor * float(p[0])]),
        inverse=lambda p: np.array([inv_factor * float(p[0])]),
        jet_builder=jet_builder,
        parameters={"s": s},
        embedding_field=lambda p: np.array([s * float(p[0])]),
        exact_flow=lambda p, t: np.array([math.exp(s * t) * float(p[0])]),
    )


def exp_family_jet(caps: Caps) -> list[TruncatedSeries]:
    """Jet of the tangent-to-identity family x -> e^eps x in (x, eps):
    x * sum eps^k / k!."""
    terms = {}
    for k in range(caps.total):
        exp = (1, k)
        if caps.admits(exp):
            terms[exp] = Fraction(1, math.factorial(k))
    return [TruncatedSeries(2, caps, terms)]


def rotation_model(theta: float) -> MapSystem:
    """Planar rotation by theta; embeds into the field theta*(-y, x)."""
    ct, st = math.cos(theta), math.sin(theta)

    def fwd(p: Point) -> Point:
        x, y = float(p[0]), float(p[1])
        return np.array([ct * x - st * y, st * x + ct * y])

    def inv(p: Point) -> Point:
        x, y = float(p[0]), float(p[1])
        return np.array([ct * x + st * y, -st * x + ct * y])

    def jet_builder(center, caps: Caps):
        _check_caps_arity(caps, 2, "rotation")
        c_l, s_l = lift_to_rational(ct), lift_to_rational(st)
        u = TruncatedSeries.variable(0, 2, caps)
        v = TruncatedSeries.variable(1, 2, caps)
        return [u.scaled(c_l) - v.scaled(s_l), u.scaled(s_l) + v.scaled(c_l)]

    def flow(p: Point, t: float) -> Point:
        a = theta * t
        x, y = float(p[0]), float(p[1])
        return np.array([math.cos(a) * x - math.sin(a) * y,
                         math.sin(a) * x + math.cos(a) * y])

    return MapSystem(
        name="rotation",
        dimension=2,
        forward=fwd,
        inverse=inv,
        jet_builder=jet_builder,
        parameters={"theta": theta},
        embedding_field=lambda p: np.array([-theta * float(p[1]), theta * float(p[0])]),
        exact_flow=flow,
    )


def identity_model(dimension: int = 2) -> MapSystem:
    def same(p: Point) -> Point:
        return np.array([float(v) for v in p])

    def jet_builder(center, caps: Caps):
        _check_caps_arity(caps, dimension, "identity")
        return identity_jet(dimension, dimension, caps)

    return MapSystem(
        name="identity",
        dimension=dimension,
        forward=same,
        inverse=same,
        jet_builder=jet_builder,
        parameters={},
        embedding_field=lambda p: np.zeros(dimension),
        exact_flow=lambda p, t: np.array([float(v) for v in p]),
    )


# ----------------------------------------------------------------------
# Registry for CLI / config lookup
# ----------------------------------------------------------------------
def make_model(name: str, **params) -> MapSystem:
    """Model factory by name: henon(eps), rotation(theta), exp_scalar(s),
    identity(dim)."""
    if name == "henon":
        return henon_model(params.get("eps", 0.0))
    if name == "rotation":
        return rotation_model(params.get("theta", 0.1))
    if name == "exp_scalar":
        return exp_scalar_model(params.get("s", 0.1))
    if name == "identity":
        return identity_model(int(params.get("dim", 2)))
    raise DomainError(f"unknown model '{name}' (henon, rotation, exp_scalar, identity)")
