"""Exact truncated multivariate power-series arithmetic over the rationals.

A series is a sparse map from exponent vectors to ``fractions.Fraction``
coefficients, truncated by a total-degree cap and optional per-variable
caps.  All arithmetic is exact; no floating point enters until a series is
explicitly evaluated at a numeric point.

  terms = {(2, 1, 0): Fraction(-17, 3), ...}   # -17/3 * x^2 y

The truncation region (total degree <= cap plus per-variable bounds) is
downward closed, so sums, products and compositions of series that are
exact on the region stay exact on it.  Composition additionally requires
every inner series to have a zero constant term (or an explicit opt-in),
otherwise correctness beyond the cap cannot be guaranteed.

Canonical form: no zero coefficients, no terms outside the truncation
region, storage ordered graded-lexicographically.  Two series are equal
iff their variable counts and term maps are equal.  Instances are
immutable after construction; every operation returns a new series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatchError, DomainError

Exponent = tuple[int, ...]

#: Exact rational coefficient type.  ``fractions.Fraction`` already keeps
#: lowest terms and a positive denominator, which is all the invariants ask.
Rational = Fraction


@dataclass(frozen=True)
class Caps:
    """Truncation region: total degree <= ``total`` and, where given,
    exponent of variable i <= ``per_var[i]`` (None = unconstrained)."""

    total: int
    per_var: tuple[int | None, ...] | None = None

    def admits(self, exp: Exponent) -> bool:
        if sum(exp) > self.total:
            return False
        if self.per_var is not None:
            for e, cap in zip(exp, self.per_var):
                if cap is not None and e > cap:
                    return False
        return True

    def merged(self, other: "Caps") -> "Caps":
        """Intersection of two truncation regions."""
        total = min(self.total, other.total)
        if self.per_var is None and other.per_var is None:
            return Caps(total)
        a = self.per_var or (None,) * len(other.per_var)
        b = other.per_var or (None,) * len(self.per_var)
        per_var = tuple(
            ca if cb is None else cb if ca is None else min(ca, cb)
            for ca, cb in zip(a, b)
        )
        return Caps(total, per_var)

    def bumped(self, delta_total: int, var_deltas: Mapping[int, int] | None = None) -> "Caps":
        per_var = self.per_var
        if per_var is not None and var_deltas:
            per_var = tuple(
                c if c is None else c + var_deltas.get(i, 0)
                for i, c in enumerate(per_var)
            )
        return Caps(self.total + delta_total, per_var)


def _grlex_key(exp: Exponent) -> tuple:
    return (sum(exp), exp)


class TruncatedSeries:
    """Immutable truncated power series with exact rational coefficients."""

    __slots__ = ("num_vars", "caps", "terms")

    def __init__(
        self,
        num_vars: int,
        caps: Caps,
        terms: Mapping[Exponent, Fraction | int] | None = None,
    ):
        if num_vars < 1:
            raise DomainError("a series needs at least one variable")
        if caps.per_var is not None and len(caps.per_var) != num_vars:
            raise DimensionMismatchError(
                f"per-variable caps {caps.per_var} do not match {num_vars} variables"
            )
        clean: dict[Exponent, Fraction] = {}
        if terms:
            for exp, coeff in sorted(terms.items(), key=lambda t: _grlex_key(t[0])):
                if len(exp) != num_vars:
                    raise DimensionMismatchError(
                        f"exponent {exp} does not match {num_vars} variables"
                    )
                c = Fraction(coeff)
                if c != 0 and caps.admits(exp):
                    clean[exp] = c
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "caps", caps)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):  # pragma: no cover - guard only
        raise AttributeError("TruncatedSeries is immutable")

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------
    @classmethod
    def zero(cls, num_vars: int, caps: Caps) -> "TruncatedSeries":
        return cls(num_vars, caps)

    @classmethod
    def constant(cls, value, num_vars: int, caps: Caps) -> "TruncatedSeries":
        return cls(num_vars, caps, {(0,) * num_vars: Fraction(value)})

    @classmethod
    def variable(cls, index: int, num_vars: int, caps: Caps) -> "TruncatedSeries":
        if not 0 <= index < num_vars:
            raise DomainError(f"variable index {index} out of range")
        exp = [0] * num_vars
        exp[index] = 1
        return cls(num_vars, caps, {tuple(exp): Fraction(1)})

    # ------------------------------------------------------------------
    # ring structure
    # ------------------------------------------------------------------
    def _check_compatible(self, other: "TruncatedSeries") -> None:
        if self.num_vars != other.num_vars:
            raise DimensionMismatchError(
                f"series in {self.num_vars} and {other.num_vars} variables"
            )

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._check_compatible(other)
        caps = self.caps.merged(other.caps)
        out = dict(self.terms)
        for exp, c in other.terms.items():
            out[exp] = out.get(exp, Fraction(0)) + c
        return TruncatedSeries(self.num_vars, caps, out)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(
            self.num_vars, self.caps, {e: -c for e, c in self.terms.items()}
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scaled(other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._check_compatible(other)
        caps = self.caps.merged(other.caps)
        out: dict[Exponent, Fraction] = {}
        for ea, ca in self.terms.items():
            da = sum(ea)
            for eb, cb in other.terms.items():
                if da + sum(eb) > caps.total:
                    continue
                exp = tuple(x + y for x, y in zip(ea, eb))
                out[exp] = out.get(exp, Fraction(0)) + ca * cb
        return TruncatedSeries(self.num_vars, caps, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scaled(other)
        return NotImplemented

    def scaled(self, factor) -> "TruncatedSeries":
        f = Fraction(factor)
        return TruncatedSeries(
            self.num_vars, self.caps, {e: f * c for e, c in self.terms.items()}
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.num_vars == other.num_vars and self.terms == other.terms

    __hash__ = None  # mutable dict inside; identity-free equality only

    def __bool__(self) -> bool:
        return bool(self.terms)

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------
    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exp), Fraction(0))

    def valuation(self, in_vars: Iterable[int] | None = None) -> int | float:
        """Smallest degree (in the selected variables) of any stored term;
        ``math.inf`` for the zero series."""
        if not self.terms:
            return math.inf
        if in_vars is None:
            return min(sum(e) for e in self.terms)
        sel = sorted(set(in_vars))
        return min(sum(e[i] for i in sel) for e in self.terms)

    def select_var_degree(self, var: int, degree: int) -> "TruncatedSeries":
        """Sub-series of terms whose exponent in ``var`` equals ``degree``."""
        picked = {e: c for e, c in self.terms.items() if e[var] == degree}
        return TruncatedSeries(self.num_vars, self.caps, picked)

    def truncated(self, caps: Caps) -> "TruncatedSeries":
        return TruncatedSeries(self.num_vars, self.caps.merged(caps), self.terms)

    def drop_variable(self, var: int) -> "TruncatedSeries":
        """Remove a variable that no stored term uses (e.g. after selecting
        the coefficient of a parameter power)."""
        if any(e[var] != 0 for e in self.terms):
            raise DomainError(f"variable {var} still occurs in the series")
        per_var = self.caps.per_var
        if per_var is not None:
            per_var = tuple(c for i, c in enumerate(per_var) if i != var)
        caps = Caps(self.caps.total, per_var)
        terms = {e[:var] + e[var + 1:]: c for e, c in self.terms.items()}
        return TruncatedSeries(self.num_vars - 1, caps, terms)

    # ------------------------------------------------------------------
    # calculus
    # ------------------------------------------------------------------
    def partial(self, var: int) -> "TruncatedSeries":
        """Exact partial derivative; total cap drops by one."""
        out: dict[Exponent, Fraction] = {}
        for exp, c in self.terms.items():
            k = exp[var]
            if k == 0:
                continue
            e = list(exp)
            e[var] = k - 1
            out[tuple(e)] = c * k
        return TruncatedSeries(self.num_vars, self.caps.bumped(-1, {var: -1}), out)

    def compose(
        self,
        inner: Sequence["TruncatedSeries"],
        allow_constant: bool = False,
    ) -> "TruncatedSeries":
        """Substitute ``inner[i]`` for variable i.

        Every inner series must have a zero constant term unless
        ``allow_constant`` is set; with a nonzero constant term the result
        is only correct up to the truncation cap (infinitely many powers of
        the outer series would otherwise contribute).
        """
        if len(inner) != self.num_vars:
            raise DimensionMismatchError(
                f"{len(inner)} inner series for {self.num_vars} outer variables"
            )
        n_out = inner[0].num_vars
        caps = inner[0].caps
        for g in inner[1:]:
            if g.num_vars != n_out:
                raise DimensionMismatchError("inner series disagree on variables")
            caps = caps.merged(g.caps)
        caps = Caps(min(caps.total, self.caps.total), caps.per_var)
        zero_exp = (0,) * n_out
        vals = []
        for g in inner:
            if not allow_constant and g.coefficient(zero_exp) != 0:
                raise DomainError(
                    "inner series has a nonzero constant term "
                    "(pass allow_constant=True to accept cap-limited accuracy)"
                )
            vals.append(0 if g.coefficient(zero_exp) != 0 else max(g.valuation(), 1))

        one = TruncatedSeries.constant(1, n_out, caps)
        powers: list[list[TruncatedSeries]] = [[one] for _ in inner]

        def power(i: int, k: int) -> TruncatedSeries:
            tab = powers[i]
            while len(tab) <= k:
                tab.append(tab[-1] * inner[i])
            return tab[k]

        out: dict[Exponent, Fraction] = {}
        for exp, coeff in self.terms.items():
            if sum(e * v for e, v in zip(exp, vals)) > caps.total:
                continue
            prod: TruncatedSeries | None = None
            for i, e in enumerate(exp):
                if e == 0:
                    continue
                p = power(i, e)
                prod = p if prod is None else prod * p
            if prod is None:
                prod = one
            for e_out, c_out in prod.terms.items():
                out[e_out] = out.get(e_out, Fraction(0)) + coeff * c_out
        return TruncatedSeries(n_out, caps, out)

    # ------------------------------------------------------------------
    # numeric evaluation
    # ------------------------------------------------------------------
    def evaluate(self, point: Sequence[float]) -> float:
        """Double-precision value via graded monomial evaluation with
        per-variable power tables (error budget ~1e-14 per term)."""
        if len(point) != self.num_vars:
            raise DimensionMismatchError("point dimension mismatch")
        max_exp = [0] * self.num_vars
        for exp in self.terms:
            for i, e in enumerate(exp):
                if e > max_exp[i]:
                    max_exp[i] = e
        pows = []
        for i, m in enumerate(max_exp):
            col = [1.0] * (m + 1)
            for k in range(1, m + 1):
                col[k] = col[k - 1] * float(point[i])
            pows.append(col)
        total = 0.0
        for exp, coeff in self.terms.items():
            mono = float(coeff)
            for i, e in enumerate(exp):
                if e:
                    mono *= pows[i][e]
            total += mono
        return total

    # ------------------------------------------------------------------
    # presentation
    # ------------------------------------------------------------------
    def __repr__(self) -> str:
        return (
            f"TruncatedSeries({self.num_vars} vars, cap {self.caps.total}, "
            f"{len(self.terms)} terms)"
        )

    def __str__(self) -> str:
        return format_series(self)


_DEFAULT_NAMES = {1: ("x",), 2: ("x", "y"), 3: ("x", "y", "eps")}


def default_var_names(num_vars: int) -> tuple[str, ...]:
    return _DEFAULT_NAMES.get(num_vars, tuple(f"x{i}" for i in range(num_vars)))


def format_series(s: TruncatedSeries, names: Sequence[str] | None = None) -> str:
    if not s.terms:
        return "0"
    names = names or default_var_names(s.num_vars)
    parts = []
    for exp in sorted(s.terms, key=_grlex_key):
        c = s.terms[exp]
        factors = [str(c)]
        for name, e in zip(names, exp):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        parts.append("*".join(factors))
    return " + ".join(parts).replace("+ -", "- ")


# ----------------------------------------------------------------------
# JSON serialization (decimal-string numerators/denominators)
# ----------------------------------------------------------------------
def series_to_json_dict(s: TruncatedSeries, names: Sequence[str] | None = None) -> dict:
    names = names or default_var_names(s.num_vars)
    per_var = s.caps.per_var
    return {
        "vars": list(names),
        "cap_total": s.caps.total,
        "cap_per_var": list(per_var) if per_var is not None else [None] * s.num_vars,
        "terms": [
            {
                "exp": list(exp),
                "num": str(s.terms[exp].numerator),
                "den": str(s.terms[exp].denominator),
            }
            for exp in sorted(s.terms, key=_grlex_key)
        ],
    }


def series_from_json_dict(data: Mapping) -> TruncatedSeries:
    num_vars = len(data["vars"])
    per_var = data.get("cap_per_var")
    if per_var is not None and all(c is None for c in per_var):
        per_var = None
    caps = Caps(int(data["cap_total"]), tuple(per_var) if per_var else None)
    terms = {
        tuple(t["exp"]): Fraction(int(t["num"]), int(t["den"]))
        for t in data["terms"]
    }
    return TruncatedSeries(num_vars, caps, terms)


# ----------------------------------------------------------------------
# Vector fields of series
# ----------------------------------------------------------------------
class JetVectorField:
    """A vector field whose components are truncated series.

    Components correspond to phase variables 0..d-1; any extra series
    variables (beyond ``len(components)``) are passive parameters.
    """

    __slots__ = ("components",)

    def __init__(self, components: Sequence[TruncatedSeries]):
        components = list(components)
        if not components:
            raise DomainError("a vector field needs at least one component")
        n = components[0].num_vars
        caps = components[0].caps
        for c in components[1:]:
            if c.num_vars != n or c.caps != caps:
                raise DimensionMismatchError(
                    "all components must share variables and truncation caps"
                )
        object.__setattr__(self, "components", tuple(components))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("JetVectorField is immutable")

    @property
    def phase_dim(self) -> int:
        return len(self.components)

    @property
    def num_vars(self) -> int:
        return self.components[0].num_vars

    @property
    def caps(self) -> Caps:
        return self.components[0].caps

    def __eq__(self, other) -> bool:
        if not isinstance(other, JetVectorField):
            return NotImplemented
        return self.components == other.components

    __hash__ = None

    def __add__(self, other: "JetVectorField") -> "JetVectorField":
        return JetVectorField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "JetVectorField") -> "JetVectorField":
        return JetVectorField([a - b for a, b in zip(self.components, other.components)])

    def scaled(self, factor) -> "JetVectorField":
        return JetVectorField([c.scaled(factor) for c in self.components])

    def evaluate(self, point: Sequence[float]):
        return [c.evaluate(point) for c in self.components]

    def __repr__(self) -> str:
        return f"JetVectorField({self.phase_dim} components, {self.num_vars} vars)"


def identity_jet(phase_dim: int, num_vars: int, caps: Caps) -> list[TruncatedSeries]:
    """Map jet of the identity: one series per phase variable."""
    return [TruncatedSeries.variable(i, num_vars, caps) for i in range(phase_dim)]


def compose_map_jets(
    outer: Sequence[TruncatedSeries], inner: Sequence[TruncatedSeries]
) -> list[TruncatedSeries]:
    """Composition of two map jets (phase components substituted, parameter
    variables passed through unchanged)."""
    num_vars = inner[0].num_vars
    caps = inner[0].caps
    phase = len(outer)
    if len(inner) != phase:
        raise DimensionMismatchError("map jets disagree on phase dimension")
    subst = list(inner) + [
        TruncatedSeries.variable(i, num_vars, caps) for i in range(phase, num_vars)
    ]
    return [f.compose(subst) for f in outer]


def homotopy_hamiltonian(field: JetVectorField) -> TruncatedSeries:
    """Hamiltonian part of a planar field by the radial homotopy integral
    h(x, y) = int_0^1 X(t x, t y) . (y, -x) dt, parameters held fixed.

    Monomial rule: a term c x^a y^b p of X^1 contributes c/(a+b+1) x^a y^(b+1) p,
    a term of X^2 contributes -c/(a+b+1) x^(a+1) y^b p.  The phase cap grows
    by one so the top field order is retained.
    """
    if field.phase_dim != 2:
        raise DomainError("homotopy integral implemented for 2 phase variables")
    x1, x2 = field.components
    caps = x1.caps.bumped(+1, {0: +1, 1: +1})
    out: dict[Exponent, Fraction] = {}
    for sign, comp, bump_var in ((1, x1, 1), (-1, x2, 0)):
        for exp, c in comp.terms.items():
            d = exp[0] + exp[1]
            e = list(exp)
            e[bump_var] += 1
            key = tuple(e)
            out[key] = out.get(key, Fraction(0)) + Fraction(sign, 1) * c / (d + 1)
    return TruncatedSeries(x1.num_vars, caps, out)


def divergence(field: JetVectorField) -> TruncatedSeries:
    """Exact divergence in the phase variables, truncated at cap-1."""
    total = field.components[0].partial(0)
    for i in range(1, field.phase_dim):
        total = total + field.components[i].partial(i)
    return total


def hamiltonian_field(h: TruncatedSeries) -> JetVectorField:
    """Planar Hamiltonian vector field (dh/dy, -dh/dx) of a series."""
    dx = h.partial(0)
    dy = h.partial(1)
    return JetVectorField([dy, -dx])
