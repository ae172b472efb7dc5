"""Time-one flows of vector fields and map-vs-flow approximation errors.

A single integrator is used throughout: classic fixed-step fourth-order
Runge-Kutta with a Richardson error estimate from a half-resolution run.
The fields in scope are smooth and small, so determinism beats adaptivity;
the estimate feeds an "integrator-limited" flag so integrator noise is
never mistaken for averaging error.  Norms are max-component throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .interpolation import InterpolationScheme, evaluate_field
from .maps import MapSystem, iterate

#: Optimal-order constant 1/(6e) = 0.0613...; the truncation order
#: floor(c0 * delta/eps) + 1 minimizes the uniform error bound for a map
#: eps-close to the identity on a complex delta-neighbourhood.
C0 = 1.0 / (6.0 * math.e)


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 over t in [0, 1]; substeps = 64 keeps the local
    truncation error per unit time below ~1e-13 for the fields in scope."""

    substeps: int = 64

    def __post_init__(self):
        if self.substeps < 1:
            raise DomainError("substeps must be >= 1")


Field = Callable[[np.ndarray], np.ndarray]


def _rk4(field: Field, x: np.ndarray, substeps: int) -> np.ndarray:
    h = 1.0 / substeps
    y = np.asarray(x, dtype=float).copy()
    for _ in range(substeps):
        k1 = np.asarray(field(y))
        k2 = np.asarray(field(y + 0.5 * h * k1))
        k3 = np.asarray(field(y + 0.5 * h * k2))
        k4 = np.asarray(field(y + h * k3))
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def flow_time_one(field: Field, x, cfg: IntegratorConfig = IntegratorConfig()) -> np.ndarray:
    """Time-one image of x under the flow of the field at the configured
    resolution.  Doubling the substeps moves the result by at most ~16x
    the estimate reported by flow_time_one_with_estimate."""
    return _rk4(field, np.asarray(x, dtype=float), cfg.substeps)


def flow_time_one_with_estimate(
    field: Field, x, cfg: IntegratorConfig = IntegratorConfig()
) -> tuple[np.ndarray, float]:
    """Time-one image plus a Richardson error estimate.

    The estimate compares the configured run against a half-resolution
    run: for a fourth-order method |x_h - x_2h| ~ 15 * err(x_h).
    """
    x = np.asarray(x, dtype=float)
    fine = _rk4(field, x, cfg.substeps)
    if cfg.substeps == 1:
        return fine, float("nan")
    coarse = _rk4(field, x, max(1, cfg.substeps // 2))
    estimate = float(np.max(np.abs(fine - coarse))) / 15.0
    return fine, estimate


@dataclass(frozen=True)
class FlowErrorReport:
    """Max-component distance between the time-one flow of an interpolating
    field and the map itself, with integrator reliability flag."""

    m: int
    error: float
    integrator_estimate: float
    integrator_limited: bool

    @property
    def flag(self) -> str:
        return "integrator-limited" if self.integrator_limited else "ok"


def flow_error(
    system: MapSystem,
    x,
    scheme: InterpolationScheme,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> FlowErrorReport:
    """|Phi^1_{X_n}(x) - F(x)| in the max norm for the given scheme.

    The report is flagged integrator-limited unless the integrator estimate
    sits at least a decade below the measured error, so that sub-1e-13
    readings are never attributed to the averaging method alone.
    """
    x = np.asarray(x, dtype=float)

    def field(p: np.ndarray) -> np.ndarray:
        return evaluate_field(system, p, scheme)

    flowed, estimate = flow_time_one_with_estimate(field, x, cfg)
    mapped = iterate(system, x, 1)
    error = float(np.max(np.abs(flowed - mapped)))
    limited = not (estimate < error / 10.0)
    return FlowErrorReport(scheme.n, error, estimate, limited)


def optimal_order_select(ratio: float) -> int:
    """Truncation order floor(c0/ratio) + 1 minimizing the uniform error
    bound, for closeness ratio = eps/delta."""
    if ratio <= 0:
        raise DomainError("ratio must be positive")
    return int(math.floor(C0 / ratio)) + 1
