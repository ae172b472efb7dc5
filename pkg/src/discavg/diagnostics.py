"""Domain-of-validity diagnostics for discrete averaging.

For each phase-space point the profile G(n) = |X_2n - X_(2n+2)|_2 over the
symmetric schemes measures how much the interpolating field still moves
between consecutive orders (Euclidean norm here, matching the published
methodology; everything else in the package uses the max norm).  Inside
the averaging domain the profile first drops, so the minimizing n maps the
region where the approximation holds; outside, n = 1 wins immediately.

Per-point work shares one orbit segment of length 2(n_max+1)+1 across all
orders, and grid scans are embarrassingly parallel with a deterministic
row-major merge, so results are bit-identical at any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EscapeError, InsufficientDataError
from .interpolation import symmetric_scheme
from .maps import MapSystem, iterate

#: G values below this are treated as machine noise: they are clamped for
#: the argmin so sub-precision wiggles cannot promote one order over
#: another.  Saturated ties resolve toward the LARGER order (the profile
#: keeps improving past machine precision there, the published white
#: region); an identically zero profile carries no information at any
#: order and yields n = 1.
G_FLOOR = 1e-15


@lru_cache(maxsize=8)
def _weight_matrix(n_max: int) -> np.ndarray:
    """Rows: padded float weights of X_2n for n = 1..n_max+1 over the
    shared stencil -(n_max+1)..(n_max+1)."""
    half = n_max + 1
    width = 2 * half + 1
    rows = np.zeros((half, width))
    for n in range(1, half + 1):
        scheme = symmetric_scheme(n)
        for k, w in zip(scheme.offsets, scheme.float_weights):
            rows[n - 1, k + half] = w
    return rows


@dataclass(frozen=True)
class GProfile:
    """G(n) for n = 1..n_max; ``escape_index`` is the signed orbit index
    at which the orbit left the domain (None if it never did).  When the
    orbit escapes early the profile is truncated to the usable orders."""

    point: tuple[float, ...]
    n_max: int
    values: tuple[float, ...]
    escape_index: int | None = None

    @property
    def complete(self) -> bool:
        return len(self.values) == self.n_max

    def entries(self) -> list[tuple[int, float]]:
        return [(n + 1, g) for n, g in enumerate(self.values)]


def _orbit_array(system: MapSystem, x, half: int):
    """Orbit F^k(x), k = -half..half, tolerating one-sided escapes.

    Returns (points, lo_ok, hi_ok, escape_index): points is a
    (2*half+1, d) array with NaN rows beyond the escape.
    """
    x0 = np.asarray(x, dtype=float).reshape(-1)
    width = 2 * half + 1
    pts = np.full((width, x0.size), np.nan)
    pts[half] = x0
    hi_ok = lo_ok = 0
    escape = None
    p = x0
    for k in range(1, half + 1):
        try:
            p = iterate(system, p, 1)
        except EscapeError:
            escape = k - 1
            break
        pts[half + k] = p
        hi_ok = k
    p = x0
    for k in range(1, half + 1):
        try:
            p = iterate(system, p, -1)
        except EscapeError:
            if escape is None or k - 1 < abs(escape):
                escape = -(k - 1)
            break
        pts[half - k] = p
        lo_ok = k
    return pts, lo_ok, hi_ok, escape


def g_profile(system: MapSystem, x, n_max: int) -> GProfile:
    """Euclidean jumps between consecutive symmetric orders at one point.

    Fields are evaluated as weighted sums of the displacements
    F^k(x) - x (the weights sum to zero), so the profile of the identity
    map is exactly zero rather than rounding residue.
    """
    half = n_max + 1
    x0 = np.asarray(x, dtype=float).reshape(-1)
    pts, lo_ok, hi_ok, escape = _orbit_array(system, x0, half)
    usable = min(lo_ok, hi_ok) - 1  # G(n) needs the stencil of X_(2n+2)
    usable = max(0, min(usable, n_max))
    weights = _weight_matrix(n_max)
    if usable > 0:
        rel = pts - x0
    values = []
    for n in range(1, usable + 1):
        lo, hi = half - (n + 1), half + (n + 1)
        xa = weights[n - 1, lo:hi + 1] @ rel[lo:hi + 1]
        xb = weights[n, lo:hi + 1] @ rel[lo:hi + 1]
        values.append(float(np.linalg.norm(xa - xb)))
    return GProfile(tuple(x0), n_max, tuple(values), escape)


def select_optimal_order(values, floor: float = G_FLOOR) -> tuple[int, float]:
    """Argmin of a G profile with sub-floor values clamped to the floor.

    Ties between clamped (machine-saturated) values resolve toward the
    larger order: past the precision floor higher orders are still at
    least as good, which is what the published scans color as the
    high-order interior.  An identically zero profile has no information
    at any order and yields n = 1.  Returns (opt_n, raw G at opt_n).
    """
    if not values or all(g == 0.0 for g in values):
        return 1, 0.0
    best_n, best = 1, math.inf
    for n, g in enumerate(values, start=1):
        clamped = max(g, floor)
        if clamped <= best:
            best_n, best = n, clamped
    return best_n, values[best_n - 1]


@dataclass(frozen=True)
class ScanGrid:
    """Per-cell optimal order and minimal G over a rectangular mesh.

    ``opt_n`` is 0 and ``min_g`` NaN on escaped cells (no full orbit of
    length 2(n_max+1)+1 exists there).
    """

    xs: np.ndarray
    ys: np.ndarray
    n_max: int
    opt_n: np.ndarray   # (len(ys), len(xs)) int
    min_g: np.ndarray   # (len(ys), len(xs)) float
    escaped: np.ndarray  # (len(ys), len(xs)) bool

    def records(self):
        """Row-major cell records (y rows ascending, x within each row)."""
        for iy, y in enumerate(self.ys):
            for ix, x in enumerate(self.xs):
                yield (
                    float(x),
                    float(y),
                    int(self.opt_n[iy, ix]),
                    float(self.min_g[iy, ix]),
                    bool(self.escaped[iy, ix]),
                )

    @property
    def non_escaped_cells(self) -> int:
        return int((~self.escaped).sum())


def scan(
    system: MapSystem,
    x_range: tuple[float, float],
    y_range: tuple[float, float],
    resolution: int,
    n_max: int = 10,
    threads: int = 1,
) -> ScanGrid:
    """Optimal-order map over a mesh; deterministic at any thread count."""
    xs = np.linspace(x_range[0], x_range[1], resolution)
    ys = np.linspace(y_range[0], y_range[1], resolution)
    opt = np.zeros((resolution, resolution), dtype=int)
    ming = np.full((resolution, resolution), np.nan)
    esc = np.zeros((resolution, resolution), dtype=bool)

    def do_row(iy: int):
        y = ys[iy]
        row = []
        for x in xs:
            prof = g_profile(system, (x, y), n_max)
            if not prof.complete:
                row.append((0, math.nan, True))
            else:
                n, g = select_optimal_order(prof.values)
                row.append((n, g, False))
        return iy, row

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(do_row, range(resolution)))
    else:
        results = [do_row(iy) for iy in range(resolution)]
    for iy, row in results:
        for ix, (n, g, e) in enumerate(row):
            opt[iy, ix], ming[iy, ix], esc[iy, ix] = n, g, e
    return ScanGrid(xs, ys, n_max, opt, ming, esc)


def four_connected_component(mask: np.ndarray, seeds) -> np.ndarray:
    """Cells reachable from any seed through 4-neighbour steps inside the
    mask (used to delimit the high-order core of a scan)."""
    mask = np.asarray(mask, dtype=bool)
    comp = np.zeros_like(mask)
    stack = [s for s in seeds if mask[s]]
    for s in stack:
        comp[s] = True
    while stack:
        iy, ix = stack.pop()
        for dy, dx in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            jy, jx = iy + dy, ix + dx
            if 0 <= jy < mask.shape[0] and 0 <= jx < mask.shape[1]:
                if mask[jy, jx] and not comp[jy, jx]:
                    comp[jy, jx] = True
                    stack.append((jy, jx))
    return comp


def origin_adjacent_cells(grid: ScanGrid) -> list[tuple[int, int]]:
    """Indices of the grid cells closest to the origin (up to 4)."""
    ix = np.argsort(np.abs(grid.xs))[:2]
    iy = np.argsort(np.abs(grid.ys))[:2]
    return [(int(a), int(b)) for a in iy for b in ix]


# ----------------------------------------------------------------------
# Decay fits
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r2: float
    points_used: int


def decay_fit(points, floor: float = 1e-14) -> DecayFit:
    """Least-squares line through (x, log error), restricted to errors
    above the machine floor.  Integrator-limited entries should be dropped
    by the caller before fitting."""
    usable = [(float(x), float(e)) for x, e in points if e > floor]
    if len(usable) < 3:
        raise InsufficientDataError(
            f"only {len(usable)} usable points above the floor {floor:g}"
        )
    xs = np.array([x for x, _ in usable])
    ls = np.log(np.array([e for _, e in usable]))
    slope, intercept = np.polyfit(xs, ls, 1)
    fitted = slope * xs + intercept
    ss_res = float(np.sum((ls - fitted) ** 2))
    ss_tot = float(np.sum((ls - ls.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return DecayFit(float(slope), float(intercept), r2, len(usable))


def loglog_slope(xs, ys, floor: float = 0.0) -> float:
    """Slope of log ys against log xs (order-of-accuracy measurements)."""
    pairs = [(x, y) for x, y in zip(xs, ys) if y > floor]
    if len(pairs) < 2:
        raise InsufficientDataError("need at least 2 points above the floor")
    lx = np.log([p[0] for p in pairs])
    ly = np.log([p[1] for p in pairs])
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)
