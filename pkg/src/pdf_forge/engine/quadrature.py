"""
Data-adaptive integration grid, composite Simpson integration on it and the
cdf / quantile tables derived from a model density.
"""
import math
import numpy as np
import pandas as pd

from scipy import integrate
from typing import Callable, Optional, Tuple, Union

from pdf_forge.core.exceptions import QuadratureError
from pdf_forge.core.logging import get_logger
from pdf_forge.models.density import CdfTable, GridConfig, QuadratureGrid

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray]

# Relative size of a negative cdf increment still treated as round-off
NEGATIVE_INCREMENT_TOLERANCE = 1e-12
EDGE_MERGE_TOLERANCE = 1e-12


def nominal_bins(n: int, cfg: Optional[GridConfig] = None) -> int:
    """
    Nominal number of integration points M for a sample of size n.

    The "linear" rule is M = floor(M0 + slope * n); the "clamped" rule is
    min(max(floor(slope * n), M0), M_max). Both are capped at M_max.
    """
    cfg = cfg or GridConfig()
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    if cfg.rule == "clamped":
        m = max(math.floor(cfg.slope * n), cfg.base_points)
    else:
        m = math.floor(cfg.base_points + cfg.slope * n)
    return int(min(m, cfg.max_points))


def _subdivide(edges: np.ndarray, dx_max: float) -> np.ndarray:
    gaps = np.diff(edges)
    pieces = np.maximum(np.ceil(gaps / dx_max - EDGE_MERGE_TOLERANCE).astype(np.int64), 1)
    group_start = np.repeat(np.cumsum(pieces) - pieces, pieces)
    offset = np.arange(pieces.sum()) - group_start
    refined = np.repeat(edges[:-1], pieces) + offset * np.repeat(gaps / pieces, pieces)
    return np.append(refined, edges[-1])


def build_grid(x_sorted: np.ndarray, cfg: Optional[GridConfig] = None) -> QuadratureGrid:
    """
    Integration edges placed at every b-th sorted data point, b = floor(N / (M - 1)),
    so dense data gets dense edges. Any gap wider than 2 / (M - 1), including the
    stretches between the outermost data and the interval ends, is split into
    equal pieces no wider than that.
    """
    cfg = cfg or GridConfig()
    x = np.asarray(x_sorted, dtype=np.float64)
    n = x.size
    m = nominal_bins(max(n, 1), cfg)
    dx_max = 2.0 / (m - 1)
    stride = n // (m - 1)

    if stride == 0:
        logger.debug(f"Sample of {n} points is too small for {m} adaptive edges; using a uniform grid")
        return QuadratureGrid(edges=np.linspace(-1.0, 1.0, m), nominal_M=m)

    candidates = x[stride - 1::stride]
    candidates = candidates[(candidates > -1.0) & (candidates < 1.0)]
    edges = np.unique(np.concatenate(([-1.0], candidates, [1.0])))
    keep = np.concatenate(([True], np.diff(edges) > EDGE_MERGE_TOLERANCE))
    keep[-1] = True
    edges = edges[keep]
    # a merge next to +1 may leave the penultimate edge within tolerance of it
    if edges.size > 2 and edges[-1] - edges[-2] <= EDGE_MERGE_TOLERANCE:
        edges = np.delete(edges, -2)

    edges = _subdivide(edges, dx_max)
    edges[0], edges[-1] = -1.0, 1.0
    return QuadratureGrid(edges=edges, nominal_M=m)


def uniform_grid(points: int) -> QuadratureGrid:
    """Equally spaced edges on [-1, 1], used for reference tables and plotting"""
    return QuadratureGrid(edges=np.linspace(-1.0, 1.0, points), nominal_M=points)


def simpson_integrate(grid: QuadratureGrid, f: Union[Callable[[np.ndarray], np.ndarray], np.ndarray]) -> float:
    """
    Composite Simpson rule on unequal intervals over consecutive edge pairs.

    `f` is either a vectorized callable or its values at the grid edges.
    Exact for quadratics on any grid, including the odd trailing interval.
    """
    edges = grid.edges
    values = np.asarray(f(edges) if callable(f) else f, dtype=np.float64)
    if values.shape != edges.shape:
        raise ValueError(f"expected {edges.size} values, got {values.size}")
    finite = np.isfinite(values)
    if not finite.all():
        bad = int(np.argmin(finite))
        raise QuadratureError(f"integrand is {values[bad]!r} at x = {edges[bad]!r}")
    return float(integrate.simpson(values, x=edges))


def cdf_from_values(edges: np.ndarray, pdf_values: np.ndarray) -> np.ndarray:
    """Cumulative Simpson sums of positive density values, rescaled to end at exactly 1"""
    cumulative = integrate.cumulative_simpson(pdf_values, x=edges, initial=0.0)
    total = cumulative[-1]
    if not np.isfinite(total) or total <= 0.0:
        raise QuadratureError(f"cumulative integral is {total!r}")
    us = cumulative / total
    steps = np.diff(us)
    if steps.size and steps.min() < -NEGATIVE_INCREMENT_TOLERANCE:
        bad = int(np.argmin(steps))
        raise QuadratureError(
            f"cdf decreases by {-steps[bad]:.3e} on [{edges[bad]!r}, {edges[bad + 1]!r}]"
        )
    us = np.clip(np.maximum.accumulate(us), 0.0, 1.0)
    us[0], us[-1] = 0.0, 1.0
    return us


def cdf_table(model, grid: QuadratureGrid) -> CdfTable:
    """Tabulate the cdf of a normalized model at every grid edge"""
    from pdf_forge.engine.maxent import density

    pdf_values = density(model, grid.edges)
    return CdfTable(xs=grid.edges, us=cdf_from_values(grid.edges, pdf_values))


def _clamp(values: np.ndarray, lo: float, hi: float, what: str) -> Tuple[np.ndarray, bool]:
    clamped = bool(np.any(values < lo) or np.any(values > hi))
    if clamped:
        logger.warning(f"{what} outside [{lo}, {hi}] clamped to the table range")
        values = np.clip(values, lo, hi)
    return values, clamped


def cdf_eval(table: CdfTable, x: ArrayLike) -> Tuple[ArrayLike, bool]:
    """Piecewise-linear cdf; returns (u, clamped)"""
    values, clamped = _clamp(np.asarray(x, dtype=np.float64), -1.0, 1.0, "x")
    u = np.interp(values, table.xs, table.us)
    return (float(u) if np.ndim(x) == 0 else u), clamped


def quantile_eval(table: CdfTable, u: ArrayLike) -> Tuple[ArrayLike, bool]:
    """
    Piecewise-linear inverse of the cdf table; returns (x, clamped).

    Where the table is flat the leftmost x carrying that cdf value wins.
    """
    values, clamped = _clamp(np.asarray(u, dtype=np.float64), 0.0, 1.0, "u")
    xs, us = table.xs, table.us
    upper = np.clip(np.searchsorted(us, values, side="left"), 0, us.size - 1)
    lower = np.maximum(upper - 1, 0)
    span = us[upper] - us[lower]
    t = np.divide(values - us[lower], span, out=np.ones_like(values), where=span > 0)
    x = np.where(
        (us[upper] == values) | (upper == 0),
        xs[upper],
        xs[lower] + t * (xs[upper] - xs[lower]),
    )
    return (float(x) if np.ndim(u) == 0 else x), clamped


def table_frame(table: CdfTable) -> pd.DataFrame:
    """Two-column (x, u) view for export and plotting"""
    return pd.DataFrame({"x": table.xs, "u": table.us})
