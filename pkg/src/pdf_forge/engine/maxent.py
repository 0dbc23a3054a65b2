"""
The maximum-entropy density p_e(x) = exp[Lambda + sum_j lambda_j T_j(x)] on [-1, 1]
and its transport back to original units.
"""
import json
import numpy as np

from numpy.polynomial import chebyshev
from typing import Optional, Union

from pdf_forge.core.exceptions import InvalidModelError
from pdf_forge.engine.domain import from_unit
from pdf_forge.engine.quadrature import (
    cdf_eval,
    cdf_table,
    quantile_eval,
    simpson_integrate,
    uniform_grid,
)
from pdf_forge.models.density import CdfTable, LagrangeVector, MaxEntModel, QuadratureGrid
from pdf_forge.models.sample import DomainSpec, SymmetryOption

ArrayLike = Union[float, np.ndarray]

DOMAIN_TOLERANCE = 1e-12
REFERENCE_TABLE_POINTS = 8001


def _check_unit(x: np.ndarray) -> np.ndarray:
    if np.any(np.abs(x) > 1.0 + DOMAIN_TOLERANCE):
        raise ValueError("Chebyshev arguments must lie in [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def chebyshev_vector(dimension: int, x: ArrayLike) -> np.ndarray:
    """T_1(x)..T_D(x) by the three-term recurrence; shape (..., D)"""
    if dimension < 0:
        raise ValueError(f"dimension must be nonnegative, got {dimension}")
    values = _check_unit(np.asarray(x, dtype=np.float64))
    return chebyshev.chebvander(values, dimension)[..., 1:]


class ChebyshevBasis:
    """
    T_1..T_D tabulated once on fixed points (grid edges or data) and widened
    on demand as the search adds multipliers.
    """

    def __init__(self, points: np.ndarray, dimension: int = 0):
        self.points = _check_unit(np.asarray(points, dtype=np.float64))
        self._matrix = chebyshev_vector(dimension, self.points)

    def matrix(self, dimension: int) -> np.ndarray:
        if dimension > self._matrix.shape[1]:
            self._matrix = chebyshev_vector(max(dimension, 2 * self._matrix.shape[1]), self.points)
        return self._matrix[:, :dimension]

    def log_density_unnorm(self, lambdas: np.ndarray) -> np.ndarray:
        lambdas = np.asarray(lambdas, dtype=np.float64)
        if lambdas.size == 0:
            return np.zeros(self.points.size)
        return self.matrix(lambdas.size) @ lambdas


def log_density_unnorm(lagrange: LagrangeVector, x: ArrayLike) -> ArrayLike:
    """sum_j lambda_j T_j(x); zero for the uniform model"""
    values = _check_unit(np.asarray(x, dtype=np.float64))
    h = chebyshev.chebval(values, np.concatenate(([0.0], lagrange.as_array())))
    return float(h) if np.ndim(x) == 0 else h


def log_norm_from_values(grid: QuadratureGrid, h: np.ndarray) -> float:
    """Lambda = -ln integral exp(h), shifted by max(h) so large multipliers do not overflow"""
    h_max = float(np.max(h))
    if not np.isfinite(h_max):
        raise InvalidModelError(f"log-density is not finite (max {h_max!r})")
    integral = simpson_integrate(grid, np.exp(h - h_max))
    if not np.isfinite(integral) or integral <= 0.0:
        raise InvalidModelError(f"normalization integral is {integral!r}")
    return -(h_max + float(np.log(integral)))


def normalize(lagrange: LagrangeVector, grid: QuadratureGrid) -> float:
    """Lambda such that the model integrates to 1 under the grid's Simpson rule"""
    return log_norm_from_values(grid, np.atleast_1d(log_density_unnorm(lagrange, grid.edges)))


def build_model(
    lagrange: LagrangeVector,
    grid: QuadratureGrid,
    domain: DomainSpec,
    symmetry: Optional[SymmetryOption] = None,
) -> MaxEntModel:
    return MaxEntModel(
        lagrange=lagrange,
        log_norm=normalize(lagrange, grid),
        domain=domain,
        symmetry=symmetry or SymmetryOption(),
    )


def density(model: MaxEntModel, x: ArrayLike) -> ArrayLike:
    """exp[Lambda + sum_j lambda_j T_j(x)], floored at the model epsilon"""
    h = log_density_unnorm(model.lagrange, x)
    p = np.maximum(np.exp(model.log_norm + np.asarray(h)), model.epsilon)
    return float(p) if np.ndim(x) == 0 else p


def spectral_weight(lagrange: LagrangeVector) -> float:
    """Share of |lambda_1| in sum_j |lambda_j|; 0 for a flat model"""
    weights = np.abs(lagrange.as_array())
    total = float(weights.sum())
    return float(weights[0] / total) if total > 0 else 0.0


def model_record_json(model: MaxEntModel) -> str:
    return model.model_dump_json(indent=2)


def load_model_record(text: str) -> MaxEntModel:
    """Parse a bare model or a fit record that embeds one under its `model` key"""
    try:
        data = json.loads(text)
        if isinstance(data, dict) and isinstance(data.get("model"), dict):
            data = data["model"]
        return MaxEntModel.model_validate(data)
    except ValueError as e:
        raise InvalidModelError(f"not a valid model record: {e}") from e


class OriginalScaleDensity:
    """
    A fitted model carried back to original units.

    Inside the window p(v) = R_ab p_e(x) 2 / (b - a); with symmetry folding the
    folded density is split evenly across both sides of the mirror line.
    Everything outside the window has density 0.
    """

    def __init__(self, model: MaxEntModel, table: Optional[CdfTable] = None):
        self.model = model
        self.domain = model.domain
        self.symmetry = model.symmetry
        self._table = table

    @property
    def table(self) -> CdfTable:
        if self._table is None:
            self._table = cdf_table(self.model, uniform_grid(REFERENCE_TABLE_POINTS))
        return self._table

    @property
    def folded(self) -> bool:
        return self.symmetry.enabled

    @property
    def support(self) -> tuple:
        """Interval in original units carrying the retained mass"""
        if self.folded:
            center = self.symmetry.center
            return 2.0 * center - self.domain.b, self.domain.b
        return self.domain.a, self.domain.b

    def fold(self, v: np.ndarray) -> np.ndarray:
        if self.folded:
            return self.symmetry.center + np.abs(v - self.symmetry.center)
        return v

    def _unit(self, w: np.ndarray) -> np.ndarray:
        a, b = self.domain.a, self.domain.b
        return np.clip((2.0 * w - b - a) / (b - a), -1.0, 1.0)

    def pdf(self, v: ArrayLike) -> ArrayLike:
        values = np.asarray(v, dtype=np.float64)
        w = self.fold(values)
        inside = (w >= self.domain.a) & (w <= self.domain.b)
        scale = self.domain.retained_ratio * 2.0 / (self.domain.b - self.domain.a)
        p = np.where(inside, scale * density(self.model, self._unit(w)), 0.0)
        if self.folded:
            p = 0.5 * p
        return float(p) if np.ndim(v) == 0 else p

    def _folded_cdf(self, w: np.ndarray) -> np.ndarray:
        u, _ = cdf_eval(self.table, self._unit(w))
        g = self.domain.low_mass + self.domain.retained_ratio * np.asarray(u)
        g = np.where(w < self.domain.a, 0.0, g)
        return np.where(w > self.domain.b, 1.0, g)

    def cdf(self, v: ArrayLike) -> ArrayLike:
        values = np.asarray(v, dtype=np.float64)
        if self.folded:
            center = self.symmetry.center
            g = self._folded_cdf(self.fold(values))
            f = np.where(values >= center, 0.5 + 0.5 * g, 0.5 - 0.5 * g)
        else:
            f = self._folded_cdf(values)
        return float(f) if np.ndim(v) == 0 else f

    def quantile(self, u: ArrayLike) -> ArrayLike:
        """Quantile of the model conditioned on the window"""
        levels = np.asarray(u, dtype=np.float64)
        if self.folded:
            center = self.symmetry.center
            upper = levels >= 0.5
            g = np.where(upper, 2.0 * levels - 1.0, 1.0 - 2.0 * levels)
            x, _ = quantile_eval(self.table, g)
            w = from_unit(self.domain, x)
            v = np.where(upper, w, 2.0 * center - w)
        else:
            x, _ = quantile_eval(self.table, levels)
            v = from_unit(self.domain, x)
        return float(v) if np.ndim(u) == 0 else np.asarray(v)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Inverse-transform draws from the windowed model"""
        return np.asarray(self.quantile(rng.random(n)))


def to_original_scale(model: MaxEntModel, table: Optional[CdfTable] = None) -> OriginalScaleDensity:
    return OriginalScaleDensity(model, table)
