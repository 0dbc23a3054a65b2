"""
Distribution template registry.

Registers every benchmark distribution with the DistributionFactory; the
default benchmark set lists them in the order of the result tables.
"""
import numpy as np

from typing import Any, Callable, Dict, List

from pdf_forge.core.exceptions import UnknownDistributionError
from pdf_forge.core.logging import get_logger
from pdf_forge.models.sample import RawSample

from .base import DistributionTemplate
from .distributions import (
    CauchyTemplate,
    DiscontinuousTemplate,
    FiveFingersTemplate,
    GammaTemplate,
    GaussianMixtureTemplate,
    LaplaceTemplate,
    NormalTemplate,
    UniformTemplate,
)

logger = get_logger(__name__)


class DistributionFactory:
    """Factory for creating distribution templates by name"""

    _template_registry: Dict[str, Callable[..., DistributionTemplate]] = {}
    _checked: Dict[str, DistributionTemplate] = {}

    @classmethod
    def register_template(cls, name: str, builder: Callable[..., DistributionTemplate]):
        """Register a template class (or preset builder) under a name"""
        cls._template_registry[name] = builder

    @classmethod
    def names(cls) -> List[str]:
        return list(cls._template_registry)

    @classmethod
    def create_template(cls, name: str, **params: Any) -> DistributionTemplate:
        """Create and verify a template; parameterless ones are checked once and cached"""
        builder = cls._template_registry.get(name)
        if builder is None:
            raise UnknownDistributionError(
                f"unknown distribution {name!r}; choose one of {', '.join(cls.names())}"
            )
        if not params and name in cls._checked:
            return cls._checked[name]
        try:
            template = builder(**params)
        except TypeError as e:
            raise ValueError(f"invalid parameters for {name!r}: {e}") from e
        template.check()
        if not params:
            cls._checked[name] = template
        return template


def register_all_templates():
    """Register all distribution templates with the DistributionFactory"""
    DistributionFactory.register_template("uniform", UniformTemplate)
    DistributionFactory.register_template("laplace", LaplaceTemplate)
    DistributionFactory.register_template("gamma", GammaTemplate)
    DistributionFactory.register_template("two-gaussians", GaussianMixtureTemplate)
    DistributionFactory.register_template("fingers-large", lambda: FiveFingersTemplate(weight=0.5))
    DistributionFactory.register_template("fingers-small", lambda: FiveFingersTemplate(weight=0.2))
    DistributionFactory.register_template("fingers", FiveFingersTemplate)
    DistributionFactory.register_template("cauchy", CauchyTemplate)
    DistributionFactory.register_template("discontinuous", DiscontinuousTemplate)
    DistributionFactory.register_template("normal", NormalTemplate)


BENCHMARK_DISTRIBUTIONS = [
    "uniform",
    "laplace",
    "gamma",
    "two-gaussians",
    "fingers-large",
    "fingers-small",
    "cauchy",
    "discontinuous",
]


def make_distribution(name: str, **params: Any) -> DistributionTemplate:
    return DistributionFactory.create_template(name, **params)


def sample_distribution(dist: DistributionTemplate, n: int, rng: np.random.Generator) -> RawSample:
    """Inverse-transform sample V_k = Q(r_k) of size n"""
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    return RawSample(values=dist.sample(n, rng))


# Auto-register all templates when this module is imported
register_all_templates()
