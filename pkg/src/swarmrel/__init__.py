"""Reliability toolkit for two-phase (cellular + D2D relay) UAV swarm delivery.

A Monte Carlo protocol simulator and an independent closed-form model of the
same system, cross-validated against each other, with a sweep/compare/tune
command line on top.
"""

from .scenario import ScenarioConfig, ConfigError, validate
from .analytic import AnalyticBreakdown, reliability
from .mc import Protocol, ReliabilityEstimate, estimate

__version__ = "0.1.0"

__all__ = [
    "ScenarioConfig",
    "ConfigError",
    "validate",
    "AnalyticBreakdown",
    "reliability",
    "Protocol",
    "ReliabilityEstimate",
    "estimate",
    "__version__",
]
