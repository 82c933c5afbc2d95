"""Delay and physical-layer secrecy of ALOHA networks with Poisson eavesdroppers.

Closed-form mean delay and secrecy outage for backlogged and dynamic traffic
(with and without message split), plus a Monte Carlo simulator of the
slotted system to check every approximation.
"""

from .core import (
    DomainError,
    InvalidParameterError,
    RateConfig,
    ScenarioConfig,
    SystemParams,
    Traffic,
    split_rates,
    thresholds_from_rates,
)
from .special import interference_constant, lambert_w0

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "InvalidParameterError",
    "RateConfig",
    "ScenarioConfig",
    "SystemParams",
    "Traffic",
    "interference_constant",
    "lambert_w0",
    "split_rates",
    "thresholds_from_rates",
]
