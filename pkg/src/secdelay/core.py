"""Shared parameter types and rate/threshold arithmetic.

Everything here is an immutable value object; the analytic formulas and the
simulator both consume these types.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace


class InvalidParameterError(ValueError):
    """A parameter lies outside the range the model is defined on."""


class DomainError(ValueError):
    """A special-function or formula argument lies outside its domain."""


# Default operating point.
DEFAULT_LAMBDA_L = 0.05
DEFAULT_LAMBDA_E = 0.01
DEFAULT_R0 = 1.0
DEFAULT_ALPHA = 4.0
DEFAULT_P = 0.8
DEFAULT_XI = 0.1
DEFAULT_R_T = 3.0
DEFAULT_R_E = 1.0


class Traffic(str, enum.Enum):
    BACKLOGGED = "backlogged"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class SystemParams:
    """Network geometry, channel and access parameters.

    ``tx_power`` is kept for completeness only: every SIR in the model is a
    ratio of powers from equal-power transmitters, so it cancels.
    """

    lambda_l: float = DEFAULT_LAMBDA_L
    lambda_e: float = DEFAULT_LAMBDA_E
    r0: float = DEFAULT_R0
    alpha: float = DEFAULT_ALPHA
    p: float = DEFAULT_P
    xi: float = DEFAULT_XI
    tx_power: float = 1.0

    def __post_init__(self):
        _check(self.lambda_l > 0, "lambda_l", self.lambda_l, "must be > 0")
        _check(self.lambda_e >= 0, "lambda_e", self.lambda_e, "must be >= 0")
        _check(self.r0 > 0, "r0", self.r0, "must be > 0")
        _check(
            self.alpha > 2,
            "alpha",
            self.alpha,
            "must be > 2 (delta = 2/alpha < 1 keeps the delay finite)",
        )
        _check(0 < self.p <= 1, "p", self.p, "must lie in (0, 1]")
        _check(0 <= self.xi < 1, "xi", self.xi, "must lie in [0, 1)")
        _check(self.tx_power > 0, "tx_power", self.tx_power, "must be > 0")
        for name in ("lambda_l", "lambda_e", "r0", "alpha", "p", "xi", "tx_power"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")

    @property
    def delta(self) -> float:
        return 2.0 / self.alpha

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class RateConfig:
    """Wiretap-code rates in bits/Hz.

    ``R_t`` is the codeword rate and ``R_e`` the rate spent on confusing
    eavesdroppers; the confidential rate is their difference.
    """

    R_t: float = DEFAULT_R_T
    R_e: float = DEFAULT_R_E

    def __post_init__(self):
        _check(math.isfinite(self.R_t) and math.isfinite(self.R_e), "R_t", self.R_t,
               "rates must be finite")
        _check(self.R_e >= 0, "R_e", self.R_e, "must be >= 0")
        _check(self.R_t >= self.R_e, "R_t", self.R_t, f"must be >= R_e = {self.R_e}")

    @classmethod
    def from_secrecy(cls, R_s: float, R_e: float) -> "RateConfig":
        _check(R_s >= 0, "R_s", R_s, "must be >= 0")
        return cls(R_t=R_s + R_e, R_e=R_e)

    @property
    def R_s(self) -> float:
        return self.R_t - self.R_e

    @property
    def theta_t(self) -> float:
        return rate_to_threshold(self.R_t)

    @property
    def theta_e(self) -> float:
        return rate_to_threshold(self.R_e)


@dataclass(frozen=True)
class ScenarioConfig:
    traffic: Traffic = Traffic.BACKLOGGED
    split: bool = False

    def __post_init__(self):
        object.__setattr__(self, "traffic", Traffic(self.traffic))

    @property
    def label(self) -> str:
        return self.traffic.value + ("+split" if self.split else "")


def _check(ok: bool, name: str, value, msg: str) -> None:
    if not ok:
        raise InvalidParameterError(f"{name}={value!r} {msg}")


def rate_to_threshold(rate: float) -> float:
    """SIR threshold 2**R - 1 for a rate R >= 0."""
    if not rate >= 0:
        raise InvalidParameterError(f"rate={rate!r} must be >= 0")
    if rate >= 1.0:
        # no cancellation here, and integer rates give exact thresholds
        return 2.0**rate - 1.0
    return math.expm1(rate * math.log(2.0))


def thresholds_from_rates(R_t: float, R_e: float) -> tuple[float, float]:
    """Return ``(theta_t, theta_e)`` for the codeword and secrecy rates."""
    if not (R_e >= 0 and R_t >= 0):
        raise InvalidParameterError(f"rates must be >= 0, got R_t={R_t!r}, R_e={R_e!r}")
    if R_t < R_e:
        raise InvalidParameterError(f"R_t={R_t!r} must be >= R_e={R_e!r}")
    return rate_to_threshold(R_t), rate_to_threshold(R_e)


def split_rates(rates: RateConfig) -> RateConfig:
    """Per-packet rates when a message is sent as two half-size packets.

    Both the confidential and the secrecy-cost rate halve, so the codeword
    rate becomes ``(R_s + R_e) / 2``.
    """
    return RateConfig(R_t=rates.R_t / 2.0, R_e=rates.R_e / 2.0)


def effective_rates(rates: RateConfig, split: bool) -> RateConfig:
    return split_rates(rates) if split else rates
