"""Closed-form delay and secrecy-outage expressions.

Unconditional results average over the Poisson geometry (backlogged and
dynamic traffic, with or without message split).  The ``conditional_*``
functions evaluate the same quantities for one fixed realization of the
network and are what the simulator is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DomainError,
    InvalidParameterError,
    RateConfig,
    ScenarioConfig,
    SystemParams,
    Traffic,
    split_rates,
)
from .special import interference_constant, lambert_w0

_INV_E = math.exp(-1.0)


@dataclass(frozen=True)
class AnalyticResult:
    mean_delay: float
    secrecy_outage: float
    active_probability: float
    connection_failure: float
    occupancy: float | None = None

    def as_dict(self) -> dict[str, float | None]:
        return {
            "mean_delay": self.mean_delay,
            "secrecy_outage": self.secrecy_outage,
            "q_star": self.active_probability,
            "p_cf": self.connection_failure,
            "occupancy": self.occupancy,
        }


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------


def interference_load(params: SystemParams, theta_t: float) -> float:
    """lambda_l * pi * r0^2 * theta_t^delta * C(delta)."""
    d = params.delta
    return params.lambda_l * math.pi * params.r0**2 * theta_t**d * interference_constant(d)


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _outage_form(params: SystemParams, activity: float, theta_t: float, theta_e: float) -> float:
    """Jensen-approximated outage with interferers active w.p. ``activity``.

    Evaluated as (1 - e^-x) / (1 - e^-x + e^(-activity*A - x)), which is the
    same quantity as the exp(+x) form but cannot overflow.
    """
    if not theta_e > 0:
        raise DomainError(f"theta_e={theta_e!r}: secrecy outage needs theta_e > 0 (R_e > 0)")
    if params.lambda_e == 0:
        return 0.0
    d = params.delta
    c = interference_constant(d)
    denom_x = activity * params.lambda_l * theta_e**d * c
    if denom_x == 0:
        return 1.0
    x = params.lambda_e / denom_x
    exposed = -math.expm1(-x)
    exponent = -activity * interference_load(params, theta_t) - x
    return exposed / (exposed + math.exp(exponent))


def geo_g1_mean_delay(xi: float, success_prob: float) -> float:
    """Mean sojourn time of a discrete-time queue with Bernoulli(xi) arrivals.

    ``success_prob`` is the per-slot probability the head-of-line packet is
    scheduled and decoded.  Returns ``inf`` when the queue is unstable.
    """
    if not 0 <= xi < 1:
        raise InvalidParameterError(f"xi={xi!r} must lie in [0, 1)")
    if not 0 <= success_prob <= 1:
        raise InvalidParameterError(f"success_prob={success_prob!r} must lie in [0, 1]")
    if success_prob <= xi:
        return math.inf
    return (1.0 - xi) / (success_prob - xi)


# ---------------------------------------------------------------------------
# backlogged traffic
# ---------------------------------------------------------------------------


def backlogged_mean_delay(params: SystemParams, theta_t: float) -> float:
    """Mean local delay (1/p) exp(A p (1-p)^(delta-1)); ``inf`` at p = 1."""
    p = params.p
    if p >= 1.0:
        return math.inf
    a = interference_load(params, theta_t)
    return _safe_exp(a * p * (1.0 - p) ** (params.delta - 1.0)) / p


def backlogged_secrecy_outage(params: SystemParams, theta_t: float, theta_e: float) -> float:
    return _outage_form(params, params.p, theta_t, theta_e)


def backlogged_mean_delay_split(params: SystemParams, rates: RateConfig) -> float:
    """Two half-rate packets; twice the local delay at the split threshold."""
    return 2.0 * backlogged_mean_delay(params, split_rates(rates).theta_t)


def backlogged_secrecy_outage_split(params: SystemParams, rates: RateConfig) -> float:
    half = split_rates(rates)
    return backlogged_secrecy_outage(params, half.theta_t, half.theta_e) ** 2


def backlogged_connection_failure(params: SystemParams, theta_t: float) -> float:
    """Per-attempt failure probability averaged over the geometry."""
    return -math.expm1(-params.p * interference_load(params, theta_t))


# ---------------------------------------------------------------------------
# dynamic traffic (mean-field decoupling of the interacting queues)
# ---------------------------------------------------------------------------


def dynamic_active_probability(params: SystemParams, theta_t: float) -> float:
    """Smallest solution q of min(xi * exp(q A), 1) = q.

    When -xi A < -1/e there is no real solution below one and every
    transmitter is taken to be permanently busy (q = 1).
    """
    xi = params.xi
    if xi == 0:
        return 0.0
    a = interference_load(params, theta_t)
    if a == 0:
        return min(xi, 1.0)
    arg = -xi * a
    if arg < -_INV_E:
        try:
            w = lambert_w0(arg)  # tolerates rounding right at the branch point
        except DomainError:
            return 1.0
        return min(-w / a, 1.0)
    return min(-lambert_w0(arg) / a, 1.0)


def dynamic_connection_failure(params: SystemParams, theta_t: float) -> float:
    """Failure probability at the mean-field activity q*.

    Equals 1 - xi/q*; on the saturated branch (q* = 1) this is 1 - xi, as in
    min(1 + xi A / W(-xi A), 1 - xi).
    """
    q = dynamic_active_probability(params, theta_t)
    if q >= 1.0:
        return 1.0 - params.xi
    # on the W branch xi/q = exp(-q A) exactly; expm1 keeps precision as q -> 0
    return -math.expm1(-q * interference_load(params, theta_t))


def dynamic_mean_delay(params: SystemParams, theta_t: float) -> float:
    pcf = dynamic_connection_failure(params, theta_t)
    return geo_g1_mean_delay(params.xi, params.p * (1.0 - pcf))


def dynamic_mean_delay_lambert(params: SystemParams, theta_t: float) -> float:
    """The closed Lambert-W form (1 - 1/xi) / (1 + p A / W(-xi A)).

    Only meaningful on the unsaturated, stable branch; used as a cross-check
    of :func:`dynamic_mean_delay`.
    """
    a = interference_load(params, theta_t)
    w = lambert_w0(-params.xi * a)
    value = (1.0 - 1.0 / params.xi) / (1.0 + params.p * a / w)
    return value if value > 0 else math.inf


def dynamic_secrecy_outage(params: SystemParams, theta_t: float, theta_e: float) -> float:
    q = dynamic_active_probability(params, theta_t)
    return _outage_form(params, q, theta_t, theta_e)


def dynamic_mean_delay_split(params: SystemParams, rates: RateConfig) -> float:
    """M/M/1 approximation 1/(mu - xi) with mu = p (1 - P_cf') / 2."""
    theta = split_rates(rates).theta_t
    mu = params.p * (1.0 - dynamic_connection_failure(params, theta)) / 2.0
    if mu <= params.xi:
        return math.inf
    return 1.0 / (mu - params.xi)


def dynamic_mean_delay_split_lambert(params: SystemParams, rates: RateConfig) -> float:
    """-1 / (p xi A' / (2 W(-xi A')) + xi), the closed form of the split delay."""
    a = interference_load(params, split_rates(rates).theta_t)
    w = lambert_w0(-params.xi * a)
    denom = params.p * params.xi * a / (2.0 * w) + params.xi
    return -1.0 / denom if denom < 0 else math.inf


def dynamic_secrecy_outage_split(params: SystemParams, rates: RateConfig) -> float:
    half = split_rates(rates)
    return dynamic_secrecy_outage(params, half.theta_t, half.theta_e) ** 2


# ---------------------------------------------------------------------------
# light-interference limits (lambda_l r0^2 theta^delta C -> 0)
# ---------------------------------------------------------------------------


def limit_dynamic_mean_delay(params: SystemParams) -> float:
    """(1 - 1/xi) / (1 - p/xi) = (1 - xi) / (p - xi)."""
    return geo_g1_mean_delay(params.xi, params.p)


def limit_dynamic_secrecy_outage(params: SystemParams, theta_e: float) -> float:
    d = params.delta
    x = params.lambda_e / (params.xi * params.lambda_l * theta_e**d * interference_constant(d))
    return -math.expm1(-x)


def limit_dynamic_mean_delay_split(params: SystemParams) -> float:
    """2 / (p - 2 xi)."""
    slack = params.p - 2.0 * params.xi
    return 2.0 / slack if slack > 0 else math.inf


def limit_dynamic_secrecy_outage_split(params: SystemParams, rates: RateConfig) -> float:
    return limit_dynamic_secrecy_outage(params, split_rates(rates).theta_e) ** 2


# ---------------------------------------------------------------------------
# one-stop evaluation
# ---------------------------------------------------------------------------


def evaluate(params: SystemParams, rates: RateConfig, scenario: ScenarioConfig) -> AnalyticResult:
    """All analytic metrics for one operating point.

    Under split, ``active_probability`` and ``connection_failure`` refer to
    the per-packet threshold theta_t'.
    """
    eff = split_rates(rates) if scenario.split else rates
    if scenario.traffic is Traffic.BACKLOGGED:
        if scenario.split:
            delay = backlogged_mean_delay_split(params, rates)
            outage = backlogged_secrecy_outage_split(params, rates)
        else:
            delay = backlogged_mean_delay(params, rates.theta_t)
            outage = backlogged_secrecy_outage(params, rates.theta_t, rates.theta_e)
        return AnalyticResult(
            mean_delay=delay,
            secrecy_outage=outage,
            active_probability=params.p,
            connection_failure=backlogged_connection_failure(params, eff.theta_t),
        )

    q = dynamic_active_probability(params, eff.theta_t)
    pcf = dynamic_connection_failure(params, eff.theta_t)
    if scenario.split:
        delay = dynamic_mean_delay_split(params, rates)
        outage = dynamic_secrecy_outage_split(params, rates)
    else:
        delay = dynamic_mean_delay(params, rates.theta_t)
        outage = dynamic_secrecy_outage(params, rates.theta_t, rates.theta_e)
    service = params.p * (1.0 - pcf)
    occupancy = params.xi / service if service > 0 else math.inf
    return AnalyticResult(
        mean_delay=delay,
        secrecy_outage=outage,
        active_probability=q,
        connection_failure=pcf,
        occupancy=occupancy,
    )


# ---------------------------------------------------------------------------
# conditional (fixed-geometry) probabilities
# ---------------------------------------------------------------------------


def _survival_factors(gain_ratio: np.ndarray, p: float) -> np.ndarray:
    # p / (1 + gain_ratio) + 1 - p, the per-interferer Laplace-transform factor
    return 1.0 - p * gain_ratio / (1.0 + gain_ratio)


def conditional_connection_failure(pattern, p: float, theta_t: float, alpha: float) -> float:
    """Per-attempt connection failure given the interferer positions.

    Each interferer independently transmits with probability ``p``;
    distances use the torus metric of ``pattern``.
    """
    if len(pattern.interferers) == 0:
        return 0.0
    d = pattern.distances(pattern.interferers, pattern.typical_rx)
    ratio = theta_t * (pattern.r0 / d) ** alpha
    return float(-np.expm1(np.sum(np.log(_survival_factors(ratio, p)))))


def conditional_eavesdropper_decode(pattern, p: float, theta_e: float, alpha: float) -> np.ndarray:
    """Probability that each eavesdropper decodes one attempt of the typical link."""
    eaves = pattern.eavesdroppers
    if len(eaves) == 0:
        return np.zeros(0)
    if len(pattern.interferers) == 0:
        return np.ones(len(eaves))
    link = pattern.distances(eaves, pattern.typical_tx)  # |x_e|
    d = pattern.distances(pattern.interferers[None, :, :], eaves[:, None, :])  # (E, N)
    ratio = theta_e * (link[:, None] / d) ** alpha
    return np.exp(np.sum(np.log(_survival_factors(ratio, p)), axis=1))


def conditional_secrecy_failure(pattern, p: float, theta_e: float, alpha: float) -> float:
    """Probability that at least one eavesdropper decodes a given attempt.

    Eavesdroppers are treated as independent given the geometry.
    """
    decode = conditional_eavesdropper_decode(pattern, p, theta_e, alpha)
    if decode.size == 0:
        return 0.0
    if np.any(decode >= 1.0):
        return 1.0
    return float(-np.expm1(np.sum(np.log1p(-decode))))


def conditional_secrecy_outage(pcf: float, psf: float) -> float:
    """Probability that some attempt of a packet is exposed before delivery.

    ``psf / (1 - pcf + psf * pcf)``: the geometric number of attempts summed
    out of 1 - E[(1 - psf)^N].
    """
    if not (0 <= pcf <= 1 and 0 <= psf <= 1):
        raise InvalidParameterError(f"pcf={pcf!r}, psf={psf!r} must lie in [0, 1]")
    if pcf == 1 and psf == 0:
        raise DomainError("pcf = 1 and psf = 0: the packet is never delivered nor exposed")
    return psf / (1.0 - pcf + psf * pcf)
