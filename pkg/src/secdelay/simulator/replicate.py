"""Independent replications over freshly sampled networks.

Replication ``r`` of a point identified by ``key`` draws everything from
``SeedSequence([master_seed, *key, r])``, so results do not depend on the
order or process in which replications run.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import analytic
from ..core import RateConfig, ScenarioConfig, SystemParams, Traffic, effective_rates
from .attempts import Mode
from .backlogged import simulate_backlogged
from .dynamic import simulate_dynamic
from .network import default_torus_side, restrict_torus, sample_network
from .records import CENSORED_LIMIT, Estimate, estimate_metrics

DEFAULT_MESSAGES = 2000
DEFAULT_HORIZON = 20000


@dataclass(frozen=True)
class ReplicationSummary:
    """Metrics across replications; CIs come from the spread of replication means.

    A replication whose censored fraction exceeds ``CENSORED_LIMIT`` has a
    locally unstable typical queue; its delay is left out of ``delay`` and
    counted in ``unstable_reps`` instead.  If every replication is unstable
    the delay is reported as ``inf``.
    """

    delay: Estimate
    outage: Estimate
    connection_failure: Estimate
    activity: Estimate
    censored_fraction: float
    n_reps: int
    unstable_reps: int = 0

    @property
    def unreliable(self) -> bool:
        return self.censored_fraction > CENSORED_LIMIT or self.unstable_reps > 0


def _rng_for(master_seed: int, key: tuple[int, ...], rep: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *map(int, key), int(rep)]))


def run_replication(task) -> tuple[float, float, float, float, int, int]:
    """One replication; returns plain numbers so it can cross process boundaries."""
    params, rates, scenario, mode, torus_side, n_messages, horizon, warmup, seed, key, rep = task
    rng = _rng_for(seed, key, rep)
    pattern = sample_network(params, torus_side, rng)
    if scenario.traffic is Traffic.BACKLOGGED:
        run = simulate_backlogged(pattern, params, rates, scenario.split, n_messages, rng, mode)
    else:
        run = simulate_dynamic(pattern, params, rates, scenario.split, horizon, warmup, rng, mode)
    if len(run) == 0:
        return math.nan, math.nan, math.nan, run.interferer_activity, 0, 0
    delay, outage = estimate_metrics(run, pattern.n_eavesdroppers)
    return (
        delay.mean,
        outage.mean,
        run.attempt_failure_rate,
        run.interferer_activity,
        run.censored,
        len(run),
    )


def _across(values) -> Estimate:
    x = np.asarray(values, dtype=float)
    x = x[~np.isnan(x)]
    if x.size == 0:
        return Estimate(math.nan, math.nan, 0)
    return Estimate.from_samples(x)


def replication_tasks(
    params: SystemParams,
    rates: RateConfig,
    scenario: ScenarioConfig,
    n_reps: int,
    master_seed: int = 0,
    mode: Mode | str = Mode.PHYSICAL,
    torus_side: float | None = None,
    n_messages: int = DEFAULT_MESSAGES,
    horizon: int = DEFAULT_HORIZON,
    warmup: int | None = None,
    key: tuple[int, ...] = (),
) -> list[tuple]:
    mode = Mode(mode)
    L = default_torus_side(params) if torus_side is None else float(torus_side)
    return [
        (params, rates, scenario, mode, L, n_messages, horizon, warmup, master_seed, tuple(key), r)
        for r in range(n_reps)
    ]


def run_tasks(tasks: list[tuple], workers: int = 1) -> list[tuple]:
    """Run replications, in parallel when ``workers > 1``; output keeps task order."""
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_replication, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    return [run_replication(t) for t in tasks]


def summarize(results: list[tuple]) -> ReplicationSummary:
    delay, outage, pcf, act, censored, total = map(np.asarray, zip(*results))
    n_total = int(total.sum())
    with np.errstate(invalid="ignore", divide="ignore"):
        stable = (total > 0) & (censored <= CENSORED_LIMIT * total)
    if stable.any():
        delay_est = _across(delay[stable])
    else:
        delay_est = Estimate(math.inf, math.inf, 0)
    return ReplicationSummary(
        delay=delay_est,
        outage=_across(outage),
        connection_failure=_across(pcf),
        activity=_across(act),
        censored_fraction=float(censored.sum()) / n_total if n_total else 1.0,
        n_reps=len(results),
        unstable_reps=int(len(results) - stable.sum()),
    )


def replicate(
    params: SystemParams,
    rates: RateConfig,
    scenario: ScenarioConfig,
    n_reps: int,
    master_seed: int = 0,
    mode: Mode | str = Mode.PHYSICAL,
    torus_side: float | None = None,
    n_messages: int = DEFAULT_MESSAGES,
    horizon: int = DEFAULT_HORIZON,
    warmup: int | None = None,
    key: tuple[int, ...] = (),
    workers: int = 1,
) -> ReplicationSummary:
    """Simulate ``n_reps`` independent networks and pool the results."""
    if n_reps < 1:
        raise ValueError("n_reps must be >= 1")
    tasks = replication_tasks(
        params, rates, scenario, n_reps, master_seed, mode, torus_side,
        n_messages, horizon, warmup, key,
    )
    return summarize(run_tasks(tasks, workers))


# ---------------------------------------------------------------------------
# conditional averages: exact per-pattern probabilities, averaged over patterns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PatternAverage:
    """Per-pattern closed-form quantities averaged over sampled networks.

    ``delay`` averages the exact conditional mean delay; ``outage`` averages
    the exact conditional secrecy outage of one packet (no split only).
    """

    delay: Estimate
    connection_failure: Estimate
    secrecy_failure: Estimate
    outage: Estimate | None
    n_patterns: int


def pattern_average(
    params: SystemParams,
    rates: RateConfig,
    scenario: ScenarioConfig = ScenarioConfig(),
    n_patterns: int = 10_000,
    torus_side: float | None = None,
    seed: int = 0,
    with_eavesdroppers: bool = True,
) -> PatternAverage:
    """Average the conditional probabilities over ``n_patterns`` networks.

    Interferers are active with probability ``p`` (backlogged) or with the
    fixed-point probability q* (dynamic, mean-field).  Under independent
    activity these per-pattern values are exactly what the simulator
    converges to, so their average estimates the spatial expectation without
    any fading or access noise.
    """
    L = default_torus_side(params) if torus_side is None else torus_side
    return coupled_pattern_average(
        params, rates, scenario, n_patterns, (L,), seed, with_eavesdroppers
    )[L]


def coupled_pattern_average(
    params: SystemParams,
    rates: RateConfig,
    scenario: ScenarioConfig,
    n_patterns: int,
    sides: tuple[float, ...],
    seed: int = 0,
    with_eavesdroppers: bool = True,
) -> dict[float, PatternAverage]:
    """:func:`pattern_average` on several torus sizes sharing the same points.

    Each pattern is drawn on the largest torus and restricted to the smaller
    ones, so differences between sizes reflect truncation rather than
    sampling noise.
    """
    eff = effective_rates(rates, scenario.split)
    dynamic = scenario.traffic is Traffic.DYNAMIC
    activity = analytic.dynamic_active_probability(params, eff.theta_t) if dynamic else params.p
    params_geo = params if with_eavesdroppers else params.with_(lambda_e=0.0)
    sides = tuple(float(x) for x in sides)
    big = max(sides)
    streams = np.random.SeedSequence(int(seed)).spawn(n_patterns)

    pcf = {L: np.empty(n_patterns) for L in sides}
    psf = {L: np.empty(n_patterns) for L in sides}
    for i, ss in enumerate(streams):
        full = sample_network(params_geo, big, ss)
        for L in sides:
            pattern = full if L == big else restrict_torus(full, L)
            pcf[L][i] = analytic.conditional_connection_failure(pattern, activity, eff.theta_t, params.alpha)
            psf[L][i] = analytic.conditional_secrecy_failure(pattern, activity, eff.theta_e, params.alpha)
    return {
        L: _summarize(params, scenario, pcf[L], psf[L], with_eavesdroppers) for L in sides
    }


def _summarize(params, scenario, pcf, psf, with_eavesdroppers) -> PatternAverage:
    per_msg = 2 if scenario.split else 1
    service = params.p * (1.0 - pcf)
    with np.errstate(divide="ignore", invalid="ignore"):
        if scenario.traffic is Traffic.DYNAMIC:
            if per_msg == 1:
                delay = np.where(service > params.xi, (1 - params.xi) / (service - params.xi), np.inf)
            else:
                rate = service / 2.0
                delay = np.where(rate > params.xi, 1.0 / (rate - params.xi), np.inf)
        else:
            delay = per_msg / service
    outage = None
    if not scenario.split and with_eavesdroppers:
        denom = 1.0 - pcf + psf * pcf
        outage = Estimate.from_samples(np.where(denom > 0, psf / np.where(denom > 0, denom, 1.0), 0.0))
    return PatternAverage(
        delay=Estimate.from_samples(delay),
        connection_failure=Estimate.from_samples(pcf),
        secrecy_failure=Estimate.from_samples(psf),
        outage=outage,
        n_patterns=len(pcf),
    )
