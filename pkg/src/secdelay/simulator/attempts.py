"""Fading-level sampling of single transmission attempts on a fixed pattern."""

from __future__ import annotations

import enum

import numpy as np

from .network import PointPattern

# random numbers per chunk; bounds peak memory of the vectorized draws
_CHUNK_BUDGET = 2_000_000


class Mode(str, enum.Enum):
    """How interferer activity is generated.

    PHYSICAL
        The scenario's own law (ALOHA for backlogged traffic, queue-driven
        for dynamic traffic); the receiver and every eavesdropper see the
        same set of active interferers in a slot.
    INDEPENDENT
        Every observer sees its own independent Bernoulli draw of the
        interferer activity, which removes the correlation the closed-form
        expressions ignore.
    MEANFIELD
        Dynamic traffic only: interferers are active i.i.d. with the
        fixed-point probability q* instead of following their queues.
        Activity is shared between observers.
    """

    PHYSICAL = "physical"
    INDEPENDENT = "independent"
    MEANFIELD = "meanfield"


def _ratios(pattern: PointPattern, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    # (r0/|y - x0|)^alpha and (|x_e|/|y - x_e|)^alpha
    rx = (pattern.r0 / pattern.distances(pattern.interferers, pattern.typical_rx)) ** alpha
    if pattern.n_eavesdroppers:
        link = pattern.distances(pattern.eavesdroppers, pattern.typical_tx)
        d = pattern.distances(pattern.interferers[None, :, :], pattern.eavesdroppers[:, None, :])
        eve = (link[:, None] / d) ** alpha
    else:
        eve = np.zeros((0, pattern.n_interferers))
    return rx, eve


def sample_attempts(
    pattern: PointPattern,
    alpha: float,
    theta_t: float,
    theta_e: float,
    activity: float,
    n: int,
    rng: np.random.Generator,
    independent: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``n`` attempts of the typical link with Rayleigh block fading.

    Interferers are active with probability ``activity``.  Returns
    ``(connected, decoded)``: whether the receiver reached SIR >= theta_t,
    and an ``(n, E)`` array of whether each eavesdropper reached SIR >=
    theta_e.  With no active interferer the SIR is infinite.
    """
    rx_ratio, eve_ratio = _ratios(pattern, alpha)
    N, E = pattern.n_interferers, pattern.n_eavesdroppers
    connected = np.empty(n, dtype=bool)
    decoded = np.empty((n, E), dtype=bool)
    chunk = max(1, _CHUNK_BUDGET // max(1, 2 * N * (1 + E)))
    for start in range(0, n, chunk):
        c = min(chunk, n - start)
        act = rng.random((c, N)) < activity
        interference = np.einsum("cn,n->c", rng.exponential(size=(c, N)) * act, rx_ratio)
        connected[start:start + c] = rng.exponential(size=c) >= theta_t * interference
        if E:
            act_e = rng.random((c, E, N)) < activity if independent else act[:, None, :]
            fad = rng.exponential(size=(c, E, N)) * act_e
            interference_e = np.einsum("cen,en->ce", fad, eve_ratio)
            decoded[start:start + c] = rng.exponential(size=(c, E)) >= theta_e * interference_e
    return connected, decoded
