"""Saturated-queue simulation: the typical link always has a packet to send."""

from __future__ import annotations

import numpy as np

from ..core import RateConfig, SystemParams, effective_rates
from .attempts import Mode, sample_attempts
from .network import PointPattern
from .records import RunResult


def simulate_backlogged(
    pattern: PointPattern,
    params: SystemParams,
    rates: RateConfig,
    split: bool,
    n_messages: int,
    rng: np.random.Generator,
    mode: Mode | str = Mode.PHYSICAL,
) -> RunResult:
    """Deliver ``n_messages`` messages back to back over a fixed pattern.

    Interferers transmit independently with probability ``p`` in every slot.
    Each slot the typical transmitter is active (probability ``p``) is both a
    delivery attempt and an interception opportunity.  Under split a message
    is two packets at the halved rates; an eavesdropper recovers it only if
    it decoded at least one attempt of each packet.
    """
    mode = Mode(mode)
    if n_messages < 1:
        raise ValueError("n_messages must be >= 1")
    eff = effective_rates(rates, split)
    per_msg = 2 if split else 1
    need = n_messages * per_msg
    E = pattern.n_eavesdroppers
    independent = mode is Mode.INDEPENDENT

    oks, decs, gaps = [], [], []
    have = 0
    while have < need:
        # over-draw on the first batch using the wanted count as a floor
        batch = max(64, 2 * (need - have))
        ok, dec = sample_attempts(
            pattern, params.alpha, eff.theta_t, eff.theta_e, params.p, batch, rng, independent
        )
        oks.append(ok)
        decs.append(dec)
        gaps.append(rng.geometric(params.p, size=batch))
        have += int(np.count_nonzero(ok))

    ok = np.concatenate(oks)
    dec = np.concatenate(decs) if E else np.zeros((ok.size, 0), dtype=bool)
    gap = np.concatenate(gaps)
    last = int(np.flatnonzero(ok)[need - 1]) + 1
    ok, dec, gap = ok[:last], dec[:last], gap[:last]

    slots = np.cumsum(gap) - 1
    packet_id = np.cumsum(ok) - ok
    packet_starts = np.flatnonzero(np.r_[True, packet_id[1:] != packet_id[:-1]])
    if E:
        packet_exposed = np.logical_or.reduceat(dec, packet_starts, axis=0)
    else:
        packet_exposed = np.zeros((need, 0), dtype=bool)
    if split:
        compromised = packet_exposed[0::2] & packet_exposed[1::2]
    else:
        compromised = packet_exposed

    message_id = packet_id // per_msg
    offsets = np.searchsorted(message_id, np.arange(n_messages + 1))
    delivered = slots[offsets[1:] - 1]
    arrival = np.r_[0, delivered[:-1] + 1]
    return RunResult(
        arrival=arrival.astype(np.int64),
        delivered=delivered.astype(np.int64),
        compromised_by=compromised,
        attempt_slots=slots.astype(np.int64),
        attempt_ok=ok,
        attempt_offsets=offsets.astype(np.int64),
        slots=int(slots[-1]) + 1,
        interferer_activity=params.p,
        typical_activity=params.p,
        meta={"scenario": "backlogged", "split": split, "mode": mode.value},
    )
