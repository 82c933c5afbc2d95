"""Slotted simulation of the interacting queues under Bernoulli arrivals.

The slot loop is causal and branchy, so it is compiled with numba.  The
kernel keeps numba's own generator, seeded from the caller's numpy
``Generator``; identical inputs therefore give identical runs.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ..analytic import dynamic_active_probability
from ..core import RateConfig, SystemParams, effective_rates
from .attempts import Mode
from .network import PointPattern
from .records import RunResult

_PHYSICAL, _MEANFIELD, _INDEPENDENT = 0, 1, 2
_MODE_CODE = {Mode.PHYSICAL: _PHYSICAL, Mode.MEANFIELD: _MEANFIELD, Mode.INDEPENDENT: _INDEPENDENT}


@njit(cache=True)
def _kernel(g_rx, g_eve, p, xi, theta_t, theta_e, per_msg, horizon, warmup, mode, q, seed):
    np.random.seed(seed)
    n = g_rx.shape[0]
    n_e = g_eve.shape[0]
    queue = np.zeros(n, np.int64)
    active = np.zeros(n, np.bool_)
    act_idx = np.empty(n, np.int64)
    served = np.zeros(n, np.bool_)

    arrival = np.empty(horizon, np.int64)
    delivered = np.full(horizon, -1, np.int64)
    compromised = np.zeros((horizon, n_e), np.bool_)
    att_slot = np.empty(horizon, np.int64)
    att_msg = np.empty(horizon, np.int64)
    att_ok = np.empty(horizon, np.bool_)
    cur_dec = np.zeros(n_e, np.bool_)
    first_dec = np.zeros(n_e, np.bool_)
    n_msg = 0
    head = 0
    second = False
    n_att = 0
    busy_interferer_slots = 0
    typical_active_slots = 0

    for k in range(horizon):
        if mode == _PHYSICAL:
            for i in range(1, n):
                if np.random.random() < xi:
                    queue[i] += per_msg
        if np.random.random() < xi:
            queue[0] += per_msg
            arrival[n_msg] = k
            n_msg += 1

        m = 0
        for i in range(1, n):
            if mode == _PHYSICAL:
                a = queue[i] > 0 and np.random.random() < p
            else:
                a = np.random.random() < q
            active[i] = a
            if a:
                act_idx[m] = i
                m += 1
        typ = queue[0] > 0 and np.random.random() < p
        if k >= warmup:
            busy_interferer_slots += m
            if typ:
                typical_active_slots += 1

        if mode == _PHYSICAL:
            # interferer receivers; decisions applied after the slot
            for a in range(m):
                i = act_idx[a]
                interf = 0.0
                for b in range(m):
                    j = act_idx[b]
                    if j != i:
                        interf += np.random.exponential() * g_rx[i, j]
                if typ:
                    interf += np.random.exponential() * g_rx[i, 0]
                served[a] = np.random.exponential() * g_rx[i, i] >= theta_t * interf
            for a in range(m):
                if served[a]:
                    queue[act_idx[a]] -= 1

        if typ:
            interf = 0.0
            for b in range(m):
                j = act_idx[b]
                interf += np.random.exponential() * g_rx[0, j]
            ok = np.random.exponential() * g_rx[0, 0] >= theta_t * interf
            for e in range(n_e):
                interf = 0.0
                if mode == _INDEPENDENT:
                    for j in range(1, n):
                        if np.random.random() < q:
                            interf += np.random.exponential() * g_eve[e, j]
                else:
                    for b in range(m):
                        j = act_idx[b]
                        interf += np.random.exponential() * g_eve[e, j]
                if np.random.exponential() * g_eve[e, 0] >= theta_e * interf:
                    cur_dec[e] = True
            att_slot[n_att] = k
            att_msg[n_att] = head
            att_ok[n_att] = ok
            n_att += 1
            if ok:
                queue[0] -= 1
                if per_msg == 2 and not second:
                    for e in range(n_e):
                        first_dec[e] = cur_dec[e]
                    second = True
                else:
                    for e in range(n_e):
                        if per_msg == 2:
                            compromised[head, e] = first_dec[e] and cur_dec[e]
                        else:
                            compromised[head, e] = cur_dec[e]
                    delivered[head] = k
                    head += 1
                    second = False
                for e in range(n_e):
                    cur_dec[e] = False

    return (
        arrival[:n_msg],
        delivered[:n_msg],
        compromised[:n_msg],
        att_slot[:n_att],
        att_msg[:n_att],
        att_ok[:n_att],
        busy_interferer_slots,
        typical_active_slots,
    )


def simulate_dynamic(
    pattern: PointPattern,
    params: SystemParams,
    rates: RateConfig,
    split: bool,
    horizon: int,
    warmup: int | None,
    rng: np.random.Generator,
    mode: Mode | str = Mode.PHYSICAL,
) -> RunResult:
    """Run every transmitter's FIFO queue for ``horizon`` slots.

    Each transmitter receives Bernoulli(xi) messages (two packets each under
    split) and, while non-empty, sends its head-of-line packet with
    probability ``p``; a failed packet stays at the head.  In physical mode
    an interferer's packet succeeds iff the SIR at its own receiver reaches
    theta_t, so the interference the typical link sees is queue-driven.

    Returned records cover messages that arrived in ``[warmup, horizon)``;
    those still queued at the horizon are censored (``delivered == -1``).
    ``warmup`` defaults to 20% of the horizon.
    """
    mode = Mode(mode)
    warmup = horizon // 5 if warmup is None else int(warmup)
    if not horizon > warmup >= 0:
        raise ValueError(f"need horizon > warmup >= 0, got horizon={horizon}, warmup={warmup}")
    eff = effective_rates(rates, split)
    q = dynamic_active_probability(params, eff.theta_t) if mode is not Mode.PHYSICAL else 0.0
    g_rx, g_eve = pattern.path_gains(params.alpha)
    seed = int(rng.integers(0, 2**31 - 1))
    arrival, delivered, comp, a_slot, a_msg, a_ok, busy, typ_busy = _kernel(
        np.ascontiguousarray(g_rx),
        np.ascontiguousarray(g_eve),
        params.p,
        params.xi,
        eff.theta_t,
        eff.theta_e,
        2 if split else 1,
        int(horizon),
        warmup,
        _MODE_CODE[mode],
        q,
        seed,
    )

    keep = arrival >= warmup
    first = int(np.argmax(keep)) if keep.any() else len(arrival)
    # messages are FIFO, so the kept ones are a contiguous tail
    arrival, delivered, comp = arrival[first:], delivered[first:], comp[first:]
    sel = a_msg >= first
    a_slot, a_msg, a_ok = a_slot[sel], a_msg[sel] - first, a_ok[sel]
    offsets = np.searchsorted(a_msg, np.arange(len(arrival) + 1))
    slots = horizon - warmup
    n_int = pattern.n_interferers
    return RunResult(
        arrival=arrival,
        delivered=delivered,
        compromised_by=comp,
        attempt_slots=a_slot,
        attempt_ok=a_ok,
        attempt_offsets=offsets.astype(np.int64),
        slots=slots,
        interferer_activity=busy / (n_int * slots) if n_int else float("nan"),
        typical_activity=typ_busy / slots,
        meta={"scenario": "dynamic", "split": split, "mode": mode.value,
              "warmup": warmup, "horizon": horizon, "q_meanfield": q},
    )
