"""Per-message outcomes of a simulation run and their summary statistics."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

Z95 = 1.959963984540054
# censored fraction above which a dynamic delay estimate is flagged unreliable
CENSORED_LIMIT = 0.01


@dataclass(frozen=True)
class Estimate:
    mean: float
    half_width_95: float
    n: int

    @property
    def lo(self) -> float:
        return self.mean - self.half_width_95

    @property
    def hi(self) -> float:
        return self.mean + self.half_width_95

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    @classmethod
    def from_samples(cls, values) -> "Estimate":
        x = np.asarray(values, dtype=float)
        n = x.size
        if n == 0:
            raise ValueError("cannot estimate from zero samples")
        if not np.all(np.isfinite(x)):
            return cls(math.inf, math.inf, n)
        mean = math.fsum(x) / n
        if n == 1:
            return cls(mean, math.inf, 1)
        var = math.fsum((x - mean) ** 2) / (n - 1)
        return cls(mean, Z95 * math.sqrt(var / n), n)

    @classmethod
    def from_proportion(cls, successes: int, n: int) -> "Estimate":
        if n <= 0:
            raise ValueError("cannot estimate a proportion from zero trials")
        phat = successes / n
        return cls(phat, Z95 * math.sqrt(phat * (1.0 - phat) / n), n)


@dataclass(frozen=True)
class PacketRecord:
    """Life of one message of the typical transmitter.

    ``attempt_slots`` are the slots the typical transmitter was active with
    this message at the head of its queue (both packets under split).
    ``secrecy_compromised[e]`` is true when eavesdropper ``e`` decoded enough
    attempts to recover the message.
    """

    arrival_slot: int
    attempt_slots: tuple[int, ...]
    delivered_slot: int | None
    secrecy_compromised: tuple[bool, ...]

    @property
    def delay(self) -> int | None:
        if self.delivered_slot is None:
            return None
        return self.delivered_slot - self.arrival_slot + 1

    @property
    def compromised(self) -> bool:
        return any(self.secrecy_compromised)


@dataclass(frozen=True, eq=False)
class RunResult(Sequence):
    """Columnar store of the messages produced by one simulation run.

    Behaves as a read-only sequence of :class:`PacketRecord`.  In the
    backlogged scenario ``arrival`` is the slot the message reached the head
    of the queue, so ``delay`` is the local delay.
    """

    arrival: np.ndarray
    delivered: np.ndarray  # -1 for messages still in the system at the horizon
    compromised_by: np.ndarray  # (messages, eavesdroppers) bool
    attempt_slots: np.ndarray
    attempt_ok: np.ndarray
    attempt_offsets: np.ndarray
    slots: int
    interferer_activity: float = math.nan
    typical_activity: float = math.nan
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.arrival)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(i)
        a, b = self.attempt_offsets[i], self.attempt_offsets[i + 1]
        done = int(self.delivered[i])
        return PacketRecord(
            arrival_slot=int(self.arrival[i]),
            attempt_slots=tuple(int(s) for s in self.attempt_slots[a:b]),
            delivered_slot=done if done >= 0 else None,
            secrecy_compromised=tuple(bool(c) for c in self.compromised_by[i]),
        )

    @property
    def n_eavesdroppers(self) -> int:
        return self.compromised_by.shape[1]

    @property
    def delivered_mask(self) -> np.ndarray:
        return self.delivered >= 0

    @property
    def delays(self) -> np.ndarray:
        m = self.delivered_mask
        return self.delivered[m] - self.arrival[m] + 1

    @property
    def censored(self) -> int:
        return int(np.count_nonzero(~self.delivered_mask))

    @property
    def censored_fraction(self) -> float:
        return self.censored / len(self) if len(self) else 0.0

    @property
    def unreliable(self) -> bool:
        """True when too many messages are still queued at the horizon."""
        return self.censored_fraction > CENSORED_LIMIT

    @property
    def attempt_failure_rate(self) -> float:
        n = self.attempt_ok.size
        return 1.0 - np.count_nonzero(self.attempt_ok) / n if n else math.nan


def estimate_metrics(records, eavesdropper_count: int) -> tuple[Estimate, Estimate]:
    """Mean delay and secrecy outage, each with a 95% confidence half-width.

    Only delivered messages enter either estimate; the number still queued is
    available from :attr:`RunResult.censored`.  When nothing was delivered the
    delay estimate is ``inf`` with ``n = 0``.
    """
    if isinstance(records, RunResult):
        if len(records) == 0:
            raise ValueError("no records to estimate from")
        delays = records.delays
        exposed = np.any(records.compromised_by[records.delivered_mask], axis=1)
    else:
        records = list(records)
        if not records:
            raise ValueError("no records to estimate from")
        done = [r for r in records if r.delivered_slot is not None]
        delays = np.array([r.delay for r in done], dtype=float)
        exposed = np.array([r.compromised for r in done], dtype=bool)
    n = len(delays)
    if n == 0:
        inf = Estimate(math.inf, math.inf, 0)
        return inf, Estimate(math.nan, math.nan, 0)
    if eavesdropper_count == 0:
        exposed = np.zeros(n, dtype=bool)
    return Estimate.from_samples(delays), Estimate.from_proportion(int(np.count_nonzero(exposed)), n)
