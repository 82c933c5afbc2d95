"""Monte Carlo simulation of the slotted ALOHA network on a torus."""

from .attempts import Mode, sample_attempts
from .backlogged import simulate_backlogged
from .dynamic import simulate_dynamic
from .network import PointPattern, default_torus_side, place_network, restrict_torus, sample_network
from .records import Estimate, PacketRecord, RunResult, estimate_metrics
from .replicate import (
    PatternAverage,
    ReplicationSummary,
    coupled_pattern_average,
    pattern_average,
    replicate,
)

__all__ = [
    "Estimate",
    "Mode",
    "PacketRecord",
    "PatternAverage",
    "PointPattern",
    "ReplicationSummary",
    "RunResult",
    "coupled_pattern_average",
    "default_torus_side",
    "estimate_metrics",
    "pattern_average",
    "place_network",
    "replicate",
    "restrict_torus",
    "sample_attempts",
    "sample_network",
    "simulate_backlogged",
    "simulate_dynamic",
]
