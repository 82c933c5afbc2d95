"""Poisson network realizations on a square torus."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import InvalidParameterError, SystemParams

MIN_TORUS_FACTOR = 20.0
DEFAULT_TORUS_FACTOR = 40.0


@dataclass(frozen=True, eq=False)
class PointPattern:
    """One realization of legitimate interferers and eavesdroppers.

    The typical transmitter sits at the origin and its receiver at
    ``(r0, 0)``.  Every other legitimate transmitter has its own receiver at
    distance ``r0`` in a uniformly random direction (``interferer_rx``);
    those receivers only matter when interferer queues are simulated.
    """

    torus_side: float
    r0: float
    interferers: np.ndarray
    eavesdroppers: np.ndarray
    interferer_rx: np.ndarray = field(default=None)

    def __post_init__(self):
        inter = np.asarray(self.interferers, dtype=float).reshape(-1, 2)
        eaves = np.asarray(self.eavesdroppers, dtype=float).reshape(-1, 2)
        rx = self.interferer_rx
        if rx is None:
            rx = inter + np.array([self.r0, 0.0])
        rx = np.asarray(rx, dtype=float).reshape(-1, 2)
        if rx.shape != inter.shape:
            raise InvalidParameterError("interferer_rx must match interferers")
        for arr in (inter, eaves, rx):
            arr.setflags(write=False)
        object.__setattr__(self, "interferers", inter)
        object.__setattr__(self, "eavesdroppers", eaves)
        object.__setattr__(self, "interferer_rx", rx)

    @property
    def typical_tx(self) -> np.ndarray:
        return np.zeros(2)

    @property
    def typical_rx(self) -> np.ndarray:
        return np.array([self.r0, 0.0])

    @property
    def n_interferers(self) -> int:
        return len(self.interferers)

    @property
    def n_eavesdroppers(self) -> int:
        return len(self.eavesdroppers)

    def distances(self, a, b) -> np.ndarray:
        """Wrap-around Euclidean distance between broadcastable point arrays."""
        diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
        L = self.torus_side
        diff = diff - L * np.round(diff / L)
        return np.hypot(diff[..., 0], diff[..., 1])

    def transmitters(self) -> np.ndarray:
        """All legitimate transmitters, typical one first."""
        return np.vstack([self.typical_tx[None, :], self.interferers])

    def receivers(self) -> np.ndarray:
        return np.vstack([self.typical_rx[None, :], self.interferer_rx])

    def path_gains(self, alpha: float) -> tuple[np.ndarray, np.ndarray]:
        """Mean received powers ``d**-alpha``.

        Returns ``(to_rx, to_eaves)`` where ``to_rx[i, j]`` is the gain from
        transmitter ``j`` to receiver ``i`` and ``to_eaves[e, j]`` the gain
        from transmitter ``j`` to eavesdropper ``e`` (index 0 = typical).
        """
        tx = self.transmitters()
        to_rx = self.distances(tx[None, :, :], self.receivers()[:, None, :]) ** -alpha
        to_eaves = self.distances(tx[None, :, :], self.eavesdroppers[:, None, :]) ** -alpha
        return to_rx, to_eaves.reshape(len(self.eavesdroppers), len(tx))

    def equals(self, other: "PointPattern") -> bool:
        return (
            self.torus_side == other.torus_side
            and self.r0 == other.r0
            and np.array_equal(self.interferers, other.interferers)
            and np.array_equal(self.eavesdroppers, other.eavesdroppers)
            and np.array_equal(self.interferer_rx, other.interferer_rx)
        )


def default_torus_side(params: SystemParams) -> float:
    return DEFAULT_TORUS_FACTOR * params.r0


def _check_torus(torus_side: float, r0: float) -> None:
    if not torus_side >= MIN_TORUS_FACTOR * r0:
        raise InvalidParameterError(
            f"torus_side={torus_side!r} is below {MIN_TORUS_FACTOR:g} * r0; "
            "interference truncation would bias every estimate"
        )


def _uniform_points(rng: np.random.Generator, n: int, side: float) -> np.ndarray:
    return rng.uniform(0.0, side, size=(n, 2))


def _paired_receivers(rng, tx: np.ndarray, r0: float, side: float) -> np.ndarray:
    phi = rng.uniform(0.0, 2 * np.pi, size=len(tx))
    return np.mod(tx + r0 * np.column_stack([np.cos(phi), np.sin(phi)]), side)


def sample_network(params: SystemParams, torus_side: float | None = None, seed=None) -> PointPattern:
    """Draw Poisson(lambda L^2) interferers and eavesdroppers on an L x L torus.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``; the same
    seed always yields the same pattern.
    """
    L = default_torus_side(params) if torus_side is None else float(torus_side)
    _check_torus(L, params.r0)
    rng = np.random.default_rng(seed)
    area = L * L
    n_l = rng.poisson(params.lambda_l * area)
    n_e = rng.poisson(params.lambda_e * area)
    inter = _uniform_points(rng, n_l, L)
    eaves = _uniform_points(rng, n_e, L)
    rx = _paired_receivers(rng, inter, params.r0, L)
    return PointPattern(L, params.r0, inter, eaves, rx)


def place_network(
    n_interferers: int,
    n_eavesdroppers: int,
    r0: float = 1.0,
    torus_side: float | None = None,
    seed=None,
) -> PointPattern:
    """A pattern with fixed point counts, uniformly placed on the torus."""
    L = MIN_TORUS_FACTOR * r0 if torus_side is None else float(torus_side)
    _check_torus(L, r0)
    rng = np.random.default_rng(seed)
    inter = _uniform_points(rng, n_interferers, L)
    eaves = _uniform_points(rng, n_eavesdroppers, L)
    return PointPattern(L, r0, inter, eaves, _paired_receivers(rng, inter, r0, L))


def restrict_torus(pattern: PointPattern, side: float) -> PointPattern:
    """The part of ``pattern`` inside the ``side``-wide window around the origin.

    The window is re-wrapped as a smaller torus.  Restricting a Poisson
    pattern this way gives a Poisson pattern on the smaller torus that
    shares its inner points, which couples estimates across torus sizes.
    """
    _check_torus(side, pattern.r0)
    if side > pattern.torus_side:
        raise InvalidParameterError("can only restrict to a smaller torus")
    L = pattern.torus_side

    def centred(pts):
        return pts - L * np.round(pts / L)

    inter = centred(pattern.interferers)
    offset = centred(pattern.interferer_rx - pattern.interferers)
    eaves = centred(pattern.eavesdroppers)
    half = side / 2.0
    keep_i = np.all((inter >= -half) & (inter < half), axis=1)
    keep_e = np.all((eaves >= -half) & (eaves < half), axis=1)
    inter = np.mod(inter[keep_i], side)
    return PointPattern(
        side,
        pattern.r0,
        inter,
        np.mod(eaves[keep_e], side),
        np.mod(inter + offset[keep_i], side),
    )
