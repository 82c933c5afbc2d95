"""Interference constant and the principal branch of the Lambert W function."""

from __future__ import annotations

import math

from .core import DomainError

_EPS = 2.220446049250313e-16
# distance of e*z + 1 from zero below which z is taken to be -1/e itself
_BRANCH_SNAP = 8 * _EPS


def interference_constant(delta: float) -> float:
    """C(delta) = Gamma(1 + delta) * Gamma(1 - delta) = pi*delta / sin(pi*delta).

    Defined on 0 < delta < 1; the reflection form is used because it stays
    accurate as delta -> 0 where the gamma product rounds to 1.
    """
    if not 0 < delta < 1:
        raise DomainError(f"interference constant needs 0 < delta < 1, got {delta!r}")
    x = math.pi * delta
    return x / math.sin(x)


def lambert_w0(z: float) -> float:
    """Principal branch W0 of the Lambert W function for real ``z >= -1/e``.

    Returns ``w >= -1`` with ``w * exp(w) == z``.  Arguments within a few
    ulps of -1/e are snapped to the branch point so that ``-1/math.e`` maps
    to exactly -1.

    Raises
    ------
    DomainError
        If ``z < -1/e`` (no real solution on the principal branch) or is NaN.
    """
    z = float(z)
    if math.isnan(z):
        raise DomainError("lambert_w0 of NaN")
    if z == 0.0:
        return 0.0
    if z == math.inf:
        return math.inf
    ez1 = math.e * z + 1.0
    if ez1 < -_BRANCH_SNAP:
        raise DomainError(f"lambert_w0 needs z >= -1/e, got {z!r}")
    if ez1 <= _BRANCH_SNAP:
        return -1.0

    if z > 3.0:
        return _w_large(z)

    if ez1 < 0.5:
        # expansion around the branch point in q = sqrt(2(ez+1))
        q = math.sqrt(2.0 * ez1)
        w = -1.0 + q * (1.0 + q * (-1.0 / 3 + q * (11.0 / 72 + q * (-43.0 / 540 + q * 769.0 / 17280))))
    elif abs(z) < 0.25:
        w = z * (1.0 + z * (-1.0 + z * (1.5 + z * (-8.0 / 3))))
    else:
        # Winitzki's global approximation, good to a few percent on [0.25, 3]
        lz = math.log1p(z)
        w = lz * (1.0 - math.log1p(lz) / (2.0 + lz))
    return _halley(z, w)


def _halley(z: float, w: float) -> float:
    for _ in range(30):
        ew = math.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        dw = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w_new = w - dw
        if w_new < -1.0:
            w_new = -1.0 + (w + 1.0) / 2.0
        w = w_new
        if abs(dw) <= 4 * _EPS * (1.0 + abs(w)):
            break
    return w


def _w_large(z: float) -> float:
    # Newton on w + log(w) = log(z); avoids exp overflow for huge z
    lz = math.log(z)
    llz = math.log(lz) if lz > 1.0 else 0.0
    w = lz - llz + (llz / lz if lz > 1.0 else 0.0)
    if w <= 0.0:
        w = 1.0
    for _ in range(50):
        g = w + math.log(w) - lz
        dw = g / (1.0 + 1.0 / w)
        w -= dw
        if abs(dw) <= 2 * _EPS * w:
            break
    return w
