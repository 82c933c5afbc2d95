"""Independent reference computations used by the test suite.

Nothing here imports the formulas under test: closed forms are re-derived
in mpmath, the fixed point is found by bisection, the retransmission series
is summed term by term and fading is simulated from raw distances.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np

mp.mp.dps = 40


def mp_threshold(rate):
    return mp.mpf(2) ** mp.mpf(rate) - 1


def mp_C(delta):
    delta = mp.mpf(delta)
    return mp.gamma(1 + delta) * mp.gamma(1 - delta)


def mp_A(lambda_l, r0, alpha, theta_t):
    d = mp.mpf(2) / alpha
    return mp.mpf(lambda_l) * mp.pi * mp.mpf(r0) ** 2 * mp.mpf(theta_t) ** d * mp_C(d)


def mp_backlogged_delay(lambda_l, r0, alpha, p, theta_t):
    d = mp.mpf(2) / alpha
    A = mp_A(lambda_l, r0, alpha, theta_t)
    p = mp.mpf(p)
    return mp.exp(A * p * (1 - p) ** (d - 1)) / p


def mp_outage_inner(lambda_l, lambda_e, r0, alpha, q, theta_t, theta_e):
    """Secrecy outage of one message with interferer activity ``q``.

    Written in the exp(+x) form of the ratio rather than the exp(-x) form the
    package uses, so the two are independent algebraic routes.
    """
    d = mp.mpf(2) / alpha
    q = mp.mpf(q)
    A = mp_A(lambda_l, r0, alpha, theta_t)
    x = mp.mpf(lambda_e) / (q * lambda_l * mp.mpf(theta_e) ** d * mp_C(d))
    num = mp.exp(x) - 1
    return num / (num + mp.exp(-q * A))


def bisect_fixed_point(xi, A, tol=1e-15):
    """Smallest q in [0, 1] with q = xi * exp(q A); 1 if none exists."""
    def f(q):
        return q - xi * math.exp(q * A)

    if xi == 0:
        return 0.0
    hi = 1.0
    if A > 0:
        # f is concave with its maximum at q = ln(1/(xi A)) / A
        top = math.log(1.0 / (xi * A)) / A if xi * A < 1 else 0.0
        hi = min(max(top, 0.0), 1.0)
    if f(hi) < 0:
        return 1.0
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def series_secrecy_outage(pcf, psf, terms=10_000):
    """Sum over the attempt count n of P(n attempts) * P(some interception)."""
    total = 0.0
    pn = 1.0 - pcf
    for n in range(1, terms + 1):
        total += (1.0 - (1.0 - psf) ** n) * pn
        pn *= pcf
    return total


def series_unstructured_delay(xi, s, terms=200_000):
    """Mean sojourn of a discrete-time queue, via slot-by-slot recursion.

    Bernoulli(xi) arrivals at slot start, Bernoulli(s) service of the head
    message in the same slot.  Power iteration on the embedded chain gives
    the stationary occupancy distribution, Little's law the delay.
    """
    n_max = 4000
    pi = np.zeros(n_max)
    pi[0] = 1.0
    for _ in range(terms):
        # arrival then service
        after = np.zeros(n_max)
        after[0] += pi[0] * (1 - xi)
        after[1:] += pi[1:] * (1 - xi)
        after[1:] += pi[:-1] * xi
        new = after.copy()
        new[1:] -= after[1:] * s
        new[:-1] += after[1:] * s
        if np.max(np.abs(new - pi)) < 1e-15:
            pi = new
            break
        pi = new
    # Little: mean number after arrival and before service, divided by rate
    after = np.zeros(n_max)
    after[0] += pi[0] * (1 - xi)
    after[1:] += pi[1:] * (1 - xi)
    after[1:] += pi[:-1] * xi
    return float(np.dot(np.arange(n_max), after) / xi)


def torus_distance(a, b, side):
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    diff = np.mod(diff + side / 2, side) - side / 2
    return np.sqrt(np.sum(diff**2, axis=-1))


def fading_monte_carlo(interferers, eavesdroppers, side, r0, alpha, p, theta_t, theta_e,
                       n, seed, chunk=50_000):
    """Count connection failures and per-eavesdropper decodes over ``n`` slots.

    Each interferer is active independently per observer, with its own fading
    per observer, because the conditional formulas assume exactly that.
    """
    rng = np.random.default_rng(seed)
    rx = np.array([r0, 0.0])
    d_rx = torus_distance(interferers, rx, side)
    d_link_e = torus_distance(eavesdroppers, np.zeros(2), side)
    d_e = np.array([torus_distance(interferers, e, side) for e in eavesdroppers])
    fails = 0
    decodes = np.zeros(len(eavesdroppers), dtype=np.int64)
    any_decode = 0
    done = 0
    while done < n:
        c = min(chunk, n - done)
        act = rng.random((c, len(interferers))) < p
        pw = rng.exponential(size=(c, len(interferers))) * act * d_rx ** -alpha
        sig = rng.exponential(size=c) * r0 ** -alpha
        fails += int(np.count_nonzero(sig < theta_t * pw.sum(axis=1)))
        hit = np.zeros(c, dtype=bool)
        for k in range(len(eavesdroppers)):
            act_e = rng.random((c, len(interferers))) < p
            pw_e = rng.exponential(size=(c, len(interferers))) * act_e * d_e[k] ** -alpha
            sig_e = rng.exponential(size=c) * d_link_e[k] ** -alpha
            dec = sig_e >= theta_e * pw_e.sum(axis=1)
            decodes[k] += int(np.count_nonzero(dec))
            hit |= dec
        any_decode += int(np.count_nonzero(hit))
        done += c
    return fails, decodes, any_decode
