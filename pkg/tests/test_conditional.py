import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from secdelay import DomainError, InvalidParameterError
from secdelay import analytic as an
from secdelay.simulator import PointPattern, place_network


def pattern(interferers=(), eavesdroppers=(), side=100.0):
    return PointPattern(side, 1.0, np.array(interferers, float), np.array(eavesdroppers, float))


def test_pcf_no_interferers():
    assert an.conditional_connection_failure(pattern(), 0.8, 7.0, 4.0) == 0.0


def test_pcf_single_interferer():
    # interferer at distance 1 from the receiver at (1, 0)
    pat = pattern([[1.0, 1.0]])
    assert an.conditional_connection_failure(pat, 1.0, 1.0, 4.0) == pytest.approx(0.5, abs=1e-15)


def test_decode_no_eavesdroppers():
    pat = pattern([[3.0, 3.0]])
    assert an.conditional_eavesdropper_decode(pat, 0.8, 1.0, 4.0).size == 0
    assert an.conditional_secrecy_failure(pat, 0.8, 1.0, 4.0) == 0.0


def test_decode_no_interferers():
    pat = pattern([], [[5.0, 5.0]])
    assert an.conditional_secrecy_failure(pat, 0.8, 1.0, 4.0) == 1.0


def test_decode_symmetric_single_term():
    # eavesdropper at |x_e| = 1, one interferer at distance 1 from it
    pat = pattern([[0.0, 2.0]], [[0.0, 1.0]])
    assert an.conditional_secrecy_failure(pat, 1.0, 1.0, 4.0) == pytest.approx(0.5, abs=1e-15)


def test_secrecy_outage_values():
    assert an.conditional_secrecy_outage(0.3, 0.0) == 0.0
    assert an.conditional_secrecy_outage(0.0, 0.37) == pytest.approx(0.37, rel=1e-15)
    assert an.conditional_secrecy_outage(0.5, 0.2) == pytest.approx(1 / 3, rel=1e-14)
    assert an.conditional_secrecy_outage(0.5, 0.2) == pytest.approx(oracles.series_secrecy_outage(0.5, 0.2), rel=1e-12)


@given(st.floats(0, 0.99), st.floats(0, 1))
def test_secrecy_outage_matches_series(pcf, psf):
    ref = oracles.series_secrecy_outage(pcf, psf, terms=4000)
    assert an.conditional_secrecy_outage(pcf, psf) == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_secrecy_outage_errors():
    with pytest.raises(DomainError):
        an.conditional_secrecy_outage(1.0, 0.0)
    with pytest.raises(InvalidParameterError):
        an.conditional_secrecy_outage(1.2, 0.1)
    assert an.conditional_secrecy_outage(1.0, 0.4) == 1.0


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_pcf_nondecreasing_in_p(seed, p1, p2):
    pat = place_network(15, 0, seed=seed)
    lo, hi = sorted((p1, p2))
    assert an.conditional_connection_failure(pat, lo, 7.0, 4.0) <= an.conditional_connection_failure(pat, hi, 7.0, 4.0)


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 100.0), st.floats(0.0, 100.0))
def test_pcf_nondecreasing_in_theta(seed, t1, t2):
    pat = place_network(15, 0, seed=seed)
    lo, hi = sorted((t1, t2))
    assert an.conditional_connection_failure(pat, 0.8, lo, 4.0) <= an.conditional_connection_failure(pat, 0.8, hi, 4.0)


def test_pcf_against_fading_oracle_one_pattern():
    pat = place_network(10, 3, seed=11)
    n = 200_000
    fails, decodes, anyd = oracles.fading_monte_carlo(
        pat.interferers, pat.eavesdroppers, pat.torus_side, 1.0, 4.0, 0.8, 7.0, 1.0, n, seed=5
    )
    pcf = an.conditional_connection_failure(pat, 0.8, 7.0, 4.0)
    se = math.sqrt(pcf * (1 - pcf) / n)
    assert abs(fails / n - pcf) <= 4 * se
    dec = an.conditional_eavesdropper_decode(pat, 0.8, 1.0, 4.0)
    se_e = np.sqrt(dec * (1 - dec) / n) + 1e-12
    assert np.all(np.abs(decodes / n - dec) <= 4 * se_e)
    psf = an.conditional_secrecy_failure(pat, 0.8, 1.0, 4.0)
    assert abs(anyd / n - psf) <= 4 * math.sqrt(psf * (1 - psf) / n) + 1e-12
