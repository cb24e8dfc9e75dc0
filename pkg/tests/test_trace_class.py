"""Partial sums of s-numbers at p = 1 for (Robin, Robin) pairs."""
import numpy as np
import pytest

from robinlap import model_domains as md
from robinlap import schatten_analysis as sa
from robinlap import triple_engine as te
from robinlap.verification import robin

PAIR = te.ExtensionPair(robin(2), robin(-1))


def change(n, cutoff=4000):
    spectrum = te.singular_spectrum(PAIR, md.make_ball(n), 1j, cutoff)
    a, b = sa.schatten_partial_sums(spectrum, 1.0, [cutoff // 2, cutoff])
    return b - a


def test_disk_sum_stabilizes():
    assert 0 <= change(2) < 1e-6


@pytest.mark.xfail(strict=True, reason="s_k ~ k^-3/2 leaves a tail near 1e-2 between K=2000 and 4000")
def test_ball_sum_stabilizes():
    assert change(3) < 1e-6


def test_ball_sum_converges():
    # the weaker, reachable statement: increments shrink like K^-1/2
    spectrum = te.singular_spectrum(PAIR, md.make_ball(3), 1j, 400)
    sums = sa.schatten_partial_sums(spectrum, 1.0, [4000, 8000, 16000, 32000])
    inc = np.diff(sums)
    assert np.all(inc[1:] / inc[:-1] == pytest.approx(2 ** -0.5, abs=0.02))


def test_four_ball_sum_grows():
    spectrum = te.singular_spectrum(PAIR, md.make_ball(4), 1j, 60)
    sums = sa.schatten_partial_sums(spectrum, 1.0, [2000 * 2 ** j for j in range(6)])
    inc = np.diff(sums)
    # log-divergent: each doubling adds about the same amount
    assert np.all(inc > 0.1)
    assert np.all(inc[1:] / inc[:-1] > 0.9)
