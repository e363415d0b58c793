import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from smoothnp.classical import (
    classical_null_moments,
    exact_sign_distribution,
    exact_wilcoxon_distribution,
    sign_statistic,
    wilcoxon_statistic,
    wilcoxon_statistic_direct,
)


def brute_force_wilcoxon(n):
    counts = [0] * (n * (n + 1) // 2 + 1)
    for signs in itertools.product((0, 1), repeat=n):
        counts[sum(r for r, s in zip(range(1, n + 1), signs) if s)] += 1
    return counts


@pytest.mark.parametrize("n", range(1, 13))
def test_wilcoxon_dp_matches_enumeration(n):
    assert list(exact_wilcoxon_distribution(n).counts) == brute_force_wilcoxon(n)


@pytest.mark.parametrize("n", range(1, 21))
def test_exact_moments(n):
    mean, var = exact_wilcoxon_distribution(n).moments()
    assert mean == Fraction(n * (n + 1), 4)
    assert var == Fraction(n * (n + 1) * (2 * n + 1), 24)
    mean, var = exact_sign_distribution(n).moments()
    assert (mean, var) == (Fraction(n, 2), Fraction(n, 4))


def test_sign_tail_example():
    d = exact_sign_distribution(10)
    assert d.upper_tail(8) == pytest.approx(56 / 1024)
    assert d.upper_tail(0) == 1.0 and d.upper_tail(11) == 0.0
    assert d.critical_value(0.05) == 9


def test_critical_value_property():
    d = exact_wilcoxon_distribution(15)
    c = d.critical_value(0.05)
    assert d.upper_tail(c) <= 0.05 < d.upper_tail(c - 1)
    assert d.mass.sum() == pytest.approx(1.0)
    assert np.all(np.diff(d.upper_tail_array()) <= 0)


def test_distribution_ranges():
    with pytest.raises(ValueError):
        exact_sign_distribution(0)
    with pytest.raises(ValueError):
        exact_wilcoxon_distribution(61)
    with pytest.raises(ValueError):
        classical_null_moments("t", 5)


def test_statistics_on_small_sample():
    x = [1.5, -0.5, 2.0, -3.0, 0.0]
    assert sign_statistic(x) == 3
    assert wilcoxon_statistic(x) == wilcoxon_statistic_direct(x)


@given(st.lists(st.floats(-100, 100), min_size=1, max_size=40))
def test_walsh_count_matches_double_loop(x):
    assert wilcoxon_statistic(x) == wilcoxon_statistic_direct(x)


@given(st.lists(st.floats(-1e3, 1e3).filter(lambda v: v != 0), min_size=1, max_size=30,
                unique_by=abs))
def test_walsh_count_equals_signed_rank_sum(x):
    # with distinct |x| and no zeros the pair count is the rank sum of positives
    x = np.array(x)
    ranks = np.argsort(np.argsort(np.abs(x))) + 1
    assert wilcoxon_statistic(x) == int(ranks[x > 0].sum())
