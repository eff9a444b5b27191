import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splitquad import exp_sums as es
from splitquad.errors import ArgumentError, CapabilityError
from splitquad.forms import QuadraticFormF0

RNG = np.random.default_rng(421)


def ramanujan_direct(q, n):
    return round(sum(math.cos(2 * math.pi * a * n / q)
                     for a in range(1, q + 1) if math.gcd(a, q) == 1))


def test_ramanujan_small_values():
    assert es.ramanujan(1, 5) == 1
    assert es.ramanujan(2, 1) == -1
    assert es.ramanujan(4, 2) == -2
    assert es.ramanujan(6, 0) == 2     # phi(6)
    for q in range(1, 30):
        for n in (0, 1, 2, 6, 12):
            assert es.ramanujan(q, n) == ramanujan_direct(q, n)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.integers(-30, 30))
def test_ramanujan_multiplicative(q1, q2, n):
    if math.gcd(q1, q2) != 1:
        return
    assert es.ramanujan(q1 * q2, n) == es.ramanujan(q1, n) * es.ramanujan(q2, n)


def test_S_q_spec_values():
    form = QuadraticFormF0(3)
    assert es.S_q_factored(form, 2, [0] * 6, 0).value_exact == 8
    assert es.S_q_factored(form, 4, [0] * 6, 6).value_exact == -128
    v = es.S_q_factored(form, 4, [1, 0, 0, 1, 0, 0], 0)
    assert abs(v.value) < 1e-9


def test_S_q_naive_matches_factored():
    form = QuadraticFormF0(3)
    cs = [tuple(int(v) for v in RNG.integers(-5, 6, size=6)) for _ in range(4)]
    cs.append((0,) * 6)
    for q in (2, 3, 4, 5, 8, 9, 12):
        for c in cs:
            for t in (0, 1, -6):
                a = es.S_q_naive(form, q, c, t).value
                b = es.S_q_factored(form, q, c, t).value
                assert a == pytest.approx(b, rel=1e-8, abs=1e-6 * q ** 3)


def test_S_q_naive_cap():
    form = QuadraticFormF0(3)
    with pytest.raises(CapabilityError):
        es.S_q_naive(form, 65, [0] * 6, 0)


def test_S_q_zero_c_closed_form():
    form = QuadraticFormF0(3)
    for q in range(1, 30):
        for t in (0, 1, 6):
            assert es.S_q_factored(form, q, [0] * 6, t).value_exact \
                == q ** 3 * es.ramanujan(q, t)


def test_S_q_multiplicative_exact():
    form = QuadraticFormF0(3)
    for q1, q2 in ((2, 3), (3, 4), (4, 5), (5, 9), (7, 8), (8, 9)):
        for t in (0, 1, 6):
            a = es.S_q_factored(form, q1 * q2, [0] * 6, t).value_exact
            b = es.S_q_factored(form, q1, [0] * 6, t).value_exact
            c = es.S_q_factored(form, q2, [0] * 6, t).value_exact
            assert a == b * c


def test_sigma_p_values():
    val2, _, tail2 = es.sigma_p(2, 6, 0)
    assert abs(val2 - Fraction(7, 6)) <= Fraction(7, 6) * Fraction(1, 10 ** 10)
    val3, _, _ = es.sigma_p(3, 6, 0)
    assert abs(val3 - Fraction(13, 12)) <= Fraction(13, 12) * Fraction(1, 10 ** 10)
    assert es.remark5_sigma_p(2, 3) == Fraction(9, 8)
    assert es.remark5_sigma_p(3, 3) == Fraction(29, 27)
    with pytest.raises(ArgumentError):
        es.sigma_p(4, 6, 0)
    with pytest.raises(ArgumentError):
        es.sigma_p(2, 4, 0)


def local_density_exhaustive(p, k, d1, t):
    """Literal residue count; only for small p^k."""
    pk = p ** k
    count = 0
    for z in product(range(pk), repeat=2 * d1):
        if sum(z[i] * z[d1 + i] for i in range(d1)) % pk == t % pk:
            count += 1
    return Fraction(count, pk ** (2 * d1 - 1))


def test_local_density_exhaustive_small():
    for (p, k, d1, t) in ((2, 1, 2, 0), (2, 1, 2, 1), (3, 1, 2, 0), (2, 2, 2, 1)):
        assert es.local_density(p, k, d1, t) == local_density_exhaustive(p, k, d1, t)


def test_local_density_k1_matches_remark5():
    for p in (2, 3, 5, 7):
        for d1 in (2, 3):
            assert es.local_density(p, 1, d1, 0) == es.remark5_sigma_p(p, d1)


def test_local_density_matches_truncated_series():
    for (p, k) in ((2, 1), (2, 2), (2, 3), (3, 1), (5, 1)):
        for t in (0, 1):
            series = sum(Fraction(es.ramanujan(p ** l, t), p ** (3 * l))
                         for l in range(k + 1))
            assert es.local_density(p, k, 3, t) == series


def test_sigma_reports_consistent():
    eu = es.sigma_euler(500, 6, 0)
    di = es.sigma_dirichlet(5000, 6, 0)
    assert abs(eu.value - di.value) <= eu.tail_bound + di.tail_bound
    assert eu.tail_bound >= 0 and di.tail_bound >= 0
    r5 = es.sigma_remark5_product(500, 3)
    assert r5.value == pytest.approx(1.3059, abs=2e-3)


def test_sigma_euler_reports_per_prime():
    rep = es.sigma_euler(20, 6, 0)
    primes = [pp[0] for pp in rep.per_prime]
    assert primes == [2, 3, 5, 7, 11, 13, 17, 19]
    assert rep.per_prime[0][1] == pytest.approx(7 / 6, rel=1e-9)
