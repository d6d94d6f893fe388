"""
Tests for attainable orders, structure prediction and the bound evaluators
"""

import math

import pytest
from sympy import primerange

from src.curves.attainability import (
    OracleMinimum,
    OrderKind,
    divisor_structures,
    exponent_floor,
    hasse_window,
    interval_I,
    k_set_membership,
    min_exponent_oracle,
    ordinary_structures,
    qk_bound,
    ruck_structures,
    trivial_exponent_bound,
    waterhouse_attainable,
)
from src.curves.curve_scan import CurveClassScanner
from src.curves.elliptic_core import WeierstrassCurve, group_structure
from src.errors import ArgumentError, DomainError, UnsupportedFieldError


def ordinary_curve_structures(p):
    """(N, m1, m2) of every ordinary curve over F_p, by full enumeration."""
    found = set()
    for a in range(p):
        for b in range(p):
            if (4 * a ** 3 + 27 * b * b) % p == 0:
                continue
            gs = group_structure(WeierstrassCurve(p, a, b))
            if gs.trace != 0:
                found.add((gs.N, gs.m1, gs.m2))
    return found


def test_hasse_window():
    w = hasse_window(5, 1)
    assert (w.lo_int, w.hi_int) == (2, 10)
    assert 2 in w and 10 in w and 11 not in w
    w2 = hasse_window(5, 2)
    assert (w2.lo_int, w2.hi_int) == (3, 109)
    assert w2.lower == pytest.approx((math.sqrt(5) - 1) ** 4)


def test_hasse_window_on_square_field():
    w = hasse_window(49, 1)
    assert (w.lo_int, w.hi_int) == (36, 64)


def test_waterhouse_examples():
    assert waterhouse_attainable(5, 6).kind is OrderKind.SUPERSINGULAR
    assert waterhouse_attainable(5, 4).kind is OrderKind.ORDINARY
    assert waterhouse_attainable(5, 12).kind is OrderKind.NOT_ATTAINABLE
    assert waterhouse_attainable(5, 4).trace == 2
    with pytest.raises(UnsupportedFieldError):
        waterhouse_attainable(3, 4)


def test_ruck_examples():
    assert ruck_structures(7, 9) == [(3, 3), (1, 9)]
    assert ruck_structures(5, 8) == [(2, 4), (1, 8)]
    with pytest.raises(DomainError):
        ruck_structures(5, 6)
    with pytest.raises(DomainError):
        ruck_structures(5, 12)


def test_divisor_structures_are_consistent():
    for m1, m2 in divisor_structures(31, 36):
        assert m1 * m2 == 36 and m2 % m1 == 0 and 30 % m1 == 0


@pytest.mark.parametrize("p", list(primerange(5, 30)))
def test_predicted_structures_match_enumeration(p):
    predicted = set(ordinary_structures(p))
    assert predicted == ordinary_curve_structures(p)
    best = min_exponent_oracle(p)
    assert best.exponent == min(m2 for _, _, m2 in predicted)


def test_oracle_examples():
    assert min_exponent_oracle(5) == OracleMinimum(exponent=2, N=4, m1=2, m2=2)
    assert min_exponent_oracle(7) == OracleMinimum(exponent=2, N=4, m1=2, m2=2)
    assert min_exponent_oracle(11) == OracleMinimum(exponent=4, N=8, m1=2, m2=4)


def test_oracle_respects_trivial_bound():
    for p in primerange(5, 2000):
        assert min_exponent_oracle(p).exponent >= trivial_exponent_bound(p)


def test_exponent_floor():
    assert exponent_floor(29, 1, 1, (2,)) == pytest.approx(9.615, abs=1e-3)
    assert exponent_floor(29, 1, 1, (1,)) == pytest.approx((math.sqrt(29) - 1) ** 2)
    assert exponent_floor(10**4, 2, 1, (1,)) == pytest.approx(99 ** (4 / 3))
    with pytest.raises(ArgumentError):
        exponent_floor(29, 1, 2, (2, 2))
    with pytest.raises(ArgumentError):
        exponent_floor(29, 2, 2, (2,))


def test_qk_bound():
    assert qk_bound(100, 1, (2,)).bound == pytest.approx(862.125)
    assert qk_bound(100, 1, (1,)).bound == pytest.approx(6776)
    assert qk_bound(100, 2, (1, 1, 1)).U == pytest.approx(11 ** 4)
    with pytest.raises(ArgumentError):
        qk_bound(100, 2, (2,))
    with pytest.raises(ArgumentError):
        qk_bound(100, 1, (0,))


def test_k_set_membership():
    lo, hi = interval_I(10**4, 0.005)
    assert lo == pytest.approx(10 ** 0.94)
    assert hi == pytest.approx(10 ** 1.06)
    assert k_set_membership(10**4, 0.005, 1, (12,)).in_K
    inside = k_set_membership(10**4, 0.005, 1, (10,))
    assert not inside.outside_interval and not inside.in_K
    small = k_set_membership(10**4, 0.005, 1, (5,))
    assert small.outside_interval and not small.weighted_first_half
    with pytest.raises(ArgumentError):
        k_set_membership(10**4, 0.01, 1, (12,))


def class_structures(p):
    """(N, m1, m2) of every ordinary class representative over F_p."""
    found = set()
    for a, b, N in CurveClassScanner(p).representatives():
        if N != p + 1:
            gs = group_structure(WeierstrassCurve(p, a, b), order=N)
            found.add((N, gs.m1, gs.m2))
    return found


@pytest.mark.parametrize("p", list(primerange(30, 201)))
def test_predicted_structures_match_class_scan(p):
    assert set(ordinary_structures(p)) == class_structures(p)


def test_hasse_window_matches_trace_bound():
    for p in primerange(5, 2000):
        w = hasse_window(p)
        expected = [N for N in range(p + 1 - 2 * math.isqrt(p) - 2, p + 4 + 2 * math.isqrt(p))
                    if (p + 1 - N) ** 2 <= 4 * p]
        assert list(w.integer_range) == expected
        assert all(N in w for N in expected)
        assert (w.lo_int - 1) not in w and (w.hi_int + 1) not in w


def test_qk_bound_is_monotone():
    xs = [50, 100, 1000, 10**4, 10**6]
    for k1 in (1, 2, 3, 7):
        bounds = [qk_bound(x, 1, (k1,)).bound for x in xs]
        assert bounds == sorted(bounds)
    for x in xs:
        bounds = [qk_bound(x, 1, (k1,)).bound for k1 in range(1, 20)]
        assert bounds == sorted(bounds, reverse=True)
    assert qk_bound(10**4, 2, (1, 2, 3)).bound >= qk_bound(10**4, 2, (2, 2, 3)).bound


def test_exponent_floor_is_monotone():
    qs = [5, 29, 101, 1009, 10**4]
    for k in ((1,), (2,), (5,)):
        floors = [exponent_floor(q, 1, 1, k) for q in qs]
        assert floors == sorted(floors)
    floors = [exponent_floor(10**4, 2, 2, (k1, 3)) for k1 in range(1, 10)]
    assert floors == sorted(floors, reverse=True)
    floors = [exponent_floor(10**4, 2, 2, (3, k2)) for k2 in range(1, 10)]
    assert floors == sorted(floors, reverse=True)
