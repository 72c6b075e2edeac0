"""Laurent arithmetic, parsing, matrices and the random samplers."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from btq.errors import InvalidInputError
from btq.laurent import (
    LaurentMatrix,
    LaurentPoly,
    OPrecision,
    is_unit_in_O,
    random_gamma,
    random_k,
    series_inverse,
)


def P(s, q=2):
    return LaurentPoly.parse(s, q)


def test_monomial_shift_example():
    assert P("t^2 + 1") * P("t^-1") == P("t + t^-1")


def test_char2_square():
    assert P("t + 1") * P("t + 1") == P("t^2 + 1")


def test_valuation_example():
    assert P("t^3 + t").valuation() == -3


def test_is_unit_in_O():
    assert is_unit_in_O(P("1 + t^-1"))
    assert not is_unit_in_O(P("t"))
    assert not is_unit_in_O(P("t^-2"))
    with pytest.raises(InvalidInputError):
        is_unit_in_O(LaurentPoly.zero(2))


def test_monomial_division():
    assert P("t^2 + t").monomial_div(P("t")) == P("t + 1")
    with pytest.raises(InvalidInputError):
        P("t").monomial_div(P("t + 1"))
    with pytest.raises(InvalidInputError):
        P("t").monomial_div(LaurentPoly.zero(2))


def test_parse_round_trip():
    cases = ["0", "1", "t", "t^-2", "2*t^3 + 1", "t^2 + t + 1", "t^5 + t^-5"]
    for q in (2, 3, 5):
        for s in cases:
            f = LaurentPoly.parse(s, q)
            assert LaurentPoly.parse(str(f), q) == f


def test_parse_signs_and_rejects():
    assert P("t - 1", 3) == P("t + 2", 3)
    assert P("-t^2", 3) == P("2*t^2", 3)
    with pytest.raises(InvalidInputError):
        LaurentPoly.parse("t^", 2)
    with pytest.raises(InvalidInputError):
        LaurentPoly.parse("t +", 2)
    with pytest.raises(InvalidInputError):
        LaurentPoly.parse("", 2)


coeff_maps = st.dictionaries(st.integers(-6, 6), st.integers(0, 2), max_size=5)


@settings(max_examples=200, deadline=None)
@given(coeff_maps, coeff_maps, coeff_maps)
def test_ring_axioms_hypothesis(ca, cb, cc):
    q = 3
    a, b, c = (LaurentPoly(m, q) for m in (ca, cb, cc))
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == LaurentPoly.zero(q)


@settings(max_examples=150, deadline=None)
@given(coeff_maps, coeff_maps)
def test_valuation_additivity(ca, cb):
    a, b = LaurentPoly(ca, 3), LaurentPoly(cb, 3)
    if a.is_zero() or b.is_zero():
        return
    assert (a * b).valuation() == a.valuation() + b.valuation()


def test_det_examples():
    q = 2
    assert LaurentMatrix.diagonal((2, 1, 0), q).det() == P("t^3")
    assert LaurentMatrix.identity(3, q).det() == P("1")
    m = LaurentMatrix(
        [[P("t^3"), P("0"), P("0")], [P("t^2"), P("t"), P("0")], [P("t"), P("0"), P("1")]],
        q,
    )
    assert m.det() == P("t^4")


def test_det_multiplicative_random():
    rng = random.Random(11)
    for q in (2, 3):
        for d in (2, 3, 4):
            for _ in range(17):
                a = random_gamma(d, q, 2, rng)
                b = random_k(d, q, 3, rng)
                assert (a * b).det() == a.det() * b.det()


def test_adjugate_identity():
    rng = random.Random(5)
    for d in (2, 3):
        m = random_gamma(d, 3, 2, rng)
        prod = m.adjugate() * m
        det = m.det()
        for i in range(d):
            for j in range(d):
                expected = det if i == j else LaurentPoly.zero(3)
                assert prod.entry(i, j) == expected


def test_random_gamma_contract():
    for seed in range(20):
        g = random_gamma(3, 2, 2, seed)
        det = g.det()
        assert det.is_monomial() and det.degree() == 0
        for row in g.rows:
            for x in row:
                assert x.is_zero() or (0 <= x.low_exponent() and x.degree() <= 2)


def test_random_gamma_deg_zero_is_constant():
    g = random_gamma(3, 3, 0, 4)
    for row in g.rows:
        for x in row:
            assert x.is_zero() or x.degree() == 0


def test_random_gamma_product_degree():
    rng = random.Random(3)
    a = random_gamma(3, 2, 2, rng)
    b = random_gamma(3, 2, 3, rng)
    prod = a * b
    assert all(x.is_zero() or x.degree() <= 5 for row in prod.rows for x in row)
    det = prod.det()
    assert det.is_monomial() and det.degree() == 0


def test_random_k_contract():
    for seed in range(20):
        k = random_k(3, 2, OPrecision(8), seed)
        assert is_unit_in_O(k.det())
        for row in k.rows:
            for x in row:
                assert x.is_zero() or (-8 <= x.low_exponent() and x.degree() <= 0)


def test_series_inverse():
    for q in (2, 5):
        f = LaurentPoly({0: 1, -1: q - 1, -3: 1}, q)
        g = series_inverse(f, 12)
        prod = f * g
        assert prod.coeff(0) == 1
        assert all(e < -12 for e in prod.coeffs if e != 0)
    with pytest.raises(InvalidInputError):
        series_inverse(P("t"), 4)


def test_matrix_literal_round_trip():
    m = LaurentMatrix(
        [[P("t^2 + 1"), P("t^-1")], [P("0"), P("1")]],
        2,
    )
    assert LaurentMatrix.from_literal(m.to_literal()) == m
    with pytest.raises(InvalidInputError):
        LaurentMatrix.from_literal({"q": 2, "d": 2, "entries": [["1"]]})


def test_oprecision_validation():
    with pytest.raises(InvalidInputError):
        OPrecision(-1)
