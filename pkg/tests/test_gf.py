"""Counting functions checked against exhaustive enumeration oracles."""

from itertools import product

import pytest

from btq.errors import InvalidInputError
from btq.gf import FqElem, gaussian_binomial, gl_order, pgl_order


def det_mod(mat, q):
    n = len(mat)
    m = [list(row) for row in mat]
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] % q), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det = (det * m[col][col]) % q
        inv = pow(m[col][col], q - 2, q)
        for r in range(col + 1, n):
            f = (m[r][col] * inv) % q
            for c in range(col, n):
                m[r][c] = (m[r][c] - f * m[col][c]) % q
    return det % q


def count_invertible(m, q):
    return sum(
        1
        for flat in product(range(q), repeat=m * m)
        if det_mod([flat[i * m : (i + 1) * m] for i in range(m)], q)
    )


def count_subspaces(d, k, q):
    # count distinct row spans of k x d matrices by collecting RREFs
    seen = set()
    for flat in product(range(q), repeat=k * d):
        rows = [list(flat[i * d : (i + 1) * d]) for i in range(k)]
        # row reduce
        rank = 0
        for col in range(d):
            piv = next((r for r in range(rank, k) if rows[r][col] % q), None)
            if piv is None:
                continue
            rows[rank], rows[piv] = rows[piv], rows[rank]
            inv = pow(rows[rank][col], q - 2, q)
            rows[rank] = [(x * inv) % q for x in rows[rank]]
            for r in range(k):
                if r != rank and rows[r][col] % q:
                    f = rows[r][col]
                    rows[r] = [(x - f * y) % q for x, y in zip(rows[r], rows[rank])]
            rank += 1
        if rank == k:
            seen.add(tuple(tuple(r) for r in rows))
    return len(seen)


def test_gl_order_examples():
    assert gl_order(1, 2) == 1
    assert gl_order(2, 2) == 6
    assert gl_order(3, 2) == 168


def test_gl_order_matches_enumeration():
    for q in (2, 3):
        for m in (1, 2, 3):
            if q ** (m * m) > 30000:
                continue
            assert gl_order(m, q) == count_invertible(m, q)
    assert gl_order(3, 3) == count_invertible(3, 3)


def test_pgl_order_examples():
    assert pgl_order(2, 2) == 6
    assert pgl_order(3, 2) == 168
    assert pgl_order(3, 3) == (3 - 1) ** 2 * 13 * 4 * 27 == 5616
    assert pgl_order(3, 3) == gl_order(3, 3) // 2


def test_gaussian_binomial_examples():
    assert gaussian_binomial(3, 0, 2) == 1
    assert gaussian_binomial(3, 1, 2) == 7
    assert gaussian_binomial(3, 2, 2) == 7


def test_gaussian_binomial_vs_subspace_enumeration():
    for q in (2, 3):
        for d in (2, 3):
            for k in range(d + 1):
                if q ** (k * d) > 100000:
                    continue
                assert gaussian_binomial(d, k, q) == count_subspaces(d, k, q)


def test_gaussian_binomial_symmetry():
    for q in (2, 3, 5):
        for d in range(1, 6):
            for k in range(d + 1):
                assert gaussian_binomial(d, k, q) == gaussian_binomial(d, d - k, q)


def test_input_validation():
    with pytest.raises(InvalidInputError):
        gl_order(0, 2)
    with pytest.raises(InvalidInputError):
        gl_order(2, 4)
    with pytest.raises(InvalidInputError):
        pgl_order(1, 2)
    with pytest.raises(InvalidInputError):
        gaussian_binomial(3, 4, 2)
    with pytest.raises(InvalidInputError):
        gaussian_binomial(3, -1, 2)


@pytest.mark.parametrize("q", [2, 3, 5, 7])
def test_field_axioms_exhaustive(q):
    elems = [FqElem(v, q) for v in range(q)]
    zero, one = elems[0], elems[1 % q]
    for a in elems:
        assert a + zero == a and a * one == a
        assert a + (-a) == zero
        if a:
            assert a * a.inverse() == one
    for a in elems:
        for b in elems:
            assert a + b == b + a and a * b == b * a
            for c in elems:
                assert (a + b) + c == a + (b + c)
                assert (a * b) * c == a * (b * c)
                assert a * (b + c) == a * b + a * c


def test_fq_mixed_modulus_rejected():
    with pytest.raises(InvalidInputError):
        FqElem(1, 2) + FqElem(1, 3)
