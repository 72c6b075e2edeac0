"""Exact Laurent-polynomial arithmetic over F_q in the variable t.

The ambient local field is F = F_q((1/t)) with uniformizer 1/t, so the
valuation is v(f) = -deg(f): v(t^n) = -n and v(t^-n) = +n.  The valuation
ring O = F_q[[1/t]] consists of the elements with no positive exponents.

Polynomials are stored sparsely as {exponent: nonzero residue}; the zero
polynomial is the empty map.  All ring operations are exact.  The only
inexact object anywhere is a truncated inverse of an O-unit
(`series_inverse`), and every consumer of it certifies its final result
by an exact membership test.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from .errors import InvalidInputError
from .gf import check_prime, inv_mod


@dataclass(frozen=True)
class OPrecision:
    """Working depth for truncated O = F_q[[1/t]] computations.

    An element of O represented at depth P carries exponents in [-P, 0];
    coefficients below -P are unknown.  Sampling (random_k) and unit
    inversion take their depth from here.
    """

    depth: int = 16

    def __post_init__(self):
        if not isinstance(self.depth, int) or self.depth < 0:
            raise InvalidInputError(f"precision depth must be >= 0, got {self.depth!r}")


class LaurentPoly:
    """Immutable sparse Laurent polynomial over F_q.

    Invariant: every stored coefficient is a nonzero residue in [1, q).
    """

    __slots__ = ("q", "coeffs")

    def __init__(self, coeffs: dict[int, int], q: int, _clean: bool = True):
        check_prime(q)
        if _clean:
            coeffs = {e: c % q for e, c in coeffs.items() if c % q}
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, q: int) -> "LaurentPoly":
        return cls({}, q, _clean=False)

    @classmethod
    def constant(cls, c: int, q: int) -> "LaurentPoly":
        return cls({0: c}, q)

    @classmethod
    def t_power(cls, e: int, q: int, c: int = 1) -> "LaurentPoly":
        return cls({e: c}, q)

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        """Largest exponent; the zero polynomial has no degree."""
        if not self.coeffs:
            raise InvalidInputError("the zero polynomial has no degree")
        return max(self.coeffs)

    def low_exponent(self) -> int:
        if not self.coeffs:
            raise InvalidInputError("the zero polynomial has no low exponent")
        return min(self.coeffs)

    def valuation(self) -> int:
        """v(f) = -deg(f) for the uniformizer 1/t."""
        return -self.degree()

    def leading_coeff(self) -> int:
        return self.coeffs[self.degree()]

    def coeff(self, e: int) -> int:
        return self.coeffs.get(e, 0)

    def is_monomial(self) -> bool:
        return len(self.coeffs) == 1

    def in_O(self) -> bool:
        """True iff the element lies in the valuation ring F_q[[1/t]]."""
        return not self.coeffs or max(self.coeffs) <= 0

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, LaurentPoly)
            and self.q == other.q
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.q, frozenset(self.coeffs.items())))

    # -- arithmetic --------------------------------------------------------

    def _check_compat(self, other: "LaurentPoly"):
        if not isinstance(other, LaurentPoly):
            raise InvalidInputError(f"expected LaurentPoly, got {type(other).__name__}")
        if other.q != self.q:
            raise InvalidInputError("mixed moduli in Laurent arithmetic")

    def __add__(self, other):
        self._check_compat(other)
        out = dict(self.coeffs)
        q = self.q
        for e, c in other.coeffs.items():
            s = (out.get(e, 0) + c) % q
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return LaurentPoly(out, q, _clean=False)

    def __neg__(self):
        q = self.q
        return LaurentPoly({e: q - c for e, c in self.coeffs.items()}, q, _clean=False)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check_compat(other)
        q = self.q
        out: dict[int, int] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                s = (out.get(e, 0) + c1 * c2) % q
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return LaurentPoly(out, q, _clean=False)

    def scale(self, c: int) -> "LaurentPoly":
        c %= self.q
        if c == 0:
            return LaurentPoly.zero(self.q)
        return LaurentPoly(
            {e: (a * c) % self.q for e, a in self.coeffs.items()}, self.q, _clean=False
        )

    def shift(self, e: int) -> "LaurentPoly":
        """Multiply by t^e."""
        return LaurentPoly(
            {k + e: c for k, c in self.coeffs.items()}, self.q, _clean=False
        )

    def monomial_div(self, divisor: "LaurentPoly") -> "LaurentPoly":
        """Exact division by a nonzero monomial c * t^e."""
        self._check_compat(divisor)
        if divisor.is_zero() or not divisor.is_monomial():
            raise InvalidInputError("division is only defined by nonzero monomials")
        e = divisor.degree()
        cinv = inv_mod(divisor.leading_coeff(), self.q)
        return self.shift(-e).scale(cinv)

    # -- support windows ---------------------------------------------------

    def part_above(self, cutoff: int) -> "LaurentPoly":
        """Terms with exponent strictly greater than cutoff."""
        return LaurentPoly(
            {e: c for e, c in self.coeffs.items() if e > cutoff}, self.q, _clean=False
        )

    def part_at_most(self, cutoff: int) -> "LaurentPoly":
        """Terms with exponent at most cutoff."""
        return LaurentPoly(
            {e: c for e, c in self.coeffs.items() if e <= cutoff}, self.q, _clean=False
        )

    # -- text form ---------------------------------------------------------

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, reverse=True):
            c = self.coeffs[e]
            if e == 0:
                parts.append(str(c))
            elif c == 1:
                parts.append("t" if e == 1 else f"t^{e}")
            else:
                parts.append(f"{c}*t^{e}")
        return " + ".join(parts)

    def __repr__(self):
        return f"LaurentPoly({self}, q={self.q})"

    _TERM_RE = re.compile(
        r"\s*(?P<sign>[+-])?\s*"
        r"(?:(?P<coeff>\d+)\s*\*\s*t\^(?P<exp1>-?\d+)"
        r"|(?P<coeff2>\d+)\s*\*\s*t"
        r"|t\^(?P<exp2>-?\d+)"
        r"|t"
        r"|(?P<const>\d+))\s*"
    )

    @classmethod
    def parse(cls, text: str, q: int) -> "LaurentPoly":
        """Parse the ASCII grammar `term (("+"|"-") term)*`.

        term := coeff | coeff "*" "t^" int | "t^" int | "t"; exponents may
        be negative.  Round-trips with str().
        """
        check_prime(q)
        s = text.strip()
        if not s:
            raise InvalidInputError("empty polynomial literal")
        out: dict[int, int] = {}
        pos = 0
        first = True
        while pos < len(s):
            m = cls._TERM_RE.match(s, pos)
            if not m or (not first and m.group("sign") is None):
                raise InvalidInputError(f"bad polynomial literal {text!r} at {s[pos:]!r}")
            sign = -1 if m.group("sign") == "-" else 1
            if m.group("const") is not None:
                c, e = int(m.group("const")), 0
            elif m.group("coeff") is not None:
                c, e = int(m.group("coeff")), int(m.group("exp1"))
            elif m.group("coeff2") is not None:
                c, e = int(m.group("coeff2")), 1
            elif m.group("exp2") is not None:
                c, e = 1, int(m.group("exp2"))
            else:
                c, e = 1, 1
            v = (out.get(e, 0) + sign * c) % q
            if v:
                out[e] = v
            else:
                out.pop(e, None)
            pos = m.end()
            first = False
        return cls(out, q, _clean=False)


def is_unit_in_O(f: LaurentPoly) -> bool:
    """True iff f is an invertible element of O = F_q[[1/t]].

    Equivalent to v(f) = 0 with all exponents <= 0, i.e. deg(f) = 0.
    """
    if f.is_zero():
        raise InvalidInputError("zero is not in O^x and has no valuation")
    return f.degree() == 0


def series_inverse(f: LaurentPoly, depth: int) -> LaurentPoly:
    """Truncated inverse of an O-unit: exponents of the result lie in [-depth, 0].

    The returned g satisfies f*g = 1 + (terms with exponent < -depth).
    Exact up to that floor; callers must certify downstream results.
    """
    if f.is_zero() or f.degree() != 0:
        raise InvalidInputError("series_inverse requires an O-unit (degree 0)")
    q = f.q
    c0_inv = inv_mod(f.coeff(0), q)
    g: dict[int, int] = {0: c0_inv}
    for k in range(1, depth + 1):
        acc = 0
        for e, c in f.coeffs.items():
            if -k < e < 0 or e == -k:
                # term f_{e} * g_{-k-e}; e in [-k, -1]
                ge = g.get(-k - e, 0)
                if ge:
                    acc += c * ge
        v = (-c0_inv * acc) % q
        if v:
            g[-k] = v
    return LaurentPoly(g, q, _clean=False)


class LaurentMatrix:
    """Immutable square matrix of LaurentPoly entries (shared modulus q)."""

    __slots__ = ("d", "q", "rows")

    def __init__(self, rows, q: int | None = None):
        rows = tuple(tuple(r) for r in rows)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise InvalidInputError("matrix must be square and nonempty")
        if q is None:
            q = rows[0][0].q
        check_prime(q)
        for r in rows:
            for x in r:
                if not isinstance(x, LaurentPoly) or x.q != q:
                    raise InvalidInputError("matrix entries must be LaurentPoly over one q")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "d", len(rows))
        object.__setattr__(self, "q", q)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentMatrix is immutable")

    @classmethod
    def identity(cls, d: int, q: int) -> "LaurentMatrix":
        one = LaurentPoly.constant(1, q)
        zero = LaurentPoly.zero(q)
        return cls(
            [[one if i == j else zero for j in range(d)] for i in range(d)], q
        )

    @classmethod
    def diagonal(cls, exps, q: int) -> "LaurentMatrix":
        """diag(t^e for e in exps)."""
        zero = LaurentPoly.zero(q)
        d = len(exps)
        return cls(
            [
                [LaurentPoly.t_power(exps[i], q) if i == j else zero for j in range(d)]
                for i in range(d)
            ],
            q,
        )

    def entry(self, i: int, j: int) -> LaurentPoly:
        return self.rows[i][j]

    def column(self, j: int) -> list[LaurentPoly]:
        return [self.rows[i][j] for i in range(self.d)]

    def __eq__(self, other):
        return (
            isinstance(other, LaurentMatrix)
            and self.q == other.q
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.q, self.rows))

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            return LaurentMatrix(
                [[x * other for x in row] for row in self.rows], self.q
            )
        if not isinstance(other, LaurentMatrix) or other.q != self.q:
            raise InvalidInputError("matrix product requires matching moduli")
        if other.d != self.d:
            raise InvalidInputError("matrix product requires matching sizes")
        d = self.d
        zero = LaurentPoly.zero(self.q)
        out = []
        for i in range(d):
            row = []
            for j in range(d):
                acc = zero
                for k in range(d):
                    a = self.rows[i][k]
                    b = other.rows[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return LaurentMatrix(out, self.q)

    def scale(self, f: LaurentPoly) -> "LaurentMatrix":
        return self * f

    def shift(self, e: int) -> "LaurentMatrix":
        """Multiply every entry by t^e (a homothety of the column span)."""
        return LaurentMatrix(
            [[x.shift(e) for x in row] for row in self.rows], self.q
        )

    def transpose(self) -> "LaurentMatrix":
        return LaurentMatrix(
            [[self.rows[j][i] for j in range(self.d)] for i in range(self.d)], self.q
        )

    def minor(self, rows_idx, cols_idx) -> LaurentPoly:
        """Determinant of the submatrix on the given index tuples."""
        sub = [[self.rows[i][j] for j in cols_idx] for i in rows_idx]
        return _det_rows(sub, self.q)

    def det(self) -> LaurentPoly:
        """Exact determinant (Laplace expansion; d is small here)."""
        return _det_rows([list(r) for r in self.rows], self.q)

    def adjugate(self) -> "LaurentMatrix":
        """Adjugate matrix: adj(M) * M = det(M) * I, exactly."""
        d = self.d
        if d == 1:
            return LaurentMatrix([[LaurentPoly.constant(1, self.q)]], self.q)
        idx = tuple(range(d))
        out = [[None] * d for _ in range(d)]
        for i in range(d):
            rows_idx = idx[:i] + idx[i + 1 :]
            for j in range(d):
                cols_idx = idx[:j] + idx[j + 1 :]
                cof = self.minor(rows_idx, cols_idx)
                if (i + j) % 2:
                    cof = -cof
                out[j][i] = cof
        return LaurentMatrix(out, self.q)

    def is_invertible(self) -> bool:
        return not self.det().is_zero()

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in row) for row in self.rows)
        return f"LaurentMatrix([{body}], q={self.q})"

    # -- matrix literal format --------------------------------------------

    def to_literal(self) -> dict:
        """The JSON matrix literal: {"q":..., "d":..., "entries":[[str,...]]}."""
        return {
            "q": self.q,
            "d": self.d,
            "entries": [[str(x) for x in row] for row in self.rows],
        }

    @classmethod
    def from_literal(cls, obj: dict) -> "LaurentMatrix":
        try:
            q = obj["q"]
            d = obj["d"]
            entries = obj["entries"]
        except (TypeError, KeyError) as exc:
            raise InvalidInputError(f"bad matrix literal: missing {exc}") from exc
        if len(entries) != d or any(len(r) != d for r in entries):
            raise InvalidInputError("matrix literal entries must be d x d")
        return cls([[LaurentPoly.parse(s, q) for s in row] for row in entries], q)


def _det_rows(rows: list[list[LaurentPoly]], q: int) -> LaurentPoly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    acc = LaurentPoly.zero(q)
    for j, top in enumerate(rows[0]):
        if top.is_zero():
            continue
        sub = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = top * _det_rows(sub, q)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def _as_rng(seed) -> random.Random:
    if isinstance(seed, random.Random):
        return seed
    return random.Random(seed)


def _random_unitriangular(d, q, bound, upper, rng) -> LaurentMatrix:
    one = LaurentPoly.constant(1, q)
    zero = LaurentPoly.zero(q)
    rows = [[zero] * d for _ in range(d)]
    for i in range(d):
        rows[i][i] = one
        js = range(i + 1, d) if upper else range(i)
        for j in js:
            rows[i][j] = LaurentPoly({e: rng.randrange(q) for e in range(bound + 1)}, q)
    return LaurentMatrix(rows, q)


def _random_permutation(d, q, rng) -> LaurentMatrix:
    perm = list(range(d))
    rng.shuffle(perm)
    one = LaurentPoly.constant(1, q)
    zero = LaurentPoly.zero(q)
    return LaurentMatrix(
        [[one if j == perm[i] else zero for j in range(d)] for i in range(d)], q
    )


def _random_constant_invertible(d, q, rng) -> LaurentMatrix:
    while True:
        rows = [
            [LaurentPoly.constant(rng.randrange(q), q) for _ in range(d)]
            for _ in range(d)
        ]
        m = LaurentMatrix(rows, q)
        det = m.det()
        if not det.is_zero():
            return m


def random_gamma(d: int, q: int, deg_bound: int, seed) -> LaurentMatrix:
    """Random element of GL_d(F_q[t]) with entry degrees <= deg_bound.

    Built as permutation * lower-unitriangular * permutation *
    upper-unitriangular * constant-invertible, so the determinant lies in
    F_q^x by construction and the degree bound is respected exactly.
    Deterministic in the seed (not a uniform sample).
    """
    check_prime(q)
    if d < 2 or deg_bound < 0:
        raise InvalidInputError("need d >= 2 and deg_bound >= 0")
    rng = _as_rng(seed)
    lo = deg_bound // 2
    hi = deg_bound - lo
    m = _random_permutation(d, q, rng)
    m = m * _random_unitriangular(d, q, hi, upper=False, rng=rng)
    m = m * _random_permutation(d, q, rng)
    m = m * _random_unitriangular(d, q, lo, upper=True, rng=rng)
    return m * _random_constant_invertible(d, q, rng)


def random_k(d: int, q: int, precision, seed) -> LaurentMatrix:
    """Random element of GL_d(O) truncated to the given precision depth.

    Entries have exponents in [-P, 0]; the determinant is an O-unit.
    """
    check_prime(q)
    if isinstance(precision, int):
        precision = OPrecision(precision)
    if d < 2:
        raise InvalidInputError("need d >= 2")
    rng = _as_rng(seed)
    depth = precision.depth
    while True:
        rows = [
            [
                LaurentPoly(
                    {-e: rng.randrange(q) for e in range(depth + 1)}, q
                )
                for _ in range(d)
            ]
            for _ in range(d)
        ]
        m = LaurentMatrix(rows, q)
        det = m.det()
        if not det.is_zero() and is_unit_in_O(det):
            return m
