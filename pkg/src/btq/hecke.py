"""Weighted adjacency (Hecke) operators on the quotient graph.

Everything here is exact unless the caller opts into the complex backend:
rational scalars are `fractions.Fraction`, and the d = 2 closed form uses
a little quadratic extension Q(sqrt(delta)).  Operator application at a
truncation boundary yields an explicit undefined marker (the vertex is
simply absent from the result), never a silent zero: zero-padding would
fabricate boundary conditions and corrupt the commutator and adjointness
identities.
"""

from __future__ import annotations

import cmath
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from . import domain
from .errors import InternalInvariantError, InvalidInputError
from .gf import check_prime, gl_order
from .quotient import QuotientGraph

Label = tuple[int, ...]

COMPLEX_TOLERANCE = 1e-9


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------


class QuadExt:
    """a + b*sqrt(delta) with rational a, b: exact field arithmetic.

    delta is a fixed non-square rational; used for the d = 2 closed form
    with delta = lambda^2 - 4q.
    """

    __slots__ = ("a", "b", "delta")

    def __init__(self, a, b, delta):
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))
        object.__setattr__(self, "delta", Fraction(delta))

    def __setattr__(self, name, value):
        raise AttributeError("QuadExt is immutable")

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.delta != self.delta:
                raise InvalidInputError("mixed quadratic extensions")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(other, 0, self.delta)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadExt(self.a + other.a, self.b + other.b, self.delta)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.delta)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadExt(
            self.a * other.a + self.b * other.b * self.delta,
            self.a * other.b + self.b * other.a,
            self.delta,
        )

    __rmul__ = __mul__

    def inverse(self):
        norm = self.a * self.a - self.b * self.b * self.delta
        if norm == 0:
            raise ZeroDivisionError("zero or zero-norm element in Q(sqrt(delta))")
        return QuadExt(self.a / norm, -self.b / norm, self.delta)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return (
            isinstance(other, QuadExt)
            and self.delta == other.delta
            and self.a == other.a
            and self.b == other.b
        )

    def __hash__(self):
        return hash((self.a, self.b, self.delta))

    def __repr__(self):
        return f"({self.a} + {self.b}*sqrt({self.delta}))"


def _conj(x):
    if isinstance(x, complex):
        return x.conjugate()
    return x


def _abs_sq(x):
    if isinstance(x, complex):
        return (x * x.conjugate()).real
    if isinstance(x, QuadExt):
        if x.delta < 0:
            return x.a * x.a - x.b * x.b * x.delta
        return x * x
    return x * x


def _abs_val(x):
    if isinstance(x, complex):
        return abs(x)
    return x if x >= 0 else -x


def scalars_close(x, y, tol: float = COMPLEX_TOLERANCE) -> bool:
    """Equality for exact scalars, |x - y| <= tol*max(1, |x|, |y|) for complex."""
    if isinstance(x, complex) or isinstance(y, complex):
        scale = max(1.0, abs(complex(x)), abs(complex(y)))
        return abs(complex(x) - complex(y)) <= tol * scale
    return x == y


# ---------------------------------------------------------------------------
# functions on the domain
# ---------------------------------------------------------------------------


class DomainFunction:
    """A scalar-valued function on a truncation of the fundamental domain.

    Vertices absent from `values` are undefined (the boundary marker after
    operator application).  Values are Fractions, QuadExt or complex.
    """

    def __init__(self, d: int, q: int, max_n1: int, values: dict[Label, object]):
        self.d = d
        self.q = q
        self.max_n1 = max_n1
        self.values = dict(values)

    @classmethod
    def constant(cls, d: int, q: int, max_n1: int, value) -> "DomainFunction":
        labels = domain.enumerate_domain(d, max_n1)
        return cls(d, q, max_n1, {lab: value for lab in labels})

    @classmethod
    def random_rational(cls, d: int, q: int, max_n1: int, seed) -> "DomainFunction":
        rng = seed if isinstance(seed, random.Random) else random.Random(seed)
        labels = domain.enumerate_domain(d, max_n1)
        vals = {
            lab: Fraction(rng.randint(-50, 50), rng.randint(1, 20)) for lab in labels
        }
        return cls(d, q, max_n1, vals)

    def defined(self, label) -> bool:
        return tuple(label) in self.values

    def __getitem__(self, label):
        label = tuple(label)
        if label not in self.values:
            raise InvalidInputError(f"function is undefined at {label}")
        return self.values[label]

    def get(self, label, default=None):
        return self.values.get(tuple(label), default)


@dataclass(frozen=True)
class HeckeParams:
    """Eigenvalue pair for d = 3, with the recurring constants.

    t3 = q^2 + q + 1 is the color-degree (the constant-function eigenvalue)
    and r = q + 1.
    """

    lambda1: object
    lambda2: object
    q: int

    @property
    def t3(self):
        return self.q**2 + self.q + 1

    @property
    def r(self):
        return self.q + 1


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def apply_hecke(graph: QuotientGraph, i: int, f: DomainFunction) -> DomainFunction:
    """Weighted color-i neighbor sum: (A_i f)(u) = sum ratio * f(v).

    Color 1 walks the stored edges forward with ratio_from; color d-1
    walks them backward with ratio_to.  A vertex whose required neighbors
    leave the truncation (n_1 = max_n1) or hit an undefined value of f is
    left undefined in the result.
    """
    d = graph.d
    if d == 2:
        if i != 1:
            raise InvalidInputError("d = 2 has a single operator, i = 1")
        directions = ("out",)
    elif i == 1:
        directions = ("out",)
    elif i == d - 1:
        directions = ("in",)
    else:
        raise InvalidInputError(
            f"only colors 1 and {d - 1} are realized on the stored graph, got {i}"
        )
    out: dict[Label, object] = {}
    for u in graph.nodes:
        if u[0] >= graph.max_n1:
            continue  # outward edges leave the truncation: boundary vertex
        acc = None
        ok = True
        for direction in directions:
            edges = graph.out_edges[u] if direction == "out" else graph.in_edges[u]
            for e in edges:
                other = e.dst if direction == "out" else e.src
                ratio = e.ratio_from if direction == "out" else e.ratio_to
                if ratio is None or other not in f.values:
                    ok = False
                    break
                term = ratio * f.values[other]
                acc = term if acc is None else acc + term
            if not ok:
                break
        if ok and acc is not None:
            out[u] = acc
    return DomainFunction(d, graph.q, graph.max_n1, out)


def commutator_check(graph: QuotientGraph, f: DomainFunction):
    """Max |(A_1 A_2 - A_2 A_1) f| over the doubly-interior vertices.

    Exactly zero for exact scalars.  Raises if the truncation is too
    small to contain any doubly-interior vertex.
    """
    if graph.d != 3:
        raise InvalidInputError("the commutator check is for d = 3")
    a12 = apply_hecke(graph, 1, apply_hecke(graph, 2, f))
    a21 = apply_hecke(graph, 2, apply_hecke(graph, 1, f))
    common = set(a12.values) & set(a21.values)
    if not common:
        raise InvalidInputError("truncation has no doubly-interior vertex")
    residual = None
    for u in sorted(common):
        r = _abs_val(a12.values[u] - a21.values[u])
        residual = r if residual is None else max(residual, r)
    return residual


def weighted_inner(graph: QuotientGraph, f: DomainFunction, g: DomainFunction):
    """<f, g> = sum w(u) f(u) conj(g(u)) with w(u) = 1/|Gamma_u|.

    Summed over the vertices where both are defined; wherever exactly one
    is undefined the other must vanish, otherwise the truncated pairing
    would be meaningless and an error is raised.
    """
    total = None
    for u in graph.nodes:
        fu = f.values.get(u)
        gu = g.values.get(u)
        if fu is None or gu is None:
            present = fu if gu is None else gu
            if present is not None and present != 0:
                raise InvalidInputError(
                    f"inner product undefined: one factor missing at {u} "
                    "where the other is nonzero"
                )
            continue
        term = Fraction(1, graph.nodes[u]) * fu * _conj(gu)
        total = term if total is None else total + term
    return 0 if total is None else total


def adjointness_residual(graph: QuotientGraph, f: DomainFunction, g: DomainFunction):
    """<A_1 f, g> - <f, A_{d-1} g>; exactly zero for compact supports."""
    a1f = apply_hecke(graph, 1, f)
    a2g = apply_hecke(graph, graph.d - 1, g)
    return weighted_inner(graph, a1f, g) - weighted_inner(graph, f, a2g)


# ---------------------------------------------------------------------------
# the d = 3 eigenvector recursion
# ---------------------------------------------------------------------------


def eigenvector_d3(params: HeckeParams, max_n1: int):
    """Simultaneous eigenvector values on the truncation, plus residuals.

    Walks the diagonals n_1 + n_2 in increasing order (larger n_2 first
    within a diagonal), defining each value by one recursion; at every
    vertex that a second recursion also defines, the difference of the
    two is recorded as a residual.  With exact scalars every residual is
    identically zero; that is the commutation of the two operators.
    """
    if max_n1 < 2:
        raise InvalidInputError("the recursion needs max_n1 >= 2")
    q = params.q
    check_prime(q)
    l1, l2 = params.lambda1, params.lambda2
    t3, r = params.t3, params.r
    f: dict[Label, object] = {}
    residuals: list[tuple[Label, object]] = []

    def F(a, b):
        return f[(a, b, 0)]

    for s in range(0, 2 * max_n1 + 1):
        for b in range(s // 2, -1, -1):
            a = s - b
            if a > max_n1:
                continue
            if (a, b) == (0, 0):
                val = _one_like(l1)
            elif (a, b) == (1, 0):
                val = l1 * F(0, 0) / t3
            elif (a, b) == (1, 1):
                val = l2 * F(0, 0) / t3
            elif (a, b) == (2, 0):
                val = l1 * F(1, 0) - r * q * F(1, 1)
            elif (a, b) == (2, 1):
                val = (l2 * F(1, 0) - q**2 * F(0, 0)) / r
            elif (a, b) == (2, 2):
                val = l2 * F(1, 1) - q * r * F(1, 0)
            elif b == 0:
                val = l1 * F(a - 1, 0) - r * q * F(a - 1, 1)
            elif b == a:
                val = l2 * F(a - 1, a - 1) - q * r * F(a - 1, a - 2)
            elif b == 1:
                val = (l2 * F(a - 1, 0) - q**2 * F(a - 2, 0)) / r
                second = l1 * F(a - 1, 1) - q * F(a - 1, 2) - q**2 * F(a - 2, 0)
                residuals.append(((a, b, 0), val - second))
            elif b == a - 1:
                val = (l1 * F(a - 1, a - 1) - q**2 * F(a - 2, a - 2)) / r
                second = (
                    l2 * F(a - 1, a - 2)
                    - q * F(a - 1, a - 3)
                    - q**2 * F(a - 2, a - 2)
                )
                residuals.append(((a, b, 0), val - second))
            else:
                val = (
                    l2 * F(a - 1, b - 1)
                    - q * F(a - 1, b - 2)
                    - q**2 * F(a - 2, b - 1)
                )
                second = (
                    l1 * F(a - 1, b)
                    - q * F(a - 1, b + 1)
                    - q**2 * F(a - 2, b - 1)
                )
                residuals.append(((a, b, 0), val - second))
            f[(a, b, 0)] = val

    func = DomainFunction(3, q, max_n1, f)
    return func, residuals


def _one_like(x):
    if isinstance(x, QuadExt):
        return QuadExt(1, 0, x.delta)
    if isinstance(x, Fraction):
        return Fraction(1)
    return x * 0 + 1  # complex, or any numeric scalar type (e.g. mpmath)


# ---------------------------------------------------------------------------
# tabulated closed forms
# ---------------------------------------------------------------------------


def load_closed_forms() -> dict[str, dict]:
    data = json.loads(
        resources.files("btq").joinpath("closed_forms.json").read_text()
    )
    return data["entries"]


def _eval_closed_form(expr: str, l1, l2, q):
    if isinstance(l1, (Fraction, int)):
        lift = Fraction
    else:
        lift = lambda n: l1 * 0 + n  # noqa: E731 - stay in the scalar type of l1
    names = {
        "l1": l1,
        "l2": l2,
        "q": lift(q),
        "t": lift(q**2 + q + 1),
        "r": lift(q + 1),
    }
    return eval(expr, {"__builtins__": {}}, names)  # data file is package-owned


def closed_form_regression(params: HeckeParams, max_n1: int = 6) -> dict[str, dict]:
    """Compare the recursion against every tabulated closed form.

    Returns, per label, the tabulated status ('asserted' or 'flagged'),
    whether the two values agree, and their difference.  Flagged entries
    are reported, never asserted by callers.
    """
    func, _ = eigenvector_d3(params, max_n1=max(max_n1, 6))
    out = {}
    for name, entry in load_closed_forms().items():
        label = tuple(int(c) for c in name)
        expected = _eval_closed_form(entry["expr"], params.lambda1, params.lambda2, params.q)
        actual = func[label]
        out[name] = {
            "status": entry["status"],
            "match": scalars_close(actual, expected),
            "residual": actual - expected,
        }
    return out


# ---------------------------------------------------------------------------
# the d = 2 tree
# ---------------------------------------------------------------------------


def eigenvector_d2(lam, q: int, max_n: int) -> DomainFunction:
    """Eigenvector on the half-line: f_0 = 1, f_1 = lam/(q+1),
    f_{n+1} = lam f_n - q f_{n-1}.

    For lam^2 != 4q the closed form through the characteristic roots is
    evaluated as well (exactly in Q(sqrt(lam^2-4q)) for rational lam,
    within tolerance for complex lam) and any disagreement is an internal
    error.  lam^2 = 4q routes to recursion-only mode.
    """
    check_prime(q)
    if max_n < 1:
        raise InvalidInputError("max_n must be >= 1")
    complex_backend = isinstance(lam, complex)
    if not complex_backend:
        lam = Fraction(lam)
    vals: list[object] = [_one_like(lam), lam / (q + 1)]
    for _ in range(2, max_n + 1):
        vals.append(lam * vals[-1] - q * vals[-2])

    delta = lam * lam - 4 * q
    if complex_backend and _degenerate_complex(lam, q):
        delta = 0  # numerically coincident roots: recursion-only mode
    if delta != 0:
        for n in range(max_n + 1):
            closed = eigenvector_d2_closed_form(lam, q, n)
            if not scalars_close(vals[n], closed):
                raise InternalInvariantError(
                    f"d=2 recursion and closed form disagree at n={n}"
                )
    values = {(n, 0): vals[n] for n in range(max_n + 1)}
    return DomainFunction(2, q, max_n, values)


def _degenerate_complex(lam: complex, q: int) -> bool:
    return abs(lam * lam - 4 * q) <= COMPLEX_TOLERANCE * max(1.0, abs(lam) ** 2)


def eigenvector_d2_closed_form(lam, q: int, n: int):
    """f_n = C r1^n + D r2^n with r_{1,2} the roots of x^2 - lam x + q,
    C = (lam - (q+1) r2) / ((q+1) sqrt(lam^2 - 4q)) and D = 1 - C."""
    if isinstance(lam, complex):
        if _degenerate_complex(lam, q):
            raise InvalidInputError("lam^2 = 4q has no two-root closed form")
        s = cmath.sqrt(lam * lam - 4 * q)
        r1 = (lam + s) / 2
        r2 = (lam - s) / 2
        c = (lam - (q + 1) * r2) / ((q + 1) * s)
        d = 1 - c
        return c * r1**n + d * r2**n
    lam = Fraction(lam)
    delta = lam * lam - 4 * q
    if delta == 0:
        raise InvalidInputError("lam^2 = 4q has no two-root closed form")
    s = QuadExt(0, 1, delta)
    lam_e = QuadExt(lam, 0, delta)
    r1 = (lam_e + s) / 2
    r2 = (lam_e - s) / 2
    c = (lam_e - (q + 1) * r2) / ((q + 1) * s)
    d = 1 - c
    val = c * _pow(r1, n) + d * _pow(r2, n)
    if val.b != 0:
        raise InternalInvariantError("d=2 closed form should be rational")
    return val.a


def _pow(x, n: int):
    out = _one_like(x)
    for _ in range(n):
        out = out * x
    return out


# ---------------------------------------------------------------------------
# norms and covolume
# ---------------------------------------------------------------------------


def l2_partial_norm(graph: QuotientGraph, f: DomainFunction):
    """Partial square norm sum |f(u)|^2 / |Gamma_u|, reported per shell.

    Returns (total, shells) where shells[n] is the contribution of the
    vertices with n_1 = n; the total is monotone in the truncation.
    """
    shells: list[object] = [Fraction(0)] * (graph.max_n1 + 1)
    for u, val in f.values.items():
        shells[u[0]] = shells[u[0]] + _abs_sq(val) * Fraction(1, graph.nodes[u])
    total = sum(shells[1:], shells[0]) if shells else Fraction(0)
    return total, shells


def compositions(d: int):
    """Ordered compositions of d (block-size sequences of domain labels)."""
    if d == 0:
        yield ()
        return
    for first in range(1, d + 1):
        for rest in compositions(d - first):
            yield (first,) + rest


def covolume(d: int, q: int, normalization: str = "pgl") -> Fraction:
    """Exact total weight of the fundamental domain.

    Closed form: (q-1) * sum over ordered compositions (d_1..d_r) of
    [prod_i |GL_{d_i}(F_q)|]^-1 * q^(-sum_{i<j} d_i d_j) *
    prod_{l<r} 1/(q^(s_l) - 1), with s_l the product of the l-prefix and
    l-suffix size sums.  The 'gl' normalization divides by q-1.
    """
    check_prime(q)
    if d < 2:
        raise InvalidInputError("d must be >= 2")
    total = Fraction(0)
    for comp in compositions(d):
        r = len(comp)
        denom = 1
        for size in comp:
            denom *= gl_order(size, q)
        cross = sum(comp[i] * comp[j] for i in range(r) for j in range(i + 1, r))
        term = Fraction(1, denom) * Fraction(1, q**cross)
        for l in range(1, r):
            s_l = sum(comp[:l]) * sum(comp[l:])
            term *= Fraction(1, q**s_l - 1)
        total += term
    total *= q - 1
    return _apply_normalization(total, q, normalization)


def covolume_partial(d: int, q: int, max_n1: int, normalization: str = "pgl") -> Fraction:
    """Sum of 1/|Gamma_label| over the truncated domain; below covolume."""
    check_prime(q)
    total = Fraction(0)
    for lab in domain.enumerate_domain(d, max_n1):
        total += Fraction(1, domain.stabilizer_order(lab, q))
    return _apply_normalization(total, q, normalization)


def covolume_gap_bound(d: int, q: int, max_n1: int) -> Fraction:
    """An explicit geometric bound on covolume - covolume_partial.

    A label with n_1 = m pairs its first coordinate against every lower
    block, so the stabilizer exponent is at least (d-1)(m+1) and the
    vertex weight is at most (q-1) q^(-(d-1)(m+1)).  A shell has at most
    (m+1)^(d-2) labels, and per increment of m the shell total shrinks by
    at least (3/2)^(d-2) q^(-(d-1)) < 1, so the tail beyond max_n1 is
    dominated by a geometric series.
    """
    check_prime(q)
    if d < 2 or max_n1 < 0:
        raise InvalidInputError("need d >= 2 and max_n1 >= 0")
    m = max_n1 + 1
    first = (m + 1) ** (d - 2) * Fraction(q - 1, q ** ((d - 1) * (m + 1)))
    ratio = Fraction(3, 2) ** (d - 2) * Fraction(1, q ** (d - 1))
    return first / (1 - ratio)


def _apply_normalization(value: Fraction, q: int, normalization: str) -> Fraction:
    if normalization == "pgl":
        return value
    if normalization == "gl":
        return value / (q - 1)
    raise InvalidInputError(f"unknown normalization {normalization!r}")
