"""The full affine building B for PGL_d(F_q((1/t))).

Vertices are homothety classes of O-lattices in F^d, represented by a
canonical upper-triangular basis: pivots are exact monomials t^(a_i), the
entry above a pivot in row i is supported on exponents strictly greater
than a_i, and min(a_i) = 0 fixes the homothety.  Two vertices are equal
iff their canonical bases are entrywise equal.

This module is the ground-truth oracle: neighbor enumeration goes through
subspaces of the residue space, and distances are breadth-first searches
on the 1-skeleton.  The closed-form label distances are kept separate
(`distance_formulas`) because they do not agree with BFS everywhere; the
CLI reports both.
"""

from __future__ import annotations

from itertools import combinations, product

from .errors import (
    InvalidInputError,
    PrecisionError,
    ResourceBoundError,
    SingularMatrixError,
)
from .gf import check_prime, gaussian_binomial, inv_mod
from .laurent import LaurentMatrix, LaurentPoly, series_inverse

DEFAULT_ENUMERATION_BOUND = 100_000


class BuildingVertex:
    """A vertex of B: canonical lattice basis plus its diagonal profile."""

    __slots__ = ("basis", "profile", "d", "q")

    def __init__(self, basis: LaurentMatrix, profile: tuple[int, ...]):
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "profile", profile)
        object.__setattr__(self, "d", basis.d)
        object.__setattr__(self, "q", basis.q)

    def __setattr__(self, name, value):
        raise AttributeError("BuildingVertex is immutable")

    def key(self):
        return self.basis

    def __eq__(self, other):
        return isinstance(other, BuildingVertex) and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __repr__(self):
        return f"BuildingVertex(profile={self.profile}, q={self.q})"

    def to_literal(self) -> dict:
        obj = self.basis.to_literal()
        obj["profile"] = list(self.profile)
        return obj


def vertex_from_label(label, q: int) -> BuildingVertex:
    """The diagonal vertex diag(t^n_1, ..., t^n_d) for a domain label."""
    label = tuple(label)
    d = len(label)
    if d < 2:
        raise InvalidInputError("d = 1 is rejected: the building is a point")
    if any(n < 0 for n in label) or label[-1] != 0 or list(label) != sorted(label, reverse=True):
        raise InvalidInputError(f"not a domain label: {label}")
    return BuildingVertex(LaurentMatrix.diagonal(label, q), label)


def standard_vertex(d: int, q: int) -> BuildingVertex:
    """The class of the standard lattice O^d."""
    return vertex_from_label((0,) * d, q)


# ---------------------------------------------------------------------------
# canonical normal form
# ---------------------------------------------------------------------------


def _u_degree(f: LaurentPoly) -> int:
    # viewing f (all exponents <= 0) as a polynomial in u = 1/t
    return -f.low_exponent()


def _hnf_columns(cols: list[list[LaurentPoly]], q: int) -> None:
    """In-place column Hermite form over F_q[u], u = 1/t.

    Entries must have exponents <= 0.  Produces an upper-triangular system:
    cols[j][i] = 0 for i > j, with nonzero pivots cols[j][j].  All steps are
    exact polynomial operations.
    """
    d = len(cols)

    def col_op(dst: int, src: int, mult: LaurentPoly):
        csrc = cols[src]
        cdst = cols[dst]
        for i in range(d):
            if csrc[i]:
                cdst[i] = cdst[i] - mult * csrc[i]

    for r in range(d - 1, -1, -1):
        while True:
            nz = [j for j in range(r + 1) if cols[j][r]]
            if not nz:
                raise SingularMatrixError("matrix is singular over F_q((1/t))")
            if len(nz) == 1:
                piv = nz[0]
                break
            jmin = min(nz, key=lambda j: _u_degree(cols[j][r]))
            g = cols[jmin][r]
            glow = g.low_exponent()
            ginv = inv_mod(g.coeffs[glow], q)
            for j in nz:
                if j == jmin:
                    continue
                f = cols[j][r]
                c = (f.coeffs[f.low_exponent()] * ginv) % q
                mult = LaurentPoly.t_power(f.low_exponent() - glow, q, c)
                col_op(j, jmin, mult)
        if piv != r:
            cols[piv], cols[r] = cols[r], cols[piv]


def _certify_same_lattice(canon: LaurentMatrix, original: LaurentMatrix) -> bool:
    """Exact check that canon and original span the same O-lattice.

    canon is upper triangular with monomial pivots, so det(canon) is a
    monomial and U = canon^-1 * original has exact Laurent entries; the
    lattices agree iff U is over O with unit determinant.  Pure degree
    tests, no series arithmetic.
    """
    det_c = canon.det()
    det_o = original.det()
    if det_o.is_zero():
        raise SingularMatrixError("matrix is singular over F_q((1/t))")
    if det_c.degree() != det_o.degree():
        return False
    shift = det_c.degree()
    v = canon.adjugate() * original
    for row in v.rows:
        for x in row:
            if x and x.degree() > shift:
                return False
    return True


def vertex_normal_form(m: LaurentMatrix) -> BuildingVertex:
    """Canonical representative of the homothety class of m's column span.

    Idempotent; invariant under right multiplication by GL_d(O) and under
    scaling by powers of t.  The result is certified exact: a failed
    certificate (possible only if the internal series depth were too
    small) retries with more depth and ultimately raises PrecisionError.
    """
    if m.d < 2:
        raise InvalidInputError("d = 1 is rejected: the building is a point")
    d, q = m.d, m.q
    if m.det().is_zero():
        raise SingularMatrixError("matrix is singular over F_q((1/t))")

    top = max(x.degree() for row in m.rows for x in row if x)
    scaled = m.shift(-top)
    cols = [scaled.column(j) for j in range(d)]
    _hnf_columns(cols, q)
    hnf = LaurentMatrix([[cols[j][i] for j in range(d)] for i in range(d)], q)

    pivots = [cols[j][j].degree() for j in range(d)]
    tops = max(
        max((x.degree() for x in col if x), default=0) for col in cols
    )
    depth = (d + 2) * (tops - min(pivots) + 1) + 8

    for _ in range(4):
        work = [list(col) for col in cols]
        for j in range(d):
            aj = pivots[j]
            unit = work[j][j].shift(-aj)
            if not (unit.is_monomial() and unit.degree() == 0 and unit.coeff(0) == 1):
                inv = series_inverse(unit, depth)
                work[j] = [x * inv if x else x for x in work[j]]
            work[j][j] = LaurentPoly.t_power(aj, q)
            for i in range(j - 1, -1, -1):
                low = work[j][i].part_at_most(pivots[i])
                if low:
                    f = low.shift(-pivots[i])
                    col_i = work[i]
                    work[j] = [
                        work[j][r] - f * col_i[r] if col_i[r] else work[j][r]
                        for r in range(d)
                    ]
        canon = LaurentMatrix([[work[j][i] for j in range(d)] for i in range(d)], q)
        if _certify_same_lattice(canon, hnf):
            break
        depth = depth * 2 + 16
    else:
        raise PrecisionError(
            "could not certify the lattice normal form at any tried series depth"
        )

    shift = min(pivots)
    canon = canon.shift(-shift)
    profile = tuple(a - shift for a in pivots)
    return BuildingVertex(canon, profile)


def vertex_color(v: BuildingVertex) -> int:
    """Vertex color: (-v(det basis)) mod d = sum of the profile mod d."""
    return sum(v.profile) % v.d


# ---------------------------------------------------------------------------
# neighbors
# ---------------------------------------------------------------------------


def subspace_bases(d: int, s: int, q: int):
    """All s-dimensional subspaces of F_q^d as reduced row-echelon bases.

    Yields tuples of s rows (each a tuple of d residues), one canonical
    basis per subspace, in lexicographic pivot order.
    """
    check_prime(q)
    if s == 0:
        yield ()
        return
    for pivs in combinations(range(d), s):
        free = []
        for i, p in enumerate(pivs):
            for j in range(p + 1, d):
                if j not in pivs:
                    free.append((i, j))
        for values in product(range(q), repeat=len(free)):
            rows = [[0] * d for _ in range(s)]
            for i, p in enumerate(pivs):
                rows[i][p] = 1
            for (i, j), c in zip(free, values):
                rows[i][j] = c
            yield tuple(tuple(r) for r in rows)


def neighbors(
    v: BuildingVertex, k: int, max_enumeration: int = DEFAULT_ENUMERATION_BOUND
) -> list[BuildingVertex]:
    """All degree-k neighbors of v: classes [L] with (1/t)L' < L < L', [L':L] = q^k.

    Enumerates codimension-k subspaces of the residue space L'/(1/t)L';
    returns exactly gaussian_binomial(d, k, q) pairwise-distinct vertices.
    """
    d, q = v.d, v.q
    if not 1 <= k <= d - 1:
        raise InvalidInputError(f"neighbor degree must be in [1, {d - 1}], got {k}")
    if q**d > max_enumeration or gaussian_binomial(d, k, q) > max_enumeration:
        raise ResourceBoundError(
            f"residue enumeration for q^d = {q**d} exceeds bound {max_enumeration}"
        )
    zero = LaurentPoly.zero(q)
    uniformizer = LaurentPoly.t_power(-1, q)
    out = []
    for rows in subspace_bases(d, d - k, q):
        pivs = {next(j for j in range(d) if r[j]) for r in rows}
        ncols = []
        for r in rows:
            ncols.append([LaurentPoly.constant(c, q) if c else zero for c in r])
        for j in range(d):
            if j not in pivs:
                ncols.append([uniformizer if i == j else zero for i in range(d)])
        n = LaurentMatrix([[ncols[j][i] for j in range(d)] for i in range(d)], q)
        out.append(vertex_normal_form(v.basis * n))
    return out


def adjacent_vertices(
    v: BuildingVertex, max_enumeration: int = DEFAULT_ENUMERATION_BOUND
) -> list[BuildingVertex]:
    """All vertices sharing a chamber with v (union over neighbor degrees)."""
    seen = {}
    for k in range(1, v.d):
        for w in neighbors(v, k, max_enumeration):
            seen.setdefault(w.key(), w)
    return list(seen.values())


def edge_color(x: BuildingVertex, y: BuildingVertex) -> int | None:
    """Color of the edge between x and y, or None if not adjacent.

    Returns i when representatives exist with (1/t)L' < L < L' where
    L' represents x, L represents y and [L' : L] = q^i.  Satisfies
    edge_color(x, y) + edge_color(y, x) = 0 mod d.
    """
    if x.q != y.q or x.d != y.d:
        raise InvalidInputError("vertices live in different buildings")
    d, q = x.d, x.q
    det_y = y.basis.det()
    rel = y.basis.adjugate() * x.basis
    shift = det_y.degree()
    # rel / t^shift has Smith valuations s_1 <= ... <= s_d with partial sums
    # given by minimal minor valuations; homothety-normalize to s_1 = 0.
    idx = tuple(range(d))
    sums = [0]
    for k in range(1, d + 1):
        best = None
        for ri in combinations(idx, k):
            for ci in combinations(idx, k):
                mn = rel.minor(ri, ci)
                if mn:
                    val = -(mn.degree() - k * shift)
                    if best is None or val < best:
                        best = val
        if best is None:
            raise SingularMatrixError("relative position of singular lattices")
        sums.append(best)
    s = [sums[k] - sums[k - 1] for k in range(1, d + 1)]
    shat = [e - s[0] for e in s]
    colength = sum(shat)
    if colength == 0:
        return None
    if max(shat) > 1:
        return None
    return d - colength


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------


def bfs_distance(
    x: BuildingVertex,
    y: BuildingVertex,
    radius: int,
    max_enumeration: int = DEFAULT_ENUMERATION_BOUND,
) -> int | None:
    """Edge count of a shortest 1-skeleton path, or None beyond the radius."""
    return _bfs(x, y, radius, lambda v: adjacent_vertices(v, max_enumeration))


def bfs_color1_distance(
    x: BuildingVertex,
    y: BuildingVertex,
    radius: int,
    max_enumeration: int = DEFAULT_ENUMERATION_BOUND,
) -> int | None:
    """Directed BFS along color-1 edges only.

    A color-1 step from v leads to the classes of its degree-(d-1)
    neighbors: those are exactly the superlattices of index q.
    """
    return _bfs(x, y, radius, lambda v: neighbors(v, v.d - 1, max_enumeration))


def _bfs(x, y, radius, expand) -> int | None:
    if radius < 0:
        raise InvalidInputError("radius must be >= 0")
    if x == y:
        return 0
    frontier = {x.key(): x}
    seen = {x.key()}
    target = y.key()
    for dist in range(1, radius + 1):
        nxt = {}
        for v in frontier.values():
            for w in expand(v):
                kw = w.key()
                if kw == target:
                    return dist
                if kw not in seen:
                    seen.add(kw)
                    nxt[kw] = w
        if not nxt:
            return None
        frontier = nxt
    return None


def distance_formulas(label1, label2) -> tuple[int, int]:
    """Closed-form label distances (graph metric and color-1 metric).

    Evaluates min_j max_i |n_i - m_i - j| and min_j sum_i |n_i - m_i - j|
    verbatim.  Kept separate from the BFS ground truth: the first formula
    disagrees with the 1-skeleton metric already on (2,1,0) vs (0,0,0),
    and for d = 2 it gives ceil(n/2) where the tree distance is n.  The
    CLI `distance` subcommand surfaces both values with a note.
    """
    n = tuple(label1)
    m = tuple(label2)
    if len(n) != len(m):
        raise InvalidInputError("labels must have the same length")
    diffs = [a - b for a, b in zip(n, m)]
    best_max = None
    best_sum = None
    for j in range(min(diffs) - 1, max(diffs) + 2):
        mx = max(abs(x - j) for x in diffs)
        sm = sum(abs(x - j) for x in diffs)
        best_max = mx if best_max is None else min(best_max, mx)
        best_sum = sm if best_sum is None else min(best_sum, sm)
    return best_max, best_sum
