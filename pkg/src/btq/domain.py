"""The fundamental domain of the building under PGL_d(F_q[t]).

Domain vertices are labels: weakly decreasing nonnegative integer tuples
with last entry 0.  This module owns the label combinatorics (difference
and block sequences), the in-domain neighbor enumeration (computed two
independent ways and cross-checked), friends, stabilizer orders and
brute-force stabilizer groups, the orbit decomposition of neighbors, and
the reduction of an arbitrary building vertex to its unique domain label
together with a group-element witness.
"""

from __future__ import annotations

from itertools import product

from .building import BuildingVertex, neighbors, vertex_from_label, vertex_normal_form
from .errors import (
    InternalInvariantError,
    InvalidInputError,
    ResourceBoundError,
    SingularMatrixError,
)
from .gf import check_prime, gl_order, inv_mod
from .laurent import LaurentMatrix, LaurentPoly

DEFAULT_GROUP_BOUND = 10**6
_GL_CANDIDATE_BOUND = 2 * 10**6


def validate_label(label) -> tuple[int, ...]:
    label = tuple(int(n) for n in label)
    d = len(label)
    if d < 2:
        raise InvalidInputError("d = 1 is rejected: the building is a point")
    if label[-1] != 0:
        raise InvalidInputError(f"label must end in 0, got {label}")
    if any(label[i] < label[i + 1] for i in range(d - 1)):
        raise InvalidInputError(f"label must be weakly decreasing, got {label}")
    return label


def parse_label(text: str) -> tuple[int, ...]:
    """Parse the comma-separated serialization, e.g. '2,1,0'."""
    try:
        label = tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise InvalidInputError(f"bad label literal {text!r}") from exc
    return validate_label(label)


def format_label(label) -> str:
    return ",".join(str(n) for n in label)


def diff_seq(label) -> tuple[int, ...]:
    """Consecutive differences (m_1, ..., m_{d-1}), m_i = n_i - n_{i+1}."""
    label = validate_label(label)
    return tuple(label[i] - label[i + 1] for i in range(len(label) - 1))


def support_size(m_seq) -> int:
    """|m|: the number of nonzero entries of a difference sequence."""
    return sum(1 for m in m_seq if m)


def block_seq(label) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Run lengths and values of the label: ((d_1,...,d_r), (g_1 > ... > g_r))."""
    label = validate_label(label)
    sizes: list[int] = []
    values: list[int] = []
    for n in label:
        if values and values[-1] == n:
            sizes[-1] += 1
        else:
            values.append(n)
            sizes.append(1)
    return tuple(sizes), tuple(values)


def label_from_diffs(m_seq) -> tuple[int, ...]:
    """Inverse of diff_seq: n_i = sum_{j >= i} m_j, n_d = 0."""
    out = [0]
    for m in reversed(m_seq):
        out.append(out[-1] + m)
    out.reverse()
    return tuple(out)


def _normalize(entries) -> tuple[int, ...]:
    low = min(entries)
    return tuple(n - low for n in entries)


def enumerate_domain(d: int, max_n1: int) -> list[tuple[int, ...]]:
    """All domain labels with n_1 <= max_n1, in lexicographic order."""
    if d < 2:
        raise InvalidInputError("d = 1 is rejected: the building is a point")
    if max_n1 < 0:
        raise InvalidInputError("max_n1 must be >= 0")
    labels: list[tuple[int, ...]] = []

    def build(prefix: list[int]):
        if len(prefix) == d - 1:
            labels.append(tuple(prefix) + (0,))
            return
        upper = prefix[-1] if prefix else max_n1
        for n in range(upper + 1):
            build(prefix + [n])

    build([])
    labels.sort()
    return labels


# ---------------------------------------------------------------------------
# in-domain neighbors, two independent ways
# ---------------------------------------------------------------------------


def _neighbors_by_suffix_drops(label, k: int) -> set[tuple[int, ...]]:
    # lower a suffix of each block; the drop counts sum to k
    sizes, _ = block_seq(label)
    r = len(sizes)
    found: set[tuple[int, ...]] = set()

    def rec(block: int, remaining: int, drops: list[int]):
        if block == r:
            if remaining == 0:
                v: list[int] = []
                for size, s in zip(sizes, drops):
                    v.extend([0] * (size - s) + [-1] * s)
                found.add(_normalize([n + x for n, x in zip(label, v)]))
            return
        for s in range(min(sizes[block], remaining) + 1):
            rec(block + 1, remaining - s, drops + [s])

    rec(0, k, [])
    return found


def _neighbors_by_chains(label, k: int) -> set[tuple[int, ...]]:
    # alternating changes of the difference sequence
    m1 = diff_seq(label)
    found: set[tuple[int, ...]] = set()
    for chain in product((-1, 0, 1), repeat=len(m1)):
        if all(c == 0 for c in chain):
            continue
        if any(m == 0 and c < 0 for m, c in zip(m1, chain)):
            continue
        signs = [c for c in chain if c]
        if any(signs[i] == signs[i + 1] for i in range(len(signs) - 1)):
            continue
        # recover the drop vector: v_i = v_d + sum_{j>=i} c_j must land in {0,-1}
        suffix = [0] * (len(m1) + 1)
        for i in range(len(m1) - 1, -1, -1):
            suffix[i] = suffix[i + 1] + chain[i]
        if all(s in (0, -1) for s in suffix):
            v_last = 0
        elif all(s in (0, 1) for s in suffix):
            v_last = -1
        else:
            continue
        degree = sum(1 for s in suffix if v_last + s == -1)
        if degree != k:
            continue
        found.add(label_from_diffs([m + c for m, c in zip(m1, chain)]))
    return found


def neighbors_in_domain(label, k: int) -> list[tuple[int, ...]]:
    """All domain labels adjacent to `label` by a degree-k edge.

    Computed two independent ways (block-suffix drops, and alternating
    changes of the difference sequence); a disagreement is an internal
    invariant violation.  For k = 1 the count is 1 + |m|.
    """
    label = validate_label(label)
    d = len(label)
    if not 1 <= k <= d - 1:
        raise InvalidInputError(f"degree must be in [1, {d - 1}], got {k}")
    by_drops = _neighbors_by_suffix_drops(label, k)
    by_chains = _neighbors_by_chains(label, k)
    if by_drops != by_chains:
        raise InternalInvariantError(
            f"neighbor enumerations disagree for {label}, k={k}: "
            f"{sorted(by_drops)} vs {sorted(by_chains)}"
        )
    return sorted(by_drops)


def friends(label) -> dict[int, tuple[int, ...]]:
    """The in-domain neighbors fixed pointwise by the whole vertex stabilizer.

    A friend of degree k exists exactly when the last k coordinates form
    complete blocks (k a proper suffix sum of the block-size sequence);
    it is the label with those k coordinates lowered by one, renormalized.
    The zero label has no friends.
    """
    label = validate_label(label)
    d = len(label)
    sizes, _ = block_seq(label)
    out: dict[int, tuple[int, ...]] = {}
    k = 0
    for size in reversed(sizes):
        k += size
        if k >= d:
            break
        lowered = list(label)
        for i in range(d - k, d):
            lowered[i] -= 1
        out[k] = _normalize(lowered)
    return out


# ---------------------------------------------------------------------------
# stabilizers
# ---------------------------------------------------------------------------


def stabilizer_order(label, q: int) -> int:
    """|Gamma_label| = (1/(q-1)) * prod_l |GL_{d_l}(F_q)| * q^E.

    E sums d_l * d_m * (g_l - g_m + 1) over block pairs l < m: each entry
    of an upper off-diagonal block is a polynomial of degree at most
    g_l - g_m, contributing q^(g_l - g_m + 1) choices.
    """
    label = validate_label(label)
    check_prime(q)
    sizes, values = block_seq(label)
    r = len(sizes)
    order = 1
    for size in sizes:
        order *= gl_order(size, q)
    exp = 0
    for l in range(r):
        for m in range(l + 1, r):
            exp += sizes[l] * sizes[m] * (values[l] - values[m] + 1)
    return order * q**exp // (q - 1)


def stabilizer_contains(label1, label2) -> bool:
    """Whether Gamma_{label1} is a subgroup of Gamma_{label2}.

    Holds iff the labels have the same block-size sequence and the
    difference sequences satisfy m^1 <= m^2 pointwise, which nests the
    entrywise degree bounds of the two matrix patterns.
    """
    label1 = validate_label(label1)
    label2 = validate_label(label2)
    if len(label1) != len(label2):
        raise InvalidInputError("labels must have the same length")
    sizes1, _ = block_seq(label1)
    sizes2, _ = block_seq(label2)
    if sizes1 != sizes2:
        return False
    return all(a <= b for a, b in zip(diff_seq(label1), diff_seq(label2)))


def _det_mod_q(mat, q: int) -> int:
    n = len(mat)
    m = [[x % q for x in row] for row in mat]
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det = (det * m[col][col]) % q
        inv = inv_mod(m[col][col], q)
        for r in range(col + 1, n):
            if m[r][col]:
                f = (m[r][col] * inv) % q
                for c in range(col, n):
                    m[r][c] = (m[r][c] - f * m[col][c]) % q
    return det % q


_GL_CACHE: dict[tuple[int, int], list] = {}


def _gl_matrices(m: int, q: int):
    """All invertible m x m matrices over F_q (cached; m stays tiny here)."""
    key = (m, q)
    if key not in _GL_CACHE:
        if q ** (m * m) > _GL_CANDIDATE_BOUND:
            raise ResourceBoundError(
                f"GL_{m}(F_{q}) needs {q**(m*m)} candidate matrices, over the bound"
            )
        _GL_CACHE[key] = [
            mat
            for flat in product(range(q), repeat=m * m)
            if _det_mod_q(mat := tuple(flat[i * m : (i + 1) * m] for i in range(m)), q)
        ]
    return _GL_CACHE[key]


def stabilizer_enumerate(
    label, q: int, bound: int = DEFAULT_GROUP_BOUND
) -> list[LaurentMatrix]:
    """Materialize the full vertex stabilizer modulo scalars.

    Elements are block upper-triangular matrices over F_q[t]: diagonal
    blocks invertible over F_q, and each entry of an off-diagonal block
    (l, m) a polynomial of degree at most g_l - g_m.  One representative
    per scalar class: the first nonzero entry in row-major order has its
    lowest-exponent coefficient normalized to 1.
    """
    label = validate_label(label)
    check_prime(q)
    predicted = stabilizer_order(label, q)
    if predicted > bound:
        raise ResourceBoundError(
            f"stabilizer of {label} has order {predicted}, over the bound {bound}"
        )
    sizes, values = block_seq(label)
    r = len(sizes)
    starts = [sum(sizes[:i]) for i in range(r)]
    d = len(label)

    poly_slots = []  # (row, col, degree cap) for the free polynomial entries
    for l in range(r):
        for m in range(l + 1, r):
            cap = values[l] - values[m]
            for i in range(starts[l], starts[l] + sizes[l]):
                for j in range(starts[m], starts[m] + sizes[m]):
                    poly_slots.append((i, j, cap))
    choices_by_cap = {
        cap: [
            LaurentPoly(dict(enumerate(coeffs)), q)
            for coeffs in product(range(q), repeat=cap + 1)
        ]
        for cap in {cap for _, _, cap in poly_slots}
    }
    zero = LaurentPoly.zero(q)

    out: list[LaurentMatrix] = []
    for diag_blocks in product(*(_gl_matrices(sizes[l], q) for l in range(r))):
        base = [[zero] * d for _ in range(d)]
        for l, blk in enumerate(diag_blocks):
            s = starts[l]
            for i in range(sizes[l]):
                for j in range(sizes[l]):
                    if blk[i][j]:
                        base[s + i][s + j] = LaurentPoly.constant(blk[i][j], q)
        for combo in product(*(choices_by_cap[cap] for _, _, cap in poly_slots)):
            rows = [row[:] for row in base]
            for (i, j, _), p in zip(poly_slots, combo):
                rows[i][j] = p
            lead = next(x for row in rows for x in row if x)
            if lead.coeffs[min(lead.coeffs)] != 1:
                continue
            out.append(LaurentMatrix(rows, q))
    if len(out) != predicted:
        raise InternalInvariantError(
            f"stabilizer enumeration for {label}, q={q}: got {len(out)}, "
            f"formula predicts {predicted}"
        )
    return out


def stabilizer_degree_pattern_ok(gamma: LaurentMatrix, label) -> bool:
    """Exact membership test for the stabilizer of a label's lattice:
    deg(gamma[i][j]) <= n_i - n_j for every entry (negative bound = 0)."""
    label = validate_label(label)
    d = len(label)
    if gamma.d != d:
        raise InvalidInputError("matrix size does not match label length")
    return all(
        not x or x.degree() <= label[i] - label[j]
        for i, row in enumerate(gamma.rows)
        for j, x in enumerate(row)
    )


def edge_stabilizer_brute(
    label1, label2, q: int, bound: int = DEFAULT_GROUP_BOUND
) -> int:
    """|Gamma_{label1} intersect Gamma_{label2}| by full enumeration plus
    the exact degree-pattern membership test."""
    group = stabilizer_enumerate(label1, q, bound)
    return sum(1 for g in group if stabilizer_degree_pattern_ok(g, label2))


# ---------------------------------------------------------------------------
# orbits of the stabilizer action on neighbors
# ---------------------------------------------------------------------------


def _matrix_sort_key(mat: LaurentMatrix):
    return tuple(
        tuple(sorted(x.coeffs.items())) for row in mat.rows for x in row
    )


def orbit_decomposition(
    label, q: int, k: int, bound: int = DEFAULT_GROUP_BOUND
) -> list[list[BuildingVertex]]:
    """Partition the degree-k neighbors of the label's vertex under its
    enumerated stabilizer.

    Friends are exactly the singleton orbits; every orbit reduces to a
    single in-domain neighbor label.  Deterministic order.
    """
    label = validate_label(label)
    base = vertex_from_label(label, q)
    group = stabilizer_enumerate(label, q, bound)
    remaining = {v.key(): v for v in neighbors(base, k)}
    orbits: list[list[BuildingVertex]] = []
    while remaining:
        key = min(remaining, key=_matrix_sort_key)
        rep = remaining.pop(key)
        orbit = {rep.key(): rep}
        for g in group:
            img = vertex_normal_form(g * rep.basis)
            orbit.setdefault(img.key(), img)
        for kk in orbit:
            remaining.pop(kk, None)
        orbits.append(sorted(orbit.values(), key=lambda v: _matrix_sort_key(v.key())))
    orbits.sort(key=lambda orb: _matrix_sort_key(orb[0].key()))
    return orbits


# ---------------------------------------------------------------------------
# reduction into the domain
# ---------------------------------------------------------------------------


def reduce_to_domain(v) -> tuple[tuple[int, ...], LaurentMatrix]:
    """The unique domain label of a building vertex's orbit, plus a witness
    w over F_q[t] with unit determinant and [w * basis] = [label diagonal].

    Row reduction over F_q[t]: while the matrix of leading row
    coefficients is singular over F_q, a null combination cancels the top
    degree of one row, strictly decreasing the total row degree (which is
    bounded below by deg det).  Once the leading matrix is invertible the
    row degrees are the label exponents up to sorting and homothety.
    """
    if isinstance(v, BuildingVertex):
        basis = v.basis
    elif isinstance(v, LaurentMatrix):
        basis = vertex_normal_form(v).basis
    else:
        raise InvalidInputError("expected a BuildingVertex or LaurentMatrix")
    d, q = basis.d, basis.q

    low = min((x.low_exponent() for row in basis.rows for x in row if x), default=0)
    low = min(low, 0)
    rows = [[x.shift(-low) if x else x for x in row] for row in basis.rows]
    acc = [list(r) for r in LaurentMatrix.identity(d, q).rows]
    det_deg = basis.det().degree() - low * d

    def row_degree(i: int) -> int:
        degs = [x.degree() for x in rows[i] if x]
        if not degs:
            raise SingularMatrixError("zero row during domain reduction")
        return max(degs)

    while True:
        degs = [row_degree(i) for i in range(d)]
        lead = [[rows[i][j].coeff(degs[i]) for j in range(d)] for i in range(d)]
        combo = _left_null_vector(lead, q)
        if combo is None:
            break
        pivot = max((i for i in range(d) if combo[i]), key=lambda i: (degs[i], i))
        new_row = [LaurentPoly.zero(q)] * d
        new_acc = [LaurentPoly.zero(q)] * d
        for i in range(d):
            if not combo[i]:
                continue
            mono = LaurentPoly.t_power(degs[pivot] - degs[i], q, combo[i])
            for j in range(d):
                if rows[i][j]:
                    new_row[j] = new_row[j] + mono * rows[i][j]
                if acc[i][j]:
                    new_acc[j] = new_acc[j] + mono * acc[i][j]
        rows[pivot] = new_row
        acc[pivot] = new_acc
        if row_degree(pivot) >= degs[pivot]:
            raise InternalInvariantError(
                "row degree did not decrease during domain reduction"
            )
        if sum(row_degree(i) for i in range(d)) < det_deg:
            raise InternalInvariantError(
                "total row degree fell below deg(det) during domain reduction"
            )

    degs = [row_degree(i) for i in range(d)]
    order = sorted(range(d), key=lambda i: (-degs[i], i))
    base_deg = min(degs)
    label = tuple(degs[i] - base_deg for i in order)
    witness = LaurentMatrix([acc[i] for i in order], q)
    return label, witness


def _left_null_vector(mat, q: int):
    """A nonzero vector c with c * mat = 0 over F_q, or None if invertible."""
    n = len(mat)
    a = [[mat[j][i] % q for j in range(n)] for i in range(n)]  # transpose
    pivots: dict[int, int] = {}  # column -> reduced row index
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, n) if a[r][col]), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = inv_mod(a[row][col], q)
        a[row] = [(x * inv) % q for x in a[row]]
        for r in range(n):
            if r != row and a[r][col]:
                f = a[r][col]
                a[r] = [(x - f * y) % q for x, y in zip(a[r], a[row])]
        pivots[col] = row
        row += 1
    if row == n:
        return None
    free = next(c for c in range(n) if c not in pivots)
    x = [0] * n
    x[free] = 1
    for col, r in pivots.items():
        x[col] = (-a[r][free]) % q
    return x
