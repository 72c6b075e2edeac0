"""The truncated weighted quotient graph on the fundamental domain.

Only color-1 directed edges are stored (u -> v whenever u is a degree-1
in-domain neighbor of v); the color-(d-1) operators read them in reverse.
Every edge carries the exact edge-stabilizer order and the two weight
ratios, which are subgroup indices and therefore positive integers.

For d = 3 every edge is classified into one of twelve shape types with
closed-form stabilizer orders; d = 2 has closed forms as well.  Other d
fall back to brute-force stabilizer intersections where feasible, and
edges beyond the feasibility bound are recorded as missing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import domain
from .errors import InvalidInputError, ResourceBoundError
from .gf import check_prime

Label = tuple[int, ...]


@dataclass(frozen=True)
class QuotientEdge:
    src: Label
    dst: Label
    color: int
    edge_type: int | str  # 1..12 for d = 3, "generic" otherwise
    edge_stab_order: int | None
    ratio_from: int | None  # w(u,v)/w(u) = |Gamma_u| / |Gamma(u,v)|
    ratio_to: int | None  # w(u,v)/w(v) = |Gamma_v| / |Gamma(u,v)|


class QuotientGraph:
    """Finite truncation of the quotient 1-skeleton with exact weights."""

    def __init__(self, d, q, max_n1, nodes, edges, missing_closed_forms=()):
        self.d = d
        self.q = q
        self.max_n1 = max_n1
        self.nodes = nodes  # dict label -> stabilizer order
        self.edges = edges  # list[QuotientEdge], color-1 only
        self.missing_closed_forms = tuple(missing_closed_forms)
        self.out_edges: dict[Label, list[QuotientEdge]] = {u: [] for u in nodes}
        self.in_edges: dict[Label, list[QuotientEdge]] = {u: [] for u in nodes}
        for e in edges:
            self.out_edges[e.src].append(e)
            self.in_edges[e.dst].append(e)

    def labels(self):
        return sorted(self.nodes)

    def stab_order(self, label) -> int:
        return self.nodes[tuple(label)]


def classify_edge_d3(label1, label2) -> int:
    """The row 1..12 of the d = 3 color-1 edge table matching (u, v).

    u must be a degree-1 in-domain neighbor of v; anything else is
    rejected.  The shapes split by the walls of the domain: the corner,
    the equal-pair wall (n,n,0), the bottom wall (n,0,0), and the interior.
    """
    u = domain.validate_label(label1)
    v = domain.validate_label(label2)
    if len(u) != 3 or len(v) != 3:
        raise InvalidInputError("edge classification is only defined for d = 3")
    if u not in domain.neighbors_in_domain(v, 1):
        raise InvalidInputError(f"{u} -> {v} is not a color-1 edge of the domain")
    a, b = u[0], u[1]
    if u == (0, 0, 0):
        return 1
    if u == (1, 0, 0) and v == (1, 1, 0):
        return 2
    if u == (1, 1, 0) and v == (0, 0, 0):
        return 3
    if b == 0:  # bottom wall, n >= 1
        return 4 if v == (a + 1, 0, 0) else 5
    if a == b:  # equal-pair wall, n >= 2 (the n = 1 edges matched above)
        return 6 if v == (a + 1, a, 0) else 12
    # interior u: a > b >= 1
    if v == (a + 1, b, 0):
        return 8
    if v == (a, b + 1, 0):
        return 7 if b + 1 == a else 11
    # remaining: v == (a - 1, b - 1, 0)
    return 9 if b == 1 else 10


def _edge_stab_d3(edge_type: int, n1: int, q: int) -> int:
    """Closed-form |Gamma(u, v)| for the twelve d = 3 edge types.

    n1 is the first coordinate of the source label u.
    """
    qm1 = (q - 1) ** 2
    if edge_type in (1, 3):
        return (q + 1) * qm1 * q**3
    if edge_type == 2:
        return qm1 * q**4
    if edge_type == 4:
        return (q + 1) * qm1 * q ** (2 * n1 + 3)
    if edge_type in (5, 7, 11):
        return qm1 * q ** (2 * n1 + 2)
    if edge_type in (6, 8):
        return qm1 * q ** (2 * n1 + 3)
    if edge_type in (9, 10):
        return qm1 * q ** (2 * n1 + 1)
    if edge_type == 12:
        return (q + 1) * qm1 * q ** (2 * n1 + 1)
    raise InvalidInputError(f"unknown edge type {edge_type}")


def _edge_stab_d2(u: Label, v: Label, q: int) -> int:
    # upper-triangular matrices with top-right degree <= min(n_u, n_v),
    # diagonal in F_q^x, modulo scalars
    n = min(u[0], v[0])
    return (q - 1) * q ** (n + 1)


def edge_stabilizer_order(
    label1,
    label2,
    q: int,
    bound: int = domain.DEFAULT_GROUP_BOUND,
) -> int:
    """|Gamma(u, v)| for a color-1 edge u -> v of the domain.

    Closed forms for d = 2 and d = 3; brute-force intersection of the two
    enumerated stabilizers otherwise (feasibility-bounded).
    """
    u = domain.validate_label(label1)
    v = domain.validate_label(label2)
    check_prime(q)
    if len(u) != len(v):
        raise InvalidInputError("labels must have the same length")
    d = len(u)
    if u not in domain.neighbors_in_domain(v, 1):
        raise InvalidInputError(f"{u} -> {v} is not a color-1 edge of the domain")
    if d == 3:
        return _edge_stab_d3(classify_edge_d3(u, v), u[0], q)
    if d == 2:
        return _edge_stab_d2(u, v, q)
    return domain.edge_stabilizer_brute(u, v, q, bound)


def build_graph(
    d: int,
    q: int,
    max_n1: int,
    brute_force_bound: int = domain.DEFAULT_GROUP_BOUND,
) -> QuotientGraph:
    """Assemble the truncated quotient graph with all exact edge data.

    Edges are the color-1 pairs with both endpoints inside the truncation;
    vertices with n_1 = max_n1 are therefore missing their outward edges
    and operator application treats them as boundary.
    """
    check_prime(q)
    if max_n1 < 0:
        raise InvalidInputError("max_n1 must be >= 0")
    labels = domain.enumerate_domain(d, max_n1)
    inside = set(labels)
    nodes = {lab: domain.stabilizer_order(lab, q) for lab in labels}
    edges = []
    missing = []
    for v in labels:
        for u in domain.neighbors_in_domain(v, 1):
            if u not in inside:
                continue
            if d == 3:
                etype: int | str = classify_edge_d3(u, v)
                stab = _edge_stab_d3(etype, u[0], q)
            elif d == 2:
                etype = "generic"
                stab = _edge_stab_d2(u, v, q)
            else:
                etype = "generic"
                try:
                    stab = domain.edge_stabilizer_brute(u, v, q, brute_force_bound)
                except ResourceBoundError:
                    stab = None
                    missing.append((u, v))
            if stab is None:
                edges.append(QuotientEdge(u, v, 1, etype, None, None, None))
            else:
                rf, rem_f = divmod(nodes[u], stab)
                rt, rem_t = divmod(nodes[v], stab)
                if rem_f or rem_t:
                    raise InvalidInputError(
                        f"edge stabilizer does not divide endpoint orders on {u}->{v}"
                    )
                edges.append(QuotientEdge(u, v, 1, etype, stab, rf, rt))
    edges.sort(key=lambda e: (e.src, e.dst))
    return QuotientGraph(d, q, max_n1, nodes, edges, missing)


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def export_json(graph: QuotientGraph) -> bytes:
    """Serialize per the documented schema; big integers as decimal strings."""
    obj = {
        "d": graph.d,
        "q": graph.q,
        "max_n1": graph.max_n1,
        "nodes": [
            {"label": list(lab), "stab_order": str(graph.nodes[lab])}
            for lab in graph.labels()
        ],
        "edges": [
            {
                "from": list(e.src),
                "to": list(e.dst),
                "color": e.color,
                "type": e.edge_type,
                "edge_stab_order": None if e.edge_stab_order is None else str(e.edge_stab_order),
                "ratio_from": None if e.ratio_from is None else str(e.ratio_from),
                "ratio_to": None if e.ratio_to is None else str(e.ratio_to),
            }
            for e in graph.edges
        ],
    }
    return (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode()


def export_dot(graph: QuotientGraph) -> bytes:
    """Graphviz rendering: one arrow per color-1 edge, labeled type/ratio."""
    lines = ["digraph domain {"]
    for lab in graph.labels():
        name = "".join(map(str, lab))
        lines.append(f'  "{name}" [label="{name}"];')
    for e in graph.edges:
        src = "".join(map(str, e.src))
        dst = "".join(map(str, e.dst))
        ratio = "?" if e.ratio_from is None else e.ratio_from
        lines.append(f'  "{src}" -> "{dst}" [label="{e.edge_type}/{ratio}"];')
    lines.append("}")
    return ("\n".join(lines) + "\n").encode()


def export(graph: QuotientGraph, fmt: str) -> bytes:
    if fmt == "json":
        return export_json(graph)
    if fmt == "dot":
        return export_dot(graph)
    raise InvalidInputError(f"unknown export format {fmt!r}")
