"""Coordinatisation of projective planes and everything it induces.

Given a plane of order q and an ordered quadrangle (O, X, Y, I), every
point and line receives a label over F_q's encoding set: affine points
(x,y), slope points (m), one point at infinity, lines [m,k], verticals
[c], one line at infinity.  The ternary operation T(m,x,y) falls out
of the labelling, and the additive/multiplicative loops are sections
of T.

Also here: the geometric loop-action traces, the two optimal
labelling strategies (driven by elation/homology groups), Fano
configuration search and its involution bridge, and restriction of a
coordinatisation to a subplane.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import (
    InternalContradiction,
    InvalidWitness,
    GroupNotCyclic,
    GroupNotElementaryAbelian,
    LabellingInvalid,
    NotQuadrangle,
    NotTransitive,
    OrderNotPrimePower,
    QuadrangleNotInSubplane,
)
from .fields import FiniteField, make_field
from .planes import IncidencePlane, TernaryTable, _prime_power, validate_plane
from .properties import LoopTable, PropertyReport, check_ptr_properties


def _plane_field(n: int) -> FiniteField:
    p, e = _prime_power(n)
    return make_field(p, e)


def _check_quadrangle(plane: IncidencePlane, pts) -> None:
    O, X, Y, I = pts
    if len({O, X, Y, I}) != 4:
        raise NotQuadrangle(pts, "quadrangle points must be distinct")
    inc = plane.incidence()
    jt = plane.join_table()
    for (a, b, c) in ((O, X, Y), (O, X, I), (O, Y, I), (X, Y, I)):
        if inc[jt[a, b], c]:
            raise NotQuadrangle(pts, f"points {a},{b},{c} are collinear")


class Coordinatisation:
    """Complete point/line labelling of a plane over one quadrangle."""

    __slots__ = (
        "plane",
        "field",
        "anchors",
        "pt_affine",
        "pt_slope",
        "pt_inf",
        "ln_mk",
        "ln_vertical",
        "ln_inf",
    )

    def __init__(self, plane, field, anchors, pt_affine, pt_slope, pt_inf,
                 ln_mk, ln_vertical, ln_inf):
        self.plane = plane
        self.field = field
        self.anchors = dict(anchors)
        self.pt_affine = pt_affine
        self.pt_slope = pt_slope
        self.pt_inf = int(pt_inf)
        self.ln_mk = ln_mk
        self.ln_vertical = ln_vertical
        self.ln_inf = int(ln_inf)

    def affine(self, x: int, y: int) -> int:
        return int(self.pt_affine[x, y])

    def slope(self, m: int) -> int:
        return int(self.pt_slope[m])

    def infinity(self) -> int:
        return self.pt_inf

    def line(self, m: int, k: int) -> int:
        return int(self.ln_mk[m, k])

    def vertical(self, c: int) -> int:
        return int(self.ln_vertical[c])

    def line_infinity(self) -> int:
        return self.ln_inf

    def point_labels(self) -> Dict[int, str]:
        q = self.field.q
        out = {}
        for x in range(q):
            for y in range(q):
                out[int(self.pt_affine[x, y])] = f"({x},{y})"
        for m in range(q):
            out[int(self.pt_slope[m])] = f"({m})"
        out[self.pt_inf] = "(inf)"
        return out

    def line_labels(self) -> Dict[int, str]:
        q = self.field.q
        out = {}
        for m in range(q):
            for k in range(q):
                out[int(self.ln_mk[m, k])] = f"[{m},{k}]"
        for c in range(q):
            out[int(self.ln_vertical[c])] = f"[{c}]"
        out[self.ln_inf] = "[inf]"
        return out

    def to_json_dict(self) -> dict:
        return {
            "points": {lbl: idx for idx, lbl in self.point_labels().items()},
            "lines": {lbl: idx for idx, lbl in self.line_labels().items()},
        }


def coordinatise(
    plane: IncidencePlane,
    O: int,
    X: int,
    Y: int,
    I: int,
    vertical_labelling: Optional[Dict[int, int]] = None,
) -> Tuple[Coordinatisation, TernaryTable]:
    """Label the plane over the quadrangle and extract its ternary table.

    `vertical_labelling` may fix which point of line(O,Y) gets which
    label a for a outside {0,1}; the default pairs remaining points in
    index order with remaining encodings in numeric order.
    """
    field = _plane_field(plane.n)
    q = field.q
    O, X, Y, I = int(O), int(X), int(Y), int(I)
    _check_quadrangle(plane, (O, X, Y, I))
    jt = plane.join_table()
    mt = plane.meet_table()

    l_inf = jt[X, Y]
    l0 = jt[O, Y]
    l00 = jt[O, X]
    pt_01 = mt[jt[X, I], l0]
    pt_10 = mt[jt[Y, I], l00]
    J = mt[jt[pt_10, pt_01], l_inf]

    # points of the vertical axis get the labels
    pt_0a = np.full(q, -1, dtype=np.int64)
    pt_0a[0] = O
    pt_0a[1] = pt_01
    taken = {O, Y, int(pt_01)}
    remaining_pts = [int(p) for p in plane.lines[l0] if int(p) not in taken]
    remaining_lbls = [a for a in range(2, q)]
    if vertical_labelling is None:
        for a, p in zip(remaining_lbls, sorted(remaining_pts)):
            pt_0a[a] = p
    else:
        if sorted(vertical_labelling.keys()) != remaining_lbls:
            raise LabellingInvalid(
                f"labelling must cover exactly the encodings {remaining_lbls}"
            )
        if sorted(int(v) for v in vertical_labelling.values()) != sorted(
            remaining_pts
        ):
            raise LabellingInvalid(
                "labelling must hit each spare point of the vertical axis once"
            )
        for a, p in vertical_labelling.items():
            pt_0a[a] = int(p)

    # (a,0) = line((0,a), J) meet line(O,X); a=1 reproduces (1,0)
    pt_a0 = np.full(q, -1, dtype=np.int64)
    pt_a0[0] = O
    pt_a0[1:] = mt[jt[pt_0a[1:], J], l00]
    if pt_a0[1] != pt_10:
        raise InternalContradiction(
            "horizontal unit disagrees with its quadrangle definition",
            (int(pt_a0[1]), int(pt_10)),
        )

    # slope points (a) = line((0,a),(1,0)) meet the infinite line;
    # index 1 lands on J by J's own definition
    pt_slope = mt[jt[pt_0a, pt_10], l_inf]
    if pt_slope[0] != X:
        raise InternalContradiction(
            "zero slope point is not X", (int(pt_slope[0]), X)
        )

    # affine grid: (a,b) = vertical through (a,0) meet horizontal through (0,b)
    verticals = jt[pt_a0, Y]
    horizontals = jt[pt_0a, X]
    pt_affine = mt[verticals[:, None], horizontals[None, :]]
    if not (
        np.array_equal(pt_affine[:, 0], pt_a0)
        and np.array_equal(pt_affine[0, :], pt_0a)
    ):
        raise InternalContradiction("affine grid disagrees on its axes")

    ln_mk = jt[pt_slope[:, None], pt_0a[None, :]]

    # bijectivity of the assembled labelling
    N = plane.num_points
    counts = np.bincount(
        np.concatenate([pt_affine.ravel(), pt_slope, [Y]]), minlength=N
    )
    if not (counts == 1).all():
        raise InternalContradiction(
            "point labelling is not a bijection",
            int(np.argwhere(counts != 1)[0][0]),
        )
    lcounts = np.bincount(
        np.concatenate([ln_mk.ravel(), verticals, [l_inf]]),
        minlength=plane.num_lines,
    )
    if not (lcounts == 1).all():
        raise InternalContradiction(
            "line labelling is not a bijection",
            int(np.argwhere(lcounts != 1)[0][0]),
        )

    # T(m,x,y) = k when (x,y) sits on [m,k]
    k_of_line = np.full(plane.num_lines, -1, dtype=np.int64)
    m_of_line = np.full(plane.num_lines, -1, dtype=np.int64)
    mm, kk = np.indices((q, q))
    k_of_line[ln_mk] = kk
    m_of_line[ln_mk] = mm
    joined = jt[pt_slope[:, None, None], pt_affine[None, :, :]]
    if not np.array_equal(
        m_of_line[joined], np.broadcast_to(np.arange(q)[:, None, None], joined.shape)
    ):
        raise InternalContradiction(
            "line through (m) and an affine point is not an [m,k] line"
        )
    T = TernaryTable(field, k_of_line[joined])

    report = check_ptr_properties(T.t)
    if not report.ptr:
        raise InternalContradiction(
            "extracted table fails a planarity property",
            report.to_json_dict(),
        )

    anchors = {"O": O, "X": X, "Y": Y, "I": I, "J": int(J)}
    coord = Coordinatisation(
        plane,
        field,
        anchors,
        pt_affine,
        pt_slope,
        Y,
        ln_mk,
        verticals,
        l_inf,
    )
    return coord, T


def extract_loops(T: TernaryTable) -> Tuple[LoopTable, LoopTable]:
    """The additive loop x(+)y = T(1,x,y) and multiplicative loop
    x(.)y = T(x,y,0) restricted to nonzero elements."""
    from .errors import NotPTR
    from .properties import loop_analysis

    report = check_ptr_properties(T.t)
    if not report.ptr:
        for name in ("a", "b", "c", "d", "e"):
            w = getattr(report, name)
            if w is not None:
                raise NotPTR(name, w)
    q = T.field.q
    plus = LoopTable(range(q), 0, T.t[1])
    times = LoopTable(range(1, q), 1, T.t[1:, 1:, 0])
    for L in (plus, times):
        if not loop_analysis(L)["is_loop"]:
            raise InternalContradiction(
                "derived operation of a planar table is not a loop"
            )
    return plus, times


def trace_vertical_action(
    coord: Coordinatisation, op: str, a: int, b: int
) -> Tuple[int, List[dict]]:
    """Geometric evaluation of a(+)b or a(.)b on the vertical axis.

    Returns the result and the list of construction steps, each a dict
    naming the object built and its index.
    """
    plane = coord.plane
    jt = plane.join_table()
    mt = plane.meet_table()
    l0 = coord.vertical(0)
    trace: List[dict] = []
    if op == "add":
        pa0 = coord.affine(a, 0)
        trace.append({"step": f"point ({a},0) on the horizontal axis", "point": pa0})
        pab = int(mt[coord.vertical(a), coord.line(0, b)])
        if pab != coord.affine(a, b):
            raise InternalContradiction(
                "grid meet disagrees with the labelling", (a, b, pab)
            )
        trace.append({"step": f"point ({a},{b}) above it", "point": pab})
        lj = jt[coord.anchors["J"], pab]
        trace.append({"step": f"line joining J and ({a},{b})", "line": int(lj)})
        result = mt[lj, l0]
        trace.append(
            {"step": "its intercept on the vertical axis", "point": int(result)}
        )
        k = _label_on_vertical(coord, int(result))
        expected = int(T_value(coord, 1, a, b))
        if k != expected:
            raise InternalContradiction(
                "additive trace disagrees with the table", (a, b, k, expected)
            )
        return k, trace
    if op == "mul":
        s = coord.slope(a)
        trace.append({"step": f"slope point ({a})", "point": int(s)})
        pb0 = coord.affine(b, 0)
        trace.append({"step": f"horizontal point ({b},0)", "point": int(pb0)})
        l = jt[s, pb0]
        trace.append({"step": f"line joining ({a}) and ({b},0)", "line": int(l)})
        result = mt[l, l0]
        trace.append({"step": "its intercept on the vertical axis", "point": int(result)})
        k = _label_on_vertical(coord, int(result))
        expected = int(T_value(coord, a, b, 0))
        if k != expected:
            raise InternalContradiction(
                "multiplicative trace disagrees with the table",
                (a, b, k, expected),
            )
        return k, trace
    raise ValueError(f"op must be 'add' or 'mul', got {op!r}")


def _label_on_vertical(coord: Coordinatisation, point: int) -> int:
    q = coord.field.q
    for k in range(q):
        if coord.affine(0, k) == point:
            return k
    raise InternalContradiction("trace left the vertical axis", point)


def T_value(coord: Coordinatisation, m: int, x: int, y: int) -> int:
    """Read one ternary value straight from the labelling."""
    plane = coord.plane
    l = plane.join_table()[coord.slope(m), coord.affine(x, y)]
    q = coord.field.q
    for k in range(q):
        if coord.line(m, k) == l:
            return k
    raise InternalContradiction("slope join is not a slope line", (m, x, y))


# -- optimal labellings ------------------------------------------------------


def coordinatise_additive_optimal(
    plane: IncidencePlane, O: int, X: int, Y: int
) -> Tuple[Coordinatisation, TernaryTable]:
    """Label so that the additive loop IS field addition, tablewise.

    Requires the plane to be transitive at (Y, line(X,Y)) with an
    elementary abelian group; the group's digits become the labels.
    """
    from .collineations import group_at

    field = _plane_field(plane.n)
    q, p, e = field.q, field.p, field.e
    O, X, Y = int(O), int(X), int(Y)
    if len({O, X, Y}) != 3:
        raise NotQuadrangle((O, X, Y), "anchor points must be distinct")
    jt = plane.join_table()
    l_inf = int(jt[X, Y])
    if plane.incidence()[l_inf, O]:
        raise NotQuadrangle((O, X, Y), "O must avoid line(X,Y)")
    info = group_at(plane, Y, l_inf)
    if not info["transitive"]:
        raise NotTransitive((Y, l_inf))
    if not info["elementary_abelian"]:
        raise GroupNotElementaryAbelian(
            f"group at ({Y},{l_inf}) has order {info['order']} and is not "
            f"elementary abelian"
        )
    if info["order"] != q:
        raise InternalContradiction(
            "transitive elation group has the wrong order",
            (info["order"], q),
        )

    elements = sorted(info["elements"], key=lambda g: g.apply(O))
    ident = next(g for g in elements if g.is_identity())

    # greedy independent generators; an element is pinned by its image of O
    gens: List = []
    span = {ident.apply(O): ident}
    for g in elements:
        if g.apply(O) in span:
            continue
        gens.append(g)
        powers = [ident]
        for _ in range(p - 1):
            powers.append(powers[-1].compose(g))
        span = {
            s.compose(h).apply(O): s.compose(h)
            for s in list(span.values())
            for h in powers
        }
        if len(gens) == e:
            break
    if len(gens) != e or len(span) != q:
        raise InternalContradiction(
            "generator search did not span the elation group",
            (len(gens), len(span)),
        )

    labelling: Dict[int, int] = {}
    label_point = np.full(q, -1, dtype=np.int64)
    for a in range(q):
        digits = field.digits(a)
        g = ident
        for gi, ci in zip(gens, digits):
            for _ in range(ci):
                g = g.compose(gi)
        label_point[a] = g.apply(O)
    for a in range(2, q):
        labelling[a] = int(label_point[a])

    # I on line(X, P1) forces (0,1) to be the label-1 orbit point
    P1 = int(label_point[1])
    line_x_p1 = jt[X, P1]
    I = next(
        int(pp)
        for pp in plane.lines[line_x_p1]
        if int(pp) not in (X, P1)
    )
    coord, T = coordinatise(plane, O, X, Y, I, labelling)
    if not np.array_equal(T.t[1], field.add_table()):
        raise InternalContradiction(
            "optimal additive labelling does not reproduce field addition"
        )
    return coord, T


def coordinatise_multiplicative_optimal(
    plane: IncidencePlane, O: int, X: int, Y: int
) -> Tuple[Coordinatisation, TernaryTable]:
    """Label so that the multiplicative loop IS field multiplication.

    Requires transitivity at (X, line(O,Y)) with a cyclic homology
    group; powers of one generator get the powers of the least
    primitive element as labels.
    """
    from .collineations import group_at

    field = _plane_field(plane.n)
    q = field.q
    O, X, Y = int(O), int(X), int(Y)
    if len({O, X, Y}) != 3:
        raise NotQuadrangle((O, X, Y), "anchor points must be distinct")
    jt = plane.join_table()
    mt = plane.meet_table()
    inc = plane.incidence()
    l0 = int(jt[O, Y])
    if inc[l0, X]:
        raise NotQuadrangle((O, X, Y), "X must avoid line(O,Y)")
    info = group_at(plane, X, l0)
    if not info["transitive"]:
        raise NotTransitive((X, l0))
    if not info["cyclic"]:
        raise GroupNotCyclic(
            f"group at ({X},{l0}) has order {info['order']} and is not cyclic"
        )
    if info["order"] != q - 1:
        raise InternalContradiction(
            "transitive homology group has the wrong order",
            (info["order"], q - 1),
        )

    l00 = int(jt[O, X])
    P1 = next(
        int(pp) for pp in plane.lines[l00] if int(pp) not in (O, X)
    )

    # the generator whose action pushes P1 to the least possible point
    ident = next(g for g in info["elements"] if g.is_identity())

    def element_order(g) -> int:
        h, n = g, 1
        while not h.is_identity():
            h = h.compose(g)
            n += 1
        return n

    candidates = [
        g for g in info["elements"] if element_order(g) == q - 1
    ]
    if not candidates:
        raise InternalContradiction("cyclic group exposes no generator")
    gamma = min(candidates, key=lambda g: g.apply(P1))
    theta = field.least_primitive_element()

    label_a0 = np.full(q, -1, dtype=np.int64)
    label_a0[0] = O
    g = ident
    a = 1
    for _ in range(q - 1):
        label_a0[a] = g.apply(P1)
        g = g.compose(gamma)
        a = field.mul(a, theta)

    l_inf = int(jt[X, Y])
    J = next(int(pp) for pp in plane.lines[l_inf] if int(pp) not in (X, Y))
    Q1 = int(mt[jt[P1, J], l0])
    I = int(mt[jt[X, Q1], jt[Y, P1]])

    labelling: Dict[int, int] = {}
    for a in range(2, q):
        labelling[a] = int(mt[jt[label_a0[a], J], l0])
    coord, T = coordinatise(plane, O, X, Y, I, labelling)
    if not np.array_equal(T.t[:, :, 0], field.mul_table()):
        raise InternalContradiction(
            "optimal multiplicative labelling does not reproduce field "
            "multiplication"
        )
    return coord, T


def find_additive_anchor(plane: IncidencePlane):
    """Least (O, X, Y) whose (Y, line(X,Y)) flag carries a transitive
    elementary abelian group; None when the plane has no such flag."""
    from .collineations import group_at

    inc = plane.incidence()
    for Y in range(plane.num_points):
        for l in plane.point_lines()[Y]:
            info = group_at(plane, Y, int(l))
            if info["transitive"] and info["elementary_abelian"]:
                X = next(int(pp) for pp in plane.lines[l] if int(pp) != Y)
                O = int(np.flatnonzero(~inc[l])[0])
                return O, X, Y
    return None


def find_multiplicative_anchor(plane: IncidencePlane):
    """Least (O, X, Y) whose (X, line(O,Y)) flag carries a transitive
    cyclic group, X off the axis; None when absent."""
    from .collineations import group_at

    inc = plane.incidence()
    for X in range(plane.num_points):
        for l in range(plane.num_lines):
            if inc[l, X]:
                continue
            info = group_at(plane, X, l)
            if info["transitive"] and info["cyclic"]:
                O = int(plane.lines[l][0])
                Y = int(plane.lines[l][1])
                return O, X, Y
    return None


# -- Fano configurations -----------------------------------------------------


@dataclass(frozen=True)
class FanoWitness:
    points: Tuple[int, ...]
    lines: Tuple[int, ...]
    quadrangle: Tuple[int, int, int, int]
    diagonal: Tuple[int, int, int]

    def validate(self, plane: IncidencePlane) -> None:
        """7 points, 7 lines, 3/3 incidence, built from the quadrangle."""
        if len(set(self.points)) != 7 or len(set(self.lines)) != 7:
            raise InvalidWitness("need 7 distinct points and 7 distinct lines")
        N, L = plane.num_points, plane.num_lines
        if not all(0 <= p < N for p in self.points):
            raise InvalidWitness("point index out of range")
        if not all(0 <= l < L for l in self.lines):
            raise InvalidWitness("line index out of range")
        inc = plane.incidence()
        pts = np.asarray(self.points)
        lns = np.asarray(self.lines)
        sub = inc[np.ix_(lns, pts)]
        if not ((sub.sum(axis=1) == 3).all() and (sub.sum(axis=0) == 3).all()):
            raise InvalidWitness("incidence counts are not 3 per row/column")
        A, B, C, D = self.quadrangle
        jt = plane.join_table()
        mt = plane.meet_table()
        try:
            _check_quadrangle(plane, (A, B, C, D))
        except NotQuadrangle as exc:
            raise InvalidWitness(f"quadrangle field is degenerate: {exc}")
        d1 = int(mt[jt[A, B], jt[C, D]])
        d2 = int(mt[jt[A, C], jt[B, D]])
        d3 = int(mt[jt[A, D], jt[B, C]])
        if (d1, d2, d3) != tuple(self.diagonal):
            raise InvalidWitness("diagonal triple does not match the quadrangle")
        if set(self.points) != {A, B, C, D, d1, d2, d3}:
            raise InvalidWitness("points are not quadrangle plus diagonals")
        expect_lines = {
            int(jt[A, B]), int(jt[C, D]), int(jt[A, C]),
            int(jt[B, D]), int(jt[A, D]), int(jt[B, C]), int(jt[d1, d2]),
        }
        if set(self.lines) != expect_lines:
            raise InvalidWitness("lines are not the six sides plus the diagonal line")
        if not inc[jt[d1, d2], d3]:
            raise InvalidWitness("diagonal points are not collinear")


def _assemble_witness(plane, P1, P2, P3, P4) -> FanoWitness:
    jt = plane.join_table()
    mt = plane.meet_table()
    d1 = int(mt[jt[P1, P2], jt[P3, P4]])
    d2 = int(mt[jt[P1, P3], jt[P2, P4]])
    d3 = int(mt[jt[P1, P4], jt[P2, P3]])
    w = FanoWitness(
        points=(P1, P2, P3, P4, d1, d2, d3),
        lines=(
            int(jt[P1, P2]), int(jt[P3, P4]), int(jt[P1, P3]),
            int(jt[P2, P4]), int(jt[P1, P4]), int(jt[P2, P3]),
            int(jt[d1, d2]),
        ),
        quadrangle=(P1, P2, P3, P4),
        diagonal=(d1, d2, d3),
    )
    w.validate(plane)
    return w


def find_fano_direct(plane: IncidencePlane) -> Optional[FanoWitness]:
    """Least quadrangle with collinear diagonal points, or None.

    Quadrangles are scanned as ascending 4-tuples; the pair (P3,P4) is
    vectorized per leading pair.
    """
    N = plane.num_points
    inc = plane.incidence()
    jt = plane.join_table()
    mt = plane.meet_table()
    idx = np.arange(N)
    for P1 in range(N):
        for P2 in range(P1 + 1, N):
            l12 = jt[P1, P2]
            pool = idx[(idx > P2) & ~inc[l12]]
            if pool.size < 2:
                continue
            ii, jj = np.triu_indices(pool.size, 1)
            P3, P4 = pool[ii], pool[jj]
            good = ~inc[jt[P1, P3], P4] & ~inc[jt[P2, P3], P4]
            if not good.any():
                continue
            P3, P4 = P3[good], P4[good]
            d1 = mt[l12, jt[P3, P4]]
            d2 = mt[jt[P1, P3], jt[P2, P4]]
            d3 = mt[jt[P1, P4], jt[P2, P3]]
            hit = inc[jt[d1, d2], d3]
            if hit.any():
                k = int(np.flatnonzero(hit)[0])
                return _assemble_witness(
                    plane, P1, P2, int(P3[k]), int(P4[k])
                )
    return None


def involution_fano_witness(coord: Coordinatisation, t: int) -> FanoWitness:
    """Witness carved out of a coordinatisation where t (+) t = 0."""
    if not (1 <= int(t) < coord.field.q):
        raise InvalidWitness(f"t must be a nonzero encoding, got {t}")
    if T_value(coord, 1, t, t) != 0:
        raise InvalidWitness(f"{t} is not an additive involution here")
    quad = tuple(
        sorted(
            (
                coord.affine(0, t),
                coord.affine(t, 0),
                coord.anchors["X"],
                coord.anchors["Y"],
            )
        )
    )
    return _assemble_witness(coord.plane, *quad)


def fano_to_involutive_coordinatisation(
    plane: IncidencePlane, w: FanoWitness, t: int
) -> Tuple[Coordinatisation, TernaryTable]:
    """Coordinatise so that the chosen nonzero label t satisfies t(+)t=0.

    Follows the witness structure: one quadrangle point becomes the
    origin, two diagonal points become X and Y, and the collinear
    triple carries (0,t), (t,0) and the unit slope point.
    """
    w.validate(plane)
    field = _plane_field(plane.n)
    q = field.q
    t = int(t)
    if not (1 <= t < q):
        raise InvalidWitness(f"t must be a nonzero encoding, got {t}")
    A, B, C, D = w.quadrangle
    d1, d2, d3 = w.diagonal
    O, X, Y = A, d2, d3
    pt_0t, pt_t0 = D, C

    jt = plane.join_table()
    mt = plane.meet_table()
    inc = plane.incidence()
    l0 = jt[O, Y]
    l00 = jt[O, X]

    if t == 1:
        I = B
        coord, T = coordinatise(plane, O, X, Y, I)
        if coord.affine(0, 1) != pt_0t or coord.affine(1, 0) != pt_t0:
            raise InternalContradiction(
                "unit labels missed the witness points", (pt_0t, pt_t0)
            )
    else:
        # a helper point off the three witness lines through d1 frees
        # the unit labels from the configuration
        banned = inc[jt[A, B]] | inc[jt[C, D]] | inc[jt[d1, d2]]
        free = np.flatnonzero(~banned)
        if free.size == 0:
            raise InternalContradiction(
                "no helper point available off the witness pencil"
            )
        I0 = int(free[0])
        helper_line = jt[I0, d1]
        pt_01 = int(mt[helper_line, l0])
        pt_10 = int(mt[helper_line, l00])
        I = int(mt[jt[X, pt_01], jt[Y, pt_10]])
        labelling = {t: pt_0t}
        spare_lbls = [a for a in range(2, q) if a != t]
        taken = {O, Y, pt_01, pt_0t}
        spare_pts = sorted(
            int(p) for p in plane.lines[l0] if int(p) not in taken
        )
        for a, p in zip(spare_lbls, spare_pts):
            labelling[a] = p
        coord, T = coordinatise(plane, O, X, Y, I, labelling)

    if T(1, t, t) != 0:
        raise InternalContradiction(
            "involution guaranteed by the witness did not appear", t
        )
    return coord, T


# -- subplane restriction ----------------------------------------------------


@dataclass(frozen=True)
class SubplaneRestriction:
    labels: Tuple[int, ...]
    table: np.ndarray
    report: PropertyReport
    ternary: Optional[TernaryTable]


def restrict_to_subplane(coord: Coordinatisation, sub) -> SubplaneRestriction:
    """Restrict a coordinatisation to a subplane through its quadrangle.

    `sub` is a (points, lines) pair of index arrays closed under join
    and meet inside the big plane.  Returns the label subset, the
    relabelled ternary table over 0..m-1, its property report, and a
    TernaryTable when the subplane order is a prime power.
    """
    sub_pts = np.asarray(sorted(int(p) for p in sub[0]), dtype=np.int64)
    sub_lns = np.asarray(sorted(int(l) for l in sub[1]), dtype=np.int64)
    plane = coord.plane

    for key in ("O", "X", "Y", "I"):
        if coord.anchors[key] not in sub_pts:
            raise QuadrangleNotInSubplane(
                f"anchor {key} (point {coord.anchors[key]}) is outside"
            )

    # the induced structure must itself be a projective plane
    pos = {int(p): i for i, p in enumerate(sub_pts)}
    rows = []
    for l in sub_lns:
        on = [pos[int(p)] for p in plane.lines[l] if int(p) in pos]
        rows.append(sorted(on))
    width = {len(r) for r in rows}
    if len(width) != 1:
        raise QuadrangleNotInSubplane(
            "induced lines have mixed sizes; not a subplane"
        )
    m = width.pop() - 1
    induced = IncidencePlane(m, np.asarray(rows, dtype=np.int64))
    validate_plane(induced)

    q = coord.field.q
    sub_set = set(int(p) for p in sub_pts)
    labels = tuple(
        x for x in range(q) if coord.affine(x, 0) in sub_set
    )
    if labels[:2] != (0, 1):
        raise InternalContradiction(
            "0 and 1 must always survive restriction", labels[:2]
        )
    if len(labels) != m:
        raise InternalContradiction(
            "label count disagrees with subplane order", (len(labels), m)
        )

    rank = {x: i for i, x in enumerate(labels)}
    k = len(labels)
    table = np.empty((k, k, k), dtype=np.int64)
    for i, mm in enumerate(labels):
        for j, xx in enumerate(labels):
            for l, yy in enumerate(labels):
                v = T_value(coord, mm, xx, yy)
                if v not in rank:
                    raise InternalContradiction(
                        "restricted table leaves the label subset",
                        (mm, xx, yy, v),
                    )
                table[i, j, l] = rank[v]
    report = check_ptr_properties(table)
    if not report.ptr:
        raise InternalContradiction(
            "restricted table fails a planarity property",
            report.to_json_dict(),
        )
    try:
        ternary = TernaryTable(_plane_field(k), table)
    except OrderNotPrimePower:
        ternary = None
    return SubplaneRestriction(labels, table, report, ternary)
