"""Finite projective planes as explicit incidence structures.

A plane of order n is stored as its list of lines, each line a sorted
array of point indices in 0..n^2+n.  Join/meet tables are built lazily
and cached; everything downstream (coordinatisation, collineations,
searches) works through those tables.

Helpers here construct the classical plane over a finite field from
homogeneous coordinates, build planes from ternary tables or
quasifield data, validate the plane axioms with concrete witnesses,
and decide whether a plane is Desarguesian.
"""

from __future__ import annotations

import json
from typing import Optional, Tuple

import numpy as np

from .errors import (
    AxiomViolation,
    IncompleteTable,
    InternalContradiction,
    NotQuasifield,
    NotWeakPTR,
    OrderNotPrimePower,
)
from .fields import FiniteField, make_field


class IncidencePlane:
    """Immutable incidence structure; validity is checked separately."""

    __slots__ = ("n", "lines", "_inc", "_point_lines", "_join", "_meet")

    def __init__(self, order: int, lines):
        if order < 2:
            raise AxiomViolation("order", order, "order must be at least 2")
        arr = np.array(lines, dtype=np.int64)
        if arr.ndim != 2:
            raise AxiomViolation(
                "line-size", None, "lines must be uniform-length index rows"
            )
        N = order * order + order + 1
        if arr.size and (arr.min() < 0 or arr.max() >= N):
            bad = int(np.argwhere((arr < 0) | (arr >= N))[0][0])
            raise AxiomViolation(
                "point-index", bad, f"line {bad} mentions a point outside 0..{N-1}"
            )
        arr = np.sort(arr, axis=1)
        arr.flags.writeable = False
        self.n = int(order)
        self.lines = arr
        self._inc = None
        self._point_lines = None
        self._join = None
        self._meet = None

    @property
    def num_points(self) -> int:
        return self.n * self.n + self.n + 1

    @property
    def num_lines(self) -> int:
        return int(self.lines.shape[0])

    def incidence(self) -> np.ndarray:
        """Boolean matrix, rows = lines, columns = points."""
        if self._inc is None:
            inc = np.zeros((self.num_lines, self.num_points), dtype=bool)
            rows = np.repeat(np.arange(self.num_lines), self.lines.shape[1])
            inc[rows, self.lines.ravel()] = True
            inc.flags.writeable = False
            self._inc = inc
        return self._inc

    def point_lines(self) -> np.ndarray:
        """Sorted line indices through each point; needs uniform degree."""
        if self._point_lines is None:
            inc = self.incidence()
            degs = inc.sum(axis=0)
            if not (degs == degs[0]).all():
                p = int(np.argwhere(degs != degs[0])[0][0])
                raise AxiomViolation(
                    "point-degree", p, f"point {p} lies on {int(degs[p])} lines"
                )
            pl = np.argwhere(inc.T)[:, 1].reshape(self.num_points, int(degs[0]))
            pl.flags.writeable = False
            self._point_lines = pl
        return self._point_lines

    def join_table(self) -> np.ndarray:
        """join_table[p,q] = the line through points p and q; -1 on the diagonal."""
        if self._join is None:
            N = self.num_points
            jt = np.full((N, N), -1, dtype=np.int64)
            w = self.lines.shape[1]
            ii, jj = np.triu_indices(w, 1)
            a = self.lines[:, ii]
            b = self.lines[:, jj]
            idx = np.repeat(
                np.arange(self.num_lines), ii.size
            ).reshape(self.num_lines, ii.size)
            jt[a, b] = idx
            jt[b, a] = idx
            jt.flags.writeable = False
            self._join = jt
        return self._join

    def meet_table(self) -> np.ndarray:
        """meet_table[l,m] = the common point of lines l and m; -1 on the diagonal."""
        if self._meet is None:
            pl = self.point_lines()
            L = self.num_lines
            mt = np.full((L, L), -1, dtype=np.int64)
            w = pl.shape[1]
            ii, jj = np.triu_indices(w, 1)
            a = pl[:, ii]
            b = pl[:, jj]
            idx = np.repeat(np.arange(self.num_points), ii.size).reshape(
                self.num_points, ii.size
            )
            mt[a, b] = idx
            mt[b, a] = idx
            mt.flags.writeable = False
            self._meet = mt
        return self._meet

    def join(self, p: int, q: int) -> int:
        l = int(self.join_table()[p, q])
        if l < 0:
            raise ValueError(f"join of {p} and {q} is undefined")
        return l

    def meet(self, l: int, m: int) -> int:
        p = int(self.meet_table()[l, m])
        if p < 0:
            raise ValueError(f"meet of {l} and {m} is undefined")
        return p

    def line_points(self, l: int) -> np.ndarray:
        return self.lines[l]

    def has(self, l: int, p: int) -> bool:
        return bool(self.incidence()[l, p])

    def transpose(self) -> "IncidencePlane":
        """The dual plane: old lines become points and vice versa."""
        return IncidencePlane(self.n, self.point_lines())

    def __repr__(self):
        return f"IncidencePlane(order {self.n}, {self.num_lines} lines)"


def find_quadrangle(plane: IncidencePlane) -> Optional[Tuple[int, int, int, int]]:
    """Least 4 points, no 3 collinear, greedy scan; None if none exist."""
    N = plane.num_points
    inc = plane.incidence()
    jt = plane.join_table()
    for p0 in range(min(N, 3)):
        for p1 in range(p0 + 1, N):
            l01 = jt[p0, p1]
            for p2 in range(p1 + 1, N):
                if inc[l01, p2]:
                    continue
                banned = inc[jt[p0, p1]] | inc[jt[p0, p2]] | inc[jt[p1, p2]]
                free = np.flatnonzero(~banned)
                free = free[free > p2]
                if free.size:
                    return (p0, p1, p2, int(free[0]))
    return None


def validate_plane(plane: IncidencePlane) -> int:
    """Return the order if all plane axioms hold; AxiomViolation otherwise."""
    n = plane.n
    N = n * n + n + 1
    if plane.num_lines != N:
        raise AxiomViolation(
            "counts",
            plane.num_lines,
            f"expected {N} lines for order {n}, found {plane.num_lines}",
        )
    w = plane.lines.shape[1]
    if w != n + 1:
        raise AxiomViolation(
            "line-size", w, f"lines carry {w} points, expected {n + 1}"
        )
    # rows are sorted at construction, so repeats are adjacent
    dup = np.argwhere(plane.lines[:, 1:] == plane.lines[:, :-1])
    if dup.size:
        l = int(dup[0][0])
        raise AxiomViolation(
            "line-size", l, f"line {l} repeats a point"
        )
    inc = plane.incidence()
    degs = inc.sum(axis=0)
    if not (degs == n + 1).all():
        p = int(np.argwhere(degs != n + 1)[0][0])
        raise AxiomViolation(
            "point-degree", p, f"point {p} lies on {int(degs[p])} lines, expected {n + 1}"
        )

    # every point pair on exactly one common line
    pair_counts = np.zeros((N, N), dtype=np.int64)
    ii, jj = np.triu_indices(w, 1)
    np.add.at(pair_counts, (plane.lines[:, ii].ravel(), plane.lines[:, jj].ravel()), 1)
    iu = np.triu_indices(N, 1)
    bad = pair_counts[iu] != 1
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        p, q = int(iu[0][k]), int(iu[1][k])
        raise AxiomViolation(
            "point-pair",
            (p, q),
            f"points {p},{q} lie on {int(pair_counts[p, q])} common lines",
        )

    # every line pair meets in exactly one point
    pl = plane.point_lines()
    meet_counts = np.zeros((N, N), dtype=np.int64)
    ii, jj = np.triu_indices(pl.shape[1], 1)
    np.add.at(meet_counts, (pl[:, ii].ravel(), pl[:, jj].ravel()), 1)
    bad = meet_counts[iu] != 1
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        l, m = int(iu[0][k]), int(iu[1][k])
        raise AxiomViolation(
            "line-pair",
            (l, m),
            f"lines {l},{m} share {int(meet_counts[l, m])} points",
        )

    if find_quadrangle(plane) is None:
        raise AxiomViolation("no-quadrangle", None, "no quadrangle exists")
    return n


# -- classical construction -------------------------------------------------


def _normalized_triples(q: int):
    # lexicographic order over normalized representatives
    out = [(0, 0, 1)]
    out.extend((0, 1, c) for c in range(q))
    out.extend((1, b, c) for b in range(q) for c in range(q))
    return out


def homogeneous_index(field: FiniteField, v) -> int:
    """Index of the projective point (or line) with coordinates v."""
    a, b, c = (int(x) for x in v)
    if a != 0:
        s = field.inv(a)
        a, b, c = 1, field.mul(s, b), field.mul(s, c)
    elif b != 0:
        s = field.inv(b)
        b, c = 1, field.mul(s, c)
    elif c != 0:
        c = 1
    else:
        raise ValueError("zero vector has no projective index")
    if a == 1:
        return 1 + field.q + b * field.q + c
    if b == 1:
        return 1 + c
    return 0


def desarguesian_plane(field: FiniteField) -> IncidencePlane:
    """The plane of order q over the field, homogeneous coordinates.

    Point/line indices follow lexicographic order over normalized
    coordinate triples (first nonzero entry scaled to 1).
    """
    q = field.q
    pts = np.array(_normalized_triples(q), dtype=np.int64)
    add = field.add_table()
    mul = field.mul_table()
    rows = []
    for (u, v, w) in _normalized_triples(q):
        dot = add[add[mul[u, pts[:, 0]], mul[v, pts[:, 1]]], mul[w, pts[:, 2]]]
        on = np.flatnonzero(dot == 0)
        if on.size != q + 1:
            raise InternalContradiction(
                f"projective line carries {on.size} points", (u, v, w)
            )
        rows.append(on)
    return IncidencePlane(q, np.array(rows, dtype=np.int64))


def standard_frame(field: FiniteField) -> dict:
    """Anchor indices of the reference quadrangle in desarguesian_plane."""
    q = field.q
    return {
        "O": homogeneous_index(field, (0, 0, 1)),
        "X": homogeneous_index(field, (1, 0, 0)),
        "Y": homogeneous_index(field, (0, 1, 0)),
        "I": homogeneous_index(field, (1, 1, 1)),
    }


def field_vertical_labelling(field: FiniteField) -> dict:
    """Send label a to the point (0:a:1) of desarguesian_plane.

    Feeding this into the coordinatiser together with standard_frame
    makes the labels literal field elements, so the extracted table is
    m*x + y on the nose rather than up to isomorphism.
    """
    return {
        a: homogeneous_index(field, (0, a, 1)) for a in range(2, field.q)
    }


def subfield_subplane(field: FiniteField, d: int):
    """(points, lines) of the order-p^d subplane of desarguesian_plane(field).

    Membership: all normalized homogeneous coordinates lie in the
    subfield.  The standard frame always qualifies.
    """
    sub = set(field.subfield_elements(d))
    pts = []
    lns = []
    for i, triple in enumerate(_normalized_triples(field.q)):
        if all(x in sub for x in triple):
            pts.append(i)
            lns.append(i)
    return (
        np.array(pts, dtype=np.int64),
        np.array(lns, dtype=np.int64),
    )


# -- ternary tables ----------------------------------------------------------


class TernaryTable:
    """Total map F_q^3 -> F_q, indexed [m,x,y]."""

    __slots__ = ("field", "t")

    def __init__(self, field: FiniteField, t):
        q = field.q
        arr = np.asarray(t, dtype=np.int64)
        if arr.size == q**3:
            arr = arr.reshape(q, q, q)
        if arr.shape != (q, q, q):
            raise IncompleteTable(
                f"expected {q}^3 values, got shape {arr.shape}"
            )
        if arr.min() < 0 or arr.max() >= q:
            raise IncompleteTable("table values outside the field encoding")
        arr = arr.copy()
        arr.flags.writeable = False
        self.field = field
        self.t = arr

    @classmethod
    def from_function(cls, field: FiniteField, fn):
        q = field.q
        arr = np.empty((q, q, q), dtype=np.int64)
        for m in range(q):
            for x in range(q):
                for y in range(q):
                    arr[m, x, y] = fn(m, x, y)
        return cls(field, arr)

    @classmethod
    def linear(cls, field: FiniteField):
        """T(m,x,y) = m*x + y in the field itself."""
        return cls(field, field.add_table()[field.mul_table()])

    def __call__(self, m: int, x: int, y: int) -> int:
        return int(self.t[m, x, y])

    def __eq__(self, other):
        if not isinstance(other, TernaryTable):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.t, other.t)

    def __hash__(self):
        return hash((self.field, self.t.tobytes()))

    def __repr__(self):
        return f"TernaryTable(q={self.field.q})"


def ternary_to_text(T: TernaryTable) -> str:
    f = T.field
    q = f.q
    lines = [f"ptr q={q} p={f.p} e={f.e}"]
    flat = T.t.reshape(q * q, q)
    for row in flat:
        lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def ternary_from_text(text: str) -> TernaryTable:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("ptr "):
        raise IncompleteTable("missing 'ptr' header")
    header = dict(kv.split("=", 1) for kv in lines[0].split()[1:] if "=" in kv)
    try:
        q, p, e = (int(header[k]) for k in ("q", "p", "e"))
    except KeyError as missing:
        raise IncompleteTable(f"header lacks {missing}") from None
    if p**e != q:
        raise IncompleteTable(f"header inconsistent: {p}^{e} != {q}")
    vals = [int(tok) for ln in lines[1:] for tok in ln.split()]
    if len(vals) != q**3:
        raise IncompleteTable(f"expected {q**3} values, got {len(vals)}")
    return TernaryTable(make_field(p, e), vals)


def plane_from_ptr(T: TernaryTable) -> IncidencePlane:
    """Projective plane coordinatised by T.

    Index layout: point (x,y) -> x*q+y, (m) -> q^2+m, the common point
    of the verticals -> q^2+q; line [m,k] -> m*q+k, [c] -> q^2+c, and
    the line at infinity -> q^2+q.
    """
    from .properties import check_ptr_properties

    q = T.field.q
    rep = check_ptr_properties(T.t)
    for name in ("c", "d", "e"):
        w = getattr(rep, name)
        if w is not None:
            raise NotWeakPTR(name, w)

    rows = np.empty((q * q + q + 1, q + 1), dtype=np.int64)
    for m in range(q):
        for k in range(q):
            xs, ys = np.nonzero(T.t[m] == k)
            if xs.size != q:
                raise InternalContradiction(
                    f"line [{m},{k}] holds {xs.size} affine points", (m, k)
                )
            rows[m * q + k, :q] = xs * q + ys
            rows[m * q + k, q] = q * q + m
    aff_y = np.arange(q)
    for c in range(q):
        rows[q * q + c, :q] = c * q + aff_y
        rows[q * q + c, q] = q * q + q
    rows[q * q + q] = q * q + np.arange(q + 1)
    plane = IncidencePlane(q, rows)
    try:
        validate_plane(plane)
    except AxiomViolation as bad:
        raise InternalContradiction(
            "weak planarity passed but the completed plane is invalid",
            (bad.kind, bad.witness),
        ) from bad
    return plane


# -- quasifields -------------------------------------------------------------


def _prime_power(q: int):
    if q < 2:
        raise OrderNotPrimePower(q)
    p = 2
    while p * p <= q:
        if q % p == 0:
            break
        p += 1
    else:
        p = q
    e = 0
    m = q
    while m % p == 0:
        m //= p
        e += 1
    if m != 1:
        raise OrderNotPrimePower(q)
    return p, e


def plane_from_quasifield(add, mul) -> Tuple[TernaryTable, IncidencePlane]:
    """T(m,x,y) = (m . x) + y from an additive group and a nonzero loop.

    `add` must be an abelian group on the encodings 0..q-1 with
    identity 0; `mul` a loop on 1..q-1 with identity 1; at least one
    distributive law must hold (both are tried).
    """
    from .properties import check_ptr_properties

    q = len(add.carrier)
    if tuple(sorted(add.carrier)) != tuple(range(q)):
        raise NotQuasifield("carrier", add.carrier, "addition must cover 0..q-1")
    if add.identity != 0:
        raise NotQuasifield("identity", add.identity, "additive identity must be 0")
    if tuple(sorted(mul.carrier)) != tuple(range(1, q)):
        raise NotQuasifield(
            "carrier", mul.carrier, "multiplication must cover 1..q-1"
        )
    if mul.identity != 1:
        raise NotQuasifield("identity", mul.identity, "multiplicative identity must be 1")
    p, e = _prime_power(q)

    # dense encoded tables, multiplication extended by zero annihilation
    plus = np.zeros((q, q), dtype=np.int64)
    for i, a in enumerate(add.carrier):
        for j, b in enumerate(add.carrier):
            plus[a, b] = add.table[i, j]
    times = np.zeros((q, q), dtype=np.int64)
    for i, a in enumerate(mul.carrier):
        for j, b in enumerate(mul.carrier):
            times[a, b] = mul.table[i, j]

    for a in range(q):
        if plus[0, a] != a or plus[a, 0] != a:
            raise NotQuasifield("identity", a, "0 is not an additive identity")
    for a in range(q):
        if len(set(int(v) for v in plus[a])) != q:
            raise NotQuasifield("latin", a, f"additive row {a} repeats")
        if len(set(int(v) for v in plus[:, a])) != q:
            raise NotQuasifield("latin", a, f"additive column {a} repeats")
    if not np.array_equal(plus, plus.T):
        a, b = (int(v) for v in np.argwhere(plus != plus.T)[0])
        raise NotQuasifield("commutativity", (a, b), "addition is not commutative")
    assoc_l = plus[plus, :]
    assoc_r = plus[:, plus]
    if not np.array_equal(assoc_l, assoc_r):
        w = tuple(int(v) for v in np.argwhere(assoc_l != assoc_r)[0])
        raise NotQuasifield("associativity", w, "addition is not associative")
    for a in range(1, q):
        if times[a, 1] != a or times[1, a] != a:
            raise NotQuasifield("identity", a, "1 is not a multiplicative identity")
        if len(set(int(v) for v in times[a, 1:])) != q - 1:
            raise NotQuasifield("latin", a, f"multiplicative row {a} repeats")
        if len(set(int(v) for v in times[1:, a])) != q - 1:
            raise NotQuasifield("latin", a, f"multiplicative column {a} repeats")

    # (x+y).z = x.z + y.z, or z.(x+y) = z.x + z.y; either will do
    lhs_s = times[plus, :]
    rhs_s = plus[times[:, None, :], times[None, :, :]]
    if not np.array_equal(lhs_s, rhs_s):
        lhs_c = times[:, plus]
        rhs_c = plus[times[:, :, None], times[:, None, :]]
        if not np.array_equal(lhs_c, rhs_c):
            w = tuple(int(v) for v in np.argwhere(lhs_s != rhs_s)[0])
            raise NotQuasifield(
                "distributivity", w, "neither distributive law holds"
            )

    field = make_field(p, e)
    T = TernaryTable(field, plus[times])
    rep = check_ptr_properties(T.t)
    if not rep.ptr:
        for name in ("a", "b", "c", "d", "e"):
            w = getattr(rep, name)
            if w is not None:
                raise NotQuasifield(
                    f"planarity-{name}", w, "axioms hold but the table is not planar"
                )
    return T, plane_from_ptr(T)


def quasifield_to_text(mul_dense: np.ndarray) -> str:
    """Multiplication written as `x y x*y` rows; addition is implied."""
    q = mul_dense.shape[0]
    lines = [f"q={q}"]
    for x in range(q):
        for y in range(q):
            lines.append(f"{x} {y} {int(mul_dense[x, y])}")
    return "\n".join(lines) + "\n"


def quasifield_from_text(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("q="):
        raise IncompleteTable("missing 'q=' header")
    q = int(lines[0].split("=", 1)[1])
    if len(lines) != 1 + q * q:
        raise IncompleteTable(f"expected {q*q} rows, got {len(lines) - 1}")
    out = np.full((q, q), -1, dtype=np.int64)
    for ln in lines[1:]:
        x, y, v = (int(tok) for tok in ln.split())
        out[x, y] = v
    if (out < 0).any():
        raise IncompleteTable("some products are missing")
    return out


# -- plane JSON ---------------------------------------------------------------


def plane_to_json(plane: IncidencePlane, pretty: bool = False) -> str:
    rows = sorted(tuple(int(v) for v in row) for row in plane.lines)
    doc = {
        "order": plane.n,
        "points": plane.num_points,
        "lines": [list(r) for r in rows],
    }
    if pretty:
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def plane_from_json(text: str) -> IncidencePlane:
    doc = json.loads(text)
    n = int(doc["order"])
    plane = IncidencePlane(n, doc["lines"])
    if int(doc.get("points", plane.num_points)) != plane.num_points:
        raise AxiomViolation(
            "counts", doc.get("points"), "point count disagrees with order"
        )
    return plane


# -- Desargues ----------------------------------------------------------------


def _desargues_by_configurations(plane: IncidencePlane) -> bool:
    from itertools import combinations

    inc = plane.incidence()
    jt = plane.join_table()
    mt = plane.meet_table()
    pl = plane.point_lines()
    n = plane.n
    # ordered index pairs (i, j), i != j, over a line's n non-center points
    oi, oj = np.nonzero(~np.eye(n, dtype=bool))
    for V in range(plane.num_points):
        through = pl[V]
        for l1, l2, l3 in combinations(through.tolist(), 3):
            pts1 = plane.lines[l1][plane.lines[l1] != V]
            pts2 = plane.lines[l2][plane.lines[l2] != V]
            pts3 = plane.lines[l3][plane.lines[l3] != V]
            B1, B2 = pts2[oi], pts2[oj]
            C1, C2 = pts3[oi], pts3[oj]
            for ai in range(n):
                for aj in range(ai + 1, n):
                    A1, A2 = int(pts1[ai]), int(pts1[aj])
                    s_ab1 = jt[A1, B1]
                    s_ab2 = jt[A2, B2]
                    okB = s_ab1 != s_ab2
                    D_ab = mt[s_ab1, s_ab2]
                    s_ac1 = jt[A1, C1]
                    s_ac2 = jt[A2, C2]
                    okC = s_ac1 != s_ac2
                    D_ac = mt[s_ac1, s_ac2]
                    s_bc1 = jt[B1[:, None], C1[None, :]]
                    s_bc2 = jt[B2[:, None], C2[None, :]]
                    D_bc = mt[s_bc1, s_bc2]
                    ok = (
                        okB[:, None]
                        & okC[None, :]
                        & (s_bc1 != s_bc2)
                        # both triangles nondegenerate
                        & ~inc[s_ab1[:, None], C1[None, :]]
                        & ~inc[s_ab2[:, None], C2[None, :]]
                        # coincident intersections are trivially collinear
                        & (D_ab[:, None] != D_ac[None, :])
                        & (D_ab[:, None] != D_bc)
                        & (D_ac[None, :] != D_bc)
                    )
                    if not ok.any():
                        continue
                    axis = jt[
                        np.broadcast_to(D_ab[:, None], ok.shape),
                        np.broadcast_to(D_ac[None, :], ok.shape),
                    ]
                    if (ok & ~inc[axis, D_bc]).any():
                        return False
    return True


def _desargues_by_transitivity(plane: IncidencePlane) -> bool:
    from .collineations import is_transitive

    for P in range(plane.num_points):
        for L in range(plane.num_lines):
            if not is_transitive(plane, P, L):
                return False
    return True


def is_desarguesian(plane: IncidencePlane, method: str = "auto") -> bool:
    """Exhaustive Desargues decision.

    `method`: 'configurations' enumerates perspective triangle pairs
    (practical for order <= 5); 'transitivity' checks every
    point-line flag for central transitivity, which is equivalent and
    far cheaper at larger orders; 'auto' picks by order.
    """
    if method == "auto":
        method = "configurations" if plane.n <= 5 else "transitivity"
    if method == "configurations":
        return _desargues_by_configurations(plane)
    if method == "transitivity":
        return _desargues_by_transitivity(plane)
    raise ValueError(f"unknown method {method!r}")
