"""Central collineations and point-line transitivity.

A collineation with center A and axis L fixes L pointwise and every
line through A setwise.  Such a map is determined by the image of any
single point off L and the lines through A, which gives a direct
construction: push every other point along the pencil through A using
one known point-image pair.  The candidate map is then verified
globally; only verified maps are ever returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .errors import InternalContradiction, InvalidFlag
from .planes import IncidencePlane


@dataclass(frozen=True)
class CollineationMap:
    center: int
    axis: int
    point_perm: np.ndarray
    line_perm: np.ndarray

    def is_identity(self) -> bool:
        return bool(
            np.array_equal(self.point_perm, np.arange(self.point_perm.size))
        )

    def apply(self, p: int) -> int:
        return int(self.point_perm[p])

    def apply_line(self, l: int) -> int:
        return int(self.line_perm[l])

    def compose(self, other: "CollineationMap") -> "CollineationMap":
        """self after other."""
        return CollineationMap(
            self.center,
            self.axis,
            self.point_perm[other.point_perm],
            self.line_perm[other.line_perm],
        )

    def __eq__(self, other):
        if not isinstance(other, CollineationMap):
            return NotImplemented
        return np.array_equal(self.point_perm, other.point_perm)

    def __hash__(self):
        return hash(self.point_perm.tobytes())


def _identity_map(plane: IncidencePlane, A: int, L: int) -> CollineationMap:
    return CollineationMap(
        A,
        L,
        np.arange(plane.num_points, dtype=np.int64),
        np.arange(plane.num_lines, dtype=np.int64),
    )


def _verify(plane: IncidencePlane, A: int, L: int, perm: np.ndarray):
    """Map must be a bijection sending every line onto a line."""
    N = plane.num_points
    if not (np.bincount(perm, minlength=N) == 1).all():
        return None
    jt = plane.join_table()
    images = np.sort(perm[plane.lines], axis=1)
    candidate = jt[perm[plane.lines[:, 0]], perm[plane.lines[:, 1]]]
    if not np.array_equal(images, plane.lines[candidate]):
        return None
    return CollineationMap(A, L, perm, candidate)


def central_collineation(
    plane: IncidencePlane, A: int, L: int, B: int, C: int
) -> Optional[CollineationMap]:
    """The unique center-A axis-L collineation with B -> C, if one exists.

    B and C must be collinear with A, off the axis, and distinct from
    A; those are flag preconditions, not existence failures.  A
    candidate map is constructed by incidence chasing and verified;
    None means no such collineation exists.
    """
    N = plane.num_points
    inc = plane.incidence()
    if not (0 <= A < N and 0 <= L < plane.num_lines):
        raise InvalidFlag(f"no flag ({A},{L})")
    if not (0 <= B < N and 0 <= C < N):
        raise InvalidFlag(f"points ({B},{C}) out of range")
    if B == A or C == A:
        raise InvalidFlag("B and C must differ from the center")
    if inc[L, B] or inc[L, C]:
        raise InvalidFlag("B and C must avoid the axis")
    jt = plane.join_table()
    mt = plane.meet_table()
    if C != B and not inc[jt[A, B], C]:
        raise InvalidFlag("A, B, C must be collinear")
    if B == C:
        return _identity_map(plane, A, L)

    line_ab = jt[A, B]
    on_axis = inc[L]
    on_ab = inc[line_ab]
    pts = np.arange(N)
    perm = np.where(on_axis, pts, -1)
    perm[A] = A

    primary = ~on_axis & ~on_ab
    Pv = np.flatnonzero(primary)
    if Pv.size:
        q_on_axis = mt[jt[B, Pv], L]
        perm[Pv] = mt[jt[A, Pv], jt[q_on_axis, C]]

    secondary = on_ab & ~on_axis & (pts != A)
    Sv = np.flatnonzero(secondary)
    if Sv.size:
        off_both = np.flatnonzero(~on_axis & ~on_ab)
        if off_both.size == 0:
            return None
        Q0 = int(off_both[0])
        Q0i = int(perm[Q0])
        trace = mt[jt[Q0, Sv], L]
        if (trace == Q0i).any():
            return None
        perm[Sv] = mt[jt[trace, Q0i], line_ab]

    if (perm < 0).any():
        return None
    if perm[B] != C:
        return None
    return _verify(plane, A, L, perm)


def _base_line(plane: IncidencePlane, A: int, L: int) -> int:
    for l in plane.point_lines()[A]:
        if int(l) != L:
            return int(l)
    raise InvalidFlag("no line through the center other than the axis")


def _admissible(plane: IncidencePlane, line: int, A: int, L: int):
    inc = plane.incidence()
    pts = plane.lines[line]
    return [int(p) for p in pts if p != A and not inc[L, p]]


def is_transitive(plane: IncidencePlane, A: int, L: int) -> bool:
    """(A,L)-transitivity, decided from one base point.

    One punctured line through A suffices: the group of center-A
    axis-L collineations acts semiregularly, so full transitivity on
    one line forces it on all of them.  Small orders double-check the
    reduction exhaustively.
    """
    base = _base_line(plane, A, L)
    adm = _admissible(plane, base, A, L)
    B = adm[0]
    fast = all(
        central_collineation(plane, A, L, B, C) is not None for C in adm
    )
    if plane.n <= 4:
        slow = _is_transitive_full(plane, A, L)
        if slow != fast:
            raise InternalContradiction(
                "single-line transitivity reduction disagrees with full scan",
                (A, L),
            )
    return fast


def _is_transitive_full(plane: IncidencePlane, A: int, L: int) -> bool:
    for line in plane.point_lines()[A]:
        if int(line) == L:
            continue
        adm = _admissible(plane, int(line), A, L)
        for B in adm:
            for C in adm:
                if central_collineation(plane, A, L, B, C) is None:
                    return False
    return True


def group_at(plane: IncidencePlane, A: int, L: int) -> dict:
    """All center-A axis-L collineations, with structure flags.

    Returns {"elements", "order", "transitive", "elementary_abelian",
    "cyclic"}.  The group is enumerated from a single base point
    (uniqueness of the map for each image) and its closure is
    verified; a closure failure would be a bug, not bad input.
    """
    from .properties import LoopTable, loop_analysis

    base = _base_line(plane, A, L)
    adm = _admissible(plane, base, A, L)
    B = adm[0]
    elements: List[CollineationMap] = []
    for C in adm:
        g = central_collineation(plane, A, L, B, C)
        if g is not None:
            elements.append(g)
    index = {g.point_perm.tobytes(): i for i, g in enumerate(elements)}
    k = len(elements)
    cayley = np.empty((k, k), dtype=np.int64)
    for i, gi in enumerate(elements):
        for j, gj in enumerate(elements):
            key = gi.point_perm[gj.point_perm].tobytes()
            if key not in index:
                raise InternalContradiction(
                    "collineation group not closed under composition",
                    (A, L, i, j),
                )
            cayley[i, j] = index[key]
    ident = index[np.arange(plane.num_points, dtype=np.int64).tobytes()]
    loop = LoopTable(range(k), ident, cayley)
    flags = loop_analysis(loop)
    return {
        "elements": elements,
        "order": k,
        "transitive": k == len(adm),
        "elementary_abelian": flags["elementary_abelian"],
        "cyclic": flags["cyclic"],
    }


@dataclass(frozen=True)
class TransitivityProfile:
    verified: Tuple[Tuple[int, int], ...]
    refuted: Tuple[Tuple[int, int], ...]
    has_incident_flag: bool
    has_nonincident_flag: bool
    translation_lines: Tuple[int, ...]
    translation_points: Tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {
            "verified": [list(f) for f in self.verified],
            "refuted": [list(f) for f in self.refuted],
            "summary": {
                "has_incident_flag": self.has_incident_flag,
                "has_nonincident_flag": self.has_nonincident_flag,
                "translation_lines": list(self.translation_lines),
                "translation_points": list(self.translation_points),
            },
        }


def default_flag_sample(plane: IncidencePlane, exhaustive: bool = False):
    """Deterministic flag set: everything for small planes or on demand,
    else all incident flags plus a fixed band of non-incident ones."""
    N = plane.num_points
    L = plane.num_lines
    if exhaustive or plane.n <= 5:
        return [(p, l) for p in range(N) for l in range(L)]
    inc = plane.incidence()
    flags = [(int(p), int(l)) for l in range(L) for p in plane.lines[l]]
    for p in range(N):
        for l in range(L):
            if (p < 4 or l < 4) and not inc[l, p]:
                flags.append((p, l))
    return sorted(set(flags))


def transitivity_profile(
    plane: IncidencePlane, flags=None, exhaustive: bool = False
) -> TransitivityProfile:
    """Check (A,L)-transitivity across a flag set and summarize.

    Translation lines/points are reported only when every incident
    flag for the candidate was checked and verified.
    """
    if flags is None:
        flags = default_flag_sample(plane, exhaustive)
    flags = sorted(set((int(p), int(l)) for p, l in flags))
    verified = []
    refuted = []
    for p, l in flags:
        (verified if is_transitive(plane, p, l) else refuted).append((p, l))
    vset = set(verified)
    inc = plane.incidence()
    t_lines = [
        l
        for l in range(plane.num_lines)
        if all((int(p), l) in vset for p in plane.lines[l])
    ]
    t_points = [
        p
        for p in range(plane.num_points)
        if all((p, int(l)) in vset for l in plane.point_lines()[p])
    ]
    return TransitivityProfile(
        tuple(verified),
        tuple(refuted),
        any(inc[l, p] for p, l in verified),
        any(not inc[l, p] for p, l in verified),
        tuple(t_lines),
        tuple(t_points),
    )
