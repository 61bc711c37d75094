"""Structure of ternary polynomials: decomposition, fibers, forms.

A reduced trivariate polynomial that behaves like a planar ternary
operation splits as Z + XYZ*M1(X,Y,Z) + M2(X,Y).  Everything in this
module works on that split: fiber counting, slice bijectivity, degree
and coefficient-sum facts, the linearity identity, permutation
behavior over the quadratic extension, complete mappings, and the
structural form flags.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from .errors import (
    ArityMismatch,
    AssumptionsUnmet,
    InternalContradiction,
    NotPropertyAForm,
    NotPTR,
    NotTwoToOne,
)
from .fields import FiniteField, QuadraticExtension, make_field
from .planes import TernaryTable, _prime_power
from .polynomials import ReducedPoly, interpolate
from .properties import check_ptr_properties, is_linear


def _field_sum(field: FiniteField, values) -> int:
    acc = 0
    for v in values:
        acc = field.add(acc, int(v))
    return acc


def _neg_vector(field: FiniteField) -> np.ndarray:
    return np.array([field.neg(x) for x in range(field.q)], dtype=np.int64)


class Decomposition:
    """T split as Z + XYZ*M1 + M2 with disjoint monomial supports.

    M1 carries the b coefficients (arity 3, exponents at most q-2 per
    variable so the XYZ shift stays reduced); M2 carries the c
    coefficients (arity 2, both exponents at least 1).
    """

    __slots__ = ("field", "m1", "m2", "_cube")

    def __init__(self, field: FiniteField, m1: ReducedPoly, m2: ReducedPoly):
        q = field.q
        if m1.arity != 3 or m2.arity != 2:
            raise ArityMismatch("decomposition needs arity-3 M1 and arity-2 M2")
        if m1.field != field or m2.field != field:
            raise ValueError("component fields disagree")
        for exps, _ in m1.monomials():
            if max(exps) > q - 2:
                raise NotPropertyAForm(
                    exps, "M1 exponent too large for the XYZ shift"
                )
        for exps, _ in m2.monomials():
            if min(exps) < 1:
                raise NotPropertyAForm(
                    exps, "M2 monomials must involve both variables"
                )
        self.field = field
        self.m1 = m1
        self.m2 = m2
        self._cube = None

    @classmethod
    def from_parts(cls, field, m1, m2) -> "Decomposition":
        """Build directly from candidate M1/M2; validates the shape."""
        return cls(field, m1, m2)

    def recompose(self) -> ReducedPoly:
        coeffs = {(0, 0, 1): 1}
        for (i, j, k), c in self.m1.monomials():
            coeffs[(i + 1, j + 1, k + 1)] = c
        for (i, j), c in self.m2.monomials():
            coeffs[(i, j, 0)] = c
        return ReducedPoly(self.field, 3, coeffs)

    def value_cube(self) -> np.ndarray:
        """Value table of the recomposed operation, axes (X, Y, Z)."""
        if self._cube is None:
            f = self.field
            q = f.q
            add = f.add_table()
            mul = f.mul_table()
            z = np.arange(q, dtype=np.int64)
            xy = mul  # xy[x, y]
            xyz = mul[xy[:, :, None], z[None, None, :]]
            t1 = mul[xyz, self.m1.value_table()]
            cube = add[z[None, None, :], add[t1, self.m2.value_table()[:, :, None]]]
            self._cube = cube
            self._cube.flags.writeable = False
        return self._cube

    def c_matrix(self) -> np.ndarray:
        q = self.field.q
        out = np.zeros((q, q), dtype=np.int64)
        for (i, j), c in self.m2.monomials():
            out[i, j] = c
        return out

    def b_cube(self) -> np.ndarray:
        q = self.field.q
        out = np.zeros((q, q, q), dtype=np.int64)
        for (i, j, k), c in self.m1.monomials():
            out[i, j, k] = c
        return out


def decompose(tpoly: ReducedPoly) -> Decomposition:
    """Split a reduced trivariate polynomial along the property-A shape.

    Fails unless the lone Z monomial has coefficient 1 and every other
    monomial involves both X and Y.
    """
    if tpoly.arity != 3:
        raise ArityMismatch(f"expected arity 3, got {tpoly.arity}")
    field = tpoly.field
    m1: Dict[tuple, int] = {}
    m2: Dict[tuple, int] = {}
    seen_z = False
    for (i, j, k), c in tpoly.monomials():
        if (i, j, k) == (0, 0, 1):
            if c != 1:
                raise NotPropertyAForm(
                    (0, 0, 1), f"Z coefficient must be 1, found {c}"
                )
            seen_z = True
            continue
        if i == 0 or j == 0:
            raise NotPropertyAForm((i, j, k))
        if k == 0:
            m2[(i, j)] = c
        else:
            m1[(i - 1, j - 1, k - 1)] = c
    if not seen_z:
        raise NotPropertyAForm((0, 0, 1), "Z coefficient must be 1, found 0")
    return Decomposition(
        field,
        ReducedPoly(field, 3, m1),
        ReducedPoly(field, 2, m2),
    )


# -- fibers ------------------------------------------------------------------


@dataclass(frozen=True)
class FiberProfile:
    counts: Dict[int, int]
    kind: str  # "PP" | "kappa" | "neither"
    k: Optional[int] = None

    @property
    def label(self) -> str:
        if self.kind == "kappa":
            return f"kappa({self.k})"
        return self.kind

    def to_json_dict(self) -> dict:
        return {
            "counts": {str(v): c for v, c in sorted(self.counts.items())},
            "classification": self.label,
        }


def fiber_profile(poly: ReducedPoly, arity: Optional[int] = None) -> FiberProfile:
    """Exact preimage counts of a polynomial map over all of F_q^n."""
    if arity is not None and arity != poly.arity:
        raise ArityMismatch(
            f"polynomial has arity {poly.arity}, caller claimed {arity}"
        )
    n = poly.arity
    if n > 3:
        raise ValueError("exhaustive fiber counting is capped at arity 3")
    q = poly.field.q
    vals = poly.value_table().ravel()
    bc = np.bincount(vals, minlength=q)
    counts = {v: int(bc[v]) for v in range(q)}
    flat = q ** (n - 1)
    if (bc == flat).all():
        return FiberProfile(counts, "PP")
    nz = bc[1:]
    if len(set(int(c) for c in nz)) == 1:
        return FiberProfile(counts, "kappa", int(nz[0]))
    return FiberProfile(counts, "neither")


# -- slice theorems ----------------------------------------------------------


def _as_value_cube(t) -> np.ndarray:
    if isinstance(t, TernaryTable):
        return t.t
    if isinstance(t, ReducedPoly):
        if t.arity != 3:
            raise ArityMismatch(f"expected arity 3, got {t.arity}")
        return t.value_table()
    return np.asarray(t, dtype=np.int64)


def verify_slice_theorems(t, strict: bool = False) -> dict:
    """Exhaustive slice bijectivity and kappa-fiber checks.

    Each sub-check only applies when the table has the properties it
    assumes; inapplicable checks are reported with holds=None, or
    raised as AssumptionsUnmet when strict.  An applicable check that
    fails raises InternalContradiction: for tables with the assumed
    properties the slice facts are forced, so a failure means this
    package (not the input) is wrong.
    """
    cube = _as_value_cube(t)
    q = cube.shape[0]
    rep = check_ptr_properties(cube)
    has = {name: getattr(rep, name) is None for name in "abcde"}

    requirements = {
        "x_slices": has["a"] and has["c"],
        "y_slices": has["a"] and has["e"],
        "z_slices": has["d"],
        "kappa_slices": has["a"] and (has["c"] or has["e"]),
    }
    out: dict = {"order": q}
    rng = np.arange(q, dtype=np.int64)

    for name, applicable in requirements.items():
        entry: dict = {"applicable": bool(applicable), "holds": None, "witness": None}
        if not applicable:
            if strict:
                raise AssumptionsUnmet(name)
            out[name] = entry
            continue
        if name == "x_slices":
            ok = np.array_equal(
                np.sort(cube[:, 1:, :], axis=0),
                np.broadcast_to(rng[:, None, None], (q, q - 1, q)),
            )
            witness = None
            if not ok:
                bad = ~(
                    np.sort(cube[:, 1:, :], axis=0)
                    == rng[:, None, None]
                ).all(axis=0)
                y, z = np.argwhere(bad)[0]
                witness = (int(y) + 1, int(z))
        elif name == "y_slices":
            ok = np.array_equal(
                np.sort(cube[1:, :, :], axis=1),
                np.broadcast_to(rng[None, :, None], (q - 1, q, q)),
            )
            witness = None
            if not ok:
                bad = ~(
                    np.sort(cube[1:, :, :], axis=1)
                    == rng[None, :, None]
                ).all(axis=1)
                x, z = np.argwhere(bad)[0]
                witness = (int(x) + 1, int(z))
        elif name == "z_slices":
            ok = np.array_equal(
                np.sort(cube, axis=2),
                np.broadcast_to(rng[None, None, :], (q, q, q)),
            )
            witness = None
            if not ok:
                bad = ~(np.sort(cube, axis=2) == rng[None, None, :]).all(axis=2)
                x, y = np.argwhere(bad)[0]
                witness = (int(x), int(y))
        else:
            ok = True
            witness = None
            for z in range(q):
                bc = np.bincount(cube[:, :, z].ravel(), minlength=q)
                want = np.full(q, q - 1, dtype=np.int64)
                want[z] = 2 * q - 1
                if not np.array_equal(bc, want):
                    ok = False
                    witness = (z, {int(v): int(c) for v, c in enumerate(bc)})
                    break
        if not ok:
            raise InternalContradiction(
                f"slice fact {name} failed despite its assumed properties",
                witness,
            )
        entry["holds"] = True
        out[name] = entry
    out["all_applicable_hold"] = all(
        out[n]["holds"] for n in requirements if out[n]["applicable"]
    )
    return out


# -- degree and coefficient sums ---------------------------------------------


def degree_and_sum_report(dec: Decomposition) -> dict:
    """Degree bounds and coefficient-sum facts for a decomposition.

    Report-only: every outcome is a field in the result, nothing is
    raised.  The per-variable degree bound is vacuous at q=2 and is
    flagged as skipped there.
    """
    f = dec.field
    q = f.q
    tpoly = dec.recompose()
    report: dict = {"order": q}

    if q == 2:
        report["degree_bound"] = {"skipped": True, "reason": "q=2"}
    else:
        degs = [tpoly.degree_in(v) for v in range(3)]
        report["degree_bound"] = {
            "skipped": False,
            "degrees": degs,
            "bound": q - 2,
            "holds": all(d <= q - 2 for d in degs),
        }
    report["m1_degrees"] = [dec.m1.degree_in(v) for v in range(3)]
    report["m2_degrees"] = [dec.m2.degree_in(v) for v in range(2)]

    C = dec.c_matrix()
    rows_ok = True
    cols_ok = True
    row_sums = {}
    col_sums = {}
    for j in range(1, q):
        target = 1 if j == 1 else 0
        rs = _field_sum(f, C[1:, j])
        cs = _field_sum(f, C[j, 1:])
        row_sums[j] = rs
        col_sums[j] = cs
        rows_ok = rows_ok and rs == target
        cols_ok = cols_ok and cs == target
    report["c_sums"] = {
        "rows": row_sums,
        "columns": col_sums,
        "rows_hold": rows_ok,
        "columns_hold": cols_ok,
    }

    cube = dec.value_cube()
    try:
        linear, _ = is_linear(cube)
    except NotPTR:
        linear = None
    report["linear"] = linear
    if linear:
        B = dec.b_cube()
        ok = True
        witness = None
        for j in range(0, q - 2):
            for k in range(1, q - 2):
                lhs = _field_sum(f, B[:, j, k])
                rhs = _field_sum(f, B[j, :, k])
                if lhs != rhs:
                    ok = False
                    witness = (j, k, lhs, rhs)
                    break
            if not ok:
                break
        report["b_sums"] = {"hold": ok, "witness": witness}
    else:
        report["b_sums"] = {"hold": None, "witness": None}
    return report


# -- linearity identity ------------------------------------------------------


def linearity_identity_check(dec: Decomposition):
    """Decide xy*M1(x,y,z) = M2(x,y)*M1(1,M2(x,y),z) for all x,y and z!=0.

    Returns (bool, witness).  When the recomposed table is a full PTR
    the verdict must agree with the table-level linearity test; a
    disagreement is an internal bug, not a property of the input.
    """
    f = dec.field
    q = f.q
    mul = f.mul_table()
    m1v = dec.m1.value_table()
    m2v = dec.m2.value_table()
    lhs = mul[mul[:, :, None], m1v]  # xy * M1(x,y,z)
    m1_at_1 = m1v[1]
    rhs = mul[m2v[:, :, None], m1_at_1[m2v]]
    agree = lhs[:, :, 1:] == rhs[:, :, 1:]
    holds = bool(agree.all())
    witness = None
    if not holds:
        x, y, z = np.argwhere(~agree)[0]
        witness = (int(x), int(y), int(z) + 1)

    cube = dec.value_cube()
    try:
        table_linear, _ = is_linear(cube)
    except NotPTR:
        table_linear = None
    if table_linear is not None and table_linear != holds:
        raise InternalContradiction(
            "identity and table disagree about linearity",
            {"identity": holds, "table": table_linear, "witness": witness},
        )
    return holds, witness


# -- quadratic extension maps ------------------------------------------------


def s_ab_check(T: TernaryTable, extension: Optional[QuadraticExtension] = None) -> dict:
    """Bijectivity of w = y + beta*z -> T(a,y,z) + beta*T(b,y,z) for a != b.

    Exhaustive over all ordered pairs; diagonal pairs are recorded but
    nothing is claimed about them.
    """
    f = T.field
    q = f.q
    rep = check_ptr_properties(T.t)
    if rep.e is not None:
        raise AssumptionsUnmet("e", f"property (e) fails at {rep.e}")
    if extension is None:
        extension = QuadraticExtension(f)
    if extension.base != f:
        raise ValueError("extension is not built over the table's field")

    cube = T.t
    # encoded image of (y,z) under the pair (a,b): base part + q * beta part
    out = cube[:, None, :, :] + q * cube[None, :, :, :]
    flat = out.reshape(q, q, q * q)
    bij = (np.sort(flat, axis=2) == np.arange(q * q)[None, None, :]).all(axis=2)

    off = ~np.eye(q, dtype=bool)
    if not bij[off].all():
        a, b = np.argwhere(off & ~bij)[0]
        raise InternalContradiction(
            "extension map failed to be a bijection despite property (e)",
            (int(a), int(b)),
        )
    return {
        "extension_order": q * q,
        "pairs_checked": int(q * (q - 1)),
        "all_offdiagonal_bijective": True,
        "diagonal_bijective": [bool(bij[a, a]) for a in range(q)],
    }


# -- complete mappings -------------------------------------------------------


def complete_mapping_check(dec: Decomposition) -> dict:
    """f_a(X) = M2(X,a) - X is a complete mapping for every a outside {0,1}.

    Only meaningful when the additive loop of the recomposed table is
    literal field addition; anything else raises AssumptionsUnmet.
    """
    f = dec.field
    q = f.q
    cube = dec.value_cube()
    if not np.array_equal(cube[1], f.add_table()):
        raise AssumptionsUnmet(
            "additive",
            "the additive loop must equal field addition",
        )
    add = f.add_table()
    neg = _neg_vector(f)
    m2v = dec.m2.value_table()
    rng = np.arange(q, dtype=np.int64)

    def is_perm(v: np.ndarray) -> bool:
        return np.array_equal(np.sort(v), rng)

    per_a = {}
    all_pass = True
    for a in range(2, q):
        col = m2v[:, a]
        f_vals = add[col, neg[rng]]
        ok_f = is_perm(f_vals)
        ok_g = is_perm(col)
        per_a[a] = {"f_pp": ok_f, "f_plus_x_pp": ok_g}
        all_pass = all_pass and ok_f and ok_g
    result = {"all_pass": all_pass, "per_a": per_a}
    if not all_pass and check_ptr_properties(cube).ptr:
        raise InternalContradiction(
            "complete mapping failed for an additive PTR", per_a
        )
    return result


# -- structural form flags ---------------------------------------------------


def form_classify(dec: Decomposition, field: Optional[FiniteField] = None) -> dict:
    """Eight structural flags of the decomposition's coefficient shape.

    These detect necessary coefficient patterns of the various
    transitivity-derived forms; a raised flag never certifies the
    plane-level property by itself.
    """
    f = field if field is not None else dec.field
    if f != dec.field:
        raise ValueError("field does not match the decomposition")
    q, p, e = f.q, f.p, f.e
    p_powers = {p ** i for i in range(e)}

    m1_monos = list(dec.m1.monomials())
    m2_monos = list(dec.m2.monomials())

    basicform = dec.m1.is_zero()
    lbiv = all(exps[0] in p_powers for exps, _ in m2_monos)
    lbivd = all(exps[1] in p_powers for exps, _ in m2_monos)
    lbv = all(
        exps[0] in p_powers and exps[1] in p_powers for exps, _ in m2_monos
    )
    lbi2eq = dec.m2.coefficients == {(1, 1): 1} and all(
        exps[0] == exps[1] for exps, _ in m1_monos
    )
    lbi4form = all(
        exps[0] == exps[1] and exps[2] == q - 2 - exps[0]
        for exps, _ in m1_monos
    )

    m2v = dec.m2.value_table()
    additive_assoc = bool(np.array_equal(m2v[m2v, :], m2v[:, m2v]))
    plus = dec.value_cube()[1]
    multiplicative_assoc = bool(np.array_equal(plus[plus, :], plus[:, plus]))

    return {
        "basicform": bool(basicform),
        "lbiv": bool(lbiv),
        "lbivd": bool(lbivd),
        "lbv": bool(lbv),
        "lbi2eq": bool(lbi2eq),
        "lbi4form": bool(lbi4form),
        "additive_associativity_identity": additive_assoc,
        "multiplicative_associativity_identity": multiplicative_assoc,
    }


# -- kappa from two-to-one maps ----------------------------------------------


@dataclass(frozen=True)
class TwoToOneKappa:
    poly: ReducedPoly
    profile: FiberProfile
    verified: bool
    image_is_shds: bool


def kappa_from_two_to_one(f_table, field: Optional[FiniteField] = None) -> TwoToOneKappa:
    """Interpolate M(X,Y) = f(X) - f(Y) for a two-to-one map f.

    f must fix 0 and hit every image value in F_q^* exactly twice from
    F_q^*.  The expected kappa(q-1) profile is verified and reported,
    not assumed: it can fail for two-to-one maps whose image lacks the
    difference-set structure, so `verified` and the informational
    `image_is_shds` flag travel with the result.
    """
    f_arr = np.asarray(list(f_table), dtype=np.int64)
    q = f_arr.size
    if field is None:
        p, e = _prime_power(q)
        field = make_field(p, e)
    if field.q != q:
        raise ValueError(f"table length {q} does not match field order {field.q}")
    if not ((f_arr >= 0) & (f_arr < q)).all():
        raise ValueError("map values must be field encodings")
    if f_arr[0] != 0:
        raise NotTwoToOne((0, int(f_arr[0])), "f must fix 0")
    bc = np.bincount(f_arr[1:], minlength=q)
    if bc[0] != 0:
        x = int(np.flatnonzero(f_arr[1:] == 0)[0] + 1)
        raise NotTwoToOne((x, 0), "no nonzero point may map to 0")
    for v in range(1, q):
        if bc[v] not in (0, 2):
            raise NotTwoToOne(
                (int(v), int(bc[v])),
                "every attained nonzero value needs exactly 2 preimages",
            )

    neg = _neg_vector(field)
    add = field.add_table()
    table = add[f_arr[:, None], neg[f_arr][None, :]]
    poly = interpolate(field, 2, table)
    profile = fiber_profile(poly)
    verified = profile.kind == "kappa" and profile.k == q - 1

    image = [v for v in range(1, q) if bc[v] == 2]
    diff_counts = np.zeros(q, dtype=np.int64)
    for d1 in image:
        for d2 in image:
            if d1 != d2:
                diff_counts[field.sub(d1, d2)] += 1
    nz = diff_counts[1:]
    image_is_shds = bool(
        diff_counts[0] == 0
        and len(image) == (q - 1) // 2
        and len(set(int(c) for c in nz)) == 1
    )
    return TwoToOneKappa(poly, profile, verified, image_is_shds)
