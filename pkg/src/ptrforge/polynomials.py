"""Reduced multivariate polynomials over small finite fields.

A polynomial in n variables is *reduced* when the exponent of every
variable is below q, the field order.  Because x^q = x for all x in
F_q, every function F_q^n -> F_q is the evaluation of exactly one
reduced polynomial, so interpolation here is an exact inverse of
evaluation, with no numerics involved.

Interpolation uses the indicator identity

    1_{x=a}(X) = 1 - (X - a)^(q-1)

expanded per variable into a dense coefficient vector, then the target
table is accumulated as a sum of scaled outer products of indicator
vectors.  Cost grows like q^(2n); fine for the small orders this
package works with.
"""

from __future__ import annotations

import numpy as np

from .errors import ArityMismatch, IncompleteTable
from .fields import FiniteField


class ReducedPoly:
    """Sparse reduced polynomial: exponent tuple -> nonzero coefficient.

    Instances are immutable by convention; mutate nothing after
    construction.  Iteration over monomials is lexicographic on the
    exponent tuples so printed forms are canonical.
    """

    __slots__ = ("field", "arity", "coefficients", "_values")

    def __init__(self, field: FiniteField, arity: int, coefficients):
        if arity < 1:
            raise ArityMismatch(f"arity must be positive, got {arity}")
        q = field.q
        clean = {}
        for exps, c in dict(coefficients).items():
            exps = tuple(int(e) for e in exps)
            c = int(c)
            if len(exps) != arity:
                raise ArityMismatch(
                    f"exponent tuple {exps} does not have arity {arity}"
                )
            if any(e < 0 or e >= q for e in exps):
                raise ValueError(f"exponent tuple {exps} not reduced for q={q}")
            if c < 0 or c >= q:
                raise ValueError(f"coefficient {c} is not an element of F_{q}")
            if c != 0:
                clean[exps] = c
        self.field = field
        self.arity = arity
        self.coefficients = clean
        self._values = None

    # -- basic queries -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coefficients

    def monomials(self):
        """Yield (exponents, coefficient) pairs in lexicographic order."""
        return iter(sorted(self.coefficients.items()))

    def degree_in(self, var: int) -> int:
        """Largest exponent of variable `var`; -1 for the zero polynomial."""
        if not self.coefficients:
            return -1
        return max(exps[var] for exps in self.coefficients)

    def __eq__(self, other):
        if not isinstance(other, ReducedPoly):
            return NotImplemented
        return (
            self.field == other.field
            and self.arity == other.arity
            and self.coefficients == other.coefficients
        )

    def __hash__(self):
        return hash(
            (self.field, self.arity, tuple(sorted(self.coefficients.items())))
        )

    def __repr__(self):
        if not self.coefficients:
            return f"ReducedPoly(0 over F_{self.field.q}, arity {self.arity})"
        parts = []
        for exps, c in self.monomials():
            vars_part = "".join(
                f"X{k}^{e}" if e > 1 else (f"X{k}" if e == 1 else "")
                for k, e in enumerate(exps)
            )
            parts.append(f"{c}{vars_part}" if vars_part else f"{c}")
        return f"ReducedPoly({' + '.join(parts)} over F_{self.field.q})"

    # -- evaluation ----------------------------------------------------

    def value_table(self) -> np.ndarray:
        """Dense evaluation over all of F_q^arity, cached and read-only.

        Shape (q,)*arity, axis k indexed by the encoding of variable k.
        """
        if self._values is None:
            self._values = _evaluate_all(self)
        return self._values


def evaluate(poly: ReducedPoly, point) -> int:
    """Evaluate at one point given as a tuple of element encodings."""
    point = tuple(int(x) for x in point)
    if len(point) != poly.arity:
        raise ArityMismatch(
            f"point of length {len(point)} for arity {poly.arity}"
        )
    f = poly.field
    total = 0
    for exps, c in poly.coefficients.items():
        term = c
        for x, e in zip(point, exps):
            if e:
                term = f.mul(term, f.pow(x, e))
        total = f.add(total, term)
    return total


def _pow_table(f: FiniteField) -> np.ndarray:
    # pow_table[a, k] = a^k with 0^0 = 1, exponents 0..q-1
    q = f.q
    t = np.ones((q, q), dtype=np.int64)
    for k in range(1, q):
        for a in range(q):
            t[a, k] = f.mul(int(t[a, k - 1]), a)
    t.flags.writeable = False
    return t


_POW_CACHE: dict = {}


def power_table(f: FiniteField) -> np.ndarray:
    tab = _POW_CACHE.get(f)
    if tab is None:
        tab = _POW_CACHE[f] = _pow_table(f)
    return tab


def _evaluate_all(poly: ReducedPoly) -> np.ndarray:
    f = poly.field
    q = f.q
    n = poly.arity
    mul = f.mul_table()
    add = f.add_table()
    pows = power_table(f)
    grids = np.indices((q,) * n)
    out = np.zeros((q,) * n, dtype=np.int64)
    for exps, c in poly.coefficients.items():
        term = np.full((q,) * n, c, dtype=np.int64)
        for k, e in enumerate(exps):
            if e:
                term = mul[term, pows[grids[k], e]]
        out = add[out, term]
    out.flags.writeable = False
    return out


def _indicator_matrix(f: FiniteField) -> np.ndarray:
    """Row a = dense coefficients (degree 0..q-1) of 1 - (X-a)^(q-1)."""
    q = f.q
    rows = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        # expand (X - a)^(q-1) by repeated multiplication
        vec = [0] * q
        vec[0] = 1
        na = f.neg(a)
        # degree grows by one per step, ending at exactly q-1
        for _ in range(q - 1):
            nxt = [0] * q
            for d, cd in enumerate(vec):
                if cd == 0:
                    continue
                nxt[d + 1] = f.add(nxt[d + 1], cd)
                nxt[d] = f.add(nxt[d], f.mul(cd, na))
            vec = nxt
        ind = [f.neg(c) for c in vec]
        ind[0] = f.add(ind[0], 1)
        rows[a] = ind
    rows.flags.writeable = False
    return rows


_IND_CACHE: dict = {}


def indicator_matrix(f: FiniteField) -> np.ndarray:
    tab = _IND_CACHE.get(f)
    if tab is None:
        tab = _IND_CACHE[f] = _indicator_matrix(f)
    return tab


def interpolate(field: FiniteField, arity: int, table) -> ReducedPoly:
    """Unique reduced polynomial matching `table` on all of F_q^arity.

    `table` may be an ndarray of shape (q,)*arity, a flat sequence of
    length q^arity in odometer order (first variable most significant),
    or a dict keyed by full coordinate tuples.
    """
    q = field.q
    if arity < 1:
        raise ArityMismatch(f"arity must be positive, got {arity}")
    if isinstance(table, dict):
        if len(table) != q**arity:
            raise IncompleteTable(
                f"expected {q**arity} entries, got {len(table)}"
            )
        arr = np.zeros((q,) * arity, dtype=np.int64)
        seen = 0
        for key, v in table.items():
            key = tuple(int(x) for x in key)
            if len(key) != arity or any(x < 0 or x >= q for x in key):
                raise IncompleteTable(f"bad table key {key}")
            arr[key] = v
            seen += 1
        if seen != q**arity:
            raise IncompleteTable("duplicate keys collapse below full size")
    else:
        arr = np.asarray(table, dtype=np.int64)
        if arr.size != q**arity:
            raise IncompleteTable(
                f"expected {q**arity} values, got {arr.size}"
            )
        arr = arr.reshape((q,) * arity)
    if arr.min() < 0 or arr.max() >= q:
        raise IncompleteTable("table values outside the field encoding range")

    mul = field.mul_table()
    add = field.add_table()
    ind = indicator_matrix(field)
    coeffs = np.zeros((q,) * arity, dtype=np.int64)
    for key in np.ndindex(*arr.shape):
        v = int(arr[key])
        if v == 0:
            continue
        term = np.full((), v, dtype=np.int64)
        for a in key:
            term = mul[term[..., None], ind[a][(None,) * term.ndim]]
        coeffs = add[coeffs, term]
    out = {}
    for key in zip(*np.nonzero(coeffs)):
        out[tuple(int(i) for i in key)] = int(coeffs[key])
    return ReducedPoly(field, arity, out)


# -- text format -----------------------------------------------------------


def poly_to_text(poly: ReducedPoly) -> str:
    f = poly.field
    lines = [f"poly q={f.q} p={f.p} e={f.e} n={poly.arity}"]
    for exps, c in poly.monomials():
        lines.append(" ".join(str(e) for e in exps) + f" {c}")
    return "\n".join(lines) + "\n"


def poly_from_text(text: str) -> ReducedPoly:
    from .fields import make_field

    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("poly "):
        raise IncompleteTable("missing 'poly' header")
    header = dict(
        kv.split("=", 1) for kv in lines[0].split()[1:] if "=" in kv
    )
    try:
        q, p, e, n = (int(header[k]) for k in ("q", "p", "e", "n"))
    except KeyError as missing:
        raise IncompleteTable(f"header lacks {missing}") from None
    if p**e != q:
        raise IncompleteTable(f"header inconsistent: {p}^{e} != {q}")
    field = make_field(p, e)
    coeffs = {}
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != n + 1:
            raise IncompleteTable(f"bad monomial line: {ln!r}")
        exps = tuple(int(x) for x in parts[:n])
        coeffs[exps] = int(parts[n])
    return ReducedPoly(field, n, coeffs)
