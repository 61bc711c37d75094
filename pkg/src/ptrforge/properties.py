"""Checks on ternary tables: the five planarity properties, loop
structure of the two derived binary operations, and linearity.

Everything here is exhaustive and exact.  Tables are small (order at
most a few dozen in practice), so the checkers first run a vectorized
all-pass test and only fall back to explicit loops to dig out the
lexicographically least witness when something fails.

A ternary table argument may be a TernaryTable or any array-like of
shape (q,q,q) indexed [m,x,y]; a loop argument is a LoopTable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import IncompleteTable, NotPTR


def _as_cube(t) -> np.ndarray:
    arr = getattr(t, "t", t)
    arr = np.asarray(arr, dtype=np.int64)
    if arr.ndim != 3 or len(set(arr.shape)) != 1:
        raise IncompleteTable(f"expected a cubic table, got shape {arr.shape}")
    q = arr.shape[0]
    if arr.size and (arr.min() < 0 or arr.max() >= q):
        raise IncompleteTable("table values outside 0..q-1")
    return arr


class LoopTable:
    """Binary operation on an explicit carrier of element encodings.

    `table[i, j]` holds the encoding of carrier[i] o carrier[j].  The
    carrier need not be 0..k-1; the multiplicative loop of a PTR lives
    on the nonzero encodings, for instance.
    """

    __slots__ = ("carrier", "identity", "table", "index")

    def __init__(self, carrier, identity: int, table):
        self.carrier = tuple(int(x) for x in carrier)
        self.identity = int(identity)
        self.index = {x: i for i, x in enumerate(self.carrier)}
        if len(self.index) != len(self.carrier):
            raise IncompleteTable("carrier contains repeats")
        if self.identity not in self.index:
            raise IncompleteTable("identity not in carrier")
        tab = np.asarray(table, dtype=np.int64)
        k = len(self.carrier)
        if tab.shape != (k, k):
            raise IncompleteTable(
                f"table shape {tab.shape} does not match carrier size {k}"
            )
        members = np.isin(tab, np.asarray(self.carrier, dtype=np.int64))
        if not members.all():
            bad = tuple(int(v) for v in np.argwhere(~members)[0])
            raise IncompleteTable(f"table value at {bad} is outside the carrier")
        tab.flags.writeable = False
        self.table = tab

    @classmethod
    def from_function(cls, carrier, identity, fn):
        carrier = tuple(int(x) for x in carrier)
        k = len(carrier)
        tab = np.empty((k, k), dtype=np.int64)
        for i, a in enumerate(carrier):
            for j, b in enumerate(carrier):
                tab[i, j] = fn(a, b)
        return cls(carrier, identity, tab)

    def op(self, a: int, b: int) -> int:
        return int(self.table[self.index[int(a)], self.index[int(b)]])

    def position_table(self) -> np.ndarray:
        """Table rewritten with carrier positions instead of encodings."""
        lookup = np.full(max(self.carrier) + 1, -1, dtype=np.int64)
        for i, x in enumerate(self.carrier):
            lookup[x] = i
        return lookup[self.table]

    def __len__(self):
        return len(self.carrier)

    def __repr__(self):
        return (
            f"LoopTable(size {len(self.carrier)}, identity {self.identity})"
        )


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of the five-property check.

    Each of a..e is None when the property holds, else the least
    witness: for (a) and (b) the violating input triple (m,x,y); for
    (c) and (e) the tuple (a,b,c,d) whose solution count is not one;
    for (d) the tuple (a,b,c) where c is unattained by z -> T(a,b,z).
    """

    a: Optional[Tuple[int, ...]]
    b: Optional[Tuple[int, ...]]
    c: Optional[Tuple[int, ...]]
    d: Optional[Tuple[int, ...]]
    e: Optional[Tuple[int, ...]]

    @property
    def weak_ptr(self) -> bool:
        return self.c is None and self.d is None and self.e is None

    @property
    def ptr(self) -> bool:
        return self.weak_ptr and self.a is None and self.b is None

    def to_json_dict(self) -> dict:
        out = {}
        for name in ("a", "b", "c", "d", "e"):
            w = getattr(self, name)
            out[name] = (
                {"holds": True}
                if w is None
                else {"holds": False, "witness": list(w)}
            )
        out["weak_ptr"] = self.weak_ptr
        out["ptr"] = self.ptr
        return out


def _witness_a(T: np.ndarray, q: int):
    for a in range(q):
        for z in range(q):
            if T[a, 0, z] != z:
                return (a, 0, z)
    for b in range(q):
        for z in range(q):
            if T[0, b, z] != z:
                return (0, b, z)
    return None


def _witness_b(T: np.ndarray, q: int):
    for x in range(q):
        if T[x, 1, 0] != x:
            return (x, 1, 0)
    for y in range(q):
        if T[1, y, 0] != y:
            return (1, y, 0)
    return None


def _witness_c(T: np.ndarray, q: int):
    for a in range(q):
        for b in range(q):
            for c in range(q):
                if c == a:
                    continue
                for d in range(q):
                    hits = sum(
                        1 for x in range(q) if T[x, a, b] == T[x, c, d]
                    )
                    if hits != 1:
                        return (a, b, c, d)
    return None


def _witness_d(T: np.ndarray, q: int):
    for a in range(q):
        for b in range(q):
            seen = set(int(v) for v in T[a, b, :])
            if len(seen) != q:
                c = min(v for v in range(q) if v not in seen)
                return (a, b, c)
    return None


def _witness_e(T: np.ndarray, q: int):
    for a in range(q):
        for b in range(q):
            for c in range(q):
                if c == a:
                    continue
                for d in range(q):
                    hits = 0
                    for y in range(q):
                        for z in range(q):
                            if T[a, y, z] == b and T[c, y, z] == d:
                                hits += 1
                    if hits != 1:
                        return (a, b, c, d)
    return None


def check_ptr_properties(t) -> PropertyReport:
    """Decide the five planarity properties of a ternary table."""
    T = _as_cube(t)
    q = T.shape[0]
    r = np.arange(q)

    wa = None
    if not (np.array_equal(T[:, 0, :], np.broadcast_to(r, (q, q)))
            and np.array_equal(T[0, :, :], np.broadcast_to(r, (q, q)))):
        wa = _witness_a(T, q)
    wb = None
    if q > 1 and not (
        np.array_equal(T[:, 1, 0], r) and np.array_equal(T[1, :, 0], r)
    ):
        wb = _witness_b(T, q)

    # unique x with T(x,a,b)=T(x,c,d), for every a != c and all b,d
    wc = None
    for a in range(q):
        Ma = T[:, a, :]
        for c in range(q):
            if c == a:
                continue
            counts = (Ma[:, :, None] == T[:, c, None, :]).sum(axis=0)
            if not (counts == 1).all():
                wc = _witness_c(T, q)
                break
        if wc is not None:
            break

    wd = None
    if not np.array_equal(np.sort(T, axis=2), np.broadcast_to(r, (q, q, q))):
        wd = _witness_d(T, q)

    # unique (y,z) with T(a,y,z)=b and T(c,y,z)=d, for every a != c
    we = None
    for a in range(q):
        for c in range(q):
            if c == a:
                continue
            combined = (T[a] * q + T[c]).ravel()
            if not (np.bincount(combined, minlength=q * q) == 1).all():
                we = _witness_e(T, q)
                break
        if we is not None:
            break

    return PropertyReport(a=wa, b=wb, c=wc, d=wd, e=we)


def loop_analysis(L: LoopTable) -> dict:
    """Exhaustive structural flags for a binary-operation table."""
    k = len(L.carrier)
    pos = L.position_table()
    ident = L.index[L.identity]
    carrier_arr = np.asarray(L.carrier, dtype=np.int64)

    identity_ok = np.array_equal(L.table[ident], carrier_arr) and np.array_equal(
        L.table[:, ident], carrier_arr
    )
    rows_latin = all(len(set(row)) == k for row in pos)
    cols_latin = all(len(set(col)) == k for col in pos.T)
    is_loop = bool(identity_ok and rows_latin and cols_latin)

    associative = bool(np.array_equal(pos[pos, :], pos[:, pos]))
    commutative = bool(np.array_equal(pos, pos.T))
    is_group = is_loop and associative

    def order_of(i: int) -> int:
        j = i
        n = 1
        while j != ident:
            j = int(pos[j, i])
            n += 1
            if n > k:
                raise AssertionError("order computation diverged")
        return n

    elementary_abelian = False
    cyclic = False
    if is_group:
        orders = [order_of(i) for i in range(k)]
        cyclic = max(orders) == k
        p = _least_prime_factor(k) if k > 1 else 0
        if k == 1:
            elementary_abelian = True
        elif _is_prime_power(k, p):
            elementary_abelian = commutative and all(
                o == p for i, o in enumerate(orders) if i != ident
            )

    involutions = [
        int(L.carrier[i])
        for i in range(k)
        if i != ident and pos[i, i] == ident
    ]
    return {
        "is_loop": is_loop,
        "associative": associative,
        "commutative": commutative,
        "elementary_abelian": elementary_abelian,
        "cyclic": cyclic,
        "involutions": involutions,
    }


def _least_prime_factor(k: int) -> int:
    d = 2
    while d * d <= k:
        if k % d == 0:
            return d
        d += 1
    return k


def _is_prime_power(k: int, p: int) -> bool:
    while k % p == 0:
        k //= p
    return k == 1


def is_linear(t) -> Tuple[bool, Optional[Tuple[int, int, int]]]:
    """Does T(m,x,y) = (m . x) + y for T's own derived loops?

    Requires all five planarity properties first; NotPTR otherwise.
    """
    T = _as_cube(t)
    q = T.shape[0]
    report = check_ptr_properties(T)
    if not report.ptr:
        for name in ("a", "b", "c", "d", "e"):
            w = getattr(report, name)
            if w is not None:
                raise NotPTR(name, w)
    plus = T[1, :, :]
    times = T[:, :, 0]
    recomposed = plus[times, :]
    if np.array_equal(recomposed, T):
        return True, None
    bad = np.argwhere(recomposed != T)[0]
    return False, tuple(int(v) for v in bad)
