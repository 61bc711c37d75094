"""Exact arithmetic in GF(p^e) with a fixed integer encoding of elements.

An element is an integer in range(p**e).  Its base-p digits, least
significant first, are the coefficients of a polynomial in the canonical
root: value sum(c_i * p**i) stands for sum(c_i * X**i) modulo the
canonical irreducible.  For e == 1 this degenerates to integers mod p.

The canonical irreducible of degree e is the monic irreducible whose
coefficient tuple (c_{e-1}, ..., c_1, c_0), highest degree first and the
constant term last, is lexicographically least.  That pins down one
polynomial per (p, e), so element encodings are reproducible across runs
and machines.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DegreeOutOfRange, DivisionByZero, NotPrime

ORDER_CAP = 1 << 16

# Largest q for which dense q-by-q numpy op tables are built on demand.
_TABLE_CAP = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# -- dense polynomial helpers over Z/p, coefficients low degree first --


def _poly_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul_mod_p(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_rem(num, den, p):
    """Remainder of num by monic den, both low-first coefficient lists."""
    num = list(num)
    _poly_trim(num)
    d = len(den) - 1
    assert den[-1] == 1
    while len(num) - 1 >= d and num:
        shift = len(num) - 1 - d
        lead = num[-1]
        for i, c in enumerate(den):
            num[shift + i] = (num[shift + i] - lead * c) % p
        _poly_trim(num)
    return num


def _is_irreducible(poly, p):
    """Trial division by every monic polynomial of degree <= deg/2."""
    e = len(poly) - 1
    if e == 1:
        return True
    if poly[0] == 0:
        return False
    for d in range(1, e // 2 + 1):
        for k in range(p**d):
            div = []
            kk = k
            for _ in range(d):
                div.append(kk % p)
                kk //= p
            div.append(1)
            if not _poly_rem(poly, div, p):
                return False
    return True


@lru_cache(maxsize=None)
def canonical_irreducible(p: int, e: int) -> tuple:
    """Coefficients (low degree first, monic) of the canonical irreducible.

    Scans candidates in lex order on (c_{e-1}, ..., c_0) and returns the
    first irreducible one.  For e == 1 the polynomial is X itself.
    """
    if e == 1:
        return (0, 1)
    for k in range(p**e):
        # digit i of k (least significant first) is c_i, so numeric order
        # of k is lex order on (c_{e-1}, ..., c_0)
        digits = []
        kk = k
        for _ in range(e):
            digits.append(kk % p)
            kk //= p
        coeffs = digits + [1]
        if _is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise AssertionError("no irreducible found; unreachable for prime p")


class FiniteField:
    """GF(p**e) with integer-coded elements; construct via make_field."""

    def __init__(self, p: int, e: int):
        self.p = p
        self.e = e
        self.q = p**e
        self.irreducible = canonical_irreducible(p, e)
        # X**e .. X**(2e-2) reduced mod the irreducible, as digit tuples
        self._xpow = []
        if e > 1:
            cur = [(-c) % p for c in self.irreducible[:e]]
            self._xpow.append(tuple(cur))
            for _ in range(e - 2):
                nxt = [0] + cur[:]
                if len(nxt) > e:
                    lead = nxt.pop()
                    red = self._xpow[0]
                    nxt = [(ci + lead * ri) % p for ci, ri in zip(nxt, red)]
                cur = nxt
                self._xpow.append(tuple(cur))
        self._add_table = None
        self._mul_table = None

    # -- encoding helpers --

    def digits(self, a: int) -> list:
        out = []
        for _ in range(self.e):
            out.append(a % self.p)
            a //= self.p
        return out

    def undigits(self, ds) -> int:
        v = 0
        for d in reversed(list(ds)):
            v = v * self.p + d
        return v

    def elements(self):
        return range(self.q)

    # -- arithmetic --

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        p = self.p
        v, scale = 0, 1
        for _ in range(self.e):
            v += ((a + b) % p) * scale
            # digitwise, no carry: consume one base-p digit per pass
            a //= p
            b //= p
            scale *= p
        return v

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        p = self.p
        v, scale = 0, 1
        for _ in range(self.e):
            v += ((-a) % p) * scale
            a //= p
            scale *= p
        return v

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a * b) % self.p
        p, e = self.p, self.e
        da, db = self.digits(a), self.digits(b)
        conv = [0] * (2 * e - 1)
        for i, ai in enumerate(da):
            if ai == 0:
                continue
            for j, bj in enumerate(db):
                conv[i + j] = (conv[i + j] + ai * bj) % p
        out = conv[:e]
        for k in range(e, 2 * e - 1):
            ck = conv[k]
            if ck == 0:
                continue
            red = self._xpow[k - e]
            out = [(oi + ck * ri) % p for oi, ri in zip(out, red)]
        return self.undigits(out)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("no inverse of 0")
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if a == 0:
            if k == 0:
                return 1
            if k < 0:
                raise DivisionByZero("0 to a negative power")
            return 0
        k %= self.q - 1
        r = 1
        base = a
        while k:
            if k & 1:
                r = self.mul(r, base)
            base = self.mul(base, base)
            k >>= 1
        return r

    # -- dense tables (lazy) --

    def add_table(self) -> np.ndarray:
        if self._add_table is None:
            assert self.q <= _TABLE_CAP
            t = np.empty((self.q, self.q), dtype=np.int64)
            for a in range(self.q):
                for b in range(a, self.q):
                    t[a, b] = t[b, a] = self.add(a, b)
            t.setflags(write=False)
            self._add_table = t
        return self._add_table

    def mul_table(self) -> np.ndarray:
        if self._mul_table is None:
            assert self.q <= _TABLE_CAP
            t = np.zeros((self.q, self.q), dtype=np.int64)
            for a in range(1, self.q):
                for b in range(a, self.q):
                    t[a, b] = t[b, a] = self.mul(a, b)
            t.setflags(write=False)
            self._mul_table = t
        return self._mul_table

    # -- structure --

    def multiplicative_order(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("0 has no multiplicative order")
        k, x = 1, a
        while x != 1:
            x = self.mul(x, a)
            k += 1
        return k

    def least_primitive_element(self) -> int:
        for a in range(1, self.q):
            if self.multiplicative_order(a) == self.q - 1:
                return a
        raise AssertionError("unreachable: F_q* is cyclic")

    def subfield_elements(self, d: int) -> list:
        """Elements of the subfield of order p**d (requires d | e)."""
        assert self.e % d == 0
        pd = self.p**d
        return [x for x in range(self.q) if self.pow(x, pd) == x]

    def __eq__(self, other):
        return (
            isinstance(other, FiniteField)
            and (self.p, self.e, self.irreducible)
            == (other.p, other.e, other.irreducible)
        )

    def __hash__(self):
        return hash((self.p, self.e, self.irreducible))

    def __repr__(self):
        return f"FiniteField(p={self.p}, e={self.e})"


@lru_cache(maxsize=None)
def make_field(p: int, e: int) -> FiniteField:
    if not is_prime(p):
        raise NotPrime(p)
    if e < 1:
        raise DegreeOutOfRange(f"extension degree {e} < 1")
    if p**e > ORDER_CAP:
        raise DegreeOutOfRange(f"order {p}**{e} exceeds cap {ORDER_CAP}")
    return FiniteField(p, e)


def arith(field: FiniteField, op: str, a: int, b: int | None = None) -> int:
    """Single-op dispatcher used by the CLI."""
    unary = {"neg": field.neg, "inv": field.inv}
    binary = {
        "add": field.add,
        "sub": field.sub,
        "mul": field.mul,
        "div": field.div,
        "pow": lambda x, k: field.pow(x, k),
    }
    if op in unary:
        if b is not None:
            raise ValueError(f"{op} takes one operand")
        return unary[op](a)
    if op in binary:
        if b is None:
            raise ValueError(f"{op} takes two operands")
        return binary[op](a, b)
    raise ValueError(f"unknown op {op!r}")


class QuadraticExtension:
    """GF(q**2) modelled as pairs over a base field.

    The defining polynomial X**2 + c1*X + c0 is the lex-least (c1, c0)
    with no root in the base field.  An element y + B*z (B the class of X)
    is encoded as the integer y + q*z, so range(q**2) enumerates the
    extension and the base field embeds as the first q values.
    """

    def __init__(self, base: FiniteField):
        self.base = base
        q = base.q
        found = None
        for c1 in range(q):
            for c0 in range(q):
                ok = True
                for x in range(q):
                    # test x**2 + c1*x + c0 == 0
                    v = base.add(base.add(base.mul(x, x), base.mul(c1, x)), c0)
                    if v == 0:
                        ok = False
                        break
                if ok:
                    found = (c1, c0)
                    break
            if found:
                break
        assert found is not None
        self.c1, self.c0 = found
        self.q = q * q

    def encode(self, y: int, z: int) -> int:
        return y + self.base.q * z

    def decode(self, a: int) -> tuple:
        return a % self.base.q, a // self.base.q

    def add(self, a: int, b: int) -> int:
        ay, az = self.decode(a)
        by, bz = self.decode(b)
        f = self.base
        return self.encode(f.add(ay, by), f.add(az, bz))

    def mul(self, a: int, b: int) -> int:
        # (ay + B az)(by + B bz) with B**2 = -c1*B - c0
        ay, az = self.decode(a)
        by, bz = self.decode(b)
        f = self.base
        zz = f.mul(az, bz)
        y = f.sub(f.mul(ay, by), f.mul(self.c0, zz))
        z = f.sub(
            f.add(f.mul(ay, bz), f.mul(az, by)),
            f.mul(self.c1, zz),
        )
        return self.encode(y, z)
