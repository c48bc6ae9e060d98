"""Arithmetic in GF(p^m) for small m.

Elements are plain ints in ``range(q)``: the polynomial
c_0 + c_1 x + ... + c_{m-1} x^{m-1} is encoded as sum(c_t * p**t).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import MeanKingError, UnsupportedError

MAX_DEGREE = 4


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, m) with q == p**m, or None."""
    if q < 2:
        return None
    p = 2
    while q % p:
        p += 1
    m = 0
    while q % p == 0:
        q //= p
        m += 1
    return (p, m) if q == 1 else None


# polynomials over GF(p) as coefficient tuples, low degree first, no trailing zeros

def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mod(a, b, p):
    a = _trim(a)
    b = _trim(b)
    inv_lead = pow(b[-1], -1, p)
    while len(a) >= len(b):
        f = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for t, bt in enumerate(b):
            a[shift + t] = (a[shift + t] - f * bt) % p
        a = _trim(a)
    return a


def _monic_polys(degree, p):
    for low in itertools.product(range(p), repeat=degree):
        yield list(reversed(low)) + [1]


def is_irreducible(poly, p: int) -> bool:
    """Brute-force factor search over monic divisors of degree <= deg/2."""
    poly = _trim(poly)
    deg = len(poly) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for fdeg in range(1, deg // 2 + 1):
        for f in _monic_polys(fdeg, p):
            if not _poly_mod(poly, f, p):
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    p: int
    m: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p ** self.m

    def coeffs(self, a: int) -> list[int]:
        self._check(a)
        out = []
        for _ in range(self.m):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def encode(self, coeffs) -> int:
        return sum(int(c) % self.p * self.p ** t for t, c in enumerate(coeffs))

    def _check(self, a):
        if not 0 <= a < self.q:
            raise MeanKingError(f"{a} is not an element of GF({self.q})")

    @cached_property
    def add_table(self) -> np.ndarray:
        return np.array([[f_add(self, a, b) for b in range(self.q)] for a in range(self.q)])

    @cached_property
    def mul_table(self) -> np.ndarray:
        return np.array([[f_mul(self, a, b) for b in range(self.q)] for a in range(self.q)])

    @cached_property
    def trace_table(self) -> np.ndarray:
        return np.array([f_trace(self, a) for a in range(self.q)])


def field_make(p: int, m: int = 1) -> FieldSpec:
    """GF(p^m) with the monic irreducible modulus of smallest encoding."""
    if not is_prime(p):
        raise MeanKingError(f"{p} is not prime")
    if not 1 <= m <= MAX_DEGREE:
        raise UnsupportedError(f"extension degree must be in 1..{MAX_DEGREE}, got {m}")
    if m == 1:
        return FieldSpec(p, 1, (0, 1))
    for code in range(p ** m):
        low = [(code // p ** t) % p for t in range(m)]
        if is_irreducible(low + [1], p):
            return FieldSpec(p, m, tuple(low + [1]))
    raise AssertionError("no irreducible polynomial found")  # unreachable: one exists for every degree


def f_add(F: FieldSpec, a: int, b: int) -> int:
    return F.encode(x + y for x, y in zip(F.coeffs(a), F.coeffs(b)))


def f_neg(F: FieldSpec, a: int) -> int:
    return F.encode(-x for x in F.coeffs(a))


def f_mul(F: FieldSpec, a: int, b: int) -> int:
    ca, cb = F.coeffs(a), F.coeffs(b)
    prod = [0] * (2 * F.m - 1)
    for i, x in enumerate(ca):
        for j, y in enumerate(cb):
            prod[i + j] = (prod[i + j] + x * y) % F.p
    return F.encode(_poly_mod(prod, F.modulus, F.p))


def f_pow(F: FieldSpec, a: int, e: int) -> int:
    result, base = 1, a
    while e:
        if e & 1:
            result = f_mul(F, result, base)
        base = f_mul(F, base, base)
        e >>= 1
    return result


def f_inv(F: FieldSpec, a: int) -> int:
    """Multiplicative inverse by the extended Euclidean algorithm on polynomials."""
    F._check(a)
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in a field")
    p = F.p
    r0, r1 = list(F.modulus), _trim(F.coeffs(a))
    s0, s1 = [], [1]
    while r1:
        # polynomial long division r0 = quo * r1 + rem
        quo = [0] * max(len(r0) - len(r1) + 1, 1)
        rem = list(r0)
        inv_lead = pow(r1[-1], -1, p)
        while len(rem) >= len(r1):
            f = rem[-1] * inv_lead % p
            shift = len(rem) - len(r1)
            quo[shift] = f
            for t, c in enumerate(r1):
                rem[shift + t] = (rem[shift + t] - f * c) % p
            rem = _trim(rem)
        prod = [0] * (len(quo) + len(s1))
        for i, x in enumerate(quo):
            for j, y in enumerate(s1):
                prod[i + j] += x * y
        s_next = [((s0[t] if t < len(s0) else 0) - (prod[t] if t < len(prod) else 0)) % p
                  for t in range(max(len(s0), len(prod)))]
        r0, r1 = r1, rem
        s0, s1 = s1, _trim(s_next)
    # r0 is a nonzero constant: gcd up to a unit
    unit = pow(r0[0], -1, p)
    s0 = _poly_mod([c * unit for c in s0], F.modulus, p)
    return F.encode(s0)


def f_trace(F: FieldSpec, a: int) -> int:
    """Absolute trace a + a^p + ... + a^{p^(m-1)}, an element of GF(p)."""
    total, term = 0, a
    for _ in range(F.m):
        total = f_add(F, total, term)
        term = f_pow(F, term, F.p)
    if total >= F.p:
        raise AssertionError(f"trace {total} escaped the prime field")
    return total
