import itertools

import pytest

from meanking.errors import MeanKingError, UnsupportedError
from meanking.field import f_add, f_inv, f_mul, f_pow, f_trace, field_make, is_irreducible, prime_power

SMALL = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4)]


def _has_root(poly, p):
    return any(sum(c * x ** t for t, c in enumerate(poly)) % p == 0 for x in range(p))


def test_prime_field_modulus():
    F = field_make(3, 1)
    assert F.q == 3 and F.modulus == (0, 1)


def test_gf4_modulus_is_only_irreducible_quadratic():
    # brute force: a monic quadratic over GF(2) is irreducible iff it has no root
    irreducible = [(c0, c1, 1) for c0, c1 in itertools.product(range(2), repeat=2)
                   if not _has_root((c0, c1, 1), 2)]
    assert irreducible == [(1, 1, 1)]
    assert field_make(2, 2).modulus == (1, 1, 1)


def test_composite_and_bad_degree_rejected():
    with pytest.raises(MeanKingError, match="not prime"):
        field_make(4, 1)
    with pytest.raises(UnsupportedError):
        field_make(2, 5)


def test_irreducibility_matches_root_test_for_cubics():
    for p in (2, 3, 5):
        for low in itertools.product(range(p), repeat=3):
            poly = list(low) + [1]
            assert is_irreducible(poly, p) == (not _has_root(poly, p))


def test_quartic_with_quadratic_factors_is_reducible():
    # (x^2+x+1)^2 = x^4 + x^2 + 1 over GF(2) has no roots but factors
    assert not _has_root([1, 0, 1, 0, 1], 2)
    assert not is_irreducible([1, 0, 1, 0, 1], 2)


def _poly_mulmod_oracle(a, b, F):
    # schoolbook product then repeated subtraction of shifted modulus
    ca, cb = F.coeffs(a), F.coeffs(b)
    prod = [0] * (2 * F.m)
    for i in range(F.m):
        for j in range(F.m):
            prod[i + j] += ca[i] * cb[j]
    for top in range(len(prod) - 1, F.m - 1, -1):
        f = prod[top] % F.p
        for t, c in enumerate(F.modulus):
            prod[top - F.m + t] -= f * c
    return F.encode(prod[:F.m])


def test_gf4_product():
    F = field_make(2, 2)
    assert f_mul(F, 2, 2) == 3
    assert _poly_mulmod_oracle(2, 2, F) == 3


@pytest.mark.parametrize("p,m", SMALL)
def test_field_axioms_exhaustive(p, m):
    F = field_make(p, m)
    q = F.q
    els = range(q)
    for a in els:
        assert f_add(F, a, 0) == a
        assert f_mul(F, a, 1) == a
        if a:
            assert f_mul(F, a, f_inv(F, a)) == 1
        for b in els:
            assert f_add(F, a, b) == f_add(F, b, a)
            assert f_mul(F, a, b) == f_mul(F, b, a)
            assert f_mul(F, a, b) == _poly_mulmod_oracle(a, b, F)
            # Frobenius is additive
            assert f_pow(F, f_add(F, a, b), p) == f_add(F, f_pow(F, a, p), f_pow(F, b, p))
            for c in els:
                assert f_mul(F, a, f_add(F, b, c)) == f_add(F, f_mul(F, a, b), f_mul(F, a, c))
                if q <= 9:
                    assert f_mul(F, f_mul(F, a, b), c) == f_mul(F, a, f_mul(F, b, c))
                    assert f_add(F, f_add(F, a, b), c) == f_add(F, a, f_add(F, b, c))


def test_inverse_exhaustive_gf9():
    F = field_make(3, 2)
    assert all(f_mul(F, a, f_inv(F, a)) == 1 for a in range(1, 9))
    with pytest.raises(ZeroDivisionError):
        f_inv(F, 0)


@pytest.mark.parametrize("p,m", SMALL)
def test_trace_linear_and_nonzero(p, m):
    F = field_make(p, m)
    tr = [f_trace(F, a) for a in range(F.q)]
    assert all(0 <= t < p for t in tr)
    assert any(tr)
    for a in range(F.q):
        for b in range(F.q):
            assert tr[f_add(F, a, b)] == (tr[a] + tr[b]) % p
        for c in range(p):
            assert tr[f_mul(F, c, a)] == c * tr[a] % p


def test_prime_power_detection():
    assert prime_power(9) == (3, 2)
    assert prime_power(16) == (2, 4)
    assert prime_power(6) is None
    assert prime_power(1) is None
