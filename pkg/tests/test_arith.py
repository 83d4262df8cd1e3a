import math

import pytest

from dirmoment.arith import (coprime_iter, divisor_count, divisors,
                             euler_phi, euler_phi_sieve, factorize, mobius,
                             mobius_sieve, omega, omega_sieve, phi_star,
                             prime_sieve, two_pow_omega)


def test_factorize_small():
    f = factorize(360)
    assert f.factors == ((2, 3), (3, 2), (5, 1))
    assert factorize(1).factors == ()
    assert factorize(97).factors == ((97, 1),)


def test_factorize_reconstructs():
    for n in range(1, 2000):
        f = factorize(n)
        prod = 1
        for p, e in f.factors:
            prod *= p ** e
        assert prod == n


def test_factorize_large_semiprime():
    p, r = 1000003, 1000033
    f = factorize(p * r)
    assert f.factors == ((p, 1), (r, 1))


def test_factorize_rejects():
    with pytest.raises(ValueError):
        factorize(0)
    with pytest.raises(ValueError):
        factorize(-6)


def brute_phi(n):
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def test_euler_phi_brute():
    for n in range(1, 400):
        assert euler_phi(n) == brute_phi(n)


def test_mobius_values():
    expected = {1: 1, 2: -1, 3: -1, 4: 0, 5: -1, 6: 1, 12: 0, 30: -1,
                210: 1, 49: 0}
    for n, m in expected.items():
        assert mobius(n) == m


def test_mobius_sum_identity():
    # sum of mu(d) over divisors of n is the unit indicator
    for n in range(1, 300):
        s = sum(mobius(d) for d in divisors(n))
        assert s == (1 if n == 1 else 0)


def test_omega_and_divisor_count():
    assert omega(1) == 0
    assert omega(12) == 2
    assert omega(30030) == 6
    assert divisor_count(1) == 1
    assert divisor_count(360) == 24
    assert two_pow_omega(1) == 1
    assert two_pow_omega(12) == 4


def test_phi_star_multiplicative():
    # value on prime powers: p -> p-2, p^k -> p^(k-2) (p-1)^2
    assert phi_star(1) == 1
    assert phi_star(2) == 0
    assert phi_star(3) == 1
    assert phi_star(4) == 1
    assert phi_star(8) == 2
    assert phi_star(9) == 4
    assert phi_star(15) == 3
    for a, b in ((3, 8), (5, 9), (7, 16), (11, 25)):
        assert phi_star(a * b) == phi_star(a) * phi_star(b)


def test_phi_star_divisor_recursion():
    # phi(q) = sum over divisors d of phi_star(d): every character is
    # induced by exactly one primitive character
    for q in range(1, 300):
        assert sum(phi_star(d) for d in divisors(q)) == euler_phi(q)


def test_divisors_sorted_complete():
    for n in (1, 2, 12, 97, 360, 1024):
        ds = divisors(n)
        assert ds == sorted(ds)
        assert all(n % d == 0 for d in ds)
        assert len(ds) == divisor_count(n)


def test_coprime_iter():
    assert list(coprime_iter(12, 12)) == [1, 5, 7, 11]
    assert list(coprime_iter(10, 1)) == list(range(1, 11))
    for q in (7, 9, 16, 30):
        assert len(list(coprime_iter(q, q))) == euler_phi(q)
        assert len(list(coprime_iter(2 * q, q))) == 2 * euler_phi(q)


def test_sieves_match_pointwise():
    n = 3000
    om = omega_sieve(n)
    mu = mobius_sieve(n)
    ph = euler_phi_sieve(n)
    for k in range(1, n + 1):
        assert om[k] == omega(k)
        assert mu[k] == mobius(k)
        assert ph[k] == euler_phi(k)


def test_prime_sieve():
    ps = prime_sieve(100)
    assert list(ps[:10]) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(ps) == 25
