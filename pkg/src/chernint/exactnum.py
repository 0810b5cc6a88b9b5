"""Exact integer/rational helpers and p-adic valuations.

Python ints are arbitrary precision and :class:`fractions.Fraction` is always
kept in lowest terms with a positive denominator, so both serve directly as
the big-integer and exact-rational scalar types.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

Rational = Union[int, Fraction]

#: valuation of zero
INFINITY = math.inf


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"expected a prime, got {p!r}")
    return p


def primes_up_to(n: int) -> list[int]:
    return [q for q in range(2, n + 1) if is_prime(q)]


def _vp_int(n: int, p: int) -> int:
    n = abs(n)
    r = 0
    while n % p == 0:
        n //= p
        r += 1
    return r


def vp(x: Rational, p: int) -> float | int:
    """Return the p-adic valuation of ``x`` (``INFINITY`` for zero)."""
    check_prime(p)
    x = Fraction(x)
    if x == 0:
        return INFINITY
    return _vp_int(x.numerator, p) - _vp_int(x.denominator, p)


def vp_module(coeffs: Iterable[Rational], p: int) -> float | int:
    """Valuation of an element of a free module, given its coordinates.

    Only meaningful on a free basis; torsion is invisible to this.
    """
    return min((vp(c, p) for c in coeffs), default=INFINITY)


def digit_sum(n: int, p: int) -> int:
    s = 0
    while n:
        n, r = divmod(n, p)
        s += r
    return s


def legendre_factorial_vp(n: int, p: int) -> int:
    """v_p(n!) from the base-p digit sum of n."""
    check_prime(p)
    if n < 0:
        raise ValueError("n must be >= 0")
    return (n - digit_sum(n, p)) // (p - 1)


def factorial_vp_bruteforce(n: int, p: int) -> int:
    """v_p(n!) as the sum of floor(n / p^j); independent of the digit formula."""
    total, q = 0, p
    while q <= n:
        total += n // q
        q *= p
    return total


@lru_cache(maxsize=None)
def todd_number(d: int) -> int:
    """Product over primes p of p^[d/(p-1)]."""
    if d < 0:
        raise ValueError("d must be >= 0")
    out = 1
    for p in primes_up_to(d + 1):
        out *= p ** (d // (p - 1))
    return out


def todd_number_recursive(d: int) -> int:
    """Same number built up as tau_{d-1} times the primes p with (p-1) | d."""
    tau = 1
    for e in range(1, d + 1):
        for p in primes_up_to(e + 1):
            if e % (p - 1) == 0:
                tau *= p
    return tau


def multiplicative_order(a: int, m: int) -> int:
    if math.gcd(a, m) != 1:
        raise ValueError(f"{a} is not a unit modulo {m}")
    k, x = 1, a % m
    while x != 1 % m:
        x = x * a % m
        k += 1
    return k


@lru_cache(maxsize=None)
def primitive_root_mod_p2(p: int) -> int:
    """Smallest l > 1 whose class generates (Z/p^2)^x."""
    check_prime(p)
    m = p * p
    phi = p * (p - 1)
    l = 2
    while True:
        if l % p and multiplicative_order(l, m) == phi:
            return l
        l += 1


def a_p(n: int, p: int) -> int:
    """1 if (p - 1) divides n, else 0."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1 if n % (p - 1) == 0 else 0


def wilson_pp_residue(p: int, i: int, limit: int = 10**6) -> int:
    """Residue of (p^i)! / p^((p^i - 1)/(p - 1)) modulo p, by enumeration.

    Raises ArithmeticError if the residue is not (-1)^i mod p.
    """
    check_prime(p)
    if i < 0:
        raise ValueError("i must be >= 0")
    n = p**i
    if n > limit:
        raise OverflowError(f"p^i = {n} exceeds enumeration limit {limit}")
    e = (n - 1) // (p - 1)
    if n <= 10**4:
        q, r = divmod(math.factorial(n), p**e)
        if r:
            raise ArithmeticError(f"p^{e} does not divide ({n})!")
        if q % p == 0:
            raise ArithmeticError(f"v_p(({n})!) exceeds {e}")
        res = q % p
    else:
        res, removed = 1, 0
        for k in range(1, n + 1):
            while k % p == 0:
                k //= p
                removed += 1
            res = res * k % p
        if removed != e:
            raise ArithmeticError(f"v_p(({n})!) = {removed}, expected {e}")
    if res != (-1) ** i % p:
        raise ArithmeticError(f"residue {res} != (-1)^{i} mod {p}")
    return res


def binomial(n: int, k: int) -> int:
    """Binomial coefficient C(n, k) for any integer n (k >= 0)."""
    if k < 0:
        return 0
    if n >= 0:
        return math.comb(n, k)
    # C(n, k) = (-1)^k C(k - n - 1, k)
    return (-1) ** k * math.comb(k - n - 1, k)


def inverse_mod(a: int, p: int) -> int:
    return pow(a, -1, p)


def to_mod(c: Rational, p: int) -> int:
    """Image of a p-integral rational in Z/p."""
    c = Fraction(c)
    if c.denominator % p == 0:
        raise ValueError(f"{c} is not p-integral for p={p}")
    return c.numerator * pow(c.denominator, -1, p) % p
