"""Prime sieves and small factorization helpers."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
import sympy


def primes_below(n: int) -> np.ndarray:
    """All primes p < n as an int64 array."""
    if n <= 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(n - 1) + 1, 2):
        if sieve[p]:
            sieve[p * p::2 * p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def primes_in_range(lo: int, hi: int, base: np.ndarray | None = None) -> np.ndarray:
    """Primes in [lo, hi) by a segmented sieve."""
    lo = max(lo, 2)
    if hi <= lo:
        return np.zeros(0, dtype=np.int64)
    if base is None:
        base = primes_below(math.isqrt(hi - 1) + 1)
    seg = np.ones(hi - lo, dtype=bool)
    for p in base:
        p = int(p)
        if p * p >= hi:
            break
        start = max(p * p, (lo + p - 1) // p * p)
        seg[start - lo::p] = False
    return np.flatnonzero(seg).astype(np.int64) + lo


def iter_prime_blocks(lo: int, hi: int, block: int = 1 << 22):
    """Yield arrays of primes in [lo, hi) in increasing order, block by block."""
    base = primes_below(math.isqrt(max(hi - 1, 1)) + 1)
    a = lo
    while a < hi:
        b = min(hi, a + block)
        yield primes_in_range(a, b, base)
        a = b


@lru_cache(maxsize=None)
def factor(n: int) -> tuple:
    """Prime factorization as a sorted tuple of (p, e)."""
    return tuple(sorted(sympy.factorint(n).items()))


def prime_divisors(n: int) -> list:
    return [p for p, _ in factor(n)]


def vp(n: int, p: int) -> int:
    e = 0
    while n and n % p == 0:
        n //= p
        e += 1
    return e


def is_prime(n: int) -> bool:
    return bool(sympy.isprime(n))


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """Least g that generates (Z/p^k)^x for every k >= 1 (p odd prime)."""
    qs = prime_divisors(p - 1)
    g = 2
    while True:
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs) and pow(g, p - 1, p * p) != 1:
            return g
        g += 1
