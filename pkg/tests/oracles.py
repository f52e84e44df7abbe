"""Brute-force references that share no code with the package.

Everything here works straight from definitions: characters are found by
propagating generator images over the whole unit group, subgroups are
closed subsets, and so on.  Only usable at small sizes.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache


def elements(factors):
    return list(itertools.product(*[range(n) for n in factors]))


def add(factors, a, b):
    return tuple((x + y) % n for x, y, n in zip(a, b, factors))


def order(factors, a):
    k, z = 1, tuple(0 for _ in factors)
    x = a
    while x != z:
        x = add(factors, x, a)
        k += 1
    return k


def closed_subsets(factors):
    """All subgroups as frozensets, by closing every subset of generators."""
    els = elements(factors)
    z = tuple(0 for _ in factors)
    seen = set()
    for r in range(0, 3):
        for gens in itertools.combinations(els, r):
            S = {z}
            frontier = [z]
            while frontier:
                x = frontier.pop()
                for g in gens:
                    y = add(factors, x, g)
                    if y not in S:
                        S.add(y)
                        frontier.append(y)
            seen.add(frozenset(S))
    return seen


def all_subgroups_brute(factors):
    """Subsets containing 0 closed under addition (|G| <= 8 only)."""
    els = elements(factors)
    z = tuple(0 for _ in factors)
    rest = [e for e in els if e != z]
    out = []
    for r in range(len(rest) + 1):
        for sub in itertools.combinations(rest, r):
            S = set(sub) | {z}
            if all(add(factors, a, b) in S for a in S for b in S):
                out.append(frozenset(S))
    return out


def moebius_brute(subgroups, H, G):
    @lru_cache(maxsize=None)
    def mu(K):
        if K == G:
            return 1
        return -sum(mu(L) for L in subgroups if K < L <= G)

    return mu(H)


def phi(n):
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def units(f):
    return [a for a in range(1, f + 1) if math.gcd(a, f) == 1] if f > 1 else [1]


def homs_from_units(f, factors):
    """Every homomorphism (Z/f)^x -> G as a dict a -> element, by propagating
    generator images and discarding inconsistent assignments."""
    U = units(f)
    z = tuple(0 for _ in factors)
    # greedy generating set
    gens, span = [], {1}
    for a in U:
        if a not in span:
            gens.append(a)
            new = set(span)
            frontier = list(span)
            while frontier:
                x = frontier.pop()
                for g in gens:
                    y = x * g % f
                    if y not in new:
                        new.add(y)
                        frontier.append(y)
            span = new
    els = elements(factors)
    out = []
    for imgs in itertools.product(els, repeat=len(gens)):
        val = {1: z}
        frontier = [1]
        ok = True
        while frontier and ok:
            x = frontier.pop()
            for g, im in zip(gens, imgs):
                y = x * g % f
                v = add(factors, val[x], im)
                if y in val:
                    if val[y] != v:
                        ok = False
                        break
                else:
                    val[y] = v
                    frontier.append(y)
        if ok:
            out.append(val)
    return out


def conductor_of(f, val, factors, psi=None):
    """Smallest d | f such that the (possibly composed) character is trivial on units = 1 mod d."""
    z = tuple(0 for _ in factors)

    def image(a):
        x = val[a % f] if f > 1 else z
        if psi is None:
            return x
        return sum(c * xi * Fraction(1, n) for c, xi, n in zip(psi, x, factors)) % 1

    zero = z if psi is None else 0
    for d in sorted(d for d in range(1, f + 1) if f % d == 0):
        if all(image(a) == zero for a in units(f) if a % d == 1 % d):
            return d
    return f


def dual_coeffs(factors):
    return list(itertools.product(*[range(n) for n in factors]))


def brute_characters(factors, max_conductor):
    """(conductor, discriminant, radical, value-table) for every primitive
    surjective character to G with conductor <= max_conductor."""
    els = set(elements(factors))
    out = []
    for f in range(3, max_conductor + 1):
        if f % 4 == 2:
            continue  # no primitive characters
        for val in homs_from_units(f, factors):
            img = set(val.values())
            # surjective: image generates G; the image of a hom is a subgroup already
            if img != els:
                continue
            if conductor_of(f, val, factors) != f:
                continue
            disc = 1
            for psi in dual_coeffs(factors):
                disc *= conductor_of(f, val, factors, psi)
            rad = math.prod(p for p in range(2, f + 1) if f % p == 0 and all(p % d for d in range(2, p)))
            table = tuple(sorted((a, val[a]) for a in units(f)))
            out.append((f, disc, rad, table))
    return out


def count_fundamental_discriminants(X):
    """#{d != 1 fundamental discriminant : |d| < X}, i.e. quadratic characters by conductor."""
    def squarefree(n):
        return all(n % (k * k) for k in range(2, math.isqrt(n) + 1))

    n = 0
    for m in range(1, X):
        for d in (m, -m):
            if d == 1:
                continue
            if d % 4 == 1 and squarefree(abs(d)):
                n += 1
            elif d % 4 == 0 and (d // 4) % 4 in (2, 3) and squarefree(abs(d) // 4):
                n += 1
    return n


def dlog_brute(g, x, m):
    k, y = 0, 1
    while y != x % m:
        y = y * g % m
        k += 1
        if k > m:
            raise ValueError("not in the subgroup")
    return k


def disc_products_direct(p, q, N, prec=50):
    """Truncated s and r products in plain high-precision arithmetic (no wild factor)."""
    import mpmath

    with mpmath.workdps(prec):
        a = mpmath.mpf(p + 1) / p
        k = p * p - p
        ps, pr = mpmath.mpf(1), mpmath.mpf(1)
        for l in range(2, N + 1):
            if l % (p * p) != 1 or l == q or not all(l % d for d in range(2, math.isqrt(l) + 1)):
                continue
            u = mpmath.mpf(p - 1) / l
            v = mpmath.mpf(l) ** (-a)
            B = 1 + u + k * v
            pr *= (1 + u) / B
            if pow(q, (l - 1) // p, l) != 1:
                ps *= (1 + u - p * v) / B
        s = (1 + (p - 1) * ps) / (p * p)
        return s, pr
