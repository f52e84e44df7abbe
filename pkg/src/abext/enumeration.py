"""Enumeration and fast counting of G-extensions of Q with C(chi) < X.

Characters are built prime by prime (increasing p) from the admissible local
options, multiplying the C-value as we go, so nothing is ever generated twice.
Fast counts never build characters: each subgroup H contributes the
coefficients of a multiplicative Dirichlet series, and surjective counts come
from Moebius inversion over the subgroup lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np

from .counting import CountingFunction
from .groups import FiniteAbelianGroup, Subgroup, all_subgroups, moebius
from .primes import primes_below
from .units import (
    INF,
    GlobalCharacter,
    LocalCharacter,
    LocalSpec,
    all_local_characters,
    discriminant,
    global_conductor,
)


class EnumerationBudgetError(RuntimeError):
    pass


@dataclass
class EnumerationQuery:
    group: FiniteAbelianGroup
    counting: CountingFunction
    bound: int  # strict: C(chi) < bound
    pinned: dict = field(default_factory=dict)  # place -> LocalSpec
    surjective: bool = True

    def __post_init__(self):
        self.bound = int(self.bound)
        if self.bound < 1:
            raise ValueError("bound must be >= 1")
        if self.counting.group != self.group:
            raise ValueError("counting function is defined on a different group")
        for place, s in self.pinned.items():
            if s.place != place:
                raise ValueError(f"spec pinned at {place} describes place {s.place}")


@dataclass(frozen=True)
class Admissible:
    p: int
    level: int
    division: object  # Division of the tame inertia image, None at wild primes
    weight: int
    character: LocalCharacter


def split_budget(C: CountingFunction, X: int) -> list:
    """All (prime, level, division) choices with p^weight < X."""
    return [a for opts in _local_options(C, X) for a in opts]


def _local_options(C: CountingFunction, X: int) -> list:
    """Per-prime lists of Admissible options (nontrivial local characters), by prime."""
    G = C.group
    n, ex = G.order, G.exponent
    tame_w = [w for w in C.tame.values()]
    wmin = min(tame_w)
    out = []
    if X <= 2:
        return out
    # tame primes need gcd(p - 1, exp) > 1 and p^m < X
    limit = int(math.floor((X - 1) ** (1.0 / wmin))) + 2
    while limit ** wmin >= X:
        limit -= 1
    ps = primes_below(limit + 1)
    wild = sorted({p for p in range(2, n + 1) if n % p == 0 and _isprime_small(p)})
    if len(ps):
        ps = ps[np.gcd(ps - 1, ex) > 1]
    tame_by_gcd: dict = {}
    elems = [(g, r) for g, r in zip(G.elements, G.orders) if r > 1]
    plist = sorted(set(int(p) for p in ps if n % int(p)) | set(wild))
    for p in plist:
        if p in wild:
            opts = []
            for c in all_local_characters(G, p)[1:]:
                w = int(C.local_weight(c))
                if p ** w < X:
                    opts.append(Admissible(p, c.level, None, w, c))
        else:
            gcls = math.gcd(p - 1, ex)
            cand = tame_by_gcd.get(gcls)
            if cand is None:
                cand = [(g, C.tame_weight(g)) for g, r in elems if gcls % r == 0]
                cand.sort(key=lambda t: t[1])
                tame_by_gcd[gcls] = cand
            opts = []
            for g, w in cand:
                if p ** w >= X:
                    break
                opts.append(Admissible(p, 1, G.division_of[g], w,
                                       LocalCharacter(G, p, 1, (g,))))
        if opts:
            opts.sort(key=lambda a: a.weight)
            out.append(opts)
    return out


def _isprime_small(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, math.isqrt(p) + 1))


class _Engine:
    """Depth-first walk over supports.  ``walk`` calls visit(value, comps, mask)
    for every character (surjective or not) with C < X; ``comps`` is the live
    list of components in increasing prime order and must be copied if kept."""

    def __init__(self, C: CountingFunction, X: int, pinned: Optional[dict] = None):
        G = C.group
        self.G, self.C, self.X = G, C, int(X)
        self.index = {g: i for i, g in enumerate(G.elements)}
        self.full = (1 << G.order) - 1
        self.zero_mask = 1 << self.index[G.zero]
        self._join: dict = {}
        self._mask_of: dict = {}
        pinned = dict(pinned or {})
        self.required = []
        table = []
        for opts in _local_options(C, X):
            p = opts[0].p
            if p in pinned:
                s = pinned[p]
                if s.unit is None:
                    continue
                opts = [a for a in opts if a.character.level == s.unit.level
                        and a.character.images == s.unit.images]
                if not opts:
                    continue
                self.required.append(p)
            table.append(opts)
        missing = [p for p, s in pinned.items() if p != INF and s.unit is not None
                   and p not in self.required]
        self.impossible = bool(missing)
        self.primes = [o[0].p for o in table]
        self.options = [[(a.p ** a.weight, a.character, self.mask(a.character.images))
                         for a in opts] for opts in table]
        sm, suff = None, []
        for opts in reversed(table):
            w = opts[0].weight
            sm = w if sm is None else min(sm, w)
            suff.append(sm)
        suff.reverse()
        self.thresh = [p ** w if w > 0 else 0 for p, w in zip(self.primes, suff)]
        self.pinned = pinned

    def mask(self, gens) -> int:
        key = tuple(gens)
        m = self._mask_of.get(key)
        if m is None:
            H = Subgroup.generated_by(self.G, key)
            m = 0
            for g in H.elements:
                m |= 1 << self.index[g]
            self._mask_of[key] = m
        return m

    def join(self, a: int, b: int) -> int:
        if b & ~a == 0:
            return a
        if a & ~b == 0:
            return b
        key = (a, b)
        m = self._join.get(key)
        if m is None:
            elems = self.G.elements
            gens = [elems[i] for i in range(self.G.order) if (a | b) >> i & 1]
            m = self.mask(gens)
            self._join[key] = m
        return m

    def walk(self, visit: Callable) -> None:
        if self.impossible:
            return
        X, options, thresh = self.X, self.options, self.thresh
        n = len(options)
        join = self.join
        comps: list = []

        def rec(start: int, cur: int, mask: int) -> None:
            for i in range(start, n):
                t = thresh[i]
                if t and cur * t >= X:
                    break
                for pw, lc, m in options[i]:
                    v = cur * pw
                    if v >= X:
                        break
                    comps.append(lc)
                    nm = join(mask, m)
                    visit(v, comps, nm)
                    rec(i + 1, v, nm)
                    comps.pop()

        if X > 1:
            visit(1, comps, self.zero_mask)
        rec(0, 1, self.zero_mask)

    def matches_pins(self, comps) -> bool:
        """Check required ramified primes and Frobenius/infinity pins."""
        if not self.pinned:
            return True
        support = {c.p for c in comps}
        for p in self.required:
            if p not in support:
                return False
        G = self.G
        for place, s in self.pinned.items():
            if place == INF:
                v = G.zero
                for c in comps:
                    v = G.add(v, c.value_at(-1))
            else:
                v = G.zero
                for c in comps:
                    if c.p != place:
                        v = G.add(v, c.value_at(place))
            if v != s.frob:
                return False
        return True


def iter_characters(q: EnumerationQuery, budget: Optional[int] = None) -> Iterator:
    """Unordered stream of (C-value, GlobalCharacter) pairs."""
    out = []
    _collect(q, out, budget)
    return iter(out)


def _collect(q: EnumerationQuery, out: list, budget: Optional[int]) -> None:
    eng = _Engine(q.counting, q.bound, q.pinned)
    G = q.group
    full = eng.full
    surj = q.surjective and G.order > 1

    def visit(v, comps, mask):
        if surj and mask != full:
            return
        if eng.pinned and not eng.matches_pins(comps):
            return
        if budget is not None and len(out) >= budget:
            raise EnumerationBudgetError(
                f"more than {budget} characters with C < {q.bound}; raise the budget")
        out.append((v, GlobalCharacter(G, tuple(comps))))

    eng.walk(visit)


def enumerate_characters(q: EnumerationQuery, budget: Optional[int] = None) -> list:
    """Every surjective primitive character with C(chi) < X, in canonical order
    (C-value, then conductor, then serialized form)."""
    pairs = list(iter_characters(q, budget))
    keyed = [(v, global_conductor(chi), chi.serialize(), chi) for v, chi in pairs]
    keyed.sort(key=lambda t: t[:3])
    return [t[3] for t in keyed]


def enumeration_rows(q: EnumerationQuery, budget: Optional[int] = None) -> list:
    """(C-value, conductor, discriminant, support, serialized, chi) rows in canonical order."""
    rows = []
    for v, chi in iter_characters(q, budget):
        rows.append((v, global_conductor(chi), discriminant(chi), chi.support, chi.serialize(), chi))
    rows.sort(key=lambda r: (r[0], r[1], r[4]))
    return rows


# --- tallies ---------------------------------------------------------------


@dataclass
class CountTally:
    values: np.ndarray  # C-values (or bucket starts) with nonzero counts
    counts: np.ndarray
    bucket_width: int = 1

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def as_dict(self) -> dict:
        return {int(v): int(c) for v, c in zip(self.values, self.counts)}

    def count_below(self, y: int) -> int:
        """#{chi : C(chi) < y}; y must be a multiple of the bucket width."""
        return int(self.counts[self.values < y].sum())

    @classmethod
    def from_values(cls, vals, bucket_width: int = 1) -> "CountTally":
        arr = np.asarray(list(vals), dtype=np.int64)
        if bucket_width > 1:
            arr = arr // bucket_width * bucket_width
        v, c = np.unique(arr, return_counts=True)
        return cls(v.astype(np.int64), c.astype(np.int64), bucket_width)


def enumeration_tally(q: EnumerationQuery, bucket_width: int = 1) -> CountTally:
    return CountTally.from_values((v for v, _ in iter_characters(q)), bucket_width)


def _tame_poly_cache(C: CountingFunction, H_elems: frozenset) -> Callable:
    G = C.group
    ex = G.exponent
    elems = [(g, r, C.tame_weight(g)) for g, r in zip(G.elements, G.orders)
             if r > 1 and g in H_elems]
    cache: dict = {}

    def poly(p: int) -> dict:
        gcls = math.gcd(p - 1, ex)
        got = cache.get(gcls)
        if got is None:
            got = {}
            for g, r, w in elems:
                if gcls % r == 0:
                    got[w] = got.get(w, 0) + 1
            cache[gcls] = got
        return got

    return poly


def _series_coefficients(C: CountingFunction, H_elems: frozenset, X: int,
                         unit_pins: Optional[dict] = None) -> np.ndarray:
    """a[y] = #{chi : prod Z_p^x -> H with C(chi) = y} for y < X."""
    G = C.group
    arr = np.zeros(X, dtype=np.int64)
    if X <= 1:
        return arr
    arr[1] = 1
    if len(H_elems) == 1:
        return arr
    unit_pins = unit_pins or {}
    n = G.order
    wild = [p for p in range(2, n + 1) if n % p == 0 and _isprime_small(p)]
    poly = _tame_poly_cache(C, H_elems)
    root = math.isqrt(X - 1)

    def local_poly(p: int) -> dict:
        if p in unit_pins:
            c = unit_pins[p]
            if c is None:
                return {}
            return {C.local_weight(c): 1} if all(a in H_elems for a in c.images) else {None: 0}
        if p in wild:
            out: dict = {}
            for c in all_local_characters(G, p)[1:]:
                if all(a in H_elems for a in c.images):
                    w = C.local_weight(c)
                    out[w] = out.get(w, 0) + 1
            return out
        return poly(p)

    def apply(p: int, P: dict) -> None:
        pin_only = P.get(None) == 0
        if pin_only:
            # pinned to a character outside H: nothing survives
            arr[:] = 0
            return
        terms = [(p ** w, b) for w, b in P.items() if b and p ** w < X]
        if p in unit_pins:
            # pinned: the trivial local factor is replaced by the pinned term
            src = arr.copy()
            arr[:] = 0
            for pw, b in terms:
                m = (X - 1) // pw + 1
                arr[pw::pw][:m - 1] += b * src[1:m]
            return
        if not terms:
            return
        m_max = (X - 1) // min(pw for pw, _ in terms) + 1
        src = arr[1:m_max].copy()
        for pw, b in terms:
            m = (X - 1) // pw + 1
            if pw == 1:
                arr[1:m] += b * src[:m - 1]
            else:
                arr[pw::pw][:m - 1] += b * src[:m - 1]

    ps = primes_below(X)
    small = [int(p) for p in ps if p <= root or p in wild or p in unit_pins]
    for p in small:
        apply(p, local_poly(p))
    # primes above sqrt(X): only x^1 terms survive and their sources are < sqrt(X)
    large = ps[ps > root]
    if len(large):
        skip = np.isin(large, np.array(sorted(set(wild) | set(unit_pins)), dtype=np.int64))
        large = large[~skip]
    if len(large):
        coef = np.zeros(len(large), dtype=np.int64)
        g = np.gcd(large - 1, G.exponent)
        for gv in np.unique(g):
            coef[g == gv] = poly(int(gv) + 1).get(1, 0) if True else 0
        keep = coef != 0
        large, coef = large[keep], coef[keep]
        nmax = (X - 1) // int(large[0]) if len(large) else 0
        for nn in range(1, nmax + 1):
            a = arr[nn]
            if not a:
                continue
            sel = large < (X - 1) // nn + 1
            k = int(np.count_nonzero(sel))
            if not k:
                break
            arr[nn * large[:k]] += a * coef[:k]
    return arr


def fast_count(q: EnumerationQuery, bucket_width: int = 1, unit_pins: Optional[dict] = None) -> CountTally:
    """Counts #{chi surjective : C(chi) = y} for y < X without enumerating."""
    if q.pinned:
        raise ValueError("fast_count does not take Frobenius pins; use unit_pins for "
                         "ramification pins or enumerate_characters")
    G, C, X = q.group, q.counting, q.bound
    if X <= 1:
        return CountTally(np.zeros(0, np.int64), np.zeros(0, np.int64), bucket_width)
    if q.surjective and G.order > 1:
        total = np.zeros(X, dtype=np.int64)
        for H in all_subgroups(G):
            mu = moebius(G, H)
            if mu:
                total += mu * _series_coefficients(C, H.elements, X, unit_pins)
    else:
        total = _series_coefficients(C, frozenset(G.elements), X, unit_pins)
    if (total < 0).any():
        raise ArithmeticError("negative count after Moebius inversion")
    idx = np.flatnonzero(total)
    vals, cnts = idx.astype(np.int64), total[idx]
    if bucket_width > 1:
        b = vals // bucket_width * bucket_width
        ub, inv = np.unique(b, return_inverse=True)
        agg = np.zeros(len(ub), dtype=np.int64)
        np.add.at(agg, inv, cnts)
        return CountTally(ub, agg, bucket_width)
    return CountTally(vals, cnts, 1)


# --- Frobenius-resolved counts ----------------------------------------------


def _twist_classes(p: int, ls: np.ndarray, ex: int) -> list:
    """For each prime l: (d, t) with d = gcd(l - 1, ex) and t the order of p in
    (Z/l)^x modulo d-th powers."""
    out = []
    for l in ls.tolist():
        d = math.gcd(l - 1, ex)
        if d == 1:
            out.append((1, 1))
            continue
        y = pow(p, (l - 1) // d, l)
        t = 1
        z = y
        while z != 1:
            z = z * y % l
            t += 1
        out.append((d, t))
    return out


def _twisted_coefficients(C: CountingFunction, H_elems: frozenset, X: int, p: int,
                          bounds: list) -> np.ndarray:
    """Prefix sums at each bound of the Z[G]-valued series
    sum over chi into H unramified at p of [chi(p)] y^{C(chi)}."""
    G = C.group
    n = G.order
    idx = {g: G.index(g) for g in G.elements}
    # shift[a][j] = index of (element j) + a
    shift = {a: np.array([idx[G.add(g, a)] for g in G.elements]) for a in G.elements}
    arr = np.zeros((X, n), dtype=np.int64)
    arr[1, idx[G.zero]] = 1
    if len(H_elems) > 1:
        elems = [(g, r, C.tame_weight(g)) for g, r in zip(G.elements, G.orders)
                 if r > 1 and g in H_elems]
        poly_cache: dict = {}

        def tame_poly(d, t):
            got = poly_cache.get((d, t))
            if got is None:
                got = {}
                e = d // t
                for g, r, w in elems:
                    if d % r == 0:
                        key = (w, G.mul(e, g))
                        got[key] = got.get(key, 0) + 1
                poly_cache[(d, t)] = got
            return got

        wild = [q for q in range(2, n + 1) if n % q == 0 and _isprime_small(q)]

        def local_poly(l):
            if l in wild:
                got: dict = {}
                for c in all_local_characters(G, l)[1:]:
                    if all(a in H_elems for a in c.images):
                        key = (C.local_weight(c), c.value_at(p))
                        got[key] = got.get(key, 0) + 1
                return got
            return tame_poly(*_twist_classes(p, np.array([l]), G.exponent)[0])

        def apply(l, P):
            terms = [(l ** w, a, b) for (w, a), b in P.items() if b and l ** w < X]
            if not terms:
                return
            m_max = (X - 1) // min(t[0] for t in terms) + 1
            src = arr[1:m_max].copy()
            for lw, a, b in terms:
                m = (X - 1) // lw + 1
                tgt = arr[lw::lw][:m - 1]
                tgt[:, shift[a]] += b * src[:m - 1]

        root = math.isqrt(X - 1)
        ps = primes_below(X)
        ps = ps[ps != p]
        for l in (int(q) for q in ps if q <= root or q in wild):
            apply(l, local_poly(l))
        large = ps[ps > root]
        if len(wild):
            large = large[~np.isin(large, np.array(wild, dtype=np.int64))]
        if len(large):
            cls = _twist_classes(p, large, G.exponent)
            # per large prime: the x^1 terms as a (|G|,) coefficient vector over a
            coef = np.zeros((len(large), n), dtype=np.int64)
            for i, (d, t) in enumerate(cls):
                for (w, a), b in tame_poly(d, t).items():
                    if w == 1:
                        coef[i, idx[a]] += b
            keep = coef.any(axis=1)
            large, coef = large[keep], coef[keep]
            inv = {idx[a]: np.argsort(shift[a]) for a in G.elements}
            for nn in range(1, (X - 1) // int(large[0]) + 1 if len(large) else 1):
                row = arr[nn]
                if not row.any():
                    continue
                k = int(np.searchsorted(large, (X - 1) // nn, side="right"))
                if not k:
                    break
                # contribution to arr[nn*l, j + a] is coef[l, a] * row[j]
                add = np.zeros((k, n), dtype=np.int64)
                for ai in range(n):
                    c = coef[:k, ai]
                    if c.any():
                        add += c[:, None] * row[inv[ai]][None, :]
                arr[nn * large[:k]] += add
    return np.array([arr[:b].sum(axis=0) for b in bounds], dtype=object)


def frobenius_census(C: CountingFunction, bounds, p: int) -> dict:
    """bound -> {g: #{chi surjective, unramified at p, C(chi) < bound, chi(p) = g}}.

    Exact counts from a Z[G]-valued multiplicative sieve; no characters are built."""
    G = C.group
    bounds = sorted(int(b) for b in ([bounds] if isinstance(bounds, int) else bounds))
    X = bounds[-1]
    total = np.zeros((len(bounds), G.order), dtype=object)
    for H in all_subgroups(G):
        mu = moebius(G, H)
        if mu:
            total = total + mu * _twisted_coefficients(C, H.elements, X, p, bounds)
    return {b: {g: int(total[i, G.index(g)]) for g in G.elements} for i, b in enumerate(bounds)}
