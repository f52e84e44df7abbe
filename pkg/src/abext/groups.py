"""Finite abelian groups G = Z/n_1 x ... x Z/n_k.

Elements are tuples of residues.  The factor list is kept exactly as given
(no invariant-factor normalization), so ``Z/2 x Z/4`` and ``Z/4 x Z/2`` are
different objects even though they are isomorphic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Sequence

GroupElement = tuple

MAX_LATTICE_ORDER = 2**12


class GroupSizeError(ValueError):
    pass


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def parse_group(text: str) -> "FiniteAbelianGroup":
    """Parse a CLI group name like ``"2,4"``."""
    parts = [t.strip() for t in str(text).replace("x", ",").split(",") if t.strip()]
    if not parts:
        raise ValueError(f"empty group description {text!r}")
    return FiniteAbelianGroup(tuple(int(t) for t in parts))


@dataclass(frozen=True)
class FiniteAbelianGroup:
    factors: tuple

    def __post_init__(self):
        facs = tuple(int(n) for n in self.factors)
        if not facs:
            raise ValueError("at least one cyclic factor is required")
        for n in facs:
            if n < 2:
                raise ValueError(f"cyclic factor orders must be >= 2, got {n}")
        object.__setattr__(self, "factors", facs)

    def __repr__(self):
        return "G(" + " x ".join(f"Z/{n}" for n in self.factors) + ")"

    @property
    def rank(self) -> int:
        return len(self.factors)

    @cached_property
    def order(self) -> int:
        return math.prod(self.factors)

    @cached_property
    def exponent(self) -> int:
        return reduce(_lcm, self.factors, 1)

    @cached_property
    def zero(self) -> GroupElement:
        return (0,) * self.rank

    # --- element arithmetic -------------------------------------------------

    def reduce(self, coords: Iterable[int]) -> GroupElement:
        coords = tuple(coords)
        if len(coords) != self.rank:
            raise ValueError(f"expected {self.rank} coordinates, got {len(coords)}")
        return tuple(int(c) % n for c, n in zip(coords, self.factors))

    def add(self, g: GroupElement, h: GroupElement) -> GroupElement:
        return tuple((a + b) % n for a, b, n in zip(g, h, self.factors))

    def neg(self, g: GroupElement) -> GroupElement:
        return tuple(-a % n for a, n in zip(g, self.factors))

    def mul(self, k: int, g: GroupElement) -> GroupElement:
        return tuple(k * a % n for a, n in zip(g, self.factors))

    def element_order(self, g: GroupElement) -> int:
        r = 1
        for a, n in zip(g, self.factors):
            r = _lcm(r, n // math.gcd(a, n))
        return r

    @cached_property
    def elements(self) -> list:
        return [tuple(c) for c in itertools.product(*(range(n) for n in self.factors))]

    def index(self, g: GroupElement) -> int:
        i = 0
        for a, n in zip(g, self.factors):
            i = i * n + a
        return i

    @cached_property
    def orders(self) -> list:
        """Element orders, indexed like ``elements``."""
        return [self.element_order(g) for g in self.elements]

    def order_census(self) -> dict:
        """Map r -> number of elements of order r."""
        census: dict = {}
        for r in self.orders:
            census[r] = census.get(r, 0) + 1
        return census

    # --- subgroups ----------------------------------------------------------

    def span(self, gens: Iterable[GroupElement]) -> "Subgroup":
        return Subgroup.generated_by(self, gens)

    def torsion_subgroup(self, r: int) -> "Subgroup":
        if r < 1:
            raise ValueError("r must be >= 1")
        elems = frozenset(g for g, o in zip(self.elements, self.orders) if r % o == 0)
        return Subgroup(self, elems)

    def whole(self) -> "Subgroup":
        return Subgroup(self, frozenset(self.elements))

    def trivial(self) -> "Subgroup":
        return Subgroup(self, frozenset([self.zero]))

    def two_torsion_size(self) -> int:
        return sum(1 for o in self.orders if o <= 2)

    @cached_property
    def divisions(self) -> list:
        return divisions(self)

    @cached_property
    def division_of(self) -> dict:
        """Map each nonidentity element to its Division."""
        out = {}
        for d in self.divisions:
            for g in d.elements:
                out[g] = d
        return out


@dataclass(frozen=True)
class Subgroup:
    group: FiniteAbelianGroup
    elements: frozenset
    gens: tuple = field(default=(), compare=False)

    @classmethod
    def generated_by(cls, G: FiniteAbelianGroup, gens: Iterable[GroupElement]) -> "Subgroup":
        gens = tuple(G.reduce(g) for g in gens)
        elems = {G.zero}
        for g in gens:
            if g in elems:
                continue
            # S + <g> = union of cosets S + k g
            new = set(elems)
            step = g
            while step not in elems:
                new.update(G.add(x, step) for x in elems)
                step = G.add(step, g)
            elems = new
        return cls(G, frozenset(elems), gens)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g) -> bool:
        return tuple(g) in self.elements

    def __le__(self, other: "Subgroup") -> bool:
        return self.elements <= other.elements

    def __lt__(self, other: "Subgroup") -> bool:
        return self.elements < other.elements

    def as_abstract(self) -> FiniteAbelianGroup:
        """An abstract cyclic decomposition (invariant factors) of this subgroup."""
        if self.order == 1:
            return None
        return FiniteAbelianGroup(invariant_factors(self.group, self.elements))


@dataclass(frozen=True)
class Division:
    representative: GroupElement
    elements: frozenset
    order: int  # common element order r_d

    def __len__(self):
        return len(self.elements)


def element_order(G: FiniteAbelianGroup, g: GroupElement) -> int:
    return G.element_order(G.reduce(g))


def divisions(G: FiniteAbelianGroup) -> list:
    """Partition G minus the identity into classes {e*x : gcd(e, r_x) = 1}."""
    seen = set()
    out = []
    for g, r in zip(G.elements, G.orders):
        if r == 1 or g in seen:
            continue
        members = frozenset(G.mul(e, g) for e in range(1, r + 1) if math.gcd(e, r) == 1)
        seen |= members
        out.append(Division(g, members, r))
    return out


def torsion_subgroup(G: FiniteAbelianGroup, r: int) -> Subgroup:
    return G.torsion_subgroup(r)


def all_subgroups(G: FiniteAbelianGroup) -> list:
    """Every subgroup of G exactly once, smallest first."""
    if G.order > MAX_LATTICE_ORDER:
        raise GroupSizeError(f"|G| = {G.order} exceeds the lattice limit {MAX_LATTICE_ORDER}")
    return list(_subgroup_lattice(G)[0])


def _subgroup_lattice(G: FiniteAbelianGroup):
    cache = _LATTICES.get(G)
    if cache is not None:
        return cache
    start = G.trivial()
    found = {start.elements: start}
    frontier = [start]
    while frontier:
        nxt = []
        for H in frontier:
            for g in G.elements:
                if g in H.elements:
                    continue
                K = Subgroup.generated_by(G, H.gens + (g,))
                if K.elements not in found:
                    found[K.elements] = K
                    nxt.append(K)
        frontier = nxt
    subs = sorted(found.values(), key=lambda H: (H.order, sorted(H.elements)))
    mu = _moebius_table(subs)
    _LATTICES[G] = (subs, mu)
    return subs, mu


_LATTICES: dict = {}


def _moebius_table(subs: Sequence[Subgroup]) -> dict:
    # top-down: mu(G,G) = 1, sum_{H <= K <= G} mu(K,G) = 0 for H < G
    mu = {}
    top = subs[-1]
    for H in reversed(subs):
        if H.elements == top.elements:
            mu[H.elements] = 1
            continue
        total = 0
        for K in subs:
            if K.order > H.order and K.order % H.order == 0 and H.elements < K.elements:
                total += mu[K.elements]
        mu[H.elements] = -total
    return mu


def moebius(G: FiniteAbelianGroup, H: Subgroup) -> int:
    """Moebius function mu(H, G) of the subgroup lattice."""
    subs, mu = _subgroup_lattice(G)
    try:
        return mu[H.elements]
    except KeyError:
        raise ValueError("H is not a subgroup of G") from None


def invariant_factors(G: FiniteAbelianGroup, elements: Iterable[GroupElement]) -> tuple:
    """Invariant factors (ascending) of a subgroup given by its element set."""
    orders = [G.element_order(g) for g in elements]
    if len(orders) == 1:
        return ()
    primary = []
    for p in _prime_factors(len(orders)):
        # t[j] = log_p #{x of p-power order : p^j x = 0} = sum_i min(j, e_i)
        t = [0]
        while p ** t[-1] < _p_part(len(orders), p):
            j = len(t)
            size = sum(1 for o in orders if _is_power_of(o, p) and p ** j % o == 0)
            t.append(round(math.log(size, p)))
        at_least = [t[j] - t[j - 1] for j in range(1, len(t))]  # #{i : e_i >= j}
        exps = []
        for j, c in enumerate(at_least, start=1):
            nxt = at_least[j] if j < len(at_least) else 0
            exps += [p ** j] * (c - nxt)
        primary.append(sorted(exps, reverse=True))
    width = max(len(x) for x in primary)
    inv = [math.prod(x[i] for x in primary if i < len(x)) for i in range(width)]
    return tuple(sorted(inv))


def _p_part(n: int, p: int) -> int:
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def _is_power_of(o: int, p: int) -> bool:
    while o % p == 0:
        o //= p
    return o == 1


def _prime_factors(n: int) -> list:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def count_injective_homs(H: FiniteAbelianGroup | None, G: FiniteAbelianGroup) -> int:
    """|Hom_0(H, G)|: injective homomorphisms from H into G.

    ``H=None`` stands for the trivial group.
    """
    if H is None:
        return 1
    # a hom is fixed by images of the cyclic generators, subject to n_i * img = 0
    choices = [[g for g, o in zip(G.elements, G.orders) if n % o == 0] for n in H.factors]
    count = 0
    for imgs in itertools.product(*choices):
        image = Subgroup.generated_by(G, imgs)
        if image.order == H.order:
            count += 1
    return count


@dataclass(frozen=True)
class DualCharacter:
    """psi(g) = sum_i a_i g_i / n_i in Q/Z."""

    group: FiniteAbelianGroup
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", self.group.reduce(self.coeffs))

    def __call__(self, g: GroupElement) -> Fraction:
        v = sum(Fraction(a * x, n) for a, x, n in zip(self.coeffs, g, self.group.factors))
        return v - math.floor(v)

    def order_of_value(self, g: GroupElement) -> int:
        """Order of psi(g) in Q/Z."""
        return self(g).denominator

    def is_trivial(self) -> bool:
        return not any(self.coeffs)

    def kernel(self) -> frozenset:
        return frozenset(g for g in self.group.elements if self(g) == 0)


def dual_characters(G: FiniteAbelianGroup) -> list:
    return [DualCharacter(G, a) for a in G.elements]
