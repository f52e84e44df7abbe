"""Unit groups (Z/f)^x, discrete logs, and characters of them into G.

Over Q a G-extension is the same thing as a primitive surjective character
(Z/f)^x -> G, and such a character is the CRT product of its components
(Z/p^k)^x -> G.  Those components are ``LocalCharacter`` values; a
``GlobalCharacter`` is a tuple of them.

Frobenius convention: at an unramified prime q the Frobenius element is the
Dirichlet value chi(q) = sum_l chi_l(q mod l^k).  The inverse convention would
permute local specifications inside each division, which leaves every
probability computed here unchanged.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Union

import sympy

from .groups import FiniteAbelianGroup, GroupElement, Subgroup, dual_characters
from .primes import factor, primitive_root, vp

INF = "inf"
Place = Union[int, str]


# --- unit group structure -------------------------------------------------


@dataclass(frozen=True)
class UnitGroupStructure:
    """(Z/modulus)^x as a product of cyclic groups <gen_i> of order ord_i.

    For composite moduli the generators are CRT lifts of the prime-power
    generators (each is 1 modulo the other prime powers).
    """

    modulus: int
    gens: tuple  # ((generator, order), ...)
    components: tuple = ()  # ((p, k, start_index), ...) for composite moduli

    @property
    def orders(self) -> tuple:
        return tuple(o for _, o in self.gens)

    @property
    def order(self) -> int:
        return math.prod(self.orders)


@lru_cache(maxsize=None)
def unit_group(modulus: int) -> UnitGroupStructure:
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    fac = factor(modulus) if modulus > 1 else ()
    if len(fac) <= 1:
        if not fac:
            return UnitGroupStructure(1, ())
        p, k = fac[0]
        return UnitGroupStructure(modulus, _prime_power_gens(p, k), ((p, k, 0),))
    gens, comps = [], []
    for p, k in fac:
        q = p ** k
        rest = modulus // q
        comps.append((p, k, len(gens)))
        for g, o in _prime_power_gens(p, k):
            # CRT lift: g mod q, 1 mod rest
            lift = (g * rest * pow(rest, -1, q) + q * pow(q, -1, rest)) % modulus
            gens.append((lift, o))
    return UnitGroupStructure(modulus, tuple(gens), tuple(comps))


def _prime_power_gens(p: int, k: int) -> tuple:
    q = p ** k
    if p == 2:
        if k == 1:
            return ()
        if k == 2:
            return ((q - 1, 2),)
        return ((q - 1, 2), (5, 2 ** (k - 2)))
    return ((primitive_root(p) % q, (p - 1) * p ** (k - 1)),)


def discrete_log(U: UnitGroupStructure, x: int) -> tuple:
    """Exponent vector e with prod gen_i^e_i = x (mod modulus)."""
    n = U.modulus
    if math.gcd(x, n) != 1:
        raise ValueError(f"{x} is not a unit modulo {n}")
    if n == 1:
        return ()
    out = [0] * len(U.gens)
    for p, k, start in U.components:
        out[start:start + len(_prime_power_gens(p, k))] = _dlog_prime_power(p, k, x % p ** k)
    return tuple(out)


@lru_cache(maxsize=1 << 16)
def _dlog_prime_power(p: int, k: int, x: int) -> tuple:
    q = p ** k
    x %= q
    if p == 2:
        if k == 1:
            return ()
        sign = 0 if x % 4 == 1 else 1
        if k == 2:
            return (sign,)
        y = x if sign == 0 else (-x) % q
        return (sign, sympy.discrete_log(q, y, 5) % 2 ** (k - 2))
    g = primitive_root(p)
    return (sympy.discrete_log(q, x, g),)


def _dlog_mod(p: int, k: int, x: int, r: int) -> int:
    """Discrete log of x in (Z/p^k)^x (odd p) reduced mod r, for r | group order."""
    n = (p - 1) * p ** (k - 1)
    q = p ** k
    if r == 1:
        return 0
    if r <= 64:
        h = pow(x, n // r, q)
        base = pow(primitive_root(p), n // r, q)
        acc = 1
        for j in range(r):
            if acc == h:
                return j
            acc = acc * base % q
        raise ArithmeticError("discrete log failed")
    return _dlog_prime_power(p, k, x)[0] % r


# --- local characters -----------------------------------------------------


@dataclass(frozen=True)
class LocalCharacter:
    """A character (Z/p^level)^x -> G given by the images of the canonical generators."""

    group: FiniteAbelianGroup
    p: int
    level: int
    images: tuple  # one GroupElement per generator of unit_group(p**level)
    _values: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    @property
    def gen_orders(self) -> tuple:
        return tuple(o for _, o in _prime_power_gens(self.p, self.level)) if self.level else ()

    @property
    def image(self) -> Subgroup:
        return Subgroup.generated_by(self.group, self.images)

    def is_trivial(self) -> bool:
        return not any(any(a) for a in self.images)

    def value_at(self, x: int) -> GroupElement:
        """chi_p(x mod p^level) for an integer x prime to p."""
        v = self._values.get(x)
        if v is not None:
            return v
        G, p, k = self.group, self.p, self.level
        if k == 0 or self.is_trivial():
            v = G.zero
        elif p == 2:
            exps = _dlog_prime_power(2, k, x % 2 ** k)
            v = G.zero
            for e, a in zip(exps, self.images):
                v = G.add(v, G.mul(e, a))
        else:
            a = self.images[0]
            e = _dlog_mod(p, k, x % p ** k, G.element_order(a))
            v = G.mul(e, a)
        self._values[x] = v
        return v

    def tame_generator_image(self) -> GroupElement:
        """Image of the generator of tame inertia (p odd, level 1)."""
        return self.images[0]

    def to_json(self) -> dict:
        return {"p": self.p, "level": self.level, "images": [list(a) for a in self.images]}


def conductor_exponent_from_orders(p: int, orders: tuple) -> int:
    """Conductor exponent of a character of Z_p^x from the orders of the
    generator images (canonical generators: a primitive root for odd p,
    (-1, 5) for p = 2)."""
    if p != 2:
        o = orders[0] if orders else 1
        return 0 if o == 1 else 1 + vp(o, p)
    if not orders or all(o == 1 for o in orders):
        return 0
    if len(orders) == 1 or orders[1] == 1:
        return 2
    return 2 + vp(orders[1], 2)


def local_conductor_exponent(c: LocalCharacter) -> int:
    G = c.group
    return conductor_exponent_from_orders(c.p, tuple(G.element_order(a) for a in c.images))


def composite_conductor_exponent(c: LocalCharacter, psi) -> int:
    """Conductor exponent of psi o c for a DualCharacter psi."""
    return conductor_exponent_from_orders(c.p, tuple(psi(a).denominator for a in c.images))


def level_cap(G: FiniteAbelianGroup, p: int) -> int:
    """Largest conductor exponent at p of any character Z_p^x -> G."""
    if G.order % p:
        return 1
    if p == 2:
        return vp(G.exponent, 2) + 2
    return vp(G.exponent, p) + 1


def local_characters(G: FiniteAbelianGroup, p: int, level: int) -> list:
    """All primitive characters of conductor exponent exactly ``level`` at p."""
    if level == 0:
        return [LocalCharacter(G, p, 0, ())]
    orders = [o for _, o in _prime_power_gens(p, level)]
    choices = [[g for g, r in zip(G.elements, G.orders) if o % r == 0] for o in orders]
    out = []
    for imgs in itertools.product(*choices):
        c_orders = tuple(G.element_order(a) for a in imgs)
        if conductor_exponent_from_orders(p, c_orders) == level:
            out.append(LocalCharacter(G, p, level, tuple(imgs)))
    return out


def all_local_characters(G: FiniteAbelianGroup, p: int) -> list:
    """Every character Z_p^x -> G, each at its own conductor level (trivial first)."""
    out = []
    for k in range(0, level_cap(G, p) + 1):
        out += local_characters(G, p, k)
    return out


def tame_local_characters(G: FiniteAbelianGroup, p: int) -> list:
    """Nontrivial characters of (Z/p)^x -> G for p not dividing |G|."""
    return [LocalCharacter(G, p, 1, (g,)) for g, r in zip(G.elements, G.orders)
            if r > 1 and (p - 1) % r == 0]


# --- global characters ----------------------------------------------------


class PrimitivityError(ValueError):
    pass


@dataclass(frozen=True)
class GlobalCharacter:
    group: FiniteAbelianGroup
    places: tuple  # LocalCharacters sorted by p, all nontrivial and primitive

    @classmethod
    def from_components(cls, G: FiniteAbelianGroup, comps) -> "GlobalCharacter":
        comps = tuple(sorted((c for c in comps if c.level > 0), key=lambda c: c.p))
        return cls(G, comps)

    @property
    def support(self) -> tuple:
        return tuple(c.p for c in self.places)

    def component(self, p: int) -> Optional[LocalCharacter]:
        for c in self.places:
            if c.p == p:
                return c
        return None

    def check_primitive(self) -> None:
        for c in self.places:
            if local_conductor_exponent(c) != c.level:
                raise PrimitivityError(f"component at {c.p} is not primitive at level {c.level}")

    def value(self, x: int) -> GroupElement:
        """Dirichlet value chi(x) for x prime to the conductor."""
        G = self.group
        v = G.zero
        for c in self.places:
            v = G.add(v, c.value_at(x))
        return v

    def to_json(self) -> dict:
        return {"group": list(self.group.factors), "places": [c.to_json() for c in self.places]}

    def serialize(self) -> str:
        return ";".join(f"{c.p}^{c.level}:" + "|".join(",".join(map(str, a)) for a in c.images)
                        for c in self.places)


def global_conductor(chi: GlobalCharacter) -> int:
    chi.check_primitive()
    return math.prod(c.p ** c.level for c in chi.places)


def discriminant(chi: GlobalCharacter) -> int:
    """|Disc| of the G-extension via the conductor-discriminant formula."""
    out = 1
    for c in chi.places:
        out *= c.p ** local_discriminant_exponent(c)
    return out


@lru_cache(maxsize=1 << 16)
def local_discriminant_exponent(c: LocalCharacter) -> int:
    """sum over dual characters psi of the conductor exponent of psi o c."""
    return sum(composite_conductor_exponent(c, psi) for psi in dual_characters(c.group))


def is_surjective(chi: GlobalCharacter) -> bool:
    gens = [a for c in chi.places for a in c.images]
    return Subgroup.generated_by(chi.group, gens).order == chi.group.order


# --- local specifications -------------------------------------------------


@dataclass(frozen=True)
class SplittingType:
    e: int
    fRes: int
    numPrimes: int


@dataclass(frozen=True)
class LocalSpec:
    """G-structured local algebra at a place: unit-part character plus the
    Frobenius filler (chi(-1) at infinity).  ``unit`` is None when unramified."""

    group: FiniteAbelianGroup
    place: Place
    unit: Optional[LocalCharacter]
    frob: GroupElement

    def __post_init__(self):
        G = self.group
        object.__setattr__(self, "frob", G.reduce(self.frob))
        if self.unit is not None and (self.unit.level == 0 or self.unit.is_trivial()):
            object.__setattr__(self, "unit", None)
        if self.place == INF:
            if self.unit is not None:
                raise ValueError("the infinite place has no unit part")
            if G.element_order(self.frob) > 2:
                raise ValueError("the value at -1 must have order <= 2")
        elif self.unit is not None and self.unit.p != self.place:
            raise ValueError("unit part lives at a different prime")

    @property
    def ramified(self) -> bool:
        return self.unit is not None

    def inertia(self) -> Subgroup:
        if self.unit is None:
            return self.group.trivial()
        return self.unit.image

    def decomposition(self) -> Subgroup:
        gens = (self.unit.images if self.unit else ()) + (self.frob,)
        return Subgroup.generated_by(self.group, gens)

    def to_json(self) -> dict:
        if self.place == INF:
            return {"infinity": list(self.frob)}
        d = self.unit.to_json() if self.unit else {"p": self.place, "level": 0, "images": []}
        d["frob"] = list(self.frob)
        return d


def localize(chi: GlobalCharacter, place: Place) -> LocalSpec:
    G = chi.group
    if place == INF:
        return LocalSpec(G, INF, None, chi.value(-1))
    p = int(place)
    frob = G.zero
    unit = None
    for c in chi.places:
        if c.p == p:
            unit = c
        else:
            frob = G.add(frob, c.value_at(p))
    return LocalSpec(G, p, unit, frob)


def splitting_type(s: LocalSpec, G: FiniteAbelianGroup | None = None) -> SplittingType:
    G = G or s.group
    e = s.inertia().order
    d = s.decomposition().order
    return SplittingType(e, d // e, G.order // d)


def all_local_specs(G: FiniteAbelianGroup, place: Place) -> list:
    """Every LocalSpec at a place (finite list)."""
    if place == INF:
        return [LocalSpec(G, INF, None, g) for g, o in zip(G.elements, G.orders) if o <= 2]
    p = int(place)
    if G.order % p:
        units = [None] + tame_local_characters(G, p)
    else:
        units = [None] + all_local_characters(G, p)[1:]
    return [LocalSpec(G, p, u, g) for u in units for g in G.elements]
