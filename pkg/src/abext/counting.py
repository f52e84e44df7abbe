"""Counting functions C(chi) = prod_p p^{c(chi_p)}.

At a tame prime the exponent is a weight c_G on the division of the tame
inertia image; at primes dividing |G| it is an arbitrary wild weight of the
unit-part character.  Infinite places always contribute Nv^c = 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .groups import DualCharacter, FiniteAbelianGroup, Subgroup, dual_characters
from .units import (
    INF,
    GlobalCharacter,
    LocalCharacter,
    LocalSpec,
    composite_conductor_exponent,
    local_conductor_exponent,
)


class CountingFunctionError(ValueError):
    pass


@dataclass(frozen=True)
class CountingFunction:
    group: FiniteAbelianGroup
    name: str
    tame: dict  # Division -> positive int
    wild: Callable  # LocalCharacter -> int, must be pure
    _weights: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        G = self.group
        divs = set(G.divisions)
        if set(self.tame) != divs:
            raise CountingFunctionError("tame weights must be given on every nonidentity division")
        for d, w in self.tame.items():
            if int(w) != w or w < 1:
                raise CountingFunctionError(f"tame weight {w} on {sorted(d.elements)} is not a positive integer")
            for g in d.elements:
                self._weights[g] = int(w)
        self._weights[G.zero] = 0

    def tame_weight(self, g) -> int:
        return self._weights[tuple(g)]

    @property
    def m(self) -> int:
        return min(self.tame.values())

    @property
    def frakM(self) -> frozenset:
        m = self.m
        return frozenset(g for d, w in self.tame.items() if w == m for g in d.elements)

    def local_weight(self, c: Optional[LocalCharacter]) -> int:
        if c is None or c.level == 0:
            return 0
        if self.group.order % c.p:
            return self._weights[c.images[0]]
        return int(self.wild(c))

    def spec_weight(self, s: LocalSpec) -> int:
        if s.place == INF:
            return 0
        return self.local_weight(s.unit)

    def evaluate(self, chi: GlobalCharacter) -> int:
        chi.check_primitive()
        return math.prod(c.p ** self.local_weight(c) for c in chi.places)

    def restricted_fair_weight(self, s: LocalSpec) -> Fraction:
        """c(s)/m, the exponent in the local probability weight Nv^{-c/m}."""
        return Fraction(self.spec_weight(s), self.m)


def _by_division(G: FiniteAbelianGroup, f) -> dict:
    return {d: f(d) for d in G.divisions}


def conductor_counting(G: FiniteAbelianGroup) -> CountingFunction:
    return CountingFunction(G, "conductor", _by_division(G, lambda d: 1), local_conductor_exponent)


def _radical_wild(c: LocalCharacter) -> int:
    return 0 if c.is_trivial() else 1


def radical_counting(G: FiniteAbelianGroup) -> CountingFunction:
    return CountingFunction(G, "radical", _by_division(G, lambda d: 1), _radical_wild)


@dataclass(frozen=True)
class _DualSumWild:
    reps: tuple

    def __call__(self, c: LocalCharacter) -> int:
        return sum(composite_conductor_exponent(c, psi) for psi in self.reps)


def discriminant_counting(G: FiniteAbelianGroup) -> CountingFunction:
    n = G.order
    return CountingFunction(G, "discriminant", _by_division(G, lambda d: n - n // d.order),
                            _DualSumWild(tuple(dual_characters(G))))


def artin_counting(G: FiniteAbelianGroup, reps, name: str = "artin") -> CountingFunction:
    """Artin conductor of the representation sum of the given 1-dim characters."""
    reps = tuple(r if isinstance(r, DualCharacter) else DualCharacter(G, r) for r in reps)
    kernel = frozenset(G.elements)
    for psi in reps:
        kernel &= psi.kernel()
    if kernel != {G.zero}:
        raise CountingFunctionError("representation is not faithful; its Artin conductor "
                                    "vanishes on nontrivial elements")
    tame = _by_division(G, lambda d: sum(1 for psi in reps if psi(d.representative) != 0))
    return CountingFunction(G, name, tame, _DualSumWild(reps))


def projection_reps(G: FiniteAbelianGroup) -> list:
    """The sum of the coordinate projections f_i."""
    k = G.rank
    return [DualCharacter(G, tuple(int(i == j) for j in range(k))) for i in range(k)]


def tensor_plus_projection_reps(G: FiniteAbelianGroup) -> list:
    """(tensor product of the f_i) plus (sum of the f_i)."""
    return [DualCharacter(G, (1,) * G.rank)] + projection_reps(G)


def load_artin_reps(G: FiniteAbelianGroup, path) -> list:
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data.get("characters", data.get("reps"))
    if not isinstance(data, list) or not data:
        raise CountingFunctionError(f"{path}: expected a nonempty list of coefficient vectors")
    out = []
    for i, v in enumerate(data):
        if not isinstance(v, list) or len(v) != G.rank or not all(isinstance(a, int) for a in v):
            raise CountingFunctionError(f"{path}: entry {i} must be a list of {G.rank} integers")
        out.append(DualCharacter(G, tuple(v)))
    return out


def counting_by_name(G: FiniteAbelianGroup, spec: str) -> CountingFunction:
    """``conductor|radical|discriminant|artin:<file>``."""
    if spec == "conductor":
        return conductor_counting(G)
    if spec == "radical":
        return radical_counting(G)
    if spec == "discriminant":
        return discriminant_counting(G)
    if spec.startswith("artin:"):
        return artin_counting(G, load_artin_reps(G, spec[len("artin:"):]), name=spec)
    raise CountingFunctionError(f"unknown counting function {spec!r}")


@dataclass(frozen=True)
class FairnessReport:
    m: int
    frakM: frozenset
    fair: bool
    witness: Optional[int] = None

    @property
    def verdict(self) -> str:
        return "fair" if self.fair else "unfair"


def fairness(C: CountingFunction) -> FairnessReport:
    G = C.group
    M = C.frakM
    for r in sorted(d for d in range(1, G.exponent + 1) if G.exponent % d == 0):
        Gr = G.torsion_subgroup(r)
        gen = Subgroup.generated_by(G, [g for g in M if g in Gr.elements])
        if gen.elements != Gr.elements:
            return FairnessReport(C.m, M, False, r)
    return FairnessReport(C.m, M, True)


def is_fair(C: CountingFunction) -> bool:
    return fairness(C).fair
