"""Grunwald-Wang obstruction over Q.

Over Q the special dyadic set S0 is {2} exactly when 8 | exp(G).  The
obstruction group is generated by the classes of 2^(n_i/2) in the i-th
coordinate for every cyclic factor with 8 | n_i, and a full set of local
data is realized globally iff the product of the local characters kills
every generator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .counting import CountingFunction, conductor_counting, fairness
from .enumeration import _Engine
from .groups import FiniteAbelianGroup
from .units import INF, GlobalCharacter, LocalSpec, all_local_specs, localize

# over Q: eta_2 = 0 and eta_3 = sqrt(2) is irrational, so s_K = 2 and b_0 = 2 + eta_2 = 2
S_K = 2
B0 = 2


def s0(G: FiniteAbelianGroup) -> frozenset:
    return frozenset({2}) if G.exponent % 2 ** (S_K + 1) == 0 else frozenset()


def sp(G: FiniteAbelianGroup) -> int:
    """Sp(Q, G): -1, 2 and -2 are non-squares in Q, so this is 2^h."""
    return 2 ** sum(1 for n in G.factors if n % 2 ** (S_K + 1) == 0)


@dataclass(frozen=True)
class ObstructionData:
    group: FiniteAbelianGroup
    s_K: int
    S0: frozenset
    b0: int
    basis: tuple  # S-unit basis: -1 then the primes of S0
    generators: tuple  # per generator, per factor i: exponent vector of eps_i on ``basis``

    def epsilon(self, gen_index: int) -> tuple:
        """eps_i as rationals for one generator."""
        out = []
        for vec in self.generators[gen_index]:
            x = Fraction(1)
            for b, e in zip(self.basis, vec):
                x *= Fraction(b) ** e
            out.append(x)
        return tuple(out)

    def order(self) -> int:
        """|<generators>| inside prod Q^x/Q^x^{n_i}."""
        G = self.group
        seen = {tuple((0,) * len(self.basis) for _ in G.factors)}
        frontier = list(seen)
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.generators:
                    y = tuple(tuple((a + b) % n if j > 0 else (a + b) % 2 for j, (a, b) in enumerate(zip(u, v)))
                              for u, v, n in zip(x, g, G.factors))
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return len(seen)

    def to_json(self) -> dict:
        return {"s_K": self.s_K, "S0": sorted(self.S0), "b0": self.b0, "basis": list(self.basis),
                "generators": [[list(v) for v in g] for g in self.generators], "order": self.order()}


def e_group(G: FiniteAbelianGroup, C: Optional[CountingFunction] = None) -> ObstructionData:
    if C is not None:
        if C.group != G:
            raise ValueError("counting function is defined on a different group")
        if not fairness(C).fair:
            raise ValueError("the obstruction group is only defined here for fair counting functions")
    S0 = s0(G)
    basis = (-1,) + tuple(sorted(S0))
    gens = []
    if S0:
        for i, n in enumerate(G.factors):
            if n % 8 == 0:
                vec = []
                for j, m in enumerate(G.factors):
                    vec.append((0, m // 2) if j == i else (0, 0))
                gens.append(tuple(vec))
    return ObstructionData(G, S_K, S0, B0, basis, tuple(gens))


def required_places(G: FiniteAbelianGroup) -> list:
    ps = sorted({2} | {p for p in range(2, G.order + 1) if G.order % p == 0
                       and all(p % d for d in range(2, p))})
    return ps + [INF]


def local_value(s: LocalSpec, x: Fraction):
    """phi_v(x) for the idelic local character with data s (x a nonzero rational)."""
    G = s.group
    if s.place == INF:
        return s.frob if x < 0 else G.zero
    p = int(s.place)
    num, den = x.numerator, x.denominator
    b = 0
    while num % p == 0:
        num //= p
        b += 1
    while den % p == 0:
        den //= p
        b -= 1
    v = G.mul(b, s.frob)
    if s.unit is not None:
        k = s.unit.level
        u = num * pow(den, -1, p ** k) % p ** k
        v = G.add(v, G.neg(s.unit.value_at(u)))
    return v


def _pairing(obs: ObstructionData, specs: dict) -> list:
    """For each generator: sum over places and factors of phi_v(eps_i)_i / n_i in Q/Z."""
    G = obs.group
    out = []
    for k in range(len(obs.generators)):
        eps = obs.epsilon(k)
        total = Fraction(0)
        for s in specs.values():
            for i, (e, n) in enumerate(zip(eps, G.factors)):
                if e != 1:
                    total += Fraction(local_value(s, e)[i], n)
        out.append(total - (total.numerator // total.denominator))
    return out


def viability_exact(G: FiniteAbelianGroup, C: Optional[CountingFunction], specs: dict) -> bool:
    """Full local data at 2, every p | |G| and infinity: viable iff the obstruction pairing vanishes."""
    obs = e_group(G, C)
    if not obs.generators:
        return True
    missing = [v for v in required_places(G) if v not in specs]
    if missing:
        raise ValueError(f"viability_exact needs specs at {missing}")
    return all(t == 0 for t in _pairing(obs, specs))


def viable_partial(G: FiniteAbelianGroup, specs: dict, C: Optional[CountingFunction] = None) -> bool:
    """Viability of specs on an arbitrary finite S: some completion at the
    missing required places passes the exact test."""
    obs = e_group(G, C)
    if not obs.generators or 2 not in specs:
        return True
    missing = [v for v in required_places(G) if v not in specs]
    choices = [all_local_specs(G, v) for v in missing]
    for combo in itertools.product(*choices):
        full = dict(specs)
        full.update({s.place: s for s in combo})
        if all(t == 0 for t in _pairing(obs, full)):
            return True
    return False


@dataclass(frozen=True)
class ViabilityVerdict:
    status: str  # viable | inviable | viable-with-witness | no-witness-below-bound
    witness: Optional[GlobalCharacter] = None
    bound: Optional[int] = None

    def to_json(self) -> dict:
        d = {"status": self.status, "bound": self.bound}
        if self.witness is not None:
            d["witness"] = self.witness.serialize()
        return d


def find_witness(G: FiniteAbelianGroup, specs: dict, bound: int) -> Optional[GlobalCharacter]:
    """Smallest-conductor surjective character below bound localizing to specs."""
    C = conductor_counting(G)
    eng = _Engine(C, bound, specs)
    full = eng.full
    best = []

    def visit(v, comps, mask):
        if mask != full and G.order > 1:
            return
        if not eng.matches_pins(comps):
            return
        chi = GlobalCharacter(G, tuple(comps))
        key = (v, chi.serialize())
        if not best or key < best[0][0]:
            best[:] = [(key, chi)]

    eng.walk(visit)
    return best[0][1] if best else None


def viability_search(G: FiniteAbelianGroup, specs: dict, bound: int) -> ViabilityVerdict:
    chi = find_witness(G, specs, bound)
    if 2 not in specs or not s0(G):
        # viable by the criterion; a witness is attached when one is this small
        return ViabilityVerdict("viable", chi, bound)
    if chi is None:
        return ViabilityVerdict("no-witness-below-bound", None, bound)
    for place, s in specs.items():
        if localize(chi, place) != s:
            raise AssertionError("witness does not localize to the requested specs")
    return ViabilityVerdict("viable-with-witness", chi, bound)


@dataclass
class SpecVerdict:
    spec: LocalSpec
    exact: bool
    search: ViabilityVerdict

    def to_json(self) -> dict:
        return {"spec": self.spec.to_json(), "exact": "viable" if self.exact else "inviable",
                "search": self.search.to_json()}


class ViabilityDisagreement(RuntimeError):
    pass


def viable_specs_at_2(G: FiniteAbelianGroup, bound: int) -> list:
    """Every LocalSpec at 2 tagged by the exact criterion and by a witness search.

    One enumeration pass at conductor < bound collects the smallest witness for
    every spec at 2; a witness for an exactly-inviable spec is a hard failure."""
    specs = all_local_specs(G, 2)
    if not s0(G):
        return [SpecVerdict(s, True, ViabilityVerdict("viable", None, bound)) for s in specs]
    C = conductor_counting(G)
    eng = _Engine(C, bound)
    full = eng.full
    best: dict = {}

    def visit(v, comps, mask):
        if mask != full:
            return
        unit = None
        frob = G.zero
        for c in comps:
            if c.p == 2:
                unit = c
            else:
                frob = G.add(frob, c.value_at(2))
        key = (unit.level, unit.images) if unit else None, frob
        cur = best.get(key)
        if cur is None or v < cur[0]:
            best[key] = (v, tuple(comps))
        elif v == cur[0]:
            chi = GlobalCharacter(G, tuple(comps))
            if chi.serialize() < GlobalCharacter(G, cur[1]).serialize():
                best[key] = (v, tuple(comps))

    eng.walk(visit)
    out = []
    for s in specs:
        key = ((s.unit.level, s.unit.images) if s.unit else None, s.frob)
        exact = viable_partial(G, {2: s})
        if key in best:
            chi = GlobalCharacter(G, best[key][1])
            if not exact:
                raise ViabilityDisagreement(f"witness {chi.serialize()} realizes a spec the exact test rejects")
            full_specs = {v: localize(chi, v) for v in required_places(G)}
            if not viability_exact(G, None, full_specs):
                raise ViabilityDisagreement(f"exact test rejects the localizations of {chi.serialize()}")
            verdict = ViabilityVerdict("viable-with-witness", chi, bound)
        else:
            verdict = ViabilityVerdict("no-witness-below-bound", None, bound)
        out.append(SpecVerdict(s, exact, verdict))
    return out
