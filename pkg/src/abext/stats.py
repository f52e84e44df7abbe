"""Empirical probabilities of local behaviour, measured over enumerations.

An event is a conjunction of per-place predicates on the localization
(unit part, Frobenius filler).  One enumeration pass at the largest bound
records the C-values of every match, so estimates at smaller bounds in a
doubling schedule come for free.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .counting import CountingFunction, fairness
from .enumeration import _Engine
from .groups import FiniteAbelianGroup, Subgroup
from .units import INF, LocalSpec, SplittingType, all_local_specs


@dataclass(frozen=True)
class PlaceEvent:
    place: object
    label: str
    accept: Callable  # (unit LocalCharacter | None, frob) -> bool

    def __call__(self, unit, frob) -> bool:
        return self.accept(unit, frob)


def spec_event(s: LocalSpec) -> PlaceEvent:
    level = s.unit.level if s.unit else 0
    images = s.unit.images if s.unit else None

    def accept(unit, frob):
        if unit is None:
            return images is None and frob == s.frob
        return images is not None and unit.level == level and unit.images == images and frob == s.frob

    return PlaceEvent(s.place, f"spec@{s.place}", accept)


def ramified_at(p: int) -> PlaceEvent:
    return PlaceEvent(p, f"ramified@{p}", lambda unit, frob: unit is not None)


def unramified_at(p: int) -> PlaceEvent:
    return PlaceEvent(p, f"unramified@{p}", lambda unit, frob: unit is None)


def split_completely(p: int) -> PlaceEvent:
    return PlaceEvent(p, f"split@{p}", lambda unit, frob: unit is None and not any(frob))


def split_type(G: FiniteAbelianGroup, p: int, t: SplittingType) -> PlaceEvent:
    def accept(unit, frob):
        return _splitting(G, unit, frob) == t

    return PlaceEvent(p, f"type{(t.e, t.fRes, t.numPrimes)}@{p}", accept)


def unramified_with_primes(G: FiniteAbelianGroup, p: int, k: int) -> PlaceEvent:
    """Unramified at p and splitting into exactly k primes."""
    return PlaceEvent(p, f"unramified,{k}primes@{p}",
                      lambda unit, frob: unit is None and G.order // G.element_order(frob) == k)


def any_spec(specs: Sequence[LocalSpec]) -> PlaceEvent:
    """Disjunction of full specs at a single place."""
    evs = [spec_event(s) for s in specs]
    places = {s.place for s in specs}
    if len(places) != 1:
        raise ValueError("any_spec needs specs at exactly one place")
    return PlaceEvent(places.pop(), "any", lambda u, f: any(e(u, f) for e in evs))


def _splitting(G, unit, frob) -> SplittingType:
    inert = Subgroup.generated_by(G, unit.images if unit else ())
    dec = Subgroup.generated_by(G, (unit.images if unit else ()) + (frob,))
    return SplittingType(inert.order, dec.order // inert.order, G.order // dec.order)


def as_event(item) -> tuple:
    """Normalize a LocalSpec, PlaceEvent or a sequence of them into a conjunction."""
    if isinstance(item, (LocalSpec, PlaceEvent)):
        item = [item]
    out = []
    seen = set()
    for x in item:
        ev = spec_event(x) if isinstance(x, LocalSpec) else x
        if ev.place in seen:
            raise ValueError(f"two conditions at place {ev.place}; combine them with any_spec")
        seen.add(ev.place)
        out.append(ev)
    return tuple(out)


def conjoin(*events) -> tuple:
    """Conjunction of several events; conditions sharing a place are and-ed."""
    by_place: dict = {}
    for ev in events:
        for e in as_event(ev):
            by_place.setdefault(e.place, []).append(e)
    out = []
    for place, es in by_place.items():
        if len(es) == 1:
            out.append(es[0])
        else:
            out.append(PlaceEvent(place, "&".join(e.label for e in es),
                                  lambda u, f, es=tuple(es): all(e(u, f) for e in es)))
    return tuple(out)


# --- one-pass tallies --------------------------------------------------------


@dataclass
class EventTally:
    bound: int
    values: list  # sorted C-values of all surjective characters
    matches: dict  # event name -> sorted C-values of matches

    def count(self, name: Optional[str], X: int) -> int:
        if X > self.bound:
            raise ValueError(f"tally only covers C < {self.bound}")
        vals = self.values if name is None else self.matches[name]
        return bisect.bisect_left(vals, X)


def tally_events(C: CountingFunction, X: int, events: dict) -> EventTally:
    """Enumerate once at bound X and record which characters satisfy each event."""
    G = C.group
    events = {k: as_event(v) for k, v in events.items()}
    places = sorted({e.place for ev in events.values() for e in ev}, key=str)
    eng = _Engine(C, X)
    full = eng.full
    surj = G.order > 1
    zero, add = G.zero, G.add
    values: list = []
    matches = {k: [] for k in events}
    items = list(events.items())

    def visit(v, comps, mask):
        if surj and mask != full:
            return
        values.append(v)
        loc = {}
        for pl in places:
            unit, frob = None, zero
            if pl == INF:
                for c in comps:
                    frob = add(frob, c.value_at(-1))
            else:
                for c in comps:
                    if c.p == pl:
                        unit = c
                    else:
                        frob = add(frob, c.value_at(pl))
            loc[pl] = (unit, frob)
        for name, ev in items:
            if all(e.accept(*loc[e.place]) for e in ev):
                matches[name].append(v)

    eng.walk(visit)
    values.sort()
    for k in matches:
        matches[k].sort()
    return EventTally(X, values, matches)


# --- estimates ---------------------------------------------------------------


@dataclass(frozen=True)
class ProbabilityEstimate:
    numerator: int
    denominator: int
    bound: int
    schedule: tuple = ()  # ((X, numerator, denominator), ...)

    def __post_init__(self):
        if self.denominator <= 0:
            raise ZeroDivisionError(f"no characters in the conditioning event with C < {self.bound}")
        if not 0 <= self.numerator <= self.denominator:
            raise ValueError("numerator must lie in [0, denominator]")

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def values(self) -> list:
        return [(X, Fraction(a, b) if b else None) for X, a, b in self.schedule]

    def to_json(self) -> dict:
        return {"numerator": self.numerator, "denominator": self.denominator, "bound": self.bound,
                "value": _fmt(self.value),
                "schedule": [{"bound": X, "numerator": a, "denominator": b} for X, a, b in self.schedule]}


@dataclass(frozen=True)
class TheoryTarget:
    value: object  # Fraction when exact, float otherwise
    source: str

    def __post_init__(self):
        if float(self.value) < 0:
            raise ValueError("targets are nonnegative")


def _fmt(x) -> str | float:
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


def _schedule(X, schedule) -> list:
    bounds = sorted({int(b) for b in (schedule or [])} | {int(X)})
    if bounds[0] < 1:
        raise ValueError("bounds must be positive")
    return bounds


def conditional_probability(C: CountingFunction, X: int, event, given=(), schedule=None) -> ProbabilityEstimate:
    """#{event and given} / #{given} among surjective chi with C(chi) < X."""
    event, given = as_event(event), as_event(given)
    bounds = _schedule(X, schedule)
    both = conjoin(event, given)
    t = tally_events(C, bounds[-1], {"num": both, "den": given})
    sched = tuple((b, t.count("num", b), t.count("den", b)) for b in bounds)
    return ProbabilityEstimate(t.count("num", X), t.count("den", X), X, sched)


def empirical_probability(G: FiniteAbelianGroup, C: CountingFunction, X: int, specs=(),
                          schedule=None) -> ProbabilityEstimate:
    if C.group != G:
        raise ValueError("counting function is defined on a different group")
    return conditional_probability(C, X, specs, (), schedule)


# --- theory targets ---------------------------------------------------------


def spec_weight_value(C: CountingFunction, s: LocalSpec):
    """Nv^{-c(s)/m} (Fraction when exact)."""
    if s.place == INF:
        return Fraction(1)
    e = C.restricted_fair_weight(s)
    p = int(s.place)
    if e.denominator == 1:
        return Fraction(1, p ** int(e))
    return float(p) ** (-float(e))


def event_weight(C: CountingFunction, ev: PlaceEvent):
    """Sum of local weights of the specs at ev.place satisfying ev."""
    total = Fraction(0)
    for s in all_local_specs(C.group, ev.place):
        if ev.accept(s.unit, s.frob):
            total = total + spec_weight_value(C, s)
    return total


def ratio_target(C: CountingFunction, ev1, ev2) -> TheoryTarget:
    e1, e2 = as_event(ev1), as_event(ev2)
    num = Fraction(1)
    for e in e1:
        num = num * event_weight(C, e)
    den = Fraction(1)
    for e in e2:
        den = den * event_weight(C, e)
    if den == 0:
        raise ZeroDivisionError("the second event has no local specs")
    return TheoryTarget(num / den, "ratio of local weights")


def _rel(emp, target) -> Optional[float]:
    if emp is None:
        return None
    t = float(target)
    return abs(float(emp) - t) / t if t else abs(float(emp))


def _trend(errors: list) -> str:
    errs = [e for e in errors if e is not None]
    if len(errs) < 2:
        return "single-point"
    return "improving" if errs[-1] < errs[0] else "not-improving"


def _s0_flag(C: CountingFunction, *events) -> bool:
    """True when the events touch 2 while S0 = {2}: probabilities there see the obstruction."""
    if C.group.exponent % 8:
        return False
    return any(e.place == 2 for ev in events for e in as_event(ev))


def ratio_report(C: CountingFunction, bounds, ev1, ev2) -> dict:
    e1, e2 = as_event(ev1), as_event(ev2)
    bounds = _schedule(max(bounds), bounds)
    fair = fairness(C).fair
    target = ratio_target(C, e1, e2)
    t = tally_events(C, bounds[-1], {"a": e1, "b": e2})
    emp, errs = [], []
    for b in bounds:
        na, nb = t.count("a", b), t.count("b", b)
        r = Fraction(na, nb) if nb else None
        emp.append({"bound": b, "numerator": na, "denominator": nb, "ratio": None if r is None else float(r)})
        errs.append(_rel(r, target.value))
    return {"kind": "ratio", "counting": C.name, "group": list(C.group.factors), "fair": fair,
            "advisory": not fair, "s0_involved": _s0_flag(C, e1, e2),
            "empirical": emp, "target": _fmt(target.value), "relative_error": errs, "trend": _trend(errs)}


def chebotarev_targets(G: FiniteAbelianGroup) -> dict:
    """numPrimes -> proportion of elements whose order is |G|/numPrimes."""
    out: dict = {}
    for r, k in G.order_census().items():
        out[G.order // r] = out.get(G.order // r, 0) + Fraction(k, G.order)
    return dict(sorted(out.items()))


def chebotarev_report(C: CountingFunction, bounds, p: int) -> dict:
    G = C.group
    if isinstance(bounds, int):
        bounds = [bounds]
    bounds = _schedule(max(bounds), bounds)
    targets = chebotarev_targets(G)
    events = {k: [unramified_with_primes(G, p, k)] for k in targets}
    events["den"] = [unramified_at(p)]
    t = tally_events(C, bounds[-1], events)
    classes = []
    for k, tgt in targets.items():
        rows, errs = [], []
        for b in bounds:
            den = t.count("den", b)
            val = Fraction(t.count(k, b), den) if den else None
            rows.append({"bound": b, "numerator": t.count(k, b), "denominator": den,
                         "probability": None if val is None else float(val)})
            errs.append(_rel(val, tgt))
        classes.append({"num_primes": k, "empirical": rows, "target": _fmt(tgt),
                        "relative_error": errs, "trend": _trend(errs)})
    exact = not (p == 2 and G.exponent % 8 == 0)
    return {"kind": "chebotarev", "counting": C.name, "group": list(G.factors), "prime": p,
            "target_exact": exact, "classes": classes}


def independence_report(C: CountingFunction, bounds, ev1, ev2) -> dict:
    e1, e2 = as_event(ev1), as_event(ev2)
    p1, p2 = {e.place for e in e1}, {e.place for e in e2}
    if p1 & p2:
        raise ValueError("the two events must live on disjoint place sets")
    bounds = _schedule(max(bounds), bounds)
    t = tally_events(C, bounds[-1], {"a": e1, "b": e2, "ab": e1 + e2})
    rows, defects = [], []
    for b in bounds:
        n = t.count(None, b)
        if not n:
            rows.append({"bound": b, "total": 0})
            defects.append(None)
            continue
        pa, pb, pab = (Fraction(t.count(k, b), n) for k in ("a", "b", "ab"))
        d = abs(pab - pa * pb)
        rows.append({"bound": b, "total": n, "p1": float(pa), "p2": float(pb), "p12": float(pab),
                     "defect": float(d)})
        defects.append(float(d))
    ds = [d for d in defects if d is not None]
    if len(ds) < 2:
        trend = "single-point"
    elif all(a > b for a, b in zip(ds, ds[1:])):
        trend = "decreasing"
    else:
        trend = "not-decreasing"
    return {"kind": "independence", "counting": C.name, "group": list(C.group.factors),
            "fair": fairness(C).fair, "empirical": rows, "target": 0.0, "relative_error": defects,
            "trend": trend}
