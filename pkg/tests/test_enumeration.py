import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from abext.counting import conductor_counting, counting_by_name, discriminant_counting, radical_counting
from abext.enumeration import (CountTally, EnumerationBudgetError, EnumerationQuery, enumerate_characters,
                               enumeration_rows, enumeration_tally, fast_count, frobenius_census, split_budget)
from abext.groups import FiniteAbelianGroup
from abext.stats import tally_events, unramified_with_primes
from abext.units import discriminant, global_conductor
from conftest import CRITERION_GROUPS


def G(*f):
    return FiniteAbelianGroup(tuple(f))


def q(f, X, name="conductor"):
    Gp = G(*f)
    return EnumerationQuery(Gp, counting_by_name(Gp, name), X)


def test_quadratic_example():
    out = enumerate_characters(q((2,), 13))
    assert len(out) == 8 == oracles.count_fundamental_discriminants(13)
    assert sorted(global_conductor(c) for c in out) == [3, 4, 5, 7, 8, 8, 11, 12]


def test_cubic_example():
    out = enumerate_characters(q((3,), 10))
    assert sorted(global_conductor(c) for c in out) == [7, 7, 9, 9]


def test_empty_and_budget():
    assert enumerate_characters(q((4,), 1)) == []
    with pytest.raises(EnumerationBudgetError):
        enumerate_characters(q((2,), 1000), budget=10)
    with pytest.raises(ValueError):
        q((2,), 0)


def test_split_budget_examples():
    opts = split_budget(conductor_counting(G(3)), 10)
    assert sorted({(a.p, a.level) for a in opts}) == [(3, 2), (7, 1)]
    opts = split_budget(discriminant_counting(G(2)), 5)
    assert sorted({a.p ** a.weight for a in opts}) == [3, 4]
    assert split_budget(conductor_counting(G(2)), 2) == []


@pytest.mark.parametrize("f,F", [((2,), 150), ((3,), 150), ((4,), 150), ((2, 2), 120), ((8,), 100),
                                 ((9,), 150), ((2, 4), 100)])
def test_enumeration_matches_brute_force(f, F):
    """Characters, conductors, discriminants and radicals against an independent unit-group search."""
    brute = oracles.brute_characters(f, F)
    for name, col in (("conductor", 0), ("discriminant", 1), ("radical", 2)):
        X = 10 ** 6 if name == "discriminant" else F + 1
        ours = []
        for v, cond, disc, supp, ser, chi in enumeration_rows(q(f, X, name)):
            if cond <= F:
                ours.append((v, cond, disc, tuple(sorted((a, tuple(chi.value(a))) for a in oracles.units(cond)))))
        ref = sorted((b[col], b[0], b[1], b[3]) for b in brute if b[col] < X)
        assert sorted(ours) == ref, name


def test_canonical_order_and_determinism():
    a = [c.serialize() for c in enumerate_characters(q((2, 2), 400))]
    b = [c.serialize() for c in enumerate_characters(q((2, 2), 400))]
    assert a == b
    rows = enumeration_rows(q((4,), 500, "discriminant"))
    keys = [(r[0], r[1], r[4]) for r in rows]
    assert keys == sorted(keys)


@pytest.mark.parametrize("f", CRITERION_GROUPS)
@pytest.mark.parametrize("name", ["conductor", "radical", "discriminant"])
def test_fast_count_equals_enumeration(f, name):
    qq = q(f, 3000, name)
    t = fast_count(qq)
    e = enumeration_tally(qq)
    assert t.as_dict() == e.as_dict()


def test_fast_count_small_totals():
    assert fast_count(q((2,), 13)).total == 8
    assert fast_count(q((3,), 100)).total == len([b for b in oracles.brute_characters((3,), 99)])
    assert fast_count(q((2, 2), 50)).total == len(oracles.brute_characters((2, 2), 49))


def test_fast_count_rejects_pins():
    from abext.units import LocalSpec
    Gp = G(2)
    qq = EnumerationQuery(Gp, conductor_counting(Gp), 100, {3: LocalSpec(Gp, 3, None, (0,))})
    with pytest.raises(ValueError):
        fast_count(qq)


@given(st.sampled_from([(2,), (3,), (4,), (2, 2)]), st.integers(1, 4000), st.integers(1, 4000))
def test_counts_are_monotone(f, x, y):
    lo, hi = sorted((x, y))
    t = fast_count(q(f, hi))
    assert t.count_below(lo) <= t.total
    assert fast_count(q(f, lo)).total == t.count_below(lo)


def test_buckets():
    t1 = fast_count(q((3,), 5000), bucket_width=1)
    t100 = fast_count(q((3,), 5000), bucket_width=100)
    assert t1.total == t100.total
    assert t100.count_below(1000) == t1.count_below(1000)
    tally = CountTally.from_values([1, 5, 5, 101], 100)
    assert tally.as_dict() == {0: 3, 100: 1}


@pytest.mark.parametrize("f,p", [((9,), 2), ((9,), 19), ((4,), 5), ((2, 2), 3), ((8,), 2), ((3,), 3)])
def test_frobenius_census_matches_enumeration(f, p):
    Gp = G(*f)
    C = conductor_counting(Gp)
    bounds = [2000, 20000]
    census = frobenius_census(C, bounds, p)
    ev = {k: [unramified_with_primes(Gp, p, k)] for k in {Gp.order // r for r in Gp.orders}}
    tally = tally_events(C, bounds[-1], ev)
    for X in bounds:
        for k in ev:
            want = tally.count(k, X)
            got = sum(c for g, c in census[X].items() if Gp.order // Gp.element_order(g) == k)
            assert got == want


def test_tame_discriminant_closed_form_small():
    for f in CRITERION_GROUPS:
        Gp = G(*f)
        for chi in enumerate_characters(q(f, 500)):
            d = discriminant(chi)
            for c in chi.places:
                if Gp.order % c.p:
                    e = Gp.element_order(c.images[0])
                    v = 0
                    while d % c.p == 0:
                        d //= c.p
                        v += 1
                    assert v == Gp.order - Gp.order // e
