import pytest
from hypothesis import given, settings, strategies as st

from abext.counting import conductor_counting, discriminant_counting, radical_counting, artin_counting, projection_reps
from abext.groups import FiniteAbelianGroup
from abext.units import INF, LocalSpec, all_local_specs, localize
from abext.viability import (e_group, find_witness, required_places, s0, sp, viability_exact, viability_search,
                             viable_partial, viable_specs_at_2)


def G(*f):
    return FiniteAbelianGroup(tuple(f))


def test_s0():
    assert s0(G(4)) == frozenset()
    assert s0(G(8)) == frozenset({2})
    assert s0(G(3)) == frozenset()
    assert s0(G(2, 16)) == frozenset({2})


def test_e_group():
    obs = e_group(G(8))
    assert len(obs.generators) == 1 and obs.epsilon(0) == (16,)
    assert obs.order() == 2 == sp(G(8))
    assert e_group(G(3)).order() == 1
    assert e_group(G(8, 8)).order() == 4 == sp(G(8, 8))
    with pytest.raises(ValueError):
        e_group(G(9), discriminant_counting(G(9)))


def test_e_group_independent_of_fair_counting():
    Gp = G(2, 8)
    ref = e_group(Gp, conductor_counting(Gp))
    for C in (radical_counting(Gp), artin_counting(Gp, projection_reps(Gp))):
        assert e_group(Gp, C).generators == ref.generators


@pytest.mark.parametrize("f", [(2,), (8,), (16,), (2, 8), (4, 8), (8, 8), (3, 8), (2, 2, 8), (32,), (64,)])
def test_obstruction_order_is_sp(f):
    Gp = G(*f)
    assert e_group(Gp).order() == 2 ** sum(1 for n in f if n % 8 == 0 and Gp.exponent % 8 == 0)


def _full(G, s2):
    return {2: s2, INF: LocalSpec(G, INF, None, G.zero)}


def test_exact_examples():
    Z8 = G(8)
    assert not viability_exact(Z8, None, _full(Z8, LocalSpec(Z8, 2, None, (1,))))
    assert viability_exact(Z8, None, _full(Z8, LocalSpec(Z8, 2, None, (0,))))
    with pytest.raises(ValueError):
        viability_exact(Z8, None, {2: LocalSpec(Z8, 2, None, (1,))})
    Z4 = G(4)
    assert viability_exact(Z4, None, {})


def test_search_examples():
    Z8 = G(8)
    inert = {2: LocalSpec(Z8, 2, None, (1,))}
    for B in (10 ** 3, 10 ** 4):
        assert viability_search(Z8, inert, B).status == "no-witness-below-bound"
    assert not viable_partial(Z8, inert)
    v = viability_search(Z8, {7: LocalSpec(Z8, 7, None, (1,))}, 10 ** 4)
    assert v.status == "viable"
    Z2 = G(2)
    ram3 = [s for s in all_local_specs(Z2, 3) if s.ramified and s.frob == (0,)][0]
    v = viability_search(Z2, {3: ram3}, 100)
    assert v.witness is not None and v.witness.serialize() == "3^1:1"


def test_split_at_2_has_witness():
    Z8 = G(8)
    v = viability_search(Z8, {2: LocalSpec(Z8, 2, None, (0,))}, 10 ** 5)
    assert v.status == "viable-with-witness"
    assert localize(v.witness, 2) == LocalSpec(Z8, 2, None, (0,))


def test_z8_classification():
    rows = viable_specs_at_2(G(8), 10 ** 5)
    assert len(rows) == 128
    unram = [r for r in rows if not r.spec.ramified]
    bad = sorted(r.spec.frob for r in unram if not r.exact)
    assert bad == [(1,), (3,), (5,), (7,)]
    for r in rows:
        if r.search.status == "viable-with-witness":
            assert r.exact
        if not r.exact:
            assert r.search.status == "no-witness-below-bound"


def test_z16_viable_fraction_matches_constant_sum():
    from abext.asymptotics import s0_factor, pole_order
    Z16 = G(16)
    rows = viable_specs_at_2(Z16, 10 ** 3)
    C = conductor_counting(Z16)
    n_viable = sum(1 for r in rows if r.exact)
    assert n_viable * sp(Z16) == len(rows)
    w = pole_order(C)
    direct = sum(2.0 ** -C.spec_weight(r.spec) for r in rows if r.exact) * 0.5 ** float(w)
    assert abs(float(s0_factor(C, w).mid) - direct) < 1e-12


def test_required_places():
    assert required_places(G(12)) == [2, 3, INF]


@settings(max_examples=15)
@given(st.sampled_from([(3,), (9,), (5,)]), st.sampled_from([2, 3, 5, 7]), st.data())
def test_odd_groups_every_spec_viable(f, p, data):
    Gp = G(*f)
    s = data.draw(st.sampled_from(all_local_specs(Gp, p)))
    assert viable_partial(Gp, {p: s})
    v = viability_search(Gp, {p: s}, 10 ** 5)
    assert v.status == "viable" and v.witness is not None
    assert localize(v.witness, p) == s


@settings(max_examples=10)
@given(st.data())
def test_witness_round_trip(data):
    Z8 = G(8)
    s = data.draw(st.sampled_from(all_local_specs(Z8, 2)))
    chi = find_witness(Z8, {2: s}, 3000)
    if chi is not None:
        full = {v: localize(chi, v) for v in required_places(Z8)}
        assert viability_exact(Z8, None, full)
        assert viable_partial(Z8, {2: s})
