import json
import random

import pytest
from hypothesis import given, strategies as st

from picgrp import intlab
from picgrp.burnside import BurnsideElement, CyclicGroupContext, divisors, tau
from picgrp.homology import gset, pullback, pushforward
from picgrp.mackey import (
    PERSTEP,
    MackeyTable,
    RestrictionTuple,
    StructuralError,
    are_isomorphic,
    aut_group,
    box_closed,
    box_presentation,
    box_quotient,
    build_table,
    burnside_table,
    change_of_basis_witness,
    count_classes,
    extract_tuple,
    find_isomorphism,
    identity_change,
    invertible_tuples,
    normalize,
    preferred_iso,
    shift_move,
    sign_move,
    u_functor,
    unit_action,
)
from picgrp.picalg import pic_burnside
from strategies import invertible_tuples as tuple_strategy

BOX_N = [2, 3, 4, 5, 6, 8, 9, 10, 12]


def T(n, *a, variant="product"):
    return RestrictionTuple(CyclicGroupContext(n), variant, a)


@pytest.mark.parametrize("n", [1, 2, 4, 6, 8, 12, 18])
def test_burnside_table_matches_gsets(n):
    """A^1 agrees with Burnside groups of the C_n-sets C_n/C_m computed from points."""
    table = burnside_table(n)
    for m in divisors(n):
        src = gset(n, (m,))
        labels = [m // k for _, k in src.basis]  # (orbit, k) <-> x^m_{m/k}
        order = [labels.index(q) for q in divisors(m)]
        for l in divisors(m)[1:]:
            dst = gset(n, (m // l,))
            dlabels = [(m // l) // k for _, k in dst.basis]
            dorder = [dlabels.index(q) for q in divisors(m // l)]
            q = n // m
            pb = pullback(dst, src, lambda p, q=q: (p[0] % q,))
            mat = [[pb[i][j] for j in order] for i in dorder]
            assert mat == table.restriction[(m, l)]
            pf = pushforward(dst, src, lambda p, q=q: (p[0] % q,))
            mat = [[pf[i][j] for j in dorder] for i in order]
            assert mat == table.transfer[(m // l, l)]


def test_example_tables():
    t = build_table(T(5, 2))
    assert t.restriction[(5, 5)] == [[2, 5]]
    t = build_table(T(4, 1, 3))
    assert t.restriction_on_generator(4, 4) == [3]
    assert t.restriction_on_generator(4, 2) == [1, 0]
    t = build_table(T(6, 1, 2, 5))
    assert t.restriction_on_generator(6, 6) == [10]
    assert t.restriction_on_generator(6, 3) == [2, 0]


@given(st.sampled_from([2, 4, 6, 8, 9, 12, 16, 18]).flatmap(tuple_strategy))
def test_product_tables_are_mackey_functors(a):
    assert build_table(a, validate=False).check_axioms() == []
    assert extract_tuple(build_table(a)) == a


def test_non_invertible_tuples_still_build():
    assert build_table(T(6, 2, 3, 4)).check_axioms() == []


@pytest.mark.parametrize("a", [(1, 3, 3), (2, 2, 6), (1, 2, 2)])
def test_perstep_tables(a):
    t = T(6, *a, variant=PERSTEP)
    table = build_table(t)
    assert extract_tuple(table, PERSTEP) == t
    assert table.restriction_on_generator(6, 6) == [a[2]]


def test_perstep_requires_divisibility():
    with pytest.raises(ValueError, match="e=2, d=6"):
        T(6, 2, 3, 3, variant=PERSTEP)


def test_tuple_validation():
    with pytest.raises(ValueError):
        T(6, 1, 2)
    with pytest.raises(ValueError):
        T(6, 1, 0, 1)
    with pytest.raises(ValueError):
        RestrictionTuple.from_dict(6, {4: 1})
    assert not T(6, 1, 3, 1).invertible


def test_normalize_examples():
    assert normalize(T(7, 5)).a == (2,)
    assert normalize(T(8, 1, 3, 5)).a == (1, 1, 3)
    with pytest.raises(ValueError):
        normalize(T(5, 5))


@given(st.sampled_from([5, 7, 9, 12, 15]).flatmap(lambda n: st.tuples(tuple_strategy(n), tuple_strategy(n))))
def test_isomorphism_criterion_matches_search(ab):
    a, b = ab
    found = find_isomorphism(build_table(b), build_table(a))
    assert (found is not None) == are_isomorphic(a, b)
    if found is not None:
        assert found.transports(build_table(a), build_table(b))


@pytest.mark.parametrize("n", [1, 2, 4, 5, 7, 8, 9, 10])
def test_class_count_by_search(n):
    reps = []
    for t in invertible_tuples(n):
        table = build_table(t)
        if not any(find_isomorphism(r, table) for r in reps):
            reps.append(table)
    assert len(reps) == pic_burnside(n).order


@pytest.mark.parametrize("n", range(1, 25))
def test_class_count(n):
    assert count_classes(n) == pic_burnside(n).order


def test_class_count_examples():
    assert count_classes(5) == 2
    assert count_classes(12) == 2
    assert count_classes(9) == 3


@pytest.mark.parametrize("n", BOX_N)
def test_box_presentation_matches_closed_form(n):
    rng = random.Random(1000 + n)
    tuples = list(invertible_tuples(n))
    for _ in range(6):
        a, b = rng.choice(tuples), rng.choice(tuples)
        q = box_quotient(a, b)
        closed = build_table(box_closed(a, b))
        assert q.witness.transports(q.raw, closed)
        assert q.table == closed


def test_box_examples():
    assert box_closed(T(5, 2), T(5, 2)).a == (4,)
    assert box_presentation(T(5, 2), T(5, 2)).restriction[(5, 5)] == [[4, 5]]
    assert box_presentation(T(4, 1, 3), T(4, 1, 1)) == build_table(T(4, 1, 3))
    assert box_presentation(T(6, 1, 1, 1), T(6, 1, 2, 5)) == build_table(T(6, 1, 2, 5))


def test_box_unit():
    a = T(12, 1, 2, 3, 5, 7)
    assert box_presentation(RestrictionTuple.trivial(12), a) == build_table(a)


def test_moves():
    c = T(5, 2)
    f, new = shift_move(c, 5, 1)
    assert new.a == (7,) and f.transports(build_table(c), build_table(new))
    f, new = sign_move(c, [5])
    assert new.a == (-2,) and f.transports(build_table(c), build_table(new))


@given(st.sampled_from([5, 6, 7, 8, 9, 10, 12]).flatmap(tuple_strategy))
def test_witness_transports(a):
    b = normalize(a)
    w = change_of_basis_witness(a, b)
    assert w.transports(build_table(a), build_table(b))
    assert change_of_basis_witness(b, a).transports(build_table(b), build_table(a))
    assert w.inverse().transports(build_table(b), build_table(a))


def test_witness_none_for_non_isomorphic():
    assert change_of_basis_witness(T(7, 2), T(7, 3)) is None


@given(st.sampled_from([5, 6, 8, 9, 10, 12]).flatmap(tuple_strategy))
def test_preferred_iso_is_coherent(a):
    ctx = a.ctx
    p1 = preferred_iso(a)
    p2 = preferred_iso(a, order=list(reversed(ctx.divisors[1:])), signs_first=True)
    rng = random.Random(str(a))
    order = list(ctx.divisors[1:])
    rng.shuffle(order)
    p3 = preferred_iso(a, order=order)
    assert p1.matrices == p2.matrices == p3.matrices
    assert p1.matrices[1] == [[1]]
    assert p1.transports(build_table(a), build_table(normalize(a)))


def test_preferred_iso_identity_on_normalized():
    a = T(12, 1, 1, 1, 1, 5)
    assert preferred_iso(a).is_identity


@pytest.mark.parametrize("n", [1, 3, 5, 9, 15])
def test_aut_group_odd(n):
    auts = aut_group(n)
    assert len(auts) == 2
    assert any(f.is_identity for f in auts)


@pytest.mark.parametrize("n", [2, 4, 6, 12])
def test_aut_group_even(n):
    auts = aut_group(n)
    assert len(auts) == 4
    table = burnside_table(n)
    f = unit_action(table, tau(n))
    # top level: x^n_1 -> x^n_2 - x^n_1
    col = intlab.column(f.matrices[n], 0)
    assert col[0] == -1 and col[divisors(n).index(2)] == 1
    assert f.compose(f).is_identity
    minus = unit_action(table, -BurnsideElement.one(n))
    assert all(m == [[-x for x in row] for row in intlab.identity(len(m))] for m in minus.matrices.values())


@given(st.sampled_from([4, 6, 8, 12]).flatmap(lambda n: st.tuples(tuple_strategy(n), st.data())))
def test_module_action(ad):
    a, data = ad
    u = u_functor(a)
    ctx = a.ctx
    gen = st.lists(st.integers(-3, 3), min_size=len(ctx.divisors), max_size=len(ctx.divisors))
    x = BurnsideElement(ctx, tuple(data.draw(gen)))
    y = BurnsideElement(ctx, tuple(data.draw(gen)))
    v = data.draw(gen)
    assert u.act(x * y, v) == u.act(x, u.act(y, v))
    assert u.act(BurnsideElement.one(ctx), v) == list(v)


def test_json_roundtrip():
    t = build_table(T(6, 1, 2, 5))
    text = t.to_json()
    assert MackeyTable.from_dict(json.loads(text)) == t
    assert set(json.loads(text)["levels"]) == {"1", "2", "3", "6"}
    raw = box_quotient(T(4, 1, 3), T(4, 1, 3)).raw
    assert MackeyTable.from_dict(json.loads(raw.to_json())) == raw


def test_broken_table_rejected():
    t = build_table(T(5, 2))
    bad = MackeyTable(t.ctx, t.bases, t.transfer, {(5, 5): [[3, 4]]})
    assert bad.check_axioms()
    with pytest.raises(StructuralError):
        bad.validate()


def test_identity_change_transports():
    t = build_table(T(8, 1, 3, 5))
    assert identity_change(8).transports(t, t)
    assert not identity_change(8).transports(t, build_table(T(8, 1, 1, 1)))
