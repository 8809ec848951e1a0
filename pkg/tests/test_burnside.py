import random
from math import gcd

import pytest
from hypothesis import given, strategies as st

from picgrp.burnside import (
    BurnsideElement,
    CyclicGroupContext,
    GhostVector,
    cfb_sum,
    divisors,
    ghost,
    ghost_inverse,
    is_unit,
    mark_of_orbit,
    restrict,
    satisfies_cfb,
    tau,
    totient,
    units,
    units_closed_form,
    witt_ghost,
)
from strategies import burnside_elements


def orbit_points(n, m):
    return list(range(n // m))


def fixed_points(n, m, k):
    """Points of Z/(n/m) fixed by the generator of C_k, which acts by + n/k."""
    q = n // m
    return sum(1 for x in orbit_points(n, m) if (x + n // k) % q == x)


def product_orbits(n, a, b):
    """Orbit decomposition of C_n/C_a x C_n/C_b by brute force: {stabilizer order: count}."""
    qa, qb = n // a, n // b
    seen, out = set(), {}
    for x in range(qa):
        for y in range(qb):
            if (x, y) in seen:
                continue
            size, p = 0, (x, y)
            while p not in seen:
                seen.add(p)
                p = ((p[0] + 1) % qa, (p[1] + 1) % qb)
                size += 1
            out[n // size] = out.get(n // size, 0) + 1
    return out


@pytest.mark.parametrize("n", [1, 2, 6, 12, 30])
def test_marks_match_fixed_point_count(n):
    for m in divisors(n):
        for k in divisors(n):
            assert mark_of_orbit(n, m, k) == fixed_points(n, m, k)


def test_mark_examples():
    assert mark_of_orbit(6, 3, 3) == 2
    assert mark_of_orbit(6, 3, 2) == 0
    assert ghost(BurnsideElement.one(4)).marks == (1, 1, 1)


@pytest.mark.parametrize("n", [2, 4, 6, 9, 12, 20])
def test_multiplication_matches_orbit_products(n):
    for a in divisors(n):
        for b in divisors(n):
            prod = BurnsideElement.orbit(n, a) * BurnsideElement.orbit(n, b)
            assert prod.as_dict() == {m: product_orbits(n, a, b).get(m, 0) for m in divisors(n)}


def test_product_orbit_count_example():
    # C_6/C_1 x C_6/C_2: 6*3 points in orbits of size 6
    assert product_orbits(6, 1, 2) == {1: 3}
    assert product_orbits(12, 4, 6) == {2: gcd(12 // 4, 12 // 6)}


@given(st.integers(1, 24).flatmap(lambda n: st.tuples(*[burnside_elements(n)] * 3)))
def test_ring_axioms(xyz):
    x, y, z = xyz
    one = BurnsideElement.one(x.ctx)
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z
    assert x * one == x


@given(st.integers(1, 30).flatmap(lambda n: st.tuples(burnside_elements(n), burnside_elements(n))))
def test_ghost_is_ring_map(xy):
    x, y = xy
    assert ghost(x * y) == ghost(x) * ghost(y)
    assert ghost(x + y).marks == tuple(a + b for a, b in zip(ghost(x).marks, ghost(y).marks))
    assert ghost_inverse(ghost(x)) == x


@given(st.integers(1, 30).flatmap(burnside_elements))
def test_ghost_images_satisfy_cfb(x):
    assert satisfies_cfb(ghost(x))


def test_cfb_rejects():
    v = GhostVector.from_dict(2, {1: 1, 2: 0})
    assert cfb_sum(v, 1) == 1 and not satisfies_cfb(v)
    assert ghost_inverse(v) is None


@given(st.integers(1, 30), st.data())
def test_cfb_iff_ghost_inverse(n, data):
    ctx = CyclicGroupContext(n)
    marks = data.draw(st.lists(st.integers(-8, 8), min_size=len(ctx.divisors), max_size=len(ctx.divisors)))
    v = GhostVector(ctx, tuple(marks))
    assert satisfies_cfb(v) == (ghost_inverse(v) is not None)


@pytest.mark.parametrize("n", range(1, 41))
def test_units_search_matches_closed_form(n):
    assert sorted(u.coeffs for u in units(n)) == sorted(u.coeffs for u in units_closed_form(n))


def test_units_six():
    us = {str(u) for u in units(6)}
    assert us == {"[C6/C6]", "-[C6/C6]", "[C6/C3] - [C6/C6]", "-[C6/C3] + [C6/C6]"}


@pytest.mark.parametrize("n", [2, 4, 6, 10, 12])
def test_tau_squares_to_one(n):
    t = tau(n)
    assert t * t == BurnsideElement.one(n)
    assert is_unit(t)
    assert ghost(t).as_dict() == {k: (1 if (n // 2) % k == 0 else -1) for k in divisors(n)}


def test_tau_needs_even():
    with pytest.raises(ValueError):
        tau(5)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_witt_ghost_prime(p):
    rng = random.Random(p)
    for _ in range(20):
        ae, ag = rng.randint(-5, 5), rng.randint(-5, 5)
        x = BurnsideElement.from_dict(p, {1: ae, p: ag})
        w = witt_ghost(x)
        assert w.mark(1) == ag**p + p * ae
        assert w.mark(p) == ag


@given(st.sampled_from([4, 6, 8, 12, 18, 20]).flatmap(lambda n: st.tuples(burnside_elements(n), burnside_elements(n))))
def test_restriction_is_ring_map(xy):
    x, y = xy
    n = x.ctx.n
    for m in divisors(n):
        assert restrict(x * y, m) == restrict(x, m) * restrict(y, m)
        assert restrict(x + y, m) == restrict(x, m) + restrict(y, m)


@pytest.mark.parametrize("n", [6, 12, 30])
def test_restriction_counts_points(n):
    # underlying set sizes are preserved
    for j in divisors(n):
        for m in divisors(n):
            r = restrict(BurnsideElement.orbit(n, j), m)
            assert sum(c * (m // k) for k, c in r.as_dict().items()) == n // j


def test_totient_values():
    assert [totient(k) for k in range(1, 13)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]


def test_invalid_inputs():
    with pytest.raises(ValueError):
        divisors(0)
    with pytest.raises(ValueError):
        BurnsideElement.from_dict(6, {4: 1})
    with pytest.raises(ValueError):
        BurnsideElement.orbit(6, 2) * BurnsideElement.orbit(4, 2)
