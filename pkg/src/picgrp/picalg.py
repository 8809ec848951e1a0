"""Gamma(Y, Q) and Pic(A(C_n)) as explicit finite abelian groups."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, prod
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from . import intlab
from .burnside import CyclicGroupContext, _ctx, totient


def unit_residues(d: int, mod_sign: bool = False) -> list[int]:
    """Residues representing ``(Z/d)^x``, or ``(Z/d)^x/{+-1}`` via ``min(r, d - r)``."""
    if d <= 2:
        return [1 % d] if d == 2 else [0]
    units = [r for r in range(1, d) if gcd(r, d) == 1]
    if mod_sign:
        units = [r for r in units if r < d - r]
    return units


def normalize_residue(r: int, d: int) -> int:
    """Canonical representative of ``r`` in ``(Z/d)^x/{+-1}``."""
    if gcd(r, d) != 1:
        raise ValueError(f"{r} is not invertible modulo {d}")
    if d <= 2:
        return 1 % d if d == 2 else 0
    s = r % d
    return min(s, d - s)


def relation_matrix(
    elements: Iterable[Hashable],
    mul: Callable[[Hashable, Hashable], Hashable],
    one: Hashable,
) -> intlab.Matrix:
    """Relations of a finite abelian group on a greedily chosen generating set.

    Generators are added one at a time; each contributes the relation
    ``k * g = (word in earlier generators)`` where ``k`` is the least power of
    ``g`` landing in the subgroup generated so far. The resulting lattice has
    index equal to the group order, so it is the full relation lattice.
    """
    span: dict[Hashable, list[int]] = {one: []}
    relations: list[list[int]] = []
    for g in elements:
        if g in span:
            continue
        k, power = 1, g
        while power not in span:
            power = mul(power, g)
            k += 1
        word = span[power]
        gi = len(relations)
        rel = [-c for c in word] + [0] * (gi - len(word)) + [k]
        relations.append(rel)
        new_span = {}
        for h, vec in span.items():
            x = h
            for j in range(k):
                new_span[x] = vec + [0] * (gi - len(vec)) + [j]
                x = mul(x, g)
        span = new_span
    size = len(relations)
    return [[rel[i] if i < len(rel) else 0 for rel in relations] for i in range(size)]


def invariant_factors_of_relations(rel: intlab.Matrix) -> list[int]:
    torsion, free = intlab.cokernel_structure(rel, cols=len(rel))
    if free:
        raise ValueError("relation lattice does not have full rank")
    return torsion


def unit_group_invariants(d: int, mod_sign: bool) -> list[int]:
    if d <= 2:
        return []
    if mod_sign:
        mul = lambda x, y: normalize_residue(x * y, d)  # noqa: E731
    else:
        mul = lambda x, y: (x * y) % d  # noqa: E731
    elems = unit_residues(d, mod_sign)
    return invariant_factors_of_relations(relation_matrix(elems, mul, 1))


def _block_invariants(blocks: Sequence[Sequence[int]]) -> list[int]:
    """Invariant factors of a direct sum of groups given by invariant factors."""
    diag = [x for b in blocks for x in b]
    if not diag:
        return []
    m = intlab.zeros(len(diag), len(diag))
    for i, x in enumerate(diag):
        m[i][i] = x
    return invariant_factors_of_relations(m)


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """A product of unit groups ``(Z/d)^x`` (optionally modulo ``{+-1}``).

    ``component_moduli`` records the product-of-components form; the
    invariant factors are the canonical form (each divides the next, 1s dropped).
    """

    component_moduli: tuple[tuple[int, bool], ...]
    order: int
    invariant_factors: tuple[int, ...]

    @classmethod
    def of_units(cls, components: Iterable[tuple[int, bool]]) -> "FiniteAbelianGroup":
        comps = tuple(components)
        blocks = [unit_group_invariants(d, s) for d, s in comps]
        order = prod(_component_order(d, s) for d, s in comps)
        inv = tuple(_block_invariants(blocks))
        if prod(inv) != order:  # pragma: no cover - structural check
            raise AssertionError("invariant factors disagree with the component orders")
        return cls(comps, order, inv)

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def describe(self) -> str:
        if not self.invariant_factors:
            return "1"
        return " x ".join(f"Z/{k}" for k in self.invariant_factors)


def _component_order(d: int, mod_sign: bool) -> int:
    if d <= 2:
        return 1
    return totient(d) // 2 if mod_sign else totient(d)


def gamma_yq(ctx) -> FiniteAbelianGroup:
    """``prod_{d | n} (Z/d)^x`` with the ``d = 1, 2`` factors trivial."""
    ctx = _ctx(ctx)
    return FiniteAbelianGroup.of_units((d, False) for d in ctx.divisors if d > 2)


def pic_burnside(ctx) -> FiniteAbelianGroup:
    """``prod_{d | n, d != 1, 2} (Z/d)^x/{+-1}``."""
    ctx = _ctx(ctx)
    return FiniteAbelianGroup.of_units((d, True) for d in ctx.divisors if d > 2)


def pic_order_from_units(ctx, unit_count: int) -> int:
    """``|Pic(A)|`` from the exact sequence: ``|Gamma| * |A^x| / 2^r``."""
    ctx = _ctx(ctx)
    r = len(ctx.divisors)
    num = gamma_yq(ctx).order * unit_count
    if num % (2**r):
        raise ValueError("unit count inconsistent with the exact sequence")
    return num // 2**r


def finite_moduli(ctx) -> tuple[int, ...]:
    """Divisors ``d > 2`` of ``n``; these index the finite Picard components."""
    return tuple(d for d in _ctx(ctx).divisors if d > 2)


@dataclass(frozen=True)
class PicBurnsideClass:
    """A class in ``Pic(A(C_n))``: one normalized residue per divisor ``d > 2``."""

    ctx: CyclicGroupContext
    residues: tuple[int, ...]

    def __post_init__(self):
        mods = finite_moduli(self.ctx)
        if len(self.residues) != len(mods):
            raise ValueError("need one residue per divisor d > 2")
        norm = tuple(normalize_residue(r, d) for r, d in zip(self.residues, mods))
        object.__setattr__(self, "residues", norm)

    @classmethod
    def from_dict(cls, ctx, values: Mapping[int, int]) -> "PicBurnsideClass":
        ctx = _ctx(ctx)
        mods = finite_moduli(ctx)
        extra = set(values) - set(mods)
        if extra:
            raise ValueError(f"no finite Picard component at {sorted(extra)} for n={ctx.n}")
        return cls(ctx, tuple(values.get(d, 1) for d in mods))

    @classmethod
    def identity(cls, ctx) -> "PicBurnsideClass":
        ctx = _ctx(ctx)
        return cls(ctx, tuple(1 for _ in finite_moduli(ctx)))

    def as_dict(self) -> dict[int, int]:
        return dict(zip(finite_moduli(self.ctx), self.residues))

    def __mul__(self, other: "PicBurnsideClass") -> "PicBurnsideClass":
        return class_mul(self, other)

    def inverse(self) -> "PicBurnsideClass":
        mods = finite_moduli(self.ctx)
        return PicBurnsideClass(self.ctx, tuple(pow(r, -1, d) for r, d in zip(self.residues, mods)))

    def __pow__(self, k: int) -> "PicBurnsideClass":
        base = self if k >= 0 else self.inverse()
        mods = finite_moduli(self.ctx)
        return PicBurnsideClass(self.ctx, tuple(pow(r, abs(k), d) for r, d in zip(base.residues, mods)))


def class_mul(x: PicBurnsideClass, y: PicBurnsideClass) -> PicBurnsideClass:
    if x.ctx.n != y.ctx.n:
        raise ValueError("classes over different groups")
    mods = finite_moduli(x.ctx)
    return PicBurnsideClass(x.ctx, tuple((a * b) % d for a, b, d in zip(x.residues, y.residues, mods)))


def all_classes(ctx) -> list[PicBurnsideClass]:
    ctx = _ctx(ctx)
    choices = [unit_residues(d, True) for d in finite_moduli(ctx)]
    return [PicBurnsideClass(ctx, combo) for combo in itertools.product(*choices)]
