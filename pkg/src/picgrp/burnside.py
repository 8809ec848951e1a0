"""The Burnside ring A(C_n) in the orbit basis, with its table of marks.

Indexing convention: the basis element ``[C_n/C_m]`` is keyed by the subgroup
order ``m`` (it is a set with ``n/m`` points). Marks are keyed by the order
``k`` of the subgroup ``C_k`` whose fixed points are counted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping, Optional


@lru_cache(maxsize=None)
def divisors(n: int) -> tuple[int, ...]:
    if n < 1:
        raise ValueError(f"group order must be positive, got {n}")
    small = [d for d in range(1, int(n**0.5) + 1) if n % d == 0]
    return tuple(sorted(set(small) | {n // d for d in small}))


@lru_cache(maxsize=None)
def totient(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def prime_factors(n: int) -> tuple[int, ...]:
    out, m, p = [], n, 2
    while p * p <= m:
        if m % p == 0:
            out.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        out.append(m)
    return tuple(out)


@dataclass(frozen=True)
class CyclicGroupContext:
    n: int
    divisors: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "divisors", divisors(self.n))

    @property
    def even(self) -> bool:
        return self.n % 2 == 0

    def index(self, m: int) -> int:
        return self.divisors.index(m)


def _ctx(ctx) -> CyclicGroupContext:
    return ctx if isinstance(ctx, CyclicGroupContext) else CyclicGroupContext(int(ctx))


def _full(ctx: CyclicGroupContext, values: Mapping[int, int]) -> tuple[int, ...]:
    extra = set(values) - set(ctx.divisors)
    if extra:
        raise ValueError(f"keys {sorted(extra)} are not divisors of {ctx.n}")
    return tuple(int(values.get(m, 0)) for m in ctx.divisors)


@dataclass(frozen=True)
class BurnsideElement:
    """``sum(coeffs[m] * [C_n/C_m])``; ``coeffs`` aligned with ``ctx.divisors``."""

    ctx: CyclicGroupContext
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.ctx.divisors):
            raise ValueError("need one coefficient per divisor")

    @classmethod
    def from_dict(cls, ctx, values: Mapping[int, int]) -> "BurnsideElement":
        ctx = _ctx(ctx)
        return cls(ctx, _full(ctx, values))

    @classmethod
    def orbit(cls, ctx, m: int, coeff: int = 1) -> "BurnsideElement":
        """The element ``coeff * [C_n/C_m]``."""
        return cls.from_dict(ctx, {m: coeff})

    @classmethod
    def one(cls, ctx) -> "BurnsideElement":
        ctx = _ctx(ctx)
        return cls.orbit(ctx, ctx.n)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.ctx.divisors, self.coeffs))

    def coeff(self, m: int) -> int:
        return self.coeffs[self.ctx.index(m)]

    def __add__(self, other: "BurnsideElement") -> "BurnsideElement":
        _same(self.ctx, other.ctx)
        return BurnsideElement(self.ctx, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "BurnsideElement":
        return BurnsideElement(self.ctx, tuple(-a for a in self.coeffs))

    def __sub__(self, other: "BurnsideElement") -> "BurnsideElement":
        return self + (-other)

    def __mul__(self, other: "BurnsideElement") -> "BurnsideElement":
        return multiply(self, other)

    def __pow__(self, k: int) -> "BurnsideElement":
        if k < 0:
            raise ValueError("negative powers are only defined for units; use inverse_unit")
        out = BurnsideElement.one(self.ctx)
        for _ in range(k):
            out = out * self
        return out

    def __str__(self):
        out = ""
        for m, c in zip(self.ctx.divisors, self.coeffs):
            if c:
                term = f"{abs(c) if abs(c) != 1 else ''}[C{self.ctx.n}/C{m}]"
                if not out:
                    out = ("-" if c < 0 else "") + term
                else:
                    out += (" - " if c < 0 else " + ") + term
        return out or "0"


@dataclass(frozen=True)
class GhostVector:
    ctx: CyclicGroupContext
    marks: tuple[int, ...]

    def __post_init__(self):
        if len(self.marks) != len(self.ctx.divisors):
            raise ValueError("need one mark per divisor")

    @classmethod
    def from_dict(cls, ctx, values: Mapping[int, int]) -> "GhostVector":
        ctx = _ctx(ctx)
        return cls(ctx, _full(ctx, values))

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.ctx.divisors, self.marks))

    def mark(self, k: int) -> int:
        return self.marks[self.ctx.index(k)]

    def __mul__(self, other: "GhostVector") -> "GhostVector":
        _same(self.ctx, other.ctx)
        return GhostVector(self.ctx, tuple(a * b for a, b in zip(self.marks, other.marks)))


def _same(a: CyclicGroupContext, b: CyclicGroupContext) -> None:
    if a.n != b.n:
        raise ValueError(f"elements live over different groups C_{a.n} and C_{b.n}")


def mark_of_orbit(n: int, m: int, k: int) -> int:
    """``|(C_n/C_m)^{C_k}|``: every point is fixed when ``k | m``, none otherwise."""
    return n // m if m % k == 0 else 0


def ghost(x: BurnsideElement) -> GhostVector:
    n = x.ctx.n
    divs = x.ctx.divisors
    marks = tuple(
        sum(mark_of_orbit(n, m, k) * c for m, c in zip(divs, x.coeffs) if c) for k in divs
    )
    return GhostVector(x.ctx, marks)


def cfb_sum(v: GhostVector, m: int) -> int:
    """Totient-weighted Cauchy-Frobenius-Burnside sum at ``C_m``.

    Elements of order ``t`` in ``C_n/C_m`` number ``phi(t)`` and together with
    ``C_m`` generate ``C_{m t}``.
    """
    q = v.ctx.n // m
    return sum(totient(t) * v.mark(m * t) for t in divisors(q))


def satisfies_cfb(v: GhostVector) -> bool:
    n = v.ctx.n
    return all(cfb_sum(v, m) % (n // m) == 0 for m in v.ctx.divisors)


def ghost_inverse(v: GhostVector) -> Optional[BurnsideElement]:
    """The unique preimage under :func:`ghost`, or ``None`` if ``v`` is not a ghost image."""
    ctx = v.ctx
    n = ctx.n
    coeffs: dict[int, int] = {}
    for k in reversed(ctx.divisors):
        rest = v.mark(k) - sum((n // m) * coeffs[m] for m in coeffs if m % k == 0)
        q, r = divmod(rest, n // k)
        if r:
            return None
        coeffs[k] = q
    return BurnsideElement.from_dict(ctx, coeffs)


def multiply(x: BurnsideElement, y: BurnsideElement) -> BurnsideElement:
    _same(x.ctx, y.ctx)
    prod = ghost(x) * ghost(y)
    out = ghost_inverse(prod)
    if out is None:  # pragma: no cover - ring closure
        raise AssertionError(f"ghost product {prod.marks} left the Burnside ring")
    return out


def tau(ctx) -> BurnsideElement:
    """``[C_n/C_{n/2}] - [C_n/C_n]`` for even ``n``."""
    ctx = _ctx(ctx)
    if not ctx.even:
        raise ValueError("tau exists only for even n")
    return BurnsideElement.orbit(ctx, ctx.n // 2) - BurnsideElement.one(ctx)


def units(ctx) -> list[BurnsideElement]:
    """All units, found by searching the +-1 mark vectors that pass the CFB test."""
    ctx = _ctx(ctx)
    found = []
    for signs in itertools.product((1, -1), repeat=len(ctx.divisors)):
        v = GhostVector(ctx, signs)
        if satisfies_cfb(v):
            x = ghost_inverse(v)
            assert x is not None
            found.append(x)
    return found


def units_closed_form(ctx) -> list[BurnsideElement]:
    ctx = _ctx(ctx)
    one = BurnsideElement.one(ctx)
    out = [one, -one]
    if ctx.even:
        t = tau(ctx)
        out += [t, -t]
    return out


def is_unit(x: BurnsideElement) -> bool:
    return all(abs(m) == 1 for m in ghost(x).marks)


def witt_ghost(x: BurnsideElement) -> GhostVector:
    """Witt-vector ghost components.

    The coefficient of ``[C_n/C_m]`` is raised to the index ``m/k`` of ``C_k``
    in ``C_m``; for ``n = p`` this gives ``a_G^p + p a_e`` at the trivial group.
    """
    n = x.ctx.n
    divs = x.ctx.divisors
    marks = tuple(
        sum((n // m) * c ** (m // k) for m, c in zip(divs, x.coeffs) if m % k == 0)
        for k in divs
    )
    return GhostVector(x.ctx, marks)


def restrict(x: BurnsideElement, m: int) -> "BurnsideElement":
    """Restriction ``A(C_n) -> A(C_m)`` of G-sets to the subgroup ``C_m``.

    ``C_n/C_j`` restricted to ``C_m`` splits into ``n/lcm(j, m)`` orbits of type
    ``C_m/C_{gcd(j, m)}``.
    """
    n = x.ctx.n
    if n % m:
        raise ValueError(f"{m} does not divide {n}")
    sub = CyclicGroupContext(m)
    out: dict[int, int] = {}
    for j, c in zip(x.ctx.divisors, x.coeffs):
        if c:
            g = gcd(j, m)
            out[g] = out.get(g, 0) + c * (n * g // (j * m))
    return BurnsideElement.from_dict(sub, out)


def from_marks(ctx, values: Iterable[int]) -> GhostVector:
    ctx = _ctx(ctx)
    return GhostVector(ctx, tuple(values))
