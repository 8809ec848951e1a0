"""Pic(Sp^{C_n}) as Pic(A(C_n)) x Z^r, dimension functions and the map from RO(C_n).

The free part of a :class:`PicElement` is indexed by divisors ``d`` of ``n``;
``b_d`` counts copies of the generator whose dimension function is ``f_d``
(trivial representation for ``d = 1``, sign for ``d = 2``, ``lambda(n/d)``
otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Mapping, Optional, Sequence

from . import intlab
from .burnside import BurnsideElement, CyclicGroupContext, _ctx, tau
from .picalg import (
    FiniteAbelianGroup,
    PicBurnsideClass,
    class_mul,
    finite_moduli,
    normalize_residue,
    pic_burnside,
    relation_matrix,
    unit_residues,
)


@dataclass(frozen=True)
class ClassFunction:
    """Integer function on subgroups ``C_k``; ``values`` aligned with ``ctx.divisors``."""

    ctx: CyclicGroupContext
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.ctx.divisors):
            raise ValueError("need one value per divisor")

    @classmethod
    def from_dict(cls, ctx, values: Mapping[int, int]) -> "ClassFunction":
        ctx = _ctx(ctx)
        return cls(ctx, tuple(int(values.get(k, 0)) for k in ctx.divisors))

    @classmethod
    def zero(cls, ctx) -> "ClassFunction":
        ctx = _ctx(ctx)
        return cls(ctx, (0,) * len(ctx.divisors))

    def at(self, k: int) -> int:
        return self.values[self.ctx.index(k)]

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.ctx.divisors, self.values))

    def __add__(self, other: "ClassFunction") -> "ClassFunction":
        return ClassFunction(self.ctx, tuple(a + b for a, b in zip(self.values, other.values)))

    def scale(self, c: int) -> "ClassFunction":
        return ClassFunction(self.ctx, tuple(c * a for a in self.values))


def borel_smith_basis(ctx) -> list[ClassFunction]:
    """``f_1 = 1``; ``f_2 = 1`` below ``C_{n/2}``; ``f_d = 2`` below ``C_{n/d}`` for ``d > 2``."""
    ctx = _ctx(ctx)
    n = ctx.n
    out = []
    for d in ctx.divisors:
        height = 1 if d <= 2 else 2
        top = n // d
        out.append(ClassFunction(ctx, tuple(height if top % k == 0 else 0 for k in ctx.divisors)))
    return out


def borel_smith_coordinates(c: ClassFunction) -> Optional[list[int]]:
    """Integer coefficients ``b`` with ``c = sum b_d f_d``, or ``None``."""
    basis = borel_smith_basis(c.ctx)
    mat = intlab.from_columns([f.values for f in basis], len(c.values))
    return intlab.solve_integer(mat, list(c.values))


def is_borel_smith(c: ClassFunction) -> bool:
    return borel_smith_coordinates(c) is not None


# ---------------------------------------------------------------------------
# the group


@dataclass(frozen=True)
class PicStructure:
    finite: FiniteAbelianGroup
    free_rank: int

    def describe(self) -> str:
        parts = [f"Z/{k}" for k in self.finite.invariant_factors]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " x ".join(parts) if parts else "1"


def pic_group(ctx) -> PicStructure:
    ctx = _ctx(ctx)
    return PicStructure(pic_burnside(ctx), len(ctx.divisors))


@dataclass(frozen=True)
class PicElement:
    ctx: CyclicGroupContext
    finite: PicBurnsideClass
    free: tuple[int, ...]  # b_d aligned with ctx.divisors

    def __post_init__(self):
        if len(self.free) != len(self.ctx.divisors):
            raise ValueError("need one free coordinate per divisor")
        if self.finite.ctx.n != self.ctx.n:
            raise ValueError("finite part lives over a different group")

    @classmethod
    def identity(cls, ctx) -> "PicElement":
        ctx = _ctx(ctx)
        return cls(ctx, PicBurnsideClass.identity(ctx), (0,) * len(ctx.divisors))

    @classmethod
    def make(cls, ctx, finite: Mapping[int, int] | None = None, free: Mapping[int, int] | None = None) -> "PicElement":
        ctx = _ctx(ctx)
        extra = set(free or {}) - set(ctx.divisors)
        if extra:
            raise ValueError(f"{sorted(extra)} are not divisors of {ctx.n}")
        f = PicBurnsideClass.from_dict(ctx, finite or {})
        return cls(ctx, f, tuple(int((free or {}).get(d, 0)) for d in ctx.divisors))

    def free_dict(self) -> dict[int, int]:
        return dict(zip(self.ctx.divisors, self.free))

    def __mul__(self, other: "PicElement") -> "PicElement":
        return pic_mul(self, other)

    def to_dict(self) -> dict:
        return {
            "finite": {str(d): r for d, r in self.finite.as_dict().items()},
            "free": {str(d): b for d, b in self.free_dict().items()},
        }


def pic_mul(x: PicElement, y: PicElement) -> PicElement:
    if x.ctx.n != y.ctx.n:
        raise ValueError("elements over different groups")
    return PicElement(x.ctx, class_mul(x.finite, y.finite), tuple(a + b for a, b in zip(x.free, y.free)))


def pic_inv(x: PicElement) -> PicElement:
    return PicElement(x.ctx, x.finite.inverse(), tuple(-b for b in x.free))


def pic_pow(x: PicElement, k: int) -> PicElement:
    base = x if k >= 0 else pic_inv(x)
    return PicElement(x.ctx, base.finite ** abs(k), tuple(abs(k) * b for b in base.free))


def dimension_function(x: PicElement) -> ClassFunction:
    out = ClassFunction.zero(x.ctx)
    for b, f in zip(x.free, borel_smith_basis(x.ctx)):
        if b:
            out = out + f.scale(b)
    return out


# ---------------------------------------------------------------------------
# representations


def lambda_count(n: int) -> int:
    return (n - 1) // 2


@dataclass(frozen=True)
class VirtualRep:
    """``n_triv * 1 + n_sign * sigma + sum n_lambda[i-1] * lambda(i)`` for ``1 <= i <= (n-1)/2``."""

    ctx: CyclicGroupContext
    n_triv: int = 0
    n_sign: int = 0
    n_lambda: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.n_lambda:
            object.__setattr__(self, "n_lambda", (0,) * lambda_count(self.ctx.n))
        if len(self.n_lambda) != lambda_count(self.ctx.n):
            raise ValueError(f"need {lambda_count(self.ctx.n)} lambda multiplicities")
        if self.n_sign and not self.ctx.even:
            raise ValueError("the sign representation exists only for even n")

    @classmethod
    def trivial(cls, ctx, k: int = 1) -> "VirtualRep":
        return cls(_ctx(ctx), n_triv=k)

    @classmethod
    def sign(cls, ctx, k: int = 1) -> "VirtualRep":
        return cls(_ctx(ctx), n_sign=k)

    @classmethod
    def rotation(cls, ctx, i: int, k: int = 1) -> "VirtualRep":
        """``k`` copies of ``lambda(i)``; ``i`` is read modulo ``n`` up to sign."""
        ctx = _ctx(ctx)
        j = _lambda_index(ctx.n, i)
        mult = [0] * lambda_count(ctx.n)
        mult[j - 1] = k
        return cls(ctx, n_lambda=tuple(mult))

    def __add__(self, other: "VirtualRep") -> "VirtualRep":
        if self.ctx.n != other.ctx.n:
            raise ValueError("representations of different groups")
        return VirtualRep(self.ctx, self.n_triv + other.n_triv, self.n_sign + other.n_sign,
                          tuple(a + b for a, b in zip(self.n_lambda, other.n_lambda)))

    def __neg__(self) -> "VirtualRep":
        return VirtualRep(self.ctx, -self.n_triv, -self.n_sign, tuple(-a for a in self.n_lambda))

    def __sub__(self, other: "VirtualRep") -> "VirtualRep":
        return self + (-other)


def _lambda_index(n: int, i: int) -> int:
    r = i % n
    r = min(r, n - r)
    if r == 0 or 2 * r == n:
        raise ValueError(f"lambda({i}) is not one of the irreducible rotations of C_{n}")
    return r


def fixed_point_dimensions(v: VirtualRep) -> ClassFunction:
    """Direct count of ``dim V^{C_k}``: ``C_k`` fixes ``lambda(i)`` iff ``k | i``; sigma iff ``k | n/2``."""
    ctx = v.ctx
    n = ctx.n
    vals = []
    for k in ctx.divisors:
        total = v.n_triv
        if ctx.even and (n // 2) % k == 0:
            total += v.n_sign
        total += sum(2 * c for i, c in enumerate(v.n_lambda, start=1) if c and i % k == 0)
        vals.append(total)
    return ClassFunction(ctx, tuple(vals))


def lambda_class(ctx, i: int) -> PicElement:
    """Class of ``S^{lambda(i)}``: free part ``e_d`` and finite part ``u^{-1}`` at ``d``.

    Here ``g = gcd(n, i)``, ``d = n/g`` and ``u = i/g``. A kernel element is
    labelled by the tuple of its zeroth homotopy Mackey functor, and
    ``S^{lambda(u n/d)} = S^{lambda(n/d)} - X_u``.
    """
    ctx = _ctx(ctx)
    n = ctx.n
    r = _lambda_index(n, i)
    g = gcd(n, r)
    d, u = n // g, r // g
    finite = {d: pow(u, -1, d)} if d > 2 else {}
    return PicElement.make(ctx, finite=finite, free={d: 1})


def ro_class(v: VirtualRep) -> PicElement:
    ctx = v.ctx
    out = PicElement.make(ctx, free={1: v.n_triv, **({2: v.n_sign} if ctx.even else {})})
    for i, c in enumerate(v.n_lambda, start=1):
        if c:
            out = pic_mul(out, pic_pow(lambda_class(ctx, i), c))
    return out


def irreducibles(ctx) -> list[tuple[str, VirtualRep]]:
    ctx = _ctx(ctx)
    out = [("1", VirtualRep.trivial(ctx))]
    if ctx.even:
        out.append(("sigma", VirtualRep.sign(ctx)))
    out += [(f"lambda({i})", VirtualRep.rotation(ctx, i)) for i in range(1, lambda_count(ctx.n) + 1)]
    return out


# ---------------------------------------------------------------------------
# surjectivity


@dataclass(frozen=True)
class SurjectivityCertificate:
    n: int
    free_matrix: intlab.Matrix  # rows: divisors d, columns: irreducibles
    free_witness: intlab.Matrix  # free_matrix @ free_witness = identity
    finite_generators: dict[int, list[dict]]
    finite_relations: dict[int, intlab.Matrix]
    free_ok: bool
    finite_ok: bool

    @property
    def ok(self) -> bool:
        return self.free_ok and self.finite_ok

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "surjective": self.ok,
            "free_matrix": self.free_matrix,
            "free_witness": self.free_witness,
            "generators": {str(d): g for d, g in self.finite_generators.items()},
            "relations": {str(d): r for d, r in self.finite_relations.items()},
        }


def verify_surjectivity(ctx) -> SurjectivityCertificate:
    """Check that classes of irreducible representations generate ``Pic(Sp^{C_n})``."""
    ctx = _ctx(ctx)
    n = ctx.n
    reps = irreducibles(ctx)
    classes = [ro_class(v) for _, v in reps]
    r = len(ctx.divisors)
    free_matrix = intlab.from_columns([c.free for c in classes], r)
    witness_cols = []
    for i in range(r):
        target = [1 if j == i else 0 for j in range(r)]
        witness_cols.append(intlab.solve_integer(free_matrix, target, cols=len(classes)))
    free_ok = all(col is not None for col in witness_cols)
    witness = intlab.from_columns([c or [0] * len(classes) for c in witness_cols], len(classes))
    if free_ok:
        free_ok = intlab.matmul(free_matrix, witness, inner=len(classes)) == intlab.identity(r)

    generators, relations = {}, {}
    finite_ok = True
    for d in finite_moduli(ctx):
        base = n // d
        gens, seen = [], []
        for u in range(2, (d + 1) // 2):
            if gcd(u, d) != 1:
                continue
            x = pic_mul(lambda_class(ctx, u * base), pic_inv(lambda_class(ctx, base)))
            if any(x.free):
                finite_ok = False
            residue = x.finite.as_dict()
            if any(v != 1 for dd, v in residue.items() if dd != d):
                finite_ok = False
            gens.append({"combination": f"lambda({u * base}) - lambda({base})", "class": residue[d]})
            seen.append(residue[d])
        mul = lambda a, b, d=d: normalize_residue(a * b, d)  # noqa: E731
        rel = relation_matrix(seen, mul, 1)
        generated = _closure(seen, mul)
        if len(generated) != len(unit_residues(d, True)):
            finite_ok = False
        generators[d] = gens
        relations[d] = rel
    return SurjectivityCertificate(n, free_matrix, witness, generators, relations, free_ok, finite_ok)


def _closure(gens: Sequence[int], mul) -> set[int]:
    out = {1}
    frontier = [1]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = mul(x, g)
            if y not in out:
                out.add(y)
                frontier.append(y)
    return out


# ---------------------------------------------------------------------------
# graded commutativity


def _b1_b2(ctx: CyclicGroupContext, b) -> tuple[int, int]:
    if isinstance(b, PicElement):
        b = b.free
    elif not isinstance(b, (tuple, list)):
        return int(b.get(1, 0)), int(b.get(2, 0))
    if len(b) != len(ctx.divisors):
        raise ValueError("free-part vector needs one entry per divisor")
    return b[0], (b[1] if ctx.even else 0)


@lru_cache(maxsize=None)
def _sign_units(n: int) -> tuple[BurnsideElement, ...]:
    """``(1, -1, -tau, tau)``, indexed by the two parities; just ``(1, -1)`` for odd n."""
    one = BurnsideElement.one(n)
    if n % 2:
        return one, -one
    t = tau(n)
    return one, -one, -t, t


def koszul_unit(ctx, b, b_prime) -> BurnsideElement:
    """The unit ``u`` in ``xy = u yx``: ``(-1)^{b_1 b_1'}``, times ``(-tau)^{b_2 b_2'}`` for even n."""
    ctx = _ctx(ctx)
    signs = _sign_units(ctx.n)
    r = len(ctx.divisors)
    if type(b) is tuple and type(b_prime) is tuple and len(b) == r == len(b_prime):
        # plain tuples skip the generic parsing
        odd = b[0] & b_prime[0] & 1
        if len(signs) == 4:
            odd |= (b[1] & b_prime[1] & 1) << 1
        return signs[odd]
    x1, x2 = _b1_b2(ctx, b)
    y1, y2 = _b1_b2(ctx, b_prime)
    return signs[(x1 & y1 & 1) | (x2 & y2 & 1) << 1]
