"""Rank-one modules over the constant Mackey functor Z for C_n.

A rank-one module has ``M(C_m) = Z`` at every level, so it is pinned down by
the restriction values ``r(m, p)`` on chosen generators for the prime steps
``C_m -> C_{m/p}``. Cohomological means ``tr R = index``, so each transfer
value is ``p / r(m, p)`` and ``r(m, p)`` is ``+-1`` or ``+-p``. Rescaling the
generator of a level by -1 flips signs, so only positive values are kept.

Weyl actions are trivial here (cyclic group, rank one).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Mapping

from .burnside import CyclicGroupContext, _ctx, divisors, prime_factors

Step = tuple[int, int]  # (level m, prime p)


def prime_steps(ctx: CyclicGroupContext) -> list[Step]:
    return [(m, p) for m in ctx.divisors for p in prime_factors(m)]


@dataclass(frozen=True)
class RankOneZModule:
    ctx: CyclicGroupContext
    steps: tuple[tuple[Step, int], ...]  # ((m, p), r) sorted

    @classmethod
    def from_dict(cls, ctx, values: Mapping[Step, int]) -> "RankOneZModule":
        ctx = _ctx(ctx)
        full = {s: 1 for s in prime_steps(ctx)}
        for s, v in values.items():
            if s not in full:
                raise ValueError(f"{s} is not a prime step of C_{ctx.n}")
            if v == 0 or s[1] % v:
                raise ValueError(f"restriction value {v} at {s} must divide the index {s[1]}")
            full[s] = abs(v)
        return cls(ctx, tuple(sorted(full.items())))

    @classmethod
    def constant(cls, ctx) -> "RankOneZModule":
        return cls.from_dict(ctx, {})

    def value(self, m: int, p: int) -> int:
        return dict(self.steps)[(m, p)]

    def restriction(self, m: int, m2: int) -> int:
        """``r_{m -> m2}`` along the path that strips primes in increasing order."""
        if m % m2:
            raise ValueError(f"{m2} does not divide {m}")
        vals = dict(self.steps)
        out, cur = 1, m
        while cur != m2:
            p = next(p for p in prime_factors(cur // m2))
            out *= vals[(cur, p)]
            cur //= p
        return out

    def transfer(self, m2: int, m: int) -> int:
        """``t_{m2 -> m} = (m/m2) / r_{m -> m2}`` (cohomological condition)."""
        q, r = divmod(m // m2, self.restriction(m, m2))
        if r:
            raise ValueError(f"restriction {m}->{m2} does not divide the index")
        return q

    def path_consistent(self) -> bool:
        vals = dict(self.steps)
        for m in self.ctx.divisors:
            ps = prime_factors(m)
            for p in ps:
                for q in ps:
                    if p < q and (m // p) % q == 0:
                        if vals[(m, p)] * vals[(m // p, q)] != vals[(m, q)] * vals[(m // q, p)]:
                            return False
        return True

    def cohomological(self) -> bool:
        return all((m // m2) % self.restriction(m, m2) == 0
                   for m in self.ctx.divisors for m2 in divisors(m))

    def double_coset_consistent(self) -> bool:
        """``R^H_L tr^H_K = [H : KL] tr^L_{K cap L} R^K_{K cap L}`` for all ``K, L <= H``."""
        for h in self.ctx.divisors:
            for k in divisors(h):
                for l in divisors(h):
                    kl = k * l // gcd(k, l)
                    meet = gcd(k, l)
                    lhs = self.restriction(h, l) * self.transfer(k, h)
                    rhs = (h // kl) * self.transfer(meet, l) * self.restriction(k, meet)
                    if lhs != rhs:
                        return False
        return True

    def is_valid(self) -> bool:
        return self.path_consistent() and self.cohomological() and self.double_coset_consistent()

    def as_dict(self) -> dict[str, int]:
        return {f"{m}->{m // p}": r for (m, p), r in self.steps}


def enumerate_candidates(ctx) -> list[RankOneZModule]:
    """Every valid system of positive prime-step values, by backtracking.

    Commuting squares ``(m, p), (m/p, q)`` versus ``(m, q), (m/q, p)`` are
    checked as soon as all four values are set.
    """
    ctx = _ctx(ctx)
    steps = prime_steps(ctx)
    squares: dict[Step, list[tuple[Step, Step, Step, Step]]] = {}
    for m in ctx.divisors:
        for p in prime_factors(m):
            for q in prime_factors(m):
                if p < q:
                    sq = ((m, p), (m // p, q), (m, q), (m // q, p))
                    last = max(sq, key=steps.index)
                    squares.setdefault(last, []).append(sq)
    out: list[RankOneZModule] = []
    vals: dict[Step, int] = {}

    def rec(i: int) -> None:
        if i == len(steps):
            cand = RankOneZModule(ctx, tuple(sorted(vals.items())))
            if cand.cohomological() and cand.double_coset_consistent():
                out.append(cand)
            return
        s = steps[i]
        for v in (1, s[1]):
            vals[s] = v
            if all(vals[a] * vals[b] == vals[c] * vals[d] for a, b, c, d in squares.get(s, ())):
                rec(i + 1)
        del vals[s]

    rec(0)
    return out


def is_invertible_candidate(c: RankOneZModule) -> bool:
    """Invertible iff every prime-step restriction is +-1, i.e. ``c`` is the constant module."""
    return all(r == 1 for _, r in c.steps)


def sylow_argument(c: RankOneZModule, m: int | None = None) -> bool:
    """Replay the inductive proof on ``C_m`` for a valid candidate.

    For a p-group the unique index-p subgroup restricts trivially by
    induction, and then ``R`` to it is 1 (trivial) or p (which survives box
    products, so no inverse exists). In general each Sylow subgroup restricts
    trivially by induction; the restrictions to them then share one value N,
    which divides every index and hence is 1.
    """
    m = c.ctx.n if m is None else m
    ps = prime_factors(m)
    if m == 1:
        return True
    if len(ps) == 1:
        p = ps[0]
        return sylow_argument(c, m // p) and c.value(m, p) == 1
    sylows = []
    for p in ps:
        pk = p ** _valuation(m, p)
        if not sylow_argument(c, pk):
            return False
        sylows.append(pk)
    shared = {c.restriction(m, pk) for pk in sylows}
    if len(shared) != 1:
        return False
    (value,) = shared
    indices = [m // pk for pk in sylows]
    if gcd(*indices) % value:
        return False
    return value == 1 and all(sylow_argument(c, e) for e in divisors(m)[1:-1])


def _valuation(m: int, p: int) -> int:
    k = 0
    while m % p == 0:
        m //= p
        k += 1
    return k


@dataclass(frozen=True)
class Classification:
    n: int
    candidates: int
    invertible: tuple[RankOneZModule, ...]

    @property
    def count(self) -> int:
        return len(self.invertible)


def classify_invertible(ctx) -> Classification:
    ctx = _ctx(ctx)
    cands = enumerate_candidates(ctx)
    inv = tuple(c for c in cands if is_invertible_candidate(c))
    return Classification(ctx.n, len(cands), inv)
