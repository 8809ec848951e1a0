"""Cellular chains of S^{lambda(n/d)} ^ S^{-lambda(a n/d)} with Burnside coefficients.

Everything is built from explicit finite C_n-sets. The orbit ``C_n/C_m`` is
``Z/(n/m)`` with the generator acting by +1, so products are tuples acted on
diagonally. For a C_n-set ``S`` the Burnside group ``A(S)`` has basis
``(orbit O, k)`` with ``k`` dividing the stabilizer order of ``O``: the
element ``C_n/C_k -> O``. A map of C_n-sets induces pushforward
(composition) and pullback (fibre product), which is all the double complex
needs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Callable, Sequence

from . import intlab
from .burnside import CyclicGroupContext, _ctx, divisors
from .intlab import Matrix
from .mackey import (
    MackeyTable,
    RestrictionTuple,
    StructuralError,
    build_table,
    find_isomorphism,
    invertible_tuples,
    normalize,
)


@dataclass(frozen=True)
class OrbitCell:
    dimension: int
    orbit: int  # the cell is C_n/C_orbit


class GSet:
    """A product of orbits ``C_n/C_{m_1} x ... x C_n/C_{m_r}``."""

    def __init__(self, n: int, factors: Sequence[int]):
        self.n = n
        self.factors = tuple(factors)
        self.moduli = tuple(n // m for m in self.factors)
        points = [()]
        for q in self.moduli:
            points = [p + (x,) for p in points for x in range(q)]
        self.points = points
        self.orbit_of: dict[tuple, int] = {}
        self.reps: list[tuple] = []
        self.stab: list[int] = []
        for p in points:
            if p in self.orbit_of:
                continue
            o = len(self.reps)
            self.reps.append(p)
            size, x = 0, p
            while x not in self.orbit_of:
                self.orbit_of[x] = o
                x = self.act(x)
                size += 1
            self.stab.append(n // size)
        self.basis = [(o, k) for o in range(len(self.reps)) for k in divisors(self.stab[o])]
        self.index = {b: i for i, b in enumerate(self.basis)}

    def act(self, p: tuple) -> tuple:
        return tuple((x + 1) % q for x, q in zip(p, self.moduli))

    @property
    def rank(self) -> int:
        return len(self.basis)


@lru_cache(maxsize=None)
def gset(n: int, factors: tuple[int, ...]) -> GSet:
    return GSet(n, factors)


PointMap = Callable[[tuple], tuple]


def pushforward(src: GSet, dst: GSet, f: PointMap) -> Matrix:
    mat = intlab.zeros(dst.rank, src.rank)
    for j, (o, k) in enumerate(src.basis):
        mat[dst.index[(dst.orbit_of[f(src.reps[o])], k)]][j] += 1
    return mat


def pullback(src: GSet, dst: GSet, f: PointMap) -> Matrix:
    """``A(dst) -> A(src)`` for ``f: src -> dst``; ``C_n/C_k`` over an orbit of
    stabilizer ``h`` pulls back to ``h / lcm(k, h_O)`` copies of ``C_n/C_{gcd(k, h_O)}``
    over each orbit ``O`` of ``src`` above it."""
    above: dict[int, list[int]] = {}
    for o, p in enumerate(src.reps):
        above.setdefault(dst.orbit_of[f(p)], []).append(o)
    mat = intlab.zeros(src.rank, dst.rank)
    for j, (o2, k) in enumerate(dst.basis):
        h = dst.stab[o2]
        for o in above.get(o2, []):
            ho = src.stab[o]
            g = gcd(k, ho)
            mat[src.index[(o, g)]][j] += h * g // (k * ho)
    return mat


def _combine(*terms: tuple[int, Matrix]) -> Matrix:
    rows, cols = len(terms[0][1]), len(terms[0][1][0]) if terms[0][1] else 0
    out = intlab.zeros(rows, cols)
    for c, m in terms:
        for i in range(rows):
            for j in range(cols):
                out[i][j] += c * m[i][j]
    return out


# ---------------------------------------------------------------------------
# the double complex


def _check(ctx: CyclicGroupContext, d: int, a: int) -> int:
    n = ctx.n
    if d <= 2 or n % d:
        raise ValueError(f"d={d} must be a divisor of {n} other than 1 and 2")
    if gcd(a, d) != 1:
        raise ValueError(f"a={a} must be coprime to d={d}")
    return n // d


def _shift(coord: int, s: int, q: int) -> PointMap:
    return lambda p: p[:coord] + ((p[coord] + s) % q,) + p[coord + 1:]


def _collapse(coord: int) -> PointMap:
    return lambda p: p[:coord] + (0,) + p[coord + 1:]


def _reduce(coord: int, q: int) -> PointMap:
    return lambda p: p[:coord] + (p[coord] % q,) + p[coord + 1:]


@dataclass
class EvaluatedComplex:
    """Total complex at level ``e``; ``blocks[t]`` lists the (p, q) summands in degree t."""

    ctx: CyclicGroupContext
    d: int
    a: int
    level: int
    cells: dict[tuple[int, int], GSet]
    blocks: dict[int, list[tuple[int, int]]]
    offsets: dict[tuple[int, int], int]
    ranks: dict[int, int]
    differentials: dict[int, Matrix]  # degree t -> t - 1

    def differential(self, t: int) -> Matrix:
        if t in self.differentials:
            return self.differentials[t]
        return intlab.zeros(self.ranks.get(t - 1, 0), self.ranks.get(t, 0))

    def d_squared_zero(self) -> bool:
        for t in range(-1, 3):
            prod = intlab.matmul(self.differential(t - 1), self.differential(t), inner=self.ranks.get(t - 1, 0))
            if any(any(row) for row in prod):
                return False
        return True

    def vector(self, t: int, entries: dict[tuple[int, int], dict[tuple[int, int], int]]) -> list[int]:
        """Chain in degree ``t`` from per-cell coefficients on basis labels ``(orbit, k)``."""
        out = [0] * self.ranks[t]
        for pq, coeffs in entries.items():
            g = self.cells[pq]
            for label, c in coeffs.items():
                out[self.offsets[pq] + g.index[label]] += c
        return out

    def to_dict(self) -> dict:
        return {
            "n": self.ctx.n, "d": self.d, "a": self.a, "level": self.level,
            "degrees": {str(t): [{"cell": list(pq), "basis": [list(b) for b in self.cells[pq].basis]}
                                 for pq in pqs] for t, pqs in self.blocks.items()},
            "differentials": {str(t): m for t, m in self.differentials.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _cell_orbits(n: int, dprime: int) -> dict[int, int]:
    return {0: n, 1: dprime, 2: dprime}


def smash_double_complex(ctx, d: int, a: int, level: int) -> EvaluatedComplex:
    """Total complex of the product cell structure, evaluated at ``C_n/C_level``.

    Horizontal maps come from the cells of ``S^{lambda(n/d)}`` (fold, then
    ``1 - sh``), vertical maps from the dual cells of ``S^{-lambda(a n/d)}``
    (diagonal, then ``1 - sh_a``); the vertical map carries the sign
    ``(-1)^p``.
    """
    ctx = _ctx(ctx)
    n = ctx.n
    dprime = _check(ctx, d, a)
    if n % level:
        raise ValueError(f"level {level} does not divide {n}")
    orbit = _cell_orbits(n, dprime)
    cells = {(p, -q): gset(n, (orbit[p], orbit[q], level)) for p in range(3) for q in range(3)}
    blocks: dict[int, list[tuple[int, int]]] = {}
    for p, q in sorted(cells):
        blocks.setdefault(p + q, []).append((p, q))
    offsets, ranks = {}, {}
    for t, pqs in blocks.items():
        off = 0
        for pq in pqs:
            offsets[pq] = off
            off += cells[pq].rank
        ranks[t] = off

    def horizontal(p, q):
        src, dst = cells[(p, q)], cells[(p - 1, q)]
        if p == 1:
            return pushforward(src, dst, _collapse(0))
        return _combine((1, pushforward(src, dst, lambda x: x)), (-1, pushforward(src, dst, _shift(0, 1, d))))

    def vertical(p, q):
        src, dst = cells[(p, q)], cells[(p, q - 1)]
        if q == 0:
            return pullback(dst, src, _collapse(1))
        return _combine((1, pullback(dst, src, lambda x: x)), (-1, pullback(dst, src, _shift(1, a, d))))

    diffs = {}
    for t in range(-1, 3):
        mat = intlab.zeros(ranks[t - 1], ranks[t])
        for p, q in blocks[t]:
            pieces = []
            if p > 0:
                pieces.append(((p - 1, q), 1, horizontal(p, q)))
            if q > -2:
                pieces.append(((p, q - 1), -1 if p % 2 else 1, vertical(p, q)))
            for target, sign, m in pieces:
                r0, c0 = offsets[target], offsets[(p, q)]
                for i, row in enumerate(m):
                    for j, x in enumerate(row):
                        if x:
                            mat[r0 + i][c0 + j] += sign * x
        diffs[t] = mat
    c = EvaluatedComplex(ctx, d, a, level, cells, blocks, offsets, ranks, diffs)
    if not c.d_squared_zero():
        raise StructuralError(f"d o d != 0 for n={n}, d={d}, a={a}, level={level}")
    return c


def level_map(src: EvaluatedComplex, dst: EvaluatedComplex, kind: str) -> dict[int, Matrix]:
    """Chain maps between levels induced by ``C_n/C_small -> C_n/C_big``.

    ``kind="res"`` goes from the bigger level to the smaller one (pullback);
    ``kind="tr"`` goes from the smaller to the bigger (pushforward).
    """
    out = {}
    for t, pqs in src.blocks.items():
        mat = intlab.zeros(dst.ranks[t], src.ranks[t])
        for pq in pqs:
            a_set, b_set = src.cells[pq], dst.cells[pq]
            if kind == "res":
                q = src.ctx.n // src.level
                m = pullback(b_set, a_set, _reduce(2, q))
            else:
                q = src.ctx.n // dst.level
                m = pushforward(a_set, b_set, _reduce(2, q))
            r0, c0 = dst.offsets[pq], src.offsets[pq]
            for i, row in enumerate(m):
                for j, x in enumerate(row):
                    if x:
                        mat[r0 + i][c0 + j] = x
        out[t] = mat
    for t in range(-1, 3):
        lhs = intlab.matmul(out[t - 1], src.differential(t), inner=src.ranks[t - 1])
        rhs = intlab.matmul(dst.differential(t), out[t], inner=dst.ranks[t])
        if lhs != rhs:
            raise StructuralError(f"level {kind} map is not a chain map in degree {t}")
    return out


# ---------------------------------------------------------------------------
# homology


@dataclass(frozen=True)
class HomologyGroup:
    degree: int
    torsion: tuple[int, ...]
    free_rank: int
    representatives: tuple[tuple[int, ...], ...]  # cycles lifting the free generators
    _proj: tuple[tuple[int, ...], ...]  # chain -> free coordinates (valid on cycles)

    @property
    def is_zero(self) -> bool:
        return not self.torsion and self.free_rank == 0

    def project(self, cycle: Sequence[int]) -> list[int]:
        return [sum(a * b for a, b in zip(row, cycle)) for row in self._proj]


def homology_at_level(c: EvaluatedComplex, k: int) -> HomologyGroup:
    size = c.ranks.get(k, 0)
    if size == 0:
        return HomologyGroup(k, (), 0, (), ())
    out_snf = intlab.smith_normal_form(c.differential(k), cols=size)
    r = out_snf.rank
    # cycles are v[:, r:]; a cycle z has kernel coordinates (v_inv z)[r:]
    kernel_dim = size - r
    incoming = c.differential(k + 1)
    kin = [[row[i] for i in range(len(row))] for row in intlab.matmul(out_snf.v_inv, incoming, inner=size)[r:]] \
        if incoming and incoming[0] else intlab.zeros(kernel_dim, 0)
    bsnf = intlab.smith_normal_form(kin, cols=len(incoming[0]) if incoming and incoming[0] else 0)
    diag = list(bsnf.diagonal) + [0] * (kernel_dim - len(bsnf.diagonal))
    torsion = tuple(x for x in diag if x > 1)
    free = [i for i, x in enumerate(diag) if x == 0]
    proj_k = [out_snf.v_inv[r + i] for i in range(kernel_dim)]
    proj = tuple(tuple(sum(bsnf.u[f][i] * proj_k[i][j] for i in range(kernel_dim)) for j in range(size))
                 for f in free)
    basis = [[row[r + i] for i in range(kernel_dim)] for row in out_snf.v]
    reps = []
    for f in free:
        coeffs = [row[f] for row in bsnf.u_inv]
        reps.append(tuple(intlab.matvec(basis, coeffs)))
    return HomologyGroup(k, torsion, len(free), tuple(reps), proj)


def vanishing_check(ctx, d: int, a: int) -> list[str]:
    """Degrees and levels where ``H_k`` fails to vanish for ``k != 0``."""
    ctx = _ctx(ctx)
    bad = []
    for e in ctx.divisors:
        c = smash_double_complex(ctx, d, a, e)
        for k in (-2, -1, 1, 2):
            h = homology_at_level(c, k)
            if not h.is_zero:
                bad.append(f"H_{k} at level {e}: torsion {h.torsion}, rank {h.free_rank}")
    return bad


# ---------------------------------------------------------------------------
# pi_0 as a Mackey functor


@dataclass(frozen=True)
class Pi0Result:
    raw: MackeyTable
    expected: RestrictionTuple
    iso: object  # BasisChange raw -> build_table(expected)
    complexes: dict[int, EvaluatedComplex]
    homology: dict[int, HomologyGroup]

    @property
    def table(self) -> MackeyTable:
        return self.iso.apply(self.raw)


def hat_tuple(ctx, d: int, a: int) -> RestrictionTuple:
    return RestrictionTuple.single(_ctx(ctx), d, a)


def pi0_mackey(ctx, d: int, a: int) -> Pi0Result:
    """``H_0`` at every level with chain-level restrictions and transfers, compared with ``A^{a-hat}``."""
    ctx = _ctx(ctx)
    complexes = {e: smash_double_complex(ctx, d, a, e) for e in ctx.divisors}
    groups = {e: homology_at_level(c, 0) for e, c in complexes.items()}
    for e, h in groups.items():
        if h.torsion or h.free_rank != len(divisors(e)):
            raise StructuralError(f"H_0 at level {e} is {h.torsion} + Z^{h.free_rank}, expected Z^{len(divisors(e))}")
    res, tr = {}, {}
    for e in ctx.divisors:
        for l in divisors(e)[1:]:
            chain = level_map(complexes[e], complexes[e // l], "res")[0]
            cols = [groups[e // l].project(intlab.matvec(chain, z)) for z in groups[e].representatives]
            res[(e, l)] = intlab.from_columns(cols, groups[e // l].free_rank)
        for s in divisors(ctx.n // e)[1:]:
            chain = level_map(complexes[e], complexes[e * s], "tr")[0]
            cols = [groups[e * s].project(intlab.matvec(chain, z)) for z in groups[e].representatives]
            tr[(e, s)] = intlab.from_columns(cols, groups[e * s].free_rank)
    bases = {e: tuple(f"h{i}" for i in range(groups[e].free_rank)) for e in ctx.divisors}
    raw = MackeyTable(ctx, bases, tr, res, standard=False).validate()
    expected = normalize(hat_tuple(ctx, d, a))
    iso = find_isomorphism(build_table(expected), raw)
    if iso is None:
        raise StructuralError(f"H_0 for n={ctx.n}, d={d}, a={a} is not isomorphic to A^{expected}")
    return Pi0Result(raw, expected, iso, complexes, groups)


def identify_class(ctx, table: MackeyTable) -> list[RestrictionTuple]:
    """Normalized product tuples whose table is isomorphic to ``table``."""
    ctx = _ctx(ctx)
    seen, out = set(), []
    for t in invertible_tuples(ctx):
        nt = normalize(t)
        if nt.a in seen:
            continue
        seen.add(nt.a)
        if find_isomorphism(build_table(nt), table) is not None:
            out.append(nt)
    return out


def zigzag_cycle(c: EvaluatedComplex) -> list[int]:
    """The explicit degree-0 representative of ``x^n_1`` at the top level.

    Signs follow this module's total-complex convention; the middle term sits
    over the orbit ``j = 0``.
    """
    if c.level != c.ctx.n:
        raise ValueError("the zig-zag lives at the top level")
    n, d, a = c.ctx.n, c.d, c.a
    dprime = n // d
    mid, low = c.cells[(1, -1)], c.cells[(2, -2)]

    def label(g, j):
        return next(o for o, p in enumerate(g.reps) if g.orbit_of[p] == o and (p[0] - p[1]) % d == j % d)

    entries = {
        (0, 0): {(0, n): 1},
        (1, -1): {(label(mid, 0), dprime): -1},
        (2, -2): {(label(low, j), dprime): -1 for j in range(a % d)},
    }
    return c.vector(0, entries)


def type2_cycles(c: EvaluatedComplex) -> list[list[int]]:
    """Diagonal sums over all ``j`` in the lower right corner, one per ``q' | d'`` (top level)."""
    low = c.cells[(2, -2)]
    dprime = c.ctx.n // c.d
    out = []
    for qp in divisors(dprime):
        k = dprime // qp
        out.append(c.vector(0, {(2, -2): {(o, k): 1 for o in range(len(low.reps))}}))
    return out


def zigzag_check(ctx, d: int, a: int) -> bool:
    """The zig-zag is a cycle whose top-to-bottom restriction is ``+-a`` times a generator."""
    ctx = _ctx(ctx)
    top = smash_double_complex(ctx, d, a, ctx.n)
    bottom = smash_double_complex(ctx, d, a, 1)
    z = zigzag_cycle(top)
    if any(intlab.matvec(top.differential(0), z)):
        return False
    for y in type2_cycles(top):
        if any(intlab.matvec(top.differential(0), y)):
            return False
    h_top, h_bottom = homology_at_level(top, 0), homology_at_level(bottom, 0)
    coords = h_top.project(z)
    if gcd(*coords) != 1:
        return False
    down = intlab.matvec(level_map(top, bottom, "res")[0], z)
    (value,) = h_bottom.project(down)
    return abs(value) == a % d
