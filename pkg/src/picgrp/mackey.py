"""The invertible Mackey functor families ``^aA`` (perstep) and ``A^a`` (product) for C_n.

Level ``m`` stands for ``A(C_n/C_m) = A(C_m)`` with basis ``x^m_q`` (``q | m``),
``x^m_q`` being the ``C_m``-set ``C_m/C_{m/q}`` of cardinality ``q``. Matrices
act on column vectors: column ``j`` is the image of the ``j``-th basis element.

``transfer[(m, k)]`` maps level ``m`` to level ``k*m``; ``restriction[(m, k)]``
maps level ``m`` to level ``m/k``. Both are stored for every ``k > 1``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from math import gcd, prod
from typing import Iterable, Mapping, Optional, Sequence

from . import intlab
from .burnside import BurnsideElement, CyclicGroupContext, _ctx, divisors, prime_factors, restrict, units
from .intlab import Matrix

PRODUCT = "product"
PERSTEP = "perstep"


class StructuralError(RuntimeError):
    """A computation produced something the theory rules out."""


# ---------------------------------------------------------------------------
# restriction tuples


@dataclass(frozen=True)
class RestrictionTuple:
    ctx: CyclicGroupContext
    variant: str
    a: tuple[int, ...]  # aligned with ctx.divisors[1:]

    def __post_init__(self):
        if self.variant not in (PRODUCT, PERSTEP):
            raise ValueError(f"unknown variant {self.variant!r}")
        if len(self.a) != len(self.ctx.divisors) - 1:
            raise ValueError(f"need one entry per divisor d != 1 of {self.ctx.n}")
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        for d, x in zip(self.ctx.divisors[1:], self.a):
            if x == 0:
                raise ValueError(f"a_{d} must be nonzero")
        if self.variant == PERSTEP:
            for d in self.ctx.divisors[1:]:
                for e in divisors(d)[1:-1]:
                    if self.value(d) % self.value(e):
                        raise ValueError(f"perstep tuple needs a_{e} | a_{d} (pair e={e}, d={d})")

    @classmethod
    def from_dict(cls, ctx, values: Mapping[int, int], variant: str = PRODUCT) -> "RestrictionTuple":
        ctx = _ctx(ctx)
        extra = set(values) - set(ctx.divisors[1:])
        if extra:
            raise ValueError(f"{sorted(extra)} are not divisors d != 1 of {ctx.n}")
        return cls(ctx, variant, tuple(values.get(d, 1) for d in ctx.divisors[1:]))

    @classmethod
    def trivial(cls, ctx, variant: str = PRODUCT) -> "RestrictionTuple":
        ctx = _ctx(ctx)
        return cls(ctx, variant, (1,) * (len(ctx.divisors) - 1))

    @classmethod
    def single(cls, ctx, d: int, value: int) -> "RestrictionTuple":
        """Product tuple with ``a_d = value`` and all other entries 1."""
        return cls.from_dict(ctx, {d: value})

    def value(self, d: int) -> int:
        if d == 1:
            return 1
        return self.a[self.ctx.divisors.index(d) - 1]

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.ctx.divisors[1:], self.a))

    @property
    def invertible(self) -> bool:
        return all(gcd(x, d) == 1 for d, x in zip(self.ctx.divisors[1:], self.a))

    def top_coefficient(self, k: int) -> int:
        """The integer ``c`` with ``R^k(x^n_1) = c x^{n/k}_1``."""
        if self.variant == PERSTEP:
            return self.value(k)
        return prod(self.value(d) for d in divisors(k))

    def restriction_coefficient(self, m: int, step: int) -> int:
        """The integer ``c`` with ``R^step(x^m_1) = c x^{m/step}_1``."""
        k = self.ctx.n // m
        if self.variant == PERSTEP:
            q, r = divmod(self.value(k * step), self.value(k))
            assert r == 0
            return q
        return prod(self.value(d) for d in divisors(k * step) if k % d)

    def with_value(self, d: int, value: int) -> "RestrictionTuple":
        vals = self.as_dict()
        vals[d] = value
        return RestrictionTuple.from_dict(self.ctx, vals, self.variant)

    def __str__(self):
        return "(" + ", ".join(f"a_{d}={x}" for d, x in self.as_dict().items()) + ")"


def box_closed(a: RestrictionTuple, b: RestrictionTuple) -> RestrictionTuple:
    _same_kind(a, b)
    return RestrictionTuple(a.ctx, a.variant, tuple(x * y for x, y in zip(a.a, b.a)))


def normalize(a: RestrictionTuple) -> RestrictionTuple:
    """Replace each ``a_d`` by the representative of ``+-a_d mod d`` in ``[1, d/2)``."""
    out = []
    for d, x in zip(a.ctx.divisors[1:], a.a):
        if gcd(x, d) != 1:
            raise ValueError(f"a_{d}={x} is not invertible modulo {d}")
        s = x % d
        out.append(min(s, d - s))
    return RestrictionTuple(a.ctx, a.variant, tuple(out))


def are_isomorphic(a: RestrictionTuple, b: RestrictionTuple) -> bool:
    """``A^a ~ A^b`` iff ``a_d = +-b_d mod d`` for every ``d``."""
    _same_kind(a, b)
    _require_product(a)
    return all((x - y) % d == 0 or (x + y) % d == 0 for d, x, y in zip(a.ctx.divisors[1:], a.a, b.a))


def invertible_tuples(ctx) -> Iterable[RestrictionTuple]:
    """All product tuples with ``1 <= a_d < d`` and ``gcd(a_d, d) = 1``."""
    ctx = _ctx(ctx)
    choices = [[x for x in range(1, d) if gcd(x, d) == 1] for d in ctx.divisors[1:]]
    for combo in itertools.product(*choices):
        yield RestrictionTuple(ctx, PRODUCT, combo)


def count_classes(ctx) -> int:
    reps: list[RestrictionTuple] = []
    for t in invertible_tuples(ctx):
        if not any(are_isomorphic(t, r) for r in reps):
            reps.append(t)
    return len(reps)


def _same_kind(a: RestrictionTuple, b: RestrictionTuple) -> None:
    if a.ctx.n != b.ctx.n or a.variant != b.variant:
        raise ValueError("tuples must share the group and the variant")


def _require_product(a: RestrictionTuple) -> None:
    if a.variant != PRODUCT:
        raise ValueError("isomorphism questions are only handled for the product variant")


# ---------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class MackeyTable:
    ctx: CyclicGroupContext
    bases: dict[int, tuple]
    transfer: dict[tuple[int, int], Matrix]
    restriction: dict[tuple[int, int], Matrix]
    standard: bool = True

    def dim(self, m: int) -> int:
        return len(self.bases[m])

    def tr(self, m: int, k: int) -> Matrix:
        if k == 1:
            return intlab.identity(self.dim(m))
        return self.transfer[(m, k)]

    def res(self, m: int, k: int) -> Matrix:
        if k == 1:
            return intlab.identity(self.dim(m))
        return self.restriction[(m, k)]

    def check_axioms(self) -> list[str]:
        """Return a list of violated axioms (empty when the table is a Mackey functor)."""
        problems = []
        n = self.ctx.n
        divs = self.ctx.divisors
        if self.standard:
            for (m, k), mat in self.transfer.items():
                for j, q in enumerate(self.bases[m]):
                    col = [0] * self.dim(k * m)
                    col[self.bases[k * m].index(k * q)] = 1
                    if intlab.column(mat, j) != col:
                        problems.append(f"tr^{k}(x^{m}_{q}) != x^{k * m}_{k * q}")
        for m in divs:
            for k in divisors(m):
                for l in divisors(m // k):
                    lhs = intlab.matmul(self.res(m // k, l), self.res(m, k), inner=self.dim(m // k))
                    if lhs != self.res(m, k * l):
                        problems.append(f"R^{l} R^{k} != R^{k * l} at level {m}")
            for k in divisors(n // m):
                for l in divisors(n // (m * k)):
                    lhs = intlab.matmul(self.tr(k * m, l), self.tr(m, k), inner=self.dim(k * m))
                    if lhs != self.tr(m, k * l):
                        problems.append(f"tr^{l} tr^{k} != tr^{k * l} at level {m}")
            # double coset formula R^l tr^q = g tr^{q/g} R^{l/g}, g = gcd(l, q)
            for q in divisors(m):
                for l in divisors(m):
                    g = gcd(l, q)
                    lhs = intlab.matmul(self.res(m, l), self.tr(m // q, q), inner=self.dim(m))
                    inner = intlab.matmul(self.tr(m // (q * (l // g)), q // g), self.res(m // q, l // g),
                                          inner=self.dim(m // (q * (l // g))))
                    rhs = [[g * x for x in row] for row in inner]
                    if lhs != rhs:
                        problems.append(f"double coset formula fails for R^{l} tr^{q} into level {m}")
        return problems

    def validate(self) -> "MackeyTable":
        problems = self.check_axioms()
        if problems:
            raise StructuralError("; ".join(problems[:5]))
        return self

    def restriction_on_generator(self, m: int, k: int) -> list[int]:
        return intlab.column(self.res(m, k), 0)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        levels = {}
        for m in self.ctx.divisors:
            levels[str(m)] = {
                "basis": [str(b) for b in self.bases[m]],
                "transfer": {str(k): self.transfer[(m, k)] for (mm, k) in sorted(self.transfer) if mm == m},
                "restriction": {str(k): self.restriction[(m, k)] for (mm, k) in sorted(self.restriction) if mm == m},
            }
        return {"n": self.ctx.n, "standard": self.standard, "levels": levels}

    @classmethod
    def from_dict(cls, data: Mapping) -> "MackeyTable":
        ctx = CyclicGroupContext(int(data["n"]))
        standard = bool(data.get("standard", True))
        bases, tr, res = {}, {}, {}
        for key, level in data["levels"].items():
            m = int(key)
            labels = level["basis"]
            bases[m] = tuple(int(b) for b in labels) if standard else tuple(labels)
            for k, mat in level["transfer"].items():
                tr[(m, int(k))] = [list(map(int, r)) for r in mat]
            for k, mat in level["restriction"].items():
                res[(m, int(k))] = [list(map(int, r)) for r in mat]
        return cls(ctx, bases, tr, res, standard)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def __eq__(self, other):
        if not isinstance(other, MackeyTable):
            return NotImplemented
        return (self.ctx.n == other.ctx.n and self.bases == other.bases
                and self.transfer == other.transfer and self.restriction == other.restriction)

    __hash__ = None


def _standard_transfers(ctx: CyclicGroupContext) -> dict[tuple[int, int], Matrix]:
    n = ctx.n
    out = {}
    for m in ctx.divisors:
        src = divisors(m)
        for k in divisors(n // m)[1:]:
            dst = divisors(k * m)
            mat = intlab.zeros(len(dst), len(src))
            for j, q in enumerate(src):
                mat[dst.index(k * q)][j] = 1
            out[(m, k)] = mat
    return out


def build_table(a: RestrictionTuple, validate: bool = True) -> MackeyTable:
    """Explicit table of ``A^a`` (or ``^aA``).

    Generators ``x^m_1`` restrict by ``a.restriction_coefficient``; the other
    generators ``x^m_q = tr^q(x^{m/q}_1)`` restrict through the double coset
    formula ``R^l tr^q = g tr^{q/g} R^{l/g}`` with ``g = gcd(l, q)``.
    """
    ctx = a.ctx
    bases = {m: divisors(m) for m in ctx.divisors}
    res = {}
    for m in ctx.divisors:
        src = bases[m]
        for l in divisors(m)[1:]:
            dst = bases[m // l]
            mat = intlab.zeros(len(dst), len(src))
            for j, q in enumerate(src):
                g = gcd(l, q)
                lp, qp = l // g, q // g
                c = a.restriction_coefficient(m // q, lp)
                mat[dst.index(qp)][j] = g * c
            res[(m, l)] = mat
    table = MackeyTable(ctx, bases, _standard_transfers(ctx), res)
    return table.validate() if validate else table


def burnside_table(ctx) -> MackeyTable:
    return build_table(RestrictionTuple.trivial(_ctx(ctx)))


# ---------------------------------------------------------------------------
# isomorphisms as per-level basis changes


@dataclass(frozen=True)
class BasisChange:
    """An isomorphism of tables: ``matrices[m]`` sends source coordinates to target coordinates."""

    ctx: CyclicGroupContext
    matrices: dict[int, Matrix]
    moves: tuple = field(default=(), compare=False)

    def compose(self, first: "BasisChange") -> "BasisChange":
        """``self o first``."""
        mats = {m: intlab.matmul(self.matrices[m], first.matrices[m], inner=len(first.matrices[m]))
                for m in self.ctx.divisors}
        return BasisChange(self.ctx, mats, first.moves + self.moves)

    def inverse(self) -> "BasisChange":
        return BasisChange(self.ctx, {m: intlab.unimodular_inverse(x) for m, x in self.matrices.items()})

    @property
    def is_identity(self) -> bool:
        return all(x == intlab.identity(len(x)) for x in self.matrices.values())

    def is_unimodular(self) -> bool:
        return all(intlab.is_unimodular(x) for x in self.matrices.values())

    def transports(self, src: MackeyTable, dst: MackeyTable) -> bool:
        """Exact check that every transfer and restriction of ``src`` is carried to ``dst``."""
        if not self.is_unimodular():
            return False
        f = self.matrices
        for (m, k), mat in src.restriction.items():
            lhs = intlab.matmul(f[m // k], mat, inner=src.dim(m // k))
            rhs = intlab.matmul(dst.restriction[(m, k)], f[m], inner=dst.dim(m))
            if lhs != rhs:
                return False
        for (m, k), mat in src.transfer.items():
            lhs = intlab.matmul(f[k * m], mat, inner=src.dim(k * m))
            rhs = intlab.matmul(dst.transfer[(m, k)], f[m], inner=dst.dim(m))
            if lhs != rhs:
                return False
        return True

    def apply(self, src: MackeyTable, standard: bool = True) -> MackeyTable:
        """The table of ``src`` rewritten in the target coordinates."""
        inv = {m: intlab.unimodular_inverse(x) for m, x in self.matrices.items()}
        f = self.matrices
        res = {(m, k): intlab.matmul(intlab.matmul(f[m // k], mat, inner=src.dim(m // k)), inv[m], inner=src.dim(m))
               for (m, k), mat in src.restriction.items()}
        tr = {(m, k): intlab.matmul(intlab.matmul(f[k * m], mat, inner=src.dim(k * m)), inv[m], inner=src.dim(m))
              for (m, k), mat in src.transfer.items()}
        bases = {m: divisors(m) for m in src.ctx.divisors} if standard else dict(src.bases)
        return MackeyTable(src.ctx, bases, tr, res, standard)

    def to_dict(self) -> dict:
        return {"n": self.ctx.n, "levels": {str(m): x for m, x in sorted(self.matrices.items())},
                "moves": [list(mv) for mv in self.moves]}


def identity_change(ctx) -> BasisChange:
    ctx = _ctx(ctx)
    return BasisChange(ctx, {m: intlab.identity(len(divisors(m))) for m in ctx.divisors})


def _change_from_generators(table: MackeyTable, gens: Mapping[int, Sequence[int]], moves=()) -> BasisChange:
    """Basis change whose new basis is ``y^m_1 = gens[m]``, ``y^m_q = tr^q y^{m/q}_1``."""
    mats = {}
    for m in table.ctx.divisors:
        cols = [intlab.matvec(table.tr(m // q, q), gens[m // q]) for q in divisors(m)]
        p = intlab.from_columns(cols, table.dim(m))
        if not intlab.is_unimodular(p):
            raise StructuralError(f"proposed basis at level {m} is not unimodular")
        mats[m] = intlab.unimodular_inverse(p)
    return BasisChange(table.ctx, mats, tuple(moves))


def iso_from_top(src: RestrictionTuple, dst: RestrictionTuple, top: Sequence[int], move=None) -> BasisChange:
    """Isomorphism ``A^src -> A^dst`` with ``x^n_1 -> top`` read as the new top generator.

    Lower generators are ``y^{n/j}_1 = R^j(top) / c_j`` where ``c_j`` is the
    top coefficient of ``dst``; the division has to be exact.
    """
    _require_product(src)
    table = build_table(src, validate=False)
    n = src.ctx.n
    gens = {}
    for j in src.ctx.divisors:
        w = intlab.matvec(table.res(n, j), top)
        c = dst.top_coefficient(j)
        if any(x % c for x in w):
            raise StructuralError(f"R^{j} of the new top generator is not divisible by {c}")
        gens[n // j] = [x // c for x in w]
    change = _change_from_generators(table, gens, moves=(move,) if move else ())
    if not change.transports(table, build_table(dst, validate=False)):
        raise StructuralError(f"basis change does not carry A^{src} onto A^{dst}")
    return change


def shift_move(c: RestrictionTuple, k: int, t: int) -> tuple[BasisChange, RestrictionTuple]:
    """Add ``t*k`` to ``a_k`` via ``y^n_1 = x^n_1 + t (prod_{d | k, d != k} a_d) x^n_k``."""
    new = c.with_value(k, c.value(k) + t * k)
    top = [0] * len(c.ctx.divisors)
    top[0] = 1
    if t:
        top[c.ctx.divisors.index(k)] += t * prod(c.value(d) for d in divisors(k)[:-1])
    return iso_from_top(c, new, top, move=("shift", k, t)), new


def sign_move(c: RestrictionTuple, flips: Iterable[int]) -> tuple[BasisChange, RestrictionTuple]:
    """Negate ``a_d`` for ``d`` in ``flips``; ``y^{n/k}_1 = (prod_{d | k} sign_d) x^{n/k}_1``."""
    flips = set(flips)
    new = RestrictionTuple(c.ctx, c.variant, tuple(-x if d in flips else x for d, x in zip(c.ctx.divisors[1:], c.a)))
    top = [0] * len(c.ctx.divisors)
    top[0] = 1
    return iso_from_top(c, new, top, move=("sign", tuple(sorted(flips)))), new


def change_of_basis_witness(
    a: RestrictionTuple,
    b: RestrictionTuple,
    order: Optional[Sequence[int]] = None,
    signs_first: bool = False,
) -> Optional[BasisChange]:
    """Explicit isomorphism ``A^a -> A^b`` built from shift and sign moves, or ``None``.

    ``order`` fixes the sequence in which divisors are shifted; ``signs_first``
    applies the sign flips before any shift. Every move is checked by exact
    transport of the tables.
    """
    if not are_isomorphic(a, b):
        return None
    ctx = a.ctx
    order = list(order) if order is not None else list(ctx.divisors[1:])
    flips = [d for d in ctx.divisors[1:] if (a.value(d) - b.value(d)) % d != 0]
    total = identity_change(ctx)
    cur = a
    if signs_first and flips:
        step, cur = sign_move(cur, flips)
        total = step.compose(total)
    for k in order:
        target = b.value(k) if (cur.value(k) - b.value(k)) % k == 0 else -b.value(k)
        t = (target - cur.value(k)) // k
        if t:
            step, cur = shift_move(cur, k, t)
            total = step.compose(total)
    if not signs_first:
        wrong = [d for d in ctx.divisors[1:] if cur.value(d) != b.value(d)]
        if wrong:
            step, cur = sign_move(cur, wrong)
            total = step.compose(total)
    if cur.a != b.a:  # pragma: no cover - move bookkeeping
        raise StructuralError(f"moves ended at {cur} instead of {b}")
    if not total.transports(build_table(a, validate=False), build_table(b, validate=False)):
        raise StructuralError("composite witness fails to transport the tables")
    return total


def unit_action(table: MackeyTable, u: BurnsideElement) -> BasisChange:
    """Action of ``u`` in ``A(C_n)`` on every level (``[C_m/C_j]`` acts by ``tr R``)."""
    mats = {}
    for m in table.ctx.divisors:
        ru = restrict(u, m)
        acc = intlab.zeros(table.dim(m), table.dim(m))
        for j, coeff in ru.as_dict().items():
            if coeff:
                k = m // j
                op = intlab.matmul(table.tr(j, k), table.res(m, k), inner=table.dim(j))
                for r in range(len(acc)):
                    for s in range(len(acc)):
                        acc[r][s] += coeff * op[r][s]
        mats[m] = acc
    return BasisChange(table.ctx, mats, (("unit", str(u)),))


def aut_group(ctx, a: Optional[RestrictionTuple] = None) -> list[BasisChange]:
    """Automorphisms coming from the units of ``A(C_n)`` (default: of the Burnside functor)."""
    ctx = _ctx(ctx)
    table = build_table(a or RestrictionTuple.trivial(ctx), validate=False)
    out = []
    for u in units(ctx):
        f = unit_action(table, u)
        if not f.transports(table, table):
            raise StructuralError(f"unit {u} does not act by automorphisms")
        out.append(f)
    return out


def preferred_iso(a: RestrictionTuple, **witness_options) -> BasisChange:
    """The isomorphism ``A^a -> A^{normalize(a)}`` fixing ``x^1_1`` and, for even n, the sign of ``y^n_1``."""
    target = normalize(a)
    base = change_of_basis_witness(a, target, **witness_options)
    assert base is not None
    ctx = a.ctx
    chosen = [
        f.compose(base)
        for f in aut_group(ctx, target)
        if _preferred(f.compose(base), ctx)
    ]
    if len(chosen) != 1:
        raise StructuralError(f"expected exactly one preferred isomorphism, found {len(chosen)}")
    return chosen[0]


def _preferred(f: BasisChange, ctx: CyclicGroupContext) -> bool:
    if f.matrices[1] != [[1]]:
        return False
    return not ctx.even or f.matrices[ctx.n][0][0] == 1


# ---------------------------------------------------------------------------
# the adjunction's right adjoint U


@dataclass(frozen=True)
class ModuleAction:
    """``U`` of a table: the top level with ``[C_n/C_m]`` acting by ``tr^{n/m} R^{n/m}``."""

    ctx: CyclicGroupContext
    basis: tuple[int, ...]
    action: dict[int, Matrix]

    def act(self, x: BurnsideElement, v: Sequence[int]) -> list[int]:
        out = [0] * len(self.basis)
        for m, c in x.as_dict().items():
            if c:
                w = intlab.matvec(self.action[m], v)
                out = [o + c * y for o, y in zip(out, w)]
        return out


def u_functor(a: RestrictionTuple) -> ModuleAction:
    table = build_table(a)
    n = a.ctx.n
    action = {m: intlab.matmul(table.tr(m, n // m), table.res(n, n // m), inner=table.dim(m))
              for m in a.ctx.divisors}
    return ModuleAction(a.ctx, divisors(n), action)


# ---------------------------------------------------------------------------
# box product by generators and relations


@dataclass(frozen=True)
class BoxQuotient:
    """The level-wise Frobenius-reciprocity quotient and its comparison with the closed form.

    ``raw`` is the quotient in Smith coordinates; ``witness`` carries ``raw``
    onto ``table``, whose basis is ``z^m_q = [x^{m/q}_1 (x) y^{m/q}_1]``.
    """

    raw: MackeyTable
    witness: BasisChange
    table: MackeyTable


def _box_generators(m: int) -> list[tuple[int, int, int]]:
    return [(k, q, r) for k in divisors(m) for q in divisors(k) for r in divisors(k)]


def box_quotient(a: RestrictionTuple, b: RestrictionTuple) -> BoxQuotient:
    _same_kind(a, b)
    ctx = a.ctx
    ta, tb = build_table(a, validate=False), build_table(b, validate=False)
    gens = {m: _box_generators(m) for m in ctx.divisors}
    index = {m: {g: i for i, g in enumerate(gens[m])} for m in ctx.divisors}

    def tensor(m, k, vx, vy):
        out = [0] * len(gens[m])
        bk = divisors(k)
        for i, x in enumerate(vx):
            if x:
                for j, y in enumerate(vy):
                    if y:
                        out[index[m][(k, bk[i], bk[j])]] += x * y
        return out

    def unit_vec(k, q):
        v = [0] * len(divisors(k))
        v[divisors(k).index(q)] = 1
        return v

    proj, lift, rels = {}, {}, {}
    for m in ctx.divisors:
        relations = []
        for e in divisors(m):
            for k in divisors(e)[:-1]:
                t = e // k
                for q in divisors(k):
                    for r in divisors(e):
                        lhs = tensor(m, e, intlab.matvec(ta.tr(k, t), unit_vec(k, q)), unit_vec(e, r))
                        rhs = tensor(m, k, unit_vec(k, q), intlab.matvec(tb.res(e, t), unit_vec(e, r)))
                        relations.append([p - s for p, s in zip(lhs, rhs)])
                for q in divisors(e):
                    for r in divisors(k):
                        lhs = tensor(m, e, unit_vec(e, q), intlab.matvec(tb.tr(k, t), unit_vec(k, r)))
                        rhs = tensor(m, k, intlab.matvec(ta.res(e, t), unit_vec(e, q)), unit_vec(k, r))
                        relations.append([p - s for p, s in zip(lhs, rhs)])
        size = len(gens[m])
        matrix = intlab.from_columns(relations, size) if relations else intlab.zeros(size, 0)
        snf = intlab.smith_normal_form(matrix, cols=len(relations))
        diag = list(snf.diagonal) + [0] * (size - len(snf.diagonal))
        torsion = [x for x in diag if x > 1]
        free = [i for i, x in enumerate(diag) if x == 0]
        if torsion or len(free) != len(divisors(m)):
            raise StructuralError(f"box quotient at level {m} is not free of rank {len(divisors(m))}: "
                                  f"torsion {torsion}, rank {len(free)}")
        proj[m] = [snf.u[i] for i in free]
        lift[m] = [[row[i] for i in free] for row in snf.u_inv]
        rels[m] = matrix

    def induced(src, dst, gen_map):
        cols = []
        for f in range(len(proj[src])):
            vec = [row[f] for row in lift[src]]
            image = [0] * len(gens[dst])
            for i, c in enumerate(vec):
                if c:
                    for j, coeff in gen_map(gens[src][i]):
                        image[j] += c * coeff
            cols.append(intlab.matvec(proj[dst], image))
        # well-definedness: relations must map to zero
        for col in intlab.transpose(rels[src], cols=0) if rels[src] and rels[src][0] else []:
            image = [0] * len(gens[dst])
            for i, c in enumerate(col):
                if c:
                    for j, coeff in gen_map(gens[src][i]):
                        image[j] += c * coeff
            if any(intlab.matvec(proj[dst], image)):
                raise StructuralError(f"induced map {src} -> {dst} does not respect the relations")
        return intlab.from_columns(cols, len(proj[dst]))

    transfer, restriction = {}, {}
    for m in ctx.divisors:
        for s in divisors(ctx.n // m)[1:]:
            transfer[(m, s)] = induced(m, s * m, lambda g, dst=s * m: [(index[dst][g], 1)])
        for l in divisors(m)[1:]:
            dst = m // l

            def res_map(g, m=m, dst=dst):
                k, q, r = g
                h = gcd(k, dst)
                count = m // (k * dst // h)
                step = k // h
                vx = intlab.matvec(ta.res(k, step), unit_vec(k, q))
                vy = intlab.matvec(tb.res(k, step), unit_vec(k, r))
                bh = divisors(h)
                return [(index[dst][(h, bh[i], bh[j])], count * x * y)
                        for i, x in enumerate(vx) if x for j, y in enumerate(vy) if y]

            restriction[(m, l)] = induced(m, dst, res_map)

    raw_bases = {m: tuple(f"f{i}" for i in range(len(proj[m]))) for m in ctx.divisors}
    raw = MackeyTable(ctx, raw_bases, transfer, restriction, standard=False).validate()

    mats = {}
    for m in ctx.divisors:
        cols = []
        for q in divisors(m):
            g = [0] * len(gens[m])
            g[index[m][(m // q, 1, 1)]] = 1
            cols.append(intlab.matvec(proj[m], g))
        z = intlab.from_columns(cols, len(proj[m]))
        if not intlab.is_unimodular(z):
            raise StructuralError(f"transferred diagonal generators do not span level {m}")
        mats[m] = intlab.unimodular_inverse(z)
    witness = BasisChange(ctx, mats, (("box-basis",),))
    table = witness.apply(raw).validate()
    return BoxQuotient(raw, witness, table)


def box_presentation(a: RestrictionTuple, b: RestrictionTuple) -> MackeyTable:
    return box_quotient(a, b).table


def extract_tuple(table: MackeyTable, variant: str = PRODUCT) -> RestrictionTuple:
    """Read ``a`` back from a standard table via ``R^k(x^n_1)``."""
    n = table.ctx.n
    top = {}
    values = {}
    for k in table.ctx.divisors[1:]:
        col = table.restriction_on_generator(n, k)
        if any(col[1:]):
            raise StructuralError(f"R^{k}(x^n_1) is not a multiple of x^{n // k}_1")
        top[k] = col[0]
        if variant == PERSTEP:
            values[k] = col[0]
        else:
            rest = prod(values[d] for d in divisors(k)[1:-1])
            if top[k] % rest:
                raise StructuralError("restriction coefficients are not of product form")
            values[k] = top[k] // rest
    return RestrictionTuple.from_dict(table.ctx, values, variant)


# ---------------------------------------------------------------------------
# isomorphism search against an arbitrary table


def find_isomorphism(std: MackeyTable, other: MackeyTable) -> Optional[BasisChange]:
    """Search for an isomorphism ``other -> std`` where ``std`` is a standard ``A^c`` table.

    A map ``G: std -> other`` commuting with transfers is fixed by the images
    ``g_m = G(x^m_1)``; commuting with prime restrictions is linear in the
    ``g_m``. ``G`` is invertible exactly when every ``g_m`` generates
    ``other(m)`` modulo transfers, i.e. a linear functional takes value +-1 on
    it. Each sign pattern is one integer linear system.
    """
    ctx = std.ctx
    divs = ctx.divisors
    offsets, total = {}, 0
    for m in divs:
        offsets[m] = total
        total += other.dim(m)
        if other.dim(m) != std.dim(m):
            return None

    def image_block(m, q):
        """Matrix (dim other(m) x total) giving G(x^m_q) from the unknowns."""
        block = intlab.zeros(other.dim(m), total)
        t = other.tr(m // q, q)
        off = offsets[m // q]
        for i, row in enumerate(t):
            for j, x in enumerate(row):
                block[i][off + j] = x
        return block

    rows: list[list[int]] = []
    for m in divs:
        blocks = {q: image_block(m, q) for q in divisors(m)}
        for p in prime_factors(m) if m > 1 else ():
            sub = {q: image_block(m // p, q) for q in divisors(m // p)}
            r_other = other.res(m, p)
            r_std = std.res(m, p)
            for jq, q in enumerate(divisors(m)):
                lhs = intlab.matmul(r_other, blocks[q], inner=other.dim(m))
                for i in range(other.dim(m // p)):
                    row = lhs[i][:]
                    for jj, qq in enumerate(divisors(m // p)):
                        c = r_std[jj][jq]
                        if c:
                            srow = sub[qq][i]
                            for v in range(total):
                                row[v] -= c * srow[v]
                    if any(row):
                        rows.append(row)

    functionals = []
    for m in divs:
        gens = [intlab.column(other.tr(m // p, p), j)
                for p in (prime_factors(m) if m > 1 else ()) for j in range(other.dim(m // p))]
        mat = intlab.from_columns(gens, other.dim(m)) if gens else intlab.zeros(other.dim(m), 0)
        snf = intlab.smith_normal_form(mat, cols=len(gens))
        diag = list(snf.diagonal) + [0] * (other.dim(m) - len(snf.diagonal))
        free = [i for i, x in enumerate(diag) if x == 0]
        if len(free) != 1 or any(x > 1 for x in diag):
            return None
        lam = [0] * total
        for j, x in enumerate(snf.u[free[0]]):
            lam[offsets[m] + j] = x
        functionals.append(lam)

    system = rows + functionals
    snf = intlab.smith_normal_form(system, cols=total)
    hom_rhs = [0] * len(rows)
    for signs in itertools.product((1, -1), repeat=len(divs) - 1):
        sol = intlab.solve_with(snf, hom_rhs + [1, *signs])
        if sol is None:
            continue
        mats = {}
        for m in divs:
            cols = [intlab.matvec(image_block(m, q), sol) for q in divisors(m)]
            g = intlab.from_columns(cols, other.dim(m))
            if not intlab.is_unimodular(g):  # pragma: no cover - guaranteed by the functionals
                raise StructuralError("solution is not invertible")
            mats[m] = intlab.unimodular_inverse(g)
        change = BasisChange(ctx, mats, (("search",),))
        if not change.transports(other, std):
            raise StructuralError("isomorphism search produced a non-transporting map")
        return change
    return None
