"""Command line entry point: ``picgrp <command> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from math import gcd, prod
from typing import Callable, Optional, Sequence

from . import __version__
from .burnside import (
    BurnsideElement,
    CyclicGroupContext,
    GhostVector,
    ghost,
    ghost_inverse,
    satisfies_cfb,
    totient,
    units,
    units_closed_form,
)
from .mackey import (
    RestrictionTuple,
    box_closed,
    box_quotient,
    build_table,
    change_of_basis_witness,
    count_classes,
    invertible_tuples,
    normalize,
    preferred_iso,
)
from .picalg import pic_burnside
from .spectra import borel_smith_basis, pic_group, ro_class, irreducibles, fixed_point_dimensions, \
    dimension_function, verify_surjectivity

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUITES = ("burnside", "mackey", "homology", "zmod", "all")


class UsageError(Exception):
    pass


def _keyed(d: dict) -> dict:
    return {str(k): v for k, v in d.items()}


def document(command: str, n: Optional[int], payload: dict) -> dict:
    return {"schema": SCHEMA, "version": __version__, "command": command, "n": n, "payload": payload}


def _positive(n: int) -> CyclicGroupContext:
    if n < 1:
        raise UsageError(f"n must be at least 1, got {n}")
    return CyclicGroupContext(n)


def _tuple_from_args(ctx: CyclicGroupContext, values: Sequence[int], what: str = "a") -> RestrictionTuple:
    need = len(ctx.divisors) - 1
    if len(values) != need:
        ds = ", ".join(str(d) for d in ctx.divisors[1:])
        raise UsageError(f"{what} needs {need} entries, one per divisor d != 1 ({ds})")
    try:
        return RestrictionTuple(ctx, "product", tuple(values))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# commands


def cmd_pic_a(n: int) -> tuple[dict, str]:
    ctx = _positive(n)
    g = pic_burnside(ctx)
    payload = {
        "order": g.order,
        "invariant_factors": list(g.invariant_factors),
        "components": {str(d): totient(d) // 2 for d in ctx.divisors if d > 2},
    }
    return document("pic-a", n, payload), f"Pic(A(C_{n})) = {g.describe()}  (order {g.order})"


def cmd_pic_sp(n: int) -> tuple[dict, str]:
    ctx = _positive(n)
    s = pic_group(ctx)
    cert = verify_surjectivity(ctx)
    payload = {
        "description": s.describe(),
        "finite": {"order": s.finite.order, "invariant_factors": list(s.finite.invariant_factors)},
        "free_rank": s.free_rank,
        "borel_smith_basis": {str(d): _keyed(f.as_dict()) for d, f in zip(ctx.divisors, borel_smith_basis(ctx))},
        "certificate": cert.to_dict(),
    }
    text = f"Pic(Sp^C_{n}) = {s.describe()}; RO(C_{n}) surjects: {cert.ok}"
    return document("pic-sp", n, payload), text


def cmd_normalize(n: int, values: Sequence[int]) -> tuple[dict, str]:
    ctx = _positive(n)
    a = _tuple_from_args(ctx, values)
    try:
        na = normalize(a)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    payload = {"input": _keyed(a.as_dict()), "normalized": _keyed(na.as_dict())}
    return document("normalize", n, payload), " ".join(str(x) for x in na.a)


def cmd_box(n: int, values: Sequence[int], oracle: bool = False) -> tuple[dict, str]:
    ctx = _positive(n)
    need = len(ctx.divisors) - 1
    if len(values) != 2 * need:
        raise UsageError(f"box needs {2 * need} integers: a then b, one per divisor d != 1")
    a = _tuple_from_args(ctx, values[:need])
    b = _tuple_from_args(ctx, values[need:], "b")
    c = box_closed(a, b)
    payload = {"a": _keyed(a.as_dict()), "b": _keyed(b.as_dict()), "box": _keyed(c.as_dict())}
    text = " ".join(str(x) for x in c.a)
    if oracle:
        q = box_quotient(a, b)
        match = q.table == build_table(c) and q.witness.transports(q.raw, build_table(c))
        payload["oracle_match"] = match
        text += f"  (presentation agrees: {match})"
    return document("box", n, payload), text


def cmd_pi0(n: int, d: int, a: int) -> tuple[dict, str]:
    from .homology import pi0_mackey

    ctx = _positive(n)
    if d <= 2 or n % d:
        raise UsageError(f"d={d} must be a divisor of {n} other than 1 and 2")
    if gcd(a, d) != 1:
        raise UsageError(f"a={a} must be coprime to d={d}")
    res = pi0_mackey(ctx, d, a)
    table = res.table
    tops = {k: table.restriction_on_generator(n, k)[0] for k in ctx.divisors[1:]}
    payload = {"expected": _keyed(res.expected.as_dict()), "table": table.to_dict(),
               "top_restrictions": _keyed(tops)}
    lines = [f"pi_0 of S^(lambda({n // d}) - lambda({a * n // d})) = A^{res.expected}"]
    lines += [f"  R^{k}(x^{n}_1) = {c} x^{n // k}_1" for k, c in tops.items()]
    return document("pi0", n, payload), "\n".join(lines)


def cmd_units(n: int) -> tuple[dict, str]:
    ctx = _positive(n)
    us = units(ctx)
    payload = {"units": [{"coefficients": _keyed(u.as_dict()), "marks": _keyed(ghost(u).as_dict())} for u in us]}
    return document("units", n, payload), "\n".join(str(u) for u in us)


# ---------------------------------------------------------------------------
# verification sweeps


def _checks_burnside(n: int) -> list[tuple[str, bool]]:
    ctx = CyclicGroupContext(n)
    rng = random.Random(n)
    found = sorted(u.coeffs for u in units(ctx))
    closed = sorted(u.coeffs for u in units_closed_form(ctx))
    cfb_ok = True
    for _ in range(50):
        x = BurnsideElement(ctx, tuple(rng.randint(-5, 5) for _ in ctx.divisors))
        cfb_ok &= satisfies_cfb(ghost(x))
        v = GhostVector(ctx, tuple(rng.randint(-6, 6) for _ in ctx.divisors))
        cfb_ok &= satisfies_cfb(v) == (ghost_inverse(v) is not None)
    order = prod(totient(d) // 2 for d in ctx.divisors if d > 2)
    return [("units", found == closed), ("cfb", cfb_ok), ("pic-order", pic_burnside(ctx).order == order)]


def _checks_mackey(n: int) -> list[tuple[str, bool]]:
    ctx = CyclicGroupContext(n)
    out = [("class-count", count_classes(ctx) == pic_burnside(ctx).order)]
    tuples = list(invertible_tuples(ctx))
    rng = random.Random(n)
    axioms = all(not build_table(t, validate=False).check_axioms() for t in rng.sample(tuples, min(4, len(tuples))))
    out.append(("axioms", axioms))
    if len(ctx.divisors) <= 6:
        ok = True
        for _ in range(3):
            a, b = rng.choice(tuples), rng.choice(tuples)
            q = box_quotient(a, b)
            ok &= q.witness.transports(q.raw, build_table(box_closed(a, b)))
        out.append(("box-oracle", ok))
        t = rng.choice(tuples)
        w = change_of_basis_witness(t, normalize(t))
        p1 = preferred_iso(t)
        p2 = preferred_iso(t, order=list(reversed(ctx.divisors[1:])), signs_first=True)
        out.append(("witness", w is not None and p1.matrices == p2.matrices))
    return out


def _checks_homology(n: int) -> list[tuple[str, bool]]:
    from .homology import pi0_mackey, vanishing_check, zigzag_check
    from .mackey import StructuralError

    ctx = CyclicGroupContext(n)
    out = []
    for d in ctx.divisors:
        if d <= 2:
            continue
        for a in range(1, d):
            if gcd(a, d) != 1:
                continue
            try:
                pi0_mackey(ctx, d, a)
                ok = True
            except StructuralError:
                ok = False
            out.append((f"pi0 d={d} a={a}", ok))
            out.append((f"vanishing d={d} a={a}", not vanishing_check(ctx, d, a)))
            out.append((f"zigzag d={d} a={a}", zigzag_check(ctx, d, a)))
    return out


def _checks_zmod(n: int) -> list[tuple[str, bool]]:
    from .zmodpic import classify_invertible

    return [("zmod-classes", classify_invertible(n).count == 1)]


def _checks_spectra(n: int) -> list[tuple[str, bool]]:
    ctx = CyclicGroupContext(n)
    dims = all(dimension_function(ro_class(v)) == fixed_point_dimensions(v) for _, v in irreducibles(ctx))
    return [("surjectivity", verify_surjectivity(ctx).ok), ("dimension-function", dims)]


SUITE_CHECKS: dict[str, list[Callable[[int], list[tuple[str, bool]]]]] = {
    "burnside": [_checks_burnside],
    "mackey": [_checks_mackey],
    "homology": [_checks_homology],
    "zmod": [_checks_zmod],
}
SUITE_CHECKS["all"] = [f for k in ("burnside", "mackey", "homology", "zmod") for f in SUITE_CHECKS[k]] + [_checks_spectra]


def _run_n(args: tuple[str, int]) -> list[tuple[int, str, bool]]:
    suite, n = args
    rows = []
    for check in SUITE_CHECKS[suite]:
        rows += [(n, name, ok) for name, ok in check(n)]
    return rows


def worker_count() -> int:
    raw = os.environ.get("PICGRP_THREADS", "1")
    try:
        k = int(raw)
    except ValueError as exc:
        raise UsageError(f"PICGRP_THREADS must be an integer, got {raw!r}") from exc
    if k < 0:
        raise UsageError("PICGRP_THREADS must be non-negative")
    return k or (os.cpu_count() or 1)


def cmd_verify(n_max: int, suite: str) -> tuple[dict, str, int]:
    if n_max < 1:
        raise UsageError(f"--n-max must be at least 1, got {n_max}")
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}")
    jobs = [(suite, n) for n in range(1, n_max + 1)]
    workers = worker_count()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_n, jobs))
    else:
        results = [_run_n(j) for j in jobs]
    rows = sorted((r for rs in results for r in rs), key=lambda r: (r[0], r[1]))
    failures = [r for r in rows if not r[2]]
    payload = {
        "suite": suite,
        "n_max": n_max,
        "passed": not failures,
        "checks": [{"n": n, "check": name, "status": "pass" if ok else "fail"} for n, name, ok in rows],
    }
    lines = [f"{n:4d}  {name:<28} {'pass' if ok else 'FAIL'}" for n, name, ok in rows]
    lines.append(f"{len(rows) - len(failures)}/{len(rows)} checks passed")
    for n, name, _ in failures:
        lines.append(f"falsified: n={n} check={name}")
    return document("verify", None, payload), "\n".join(lines), EXIT_FAIL if failures else EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="picgrp", description="Picard groups for the cyclic group C_n.")
    parser.add_argument("--json", action="store_true", help="emit machine-readable JSON")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="emit JSON")
        return p

    p = add("pic-a", "Picard group of the Burnside ring")
    p.add_argument("n", type=int)
    p = add("pic-sp", "Picard group of C_n-spectra with surjectivity certificate")
    p.add_argument("n", type=int)
    p = add("normalize", "canonical representative of a restriction tuple")
    p.add_argument("n", type=int)
    p.add_argument("a", type=int, nargs="*", help="a_d for divisors d != 1 in increasing order")
    p = add("box", "box product of A^a and A^b")
    p.add_argument("n", type=int)
    p.add_argument("values", type=int, nargs="*", help="a then b, each one entry per divisor d != 1")
    p.add_argument("--oracle", action="store_true", help="compare against the generators-and-relations quotient")
    p = add("pi0", "pi_0 of S^(lambda(n/d) - lambda(a n/d)) from cellular chains")
    p.add_argument("n", type=int)
    p.add_argument("d", type=int)
    p.add_argument("a", type=int)
    p = add("units", "units of the Burnside ring")
    p.add_argument("n", type=int)
    p = add("verify", "run invariant sweeps")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--suite", choices=SUITES, default="all")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    code = EXIT_OK
    try:
        if args.command == "pic-a":
            doc, text = cmd_pic_a(args.n)
        elif args.command == "pic-sp":
            doc, text = cmd_pic_sp(args.n)
        elif args.command == "normalize":
            doc, text = cmd_normalize(args.n, args.a)
        elif args.command == "box":
            doc, text = cmd_box(args.n, args.values, args.oracle)
        elif args.command == "pi0":
            doc, text = cmd_pi0(args.n, args.d, args.a)
        elif args.command == "units":
            doc, text = cmd_units(args.n)
        else:
            doc, text, code = cmd_verify(args.n_max, args.suite)
    except UsageError as exc:
        print(f"picgrp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps(doc, sort_keys=True) if args.json else text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
