"""Command-line surface: verify, allocate, subsidize, reduce-lfmm,
check-lfmm, gen, bench, oracle.

Exit codes: 0 on success, 1 on property-violation outcomes (a failed
verification, no satisfying payment vector, equivalence false, an oracle
reporting a violation), 2 on input errors. All outputs are byte-identical
across runs and worker counts, except the wall_ms benchmark column.
"""

from __future__ import annotations

import argparse
import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import allocate, hardness, matching, model, pram, subsidy, verify

_METHODS = ("rr", "two-agent", "identical", "matching", "welfare-max")
_PRIMITIVES = ("reduce", "sort", "apsp", "closure")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise model.ParfairError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _load_instance(path: str) -> model.Instance:
    return model.parse_instance_text(_read(path))


def _load_allocation(path: str, inst: model.Instance) -> model.Allocation:
    return model.parse_allocation_text(_read(path), inst)


def _parse_order(spec: str | None, n: int) -> allocate.AgentOrder:
    if spec is None:
        return allocate.identity_order(n)
    try:
        sigma = tuple(int(p) - 1 for p in spec.split(","))
    except ValueError:
        raise model.ParfairError(f"order must be comma-separated integers, got {spec!r}") from None
    return allocate.AgentOrder(sigma=sigma)


def _parse_alpha(spec: str) -> Fraction:
    try:
        return Fraction(spec)
    except (ValueError, ZeroDivisionError):
        raise model.ParfairError(f"alpha must be a rational like 1/2, got {spec!r}") from None


# ---------------------------------------------------------------------------
# Verbs


def _cmd_verify(args) -> int:
    inst = _load_instance(args.instance)
    alloc = _load_allocation(args.allocation, inst)
    checker = {"ef": verify.check_ef, "ef1": verify.check_ef1, "efx": verify.check_efx}[
        args.property
    ]
    report = checker(inst, alloc)
    if report.holds:
        print(f"PASS {report.property}")
        return 0
    w = report.witness
    items = " items=" + ",".join(str(g + 1) for g in w.items) if w.items else ""
    print(f"FAIL {report.property} witness=({w.envier + 1},{w.envied + 1}){items}")
    return 1


def _cmd_allocate(args) -> int:
    inst = _load_instance(args.instance)
    if args.method == "rr":
        alloc = allocate.round_robin(inst, _parse_order(args.order, inst.n))
    elif args.method == "two-agent":
        alloc = allocate.ef1_fpo_two_agents(inst)
    elif args.method == "identical":
        alloc = allocate.ef1_identical(inst, _parse_order(args.order, inst.n))
    elif args.method == "welfare-max":
        alloc = allocate.welfare_max_allocation(inst)
    else:
        work = matching.alpha_round(inst, _parse_alpha(args.alpha)) if args.alpha else inst
        alloc = matching.ef1_po_restricted(work)
    _write_output(model.allocation_to_text(alloc), args.output)
    if not alloc.complete and args.output is not None:
        unallocated = [j + 1 for j in alloc.unallocated(inst.m)]
        print(f"partial allocation; unallocated items: {unallocated}")
    return 0


def _cmd_subsidize(args) -> int:
    inst = _load_instance(args.instance)
    alloc = _load_allocation(args.allocation, inst)
    constraints: tuple[model.PaymentConstraint, ...] = ()
    if args.constraints:
        constraints = model.parse_constraints_text(
            _read(args.constraints), inst.n, inst.payment_cap
        )
    result = subsidy.constrained_payments(inst, alloc, constraints)
    if result is None:
        _write_output("NO_SATISFYING_VECTOR\n", args.output)
        return 1
    _write_output(model.payments_to_text(result), args.output)
    return 0


def _cmd_reduce_lfmm(args) -> int:
    graph = hardness.parse_graph_text(_read(args.graph))
    inst, order = hardness.reduce_lfmm_to_rr(graph)
    _write_output(model.instance_to_text(inst), args.out_instance)
    order_text = ",".join(str(i + 1) for i in order.sigma) + "\n"
    _write_output(order_text, args.out_order)
    return 0


def _cmd_check_lfmm(args) -> int:
    graph = hardness.parse_graph_text(_read(args.graph))
    if hardness.check_equivalence(graph):
        print("EQUIVALENT")
        return 0
    print("NOT_EQUIVALENT")
    return 1


def _cmd_gen(args) -> int:
    inst = model.random_instance(
        n=args.n,
        m=args.m,
        valuation_class=model.ValuationClass.from_token(args.klass),
        seed=args.seed,
        value_range=(args.value_lo, args.value_hi),
        density=args.density,
        t=args.t,
    )
    _write_output(model.instance_to_text(inst), args.output)
    return 0


def _bench_input(primitive: str, size: int):
    rng = random.Random(10_000 + size)
    if primitive in ("reduce", "sort"):
        return [rng.randint(0, 10**6) for _ in range(size)]
    if primitive == "apsp":
        rows = [[math.inf] * size for _ in range(size)]
        for i in range(size):
            rows[i][i] = 0
            for j in range(size):
                if i != j and rng.random() < 0.4:
                    rows[i][j] = rng.randint(0, 9)
        return pram.SquareMatrix.minplus(rows)
    rows = [
        [i != j and rng.random() < 0.15 for j in range(size)] for i in range(size)
    ]
    return pram.SquareMatrix.boolean(rows)


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    print("primitive,size,depth,work,peak_width,wall_ms")
    for size in sizes:
        data = _bench_input(args.primitive, size)
        start = time.perf_counter()
        if args.primitive == "reduce":
            _, meter = pram.par_reduce(data, "sum")
        elif args.primitive == "sort":
            _, _, meter = pram.bitonic_sort(data)
        elif args.primitive == "apsp":
            _, meter = pram.apsp_minplus(data, allow_negative_cycles=True)
        else:
            _, meter = pram.transitive_closure(data)
        wall_ms = (time.perf_counter() - start) * 1000.0
        print(
            f"{args.primitive},{size},{meter.depth},{meter.work},{meter.peak_width},"
            f"{wall_ms:.3f}"
        )
    return 0


def _cmd_oracle(args) -> int:
    inst = _load_instance(args.instance)
    alloc = _load_allocation(args.allocation, inst)
    if args.check == "po":
        if model.brute_force_po_check(inst, alloc):
            print("PO")
            return 0
        print("NOT_PO")
        return 1
    constraints: tuple[model.PaymentConstraint, ...] = ()
    cap = args.cap if args.cap is not None else inst.payment_cap
    if args.constraints:
        constraints = model.parse_constraints_text(_read(args.constraints), inst.n, cap)
    result = model.brute_force_min_payments(inst, alloc, constraints, cap=cap)
    if result is None:
        _write_output("NO_SATISFYING_VECTOR\n", args.output)
        return 1
    _write_output(model.payments_to_text(result), args.output)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parfair",
        description="Fair division of indivisible goods: verification, allocation, "
        "subsidies, and benchmarks.",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        metavar="K",
        help="fork-join worker count (never changes outputs, only wall time)",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("verify", help="check EF/EF1/EFX for an allocation")
    p.add_argument("--property", choices=("ef", "ef1", "efx"), required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--allocation", required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("allocate", help="compute an allocation")
    p.add_argument("--method", choices=_METHODS, required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--order", help="picking order, e.g. 2,1,3 (rr/identical)")
    p.add_argument("--alpha", help="round values first, e.g. 1/2 (matching)")
    p.add_argument("--output", help="allocation file (stdout if omitted)")
    p.set_defaults(func=_cmd_allocate)

    p = sub.add_parser("subsidize", help="compute constrained envy-eliminating payments")
    p.add_argument("--instance", required=True)
    p.add_argument("--allocation", required=True)
    p.add_argument("--constraints", help="constraint file")
    p.add_argument("--output", help="payment file (stdout if omitted)")
    p.set_defaults(func=_cmd_subsidize)

    p = sub.add_parser("reduce-lfmm", help="emit the Round-Robin instance for a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--out-instance", help="instance file (stdout if omitted)")
    p.add_argument("--out-order", help="order file (stdout if omitted)")
    p.set_defaults(func=_cmd_reduce_lfmm)

    p = sub.add_parser("check-lfmm", help="greedy matching vs first-round Round-Robin")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=_cmd_check_lfmm)

    p = sub.add_parser("gen", help="write a seeded random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--class", dest="klass", default="additive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--value-lo", type=int, default=1)
    p.add_argument("--value-hi", type=int, default=10)
    p.add_argument("--density", type=float, default=1.0)
    p.add_argument("--t", type=int, default=None, help="distinct values (restricted)")
    p.add_argument("--output", help="instance file (stdout if omitted)")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("bench", help="CSV of depth/work/peak width per size")
    p.add_argument("--primitive", choices=_PRIMITIVES, required=True)
    p.add_argument("--sizes", required=True, help="comma-separated sizes")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("oracle", help="brute-force cross-checks")
    p.add_argument("--check", choices=("po", "min-payments"), required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--allocation", required=True)
    p.add_argument("--constraints", help="constraint file (min-payments)")
    p.add_argument("--cap", type=int, default=None, help="payment cap (min-payments)")
    p.add_argument("--output", help="payment file (stdout if omitted)")
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        try:
            pram.set_worker_count(args.threads)
        except model.ParfairError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except model.ParfairError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
