"""Batch command-line front end.

Exit codes: 0 holds/success, 1 fails/countermodel (payload on stdout),
2 usage or parse error, 3 budget exceeded.  The MVDL_BUDGET environment
variable overrides the default sweep budget.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import harness, jsonio, reduction
from .algebra import algebra_by_name, is_semiprimal, validate_flew
from .errors import (
    BudgetExceeded,
    ClosureBudgetExceeded,
    MvdlError,
    RewriteBudgetExceeded,
)
from .functors import DEFAULT_ENUM_BUDGET
from .presets import make_preset
from .semantics import eval_formula
from .syntax import parse, render

EXIT_OK = 0
EXIT_FAILS = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _budget_default() -> int:
    env = os.environ.get("MVDL_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            raise MvdlError(f"MVDL_BUDGET is not an integer: {env!r}") from None
    return DEFAULT_ENUM_BUDGET


def _load_algebra(ref: str):
    if ref.endswith(".json") or os.path.sep in ref or os.path.exists(ref):
        with open(ref, "r", encoding="utf-8") as fh:
            return jsonio.algebra_from_json(json.load(fh))
    return algebra_by_name(ref)


def _load_model(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return jsonio.model_from_json(json.load(fh))


def _emit(payload: dict, fmt: str, text: str | None = None) -> None:
    if fmt == "json":
        print(jsonio.dumps(payload))
    else:
        print(text if text is not None else jsonio.dumps(payload))


def _verdict_exit(verdict: harness.Verdict, fmt: str) -> int:
    payload = jsonio.verdict_to_json(verdict)
    text = f"{verdict.status} ({verdict.cases} cases, {verdict.seconds:.3f}s)"
    if verdict.counterexample is not None:
        text += "\n" + jsonio.dumps(verdict.counterexample)
    _emit(payload, fmt, text)
    return EXIT_OK if verdict.ok else EXIT_FAILS


def build_parser() -> argparse.ArgumentParser:
    fmt_parent = argparse.ArgumentParser(add_help=False)
    fmt_parent.add_argument("--format", choices=("json", "text"), default="text")
    ap = argparse.ArgumentParser(
        prog="mvdl",
        description="Many-valued coalgebraic dynamic logic workbench",
        parents=[fmt_parent],
    )
    sub = ap.add_subparsers(dest="command", required=True)
    _parents = {"parents": [fmt_parent]}

    def common(p):
        p.add_argument("--algebra", default="B2", help="builtin name or JSON path")
        p.add_argument(
            "--preset",
            choices=("pdl-crisp", "pdl-labelled", "pdl-threshold", "game", "instantial"),
            default="pdl-crisp",
        )
        p.add_argument("--max-n", type=int, default=2)
        p.add_argument("--budget", type=int, default=None)
        p.add_argument("--trials", type=int, default=10_000)
        p.add_argument("--seed", type=int, default=harness.DEFAULT_SEED)
        p.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
        p.add_argument("--jobs", type=int, default=1, help="worker cap (sweeps are chunked)")

    p = sub.add_parser("validate-algebra", help="check the FLew laws exhaustively", **_parents)
    p.add_argument("--algebra", default=None)
    p.add_argument("--builtin", default=None, help="alias for --algebra with a builtin name")

    p = sub.add_parser("semiprimal", help="decide semi-primality by chi-definability", **_parents)
    p.add_argument("--algebra", default="B2")
    p.add_argument("--budget", type=int, default=None)

    p = sub.add_parser("eval", help="evaluate a formula in a model", **_parents)
    p.add_argument("--model", required=True)
    p.add_argument("--phi", "--formula", dest="phi", required=True)

    p = sub.add_parser("reduce", help="rewrite to atomic-modality normal form", **_parents)
    common(p)
    p.add_argument("--phi", "--formula", dest="phi", required=True)

    p = sub.add_parser("verify-rules", help="soundness sweep over the builtin rules", **_parents)
    common(p)
    p.add_argument("--n", type=int, default=2, help="carrier size for the sweep")

    p = sub.add_parser("check-safety", help="morphism preservation for one target", **_parents)
    common(p)
    p.add_argument("--op", default=None)
    p.add_argument("--test", default=None)

    p = sub.add_parser("check-separation", help="joint monicity of the lifting family", **_parents)
    common(p)
    p.add_argument("--n", type=int, default=2)

    p = sub.add_parser("one-step", help="one-step witness construction/roundtrips", **_parents)
    p.add_argument("--kind", required=True, choices=harness.ONE_STEP_KINDS)
    p.add_argument("--algebra", default="L2")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--h", dest="h_file", default=None, help="JSON file with H entries")
    p.add_argument("--trials", type=int, default=0, help="random roundtrips instead of --h")
    p.add_argument("--seed", type=int, default=harness.DEFAULT_SEED)

    p = sub.add_parser("entail", help="bounded countermodel search", **_parents)
    common(p)
    p.add_argument("--phi", "--formula", dest="phi", required=True)
    p.add_argument("--gamma", action="append", default=[])

    return ap


def _cmd_validate_algebra(args, fmt: str) -> int:
    ref = args.algebra or args.builtin
    if not ref:
        raise MvdlError("validate-algebra needs --algebra or --builtin")
    alg = _load_algebra(ref)
    report = validate_flew(alg)
    payload = {
        "algebra": alg.name or "inline",
        "ok": report.ok,
        "checks": [
            {"family": c.family, "law": c.law, "ok": c.ok, "witness": c.witness}
            for c in report.checks
        ],
    }
    _emit(payload, fmt, report.summary())
    return EXIT_OK if report.ok else EXIT_FAILS


def _cmd_semiprimal(args, fmt: str) -> int:
    alg = _load_algebra(args.algebra)
    budget = args.budget or 10_000
    result = is_semiprimal(alg, budget)
    clone = alg.unary_term_closure(budget)
    payload = {
        "algebra": alg.name or "inline",
        "semiprimal": result,
        "clone_size": len(clone),
    }
    _emit(payload, fmt, f"semiprimal: {result} (clone size {len(clone)})")
    return EXIT_OK if result else EXIT_FAILS


def _cmd_eval(args, fmt: str) -> int:
    model = _load_model(args.model)
    phi = parse(args.phi, model.config.signature, "formula")
    row = eval_formula(model, phi)
    labels = [model.config.truth.label(v) for v in row]
    payload = {"phi": args.phi, "values": list(row), "labels": labels}
    _emit(payload, fmt, " ".join(f"x{i}={lab}" for i, lab in enumerate(labels)))
    return EXIT_OK


def _make_config(args):
    alg = _load_algebra(args.algebra)
    return make_preset(args.preset, alg)


def _cmd_reduce(args, fmt: str) -> int:
    config = _make_config(args)
    registry = reduction.builtin_rules(config)
    phi = parse(args.phi, config.signature, "formula")
    normal = reduction.reduce_full(phi, registry)
    text = render(normal, config.signature)
    _emit({"phi": args.phi, "normal_form": text}, fmt, text)
    return EXIT_OK


def _cmd_verify_rules(args, fmt: str) -> int:
    config = _make_config(args)
    registry = reduction.builtin_rules(config)
    budget = args.budget or _budget_default()
    results = harness.verify_registry(
        registry, n=args.n, mode=args.mode, budget=budget, trials=args.trials,
        seed=args.seed,
    )
    payload = {
        " ".join(key): jsonio.verdict_to_json(v) for key, v in results.items()
    }
    all_ok = all(v.ok for v in results.values())
    lines = [
        f"{' '.join(key)}: {v.status} ({v.cases} cases)" for key, v in results.items()
    ]
    if registry.gaps:
        payload["gaps"] = [
            {"key": list(k), "reason": reason} for k, reason in registry.gaps
        ]
        lines += [f"gap {k}: {reason}" for k, reason in registry.gaps]
    _emit(payload, fmt, "\n".join(lines))
    return EXIT_OK if all_ok else EXIT_FAILS


def _cmd_check_safety(args, fmt: str) -> int:
    config = _make_config(args)
    if args.test:
        target = config.test(args.test)
    elif args.op:
        target = config.op(args.op)
    else:
        raise MvdlError("check-safety needs --op or --test")
    budget = args.budget or _budget_default()
    verdict = harness.check_safety(
        target, config, max_n=args.max_n, budget=budget, mode=args.mode,
        trials=args.trials, seed=args.seed,
    )
    return _verdict_exit(verdict, fmt)


def _cmd_check_separation(args, fmt: str) -> int:
    config = _make_config(args)
    budget = args.budget or _budget_default()
    verdict = harness.check_separation(
        list(config.liftings.values()), config, n=args.n, budget=budget,
        mode=args.mode, trials=args.trials, seed=args.seed,
    )
    return _verdict_exit(verdict, fmt)


def _one_step_random_h(kind: str, alg, n: int, rng) -> dict:
    from .functors import Kind, functor_ops, predicate_space

    if kind == "labelled-diamond":
        fops = functor_ops(Kind.APOWERSET, n, alg)
        alpha = fops.random_value(rng)
        return {
            p: alg.bigjoin(alg.tensor(p[x], alpha[x]) for x in range(n))
            for p in predicate_space(alg.m, n)
        }
    if kind == "threshold":
        alpha = tuple(rng.randrange(alg.m) for _ in range(n))
        out = {}
        for r in range(1, alg.m):
            for s in range(1 << n):
                acc = alg.bigjoin(alpha[x] for x in range(n) if s >> x & 1)
                out[(r, s)] = 1 if alg.leq(r, acc) else 0
        return out
    fops = functor_ops(Kind.MONOTONE_NEIGHBOURHOOD, n, alg)
    alpha = fops.random_value(rng)
    preds = predicate_space(alg.m, n)
    return {p: alpha[i] for i, p in enumerate(preds)}


def _cmd_one_step(args, fmt: str) -> int:
    import random as _random

    alg = _load_algebra(args.algebra)
    if args.trials:
        rng = _random.Random(args.seed)
        for t in range(args.trials):
            H = _one_step_random_h(args.kind, alg, args.n, rng)
            result = harness.one_step_witness(args.kind, alg, args.n, H)
            if not result.satisfiable:
                _emit(
                    {"trial": t, "violation": result.violation.axiom},
                    fmt,
                    f"trial {t}: violated {result.violation.axiom}",
                )
                return EXIT_FAILS
        _emit(
            {"trials": args.trials, "ok": True},
            fmt,
            f"{args.trials} roundtrips reconstructed a witness",
        )
        return EXIT_OK
    if not args.h_file:
        raise MvdlError("one-step needs --h or --trials")
    with open(args.h_file, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    H = {}
    for entry in data["entries"]:
        key, value = entry
        if args.kind == "threshold":
            H[(int(key[0]), int(key[1]))] = int(value)
        else:
            H[tuple(int(v) for v in key)] = int(value)
    result = harness.one_step_witness(args.kind, alg, args.n, H)
    if result.satisfiable:
        payload = {"alpha": jsonio.fvalue_to_json(_one_step_kind_tag(args.kind), result.alpha)}
        _emit(payload, fmt, f"witness: {payload['alpha']}")
        return EXIT_OK
    payload = {
        "violation": result.violation.axiom,
        "instance": result.violation.instance,
    }
    _emit(payload, fmt, f"unsatisfiable: {result.violation.axiom}")
    return EXIT_FAILS


def _one_step_kind_tag(kind: str):
    from .functors import Kind

    return Kind.APOWERSET if kind != "monotone-eval" else Kind.MONOTONE_NEIGHBOURHOOD


def _cmd_entail(args, fmt: str) -> int:
    config = _make_config(args)
    phi = parse(args.phi, config.signature, "formula")
    gamma = [parse(g, config.signature, "formula") for g in args.gamma]
    budget = args.budget or _budget_default()
    verdict = harness.bounded_entailment(
        gamma, phi, config, max_n=args.max_n, mode=args.mode, budget=budget,
        trials=args.trials, seed=args.seed,
    )
    return _verdict_exit(verdict, fmt)


_COMMANDS = {
    "validate-algebra": _cmd_validate_algebra,
    "semiprimal": _cmd_semiprimal,
    "eval": _cmd_eval,
    "reduce": _cmd_reduce,
    "verify-rules": _cmd_verify_rules,
    "check-safety": _cmd_check_safety,
    "check-separation": _cmd_check_separation,
    "one-step": _cmd_one_step,
    "entail": _cmd_entail,
}


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args, args.format)
    except (BudgetExceeded, ClosureBudgetExceeded, RewriteBudgetExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except MvdlError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
