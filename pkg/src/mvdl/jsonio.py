"""JSON encodings for algebras, models, rules and verdicts.

FValue encodings by functor kind:
  powerset                 int bitmask over the carrier
  apowerset                list of algebra indices, one per state
  aneighbourhood[, monotone] list of algebra indices in canonical predicate
                           order (lexicographic on predicate rows)
  double-powerset          list of int bitmasks

An algebra is referenced by builtin name ("B2", "L2", "G3") or inlined.
Truth constants travel in a separate "constants" key next to "extras".
"""

from __future__ import annotations

import json
from typing import Any, Mapping

from .actions import OperationSpec, TestSpec
from .algebra import Algebra, algebra_by_name, validate_flew
from .errors import InvalidParameter
from .functors import Kind
from .presets import DEFAULT_ATOMS, DEFAULT_PROPS, PRESET_NAMES, make_preset
from .semantics import LiftingSpec, LogicConfig, Model
from .syntax import Template, make_signature, parse, render


def algebra_to_json(alg: Algebra) -> dict:
    out: dict[str, Any] = {
        "m": alg.m,
        "meet": [list(r) for r in alg.meet_table],
        "join": [list(r) for r in alg.join_table],
        "tensor": [list(r) for r in alg.tensor_table],
        "impl": [list(r) for r in alg.impl_table],
        "labels": list(alg.labels),
        "extras": {k: list(v) for k, v in alg.extras.items()},
    }
    if alg.constants:
        out["constants"] = dict(alg.constants)
    if alg.name:
        out["name"] = alg.name
    return out


def algebra_from_json(data: Mapping | str) -> Algebra:
    if isinstance(data, str):
        return algebra_by_name(data)
    impl = data.get("impl")
    if impl is None:
        # residuate the tensor against the joins (quantale presentation)
        from .algebra import derive_residuum

        impl = derive_residuum(data["m"], data["join"], data["tensor"])
    alg = Algebra(
        m=data["m"],
        meet=data["meet"],
        join=data["join"],
        tensor=data["tensor"],
        impl=impl,
        labels=data.get("labels"),
        extras=data.get("extras"),
        constants=data.get("constants"),
        name=data.get("name"),
    )
    report = validate_flew(alg)
    if not report.ok:
        bad = report.failures()[0]
        raise InvalidParameter(
            f"algebra fails {bad.family} law {bad.law!r} at {bad.witness}"
        )
    return alg


_OP_ARITIES = {
    "union": 2, "join-pw": 2, "meet-pw": 2, "kleisli": 2, "double-seq": 2,
    "double-star": 2, "nbh-union": 2, "dual": 1, "star": 1, "counter-domain": 1,
}


def config_from_json(data: Mapping, alg: Algebra) -> LogicConfig:
    """Build a custom logic configuration from a declaration object.

    Lifting entries: {"variant": ..., "param"?: element, "arity"?: int}
    (arity defaults to 1; instantial liftings must state theirs).  Operation
    entries: {"variant": ...}; test entries: {"variant": ..., "subset"?: [int]}.
    """
    kind = Kind(data["kind"])
    truth = alg
    if "truth_algebra" in data:
        truth = algebra_from_json(data["truth_algebra"])
    liftings = {}
    for lid, entry in data.get("liftings", {}).items():
        liftings[lid] = LiftingSpec(
            lid,
            entry.get("arity", 1),
            entry["variant"],
            param=entry.get("param", 0),
        )
        liftings[lid].check_kind(kind)
    ops = {}
    for oid, entry in data.get("ops", {}).items():
        variant = entry["variant"]
        if variant not in _OP_ARITIES:
            raise InvalidParameter(f"unknown operation variant {variant!r}")
        ops[oid] = OperationSpec(oid, _OP_ARITIES[variant], variant)
        ops[oid].check_kind(kind)
    tests = {}
    for tid, entry in data.get("tests", {}).items():
        variant = entry["variant"]
        if "subset" in entry:
            subset = frozenset(entry["subset"])
        elif variant in ("test-p", "instantial-p"):
            subset = frozenset({truth.top})
        else:
            subset = frozenset()
        tests[tid] = TestSpec(tid, variant, subset)
        tests[tid].check_kind(kind)
    signature = make_signature(
        props=data.get("props", DEFAULT_PROPS),
        atoms=data.get("atoms", DEFAULT_ATOMS),
        liftings={lid: spec.arity for lid, spec in liftings.items()},
        ops={oid: spec.arity for oid, spec in ops.items()},
        tests=tests.keys(),
        extra_conns={name: 1 for name in truth.extras}
        | {name: 0 for name in truth.constants},
        box=data.get("box"),
        diamond=data.get("diamond"),
    )
    return LogicConfig(
        name=data.get("name", "custom"),
        kind=kind,
        truth=truth,
        struct=alg,
        liftings=liftings,
        ops=ops,
        tests=tests,
        signature=signature,
    )


def config_to_json(config: LogicConfig) -> dict:
    out: dict[str, Any] = {
        "name": config.name,
        "kind": config.kind.value,
        "liftings": {
            lid: {
                k: v
                for k, v in (
                    ("variant", spec.variant),
                    ("arity", spec.arity),
                    ("param", spec.param),
                )
                if not (k == "param" and v == 0)
            }
            for lid, spec in config.liftings.items()
        },
        "ops": {oid: {"variant": spec.variant} for oid, spec in config.ops.items()},
        "tests": {
            tid: {"variant": spec.variant, "subset": sorted(spec.subset)}
            for tid, spec in config.tests.items()
        },
        "box": config.signature.box,
        "diamond": config.signature.diamond,
    }
    if config.truth != config.struct:
        out["truth_algebra"] = config.truth.name or algebra_to_json(config.truth)
    return out


def fvalue_to_json(kind: Kind, value):
    if kind is Kind.POWERSET:
        return value
    if kind is Kind.DOUBLE_POWERSET:
        return sorted(value)
    return list(value)


def fvalue_from_json(kind: Kind, data):
    if kind is Kind.POWERSET:
        return int(data)
    if kind is Kind.DOUBLE_POWERSET:
        return frozenset(int(v) for v in data)
    return tuple(int(v) for v in data)


def model_to_json(model: Model) -> dict:
    config = model.config
    out = {
        "n": model.n,
        "kind": config.kind.value,
        "algebra": config.struct.name or algebra_to_json(config.struct),
        "atoms": {
            name: [fvalue_to_json(config.kind, v) for v in gamma]
            for name, gamma in model.atoms.items()
        },
        "valuation": {name: list(row) for name, row in model.valuation.items()},
    }
    if config.name in PRESET_NAMES:
        out["preset"] = config.name
    else:
        out["config"] = config_to_json(config)
    return out


def model_from_json(data: Mapping, config: LogicConfig | None = None) -> Model:
    if config is None:
        alg = algebra_from_json(data["algebra"])
        if "config" in data:
            config = config_from_json(data["config"], alg)
        else:
            config = make_preset(data["preset"], alg)
    kind = config.kind
    if "kind" in data and data["kind"] != kind.value:
        raise InvalidParameter(
            f"model kind {data['kind']!r} does not match preset kind {kind.value!r}"
        )
    atoms = {
        name: tuple(fvalue_from_json(kind, v) for v in gamma)
        for name, gamma in data["atoms"].items()
    }
    valuation = {name: tuple(row) for name, row in data.get("valuation", {}).items()}
    return Model(data["n"], config, atoms, valuation)


def formula_to_json(node) -> dict:
    """Formulas and actions as {"kind": ...} trees for machine interchange."""
    from .syntax import Atomic, Conn, Modal, Op, Prop, Test

    if isinstance(node, Prop):
        return {"kind": "prop", "name": node.name}
    if isinstance(node, Conn):
        return {
            "kind": "conn",
            "symbol": node.symbol,
            "args": [formula_to_json(a) for a in node.args],
        }
    if isinstance(node, Modal):
        return {
            "kind": "modal",
            "lifting": node.lifting,
            "action": formula_to_json(node.action),
            "args": [formula_to_json(a) for a in node.args],
        }
    if isinstance(node, Atomic):
        return {"kind": "atomic", "name": node.name}
    if isinstance(node, Op):
        return {
            "kind": "op",
            "op": node.op,
            "args": [formula_to_json(a) for a in node.args],
        }
    if isinstance(node, Test):
        return {
            "kind": "test",
            "test": node.test,
            "arg": formula_to_json(node.arg),
        }
    raise InvalidParameter(f"not a formula or action node: {node!r}")


def formula_from_json(data: Mapping):
    from .syntax import Atomic, Conn, Modal, Op, Prop, Test

    kind = data["kind"]
    if kind == "prop":
        return Prop(data["name"])
    if kind == "conn":
        return Conn(data["symbol"], tuple(formula_from_json(a) for a in data["args"]))
    if kind == "modal":
        return Modal(
            data["lifting"],
            formula_from_json(data["action"]),
            tuple(formula_from_json(a) for a in data["args"]),
        )
    if kind == "atomic":
        return Atomic(data["name"])
    if kind == "op":
        return Op(data["op"], tuple(formula_from_json(a) for a in data["args"]))
    if kind == "test":
        return Test(data["test"], formula_from_json(data["arg"]))
    raise InvalidParameter(f"unknown node kind {kind!r}")


def rule_to_json(rule) -> dict:
    out = {
        rule.target_kind: rule.target,
        "lifting": rule.lifting,
        "template": render(rule.template),
    }
    return out


def rule_from_json(data: Mapping, config: LogicConfig):
    from .reduction import ReductionRule

    template = parse(data["template"], config.signature, "template")
    if "op" in data:
        kind, target = "op", data["op"]
        spec = config.op(target)
        lift = config.lifting(data["lifting"])
        template = Template(spec.arity, lift.arity, template.body)
    else:
        kind, target = "test", data["test"]
        lift = config.lifting(data["lifting"])
        template = Template(0, lift.arity + 1, template.body)
    return ReductionRule(kind, target, data["lifting"], template)


def verdict_to_json(verdict) -> dict:
    out = {
        "status": verdict.status,
        "cases": verdict.cases,
        "seconds": round(verdict.seconds, 6),
    }
    if verdict.counterexample is not None:
        out["counterexample"] = verdict.counterexample
    if verdict.detail:
        out["detail"] = verdict.detail
    return out


def dumps(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)
