"""Desk-scale machine checks: morphisms, safety, invariance, separation,
reduction-rule soundness, one-step witnesses and bounded entailment.

Verdict vocabulary: "holds" when the stated finite configuration was swept
completely, "holds-up-to-bound" when the claim quantifies over carriers or
the sweep sampled, "fails" with a replayable counterexample otherwise.
First counterexamples are reported in canonical enumeration order, so
identical inputs give identical reports.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

from .actions import (
    OperationSpec,
    TestSpec,
    apply_op,
    apply_test,
    composition_map,
)
from .algebra import Algebra
from .errors import (
    BudgetExceeded,
    InvalidParameter,
    NonlinearAlgebra,
    PreconditionViolated,
    TagMismatch,
    UnsupportedKind,
)
from .functors import Kind, FunctorOps, functor_ops, predicate_space
from .jsonio import fvalue_to_json, model_to_json
from .semantics import (
    LiftingSpec,
    LogicConfig,
    Model,
    apply_lifting,
)
from .syntax import (
    Formula,
    TConn,
    TVar,
    atoms_of,
    formula_actions,
    props_of,
    render,
)

DEFAULT_SEED = 0xC0A1
DEFAULT_SWEEP_BUDGET = 1_000_000


@dataclass
class Verdict:
    status: str  # "holds" | "fails" | "holds-up-to-bound"
    cases: int
    seconds: float
    counterexample: dict | None = None
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status != "fails"


def _verdict(status: str, cases: int, t0: float, counterexample=None, **detail) -> Verdict:
    return Verdict(status, cases, time.perf_counter() - t0, counterexample, detail)


# -- coalgebra morphisms --------------------------------------------------


def is_morphism(
    f: Sequence[int],
    gamma: Sequence,
    gamma2: Sequence,
    kind: Kind,
    alg: Algebra,
) -> bool:
    """Does Ff . gamma = gamma2 . f hold state by state?"""
    n, n2 = len(gamma), len(gamma2)
    if len(f) != n:
        raise TagMismatch("map length differs from source carrier")
    if any(not (0 <= y < n2) for y in f):
        raise TagMismatch("map targets outside the target carrier")
    fops = functor_ops(kind, n, alg)
    ft = tuple(f)
    return all(fops.map(ft, n2, gamma[x]) == gamma2[ft[x]] for x in range(n))


def _space(fops: FunctorOps, budget: int) -> list:
    values = list(fops.enumerate(budget))
    total = len(values) ** fops.n
    if total > budget:
        raise BudgetExceeded(
            f"{total} coalgebras at n={fops.n} exceed budget {budget}", count=total
        )
    return values


def _coalgebras(values: list, n: int) -> list[tuple]:
    return list(product(values, repeat=n))


# -- safety ---------------------------------------------------------------


def check_safety(
    target: OperationSpec | TestSpec,
    config: LogicConfig,
    max_n: int = 2,
    budget: int = DEFAULT_SWEEP_BUDGET,
    mode: str = "exhaustive",
    trials: int = 10_000,
    seed: int = DEFAULT_SEED,
) -> Verdict:
    """Search joint morphisms f: X -> Y and refute preservation by ``target``.

    Carrier pairs range over n, n' <= max_n.  When f is surjective the target
    coalgebras are forced; otherwise the unconstrained states are enumerated
    (exhaustive mode) or sampled.
    """
    t0 = time.perf_counter()
    if isinstance(target, TestSpec):
        return _check_test_safety(target, config, max_n, budget, t0)
    target.check_kind(config.kind)
    cases = 0
    rng = random.Random(seed)
    for n_src in range(1, max_n + 1):
        for n_tgt in range(1, max_n + 1):
            fops_src = config.fops(n_src)
            fops_tgt = config.fops(n_tgt)
            if mode == "exhaustive":
                vals_src = _space(fops_src, budget)
                vals_tgt = _space(fops_tgt, budget)
                sweep = _safety_pairs_exhaustive(
                    target, fops_src, fops_tgt, vals_src, vals_tgt, budget
                )
            else:
                sweep = _safety_pairs_sampled(
                    target, fops_src, fops_tgt, rng, trials // (max_n * max_n) + 1
                )
            out_cache_src: dict = {}
            out_cache_tgt: dict = {}
            for f, gammas, gammas2 in sweep:
                cases += 1
                out_src = out_cache_src.get(gammas)
                if out_src is None:
                    out_src = apply_op(target, gammas, fops_src)
                    out_cache_src[gammas] = out_src
                out_tgt = out_cache_tgt.get(gammas2)
                if out_tgt is None:
                    out_tgt = apply_op(target, gammas2, fops_tgt)
                    out_cache_tgt[gammas2] = out_tgt
                for x in range(n_src):
                    if fops_src.map(f, n_tgt, out_src[x]) != out_tgt[f[x]]:
                        counter = {
                            "f": list(f),
                            "gammas": [
                                [fvalue_to_json(config.kind, v) for v in g]
                                for g in gammas
                            ],
                            "gammas_target": [
                                [fvalue_to_json(config.kind, v) for v in g]
                                for g in gammas2
                            ],
                            "state": x,
                        }
                        return _verdict(
                            "fails", cases, t0, counter, target=target.id, n=(n_src, n_tgt)
                        )
    status = "holds-up-to-bound"
    return _verdict(status, cases, t0, None, target=target.id, max_n=max_n, mode=mode)


def _forced_targets(
    fops_src: FunctorOps,
    fops_tgt: FunctorOps,
    f: tuple[int, ...],
    gammas: tuple,
) -> list[dict[int, object]] | None:
    """Forced values of each target coalgebra on the image of f, or None
    when f cannot be a joint morphism for these sources."""
    n_tgt = fops_tgt.n
    forced: list[dict[int, object]] = []
    for g in gammas:
        d: dict[int, object] = {}
        for x in range(fops_src.n):
            img = fops_src.map(f, n_tgt, g[x])
            y = f[x]
            if y in d and d[y] != img:
                return None
            d[y] = img
        forced.append(d)
    return forced


def _safety_pairs_exhaustive(
    op: OperationSpec,
    fops_src: FunctorOps,
    fops_tgt: FunctorOps,
    vals_src: list,
    vals_tgt: list,
    budget: int,
):
    n_src, n_tgt = fops_src.n, fops_tgt.n
    coalgs_src = _coalgebras(vals_src, n_src)
    for f in product(range(n_tgt), repeat=n_src):
        free = [y for y in range(n_tgt) if y not in set(f)]
        for gammas in product(coalgs_src, repeat=op.arity):
            forced = _forced_targets(fops_src, fops_tgt, f, gammas)
            if forced is None:
                continue
            if not free:
                yield f, gammas, tuple(
                    tuple(d[y] for y in range(n_tgt)) for d in forced
                )
                continue
            slots = [(i, y) for i in range(op.arity) for y in free]
            for fill in product(vals_tgt, repeat=len(slots)):
                gammas2 = []
                for i in range(op.arity):
                    row = dict(forced[i])
                    for (j, y), v in zip(slots, fill):
                        if j == i:
                            row[y] = v
                    gammas2.append(tuple(row[y] for y in range(n_tgt)))
                yield f, gammas, tuple(gammas2)


def _safety_pairs_sampled(
    op: OperationSpec,
    fops_src: FunctorOps,
    fops_tgt: FunctorOps,
    rng: random.Random,
    trials: int,
):
    n_src, n_tgt = fops_src.n, fops_tgt.n
    for _ in range(trials):
        f = tuple(rng.randrange(n_tgt) for _ in range(n_src))
        gammas = tuple(
            tuple(fops_src.random_value(rng) for _ in range(n_src))
            for _ in range(op.arity)
        )
        forced = _forced_targets(fops_src, fops_tgt, f, gammas)
        if forced is None:
            continue
        gammas2 = []
        ok = True
        for d in forced:
            row = []
            for y in range(n_tgt):
                if y in d:
                    row.append(d[y])
                else:
                    row.append(fops_tgt.random_value(rng))
            if any(not fops_tgt.is_valid(v) for v in row):
                ok = False
                break
            gammas2.append(tuple(row))
        if not ok:
            continue
        yield f, gammas, tuple(gammas2)


def _check_test_safety(
    test: TestSpec, config: LogicConfig, max_n: int, budget: int, t0: float
) -> Verdict:
    """Naturality square: Ff . test(sigma' . f) = test(sigma') . f."""
    test.check_kind(config.kind)
    truth = config.truth
    cases = 0
    for n_src in range(1, max_n + 1):
        for n_tgt in range(1, max_n + 1):
            fops_src = config.fops(n_src)
            fops_tgt = config.fops(n_tgt)
            for f in product(range(n_tgt), repeat=n_src):
                for sigma2 in predicate_space(truth.m, n_tgt):
                    cases += 1
                    pulled = tuple(sigma2[f[x]] for x in range(n_src))
                    lhs = apply_test(test, pulled, fops_src, truth)
                    rhs = apply_test(test, sigma2, fops_tgt, truth)
                    for x in range(n_src):
                        if fops_src.map(f, n_tgt, lhs[x]) != rhs[f[x]]:
                            counter = {
                                "f": list(f),
                                "sigma_target": list(sigma2),
                                "state": x,
                            }
                            return _verdict(
                                "fails", cases, t0, counter, target=test.id
                            )
    return _verdict("holds-up-to-bound", cases, t0, None, target=test.id, max_n=max_n)


# -- invariance -----------------------------------------------------------


def check_invariance(
    model: Model,
    model2: Model,
    f: Sequence[int],
    formulas: Iterable[Formula],
) -> Verdict:
    """Prop-style invariance along a joint morphism on atoms and props."""
    t0 = time.perf_counter()
    config = model.config
    kind, alg = config.kind, config.struct
    ft = tuple(f)
    for name, gamma in model.atoms.items():
        if name not in model2.atoms:
            raise PreconditionViolated(
                f"atom {name!r} not interpreted in the target model", offender=name
            )
        if not is_morphism(ft, gamma, model2.atoms[name], kind, alg):
            raise PreconditionViolated(
                f"map is not a coalgebra morphism on atom {name!r}", offender=name
            )
    for name, row in model.valuation.items():
        row2 = model2.valuation.get(name)
        if row2 is None or any(row2[ft[x]] != row[x] for x in range(model.n)):
            raise PreconditionViolated(
                f"valuation of {name!r} is not preserved along the map", offender=name
            )
    cases = 0
    session = model.session()
    session2 = model2.session()
    for phi in formulas:
        here = session.eval(phi)
        there = session2.eval(phi)
        for x in range(model.n):
            cases += 1
            if there[ft[x]] != here[x]:
                counter = {
                    "formula": render(phi, config.signature),
                    "state": x,
                    "model": model_to_json(model),
                    "model_target": model_to_json(model2),
                    "f": list(ft),
                }
                return _verdict("fails", cases, t0, counter)
        for action in formula_actions(phi):
            cases += 1
            if not is_morphism(
                ft, session.interpret(action), session2.interpret(action), kind, alg
            ):
                counter = {
                    "action": render(action, config.signature),
                    "model": model_to_json(model),
                    "model_target": model_to_json(model2),
                    "f": list(ft),
                }
                return _verdict("fails", cases, t0, counter)
    return _verdict("holds", cases, t0, None)


def pullback_model(model2: Model, f: Sequence[int], n_src: int) -> Model:
    """A source model making f a joint morphism onto ``model2``.

    Powerset values pull back to full preimages, labelled rows by
    precomposition, double powerset families by preimage members; f must be
    surjective for the construction to land on the given target.
    """
    config = model2.config
    ft = tuple(f)
    if sorted(set(ft)) != list(range(model2.n)):
        raise InvalidParameter("pullback needs a surjective map")
    kind = config.kind
    atoms = {}
    for name, gamma in model2.atoms.items():
        rows = []
        for x in range(n_src):
            v2 = gamma[ft[x]]
            if kind is Kind.POWERSET:
                rows.append(
                    sum(1 << x2 for x2 in range(n_src) if v2 >> ft[x2] & 1)
                )
            elif kind is Kind.APOWERSET:
                rows.append(tuple(v2[ft[x2]] for x2 in range(n_src)))
            elif kind is Kind.DOUBLE_POWERSET:
                rows.append(
                    frozenset(
                        sum(1 << x2 for x2 in range(n_src) if mask >> ft[x2] & 1)
                        for mask in v2
                    )
                )
            else:
                raise UnsupportedKind(
                    "pullback is implemented for powerset, apowerset and "
                    "double powerset kinds"
                )
        atoms[name] = tuple(rows)
    valuation = {
        name: tuple(row[ft[x]] for x in range(n_src))
        for name, row in model2.valuation.items()
    }
    return Model(n_src, config, atoms, valuation)


# -- separation -----------------------------------------------------------


def check_separation(
    liftings: Sequence[LiftingSpec],
    config: LogicConfig,
    n: int,
    budget: int = DEFAULT_SWEEP_BUDGET,
    mode: str = "exhaustive",
    trials: int = 10_000,
    seed: int = DEFAULT_SEED,
) -> Verdict:
    """Do the lifting transposes jointly distinguish all pairs in FX?"""
    t0 = time.perf_counter()
    fops = config.fops(n)
    truth = config.truth
    preds = predicate_space(truth.m, n)
    spaces = {
        spec.id: list(product(preds, repeat=spec.arity)) for spec in liftings
    }
    if mode == "exhaustive":
        try:
            values = list(fops.enumerate(budget))
        except BudgetExceeded as exc:
            raise BudgetExceeded(
                f"{exc}; sampled mode is available (mode='random')", count=exc.count
            ) from None
        pairs = [
            (values[i], values[j])
            for i in range(len(values))
            for j in range(i + 1, len(values))
        ]
    else:
        rng = random.Random(seed)
        pairs = []
        for _ in range(trials):
            t1, t2 = fops.random_value(rng), fops.random_value(rng)
            if t1 != t2:
                pairs.append((t1, t2))
    cases = 0
    for t1, t2 in pairs:
        separated = False
        for spec in liftings:
            for sigmas in spaces[spec.id]:
                cases += 1
                if apply_lifting(spec, sigmas, t1, config, n) != apply_lifting(
                    spec, sigmas, t2, config, n
                ):
                    separated = True
                    break
            if separated:
                break
        if not separated:
            counter = {
                "t1": fvalue_to_json(config.kind, t1),
                "t2": fvalue_to_json(config.kind, t2),
                "liftings": [spec.id for spec in liftings],
            }
            return _verdict("fails", cases, t0, counter, n=n)
    status = "holds" if mode == "exhaustive" else "holds-up-to-bound"
    return _verdict(status, cases, t0, None, n=n, pairs=len(pairs), mode=mode)


# -- reduction-rule soundness ----------------------------------------------


class _TemplateEval:
    """Template evaluation with per-sweep memoization.

    Subtrees touching at most one action slot are cached on (node, the slot's
    coalgebra, the variable assignment); wider nodes are recomputed, which is
    cheap because their children are cached.
    """

    def __init__(self, config: LogicConfig, n: int):
        self.config = config
        self.n = n
        self.truth = config.truth
        self.memo: dict = {}
        self._slots: dict = {}

    def slots(self, node) -> tuple[int, ...]:
        got = self._slots.get(node)
        if got is None:
            if isinstance(node, TVar):
                got = ()
            elif isinstance(node, TConn):
                acc: set[int] = set()
                for a in node.args:
                    acc.update(self.slots(a))
                got = tuple(sorted(acc))
            else:
                acc = {node.slot}
                for a in node.args:
                    acc.update(self.slots(a))
                got = tuple(sorted(acc))
            self._slots[node] = got
        return got

    def eval(self, node, gammas: tuple, sigmas: tuple) -> tuple:
        if isinstance(node, TVar):
            return sigmas[node.index - 1]
        used = self.slots(node)
        key = None
        if len(used) <= 1:
            key = (node, tuple(gammas[j - 1] for j in used), sigmas)
            hit = self.memo.get(key)
            if hit is not None:
                return hit
        truth, n = self.truth, self.n
        if isinstance(node, TConn):
            sym = node.symbol
            if sym == "0":
                out = (0,) * n
            elif sym == "1":
                out = (truth.top,) * n
            elif sym in truth.constants:
                out = (truth.constants[sym],) * n
            elif sym in truth.extras:
                tab = truth.extras[sym]
                inner = self.eval(node.args[0], gammas, sigmas)
                out = tuple(tab[v] for v in inner)
            else:
                table = {
                    "/\\": truth.meet_table,
                    "\\/": truth.join_table,
                    "*": truth.tensor_table,
                    "->": truth.impl_table,
                }[sym]
                a = self.eval(node.args[0], gammas, sigmas)
                b = self.eval(node.args[1], gammas, sigmas)
                out = tuple(table[u][v] for u, v in zip(a, b))
        else:
            spec = self.config.lifting(node.lifting)
            gamma = gammas[node.slot - 1]
            preds = [self.eval(a, gammas, sigmas) for a in node.args]
            out = tuple(
                apply_lifting(spec, preds, gamma[x], self.config, n)
                for x in range(n)
            )
        if key is not None:
            self.memo[key] = out
        return out


def verify_reduction_rule(
    rule,
    config: LogicConfig,
    n: int = 2,
    mode: str = "exhaustive",
    budget: int = DEFAULT_SWEEP_BUDGET,
    trials: int = 10_000,
    seed: int = DEFAULT_SEED,
) -> Verdict:
    """Check lambda(sigmas) . O(gammas) = template[gammas, sigmas] exactly.

    Exhaustive mode sweeps every coalgebra tuple, predicate tuple and state
    at carrier size n; random mode samples ``trials`` coalgebra/predicate
    draws.  Values are exact algebra elements, so the tolerance is zero.
    """
    t0 = time.perf_counter()
    fops = config.fops(n)
    truth = config.truth
    lift = config.lifting(rule.lifting)
    sigma_space = list(product(predicate_space(truth.m, n), repeat=lift.arity))
    tev = _TemplateEval(config, n)
    lcache: dict = {}

    def lhs_row(out, sigmas):
        row = []
        for x in range(n):
            key = (out[x], sigmas)
            v = lcache.get(key)
            if v is None:
                v = apply_lifting(lift, sigmas, out[x], config, n)
                lcache[key] = v
            row.append(v)
        return tuple(row)

    cases = 0
    if rule.target_kind == "test":
        spec = config.test(rule.target)
        if mode == "exhaustive":
            for sigma_t in predicate_space(truth.m, n):
                gamma = apply_test(spec, sigma_t, fops, truth)
                for sigmas in sigma_space:
                    cases += n
                    lrow = lhs_row(gamma, sigmas)
                    rrow = tev.eval(rule.template.body, (), (sigma_t,) + sigmas)
                    if lrow != rrow:
                        return _fail_rule(
                            rule, config, t0, cases, None, sigma_t, sigmas, lrow, rrow
                        )
            return _verdict("holds", cases, t0, None, rule=list(rule.key), n=n, mode=mode)
        rng = random.Random(seed)
        for _ in range(trials):
            sigma_t = tuple(rng.randrange(truth.m) for _ in range(n))
            sigmas = _random_sigmas(truth, n, lift.arity, rng)
            gamma = apply_test(spec, sigma_t, fops, truth)
            cases += n
            lrow = lhs_row(gamma, sigmas)
            rrow = tev.eval(rule.template.body, (), (sigma_t,) + sigmas)
            if lrow != rrow:
                return _fail_rule(rule, config, t0, cases, None, sigma_t, sigmas, lrow, rrow)
        return _verdict(
            "holds-up-to-bound", cases, t0, None, rule=list(rule.key), n=n, mode=mode,
            trials=trials, seed=seed,
        )

    op = config.op(rule.target)
    if mode == "exhaustive":
        values = _space(fops, budget)
        coalgs = _coalgebras(values, n)
        if op.arity == 1:
            for g in coalgs:
                gammas = (g,)
                out = apply_op(op, gammas, fops)
                for sigmas in sigma_space:
                    cases += n
                    lrow = lhs_row(out, sigmas)
                    rrow = tev.eval(rule.template.body, gammas, sigmas)
                    if lrow != rrow:
                        return _fail_rule(rule, config, t0, cases, gammas, None, sigmas, lrow, rrow)
        else:
            compose_like = op.variant in ("kleisli", "double-seq", "double-star")
            for g2 in coalgs:
                if compose_like:
                    cmap = composition_map(fops, op.variant, g2)
                    comp = {t: cmap(t) for t in values}
                for g1 in coalgs:
                    if compose_like:
                        out = tuple(comp[g1[x]] for x in range(n))
                    else:
                        out = apply_op(op, (g1, g2), fops)
                    gammas = (g1, g2)
                    for sigmas in sigma_space:
                        cases += n
                        lrow = lhs_row(out, sigmas)
                        rrow = tev.eval(rule.template.body, gammas, sigmas)
                        if lrow != rrow:
                            return _fail_rule(
                                rule, config, t0, cases, gammas, None, sigmas, lrow, rrow
                            )
        return _verdict("holds", cases, t0, None, rule=list(rule.key), n=n, mode=mode)

    rng = random.Random(seed)
    for _ in range(trials):
        gammas = tuple(
            tuple(fops.random_value(rng) for _ in range(n)) for _ in range(op.arity)
        )
        sigmas = _random_sigmas(truth, n, lift.arity, rng)
        out = apply_op(op, gammas, fops)
        cases += n
        lrow = lhs_row(out, sigmas)
        rrow = tev.eval(rule.template.body, gammas, sigmas)
        if lrow != rrow:
            return _fail_rule(rule, config, t0, cases, gammas, None, sigmas, lrow, rrow)
    return _verdict(
        "holds-up-to-bound", cases, t0, None, rule=list(rule.key), n=n, mode=mode,
        trials=trials, seed=seed,
    )


def _random_sigmas(truth: Algebra, n: int, k: int, rng: random.Random) -> tuple:
    return tuple(
        tuple(rng.randrange(truth.m) for _ in range(n)) for _ in range(k)
    )


def _fail_rule(rule, config, t0, cases, gammas, sigma_t, sigmas, lrow, rrow) -> Verdict:
    counter = {
        "rule": list(rule.key),
        "sigmas": [list(s) for s in sigmas],
        "lhs": list(lrow),
        "rhs": list(rrow),
    }
    if gammas is not None:
        counter["gammas"] = [
            [fvalue_to_json(config.kind, v) for v in g] for g in gammas
        ]
    if sigma_t is not None:
        counter["test_argument"] = list(sigma_t)
    return _verdict("fails", cases, t0, counter)


def verify_registry(
    registry,
    n: int = 2,
    mode: str = "exhaustive",
    budget: int = DEFAULT_SWEEP_BUDGET,
    trials: int = 10_000,
    seed: int = DEFAULT_SEED,
) -> dict[tuple, Verdict]:
    """verify_reduction_rule over every rule in a registry."""
    return {
        key: verify_reduction_rule(
            rule, registry.config, n=n, mode=mode, budget=budget, trials=trials, seed=seed
        )
        for key, rule in registry.rules.items()
    }


# -- one-step satisfiability ----------------------------------------------

ONE_STEP_KINDS = ("labelled-diamond", "threshold", "monotone-eval")


@dataclass
class AxiomViolation:
    axiom: str
    instance: dict


@dataclass
class OneStepResult:
    alpha: object | None
    violation: AxiomViolation | None

    @property
    def satisfiable(self) -> bool:
        return self.violation is None


def one_step_witness(kind: str, alg: Algebra, n: int, H: Mapping) -> OneStepResult:
    """Construct a one-step witness for a rank-1 assignment, or name the
    violated rank-1 axiom.

    H keys by kind: labelled-diamond and monotone-eval map predicate tuples
    to elements; threshold maps (r, state-bitmask) pairs to 0/1.
    """
    if kind == "labelled-diamond":
        return _witness_diamond(alg, n, H)
    if kind == "threshold":
        return _witness_threshold(alg, n, H)
    if kind == "monotone-eval":
        return _witness_eval(alg, n, H)
    raise UnsupportedKind(
        f"one-step witnesses support {', '.join(ONE_STEP_KINDS)}; got {kind!r}"
    )


def _witness_diamond(alg: Algebra, n: int, H: Mapping) -> OneStepResult:
    preds = predicate_space(alg.m, n)
    for p in preds:
        if p not in H:
            raise InvalidParameter(f"H is not total: missing diamond atom {p}")
    jt, tt = alg.join_table, alg.tensor_table
    # join axiom: H(dia(p \/ q)) = H(dia p) \/ H(dia q)
    for p in preds:
        for q in preds:
            joined = tuple(jt[u][v] for u, v in zip(p, q))
            if H[joined] != jt[H[p]][H[q]]:
                return OneStepResult(
                    None,
                    AxiomViolation(
                        "diamond-join",
                        {"p": list(p), "q": list(q), "axiom": "dia(p \\/ q) <-> dia p \\/ dia q"},
                    ),
                )
    # constant axiom: H(dia(p (*) c)) = H(dia p) (*) c
    for p in preds:
        for c in range(alg.m):
            scaled = tuple(tt[v][c] for v in p)
            if H[scaled] != tt[H[p]][c]:
                return OneStepResult(
                    None,
                    AxiomViolation(
                        "diamond-constant",
                        {"p": list(p), "c": c, "axiom": "dia(p (*) c) <-> dia p (*) c"},
                    ),
                )
    alpha = tuple(H[tuple(alg.top if y == x else 0 for y in range(n))] for x in range(n))
    mismatch = _verify_alpha_diamond(alg, n, H, alpha)
    if mismatch is not None:
        return OneStepResult(None, mismatch)
    return OneStepResult(alpha, None)


def _verify_alpha_diamond(alg, n, H, alpha) -> AxiomViolation | None:
    jt, tt = alg.join_table, alg.tensor_table
    for p in predicate_space(alg.m, n):
        acc = 0
        for x in range(n):
            acc = jt[acc][tt[p[x]][alpha[x]]]
        if acc != H[p]:
            return AxiomViolation(
                "one-step-satisfaction", {"p": list(p), "expected": H[p], "got": acc}
            )
    return None


def _witness_threshold(alg: Algebra, n: int, H: Mapping) -> OneStepResult:
    if not alg.linear:
        raise NonlinearAlgebra("threshold witnesses require a linear algebra")
    rs = range(1, alg.m)
    masks = range(1 << n)
    for r in rs:
        for s in masks:
            if (r, s) not in H:
                raise InvalidParameter(f"H is not total: missing atom (r={r}, S={s})")
            if H[(r, s)] not in (0, 1):
                raise InvalidParameter("threshold H must be two-valued")
    for r in rs:
        if H[(r, 0)] != 0:
            return OneStepResult(
                None,
                AxiomViolation(
                    "threshold-bottom", {"r": r, "axiom": "dia_r bot <-> bot"}
                ),
            )
        for s1 in masks:
            for s2 in masks:
                if H[(r, s1 | s2)] != max(H[(r, s1)], H[(r, s2)]):
                    return OneStepResult(
                        None,
                        AxiomViolation(
                            "threshold-join",
                            {
                                "r": r,
                                "S1": s1,
                                "S2": s2,
                                "axiom": "dia_r(p \\/ q) <-> dia_r p \\/ dia_r q",
                            },
                        ),
                    )
    for s in masks:
        for r1 in rs:
            for r2 in rs:
                if alg.leq(r2, r1) and H[(r1, s)] > H[(r2, s)]:
                    return OneStepResult(
                        None,
                        AxiomViolation(
                            "threshold-monotonicity",
                            {
                                "r1": r1,
                                "r2": r2,
                                "S": s,
                                "axiom": "dia_r1 p -> dia_r2 p for all r2 <= r1",
                            },
                        ),
                    )
    alpha = tuple(
        alg.bigjoin(r for r in rs if H[(r, 1 << x)] == 1) for x in range(n)
    )
    for r in rs:
        for s in masks:
            acc = alg.bigjoin(alpha[x] for x in range(n) if s >> x & 1)
            got = 1 if alg.leq(r, acc) else 0
            if got != H[(r, s)]:
                return OneStepResult(
                    None,
                    AxiomViolation(
                        "one-step-satisfaction",
                        {"r": r, "S": s, "expected": H[(r, s)], "got": got},
                    ),
                )
    return OneStepResult(alpha, None)


def _witness_eval(alg: Algebra, n: int, H: Mapping) -> OneStepResult:
    preds = predicate_space(alg.m, n)
    for p in preds:
        if p not in H:
            raise InvalidParameter(f"H is not total: missing eval atom {p}")
    leq = alg.leq
    for p in preds:
        for q in preds:
            if all(leq(u, v) for u, v in zip(p, q)) and not leq(H[p], H[q]):
                return OneStepResult(
                    None,
                    AxiomViolation(
                        "eval-monotonicity",
                        {"p": list(p), "q": list(q), "axiom": "dia p -> dia(p \\/ q)"},
                    ),
                )
    alpha = tuple(H[p] for p in preds)
    # satisfaction is immediate: the lifting evaluates the table at its input
    return OneStepResult(alpha, None)


# -- bounded entailment ----------------------------------------------------


def bounded_entailment(
    gamma: Sequence[Formula],
    phi: Formula,
    config: LogicConfig,
    max_n: int = 2,
    mode: str = "exhaustive",
    budget: int = DEFAULT_SWEEP_BUDGET,
    trials: int = 10_000,
    seed: int = DEFAULT_SEED,
) -> Verdict:
    """Search standard models up to max_n states for a countermodel of
    Gamma |= phi; truth means value 1 at the state."""
    t0 = time.perf_counter()
    formulas = list(gamma) + [phi]
    prop_names = sorted(set().union(set(), *(props_of(g) for g in formulas)))
    atom_names = sorted(set().union(set(), *(atoms_of(g) for g in formulas)))
    truth = config.truth
    top = truth.top
    cases = 0
    if mode == "exhaustive":
        for n in range(1, max_n + 1):
            fops = config.fops(n)
            values = list(fops.enumerate(budget))
            n_coalgs = len(values) ** n
            preds = predicate_space(truth.m, n)
            total = (n_coalgs ** len(atom_names)) * (len(preds) ** len(prop_names))
            if total > budget:
                raise BudgetExceeded(
                    f"{total} standard models at n={n} exceed budget {budget}; "
                    "random mode is available",
                    count=total,
                )
            coalgs = _coalgebras(values, n)
            for atom_assign in product(coalgs, repeat=len(atom_names)):
                atoms = dict(zip(atom_names, atom_assign))
                for val_assign in product(preds, repeat=len(prop_names)):
                    cases += 1
                    model = Model(
                        n, config, atoms, dict(zip(prop_names, val_assign)),
                        validate=False,
                    )
                    found = _countermodel_state(model, gamma, phi, top)
                    if found is not None:
                        return _verdict(
                            "fails", cases, t0,
                            {
                                "model": model_to_json(model),
                                "state": found,
                                "phi": render(phi, config.signature),
                                "gamma": [render(g, config.signature) for g in gamma],
                            },
                            max_n=max_n, mode=mode,
                        )
        return _verdict("holds-up-to-bound", cases, t0, None, max_n=max_n, mode=mode)
    rng = random.Random(seed)
    for _ in range(trials):
        n = rng.randint(1, max_n)
        fops = config.fops(n)
        atoms = {
            name: tuple(fops.random_value(rng) for _ in range(n))
            for name in atom_names
        }
        valuation = {
            name: tuple(rng.randrange(truth.m) for _ in range(n))
            for name in prop_names
        }
        cases += 1
        model = Model(n, config, atoms, valuation, validate=False)
        found = _countermodel_state(model, gamma, phi, top)
        if found is not None:
            return _verdict(
                "fails", cases, t0,
                {
                    "model": model_to_json(model),
                    "state": found,
                    "phi": render(phi, config.signature),
                    "gamma": [render(g, config.signature) for g in gamma],
                },
                max_n=max_n, mode=mode, seed=seed,
            )
    return _verdict(
        "holds-up-to-bound", cases, t0, None, max_n=max_n, mode=mode, trials=trials,
        seed=seed,
    )


def _countermodel_state(model: Model, gamma, phi, top: int) -> int | None:
    session = model.session()
    rows = [session.eval(g) for g in gamma]
    phi_row = session.eval(phi)
    for x in range(model.n):
        if phi_row[x] != top and all(r[x] == top for r in rows):
            return x
    return None
