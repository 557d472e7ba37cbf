"""Predicate liftings, models and the formula evaluator.

A model fixes a carrier size, a logic configuration (functor kind, truth and
structure algebras, the lifting/operation/test catalogue), coalgebras for the
atomic actions and a propositional valuation.  Evaluation happens inside an
EvalSession, which memoizes formula values and interpreted actions; the two
caches drive the mutual recursion between formulas and test actions.

Two algebras show up because the threshold logic evaluates formulas in the
two-element Boolean algebra over structures labelled in a larger chain; in
every other configuration they coincide.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .actions import (
    Coalgebra,
    DEFAULT_ITERATE_CAP,
    OperationSpec,
    TestSpec,
    apply_op,
    apply_test,
)
from .algebra import Algebra
from .errors import (
    ArityMismatch,
    IncompatibleVariant,
    InvalidParameter,
    UnknownAtom,
    UnknownIdentifier,
)
from .functors import (
    Kind,
    NEIGHBOURHOOD_KINDS,
    FunctorOps,
    functor_ops,
    predicate_index,
)
from .syntax import Atomic, Conn, Formula, Op, Prop, Signature, Test

Predicate = tuple

LIFTING_VARIANTS = {
    "box-crisp": (Kind.POWERSET,),
    "diamond-crisp": (Kind.POWERSET,),
    "box-labelled": (Kind.APOWERSET,),
    "diamond-labelled": (Kind.APOWERSET,),
    "threshold": (Kind.APOWERSET,),
    "eval": NEIGHBOURHOOD_KINDS,
    "instantial": (Kind.DOUBLE_POWERSET,),
}


@dataclass(frozen=True)
class LiftingSpec:
    """One modality: a named k-ary predicate lifting variant.

    ``param`` is the threshold element for the threshold variant and unused
    otherwise; instantial arity is k+1 with the containment argument last.
    """

    id: str
    arity: int
    variant: str
    param: int = 0

    def check_kind(self, kind: Kind) -> None:
        if kind not in LIFTING_VARIANTS.get(self.variant, ()):
            raise IncompatibleVariant(
                f"lifting variant {self.variant!r} does not apply to {kind.value}"
            )


@dataclass(frozen=True)
class LogicConfig:
    """A fixed choice of functor, algebras and modal/dynamic catalogue."""

    name: str
    kind: Kind
    truth: Algebra
    struct: Algebra
    liftings: Mapping[str, LiftingSpec]
    ops: Mapping[str, OperationSpec]
    tests: Mapping[str, TestSpec]
    signature: Signature

    def lifting(self, name: str) -> LiftingSpec:
        try:
            return self.liftings[name]
        except KeyError:
            raise UnknownIdentifier(f"unknown lifting {name!r}") from None

    def op(self, name: str) -> OperationSpec:
        try:
            return self.ops[name]
        except KeyError:
            raise UnknownIdentifier(f"unknown operation {name!r}") from None

    def test(self, name: str) -> TestSpec:
        try:
            return self.tests[name]
        except KeyError:
            raise UnknownIdentifier(f"unknown test {name!r}") from None

    def fops(self, n: int) -> FunctorOps:
        return functor_ops(self.kind, n, self.struct)


def crisp_mask(truth: Algebra, pred: Sequence[int]) -> int:
    """Bitmask of the states where a two-valued predicate is true."""
    mask = 0
    for x, v in enumerate(pred):
        if v == truth.top:
            mask |= 1 << x
    return mask


def apply_lifting(
    spec: LiftingSpec,
    preds: Sequence[Predicate],
    value,
    config: LogicConfig,
    n: int,
) -> int:
    """lambda_X(preds)(value), by the closed formula of the variant."""
    spec.check_kind(config.kind)
    if len(preds) != spec.arity:
        raise ArityMismatch(
            f"lifting {spec.id!r} expects {spec.arity} predicate(s), got {len(preds)}"
        )
    truth, struct = config.truth, config.struct
    variant = spec.variant
    if variant == "box-crisp":
        acc = truth.top
        sigma = preds[0]
        for x in range(n):
            if value >> x & 1:
                acc = truth.meet(acc, sigma[x])
        return acc
    if variant == "diamond-crisp":
        acc = 0
        sigma = preds[0]
        for x in range(n):
            if value >> x & 1:
                acc = truth.join(acc, sigma[x])
        return acc
    if variant == "box-labelled":
        sigma = preds[0]
        acc = struct.top
        it = struct.impl_table
        mt = struct.meet_table
        for x in range(n):
            acc = mt[acc][it[value[x]][sigma[x]]]
        return acc
    if variant == "diamond-labelled":
        sigma = preds[0]
        acc = 0
        tt = struct.tensor_table
        jt = struct.join_table
        for x in range(n):
            acc = jt[acc][tt[value[x]][sigma[x]]]
        return acc
    if variant == "threshold":
        mask = crisp_mask(truth, preds[0])
        acc = 0
        for x in range(n):
            if mask >> x & 1:
                acc = struct.join(acc, value[x])
        return truth.top if struct.leq(spec.param, acc) else 0
    if variant == "eval":
        return value[predicate_index(struct.m, n)[tuple(preds[0])]]
    if variant == "instantial":
        smask = crisp_mask(truth, preds[-1])
        imasks = [crisp_mask(truth, p) for p in preds[:-1]]
        for z in value:
            if z & ~smask:
                continue
            if all(z & im for im in imasks):
                return truth.top
        return 0
    raise IncompatibleVariant(f"unknown lifting variant {variant!r}")


class Model:
    """Finite dynamic model: atomic coalgebras plus a propositional valuation."""

    def __init__(
        self,
        n: int,
        config: LogicConfig,
        atoms: Mapping[str, Sequence],
        valuation: Mapping[str, Sequence[int]],
        validate: bool = True,
    ):
        self.n = n
        self.config = config
        self.atoms = {k: tuple(v) for k, v in atoms.items()}
        self.valuation = {k: tuple(v) for k, v in valuation.items()}
        self.fops = config.fops(n)
        if validate:
            self._validate()

    def _validate(self) -> None:
        for name, gamma in self.atoms.items():
            if len(gamma) != self.n:
                raise InvalidParameter(
                    f"atom {name!r} has {len(gamma)} states, model has {self.n}"
                )
            for value in gamma:
                if not self.fops.is_valid(value):
                    raise InvalidParameter(
                        f"atom {name!r} carries an invalid {self.config.kind.value} value"
                    )
        for name, row in self.valuation.items():
            if len(row) != self.n:
                raise InvalidParameter(f"valuation of {name!r} has wrong length")
            if any(not (0 <= v < self.config.truth.m) for v in row):
                raise InvalidParameter(f"valuation of {name!r} is out of range")

    def session(self) -> "EvalSession":
        return EvalSession(self)


class EvalSession:
    """Owns the memo tables for one round of mutual formula/action recursion.

    Distinct sessions may run concurrently; a single session must not be
    shared across threads.
    """

    def __init__(self, model: Model, iterate_cap: int = DEFAULT_ITERATE_CAP):
        self.model = model
        self.iterate_cap = iterate_cap
        self._formulas: dict[Formula, Predicate] = {}
        self._actions: dict[object, Coalgebra] = {}

    def eval(self, formula: Formula) -> Predicate:
        cached = self._formulas.get(formula)
        if cached is not None:
            return cached
        out = self._eval(formula)
        self._formulas[formula] = out
        return out

    def _eval(self, formula: Formula) -> Predicate:
        model = self.model
        truth = model.config.truth
        if isinstance(formula, Prop):
            try:
                return model.valuation[formula.name]
            except KeyError:
                raise UnknownIdentifier(
                    f"proposition {formula.name!r} is not interpreted"
                ) from None
        if isinstance(formula, Conn):
            sym = formula.symbol
            if sym == "0":
                return (0,) * model.n
            if sym == "1":
                return (truth.top,) * model.n
            if sym in truth.constants:
                return (truth.constants[sym],) * model.n
            args = [self.eval(a) for a in formula.args]
            if sym == "/\\":
                t = truth.meet_table
            elif sym == "\\/":
                t = truth.join_table
            elif sym == "*":
                t = truth.tensor_table
            elif sym == "->":
                t = truth.impl_table
            elif sym in truth.extras:
                tab = truth.extras[sym]
                return tuple(tab[v] for v in args[0])
            else:
                raise UnknownIdentifier(f"connective {sym!r} is not interpreted")
            a, b = args
            return tuple(t[u][v] for u, v in zip(a, b))
        spec = model.config.lifting(formula.lifting)
        gamma = self.interpret(formula.action)
        preds = [self.eval(a) for a in formula.args]
        return tuple(
            apply_lifting(spec, preds, gamma[x], model.config, model.n)
            for x in range(model.n)
        )

    def interpret(self, action) -> Coalgebra:
        cached = self._actions.get(action)
        if cached is not None:
            return cached
        out = self._interpret(action)
        self._actions[action] = out
        return out

    def _interpret(self, action) -> Coalgebra:
        model = self.model
        if isinstance(action, Atomic):
            try:
                return model.atoms[action.name]
            except KeyError:
                raise UnknownAtom(
                    f"atomic action {action.name!r} is not interpreted"
                ) from None
        if isinstance(action, Op):
            spec = model.config.op(action.op)
            gammas = [self.interpret(a) for a in action.args]
            return apply_op(spec, gammas, model.fops, cap=self.iterate_cap)
        if isinstance(action, Test):
            spec = model.config.test(action.test)
            sigma = self.eval(action.arg)
            return apply_test(spec, sigma, model.fops, model.config.truth)
        raise InvalidParameter(f"not an action node: {action!r}")


def eval_formula(model: Model, formula: Formula) -> Predicate:
    """One-shot evaluation with a fresh session."""
    return model.session().eval(formula)


def interpret_action(model: Model, action, session: EvalSession | None = None) -> Coalgebra:
    """Standard-model interpretation of an action term."""
    return (session or model.session()).interpret(action)
