"""Coalgebra operations and tests: the dynamic part of the semantics.

A coalgebra over a model carrier is a tuple of n FValues, one per state.
Operations build composed coalgebras; tests turn a predicate into one.
Composition against a fixed second argument is exposed as a reusable map
(`*_map` helpers) because the verification sweeps revisit the same right
operand for many left operands.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

from .algebra import Algebra
from .errors import BudgetExceeded, IncompatibleVariant
from .functors import (
    Kind,
    NEIGHBOURHOOD_KINDS,
    FunctorOps,
    predicate_index,
    predicate_space,
)

DEFAULT_ITERATE_CAP = 1_000_000

Coalgebra = tuple

OP_VARIANTS = {
    "union": (Kind.POWERSET,),
    "join-pw": (Kind.APOWERSET, *NEIGHBOURHOOD_KINDS),
    "meet-pw": (Kind.APOWERSET, *NEIGHBOURHOOD_KINDS),
    "dual": NEIGHBOURHOOD_KINDS,
    "kleisli": (Kind.POWERSET, Kind.APOWERSET, *NEIGHBOURHOOD_KINDS),
    "double-seq": (Kind.DOUBLE_POWERSET,),
    "double-star": (Kind.DOUBLE_POWERSET,),
    "nbh-union": (Kind.DOUBLE_POWERSET,),
    "star": (Kind.POWERSET, Kind.APOWERSET, *NEIGHBOURHOOD_KINDS, Kind.DOUBLE_POWERSET),
    "counter-domain": (
        Kind.POWERSET,
        Kind.APOWERSET,
        *NEIGHBOURHOOD_KINDS,
        Kind.DOUBLE_POWERSET,
    ),
}

TEST_VARIANTS = {
    "test-p": (Kind.POWERSET, Kind.APOWERSET, *NEIGHBOURHOOD_KINDS),
    "labelled-unit": (Kind.APOWERSET,),
    "angelic": NEIGHBOURHOOD_KINDS,
    "instantial-p": (Kind.DOUBLE_POWERSET,),
}


@dataclass(frozen=True)
class OperationSpec:
    id: str
    arity: int
    variant: str

    def check_kind(self, kind: Kind) -> None:
        if kind not in OP_VARIANTS.get(self.variant, ()):
            raise IncompatibleVariant(
                f"operation variant {self.variant!r} does not apply to {kind.value}"
            )


@dataclass(frozen=True)
class TestSpec:
    id: str
    variant: str
    subset: frozenset[int] = frozenset()  # P for test-p / instantial-p

    def check_kind(self, kind: Kind) -> None:
        if kind not in TEST_VARIANTS.get(self.variant, ()):
            raise IncompatibleVariant(
                f"test variant {self.variant!r} does not apply to {kind.value}"
            )


# -- composition helpers -------------------------------------------------


def kleisli_compose_map(fops: FunctorOps, g2: Coalgebra) -> Callable:
    """t |-> (t ; g2) for a single source value t."""
    kind, n, alg = fops.kind, fops.n, fops.alg
    if kind is Kind.POWERSET:
        def pmap(t: int) -> int:
            out = 0
            for y in range(n):
                if t >> y & 1:
                    out |= g2[y]
            return out

        return pmap
    if kind is Kind.APOWERSET:
        jt, tt = alg.join_table, alg.tensor_table

        def amap(t: tuple) -> tuple:
            out = []
            for z in range(n):
                acc = 0
                for y in range(n):
                    acc = jt[acc][tt[t[y]][g2[y][z]]]
                out.append(acc)
            return tuple(out)

        return amap
    if kind in NEIGHBOURHOOD_KINDS:
        index = predicate_index(alg.m, n)
        # ev_sigma . g2, indexed by the sigma being looked up
        jmap = [
            index[tuple(g2[y][i] for y in range(n))]
            for i in range(len(predicate_space(alg.m, n)))
        ]

        def nmap(t: tuple) -> tuple:
            return tuple(t[j] for j in jmap)

        return nmap
    raise IncompatibleVariant(f"kleisli does not apply to {kind.value}")


def double_seq_map(fops: FunctorOps, g2: Coalgebra) -> Callable:
    """t |-> (t ; g2) for the double powerset sequential composition."""
    n = fops.n

    def dmap(t: frozenset) -> frozenset:
        out = set()
        for zmask in t:
            states = [y for y in range(n) if zmask >> y & 1]
            family = sorted({u for y in states for u in g2[y]})
            fam_len = len(family)
            for pick in range(1 << fam_len):
                chosen = [family[i] for i in range(fam_len) if pick >> i & 1]
                ok = True
                for y in states:
                    if not any(u in g2[y] for u in chosen):
                        ok = False
                        break
                if ok:
                    union = 0
                    for u in chosen:
                        union |= u
                    out.add(union)
        return frozenset(out)

    return dmap


def double_star_map(fops: FunctorOps, g2: Coalgebra) -> Callable:
    """t |-> (t (star) g2): collect g2(y) over all y in some member of t."""
    n = fops.n

    def smap(t: frozenset) -> frozenset:
        reach = 0
        for ymask in t:
            reach |= ymask
        out: set[int] = set()
        for y in range(n):
            if reach >> y & 1:
                out |= g2[y]
        return frozenset(out)

    return smap


def composition_map(fops: FunctorOps, variant: str, g2: Coalgebra) -> Callable:
    if variant == "kleisli":
        return kleisli_compose_map(fops, g2)
    if variant == "double-seq":
        return double_seq_map(fops, g2)
    if variant == "double-star":
        return double_star_map(fops, g2)
    raise IncompatibleVariant(f"{variant!r} is not a composition variant")


@lru_cache(maxsize=None)
def _neg_index_map(alg: Algebra, n: int) -> tuple[int, ...]:
    index = predicate_index(alg.m, n)
    return tuple(
        index[tuple(alg.neg(v) for v in p)] for p in predicate_space(alg.m, n)
    )


def apply_op(
    op: OperationSpec, gammas: Sequence[Coalgebra], fops: FunctorOps, cap: int = DEFAULT_ITERATE_CAP
) -> Coalgebra:
    """Apply one coalgebra operation; all inputs share the model carrier."""
    op.check_kind(fops.kind)
    if len(gammas) != op.arity:
        raise IncompatibleVariant(
            f"operation {op.id!r} has arity {op.arity}, got {len(gammas)} coalgebras"
        )
    n, alg, variant = fops.n, fops.alg, op.variant
    if variant == "union":
        g1, g2 = gammas
        return tuple(g1[x] | g2[x] for x in range(n))
    if variant == "nbh-union":
        g1, g2 = gammas
        return tuple(
            frozenset(z1 | z2 for z1 in g1[x] for z2 in g2[x]) for x in range(n)
        )
    if variant in ("join-pw", "meet-pw"):
        g1, g2 = gammas
        table = alg.join_table if variant == "join-pw" else alg.meet_table
        return tuple(
            tuple(table[u][v] for u, v in zip(g1[x], g2[x])) for x in range(n)
        )
    if variant == "dual":
        (g,) = gammas
        negmap = _neg_index_map(alg, n)
        return tuple(
            tuple(alg.neg(g[x][j]) for j in negmap) for x in range(n)
        )
    if variant in ("kleisli", "double-seq", "double-star"):
        g1, g2 = gammas
        cmap = composition_map(fops, variant, g2)
        return tuple(cmap(g1[x]) for x in range(n))
    if variant == "star":
        (g,) = gammas
        return kleisli_star(fops, g, cap)
    if variant == "counter-domain":
        (g,) = gammas
        bottom = fops.bottom()
        return tuple(
            fops.unit(x) if g[x] == bottom else bottom for x in range(n)
        )
    raise IncompatibleVariant(f"unknown operation variant {variant!r}")


def kleisli_star(fops: FunctorOps, gamma: Coalgebra, cap: int = DEFAULT_ITERATE_CAP) -> Coalgebra:
    """Join of the iterate sequence eta, gamma;eta, gamma;(gamma;eta), ...

    The value space is finite, so the sequence is eventually periodic; the
    join over the detected orbit equals the join over all iterates.
    """
    n = fops.n
    seq_variant = "double-seq" if fops.kind is Kind.DOUBLE_POWERSET else "kleisli"
    current = tuple(fops.unit(x) for x in range(n))
    seen = set()
    acc = tuple(fops.bottom() for _ in range(n))
    steps = 0
    # compose against the *previous iterate*: gamma^[i+1] = gamma ; gamma^[i]
    while current not in seen:
        seen.add(current)
        acc = tuple(fops.join2(acc[x], current[x]) for x in range(n))
        cmap = composition_map(fops, seq_variant, current)
        current = tuple(cmap(gamma[x]) for x in range(n))
        steps += 1
        if steps > cap:
            raise BudgetExceeded(
                f"iteration orbit exceeded cap of {cap} steps", count=steps
            )
    return acc


def embed_truth(truth: Algebra, struct: Algebra, value: int) -> int:
    """Carry a truth value into the structure algebra.

    The algebras coincide in every preset except the two-valued ones, where
    0 and 1 map to the structure bottom and top.
    """
    if truth is struct or truth == struct:
        return value
    return struct.top if value == truth.top else 0


def apply_test(
    test: TestSpec,
    sigma: Sequence[int],
    fops: FunctorOps,
    truth: Algebra,
) -> Coalgebra:
    """Build the test coalgebra for predicate ``sigma`` (truth-algebra valued)."""
    test.check_kind(fops.kind)
    n, alg = fops.n, fops.alg
    if test.variant == "test-p":
        bottom = fops.bottom()
        return tuple(
            fops.unit(x) if sigma[x] in test.subset else bottom for x in range(n)
        )
    if test.variant == "instantial-p":
        return tuple(
            frozenset({1 << x}) if sigma[x] in test.subset else frozenset()
            for x in range(n)
        )
    if test.variant == "labelled-unit":
        return tuple(
            tuple(
                embed_truth(truth, alg, sigma[x]) if y == x else 0 for y in range(n)
            )
            for x in range(n)
        )
    if test.variant == "angelic":
        preds = predicate_space(alg.m, n)
        tt = alg.tensor_table
        return tuple(
            tuple(tt[p[x]][sigma[x]] for p in preds) for x in range(n)
        )
    raise IncompatibleVariant(f"unknown test variant {test.variant!r}")
