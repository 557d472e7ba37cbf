"""Finite functor values and the per-kind structure the semantics needs.

One FValue is a single state's transition structure:

  POWERSET              int bitmask over the carrier
  APOWERSET             tuple of algebra indices, one per state (a row)
  A_NEIGHBOURHOOD       tuple of algebra indices, one per predicate in
                        canonical order (lexicographic on predicate rows)
  MONOTONE_NEIGHBOURHOOD  same, restricted to monotone tables
  DOUBLE_POWERSET       frozenset of bitmasks

All representations are hashable so coalgebras (tuples of FValues) can key
caches and drive the cycle detection in iteration.
"""

from __future__ import annotations

import random
from enum import Enum
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator

from .algebra import Algebra
from .errors import BudgetExceeded, InvalidParameter

DEFAULT_ENUM_BUDGET = 1_000_000


class Kind(Enum):
    POWERSET = "powerset"
    APOWERSET = "apowerset"
    A_NEIGHBOURHOOD = "aneighbourhood"
    MONOTONE_NEIGHBOURHOOD = "monotone-aneighbourhood"
    DOUBLE_POWERSET = "double-powerset"


NEIGHBOURHOOD_KINDS = (Kind.A_NEIGHBOURHOOD, Kind.MONOTONE_NEIGHBOURHOOD)


@lru_cache(maxsize=None)
def predicate_space(m: int, n: int) -> tuple[tuple[int, ...], ...]:
    """All predicates X -> A in canonical (lexicographic) order."""
    return tuple(product(range(m), repeat=n))


@lru_cache(maxsize=None)
def predicate_index(m: int, n: int) -> dict[tuple[int, ...], int]:
    return {p: i for i, p in enumerate(predicate_space(m, n))}


def fvalue_count(kind: Kind, n: int, m: int) -> int:
    """Size of FX (unrestricted table count for the monotone kind)."""
    if kind is Kind.POWERSET:
        return 1 << n
    if kind is Kind.APOWERSET:
        return m**n
    if kind in NEIGHBOURHOOD_KINDS:
        return m ** (m**n)
    return 1 << (1 << n)


class FunctorOps:
    """Unit, bottom, join and enumeration for one kind at one carrier size.

    ``alg`` is the structure algebra labelling the transitions; the powerset
    kinds ignore it except as a source of the two crisp values.
    """

    def __init__(self, kind: Kind, n: int, alg: Algebra):
        self.kind = kind
        self.n = n
        self.alg = alg

    # -- monad data --------------------------------------------------
    def unit(self, x: int):
        kind, n, alg = self.kind, self.n, self.alg
        if kind is Kind.POWERSET:
            return 1 << x
        if kind is Kind.APOWERSET:
            return tuple(alg.top if y == x else 0 for y in range(n))
        if kind in NEIGHBOURHOOD_KINDS:
            return tuple(p[x] for p in predicate_space(alg.m, n))
        return frozenset({1 << x})  # double unit {{x}}

    def bottom(self):
        kind, n, alg = self.kind, self.n, self.alg
        if kind is Kind.POWERSET:
            return 0
        if kind is Kind.APOWERSET:
            return (0,) * n
        if kind in NEIGHBOURHOOD_KINDS:
            return (0,) * (alg.m**n)
        return frozenset()

    def join2(self, a, b):
        kind = self.kind
        if kind is Kind.POWERSET:
            return a | b
        if kind is Kind.DOUBLE_POWERSET:
            return a | b
        jt = self.alg.join_table
        return tuple(jt[u][v] for u, v in zip(a, b))

    def join(self, values: Iterable):
        out = self.bottom()
        for v in values:
            out = self.join2(out, v)
        return out

    # -- functor action on maps --------------------------------------
    def map(self, f: tuple[int, ...], n_target: int, value):
        """Ff applied to one value, for f: X -> Y given as an index tuple."""
        kind, alg = self.kind, self.alg
        if kind is Kind.POWERSET:
            out = 0
            for x in range(self.n):
                if value >> x & 1:
                    out |= 1 << f[x]
            return out
        if kind is Kind.APOWERSET:
            rows = [0] * n_target
            jt = alg.join_table
            for x in range(self.n):
                rows[f[x]] = jt[rows[f[x]]][value[x]]
            return tuple(rows)
        if kind in NEIGHBOURHOOD_KINDS:
            src_index = predicate_index(alg.m, self.n)
            out = []
            for q in predicate_space(alg.m, n_target):
                pulled = tuple(q[f[x]] for x in range(self.n))
                out.append(value[src_index[pulled]])
            return tuple(out)
        out = set()
        for mask in value:
            img = 0
            for x in range(self.n):
                if mask >> x & 1:
                    img |= 1 << f[x]
            out.add(img)
        return frozenset(out)

    # -- validity and enumeration -------------------------------------
    def is_valid(self, value) -> bool:
        kind, n, alg = self.kind, self.n, self.alg
        if kind is Kind.POWERSET:
            return isinstance(value, int) and 0 <= value < (1 << n)
        if kind is Kind.APOWERSET:
            return (
                isinstance(value, tuple)
                and len(value) == n
                and all(0 <= v < alg.m for v in value)
            )
        if kind in NEIGHBOURHOOD_KINDS:
            if not (
                isinstance(value, tuple)
                and len(value) == alg.m**n
                and all(0 <= v < alg.m for v in value)
            ):
                return False
            if kind is Kind.MONOTONE_NEIGHBOURHOOD:
                return self.is_monotone(value)
            return True
        return isinstance(value, frozenset) and all(
            isinstance(mask, int) and 0 <= mask < (1 << n) for mask in value
        )

    def is_monotone(self, table: tuple[int, ...]) -> bool:
        """N(s1) <= N(s2) whenever s1 <= s2 pointwise, checked exhaustively."""
        alg, n = self.alg, self.n
        preds = predicate_space(alg.m, n)
        leq = alg.leq
        for i, p in enumerate(preds):
            for j, q in enumerate(preds):
                if all(leq(a, b) for a, b in zip(p, q)) and not leq(table[i], table[j]):
                    return False
        return True

    def count(self) -> int:
        return fvalue_count(self.kind, self.n, self.alg.m)

    def enumerate(self, budget: int = DEFAULT_ENUM_BUDGET) -> Iterator:
        """Each valid FValue exactly once; monotone tables are generated
        directly by backtracking over the predicate poset, not filtered."""
        kind, n, alg = self.kind, self.n, self.alg
        if kind is Kind.MONOTONE_NEIGHBOURHOOD:
            yield from self._enumerate_monotone(budget)
            return
        total = self.count()
        if total > budget:
            raise BudgetExceeded(
                f"{kind.value} at n={n} has {total} values, budget is {budget}",
                count=total,
            )
        if kind is Kind.POWERSET:
            yield from range(1 << n)
        elif kind is Kind.APOWERSET:
            yield from product(range(alg.m), repeat=n)
        elif kind is Kind.A_NEIGHBOURHOOD:
            yield from product(range(alg.m), repeat=alg.m**n)
        else:
            subsets = list(range(1 << n))
            for r in range(1 << len(subsets)):
                yield frozenset(s for s in subsets if r >> s & 1)

    def _enumerate_monotone(self, budget: int) -> Iterator[tuple[int, ...]]:
        alg = self.alg
        preds, order, below = _pred_poset(alg, self.n)
        leq = alg.leq
        emitted = 0
        table = [0] * len(preds)

        def rec(pos: int) -> Iterator[tuple[int, ...]]:
            nonlocal emitted
            if pos == len(order):
                emitted += 1
                if emitted > budget:
                    raise BudgetExceeded(
                        f"monotone tables at n={self.n} exceed budget {budget}",
                        count=emitted,
                    )
                yield tuple(table)
                return
            i = order[pos]
            lower = 0
            for j in below[i]:
                lower = alg.join(lower, table[j])
            for v in range(alg.m):
                if leq(lower, v):
                    table[i] = v
                    yield from rec(pos + 1)
            table[i] = 0

        yield from rec(0)

    def random_value(self, rng: random.Random):
        """One pseudo-random FValue; monotone tables are built in a linear
        extension so the result is always valid (not uniform)."""
        kind, n, alg = self.kind, self.n, self.alg
        if kind is Kind.POWERSET:
            return rng.randrange(1 << n)
        if kind is Kind.APOWERSET:
            return tuple(rng.randrange(alg.m) for _ in range(n))
        if kind is Kind.A_NEIGHBOURHOOD:
            return tuple(rng.randrange(alg.m) for _ in range(alg.m**n))
        if kind is Kind.DOUBLE_POWERSET:
            return frozenset(
                mask for mask in range(1 << n) if rng.random() < 0.5
            )
        _, order, below = _pred_poset(alg, n)
        leq = alg.leq
        table = [0] * len(order)
        for i in order:
            lower = 0
            for j in below[i]:
                lower = alg.join(lower, table[j])
            choices = [v for v in range(alg.m) if leq(lower, v)]
            table[i] = rng.choice(choices)
        return tuple(table)


@lru_cache(maxsize=None)
def _pred_poset(alg: Algebra, n: int):
    """Predicates, a linear extension of their pointwise order, and the
    strictly-below lists.  Lexicographic enumeration is only a linear
    extension when the algebra is a chain, so topo-sort explicitly."""
    preds = predicate_space(alg.m, n)
    leq = alg.leq
    below = [
        [j for j in range(len(preds)) if j != i
         and all(leq(a, b) for a, b in zip(preds[j], preds[i]))]
        for i in range(len(preds))
    ]
    order = sorted(range(len(preds)), key=lambda i: len(below[i]))
    return preds, order, below


def functor_ops(kind: Kind, n: int, alg: Algebra) -> FunctorOps:
    if n < 1:
        raise InvalidParameter("carrier size must be at least 1")
    return FunctorOps(kind, n, alg)


def enumerate_fvalues(
    kind: Kind, n: int, alg: Algebra, budget: int = DEFAULT_ENUM_BUDGET
) -> Iterator:
    """Stream every valid FValue of the kind at carrier size n exactly once."""
    return functor_ops(kind, n, alg).enumerate(budget)
