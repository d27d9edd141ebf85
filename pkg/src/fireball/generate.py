"""Seeded random terms for the property battery, and exhaustive small-term enumeration."""
from __future__ import annotations

import random
from itertools import product
from typing import Iterator

from .syntax import Abstraction, Application, Term, Var, Variable

FREE_POOL = (Var("x"), Var("y"), Var("w"))
BOUND_POOL = (Var("a"), Var("b"), Var("c"), Var("d"))
CLOSED_RATE = 0.4
LAM_RATE = 0.3
SELF_APP = 0.7
VAR_RATE = 0.6


def generate_terms(seed: int, count: int, max_size: int) -> list[Term]:
    """``count`` reproducible terms, each with at most ``max_size`` applications."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        closed = rng.random() < CLOSED_RATE
        free = () if closed else FREE_POOL[: rng.randint(1, len(FREE_POOL))]
        out.append(_gen(rng, rng.randint(1, max_size), (), free))
    return out


def _gen(rng: random.Random, apps: int, scope: tuple[Var, ...], free: tuple[Var, ...]) -> Term:
    if apps == 0:
        names = scope + free
        if names and rng.random() < VAR_RATE:
            return Variable(rng.choice(names))
        x = rng.choice(BOUND_POOL)
        if rng.random() < SELF_APP:
            return Abstraction(x, Application(Variable(x), Variable(x)))
        body_names = (x,) + scope + free
        return Abstraction(x, Variable(rng.choice(body_names)))
    if rng.random() < LAM_RATE:
        x = rng.choice(BOUND_POOL)
        return Abstraction(x, _gen(rng, apps, scope + (x,), free))
    k = rng.randint(0, apps - 1)
    return Application(_gen(rng, k, scope, free), _gen(rng, apps - 1 - k, scope, free))


def enumerate_terms(max_nodes: int, names: tuple[Var, ...] = (Var("x"), Var("y"))) -> Iterator[Term]:
    """Every term with at most ``max_nodes`` nodes over ``names`` (binders drawn from the same set)."""
    for n in range(1, max_nodes + 1):
        yield from _exact(n, names)


def _exact(n: int, names: tuple[Var, ...]) -> Iterator[Term]:
    if n == 1:
        for x in names:
            yield Variable(x)
        return
    for x in names:
        for body in _exact(n - 1, names):
            yield Abstraction(x, body)
    for k in range(1, n - 1):
        for f, a in product(list(_exact(k, names)), list(_exact(n - 1 - k, names))):
            yield Application(f, a)


__all__ = ["generate_terms", "enumerate_terms", "FREE_POOL", "BOUND_POOL"]
