"""Single-field mutations of derivations, used to probe the checker."""
from __future__ import annotations

import enum
import random
from dataclasses import replace
from typing import Iterator

from .derivations import Derivation, Judgement, Rule
from .multitypes import EMPTY, LinearType, MultiType, TypeContext, single
from .syntax import Var

_BUMP = single(EMPTY, EMPTY)


class MutationKind(enum.Enum):
    TYPE = "type perturbation"
    CONTEXT = "context perturbation"
    PREMISE_DELETION = "premise deletion"
    RULE_FLIP = "rule-tag flip"


def _perturb_type(m: MultiType, rng: random.Random) -> MultiType:
    choice = rng.randrange(3) if m.items else 0
    if choice == 0:
        return m + _BUMP
    if choice == 1:
        return MultiType(m.items[1:])
    first = m.items[0]
    return MultiType((LinearType(first.left + _BUMP, first.right),) + m.items[1:])


def _perturb_ctx(g: TypeContext, rng: random.Random) -> TypeContext:
    if g and rng.random() < 0.5:
        x = rng.choice(list(g))
        rest = TypeContext((y, m) for y, m in g.items() if y != x)
        return rest + TypeContext({x: _perturb_type(g[x], rng)})
    return g + TypeContext({Var("mut"): _BUMP})


def _at(d: Derivation, path: tuple[int, ...], f) -> Derivation:
    if not path:
        return f(d)
    k = path[0]
    premises = list(d.premises)
    premises[k] = _at(premises[k], path[1:], f)
    return replace(d, premises=tuple(premises))


def _paths(d: Derivation, prefix: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Derivation]]:
    yield prefix, d
    for k, p in enumerate(d.premises):
        yield from _paths(p, prefix + (k,))


def mutate(d: Derivation, rng: random.Random) -> tuple[MutationKind, tuple[int, ...], Derivation]:
    """Apply one random single-field mutation somewhere in ``d``."""
    nodes = list(_paths(d))
    kinds = list(MutationKind)
    if not any(n.premises for _, n in nodes):
        kinds.remove(MutationKind.PREMISE_DELETION)
    kind = rng.choice(kinds)
    if kind is MutationKind.PREMISE_DELETION:
        nodes = [(p, n) for p, n in nodes if n.premises]
    path, _ = rng.choice(nodes)

    def apply(node: Derivation) -> Derivation:
        j = node.judgement
        if kind is MutationKind.TYPE:
            return replace(node, judgement=Judgement(j.ctx, j.subject, _perturb_type(j.ty, rng)))
        if kind is MutationKind.CONTEXT:
            return replace(node, judgement=Judgement(_perturb_ctx(j.ctx, rng), j.subject, j.ty))
        if kind is MutationKind.PREMISE_DELETION:
            k = rng.randrange(len(node.premises))
            return replace(node, premises=node.premises[:k] + node.premises[k + 1:])
        other = rng.choice([r for r in Rule if r is not node.rule])
        entry = node.entry if other is Rule.ES_APPEND else None
        return replace(node, rule=other, entry=entry)

    return kind, path, _at(d, path, apply)


__all__ = ["MutationKind", "mutate"]
