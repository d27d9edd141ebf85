"""The invariance counterexample for the plain calculus, and a bounded derivability oracle."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement

from .derivations import (
    Derivation,
    app_rule,
    ax,
    derivation_size,
    es_empty,
    is_valid,
    lam_rule,
)
from .multitypes import EMPTY, EMPTY_CTX, LinearType, MultiType, TypeContext, single
from .syntax import (
    Application,
    Program,
    Term,
    Var,
    Variable,
    alpha_eq_program,
    parse_program,
    parse_term,
    print_program,
)
from .synthesis import subject_reduce

DEFAULT_BOUND = 3


def variable_judgement_derivable(ctx: TypeContext, y: Var, n: MultiType) -> bool:
    """Exact: a variable is only typed by an axiom, so ``ctx`` must be ``y:N``."""
    return ctx == TypeContext({y: n})


@lru_cache(maxsize=None)
def bounded_multitypes(max_items: int, max_size: int) -> tuple[MultiType, ...]:
    """All multi types with at most ``max_items`` elements and size at most ``max_size``,
    where every nested multi type obeys the same bounds."""
    linear: set[LinearType] = set()
    multis: set[MultiType] = {EMPTY}
    # grow until closed: sizes are bounded so this terminates
    while True:
        new_linear = {
            LinearType(m, n)
            for m in multis
            for n in multis
            if 1 + m.size + n.size <= max_size
        }
        new_multis = {EMPTY}
        pool = sorted(new_linear, key=lambda l: l._key)
        for k in range(1, max_items + 1):
            for combo in combinations_with_replacement(pool, k):
                m = MultiType(combo)
                if m.size <= max_size:
                    new_multis.add(m)
        if new_linear == linear and new_multis == multis:
            return tuple(sorted(multis, key=lambda m: m._key))
        linear, multis = new_linear, new_multis


Judgements = frozenset[tuple[TypeContext, MultiType]]


class _Search:
    def __init__(self, max_items: int, max_size: int):
        self.b = max_items
        self.s = max_size
        self.universe = bounded_multitypes(max_items, max_size)
        self.allowed = set(self.universe)
        self.memo: dict[Term, Judgements] = {}

    def ok_ctx(self, g: TypeContext) -> bool:
        return all(m in self.allowed for m in g.types)

    def judgements(self, t: Term) -> Judgements:
        hit = self.memo.get(t)
        if hit is not None:
            return hit
        out: set[tuple[TypeContext, MultiType]] = set()
        if isinstance(t, Variable):
            out = {(TypeContext({t.var: m}), m) for m in self.universe}
        elif isinstance(t, Application):
            args = self.judgements(t.arg)
            for g, m in self.judgements(t.fun):
                if len(m) != 1:
                    continue
                arrow = m.items[0]
                for d, a in args:
                    if a == arrow.left:
                        ctx = g + d
                        if self.ok_ctx(ctx):
                            out.add((ctx, arrow.right))
        else:
            body = sorted(self.judgements(t.body), key=lambda j: (str(j[0]), j[1]._key))
            x = t.var
            prem = [(g.remove(x), LinearType(g.get(x), n)) for g, n in body]
            out.add((EMPTY_CTX, EMPTY))
            for k in range(1, self.b + 1):
                for combo in combinations_with_replacement(prem, k):
                    m = MultiType(tuple(l for _, l in combo))
                    if m not in self.allowed:
                        continue
                    ctx = EMPTY_CTX
                    for g, _ in combo:
                        ctx = ctx + g
                    if self.ok_ctx(ctx):
                        out.add((ctx, m))
        frozen = frozenset(out)
        self.memo[t] = frozen
        return frozen


def bounded_derivable(
    ctx: TypeContext,
    t: Term,
    m: MultiType,
    max_items: int = DEFAULT_BOUND,
    max_size: int = DEFAULT_BOUND,
) -> bool:
    """Whether ``ctx |- t : m`` has a derivation in which every multi type has at
    most ``max_items`` elements and size at most ``max_size``.

    A negative answer only speaks about derivations within the bounds.
    """
    return (ctx, m) in _Search(max_items, max_size).judgements(t)


@dataclass
class CounterexampleReport:
    derivation: Derivation
    derivation_valid: bool
    size: int
    reduct_judgement_derivable: bool
    y_alone_derivable: bool
    bounded_search_found: bool
    split_reduct: Program
    split_derivation: Derivation
    split_valid: bool

    @property
    def plain_invariance_fails(self) -> bool:
        return self.derivation_valid and not self.reduct_judgement_derivable

    @property
    def split_invariance_holds(self) -> bool:
        return (
            self.split_valid
            and self.split_derivation.ctx == self.derivation.ctx
            and self.split_derivation.ty == self.derivation.ty
        )

    @property
    def ok(self) -> bool:
        return (
            self.plain_invariance_fails
            and self.y_alone_derivable
            and not self.bounded_search_found
            and self.split_invariance_holds
        )

    def render(self) -> str:
        yes = {True: "yes", False: "no"}
        return "\n".join([
            "derivation of x:[0 -o 0] |- (\\z.y) (x x) : 0",
            self.derivation.render(indent="  "),
            f"checker accepts: {yes[self.derivation_valid]}, size {self.size}",
            f"plain reduct y: x:[0 -o 0] |- y : 0 derivable: {yes[self.reduct_judgement_derivable]}",
            f"x:0, y:0 |- y : 0 derivable: {yes[self.y_alone_derivable]}",
            "x:0, y:0 |- (\\z.y) (x x) : 0 within bounds B = S = "
            f"{DEFAULT_BOUND}: {'found' if self.bounded_search_found else 'no derivation within bounds'}",
            f"split reduct {print_program(self.split_reduct)}:",
            self.split_derivation.render(indent="  "),
            f"plain invariance: {'FAILS' if self.plain_invariance_fails else 'holds'}",
            f"split invariance: {'HOLDS' if self.split_invariance_holds else 'fails'}",
        ])


def counterexample_derivation() -> Derivation:
    """``x:[0 -o 0] |- (\\z.y)(x x) : 0``, the instance ``M = N = 0`` of the general tree."""
    x, y, z = Var("x"), Var("y"), Var("z")
    xx = app_rule(ax(x, single(EMPTY, EMPTY)), ax(x, EMPTY))
    fun = lam_rule(z, Variable(y), [ax(y, EMPTY)])
    return app_rule(fun, xx)


def counterexample_demo(max_items: int = DEFAULT_BOUND, max_size: int = DEFAULT_BOUND) -> CounterexampleReport:
    pi = counterexample_derivation()
    x, y = Var("x"), Var("y")
    start = Program(pi.subject)
    reduct, split_d = subject_reduce(es_empty(pi), start)
    expected = parse_program("(y, [z'<-x x])")
    return CounterexampleReport(
        derivation=pi,
        derivation_valid=is_valid(pi),
        size=derivation_size(pi),
        reduct_judgement_derivable=variable_judgement_derivable(pi.ctx, y, pi.ty),
        y_alone_derivable=variable_judgement_derivable(TypeContext({x: EMPTY, y: EMPTY}), y, EMPTY),
        bounded_search_found=bounded_derivable(
            TypeContext({x: EMPTY, y: EMPTY}), parse_term("(\\z.y) (x x)"), EMPTY, max_items, max_size
        ),
        split_reduct=reduct,
        split_derivation=split_d,
        split_valid=is_valid(split_d) and alpha_eq_program(reduct, expected),
    )


__all__ = [
    "DEFAULT_BOUND",
    "variable_judgement_derivable",
    "bounded_multitypes",
    "bounded_derivable",
    "CounterexampleReport",
    "counterexample_derivation",
    "counterexample_demo",
]
