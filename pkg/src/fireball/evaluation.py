"""Right-to-left weak evaluation for the plain and the split fireball calculi.

Single steps (:func:`plain_step`, :func:`split_step`) follow the definition
directly.  Whole runs use a zipper machine instead: the evaluation context is
kept as a persistent stack of frames, so a step costs the size of the redex
and its reduct rather than the depth of the redex in the term.  Intermediate
terms are rebuilt only when someone asks for them.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Generic, Optional, TypeVar

from .syntax import (
    Abstraction,
    Application,
    Program,
    Term,
    Var,
    Variable,
    _merge_max,
    alpha_eq,
    alpha_eq_program,
    free_vars,
    is_fireball,
    is_inert,
    max_indices,
    print_expression,
    program_max_indices,
    program_vars,
    rename_binder,
    substitute,
    substitute_many,
)

DEFAULT_FUEL = 10_000


class StepKind(enum.Enum):
    BETA_V = "βv"
    BETA_I = "βi"

    def __str__(self) -> str:
        return self.value


class Outcome(enum.Enum):
    NORMAL = "normal"
    FUEL_EXHAUSTED = "fuel exhausted"


def _kind(arg: Term) -> StepKind:
    # a fireball argument is inert exactly when it is an application
    return StepKind.BETA_I if isinstance(arg, Application) else StepKind.BETA_V


# --- single steps -------------------------------------------------------------

def plain_step(t: Term) -> Optional[tuple[Term, StepKind]]:
    """One step of the right-to-left strategy; ``None`` iff ``t`` is a fireball."""
    if is_fireball(t):
        return None
    r = plain_step(t.arg)
    if r is not None:
        return Application(t.fun, r[0]), r[1]
    if isinstance(t.fun, Abstraction):
        return substitute(t.fun.body, t.fun.var, t.arg), _kind(t.arg)
    r = plain_step(t.fun)
    if r is not None:
        return Application(r[0], t.arg), r[1]
    return None


def fresh_binder(x: Var, mx: dict[str, int]) -> Var:
    """``x`` with an index one above every index of its name in ``mx``."""
    return Var(x.name, max(mx.get(x.name, -1), x.index) + 1)


@dataclass(frozen=True)
class _Redex:
    reduct: Term
    kind: StepKind
    binder: Var
    arg: Term


def _split_redex(t: Term, mx: dict[str, int]) -> Optional[_Redex]:
    if not isinstance(t, Application) or is_fireball(t):
        return None
    if not is_fireball(t.arg):
        r = _split_redex(t.arg, mx)
        return _Redex(Application(t.fun, r.reduct), r.kind, r.binder, r.arg)
    if isinstance(t.fun, Abstraction):
        f = t.fun
        if isinstance(t.arg, Application):
            z = fresh_binder(f.var, mx)
            return _Redex(rename_binder(f, z).body, StepKind.BETA_I, z, t.arg)
        return _Redex(substitute(f.body, f.var, t.arg), StepKind.BETA_V, f.var, t.arg)
    r = _split_redex(t.fun, mx)
    return _Redex(Application(r.reduct, t.arg), r.kind, r.binder, r.arg)


def split_step_detail(p: Program) -> Optional[tuple[Program, StepKind, Term]]:
    """Like :func:`split_step`, also returning the fired argument."""
    if is_fireball(p.term):
        return None
    r = _split_redex(p.term, program_max_indices(p))
    if r.kind is StepKind.BETA_I:
        nxt = Program.unchecked(r.reduct, ((r.binder, r.arg),) + p.env)
    else:
        nxt = Program.unchecked(r.reduct, p.env)
    return nxt, r.kind, r.arg


def split_step(p: Program) -> Optional[tuple[Program, StepKind]]:
    """One step of the split calculus; a βi step moves the argument to a fresh head entry.

    The fresh variable keeps the binder's name, with an index one above any
    index of that name in the program.
    """
    r = split_step_detail(p)
    return None if r is None else (r[0], r[1])


def projected_kind(p: Program, kind: StepKind, arg: Term) -> StepKind:
    """The kind of the plain step that a split step projects to.

    A βv step whose argument is an environment variable becomes βi once the
    environment is unfolded, since the variable stands for an inert term.
    """
    if kind is StepKind.BETA_V and isinstance(arg, Variable) and arg.var in p.bound_vars:
        return StepKind.BETA_I
    return kind


def unfold(p: Program) -> Term:
    """Substitute the environment into the term, newest entry first."""
    return substitute_many(p.term, unfolding_map(p.env))


def unfolding_map(env) -> dict[Var, Term]:
    """Each environment variable mapped to its fully unfolded entry."""
    sigma: dict[Var, Term] = {}
    for x, i in reversed(env):
        sigma[x] = substitute_many(i, sigma)
    return sigma


# --- zipper machine ---------------------------------------------------------------

class _Frame:
    """One layer of an evaluation context: ``sibling <hole>`` or ``<hole> sibling``."""

    __slots__ = ("in_arg", "sibling", "parent", "_mx")

    def __init__(self, in_arg: bool, sibling: Term, parent: "_Frame | None"):
        self.in_arg = in_arg
        self.sibling = sibling
        self.parent = parent
        self._mx = None


def _frames_mx(k: _Frame | None) -> dict[str, int]:
    pending = []
    while k is not None and k._mx is None:
        pending.append(k)
        k = k.parent
    mx = {} if k is None else k._mx
    for f in reversed(pending):
        mx = _merge_max(mx, max_indices(f.sibling))
        f._mx = mx
    return mx


def _plug(t: Term, k: _Frame | None) -> Term:
    while k is not None:
        t = Application(k.sibling, t) if k.in_arg else Application(t, k.sibling)
        k = k.parent
    return t


def _seek(t: Term, k: _Frame | None) -> tuple[Term, _Frame | None]:
    """Move to the next redex: returns it with its context, or the normal term with ``None``."""
    while True:
        if is_fireball(t):
            while True:
                if k is None:
                    return t, None
                if k.in_arg:
                    fun = k.sibling
                    u = Application(fun, t)
                    k = k.parent
                    if isinstance(fun, Abstraction):
                        return u, k
                    if is_fireball(fun):
                        t = u
                        continue
                    k = _Frame(False, t, k)
                    t = fun
                    break
                u = Application(t, k.sibling)
                k = k.parent
                if isinstance(t, Abstraction):
                    return u, k
                t = u
            continue
        if not is_fireball(t.arg):
            k = _Frame(True, t.fun, k)
            t = t.arg
        elif isinstance(t.fun, Abstraction):
            return t, k
        else:
            k = _Frame(False, t.arg, k)
            t = t.fun


@dataclass(frozen=True)
class _State:
    focus: Term
    frames: _Frame | None
    env: tuple = ()

    @property
    def normal(self) -> bool:
        return self.frames is None and is_fireball(self.focus)


E = TypeVar("E", Term, Program)


@dataclass
class EvalTrace(Generic[E]):
    """A run of one of the machines; expressions are materialized on demand."""

    start: E
    kinds: list[StepKind]
    outcome: Outcome
    states: list[_State] = field(repr=False)
    materialize: Callable[[_State], E] = field(repr=False)
    # split runs only: the kinds of the plain steps they project to
    projected: Optional[list[StepKind]] = None
    _cache: dict = field(default_factory=dict, repr=False)

    def expression(self, k: int) -> E:
        if k == 0:
            return self.start
        if k not in self._cache:
            self._cache[k] = self.materialize(self.states[k])
        return self._cache[k]

    @property
    def final(self) -> E:
        return self.expression(len(self.kinds))

    @property
    def expressions(self) -> list[E]:
        return [self.expression(k) for k in range(len(self.kinds) + 1)]

    @property
    def steps(self) -> list[tuple[E, StepKind]]:
        return [(self.expression(k + 1), kind) for k, kind in enumerate(self.kinds)]

    def __len__(self) -> int:
        return len(self.kinds)

    @property
    def normal(self) -> bool:
        return self.outcome is Outcome.NORMAL

    def render(self) -> str:
        lines = [f"0: {print_expression(self.start)}"]
        for k, kind in enumerate(self.kinds, 1):
            lines.append(f"{k}: {print_expression(self.expression(k))}  [{kind}]")
        if self.normal:
            lines.append(f"normal form after {len(self)} step(s): {print_expression(self.final)}")
        else:
            lines.append(f"fuel exhausted after {len(self)} step(s)")
        return "\n".join(lines)


def _check_fuel(fuel: int) -> None:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")


def plain_evaluate(t: Term, fuel: int = DEFAULT_FUEL) -> EvalTrace[Term]:
    _check_fuel(fuel)
    state = _State(*_seek(t, None))
    states, kinds = [state], []
    for _ in range(fuel):
        if state.normal:
            break
        redex = state.focus
        lam, arg = redex.fun, redex.arg
        reduct = substitute(lam.body, lam.var, arg)
        kinds.append(_kind(arg))
        state = _State(*_seek(reduct, state.frames))
        states.append(state)
    outcome = Outcome.NORMAL if state.normal else Outcome.FUEL_EXHAUSTED
    return EvalTrace(t, kinds, outcome, states, lambda s: _plug(s.focus, s.frames))


def split_evaluate(p: Program, fuel: int = DEFAULT_FUEL) -> EvalTrace[Program]:
    _check_fuel(fuel)
    env = p.env
    env_mx: dict[str, int] = {}
    for x, i in env:
        env_mx = _merge_max(_merge_max(env_mx, max_indices(i)), {x.name: x.index})
    bound = {x for x, _ in env}
    state = _State(*_seek(p.term, None), env)
    states, kinds, projected = [state], [], []
    for _ in range(fuel):
        if state.normal:
            break
        redex = state.focus
        lam, arg = redex.fun, redex.arg
        if isinstance(arg, Application):
            mx = _merge_max(_merge_max(max_indices(redex), _frames_mx(state.frames)), env_mx)
            z = fresh_binder(lam.var, mx)
            reduct = rename_binder(lam, z).body
            env = ((z, arg),) + env
            env_mx = _merge_max(_merge_max(env_mx, max_indices(arg)), {z.name: z.index})
            bound.add(z)
            kinds.append(StepKind.BETA_I)
            projected.append(StepKind.BETA_I)
        else:
            reduct = substitute(lam.body, lam.var, arg)
            kinds.append(StepKind.BETA_V)
            env_var = isinstance(arg, Variable) and arg.var in bound
            projected.append(StepKind.BETA_I if env_var else StepKind.BETA_V)
        state = _State(*_seek(reduct, state.frames), env)
        states.append(state)
    outcome = Outcome.NORMAL if state.normal else Outcome.FUEL_EXHAUSTED
    return EvalTrace(
        p, kinds, outcome, states,
        lambda s: Program.unchecked(_plug(s.focus, s.frames), s.env),
        projected,
    )


def commute_inert_subst_check(t: Term, x: Var, i: Term) -> bool:
    """One-step commutation of evaluation with the substitution ``{x<-i}``."""
    if not is_inert(i):
        raise ValueError("substituted term must be inert")
    before = plain_step(t)
    after = plain_step(substitute(t, x, i))
    if before is None:
        return after is None
    if after is None:
        return False
    return alpha_eq(after[0], substitute(before[0], x, i))


# --- bisimulation ----------------------------------------------------------------

@dataclass
class BisimulationReport:
    split_len: int
    plain_len: int
    pointwise_match: bool
    kinds_match: bool
    split_trace: EvalTrace[Program]
    plain_trace: EvalTrace[Term]
    rows: list[bool]

    @property
    def ok(self) -> bool:
        return self.pointwise_match and self.kinds_match

    def render(self) -> str:
        split = self.split_trace.expressions
        plain = self.plain_trace.expressions
        width = max((len(print_expression(e)) for e in split), default=0)
        lines = []
        for k in range(max(len(split), len(plain))):
            left = print_expression(split[k]) if k < len(split) else "-"
            right = print_expression(plain[k]) if k < len(plain) else "-"
            mark = "=" if k < len(self.rows) and self.rows[k] else "X"
            lines.append(f"{k}: {left:<{width}}  {mark}  {right}")
        lines.append(
            f"split steps = {self.split_len}, plain steps = {self.plain_len}, "
            f"pointwise match = {self.pointwise_match}, kinds match = {self.kinds_match}"
        )
        return "\n".join(lines)


class _Unfolder:
    """Applies the unfolding of a split run's final environment, memoized per node.

    Environment variables are fresh when introduced, so the final environment
    unfolds every state of the run correctly.
    """

    def __init__(self, env):
        self.sigma = unfolding_map(env)
        self.memo: dict[int, tuple[Term, Term]] = {}

    def __call__(self, t: Term) -> Term:
        hit = self.memo.get(id(t))
        if hit is not None:
            return hit[1]
        out = substitute_many(t, self.sigma) if free_vars(t) & self.sigma.keys() else t
        self.memo[id(t)] = (t, out)
        return out


def bisimulation_check(
    p: Program,
    fuel: int = DEFAULT_FUEL,
    split_trace: EvalTrace[Program] | None = None,
    plain_trace: EvalTrace[Term] | None = None,
) -> BisimulationReport:
    """Compare split evaluation of ``p`` with plain evaluation of its unfolding, step by step.

    A row compares the unfolded split state with the plain state.  States are
    compared redex-and-context-wise: frames already matched at an earlier step
    are not compared again.
    """
    if split_trace is None:
        split_trace = split_evaluate(p, fuel)
    if plain_trace is None:
        plain_trace = plain_evaluate(unfold(p), fuel)
    sigma = _Unfolder(split_trace.states[-1].env)
    known: dict[tuple[int, int], tuple[_Frame, _Frame]] = {}

    def frames_match(a: _Frame | None, b: _Frame | None) -> bool:
        pending = []
        while True:
            if a is None or b is None:
                ok = a is None and b is None
                break
            if (id(a), id(b)) in known:
                ok = True
                break
            if a.in_arg != b.in_arg or not alpha_eq(a.sibling, sigma(b.sibling)):
                return False
            pending.append((a, b))
            a, b = a.parent, b.parent
        if ok:
            for pair in pending:
                known[(id(pair[0]), id(pair[1]))] = pair
        return ok

    rows = []
    for s, q in zip(split_trace.states, plain_trace.states):
        if s.normal != q.normal:
            rows.append(False)
        elif s.normal:
            rows.append(alpha_eq(q.focus, sigma(s.focus)))
        else:
            rows.append(alpha_eq(q.focus, sigma(s.focus)) and frames_match(q.frames, s.frames))
    same_len = len(split_trace) == len(plain_trace) and split_trace.outcome == plain_trace.outcome
    return BisimulationReport(
        split_len=len(split_trace),
        plain_len=len(plain_trace),
        pointwise_match=same_len and all(rows),
        kinds_match=same_len and split_trace.projected == plain_trace.kinds,
        split_trace=split_trace,
        plain_trace=plain_trace,
        rows=rows,
    )


def env_compositionality_check(p: Program, x: Var, i: Term) -> bool:
    """Appending ``[x<-i]`` at the tail neither blocks nor alters a step."""
    if not is_inert(i):
        raise ValueError("appended term must be inert")
    if x in program_vars(p):
        raise ValueError(f"{x} is not fresh for the program")
    extended = p.append(x, i)
    before = split_step(p)
    after = split_step(extended)
    if before is None:
        return after is None
    if after is None or after[1] is not before[1]:
        return False
    q, _ = before
    expected = Program.unchecked(q.term, q.env + ((x, i),))
    return alpha_eq_program(after[0], expected)


__all__ = [
    "DEFAULT_FUEL",
    "StepKind",
    "Outcome",
    "EvalTrace",
    "plain_step",
    "plain_evaluate",
    "commute_inert_subst_check",
    "fresh_binder",
    "split_step",
    "split_step_detail",
    "split_evaluate",
    "unfold",
    "unfolding_map",
    "BisimulationReport",
    "bisimulation_check",
    "env_compositionality_check",
    "projected_kind",
]
