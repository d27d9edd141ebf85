"""Building and transforming type derivations.

Covers value derivations (empty, split, merge), typings of inert and normal
expressions, substitution and anti-substitution on derivations, and subject
reduction/expansion along split steps.  Every function returns a derivation
that :func:`check_derivation` accepts whenever its inputs are accepted.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .derivations import (
    Derivation,
    Rule,
    app_rule,
    ax,
    derivation_size,
    es_append,
    es_empty,
    lam_rule,
)
from .evaluation import (
    DEFAULT_FUEL,
    EvalTrace,
    StepKind,
    split_evaluate,
    split_step_detail,
)
from .multitypes import EMPTY, LinearType, MultiType, TypeContext, ctx_types_size, single
from .syntax import (
    Abstraction,
    Application,
    Expression,
    Program,
    Term,
    Var,
    Variable,
    alpha_eq,
    alpha_eq_program,
    free_vars,
    fresh,
    is_fireball,
    is_inert,
    is_value,
    program_size,
    spine,
    substitute,
)


class NotNormal(ValueError):
    pass


class NoRedex(ValueError):
    pass


class StepMismatch(ValueError):
    pass


# --- values -----------------------------------------------------------------

def empty_value_derivation(v: Term) -> Derivation:
    """``|- v : 0`` with empty context and no @ rules."""
    if isinstance(v, Variable):
        return ax(v.var, EMPTY)
    if isinstance(v, Abstraction):
        return lam_rule(v.var, v.body, ())
    raise ValueError("not a value")


def _premise_arrow(x: Var, p: Derivation) -> LinearType:
    return LinearType(p.ctx.get(x), p.ty)


def split_value_derivation(
    pi: Derivation, n: MultiType, o: MultiType
) -> tuple[Derivation, Derivation]:
    """Split a value derivation of ``N + O`` into derivations of ``N`` and ``O``."""
    if pi.ty != n + o:
        raise ValueError(f"{pi.ty} is not {n} + {o}")
    if pi.rule is Rule.AX:
        x = pi.subject.var
        return ax(x, n), ax(x, o)
    if pi.rule is not Rule.LAM:
        raise ValueError("not a value derivation")
    lam = pi.subject
    left: list[Derivation] = []
    used = [False] * len(pi.premises)
    for want in n:
        for k, p in enumerate(pi.premises):
            if not used[k] and _premise_arrow(lam.var, p) == want:
                used[k] = True
                left.append(p)
                break
    right = [p for k, p in enumerate(pi.premises) if not used[k]]
    return lam_rule(lam.var, lam.body, left), lam_rule(lam.var, lam.body, right)


def rename_derivation(pi: Derivation, y: Var, z: Var) -> Derivation:
    """Rename the free variable ``y`` to ``z`` (not free in the subject) throughout ``pi``."""
    if y == z:
        return pi
    return substitute_derivation(pi, y, ax(z, pi.ctx.get(y)))


def merge_value_derivations(sigma: Derivation, rho: Derivation) -> Derivation:
    """Derivation of the sum of both types for one value; sizes add up."""
    s, r = sigma.subject, rho.subject
    if isinstance(s, Program) or isinstance(r, Program) or not alpha_eq(s, r) or not is_value(s):
        raise ValueError("merge needs two derivations of the same value")
    if isinstance(s, Variable):
        return ax(s.var, sigma.ty + rho.ty)
    return lam_rule(s.var, s.body, sigma.premises + _rebind(rho, s).premises)


def _rebind(pi: Derivation, target: Abstraction) -> Derivation:
    """Re-express a λ derivation over the α-variant ``target`` of its subject."""
    src = pi.subject
    if src.var == target.var:
        return lam_rule(target.var, target.body, pi.premises)
    premises = [rename_derivation(p, src.var, target.var) for p in pi.premises]
    return lam_rule(target.var, target.body, premises)


# --- inert and normal expressions ----------------------------------------------

def _zero_argument(f: Term) -> Derivation:
    return empty_value_derivation(f) if is_value(f) else type_inert(f, EMPTY)


def type_inert_any(
    i: Term, n: MultiType, arg_types: Optional[Sequence[MultiType]] = None
) -> Derivation:
    """Derivation of ``i : N``: head typed with an arrow stack ending in ``N``.

    Arguments get type 0 unless ``arg_types`` says otherwise; a non-0 type is
    only supported for variable and inert arguments.
    """
    if not is_inert(i):
        raise ValueError("not an inert term")
    head, args = spine(i)
    if arg_types is None:
        arg_types = [EMPTY] * len(args)
    if len(arg_types) != len(args):
        raise ValueError("one type per argument expected")
    arg_ds = []
    for f, m in zip(args, arg_types):
        if m.is_empty:
            arg_ds.append(_zero_argument(f))
        elif isinstance(f, Variable):
            arg_ds.append(ax(f.var, m))
        elif is_inert(f):
            arg_ds.append(type_inert_any(f, m))
        else:
            raise ValueError("non-0 argument types are supported for variables and inert terms only")
    head_ty = n
    for m in reversed(arg_types):
        head_ty = single(m, head_ty)
    d = ax(head.var, head_ty)
    for a in arg_ds:
        d = app_rule(d, a)
    return d


def type_inert(i: Term, m: MultiType) -> Derivation:
    """Inert derivation of the inert term ``i`` at the inert multi type ``M``."""
    if not m.is_inert():
        raise ValueError(f"{m} is not an inert multi type")
    return type_inert_any(i, m)


def type_normal_tight(e: Expression) -> Derivation:
    """Tight derivation (inert context, type 0) of a normal term or program."""
    if isinstance(e, Program):
        if not is_fireball(e.term):
            raise NotNormal("program term is not a fireball")
        d = es_empty(type_normal_tight(e.term))
        for x, i in e.env:
            d = es_append(d, x, type_inert(i, d.ctx.get(x)))
        return d
    if is_value(e):
        return empty_value_derivation(e)
    if is_inert(e):
        return type_inert(e, EMPTY)
    raise NotNormal("term is not a fireball")


def type_normal_any(e: Expression, target: MultiType) -> Derivation:
    """A derivation of a normal expression at ``target``, generally not tight.

    The term is typed at ``target`` (values other than variables only at 0) and
    each entry at whatever its binder demands.
    """
    if isinstance(e, Program):
        d = es_empty(type_normal_any(e.term, target))
        for x, i in e.env:
            d = es_append(d, x, type_inert_any(i, d.ctx.get(x)))
        return d
    if isinstance(e, Variable):
        return ax(e.var, target)
    if isinstance(e, Abstraction):
        if not target.is_empty:
            raise ValueError("abstractions are only typed at 0 here")
        return empty_value_derivation(e)
    if is_inert(e):
        return type_inert_any(e, target)
    raise NotNormal("term is not a fireball")


# --- substitution ---------------------------------------------------------------

def substitute_derivation(pi: Derivation, x: Var, sigma: Derivation) -> Derivation:
    """From ``Γ, x:N |- t : M`` and ``Δ |- v : N`` build ``Γ+Δ |- t{x<-v} : M``."""
    t = pi.subject
    if isinstance(t, Program):
        raise ValueError("substitution acts on term derivations")
    if sigma.ty != pi.ctx.get(x):
        raise ValueError(f"{x} has type {pi.ctx.get(x)} but the value has type {sigma.ty}")
    return _subst_d(pi, x, sigma, free_vars(sigma.subject))


def _subst_d(pi: Derivation, x: Var, sigma: Derivation, fvv: frozenset[Var]) -> Derivation:
    t = pi.subject
    if x not in free_vars(t):
        return pi
    if pi.rule is Rule.AX:
        return sigma
    if pi.rule is Rule.APP:
        left, right = pi.premises
        s1, s2 = split_value_derivation(sigma, left.ctx.get(x), right.ctx.get(x))
        return app_rule(_subst_d(left, x, s1, fvv), _subst_d(right, x, s2, fvv))
    # λ: rename the binder away from the value's free variables first
    y, body, premises = t.var, t.body, list(pi.premises)
    if y in fvv:
        z = fresh(y, fvv | free_vars(body) | {x})
        premises = [rename_derivation(p, y, z) for p in premises]
        body = substitute(body, y, Variable(z))
        y = z
    out = []
    rest = sigma
    for p in premises:
        part, rest = split_value_derivation(rest, p.ctx.get(x), rest.ty.minus(p.ctx.get(x)))
        out.append(_subst_d(p, x, part, fvv))
    return lam_rule(y, substitute(body, x, sigma.subject), out)


def anti_substitute_derivation(
    pi: Derivation, t: Term, x: Var, v: Term
) -> tuple[Derivation, Derivation]:
    """Split ``Γ |- t{x<-v} : M`` into ``Δ, x:N |- t : M`` and ``Π |- v : N``."""
    if not is_value(v):
        raise ValueError("anti-substitution needs a value")
    if isinstance(pi.subject, Program) or not alpha_eq(pi.subject, substitute(t, x, v)):
        raise ValueError("derivation subject is not t{x<-v}")
    sigma, rho = _anti(pi, t, x, v)
    if isinstance(v, Abstraction) and rho.subject != v:
        rho = _rebind(rho, v)
    return sigma, rho


def _anti(pi: Derivation, t: Term, x: Var, v: Term) -> tuple[Derivation, Derivation]:
    if isinstance(t, Variable) and t.var == x:
        return ax(x, pi.ty), pi
    if x not in free_vars(t):
        return pi, empty_value_derivation(v)
    if isinstance(t, Application):
        left, right = pi.premises
        s1, r1 = _anti(left, t.fun, x, v)
        s2, r2 = _anti(right, t.arg, x, v)
        return app_rule(s1, s2), merge_value_derivations(r1, r2)
    y, body = t.var, t.body
    if y in free_vars(v):
        z = fresh(y, free_vars(v) | free_vars(body) | {x})
        body = substitute(body, y, Variable(z))
        y = z
    w = pi.subject.var
    sigmas, rho = [], empty_value_derivation(v)
    for p in pi.premises:
        s, r = _anti(rename_derivation(p, w, y), body, x, v)
        sigmas.append(s)
        rho = merge_value_derivations(rho, r)
    return lam_rule(y, body, sigmas), rho


# --- subject reduction and expansion -----------------------------------------------

def program_parts(d: Derivation) -> tuple[Derivation, list[tuple[Var, Derivation]]]:
    """The term derivation and the entry derivations, newest entry first."""
    entries: list[tuple[Var, Derivation]] = []
    while d.rule is Rule.ES_APPEND:
        entries.append((d.entry, d.premises[1]))
        d = d.premises[0]
    if d.rule is not Rule.ES_EMPTY:
        raise ValueError("not a program derivation")
    entries.reverse()
    return d.premises[0], entries


def assemble_program(term_d: Derivation, entries: Sequence[tuple[Var, Derivation]]) -> Derivation:
    """Stack ``es_empty`` and one ``es_append`` per entry, given newest first."""
    d = es_empty(term_d)
    for x, e in entries:
        d = es_append(d, x, e)
    return d


def _reduce_term(d: Derivation, kind: StepKind, z: Var | None):
    """Mirror the evaluator's redex choice on a term derivation.

    Returns the new term derivation and, for βi, the detached argument derivation.
    """
    t = d.subject
    left, right = d.premises
    if not is_fireball(t.arg):
        new, det = _reduce_term(right, kind, z)
        return app_rule(left, new), det
    if isinstance(t.fun, Abstraction):
        (body_d,) = left.premises
        binder = t.fun.var
        if kind is StepKind.BETA_V:
            return substitute_derivation(body_d, binder, right), None
        return rename_derivation(body_d, binder, z), right
    new, det = _reduce_term(left, kind, z)
    return app_rule(new, right), det


def redex_node(d: Derivation) -> Optional[tuple[Derivation, tuple[int, ...]]]:
    """The @ node of a term derivation at the evaluation position, and its premise path."""
    path: list[int] = []
    while d.rule is Rule.APP:
        t = d.subject
        if not is_fireball(t.arg):
            d = d.premises[1]
            path.append(1)
        elif isinstance(t.fun, Abstraction):
            return d, tuple(path)
        else:
            d = d.premises[0]
            path.append(0)
    return None


def subject_reduce(pi: Derivation, p: Program) -> tuple[Program, Derivation]:
    """Follow one split step with a derivation that has one @ rule fewer."""
    step = split_step_detail(p)
    if step is None:
        raise NoRedex("program is normal")
    q, kind, _ = step
    term_d, entries = program_parts(pi)
    z = q.env[0][0] if kind is StepKind.BETA_I else None
    new_term, detached = _reduce_term(term_d, kind, z)
    if detached is not None:
        entries = [(z, detached)] + entries
    return q, assemble_program(new_term, entries)


def _expand_term(t: Term, d: Derivation, kind: StepKind, z: Var | None, arg_d: Derivation | None) -> Derivation:
    if not is_fireball(t.arg):
        left, right = d.premises
        return app_rule(left, _expand_term(t.arg, right, kind, z, arg_d))
    if isinstance(t.fun, Abstraction):
        f = t.fun
        if kind is StepKind.BETA_V:
            sigma, rho = anti_substitute_derivation(d, f.body, f.var, t.arg)
            return app_rule(lam_rule(f.var, f.body, [sigma]), rho)
        return app_rule(lam_rule(f.var, f.body, [rename_derivation(d, z, f.var)]), arg_d)
    left, right = d.premises
    return app_rule(_expand_term(t.fun, left, kind, z, arg_d), right)


def subject_expand(pi2: Derivation, p: Program, p2: Program) -> Derivation:
    """Derivation of ``p`` from one of its split reduct ``p2``, one @ rule larger."""
    step = split_step_detail(p)
    if step is None or not alpha_eq_program(step[0], p2):
        raise StepMismatch("the first program does not step to the second")
    kind = step[1]
    term_d, entries = program_parts(pi2)
    z, arg_d = None, None
    if kind is StepKind.BETA_I:
        (z, arg_d), entries = entries[0], entries[1:]
    d = _expand_term(p.term, term_d, kind, z, arg_d)
    return assemble_program(d, entries)


# --- the completeness pipeline -------------------------------------------------------

@dataclass
class TypedTrace:
    programs: list[Program]
    derivations: list[Derivation]
    kinds: list[StepKind]

    @property
    def derivation(self) -> Derivation:
        return self.derivations[0]

    @property
    def ctx(self) -> TypeContext:
        return self.derivations[0].ctx

    @property
    def ty(self) -> MultiType:
        return self.derivations[0].ty

    @property
    def steps(self) -> int:
        return len(self.kinds)

    @property
    def normal_form(self) -> Program:
        return self.programs[-1]

    @property
    def size(self) -> int:
        return derivation_size(self.derivations[0])

    def equalities(self) -> tuple[bool, bool]:
        """``|π| = |d| + |q|`` and ``|π| = |d| + |Ty(Γ)|``."""
        d = self.steps
        return (
            self.size == d + program_size(self.normal_form),
            self.size == d + ctx_types_size(self.ctx),
        )


@dataclass
class Diverged:
    trace: EvalTrace[Program]

    @property
    def steps(self) -> int:
        return len(self.trace)


def type_program(
    p: Program, fuel: int = DEFAULT_FUEL, trace: EvalTrace[Program] | None = None
) -> TypedTrace | Diverged:
    """Evaluate ``p`` and, if it normalizes, type it tightly by expanding backwards.

    A precomputed split trace of ``p`` may be passed to skip evaluation.
    """
    if trace is None:
        trace = split_evaluate(p, fuel)
    if not trace.normal:
        return Diverged(trace)
    progs = trace.expressions
    ds = [type_normal_tight(progs[-1])]
    for k in range(len(progs) - 2, -1, -1):
        ds.append(subject_expand(ds[-1], progs[k], progs[k + 1]))
    ds.reverse()
    return TypedTrace(progs, ds, trace.kinds)


@dataclass
class CorrectnessReport:
    steps: int
    normal_size: int
    derivation_size: int
    normalized: bool
    inequality: bool
    tight: bool
    equality: Optional[bool]
    coerced_value: bool
    fuel_bug: bool

    def render(self) -> str:
        eq = "n/a (not tight)" if self.equality is None else ("holds" if self.equality else "FAILS")
        return "\n".join([
            f"|d| = {self.steps}, |q| = {self.normal_size}, |π| = {self.derivation_size}",
            f"|d| + |q| <= |π|: {'holds' if self.inequality else 'FAILS'}",
            f"|π| = |d| + |q|: {eq}",
            f"coerced value: {self.coerced_value}",
        ])


def is_tight(d: Derivation) -> bool:
    return d.ctx.is_inert() and d.ty.is_empty


def correctness_report(pi: Derivation, p: Program, fuel: int = DEFAULT_FUEL) -> CorrectnessReport:
    if not isinstance(pi.subject, Program) or not alpha_eq_program(pi.subject, p):
        raise ValueError("derivation does not type the program")
    size = derivation_size(pi)
    budget = min(fuel, size)
    trace = split_evaluate(p, budget)
    q = trace.final
    tight = is_tight(pi)
    d, qs = len(trace), program_size(q)
    return CorrectnessReport(
        steps=d,
        normal_size=qs,
        derivation_size=size,
        normalized=trace.normal,
        inequality=trace.normal and d + qs <= size,
        tight=tight,
        equality=(d + qs == size) if tight else None,
        coerced_value=tight and not pi.ctx and not q.env and is_value(q.term),
        fuel_bug=not trace.normal and budget >= size,
    )


__all__ = [
    "NotNormal",
    "NoRedex",
    "StepMismatch",
    "empty_value_derivation",
    "split_value_derivation",
    "merge_value_derivations",
    "rename_derivation",
    "type_inert",
    "type_inert_any",
    "type_normal_tight",
    "type_normal_any",
    "redex_node",
    "substitute_derivation",
    "anti_substitute_derivation",
    "program_parts",
    "assemble_program",
    "subject_reduce",
    "subject_expand",
    "TypedTrace",
    "Diverged",
    "type_program",
    "CorrectnessReport",
    "correctness_report",
    "is_tight",
]
