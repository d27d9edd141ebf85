"""Type derivations for terms and programs, a rule-by-rule checker, and a JSON format."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from importlib import resources
from typing import Iterator, Sequence

import jsonschema

from .multitypes import (
    EMPTY,
    EMPTY_CTX,
    LinearType,
    MultiType,
    TypeContext,
    parse_multitype,
)
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
    expression_free_vars,
    is_inert,
    parse_expression,
    print_expression,
)


class Rule(enum.Enum):
    AX = "ax"
    APP = "app"
    LAM = "lam"
    ES_EMPTY = "es_empty"
    ES_APPEND = "es_append"


@dataclass(frozen=True)
class Judgement:
    ctx: TypeContext
    subject: Expression
    ty: MultiType

    def __str__(self) -> str:
        ctx = str(self.ctx)
        return f"{ctx + ' ' if ctx else ''}|- {print_expression(self.subject)} : {self.ty}"


@dataclass(frozen=True)
class Derivation:
    rule: Rule
    judgement: Judgement
    premises: tuple["Derivation", ...] = ()
    # es_append only: the binder of the tail entry this node introduces
    entry: Var | None = None

    @property
    def ctx(self) -> TypeContext:
        return self.judgement.ctx

    @property
    def subject(self) -> Expression:
        return self.judgement.subject

    @property
    def ty(self) -> MultiType:
        return self.judgement.ty

    def nodes(self) -> Iterator["Derivation"]:
        stack = [self]
        while stack:
            d = stack.pop()
            yield d
            stack.extend(reversed(d.premises))

    def with_subject(self, subject: Expression) -> "Derivation":
        return replace(self, judgement=replace(self.judgement, subject=subject))

    def render(self, indent: str = "  ") -> str:
        lines: list[str] = []
        stack: list[tuple[Derivation, int]] = [(self, 0)]
        while stack:
            d, depth = stack.pop()
            tag = d.rule.value if d.entry is None else f"{d.rule.value}[{d.entry}]"
            lines.append(f"{indent * depth}{tag}  {d.judgement}")
            stack.extend((p, depth + 1) for p in reversed(d.premises))
        return "\n".join(lines)


def derivation_size(d: Derivation) -> int:
    """Number of application rules."""
    return sum(1 for n in d.nodes() if n.rule is Rule.APP)


# --- builders -----------------------------------------------------------------
# Builders compute the conclusion mechanically; validity is the checker's job.

def ax(x: Var, m: MultiType = EMPTY) -> Derivation:
    return Derivation(Rule.AX, Judgement(TypeContext({x: m}), Variable(x), m))


def app_rule(left: Derivation, right: Derivation) -> Derivation:
    if len(left.ty) != 1:
        raise ValueError(f"application needs a singleton arrow type, got {left.ty}")
    result = left.ty.items[0].right
    subject = Application(left.subject, right.subject)
    return Derivation(Rule.APP, Judgement(left.ctx + right.ctx, subject, result), (left, right))


def lam_rule(x: Var, body: Term, premises: Sequence[Derivation] = ()) -> Derivation:
    ctx = EMPTY_CTX
    arrows = []
    for p in premises:
        arrows.append(LinearType(p.ctx.get(x), p.ty))
        ctx = ctx + p.ctx.remove(x)
    subject = Abstraction(x, body)
    return Derivation(Rule.LAM, Judgement(ctx, subject, MultiType(tuple(arrows))), tuple(premises))


def es_empty(d: Derivation) -> Derivation:
    return Derivation(Rule.ES_EMPTY, Judgement(d.ctx, Program(d.subject, ()), d.ty), (d,))


def es_append(body: Derivation, x: Var, entry: Derivation) -> Derivation:
    """Type ``(t, E @ [x<-i])`` from ``(t, E)`` and ``i``."""
    prog = body.subject
    assert isinstance(prog, Program)
    subject = Program.unchecked(prog.term, prog.env + ((x, entry.subject),))
    ctx = body.ctx.remove(x) + entry.ctx
    return Derivation(Rule.ES_APPEND, Judgement(ctx, subject, body.ty), (body, entry), entry=x)


# --- checker ------------------------------------------------------------------

class Violation(enum.Enum):
    ARITY = "wrong number of premises"
    SUBJECT_SHAPE = "subject does not match the rule"
    AX_JUDGEMENT = "axiom must be x:M |- x : M"
    NON_SINGLETON_ARROW = "left premise of @ must have a singleton arrow type"
    ARGUMENT_TYPE = "argument type does not match the arrow's source"
    RESULT_TYPE = "conclusion type does not match"
    CONTEXT = "conclusion context is not the sum of the premises' contexts"
    PREMISE_SUBJECT = "premise subject does not match the conclusion"
    ENTRY = "es_append entry does not name the tail of the environment"
    NOT_INERT = "environment entry is not an inert term"
    ENTRY_TYPE = "entry type does not match the binder's type in the body"


class CheckError(Exception):
    def __init__(self, path: Sequence[int], reason: Violation, detail: str = ""):
        self.path = list(path)
        self.reason = reason
        self.detail = detail
        where = "root" if not self.path else "premise path " + ".".join(map(str, self.path))
        super().__init__(f"{where}: {reason.value}{': ' + detail if detail else ''}")


_ARITY = {Rule.AX: 0, Rule.APP: 2, Rule.ES_EMPTY: 1, Rule.ES_APPEND: 2}


def check_derivation(d: Derivation) -> None:
    """Validate every node, raising :class:`CheckError` at the first violation (pre-order)."""
    stack: list[tuple[Derivation, tuple[int, ...]]] = [(d, ())]
    while stack:
        node, path = stack.pop()
        _check_node(node, path)
        for k in reversed(range(len(node.premises))):
            stack.append((node.premises[k], path + (k,)))


def is_valid(d: Derivation) -> bool:
    try:
        check_derivation(d)
    except CheckError:
        return False
    return True


def _check_node(d: Derivation, path: tuple[int, ...]) -> None:
    def fail(reason: Violation, detail: str = "") -> None:
        raise CheckError(path, reason, detail)

    rule, subj, ctx, ty, ps = d.rule, d.subject, d.ctx, d.ty, d.premises
    want = _ARITY.get(rule)
    if want is not None and len(ps) != want:
        fail(Violation.ARITY, f"{rule.value} takes {want}, got {len(ps)}")
    if rule is not Rule.ES_APPEND and d.entry is not None:
        fail(Violation.ENTRY, "only es_append carries an entry")

    if rule is Rule.AX:
        if not isinstance(subj, Variable):
            fail(Violation.SUBJECT_SHAPE, "axiom subject must be a variable")
        if ctx != TypeContext({subj.var: ty}):
            fail(Violation.AX_JUDGEMENT, f"context {{{ctx}}} for {subj.var} : {ty}")

    elif rule is Rule.APP:
        if not isinstance(subj, Application):
            fail(Violation.SUBJECT_SHAPE, "@ subject must be an application")
        left, right = ps
        if not _same_term(left.subject, subj.fun) or not _same_term(right.subject, subj.arg):
            fail(Violation.PREMISE_SUBJECT)
        if len(left.ty) != 1:
            fail(Violation.NON_SINGLETON_ARROW, f"got {left.ty}")
        arrow = left.ty.items[0]
        if right.ty != arrow.left:
            fail(Violation.ARGUMENT_TYPE, f"{right.ty} vs {arrow.left}")
        if ty != arrow.right:
            fail(Violation.RESULT_TYPE, f"{ty} vs {arrow.right}")
        if ctx != left.ctx + right.ctx:
            fail(Violation.CONTEXT)

    elif rule is Rule.LAM:
        if not isinstance(subj, Abstraction):
            fail(Violation.SUBJECT_SHAPE, "λ subject must be an abstraction")
        x = subj.var
        total = EMPTY_CTX
        arrows = []
        for p in ps:
            if not _same_term(p.subject, subj.body):
                fail(Violation.PREMISE_SUBJECT)
            arrows.append(LinearType(p.ctx.get(x), p.ty))
            total = total + p.ctx.remove(x)
        if ty != MultiType(tuple(arrows)):
            fail(Violation.RESULT_TYPE, f"{ty} vs {MultiType(tuple(arrows))}")
        if ctx != total:
            fail(Violation.CONTEXT)

    elif rule is Rule.ES_EMPTY:
        if not isinstance(subj, Program) or subj.env:
            fail(Violation.SUBJECT_SHAPE, "es_empty subject must be a program with empty environment")
        (p,) = ps
        if not _same_term(p.subject, subj.term):
            fail(Violation.PREMISE_SUBJECT)
        if ty != p.ty:
            fail(Violation.RESULT_TYPE)
        if ctx != p.ctx:
            fail(Violation.CONTEXT)

    elif rule is Rule.ES_APPEND:
        if not isinstance(subj, Program) or not subj.env:
            fail(Violation.SUBJECT_SHAPE, "es_append subject must be a program with non-empty environment")
        x, i = subj.env[-1]
        if d.entry != x:
            fail(Violation.ENTRY, f"expected {x}, got {d.entry}")
        body, entry = ps
        if not isinstance(body.subject, Program) or not alpha_eq_program(body.subject, subj.without_tail()):
            fail(Violation.PREMISE_SUBJECT, "left premise must type the program without its tail entry")
        if not _same_term(entry.subject, i):
            fail(Violation.PREMISE_SUBJECT, "right premise must type the tail entry")
        if not is_inert(i):
            fail(Violation.NOT_INERT)
        if entry.ty != body.ctx.get(x):
            fail(Violation.ENTRY_TYPE, f"{entry.ty} vs {body.ctx.get(x)}")
        if ty != body.ty:
            fail(Violation.RESULT_TYPE)
        if ctx != body.ctx.remove(x) + entry.ctx:
            fail(Violation.CONTEXT)
    else:  # pragma: no cover
        fail(Violation.SUBJECT_SHAPE, f"unknown rule {rule}")


def _same_term(e: Expression, t: Term) -> bool:
    return not isinstance(e, Program) and alpha_eq(e, t)


def free_variable_lemma_holds(d: Derivation) -> bool:
    """Every node's context domain lies within the free variables of its subject."""
    return all(n.ctx.domain <= expression_free_vars(n.subject) for n in d.nodes())


# --- serialization --------------------------------------------------------------

class SchemaError(ValueError):
    def __init__(self, message: str, location: str):
        super().__init__(f"{location}: {message}")
        self.location = location


def _schema() -> dict:
    text = resources.files("fireball").joinpath("derivation.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def to_dict(d: Derivation) -> dict:
    node = {
        "rule": d.rule.value,
        "ctx": {str(x): str(m) for x, m in d.ctx.items()},
        "subject": print_expression(d.subject),
        "type": str(d.ty),
        "premises": [to_dict(p) for p in d.premises],
    }
    if d.entry is not None:
        node["entry"] = str(d.entry)
    return node


def serialize(d: Derivation) -> bytes:
    return json.dumps(to_dict(d), separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def deserialize(data: bytes | str) -> Derivation:
    """Parse a derivation document; rule validity is not checked here."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    try:
        jsonschema.validate(doc, _schema())
    except jsonschema.ValidationError as exc:
        loc = "/" + "/".join(str(k) for k in exc.absolute_path)
        raise SchemaError(exc.message, loc) from None
    return _from_dict(doc, "")


def _from_dict(node: dict, loc: str) -> Derivation:
    here = loc or "/"
    try:
        ctx = TypeContext({Var.parse(x): parse_multitype(m) for x, m in node["ctx"].items()})
        subject = parse_expression(node["subject"])
        ty = parse_multitype(node["type"])
        entry = Var.parse(node["entry"]) if "entry" in node else None
    except ValueError as exc:
        raise SchemaError(str(exc), here) from None
    premises = tuple(
        _from_dict(p, f"{loc}/premises/{k}") for k, p in enumerate(node["premises"])
    )
    return Derivation(Rule(node["rule"]), Judgement(ctx, subject, ty), premises, entry)


__all__ = [
    "Rule",
    "Judgement",
    "Derivation",
    "derivation_size",
    "ax",
    "app_rule",
    "lam_rule",
    "es_empty",
    "es_append",
    "Violation",
    "CheckError",
    "check_derivation",
    "is_valid",
    "free_variable_lemma_holds",
    "SchemaError",
    "serialize",
    "deserialize",
    "to_dict",
]
