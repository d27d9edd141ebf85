"""The randomized invariant battery behind ``fireball props`` and the acceptance suite."""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .derivations import (
    CheckError,
    check_derivation,
    derivation_size,
    free_variable_lemma_holds,
    is_valid,
)
from .evaluation import (
    StepKind,
    bisimulation_check,
    commute_inert_subst_check,
    env_compositionality_check,
    plain_evaluate,
    plain_step,
    split_evaluate,
    split_step,
)
from .generate import generate_terms
from .multitypes import EMPTY, ctx_types_size, single
from .mutations import mutate
from .syntax import (
    Abstraction,
    Program,
    Term,
    Var,
    alpha_eq_expr,
    check_environment,
    expression_size,
    free_vars,
    fresh,
    is_fireball,
    is_inert,
    is_value,
    node_count,
    parse_term,
    print_term,
    program_vars,
)
from .synthesis import (
    TypedTrace,
    anti_substitute_derivation,
    correctness_report,
    is_tight,
    program_parts,
    redex_node,
    subject_reduce,
    substitute_derivation,
    type_normal_any,
    type_normal_tight,
    type_program,
)

INERT_POOL = tuple(parse_term(s) for s in ("w w", "x y", "y (\\a.a)"))
# non-0 targets for the alternative, generally non-tight typings of normal forms
ALT_TARGETS = (single(EMPTY, EMPTY), single(single(EMPTY, EMPTY), EMPTY))
# how many states at the start of each trace get the single-step checks
PREFIX = 3
# plain normal forms with more nodes than this are not typed
PLAIN_NF_LIMIT = 2000

INVARIANTS = (
    "harmony (plain)",
    "harmony (split)",
    "conservativity",
    "commutation",
    "bisimulation",
    "compositionality",
    "subject reduction chain",
    "tight equalities",
    "size bounds",
    "substitution round-trip",
    "derivation lemmas",
    "correctness",
    "mutation rejection",
)


@dataclass
class Failure:
    invariant: str
    term: Term
    detail: str


@dataclass
class SampleResult:
    normalizing: bool
    checks: Counter = field(default_factory=Counter)
    failures: list[Failure] = field(default_factory=list)


class _Checker:
    def __init__(self, term: Term, result: SampleResult):
        self.term = term
        self.result = result

    def __call__(self, invariant: str, ok: bool, detail: str = "") -> None:
        self.result.checks[invariant] += 1
        if not ok:
            self.result.failures.append(Failure(invariant, self.term, detail))

    def guard(self, invariant: str, fn: Callable[[], None]) -> None:
        try:
            fn()
        except Exception as exc:  # an exception is a violation of the invariant being checked
            self(invariant, False, f"{type(exc).__name__}: {exc}")


def check_sample(t: Term, fuel: int, rng: random.Random) -> SampleResult:
    """Run every invariant on one term; failures name the invariant."""
    plain = plain_evaluate(t, fuel)
    start = Program(t)
    split = split_evaluate(start, fuel)
    result = SampleResult(normalizing=split.normal)
    check = _Checker(t, result)

    def harmony_plain() -> None:
        final = plain.final
        if plain.normal:
            check("harmony (plain)", is_fireball(final) and plain_step(final) is None, "normal form is not a fireball")
        else:
            check("harmony (plain)", not is_fireball(final) and plain_step(final) is not None, "stuck non-fireball")
        for k in range(min(len(plain), PREFIX)):
            e = plain.expression(k)
            check("harmony (plain)", not is_fireball(e) and plain_step(e) is not None, f"state {k}")

    def harmony_split() -> None:
        final = split.final
        check_environment(final.env)
        if split.normal:
            check("harmony (split)", is_fireball(final.term) and split_step(final) is None, "normal program term is not a fireball")
        else:
            check("harmony (split)", split_step(final) is not None, "stuck program")

    def conservativity() -> None:
        if not free_vars(t):
            check("conservativity", StepKind.BETA_I not in plain.kinds, "βi step on a closed term")
            check("conservativity", StepKind.BETA_I not in split.kinds, "βi step on a closed program")

    def commutation() -> None:
        names = sorted(free_vars(t)) or [Var("x")]
        for k in range(min(len(plain) + 1, PREFIX)):
            e = plain.expression(k)
            for x in names:
                for i in INERT_POOL:
                    check("commutation", commute_inert_subst_check(e, x, i), f"{x} <- {print_term(i)} at state {k}")

    def bisimulation() -> None:
        report = bisimulation_check(start, fuel, split, plain)
        check("bisimulation", report.pointwise_match, "unfolded split state differs from plain state")
        check("bisimulation", report.kinds_match, "step kinds differ")

    def compositionality() -> None:
        for k in range(min(len(split) + 1, PREFIX)):
            q = split.expression(k)
            x = fresh(Var("e"), program_vars(q))
            for i in INERT_POOL:
                check("compositionality", env_compositionality_check(q, x, i), f"[{x}<-{print_term(i)}] at state {k}")

    check.guard("harmony (plain)", harmony_plain)
    check.guard("harmony (split)", harmony_split)
    check.guard("conservativity", conservativity)
    check.guard("commutation", commutation)
    check.guard("bisimulation", bisimulation)
    check.guard("compositionality", compositionality)
    if split.normal:
        typed = None

        def typing() -> None:
            nonlocal typed
            typed = type_program(start, fuel, trace=split)
            if not isinstance(typed, TypedTrace):
                check("subject reduction chain", False, "normalizing program reported as diverged")
                typed = None

        check.guard("subject reduction chain", typing)
        if typed is not None:
            _typed_checks(typed, plain.final, check, rng)
    return result


def _typed_checks(typed: TypedTrace, plain_nf: Term, check: _Checker, rng: random.Random) -> None:
    ds, progs = typed.derivations, typed.programs

    def chain() -> None:
        head = ds[0]
        for k, (d, p) in enumerate(zip(ds, progs)):
            try:
                check_derivation(d)
            except CheckError as exc:
                check("subject reduction chain", False, f"derivation {k} rejected: {exc}")
                return
            check("subject reduction chain", alpha_eq_expr(d.subject, p), f"derivation {k} types another program")
            check("subject reduction chain", d.ctx == head.ctx and d.ty == head.ty, f"judgement changes at {k}")
        for k in range(len(ds) - 1):
            check("subject reduction chain", derivation_size(ds[k]) == derivation_size(ds[k + 1]) + 1, f"size step at {k}")
            q, reduced = subject_reduce(ds[k], progs[k])
            check(
                "subject reduction chain",
                is_valid(reduced)
                and derivation_size(reduced) == derivation_size(ds[k]) - 1
                and reduced.ctx == head.ctx
                and reduced.ty == head.ty
                and alpha_eq_expr(q, progs[k + 1]),
                f"forward reduction at {k}",
            )

    def tight() -> None:
        check("tight equalities", is_tight(ds[0]), "head derivation is not tight")
        eq_q, eq_ty = typed.equalities()
        check("tight equalities", eq_q, "|π| != |d| + |q|")
        check("tight equalities", eq_ty, "|π| != |d| + |Ty(Γ)|")

    def sizes() -> None:
        q = typed.normal_form
        derivs = [(q, ds[-1], True)]
        # a derivation is a tree, so a plain normal form that only exists thanks
        # to sharing cannot be typed in reasonable space
        subjects = [q]
        if node_count(plain_nf) <= PLAIN_NF_LIMIT:
            derivs.append((plain_nf, type_normal_tight(plain_nf), True))
            subjects.append(plain_nf)
        for e in subjects:
            for m in ALT_TARGETS:
                body = e.term if isinstance(e, Program) else e
                if isinstance(body, Abstraction):
                    continue
                derivs.append((e, type_normal_any(e, m), False))
        tight_size = {id(q): derivation_size(ds[-1]), id(plain_nf): None}
        for e, d, is_tight_d in derivs:
            if not is_valid(d):
                check("size bounds", False, "constructed derivation rejected")
                continue
            size_e, size_d = expression_size(e), derivation_size(d)
            types = ctx_types_size(d.ctx)
            check("size bounds", size_e <= size_d, "|e| > |π|")
            check("size bounds", size_e <= types + d.ty.size, "|e| > |(Ty(Γ), M)|")
            if not isinstance(e, Program) and is_inert(e):
                check("size bounds", size_e + d.ty.size <= types, "|i| + |M| > |Ty(Γ)|")
            if is_tight_d:
                check("size bounds", size_e == size_d == types, "tight derivation is not exact")
                tight_size[id(e)] = size_d
            else:
                check("size bounds", tight_size[id(e)] is None or size_d >= tight_size[id(e)], "tight derivation not minimal")

    def round_trips() -> None:
        for k, kind in enumerate(typed.kinds):
            if kind is not StepKind.BETA_V:
                continue
            term_d, _ = program_parts(ds[k])
            node, _ = redex_node(term_d)
            lam_d, arg_d = node.premises
            (body_d,) = lam_d.premises
            lam = lam_d.subject
            rho = substitute_derivation(body_d, lam.var, arg_d)
            check("substitution round-trip", is_valid(rho), f"substituted derivation rejected at {k}")
            check(
                "substitution round-trip",
                derivation_size(rho) == derivation_size(body_d) + derivation_size(arg_d),
                f"|ρ| != |π| + |σ| at {k}",
            )
            check("substitution round-trip", rho.ctx == body_d.ctx.remove(lam.var) + arg_d.ctx, f"context at {k}")
            sigma, rho_v = anti_substitute_derivation(rho, lam.body, lam.var, arg_d.subject)
            check("substitution round-trip", is_valid(sigma) and is_valid(rho_v), f"anti-substitution rejected at {k}")
            check(
                "substitution round-trip",
                derivation_size(sigma) + derivation_size(rho_v) == derivation_size(rho)
                and sigma.ty == rho.ty
                and sigma.ctx.remove(lam.var) + rho_v.ctx == rho.ctx
                and sigma.ctx.get(lam.var) == rho_v.ty,
                f"anti-substitution judgement at {k}",
            )
            again = substitute_derivation(sigma, lam.var, rho_v)
            check(
                "substitution round-trip",
                again.judgement.ctx == rho.ctx and again.ty == rho.ty and derivation_size(again) == derivation_size(rho),
                f"round-trip at {k}",
            )

    def lemmas() -> None:
        for d in (ds[0], ds[-1]):
            check("derivation lemmas", free_variable_lemma_holds(d), "free-variable lemma")
            for n in d.nodes():
                s = n.subject
                if isinstance(s, Program):
                    continue
                if is_value(s) and n.ty.is_empty:
                    check("derivation lemmas", not n.ctx and derivation_size(n) == 0, "value typed 0 is not empty")
                if is_inert(s) and n.ctx.is_inert():
                    check("derivation lemmas", n.ty.is_inert(), "inert context with non-inert type")

    def correctness() -> None:
        report = correctness_report(ds[0], progs[0])
        check("correctness", report.inequality and report.equality is True, "tight correctness bound")
        check("correctness", report.coerced_value == (not ds[0].ctx), "coerced value iff empty context")
        check("correctness", not report.fuel_bug, "typable program exhausted fuel")

    def mutations() -> None:
        kind, path, bad = mutate(ds[0], rng)
        check("mutation rejection", not is_valid(bad), f"{kind.value} at {list(path)} accepted")

    check.guard("subject reduction chain", chain)
    check.guard("tight equalities", tight)
    check.guard("size bounds", sizes)
    check.guard("substitution round-trip", round_trips)
    check.guard("derivation lemmas", lemmas)
    check.guard("correctness", correctness)
    check.guard("mutation rejection", mutations)


@dataclass
class BatteryReport:
    seed: int
    count: int
    max_size: int
    fuel: int
    normalizing: int
    checks: Counter
    failures: list[Failure]

    @property
    def ok(self) -> bool:
        return not self.failures

    def minimal_failures(self) -> dict[str, Failure]:
        """For each violated invariant, the failing sample with the fewest nodes."""
        out: dict[str, Failure] = {}
        for f in self.failures:
            best = out.get(f.invariant)
            if best is None or node_count(f.term) < node_count(best.term):
                out[f.invariant] = f
        return out

    def render(self) -> str:
        lines = [
            f"samples: {self.count} (seed {self.seed}, max size {self.max_size}, fuel {self.fuel})",
            f"normalizing: {self.normalizing}, fuel exhausted: {self.count - self.normalizing}",
        ]
        worst = self.minimal_failures()
        for name in INVARIANTS:
            n_fail = sum(1 for f in self.failures if f.invariant == name)
            status = "ok" if not n_fail else f"{n_fail} VIOLATION(S)"
            lines.append(f"  {name:<26} {self.checks[name]:>7} checks  {status}")
        for name, f in worst.items():
            lines.append(f"counterexample for {name}: {print_term(f.term)}  ({f.detail})")
        lines.append("verdict: " + ("all invariants hold" if self.ok else "violations found"))
        return "\n".join(lines)


def run_battery(
    seed: int = 0,
    count: int = 1000,
    max_size: int = 10,
    fuel: int = 5000,
    terms: Iterable[Term] | None = None,
) -> BatteryReport:
    """Check every invariant on ``count`` generated terms (or on ``terms`` if given)."""
    samples = list(terms) if terms is not None else generate_terms(seed, count, max_size)
    rng = random.Random(seed)
    checks: Counter = Counter()
    failures: list[Failure] = []
    normalizing = 0
    for t in samples:
        r = check_sample(t, fuel, rng)
        checks.update(r.checks)
        failures.extend(r.failures)
        normalizing += r.normalizing
    return BatteryReport(seed, len(samples), max_size, fuel, normalizing, checks, failures)


__all__ = ["INVARIANTS", "Failure", "SampleResult", "check_sample", "BatteryReport", "run_battery"]
