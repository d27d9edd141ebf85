"""The six acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS`` or ``criterion N: FAIL`` line,
and the lines are repeated in the terminal summary of the run.
"""
import random
import time
from contextlib import contextmanager

from fireball.deep import call_deep
from fireball.demo import (
    bounded_derivable,
    counterexample_demo,
    counterexample_derivation,
    variable_judgement_derivable,
)
from fireball.derivations import derivation_size, is_valid
from fireball.evaluation import Outcome, StepKind, plain_evaluate, split_evaluate, unfold
from fireball.multitypes import EMPTY, TypeContext, ctx_types_size, single
from fireball.generate import generate_terms
from fireball.mutations import MutationKind, mutate
from fireball.props import run_battery
from fireball.synthesis import Diverged, TypedTrace, is_tight, type_program
from fireball.syntax import Program, Var, alpha_eq, parse_term, program_size, term_size

RESULTS: dict[int, str] = {}
x, y = Var("x"), Var("y")
ARROW = single(EMPTY, EMPTY)


@contextmanager
def criterion(n, title):
    verdict = "FAIL"
    try:
        yield
        verdict = "PASS"
    finally:
        RESULTS[n] = f"criterion {n} ({title}): {verdict}"
        print(RESULTS[n])


def test_criterion_1_two_step_traces():
    with criterion(1, "traces of (\\z.z (y z)) (\\x.x)"):
        start = time.perf_counter()
        t = parse_term("(\\z.z (y z)) (\\x.x)")
        plain = plain_evaluate(t, 100)
        assert plain.kinds == [StepKind.BETA_V, StepKind.BETA_I] and plain.normal
        assert alpha_eq(plain.final, parse_term("y \\x.x"))
        split = split_evaluate(Program(t), 100)
        assert len(split) == 2 and split.normal
        assert alpha_eq(unfold(split.final), parse_term("y \\x.x"))
        assert time.perf_counter() - start < 1.0


def test_criterion_2_small_example():
    with criterion(2, "tight typing of (\\z.z) (x x)"):
        t = parse_term("(\\z.z) (x x)")
        assert term_size(t) == 2
        split = split_evaluate(Program(t), 100)
        assert len(split) == 1 and program_size(split.final) == 1
        typed = type_program(Program(t), 100)
        assert isinstance(typed, TypedTrace)
        assert is_tight(typed.derivation) and is_valid(typed.derivation)
        assert typed.size == 2
        assert typed.ctx == TypeContext({x: ARROW}) and ctx_types_size(typed.ctx) == 1
        assert typed.size == typed.steps + program_size(typed.normal_form)
        assert typed.size == typed.steps + ctx_types_size(typed.ctx)
        assert typed.equalities() == (True, True)


def test_criterion_3_counterexample():
    with criterion(3, "plain subject reduction counterexample"):
        d = counterexample_derivation()
        assert is_valid(d) and derivation_size(d) == 2
        assert not variable_judgement_derivable(TypeContext({x: ARROW, y: EMPTY}), y, EMPTY)
        assert variable_judgement_derivable(TypeContext({y: EMPTY}), y, EMPTY)
        ctx = TypeContext({x: EMPTY, y: EMPTY})
        assert not bounded_derivable(ctx, parse_term("(\\z.y) (x x)"), EMPTY, 3, 3)
        report = counterexample_demo(3, 3)
        assert report.split_invariance_holds and report.ok


def test_criterion_4_battery():
    with criterion(4, "property battery, 1000 terms"):
        start = time.perf_counter()
        report = call_deep(run_battery, 0, 1000, 10, 5000)
        elapsed = time.perf_counter() - start
        print(report.render())
        print(f"battery time: {elapsed:.1f} s")
        assert report.count == 1000
        assert report.ok
        assert elapsed < 60


def test_criterion_5_mutations():
    with criterion(5, "checker rejects mutated derivations"):
        rng = random.Random(0)
        valid = []
        for t in generate_terms(17, 300, 9):
            typed = type_program(Program(t), 1000)
            if isinstance(typed, TypedTrace):
                valid.extend(typed.derivations)
        assert all(is_valid(d) for d in valid)
        seen, accepted, total = set(), 0, 0
        while total < 250:
            for d in valid:
                kind, _, bad = mutate(d, rng)
                seen.add(kind)
                accepted += is_valid(bad)
                total += 1
        print(f"mutations: {total}, false accepts: {accepted}")
        assert accepted == 0 and seen == set(MutationKind)


def test_criterion_6_divergence():
    with criterion(6, "divergent terms get no derivation"):
        for text in ("(\\x.x x) (\\x.x x)", "(\\y.(\\x.x x)) (x x) (\\x.x x)"):
            t = parse_term(text)
            assert plain_evaluate(t, 1000).outcome is Outcome.FUEL_EXHAUSTED
            assert split_evaluate(Program(t), 1000).outcome is Outcome.FUEL_EXHAUSTED
            assert isinstance(type_program(Program(t), 1000), Diverged)
