import pytest
from hypothesis import given

import oracle
from conftest import INERT_STOCK, inerts, terms
from fireball.deep import call_deep
from fireball.evaluation import (
    Outcome,
    StepKind,
    commute_inert_subst_check,
    plain_evaluate,
    plain_step,
)
from fireball.generate import generate_terms
from fireball.syntax import (
    Abstraction,
    Application,
    Var,
    Variable,
    alpha_eq,
    free_vars,
    is_fireball,
    parse_term,
    print_term,
)

TWO_STEP = parse_term("(\\z.z (y z)) (\\x.x)")
DELTA_DELTA = parse_term("(\\x.x x) (\\x.x x)")
_ORACLE_KIND = {"v": StepKind.BETA_V, "i": StepKind.BETA_I}


def test_two_step_steps():
    t1, k1 = plain_step(TWO_STEP)
    assert k1 is StepKind.BETA_V
    assert alpha_eq(t1, parse_term("(\\x.x) (y \\x.x)"))
    t2, k2 = plain_step(t1)
    assert k2 is StepKind.BETA_I
    assert alpha_eq(t2, parse_term("y \\x.x"))
    assert plain_step(t2) is None


def test_two_step_trace():
    trace = plain_evaluate(TWO_STEP, 10)
    assert trace.kinds == [StepKind.BETA_V, StepKind.BETA_I]
    assert trace.outcome is Outcome.NORMAL
    assert alpha_eq(trace.final, parse_term("y \\x.x"))


def test_self_loop_exhausts_fuel():
    trace = plain_evaluate(DELTA_DELTA, 100)
    assert len(trace) == 100
    assert trace.outcome is Outcome.FUEL_EXHAUSTED
    assert alpha_eq(trace.expression(1), DELTA_DELTA)


def test_weak_evaluation_stops_at_abstractions():
    t = Abstraction(Var("x"), DELTA_DELTA)
    for fuel in (0, 5):
        trace = plain_evaluate(t, fuel)
        assert len(trace) == 0 and trace.normal


def test_zero_fuel_on_a_redex():
    trace = plain_evaluate(TWO_STEP, 0)
    assert len(trace) == 0 and trace.outcome is Outcome.FUEL_EXHAUSTED


def test_negative_fuel_is_rejected():
    with pytest.raises(ValueError):
        plain_evaluate(TWO_STEP, -1)


def test_render_format():
    lines = plain_evaluate(TWO_STEP, 10).render().splitlines()
    assert lines[1] == "1: (\\x.x) (y \\x.x)  [βv]"
    assert lines[2] == "2: y \\x.x  [βi]"
    assert lines[-1] == "normal form after 2 step(s): y \\x.x"


def test_commutation_examples():
    z, w = Var("z"), Var("w")
    ww = parse_term("w w")
    t = parse_term("(\\y.y) z")
    assert commute_inert_subst_check(t, z, ww)
    # the substituted step now fires an inert argument
    assert plain_step(t)[1] is StepKind.BETA_V
    assert plain_step(Application(t.fun, ww)) == (ww, StepKind.BETA_I)
    assert commute_inert_subst_check(parse_term("y \\x.x"), w, ww)
    assert commute_inert_subst_check(parse_term("x y"), Var("x"), parse_term("z z"))
    with pytest.raises(ValueError):
        commute_inert_subst_check(t, z, parse_term("\\a.a"))


@given(terms)
def test_step_agrees_with_reference(t):
    got = plain_step(t)
    want = oracle.step(oracle.to_db(t))
    if want is None:
        assert got is None
    else:
        assert oracle.to_db(got[0]) == want[0]
        assert got[1] is _ORACLE_KIND[want[1]]


@given(terms)
def test_harmony(t):
    assert (plain_step(t) is None) == is_fireball(t)


@given(terms, inerts)
def test_commutation_property(t, i):
    assert commute_inert_subst_check(t, Var("x"), i)


def test_machine_agrees_with_reference_on_generated_terms():
    for t in generate_terms(11, 300, 8):
        trace = plain_evaluate(t, 80)
        final, kinds, normal = oracle.evaluate(oracle.to_db(t), 80)
        assert trace.kinds == [_ORACLE_KIND[k] for k in kinds], print_term(t)
        assert trace.normal == normal
        assert oracle.to_db(trace.final) == final


def test_machine_states_are_successive_steps():
    for t in generate_terms(5, 60, 8):
        trace = plain_evaluate(t, 30)
        for k, (reduct, kind) in enumerate(trace.steps):
            expected, expected_kind = plain_step(trace.expression(k))
            assert alpha_eq(expected, reduct) and expected_kind is kind


def test_conservativity_on_closed_terms():
    closed = [t for t in generate_terms(2, 300, 8) if not free_vars(t)]
    assert closed
    for t in closed:
        assert StepKind.BETA_I not in plain_evaluate(t, 200).kinds


def test_determinism():
    for t in generate_terms(9, 50, 8):
        assert plain_step(t) == plain_step(t)
        assert plain_evaluate(t, 50).kinds == plain_evaluate(t, 50).kinds


def test_long_runs_on_deep_terms():
    # (\a.a) ((\a.a) (... x)) with n identities: n steps, each βv
    n = 20000
    t = Variable(Var("x"))
    for _ in range(n):
        t = Application(Abstraction(Var("a"), Variable(Var("a"))), t)
    trace = call_deep(plain_evaluate, t, n + 1)
    assert len(trace) == n and trace.normal
    assert trace.final == Variable(Var("x"))
    assert set(trace.kinds) == {StepKind.BETA_V}


def test_inert_stock_is_inert():
    for i in INERT_STOCK:
        assert is_fireball(i) and isinstance(i, Application)
