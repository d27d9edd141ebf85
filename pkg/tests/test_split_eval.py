import pytest
from hypothesis import given

import oracle
from conftest import INERT_STOCK, inerts, terms
from fireball.evaluation import (
    Outcome,
    StepKind,
    bisimulation_check,
    env_compositionality_check,
    plain_evaluate,
    projected_kind,
    split_evaluate,
    split_step,
    split_step_detail,
    unfold,
)
from fireball.generate import generate_terms
from fireball.syntax import (
    Program,
    Var,
    alpha_eq,
    alpha_eq_program,
    check_environment,
    is_fireball,
    parse_program,
    parse_term,
    print_program,
    print_term,
    program_vars,
)

TWO_STEP = Program(parse_term("(\\z.z (y z)) (\\x.x)"))
SMALL = Program(parse_term("(\\z.z) (x x)"))
DELTA_DELTA = Program(parse_term("(\\x.x x) (\\x.x x)"))
_ORACLE_KIND = {"v": StepKind.BETA_V, "i": StepKind.BETA_I}


def test_beta_i_moves_argument_to_fresh_entry():
    q, kind = split_step(SMALL)
    assert kind is StepKind.BETA_I
    assert print_program(q) == "(z', [z'<-x x])"


def test_beta_v_step_of_two_step():
    q, kind = split_step(TWO_STEP)
    assert kind is StepKind.BETA_V
    assert alpha_eq_program(q, parse_program("((\\x.x) (y \\x.x), [])"))


def test_normal_program_has_no_step():
    assert split_step(parse_program("(y \\x.x, [w<-z z])")) is None


def test_fresh_index_is_above_every_index_of_the_name():
    p = parse_program("((\\z.z) (x x) z'', [w<-z' z'])")
    q, _ = split_step(p)
    assert q.env[0][0] == Var("z", 3)


def test_two_step_split_trace():
    trace = split_evaluate(TWO_STEP, 10)
    assert trace.kinds == [StepKind.BETA_V, StepKind.BETA_I]
    assert trace.normal
    assert alpha_eq_program(trace.final, parse_program("(x', [x'<-y \\x.x])"))


def test_small_example_is_one_step():
    trace = split_evaluate(SMALL, 10)
    assert len(trace) == 1 and trace.normal


def test_divergence_mirrors_plain():
    trace = split_evaluate(DELTA_DELTA, 50)
    assert trace.outcome is Outcome.FUEL_EXHAUSTED and len(trace) == 50


def test_unfold_examples():
    t = parse_term("(\\a.a) b")
    assert unfold(Program(t)) == t
    assert alpha_eq(unfold(parse_program("(z', [z'<-x x])")), parse_term("x x"))
    assert alpha_eq(unfold(parse_program("(x, [x<-y y; y<-z z])")), parse_term("z z (z z)"))


def test_unfold_agrees_with_sequential_reference():
    for t in generate_terms(4, 150, 8):
        q = split_evaluate(Program(t), 40).final
        term, env = oracle.program_to_db(q)
        assert oracle.to_db(unfold(q)) == oracle.unfold(term, env)


def test_bisimulation_examples():
    r = bisimulation_check(TWO_STEP, 10)
    assert (r.split_len, r.plain_len, r.pointwise_match) == (2, 2, True)
    r = bisimulation_check(SMALL, 10)
    assert (r.split_len, r.plain_len, r.pointwise_match) == (1, 1, True)
    assert alpha_eq(unfold(r.split_trace.final), r.plain_trace.final)
    r = bisimulation_check(DELTA_DELTA, 20)
    assert (r.split_len, r.plain_len, r.pointwise_match) == (20, 20, True)


def test_bisimulation_render_marks_rows():
    lines = bisimulation_check(TWO_STEP, 10).render().splitlines()
    assert len(lines) == 4
    assert all("  =  " in line for line in lines[:3])


def test_bisimulation_detects_a_mismatch():
    other = plain_evaluate(parse_term("(\\z.z) (y y)"), 10)
    r = bisimulation_check(SMALL, 10, plain_trace=other)
    assert not r.pointwise_match


def test_kinds_can_differ_with_an_empty_environment():
    # a βv step on a variable bound in the environment is a βi step once unfolded
    p = Program(parse_term("(\\a.(\\b.b) a) (z z)"))
    split = split_evaluate(p, 10)
    plain = plain_evaluate(unfold(p), 10)
    assert split.kinds == [StepKind.BETA_I, StepKind.BETA_V]
    assert plain.kinds == [StepKind.BETA_I, StepKind.BETA_I]
    assert split.projected == plain.kinds
    assert bisimulation_check(p, 10).ok


def test_projected_kind():
    p = parse_program("((\\b.b) a', [a'<-z z])")
    q, kind, arg = split_step_detail(p)
    assert kind is StepKind.BETA_V
    assert projected_kind(p, kind, arg) is StepKind.BETA_I
    p = Program(parse_term("(\\b.b) a"))
    _, kind, arg = split_step_detail(p)
    assert projected_kind(p, kind, arg) is StepKind.BETA_V


def test_compositionality_examples():
    w, e = Var("w"), Var("e")
    assert env_compositionality_check(SMALL, w, parse_term("y y"))
    assert env_compositionality_check(parse_program("(z, [y<-x x])"), e, parse_term("y' y'"))
    assert env_compositionality_check(Program(parse_term("(\\z.z) (\\w.w)")), e, parse_term("y y"))
    with pytest.raises(ValueError):
        env_compositionality_check(SMALL, Var("x"), parse_term("y y"))
    with pytest.raises(ValueError):
        env_compositionality_check(SMALL, w, parse_term("\\a.a"))


@given(terms, inerts)
def test_compositionality_property(t, i):
    p = Program(t)
    e = Var("e")
    if e not in program_vars(p):
        assert env_compositionality_check(p, e, i)


@given(terms)
def test_split_harmony(t):
    p = Program(t)
    assert (split_step(p) is None) == is_fireball(t)


@given(terms)
def test_bisimulation_property(t):
    r = bisimulation_check(Program(t), 40)
    assert r.pointwise_match and r.kinds_match


def test_machine_agrees_with_reference_on_generated_terms():
    for t in generate_terms(12, 300, 8):
        trace = split_evaluate(Program(t), 60)
        term, env, kinds, normal = oracle.split_evaluate(oracle.to_db(t), [], 60)
        assert trace.kinds == [_ORACLE_KIND[k] for k in kinds], print_term(t)
        assert trace.normal == normal
        assert oracle.library_program_key(trace.final) == oracle.program_key(term, env)


def test_machine_agrees_with_single_steps_from_a_nonempty_environment():
    for t in generate_terms(8, 80, 6):
        p = Program(t, ((Var("e"), INERT_STOCK[1]),)) if Var("e") not in program_vars(Program(t)) else Program(t)
        trace = split_evaluate(p, 20)
        for k, (q, kind) in enumerate(trace.steps):
            expected, expected_kind = split_step(trace.expression(k))
            assert expected_kind is kind
            assert alpha_eq_program(expected, q)


def test_steps_preserve_environment_well_formedness():
    for t in generate_terms(6, 150, 8):
        trace = split_evaluate(Program(t), 30)
        for q in trace.expressions:
            check_environment(q.env)
        if trace.normal:
            assert is_fireball(unfold(trace.final))
