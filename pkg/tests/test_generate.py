import pytest

from fireball.evaluation import plain_evaluate
from fireball.generate import FREE_POOL, enumerate_terms, generate_terms
from fireball.syntax import Var, alpha_eq, all_vars, free_vars, parse_term, print_term, term_size


def test_deterministic():
    a = generate_terms(1, 3, 4)
    assert len(a) == 3
    assert a == generate_terms(1, 3, 4)
    assert a != generate_terms(2, 3, 4)


def test_generated_terms_reparse():
    for t in generate_terms(7, 300, 10):
        assert alpha_eq(parse_term(print_term(t)), t)


def test_generated_terms_respect_bounds():
    ts = generate_terms(3, 500, 6)
    assert all(1 <= term_size(t) <= 6 or term_size(t) == 0 for t in ts)
    assert all(free_vars(t) <= set(FREE_POOL) for t in ts)
    closed = sum(not free_vars(t) for t in ts)
    assert 0.3 < closed / len(ts) < 0.6


def test_mix_of_normalizing_and_diverging():
    outcomes = {plain_evaluate(t, 1000).normal for t in generate_terms(0, 100, 6)}
    assert outcomes == {True, False}


def test_calibration_is_pinned():
    # measured once for the chosen rates: 790 of 1000 size-8 terms normalize within 1000 steps
    ts = generate_terms(0, 1000, 8)
    assert sum(plain_evaluate(t, 1000).normal for t in ts) == 790


def test_bad_size():
    with pytest.raises(ValueError):
        generate_terms(0, 1, 0)


def _count(n, k):
    # terms with exactly n nodes over k names
    if n == 1:
        return k
    apps = sum(_count(i, k) * _count(n - 1 - i, k) for i in range(1, n - 1))
    return k * _count(n - 1, k) + apps


def test_enumeration_counts():
    names = (Var("x"), Var("y"))
    got = list(enumerate_terms(6, names))
    assert len(got) == sum(_count(n, 2) for n in range(1, 7))
    assert len(set(got)) == len(got)
    assert all(all_vars(t) <= set(names) for t in got)
