import random
from collections import Counter

from fireball.derivations import is_valid
from fireball.generate import generate_terms
from fireball.mutations import MutationKind, mutate
from fireball.syntax import Program
from fireball.synthesis import TypedTrace, type_program


def valid_derivations(limit):
    out = []
    for t in generate_terms(21, 400, 8):
        typed = type_program(Program(t), 500)
        if isinstance(typed, TypedTrace):
            out.extend(typed.derivations)
        if len(out) >= limit:
            break
    return out[:limit]


def test_every_mutation_is_rejected():
    rng = random.Random(5)
    kinds = Counter()
    ds = valid_derivations(120)
    assert all(is_valid(d) for d in ds)
    for d in ds * 3:
        kind, path, bad = mutate(d, rng)
        kinds[kind] += 1
        assert not is_valid(bad), (kind, path)
    assert sum(kinds.values()) >= 200
    assert set(kinds) == set(MutationKind)


def test_mutation_is_reproducible():
    d = valid_derivations(1)[0]
    assert mutate(d, random.Random(1)) == mutate(d, random.Random(1))
