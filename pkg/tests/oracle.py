"""A deliberately naive reference implementation used to cross-check the library.

Terms are nested tuples in de Bruijn form: ("b", k) is a bound variable,
("f", name) a free one, ("l", body) an abstraction and ("a", fun, arg) an
application.  Nothing here shares code with the package beyond reading its
term constructors.
"""
from __future__ import annotations

import itertools

from fireball.syntax import Abstraction, Program, Variable


def to_db(t, bound=()):
    if isinstance(t, Variable):
        name = str(t.var)
        for k, b in enumerate(reversed(bound)):
            if b == name:
                return ("b", k)
        return ("f", name)
    if isinstance(t, Abstraction):
        return ("l", to_db(t.body, bound + (str(t.var),)))
    return ("a", to_db(t.fun, bound), to_db(t.arg, bound))


def instantiate(body, value, depth=0):
    """Replace the outermost loose index in ``body`` by a closed-over-bound ``value``."""
    tag = body[0]
    if tag == "b":
        if body[1] == depth:
            return value
        return ("b", body[1] - 1) if body[1] > depth else body
    if tag == "f":
        return body
    if tag == "l":
        return ("l", instantiate(body[1], value, depth + 1))
    return ("a", instantiate(body[1], value, depth), instantiate(body[2], value, depth))


def free_subst(t, name, value):
    tag = t[0]
    if tag == "f":
        return value if t[1] == name else t
    if tag == "b":
        return t
    if tag == "l":
        return ("l", free_subst(t[1], name, value))
    return ("a", free_subst(t[1], name, value), free_subst(t[2], name, value))


def free_names(t, out=None):
    out = set() if out is None else out
    if t[0] == "f":
        out.add(t[1])
    elif t[0] == "l":
        free_names(t[1], out)
    elif t[0] == "a":
        free_names(t[1], out)
        free_names(t[2], out)
    return out


def is_value(t):
    return t[0] in ("f", "l")


def is_inert(t):
    return t[0] == "a" and is_inert_head(t)


def is_inert_head(t):
    if t[0] == "f":
        return True
    return t[0] == "a" and is_inert_head(t[1]) and is_fireball(t[2])


def is_fireball(t):
    return is_value(t) or is_inert(t)


def step(t):
    """Right-to-left weak step: (reduct, "v" | "i") or None."""
    if t[0] != "a":
        return None
    r = step(t[2])
    if r is not None:
        return ("a", t[1], r[0]), r[1]
    if t[1][0] == "l" and is_fireball(t[2]):
        return instantiate(t[1][1], t[2]), ("i" if t[2][0] == "a" else "v")
    r = step(t[1])
    if r is not None:
        return ("a", r[0], t[2]), r[1]
    return None


def evaluate(t, fuel):
    kinds = []
    for _ in range(fuel):
        r = step(t)
        if r is None:
            return t, kinds, True
        t, kind = r
        kinds.append(kind)
    return t, kinds, step(t) is None


# --- split programs: env is a list of (name, inert term), newest first ---------

_fresh = itertools.count()


def split_step(term, env):
    """Returns (term, env, kind) or None; βi binds the argument to a brand new name."""
    def go(t):
        if t[0] != "a":
            return None
        r = go(t[2])
        if r is not None:
            return ("a", t[1], r[0]), r[1], r[2]
        if t[1][0] == "l" and is_fireball(t[2]):
            if t[2][0] == "a":
                z = f"#{next(_fresh)}"
                return instantiate(t[1][1], ("f", z)), "i", (z, t[2])
            return instantiate(t[1][1], t[2]), "v", None
        r = go(t[1])
        if r is not None:
            return ("a", r[0], t[2]), r[1], r[2]
        return None

    r = go(term)
    if r is None:
        return None
    new_term, kind, entry = r
    return new_term, ([entry] + env if entry else env), kind


def split_evaluate(term, env, fuel):
    kinds = []
    for _ in range(fuel):
        r = split_step(term, env)
        if r is None:
            return term, env, kinds, True
        term, env, kind = r
        kinds.append(kind)
    return term, env, kinds, split_step(term, env) is None


def unfold(term, env):
    """Sequential unfolding, newest entry first."""
    for name, i in env:
        term = free_subst(term, name, i)
    return term


def program_to_db(p: Program):
    return to_db(p.term), [(str(x), to_db(i)) for x, i in p.env]


def rename_free(t, names):
    tag = t[0]
    if tag == "f":
        return ("f", names.get(t[1], t[1]))
    if tag == "b":
        return t
    if tag == "l":
        return ("l", rename_free(t[1], names))
    return ("a", rename_free(t[1], names), rename_free(t[2], names))


def program_key(term, env):
    """Equal keys iff α-equal programs: environment binders get positional names, oldest first.

    Sound because binders are distinct and entries only mention older binders.
    """
    n = len(env)
    names = {name: f"@{n - 1 - k}" for k, (name, _) in enumerate(env)}
    return rename_free(term, names), tuple(rename_free(i, names) for _, i in env)


def library_program_key(p: Program):
    return program_key(*program_to_db(p))


def db_size(t):
    """Applications not under an abstraction."""
    if t[0] == "a":
        return 1 + db_size(t[1]) + db_size(t[2])
    return 0


def from_db(t, depth=0):
    """Back to a named term, binders named b0, b1, ... by depth (α-equivalent to any source)."""
    from fireball.syntax import Application, Var

    tag = t[0]
    if tag == "f":
        return Variable(Var.parse(t[1]))
    if tag == "b":
        return Variable(Var(f"b{depth - 1 - t[1]}"))
    if tag == "l":
        return Abstraction(Var(f"b{depth}"), from_db(t[1], depth + 1))
    return Application(from_db(t[1], depth), from_db(t[2], depth))
