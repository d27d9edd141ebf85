"""Terms, programs and environments of open call-by-value.

Variables carry a freshness index next to their name; the index is
printed as trailing primes, so ``Var("z", 2)`` prints as ``z''``.
Environments are tuples of ``(Var, Term)`` entries stored newest first:
index 0 is the most recent binding.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union


@dataclass(frozen=True, order=True, slots=True)
class Var:
    name: str
    index: int = 0
    _hash: int = field(default=0, init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.name or self.name.endswith("'"):
            raise ValueError(f"bad variable name {self.name!r}")
        if self.index < 0:
            raise ValueError("freshness index must be non-negative")
        object.__setattr__(self, "_hash", hash((self.name, self.index)))

    # variables are hashed and compared constantly; keep both cheap
    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if other.__class__ is not Var:
            return NotImplemented
        return self._hash == other._hash and self.index == other.index and self.name == other.name

    @classmethod
    def parse(cls, text: str) -> "Var":
        stripped = text.rstrip("'")
        return cls(stripped, len(text) - len(stripped))

    def __str__(self) -> str:
        return self.name + "'" * self.index


@dataclass(frozen=True, slots=True)
class Variable:
    var: Var
    _fv: frozenset | None = field(default=None, compare=False, repr=False)
    _mx: dict | None = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return print_term(self)


@dataclass(frozen=True, slots=True)
class Abstraction:
    var: Var
    body: "Term"
    _fv: frozenset | None = field(default=None, compare=False, repr=False)
    _mx: dict | None = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return print_term(self)


@dataclass(frozen=True, slots=True)
class Application:
    fun: "Term"
    arg: "Term"
    _fv: frozenset | None = field(default=None, compare=False, repr=False)
    _mx: dict | None = field(default=None, compare=False, repr=False)
    _cls: "Classification | None" = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        return print_term(self)


Term = Union[Variable, Abstraction, Application]
Entry = tuple[Var, Term]
Environment = tuple[Entry, ...]


class NotInertError(ValueError):
    """An environment entry is bound to a term that is not inert."""


class IllFormedProgram(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Program:
    """A term paired with an environment of inert bindings (head = newest)."""

    term: Term
    env: Environment = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "env", tuple((x, i) for x, i in self.env))
        check_environment(self.env)

    @classmethod
    def unchecked(cls, term: Term, env: Environment = ()) -> "Program":
        # Reduction preserves well-formedness; skip the quadratic re-check.
        prog = object.__new__(cls)
        object.__setattr__(prog, "term", term)
        object.__setattr__(prog, "env", env)
        return prog

    def append(self, x: Var, i: Term) -> "Program":
        """Insert ``[x<-i]`` as the oldest entry (the tail)."""
        return Program(self.term, self.env + ((x, i),))

    def without_tail(self) -> "Program":
        return Program.unchecked(self.term, self.env[:-1])

    @property
    def bound_vars(self) -> tuple[Var, ...]:
        return tuple(x for x, _ in self.env)

    def __str__(self) -> str:
        return print_program(self)


Expression = Union[Term, Program]


def check_environment(env: Environment) -> None:
    """Raise unless entries are inert, distinct and properly scoped.

    An entry may mention variables of strictly older entries, never its own
    variable or those of newer entries.
    """
    seen: set[Var] = set()
    for x, i in env:
        if classify(i) is not Classification.INERT:
            raise NotInertError(f"environment entry {x} is bound to non-inert {print_term(i)}")
        if x in seen:
            raise IllFormedProgram(f"variable {x} bound twice in environment")
        seen.add(x)
        clash = free_vars(i) & seen
        if clash:
            names = ", ".join(str(v) for v in sorted(clash))
            raise IllFormedProgram(f"entry {x} mentions newer or own binder(s) {names}")


# --- constructors -------------------------------------------------------

def var(name: str) -> Variable:
    return Variable(Var.parse(name))


def lam(x: str | Var, body: Term) -> Abstraction:
    return Abstraction(x if isinstance(x, Var) else Var.parse(x), body)


def app(*terms: Term) -> Term:
    out = terms[0]
    for t in terms[1:]:
        out = Application(out, t)
    return out


# --- free variables and friends ------------------------------------------

def _children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, Application):
        return (t.fun, t.arg)
    if isinstance(t, Abstraction):
        return (t.body,)
    return ()


def _cached(t: Term, attr: str, compute) -> object:
    """Fill the per-node cache ``attr`` bottom-up without recursion."""
    val = getattr(t, attr)
    if val is not None:
        return val
    stack = [(t, False)]
    while stack:
        node, ready = stack.pop()
        if getattr(node, attr) is not None:
            continue
        if ready:
            object.__setattr__(node, attr, compute(node))
            continue
        stack.append((node, True))
        for c in _children(node):
            if getattr(c, attr) is None:
                stack.append((c, False))
    return getattr(t, attr)


def _fv_node(t: Term) -> frozenset[Var]:
    if isinstance(t, Variable):
        return frozenset((t.var,))
    if isinstance(t, Abstraction):
        fv = t.body._fv
        return fv - {t.var} if t.var in fv else fv
    f, a = t.fun._fv, t.arg._fv
    if a <= f:
        return f
    if f <= a:
        return a
    return f | a


def free_vars(t: Term) -> frozenset[Var]:
    fv = t._fv
    if fv is not None:
        return fv
    return _cached(t, "_fv", _fv_node)


def _merge_max(m: dict, n: dict) -> dict:
    if m is n or not n:
        return m
    if not m:
        return n
    out = None
    for name, k in n.items():
        if m.get(name, -1) < k:
            if out is None:
                out = dict(m)
            out[name] = k
    return m if out is None else out


def _mx_node(t: Term) -> dict:
    if isinstance(t, Variable):
        return {t.var.name: t.var.index}
    if isinstance(t, Abstraction):
        return _merge_max(t.body._mx, {t.var.name: t.var.index})
    return _merge_max(t.fun._mx, t.arg._mx)


def max_indices(t: Term) -> dict[str, int]:
    """Largest freshness index of each variable name occurring in ``t`` (bound or free).

    The returned dict is shared with the cache and must not be mutated.
    """
    mx = t._mx
    if mx is not None:
        return mx
    return _cached(t, "_mx", _mx_node)


def program_max_indices(p: "Program") -> dict[str, int]:
    mx = max_indices(p.term)
    for x, i in p.env:
        mx = _merge_max(_merge_max(mx, max_indices(i)), {x.name: x.index})
    return mx


def program_free_vars(p: Program) -> frozenset[Var]:
    fv = set(free_vars(p.term))
    for x, i in p.env:
        fv.discard(x)
        fv |= free_vars(i)
    return frozenset(fv)


def expression_free_vars(e: Expression) -> frozenset[Var]:
    return program_free_vars(e) if isinstance(e, Program) else free_vars(e)


def all_vars(t: Term) -> set[Var]:
    """Every variable occurring in ``t``, bound or free."""
    out: set[Var] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Variable):
            out.add(u.var)
        elif isinstance(u, Abstraction):
            out.add(u.var)
            stack.append(u.body)
        else:
            stack.append(u.fun)
            stack.append(u.arg)
    return out


def program_vars(p: Program) -> set[Var]:
    out = all_vars(p.term)
    for x, i in p.env:
        out.add(x)
        out |= all_vars(i)
    return out


def fresh(base: Var, avoid: Iterable[Var] | set[Var]) -> Var:
    """The variant of ``base`` with the smallest index not in ``avoid``."""
    avoid = avoid if isinstance(avoid, (set, frozenset)) else set(avoid)
    k = base.index
    while Var(base.name, k) in avoid:
        k += 1
    return Var(base.name, k)


# --- substitution ---------------------------------------------------------

def substitute(t: Term, x: Var, u: Term) -> Term:
    """Capture-avoiding ``t{x<-u}``."""
    if x not in free_vars(t):
        return t
    return _subst(t, x, u, free_vars(u))


def _subst(t: Term, x: Var, u: Term, fvu: frozenset[Var]) -> Term:
    if x not in free_vars(t):
        return t
    if isinstance(t, Variable):
        return u
    if isinstance(t, Application):
        return Application(_subst(t.fun, x, u, fvu), _subst(t.arg, x, u, fvu))
    y, body = t.var, t.body
    if y in fvu:
        z = fresh(y, fvu | free_vars(body) | {x})
        body = _subst(body, y, Variable(z), frozenset((z,)))
        y = z
    return Abstraction(y, _subst(body, x, u, fvu))


def substitute_many(t: Term, m: dict[Var, Term]) -> Term:
    """Capture-avoiding simultaneous substitution of ``m`` in ``t``."""
    live = {x: u for x, u in m.items() if x in free_vars(t)} if len(m) < 8 else _restrict(t, m)
    if not live:
        return t
    if isinstance(t, Variable):
        return live[t.var]
    if isinstance(t, Application):
        return Application(substitute_many(t.fun, live), substitute_many(t.arg, live))
    y, body = t.var, t.body
    incoming: set[Var] = set()
    for u in live.values():
        incoming |= free_vars(u)
    if y in incoming:
        z = fresh(y, incoming | free_vars(body) | set(live))
        body = substitute(body, y, Variable(z))
        y = z
    return Abstraction(y, substitute_many(body, live))


def _restrict(t: Term, m: dict[Var, Term]) -> dict[Var, Term]:
    return {x: m[x] for x in free_vars(t) if x in m}


def rename_binder(t: Abstraction, z: Var) -> Abstraction:
    """``λx.s`` as ``λz.s{x<-z}``; ``z`` must not be free in ``t``."""
    if z == t.var:
        return t
    return Abstraction(z, substitute(t.body, t.var, Variable(z)))


# --- alpha-equivalence -------------------------------------------------------

def alpha_eq(t: Term, u: Term) -> bool:
    return _alpha(t, u, {}, {}, 0, set())


def _context_free(t: Term, env: dict) -> bool:
    return not env or not any(x in env for x in free_vars(t))


def _alpha(t: Term, u: Term, env_t: dict, env_u: dict, depth: int, memo: set) -> bool:
    # env_* map a bound variable to the depth of its binder; free ones compare by name.
    # Terms built by substitution share subterms heavily, so positive answers for
    # pairs that mention no enclosing binder are remembered by identity.
    while True:
        if isinstance(t, Variable):
            if not isinstance(u, Variable):
                return False
            lt, lu = env_t.get(t.var), env_u.get(u.var)
            if lt is None and lu is None:
                return t.var == u.var
            return lt == lu
        key = None
        if _context_free(t, env_t) and _context_free(u, env_u):
            if t is u:
                return True
            key = (id(t), id(u))
            if key in memo:
                return True
        if isinstance(t, Application):
            if not isinstance(u, Application):
                return False
            if not _alpha(t.arg, u.arg, env_t, env_u, depth, memo):
                return False
            if key is not None:
                if not _alpha(t.fun, u.fun, env_t, env_u, depth, memo):
                    return False
                memo.add(key)
                return True
            t, u = t.fun, u.fun
            continue
        if not isinstance(u, Abstraction):
            return False
        old_t, old_u = env_t.get(t.var), env_u.get(u.var)
        env_t[t.var] = depth
        env_u[u.var] = depth
        try:
            ok = _alpha(t.body, u.body, env_t, env_u, depth + 1, memo)
        finally:
            _restore(env_t, t.var, old_t)
            _restore(env_u, u.var, old_u)
        if ok and key is not None:
            memo.add(key)
        return ok


def _restore(env: dict, key: Var, old) -> None:
    if old is None:
        env.pop(key, None)
    else:
        env[key] = old


def alpha_eq_program(p: Program, q: Program) -> bool:
    """Programs are equal up to renaming of terms' and environment binders."""
    if len(p.env) != len(q.env):
        return False
    env_p: dict = {}
    env_q: dict = {}
    memo: set = set()
    depth = 0
    # oldest entry first: its variable scopes over everything newer
    for (x, i), (y, j) in zip(reversed(p.env), reversed(q.env)):
        if not _alpha(i, j, env_p, env_q, depth, memo):
            return False
        env_p[x] = depth
        env_q[y] = depth
        depth += 1
    return _alpha(p.term, q.term, env_p, env_q, depth, memo)


def alpha_eq_expr(e: Expression, f: Expression) -> bool:
    if isinstance(e, Program) != isinstance(f, Program):
        return False
    if isinstance(e, Program):
        return alpha_eq_program(e, f)
    return alpha_eq(e, f)


# --- classification and sizes ---------------------------------------------

class Classification(enum.Enum):
    VALUE = "value"
    INERT = "inert"
    NOT_FIREBALL = "not a fireball"


def _cls_node(t: Application) -> Classification:
    # inert: a variable applied to one or more fireballs
    f = t.fun
    head_ok = isinstance(f, Variable) or (isinstance(f, Application) and f._cls is Classification.INERT)
    arg_ok = not isinstance(t.arg, Application) or t.arg._cls is Classification.INERT
    return Classification.INERT if head_ok and arg_ok else Classification.NOT_FIREBALL


def _cls_cached(t: Term) -> object:
    # like _cached, but only applications carry the field
    if not isinstance(t, Application):
        return None
    val = t._cls
    if val is not None:
        return val
    stack = [(t, False)]
    while stack:
        node, ready = stack.pop()
        if node._cls is not None:
            continue
        if ready:
            object.__setattr__(node, "_cls", _cls_node(node))
            continue
        stack.append((node, True))
        for c in (node.fun, node.arg):
            if isinstance(c, Application) and c._cls is None:
                stack.append((c, False))
    return t._cls


def classify(t: Term) -> Classification:
    if isinstance(t, (Variable, Abstraction)):
        return Classification.VALUE
    return _cls_cached(t)


def is_fireball(t: Term) -> bool:
    if not isinstance(t, Application):
        return True
    c = t._cls
    if c is None:
        c = _cls_cached(t)
    return c is Classification.INERT


def is_value(t: Term) -> bool:
    return isinstance(t, (Variable, Abstraction))


def is_inert(t: Term) -> bool:
    return isinstance(t, Application) and is_fireball(t)


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Split ``h a1 ... an`` into ``(h, [a1, ..., an])``."""
    args = []
    while isinstance(t, Application):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


def _count(t: Term, weight) -> int:
    # memoized by identity: shared subterms are counted once per occurrence
    # without being walked again
    memo: dict[int, int] = {}
    stack = [(t, False)]
    while stack:
        node, ready = stack.pop()
        if id(node) in memo:
            continue
        kids = weight(node)
        if kids is None:
            memo[id(node)] = 0
            continue
        own, children = kids
        if ready:
            memo[id(node)] = own + sum(memo[id(c)] for c in children)
            continue
        stack.append((node, True))
        stack.extend((c, False) for c in children if id(c) not in memo)
    return memo[id(t)]


def _app_weight(t: Term):
    return (1, (t.fun, t.arg)) if isinstance(t, Application) else None


def _node_weight(t: Term):
    if isinstance(t, Application):
        return (1, (t.fun, t.arg))
    if isinstance(t, Abstraction):
        return (1, (t.body,))
    return (1, ())


def term_size(t: Term) -> int:
    """Number of applications not under an abstraction."""
    return _count(t, _app_weight)


def program_size(p: Program) -> int:
    return term_size(p.term) + sum(term_size(i) for _, i in p.env)


def expression_size(e: Expression) -> int:
    return program_size(e) if isinstance(e, Program) else term_size(e)


def node_count(t: Term) -> int:
    return _count(t, _node_weight)


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        if isinstance(u, Abstraction):
            stack.append(u.body)
        elif isinstance(u, Application):
            stack.append(u.arg)
            stack.append(u.fun)


# --- printing -----------------------------------------------------------------

def print_term(t: Term) -> str:
    out: list[str] = []
    _emit(t, out, tail=True)
    return "".join(out)


def _emit(t: Term, out: list[str], tail: bool) -> None:
    if isinstance(t, Variable):
        out.append(str(t.var))
    elif isinstance(t, Abstraction):
        out.append("\\" + str(t.var) + ".")
        _emit(t.body, out, tail)
    else:
        if isinstance(t.fun, Abstraction):
            out.append("(")
            _emit(t.fun, out, True)
            out.append(")")
        else:
            _emit(t.fun, out, False)
        out.append(" ")
        if isinstance(t.arg, Application) or (isinstance(t.arg, Abstraction) and not tail):
            out.append("(")
            _emit(t.arg, out, True)
            out.append(")")
        else:
            _emit(t.arg, out, tail)


def print_program(p: Program) -> str:
    entries = "; ".join(f"{x}<-{print_term(i)}" for x, i in p.env)
    return f"({print_term(p.term)}, [{entries}])"


def print_expression(e: Expression) -> str:
    return print_program(e) if isinstance(e, Program) else print_term(e)


# --- parsing -----------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_PUNCT = {"(", ")", "\\", "λ", ".", ",", "[", "]", ";"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == "<" and text.startswith("<-", i):
            toks.append(("<-", "<-", i))
            i += 2
        elif c in _PUNCT:
            toks.append((c if c != "λ" else "\\", c, i))
            i += 1
        elif c.isascii() and c.isalpha():
            j = i + 1
            while j < n and (text[j].isascii() and (text[j].isalnum() or text[j] in "_'")):
                j += 1
            toks.append(("VAR", text[i:j], i))
            i = j
        else:
            raise ParseError(f"unexpected character {c!r}", i)
    toks.append(("EOF", "", n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self) -> str:
        return self.toks[self.k][0]

    def pos(self) -> int:
        return self.toks[self.k][2]

    def expect(self, kind: str) -> str:
        tok = self.toks[self.k]
        if tok[0] != kind:
            shown = tok[1] or "end of input"
            raise ParseError(f"expected {kind!r}, found {shown!r}", tok[2])
        self.k += 1
        return tok[1]

    def term(self) -> Term:
        atoms = [self.atom()]
        while self.peek() in ("VAR", "(", "\\"):
            atoms.append(self.atom())
        return app(*atoms)

    def atom(self) -> Term:
        kind = self.peek()
        if kind == "VAR":
            return Variable(Var.parse(self.expect("VAR")))
        if kind == "(":
            self.expect("(")
            t = self.term()
            self.expect(")")
            return t
        if kind == "\\":
            self.expect("\\")
            x = Var.parse(self.expect("VAR"))
            self.expect(".")
            return Abstraction(x, self.term())
        tok = self.toks[self.k]
        shown = tok[1] or "end of input"
        raise ParseError(f"expected a term, found {shown!r}", tok[2])

    def program(self) -> Program:
        self.expect("(")
        t = self.term()
        self.expect(",")
        self.expect("[")
        env = []
        if self.peek() != "]":
            env.append(self.entry())
            while self.peek() == ";":
                self.expect(";")
                env.append(self.entry())
        self.expect("]")
        self.expect(")")
        return Program(t, tuple(env))

    def entry(self) -> Entry:
        x = Var.parse(self.expect("VAR"))
        self.expect("<-")
        return (x, self.term())

    def done(self) -> None:
        self.expect("EOF")


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.done()
    return t


def parse_program(text: str) -> Program:
    p = _Parser(text)
    prog = p.program()
    p.done()
    return prog


def _looks_like_program(text: str) -> bool:
    depth = 0
    for c in text:
        if c in "([":
            depth += 1
        elif c in ")]":
            depth -= 1
        elif c == "," and depth == 1:
            return True
    return False


def parse_expression(text: str) -> Expression:
    """A program if the text has a top-level ``(term, [...])`` shape, else a term."""
    if text.strip().startswith("(") and _looks_like_program(text):
        return parse_program(text)
    return parse_term(text)
