import hypothesis.strategies as st
from hypothesis import settings

from fireball.multitypes import EMPTY, LinearType, MultiType
from fireball.syntax import Abstraction, Application, Var, Variable, parse_term

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")

NAMES = [Var("x"), Var("y"), Var("z"), Var("w")]

variables = st.sampled_from(NAMES).map(Variable)


def _extend(children):
    return st.one_of(
        st.builds(Abstraction, st.sampled_from(NAMES), children),
        st.builds(Application, children, children),
    )


terms = st.recursive(variables, _extend, max_leaves=12)

INERT_STOCK = [parse_term(s) for s in ("w w", "x y", "y (\\a.a)", "z (w w) (\\b.b)")]
inerts = st.sampled_from(INERT_STOCK)


def _multi(children):
    return st.lists(st.builds(LinearType, children, children), max_size=3).map(MultiType)


multitypes = st.recursive(st.just(EMPTY), _multi, max_leaves=6)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[n])
