import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pvw.generate import random_env, random_term
from pvw.stdlib import GENERATOR_SYMBOLS
from pvw.terms import EPS, STAR, App, Succ, Var, numeral

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

bitstrings = st.text(alphabet="01", max_size=8)
numerals = bitstrings.map(numeral)
g_numerals = st.tuples(bitstrings, st.booleans()).map(lambda p: numeral(p[0], STAR if p[1] else EPS))


def terms(names=(), max_depth=4):
    leaves = [numerals] + ([st.sampled_from([Var(x) for x in names])] if names else [])
    base = st.one_of(*leaves)

    def extend(children):
        succs = st.tuples(st.integers(0, 1), children).map(lambda p: App(Succ(p[0]), (p[1],)))
        apps = st.sampled_from(GENERATOR_SYMBOLS).flatmap(
            lambda f: st.lists(children, min_size=len_args(f), max_size=len_args(f)).map(
                lambda args: App(f, tuple(args))))
        return st.one_of(succs, apps)

    return st.recursive(base, extend, max_leaves=max_depth * 2)


def len_args(f):
    from pvw.terms import arity
    return arity(f)


closed_terms = terms()


@st.composite
def open_problems(draw, names=("a", "b")):
    """(term, development) pairs where the development binds every free variable."""
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    rho = random_env(rng, names, depth=2)
    return random_term(rng, 3, names), rho


@pytest.fixture
def rng():
    return random.Random(1234)
