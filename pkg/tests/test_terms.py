import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import bitstrings, closed_terms, g_numerals, numerals
from pvw.stdlib import CONCAT, DISCARD, STDLIB, TAIL, zeroize
from pvw.terms import (
    EPS, STAR, App, Comp, ConstN, Proj, Rec, Succ, Var, WellFormednessError, app, approx_leq,
    arity, base_symbols, check_development, dev_lookup, dev_size, free_vars, is_g_numeral,
    is_subsequence, make_development, meet, numeral, numeral_bits, rename, s0, s1,
    substitute, symbol_size, term_size, truncate,
)


def test_symbol_sizes():
    assert symbol_size(ConstN(3)) == 4
    assert symbol_size(Proj(2, 1)) == 3
    assert symbol_size(Comp(Succ(0), (Proj(2, 2),))) == 1 + 1 + 3
    assert symbol_size(Rec(ConstN(1), ConstN(3), ConstN(3))) == 1 + 2 + 4 + 4


@pytest.mark.parametrize("name", sorted(STDLIB))
def test_arity_never_exceeds_size(name):
    f = STDLIB[name]
    assert arity(f) <= symbol_size(f)


def test_ill_formed_symbols_are_rejected():
    with pytest.raises(WellFormednessError):
        Proj(2, 3)
    with pytest.raises(WellFormednessError):
        Comp(ConstN(2), (Proj(1, 1),))
    with pytest.raises(WellFormednessError):
        Rec(ConstN(1), ConstN(2), ConstN(3))
    with pytest.raises(WellFormednessError):
        ConstN(0)


def test_numeral_roundtrip_and_size():
    v = numeral("0110")
    assert numeral_bits(v) == ("0110", EPS)
    # symbols, commas and parentheses all count: one successor adds 3
    assert term_size(v) == 1 + 3 * 4
    assert v == s0(s1(s1(s0(EPS))))


@given(bitstrings)
def test_numerals_are_g_numerals(bits):
    assert is_g_numeral(numeral(bits))
    assert is_g_numeral(numeral(bits, STAR))


def test_approx_examples():
    assert approx_leq(s0(s1(EPS)), s0(STAR))
    assert not approx_leq(s0(STAR), s0(s1(EPS)))
    assert approx_leq(Var("x"), Var("x"))
    assert not approx_leq(s1(EPS), s0(STAR))


@given(g_numerals, st.integers(0, 9))
def test_truncate_approximates(v, d):
    t = truncate(v, d)
    assert approx_leq(v, t)
    assert term_size(t) <= term_size(v) + 1


@given(g_numerals, g_numerals)
def test_meet_is_the_more_precise_side(a, b):
    if approx_leq(a, b) or approx_leq(b, a):
        m = meet(a, b)
        assert approx_leq(m, a) and approx_leq(m, b)
    else:
        with pytest.raises(ValueError):
            meet(a, b)


@given(closed_terms)
def test_approx_is_reflexive(t):
    assert approx_leq(t, t)
    assert approx_leq(t, STAR)


@given(closed_terms, numerals)
def test_substitution_of_absent_variable_is_identity(t, u):
    assert substitute(t, u, "x") is t


def test_substitution_and_rename():
    t = app(CONCAT, Var("x"), s0(Var("y")))
    assert substitute(t, EPS, "y") == app(CONCAT, Var("x"), s0(EPS))
    assert free_vars(rename(t, {"x": "z"})) == {"z", "y"}


def test_developments():
    rho = make_development([("x", app(TAIL, Var("y"))), ("y", numeral("10"))])
    assert dev_lookup(rho, "x") == (app(TAIL, Var("y")), rho[1:])
    assert dev_lookup(rho, "z") is None
    assert dev_size(rho) == (term_size(rho[0][1]) + 4) + (term_size(rho[1][1]) + 4)
    with pytest.raises(WellFormednessError):
        check_development((("x", EPS), ("x", EPS)))
    with pytest.raises(WellFormednessError):
        check_development((("x", s0(Var("x"))),))
    assert is_subsequence(rho[1:], rho)
    assert not is_subsequence(rho[::-1], rho)


def test_base_symbols_include_subdefinitions():
    base = base_symbols([app(DISCARD, app(zeroize(2), EPS))])
    assert zeroize(2) in base and zeroize(2).g0 in base and ConstN(2) in base
    assert Proj(2, 2) in base and Succ(0) in base


def test_terms_are_hashable_and_structural():
    a = app(zeroize(1), s1(EPS))
    b = App(zeroize(1), (s1(EPS),))
    assert a == b and hash(a) == hash(b)
    assert len({a, b}) == 1
