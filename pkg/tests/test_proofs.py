import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import closed_terms
from pvw.evaluator import value_bits
from pvw.generate import random_proof, random_term
from pvw.proofs import (
    AXIOM_CASES, Congruence, DefAxiom, Equation, Identity, ProofError, SubstRule, Symmetry,
    Transitivity, axiom, axiom_cases, axiom_schema, check, conclusion, cong_at, proof_depth,
    proof_nodes, proof_size, proof_vars, refl, rename_proof, sym, trans,
)
from pvw.stdlib import CONCAT, STDLIB, TAIL
from pvw.terms import EPS, STAR, Succ, Var, app, numeral, s0, s1

BOGUS_GOAL = Equation(EPS, s1(EPS))


def bogus_proofs():
    tail_ax = axiom(TAIL, "s1", {"x": EPS})  # tail(s1 e) = proj2_1(e, tail(e))
    return {
        "forged-axiom": DefAxiom(TAIL, "s1", BOGUS_GOAL),
        "broken-chain": Transitivity(Identity(EPS), Identity(s1(EPS))),
        "nested-forgery": Transitivity(Symmetry(DefAxiom(TAIL, "eps", Equation(s1(EPS), EPS))), refl(EPS)),
        "cong-arity": Transitivity(Congruence(Succ(1), (refl(EPS), refl(EPS))), sym(tail_ax)),
        "star-substitution": SubstRule(DefAxiom(TAIL, "eps", Equation(app(TAIL, EPS), EPS)), STAR, "x"),
    }


@pytest.mark.parametrize("name", sorted(bogus_proofs()))
def test_bogus_proofs_of_eps_equals_s1_eps_are_rejected(name):
    p = bogus_proofs()[name]
    bad = check(p)
    assert bad is not None
    assert bad.location()
    with pytest.raises(ProofError):
        conclusion(p)


def test_violation_locations_are_paths():
    bad = check(bogus_proofs()["nested-forgery"])
    assert bad.location() == "trans.left/sym"


@pytest.mark.parametrize("name", sorted(STDLIB))
def test_schemas_are_well_formed(name):
    f = STDLIB[name]
    for case in axiom_cases(f):
        eq = axiom_schema(f, case)
        assert check(DefAxiom(f, case, eq)) is None
    for case in set(AXIOM_CASES) - set(axiom_cases(f)):
        with pytest.raises(ProofError):
            axiom_schema(f, case)


@pytest.mark.parametrize("name", sorted(STDLIB))
@given(data=st.data())
def test_axioms_are_true(name, data):
    f = STDLIB[name]
    for case in axiom_cases(f):
        schema = axiom_schema(f, case)
        names = sorted({v.name for side in (schema.lhs, schema.rhs) for v in _vars(side)})
        theta = {x: numeral(data.draw(st.text("01", max_size=4))) for x in names}
        eq = axiom(f, case, theta).instance
        assert value_bits(eq.lhs) == value_bits(eq.rhs)


def _vars(t):
    from pvw.terms import free_vars
    return [Var(x) for x in free_vars(t)]


def test_size_counts_every_node():
    a = axiom(TAIL, "eps")
    p = trans(a, sym(a))
    e = Equation(app(TAIL, EPS), EPS)
    assert proof_size(a) >= e.size()
    assert proof_size(p) > 2 * proof_size(a)
    assert proof_nodes(p) == 4 and proof_depth(p) == 3


def test_congruence_and_substitution():
    ax = axiom(TAIL, "s1", {"x": Var("y")})
    p = cong_at(CONCAT, (app(TAIL, s1(Var("y"))), EPS), 0, ax)
    eq = conclusion(p)
    assert eq.lhs == app(CONCAT, app(TAIL, s1(Var("y"))), EPS)
    sp = SubstRule(p, s0(EPS), "y")
    assert conclusion(sp).lhs == app(CONCAT, app(TAIL, s1(s0(EPS))), EPS)
    assert "y" in proof_vars(sp)
    renamed = rename_proof(sp, {"y": "z"})
    assert check(renamed) is None
    assert conclusion(renamed) == conclusion(sp)


@given(closed_terms, st.integers(0, 2**31))
def test_generated_proofs_check_and_are_sound(t, seed):
    rng = random.Random(seed)
    p = random_proof(rng, t, 5)
    assert check(p) is None
    eq = conclusion(p)
    assert eq.lhs == t
    assert value_bits(eq.lhs) == value_bits(eq.rhs)
    assert eq != BOGUS_GOAL


def test_generated_proofs_respect_depth():
    rng = random.Random(7)
    for _ in range(50):
        t = random_term(rng, 3)
        assert proof_depth(random_proof(rng, t, 5)) <= 6
