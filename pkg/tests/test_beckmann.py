import pytest

from pvw.beckmann import BeckmannInstance, chain_proof, fixtures, growth_table, instance
from pvw.calculus import conclusions, validate
from pvw.evaluator import value_bits
from pvw.proofs import check, conclusion
from pvw.terms import EPS, numeral


def test_instance_shape():
    inst = instance(2, 3)
    assert inst.n == numeral("111")
    assert value_bits(inst.term) == ""
    with pytest.raises(ValueError):
        BeckmannInstance(0, EPS)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_chain_proof_checks(k):
    p = chain_proof(instance(k, 4))
    assert check(p) is None
    eq = conclusion(p)
    assert eq.lhs == instance(k, 4).term and eq.rhs == EPS


@pytest.mark.parametrize("k", [1, 2, 3])
def test_growth(k):
    rows = growth_table(k, range(1, 6))
    assert len({r.approx_nodes for r in rows}) == 1
    exact = [r.exact_nodes for r in rows]
    assert all(a < b for a, b in zip(exact, exact[1:]))
    assert len({r.proof_nodes for r in rows}) == 1
    assert all(r.transform_ok for r in rows)


def test_transform_under_nonempty_env():
    rho = (("q", numeral("10")),)
    rows = growth_table(1, [2, 3], rho)
    assert all(r.transform_ok for r in rows)


def test_fixtures_validate():
    fx = fixtures(instance(1, 2))
    for key in ("approx", "exact"):
        assert validate(fx[key]) is None
        assert conclusions(fx[key])[-1].value == EPS
    assert validate(fx["transformed"].dag) is None
