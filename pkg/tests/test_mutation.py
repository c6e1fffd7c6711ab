import random
from collections import Counter

import pytest

from mutations import FIELDS, mutate
from oracle import oracle_accepts
from suites import load_fixtures
from pvw.calculus import RULE_KINDS, validate

_, COMPS, PROOFS = load_fixtures()


def rule_coverage(comps) -> Counter:
    return Counter(n.rule.kind for d in comps.values() for n in d.nodes)


def test_corpus_size_and_coverage():
    assert len(COMPS) >= 25
    cov = rule_coverage(COMPS)
    for kind in RULE_KINDS:
        assert cov[kind] >= 2, kind


@pytest.mark.parametrize("name", sorted(COMPS))
def test_fixture_validates(name):
    dag = COMPS[name]
    assert validate(dag) is None
    assert oracle_accepts(dag)


def run_mutations(comps, count: int, seed=0) -> dict:
    """Mutate one field at a time and compare the validator with the oracle."""
    rng = random.Random(seed)
    names = sorted(comps)
    stats = Counter()
    while stats["mutants"] < count:
        field = FIELDS[stats["mutants"] % len(FIELDS)]
        got = mutate(rng, comps[rng.choice(names)], field)
        if got is None:
            continue
        dag = got[0]
        stats["mutants"] += 1
        ours = validate(dag) is None
        theirs = oracle_accepts(dag)
        if not theirs:
            stats["breaking"] += 1
            stats["false_accepts"] += ours
        else:
            stats["false_rejects"] += not ours
    return dict(stats)


def test_mutations_have_no_false_accepts():
    stats = run_mutations(COMPS, 600)
    assert stats["mutants"] >= 500
    assert stats["breaking"] > 400
    assert stats.get("false_accepts", 0) == 0
    assert stats.get("false_rejects", 0) == 0


@pytest.mark.parametrize("field", FIELDS)
def test_each_field_is_mutated(field):
    rng = random.Random(3)
    dag = COMPS["tail_exact"]
    got = None
    for _ in range(20):
        got = mutate(rng, dag, field)
        if got is not None:
            break
    assert got is not None and got[2] == field
    assert got[0] != dag
