"""Acceptance criteria 1 to 10, one test and one PASS/FAIL line each."""
import random
from functools import lru_cache

from oracle import oracle_accepts
from suites import all_axiom_cases, load_fixtures, subst_cases, walk_cases
from test_mutation import rule_coverage, run_mutations
from test_proofs import bogus_proofs
from pvw.beckmann import fixtures, growth_row, instance
from pvw.calculus import RULE_KINDS, Statement, audit_report, conclusions, validate
from pvw.evaluator import exact_eval, extend_succ, numeral_comp, to_bits, value_bits
from pvw.generate import random_numeral, random_term
from pvw.proofs import axiom_cases, check, proof_depth, proof_size
from pvw.stdlib import STDLIB
from pvw.terms import EPS, approx_leq, is_star_free, s1, successor_count, term_size
from pvw.transform import fold_axiom, subst_in, subst_out, transform_along_proof, unfold_axiom

C = 8
BAD_STMT = Statement(s1(EPS), (), EPS)


def report(capsys, n: int, ok: bool, detail: str):
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


# ---------------------------------------------------------------------------
# Suites, built once and shared by criteria 3, 9 and 10


@lru_cache(maxsize=None)
def suite1():
    _, comps, _ = load_fixtures()
    return comps


@lru_cache(maxsize=None)
def suite2():
    rng = random.Random(2)
    syms = tuple(STDLIB[k] for k in sorted(STDLIB))
    terms = [random_term(rng, 6, (), syms, leaf_p=0.15) for _ in range(1000)]
    return [(t, exact_eval(t)) for t in terms]


@lru_cache(maxsize=None)
def suite5():
    rng = random.Random(5)
    rows = []
    for case in subst_cases(rng, 500):
        total = sum(term_size(s.main) for s, _ in case.targets)
        lifted = subst_in(case.dag, case.targets, case.u, case.x)
        lowered = subst_out(lifted.dag, conclusions(lifted.dag), case.u, case.x)
        rows.append((case, total, lifted, lowered))
    return rows


@lru_cache(maxsize=None)
def suite6():
    rng = random.Random(6)
    rows = []
    for case in all_axiom_cases(rng, 8):
        op = unfold_axiom if case.mode == "unfold" else fold_axiom
        rows.append((case, op(case.dag, case.target, (case.f, case.case, case.instance))))
    return rows


@lru_cache(maxsize=None)
def suite7():
    rng = random.Random(7)
    return [(case, transform_along_proof(case.dag, case.target, case.proof, case.direction))
            for case in walk_cases(rng, 150)]


@lru_cache(maxsize=None)
def suite8():
    return [growth_row(k, n) for k in (1, 2, 3) for n in range(1, 9)]


@lru_cache(maxsize=None)
def suite8_dags():
    out = []
    for k in (1, 2, 3):
        for n in range(1, 9):
            fx = fixtures(instance(k, n))
            out += [fx["approx"], fx["exact"], fx["transformed"].dag]
    return out


def transformer_dags():
    out = []
    for _, _, lifted, lowered in suite5():
        out += [lifted.dag, lowered.dag]
    out += [res.dag for _, res in suite6()]
    out += [res.dag for _, res in suite7()]
    return out


def all_dags():
    return (list(suite1().values()) + [d for _, d in suite2()] + transformer_dags()
            + [case.dag for case, *_ in suite5()] + [case.dag for case, _ in suite6()]
            + [case.dag for case, _ in suite7()] + suite8_dags())


# ---------------------------------------------------------------------------


def test_criterion_1_corpus_and_mutations(capsys):
    comps = suite1()
    cov = rule_coverage(comps)
    valid = all(validate(d) is None and oracle_accepts(d) for d in comps.values())
    covered = all(cov[k] >= 2 for k in RULE_KINDS)
    stats = run_mutations(comps, 1000, seed=11)
    ok = (len(comps) >= 25 and valid and covered and stats["mutants"] >= 500
          and stats.get("false_accepts", 0) == 0)
    report(capsys, 1, ok, f"{len(comps)} fixtures, min rule coverage {min(cov[k] for k in RULE_KINDS)}, "
           f"{stats['mutants']} mutants, {stats['breaking']} schema-breaking, "
           f"{stats.get('false_accepts', 0)} false accepts")


def test_criterion_2_exact_eval_matches_denotation(capsys):
    rows = suite2()
    bad = [t for t, d in rows if not is_star_free(t) or validate(d) is not None
           or to_bits(conclusions(d)[0].value) != value_bits(t)]
    report(capsys, 2, len(rows) >= 1000 and not bad, f"{len(rows)} terms, {len(bad)} mismatches")


def test_criterion_3_value_size_bound(capsys):
    dags = list(suite1().values()) + [d for _, d in suite2()] + transformer_dags()
    bad = [d for d in dags if any(term_size(n.stmt.value) > 3 * len(d) for n in d.nodes)]
    report(capsys, 3, not bad, f"{len(dags)} computations, {len(bad)} violations")


def test_criterion_4_numeral_and_successor_sizes(capsys):
    rng = random.Random(4)
    bad = 0
    checked = 0
    for _ in range(300):
        v = random_numeral(rng, 8)
        l = successor_count(v)
        rho = (("q", random_numeral(rng, 3)),)
        bad += len(numeral_comp(v)) != l + 1
        bad += len(numeral_comp(v, rho)) != 2 * l + 2
        checked += 2
    # extension keeps the hypothesis that <v,()>|v already occurs in the computation
    ext = 0
    for d in list(suite1().values()) + [d for _, d in suite2()[:300]]:
        stmts = set(d.statements())
        for st in conclusions(d):
            if Statement(st.value, (), st.value) not in stmts:
                continue
            for bit in (0, 1):
                out = extend_succ(d, st, bit)
                bad += validate(out) is not None or len(out) - len(d) > 2
                ext += 1
    report(capsys, 4, not bad, f"{checked} numeral computations, {ext} extensions, {bad} violations")


def test_criterion_5_substitution_lemmas(capsys):
    rows = suite5()
    bad = {"size_in": 0, "size_out": 0, "M": 0, "round_trip": 0, "invalid": 0}
    for case, total, lifted, lowered in rows:
        bad["invalid"] += validate(lifted.dag) is not None or validate(lowered.dag) is not None
        bad["size_in"] += len(lifted.dag) > len(case.dag) + total
        bad["size_out"] += len(lowered.dag) > len(lifted.dag) + total
        bad["M"] += not (lifted.ledger.overall and lowered.ledger.overall)
        want = sorted(map(str, conclusions(case.dag)))
        bad["round_trip"] += sorted(map(str, conclusions(lowered.dag))) != want
    report(capsys, 5, len(rows) >= 500 and not any(bad.values()),
           f"{len(rows)} instances per direction, failures {bad}")


def test_criterion_6_unfold_and_fold(capsys):
    rows = suite6()
    bad = 0
    seen = set()
    for case, res in rows:
        seen.add((case.f, case.case))
        bad += (validate(res.dag) is not None or len(res.dag) > len(case.dag) + case.instance.size()
                or not approx_leq(res.conclusion.value, case.target.value))
    want = {(f, c) for f in STDLIB.values() for c in axiom_cases(f)}
    report(capsys, 6, len(rows) >= 200 and seen == want and not bad,
           f"{len(rows)} instances over {len(seen)}/{len(want)} symbol cases, {bad} violations")


def test_criterion_7_proof_walks(capsys):
    rows = suite7()
    bad = {"size": 0, "approx": 0, "untouched": 0, "ledger": 0, "invalid": 0, "depth": 0}
    for case, res in rows:
        bad["depth"] += proof_depth(case.proof) > 5
        bad["invalid"] += validate(res.dag) is not None
        bad["size"] += len(res.dag) > len(case.dag) + proof_size(case.proof)
        bad["approx"] += not approx_leq(res.conclusion.value, case.target.value)
        after = conclusions(res.dag)
        bad["untouched"] += not all(s in after for s in case.untouched)
        bad["ledger"] += not res.ledger.overall
    report(capsys, 7, len(rows) >= 100 and not any(bad.values()), f"{len(rows)} proofs, failures {bad}")


def test_criterion_8_beckmann(capsys):
    rows = suite8()
    ok = True
    lines = []
    for k in (1, 2, 3):
        rk = [r for r in rows if r.k == k]
        approx_const = len({r.approx_nodes for r in rk}) == 1
        exact = [r.exact_nodes for r in rk]
        increasing = all(a < b for a, b in zip(exact, exact[1:]))
        proof_const = len({r.proof_nodes for r in rk}) == 1
        transformed = all(r.transform_ok for r in rk)
        ok = ok and approx_const and increasing and proof_const and transformed
        lines.append(f"k={k}: approx {rk[0].approx_nodes}, exact {exact[0]}..{exact[-1]}, "
                     f"proof nodes {rk[0].proof_nodes}")
    report(capsys, 8, ok, "; ".join(lines))


def test_criterion_9_M_bound(capsys):
    dags = all_dags()
    worst = 0.0
    bad = 0
    for d in dags:
        rep = audit_report(d, C)
        worst = max(worst, rep["minimal_C"])
        bad += not rep["M_bound_holds"]
    report(capsys, 9, not bad, f"{len(dags)} computations, C={C}, observed max minimal_C {worst:.4f}")


def test_criterion_10_consistency(capsys):
    dags = all_dags()
    valid = [d for d in dags if validate(d) is None]
    hits = sum(BAD_STMT in set(d.statements()) for d in valid)
    rejected = []
    for name, p in bogus_proofs().items():
        v = check(p)
        rejected.append(v is not None and bool(v.location()))
    ok = hits == 0 and len(rejected) == 5 and all(rejected)
    report(capsys, 10, ok, f"{len(valid)} valid computations, {hits} contain the bad statement, "
           f"{sum(rejected)}/5 bogus proofs rejected with a location")
