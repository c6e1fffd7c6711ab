"""Regenerate the fixture corpus under fixtures/.

Writes computations (.comp), proofs (.proof), a definitions file and a
manifest listing rule coverage. Run from the repository root:

    python3 scripts/make_fixtures.py
"""
from __future__ import annotations

import argparse
import json
from collections import Counter
from pathlib import Path

from pvw.beckmann import chain_proof, instance
from pvw.calculus import validate
from pvw.evaluator import approx_eval, exact_eval, numeral_comp
from pvw.formats import Defs, emit_comp, emit_defs, emit_proof, parse_defs
from pvw.proofs import axiom, check, cong_at, sym, trans
from pvw.stdlib import CONCAT, DISCARD, DUP, IFEMPTY, SWAPCAT, TAIL, zeroize
from pvw.terms import EPS, ConstN, Proj, Var, app, numeral, s0, s1

DEFS_TEXT = """(defs
  (def double (comp (named concat) (proj 1 1) (proj 1 1)))
  (def last (rec eps (proj 2 1) (proj 2 1)))
  (def pad1 (comp s1 (proj 1 1))))
"""


def computation_cases(defs: Defs):
    x, y = Var("x"), Var("y")
    n3, n5 = numeral("101"), numeral("11010")
    rho_x = (("x", numeral("10")),)
    rho_xy = (("x", app(TAIL, y)), ("y", numeral("0110")))
    double = defs.lookup("double")
    cases = {
        "eps_empty": (EPS, ()),
        "eps_env": (EPS, rho_x),
        "numeral_env": (n3, rho_x),
        "var_chain": (s0(x), rho_xy),
        "const_fn": (app(ConstN(2), app(TAIL, n3), EPS), ()),
        "proj": (app(Proj(2, 2), x, app(DUP, n3)), rho_x),
        "tail": (app(TAIL, n5), ()),
        "concat": (app(CONCAT, x, y), rho_xy),
        "swapcat": (app(SWAPCAT, n3, s1(EPS)), ()),
        "dup_var": (app(DUP, s1(x)), rho_x),
        "ifempty": (app(IFEMPTY, n3, EPS), ()),
        "zeroize2": (app(zeroize(2), s0(x)), rho_x),
        "discard_nested": (app(DISCARD, app(zeroize(1), n5)), ()),
        "double": (app(double, numeral("10")), ()),
        "last_var": (app(defs.lookup("last"), y), rho_xy),
        "pad1": (app(defs.lookup("pad1"), app(TAIL, x)), rho_x),
    }
    out = {}
    for name, (t, rho) in cases.items():
        out[f"{name}_exact"] = exact_eval(t, rho)
        out[f"{name}_approx"] = approx_eval(t, rho)
    out["tail_demand1"] = approx_eval(app(TAIL, n5), (), 1)
    out["concat_demand2"] = approx_eval(app(CONCAT, x, y), rho_xy, 2)
    for k in (1, 2, 3):
        inst = instance(k, 3)
        out[f"beckmann_k{k}_approx"] = approx_eval(inst.term)
        out[f"beckmann_k{k}_exact"] = exact_eval(inst.term)
    out["eps_numeral"] = numeral_comp(EPS)
    # source side of fixtures/proof/tail_unfold.proof
    out["tail_110_exact"] = exact_eval(app(TAIL, s1(numeral("10"))))
    return out


def proof_cases():
    n = numeral("10")
    tail_ax = axiom(TAIL, "s1", {"x": n})
    proofs = {f"beckmann_k{k}_chain": chain_proof(instance(k, 3)) for k in (1, 2, 3)}
    proofs["tail_unfold"] = tail_ax
    proofs["tail_roundtrip"] = trans(tail_ax, sym(tail_ax))
    proofs["dup_comp"] = axiom(DUP, "comp", {"x1": n})
    proofs["discard_under_cong"] = cong_at(DISCARD, (app(TAIL, s1(n)),), 0, tail_ax)
    return proofs


def rule_coverage(dags) -> Counter:
    cover = Counter()
    for dag in dags:
        for node in dag.nodes:
            cover[node.rule.kind] += 1
    return cover


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="fixtures")
    args = ap.parse_args(argv)
    root = Path(args.out)
    (root / "comp").mkdir(parents=True, exist_ok=True)
    (root / "proof").mkdir(parents=True, exist_ok=True)
    defs = parse_defs(DEFS_TEXT)
    (root / "defs.defs").write_text(emit_defs(defs) + "\n")
    comps = computation_cases(defs)
    for name, dag in comps.items():
        bad = validate(dag)
        if bad is not None:
            raise SystemExit(f"{name}: generated computation is invalid: {bad}")
        (root / "comp" / f"{name}.comp").write_text(emit_comp(dag, defs) + "\n")
    proofs = proof_cases()
    for name, p in proofs.items():
        bad = check(p)
        if bad is not None:
            raise SystemExit(f"{name}: generated proof is invalid: {bad}")
        (root / "proof" / f"{name}.proof").write_text(emit_proof(p, defs) + "\n")
    cover = rule_coverage(comps.values())
    manifest = {"computations": sorted(comps), "proofs": sorted(proofs), "rule_coverage": dict(sorted(cover.items()))}
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(json.dumps(manifest["rule_coverage"], indent=2))
    print(f"{len(comps)} computations, {len(proofs)} proofs written to {root}")


if __name__ == "__main__":
    main()
