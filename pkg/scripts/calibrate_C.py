"""Measure the smallest C with M <= C (T + N + 1)^2 over random computations.

Evaluates random terms exactly and approximately, transforms some of them
along random proofs, and reports the distribution of M / (T + N + 1)^2.

    python3 scripts/calibrate_C.py --count 500 --seed 0
"""
from __future__ import annotations

import argparse
import json
import random
import statistics

from pvw.beckmann import fixtures, instance
from pvw.calculus import audit_report, conclusions
from pvw.evaluator import approx_eval, exact_eval
from pvw.generate import random_env, random_proof, random_term
from pvw.proofs import conclusion
from pvw.stdlib import STDLIB
from pvw.transform import TransformError, transform_along_proof


def sample(rng: random.Random, count: int):
    syms = tuple(STDLIB[k] for k in sorted(STDLIB))
    for _ in range(count):
        names = ("y1", "y2") if rng.random() < 0.5 else ()
        t = random_term(rng, 5, names, syms)
        rho = random_env(rng, names, 2)
        ev = rng.choice([exact_eval, approx_eval])
        dag = ev(t, rho)
        yield "eval", dag
        p = random_proof(rng, t, 5)
        if conclusion(p).lhs == t:
            try:
                yield "transform", transform_along_proof(dag, conclusions(dag)[0], p).dag
            except TransformError:
                pass
    for k in (1, 2, 3):
        for n in range(1, 9):
            fx = fixtures(instance(k, n))
            yield "beckmann", fx["exact"]
            yield "beckmann", fx["transformed"].dag


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--C", type=float, default=8)
    args = ap.parse_args(argv)

    rng = random.Random(args.seed)
    by_kind: dict = {}
    worst = (0.0, None)
    for kind, dag in sample(rng, args.count):
        c = audit_report(dag, args.C)["minimal_C"]
        by_kind.setdefault(kind, []).append(c)
        if c > worst[0]:
            worst = (c, kind)
    summary = {kind: {"n": len(cs), "max": max(cs), "median": statistics.median(cs)}
               for kind, cs in by_kind.items()}
    summary["overall_max"] = worst[0]
    summary["holds_with_C"] = worst[0] <= args.C
    print(json.dumps(summary, indent=2))
    return 0 if summary["holds_with_C"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
