"""Randomized instance generators shared by the transformer and acceptance tests."""
from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from pvw.calculus import CompDag, Node, conclusions, validate
from pvw.evaluator import EvaluationError, approx_eval, exact_eval
from pvw.formats import parse_comp, parse_defs, parse_proof
from pvw.generate import random_env, random_proof, random_term
from pvw.proofs import axiom_cases, axiom_schema, conclusion, instantiate, proof_depth
from pvw.stdlib import CONCAT, STDLIB
from pvw.terms import App, Var, free_vars, is_g_numeral, substitute

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def merge(*dags: CompDag) -> CompDag:
    """Disjoint union of computations, conclusions in order."""
    nodes = []
    for d in dags:
        off = len(nodes)
        nodes += [Node(tuple(p + off for p in n.premises), n.rule, n.stmt) for n in d.nodes]
    return CompDag(tuple(nodes))


def evaluate(rng, t, rho):
    return rng.choice([approx_eval, exact_eval])(t, rho)


def load_fixtures():
    defs = parse_defs((FIXTURES / "defs.defs").read_text())
    comps = {p.stem: parse_comp(p.read_text(), defs) for p in sorted((FIXTURES / "comp").glob("*.comp"))}
    proofs = {p.stem: parse_proof(p.read_text(), defs) for p in sorted((FIXTURES / "proof").glob("*.proof"))}
    return defs, comps, proofs


# ---------------------------------------------------------------------------
# Proof walks


@dataclass
class WalkCase:
    dag: CompDag
    target: object
    proof: object
    direction: str
    untouched: list


def walk_cases(rng: random.Random, count: int, max_depth=5):
    """Computations with a conclusion on one side of a random proof, plus a bystander."""
    made = 0
    while made < count:
        names = ("y1", "y2") if rng.random() < 0.5 else ()
        t = random_term(rng, 3, names)
        rho = random_env(rng, names, 1)
        p = random_proof(rng, t, max_depth)
        if proof_depth(p) > max_depth:
            continue
        eq = conclusion(p)
        direction = rng.choice(["fwd", "bwd"])
        src = eq.lhs if direction == "fwd" else eq.rhs
        try:
            main = evaluate(rng, src, rho)
            other = evaluate(rng, random_term(rng, 2, names), rho)
        except EvaluationError:
            continue
        dag = merge(other, main) if rng.random() < 0.5 else merge(main, other)
        target = conclusions(main)[0]
        untouched = [s for s in conclusions(dag)]
        untouched.remove(target)
        made += 1
        yield WalkCase(dag, target, p, direction, untouched)


# ---------------------------------------------------------------------------
# Axiom unfold and fold


@dataclass
class AxiomCase:
    dag: CompDag
    target: object
    f: object
    case: str
    instance: object
    mode: str


def axiom_cases_for(rng: random.Random, f, per_case: int):
    """Unfold and fold instances for every applicable case of ``f``."""
    for case in axiom_cases(f):
        schema = axiom_schema(f, case)
        made = 0
        while made < per_case:
            names = ("y1",) if made % 2 else ()
            theta = {x: random_term(rng, 2, names) for x in free_vars(schema.lhs) | free_vars(schema.rhs)}
            eq = instantiate(schema, theta)
            rho = random_env(rng, names, 1)
            mode = "unfold" if made % 2 == 0 else "fold"
            src = eq.lhs if mode == "unfold" else eq.rhs
            if is_g_numeral(src):
                mode, src = "unfold", eq.lhs
            dag = evaluate(rng, src, rho)
            made += 1
            yield AxiomCase(dag, conclusions(dag)[0], f, case, eq, mode)


def all_axiom_cases(rng, per_case: int):
    for name in sorted(STDLIB):
        yield from axiom_cases_for(rng, STDLIB[name], per_case)


# ---------------------------------------------------------------------------
# Substitution


@dataclass
class SubstCase:
    dag: CompDag
    targets: list
    u: object
    x: str


def subst_cases(rng: random.Random, count: int, x="x"):
    """Computations of t_i[u/x] together with the pairs (conclusion, t_i)."""
    made = 0
    while made < count:
        names = ("y1", "y2") if rng.random() < 0.5 else ()
        rho = random_env(rng, names, 1)
        u = random_term(rng, 2, names)
        ts = []
        for _ in range(rng.randint(1, 3)):
            t = random_term(rng, 3, names + (x,))
            if x not in free_vars(t):
                t = App(CONCAT, (t, Var(x)))
            ts.append(t)
        ev = rng.choice([approx_eval, exact_eval])
        dag = merge(*(ev(substitute(t, u, x), rho) for t in ts))
        if validate(dag) is not None:
            continue
        made += 1
        yield SubstCase(dag, list(zip(conclusions(dag), ts)), u, x)
