"""Random terms, developments and equational proofs for tests and scripts."""
from __future__ import annotations

import random

from .proofs import (
    DefAxiom, Identity, SubstRule, Symmetry, axiom_cases, axiom_schema,
    cong_at, conclusion, instantiate, match, proof_depth, trans,
)
from .stdlib import GENERATOR_SYMBOLS
from .terms import (
    App, Succ, Term, Var, arity, free_vars, is_g_numeral, numeral, substitute,
)


def random_numeral(rng: random.Random, max_len=4) -> Term:
    return numeral("".join(rng.choice("01") for _ in range(rng.randint(0, max_len))))


def random_term(rng: random.Random, depth: int, names=(), symbols=GENERATOR_SYMBOLS,
                leaf_p=0.25) -> Term:
    """A random term of nesting depth at most ``depth`` over ``symbols``."""
    if depth <= 0 or rng.random() < leaf_p:
        if names and rng.random() < 0.5:
            return Var(rng.choice(list(names)))
        return random_numeral(rng, 3)
    if rng.random() < 0.2:
        return App(Succ(rng.randint(0, 1)), (random_term(rng, depth - 1, names, symbols, leaf_p),))
    f = rng.choice(symbols)
    return App(f, tuple(random_term(rng, depth - 1, names, symbols, leaf_p) for _ in range(arity(f))))


def random_env(rng: random.Random, names, depth=2, symbols=GENERATOR_SYMBOLS) -> tuple:
    """A development binding ``names``; each term only uses the names bound after it."""
    rho = []
    later = []
    for x in reversed(list(names)):
        rho.insert(0, (x, random_term(rng, depth, tuple(later), symbols)))
        later.append(x)
    return tuple(rho)


# ---------------------------------------------------------------------------
# Proofs


def positions(t: Term, max_depth: int, prefix=()):
    """Argument paths to subterms of ``t`` at most ``max_depth`` deep."""
    yield prefix, t
    if max_depth > 0 and isinstance(t, App):
        for i, a in enumerate(t.args):
            yield from positions(a, max_depth - 1, prefix + (i,))


def replace_at(t: Term, path, new: Term) -> Term:
    if not path:
        return new
    i = path[0]
    args = list(t.args)
    args[i] = replace_at(args[i], path[1:], new)
    return App(t.f, tuple(args))


def wrap_at(t: Term, path, p):
    """Lift a proof about the subterm at ``path`` to the whole term."""
    if not path:
        return p
    i = path[0]
    return cong_at(t.f, t.args, i, wrap_at(t.args[i], path[1:], p))


def _fill(rng, eq, theta):
    schema_vars = free_vars(eq.lhs) | free_vars(eq.rhs)
    for x in schema_vars:
        theta.setdefault(x, random_numeral(rng, 2))
    return instantiate(eq, theta)


def rewrites(rng: random.Random, s: Term, fold=True) -> list:
    """Axiom proofs whose one side is exactly ``s``: unfolds and (as symmetry) folds."""
    out = []
    if isinstance(s, App) and not isinstance(s.f, Succ):
        for case in axiom_cases(s.f):
            schema = axiom_schema(s.f, case)
            theta = {}
            if match(schema.lhs, s, theta):
                out.append(DefAxiom(s.f, case, _fill(rng, schema, theta)))
    if fold and not is_g_numeral(s):
        for f in _fold_candidates(s):
            for case in axiom_cases(f):
                schema = axiom_schema(f, case)
                theta = {}
                if match(schema.rhs, s, theta):
                    out.append(Symmetry(DefAxiom(f, case, _fill(rng, schema, theta))))
    return out


def _fold_candidates(s: Term) -> list:
    """Symbols whose defining axiom might have ``s`` as its right-hand side."""
    from .terms import Comp, Proj, Rec
    cands = []
    if isinstance(s, App):
        for f in GENERATOR_SYMBOLS:
            if isinstance(f, Comp) and s.f == f.g:
                cands.append(f)
            if isinstance(f, Rec) and s.f in (f.g_eps, f.g0, f.g1):
                cands.append(f)
    cands.append(Proj(2, 1))
    return cands


def rewrite_step(rng: random.Random, t: Term, max_depth: int, fold=True):
    """A proof of t = t' changing one subterm, of proof depth at most ``max_depth``."""
    sites = []
    for path, s in positions(t, max_depth - 2):
        if isinstance(s, Var):
            continue
        for p in rewrites(rng, s, fold):
            sites.append((path, p))
    if not sites:
        return None
    # pick the axiom case first so that cheap projection folds do not dominate
    by_case = {}
    for path, p in sites:
        ax = p.p if isinstance(p, Symmetry) else p
        by_case.setdefault((ax.case, ax is p), []).append((path, p))
    path, p = rng.choice(by_case[rng.choice(sorted(by_case))])
    return wrap_at(t, path, p)


def random_proof(rng: random.Random, t: Term, max_depth=5, fold=True):
    """A random derivation of t = u with proof depth at most ``max_depth``."""
    kind = rng.choice(["step", "step", "trans", "trans", "subst", "sym"])
    if max_depth >= 3 and kind == "trans":
        p = random_proof(rng, t, max_depth - 1, fold)
        if p is not None:
            q = random_proof(rng, conclusion(p).rhs, max_depth - 1, fold)
            if q is not None:
                return trans(p, q)
            return p
    if max_depth >= 3 and kind == "subst":
        p = _subst_proof(rng, t, max_depth - 1, fold)
        if p is not None:
            return p
    if max_depth >= 3 and kind == "sym":
        p = rewrite_step(rng, t, max_depth - 1, fold)
        if p is not None:
            # t = u by p, then u = t and back again via symmetry
            return trans(p, Symmetry(p)) if max_depth >= 4 and rng.random() < 0.5 else p
    p = rewrite_step(rng, t, max_depth, fold)
    return p if p is not None else Identity(t)


def _subst_proof(rng, t, max_depth, fold):
    """Abstract a closed subterm into a fresh variable, prove, then substitute back."""
    cands = [(path, s) for path, s in positions(t, 3) if path and isinstance(s, App) and not free_vars(s)]
    if not cands:
        return None
    path, s = rng.choice(cands)
    taken = free_vars(t)
    x = next(f"z{i}" for i in range(1, 1000) if f"z{i}" not in taken)
    t0 = replace_at(t, path, Var(x))
    p = rewrite_step(rng, t0, max_depth, fold)
    if p is None:
        return None
    if substitute(conclusion(p).lhs, s, x) != t:
        return None
    return SubstRule(p, s, x)


def random_proofs(rng: random.Random, t: Term, count: int, max_depth=5, fold=True) -> list:
    out = []
    for _ in range(count * 4):
        if len(out) >= count:
            break
        p = random_proof(rng, t, max_depth, fold)
        if not isinstance(p, Identity) and proof_depth(p) <= max_depth:
            out.append(p)
    return out


__all__ = [
    "random_numeral", "random_term", "random_env", "positions", "replace_at",
    "wrap_at", "rewrites", "rewrite_step", "random_proof", "random_proofs",
]
