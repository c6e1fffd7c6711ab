"""Denotational semantics, exact computations and demand-driven approximate evaluation.

Bit strings are plain ``str`` objects over ``"01"``; the first character is
the outermost successor, so ``s_i`` prepends.
"""
from __future__ import annotations

import math
import sys
from functools import lru_cache

from .calculus import (
    COMP_RULE, EPS_RULE, EPSN_RULE, REC_EPS, STAR_RULE, SUBST, CompDag,
    DagBuilder, Statement, const_rule, proj_rule, rec_succ_rule, succ_rule,
    succn_rule,
)
from .terms import (
    EMPTY, EPS, STAR, App, Comp, ConstN, Eps, Proj, Rec, Star, Succ, Term, Var,
    arity, dev_lookup, is_g_numeral, is_star_free, numeral, numeral_bits, succ, truncate,
)

sys.setrecursionlimit(max(sys.getrecursionlimit(), 200000))

FULL = math.inf


class EvaluationError(Exception):
    pass


# ---------------------------------------------------------------------------
# Denotation


def to_term(bits: str) -> Term:
    return numeral(bits)


def to_bits(v: Term) -> str:
    bits, leaf = numeral_bits(v)
    if leaf != EPS:
        raise EvaluationError(f"{v} is not an exact numeral")
    return bits


@lru_cache(maxsize=None)
def _denote(f, args: tuple) -> str:
    if isinstance(f, (Eps, ConstN)):
        return ""
    if isinstance(f, Succ):
        return str(f.bit) + args[0]
    if isinstance(f, Proj):
        return args[f.i - 1]
    if isinstance(f, Comp):
        return _denote(f.g, tuple(_denote(h, args) for h in f.hs))
    if isinstance(f, Rec):
        x, rest = args[0], args[1:]
        if not x:
            return _denote(f.g_eps, rest)
        tail = x[1:]
        return _denote(f.step(int(x[0])), (tail, _denote(f, (tail,) + rest)) + rest)
    raise TypeError(f"not a function symbol: {f!r}")


def denote(f, args) -> str:
    args = tuple(args)
    if len(args) != arity(f):
        raise EvaluationError(f"{f} expects {arity(f)} arguments, got {len(args)}")
    if any(set(a) - {"0", "1"} for a in args):
        raise EvaluationError("arguments must be bit strings")
    return _denote(f, args)


def value_bits(t: Term, rho=EMPTY, _memo=None) -> str:
    """Exact value of a Star-free term under a development."""
    memo = {} if _memo is None else _memo
    key = (t, rho)
    if key in memo:
        return memo[key]
    if isinstance(t, Star):
        raise EvaluationError("Star has no exact value")
    if isinstance(t, Var):
        found = dev_lookup(rho, t.name)
        if found is None:
            raise EvaluationError(f"unbound variable {t.name}")
        out = value_bits(found[0], found[1], memo)
    else:
        out = _denote(t.f, tuple(value_bits(a, rho, memo) for a in t.args))
    memo[key] = out
    return out


# ---------------------------------------------------------------------------
# Numeral computations


def _numeral_node(b: DagBuilder, v: Term, rho, memo: dict) -> int:
    """Node deriving <v, rho> | v for a g-numeral v."""
    key = (v, rho)
    if key in memo:
        return memo[key]
    if isinstance(v, Star):
        k = b.add(STAR_RULE, (), Statement(STAR, rho, STAR))
    elif v == EPS:
        if rho == EMPTY:
            k = b.add(EPSN_RULE, (), Statement(EPS, EMPTY, EPS))
        else:
            k = b.add(EPS_RULE, (_numeral_node(b, EPS, EMPTY, memo),), Statement(EPS, rho, EPS))
    else:
        bit, rest = v.f.bit, v.args[0]
        if rho == EMPTY:
            k = b.add(succn_rule(bit), (_numeral_node(b, rest, EMPTY, memo),), Statement(v, EMPTY, v))
        else:
            top = _numeral_node(b, v, EMPTY, memo)
            below = _numeral_node(b, rest, rho, memo)
            k = b.add(succ_rule(bit), (top, below), Statement(v, rho, v))
    memo[key] = k
    return k


def numeral_comp(v: Term, rho=EMPTY) -> CompDag:
    if not is_g_numeral(v):
        raise EvaluationError(f"{v} is not a g-numeral")
    b = DagBuilder()
    b.roots = [_numeral_node(b, v, rho, {})]
    return b.to_dag()


def ensure_numeral(b: DagBuilder, v: Term, rho=EMPTY, avoid_roots=True) -> int:
    """Find or build <v,rho> | v inside a builder, reusing existing nodes.

    With ``avoid_roots`` conclusions are never reused, so they stay conclusions.
    """
    st = Statement(v, rho, v)
    k = b.find(st, avoid_roots=avoid_roots)
    if k is not None:
        return k
    if isinstance(v, Star):
        return b.add(STAR_RULE, (), st)
    if v == EPS:
        if rho == EMPTY:
            return b.add(EPSN_RULE, (), st)
        return b.add(EPS_RULE, (ensure_numeral(b, EPS, EMPTY, avoid_roots),), st)
    bit, rest = v.f.bit, v.args[0]
    if rho == EMPTY:
        return b.add(succn_rule(bit), (ensure_numeral(b, rest, EMPTY, avoid_roots),), st)
    top = ensure_numeral(b, v, EMPTY, avoid_roots)
    return b.add(succ_rule(bit), (top, ensure_numeral(b, rest, rho, avoid_roots)), st)


def extend_succ_in(b: DagBuilder, k: int, bit: int, avoid_roots=True) -> int:
    """From node ``k`` deriving <t,rho>|v add <s_i t, rho> | s_i v."""
    st = b.stmt(k)
    t, rho, v = st.main, st.env, st.value
    new = Statement(succ(bit, t), rho, succ(bit, v))
    if rho == EMPTY and t == v:
        return b.add(succn_rule(bit), (k,), new)
    top = ensure_numeral(b, succ(bit, v), EMPTY, avoid_roots)
    return b.add(succ_rule(bit), (top, k), new)


def extend_succ(dag: CompDag, stmt: Statement, bit: int) -> CompDag:
    """Add <s_i t, rho> | s_i v next to an existing <t, rho> | v."""
    b = DagBuilder.from_dag(dag)
    k = b.find(stmt, avoid_roots=False)
    if k is None:
        raise EvaluationError(f"{stmt} does not occur in the computation")
    new = extend_succ_in(b, k, bit, avoid_roots=False)
    b.remove_root(k)
    b.add_root(new)
    return b.to_dag()


# ---------------------------------------------------------------------------
# Exact evaluation


class _Exact:
    def __init__(self):
        self.b = DagBuilder()
        self.memo = {}
        self.nums = {}

    def num(self, v, rho):
        return _numeral_node(self.b, v, rho, self.nums)

    def ev(self, t: Term, rho) -> int:
        key = (t, rho)
        if key in self.memo:
            return self.memo[key]
        b = self.b
        if isinstance(t, Star):
            raise EvaluationError("exact evaluation does not accept Star")
        if isinstance(t, Var):
            found = dev_lookup(rho, t.name)
            if found is None:
                raise EvaluationError(f"unbound variable {t.name}")
            p = self.ev(found[0], found[1])
            k = b.add(SUBST, (p,), Statement(t, rho, b.stmt(p).value))
        elif is_g_numeral(t):
            k = self.num(t, rho)
        elif isinstance(t.f, Succ):
            p = self.ev(t.args[0], rho)
            v = b.stmt(p).value
            top = self.num(succ(t.f.bit, v), EMPTY)
            k = b.add(succ_rule(t.f.bit), (top, p), Statement(t, rho, succ(t.f.bit, v)))
        else:
            k = self.apply(t, rho)
        self.memo[key] = k
        return k

    def apply(self, t: App, rho) -> int:
        b, f, args = self.b, t.f, t.args
        first = 1 if isinstance(f, Rec) else 0
        xs = [i for i in range(first, len(args)) if not is_g_numeral(args[i])]
        xnodes = [self.ev(args[i], rho) for i in xs]
        vals = list(args)
        for i, p in zip(xs, xnodes):
            vals[i] = b.stmt(p).value
        if isinstance(f, ConstN):
            beta, rule, v = [self.num(EPS, EMPTY)], const_rule(f.n), EPS
        elif isinstance(f, Proj):
            v = vals[f.i - 1]
            beta, rule = [self.num(v, EMPTY)], proj_rule(f.i, f.n)
        elif isinstance(f, Comp):
            hn = [self.ev(App(h, tuple(vals)), EMPTY) for h in f.hs]
            gn = self.ev(App(f.g, tuple(b.stmt(p).value for p in hn)), EMPTY)
            beta, rule, v = [gn] + hn, COMP_RULE, b.stmt(gn).value
        elif isinstance(f, Rec):
            if is_g_numeral(args[0]):
                scrut, sv = [], args[0]
            else:
                p = self.ev(args[0], rho)
                scrut, sv = [p], b.stmt(p).value
            rest = tuple(vals[1:])
            if sv == EPS:
                gn = self.ev(App(f.g_eps, rest), EMPTY)
                beta, rule = [gn] + scrut, REC_EPS
            else:
                bit, v0 = sv.f.bit, sv.args[0]
                fn = self.ev(App(f, (v0,) + rest), EMPTY)
                gn = self.ev(App(f.step(bit), (v0, b.stmt(fn).value) + rest), EMPTY)
                beta, rule = [gn] + scrut + [fn], rec_succ_rule(bit)
            v = b.stmt(gn).value
        else:
            raise EvaluationError(f"unexpected head symbol {f}")
        return b.add(rule, tuple(beta) + tuple(xnodes), Statement(t, rho, v))


def exact_eval(t: Term, rho=EMPTY) -> CompDag:
    """Computation with single conclusion <t,rho> | v, v the exact value."""
    if not is_star_free(t) or not all(is_star_free(s) for _, s in rho):
        raise EvaluationError("exact evaluation does not accept Star")
    ex = _Exact()
    top = ex.ev(t, rho)
    ex.b.roots = [top]
    ex.b.gc()
    return ex.b.to_dag()


# ---------------------------------------------------------------------------
# Lazy values for demand analysis


class Lazy:
    """A suspended bit string read one constructor at a time.

    ``at(k)`` yields ``'0'``, ``'1'`` or ``'e'`` for the k-th constructor.
    """

    def __init__(self):
        self._cache = {}

    def at(self, k: int) -> str:
        c = self._cache.get(k)
        if c is None:
            c = self._cache[k] = self._at(k)
        return c

    def _at(self, k):
        raise NotImplementedError


class Given(Lazy):
    """Known bit string recording how deep it has been read."""

    def __init__(self, bits: str):
        super().__init__()
        self.bits = bits
        self.depth = 0

    def _at(self, k):
        self.depth = max(self.depth, k + 1)
        return self.bits[k] if k < len(self.bits) else "e"


class _Empty(Lazy):
    def _at(self, k):
        return "e"


class _Cons(Lazy):
    def __init__(self, bit, rest):
        super().__init__()
        self.bit, self.rest = str(bit), rest

    def _at(self, k):
        return self.bit if k == 0 else self.rest.at(k - 1)


class _Tail(Lazy):
    def __init__(self, parent):
        super().__init__()
        self.parent = parent

    def _at(self, k):
        return self.parent.at(k + 1)


class _RecApp(Lazy):
    def __init__(self, f, args):
        super().__init__()
        self.f, self.args, self.body = f, args, None

    def _at(self, k):
        if self.body is None:
            x, rest = self.args[0], self.args[1:]
            head = x.at(0)
            if head == "e":
                self.body = lazy_apply(self.f.g_eps, rest)
            else:
                tail = _Tail(x)
                rec = _RecApp(self.f, [tail] + rest)
                self.body = lazy_apply(self.f.step(int(head)), [tail, rec] + rest)
        return self.body.at(k)


def lazy_apply(f, args: list) -> Lazy:
    if isinstance(f, (Eps, ConstN)):
        return _Empty()
    if isinstance(f, Succ):
        return _Cons(f.bit, args[0])
    if isinstance(f, Proj):
        return args[f.i - 1]
    if isinstance(f, Comp):
        return lazy_apply(f.g, [lazy_apply(h, args) for h in f.hs])
    if isinstance(f, Rec):
        return _RecApp(f, list(args))
    raise TypeError(f"not a function symbol: {f!r}")


def force(lz: Lazy, d) -> None:
    k = 0
    while k < d:
        if lz.at(k) == "e":
            return
        k += 1


def demands(f, exact_args, d) -> tuple:
    """How deep each argument must be known to fix ``d`` constructors of f(args)."""
    given = [Given(a) for a in exact_args]
    force(lazy_apply(f, given), d)
    return tuple(g.depth for g in given)


# ---------------------------------------------------------------------------
# Approximate evaluation


class _Approx:
    def __init__(self):
        self.b = DagBuilder()
        self.memo = {}
        self.nums = {}
        self.bits = {}

    def num(self, v, rho):
        return _numeral_node(self.b, v, rho, self.nums)

    def star(self, t, rho):
        return self.b.find_or_add(STAR_RULE, (), Statement(t, rho, STAR))

    def exact(self, t, rho):
        return value_bits(t, rho, self.bits)

    def ev(self, t: Term, rho, d) -> int:
        """Node for <t,rho> with the first ``d`` constructors of its value exact."""
        if d == 0 or isinstance(t, Star):
            return self.star(t, rho)
        key = (t, rho, d)
        if key in self.memo:
            return self.memo[key]
        b = self.b
        if isinstance(t, Var):
            found = dev_lookup(rho, t.name)
            if found is None:
                raise EvaluationError(f"unbound variable {t.name}")
            p = self.ev(found[0], found[1], d)
            k = b.add(SUBST, (p,), Statement(t, rho, b.stmt(p).value))
        elif is_g_numeral(t) and rho == EMPTY:
            k = self.num(t, EMPTY)
        elif isinstance(t.f, Eps):
            k = self.num(EPS, rho)
        elif isinstance(t.f, Succ):
            p = self.ev(t.args[0], rho, d - 1)
            v = succ(t.f.bit, b.stmt(p).value)
            k = b.add(succ_rule(t.f.bit), (self.num(v, EMPTY), p), Statement(t, rho, v))
        else:
            exact = [None if is_g_numeral(a) else self.exact(a, rho) for a in t.args]
            k = self.apply(t, rho, exact, d)
        self.memo[key] = k
        return k

    def beta(self, f, vals: tuple, exact: tuple, d) -> int:
        """Purely numerical node for <f(vals),()>; ``exact`` are the true arguments."""
        t = App(f, vals)
        if d == 0:
            return self.star(t, EMPTY)
        key = (t, EMPTY, d)
        if key in self.memo:
            return self.memo[key]
        if isinstance(f, (Eps, Succ)):
            k = self.num(t, EMPTY)
        else:
            k = self.apply(t, EMPTY, list(exact), d)
        self.memo[key] = k
        return k

    def apply(self, t: App, rho, exact: list, d) -> int:
        b, f, args = self.b, t.f, t.args
        for i, a in enumerate(args):
            if exact[i] is None:
                exact[i] = _bits_prefix(a)
        dem = demands(f, exact, d)
        first = 1 if isinstance(f, Rec) else 0
        xs = [i for i in range(first, len(args)) if not is_g_numeral(args[i])]
        xnodes = [self.ev(args[i], rho, dem[i]) for i in xs]
        vals = list(args)
        for i, p in zip(xs, xnodes):
            vals[i] = b.stmt(p).value
        if isinstance(f, ConstN):
            beta, rule, v = [self.num(EPS, EMPTY)], const_rule(f.n), EPS
        elif isinstance(f, Proj):
            v = truncate(vals[f.i - 1], d)
            beta, rule = [self.num(v, EMPTY)], proj_rule(f.i, f.n)
        elif isinstance(f, Comp):
            wbits = tuple(_denote(h, tuple(exact)) for h in f.hs)
            gdem = demands(f.g, wbits, d)
            hn = [self.beta(h, tuple(vals), tuple(exact), e) for h, e in zip(f.hs, gdem)]
            ws = tuple(b.stmt(p).value for p in hn)
            gn = self.beta(f.g, ws, wbits, d)
            beta, rule, v = [gn] + hn, COMP_RULE, b.stmt(gn).value
        elif isinstance(f, Rec):
            if is_g_numeral(args[0]):
                scrut, sv = [], args[0]
            else:
                p = self.ev(args[0], rho, max(dem[0], 1))
                scrut, sv = [p], b.stmt(p).value
            rest, erest = tuple(vals[1:]), tuple(exact[1:])
            if isinstance(sv, Star):
                # head unknown: only the Star rule applies
                return self.star(t, rho)
            if sv == EPS:
                gn = self.beta(f.g_eps, rest, erest, d)
                beta, rule = [gn] + scrut, REC_EPS
            else:
                bit, v0, e0 = sv.f.bit, sv.args[0], exact[0][1:]
                wbits = _denote(f, (e0,) + erest)
                gdem = demands(f.step(bit), (e0, wbits) + erest, d)
                fn = self.beta(f, (v0,) + rest, (e0,) + erest, gdem[1])
                w = b.stmt(fn).value
                gn = self.beta(f.step(bit), (v0, w) + rest, (e0, wbits) + erest, d)
                beta, rule = [gn] + scrut + [fn], rec_succ_rule(bit)
            v = b.stmt(gn).value
        else:
            raise EvaluationError(f"unexpected head symbol {f}")
        return b.add(rule, tuple(beta) + tuple(xnodes), Statement(t, rho, v))


def _bits_prefix(v: Term) -> str:
    """Known bits of a g-numeral; only read up to its demanded depth."""
    bits, _ = numeral_bits(v)
    return bits


def approx_eval(t: Term, rho=EMPTY, d=FULL) -> CompDag:
    """Computation of <t,rho> | v where v is exact in its first ``d`` constructors.

    Arguments are suspended and forced only as far as the result demands;
    everything never forced is recorded with the Star rule.
    """
    if d < 0:
        raise EvaluationError("demand must be nonnegative")
    ax = _Approx()
    top = ax.ev(t, rho, d)
    ax.b.roots = [top]
    ax.b.gc()
    return ax.b.to_dag()


def conclusion_value(dag: CompDag) -> Term:
    concl = dag.conclusion_indices()
    return dag.nodes[concl[-1]].stmt.value
