"""Size-bounded transformations of computations.

Every operation works on a :class:`DagBuilder`: it only ever adds nodes,
rewires the root list and lets garbage collection drop what the old
targets alone were using. Untouched conclusions keep their exact nodes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .calculus import (
    COMP_RULE, EPS_RULE, REC_EPS, STAR_RULE, SUBST, CompDag, DagBuilder,
    Statement, const_rule, proj_rule, rec_succ_rule, succ_rule,
)
from .evaluator import ensure_numeral, extend_succ_in
from .proofs import (
    Congruence, DefAxiom, Equation, Identity, ProofError, SubstRule, Symmetry,
    Transitivity, conclusion, proof_size, proof_vars, rename_proof,
)
from .terms import (
    EMPTY, EPS, STAR, App, Comp, ConstN, Eps, Proj, Rec, Succ, Term, Var,
    approx_leq, dev_size, free_vars, is_g_numeral, substitute, term_size,
)


class TransformError(Exception):
    def __init__(self, message, path=()):
        super().__init__(f"{'/'.join(path) or 'root'}: {message}" if path else message)
        self.path = tuple(path)


class FuseError(TransformError):
    pass


class BudgetError(TransformError):
    pass


@dataclass
class Budget:
    U: Optional[int] = None
    B: Optional[int] = None
    V: Optional[int] = None
    C: float = 8


@dataclass
class LedgerEntry:
    op: str
    claimed: int
    actual_nodes: int
    actual_M: int
    claimed_M: Optional[float] = None

    @property
    def passed(self) -> bool:
        ok = self.actual_nodes <= self.claimed
        if self.claimed_M is not None:
            ok = ok and self.actual_M <= self.claimed_M
        return ok

    def to_json(self) -> dict:
        return {"op": self.op, "claimed": self.claimed, "actual_nodes": self.actual_nodes,
                "actual_M": self.actual_M, "claimed_M": self.claimed_M, "pass": self.passed}


@dataclass
class Ledger:
    steps: list = field(default_factory=list)

    def add(self, op, claimed, actual_nodes, actual_M, claimed_M=None) -> LedgerEntry:
        e = LedgerEntry(op, claimed, actual_nodes, actual_M, claimed_M)
        self.steps.append(e)
        return e

    @property
    def overall(self) -> bool:
        return all(e.passed for e in self.steps)

    def to_json(self) -> dict:
        return {"steps": [e.to_json() for e in self.steps], "overall": self.overall}


@dataclass
class TransformResult:
    dag: CompDag
    conclusion: Statement
    ledger: Ledger


# ---------------------------------------------------------------------------
# Inference anatomy


@dataclass
class Parts:
    """A beta-form inference split into numeric premises, scrutinee and arguments."""
    kind: str
    beta: list
    scrut: Optional[int]
    xs: dict


def split(b: DagBuilder, k: int) -> Parts:
    node = b.node(k)
    kind, t = node.rule.kind, node.stmt.main
    args = t.args
    is_rec = kind in ("rec-eps", "rec-succ")
    first = 1 if is_rec else 0
    xs_idx = [i for i in range(first, len(args)) if not is_g_numeral(args[i])]
    prem = list(node.premises)
    has_scrut = is_rec and not is_g_numeral(args[0])
    scrut = None
    if kind == "rec-succ":
        beta = [prem.pop(0)]
        scrut = prem.pop(0) if has_scrut else None
        beta.append(prem.pop(0))
    elif kind == "rec-eps":
        beta = [prem.pop(0)]
        scrut = prem.pop(0) if has_scrut else None
    else:
        nb = 1 + len(t.f.hs) if kind == "comp" else 1
        beta, prem = prem[:nb], prem[nb:]
    return Parts(kind, beta, scrut, dict(zip(xs_idx, prem)))


def assemble(kind: str, beta: list, scrut: Optional[int], xs: list) -> tuple:
    scr = [scrut] if scrut is not None else []
    if kind == "rec-succ":
        return tuple([beta[0]] + scr + [beta[1]] + list(xs))
    if kind == "rec-eps":
        return tuple([beta[0]] + scr + list(xs))
    return tuple(list(beta) + list(xs))


BETA_KINDS = ("const-fn", "proj", "comp", "rec-eps", "rec-succ")


def star_in(b: DagBuilder, t: Term, rho) -> int:
    return b.find_or_add(STAR_RULE, (), Statement(t, rho, STAR))


def numeral_in(b: DagBuilder, v: Term, rho) -> int:
    """<v, rho> | v for a g-numeral v, sharing whatever non-conclusion nodes exist."""
    return ensure_numeral(b, v, rho, avoid_roots=True)


def most_accurate(b: DagBuilder, ids: list) -> int:
    """The candidate whose value approximates all the others."""
    for k in ids:
        v = b.stmt(k).value
        if all(approx_leq(v, b.stmt(j).value) for j in ids):
            return k
    raise TransformError("incomparable approximations: " +
                         ", ".join(str(b.stmt(j).value) for j in ids))


def _x_values(b, t: App, parts: Parts, first: int) -> list:
    vals = list(t.args)
    for i, k in parts.xs.items():
        vals[i] = b.stmt(k).value
    if parts.scrut is not None:
        vals[0] = b.stmt(parts.scrut).value
    return vals


# ---------------------------------------------------------------------------
# Fusion


def fuse_in(b: DagBuilder, f, args: tuple, rho, head: int, arg_nodes: dict) -> int:
    """From <f(v*),()> | z and <t_i,rho> | v_i derive <f(t),rho> | z with one inference."""
    args = tuple(args)
    t = App(f, args)
    hst, hnode = b.stmt(head), b.node(head)
    kind = hnode.rule.kind
    if not isinstance(hst.main, App) or hst.main.f != f or hst.env != EMPTY:
        raise FuseError(f"head {hst} is not a purely numerical statement about {f}")
    first = 1 if isinstance(f, Rec) else 0
    for i, a in enumerate(args):
        star_i = hst.main.args[i]
        if is_g_numeral(a):
            if not approx_leq(a, star_i):
                raise FuseError(f"argument {i + 1}: {star_i} does not approximate {a}")
        else:
            if i not in arg_nodes:
                raise FuseError(f"argument {i + 1}: missing computation of {a}")
            ast = b.stmt(arg_nodes[i])
            if ast.main != a or ast.env != rho or not approx_leq(ast.value, star_i):
                raise FuseError(f"argument {i + 1}: {ast} does not fit {star_i}")
    if kind == "star":
        return star_in(b, t, rho)
    if isinstance(f, Eps):
        if rho == EMPTY:
            return head
        return b.add(EPS_RULE, (head,), Statement(EPS, rho, EPS))
    if isinstance(f, Succ):
        if is_g_numeral(args[0]):
            if rho == EMPTY and hst.main == t:
                return head
            raise FuseError("successor of a numeral under a nonempty environment")
        top = head if kind == "succ-n" else hnode.premises[0]
        return b.add(succ_rule(f.bit), (top, arg_nodes[0]), Statement(t, rho, hst.value))
    if kind not in BETA_KINDS:
        raise FuseError(f"head derived by {kind} cannot be fused")
    parts = split(b, head)
    scrut = arg_nodes.get(0) if first and not is_g_numeral(args[0]) else None
    xs = [arg_nodes[i] for i in range(first, len(args)) if not is_g_numeral(args[i])]
    return b.add(hnode.rule, assemble(kind, parts.beta, scrut, xs), Statement(t, rho, hst.value))


# ---------------------------------------------------------------------------
# Defining axioms


def _axiom_shape(f, case):
    want = {"constn": ConstN, "proj": Proj, "comp": Comp, "eps": Rec, "s0": Rec, "s1": Rec}
    if case not in want or not isinstance(f, want[case]):
        raise TransformError(f"{f} has no defining axiom {case}")


def unfold_in(b: DagBuilder, k: int, f, case: str, inst: Equation) -> int:
    """<lhs,rho> | v  to  <rhs,rho> | v' with v' below v."""
    _axiom_shape(f, case)
    st, node = b.stmt(k), b.node(k)
    if st.main != inst.lhs:
        raise TransformError(f"main term {st.main} does not match axiom lhs {inst.lhs}")
    rho, kind, args = st.env, node.rule.kind, st.main.args
    if kind == "star":
        return star_in(b, inst.rhs, rho)
    parts = split(b, k)
    if case == "constn":
        eps = parts.beta[0]
        return eps if rho == EMPTY else b.add(EPS_RULE, (eps,), Statement(EPS, rho, EPS))
    if case == "proj":
        i = f.i - 1
        if i in parts.xs:
            return parts.xs[i]
        return numeral_in(b, args[i], rho)
    if case == "comp":
        hn = [fuse_in(b, h, args, rho, parts.beta[1 + j], parts.xs) for j, h in enumerate(f.hs)]
        gargs = inst.rhs.args
        gx = {j: n for j, n in enumerate(hn) if not is_g_numeral(gargs[j])}
        return fuse_in(b, f.g, gargs, rho, parts.beta[0], gx)
    shifted = {i - 1: n for i, n in parts.xs.items()}
    if case == "eps":
        if kind != "rec-eps":
            raise TransformError(f"expected rec-eps inference, found {kind}")
        return fuse_in(b, f.g_eps, args[1:], rho, parts.beta[0], shifted)
    bit = int(case[1])
    if node.rule != rec_succ_rule(bit):
        raise TransformError(f"expected rec-succ {bit} inference, found {node.rule}")
    t = args[0].args[0]
    fargs = (t,) + args[1:]
    farg_nodes = dict(parts.xs)
    if not is_g_numeral(t):
        scrut = b.node(parts.scrut)
        if scrut.rule.kind != "succ":
            raise TransformError(f"scrutinee derived by {scrut.rule.kind}")
        farg_nodes[0] = scrut.premises[1]
    fnode = fuse_in(b, f, fargs, rho, parts.beta[1], farg_nodes)
    gargs = inst.rhs.args
    garg_nodes = {i + 1: n for i, n in parts.xs.items()}
    garg_nodes[1] = fnode
    if 0 in farg_nodes:
        garg_nodes[0] = farg_nodes[0]
    return fuse_in(b, f.step(bit), gargs, rho, parts.beta[0], garg_nodes)


def numericize(b: DagBuilder, k: int) -> int:
    """The purely numerical inference hidden in node ``k``: <f(values),()> | v."""
    st, node = b.stmt(k), b.node(k)
    kind = node.rule.kind
    if kind in ("eps-n", "succ-n"):
        return k
    if kind in ("eps", "succ"):
        return node.premises[0]
    if kind == "star":
        t = st.main
        if isinstance(t, App):
            return star_in(b, App(t.f, (STAR,) * len(t.args)), EMPTY)
        raise TransformError(f"cannot numericize {st}")
    if kind not in BETA_KINDS:
        raise TransformError(f"cannot numericize a {kind} inference")
    parts = split(b, k)
    vals = _x_values(b, st.main, parts, 0)
    if st.env == EMPTY and not parts.xs and parts.scrut is None:
        return k
    prem = assemble(kind, parts.beta, None, [])
    return b.find_or_add(node.rule, prem, Statement(App(st.main.f, tuple(vals)), EMPTY, st.value))


def _choose_args(b, t: App, rho, first: int, candidates: dict) -> list:
    """One premise per non-numeral argument: the most accurate candidate, or Star."""
    out = []
    for i in range(first, len(t.args)):
        if is_g_numeral(t.args[i]):
            continue
        cands = candidates.get(i, [])
        out.append(most_accurate(b, cands) if cands else star_in(b, t.args[i], rho))
    return out


def fold_in(b: DagBuilder, k: int, f, case: str, inst: Equation) -> int:
    """<rhs,rho> | v  to  <lhs,rho> | v' with v' below v."""
    _axiom_shape(f, case)
    st, node = b.stmt(k), b.node(k)
    if st.main != inst.rhs:
        raise TransformError(f"main term {st.main} does not match axiom rhs {inst.rhs}")
    rho, kind, lhs = st.env, node.rule.kind, inst.lhs
    if kind == "star":
        return star_in(b, lhs, rho)
    if case == "constn":
        if st.value != EPS:
            raise TransformError(f"unexpected value {st.value} for eps")
        eps = k if rho == EMPTY else node.premises[0]
        xs = _choose_args(b, lhs, rho, 0, {})
        return b.add(const_rule(f.n), (eps,) + tuple(xs), Statement(lhs, rho, EPS))
    if case == "proj":
        i = f.i - 1
        num = numeral_in(b, st.value, EMPTY)
        cands = {} if is_g_numeral(lhs.args[i]) else {i: [k]}
        xs = _choose_args(b, lhs, rho, 0, cands)
        return b.add(proj_rule(f.i, f.n), (num,) + tuple(xs), Statement(lhs, rho, st.value))
    if case == "comp":
        gnum = numericize(b, k)
        hnums, cands = [], {}
        for j, h in enumerate(f.hs):
            ht = st.main.args[j]
            hk = _arg_node(b, k, j)
            if hk is None:
                raise TransformError(f"argument {ht} of {f.g} is a numeral")
            hnums.append(numericize(b, hk))
            for i, n in _arg_nodes(b, hk).items():
                cands.setdefault(i, []).append(n)
        xs = _choose_args(b, lhs, rho, 0, cands)
        return b.add(COMP_RULE, (gnum,) + tuple(hnums) + tuple(xs), Statement(lhs, rho, st.value))
    if case == "eps":
        gnum = numericize(b, k)
        cands = {i + 1: [n] for i, n in _arg_nodes(b, k).items()}
        xs = _choose_args(b, lhs, rho, 1, cands)
        return b.add(REC_EPS, (gnum,) + tuple(xs), Statement(lhs, rho, st.value))
    bit = int(case[1])
    t = lhs.args[0].args[0]
    gnum = numericize(b, k)
    outer = _arg_nodes(b, k)
    fk = outer.get(1)
    if fk is None:
        raise TransformError("recursive call is missing its computation")
    fnum = numericize(b, fk)
    inner = {} if b.node(fk).rule.kind == "star" else _arg_nodes(b, fk)
    scrut = None
    if not is_g_numeral(t):
        tc = [n for n in (outer.get(0), inner.get(0)) if n is not None]
        tk = most_accurate(b, tc) if tc else star_in(b, t, rho)
        scrut = extend_succ_in(b, tk, bit)
    cands = {}
    for i in range(1, len(lhs.args)):
        cands[i] = [n for n in (outer.get(i + 1), inner.get(i)) if n is not None]
    xs = _choose_args(b, lhs, rho, 1, cands)
    prem = assemble("rec-succ", [gnum, fnum], scrut, xs)
    return b.add(rec_succ_rule(bit), prem, Statement(lhs, rho, st.value))


def _arg_nodes(b: DagBuilder, k: int) -> dict:
    """Argument computations of node ``k``, keyed by argument position."""
    node = b.node(k)
    kind = node.rule.kind
    if kind == "succ":
        return {0: node.premises[1]}
    if kind not in BETA_KINDS:
        return {}
    parts = split(b, k)
    out = dict(parts.xs)
    if parts.scrut is not None:
        out[0] = parts.scrut
    return out


def _arg_node(b, k, j):
    return _arg_nodes(b, k).get(j)


# ---------------------------------------------------------------------------
# Substitution lemmas


class _Lift:
    """<t[u/x], rho> | v  to  <t, [u/x]rho> | v."""

    def __init__(self, b: DagBuilder, x: str, u: Term):
        self.b, self.x, self.u = b, x, u
        self.memo = {}
        self.var_nodes = {}

    def env(self, rho):
        return ((self.x, self.u),) + rho

    def var_node(self, rho):
        k = self.var_nodes.get(rho)
        if k is None:
            base = numeral_in(self.b, self.u, rho)
            k = self.var_nodes[rho] = self.b.add(SUBST, (base,), Statement(Var(self.x), self.env(rho), self.u))
        return k

    def numeral_chain(self, r: Term, rho) -> int:
        """<r, [u/x]rho> | r[u/x] for r a successor chain over x, u a numeral."""
        bits = []
        while not isinstance(r, Var):
            bits.append(r.f.bit)
            r = r.args[0]
        k = self.var_node(rho)
        for bit in reversed(bits):
            k = extend_succ_in(self.b, k, bit)
        return k

    def lift(self, k: int, t: Term) -> int:
        key = (k, t)
        if key in self.memo:
            return self.memo[key]
        b = self.b
        st, node = b.stmt(k), b.node(k)
        rho, v, kind = st.env, st.value, node.rule.kind
        new_env = self.env(rho)
        out = Statement(t, new_env, v)
        if substitute(t, self.u, self.x) != st.main:
            raise TransformError(f"{st.main} is not an instance of {t}")
        if t == Var(self.x):
            r = b.add(SUBST, (k,), out)
        elif kind == "star":
            r = star_in(b, t, new_env)
        elif isinstance(t, Var):
            r = b.add(SUBST, node.premises, out)
        elif kind == "eps-n":
            r = b.add(EPS_RULE, (k,), out)
        elif kind == "eps":
            r = b.add(EPS_RULE, node.premises, out)
        elif kind == "succ-n":
            r = b.add(succ_rule(t.f.bit), (k, self.lift(node.premises[0], t.args[0])), out)
        elif kind == "succ":
            r = b.add(node.rule, (node.premises[0], self.lift(node.premises[1], t.args[0])), out)
        elif kind in BETA_KINDS:
            parts = split(b, k)
            first = 1 if kind in ("rec-eps", "rec-succ") else 0
            xs = [self.arg(parts.xs.get(i), t.args[i], rho)
                  for i in range(first, len(t.args)) if not is_g_numeral(t.args[i])]
            scrut = None
            if first and not is_g_numeral(t.args[0]):
                scrut = self.arg(parts.scrut, t.args[0], rho)
            r = b.add(node.rule, assemble(kind, parts.beta, scrut, xs), out)
        else:
            raise TransformError(f"cannot lift a {kind} inference for {t}")
        self.memo[key] = r
        return r

    def arg(self, k, r, rho):
        if k is not None:
            return self.lift(k, r)
        # r[u/x] is a numeral but r is not: r is a successor chain over x
        return self.numeral_chain(r, rho)


class _Lower:
    """<t, [u/x]rho> | v  to  <t[u/x], rho> | v."""

    def __init__(self, b: DagBuilder, x: str, u: Term):
        self.b, self.x, self.u = b, x, u
        self.memo = {}

    def lower(self, k: int, t: Term) -> int:
        key = (k, t)
        if key in self.memo:
            return self.memo[key]
        b = self.b
        st, node = b.stmt(k), b.node(k)
        if st.main != t:
            raise TransformError(f"expected main term {t}, found {st.main}")
        env, v, kind = st.env, st.value, node.rule.kind
        if not env or env[0] != (self.x, self.u):
            raise TransformError(f"environment of {st} does not start with [{self.u}/{self.x}]")
        rho = env[1:]
        t2 = substitute(t, self.u, self.x)
        out = Statement(t2, rho, v)
        if kind == "star":
            r = star_in(b, t2, rho)
        elif t == Var(self.x):
            r = node.premises[0]
        elif isinstance(t, Var):
            r = b.add(SUBST, node.premises, out)
        elif kind == "eps":
            r = node.premises[0] if rho == EMPTY else b.add(EPS_RULE, node.premises, out)
        elif kind == "succ":
            top = node.premises[0]
            below = self.lower(node.premises[1], t.args[0])
            if rho == EMPTY and b.stmt(top).main == t2:
                r = top
            else:
                r = b.add(node.rule, (top, below), out)
        elif kind in BETA_KINDS:
            parts = split(b, k)
            first = 1 if kind in ("rec-eps", "rec-succ") else 0
            xs = [self.lower(parts.xs[i], t.args[i])
                  for i in range(first, len(t.args)) if not is_g_numeral(t2.args[i])]
            scrut = None
            if first and not is_g_numeral(t2.args[0]):
                scrut = self.lower(parts.scrut, t.args[0])
            r = b.add(node.rule, assemble(kind, parts.beta, scrut, xs), out)
        else:
            raise TransformError(f"cannot lower a {kind} inference")
        self.memo[key] = r
        return r


# ---------------------------------------------------------------------------
# Builder-level bookkeeping


def used_names(b: DagBuilder) -> set:
    names = set()
    for n in b.nodes.values():
        st = n.stmt
        names |= free_vars(st.main)
        for y, s in st.env:
            names.add(y)
            names |= free_vars(s)
    return names


def fresh_name(base: str, taken: set) -> str:
    for i in itertools.count(1):
        cand = f"{base}_{i}"
        if cand not in taken:
            return cand


def _conclusion_T(b: DagBuilder, roots) -> int:
    T = 0
    for r in roots:
        st = b.stmt(r)
        T = max(T, term_size(st.main), dev_size(st.env))
    return T


class Session:
    """A builder plus the ledger of one transformation run."""

    def __init__(self, dag: CompDag, budget: Optional[Budget] = None, strict=False):
        self.b = DagBuilder.from_dag(dag)
        self.budget = budget or Budget()
        self.strict = strict
        self.ledger = Ledger()
        self.pins: list = []

    def root_of(self, target, taken=()) -> int:
        """The conclusion node for ``target``, skipping nodes already in ``taken``."""
        b = self.b
        if isinstance(target, int):
            if target not in b.roots:
                raise TransformError(f"node {target} is not a conclusion")
            return target
        for r in b.roots:
            if b.stmt(r) == target and r not in taken:
                return r
        raise TransformError(f"{target} is not a conclusion")

    def stats(self, current=()) -> tuple:
        roots = list(self.b.roots) + list(self.pins) + list(current)
        return self.b.live_stats(roots)

    def record(self, op, claimed_extra, before_nodes, current, claimed_M=None):
        n, M = self.stats(current)
        e = self.ledger.add(op, before_nodes + claimed_extra, n, M, claimed_M)
        return e

    def check_pre(self, name, ok, detail):
        if ok:
            return
        if self.strict:
            raise BudgetError(f"{name}: {detail}")
        self.ledger.add(f"precondition {name}", 0, 1, 0)


def _finish(sess: Session, old: int, new: int) -> TransformResult:
    b = sess.b
    b.replace_root(old, new)
    b.gc()
    pos = b.roots.index(new)
    b.surface()
    k = b.roots[pos]
    dag = b.to_dag()
    return TransformResult(dag, b.stmt(k), sess.ledger)


# ---------------------------------------------------------------------------
# Public single-step operations


def fuse(dag: CompDag, f, args, rho, head, arg_nodes: dict) -> TransformResult:
    """Fusion as a standalone operation; ``head``/``arg_nodes`` are node indices."""
    sess = Session(dag)
    b = sess.b
    before, _ = sess.stats()
    k = fuse_in(b, f, tuple(args), rho, head, dict(arg_nodes))
    b.add_root(k)
    b.gc()
    pos = b.roots.index(k)
    b.surface()
    k = b.roots[pos]
    sess.ledger.add("fuse", before + 1, b.count(), b.max_main())
    return TransformResult(b.to_dag(), b.stmt(k), sess.ledger)


def _axiom_parts(ax):
    if isinstance(ax, DefAxiom):
        return ax.f, ax.case, ax.instance
    return ax


def unfold_axiom(dag: CompDag, target, ax, budget=None, strict=False) -> TransformResult:
    f, case, inst = _axiom_parts(ax)
    sess = Session(dag, budget, strict)
    k = sess.root_of(target)
    before, _ = sess.stats()
    new = unfold_in(sess.b, k, f, case, inst)
    res = _finish(sess, k, new)
    sess.ledger.add("unfold", before + inst.size(), len(res.dag), _max_main(res.dag))
    return res


def fold_axiom(dag: CompDag, target, ax, budget=None, strict=False) -> TransformResult:
    f, case, inst = _axiom_parts(ax)
    sess = Session(dag, budget, strict)
    k = sess.root_of(target)
    before, _ = sess.stats()
    new = fold_in(sess.b, k, f, case, inst)
    res = _finish(sess, k, new)
    sess.ledger.add("fold", before + inst.size(), len(res.dag), _max_main(res.dag))
    return res


def _max_main(dag: CompDag) -> int:
    return max((term_size(n.stmt.main) for n in dag.nodes), default=0)


def _subst_pre(sess: Session, total: int):
    bud = sess.budget
    n, M = sess.stats()
    if bud.U is not None:
        sess.check_pre("node-budget", n <= bud.U - total, f"|||sigma||| = {n} > U - {total}")
    if bud.V is not None:
        sess.check_pre("M-budget", M <= bud.V, f"M = {M} > V = {bud.V}")
    return n, M


def subst_in(dag: CompDag, targets, u: Term, x: str, budget=None, strict=False) -> TransformResult:
    """Substitution lemma I.

    ``targets`` pairs each conclusion <t[u/x], rho> | v with its term t.
    """
    sess = Session(dag, budget, strict)
    b = sess.b
    if x in used_names(b):
        raise TransformError(f"variable {x} is not fresh")
    pairs = []
    for st, t in targets:
        pairs.append((sess.root_of(st, [k for k, _ in pairs]), t))
    total = sum(term_size(substitute(t, u, x)) for _, t in pairs)
    before, M0 = _subst_pre(sess, total)
    lifter = _Lift(b, x, u)
    last = None
    for k, t in pairs:
        if x not in free_vars(t):
            raise TransformError(f"target {t} does not contain {x}")
        new = lifter.lift(k, t)
        b.replace_root(k, new)
        last = new
    if last is None:
        return TransformResult(dag, None, sess.ledger)
    b.gc()
    pos = b.roots.index(last)
    b.surface()
    dag2 = b.to_dag()
    sess.ledger.add("subst_in", before + total, len(dag2), _max_main(dag2), M0 * 1)
    return TransformResult(dag2, b.stmt(b.roots[pos]), sess.ledger)


def subst_out(dag: CompDag, targets, u: Term, x: str, budget=None, strict=False) -> TransformResult:
    """Substitution lemma II; ``targets`` are conclusions <t, [u/x]rho> | v."""
    sess = Session(dag, budget, strict)
    b = sess.b
    ks = []
    for st in targets:
        ks.append(sess.root_of(st, ks))
    total = sum(term_size(substitute(b.stmt(k).main, u, x)) for k in ks)
    before, M0 = _subst_pre(sess, total)
    lowerer = _Lower(b, x, u)
    last = None
    for k in ks:
        new = lowerer.lower(k, b.stmt(k).main)
        b.replace_root(k, new)
        last = new
    if last is None:
        return TransformResult(dag, None, sess.ledger)
    b.gc()
    pos = b.roots.index(last)
    b.surface()
    dag2 = b.to_dag()
    sess.ledger.add("subst_out", before + total, len(dag2), _max_main(dag2), M0 * term_size(u))
    return TransformResult(dag2, b.stmt(b.roots[pos]), sess.ledger)


# ---------------------------------------------------------------------------
# The walk along a proof


class _Walk:
    def __init__(self, sess: Session):
        self.sess = sess
        self.b = sess.b

    def bound_M(self, current):
        roots = list(self.b.roots) + list(self.sess.pins) + [current]
        n, _ = self.b.live_stats(roots)
        T = _conclusion_T(self.b, roots)
        return self.sess.budget.C * (T + n + 1) ** 2

    def step(self, op, k, extra, fn):
        before, _ = self.sess.stats([k])
        new = fn()
        self.sess.record(op, extra, before, [new], self.bound_M(new))
        return new

    def walk(self, k: int, p, fwd: bool, path: tuple) -> int:
        try:
            return self._walk(k, p, fwd, path)
        except TransformError as err:
            if err.path:
                raise
            raise TransformError(str(err), path) from err

    def _walk(self, k, p, fwd, path):
        b = self.b
        name = "/".join(path) or "root"
        if isinstance(p, Identity):
            return k
        if isinstance(p, Symmetry):
            return self.walk(k, p.p, not fwd, path + ("symmetry",))
        if isinstance(p, Transitivity):
            first, second = (p.p, p.q) if fwd else (p.q, p.p)
            k1 = self.walk(k, first, fwd, path + ("transitivity",))
            return self.walk(k1, second, fwd, path + ("transitivity",))
        if isinstance(p, DefAxiom):
            eq = p.instance
            size = eq.size()
            if fwd:
                return self.step(f"{name}:axiom-unfold", k, size,
                                 lambda: unfold_in(b, k, p.f, p.case, eq))
            return self.step(f"{name}:axiom-fold", k, size,
                             lambda: fold_in(b, k, p.f, p.case, eq))
        if isinstance(p, Congruence):
            return self.congruence(k, p, fwd, path + ("congruence",))
        if isinstance(p, SubstRule):
            return self.substitution(k, p, fwd, path + ("substitution",))
        raise TransformError(f"unknown proof node {p!r}", path)

    def congruence(self, k, p, fwd, path):
        b = self.b
        eqs = [conclusion(q) for q in p.ps]
        src = [e.lhs if fwd else e.rhs for e in eqs]
        dst = [e.rhs if fwd else e.lhs for e in eqs]
        st = b.stmt(k)
        if st.main != App(p.f, tuple(src)):
            raise TransformError(f"main term {st.main} does not match congruence side", path)
        cur = k
        for i, q in enumerate(p.ps):
            if src[i] == dst[i]:
                continue
            before, _ = self.sess.stats([cur])
            extra = proof_size(q) + 1 + (term_size(src[i]) + 1 if is_g_numeral(src[i]) else 0)
            new = self.cong_step(cur, p.f, i, q, dst[i], fwd, path + (f"arg{i + 1}",))
            self.sess.record("/".join(path) + f":arg{i + 1}", extra, before, [new], self.bound_M(new))
            cur = new
        return cur

    def cong_step(self, k, f, i, q, target_arg, fwd, path):
        b = self.b
        st, node = b.stmt(k), b.node(k)
        rho, kind = st.env, node.rule.kind
        args = list(st.main.args)
        args[i] = target_arg
        new_main = App(f, tuple(args))
        if kind == "star":
            return star_in(b, new_main, rho)
        self.sess.pins.append(k)
        try:
            if isinstance(f, Succ):
                a = node.premises[0] if kind == "succ-n" else node.premises[1]
                a2 = self.walk(a, q, fwd, path)
                return extend_succ_in(b, a2, f.bit)
            if kind not in BETA_KINDS:
                raise TransformError(f"cannot apply congruence through a {kind} inference", path)
            parts = split(b, k)
            src = st.main.args[i]
            if i == 0 and kind in ("rec-eps", "rec-succ"):
                a = parts.scrut
            else:
                a = parts.xs.get(i)
            if a is None:
                a = numeral_in(b, src, rho)
            self.sess.pins.append(a)
            a2 = self.walk(a, q, fwd, path)
            self.sess.pins.pop()
        finally:
            self.sess.pins.pop()
        xs = dict(parts.xs)
        scrut = parts.scrut
        is_rec = kind in ("rec-eps", "rec-succ")
        if is_rec and i == 0:
            scrut = None if is_g_numeral(target_arg) else a2
        elif is_g_numeral(target_arg):
            xs.pop(i, None)
        else:
            xs[i] = a2
        first = 1 if is_rec else 0
        xlist = [xs[j] for j in range(first, len(args)) if not is_g_numeral(args[j])]
        return b.add(node.rule, assemble(kind, parts.beta, scrut, xlist), Statement(new_main, rho, st.value))

    def substitution(self, k, p, fwd, path):
        b = self.b
        taken = used_names(b) | proof_vars(p.p) | free_vars(p.r)
        x2 = fresh_name(p.x, taken)
        q = rename_proof(p.p, {p.x: x2})
        eq = conclusion(q)
        src, dst = (eq.lhs, eq.rhs) if fwd else (eq.rhs, eq.lhs)
        st = b.stmt(k)
        if substitute(src, p.r, x2) != st.main:
            raise TransformError(f"main term {st.main} does not match substitution instance", path)
        before, M0 = self.sess.stats([k])
        s_size = term_size(st.main)
        k1 = _Lift(b, x2, p.r).lift(k, src)
        self.sess.record("/".join(path) + ":subst_in", s_size, before, [k1], M0)
        k2 = self.walk(k1, q, fwd, path)
        before2, M2 = self.sess.stats([k2])
        k3 = _Lower(b, x2, p.r).lower(k2, dst)
        d_size = term_size(substitute(dst, p.r, x2))
        self.sess.record("/".join(path) + ":subst_out", d_size, before2, [k3], M2 * term_size(p.r))
        return k3


def default_budget(dag: CompDag, target: Statement, r_size: int, C=8) -> Budget:
    n = len(dag)
    M = _max_main(dag)
    B = max(n, term_size(target.value))
    U = B + r_size + dev_size(target.env) + M + term_size(target.value)
    return Budget(U=U, B=B, V=M, C=C)


def transform_along_proof(dag: CompDag, target, proof, direction="fwd",
                          budget: Optional[Budget] = None, strict=False) -> TransformResult:
    """Carry a conclusion across an equational proof.

    Forward turns <t,rho> | v into <u,rho> | v' for a proof of t = u;
    backward goes from u to t. In both cases v' approximates below v.
    """
    try:
        eq = conclusion(proof)
    except ProofError as err:
        raise TransformError(f"proof does not check: {err}") from err
    fwd = direction in ("fwd", "forward")
    if not fwd and direction not in ("bwd", "backward"):
        raise ValueError(f"unknown direction {direction}")
    sess = Session(dag, None, strict)
    k = sess.root_of(target)
    st = sess.b.stmt(k)
    src, dst = (eq.lhs, eq.rhs) if fwd else (eq.rhs, eq.lhs)
    if st.main != src:
        raise TransformError(f"conclusion main term {st.main} is not the proof's {'lhs' if fwd else 'rhs'} {src}")
    r = proof_size(proof)
    sess.budget = budget or default_budget(dag, st, r)
    bud = sess.budget
    n0, M0 = sess.stats()
    if bud.U is not None:
        sess.check_pre("env", dev_size(st.env) <= bud.U - r, "||rho|| > U - ||r||")
        if bud.B is not None:
            sess.check_pre("B", bud.B <= bud.U - r, "B > U - ||r||")
        untouched = [x for x in sess.b.roots if x != k]
        Mu = max((term_size(sess.b.stmt(x).main) for x in untouched), default=0)
        sess.check_pre("M-untouched", Mu <= bud.U - r, "M of untouched conclusions > U - ||r||")
    if bud.B is not None:
        sess.check_pre("value", term_size(st.value) <= bud.B, "||v|| > B")
        sess.check_pre("nodes", n0 <= bud.B, "|||sigma||| > B")
    new = _Walk(sess).walk(k, proof, fwd, ())
    res = _finish(sess, k, new)
    if res.conclusion.main != dst:
        raise TransformError(f"walk ended at {res.conclusion.main}, expected {dst}")
    sess.ledger.add("overall", n0 + r, len(res.dag), _max_main(res.dag))
    return res
