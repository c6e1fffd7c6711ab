"""Computation statements, computation DAGs and the rule checker.

A computation is a topologically ordered list of nodes. Each node names
the rule it instantiates, the indices of its premises and the statement
<t, rho> |v it derives.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .terms import (
    EMPTY, EPS, STAR, App, Comp, ConstN, Proj, Rec, Star, Term, Var,
    approx_leq, base_symbols, dev_lookup, dev_size, function_symbols,
    is_development, is_g_numeral, is_subsequence, is_succ_app, show_dev,
    subterms, term_size,
)


@dataclass(frozen=True)
class Statement:
    main: Term
    env: tuple
    value: Term

    def __str__(self):
        return f"<{self.main}, {show_dev(self.env)}> | {self.value}"


RULE_KINDS = (
    "subst", "star", "eps", "eps-n", "succ", "succ-n",
    "const-fn", "proj", "comp", "rec-eps", "rec-succ",
)


@dataclass(frozen=True)
class Rule:
    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise ValueError(f"unknown rule {self.kind}")
        object.__setattr__(self, "params", tuple(self.params))

    def __str__(self):
        return " ".join((self.kind,) + tuple(map(str, self.params)))


SUBST = Rule("subst")
STAR_RULE = Rule("star")
EPS_RULE = Rule("eps")
EPSN_RULE = Rule("eps-n")
COMP_RULE = Rule("comp")
REC_EPS = Rule("rec-eps")


def succ_rule(i):
    return Rule("succ", (i,))


def succn_rule(i):
    return Rule("succ-n", (i,))


def const_rule(m):
    return Rule("const-fn", (m,))


def proj_rule(i, m):
    return Rule("proj", (i, m))


def rec_succ_rule(i):
    return Rule("rec-succ", (i,))


def rule_for_def(f, branch=None) -> Rule:
    if isinstance(f, ConstN):
        return const_rule(f.n)
    if isinstance(f, Proj):
        return proj_rule(f.i, f.n)
    if isinstance(f, Comp):
        return COMP_RULE
    if isinstance(f, Rec):
        return REC_EPS if branch is None else rec_succ_rule(branch)
    raise ValueError(f"no function rule for {f}")


@dataclass(frozen=True)
class Node:
    premises: tuple
    rule: Rule
    stmt: Statement


@dataclass(frozen=True)
class CompDag:
    nodes: tuple = ()

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    def __getitem__(self, i):
        return self.nodes[i]

    def used(self) -> set:
        return {p for n in self.nodes for p in n.premises}

    def conclusion_indices(self) -> list:
        used = self.used()
        return [i for i in range(len(self.nodes)) if i not in used]

    def statements(self) -> list:
        return [n.stmt for n in self.nodes]

    def index_of(self, stmt: Statement) -> Optional[int]:
        for i, n in enumerate(self.nodes):
            if n.stmt == stmt:
                return i
        return None


class CalculusError(Exception):
    pass


@dataclass(frozen=True)
class RuleViolation:
    index: int
    condition: str
    detail: str = ""

    def __str__(self):
        return f"node {self.index}: {self.condition}" + (f" ({self.detail})" if self.detail else "")


class _Bad(Exception):
    def __init__(self, condition, detail=""):
        super().__init__(condition)
        self.condition = condition
        self.detail = detail


def _need(cond, condition, detail=""):
    if not cond:
        raise _Bad(condition, detail)


# ---------------------------------------------------------------------------
# Rule checking


def check_inference(rule: Rule, stmt: Statement, prems: list) -> None:
    """Raise _Bad unless ``prems / stmt`` is an instance of ``rule``."""
    t, rho, v = stmt.main, stmt.env, stmt.value
    kind, params = rule.kind, rule.params

    if kind == "subst":
        _need(isinstance(t, Var), "subst-main-not-variable")
        found = dev_lookup(rho, t.name)
        _need(found is not None, "subst-unbound", t.name)
        s, suffix = found
        _need(len(prems) == 1, "premise-count")
        _need(prems[0] == Statement(s, suffix, v), "subst-premise")
        return

    if kind == "star":
        _need(isinstance(v, Star), "star-value")
        _need(not prems, "premise-count")
        return

    if kind in ("eps", "eps-n"):
        _need(t == EPS, "eps-main")
        _need(v == EPS, "eps-value")
        if kind == "eps-n":
            _need(rho == EMPTY, "eps-n-env")
            _need(not prems, "premise-count")
        else:
            _need(rho != EMPTY, "eps-env-empty")
            _need(len(prems) == 1, "premise-count")
            _need(prems[0] == Statement(EPS, EMPTY, EPS), "eps-premise")
        return

    if kind in ("succ", "succ-n"):
        _need(len(params) == 1 and params[0] in (0, 1), "rule-params")
        i = params[0]
        _need(is_succ_app(t) and t.f.bit == i, "succ-main")
        arg = t.args[0]
        if kind == "succ-n":
            _need(rho == EMPTY, "succ-n-env")
            _need(is_g_numeral(arg), "succ-n-numeral")
            _need(v == t, "succ-n-value")
            _need(len(prems) == 1, "premise-count")
            _need(prems[0] == Statement(arg, EMPTY, arg), "succ-n-premise")
            return
        _need(is_succ_app(v) and v.f.bit == i, "succ-value")
        vstar = v.args[0]
        _need(len(prems) == 2, "premise-count")
        _need(prems[0] == Statement(v, EMPTY, v), "succ-numeral-premise")
        _need(prems[1].main == arg and prems[1].env == rho, "succ-argument-premise")
        _need(approx_leq(prems[1].value, vstar), "succ-approximation")
        _need(arg != vstar or rho != EMPTY, "succ-side-condition")
        return

    # rules of the common beta form
    _need(isinstance(t, App), "main-not-application")
    f, args = t.f, t.args
    if kind == "const-fn":
        _need(f == ConstN(params[0]) if params else False, "head-symbol")
    elif kind == "proj":
        _need(len(params) == 2 and f == Proj(params[1], params[0]), "head-symbol")
    elif kind == "comp":
        _need(isinstance(f, Comp), "head-symbol")
    elif kind in ("rec-eps", "rec-succ"):
        _need(isinstance(f, Rec), "head-symbol")
        if kind == "rec-succ":
            _need(len(params) == 1 and params[0] in (0, 1), "rule-params")

    is_rec = kind in ("rec-eps", "rec-succ")
    first = 1 if is_rec else 0
    xs = [i for i in range(first, len(args)) if not is_g_numeral(args[i])]
    n_beta = {"const-fn": 1, "proj": 1, "comp": 1 + len(getattr(f, "hs", ())),
              "rec-eps": 1, "rec-succ": 2}[kind]
    has_scrut = is_rec and not is_g_numeral(args[0])
    _need(len(prems) == n_beta + len(xs) + int(has_scrut), "premise-count")

    rest = list(prems)
    if kind == "rec-succ":
        beta = [rest.pop(0)]
        scrut = rest.pop(0) if has_scrut else None
        beta.append(rest.pop(0))
    elif kind == "rec-eps":
        beta = [rest.pop(0)]
        scrut = rest.pop(0) if has_scrut else None
    else:
        beta = rest[:n_beta]
        rest = rest[n_beta:]
        scrut = None
    for b in beta:
        _need(b.env == EMPTY, "beta-env-nonempty")
    vals = list(args)
    for i, p in zip(xs, rest):
        _need(p.main == args[i] and p.env == rho, "argument-premise", f"argument {i + 1}")
        vals[i] = p.value

    def _args_approx(b_args, targets, what):
        _need(len(b_args) == len(targets), what)
        for a, target in zip(b_args, targets):
            _need(approx_leq(target, a), what)

    if kind == "const-fn":
        _need(beta[0] == Statement(EPS, EMPTY, EPS), "const-premise")
        _need(v == EPS, "const-value")
    elif kind == "proj":
        i = params[0]
        _need(beta[0].main == v and beta[0].value == v and is_g_numeral(v), "proj-numeral-premise")
        _need(approx_leq(vals[i - 1], v), "proj-approximation")
    elif kind == "comp":
        g_prem, h_prems = beta[0], beta[1:]
        _need(isinstance(g_prem.main, App) and g_prem.main.f == f.g, "comp-outer-premise")
        _need(g_prem.value == v, "comp-value")
        for h, hp in zip(f.hs, h_prems):
            _need(isinstance(hp.main, App) and hp.main.f == h, "comp-inner-premise")
            _args_approx(hp.main.args, vals, "comp-inner-approximation")
        _args_approx(g_prem.main.args, [hp.value for hp in h_prems], "comp-outer-approximation")
    elif kind == "rec-eps":
        if has_scrut:
            _need(scrut.main == args[0] and scrut.env == rho, "rec-scrutinee-premise")
            _need(scrut.value == EPS, "rec-scrutinee-value")
        else:
            _need(args[0] == EPS, "rec-scrutinee-numeral")
        gp = beta[0]
        _need(isinstance(gp.main, App) and gp.main.f == f.g_eps, "rec-base-premise")
        _need(gp.value == v, "rec-value")
        _args_approx(gp.main.args, vals[1:], "rec-base-approximation")
    else:
        i = params[0]
        if has_scrut:
            _need(scrut.main == args[0] and scrut.env == rho, "rec-scrutinee-premise")
            sv = scrut.value
        else:
            sv = args[0]
        _need(is_succ_app(sv) and sv.f.bit == i, "rec-scrutinee-value")
        v0 = sv.args[0]
        gp, fp = beta
        _need(isinstance(gp.main, App) and gp.main.f == f.step(i), "rec-step-premise")
        _need(gp.value == v, "rec-value")
        _need(isinstance(fp.main, App) and fp.main.f == f, "rec-call-premise")
        ga, fa = gp.main.args, fp.main.args
        _need(len(ga) == len(args) + 1 and len(fa) == len(args), "rec-arity")
        _need(approx_leq(v0, ga[0]) and approx_leq(v0, fa[0]), "rec-scrutinee-approximation")
        _need(approx_leq(fp.value, ga[1]), "rec-call-approximation")
        _args_approx(ga[2:], vals[1:], "rec-step-approximation")
        _args_approx(fa[1:], vals[1:], "rec-call-arg-approximation")


def validate(dag: CompDag) -> Optional[RuleViolation]:
    """None when every node instantiates its rule; else the first violation."""
    if not dag.nodes:
        return RuleViolation(-1, "empty-computation")
    for k, node in enumerate(dag.nodes):
        try:
            st = node.stmt
            _need(isinstance(st, Statement), "malformed-statement")
            _need(is_development(st.env), "env-not-development")
            _need(is_g_numeral(st.value), "value-not-g-numeral")
            for p in node.premises:
                _need(isinstance(p, int) and 0 <= p < k, "premise-order", str(p))
            check_inference(node.rule, st, [dag.nodes[p].stmt for p in node.premises])
        except _Bad as bad:
            return RuleViolation(k, bad.condition, bad.detail)
        except (AttributeError, IndexError, TypeError, ValueError) as exc:
            return RuleViolation(k, "malformed-node", str(exc))
    return None


def is_valid(dag: CompDag) -> bool:
    return validate(dag) is None


def require_valid(dag: CompDag) -> CompDag:
    bad = validate(dag)
    if bad is not None:
        raise CalculusError(f"invalid computation: {bad}")
    return dag


# ---------------------------------------------------------------------------
# Metrics


@dataclass(frozen=True)
class Metrics:
    node_count: int
    M: int
    T: int
    value_max: int


def conclusions(dag: CompDag) -> list:
    return [dag.nodes[i].stmt for i in dag.conclusion_indices()]


def metrics(dag: CompDag) -> Metrics:
    M = max((term_size(n.stmt.main) for n in dag.nodes), default=0)
    T = 0
    for st in conclusions(dag):
        T = max(T, term_size(st.main), dev_size(st.env))
    vmax = max((term_size(n.stmt.value) for n in dag.nodes), default=0)
    return Metrics(len(dag.nodes), M, T, vmax)


def audit_M_bound(dag: CompDag, C) -> tuple:
    m = metrics(dag)
    minimal = Fraction(m.M, (m.T + m.node_count + 1) ** 2)
    return m.M <= C * (m.T + m.node_count + 1) ** 2, minimal


AUDIT_NAMES = ("succ", "num", "const_value", "env_subseq", "value_bound",
               "numeral_subterm", "base")


def audit_structural(dag: CompDag) -> dict:
    """One boolean per structural lemma."""
    stmts = dag.statements()
    stmt_set = set(stmts)
    concl = conclusions(dag)
    m = metrics(dag)
    n = m.node_count
    out = {}
    out["succ"] = all(st.value in (EPS, STAR) for st in stmts if st.main == EPS)
    out["num"] = all(approx_leq(st.main, st.value)
                     for st in stmts if is_g_numeral(st.main))
    # pure STAR values have no numeral computation; see notes
    out["const_value"] = all(Statement(st.value, EMPTY, st.value) in stmt_set
                             for st in stmts if st.value != STAR)
    envs = [c.env for c in concl]
    out["env_subseq"] = all(any(is_subsequence(st.env, e) for e in envs) for st in stmts)
    out["value_bound"] = all(term_size(st.value) <= 3 * n for st in stmts)
    bound = max(3 * n, m.T)
    ok = True
    for st in stmts:
        first = True
        for u in subterms(st.main):
            if first:
                first = False
                continue
            if is_g_numeral(u) and term_size(u) > bound:
                ok = False
    out["numeral_subterm"] = ok
    base = base_symbols([c.main for c in concl] + [t for c in concl for _, t in c.env])
    used = set()
    for st in stmts:
        used |= function_symbols(st.main) | function_symbols(st.value)
        for _, t in st.env:
            used |= function_symbols(t)
    out["base"] = used <= base
    return out


def audit_report(dag: CompDag, C=8) -> dict:
    m = metrics(dag)
    holds, minimal = audit_M_bound(dag, C)
    return {
        "node_count": m.node_count,
        "M": m.M,
        "T": m.T,
        "audits": audit_structural(dag),
        "minimal_C": float(minimal),
        "M_bound_holds": holds,
    }


# ---------------------------------------------------------------------------
# Mutable construction


class DagBuilder:
    """Append-only node store with explicit roots and garbage collection.

    Node ids grow monotonically, so premises always carry smaller ids than
    the nodes using them.
    """

    def __init__(self):
        self.nodes: dict = {}
        self.roots: list = []
        self._next = 0
        self._by_stmt: dict = {}

    @classmethod
    def from_dag(cls, dag: CompDag) -> "DagBuilder":
        b = cls()
        for node in dag.nodes:
            b.add(node.rule, node.premises, node.stmt)
        b.roots = dag.conclusion_indices()
        return b

    def add(self, rule: Rule, premises, stmt: Statement) -> int:
        premises = tuple(premises)
        k = self._next
        self._next += 1
        self.nodes[k] = Node(premises, rule, stmt)
        self._by_stmt.setdefault(stmt, []).append(k)
        return k

    def stmt(self, k) -> Statement:
        return self.nodes[k].stmt

    def node(self, k) -> Node:
        return self.nodes[k]

    def find(self, stmt: Statement, avoid_roots=True) -> Optional[int]:
        roots = set(self.roots) if avoid_roots else ()
        for k in self._by_stmt.get(stmt, ()):
            if k in self.nodes and k not in roots:
                return k
        return None

    def find_or_add(self, rule, premises, stmt) -> int:
        premises = tuple(premises)
        roots = set(self.roots)
        for k in self._by_stmt.get(stmt, ()):
            node = self.nodes.get(k)
            if node is not None and k not in roots and node.rule == rule and node.premises == premises:
                return k
        return self.add(rule, premises, stmt)

    def add_root(self, k):
        if k not in self.roots:
            self.roots.append(k)

    def remove_root(self, k):
        if k in self.roots:
            self.roots.remove(k)

    def replace_root(self, old, new):
        if old == new:
            self.add_root(new)
        elif old in self.roots:
            pos = self.roots.index(old)
            if new in self.roots:
                del self.roots[pos]
            else:
                self.roots[pos] = new
        else:
            self.add_root(new)

    def reachable(self, roots=None) -> set:
        live = set()
        stack = list(self.roots if roots is None else roots)
        while stack:
            k = stack.pop()
            if k in live:
                continue
            live.add(k)
            stack.extend(self.nodes[k].premises)
        return live

    def live_stats(self, roots=None) -> tuple:
        """(node count, max main-term size) of what ``roots`` keep alive."""
        live = self.reachable(roots)
        return len(live), max((term_size(self.nodes[k].stmt.main) for k in live), default=0)

    def surface(self):
        """Duplicate every root that some live node uses as a premise."""
        used = {p for k in self.reachable() for p in self.nodes[k].premises}
        for pos, r in enumerate(self.roots):
            if r in used:
                node = self.nodes[r]
                self.roots[pos] = self.add(node.rule, node.premises, node.stmt)

    def gc(self):
        live = self.reachable()
        self.nodes = {k: n for k, n in self.nodes.items() if k in live}
        self._by_stmt = {}
        for k, n in self.nodes.items():
            self._by_stmt.setdefault(n.stmt, []).append(k)

    def count(self) -> int:
        return len(self.nodes)

    def max_main(self) -> int:
        return max((term_size(n.stmt.main) for n in self.nodes.values()), default=0)

    def to_dag(self) -> CompDag:
        order = sorted(self.nodes)
        pos = {k: i for i, k in enumerate(order)}
        return CompDag(tuple(
            Node(tuple(pos[p] for p in self.nodes[k].premises), self.nodes[k].rule, self.nodes[k].stmt)
            for k in order))

    def position_of(self, k) -> int:
        return sorted(self.nodes).index(k)


# ---------------------------------------------------------------------------
# Surgery


def make_conclusion(dag: CompDag, i: int) -> CompDag:
    """Surface node ``i`` as a conclusion by duplicating its inference."""
    if not 0 <= i < len(dag.nodes):
        raise IndexError(f"node index {i} out of range")
    if i not in dag.used():
        return dag
    node = dag.nodes[i]
    return CompDag(dag.nodes + (Node(node.premises, node.rule, node.stmt),))


def drop_conclusion(dag: CompDag, stmt: Statement) -> CompDag:
    """Remove one conclusion and every node only it depended on."""
    concl = dag.conclusion_indices()
    hits = [i for i in concl if dag.nodes[i].stmt == stmt]
    if not hits:
        raise CalculusError(f"{stmt} is not a conclusion")
    keep = [i for i in concl if i != hits[-1]]
    if not keep:
        raise CalculusError("cannot drop the last conclusion")
    b = DagBuilder.from_dag(dag)
    b.roots = keep
    b.gc()
    return b.to_dag()


def dag_from_nodes(nodes: Iterable) -> CompDag:
    return CompDag(tuple(Node(tuple(p), r, s) for p, r, s in nodes))
