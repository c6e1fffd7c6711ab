"""Text formats for definitions, terms, environments, proofs and computations."""
from __future__ import annotations

import dataclasses
from typing import Optional

from .calculus import RULE_KINDS, CompDag, Node, Rule, Statement
from .proofs import (
    AXIOM_CASES, Congruence, DefAxiom, Equation, Identity, SubstRule, Symmetry,
    Transitivity,
)
from .sexpr import Atom, ParseError, SList, dump, read, sl
from .stdlib import STDLIB
from .terms import (
    EPS, EPS_DEF, S0_DEF, S1_DEF, STAR, App, Comp, ConstN, Eps, Proj, Rec, Star,
    Succ, Var, WellFormednessError, arity, check_development,
)


def _err(msg, expr):
    return ParseError(msg, getattr(expr, "line", 0), getattr(expr, "col", 0))


def _atom(expr, what) -> str:
    if not isinstance(expr, Atom):
        raise _err(f"expected {what}", expr)
    return expr.text


def _int(expr, what) -> int:
    text = _atom(expr, what)
    try:
        return int(text)
    except ValueError:
        raise _err(f"expected integer {what}, got {text!r}", expr) from None


def _list(expr, head, n=None, at_least=None) -> SList:
    if not isinstance(expr, SList) or expr.head() != head:
        raise _err(f"expected ({head} ...)", expr)
    if n is not None and len(expr) != n + 1:
        raise _err(f"({head} ...) takes {n} argument(s), got {len(expr) - 1}", expr)
    if at_least is not None and len(expr) < at_least + 1:
        raise _err(f"({head} ...) needs at least {at_least} argument(s)", expr)
    return expr


# ---------------------------------------------------------------------------
# Definitions


class Defs:
    """Named definitions; unknown names fall back to the standard library."""

    def __init__(self, table: Optional[dict] = None, use_stdlib=True):
        self.table = dict(table or {})
        self.use_stdlib = use_stdlib

    def lookup(self, name):
        if name in self.table:
            return self.table[name]
        if self.use_stdlib and name in STDLIB:
            return STDLIB[name]
        return None

    def name_of(self, f) -> Optional[str]:
        if not isinstance(f, (Comp, Rec)):
            return None
        for source in (self.table, STDLIB if self.use_stdlib else {}):
            for name, g in source.items():
                if g == f and _same_name(g, f):
                    return name
        return None


def _same_name(g, f) -> bool:
    return getattr(g, "name", None) == getattr(f, "name", None) or getattr(f, "name", None) is None


def _named(f, name):
    if isinstance(f, (Comp, Rec)):
        return dataclasses.replace(f, name=name)
    return f


def parse_def_expr(expr, defs: Defs):
    try:
        return _def(expr, defs)
    except WellFormednessError as exc:
        raise _err(str(exc), expr) from None


def _def(expr, defs):
    if isinstance(expr, Atom):
        table = {"eps": EPS_DEF, "s0": S0_DEF, "s1": S1_DEF}
        if expr.text in table:
            return table[expr.text]
        raise _err(f"unknown definition atom {expr.text!r}", expr)
    head = expr.head()
    if head == "eps-n":
        _list(expr, head, 1)
        return ConstN(_int(expr[1], "arity"))
    if head == "proj":
        _list(expr, head, 2)
        return Proj(_int(expr[1], "arity"), _int(expr[2], "index"))
    if head == "comp":
        _list(expr, head, at_least=2)
        return Comp(_def(expr[1], defs), tuple(_def(e, defs) for e in expr.items[2:]))
    if head == "rec":
        _list(expr, head, 3)
        return Rec(_def(expr[1], defs), _def(expr[2], defs), _def(expr[3], defs))
    if head == "named":
        _list(expr, head, 1)
        name = _atom(expr[1], "definition name")
        f = defs.lookup(name)
        if f is None:
            raise _err(f"unknown named definition {name!r}", expr[1])
        return f
    raise _err(f"unknown definition form {head!r}", expr)


def emit_def_expr(f, defs: Optional[Defs] = None, top=False):
    if defs is not None and not top:
        name = defs.name_of(f)
        if name is not None:
            return sl("named", name)
    if isinstance(f, Eps):
        return Atom("eps")
    if isinstance(f, Succ):
        return Atom(f"s{f.bit}")
    if isinstance(f, ConstN):
        return sl("eps-n", f.n)
    if isinstance(f, Proj):
        return sl("proj", f.n, f.i)
    if isinstance(f, Comp):
        return sl("comp", emit_def_expr(f.g, defs), *(emit_def_expr(h, defs) for h in f.hs))
    if isinstance(f, Rec):
        return sl("rec", *(emit_def_expr(g, defs) for g in (f.g_eps, f.g0, f.g1)))
    raise TypeError(f"not a function symbol: {f!r}")


def parse_defs(text: str, use_stdlib=True) -> Defs:
    """``(defs (def NAME DEF)...)``; later definitions may use earlier names."""
    expr = read(text)
    _list(expr, "defs")
    defs = Defs({}, use_stdlib)
    for item in expr.items[1:]:
        _list(item, "def", 2)
        name = _atom(item[1], "definition name")
        if name in defs.table:
            raise _err(f"definition {name!r} given twice", item[1])
        defs.table[name] = _named(parse_def_expr(item[2], defs), name)
    return defs


def emit_defs(defs: Defs) -> str:
    prior = Defs({}, defs.use_stdlib)
    items = []
    for name, f in defs.table.items():
        items.append(sl("def", name, emit_def_expr(f, prior, top=True)))
        prior.table[name] = f
    return dump(sl("defs", *items))


# ---------------------------------------------------------------------------
# Terms and environments


def parse_term_expr(expr, defs: Defs):
    if isinstance(expr, Atom):
        if expr.text == "eps":
            return EPS
        if expr.text == "star":
            return STAR
        raise _err(f"unknown term atom {expr.text!r}", expr)
    head = expr.head()
    if head in ("s0", "s1"):
        _list(expr, head, 1)
        return App(Succ(int(head[1])), (parse_term_expr(expr[1], defs),))
    if head == "var":
        _list(expr, head, 1)
        return Var(_atom(expr[1], "variable name"))
    if head == "app":
        _list(expr, head, at_least=1)
        f = parse_def_expr(expr[1], defs)
        args = tuple(parse_term_expr(e, defs) for e in expr.items[2:])
        if len(args) != arity(f):
            raise _err(f"{f} expects {arity(f)} argument(s), got {len(args)}", expr)
        return App(f, args)
    raise _err(f"unknown term form {head!r}", expr)


def emit_term_expr(t, defs: Optional[Defs] = None):
    if isinstance(t, Star):
        return Atom("star")
    if isinstance(t, Var):
        return sl("var", t.name)
    if isinstance(t.f, Eps):
        return Atom("eps")
    if isinstance(t.f, Succ):
        return sl(f"s{t.f.bit}", emit_term_expr(t.args[0], defs))
    return sl("app", emit_def_expr(t.f, defs), *(emit_term_expr(a, defs) for a in t.args))


def parse_env_expr(expr, defs: Defs) -> tuple:
    _list(expr, "env")
    rho = []
    for b in expr.items[1:]:
        _list(b, "bind", 2)
        rho.append((_atom(b[1], "variable name"), parse_term_expr(b[2], defs)))
    rho = tuple(rho)
    try:
        check_development(rho)
    except WellFormednessError as exc:
        raise _err(str(exc), expr) from None
    return rho


def emit_env_expr(rho, defs: Optional[Defs] = None):
    return sl("env", *(sl("bind", x, emit_term_expr(t, defs)) for x, t in rho))


# ---------------------------------------------------------------------------
# Proofs


def parse_proof_expr(expr, defs: Defs):
    head = expr.head() if isinstance(expr, SList) else ""
    if head == "refl":
        _list(expr, head, 1)
        return Identity(parse_term_expr(expr[1], defs))
    if head == "sym":
        _list(expr, head, 1)
        return Symmetry(parse_proof_expr(expr[1], defs))
    if head == "trans":
        _list(expr, head, 2)
        return Transitivity(parse_proof_expr(expr[1], defs), parse_proof_expr(expr[2], defs))
    if head == "cong":
        _list(expr, head, at_least=1)
        return Congruence(parse_def_expr(expr[1], defs),
                          tuple(parse_proof_expr(e, defs) for e in expr.items[2:]))
    if head == "substp":
        _list(expr, head, 3)
        return SubstRule(parse_proof_expr(expr[1], defs), parse_term_expr(expr[2], defs),
                         _atom(expr[3], "variable name"))
    if head == "axiom":
        _list(expr, head, 3)
        f = parse_def_expr(expr[1], defs)
        case = _atom(expr[2], "axiom case")
        if case not in AXIOM_CASES:
            raise _err(f"unknown axiom case {case!r}", expr[2])
        eq = _list(expr[3], "eq", 2)
        return DefAxiom(f, case, Equation(parse_term_expr(eq[1], defs), parse_term_expr(eq[2], defs)))
    raise _err("expected a proof form (refl, sym, trans, cong, substp, axiom)", expr)


def emit_proof_expr(p, defs: Optional[Defs] = None):
    t = lambda x: emit_term_expr(x, defs)  # noqa: E731
    if isinstance(p, Identity):
        return sl("refl", t(p.t))
    if isinstance(p, Symmetry):
        return sl("sym", emit_proof_expr(p.p, defs))
    if isinstance(p, Transitivity):
        return sl("trans", emit_proof_expr(p.p, defs), emit_proof_expr(p.q, defs))
    if isinstance(p, Congruence):
        return sl("cong", emit_def_expr(p.f, defs), *(emit_proof_expr(q, defs) for q in p.ps))
    if isinstance(p, SubstRule):
        return sl("substp", emit_proof_expr(p.p, defs), t(p.r), p.x)
    if isinstance(p, DefAxiom):
        return sl("axiom", emit_def_expr(p.f, defs), p.case,
                  sl("eq", t(p.instance.lhs), t(p.instance.rhs)))
    raise TypeError(f"unknown proof node {p!r}")


# ---------------------------------------------------------------------------
# Computations


def parse_comp_expr(expr, defs: Defs) -> CompDag:
    _list(expr, "comp")
    ids = {}
    nodes = []
    for item in expr.items[1:]:
        _list(item, "node", 4)
        nid = _int(item[1], "node id")
        if nid in ids:
            raise _err(f"node id {nid} used twice", item[1])
        rule_e = _list(item[2], "rule", at_least=1)
        kind = _atom(rule_e[1], "rule tag")
        if kind not in RULE_KINDS:
            raise _err(f"unknown rule {kind!r}", rule_e[1])
        params = tuple(_int(e, "rule parameter") for e in rule_e.items[2:])
        prem_e = _list(item[3], "prem")
        prems = []
        for e in prem_e.items[1:]:
            pid = _int(e, "premise id")
            if pid not in ids:
                raise _err(f"premise {pid} does not name an earlier node", e)
            prems.append(ids[pid])
        st = _list(item[4], "stmt", 3)
        stmt = Statement(parse_term_expr(st[1], defs), parse_env_expr(st[2], defs),
                         parse_term_expr(st[3], defs))
        ids[nid] = len(nodes)
        nodes.append(Node(tuple(prems), Rule(kind, params), stmt))
    return CompDag(tuple(nodes))


def emit_comp_expr(dag: CompDag, defs: Optional[Defs] = None):
    items = []
    for i, n in enumerate(dag.nodes):
        st = n.stmt
        items.append(sl(
            "node", i, sl("rule", n.rule.kind, *n.rule.params), sl("prem", *n.premises),
            sl("stmt", emit_term_expr(st.main, defs), emit_env_expr(st.env, defs),
               emit_term_expr(st.value, defs))))
    return sl("comp", *items)


# ---------------------------------------------------------------------------
# Text entry points


def _text_parser(fn):
    def parse(text: str, defs: Optional[Defs] = None):
        return fn(read(text), defs or Defs())
    parse.__name__ = fn.__name__.replace("_expr", "")
    parse.__doc__ = f"Parse text with :func:`{fn.__name__}`."
    return parse


def _text_emitter(fn):
    def emit(value, defs: Optional[Defs] = None) -> str:
        return dump(fn(value, defs))
    emit.__name__ = fn.__name__.replace("_expr", "")
    return emit


parse_def = _text_parser(parse_def_expr)
parse_term = _text_parser(parse_term_expr)
parse_env = _text_parser(parse_env_expr)
parse_proof = _text_parser(parse_proof_expr)
parse_comp = _text_parser(parse_comp_expr)
emit_term = _text_emitter(emit_term_expr)
emit_env = _text_emitter(emit_env_expr)
emit_proof = _text_emitter(emit_proof_expr)
emit_comp = _text_emitter(emit_comp_expr)


def emit_def(f, defs: Optional[Defs] = None) -> str:
    return dump(emit_def_expr(f, defs, top=True))
