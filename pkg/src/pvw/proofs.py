"""Tree-like equational proofs: defining axioms and equality rules only."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .terms import (
    EPS, App, Comp, ConstN, Proj, Rec, Term, Var, arity, free_vars,
    is_star_free, rename, substitute, succ, term_size,
)


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def size(self) -> int:
        return term_size(self.lhs) + term_size(self.rhs)

    def flip(self) -> "Equation":
        return Equation(self.rhs, self.lhs)

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


AXIOM_CASES = ("eps", "s0", "s1", "comp", "constn", "proj")


@dataclass(frozen=True)
class DefAxiom:
    f: object
    case: str
    instance: Equation


@dataclass(frozen=True)
class Identity:
    t: Term


@dataclass(frozen=True)
class Symmetry:
    p: "Proof"


@dataclass(frozen=True)
class Transitivity:
    p: "Proof"
    q: "Proof"


@dataclass(frozen=True)
class Congruence:
    f: object
    ps: tuple

    def __post_init__(self):
        object.__setattr__(self, "ps", tuple(self.ps))


@dataclass(frozen=True)
class SubstRule:
    p: "Proof"
    r: Term
    x: str


Proof = Union[DefAxiom, Identity, Symmetry, Transitivity, Congruence, SubstRule]


class ProofError(Exception):
    def __init__(self, path, message):
        super().__init__(f"{'/'.join(path) or 'root'}: {message}")
        self.path = tuple(path)
        self.message = message


@dataclass(frozen=True)
class ProofViolation:
    path: tuple
    message: str

    def location(self) -> str:
        return "/".join(self.path) or "root"

    def __str__(self):
        return f"{self.location()}: {self.message}"


# ---------------------------------------------------------------------------
# Axiom schemas

X = Var("x")


def schema_vars(n: int) -> tuple:
    return tuple(Var(f"x{i}") for i in range(1, n + 1))


def axiom_schema(f, case: str) -> Equation:
    """The defining axiom of ``f`` over the variables x, x1, ..., xn."""
    if case == "constn" and isinstance(f, ConstN):
        return Equation(App(f, schema_vars(f.n)), EPS)
    if case == "proj" and isinstance(f, Proj):
        xs = schema_vars(f.n)
        return Equation(App(f, xs), xs[f.i - 1])
    if case == "comp" and isinstance(f, Comp):
        xs = schema_vars(arity(f))
        return Equation(App(f, xs), App(f.g, tuple(App(h, xs) for h in f.hs)))
    if isinstance(f, Rec) and case in ("eps", "s0", "s1"):
        xs = schema_vars(arity(f) - 1)
        if case == "eps":
            return Equation(App(f, (EPS,) + xs), App(f.g_eps, xs))
        bit = int(case[1])
        return Equation(App(f, (succ(bit, X),) + xs), App(f.step(bit), (X, App(f, (X,) + xs)) + xs))
    raise ProofError((), f"no defining axiom {case} for {f}")


def axiom_cases(f) -> tuple:
    if isinstance(f, ConstN):
        return ("constn",)
    if isinstance(f, Proj):
        return ("proj",)
    if isinstance(f, Comp):
        return ("comp",)
    if isinstance(f, Rec):
        return ("eps", "s0", "s1")
    return ()


def match(pattern: Term, t: Term, theta: dict) -> bool:
    if isinstance(pattern, Var):
        bound = theta.get(pattern.name)
        if bound is None:
            theta[pattern.name] = t
            return True
        return bound == t
    if not isinstance(t, App) or not isinstance(pattern, App) or pattern.f != t.f:
        return False
    return all(match(p, a, theta) for p, a in zip(pattern.args, t.args))


def instantiate(eq: Equation, theta: dict) -> Equation:
    def go(t):
        if isinstance(t, Var):
            return theta.get(t.name, t)
        if isinstance(t, App) and t.args:
            return App(t.f, tuple(go(a) for a in t.args))
        return t
    return Equation(go(eq.lhs), go(eq.rhs))


def axiom(f, case: str, theta: Optional[dict] = None) -> DefAxiom:
    """DefAxiom node for the schema instantiated by ``theta`` (variables default to themselves)."""
    schema = axiom_schema(f, case)
    return DefAxiom(f, case, instantiate(schema, theta or {}))


# ---------------------------------------------------------------------------
# Checking


def _star_free(t, path, what):
    if not is_star_free(t):
        raise ProofError(path, f"{what} contains Star")


def _conclusion(p, path) -> Equation:
    if isinstance(p, Identity):
        _star_free(p.t, path, "identity term")
        return Equation(p.t, p.t)
    if isinstance(p, Symmetry):
        return _conclusion(p.p, path + ("sym",)).flip()
    if isinstance(p, Transitivity):
        a = _conclusion(p.p, path + ("trans.left",))
        b = _conclusion(p.q, path + ("trans.right",))
        if a.rhs != b.lhs:
            raise ProofError(path, f"transitivity middle terms differ: {a.rhs} vs {b.lhs}")
        return Equation(a.lhs, b.rhs)
    if isinstance(p, Congruence):
        if isinstance(p.f, str) or p.f is None:
            raise ProofError(path, "congruence needs a function symbol")
        if len(p.ps) != arity(p.f):
            raise ProofError(path, f"congruence arity mismatch for {p.f}")
        eqs = [_conclusion(q, path + (f"cong.arg{i + 1}",)) for i, q in enumerate(p.ps)]
        return Equation(App(p.f, tuple(e.lhs for e in eqs)), App(p.f, tuple(e.rhs for e in eqs)))
    if isinstance(p, SubstRule):
        _star_free(p.r, path, "substituted term")
        e = _conclusion(p.p, path + ("subst",))
        return Equation(substitute(e.lhs, p.r, p.x), substitute(e.rhs, p.r, p.x))
    if isinstance(p, DefAxiom):
        if p.case not in AXIOM_CASES:
            raise ProofError(path, f"unknown axiom case {p.case}")
        schema = axiom_schema(p.f, p.case) if p.case in axiom_cases(p.f) else None
        if schema is None:
            raise ProofError(path, f"{p.f} has no defining axiom {p.case}")
        inst = p.instance
        _star_free(inst.lhs, path, "axiom instance")
        _star_free(inst.rhs, path, "axiom instance")
        theta = {}
        if not (match(schema.lhs, inst.lhs, theta) and match(schema.rhs, inst.rhs, theta)):
            raise ProofError(path, f"instance {inst} does not match the {p.case} axiom of {p.f}")
        return inst
    raise ProofError(path, f"unknown proof node {p!r}")


def conclusion(p: Proof) -> Equation:
    try:
        return _conclusion(p, ())
    except ProofError:
        raise
    except (AttributeError, TypeError, ValueError) as exc:
        raise ProofError((), f"malformed proof: {exc}") from exc


def check(p: Proof) -> Optional[ProofViolation]:
    """None if ``p`` is a correct derivation, otherwise the located violation."""
    try:
        conclusion(p)
    except ProofError as err:
        return ProofViolation(err.path, err.message)
    return None


def children(p: Proof) -> tuple:
    if isinstance(p, (Symmetry, SubstRule)):
        return (p.p,)
    if isinstance(p, Transitivity):
        return (p.p, p.q)
    if isinstance(p, Congruence):
        return p.ps
    return ()


def proof_size(p: Proof) -> int:
    """Sum over nodes of the symbol count of that node's equation plus one."""
    return conclusion(p).size() + 1 + sum(proof_size(q) for q in children(p))


def proof_nodes(p: Proof) -> int:
    return 1 + sum(proof_nodes(q) for q in children(p))


def proof_depth(p: Proof) -> int:
    return 1 + max((proof_depth(q) for q in children(p)), default=0)


def proof_vars(p: Proof) -> set:
    e = conclusion(p)
    out = set(free_vars(e.lhs) | free_vars(e.rhs))
    if isinstance(p, SubstRule):
        out.add(p.x)
        out |= free_vars(p.r)
    for q in children(p):
        out |= proof_vars(q)
    return out


def rename_proof(p: Proof, mapping: dict) -> Proof:
    """Rename variables everywhere in ``p``, including substitution variables."""
    if isinstance(p, Identity):
        return Identity(rename(p.t, mapping))
    if isinstance(p, Symmetry):
        return Symmetry(rename_proof(p.p, mapping))
    if isinstance(p, Transitivity):
        return Transitivity(rename_proof(p.p, mapping), rename_proof(p.q, mapping))
    if isinstance(p, Congruence):
        return Congruence(p.f, tuple(rename_proof(q, mapping) for q in p.ps))
    if isinstance(p, SubstRule):
        return SubstRule(rename_proof(p.p, mapping), rename(p.r, mapping), mapping.get(p.x, p.x))
    if isinstance(p, DefAxiom):
        inst = Equation(rename(p.instance.lhs, mapping), rename(p.instance.rhs, mapping))
        return DefAxiom(p.f, p.case, inst)
    raise TypeError(f"unknown proof node {p!r}")


# convenience constructors

def refl(t):
    return Identity(t)


def sym(p):
    return Symmetry(p)


def trans(p, q, *more):
    out = Transitivity(p, q)
    for r in more:
        out = Transitivity(out, r)
    return out


def cong(f, *ps):
    return Congruence(f, ps)


def cong_at(f, args, i, p):
    """Congruence changing only argument ``i``; the rest use identity."""
    return Congruence(f, tuple(p if j == i else Identity(a) for j, a in enumerate(args)))
