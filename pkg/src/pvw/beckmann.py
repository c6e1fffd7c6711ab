"""Beckmann's example: short proofs of h(g(s1 n)) = eps whose exact computations grow.

g(eps) = eps, g(s_i x) = s0^k g(x) and h(eps) = eps, h(s_i x) = eps2(x, h(x)).
"""
from __future__ import annotations

from dataclasses import dataclass

from .calculus import CompDag, conclusions, validate
from .evaluator import approx_eval, exact_eval, numeral_comp
from .proofs import axiom, check, cong, proof_nodes, proof_size, trans
from .stdlib import DISCARD, zeroize
from .terms import EMPTY, EPS, ConstN, Term, app, numeral, s1
from .transform import transform_along_proof


@dataclass(frozen=True)
class BeckmannInstance:
    k: int
    n: Term

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")

    @property
    def g(self):
        return zeroize(self.k)

    @property
    def h(self):
        return DISCARD

    @property
    def term(self) -> Term:
        return app(self.h, app(self.g, s1(self.n)))


def instance(k: int, length: int, bits: str = "1") -> BeckmannInstance:
    """Instance whose numeral n has ``length`` successors, cycling through ``bits``."""
    return BeckmannInstance(k, numeral((bits * length)[:length]))


def chain_proof(inst: BeckmannInstance):
    """h(g(s1 n)) = h(zstep(n, g n)) = h(s0 w) = eps2(w, h w) = eps."""
    g, h, n = inst.g, inst.h, inst.n
    gn = app(g, n)
    p1 = cong(h, axiom(g, "s1", {"x": n}))
    step = axiom(g.g1, "comp", {"x1": n, "x2": gn})
    p2 = cong(h, step)
    w = step.instance.rhs.args[0]
    p3 = axiom(h, "s0", {"x": w})
    p4 = axiom(ConstN(2), "constn", {"x1": w, "x2": app(h, w)})
    return trans(p1, p2, p3, p4)


@dataclass
class BeckmannRow:
    k: int
    length: int
    approx_nodes: int
    exact_nodes: int
    proof_nodes: int
    proof_size: int
    transform_nodes: int
    transform_ok: bool

    def to_json(self) -> dict:
        return dict(self.__dict__)


def fixtures(inst: BeckmannInstance, rho=EMPTY) -> dict:
    """The approximate and exact computations, the chain proof and the transformed computation."""
    t = inst.term
    approx = approx_eval(t, rho)
    exact = exact_eval(t, rho)
    proof = chain_proof(inst)
    # from <eps, rho> | eps back to the long term along the proof
    start = numeral_comp(EPS, rho)
    back = transform_along_proof(start, conclusions(start)[0], proof, "bwd")
    return {"approx": approx, "exact": exact, "proof": proof, "transformed": back}


def transform_ok(back, inst: BeckmannInstance, start: CompDag, proof, rho=EMPTY) -> bool:
    concl = back.conclusion
    return (validate(back.dag) is None and concl.main == inst.term and concl.env == rho
            and concl.value == EPS
            and len(back.dag) <= len(start) + proof_size(proof) and back.ledger.overall)


def growth_row(k: int, length: int, rho=EMPTY) -> BeckmannRow:
    inst = instance(k, length)
    fx = fixtures(inst, rho)
    proof = fx["proof"]
    if check(proof) is not None:
        raise ValueError(f"chain proof does not check: {check(proof)}")
    ok = transform_ok(fx["transformed"], inst, numeral_comp(EPS, rho), proof, rho)
    return BeckmannRow(k, length, len(fx["approx"]), len(fx["exact"]), proof_nodes(proof),
                       proof_size(proof), len(fx["transformed"].dag), ok)


def growth_table(k: int, lengths, rho=EMPTY) -> list:
    return [growth_row(k, n, rho) for n in lengths]
