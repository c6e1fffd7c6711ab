"""Standard function-symbol library."""
from __future__ import annotations

from .terms import EPS_DEF, Comp, ConstN, Proj, Rec, Succ


def eps_n(n: int) -> ConstN:
    return ConstN(n)


def proj(n: int, i: int) -> Proj:
    return Proj(n, i)


def zeroize(k: int) -> Rec:
    """g(e) = e, g(s_i x) = s0^k g(x)."""
    if k < 1:
        raise ValueError("zeroize needs k >= 1")
    step = Comp(Succ(0), (Proj(2, 2),))
    for _ in range(k - 1):
        step = Comp(Succ(0), (step,))
    step = Comp(step.g, step.hs, name=f"zstep{k}")
    return Rec(EPS_DEF, step, step, name=f"zeroize{k}")


def zstep(k: int) -> Comp:
    return zeroize(k).g0


IDENTITY = Proj(1, 1)

# h(e) = e, h(s_i x) = eps2(x, h(x))
DISCARD = Rec(EPS_DEF, ConstN(2), ConstN(2), name="discard")

# drops the outermost successor
TAIL = Rec(EPS_DEF, Proj(2, 1), Proj(2, 1), name="tail")

BITFLIP = Rec(
    EPS_DEF,
    Comp(Succ(1), (Proj(2, 2),), name="flipstep0"),
    Comp(Succ(0), (Proj(2, 2),), name="flipstep1"),
    name="bitflip",
)

# concat(x, y): the bits of x followed by y
CONCAT = Rec(
    Proj(1, 1),
    Comp(Succ(0), (Proj(3, 2),), name="catstep0"),
    Comp(Succ(1), (Proj(3, 2),), name="catstep1"),
    name="concat",
)

SWAPCAT = Comp(CONCAT, (Proj(2, 2), Proj(2, 1)), name="swapcat")

DUP = Comp(CONCAT, (Proj(1, 1), Proj(1, 1)), name="dup")

# first argument if the second is empty, otherwise eps
IFEMPTY = Comp(
    Rec(Proj(1, 1), ConstN(3), ConstN(3), name="ifempty_r"),
    (Proj(2, 2), Proj(2, 1)),
    name="ifempty",
)


def build_stdlib() -> dict:
    table = {
        "identity": IDENTITY,
        "discard": DISCARD,
        "tail": TAIL,
        "bitflip": BITFLIP,
        "concat": CONCAT,
        "swapcat": SWAPCAT,
        "dup": DUP,
        "ifempty": IFEMPTY,
        "ifempty_r": IFEMPTY.g,
    }
    for n in (1, 2, 3):
        table[f"eps{n}"] = ConstN(n)
        for i in range(1, n + 1):
            table.setdefault(f"proj{n}_{i}", Proj(n, i))
    for k in (1, 2, 3):
        table[f"zeroize{k}"] = zeroize(k)
        table[f"zstep{k}"] = zstep(k)
    for name, f in list(table.items()):
        for sub in (getattr(f, "hs", ()) + (getattr(f, "g0", None), getattr(f, "g1", None))):
            if sub is not None and getattr(sub, "name", None):
                table.setdefault(sub.name, sub)
    return table


STDLIB = build_stdlib()

# symbols used by random generators (unary/binary, no bare successors as inner functions)
GENERATOR_SYMBOLS = (
    IDENTITY, Proj(2, 1), Proj(2, 2), ConstN(1), ConstN(2),
    zeroize(1), zeroize(2), DISCARD, TAIL, BITFLIP, CONCAT, SWAPCAT, DUP, IFEMPTY,
)
