"""Function symbols, PV(*) terms, size measures and developments.

Function symbols are Cobham definition trees. Terms are built from
variables, the approximation constant ``STAR`` and applications of
function symbols. Everything here is immutable and hashable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union


class WellFormednessError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Function symbols


@dataclass(frozen=True)
class Eps:
    def __str__(self):
        return "eps"


@dataclass(frozen=True)
class Succ:
    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise WellFormednessError(f"successor bit must be 0 or 1, got {self.bit}")

    def __str__(self):
        return f"s{self.bit}"


@dataclass(frozen=True)
class ConstN:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise WellFormednessError("eps-n needs arity >= 1")

    def __str__(self):
        return f"eps{self.n}"


@dataclass(frozen=True)
class Proj:
    n: int
    i: int

    def __post_init__(self):
        if self.n < 1 or not 1 <= self.i <= self.n:
            raise WellFormednessError(f"bad projection proj({self.n},{self.i})")

    def __str__(self):
        return f"proj{self.n}_{self.i}"


@dataclass(frozen=True)
class Comp:
    g: "FunctionDef"
    hs: tuple
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "hs", tuple(self.hs))
        if not self.hs:
            raise WellFormednessError("composition needs at least one inner function")
        if arity(self.g) != len(self.hs):
            raise WellFormednessError(
                f"composition: outer arity {arity(self.g)} != {len(self.hs)} inner functions")
        n = arity(self.hs[0])
        if n < 1 or any(arity(h) != n for h in self.hs):
            raise WellFormednessError("composition: inner functions must share one arity >= 1")
        object.__setattr__(self, "_h", hash(("comp", self.g, self.hs)))

    def __hash__(self):
        return self._h

    def __str__(self):
        return self.name or f"comp({self.g};{','.join(map(str, self.hs))})"


@dataclass(frozen=True)
class Rec:
    g_eps: "FunctionDef"
    g0: "FunctionDef"
    g1: "FunctionDef"
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        k = arity(self.g_eps)
        if arity(self.g0) != k + 2 or arity(self.g1) != k + 2:
            raise WellFormednessError("recursion: step functions must have arity arity(g_eps) + 2")
        object.__setattr__(self, "_h", hash(("rec", self.g_eps, self.g0, self.g1)))

    def __hash__(self):
        return self._h

    def step(self, bit: int) -> "FunctionDef":
        return self.g1 if bit else self.g0

    def __str__(self):
        return self.name or f"rec({self.g_eps};{self.g0};{self.g1})"


FunctionDef = Union[Eps, Succ, ConstN, Proj, Comp, Rec]

EPS_DEF = Eps()
S0_DEF = Succ(0)
S1_DEF = Succ(1)


def arity(f: FunctionDef) -> int:
    if isinstance(f, Eps):
        return 0
    if isinstance(f, Succ):
        return 1
    if isinstance(f, (ConstN, Proj)):
        return f.n
    if isinstance(f, Comp):
        return arity(f.hs[0])
    if isinstance(f, Rec):
        return arity(f.g_eps) + 1
    raise TypeError(f"not a function symbol: {f!r}")


def symbol_size(f: FunctionDef) -> int:
    """||f||; ConstN and Proj weigh n+1 so that arity never exceeds size."""
    if isinstance(f, (Eps, Succ)):
        return 1
    if isinstance(f, (ConstN, Proj)):
        return f.n + 1
    if isinstance(f, Comp):
        return 1 + symbol_size(f.g) + sum(symbol_size(h) for h in f.hs)
    if isinstance(f, Rec):
        return 1 + symbol_size(f.g_eps) + symbol_size(f.g0) + symbol_size(f.g1)
    raise TypeError(f"not a function symbol: {f!r}")


def sub_definitions(f: FunctionDef) -> tuple:
    if isinstance(f, Comp):
        return (f.g,) + f.hs
    if isinstance(f, Rec):
        return (f.g_eps, f.g0, f.g1)
    return ()


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Star:
    def __str__(self):
        return "*"


@dataclass(frozen=True, eq=False)
class App:
    f: FunctionDef
    args: tuple = ()
    _hash: int = field(default=0, init=False, repr=False)
    _size: int = field(default=0, init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != arity(self.f):
            raise WellFormednessError(
                f"{self.f} expects {arity(self.f)} arguments, got {len(self.args)}")
        object.__setattr__(self, "_hash", hash((self.f, self.args)))
        m = len(self.args)
        size = symbol_size(self.f)
        if m:
            size += sum(term_size(a) for a in self.args) + m + 1
        object.__setattr__(self, "_size", size)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, App) or self._hash != other._hash:
            return False
        return self.f == other.f and self.args == other.args

    def __str__(self):
        if isinstance(self.f, Eps):
            return "e"
        if isinstance(self.f, Succ):
            return f"s{self.f.bit}{self.args[0]}"
        return f"{self.f}({', '.join(map(str, self.args))})"


Term = Union[Var, Star, App]

STAR = Star()
EPS = App(EPS_DEF)


def s0(t: Term) -> App:
    return App(S0_DEF, (t,))


def s1(t: Term) -> App:
    return App(S1_DEF, (t,))


def succ(bit: int, t: Term) -> App:
    return App(S1_DEF if bit else S0_DEF, (t,))


def app(f: FunctionDef, *args: Term) -> App:
    return App(f, args)


def numeral(bits: str, leaf: Term = EPS) -> Term:
    """Numeral whose outermost successor is ``bits[0]``."""
    t = leaf
    for b in reversed(bits):
        t = succ(int(b), t)
    return t


def numeral_bits(v: Term) -> tuple[str, Term]:
    """Split a g-numeral into its successor bits (outermost first) and leaf."""
    bits = []
    while isinstance(v, App) and isinstance(v.f, Succ):
        bits.append(str(v.f.bit))
        v = v.args[0]
    return "".join(bits), v


def term_size(t: Term) -> int:
    if isinstance(t, App):
        return t._size
    return 1


def is_succ_app(t: Term) -> bool:
    return isinstance(t, App) and isinstance(t.f, Succ)


def is_eps(t: Term) -> bool:
    return isinstance(t, App) and isinstance(t.f, Eps)


def is_g_numeral(t: Term) -> bool:
    while is_succ_app(t):
        t = t.args[0]
    return isinstance(t, Star) or is_eps(t)


def is_star_free(t: Term) -> bool:
    if isinstance(t, Star):
        return False
    if isinstance(t, App):
        return all(is_star_free(a) for a in t.args)
    return True


def successor_count(v: Term) -> int:
    return len(numeral_bits(v)[0])


def free_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, App):
        out = frozenset()
        for a in t.args:
            out |= free_vars(a)
        return out
    return frozenset()


def occurrences(x: str, t: Term) -> int:
    if isinstance(t, Var):
        return int(t.name == x)
    if isinstance(t, App):
        return sum(occurrences(x, a) for a in t.args)
    return 0


def substitute(t: Term, u: Term, x: str) -> Term:
    """t[u/x]."""
    if isinstance(t, Var):
        return u if t.name == x else t
    if isinstance(t, App):
        if not t.args:
            return t
        new = tuple(substitute(a, u, x) for a in t.args)
        if all(a is b for a, b in zip(new, t.args)):
            return t
        return App(t.f, new)
    return t


def rename(t: Term, mapping: dict) -> Term:
    if isinstance(t, Var):
        return Var(mapping.get(t.name, t.name))
    if isinstance(t, App) and t.args:
        return App(t.f, tuple(rename(a, mapping) for a in t.args))
    return t


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def approx_leq(r: Term, t: Term) -> bool:
    """r ⊑ t: t is obtained from r by replacing subterms with STAR."""
    while True:
        if isinstance(t, Star):
            return True
        if isinstance(t, Var):
            return isinstance(r, Var) and r.name == t.name
        if not isinstance(r, App) or r.f != t.f:
            return False
        if len(t.args) == 1:
            r, t = r.args[0], t.args[0]
            continue
        return all(approx_leq(a, b) for a, b in zip(r.args, t.args))


def truncate(v: Term, depth: float) -> Term:
    """Keep the first ``depth`` constructors of a g-numeral, STAR below."""
    bits, leaf = numeral_bits(v)
    if depth > len(bits):
        return v
    return numeral(bits[: int(depth)], STAR)


def meet(a: Term, b: Term) -> Term:
    """Most precise g-numeral approximating both, when they are comparable."""
    if approx_leq(a, b):
        return a
    if approx_leq(b, a):
        return b
    raise ValueError(f"incomparable approximations {a} and {b}")


# ---------------------------------------------------------------------------
# Developments

Development = tuple  # tuple of (name, Term) pairs, outermost binding first

EMPTY: Development = ()


def make_development(bindings: Iterable) -> Development:
    rho = tuple((str(x), t) for x, t in bindings)
    check_development(rho)
    return rho


def check_development(rho: Development) -> None:
    seen = set()
    for x, t in rho:
        if x in seen:
            raise WellFormednessError(f"variable {x} bound twice in development")
        if x in free_vars(t):
            raise WellFormednessError(f"binding [{t}/{x}] is self-referential")
        seen.add(x)


def is_development(rho) -> bool:
    try:
        check_development(rho)
    except WellFormednessError:
        return False
    return True


def dev_size(rho: Development) -> int:
    return sum(term_size(t) + 4 for _, t in rho)


def dev_vars(rho: Development) -> tuple:
    return tuple(x for x, _ in rho)


def dev_lookup(rho: Development, x: str):
    """Return (bound term, development after the binding) or None."""
    for k, (y, t) in enumerate(rho):
        if y == x:
            return t, rho[k + 1:]
    return None


def is_subsequence(small: Development, big: Development) -> bool:
    it = iter(big)
    return all(any(b == s for b in it) for s in small)


def show_dev(rho: Development) -> str:
    return "".join(f"[{t}/{x}]" for x, t in rho) or "()"


# ---------------------------------------------------------------------------
# Base symbols


def base_of_def(f: FunctionDef, acc: Optional[set] = None) -> set:
    acc = set() if acc is None else acc
    if f in acc:
        return acc
    acc.add(f)
    if isinstance(f, ConstN):
        # eps^n evaluates to eps
        acc.add(EPS_DEF)
    for g in sub_definitions(f):
        base_of_def(g, acc)
    return acc


def function_symbols(t: Term) -> set:
    out = set()
    for s in subterms(t):
        if isinstance(s, App):
            out.add(s.f)
    return out


def base_symbols(obj) -> frozenset:
    """Transitive closure of definition trees of every symbol in ``obj``.

    ``obj`` may be a term, a function symbol, a development or an iterable
    of those.
    """
    acc: set = set()
    _collect_base(obj, acc)
    return frozenset(acc)


def _collect_base(obj, acc):
    if isinstance(obj, (Eps, Succ, ConstN, Proj, Comp, Rec)):
        base_of_def(obj, acc)
    elif isinstance(obj, (Var, Star)):
        pass
    elif isinstance(obj, App):
        for f in function_symbols(obj):
            base_of_def(f, acc)
    elif isinstance(obj, (tuple, list, set, frozenset)):
        for item in obj:
            if isinstance(item, str):
                continue
            _collect_base(item, acc)
    else:
        raise TypeError(f"cannot take base symbols of {obj!r}")
