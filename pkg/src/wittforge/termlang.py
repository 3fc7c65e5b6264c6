"""Three-sorted terms over quadratic geometries with a distinguished point q*.

Sorts are K (field), V (vectors) and Q (forms). Terms are written as
S-expressions:

    K:  KVAR | 0k | 1k | (lit b0 b1 ...) | (+ k k) | (* k k)
        | (pi n i v1 ... vn w) | (bV v v) | (bQ q v)
    V:  VVAR | 0v | (+v v v) | (sm k v) | (-Q q q)
    Q:  QVAR | qstar | (+Q q v)

Variables whose names start with k, v or q get that sort; other names
take their sort from the first position they occur in (or from an explicit
``sorts`` mapping).

:func:`normalize_term` rewrites every bV/bQ node into sums and products of
the six basic atoms

    bQ(q*, x)   bQ(q*, X - q*)   bQ(q*, X - Y)
    bV(x, y)    bV(x, Y - q*)    bV(X - q*, Y - q*)

(x, y vector variables; X, Y form variables), leaving the rest of the term
untouched.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionMismatch, SortError, TermSyntaxError, UnboundVariable
from .gf2k import FieldElem, GF
from .quadgeom import QPoint, QuadraticGeometry
from .quadspace import QuadraticSpace, Vector, pi as pi_coord

K, V, Q = "K", "V", "Q"

# op -> (result sort, argument sorts); pi is handled separately
_SIGNATURES = {
    "+": (K, (K, K)),
    "*": (K, (K, K)),
    "bV": (K, (V, V)),
    "bQ": (K, (Q, V)),
    "+v": (V, (V, V)),
    "sm": (V, (K, V)),
    "-Q": (V, (Q, Q)),
    "+Q": (Q, (Q, V)),
}
_CONSTANTS = {"0k": K, "1k": K, "0v": V, "qstar": Q}
_VAR_SORT = {"kvar": K, "vvar": V, "qvar": Q}


@dataclass(frozen=True)
class Term:
    op: str
    args: tuple = ()
    name: str | None = None
    n: int | None = None
    i: int | None = None
    bits: tuple | None = None

    @property
    def sort(self) -> str:
        if self.op in _VAR_SORT:
            return _VAR_SORT[self.op]
        if self.op in _CONSTANTS:
            return _CONSTANTS[self.op]
        if self.op in ("pi", "lit"):
            return K
        return _SIGNATURES[self.op][0]

    @property
    def is_var(self) -> bool:
        return self.op in _VAR_SORT

    def __str__(self) -> str:
        return to_sexpr(self)


# -- constructors -----------------------------------------------------------

def var(name: str, sort: str) -> Term:
    return Term({K: "kvar", V: "vvar", Q: "qvar"}[sort], name=name)


ZERO_K = Term("0k")
ONE_K = Term("1k")
ZERO_V = Term("0v")
QSTAR = Term("qstar")


def op(name: str, *args: Term) -> Term:
    sig = _SIGNATURES[name]
    if len(args) != len(sig[1]):
        raise SortError(f"{name} takes {len(sig[1])} arguments")
    for a, s in zip(args, sig[1]):
        if a.sort != s:
            raise SortError(f"argument {to_sexpr(a)} of {name} has sort {a.sort}, expected {s}")
    return Term(name, tuple(args))


def pi_term(n: int, i: int, vs: Iterable[Term], w: Term) -> Term:
    vs = tuple(vs)
    if len(vs) != n or not 1 <= i <= n:
        raise SortError(f"pi needs n = {n} vectors and 1 <= i <= n")
    for a in vs + (w,):
        if a.sort != V:
            raise SortError(f"argument {to_sexpr(a)} of pi has sort {a.sort}, expected V")
    return Term("pi", vs + (w,), n=n, i=i)


def lit(bits: Iterable[int]) -> Term:
    return Term("lit", bits=tuple(int(b) for b in bits))


# -- printing ---------------------------------------------------------------

def to_sexpr(t: Term) -> str:
    if t.is_var:
        return t.name
    if t.op in _CONSTANTS:
        return t.op
    if t.op == "lit":
        return "(lit " + " ".join(map(str, t.bits)) + ")"
    if t.op == "pi":
        return f"(pi {t.n} {t.i} " + " ".join(to_sexpr(a) for a in t.args) + ")"
    return f"({t.op} " + " ".join(to_sexpr(a) for a in t.args) + ")"


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


def _tokenize(text: str) -> list[tuple[str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise TermSyntaxError("unexpected character", pos)
        tok = m.group(1) or m.group(2) or m.group(3)
        if tok is None:
            break
        out.append((tok, m.start(m.lastindex)))
        pos = m.end()
    return out


def _prefix_sort(name: str) -> str | None:
    return {"k": K, "v": V, "q": Q}.get(name[0])


def parse_term(text: str, sorts: Mapping[str, str] | None = None) -> Term:
    """Parse and sort-check an S-expression term."""
    toks = _tokenize(text)
    declared = dict(sorts or {})
    inferred: dict[str, str] = {}
    pos = 0

    def peek() -> tuple[str, int]:
        if pos >= len(toks):
            raise TermSyntaxError("unexpected end of input", len(text))
        return toks[pos]

    def expect_int() -> int:
        nonlocal pos
        tok, p = peek()
        if not tok.isdigit():
            raise TermSyntaxError(f"expected an integer, got {tok!r}", p)
        pos += 1
        return int(tok)

    def parse(expected: str | None) -> Term:
        nonlocal pos
        tok, p = peek()
        pos += 1
        if tok == ")":
            raise TermSyntaxError("unexpected ')'", p)
        if tok != "(":
            if tok in _CONSTANTS:
                t = Term(tok)
            elif _IDENT.match(tok):
                sort = declared.get(tok) or _prefix_sort(tok) or inferred.get(tok) or expected
                if sort is None:
                    raise SortError(f"cannot infer the sort of variable {tok}")
                inferred.setdefault(tok, sort)
                if inferred[tok] != sort:
                    raise SortError(f"variable {tok} used at sorts {inferred[tok]} and {sort}")
                t = var(tok, sort)
            else:
                raise TermSyntaxError(f"bad token {tok!r}", p)
            if expected is not None and t.sort != expected:
                raise SortError(f"{tok} has sort {t.sort} where {expected} is expected (position {p})")
            return t
        head, hp = peek()
        pos += 1
        if head == "lit":
            bits = []
            while peek()[0] != ")":
                btok, bp = peek()
                if btok not in ("0", "1"):
                    raise TermSyntaxError(f"lit takes bits, got {btok!r}", bp)
                bits.append(int(btok))
                pos += 1
            t = lit(bits)
        elif head == "pi":
            n = expect_int()
            i = expect_int()
            if n < 1 or not 1 <= i <= n:
                raise SortError(f"pi {n} {i}: need 1 <= i <= n (position {hp})")
            args = [parse(V) for _ in range(n + 1)]
            t = pi_term(n, i, args[:n], args[n])
        elif head in _SIGNATURES:
            res, argsorts = _SIGNATURES[head]
            args = [parse(s) for s in argsorts]
            t = Term(head, tuple(args))
        else:
            raise TermSyntaxError(f"unknown operator {head!r}", hp)
        tok, p = peek()
        if tok != ")":
            raise TermSyntaxError(f"expected ')' after {head} arguments", p)
        pos += 1
        if expected is not None and t.sort != expected:
            raise SortError(f"({head} ...) has sort {t.sort} where {expected} is expected (position {hp})")
        return t

    t = parse(None)
    if pos != len(toks):
        raise TermSyntaxError("trailing input", toks[pos][1])
    return t


def free_vars(t: Term) -> dict[str, str]:
    out: dict[str, str] = {}

    def walk(s: Term) -> None:
        if s.is_var:
            out[s.name] = s.sort
        for a in s.args:
            walk(a)

    walk(t)
    return out


def size(t: Term) -> int:
    return 1 + sum(size(a) for a in t.args)


# -- evaluation ---------------------------------------------------------------

def eval_term(t: Term, model: QuadraticGeometry, assignment: Mapping, qstar: QPoint | None = None):
    """Value of t in the geometry; q* defaults to the base point."""
    qs = model.base if qstar is None else qstar
    F = model.field
    S = model.space
    memo: dict[int, object] = {}

    def ev(s: Term):
        key = id(s)
        if key in memo:
            return memo[key]
        o = s.op
        if s.is_var:
            if s.name not in assignment:
                raise UnboundVariable(f"variable {s.name} is not assigned")
            val = assignment[s.name]
            want = {K: FieldElem, V: Vector, Q: QPoint}[s.sort]
            if not isinstance(val, want):
                raise SortError(f"{s.name} is assigned a {type(val).__name__}, expected sort {s.sort}")
            r = val
        elif o == "0k":
            r = F.zero
        elif o == "1k":
            r = F.one
        elif o == "lit":
            if len(s.bits) != F.k:
                raise DimensionMismatch(f"literal has {len(s.bits)} bits, field has k = {F.k}")
            r = F(list(s.bits))
        elif o == "0v":
            r = S.zero()
        elif o == "qstar":
            r = qs
        elif o == "+":
            r = ev(s.args[0]) + ev(s.args[1])
        elif o == "*":
            r = ev(s.args[0]) * ev(s.args[1])
        elif o == "pi":
            vals = [ev(a) for a in s.args]
            r = pi_coord(vals[:-1], vals[-1], s.i)
        elif o == "bV":
            r = S.eval_beta(ev(s.args[0]), ev(s.args[1]))
        elif o == "bQ":
            r = model.eval_Q(ev(s.args[0]), ev(s.args[1]))
        elif o == "+v":
            r = ev(s.args[0]) + ev(s.args[1])
        elif o == "sm":
            r = ev(s.args[1]).scale(ev(s.args[0]))
        elif o == "-Q":
            r = model.q_diff(ev(s.args[0]), ev(s.args[1]))
        elif o == "+Q":
            r = model.q_act(ev(s.args[0]), ev(s.args[1]))
        else:
            raise AssertionError(f"unknown op {o}")
        memo[key] = r
        return r

    return ev(t)


# -- normal form --------------------------------------------------------------

def _is_qdiff_star(t: Term) -> bool:
    """X - q* with X a form variable."""
    return t.op == "-Q" and t.args[0].op == "qvar" and t.args[1].op == "qstar"


def is_batom(t: Term) -> bool:
    if t.op == "bQ":
        p, a = t.args
        if p.op != "qstar":
            return False
        if a.op == "vvar" or _is_qdiff_star(a):
            return True
        return a.op == "-Q" and a.args[0].op == "qvar" and a.args[1].op == "qvar"
    if t.op == "bV":
        a, b = t.args
        if a.op == "vvar" and (b.op == "vvar" or _is_qdiff_star(b)):
            return True
        return _is_qdiff_star(a) and _is_qdiff_star(b)
    return False


def is_normal(t: Term) -> bool:
    """No bV/bQ node other than a basic atom."""
    if t.op in ("bV", "bQ"):
        return is_batom(t)
    return all(is_normal(a) for a in t.args)


def _s(t: Term) -> int:
    if t.op == "qstar":
        return 0
    extra = 1 if t.op == "-Q" and t.args[0].op == "qstar" and t.args[1].op != "qstar" else 0
    return 1 + extra + sum(_s(a) for a in t.args)


def beta_weight(t: Term) -> int:
    """Termination measure of a bV/bQ node."""
    if t.op == "bV":
        return _s(t.args[0]) + _s(t.args[1])
    return 2 + 2 * _s(t.args[0]) + _s(t.args[1])


def _add(a: Term, b: Term) -> Term:
    return Term("+", (a, b))


def _mul(a: Term, b: Term) -> Term:
    return Term("*", (a, b))


def _diff(a: Term, b: Term) -> Term:
    return Term("-Q", (a, b))


class _Normalizer:
    def __init__(self) -> None:
        self.steps = 0

    def child(self, parent_w: int, t: Term) -> Term:
        w = beta_weight(t)
        if w >= parent_w:
            raise AssertionError(f"rewrite did not decrease the measure: {to_sexpr(t)}")
        return self.beta(t)

    def beta(self, t: Term) -> Term:
        self.steps += 1
        if t.op == "bV":
            return self.bV(t)
        return self.bQ(t)

    def bV(self, t: Term) -> Term:
        W = beta_weight(t)
        a, b = t.args
        for first, other, swap in ((a, b, False), (b, a, True)):
            def mk(x: Term, y: Term = other) -> Term:
                return Term("bV", (y, x) if swap else (x, y))

            if first.op == "0v":
                return ZERO_K
            if first.op == "+v":
                return _add(self.child(W, mk(first.args[0])), self.child(W, mk(first.args[1])))
            if first.op == "sm":
                return _mul(first.args[0], self.child(W, mk(first.args[1])))
            if first.op == "-Q":
                t0, t1 = first.args
                if t0.op == "qstar" and t1.op == "qstar":
                    return ZERO_K
                if t0.op == "qstar":
                    return self.child(W, mk(_diff(t1, QSTAR)))
                if t1.op != "qstar":
                    # rebase_vector_difference
                    return _add(self.child(W, mk(_diff(t0, QSTAR))), self.child(W, mk(_diff(t1, QSTAR))))
                if t0.op == "+Q":
                    # translate_in_bilinear
                    p, u = t0.args
                    return _add(self.child(W, mk(_diff(p, QSTAR))), self.child(W, mk(u)))
        # both sides are vector variables or X - q*
        if _is_qdiff_star(a) and b.op == "vvar":
            return Term("bV", (b, a))
        return t

    def bQ(self, t: Term) -> Term:
        W = beta_weight(t)
        p, a = t.args
        if p.op != "qstar":
            # move_form_to_qstar
            x = self.child(W, Term("bQ", (QSTAR, a)))
            y = self.child(W, Term("bV", (_diff(p, QSTAR), a)))
            return _add(x, _mul(y, y))
        if a.op == "0v":
            return ZERO_K
        if a.op == "vvar":
            return t
        if a.op == "+v":
            a1, a2 = a.args
            return _add(
                _add(self.child(W, Term("bQ", (QSTAR, a1))), self.child(W, Term("bQ", (QSTAR, a2)))),
                self.child(W, Term("bV", (a1, a2))),
            )
        if a.op == "sm":
            k, a1 = a.args
            return _mul(_mul(k, k), self.child(W, Term("bQ", (QSTAR, a1))))
        t0, t1 = a.args  # a is a difference of forms
        if t0.op == "qstar" and t1.op == "qstar":
            return ZERO_K
        if t0.op == "qstar":
            return self.child(W, Term("bQ", (QSTAR, _diff(t1, QSTAR))))
        if t1.op == "qstar":
            if t0.op == "qvar":
                return t
            # translate_at_qstar
            p0, u = t0.args
            d = _diff(p0, QSTAR)
            return _add(
                _add(self.child(W, Term("bQ", (QSTAR, d))), self.child(W, Term("bQ", (QSTAR, u)))),
                self.child(W, Term("bV", (d, u))),
            )
        if t0.op == "+Q":
            # translate_difference
            p0, u = t0.args
            d = _diff(p0, t1)
            return _add(
                _add(self.child(W, Term("bQ", (QSTAR, d))), self.child(W, Term("bQ", (QSTAR, u)))),
                self.child(W, Term("bV", (d, u))),
            )
        if t1.op == "+Q":
            # split_form_difference
            d0, d1 = _diff(t0, QSTAR), _diff(t1, QSTAR)
            return _add(
                _add(self.child(W, Term("bQ", (QSTAR, d0))), self.child(W, Term("bQ", (QSTAR, d1)))),
                self.child(W, Term("bV", (d0, d1))),
            )
        return t  # X - Y with both variables

    def term(self, t: Term, memo: dict) -> Term:
        key = id(t)
        if key in memo:
            return memo[key][1]
        if not t.args:
            out = t
        else:
            args = tuple(self.term(a, memo) for a in t.args)
            out = t if args == t.args else Term(t.op, args, t.name, t.n, t.i, t.bits)
            if out.op in ("bV", "bQ"):
                out = self.beta(out)
        memo[key] = (t, out)
        return out


def normalize_term(t: Term) -> Term:
    """Equivalent term whose only bV/bQ nodes are basic atoms.

    Subterms are normalized innermost first; each bV/bQ node is then
    expanded by bilinearity, by the translation rule for bQ and by
    splitting differences of forms at q*. Every expansion step strictly
    lowers :func:`beta_weight`, which is asserted.
    """
    out = _Normalizer().term(t, {})
    if not is_normal(out):
        raise AssertionError("normalizer left a non-atomic beta node")
    return out


# -- random terms and the equivalence oracle ----------------------------------

_LEAVES = {
    K: [var("kx1", K), var("kx2", K), ZERO_K, ONE_K],
    V: [var("vx1", V), var("vx2", V), var("vx3", V), ZERO_V],
    Q: [var("qx1", Q), var("qx2", Q), QSTAR],
}
_BUILDERS = {
    K: ["+", "*", "bV", "bQ", "bV", "bQ", "pi"],
    V: ["+v", "sm", "-Q", "-Q"],
    Q: ["+Q"],
}


def random_term(sort: str, depth: int, seed: int | np.random.Generator = 0, leaf_prob: float = 0.3) -> Term:
    """Seeded random sort-correct term of depth at most ``depth``."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    def gen(s: str, d: int) -> Term:
        if d == 0 or rng.random() < leaf_prob:
            leaves = _LEAVES[s]
            return leaves[int(rng.integers(len(leaves)))]
        b = _BUILDERS[s][int(rng.integers(len(_BUILDERS[s])))]
        if b == "pi":
            n = int(rng.integers(1, 3))
            i = int(rng.integers(1, n + 1))
            return pi_term(n, i, [gen(V, d - 1) for _ in range(n)], gen(V, d - 1))
        _, argsorts = _SIGNATURES[b]
        return Term(b, tuple(gen(a, d - 1) for a in argsorts))

    return gen(sort, depth)


def random_geometry(rng: np.random.Generator, ks: tuple = (1, 2, 3), dims: tuple = (2, 4, 6)) -> QuadraticGeometry:
    """Random geometry (no omega) with a random nondegenerate alternating form."""
    F = GF(int(rng.choice(ks)))
    n = int(rng.choice(dims))
    while True:
        g = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                g[i][j] = g[j][i] = int(rng.integers(0, F.order))
        q = [int(x) for x in rng.integers(0, F.order, size=n)]
        S = QuadraticSpace(F, g, q)
        if S.is_nondegenerate():
            return QuadraticGeometry(S, omega0=None)


def random_value(model: QuadraticGeometry, sort: str, rng: np.random.Generator):
    F = model.field
    if sort == K:
        return F(int(rng.integers(0, F.order)))
    v = Vector(F, [int(x) for x in rng.integers(0, F.order, size=model.dim)])
    return v if sort == V else QPoint(v)


@dataclass
class Counterexample:
    model: QuadraticGeometry
    qstar: QPoint
    assignment: dict
    left: object
    right: object

    def to_json(self) -> dict:
        return {
            "verdict": "Counterexample",
            "geometry": self.model.to_json(),
            "qstar": self.qstar.to_json(),
            "assignment": {k: _value_json(v) for k, v in sorted(self.assignment.items())},
            "left": _value_json(self.left),
            "right": _value_json(self.right),
        }


class Equal:
    def to_json(self) -> dict:
        return {"verdict": "Equal"}

    def __repr__(self) -> str:
        return "Equal"


def _value_json(x):
    return x.to_json()


class ModelPool:
    """A fixed, seeded family of geometries shared by many oracle calls."""

    def __init__(self, seed: int = 0, size: int = 24):
        rng = np.random.default_rng(seed)
        self.models = [random_geometry(rng) for _ in range(size)]


def equiv_oracle(t1: Term, t2: Term, trials: int = 50, seed: int = 0, pool: ModelPool | None = None):
    """Equal, or a Counterexample found on random models and assignments."""
    if t1.sort != t2.sort:
        raise SortError(f"terms have sorts {t1.sort} and {t2.sort}")
    fv = free_vars(t1)
    for name, s in free_vars(t2).items():
        if fv.setdefault(name, s) != s:
            raise SortError(f"variable {name} has different sorts in the two terms")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        if pool is not None:
            G = pool.models[int(rng.integers(len(pool.models)))]
        else:
            G = random_geometry(rng)
        qs = random_value(G, Q, rng)
        asg = {name: random_value(G, s, rng) for name, s in sorted(fv.items())}
        a = eval_term(t1, G, asg, qs)
        b = eval_term(t2, G, asg, qs)
        if a != b:
            return Counterexample(G, qs, asg, a, b)
    return Equal()


# Each rewrite identity with fresh variables: name -> (lhs, rhs).
REWRITE_RULES = {
    "split_form_difference": (
        "(bQ qstar (-Q qx1 qx2))",
        "(+ (+ (bQ qstar (-Q qx1 qstar)) (bQ qstar (-Q qx2 qstar))) (bV (-Q qx1 qstar) (-Q qx2 qstar)))",
    ),
    "rebase_vector_difference": (
        "(bV (-Q qx1 qx2) vx1)",
        "(+ (bV (-Q qx1 qstar) vx1) (bV (-Q qx2 qstar) vx1))",
    ),
    "translate_at_qstar": (
        "(bQ qstar (-Q (+Q qx1 vx1) qstar))",
        "(+ (+ (bQ qstar (-Q qx1 qstar)) (bQ qstar vx1)) (bV (-Q qx1 qstar) vx1))",
    ),
    "translate_difference": (
        "(bQ qstar (-Q (+Q qx1 vx1) qx2))",
        "(+ (+ (bQ qstar (-Q qx1 qx2)) (bQ qstar vx1)) (bV (-Q qx1 qx2) vx1))",
    ),
    "translate_in_bilinear": (
        "(bV (-Q (+Q qx1 vx1) qstar) vx2)",
        "(+ (bV (-Q qx1 qstar) vx2) (bV vx1 vx2))",
    ),
    "move_form_to_qstar": (
        "(bQ qx1 vx1)",
        "(+ (bQ qstar vx1) (* (bV (-Q qx1 qstar) vx1) (bV (-Q qx1 qstar) vx1)))",
    ),
    "expand_linear_combination": (
        "(bQ qstar (+v (sm kx1 vx1) vx2))",
        "(+ (+ (* (* kx1 kx1) (bQ qstar vx1)) (bQ qstar vx2)) (* kx1 (bV vx1 vx2)))",
    ),
}
