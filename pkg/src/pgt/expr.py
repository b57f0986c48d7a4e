"""Small expression language for cost functions and candidate potentials.

Grammar (standard precedence, unary minus binds tightest)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | primary
    primary := NUMBER | NAME | x[i][k] | xbar[k]
             | pow(expr, ['-'] NUMBER) | sqrt(expr) | '(' expr ')'

Variables are 1-based: ``x[i][k]`` is coordinate ``k`` of player ``i`` and
``xbar[k]`` is coordinate ``k`` of the sum of all players' actions.  Any other
identifier is a named parameter bound through a ``ParamEnv`` mapping.

Expressions are immutable trees of frozen dataclasses, so structural equality
and hashing come for free.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Sequence, Union

__all__ = [
    "Expr", "Num", "Param", "Var", "Agg", "Add", "Sub", "Mul", "Div", "Neg",
    "Pow", "Sqrt", "ParamEnv", "ExpressionError", "ExprSyntaxError",
    "UnknownVariableError", "DomainError", "parse_expression", "to_text",
    "evaluate_expression", "compile_expression", "differentiate_expression",
    "gradient", "restrict", "free_params", "variables", "uses_only",
]

ParamEnv = Mapping[str, float]


class ExpressionError(ValueError):
    pass


class ExprSyntaxError(ExpressionError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte offset {offset}")
        self.offset = offset


class UnknownVariableError(ExpressionError):
    pass


class DomainError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Var:
    player: int
    coord: int


@dataclass(frozen=True)
class Agg:
    coord: int


@dataclass(frozen=True)
class Add:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg:
    arg: Expr


@dataclass(frozen=True)
class Pow:
    base: Expr
    exponent: float


@dataclass(frozen=True)
class Sqrt:
    arg: Expr


Expr = Union[Num, Param, Var, Agg, Add, Sub, Mul, Div, Neg, Pow, Sqrt]

_BINARY = (Add, Sub, Mul, Div)

# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/(),\[\]])"
    r")"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(source):
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            start = pos + (len(source[pos:]) - len(source[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {source[start]!r}",
                                  len(source[:start].encode()))
        kind = m.lastgroup
        text = m.group(kind)
        start = m.start(kind)
        tokens.append((kind, text, len(source[:start].encode())))
        pos = m.end()
    tokens.append(("end", "", len(source.encode())))
    return tokens


class _Parser:
    def __init__(self, source: str, dims: Sequence[int] | None):
        self.tokens = _tokenize(source)
        self.pos = 0
        self.dims = None if dims is None else [int(d) for d in dims]

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> None:
        kind, got, off = self.take()
        if got != text or kind == "end":
            raise ExprSyntaxError(f"expected {text!r}, got {got or 'end of input'!r}", off)

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {text!r}", off)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            right = self.term()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            right = self.unary()
            left = Mul(left, right) if op == "*" else Div(left, right)
        return left

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            if self.peek()[0] == "num":
                return Num(-float(self.take()[1]))
            return Neg(self.unary())
        return self.primary()

    def index(self) -> tuple[int, int]:
        self.expect("[")
        kind, text, off = self.take()
        if kind != "num" or not text.isdigit():
            raise ExprSyntaxError("expected integer index", off)
        self.expect("]")
        return int(text), off

    def primary(self) -> Expr:
        kind, text, off = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "op" and text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "name":
            if text == "x":
                i, ioff = self.index()
                k, koff = self.index()
                self._check_var(i, k, ioff)
                return Var(i, k)
            if text == "xbar":
                k, koff = self.index()
                self._check_agg(k, koff)
                return Agg(k)
            if text == "pow":
                self.expect("(")
                base = self.expr()
                self.expect(",")
                sign = 1.0
                if self.peek()[1] == "-":
                    self.take()
                    sign = -1.0
                nk, ntext, noff = self.take()
                if nk != "num":
                    raise ExprSyntaxError("pow exponent must be a numeric literal", noff)
                self.expect(")")
                return Pow(base, sign * float(ntext))
            if text == "sqrt":
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Sqrt(arg)
            return Param(text)
        raise ExprSyntaxError(f"unexpected token {text or 'end of input'!r}", off)

    def _check_var(self, i: int, k: int, off: int) -> None:
        if i < 1 or k < 1:
            raise UnknownVariableError(f"x[{i}][{k}]: indices are 1-based (byte offset {off})")
        if self.dims is None:
            return
        if i > len(self.dims):
            raise UnknownVariableError(f"x[{i}][{k}]: only {len(self.dims)} players")
        if k > self.dims[i - 1]:
            raise UnknownVariableError(f"x[{i}][{k}]: player {i} has dimension {self.dims[i - 1]}")

    def _check_agg(self, k: int, off: int) -> None:
        if k < 1:
            raise UnknownVariableError(f"xbar[{k}]: indices are 1-based (byte offset {off})")
        if self.dims is None:
            return
        if len(set(self.dims)) != 1:
            raise UnknownVariableError("xbar requires all players to share one dimension")
        if k > self.dims[0]:
            raise UnknownVariableError(f"xbar[{k}]: action dimension is {self.dims[0]}")


def parse_expression(source: str, dims: Sequence[int] | None = None) -> Expr:
    """Parse expression text; ``dims`` (per-player dimensions) bounds-checks variables."""
    return _Parser(source, dims).parse()


# --------------------------------------------------------------------------
# printing

def _fmt(v: float) -> str:
    if not math.isfinite(v):
        raise ExpressionError(f"non-finite literal {v!r} cannot be printed")
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _level(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return 1
    if isinstance(e, (Mul, Div)):
        return 2
    if isinstance(e, Neg) or (isinstance(e, Num) and (e.value < 0 or _fmt(e.value).startswith("-"))):
        return 3
    return 4


def _show(e: Expr, need: int) -> str:
    s = to_text(e)
    return f"({s})" if _level(e) < need else s


def to_text(e: Expr) -> str:
    """Print an expression so that ``parse_expression(to_text(e)) == e``."""
    if isinstance(e, Num):
        return _fmt(e.value)
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Var):
        return f"x[{e.player}][{e.coord}]"
    if isinstance(e, Agg):
        return f"xbar[{e.coord}]"
    if isinstance(e, Neg):
        if isinstance(e.arg, Num) and e.arg.value >= 0:
            return f"-({to_text(e.arg)})"
        return "-" + _show(e.arg, 3)
    if isinstance(e, Pow):
        return f"pow({to_text(e.base)}, {_fmt(e.exponent)})"
    if isinstance(e, Sqrt):
        return f"sqrt({to_text(e.arg)})"
    if isinstance(e, (Add, Sub)):
        op = " + " if isinstance(e, Add) else " - "
        # right operands at the next level keep the tree shape on re-parse
        return _show(e.left, 1) + op + _show(e.right, 2 if _level(e.right) != 3 else 4)
    if isinstance(e, (Mul, Div)):
        op = "*" if isinstance(e, Mul) else "/"
        return _show(e.left, 2) + op + _show(e.right, 4 if _level(e.right) == 3 else 3)
    raise TypeError(f"not an expression: {e!r}")


# --------------------------------------------------------------------------
# evaluation

def _pow(base: float, p: float) -> float:
    if float(p).is_integer():
        if base == 0.0 and p < 0:
            raise DomainError("pow: zero base with negative exponent")
        return base ** int(p)
    if base <= 0.0:
        raise DomainError(f"pow: non-positive base {base!r} with fractional exponent {p!r}")
    return base ** p


def _sqrt(u: float) -> float:
    if u <= 0.0:
        raise DomainError(f"sqrt: non-positive argument {u!r}")
    return math.sqrt(u)


def _div(a: float, b: float) -> float:
    if b == 0.0:
        raise DomainError("division by zero")
    return a / b


def evaluate_expression(e: Expr, x: Sequence[Sequence[float]], env: ParamEnv | None = None) -> float:
    """Evaluate ``e`` at joint strategy ``x`` (one action vector per player).

    Reference tree-walking evaluator; :func:`compile_expression` is the fast path.
    """
    env = env or {}

    def ev(n: Expr) -> float:
        if isinstance(n, Num):
            return n.value
        if isinstance(n, Param):
            try:
                return float(env[n.name])
            except KeyError:
                raise ExpressionError(f"unbound parameter {n.name!r}") from None
        if isinstance(n, Var):
            return float(x[n.player - 1][n.coord - 1])
        if isinstance(n, Agg):
            return float(sum(xi[n.coord - 1] for xi in x))
        if isinstance(n, Add):
            return ev(n.left) + ev(n.right)
        if isinstance(n, Sub):
            return ev(n.left) - ev(n.right)
        if isinstance(n, Mul):
            return ev(n.left) * ev(n.right)
        if isinstance(n, Div):
            return _div(ev(n.left), ev(n.right))
        if isinstance(n, Neg):
            return -ev(n.arg)
        if isinstance(n, Pow):
            return _pow(ev(n.base), n.exponent)
        if isinstance(n, Sqrt):
            return _sqrt(ev(n.arg))
        raise TypeError(f"not an expression: {n!r}")

    return ev(e)


def _codegen(e: Expr, env: ParamEnv, aggs: set[int]) -> str:
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Param):
        try:
            return repr(float(env[e.name]))
        except KeyError:
            raise ExpressionError(f"unbound parameter {e.name!r}") from None
    if isinstance(e, Var):
        return f"X[{e.player - 1}][{e.coord - 1}]"
    if isinstance(e, Agg):
        aggs.add(e.coord)
        return f"S{e.coord}"
    if isinstance(e, Add):
        return f"({_codegen(e.left, env, aggs)} + {_codegen(e.right, env, aggs)})"
    if isinstance(e, Sub):
        return f"({_codegen(e.left, env, aggs)} - {_codegen(e.right, env, aggs)})"
    if isinstance(e, Mul):
        return f"({_codegen(e.left, env, aggs)} * {_codegen(e.right, env, aggs)})"
    if isinstance(e, Div):
        return f"_div({_codegen(e.left, env, aggs)}, {_codegen(e.right, env, aggs)})"
    if isinstance(e, Neg):
        return f"(-{_codegen(e.arg, env, aggs)})"
    if isinstance(e, Pow):
        return f"_pow({_codegen(e.base, env, aggs)}, {e.exponent!r})"
    if isinstance(e, Sqrt):
        return f"_sqrt({_codegen(e.arg, env, aggs)})"
    raise TypeError(f"not an expression: {e!r}")


def compile_expression(e: Expr, env: ParamEnv | None = None) -> Callable[[Sequence[Sequence[float]]], float]:
    """Compile ``e`` with parameters bound from ``env`` into a Python function of ``x``."""
    aggs: set[int] = set()
    body = _codegen(e, env or {}, aggs)
    lines = ["def _f(X):"]
    for k in sorted(aggs):
        lines.append(f"    S{k} = sum(xi[{k - 1}] for xi in X)")
    lines.append(f"    return float({body})")
    namespace = {"_pow": _pow, "_sqrt": _sqrt, "_div": _div}
    exec(compile("\n".join(lines), "<pgt-expr>", "exec"), namespace)
    return namespace["_f"]


# --------------------------------------------------------------------------
# constant-folding constructors

ZERO = Num(0.0)
ONE = Num(1.0)


def _is(e: Expr, v: float) -> bool:
    return isinstance(e, Num) and e.value == v


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return neg(b)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    if _is(a, 0.0) or _is(b, 0.0):
        return ZERO
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Num) and isinstance(b, Num) and b.value != 0.0:
        return Num(a.value / b.value)
    if _is(a, 0.0) and not _is(b, 0.0):
        return ZERO
    if _is(b, 1.0):
        return a
    return Div(a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


# --------------------------------------------------------------------------
# symbolic operations

def differentiate_expression(e: Expr, i: int, k: int) -> Expr:
    """Return the AST of the partial derivative of ``e`` w.r.t. ``x[i][k]`` (1-based)."""

    def d(n: Expr) -> Expr:
        if isinstance(n, (Num, Param)):
            return ZERO
        if isinstance(n, Var):
            return ONE if (n.player, n.coord) == (i, k) else ZERO
        if isinstance(n, Agg):
            return ONE if n.coord == k else ZERO
        if isinstance(n, Add):
            return add(d(n.left), d(n.right))
        if isinstance(n, Sub):
            return sub(d(n.left), d(n.right))
        if isinstance(n, Mul):
            return add(mul(d(n.left), n.right), mul(n.left, d(n.right)))
        if isinstance(n, Div):
            num = sub(mul(d(n.left), n.right), mul(n.left, d(n.right)))
            return div(num, Pow(n.right, 2.0)) if not _is(num, 0.0) else ZERO
        if isinstance(n, Neg):
            return neg(d(n.arg))
        if isinstance(n, Pow):
            du = d(n.base)
            if n.exponent == 0.0 or _is(du, 0.0):
                return ZERO
            return mul(mul(Num(n.exponent), Pow(n.base, n.exponent - 1.0)), du)
        if isinstance(n, Sqrt):
            du = d(n.arg)
            if _is(du, 0.0):
                return ZERO
            return div(du, mul(Num(2.0), n))
        raise TypeError(f"not an expression: {n!r}")

    return d(e)


def gradient(e: Expr, player: int, dim: int) -> list[Expr]:
    """Partial gradient of ``e`` w.r.t. the action block of ``player`` (1-based)."""
    return [differentiate_expression(e, player, k) for k in range(1, dim + 1)]


def restrict(e: Expr, keep: set[int] | frozenset[int], n_players: int) -> Expr:
    """Substitute zero for every player not in ``keep`` (1-based player ids)."""

    def r(n: Expr) -> Expr:
        if isinstance(n, Var):
            return n if n.player in keep else ZERO
        if isinstance(n, Agg):
            out: Expr = ZERO
            for p in range(1, n_players + 1):
                if p in keep:
                    out = add(out, Var(p, n.coord))
            return out
        if isinstance(n, Add):
            return add(r(n.left), r(n.right))
        if isinstance(n, Sub):
            return sub(r(n.left), r(n.right))
        if isinstance(n, Mul):
            return mul(r(n.left), r(n.right))
        if isinstance(n, Div):
            return div(r(n.left), r(n.right))
        if isinstance(n, Neg):
            return neg(r(n.arg))
        if isinstance(n, Pow):
            return Pow(r(n.base), n.exponent)
        if isinstance(n, Sqrt):
            return Sqrt(r(n.arg))
        return n

    return r(e)


def _walk(e: Expr) -> Iterator[Expr]:
    yield e
    if isinstance(e, _BINARY):
        yield from _walk(e.left)
        yield from _walk(e.right)
    elif isinstance(e, (Neg, Sqrt)):
        yield from _walk(e.arg)
    elif isinstance(e, Pow):
        yield from _walk(e.base)


def free_params(e: Expr) -> set[str]:
    return {n.name for n in _walk(e) if isinstance(n, Param)}


def variables(e: Expr) -> set[Var | Agg]:
    return {n for n in _walk(e) if isinstance(n, (Var, Agg))}


def uses_only(e: Expr, player: int) -> bool:
    """True iff ``e`` depends on no individual variable other than player ``player``'s."""
    return all(isinstance(v, Agg) or v.player == player for v in variables(e))


def _sum_terms(e: Expr) -> list[Expr]:
    if isinstance(e, Add):
        return _sum_terms(e.left) + _sum_terms(e.right)
    return [e]


def fold_aggregates(e: Expr, n_players: int) -> Expr:
    """Rewrite every literal sum ``x[1][k] + ... + x[N][k]`` into ``xbar[k]``.

    Lets costs written with an explicit sum be recognized as aggregative.
    """

    def f(n: Expr) -> Expr:
        if isinstance(n, Add):
            terms = _sum_terms(n)
            if len(terms) == n_players and all(isinstance(t, Var) for t in terms):
                coords = {t.coord for t in terms}
                if len(coords) == 1 and sorted(t.player for t in terms) == list(range(1, n_players + 1)):
                    return Agg(coords.pop())
            return Add(f(n.left), f(n.right))
        if isinstance(n, (Sub, Mul, Div)):
            return type(n)(f(n.left), f(n.right))
        if isinstance(n, (Neg, Sqrt)):
            return type(n)(f(n.arg))
        if isinstance(n, Pow):
            return Pow(f(n.base), n.exponent)
        return n

    return f(e)
