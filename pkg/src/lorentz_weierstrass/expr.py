"""One-variable expressions: parse, evaluate, differentiate, print.

Grammar, loosest binding first::

    sum     := product (('+' | '-') product)*
    product := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?
    atom    := NUMBER | IDENT | FUNC '(' sum ')' | '(' sum ')'

``^`` is right-associative and binds tighter than unary minus, so ``-u^2``
is ``-(u^2)`` and ``2^-1`` is ``2^(-1)``.  Any identifier that is not a
function name is the free variable; at most one distinct name may appear.
"""

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ExprSyntaxError

FUNCTIONS = ("sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "ln", "sqrt")

_NUMPY_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "exp": np.exp,
    "ln": np.log,
    "sqrt": np.sqrt,
}

# precedence levels used by the printer
_P_SUM, _P_PRODUCT, _P_UNARY, _P_POWER, _P_ATOM = 1, 2, 3, 4, 5


class Expr:
    """Immutable expression tree node."""

    def __call__(self, t):
        return evaluate(self, t)

    def derivative(self, var=None):
        return differentiate(self, var)

    @property
    def variable(self):
        names = _variables(self)
        return next(iter(names)) if names else None

    def __str__(self):
        return _show(self)[0]


@dataclass(frozen=True, eq=True, repr=True)
class Const(Expr):
    value: float


@dataclass(frozen=True, eq=True, repr=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, eq=True, repr=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True, repr=True)
class Func(Expr):
    name: str
    arg: Expr


@dataclass(frozen=True, eq=True, repr=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


# ---------------------------------------------------------------------------
# tokenizer and parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.lastgroup is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), _byte_offset(text, start)))
        pos = m.end()
    tokens.append(("end", "", _byte_offset(text, n)))
    return tokens


def _byte_offset(text, pos):
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0
        self.var = None

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, off = self.peek()
        if text != value or kind != "op":
            what = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {what}", off)
        self.take()

    def parse(self):
        node = self.sum()
        kind, text, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"trailing input {text!r}", off)
        return node

    def sum(self):
        node = self.product()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.product())
        return node

    def product(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, text, off = self.take()
        if kind == "num":
            return Const(float(text))
        if kind == "ident":
            is_call = self.peek()[0] == "op" and self.peek()[1] == "("
            if is_call:
                if text not in FUNCTIONS:
                    raise ExprSyntaxError(f"unknown function {text!r}", off)
                self.take()
                arg = self.sum()
                self.expect(")")
                return Func(text, arg)
            if text in FUNCTIONS:
                raise ExprSyntaxError(f"function {text!r} needs an argument", off)
            if self.var is not None and self.var != text:
                raise ExprSyntaxError(
                    f"second free variable {text!r} (already using {self.var!r})", off
                )
            self.var = text
            return Var(text)
        if kind == "op" and text == "(":
            node = self.sum()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {what}", off)


def parse(text):
    """Parse ``text`` into an :class:`Expr`; raises ExprSyntaxError with a byte offset."""
    return _Parser(text).parse()


def as_expr(value):
    """Accept an Expr, an expression string, or a number."""
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return parse(value)
    return Const(float(value))


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _variables(e, acc=None):
    acc = set() if acc is None else acc
    if isinstance(e, Var):
        acc.add(e.name)
    elif isinstance(e, (Neg, Func)):
        _variables(e.arg, acc)
    elif isinstance(e, BinOp):
        _variables(e.left, acc)
        _variables(e.right, acc)
    return acc


def _check(values, what):
    if not np.all(np.isfinite(values)):
        raise DomainError(f"{what} produced a non-finite value")
    return values


def _ipow(base, n):
    if n < 0:
        return 1.0 / _ipow(base, -n)
    result = np.ones_like(base)
    for _ in range(n):
        result = result * base
    return result


def _integer_exponent(node):
    if isinstance(node, Const) and float(node.value).is_integer() and abs(node.value) <= 1024:
        return int(node.value)
    if isinstance(node, Neg):
        k = _integer_exponent(node.arg)
        return None if k is None else -k
    return None


def _eval(e, t):
    if isinstance(e, Const):
        return np.full_like(t, e.value)
    if isinstance(e, Var):
        return t
    if isinstance(e, Neg):
        return -_eval(e.arg, t)
    if isinstance(e, Func):
        x = _eval(e.arg, t)
        if e.name == "ln" and np.any(x <= 0):
            raise DomainError("ln of a non-positive value")
        if e.name == "sqrt" and np.any(x < 0):
            raise DomainError("sqrt of a negative value")
        with np.errstate(all="ignore"):
            return _check(_NUMPY_FUNCS[e.name](x), e.name)
    a = _eval(e.left, t)
    if e.op == "^":
        n = _integer_exponent(e.right)
        with np.errstate(all="ignore"):
            if n is not None:
                return _check(_ipow(a, n), "^")
            b = _eval(e.right, t)
            integral = np.equal(np.mod(b, 1.0), 0.0)
            if np.any((a <= 0) & ~integral):
                raise DomainError("non-integer power of a non-positive base")
            return _check(np.power(a, b), "^")
    b = _eval(e.right, t)
    with np.errstate(all="ignore"):
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return _check(a * b, "*")
        return _check(a / b, "/")


def evaluate(e, t):
    """Evaluate at a scalar or array ``t``; returns the same shape (float)."""
    arr = np.asarray(t, dtype=float)
    out = _check(_eval(e, arr), str(e))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# differentiation
# ---------------------------------------------------------------------------

ZERO = Const(0.0)
ONE = Const(1.0)


def _is(e, value):
    return isinstance(e, Const) and e.value == value


def add(a, b):
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return b
    return BinOp("+", a, b)


def sub(a, b):
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return neg(b)
    return BinOp("-", a, b)


def mul(a, b):
    if _is(a, 0.0) or _is(b, 0.0):
        return ZERO
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    return BinOp("*", a, b)


def div(a, b):
    if _is(a, 0.0):
        return ZERO
    if _is(b, 1.0):
        return a
    return BinOp("/", a, b)


def neg(a):
    if _is(a, 0.0):
        return ZERO
    return Neg(a)


def power(a, b):
    if _is(b, 1.0):
        return a
    return BinOp("^", a, b)


def _const(x):
    return Const(float(x)) if x >= 0 else Neg(Const(float(-x)))


def differentiate(e, var=None):
    """Exact derivative with respect to ``var`` (default: the free variable)."""
    if var is None:
        var = e.variable
    if var is None:
        return ZERO
    return _d(e, var)


def _d(e, x):
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == x else ZERO
    if isinstance(e, Neg):
        return neg(_d(e.arg, x))
    if isinstance(e, Func):
        inner = _d(e.arg, x)
        if _is(inner, 0.0):
            return ZERO
        a = e.arg
        outer = {
            "sin": lambda: Func("cos", a),
            "cos": lambda: neg(Func("sin", a)),
            "tan": lambda: div(ONE, power(Func("cos", a), Const(2.0))),
            "sinh": lambda: Func("cosh", a),
            "cosh": lambda: Func("sinh", a),
            "tanh": lambda: div(ONE, power(Func("cosh", a), Const(2.0))),
            "exp": lambda: Func("exp", a),
            "ln": lambda: div(ONE, a),
            "sqrt": lambda: div(ONE, mul(Const(2.0), Func("sqrt", a))),
        }[e.name]()
        return mul(outer, inner)
    a, b = e.left, e.right
    if e.op == "+":
        return add(_d(a, x), _d(b, x))
    if e.op == "-":
        return sub(_d(a, x), _d(b, x))
    if e.op == "*":
        return add(mul(_d(a, x), b), mul(a, _d(b, x)))
    if e.op == "/":
        db = _d(b, x)
        if _is(db, 0.0):
            return div(_d(a, x), b)
        num = sub(mul(_d(a, x), b), mul(a, db))
        return div(num, power(b, Const(2.0)))
    # power
    db = _d(b, x)
    if _is(db, 0.0):
        da = _d(a, x)
        if _is(da, 0.0):
            return ZERO
        n = _integer_exponent(b)
        if n is not None:
            if n == 0:
                return ZERO
            lowered = ONE if n == 1 else power(a, _const(n - 1))
            return mul(mul(_const(n), lowered), da)
        return mul(mul(b, power(a, sub(b, ONE))), da)
    # a^b (b' ln a + b a'/a)
    return mul(e, add(mul(db, Func("ln", a)), div(mul(b, _d(a, x)), a)))


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------


def _fmt_number(v):
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _show(e):
    """Return (text, precedence) with the minimal parentheses that round-trip."""
    if isinstance(e, Const):
        if e.value < 0 or math.copysign(1.0, e.value) < 0:
            return f"(-{_fmt_number(-e.value)})", _P_ATOM
        return _fmt_number(e.value), _P_ATOM
    if isinstance(e, Var):
        return e.name, _P_ATOM
    if isinstance(e, Func):
        return f"{e.name}({_show(e.arg)[0]})", _P_ATOM
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _P_UNARY), _P_UNARY
    if e.op == "^":
        return f"{_wrap(e.left, _P_ATOM)}^{_wrap(e.right, _P_UNARY)}", _P_POWER
    level = _P_SUM if e.op in "+-" else _P_PRODUCT
    return f"{_wrap(e.left, level)}{e.op}{_wrap(e.right, level + 1)}", level


def _wrap(e, minimum):
    text, prec = _show(e)
    return text if prec >= minimum else f"({text})"
