"""Exact numbers, a small safe expression language, and the closed-form density family.

Densities and test-function pieces are finite sums of power terms ``c * x**p``
(:class:`PowerSum`). The family covers constants, monomials, polynomials and
the ``x**-4`` style tails used by the gallery, and it is closed under sums,
products and antiderivatives (``p == -1`` integrates to a logarithm).

Numbers are ``Fraction`` on the exact path and ``float`` otherwise; ``math.inf``
marks unbounded interval ends.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Union

import numpy as np

from .errors import DivergenceError, ParseError, UndefinedIntegralError

Number = Union[int, Fraction, float]
INF = math.inf


def exact(value: Number) -> Number:
    """Promote ints (and finite floats with a short decimal repr) to ``Fraction``."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if math.isinf(value):
            return value
        if math.isnan(value):
            raise ValueError("NaN is not a valid number")
        return Fraction(repr(value))
    raise TypeError(f"not a number: {value!r}")


def is_exact(value: Number) -> bool:
    """Rational, or an infinite interval end."""
    return isinstance(value, (int, Fraction)) or isinstance(value, float) and math.isinf(value)


def fmt_number(value: Number) -> str:
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return str(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(float(value))


def number_to_json(value: Number):
    """JSON-safe, lossless: integers stay integers, other rationals become ``"p/q"``."""
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else fmt_number(value)
    if isinstance(value, int):
        return value
    if math.isinf(value):
        return fmt_number(value)
    return float(value)


def as_float(value) -> float:
    return float(value)


# ---------------------------------------------------------------------------
# expression language
# ---------------------------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}

_FUNCS: dict[str, Callable] = {
    "sqrt": lambda v: _exact_sqrt(v),
    "exp": lambda v: math.exp(float(v)),
    "log": lambda v: math.log(float(v)),
    "sin": lambda v: math.sin(float(v)),
    "cos": lambda v: math.cos(float(v)),
    "abs": abs,
}

_CONSTS = {"inf": INF, "pi": math.pi, "e": math.e}


def _exact_sqrt(v):
    if isinstance(v, Fraction) and v >= 0:
        n, d = math.isqrt(v.numerator), math.isqrt(v.denominator)
        if n * n == v.numerator and d * d == v.denominator:
            return Fraction(n, d)
    return math.sqrt(float(v))


def _power(base, exponent):
    if isinstance(exponent, Fraction) and exponent.denominator == 1:
        exponent = int(exponent)
    if isinstance(base, PowerSum):
        return base ** exponent
    if isinstance(exponent, int):
        if isinstance(base, Fraction) or isinstance(base, int):
            return Fraction(base) ** exponent
        return base ** exponent
    return float(base) ** float(exponent)


@lru_cache(maxsize=1024)
def _parse(text: str) -> ast.Expression:
    return ast.parse(text, mode="eval")


def evaluate(text: str, env: Mapping[str, object] | None = None, where: str | None = None):
    """Evaluate an arithmetic expression exactly where possible.

    Literals become ``Fraction`` (``0.9`` is nine tenths), names resolve from
    ``env`` then the constants ``inf``, ``pi``, ``e``. Only arithmetic, unary
    minus, and a handful of functions are accepted.
    """
    env = env or {}
    try:
        tree = _parse(text.strip())
    except SyntaxError as exc:
        raise ParseError(f"bad expression {text!r}", where) from exc

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return exact(node.value)
        if isinstance(node, ast.Name):
            if node.id in env:
                return env[node.id]
            if node.id in _CONSTS:
                return _CONSTS[node.id]
            raise ParseError(f"unknown name {node.id!r} in {text!r}", where)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Pow):
                return _power(left, right)
            return _BINOPS[type(node.op)](left, right)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
            if len(node.args) != 1 or node.keywords:
                raise ParseError(f"{node.func.id} takes one argument", where)
            arg = walk(node.args[0])
            if isinstance(arg, PowerSum):
                raise NotClosedForm(node.func.id)
            return _FUNCS[node.func.id](arg)
        raise ParseError(f"unsupported syntax in {text!r}", where)

    try:
        return walk(tree)
    except ZeroDivisionError as exc:
        raise ParseError(f"division by zero in {text!r}", where) from exc


def parse_number(value, env: Mapping[str, object] | None = None, where: str | None = None) -> Number:
    if isinstance(value, str):
        out = evaluate(value, env, where)
        if isinstance(out, PowerSum):
            raise ParseError(f"expected a number, got a function of x: {value!r}", where)
        return out
    try:
        return exact(value)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"expected a number, got {value!r}", where) from exc


class NotClosedForm(Exception):
    """Expression leaves the power-sum family; caller should fall back to numerics."""


@dataclass(frozen=True)
class ExprFunction:
    """Float-valued fallback for expressions outside the power-sum family (``sin(x)``, ``exp(-x)``)."""

    text: str
    env: tuple = ()

    def __call__(self, x) -> float:
        return float(evaluate(self.text, {**dict(self.env), "x": float(x)}))

    def evaluate_array(self, xs: np.ndarray) -> np.ndarray:
        return np.array([self(v) for v in xs], dtype=float)

    def __str__(self) -> str:
        return self.text

    def to_json(self) -> dict:
        return {"form": "expression", "params": {"expr": self.text}}


def compile_function(text: str, env: Mapping[str, object] | None = None, where: str | None = None):
    """Return a :class:`PowerSum` when ``text`` stays in the closed-form family, else an :class:`ExprFunction`."""
    env = dict(env or {})
    try:
        out = evaluate(text, {**env, "x": PowerSum.x()}, where)
        if not isinstance(out, PowerSum):
            out = PowerSum.constant(out)
        return out
    except (NotClosedForm, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError) and "unknown name" in str(exc):
            raise
        fn = ExprFunction(text, tuple(sorted((k, v) for k, v in env.items() if k != "x")))
        try:
            fn(0.5)  # surface syntax errors now rather than mid-quadrature
        except (ArithmeticError, ValueError) as err:
            if isinstance(err, ParseError):
                raise
        return fn


# ---------------------------------------------------------------------------
# power sums
# ---------------------------------------------------------------------------

def _norm_exp(p) -> Number:
    p = exact(p)
    if isinstance(p, Fraction) and p.denominator == 1:
        return int(p)
    return p


def _xpow(x: Number, p: Number) -> Number:
    if isinstance(p, int) and isinstance(x, (int, Fraction)):
        return Fraction(x) ** p
    return float(x) ** float(p)


@dataclass(frozen=True)
class PowerSum:
    """``sum(c * x**p for p, c in terms)``; exponents unique and sorted, coefficients nonzero."""

    terms: tuple[tuple[Number, Number], ...] = ()

    @staticmethod
    def _build(pairs) -> "PowerSum":
        acc: dict = {}
        for p, c in pairs:
            p = _norm_exp(p)
            acc[p] = acc.get(p, 0) + c
        return PowerSum(tuple(sorted(((p, c) for p, c in acc.items() if c != 0), key=lambda t: t[0])))

    @classmethod
    def constant(cls, c: Number) -> "PowerSum":
        return cls._build([(0, exact(c))])

    @classmethod
    def monomial(cls, c: Number, p: Number) -> "PowerSum":
        return cls._build([(p, exact(c))])

    @classmethod
    def x(cls) -> "PowerSum":
        return cls.monomial(1, 1)

    @classmethod
    def polynomial(cls, coeffs) -> "PowerSum":
        """Coefficients in ascending order of degree."""
        return cls._build([(i, exact(c)) for i, c in enumerate(coeffs)])

    @classmethod
    def line(cls, x0: Number, y0: Number, x1: Number, y1: Number) -> "PowerSum":
        slope = (y1 - y0) / (x1 - x0)
        return cls.polynomial([y0 - slope * x0, slope])

    # -- algebra -----------------------------------------------------------
    def _coerce(self, other) -> "PowerSum":
        if isinstance(other, PowerSum):
            return other
        if isinstance(other, (int, float, Fraction)) and not isinstance(other, bool):
            return PowerSum.constant(other)
        raise TypeError(f"cannot combine PowerSum with {type(other).__name__}")

    def __add__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return PowerSum._build(self.terms + o.terms)

    __radd__ = __add__

    def __neg__(self):
        return PowerSum(tuple((p, -c) for p, c in self.terms))

    def __sub__(self, other):
        try:
            return self + (-self._coerce(other))
        except TypeError:
            return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return PowerSum._build([(p + q, c * d) for p, c in self.terms for q, d in o.terms])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PowerSum):
            if len(other.terms) != 1:
                raise NotClosedForm("division by a multi-term expression")
            q, d = other.terms[0]
            return PowerSum._build([(p - q, c / d) for p, c in self.terms])
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        if isinstance(other, float):
            return self * (1.0 / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if len(self.terms) != 1:
            raise NotClosedForm("division by a multi-term expression")
        p, c = self.terms[0]
        return PowerSum.monomial(exact(other) / c if is_exact(c) else other / c, -p)

    def __pow__(self, k):
        if isinstance(k, Fraction) and k.denominator == 1:
            k = int(k)
        if isinstance(k, int) and k >= 0:
            out = PowerSum.constant(1)
            for _ in range(k):
                out = out * self
            return out
        if len(self.terms) == 1:
            p, c = self.terms[0]
            coef = Fraction(1) if c == 1 else _xpow(c, k)
            return PowerSum.monomial(coef, _norm_exp(exact(p) * exact(k)))
        raise NotClosedForm("non-integer power of a multi-term expression")

    # -- inspection --------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(p == 0 for p, _ in self.terms)

    @property
    def constant_value(self) -> Number:
        return sum((c for p, c in self.terms if p == 0), Fraction(0))

    @property
    def integer_exponents(self) -> bool:
        return all(isinstance(p, int) for p, _ in self.terms)

    @property
    def is_exact(self) -> bool:
        return self.integer_exponents and all(is_exact(c) for _, c in self.terms)

    def __call__(self, x: Number) -> Number:
        if not self.terms:
            return Fraction(0) if is_exact(x) else 0.0
        if isinstance(x, float) and math.isinf(x):
            return self.limit(1 if x > 0 else -1)
        total = 0
        for p, c in self.terms:
            total = total + c * _xpow(x, p)
        return total

    def limit(self, side: int) -> Number:
        """Limit at +inf (side=1) or -inf (side=-1)."""
        if not self.terms:
            return Fraction(0)
        p, c = self.terms[-1]
        if p < 0:
            return Fraction(0)
        if p == 0:
            return c
        sign = 1 if c > 0 else -1
        if side < 0:
            if not isinstance(p, int):
                raise UndefinedIntegralError("non-integer power at -inf")
            sign *= (-1) ** p
        return INF if sign > 0 else -INF

    def evaluate_array(self, xs: np.ndarray) -> np.ndarray:
        out = np.zeros_like(xs, dtype=float)
        for p, c in self.terms:
            out += float(c) * np.power(xs, float(p))
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for p, c in self.terms:
            cs = fmt_number(c)
            if p == 0:
                parts.append(cs)
            elif p == 1:
                parts.append(f"{cs}*x")
            else:
                parts.append(f"{cs}*x**({fmt_number(p)})")
        return " + ".join(parts)

    # -- calculus ----------------------------------------------------------
    def _antiderivative_at(self, x: Number) -> Number:
        total = 0
        for p, c in self.terms:
            if p == -1:
                total = total + c * math.log(abs(float(x)))
            else:
                q = p + 1
                total = total + c * _xpow(x, q) / q
        return total

    def integrate(self, a: Number, b: Number) -> Number:
        """Exact definite integral over ``[a, b]`` (``a < b``; ends may be infinite).

        Raises :class:`DivergenceError` (with the sign of the blow-up) when the
        integral is infinite and :class:`UndefinedIntegralError` when it has no
        definite value.
        """
        if not (a < b):
            return Fraction(0) if is_exact(a) and is_exact(b) else 0.0
        if not self.terms:
            return Fraction(0)
        directions = []
        p_min, c_min = self.terms[0]
        p_max, c_max = self.terms[-1]
        has_neg = p_min < 0
        noninteger = not self.integer_exponents
        if noninteger and a < 0:
            raise UndefinedIntegralError(f"non-integer powers of negative x in {self}")
        if has_neg and a < 0 < b:
            if p_min <= -1:
                raise UndefinedIntegralError(f"non-integrable singularity at 0 inside ({a}, {b}) for {self}")
        if has_neg and p_min <= -1:
            if a == 0:
                directions.append(1 if c_min > 0 else -1)
            if b == 0:
                s = 1 if c_min > 0 else -1
                directions.append(s * (-1) ** int(p_min))
        if math.isinf(b) and p_max >= -1:
            directions.append(1 if c_max > 0 else -1)
        if math.isinf(a) and p_max >= -1:
            if not isinstance(p_max, int):
                raise UndefinedIntegralError("non-integer power at -inf")
            s = 1 if c_max > 0 else -1
            directions.append(s * (-1) ** p_max)
        if directions:
            if all(d == directions[0] for d in directions):
                raise DivergenceError(f"integral of {self} over ({a}, {b}) diverges", directions[0])
            raise UndefinedIntegralError(f"integral of {self} over ({a}, {b}) is inf - inf")
        hi = Fraction(0) if math.isinf(b) else self._antiderivative_at(b)
        lo = Fraction(0) if math.isinf(a) else self._antiderivative_at(a)
        return hi - lo

    # -- roots and signs ---------------------------------------------------
    def roots(self, a: Number, b: Number) -> list[Number]:
        """Sorted real roots strictly inside ``(a, b)``."""
        if not self.terms or len(self.terms) == 1 and self.terms[0][0] == 0:
            return []
        if self.integer_exponents:
            shift = -min(0, self.terms[0][0])
            degree = self.terms[-1][0] + shift
            coeffs = [0] * (degree + 1)
            for p, c in self.terms:
                coeffs[p + shift] = c
            found = _poly_real_roots(tuple(coeffs))
            if shift:
                found = [r for r in found if r != 0]
        else:
            found = _numeric_roots(self, a, b)
        return sorted(r for r in found if a < r < b)

    def sign_between(self, a: Number, b: Number) -> int:
        """Sign of the function on ``(a, b)``, assumed sign-definite there."""
        v = self(interior_point(a, b))
        return (v > 0) - (v < 0)

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        if not self.terms:
            return {"form": "constant", "params": {"c": 0}}
        if self.is_constant:
            return {"form": "constant", "params": {"c": number_to_json(self.constant_value)}}
        if len(self.terms) == 1:
            p, c = self.terms[0]
            return {"form": "power", "params": {"c": number_to_json(c), "p": number_to_json(p)}}
        if all(isinstance(p, int) and p >= 0 for p, _ in self.terms):
            coeffs = [Fraction(0)] * (self.terms[-1][0] + 1)
            for p, c in self.terms:
                coeffs[p] = c
            return {"form": "polynomial", "params": {"coeffs": [number_to_json(c) for c in coeffs]}}
        return {"form": "power_sum", "params": {"terms": [[number_to_json(c), number_to_json(p)] for p, c in self.terms]}}


def interior_point(a: Number, b: Number) -> Number:
    """A representative point strictly inside ``(a, b)``."""
    if math.isinf(a) and math.isinf(b):
        return Fraction(0)
    if math.isinf(a):
        return b - 1
    if math.isinf(b):
        return a + 1
    return (a + b) / 2


@lru_cache(maxsize=4096)
def _poly_real_roots(coeffs: tuple) -> list[Number]:
    """Real roots of ``sum(coeffs[i] * x**i)``; exact ``Fraction`` where rational."""
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    degree = len(coeffs) - 1
    if degree <= 0:
        return []
    if degree == 1:
        return [-coeffs[0] / coeffs[1]]
    if all(is_exact(c) for c in coeffs):
        import sympy

        x = sympy.Symbol("x")
        poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], x)
        out = []
        for r in sympy.real_roots(poly):
            if r.is_Rational:
                out.append(Fraction(int(r.p), int(r.q)))
            else:
                out.append(float(r.evalf(30)))
        return sorted(set(out))
    found = np.roots([float(c) for c in reversed(coeffs)])
    return sorted({float(r.real) for r in found if abs(r.imag) < 1e-12})


def _numeric_roots(ps: PowerSum, a: Number, b: Number) -> list[float]:
    from scipy.optimize import brentq

    lo = float(a) if not math.isinf(a) else -1e6
    hi = float(b) if not math.isinf(b) else max(lo, 1.0) * 1e6
    if lo <= 0 < hi and not ps.integer_exponents:
        lo = 1e-12
    grid = np.unique(np.concatenate([np.linspace(lo, hi, 2001), np.geomspace(max(lo, 1e-12), hi, 2001)]))
    grid = grid[(grid > lo) & (grid < hi)]
    vals = ps.evaluate_array(grid)
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0:
            roots.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(brentq(lambda t: float(ps(t)), grid[i], grid[i + 1], xtol=1e-15))
    return roots


def power_sum_from_json(form: dict, where: str | None = None, env=None) -> PowerSum:
    """Decode ``{"form": ..., "params": {...}}``. ``piecewise_linear`` is expanded by the caller."""
    kind = form.get("form")
    params = form.get("params", {})
    num = lambda v, key: parse_number(v, env, f"{where}.params.{key}" if where else key)  # noqa: E731
    if kind == "constant":
        return PowerSum.constant(num(params.get("c", 0), "c"))
    if kind == "power":
        return PowerSum.monomial(num(params.get("c", 1), "c"), num(params["p"], "p"))
    if kind == "polynomial":
        return PowerSum.polynomial([num(c, "coeffs") for c in params["coeffs"]])
    if kind == "power_sum":
        return PowerSum._build([(num(p, "terms"), num(c, "terms")) for c, p in params["terms"]])
    if kind == "expression":
        out = compile_function(params["expr"], env, where)
        if not isinstance(out, PowerSum):
            raise ParseError("density expression must stay in the power-sum family", where)
        return out
    raise ParseError(f"unknown density form {kind!r}", where)
