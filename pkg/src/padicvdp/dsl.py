"""A small expression language for functions Z_p^n -> Z_p.

Grammar (whitespace-insensitive):

    expr     = term , { ("+"|"-") , term } ;
    term     = factor , { "*" , factor } ;
    factor   = [ "-" ] , base , [ "^" , natural ] ;
    base     = integer | rational | variable | "(" expr ")"
             | "divp" "(" expr "," natural ")"
             | "digitsum" "(" variable "," ipoly "," natural ")" ;
    variable = "x" , natural ;                      (* x1 ... xn *)
    ipoly    = integer-coefficient polynomial in the symbol "i" ;
    rational = integer "/" integer ;

divp(e, k) divides by p^k exactly and costs k digits of precision.
digitsum(xj, a, e) maps the digits of xj to sum(p^i * a(i) * digit_i^e),
which is how locally-defined digit maps are written. Rational constants
must have denominator coprime to p; they are embedded by modular
inversion at evaluation time.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Callable, Union

from .core import (
    InexactDivisionError,
    PadicError,
    PadicInt,
    PadicPoint,
    _from_residue,
    from_rational,
)

__all__ = [
    "ParseError",
    "IntConst",
    "RatConst",
    "Var",
    "Add",
    "Sub",
    "Mul",
    "Pow",
    "DivP",
    "DigitSum",
    "FuncExpr",
    "FuncDef",
    "parse",
    "parse_funcdef",
    "funcdef_from_json",
    "evaluate",
    "divp_budget",
    "as_point_function",
    "as_univariate",
    "WellDefinedReport",
    "well_defined_check",
]


class ParseError(PadicError):
    """Syntax or arity failure, with 1-based source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class IntConst:
    value: int


@dataclass(frozen=True)
class RatConst:
    numerator: int
    denominator: int


@dataclass(frozen=True)
class Var:
    index: int  # 1-based, matching the surface names x1 ... xn


@dataclass(frozen=True)
class Add:
    left: "FuncExpr"
    right: "FuncExpr"


@dataclass(frozen=True)
class Sub:
    left: "FuncExpr"
    right: "FuncExpr"


@dataclass(frozen=True)
class Mul:
    left: "FuncExpr"
    right: "FuncExpr"


@dataclass(frozen=True)
class Pow:
    base: "FuncExpr"
    exponent: int


@dataclass(frozen=True)
class DivP:
    operand: "FuncExpr"
    exponent: int


@dataclass(frozen=True)
class DigitSum:
    var_index: int
    coeffs: tuple[int, ...]  # a(i) as dense coefficients in the symbol i
    exponent: int


FuncExpr = Union[IntConst, RatConst, Var, Add, Sub, Mul, Pow, DivP, DigitSum]


@dataclass(frozen=True)
class FuncDef:
    """A parsed function together with its declared arity.

    alpha, when present, is the weight the author claims the function is
    Lipschitz for. It is a claim to verify, never trusted.
    """

    arity: int
    body: FuncExpr
    alpha: tuple[int, ...] | None = None
    source: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.arity < 1:
            raise ValueError(f"arity must be >= 1, got {self.arity}")
        if self.alpha is not None:
            if len(self.alpha) != self.arity:
                raise ValueError(
                    f"alpha has {len(self.alpha)} entries for arity {self.arity}"
                )
            if any(a < 0 for a in self.alpha):
                raise ValueError("alpha entries must be >= 0")

    def to_json(self) -> dict:
        if self.source is None:
            raise ValueError("cannot serialize a definition without source text")
        out: dict = {"arity": self.arity, "body": self.source}
        if self.alpha is not None:
            out["alpha"] = list(self.alpha)
        return out


# ---------------------------------------------------------------------------
# Tokenizer


@dataclass(frozen=True)
class _Token:
    kind: str  # "int" | "name" | "sym" | "eof"
    text: str
    line: int
    col: int


_SYMBOLS = "+-*^/(),"


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            col += 1
            i += 1
            continue
        start_col = col
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("name", text[i:j], line, start_col))
            col += j - i
            i = j
            continue
        if ch in _SYMBOLS:
            tokens.append(_Token("sym", ch, line, start_col))
            col += 1
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, start_col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Integer-coefficient polynomials in the digit symbol, as dense lists


def _poly_trim(c: list[int]) -> tuple[int, ...]:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c)


def _poly_add(a, b, sign: int = 1) -> tuple[int, ...]:
    out = [0] * max(len(a), len(b))
    for i, v in enumerate(a):
        out[i] += v
    for i, v in enumerate(b):
        out[i] += sign * v
    return _poly_trim(out)


def _poly_mul(a, b) -> tuple[int, ...]:
    out = [0] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            out[i + j] += u * v
    return _poly_trim(out)


def _poly_eval(coeffs: tuple[int, ...], x: int) -> int:
    value = 0
    for c in reversed(coeffs):
        value = value * x + c
    return value


class _Parser:
    def __init__(self, tokens: list[_Token], arity: int):
        self.tokens = tokens
        self.pos = 0
        self.arity = arity

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_sym(self, sym: str) -> _Token:
        tok = self.peek()
        if tok.kind != "sym" or tok.text != sym:
            raise ParseError(f"expected {sym!r}, found {tok.text or 'end of input'!r}",
                             tok.line, tok.col)
        return self.next()

    def parse(self) -> FuncExpr:
        node = self.expr()
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.line, tok.col)
        return node

    def expr(self) -> FuncExpr:
        node = self.term()
        while self.peek().kind == "sym" and self.peek().text in "+-":
            op = self.next().text
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self) -> FuncExpr:
        node = self.factor()
        while self.peek().kind == "sym" and self.peek().text == "*":
            self.next()
            node = Mul(node, self.factor())
        return node

    def factor(self) -> FuncExpr:
        if self.peek().kind == "sym" and self.peek().text == "-":
            self.next()
            return _negate(self.factor())
        node = self.base()
        if self.peek().kind == "sym" and self.peek().text == "^":
            self.next()
            node = Pow(node, self.natural())
        return node

    def natural(self) -> int:
        tok = self.peek()
        if tok.kind != "int":
            raise ParseError(f"expected a natural number, found {tok.text!r}",
                             tok.line, tok.col)
        self.next()
        return int(tok.text)

    def base(self) -> FuncExpr:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            value = int(tok.text)
            if self.peek().kind == "sym" and self.peek().text == "/":
                self.next()
                den_tok = self.peek()
                sign = 1
                if den_tok.kind == "sym" and den_tok.text == "-":
                    self.next()
                    sign = -1
                    den_tok = self.peek()
                if den_tok.kind != "int":
                    raise ParseError("expected an integer denominator",
                                     den_tok.line, den_tok.col)
                self.next()
                den = sign * int(den_tok.text)
                if den == 0:
                    raise ParseError("zero denominator", den_tok.line, den_tok.col)
                return RatConst(value, den)
            return IntConst(value)
        if tok.kind == "sym" and tok.text == "(":
            self.next()
            node = self.expr()
            self.expect_sym(")")
            return node
        if tok.kind == "name":
            if tok.text == "divp":
                self.next()
                self.expect_sym("(")
                operand = self.expr()
                self.expect_sym(",")
                e = self.natural()
                if e < 1:
                    raise ParseError("divp exponent must be >= 1", tok.line, tok.col)
                self.expect_sym(")")
                return DivP(operand, e)
            if tok.text == "digitsum":
                self.next()
                self.expect_sym("(")
                var = self.variable()
                self.expect_sym(",")
                coeffs = self.ipoly_expr()
                self.expect_sym(",")
                e = self.natural()
                if e < 1:
                    raise ParseError("digitsum exponent must be >= 1", tok.line, tok.col)
                self.expect_sym(")")
                return DigitSum(var.index, coeffs, e)
            return self.variable()
        raise ParseError(f"unexpected token {tok.text or 'end of input'!r}",
                         tok.line, tok.col)

    def variable(self) -> Var:
        tok = self.peek()
        if tok.kind != "name":
            raise ParseError(f"expected a variable, found {tok.text!r}",
                             tok.line, tok.col)
        name = tok.text
        if not (name.startswith("x") and name[1:].isdigit()):
            raise ParseError(f"unknown identifier {name!r}", tok.line, tok.col)
        index = int(name[1:])
        if not 1 <= index <= self.arity:
            raise ParseError(
                f"variable {name} out of range for arity {self.arity}",
                tok.line, tok.col,
            )
        self.next()
        return Var(index)

    # Polynomial in the digit symbol "i"; only integers, i, + - * ^ allowed.

    def ipoly_expr(self) -> tuple[int, ...]:
        coeffs = self.ipoly_term()
        while self.peek().kind == "sym" and self.peek().text in "+-":
            op = self.next().text
            rhs = self.ipoly_term()
            coeffs = _poly_add(coeffs, rhs, 1 if op == "+" else -1)
        return coeffs

    def ipoly_term(self) -> tuple[int, ...]:
        coeffs = self.ipoly_factor()
        while self.peek().kind == "sym" and self.peek().text == "*":
            self.next()
            coeffs = _poly_mul(coeffs, self.ipoly_factor())
        return coeffs

    def ipoly_factor(self) -> tuple[int, ...]:
        if self.peek().kind == "sym" and self.peek().text == "-":
            self.next()
            return _poly_mul((-1,), self.ipoly_factor())
        coeffs = self.ipoly_base()
        if self.peek().kind == "sym" and self.peek().text == "^":
            self.next()
            e = self.natural()
            out: tuple[int, ...] = (1,)
            for _ in range(e):
                out = _poly_mul(out, coeffs)
            return out
        return coeffs

    def ipoly_base(self) -> tuple[int, ...]:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            if self.peek().kind == "sym" and self.peek().text == "/":
                raise ParseError(
                    "digitsum coefficient polynomial must have integer coefficients",
                    tok.line, tok.col,
                )
            return (int(tok.text),)
        if tok.kind == "name" and tok.text == "i":
            self.next()
            return (0, 1)
        if tok.kind == "sym" and tok.text == "(":
            self.next()
            coeffs = self.ipoly_expr()
            self.expect_sym(")")
            return coeffs
        raise ParseError(
            f"unexpected token {tok.text!r} in digit coefficient polynomial",
            tok.line, tok.col,
        )


def _negate(node: FuncExpr) -> FuncExpr:
    if isinstance(node, IntConst):
        return IntConst(-node.value)
    if isinstance(node, RatConst):
        return RatConst(-node.numerator, node.denominator)
    return Sub(IntConst(0), node)


def parse(text: str, arity: int) -> FuncExpr:
    """Parse an expression over variables x1 ... x{arity}."""
    if arity < 1:
        raise ValueError(f"arity must be >= 1, got {arity}")
    return _Parser(_tokenize(text), arity).parse()


def parse_funcdef(data: dict) -> FuncDef:
    """Build a FuncDef from its JSON object form."""
    try:
        arity = int(data["arity"])
        body_text = data["body"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed function definition: {exc}") from exc
    alpha = data.get("alpha")
    body = parse(body_text, arity)
    return FuncDef(
        arity=arity,
        body=body,
        alpha=None if alpha is None else tuple(int(a) for a in alpha),
        source=body_text,
    )


def funcdef_from_json(text: str) -> FuncDef:
    return parse_funcdef(json.loads(text))


# ---------------------------------------------------------------------------
# Evaluation


def evaluate(expr: FuncExpr, point: PadicPoint) -> PadicInt:
    """Value of the expression at a point, with worst-case precision tracking.

    Each divp on the evaluation path costs its exponent in digits; joins
    (binary operations) keep the minimum of the branch precisions.
    """
    p = point.prime
    match expr:
        case IntConst(value=v):
            return from_rational(v, 1, p, point.precision)
        case RatConst(numerator=a, denominator=b):
            return from_rational(a, b, p, point.precision)
        case Var(index=k):
            if k > point.arity:
                raise ValueError(
                    f"expression uses x{k} but the point has arity {point.arity}"
                )
            return point.coords[k - 1]
        case Add(left=a, right=b):
            return evaluate(a, point) + evaluate(b, point)
        case Sub(left=a, right=b):
            return evaluate(a, point) - evaluate(b, point)
        case Mul(left=a, right=b):
            return evaluate(a, point) * evaluate(b, point)
        case Pow(base=b, exponent=e):
            v = evaluate(b, point)
            return _from_residue(
                pow(v.to_integer(), e, p**v.precision), p, v.precision
            )
        case DivP(operand=c, exponent=e):
            return evaluate(c, point).exact_div_p(e)
        case DigitSum(var_index=k, coeffs=cs, exponent=e):
            if k > point.arity:
                raise ValueError(
                    f"expression uses x{k} but the point has arity {point.arity}"
                )
            x = point.coords[k - 1]
            total = 0
            power = 1
            for i, d in enumerate(x.digits):
                total += power * _poly_eval(cs, i) * d**e
                power *= p
            return _from_residue(total, p, x.precision)
    raise TypeError(f"not an expression node: {expr!r}")


def divp_budget(expr: FuncExpr) -> int:
    """Worst-case total divp exponent along any evaluation path.

    Evaluating at input precision N + divp_budget(expr) guarantees the
    result carries at least N digits.
    """
    match expr:
        case IntConst() | RatConst() | Var() | DigitSum():
            return 0
        case Add(left=a, right=b) | Sub(left=a, right=b) | Mul(left=a, right=b):
            return max(divp_budget(a), divp_budget(b))
        case Pow(base=b):
            return divp_budget(b)
        case DivP(operand=c, exponent=e):
            return e + divp_budget(c)
    raise TypeError(f"not an expression node: {expr!r}")


def as_point_function(defn: FuncDef) -> Callable[[PadicPoint], PadicInt]:
    """The definition as a plain callable on points of matching arity."""

    def call(point: PadicPoint) -> PadicInt:
        if point.arity != defn.arity:
            raise ValueError(
                f"function of arity {defn.arity} applied to point of arity {point.arity}"
            )
        return evaluate(defn.body, point)

    return call


def as_univariate(defn: FuncDef | FuncExpr) -> Callable[[PadicInt], PadicInt]:
    """A one-variable definition as a callable on single values."""
    if isinstance(defn, FuncDef):
        if defn.arity != 1:
            raise ValueError(f"expected arity 1, got {defn.arity}")
        body = defn.body
    else:
        body = defn
    return lambda x: evaluate(body, PadicPoint((x,)))


@dataclass(frozen=True)
class WellDefinedReport:
    """Sampling evidence that every divp in an expression divides exactly.

    Zero failures is evidence, not proof; any failure disproves totality.
    """

    prime: int
    precision: int
    arity: int
    samples: int
    failures: int
    first_failure: tuple[int, ...] | None
    seed: int

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        return {
            "prime": self.prime,
            "precision": self.precision,
            "arity": self.arity,
            "samples": self.samples,
            "failures": self.failures,
            "first_failure": None if self.first_failure is None else list(self.first_failure),
            "seed": self.seed,
            "ok": self.ok,
        }


def well_defined_check(
    expr: FuncExpr,
    arity: int,
    prime: int,
    precision: int,
    samples: int,
    seed: int = 0,
) -> WellDefinedReport:
    """Randomized totality check: count inexact-division failures."""
    rng = random.Random(seed)
    modulus = prime**precision
    failures = 0
    first: tuple[int, ...] | None = None
    for _ in range(samples):
        values = tuple(rng.randrange(modulus) for _ in range(arity))
        point = PadicPoint.from_integers(values, prime, precision)
        try:
            evaluate(expr, point)
        except InexactDivisionError:
            failures += 1
            if first is None:
                first = values
    return WellDefinedReport(
        prime=prime,
        precision=precision,
        arity=arity,
        samples=samples,
        failures=failures,
        first_failure=first,
        seed=seed,
    )
