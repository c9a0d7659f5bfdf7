"""Shared test helpers: independent integer-model oracles and random functions.

Oracles here deliberately avoid the library's digit machinery; they work in
plain Python integers so that agreement is meaningful evidence.
"""
from __future__ import annotations

import random

from padicvdp.dsl import (
    Add,
    DigitSum,
    DivP,
    FuncDef,
    IntConst,
    Mul,
    Pow,
    RatConst,
    Sub,
    Var,
    parse,
)

QUINTIC_TEXT = "-5 + digitsum(x1, 4 + 7*i^3, 5)"  # digit map with root 5 at p=7
FERMAT_DIFF_TEXT = "divp(x1 - x1^7, 1)"  # (x - x^7)/7, total by Fermat


def quintic_def() -> FuncDef:
    return FuncDef(arity=1, body=parse(QUINTIC_TEXT, 1), source=QUINTIC_TEXT)


def fermat_diff_def() -> FuncDef:
    return FuncDef(arity=1, body=parse(FERMAT_DIFF_TEXT, 1), source=FERMAT_DIFF_TEXT)


def quintic_int(x: int, modulus_exp: int) -> int:
    """The quintic digit map on integers, computed with plain arithmetic."""
    total = -5
    value = x
    i = 0
    while value > 0 or i == 0:
        total += 7**i * (4 + 7 * i**3) * (value % 7) ** 5
        value //= 7
        i += 1
    return total % 7**modulus_exp


def int_digits(k: int, p: int, n: int) -> list[int]:
    """Base-p digits by repeated division, independent of the library."""
    digits = []
    for _ in range(n):
        k, d = divmod(k, p)
        digits.append(d)
    return digits


def val_mod(v: int, p: int, n: int) -> int:
    """Order of v as a residue mod p^n; n when the residue is zero."""
    v %= p**n
    if v == 0:
        return n
    k = 0
    while v % p == 0:
        v //= p
        k += 1
    return k


def initial_parts_int(x: int, p: int, level: int) -> list[int]:
    """Distinct truncations x mod p^(k+1) for k < level, plain integers."""
    parts = []
    for k in range(level):
        part = x % p ** (k + 1)
        if not parts or parts[-1] != part:
            parts.append(part)
    return parts


def table_eval_int(coeffs: list[int], p: int, level: int, x: int) -> int:
    """Partial sum of a coefficient table at an integer point."""
    return sum(coeffs[m] for m in initial_parts_int(x, p, level))


def eval_int_model(expr, values: tuple[int, ...], p: int, n: int) -> int:
    """Big-integer evaluation of a polynomial-only expression, reduced mod p^n."""

    def go(node) -> int:
        if isinstance(node, IntConst):
            return node.value
        if isinstance(node, Var):
            return values[node.index - 1]
        if isinstance(node, Add):
            return go(node.left) + go(node.right)
        if isinstance(node, Sub):
            return go(node.left) - go(node.right)
        if isinstance(node, Mul):
            return go(node.left) * go(node.right)
        if isinstance(node, Pow):
            return go(node.base) ** node.exponent
        raise AssertionError(f"not polynomial-only: {node!r}")

    return go(expr) % p**n


def random_total_expr(rng: random.Random, arity: int, prime: int, depth: int = 3):
    """Random expression that defines a total function (divp only in safe form)."""

    def leaf():
        choice = rng.randrange(4)
        if choice == 0:
            return IntConst(rng.randrange(-9, 10))
        if choice == 1:
            den = rng.choice([d for d in range(2, 10) if d % prime != 0])
            return RatConst(rng.randrange(-9, 10), den)
        return Var(rng.randrange(1, arity + 1))

    def go(d):
        if d == 0:
            return leaf()
        choice = rng.randrange(7)
        if choice == 0:
            return Add(go(d - 1), go(d - 1))
        if choice == 1:
            return Sub(go(d - 1), go(d - 1))
        if choice == 2:
            return Mul(go(d - 1), go(d - 1))
        if choice == 3:
            return Pow(go(d - 1), rng.randrange(0, 4))
        if choice == 4:
            coeffs = tuple(rng.randrange(-6, 7) for _ in range(rng.randrange(1, 4)))
            return DigitSum(
                rng.randrange(1, arity + 1),
                coeffs if any(coeffs) else (1,),
                rng.randrange(1, 4),
            )
        if choice == 5:
            # x - x^p is divisible by p at every point, so this stays total
            v = Var(rng.randrange(1, arity + 1))
            return Add(go(d - 1), DivP(Sub(v, Pow(v, prime)), 1))
        return leaf()

    return go(depth)
