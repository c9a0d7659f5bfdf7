"""Univariate van der Put machinery.

The indicator functions e_m (is m an initial part of x?) form an
orthonormal basis of the continuous functions on Z_p. This module builds
truncated coefficient tables B_m = f(m) - f(m*) for m >= p (f(m) below p),
evaluates the resulting partial sums, and certifies p^alpha-Lipschitz
behaviour through the coefficient bound ord(B_m) >= floor(log_p m) - alpha,
which is equivalent to the pairwise Lipschitz inequality.

Evaluators are plain callables PadicInt -> PadicInt, so the same machinery
accepts parsed expressions, raw callbacks, and stored tables.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Callable

from .core import (
    EnumerationBudgetError,
    PadicError,
    PadicInt,
    PrecisionExhaustedError,
    floor_log_p,
    from_integer,
    initial_part,
    m_star,
)

__all__ = [
    "UniEvaluator",
    "e_m",
    "initial_parts_below",
    "VdpTable1",
    "vdp_coeff_uni",
    "vdp_expand_uni",
    "vdp_eval_uni",
    "LipschitzVerdict",
    "LipschitzBoundError",
    "lip_alpha_check_uni",
    "normalize_alpha",
    "denormalize_alpha",
    "SampledLipschitzReport",
    "sampled_lip_check_uni",
    "bound_log",
]

UniEvaluator = Callable[[PadicInt], PadicInt]

DEFAULT_BUDGET = 10**7


class LipschitzBoundError(PadicError):
    """A coefficient table violates the bound required for normalization."""


def e_m(m: int, x: PadicInt) -> int:
    """Basis indicator: 1 when m is an initial part of x, else 0."""
    return 1 if initial_part(m, x) else 0


def bound_log(m: int, p: int) -> int:
    """floor(log_p m) as used in coefficient bounds; 0 for all m < p.

    The m < p branch mirrors the two-case coefficient formula: those
    coefficients are plain values f(m), so their bound must be vacuous.
    """
    return floor_log_p(m, p) if m >= p else 0


def initial_parts_below(x: PadicInt, level: int) -> list[int]:
    """Distinct standard-sequence values of x below p^level, ascending."""
    if level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    if x.precision < level:
        raise PrecisionExhaustedError(
            f"listing initial parts below p^{level} needs {level} digits, "
            f"value has {x.precision}"
        )
    parts: list[int] = []
    acc = 0
    power = 1
    for k in range(level):
        acc += x.digits[k] * power
        power *= x.prime
        if not parts or parts[-1] != acc:
            parts.append(acc)
    return parts


@dataclass(frozen=True)
class VdpTable1:
    """Truncated coefficient table: B_m for every m < p^level.

    When alpha is set, `normalized` holds b_m = B_m / p^(bound_log(m) - alpha),
    the unit-scale coefficients whose integrality witnesses the Lipschitz
    bound.
    """

    prime: int
    level: int
    coeffs: tuple[PadicInt, ...]
    alpha: int | None = None
    normalized: tuple[PadicInt, ...] | None = None

    def __post_init__(self) -> None:
        expected = self.prime**self.level
        if len(self.coeffs) != expected:
            raise ValueError(
                f"table at level {self.level} needs {expected} coefficients, "
                f"got {len(self.coeffs)}"
            )
        for c in self.coeffs:
            if c.prime != self.prime:
                raise ValueError("coefficient prime does not match table prime")
        if (self.alpha is None) != (self.normalized is None):
            raise ValueError("alpha and normalized coefficients come together")
        if self.normalized is not None and len(self.normalized) != expected:
            raise ValueError("normalized coefficient count mismatch")

    @property
    def size(self) -> int:
        return len(self.coeffs)

    @property
    def precision(self) -> int:
        return min(c.precision for c in self.coeffs)

    def coefficient(self, m: int) -> PadicInt:
        return self.coeffs[m]

    def sup_norm_ord(self) -> int | None:
        """min_m ord(B_m), i.e. the sup norm as an exponent; None when all vanish.

        Equals the minimal order of f over the level grid (the partial sums
        telescope), so it reports the sup norm of the truncated function.
        """
        best: int | float = math.inf
        for c in self.coeffs:
            k = c.ord()
            if k < best:
                best = k
                if best == 0:
                    break
        return None if best == math.inf else int(best)

    def function(self) -> UniEvaluator:
        """The table as a plain evaluator (partial-sum reconstruction)."""
        return lambda x: vdp_eval_uni(self, x)

    def to_json(self) -> dict:
        out: dict = {
            "p": self.prime,
            "K": self.level,
            "N": self.precision,
            "B": [list(c.digits) for c in self.coeffs],
        }
        if self.alpha is not None:
            out["alpha"] = self.alpha
            out["b"] = [list(c.digits) for c in self.normalized or ()]
        return out

    @classmethod
    def from_json(cls, data: dict) -> VdpTable1:
        p = data["p"]
        coeffs = tuple(PadicInt(p, tuple(d)) for d in data["B"])
        alpha = data.get("alpha")
        normalized = None
        if alpha is not None:
            normalized = tuple(PadicInt(p, tuple(d)) for d in data["b"])
        return cls(
            prime=p,
            level=data["K"],
            coeffs=coeffs,
            alpha=alpha,
            normalized=normalized,
        )


def vdp_coeff_uni(
    f: UniEvaluator, m: int, prime: int, precision: int
) -> PadicInt:
    """Single coefficient: f(m) - f(m*) for m >= p, plain f(m) below p."""
    fm = f(from_integer(m, prime, precision))
    if m < prime:
        return fm
    return fm - f(from_integer(m_star(m, prime), prime, precision))


def vdp_expand_uni(
    f: UniEvaluator,
    level: int,
    prime: int,
    precision: int,
    budget: int = DEFAULT_BUDGET,
) -> VdpTable1:
    """All p^level coefficients of f, computed from grid evaluations."""
    if level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    if precision < level:
        raise PrecisionExhaustedError(
            f"expanding to level {level} needs precision >= {level}, got {precision}"
        )
    size = prime**level
    if size > budget:
        raise EnumerationBudgetError(
            f"expansion needs {size} evaluations, budget is {budget}"
        )
    values: dict[int, PadicInt] = {}

    def ev(k: int) -> PadicInt:
        if k not in values:
            values[k] = f(from_integer(k, prime, precision))
        return values[k]

    coeffs = []
    for m in range(size):
        if m < prime:
            coeffs.append(ev(m))
        else:
            coeffs.append(ev(m) - ev(m_star(m, prime)))
    return VdpTable1(prime=prime, level=level, coeffs=tuple(coeffs))


def vdp_eval_uni(table: VdpTable1, x: PadicInt) -> PadicInt:
    """Partial sum of the series at x: sum of B_m over initial parts m < p^K."""
    if x.prime != table.prime:
        raise ValueError("value prime does not match table prime")
    total: PadicInt | None = None
    for m in initial_parts_below(x, table.level):
        c = table.coeffs[m]
        total = c if total is None else total + c
    assert total is not None  # x always has at least the initial part x^(0)
    return total


@dataclass(frozen=True)
class LipschitzVerdict:
    """Outcome of the coefficient-bound check at a fixed truncation level."""

    holds: bool
    alpha: int
    level: int
    violation: int | None

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "alpha": self.alpha,
            "level": self.level,
            "violation": self.violation,
        }


def lip_alpha_check_uni(table: VdpTable1, alpha: int) -> LipschitzVerdict:
    """Check ord(B_m) >= bound_log(m) - alpha for every tabulated m.

    Returns the first violating index, if any. A violation needs a nonzero
    digit strictly below the required order, so it is decidable whenever
    the coefficients carry enough digits; unseen digits cannot witness one.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    p = table.prime
    for m, c in enumerate(table.coeffs):
        required = bound_log(m, p) - alpha
        if required <= 0:
            continue
        observable = min(required, c.precision)
        if any(c.digits[i] for i in range(observable)):
            return LipschitzVerdict(False, alpha, table.level, m)
    return LipschitzVerdict(True, alpha, table.level, None)


def normalize_alpha(table: VdpTable1, alpha: int) -> VdpTable1:
    """Attach unit-scale coefficients b_m = B_m shifted by alpha - bound_log(m).

    Requires the coefficient bound to hold; the shift down is then exact.
    """
    verdict = lip_alpha_check_uni(table, alpha)
    if not verdict.holds:
        raise LipschitzBoundError(
            f"coefficient bound violated at m={verdict.violation}, cannot normalize"
        )
    p = table.prime
    normalized = []
    for m, c in enumerate(table.coeffs):
        shift = bound_log(m, p) - alpha
        if shift > 0:
            normalized.append(c.exact_div_p(shift))
        elif shift < 0:
            normalized.append(c.mul_pow_p(-shift))
        else:
            normalized.append(c)
    return replace(table, alpha=alpha, normalized=tuple(normalized))


def denormalize_alpha(table: VdpTable1) -> VdpTable1:
    """Recover the raw coefficients from the normalized ones."""
    if table.alpha is None or table.normalized is None:
        raise ValueError("table carries no normalized coefficients")
    p = table.prime
    coeffs = []
    for m, b in enumerate(table.normalized):
        shift = bound_log(m, p) - table.alpha
        if shift > 0:
            coeffs.append(b.mul_pow_p(shift))
        elif shift < 0:
            coeffs.append(b.exact_div_p(-shift))
        else:
            coeffs.append(b)
    return VdpTable1(prime=p, level=table.level, coeffs=tuple(coeffs))


@dataclass(frozen=True)
class SampledLipschitzReport:
    """Randomized pairwise Lipschitz evidence; any violation is conclusive."""

    alpha: tuple[int, ...]
    samples: int
    violations: int
    first_violation: tuple | None
    seed: int

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {
            "alpha": list(self.alpha),
            "samples": self.samples,
            "violations": self.violations,
            "first_violation": None
            if self.first_violation is None
            else [list(v) if isinstance(v, tuple) else v for v in self.first_violation],
            "seed": self.seed,
            "ok": self.ok,
        }


def violates_pair(
    diff_in_ord: int | float, diff_out: PadicInt, alpha: int
) -> bool:
    """Whether |f(x)-f(y)| <= p^alpha |x-y| is observably false.

    diff_in_ord is ord(x - y); the inequality requires the output
    difference to vanish to order diff_in_ord - alpha.
    """
    if diff_in_ord == math.inf:
        return False
    required = diff_in_ord - alpha
    if required <= 0:
        return False
    observable = min(required, diff_out.precision)
    return any(diff_out.digits[i] for i in range(observable))


def sampled_lip_check_uni(
    f: UniEvaluator,
    alpha: int,
    samples: int,
    prime: int,
    precision: int,
    seed: int = 0,
) -> SampledLipschitzReport:
    """Randomized pairs x, y checked against the p^alpha-Lipschitz inequality."""
    rng = random.Random(seed)
    modulus = prime**precision
    violations = 0
    first: tuple | None = None
    for _ in range(samples):
        a = rng.randrange(modulus)
        b = rng.randrange(modulus)
        x = from_integer(a, prime, precision)
        y = from_integer(b, prime, precision)
        if violates_pair((x - y).ord(), f(x) - f(y), alpha):
            violations += 1
            if first is None:
                first = (a, b)
    return SampledLipschitzReport(
        alpha=(alpha,),
        samples=samples,
        violations=violations,
        first_violation=first,
        seed=seed,
    )
