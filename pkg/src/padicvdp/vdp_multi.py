"""Multivariate van der Put machinery.

Products E_m(x) = e_{m_1}(x_1) ... e_{m_n}(x_n) over multi-indices m form
an orthonormal basis of the continuous functions on Z_p^n. The coefficient
attached to m is an alternating sum of F over the corners obtained by
stripping top digits of the coordinates in I(m) = {i : m_i >= p}:

    A_m = sum over S subset of I(m) of (-1)^|S| F(m with m_i -> m_i* on S)

computed here in closed inclusion-exclusion form. The equivalent nested
difference recursion (strip one coordinate, recurse on the rest) is kept
as an independent oracle; any stripping order gives the same value.

Weighted Lipschitz certification is necessary-direction only: a violation
of ord(A_m) >= max_{i in I(m)} (floor(log_p m_i) - alpha_i) disproves the
weighted condition, while success is evidence at this truncation level.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from itertools import combinations, product
from typing import Callable, Iterator, Sequence

from .core import (
    EnumerationBudgetError,
    PadicInt,
    PadicPoint,
    PrecisionExhaustedError,
    initial_part,
    m_star,
)
from .vdp_uni import (
    DEFAULT_BUDGET,
    LipschitzBoundError,
    SampledLipschitzReport,
    UniEvaluator,
    bound_log,
    initial_parts_below,
    violates_pair,
)

__all__ = [
    "PointEvaluator",
    "index_set",
    "e_multi",
    "VdpTableN",
    "vdp_coeff_multi_ie",
    "vdp_coeff_multi_rec",
    "vdp_expand_multi",
    "vdp_eval_multi",
    "WeightedLipschitzVerdict",
    "weighted_lip_bound_check",
    "normalize_weighted",
    "denormalize_weighted",
    "projection",
    "sampled_weighted_lip_check",
]

PointEvaluator = Callable[[PadicPoint], PadicInt]


def index_set(m: Sequence[int], prime: int) -> tuple[int, ...]:
    """1-based coordinates of m with entry >= p (where digit stripping applies)."""
    return tuple(i + 1 for i, v in enumerate(m) if v >= prime)


def e_multi(m: Sequence[int], x: PadicPoint) -> int:
    """Product indicator: 1 when every m_i is an initial part of x_i."""
    if len(m) != x.arity:
        raise ValueError(f"multi-index of arity {len(m)} against point of arity {x.arity}")
    for mi, xi in zip(m, x.coords):
        if not initial_part(mi, xi):
            return 0
    return 1


def _starred(m: Sequence[int], subset: Sequence[int], prime: int) -> tuple[int, ...]:
    out = list(m)
    for i in subset:
        out[i - 1] = m_star(out[i - 1], prime)
    return tuple(out)


def _coeff_ie(
    ev: Callable[[tuple[int, ...]], PadicInt], m: Sequence[int], prime: int
) -> PadicInt:
    idx = index_set(m, prime)
    total = ev(tuple(m))
    for size in range(1, len(idx) + 1):
        for subset in combinations(idx, size):
            corner = ev(_starred(m, subset, prime))
            total = total + corner if size % 2 == 0 else total - corner
    return total


def _grid_evaluator(
    F: PointEvaluator, prime: int, precision: int
) -> Callable[[tuple[int, ...]], PadicInt]:
    cache: dict[tuple[int, ...], PadicInt] = {}

    def ev(values: tuple[int, ...]) -> PadicInt:
        got = cache.get(values)
        if got is None:
            got = F(PadicPoint.from_integers(values, prime, precision))
            cache[values] = got
        return got

    return ev


def vdp_coeff_multi_ie(
    F: PointEvaluator, m: Sequence[int], prime: int, precision: int
) -> PadicInt:
    """Coefficient at m by the closed alternating sum over starred corners."""
    return _coeff_ie(_grid_evaluator(F, prime, precision), m, prime)


def vdp_coeff_multi_rec(
    F: PointEvaluator,
    m: Sequence[int],
    prime: int,
    precision: int,
    order: Sequence[int] | None = None,
) -> PadicInt:
    """Coefficient at m by the nested difference recursion.

    `order` lists the coordinates of I(m) in the order they are stripped;
    it must be a permutation of I(m). Exists as an independent oracle for
    the closed form, and to exercise order invariance.
    """
    idx = index_set(m, prime)
    if order is None:
        order = idx
    if sorted(order) != sorted(idx):
        raise ValueError(f"order {order!r} is not a permutation of I(m) = {idx!r}")
    ev = _grid_evaluator(F, prime, precision)

    def phi(values: tuple[int, ...], coords: tuple[int, ...]) -> PadicInt:
        if not coords:
            return ev(values)
        rest, last = coords[:-1], coords[-1]
        starred = list(values)
        starred[last - 1] = m_star(starred[last - 1], prime)
        return phi(values, rest) - phi(tuple(starred), rest)

    return phi(tuple(m), tuple(order))


@dataclass(frozen=True)
class VdpTableN:
    """Dense coefficient table over the grid [0, p^level)^arity.

    Coefficients are stored row-major: the flat index of m is the integer
    with base-p^level digits m_1 ... m_n, m_n least significant.
    """

    prime: int
    arity: int
    level: int
    coeffs: tuple[PadicInt, ...]
    alpha: tuple[int, ...] | None = None
    normalized: tuple[PadicInt, ...] | None = None

    def __post_init__(self) -> None:
        expected = self.prime ** (self.level * self.arity)
        if len(self.coeffs) != expected:
            raise ValueError(
                f"table needs {expected} coefficients, got {len(self.coeffs)}"
            )
        if (self.alpha is None) != (self.normalized is None):
            raise ValueError("alpha and normalized coefficients come together")
        if self.alpha is not None and len(self.alpha) != self.arity:
            raise ValueError("weight length must equal arity")
        if self.normalized is not None and len(self.normalized) != expected:
            raise ValueError("normalized coefficient count mismatch")

    @property
    def side(self) -> int:
        return self.prime**self.level

    @property
    def precision(self) -> int:
        return min(c.precision for c in self.coeffs)

    def flat_index(self, m: Sequence[int]) -> int:
        if len(m) != self.arity:
            raise ValueError(f"multi-index arity {len(m)}, table arity {self.arity}")
        pos = 0
        for v in m:
            if not 0 <= v < self.side:
                raise ValueError(f"index entry {v} outside [0, {self.side})")
            pos = pos * self.side + v
        return pos

    def coefficient(self, m: Sequence[int]) -> PadicInt:
        return self.coeffs[self.flat_index(m)]

    def indices(self) -> Iterator[tuple[int, ...]]:
        return product(range(self.side), repeat=self.arity)

    def sup_norm_ord(self) -> int | None:
        """min over m of ord(A_m); None when every coefficient vanishes."""
        best: int | float = math.inf
        for c in self.coeffs:
            k = c.ord()
            if k < best:
                best = k
                if best == 0:
                    break
        return None if best == math.inf else int(best)

    def function(self) -> PointEvaluator:
        return lambda x: vdp_eval_multi(self, x)

    def to_json(self) -> dict:
        key = lambda m: "(" + ",".join(str(v) for v in m) + ")"
        out: dict = {
            "p": self.prime,
            "n": self.arity,
            "K": self.level,
            "N": self.precision,
            "A": {key(m): list(self.coefficient(m).digits) for m in self.indices()},
        }
        if self.alpha is not None:
            out["alpha"] = list(self.alpha)
            out["a"] = {
                key(m): list((self.normalized or ())[self.flat_index(m)].digits)
                for m in self.indices()
            }
        return out

    @classmethod
    def from_json(cls, data: dict) -> VdpTableN:
        p, n, level = data["p"], data["n"], data["K"]
        side = p**level

        def parse_key(text: str) -> tuple[int, ...]:
            return tuple(int(v) for v in text.strip("()").split(","))

        def dense(entries: dict) -> tuple[PadicInt, ...]:
            slots: list[PadicInt | None] = [None] * side**n
            for text, digits in entries.items():
                m = parse_key(text)
                pos = 0
                for v in m:
                    pos = pos * side + v
                slots[pos] = PadicInt(p, tuple(digits))
            if any(s is None for s in slots):
                raise ValueError("coefficient table has missing entries")
            return tuple(slots)  # type: ignore[arg-type]

        alpha = data.get("alpha")
        return cls(
            prime=p,
            arity=n,
            level=level,
            coeffs=dense(data["A"]),
            alpha=None if alpha is None else tuple(alpha),
            normalized=None if alpha is None else dense(data["a"]),
        )


def vdp_expand_multi(
    F: PointEvaluator,
    level: int,
    arity: int,
    prime: int,
    precision: int,
    budget: int = DEFAULT_BUDGET,
) -> VdpTableN:
    """All coefficients over [0, p^level)^arity.

    Every starred corner is itself a grid point, so with memoization the
    whole expansion costs exactly p^(level * arity) evaluations of F.
    """
    if level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    if arity < 1:
        raise ValueError(f"arity must be >= 1, got {arity}")
    if precision < level:
        raise PrecisionExhaustedError(
            f"expanding to level {level} needs precision >= {level}, got {precision}"
        )
    size = prime ** (level * arity)
    if size > budget:
        raise EnumerationBudgetError(
            f"expansion needs {size} evaluations, budget is {budget}"
        )
    ev = _grid_evaluator(F, prime, precision)
    side = prime**level
    coeffs = tuple(
        _coeff_ie(ev, m, prime) for m in product(range(side), repeat=arity)
    )
    return VdpTableN(prime=prime, arity=arity, level=level, coeffs=coeffs)


def vdp_eval_multi(table: VdpTableN, x: PadicPoint) -> PadicInt:
    """Partial sum at x: coefficients over all m with every m_i initial in x_i."""
    if x.arity != table.arity:
        raise ValueError(f"point arity {x.arity}, table arity {table.arity}")
    if x.prime != table.prime:
        raise ValueError("point prime does not match table prime")
    per_coord = [initial_parts_below(c, table.level) for c in x.coords]
    total: PadicInt | None = None
    for m in product(*per_coord):
        c = table.coefficient(m)
        total = c if total is None else total + c
    assert total is not None
    return total


@dataclass(frozen=True)
class WeightedLipschitzVerdict:
    """Necessary-condition outcome: violation disproves, success is evidence."""

    holds: bool
    alpha: tuple[int, ...]
    level: int
    violation: tuple[int, ...] | None

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "alpha": list(self.alpha),
            "level": self.level,
            "violation": None if self.violation is None else list(self.violation),
        }


def weighted_lip_bound_check(
    table: VdpTableN, alpha: Sequence[int]
) -> WeightedLipschitzVerdict:
    """Check ord(A_m) >= max over I(m) of (floor(log_p m_i) - alpha_i).

    Indices with empty I(m) carry plain values F(m), so their bound is
    vacuous. Returns the first violating multi-index in row-major order.
    """
    alpha = tuple(alpha)
    if len(alpha) != table.arity:
        raise ValueError(f"weight length {len(alpha)}, table arity {table.arity}")
    if any(a < 0 for a in alpha):
        raise ValueError("alpha entries must be >= 0")
    p = table.prime
    for m in table.indices():
        required = _required_ord(m, alpha, p)
        if required <= 0:
            continue
        c = table.coefficient(m)
        observable = min(required, c.precision)
        if any(c.digits[i] for i in range(observable)):
            return WeightedLipschitzVerdict(False, alpha, table.level, m)
    return WeightedLipschitzVerdict(True, alpha, table.level, None)


def _required_ord(m: Sequence[int], alpha: tuple[int, ...], p: int) -> int:
    idx = index_set(m, p)
    if not idx:
        return 0
    return max(bound_log(m[i - 1], p) - alpha[i - 1] for i in idx)


def normalize_weighted(table: VdpTableN, alpha: Sequence[int]) -> VdpTableN:
    """Attach unit-scale coefficients a_m with A_m = p^required * a_m."""
    alpha = tuple(alpha)
    verdict = weighted_lip_bound_check(table, alpha)
    if not verdict.holds:
        raise LipschitzBoundError(
            f"coefficient bound violated at m={verdict.violation}, cannot normalize"
        )
    p = table.prime
    normalized = []
    for m in table.indices():
        shift = _required_ord(m, alpha, p)
        c = table.coefficient(m)
        if shift > 0:
            normalized.append(c.exact_div_p(shift))
        elif shift < 0:
            normalized.append(c.mul_pow_p(-shift))
        else:
            normalized.append(c)
    return replace(table, alpha=alpha, normalized=tuple(normalized))


def denormalize_weighted(table: VdpTableN) -> VdpTableN:
    """Recover raw coefficients from the normalized ones."""
    if table.alpha is None or table.normalized is None:
        raise ValueError("table carries no normalized coefficients")
    p = table.prime
    coeffs = []
    for m in table.indices():
        shift = _required_ord(m, table.alpha, p)
        b = table.normalized[table.flat_index(m)]
        if shift > 0:
            coeffs.append(b.mul_pow_p(shift))
        elif shift < 0:
            coeffs.append(b.exact_div_p(-shift))
        else:
            coeffs.append(b)
    return VdpTableN(
        prime=p, arity=table.arity, level=table.level, coeffs=tuple(coeffs)
    )


def projection(
    F: PointEvaluator, coord: int, fixed: Sequence[PadicInt]
) -> UniEvaluator:
    """Freeze all coordinates except `coord` (1-based) at the given values.

    The result plugs into every univariate operation; if F satisfies the
    weighted condition with weight alpha, each projection lies in the
    univariate class for alpha_coord.
    """
    fixed = tuple(fixed)
    arity = len(fixed) + 1
    if not 1 <= coord <= arity:
        raise ValueError(f"coordinate {coord} out of range for arity {arity}")

    def call(z: PadicInt) -> PadicInt:
        coords = fixed[: coord - 1] + (z,) + fixed[coord - 1 :]
        return F(PadicPoint(coords))

    return call


def sampled_weighted_lip_check(
    F: PointEvaluator,
    alpha: Sequence[int],
    samples: int,
    arity: int,
    prime: int,
    precision: int,
    seed: int = 0,
) -> SampledLipschitzReport:
    """Randomized point pairs checked against the weighted inequality.

    |F(x) - F(y)| must not exceed max_i p^(alpha_i) |x_i - y_i|, i.e. the
    output difference must vanish to order min_i (ord(x_i - y_i) - alpha_i).
    """
    alpha = tuple(alpha)
    if len(alpha) != arity:
        raise ValueError(f"weight length {len(alpha)}, arity {arity}")
    rng = random.Random(seed)
    modulus = prime**precision
    violations = 0
    first: tuple | None = None
    for _ in range(samples):
        a = tuple(rng.randrange(modulus) for _ in range(arity))
        b = tuple(rng.randrange(modulus) for _ in range(arity))
        x = PadicPoint.from_integers(a, prime, precision)
        y = PadicPoint.from_integers(b, prime, precision)
        required: int | float = math.inf
        for xi, yi, ai in zip(x.coords, y.coords, alpha):
            k = (xi - yi).ord()
            if k != math.inf:
                required = min(required, k - ai)
        if required == math.inf:
            continue
        if violates_pair(required, F(x) - F(y), 0):
            violations += 1
            if first is None:
                first = (a, b)
    return SampledLipschitzReport(
        alpha=alpha,
        samples=samples,
        violations=violations,
        first_violation=first,
        seed=seed,
    )
