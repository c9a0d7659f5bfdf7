"""Derivative-free root finding on Z_p and Z_p^n.

Lifting extends a root of F modulo a power of p one digit at a time. At
level l the candidate digits r = 1 .. p-1 produce normalized differences

    c_r = (F(z + r p^l e_j) - F(z)) / p^l  mod p

along the chosen coordinate j. When {c_1, ..., c_{p-1}} is exactly
{1, ..., p-1}, any residual digit of F(z) at position l can be cancelled
by a unique r, so the root extends; the digit 0 is taken when the residual
already vanishes. The completeness of that set is the lifting hypothesis,
and it is verified at every level along the constructed path (path
verification, not a proof of the hypothesis for all congruent indices).

A run returns an audited LiftTrace: per-level residual digit, condition
set, chosen digit, plus the replayed final root. Statuses:

    lifted                the root was extended to the target precision
                          and replay confirms F(root) = 0 mod p^N
    condition-failed      some level's condition set is not all of
                          {1, ..., p-1} (no coordinate qualifies, in the
                          multivariate auto mode)
    residual-nonliftable  F was not 0 to the order the level requires,
                          which can happen at the entry level when the
                          coordinate weights differ

Brute-force residue enumeration is provided as the independent oracle.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .core import (
    EnumerationBudgetError,
    PadicError,
    PadicInt,
    PadicPoint,
    PrecisionExhaustedError,
    from_integer,
)
from .vdp_multi import PointEvaluator, projection
from .vdp_uni import UniEvaluator

__all__ = [
    "PreconditionError",
    "STATUS_LIFTED",
    "STATUS_CONDITION_FAILED",
    "STATUS_RESIDUAL_NONLIFTABLE",
    "LiftLevel",
    "LiftTrace",
    "hensel_lift_uni",
    "hensel_lift_multi",
    "roots_mod_uni",
    "well_defined_residue_check",
    "ResidueCheckReport",
    "brute_force_roots_multi",
    "root_exists_via_projection",
    "ProjectionRootReport",
]

DEFAULT_BUDGET = 10**7

STATUS_LIFTED = "lifted"
STATUS_CONDITION_FAILED = "condition-failed"
STATUS_RESIDUAL_NONLIFTABLE = "residual-nonliftable"


class PreconditionError(PadicError):
    """The inputs violate a stated precondition of the operation."""


@dataclass(frozen=True)
class LiftLevel:
    """One level of a lifting run.

    condition_values[r-1] is the normalized difference for digit r, or
    None when the difference is not divisible by p^level (possible for
    positive weights, and itself a condition failure).
    """

    level: int
    coordinate: int
    residual_digit: int
    chosen_digit: int | None
    condition_values: tuple[int | None, ...]
    condition_complete: bool

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "coordinate": self.coordinate,
            "residual_digit": self.residual_digit,
            "chosen_digit": self.chosen_digit,
            "condition_values": list(self.condition_values),
            "condition_complete": self.condition_complete,
        }


@dataclass(frozen=True)
class LiftTrace:
    """Audited record of a lifting run; immutable, replay already verified."""

    status: str
    prime: int
    arity: int
    alpha: tuple[int, ...]
    start: tuple[int, ...]
    l0: int
    target_precision: int
    levels: tuple[LiftLevel, ...]
    root: PadicPoint | None
    failed_level: int | None
    auto_coordinate: bool

    @property
    def start_modulus_exponents(self) -> tuple[int, ...]:
        return tuple(self.l0 + a for a in self.alpha)

    @property
    def lifted(self) -> bool:
        return self.status == STATUS_LIFTED

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "prime": self.prime,
            "arity": self.arity,
            "alpha": list(self.alpha),
            "start": list(self.start),
            "l0": self.l0,
            "start_modulus_exponents": list(self.start_modulus_exponents),
            "target_precision": self.target_precision,
            "levels": [lv.to_json() for lv in self.levels],
            "root": None if self.root is None else self.root.to_json(),
            "failed_level": self.failed_level,
            "auto_coordinate": self.auto_coordinate,
        }


def _as_padic(
    F: PointEvaluator, values: Sequence[int], prime: int, precision: int
) -> PadicInt:
    return F(PadicPoint.from_integers(values, prime, precision))


def _known_zero_to(value: PadicInt, order: int, context: str) -> bool:
    """Whether the first `order` digits vanish; errors if too few are known."""
    if value.precision < order:
        raise PrecisionExhaustedError(
            f"{context}: deciding vanishing to order {order} needs {order} digits, "
            f"value has {value.precision}"
        )
    return all(d == 0 for d in value.digits[:order])


def _condition_values(
    F: PointEvaluator,
    current: Sequence[int],
    base_value: PadicInt,
    coord: int,
    level: int,
    prime: int,
    eval_precision: int,
) -> tuple[int | None, ...]:
    """Normalized differences c_r for r = 1 .. p-1 along one coordinate."""
    step = prime**level
    values: list[int | None] = []
    for r in range(1, prime):
        shifted = list(current)
        shifted[coord - 1] += r * step
        d = _as_padic(F, shifted, prime, eval_precision) - base_value
        if d.precision < level + 1:
            raise PrecisionExhaustedError(
                f"condition set at level {level} needs {level + 1} digits of the "
                f"difference, got {d.precision}"
            )
        if all(x == 0 for x in d.digits[:level]):
            values.append(d.digits[level])
        else:
            values.append(None)  # difference not divisible by p^level
    return tuple(values)


def _condition_complete(values: tuple[int | None, ...], prime: int) -> bool:
    if any(v is None for v in values):
        return False
    return sorted(values) == list(range(1, prime))  # type: ignore[type-var]


def _lift(
    F: PointEvaluator,
    alpha: tuple[int, ...],
    start: tuple[int, ...],
    l0: int,
    target_precision: int,
    prime: int,
    coordinate: int | None,
    eval_precision: int | None,
) -> LiftTrace:
    arity = len(start)
    auto = coordinate is None
    if len(alpha) != arity:
        raise PreconditionError(
            f"weight length {len(alpha)} does not match start arity {arity}"
        )
    if any(a < 0 for a in alpha):
        raise PreconditionError("alpha entries must be >= 0")
    if l0 < 1:
        raise PreconditionError(f"l0 must be a positive integer, got {l0}")
    if target_precision < 1:
        raise PreconditionError(f"target precision must be >= 1, got {target_precision}")
    if not auto and not 1 <= coordinate <= arity:
        raise PreconditionError(f"coordinate {coordinate} out of range for arity {arity}")
    for k, (z, a) in enumerate(zip(start, alpha), start=1):
        if not 0 <= z < prime ** (l0 + a):
            raise PreconditionError(
                f"start coordinate {k} must lie in [0, p^{l0 + a}), got {z}"
            )
    W = eval_precision if eval_precision is not None else target_precision
    if W < target_precision:
        raise PreconditionError(
            f"evaluation precision {W} below target precision {target_precision}"
        )

    start_check = _as_padic(F, start, prime, W)
    if not _known_zero_to(start_check, l0 + min(alpha), "start residue"):
        raise PreconditionError(
            f"F(start) is not 0 mod p^{l0 + min(alpha)}; start={list(start)}"
        )

    def make_trace(status, levels, root, failed_level):
        return LiftTrace(
            status=status,
            prime=prime,
            arity=arity,
            alpha=alpha,
            start=tuple(start),
            l0=l0,
            target_precision=target_precision,
            levels=tuple(levels),
            root=root,
            failed_level=failed_level,
            auto_coordinate=auto,
        )

    current = list(start)
    levels: list[LiftLevel] = []
    for level in range(l0 + max(alpha), target_precision):
        base = _as_padic(F, current, prime, W)
        if base.precision < level + 1:
            raise PrecisionExhaustedError(
                f"lifting at level {level} needs {level + 1} digits of F, "
                f"got {base.precision}"
            )
        if any(base.digits[:level]):
            # entry-level gap: F vanishes to the precondition order only
            return make_trace(STATUS_RESIDUAL_NONLIFTABLE, levels, None, level)
        t_bar = base.digits[level]

        chosen: tuple[int, tuple[int | None, ...]] | None = None
        first_attempt: tuple[int, tuple[int | None, ...]] | None = None
        for coord in [coordinate] if not auto else range(1, arity + 1):
            values = _condition_values(F, current, base, coord, level, prime, W)
            if first_attempt is None:
                first_attempt = (coord, values)
            if _condition_complete(values, prime):
                chosen = (coord, values)
                break
        if chosen is None:
            coord, values = first_attempt  # type: ignore[misc]
            levels.append(
                LiftLevel(level, coord, t_bar, None, values, False)
            )
            return make_trace(STATUS_CONDITION_FAILED, levels, None, level)

        coord, values = chosen
        if t_bar == 0:
            digit = 0
        else:
            digit = 1 + values.index(prime - t_bar)
        levels.append(LiftLevel(level, coord, t_bar, digit, values, True))
        if digit:
            current[coord - 1] += digit * prime**level

    root = PadicPoint.from_integers(current, prime, target_precision)
    final = _as_padic(F, current, prime, W)
    if not _known_zero_to(final, target_precision, "root replay"):
        # reachable only when the loop was empty yet the target exceeds
        # the verified start modulus
        bad = next(i for i, d in enumerate(final.digits) if d)
        return make_trace(STATUS_RESIDUAL_NONLIFTABLE, levels, None, bad)
    for k, (z, a) in enumerate(zip(start, alpha)):
        if current[k] % prime ** (l0 + a) != z % prime ** (l0 + a):
            raise PadicError("internal: lifted root lost the start congruence")
    return make_trace(STATUS_LIFTED, levels, root, None)


def hensel_lift_uni(
    f: UniEvaluator,
    alpha: int,
    start: int,
    l0: int,
    target_precision: int,
    prime: int,
    eval_precision: int | None = None,
) -> LiftTrace:
    """Lift a residue root of a one-variable function digit by digit.

    Requires 0 <= start < p^(l0 + alpha) and f(start) = 0 mod p^(l0 + alpha).
    The returned trace is replay-verified: status "lifted" means the root
    satisfies f = 0 mod p^target_precision and is congruent to start.
    """
    F: PointEvaluator = lambda pt: f(pt.coords[0])
    return _lift(
        F,
        (alpha,),
        (start,),
        l0,
        target_precision,
        prime,
        coordinate=1,
        eval_precision=eval_precision,
    )


def hensel_lift_multi(
    F: PointEvaluator,
    alpha: Sequence[int],
    start: Sequence[int],
    l0: int,
    target_precision: int,
    prime: int,
    coordinate: int | None = None,
    eval_precision: int | None = None,
) -> LiftTrace:
    """Lift a residue root of F: Z_p^n -> Z_p along one coordinate per level.

    Requires 0 <= start_k < p^(l0 + alpha_k) for every k and
    F(start) = 0 mod p^(l0 + min(alpha)). Levels run from l0 + max(alpha);
    with `coordinate` fixed the condition set is checked there, with
    coordinate=None each level searches j = 1 .. n for a qualifying one
    and records the choice.
    """
    return _lift(
        F,
        tuple(alpha),
        tuple(start),
        l0,
        target_precision,
        prime,
        coordinate=coordinate,
        eval_precision=eval_precision,
    )


def roots_mod_uni(
    f: UniEvaluator,
    alpha: int,
    k: int,
    prime: int,
    eval_precision: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> list[int]:
    """All residues x < p^k with f(x) = 0 mod p^(k - alpha), by enumeration."""
    if alpha < 0:
        raise PreconditionError(f"alpha must be >= 0, got {alpha}")
    if k < 1 + alpha:
        raise PreconditionError(f"level k must be >= 1 + alpha, got k={k}, alpha={alpha}")
    if prime**k > budget:
        raise EnumerationBudgetError(
            f"enumerating p^{k} residues exceeds budget {budget}"
        )
    W = eval_precision if eval_precision is not None else k
    if W < k:
        raise PreconditionError(f"evaluation precision {W} below level {k}")
    roots = []
    for x in range(prime**k):
        value = f(from_integer(x, prime, W))
        if _known_zero_to(value, k - alpha, f"root test at {x}"):
            roots.append(x)
    return roots


@dataclass(frozen=True)
class ResidueCheckReport:
    """Sampling evidence that f(x) mod p^(k - alpha) only depends on x mod p^k."""

    prime: int
    level: int
    alpha: int
    samples: int
    failures: int
    first_failure: tuple[int, int] | None
    seed: int

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_json(self) -> dict:
        return {
            "prime": self.prime,
            "level": self.level,
            "alpha": self.alpha,
            "samples": self.samples,
            "failures": self.failures,
            "first_failure": None
            if self.first_failure is None
            else list(self.first_failure),
            "seed": self.seed,
            "ok": self.ok,
        }


def well_defined_residue_check(
    f: UniEvaluator,
    alpha: int,
    k: int,
    prime: int,
    samples: int,
    seed: int = 0,
    eval_precision: int | None = None,
) -> ResidueCheckReport:
    """Sampled lifts of residues: f(x + t p^k) must agree with f(x) mod p^(k - alpha)."""
    if k < 1 + alpha:
        raise PreconditionError(f"level k must be >= 1 + alpha, got k={k}, alpha={alpha}")
    W = eval_precision if eval_precision is not None else k + 2
    if W <= k:
        raise PreconditionError(f"evaluation precision {W} leaves no room above level {k}")
    rng = random.Random(seed)
    failures = 0
    first: tuple[int, int] | None = None
    for _ in range(samples):
        x = rng.randrange(prime**k)
        t = rng.randrange(1, prime ** (W - k))
        y = x + t * prime**k
        diff = f(from_integer(y, prime, W)) - f(from_integer(x, prime, W))
        if not _known_zero_to(diff, min(k - alpha, diff.precision), "residue check"):
            failures += 1
            if first is None:
                first = (x, y)
    return ResidueCheckReport(
        prime=prime,
        level=k,
        alpha=alpha,
        samples=samples,
        failures=failures,
        first_failure=first,
        seed=seed,
    )


def brute_force_roots_multi(
    F: PointEvaluator,
    k: int,
    alpha: Sequence[int],
    arity: int,
    prime: int,
    eval_precision: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> list[tuple[int, ...]]:
    """All points x in [0, p^k)^n with F(x) = 0 mod p^(k - max(alpha))."""
    alpha = tuple(alpha)
    if len(alpha) != arity:
        raise PreconditionError(f"weight length {len(alpha)}, arity {arity}")
    if k < 1 + max(alpha):
        raise PreconditionError(
            f"level k must be >= 1 + max(alpha), got k={k}, alpha={alpha}"
        )
    count = prime ** (k * arity)
    if count > budget:
        raise EnumerationBudgetError(
            f"enumerating {count} grid points exceeds budget {budget}"
        )
    W = eval_precision if eval_precision is not None else k
    if W < k:
        raise PreconditionError(f"evaluation precision {W} below level {k}")
    order = k - max(alpha)
    roots = []
    for values in product(range(prime**k), repeat=arity):
        if _known_zero_to(_as_padic(F, values, prime, W), order, "root test"):
            roots.append(values)
    return roots


@dataclass(frozen=True)
class ProjectionRootReport:
    """Residue roots of one projection of F across levels.

    The fixed coordinates are supplied explicitly and cover a single
    choice only, so a nonempty answer at every level is evidence for
    liftability, never a proof over all projections.
    """

    coordinate: int
    alpha: int
    fixed: tuple[int, ...]
    roots_by_level: dict[int, list[int]]
    seed_note: str = "fixed coordinates are a sampled choice, not exhaustive"

    @property
    def all_nonempty(self) -> bool:
        return all(self.roots_by_level.values())

    def to_json(self) -> dict:
        return {
            "coordinate": self.coordinate,
            "alpha": self.alpha,
            "fixed": list(self.fixed),
            "roots_by_level": {str(k): v for k, v in self.roots_by_level.items()},
            "all_nonempty": self.all_nonempty,
            "note": self.seed_note,
        }


def root_exists_via_projection(
    F: PointEvaluator,
    coordinate: int,
    fixed: Sequence[PadicInt],
    k_values: Iterable[int],
    alpha: int,
    prime: int,
    budget: int = DEFAULT_BUDGET,
) -> ProjectionRootReport:
    """Residue roots of the projection along `coordinate` with `fixed` frozen."""
    proj = projection(F, coordinate, fixed)
    eval_precision = fixed[0].precision if fixed else None
    roots_by_level: dict[int, list[int]] = {}
    for k in k_values:
        roots_by_level[k] = roots_mod_uni(
            proj, alpha, k, prime, eval_precision=eval_precision, budget=budget
        )
    return ProjectionRootReport(
        coordinate=coordinate,
        alpha=alpha,
        fixed=tuple(c.to_integer() for c in fixed),
        roots_by_level=roots_by_level,
    )
