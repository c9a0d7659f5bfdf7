"""Command-line surface: reproducible runs with machine-readable output.

Subcommands: expand, eval, lipschitz, roots, lift, wellposed. Output is
JSON by default (use --format text for a human summary); runs with the
same configuration, seed included, produce byte-identical output.

Exit codes: 0 success, 1 negative verdict (a violation or failed lift,
still with valid output), 2 configuration error, 3 evaluation error,
4 precision exhausted.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .core import (
    EnumerationBudgetError,
    InvalidPrimeError,
    PadicError,
    PadicPoint,
    PrecisionExhaustedError,
    from_integer,
    is_prime,
)
from .dsl import (
    FuncDef,
    ParseError,
    as_point_function,
    as_univariate,
    divp_budget,
    parse,
    parse_funcdef,
    well_defined_check,
)
from .hensel import (
    PreconditionError,
    brute_force_roots_multi,
    hensel_lift_multi,
    hensel_lift_uni,
    roots_mod_uni,
    well_defined_residue_check,
)
from .vdp_multi import (
    VdpTableN,
    projection,
    sampled_weighted_lip_check,
    vdp_eval_multi,
    vdp_expand_multi,
    weighted_lip_bound_check,
)
from .vdp_uni import (
    VdpTable1,
    lip_alpha_check_uni,
    sampled_lip_check_uni,
    vdp_eval_uni,
    vdp_expand_uni,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_CONFIG = 2
EXIT_EVALUATION = 3
EXIT_PRECISION = 4

DEFAULT_BUDGET = 10**7


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, required=True, help="the prime p")
    common.add_argument("--precision", type=int, default=12,
                        help="working digit count N (default 12)")
    common.add_argument("--vars", type=int, default=1,
                        help="arity n for inline expressions (default 1)")
    common.add_argument("--seed", type=int, default=0,
                        help="seed for sampled checks, recorded in output")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="evaluation budget for enumerations (default 1e7)")
    common.add_argument("--output", type=Path, default=None,
                        help="also write the bare result artifact to this path")

    fn_common = argparse.ArgumentParser(add_help=False)
    group = fn_common.add_mutually_exclusive_group()
    group.add_argument("--expr", type=str, default=None,
                       help="inline expression over x1..xn")
    group.add_argument("--func", type=Path, default=None,
                       help="function definition JSON file")

    parser = argparse.ArgumentParser(
        prog="padicvdp",
        description="p-adic series tables, Lipschitz certification, root lifting",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_expand = sub.add_parser("expand", parents=[common, fn_common],
                              help="coefficient table of a function")
    p_expand.add_argument("--level", type=int, default=2, help="truncation level K")

    p_eval = sub.add_parser("eval", parents=[common, fn_common],
                            help="evaluate a function at a point")
    p_eval.add_argument("--point", type=_int_list, required=True,
                        help="comma-separated coordinates")

    p_lip = sub.add_parser("lipschitz", parents=[common, fn_common],
                           help="three-tier Lipschitz certification")
    p_lip.add_argument("--table", type=Path, default=None,
                       help="stored coefficient table JSON instead of a function")
    p_lip.add_argument("--level", type=int, default=2, help="truncation level K")
    p_lip.add_argument("--alpha", type=_int_list, default=None,
                       help="claimed weight, comma-separated")
    p_lip.add_argument("--samples", type=int, default=10000,
                       help="pair samples (default 10000)")
    p_lip.add_argument("--projection-samples", type=int, default=8,
                       help="sampled fixed tuples per coordinate (default 8)")

    p_roots = sub.add_parser("roots", parents=[common, fn_common],
                             help="residue roots by enumeration")
    p_roots.add_argument("--level", type=int, default=1, help="residue level k")
    p_roots.add_argument("--alpha", type=_int_list, default=None)

    p_lift = sub.add_parser("lift", parents=[common, fn_common],
                            help="derivative-free root lifting")
    p_lift.add_argument("--alpha", type=_int_list, default=None)
    p_lift.add_argument("--start", type=_int_list, required=True,
                        help="start residues, comma-separated")
    p_lift.add_argument("--l0", type=int, default=1)
    p_lift.add_argument("--target-precision", type=int, default=None,
                        help="digits of root to construct (default --precision)")
    coord = p_lift.add_mutually_exclusive_group()
    coord.add_argument("--coordinate", type=int, default=None,
                       help="coordinate to lift along (default 1)")
    coord.add_argument("--auto-coordinate", action="store_true",
                       help="search for a qualifying coordinate at each level")

    p_well = sub.add_parser("wellposed", parents=[common, fn_common],
                            help="sampled totality check for divp expressions")
    p_well.add_argument("--samples", type=int, default=10000)
    p_well.add_argument("--residue-level", type=int, default=None,
                        help="also check residue well-definedness at this level")
    p_well.add_argument("--alpha", type=_int_list, default=None)

    return parser


def _load_function(args) -> FuncDef:
    if args.func is not None:
        data = json.loads(args.func.read_text())
        return parse_funcdef(data)
    if args.expr is not None:
        body = parse(args.expr, args.vars)
        return FuncDef(arity=args.vars, body=body, source=args.expr)
    raise ValueError("one of --expr or --func is required")


def _resolve_alpha(flag, defn: FuncDef | None, arity: int, default_zero: bool):
    if flag is not None:
        alpha = tuple(flag)
    elif defn is not None and defn.alpha is not None:
        alpha = defn.alpha
    elif default_zero:
        alpha = (0,) * arity
    else:
        raise ValueError("no weight given: pass --alpha or declare it in the function file")
    if len(alpha) != arity:
        raise ValueError(f"alpha has {len(alpha)} entries for arity {arity}")
    if any(a < 0 for a in alpha):
        raise ValueError("alpha entries must be >= 0")
    return alpha


def _validate_common(args) -> None:
    if not is_prime(args.prime):
        raise InvalidPrimeError(f"--prime must be prime, got {args.prime}")
    if args.precision < 1:
        raise ValueError(f"--precision must be >= 1, got {args.precision}")
    if args.vars < 1:
        raise ValueError(f"--vars must be >= 1, got {args.vars}")
    if args.budget < 1:
        raise ValueError(f"--budget must be >= 1, got {args.budget}")


def _sup_norm_fields(ord_exponent: int | None, p: int) -> dict:
    if ord_exponent is None:
        return {"sup_norm": "0", "sup_norm_exponent": None}
    return {"sup_norm": f"{p}^{-ord_exponent}", "sup_norm_exponent": -ord_exponent}


def _cmd_expand(args) -> tuple[dict, dict, int]:
    defn = _load_function(args)
    p, level = args.prime, args.level
    if level < 1:
        raise ValueError(f"--level must be >= 1, got {level}")
    work = args.precision + divp_budget(defn.body)
    if defn.arity == 1:
        table = vdp_expand_uni(as_univariate(defn), level, p, work, budget=args.budget)
        table_json = table.to_json()
        reconstruct = lambda m: vdp_eval_uni(table, from_integer(m, p, work))
        direct = lambda m: as_univariate(defn)(from_integer(m, p, work))
        grid = p**level
        sample_point = lambda rng: rng.randrange(grid)
        agree = lambda m: reconstruct(m).digits[: table.precision] == direct(m).digits[: table.precision]
    else:
        table = vdp_expand_multi(
            as_point_function(defn), level, defn.arity, p, work, budget=args.budget
        )
        table_json = table.to_json()
        side = p**level

        def sample_point(rng):
            return tuple(rng.randrange(side) for _ in range(defn.arity))

        def agree(m):
            got = vdp_eval_multi(table, PadicPoint.from_integers(m, p, work))
            want = as_point_function(defn)(PadicPoint.from_integers(m, p, work))
            return got.digits[: table.precision] == want.digits[: table.precision]

    # success postcondition: reconstruction spot check on sampled grid points
    rng = random.Random(args.seed)
    checked = min(10, p ** (level * defn.arity))
    for _ in range(checked):
        m = sample_point(rng)
        if not agree(m):
            raise PadicError(f"internal: reconstruction mismatch at grid point {m}")

    result = {
        "table": table_json,
        "arity": defn.arity,
        "spot_check": {"points": checked, "ok": True},
        **_sup_norm_fields(table.sup_norm_ord(), p),
    }
    config = _config_echo(args, level=level, arity=defn.arity)
    return result, config, EXIT_OK


def _cmd_eval(args) -> tuple[dict, dict, int]:
    defn = _load_function(args)
    p = args.prime
    if len(args.point) != defn.arity:
        raise ValueError(
            f"point has {len(args.point)} coordinates, function arity is {defn.arity}"
        )
    if any(v < 0 for v in args.point):
        raise ValueError("point coordinates must be >= 0")
    work = args.precision + divp_budget(defn.body)
    point = PadicPoint.from_integers(args.point, p, work)
    value = as_point_function(defn)(point)
    if value.precision > args.precision:
        value = value.truncate(args.precision)
    result = {"value": value.to_json(), "text": str(value)}
    config = _config_echo(args, arity=defn.arity, point=list(args.point))
    return result, config, EXIT_OK


def _load_table(path: Path):
    data = json.loads(path.read_text())
    if "n" in data:
        return VdpTableN.from_json(data)
    return VdpTable1.from_json(data)


def _cmd_lipschitz(args) -> tuple[dict, dict, int]:
    p = args.prime
    defn: FuncDef | None = None
    if args.table is not None:
        table = _load_table(args.table)
        if table.prime != p:
            raise ValueError(f"table prime {table.prime} does not match --prime {p}")
        arity = table.arity if isinstance(table, VdpTableN) else 1
        level = table.level
        work = table.precision
        uni_fn = table.function() if isinstance(table, VdpTable1) else None
        point_fn = table.function() if isinstance(table, VdpTableN) else None
        declared = None
    else:
        defn = _load_function(args)
        arity = defn.arity
        level = args.level
        if level < 1:
            raise ValueError(f"--level must be >= 1, got {level}")
        work = args.precision + divp_budget(defn.body)
        uni_fn = as_univariate(defn) if arity == 1 else None
        point_fn = as_point_function(defn) if arity > 1 else None
        declared = defn.alpha
        if arity == 1:
            table = vdp_expand_uni(uni_fn, level, p, work, budget=args.budget)
        else:
            table = vdp_expand_multi(point_fn, level, arity, p, work, budget=args.budget)
    alpha = _resolve_alpha(args.alpha, defn, arity, default_zero=False)

    tiers: dict = {}
    if arity == 1:
        bound = lip_alpha_check_uni(table, alpha[0])
    else:
        bound = weighted_lip_bound_check(table, alpha)
    tiers["necessary-bound"] = bound.to_json()

    if arity == 1:
        tiers["projection-sampled"] = {"applicable": False}
        proj_violated = False
    else:
        rng = random.Random(args.seed)
        proj_violated = False
        witness = None
        modulus = p**work
        for coord in range(1, arity + 1):
            for _ in range(args.projection_samples):
                fixed_ints = [rng.randrange(modulus) for _ in range(arity - 1)]
                fixed = tuple(from_integer(v, p, work) for v in fixed_ints)
                proj = projection(point_fn, coord, fixed)
                sub_table = vdp_expand_uni(proj, level, p, work, budget=args.budget)
                verdict = lip_alpha_check_uni(sub_table, alpha[coord - 1])
                if not verdict.holds and witness is None:
                    proj_violated = True
                    witness = {
                        "coordinate": coord,
                        "fixed": fixed_ints,
                        "violation": verdict.violation,
                    }
        tiers["projection-sampled"] = {
            "applicable": True,
            "samples_per_coordinate": args.projection_samples,
            "violated": proj_violated,
            "witness": witness,
            "note": "fixed coordinates are sampled, not exhaustive",
        }

    if arity == 1:
        pair = sampled_lip_check_uni(uni_fn, alpha[0], args.samples, p, work, seed=args.seed)
    else:
        pair = sampled_weighted_lip_check(
            point_fn, alpha, args.samples, arity, p, work, seed=args.seed
        )
    tiers["pair-sampled"] = pair.to_json()

    violated = (not bound.holds) or proj_violated or (not pair.ok)
    result = {
        "alpha": list(alpha),
        "tiers": tiers,
        "verdict": "violated" if violated else "no-violation-found",
    }
    config = _config_echo(args, level=level, arity=arity, alpha=list(alpha))
    return result, config, EXIT_NEGATIVE if violated else EXIT_OK


def _cmd_roots(args) -> tuple[dict, dict, int]:
    defn = _load_function(args)
    p, k = args.prime, args.level
    alpha = _resolve_alpha(args.alpha, defn, defn.arity, default_zero=True)
    work = k + divp_budget(defn.body)
    if defn.arity == 1:
        residues: list = roots_mod_uni(
            as_univariate(defn), alpha[0], k, p,
            eval_precision=work, budget=args.budget,
        )
    else:
        residues = [
            list(r)
            for r in brute_force_roots_multi(
                as_point_function(defn), k, alpha, defn.arity, p,
                eval_precision=work, budget=args.budget,
            )
        ]
    result = {
        "level": k,
        "alpha": list(alpha),
        "modulus_exponent": k - max(alpha),
        "residues": residues,
    }
    config = _config_echo(args, level=k, arity=defn.arity, alpha=list(alpha))
    return result, config, EXIT_OK


def _cmd_lift(args) -> tuple[dict, dict, int]:
    defn = _load_function(args)
    p = args.prime
    alpha = _resolve_alpha(args.alpha, defn, defn.arity, default_zero=True)
    target = args.target_precision if args.target_precision is not None else args.precision
    if len(args.start) != defn.arity:
        raise ValueError(
            f"--start has {len(args.start)} entries, function arity is {defn.arity}"
        )
    work = target + divp_budget(defn.body)
    if defn.arity == 1:
        trace = hensel_lift_uni(
            as_univariate(defn), alpha[0], args.start[0], args.l0, target, p,
            eval_precision=work,
        )
    else:
        coordinate = None if args.auto_coordinate else (args.coordinate or 1)
        trace = hensel_lift_multi(
            as_point_function(defn), alpha, args.start, args.l0, target, p,
            coordinate=coordinate, eval_precision=work,
        )
    result = trace.to_json()
    result["replay_verified"] = trace.lifted
    if trace.root is not None:
        result["root_text"] = str(trace.root)
    config = _config_echo(
        args, arity=defn.arity, alpha=list(alpha),
        start=list(args.start), l0=args.l0, target_precision=target,
    )
    return result, config, EXIT_OK if trace.lifted else EXIT_NEGATIVE


def _cmd_wellposed(args) -> tuple[dict, dict, int]:
    defn = _load_function(args)
    p = args.prime
    work = args.precision + divp_budget(defn.body)
    report = well_defined_check(
        defn.body, defn.arity, p, work, args.samples, seed=args.seed
    )
    result: dict = {"totality": report.to_json()}
    failed = not report.ok
    if args.residue_level is not None:
        if defn.arity != 1:
            raise ValueError("--residue-level applies to one-variable functions")
        alpha = _resolve_alpha(args.alpha, defn, 1, default_zero=True)
        residue = well_defined_residue_check(
            as_univariate(defn), alpha[0], args.residue_level, p,
            samples=args.samples, seed=args.seed,
            eval_precision=args.residue_level + 2 + divp_budget(defn.body),
        )
        result["residue"] = residue.to_json()
        failed = failed or not residue.ok
    config = _config_echo(args, arity=defn.arity)
    return result, config, EXIT_NEGATIVE if failed else EXIT_OK


def _config_echo(args, **extra) -> dict:
    config = {
        "command": args.command,
        "prime": args.prime,
        "precision": args.precision,
        "seed": args.seed,
        "budget": args.budget,
        "format": args.format,
    }
    if args.expr is not None:
        config["expr"] = args.expr
    if getattr(args, "func", None) is not None:
        config["func"] = str(args.func)
    if getattr(args, "table", None) is not None:
        config["table"] = str(args.table)
    if getattr(args, "samples", None) is not None:
        config["samples"] = args.samples
    config.update(extra)
    return config


_DISPATCH = {
    "expand": _cmd_expand,
    "eval": _cmd_eval,
    "lipschitz": _cmd_lipschitz,
    "roots": _cmd_roots,
    "lift": _cmd_lift,
    "wellposed": _cmd_wellposed,
}


def _render_text(payload: dict) -> str:
    lines = [f"command: {payload['config']['command']}"]
    result = payload["result"]

    def walk(prefix: str, value) -> None:
        if isinstance(value, dict):
            for key in sorted(value):
                walk(f"{prefix}{key}.", value[key])
        elif isinstance(value, list) and (
            len(value) > 8 or any(isinstance(v, (dict, list)) for v in value)
        ):
            lines.append(f"{prefix[:-1]}: [{len(value)} entries]")
        else:
            lines.append(f"{prefix[:-1]}: {value}")

    walk("", result)
    return "\n".join(lines)


def _fail(code: int, category: str, message: str) -> int:
    print(json.dumps({"error": {"category": category, "message": message}}),
          file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _validate_common(args)
        result, config, code = _DISPATCH[args.command](args)
    except ParseError as exc:
        return _fail(EXIT_CONFIG, "parse-error", str(exc))
    except (InvalidPrimeError, EnumerationBudgetError, PreconditionError) as exc:
        return _fail(EXIT_CONFIG, "config", str(exc))
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        return _fail(EXIT_CONFIG, "config", str(exc))
    except PrecisionExhaustedError as exc:
        return _fail(EXIT_PRECISION, "precision", str(exc))
    except PadicError as exc:
        return _fail(EXIT_EVALUATION, "evaluation", str(exc))

    payload = {"command": args.command, "config": config, "result": result}
    if args.output is not None:
        artifact = result.get("table", result)
        args.output.write_text(json.dumps(artifact, indent=2, sort_keys=True) + "\n")
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(_render_text(payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
