"""Fixed-precision p-adic analysis in one and several variables.

Digit arithmetic on Z_p and Z_p^n, a small expression language for
functions between them, van der Put coefficient tables with Lipschitz
certification, and derivative-free Hensel lifting of residue roots.
"""
from .core import (
    EnumerationBudgetError,
    InexactDivisionError,
    InvalidPrimeError,
    MStarUndefinedError,
    PadicError,
    PadicInt,
    PadicPoint,
    PrecisionExhaustedError,
    PrimeMismatchError,
    digit_length,
    floor_log_p,
    from_integer,
    from_rational,
    initial_part,
    is_prime,
    m_star,
)
from .dsl import (
    FuncDef,
    FuncExpr,
    ParseError,
    as_point_function,
    as_univariate,
    divp_budget,
    evaluate,
    funcdef_from_json,
    parse,
    parse_funcdef,
    well_defined_check,
)
from .hensel import (
    LiftTrace,
    PreconditionError,
    brute_force_roots_multi,
    hensel_lift_multi,
    hensel_lift_uni,
    root_exists_via_projection,
    roots_mod_uni,
    well_defined_residue_check,
)
from .vdp_multi import (
    VdpTableN,
    e_multi,
    index_set,
    normalize_weighted,
    projection,
    sampled_weighted_lip_check,
    vdp_coeff_multi_ie,
    vdp_coeff_multi_rec,
    vdp_eval_multi,
    vdp_expand_multi,
    weighted_lip_bound_check,
)
from .vdp_uni import (
    VdpTable1,
    e_m,
    lip_alpha_check_uni,
    normalize_alpha,
    sampled_lip_check_uni,
    vdp_coeff_uni,
    vdp_eval_uni,
    vdp_expand_uni,
)

__version__ = "0.1.0"
