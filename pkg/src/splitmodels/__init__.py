"""splitmodels: exact verification of splitting-model chart ideals.

A self-contained workbench that constructs affine chart ideals of splitting
local models parametrically in the discrete data (rank, level index, unit
position), and machine-checks their structural properties — flatness over
the base, the special-fiber component decomposition, smoothness and singular
loci, trace/exterior-power matrix conditions, and semi-stability of the
blow-up — over exact rational arithmetic with an in-house Groebner engine.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .poly import (
    GREVLEX,
    LEX,
    MonomialOrder,
    Polynomial,
    RingMismatchError,
    VarTable,
    block_order,
    parse_polynomial,
    reduce_poly,
    reduce_with_quotients,
)
from .ideals import (
    DEFAULT_BUDGET,
    BudgetExceededError,
    EmptyVarietyError,
    GBBudget,
    GBStats,
    Ideal,
    dimension,
    eliminate,
    equal,
    groebner,
    intersect,
    member,
    parse_ideal,
    quotient,
    radical_member,
    saturate,
    saturate_iterated,
    serialize_ideal,
)
from .charts import (
    ChartError,
    ChartSpec,
    MatrixExpr,
    build_blowup_patch,
    build_chart,
    build_constants,
    build_parametrization,
    build_raw_chart,
    build_rees_presentation,
    build_simplified_chart,
    char_poly,
    chart_table,
    format_instance,
    is_strongly_non_special,
    jacobian_matrix,
    parse_instance,
    parametrized_matrices,
    validate_spec,
)
from .checks import (
    CheckOutcome,
    check_blowup,
    check_components_A,
    check_components_B,
    check_flat,
    check_kottwitz_wedge,
    check_raw_equiv,
    check_smooth,
    run_instance,
)

__all__ = [
    "__version__",
    # poly
    "GREVLEX",
    "LEX",
    "MonomialOrder",
    "Polynomial",
    "RingMismatchError",
    "VarTable",
    "block_order",
    "parse_polynomial",
    "reduce_poly",
    "reduce_with_quotients",
    # ideals
    "DEFAULT_BUDGET",
    "BudgetExceededError",
    "EmptyVarietyError",
    "GBBudget",
    "GBStats",
    "Ideal",
    "dimension",
    "eliminate",
    "equal",
    "groebner",
    "intersect",
    "member",
    "parse_ideal",
    "quotient",
    "radical_member",
    "saturate",
    "saturate_iterated",
    "serialize_ideal",
    # charts
    "ChartError",
    "ChartSpec",
    "MatrixExpr",
    "build_blowup_patch",
    "build_chart",
    "build_constants",
    "build_parametrization",
    "build_raw_chart",
    "build_rees_presentation",
    "build_simplified_chart",
    "char_poly",
    "chart_table",
    "format_instance",
    "is_strongly_non_special",
    "jacobian_matrix",
    "parse_instance",
    "parametrized_matrices",
    "validate_spec",
    # checks
    "CheckOutcome",
    "check_blowup",
    "check_components_A",
    "check_components_B",
    "check_flat",
    "check_kottwitz_wedge",
    "check_raw_equiv",
    "check_smooth",
    "run_instance",
]
