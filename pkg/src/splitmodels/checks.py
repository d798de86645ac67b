"""Verification checks over chart ideals.

Each check proves (or refutes) one structural claim about a chart ideal by
exact ideal computations and returns a :class:`CheckOutcome` with a verdict
of ``pass``, ``fail``, or ``budget-exceeded``.  Failures always carry a
witness naming what went wrong (an offending generator, a wrong dimension,
a residual singular locus).  Budget exhaustion in the underlying Groebner
engine is reported as its own verdict, never silently swallowed, and its
witness carries only deterministic counters so reports stay byte-stable.

``run_instance`` assembles the battery of checks applicable to one instance
descriptor and runs them in a fixed order; a failing check never aborts the
rest of the battery.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import comb, factorial
from typing import Callable, Sequence

from .charts import (
    ChartError,
    ChartSpec,
    MatrixExpr,
    build_blowup_patch,
    build_chart,
    build_parametrization,
    build_raw_chart,
    build_rees_presentation,
    build_simplified_chart,
    bridge_table,
    char_poly,
    chart_table,
    eval_poly_coeffs,
    format_instance,
    parametrized_matrices,
    parse_instance,
    patch_core_factor,
    unit_antidiagonal,
    validate_spec,
)
from .ideals import (
    BudgetExceededError,
    GBBudget,
    GBStats,
    Ideal,
    dimension,
    equal,
    groebner,
    intersect,
    member,
    radical_member,
    saturate,
    saturate_iterated,
)
from .poly import GREVLEX, Polynomial, VarTable

__all__ = [
    "CheckOutcome",
    "check_flat",
    "check_components_A",
    "check_components_B",
    "check_smooth",
    "check_singular_locus",
    "check_kottwitz_wedge",
    "check_raw_equiv",
    "check_blowup",
    "run_instance",
    "battery_for",
    "CHECK_IDS",
]

CHECK_IDS = (
    "valid",
    "flat",
    "components",
    "smooth",
    "kottwitz-wedge",
    "raw-equiv",
    "blowup",
)


@dataclass(frozen=True)
class CheckOutcome:
    """One check's verdict on one instance.

    ``verdict`` is ``pass``, ``fail``, or ``budget-exceeded``; ``witness``
    is a JSON-ready mapping present on every non-pass verdict (and never a
    wall-clock value), ``elapsed_s`` the measured wall time of the check.
    """

    check: str
    instance: str
    verdict: str
    witness: dict | None
    elapsed_s: float

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "instance": self.instance,
            "verdict": self.verdict,
            "witness": self.witness,
            "elapsed_s": self.elapsed_s,
        }


def _budget_witness(exc: BudgetExceededError) -> dict:
    stats: GBStats = exc.stats
    return {
        "reason": str(exc),
        "pairs_processed": stats.pairs_processed,
        "reductions_to_zero": stats.reductions_to_zero,
        "max_basis_size": stats.max_basis_size,
    }


def _outcome(
    check: str,
    instance: str,
    started: float,
    verdict: str,
    witness: dict | None,
) -> CheckOutcome:
    if verdict != "pass" and witness is None:
        raise AssertionError("non-pass verdicts must carry a witness")
    return CheckOutcome(
        check=check,
        instance=instance,
        verdict=verdict,
        witness=witness,
        elapsed_s=time.perf_counter() - started,
    )


def _guarded(
    check: str,
    instance: str,
    body: Callable[[], tuple[str, dict | None]],
) -> CheckOutcome:
    """Run a check body, translating budget exhaustion into a verdict."""
    started = time.perf_counter()
    try:
        verdict, witness = body()
    except BudgetExceededError as exc:
        return _outcome(check, instance, started, "budget-exceeded", _budget_witness(exc))
    return _outcome(check, instance, started, verdict, witness)


def _first_nonmember(
    source: Ideal, target: Ideal, budget: GBBudget | None
) -> Polynomial | None:
    """The first reduced-basis element of ``source`` not in ``target``."""
    for g in groebner(source, GREVLEX, budget):
        if not member(g, target, budget):
            return g
    return None


def _equality_witness(
    left: Ideal,
    right: Ideal,
    budget: GBBudget | None,
    left_name: str = "left",
    right_name: str = "right",
) -> dict | None:
    """None when the ideals are equal; otherwise a witness dict."""
    if equal(left, right, budget):
        return None
    g = _first_nonmember(left, right, budget)
    if g is not None:
        return {
            "direction": f"{left_name}-not-in-{right_name}",
            "generator": g.to_text(),
        }
    g = _first_nonmember(right, left, budget)
    if g is not None:
        return {
            "direction": f"{right_name}-not-in-{left_name}",
            "generator": g.to_text(),
        }
    return {"direction": "indistinguishable", "generator": "?"}


# ---------------------------------------------------------------------------
# Flatness
# ---------------------------------------------------------------------------

def check_flat(
    ideal: Ideal,
    instance: str = "",
    budget: GBBudget | None = None,
) -> CheckOutcome:
    """Flatness over the base: the uniformizer is a nonzerodivisor mod I.

    Certified as saturate(I, pi) = I.  The saturation is computed along two
    independent routes — the auxiliary-variable elimination and the
    stabilized chain of colon ideals — and the check fails if they ever
    disagree, so every run exercises the engine's dual-route agreement.
    """

    def body() -> tuple[str, dict | None]:
        pi = ideal.table.var("pi")
        sat = saturate(ideal, pi, budget)
        sat_chain = saturate_iterated(ideal, pi, budget)
        disagreement = _equality_witness(
            sat, sat_chain, budget, "direct-route", "chain-route"
        )
        if disagreement is not None:
            return "fail", {"stage": "saturation-route-disagreement", **disagreement}
        if equal(sat, ideal, budget):
            return "pass", None
        g = _first_nonmember(sat, ideal, budget)
        text = g.to_text() if g is not None else "?"
        return "fail", {"stage": "torsion", "generator": text}

    return _guarded("flat", instance, body)


# ---------------------------------------------------------------------------
# Special-fiber components
# ---------------------------------------------------------------------------

def _tail_range(n: int, l: int) -> list[int]:
    return list(range(2 * l + 1, n + 1))


def _component_ideals_A(
    table: VarTable, n: int, l: int, i0: int
) -> tuple[Ideal, Ideal, Ideal]:
    """The three expected special-fiber components in the full chart ring."""
    rng = _tail_range(n, l)
    pi = table.var("pi")
    vnorm = table.var(f"v{i0}") - 1
    z_tail = [table.var(f"z{i}") for i in rng]
    v_tail = [table.var(f"v{i}") for i in rng]
    V2 = MatrixExpr(table, [[v] for v in v_tail])
    Z2 = MatrixExpr(table, [[z] for z in z_tail])
    H = unit_antidiagonal(table, n - 2 * l)
    minors = MatrixExpr.block([[V2, H * Z2]]).wedge2().entries_flat()
    z2v2 = (Z2.transpose() * V2).entries[0][0]
    v2hv2 = (V2.transpose() * H * V2).entries[0][0]
    z2hz2 = (Z2.transpose() * H * Z2).entries[0][0]
    j1 = Ideal(table, z_tail + [pi, vnorm])
    j2 = Ideal(table, minors + [z2v2, v2hv2, z2hz2, pi, vnorm])
    j3 = Ideal(table, v_tail + [pi, vnorm])
    return j1, j2, j3


def check_components_A(
    ideal: Ideal,
    spec: ChartSpec,
    budget: GBBudget | None = None,
) -> CheckOutcome:
    """Special fiber of a determinantal chart = the three named components.

    Verifies that I + (pi) equals the intersection of the coordinate-vector
    component, the quadric-minor component, and the mirror coordinate-vector
    component, and that each component has dimension n-1 in the chart ring.
    """
    instance = format_instance(spec)

    def body() -> tuple[str, dict | None]:
        n, l, i0 = spec.n, spec.l, spec.i0
        table = ideal.table
        j1, j2, j3 = _component_ideals_A(table, n, l, i0)
        for label, comp in (("vanishing-z", j1), ("quadric", j2), ("vanishing-v", j3)):
            d = dimension(comp, budget)
            if d != n - 1:
                return "fail", {
                    "stage": "component-dimension",
                    "component": label,
                    "expected": n - 1,
                    "computed": d,
                }
        fiber = ideal.with_extra(table.var("pi"))
        meet = intersect(j1, intersect(j2, j3, budget), budget)
        mismatch = _equality_witness(fiber, meet, budget, "fiber", "expected")
        if mismatch is not None:
            return "fail", {"stage": "fiber-equality", **mismatch}
        return "pass", None

    return _guarded("components", instance, body)


def _component_ideals_B(
    table: VarTable, n: int, l: int, i0: int
) -> tuple[Ideal, Ideal]:
    rng = _tail_range(n, l)
    pi = table.var("pi")
    vnorm = table.var(f"v{i0}") - 1
    quad = table.zero()
    for r in rng:
        quad = quad + table.var(f"v{r}") * table.var(f"v{n + 2 * l + 1 - r}")
    c1 = Ideal(table, [table.var("u"), pi, vnorm])
    c2 = Ideal(table, [quad, pi, vnorm])
    return c1, c2


def check_components_B(
    ideal: Ideal,
    spec: ChartSpec,
    budget: GBBudget | None = None,
) -> CheckOutcome:
    """Special fiber of a hypersurface chart = two smooth components.

    Verifies I + (pi) = (u) meet (quadric), that both components have
    dimension n-1 and their intersection n-2, and that the components and
    the intersection are smooth by the Jacobian criterion.
    """
    instance = format_instance(spec)

    def body() -> tuple[str, dict | None]:
        n = spec.n
        table = ideal.table
        c1, c2 = _component_ideals_B(table, spec.n, spec.l, spec.i0)
        meet_cap = Ideal(table, list(c1.gens) + list(c2.gens))
        stages = (
            ("principal", c1, n - 1),
            ("quadric", c2, n - 1),
            ("intersection", meet_cap, n - 2),
        )
        for label, part, want in stages:
            d = dimension(part, budget)
            if d != want:
                return "fail", {
                    "stage": "component-dimension",
                    "component": label,
                    "expected": want,
                    "computed": d,
                }
        fiber = ideal.with_extra(table.var("pi"))
        mismatch = _equality_witness(
            fiber, intersect(c1, c2, budget), budget, "fiber", "expected"
        )
        if mismatch is not None:
            return "fail", {"stage": "fiber-equality", **mismatch}
        for label, part, want in stages:
            ok, wit = _smooth_verdict(part, len(table) - want, None, budget)
            if not ok:
                return "fail", {"stage": "component-smoothness", "component": label, **wit}
        return "pass", None

    return _guarded("components", instance, body)


# ---------------------------------------------------------------------------
# Smoothness via the Jacobian criterion
# ---------------------------------------------------------------------------

def _constant_pivot_reduce(
    rows: list[list[Polynomial]], codim: int
) -> tuple[list[list[Polynomial]], int]:
    """Shrink a Jacobian by pivoting on nonzero constant entries.

    Row and column elimination on an invertible (constant) pivot followed by
    deleting its row and column preserves the ideal of c x c minors while
    lowering c by one.  Returns the reduced matrix and the residual minor
    size; a residual size of zero means the minor ideal is the unit ideal.
    """
    while codim > 0 and rows and rows[0]:
        pivot: tuple[int, int] | None = None
        for r, row in enumerate(rows):
            for c, entry in enumerate(row):
                val = entry.constant_value()
                if val is not None and val != 0:
                    pivot = (r, c)
                    break
            if pivot is not None:
                break
        if pivot is None:
            break
        pr, pc = pivot
        pval = rows[pr][pc].constant_value()
        assert pval is not None
        inv = 1 / pval
        pivot_row = rows[pr]
        for r, row in enumerate(rows):
            if r == pr:
                continue
            factor = row[pc]
            if not factor.is_zero:
                scale = factor * inv
                rows[r] = [a - scale * b for a, b in zip(row, pivot_row)]
        # The pivot column is now zero off the pivot; clear the pivot row by
        # column operations, which only touch that row, then delete both.
        rows = [
            [e for c, e in enumerate(row) if c != pc]
            for r, row in enumerate(rows)
            if r != pr
        ]
        codim -= 1
    return rows, codim


def _iter_subsets(count: int, size: int):
    """All ascending index tuples, lexicographic order."""
    idx = list(range(size))
    while True:
        yield tuple(idx)
        for pos in reversed(range(size)):
            if idx[pos] != pos + count - size:
                break
        else:
            return
        idx[pos] += 1
        for later in range(pos + 1, size):
            idx[later] = idx[later - 1] + 1


def _minor_det(
    entries: list[list[Polynomial]],
    rows: tuple[int, ...],
    cols: tuple[int, ...],
    memo: dict,
    zero: Polynomial,
) -> Polynomial:
    """Determinant of a square submatrix by memoized first-row expansion."""
    if len(rows) == 1:
        return entries[rows[0]][cols[0]]
    key = (rows, cols)
    got = memo.get(key)
    if got is not None:
        return got
    r0 = rows[0]
    rest = rows[1:]
    acc = zero
    sign = 1
    for k, c in enumerate(cols):
        e = entries[r0][c]
        if not e.is_zero:
            sub = _minor_det(entries, rest, cols[:k] + cols[k + 1:], memo, zero)
            if not sub.is_zero:
                term = e * sub
                acc = acc + term if sign > 0 else acc - term
        sign = -sign
    memo[key] = acc
    return acc


def _minor_ideal_gens(
    reduced: list[list[Polynomial]],
    codim: int,
    base: Ideal,
    budget: GBBudget | None,
) -> list[Polynomial]:
    """Generators to append to ``base`` for the residual Jacobian minors.

    Minors are enumerated in lexicographic (row-subset, column-subset) order
    and interreduced incrementally: a minor already lying in the ideal built
    so far is dropped, so the Groebner work downstream stays proportional to
    the essential minors.  The enumeration cost is charged against the
    budget's pair-reduction cap (one unit per multiplication in the Laplace
    expansion).
    """
    nrows, ncols = len(reduced), len(reduced[0]) if reduced else 0
    if codim > nrows or codim > ncols:
        return []  # no minors of that size: the minor ideal is zero
    cap = (budget.max_pair_reductions if budget is not None
           else GBBudget().max_pair_reductions)
    cost = comb(nrows, codim) * comb(ncols, codim) * factorial(codim)
    if cost > cap:
        raise BudgetExceededError(
            "budget exceeded (Jacobian minor enumeration)",
            GBStats(
                pairs_processed=cost,
                reductions_to_zero=0,
                max_basis_size=0,
                elapsed_s=0.0,
            ),
        )
    table = base.table
    zero = table.zero()
    memo: dict = {}
    kept: list[Polynomial] = []
    current = base
    for rsub in _iter_subsets(nrows, codim):
        for csub in _iter_subsets(ncols, codim):
            m = _minor_det(reduced, rsub, csub, memo, zero)
            if m.is_zero:
                continue
            if member(m, current, budget):
                continue
            kept.append(m)
            current = Ideal(
                table, list(groebner(current, GREVLEX, budget)) + [m]
            )
    return kept


def _smooth_verdict(
    target: Ideal,
    expected_codim: int,
    expected_singular: Ideal | None,
    budget: GBBudget | None,
) -> tuple[bool, dict | None]:
    """Core of the Jacobian smoothness check.

    Verifies the dimension first (so the codimension used for minor sizes is
    the verified one), forms S = target + (codim-sized Jacobian minors), and
    compares V(S) against the expected singular locus: with no expected
    locus, S must be the unit ideal; otherwise every expected generator must
    lie in the radical of S and every generator of S must lie in the
    expected (prime) locus ideal.
    """
    table = target.table
    nvars = len(table)
    d = dimension(target, budget)
    if d != nvars - expected_codim:
        return False, {
            "stage": "dimension",
            "expected": nvars - expected_codim,
            "computed": d,
        }
    rows = [
        [g.derivative(name) for name in table.names]
        for g in target.gens
    ]
    reduced, residual_codim = _constant_pivot_reduce(rows, expected_codim)
    if residual_codim == 0:
        singular = Ideal(table, [table.one()])
    else:
        minors = _minor_ideal_gens(reduced, residual_codim, target, budget)
        singular = Ideal(table, list(target.gens) + minors)
    unit = groebner(singular, GREVLEX, budget) == (table.one(),)
    if expected_singular is None or not expected_singular.gens:
        if unit:
            return True, None
        basis = groebner(singular, GREVLEX, budget)
        return False, {
            "stage": "unexpected-singular-locus",
            "singular_locus_basis": [g.to_text() for g in basis[:8]],
        }
    if unit:
        return False, {
            "stage": "expected-singular-locus-missing",
            "detail": "Jacobian minors generate the unit ideal",
        }
    for g in expected_singular.gens:
        if not radical_member(g, singular, budget):
            return False, {
                "stage": "expected-not-in-radical",
                "generator": g.to_text(),
            }
    for g in groebner(singular, GREVLEX, budget):
        if not member(g, expected_singular, budget):
            return False, {
                "stage": "singular-outside-expected",
                "generator": g.to_text(),
            }
    return True, None


def check_smooth(
    target: Ideal,
    expected_codim: int,
    expected_singular: Ideal | None = None,
    instance: str = "",
    budget: GBBudget | None = None,
) -> CheckOutcome:
    """Jacobian-criterion smoothness with a prescribed singular locus.

    Pass iff the singular locus of V(target) — the vanishing of target plus
    all expected_codim-sized minors of its Jacobian — coincides with the
    expected locus (empty expected locus: the minor ideal must be unit).
    """

    def body() -> tuple[str, dict | None]:
        ok, wit = _smooth_verdict(target, expected_codim, expected_singular, budget)
        return ("pass", None) if ok else ("fail", wit)

    return _guarded("smooth", instance, body)


def check_singular_locus(
    spec: ChartSpec,
    budget: GBBudget | None = None,
) -> CheckOutcome:
    """The quadric component's singular locus is exactly the coordinate origin.

    Builds the quadric-minor component of the special fiber and checks its
    singular locus equals the vanishing of both coordinate vectors (with the
    fiber and unit normalizations).
    """
    instance = format_instance(spec)

    def body() -> tuple[str, dict | None]:
        n, l, i0 = spec.n, spec.l, spec.i0
        table = chart_table(spec)
        _, j2, _ = _component_ideals_A(table, n, l, i0)
        rng = _tail_range(n, l)
        expected = Ideal(
            table,
            [table.var(f"v{i}") for i in rng]
            + [table.var(f"z{i}") for i in rng]
            + [table.var("pi"), table.var(f"v{i0}") - 1],
        )
        codim = len(table) - (n - 1)
        ok, wit = _smooth_verdict(j2, codim, expected, budget)
        return ("pass", None) if ok else ("fail", wit)

    return _guarded("smooth", instance, body)


# ---------------------------------------------------------------------------
# Trace and exterior-power matrix conditions
# ---------------------------------------------------------------------------

def _kottwitz_target(table: VarTable, n: int) -> list[Polynomial]:
    """Coefficients of (t + pi)^(n-1) (t - pi), ascending, as ring elements."""
    pi = table.var("pi")
    coeffs = [table.one()]
    for _ in range(n - 1):
        nxt = [table.zero()] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] = nxt[k + 1] + c
            nxt[k] = nxt[k] + pi * c
        coeffs = nxt
    nxt = [table.zero()] * (len(coeffs) + 1)
    for k, c in enumerate(coeffs):
        nxt[k + 1] = nxt[k + 1] + c
        nxt[k] = nxt[k] - pi * c
    return nxt


def check_kottwitz_wedge(
    spec: ChartSpec,
    budget: GBBudget | None = None,
    ideal: Ideal | None = None,
) -> CheckOutcome:
    """Trace, exterior-power, and determinant conditions on the chart.

    With X and Y realized in the chart ring by the simplifying substitution:
    (i) every 2x2 minor of Y + pi I and of X + pi I lies in the chart ideal;
    (ii) char(Y) and char(X) agree with (t+pi)^(n-1)(t-pi) coefficientwise
    modulo the ideal; (iii) det(Y - pi I) and det(X - pi I) lie in the ideal.
    ``ideal`` overrides the freshly built chart (file-supplied or perturbed
    charts); it must live in the chart ring of ``spec``.
    """
    instance = format_instance(spec)

    def body() -> tuple[str, dict | None]:
        n = spec.n
        chart = ideal if ideal is not None else build_simplified_chart(spec)
        table = chart.table
        pi = table.var("pi")
        X, Y = parametrized_matrices(spec)
        eye = MatrixExpr.identity(table, n)
        for label, mat in (("Y", Y), ("X", X)):
            shifted = mat + eye * pi
            for k, entry in enumerate(shifted.wedge2().entries_flat()):
                if entry.is_zero:
                    continue
                if not member(entry, chart, budget):
                    return "fail", {
                        "stage": "wedge",
                        "matrix": label,
                        "minor_index": k,
                        "generator": entry.to_text(),
                    }
        target = _kottwitz_target(table, n)
        for label, mat in (("Y", Y), ("X", X)):
            coeffs = char_poly(mat)
            for k in range(n + 1):
                diff = coeffs[k] - target[k]
                if diff.is_zero:
                    continue
                if not member(diff, chart, budget):
                    return "fail", {
                        "stage": "char-poly",
                        "matrix": label,
                        "power": k,
                        "generator": diff.to_text(),
                    }
            det_at_pi = eval_poly_coeffs(coeffs, pi)
            if not det_at_pi.is_zero and not member(det_at_pi, chart, budget):
                return "fail", {
                    "stage": "determinant",
                    "matrix": label,
                    "generator": det_at_pi.to_text(),
                }
        return "pass", None

    return _guarded("kottwitz-wedge", instance, body)


# ---------------------------------------------------------------------------
# Raw-chart equivalence
# ---------------------------------------------------------------------------

def check_raw_equiv(
    spec: ChartSpec,
    budget: GBBudget | None = None,
    simplified: Ideal | None = None,
) -> CheckOutcome:
    """The triangular elimination carries the raw chart onto the simplified one.

    Substitutes the matrix variables and the eliminated z-block into every
    raw-chart generator; the nonzero images, together with the unit
    normalization, must generate exactly the simplified chart ideal.
    ``simplified`` overrides the built simplified-side ideal (file-supplied
    or perturbed charts).
    """
    instance = format_instance(spec)

    def body() -> tuple[str, dict | None]:
        n, l, i0 = spec.n, spec.l, spec.i0
        if simplified is None:
            expected = build_simplified_chart(spec)
        else:
            expected = simplified
        stable = expected.table
        raw = build_raw_chart(ChartSpec(n=n, l=l, i0=i0, kind="raw"))
        btable = bridge_table(spec)
        assignment = {
            name: value.cast_to(btable)
            for name, value in build_parametrization(spec).items()
        }
        images: list[Polynomial] = []
        for g in raw.gens:
            image = g.cast_to(btable).substitute(assignment)
            if not image.is_zero:
                images.append(image.cast_to(stable))
        residual = Ideal(stable, images).with_extra(stable.var(f"v{i0}") - 1)
        mismatch = _equality_witness(
            residual, expected, budget, "residual", "simplified"
        )
        if mismatch is None:
            return "pass", None
        return "fail", {"stage": "elimination-equality", **mismatch}

    return _guarded("raw-equiv", instance, body)


# ---------------------------------------------------------------------------
# Blow-up semi-stability
# ---------------------------------------------------------------------------

def _blowup_patch_body(
    spec: ChartSpec,
    j: int,
    budget: GBBudget | None,
    patch_override: Ideal | None = None,
    chart_override: Ideal | None = None,
) -> tuple[str, dict | None]:
    n, l, i0 = spec.n, spec.l, spec.i0
    patch_spec = ChartSpec(n=n, l=l, i0=i0, kind="blowup-patch", j=j)
    patch = patch_override if patch_override is not None else build_blowup_patch(patch_spec)
    table = patch.table
    pi = table.var("pi")
    zj = table.var(f"z{j}")
    jhat = n + 2 * l + 1 - j

    # Route 1: saturate the simplified chart plus the tautological links.
    if chart_override is not None:
        simplified = chart_override
    else:
        simplified = build_simplified_chart(
            ChartSpec(n=n, l=l, i0=i0, kind="simplified-A")
        )
    lifted = [g.cast_to(table) for g in simplified.gens]
    for i in _tail_range(n, l):
        if i != j:
            lifted.append(table.var(f"z{i}") - zj * table.var(f"t{i}"))
    lifted.append(table.var(f"t{j}") - 1)
    oracle1 = saturate(Ideal(table, lifted), zj, budget)
    mismatch = _equality_witness(patch, oracle1, budget, "patch", "chart-saturation")
    if mismatch is not None:
        return "fail", {"stage": "chart-saturation-equality", "patch": j, **mismatch}

    # Route 2: dehomogenize the projective presentation at t_j = 1.
    rees = build_rees_presentation(ChartSpec(n=n, l=l, i0=i0, kind="rees-proj"))
    one = table.one()
    dehom = [g.substitute({f"t{j}": one}) for g in rees.gens]
    dehom.append(table.var(f"t{j}") - 1)
    oracle2 = saturate(Ideal(table, dehom), zj, budget)
    mismatch = _equality_witness(patch, oracle2, budget, "patch", "dehomogenized")
    if mismatch is not None:
        return "fail", {"stage": "proj-dehomogenization-equality", "patch": j, **mismatch}

    # Route 3: the special fiber is a reduced normal crossings divisor with
    # three smooth components.
    qfac = patch_core_factor(patch_spec)
    comp1 = patch.with_extra(pi, table.var(f"v{jhat}"))
    comp2 = patch.with_extra(pi, zj)
    comp3 = patch.with_extra(pi, qfac)
    labeled = (
        ("mirror-coordinate", comp1),
        ("lead-coordinate", comp2),
        ("quadric-factor", comp3),
    )
    for (la, ca), (lb, cb) in (
        (labeled[0], labeled[1]),
        (labeled[0], labeled[2]),
        (labeled[1], labeled[2]),
    ):
        if equal(ca, cb, budget):
            return "fail", {
                "stage": "components-not-distinct",
                "patch": j,
                "components": [la, lb],
            }
    fiber = patch.with_extra(pi)
    meet = intersect(comp1, intersect(comp2, comp3, budget), budget)
    mismatch = _equality_witness(fiber, meet, budget, "fiber", "expected")
    if mismatch is not None:
        return "fail", {"stage": "fiber-triple-intersection", "patch": j, **mismatch}
    strata: list[tuple[str, Ideal, int]] = []
    for label, comp in labeled:
        strata.append((label, comp, n - 1))
    for (la, ca), (lb, cb) in (
        (labeled[0], labeled[1]),
        (labeled[0], labeled[2]),
        (labeled[1], labeled[2]),
    ):
        strata.append(
            (f"{la}+{lb}", Ideal(table, list(ca.gens) + list(cb.gens)), n - 2)
        )
    strata.append(
        (
            "+".join(label for label, _ in labeled),
            Ideal(table, list(comp1.gens) + [zj, qfac]),
            n - 3,
        )
    )
    for label, part, want in strata:
        d = dimension(part, budget)
        if d != want:
            return "fail", {
                "stage": "stratum-dimension",
                "patch": j,
                "stratum": label,
                "expected": want,
                "computed": d,
            }
        ok, wit = _smooth_verdict(part, len(table) - want, None, budget)
        if not ok:
            return "fail", {
                "stage": "stratum-smoothness",
                "patch": j,
                "stratum": label,
                **(wit or {}),
            }
    return "pass", None


def _blowup_identity_body(
    spec: ChartSpec,
    budget: GBBudget | None,
    chart_override: Ideal | None = None,
) -> tuple[str, dict | None]:
    """Hypersurface charts: the blow-up center is principal, blow-up = identity."""
    ideal = chart_override if chart_override is not None else build_simplified_chart(spec)
    u = ideal.table.var("u")
    sat = saturate(ideal, u, budget)
    mismatch = _equality_witness(sat, ideal, budget, "saturation", "chart")
    if mismatch is None:
        return "pass", None
    return "fail", {"stage": "principal-center-identity", **mismatch}


def check_blowup(
    spec: ChartSpec,
    j: int | None = None,
    budget: GBBudget | None = None,
    patch: Ideal | None = None,
    chart: Ideal | None = None,
) -> CheckOutcome:
    """Blow-up semi-stability for one patch (or the principal-center identity).

    For determinantal charts, validates patch ``j`` three ways: the patch
    ideal equals the saturation of the lifted chart plus links; it equals
    the saturated dehomogenization of the projective presentation; and its
    special fiber is a triple intersection of pairwise-distinct smooth
    components with smooth pairwise and triple strata of the expected
    dimensions.  Omitting ``j`` on a determinantal chart runs every patch
    and reports the first failure.  For hypersurface charts (``j`` must be
    omitted), verifies the blow-up is the identity because the center is
    principal and torsion-free.  ``patch`` and ``chart`` override the built
    ideals (file-supplied or perturbed charts).
    """
    instance = format_instance(spec)

    def body() -> tuple[str, dict | None]:
        if spec.kind == "simplified-B":
            if j is not None:
                raise ChartError("hypersurface charts take no patch index")
            return _blowup_identity_body(spec, budget, chart)
        return _blowup_patch_body(spec, j, budget, patch, chart)

    if j is None and spec.kind != "simplified-B":
        if patch is not None:
            raise ChartError("a patch override needs an explicit patch index j")
        return _blowup_aggregate(spec, budget, chart)
    return _guarded("blowup", instance, body)


def _blowup_aggregate(
    spec: ChartSpec,
    budget: GBBudget | None,
    chart: Ideal | None = None,
) -> CheckOutcome:
    """One outcome covering every patch index of a determinantal chart."""
    instance = format_instance(spec)
    started = time.perf_counter()
    if spec.kind == "simplified-B":
        return check_blowup(spec, None, budget, chart=chart)
    verdict = "pass"
    witness: dict | None = None
    for j in _tail_range(spec.n, spec.l):
        sub = check_blowup(spec, j, budget, chart=chart)
        if sub.verdict == "fail":
            verdict, witness = "fail", sub.witness
            break
        if sub.verdict == "budget-exceeded" and verdict == "pass":
            verdict, witness = "budget-exceeded", sub.witness
    return _outcome("blowup", instance, started, verdict, witness)


# ---------------------------------------------------------------------------
# The per-instance battery
# ---------------------------------------------------------------------------

def battery_for(spec: ChartSpec) -> tuple[str, ...]:
    """The ordered check ids run for an instance of this kind."""
    if spec.kind in ("blowup-patch", "rees-proj"):
        return ("valid", "flat")
    if spec.kind == "raw":
        return ("valid",)
    if spec.kind == "simplified-B":
        return ("valid", "flat", "components", "kottwitz-wedge", "raw-equiv", "blowup")
    if spec.kind == "simplified-A" or (spec.kind == "unified" and spec.i0 <= 2 * spec.l):
        return (
            "valid",
            "flat",
            "components",
            "smooth",
            "kottwitz-wedge",
            "raw-equiv",
            "blowup",
        )
    if spec.kind == "unified":
        # Unit position in the mirror block: the component decomposition and
        # the elimination routes are stated only for the other presentations.
        return ("valid", "flat", "kottwitz-wedge")
    raise ChartError(f"unknown chart kind: {spec.kind!r}")


def run_instance(
    spec: ChartSpec | str,
    budget: GBBudget | None = None,
    checks: Sequence[str] | None = None,
    chart: Ideal | None = None,
) -> list[CheckOutcome]:
    """Run the applicable checks for one instance, in deterministic order.

    ``spec`` may be a descriptor or an instance string.  An invalid
    descriptor yields the single failing ``valid`` outcome.  ``checks``
    optionally restricts to a subset of check ids (battery order is kept);
    failures never abort later checks.  ``chart`` substitutes a supplied
    ideal for the built chart in every check that consumes the chart ideal.
    """
    started = time.perf_counter()
    if isinstance(spec, str):
        text = spec
        try:
            spec = parse_instance(text)
        except ChartError as exc:
            return [_outcome("valid", text, started, "fail", {"error": str(exc)})]
    else:
        try:
            validate_spec(spec)
        except ChartError as exc:
            return [
                _outcome(
                    "valid", format_instance(spec), started, "fail",
                    {"error": str(exc)},
                )
            ]
    instance = format_instance(spec)
    wanted = battery_for(spec)
    if checks is not None:
        unknown = set(checks) - set(CHECK_IDS)
        if unknown:
            raise ValueError(f"unknown check ids: {sorted(unknown)}")
        wanted = tuple(c for c in wanted if c in set(checks))

    outcomes: list[CheckOutcome] = []
    built = chart

    def need_chart() -> Ideal:
        nonlocal built
        if built is None:
            built = build_chart(spec)
        return built

    for check_id in wanted:
        if check_id == "valid":
            t0 = time.perf_counter()
            try:
                need_chart()
            except ChartError as exc:
                outcomes.append(
                    _outcome("valid", instance, t0, "fail", {"error": str(exc)})
                )
                break
            outcomes.append(_outcome("valid", instance, t0, "pass", None))
        elif check_id == "flat":
            outcomes.append(check_flat(need_chart(), instance, budget))
        elif check_id == "components":
            if spec.kind == "simplified-B":
                outcomes.append(check_components_B(need_chart(), spec, budget))
            else:
                outcomes.append(check_components_A(need_chart(), spec, budget))
        elif check_id == "smooth":
            outcomes.append(check_singular_locus(spec, budget))
        elif check_id == "kottwitz-wedge":
            outcomes.append(check_kottwitz_wedge(spec, budget, ideal=chart))
        elif check_id == "raw-equiv":
            outcomes.append(check_raw_equiv(spec, budget, simplified=chart))
        elif check_id == "blowup":
            outcomes.append(_blowup_aggregate(spec, budget, chart=chart))
        else:  # pragma: no cover - battery_for only emits known ids
            raise AssertionError(f"unhandled check id {check_id!r}")
    return outcomes
