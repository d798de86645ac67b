"""Chart construction: instances, constants, generator emission, blow-ups."""

from __future__ import annotations

import pytest

from splitmodels.charts import (
    ChartError,
    ChartSpec,
    MatrixExpr,
    bridge_table,
    build_blowup_patch,
    build_chart,
    build_constants,
    build_parametrization,
    build_raw_chart,
    build_rees_presentation,
    build_simplified_chart,
    char_poly,
    chart_table,
    eval_poly_coeffs,
    format_instance,
    is_strongly_non_special,
    jacobian_matrix,
    mat_det,
    parse_instance,
    patch_core_factor,
    unit_antidiagonal,
    skew_unit_block,
    validate_spec,
)
from splitmodels.ideals import Ideal, member, serialize_ideal
from splitmodels.poly import VarTable

from conftest import poly, table


def gen_texts(ideal: Ideal) -> list[str]:
    return [g.to_text() for g in ideal.gens]


# ---------------------------------------------------------------------------
# Instance descriptors
# ---------------------------------------------------------------------------

def test_instance_round_trip():
    for text in (
        "n=5,l=1,i0=1,kind=simplified-A",
        "n=7,l=2,i0=6,kind=simplified-B",
        "n=6,l=1,i0=3,kind=unified",
        "n=5,l=1,i0=2,kind=blowup-patch,j=4",
        "n=8,l=2,i0=1,kind=rees-proj",
        "n=5,l=1,i0=1,kind=raw",
    ):
        assert format_instance(parse_instance(text)) == text


@pytest.mark.parametrize(
    "bad, message",
    [
        ("", "malformed"),
        ("n=5,l=1,i0=1", "missing"),
        ("n=5,l=1,i0=1,kind=simplified-A,n=5", "duplicate"),
        ("n=5,l=1,i0=1,kind=nope", "kind"),
        ("n=five,l=1,i0=1,kind=raw", "integer"),
        ("garbage", "malformed"),
        ("n=5,l=1,i0=1,kind=simplified-A,extra=1", "unknown"),
    ],
)
def test_instance_parse_rejects_malformed(bad, message):
    with pytest.raises(ChartError, match=message):
        parse_instance(bad)


def test_level_index_classification():
    # Valid families used throughout.
    for n, l in ((5, 1), (6, 1), (7, 1), (7, 2), (8, 2), (9, 2), (9, 3)):
        assert is_strongly_non_special(n, l), (n, l)
    # Degenerate or excluded levels.
    for n, l in (
        (5, 0),
        (5, 2),
        (6, 0),
        (6, 2),
        (6, 3),
        (7, 0),
        (7, 3),
        (8, 0),
        (8, 3),
        (8, 4),
        (9, 4),
        (3, 1),
        (4, 1),
        (5, 3),
    ):
        assert not is_strongly_non_special(n, l), (n, l)


def test_validate_rejects_bad_specs():
    with pytest.raises(ChartError, match="not strongly non-special"):
        validate_spec(ChartSpec(6, 2, 1, "simplified-A"))
    with pytest.raises(ChartError, match="i0"):
        validate_spec(ChartSpec(5, 1, 0, "simplified-A"))
    with pytest.raises(ChartError, match="i0"):
        validate_spec(ChartSpec(5, 1, 6, "unified"))
    # Determinantal kind requires a low unit index, hypersurface a high one.
    with pytest.raises(ChartError, match="simplified-A"):
        validate_spec(ChartSpec(5, 1, 3, "simplified-A"))
    with pytest.raises(ChartError, match="simplified-B"):
        validate_spec(ChartSpec(5, 1, 2, "simplified-B"))
    # Blow-up kinds: low unit index only, and a patch index in the tail.
    with pytest.raises(ChartError, match="i0"):
        validate_spec(ChartSpec(5, 1, 3, "blowup-patch", j=3))
    with pytest.raises(ChartError, match="j"):
        validate_spec(ChartSpec(5, 1, 1, "blowup-patch"))
    with pytest.raises(ChartError, match="j"):
        validate_spec(ChartSpec(5, 1, 1, "blowup-patch", j=2))
    with pytest.raises(ChartError, match="j"):
        validate_spec(ChartSpec(5, 1, 1, "blowup-patch", j=6))
    with pytest.raises(ChartError, match="j"):
        validate_spec(ChartSpec(5, 1, 1, "simplified-A", j=3))


# ---------------------------------------------------------------------------
# Ring layouts
# ---------------------------------------------------------------------------

def test_chart_ring_layouts():
    assert list(chart_table(ChartSpec(5, 1, 1, "simplified-A")).names) == [
        "v1", "v2", "v3", "v4", "v5", "z3", "z4", "z5", "pi",
    ]
    assert list(chart_table(ChartSpec(5, 1, 3, "simplified-B")).names) == [
        "v1", "v2", "v3", "v4", "v5", "u", "pi",
    ]
    assert list(chart_table(ChartSpec(5, 1, 1, "blowup-patch", j=3)).names) == [
        "v1", "v2", "v3", "v4", "v5", "z3", "z4", "z5", "t3", "t4", "t5", "pi",
    ]
    raw_names = list(chart_table(ChartSpec(5, 1, 1, "raw")).names)
    assert raw_names[:10] == [
        "v1", "v2", "v3", "v4", "v5", "z3", "z4", "z5", "z1", "z2",
    ]
    assert raw_names[-1] == "pi"
    assert raw_names.count("pi") == 1
    assert "x11" in raw_names and "y55" in raw_names
    # The bridge ring holds chart and raw variables side by side.
    bridge = bridge_table(ChartSpec(5, 1, 3, "simplified-B"))
    assert "u" in bridge.names and "x11" in bridge.names
    assert "u" not in bridge_table(ChartSpec(5, 1, 1, "simplified-A")).names


# ---------------------------------------------------------------------------
# Structural constants
# ---------------------------------------------------------------------------

def test_constant_matrices_satisfy_defining_identities():
    consts = build_constants(5, 1)
    J = consts["skew_block"]
    H = consts["antidiagonal"]
    I2 = MatrixExpr.identity(J.table, 2)
    I3 = MatrixExpr.identity(H.table, 3)
    assert (J * J + I2).is_zero()
    assert (H * H - I3).is_zero()
    assert (J.transpose() + J).is_zero()
    assert (H.transpose() - H).is_zero()


def test_lattice_frames_and_pairing():
    consts = build_constants(5, 1)
    low = consts["lattice_frame_low"]
    high = consts["lattice_frame_high"]
    pairing = consts["pairing"]
    mult = consts["mult_by_t"]
    # Scaled identity blocks sit on the prescribed diagonals.
    for r, c in ((2, 7), (3, 8), (4, 9)):
        assert low.entries[r][c].to_text() == "pi^2"
    for r, c in ((0, 5), (1, 6)):
        assert high.entries[r][c].to_text() == "pi^2"
    assert low.entries[0][0].to_text() == "1"
    assert low.entries[2][9].to_text() == "0"
    # The pairing is unimodular; multiplication by t has determinant pi^(2n).
    assert mat_det(pairing).to_text() == "1"
    assert mat_det(mult).to_text() == "-pi^10"


def test_antidiagonal_and_skew_block_shapes():
    tab = table("x")
    H = unit_antidiagonal(tab, 3)
    assert [[e.to_text() for e in row] for row in H.entries] == [
        ["0", "0", "1"],
        ["0", "1", "0"],
        ["1", "0", "0"],
    ]
    J = skew_unit_block(tab, 1)
    assert [[e.to_text() for e in row] for row in J.entries] == [
        ["0", "1"],
        ["-1", "0"],
    ]


# ---------------------------------------------------------------------------
# Matrix expressions
# ---------------------------------------------------------------------------

def test_wedge_power_enumerates_minors_row_major():
    tab = table("a", "b", "c", "d", "e", "f")
    m = MatrixExpr(
        tab,
        [
            [tab.var("a"), tab.var("b")],
            [tab.var("c"), tab.var("d")],
            [tab.var("e"), tab.var("f")],
        ],
    )
    minors = [p.to_text() for p in m.wedge2().entries_flat()]
    assert minors == ["-b*c + a*d", "-b*e + a*f", "-d*e + c*f"]


def test_wedge_power_of_outer_product_vanishes():
    tab = table("v1", "v2", "v3", "z1", "z2", "z3")
    col = MatrixExpr(tab, [[tab.var(f"v{i}")] for i in (1, 2, 3)])
    row = MatrixExpr(tab, [[tab.var(f"z{i}") for i in (1, 2, 3)]])
    assert (col * row).wedge2().is_zero()


def test_characteristic_polynomial_examples():
    tab = table("a", "b", "c", "d")
    zero2 = MatrixExpr.zeros(tab, 2, 2)
    assert [p.to_text() for p in char_poly(zero2)] == ["0", "0", "1"]
    piI = MatrixExpr.identity(tab, 2, tab.var("pi"))
    assert [p.to_text() for p in char_poly(piI)] == ["pi^2", "-2*pi", "1"]
    generic = MatrixExpr(
        tab,
        [[tab.var("a"), tab.var("b")], [tab.var("c"), tab.var("d")]],
    )
    coeffs = char_poly(generic)
    assert coeffs[2].to_text() == "1"
    assert coeffs[1].to_text() == "-a - d"
    assert coeffs[0].to_text() == "-b*c + a*d"
    # Constant coefficient recovers the determinant with the dimension sign.
    assert mat_det(generic) == coeffs[0]


def test_eval_poly_coeffs_is_horner():
    tab = table("x")
    coeffs = [poly(tab, "1"), poly(tab, "2"), poly(tab, "3")]
    at = tab.var("x")
    assert eval_poly_coeffs(coeffs, at).to_text() == "3*x^2 + 2*x + 1"


def test_jacobian_matrix_rows_are_generators():
    tab = table("x", "y")
    gens = [poly(tab, "x^2 + y"), poly(tab, "x*y")]
    jac = jacobian_matrix(gens, tab)
    assert [[e.to_text() for e in row] for row in jac.entries] == [
        ["2*x", "1", "0"],
        ["y", "x", "0"],
    ]


# ---------------------------------------------------------------------------
# Chart generator emission (frozen against worked instances)
# ---------------------------------------------------------------------------

def test_determinantal_chart_generators_frozen():
    chart = build_simplified_chart(ChartSpec(5, 1, 1, "simplified-A"))
    assert gen_texts(chart) == [
        "v1 - 1",
        "v3*z4 - v4*z5",
        "v3*z3 - v5*z5",
        "v4*z3 - v5*z4",
        "v3*z3 + v4*z4 + v5*z5 - 2*pi",
    ]


def test_hypersurface_chart_generators_frozen():
    chart = build_simplified_chart(ChartSpec(5, 1, 3, "simplified-B"))
    assert gen_texts(chart) == [
        "v3 - 1",
        "v4^2*u + 2*v3*v5*u - 2*pi",
    ]


def test_unified_chart_matches_determinantal_presentation():
    a = build_simplified_chart(ChartSpec(5, 1, 1, "simplified-A"))
    u = build_simplified_chart(ChartSpec(5, 1, 1, "unified"))
    assert gen_texts(a) == gen_texts(u)


def test_blowup_patch_generators_frozen():
    patch = build_blowup_patch(ChartSpec(5, 1, 1, "blowup-patch", j=3))
    assert gen_texts(patch) == [
        "v1 - 1",
        "t3 - 1",
        "-z3*t4 + z4",
        "-z3*t5 + z5",
        "-v5*t5 + v3",
        "-v5*t4 + v4",
        "v5*z3*t4^2 + 2*v5*z3*t5 - 2*pi",
    ]


def test_patch_core_factor_examples():
    assert (
        patch_core_factor(ChartSpec(5, 1, 1, "blowup-patch", j=3)).to_text()
        == "t4^2 + 2*t5"
    )
    # The central patch of an odd tail picks up a constant term.
    assert (
        patch_core_factor(ChartSpec(5, 1, 1, "blowup-patch", j=4)).to_text()
        == "2*t3*t5 + 1"
    )


def test_rees_presentation_frozen():
    rees = build_rees_presentation(ChartSpec(5, 1, 1, "rees-proj"))
    texts = gen_texts(rees)
    assert texts[:5] == [
        "v1 - 1",
        "v3*z4 - v4*z5",
        "v3*z3 - v5*z5",
        "v4*z3 - v5*z4",
        "v3*z3 + v4*z4 + v5*z5 - 2*pi",
    ]
    assert texts[5:8] == ["-z4*t3 + z3*t4", "-z5*t3 + z3*t5", "-z5*t4 + z4*t5"]
    assert texts[8:] == ["v3*t4 - v4*t5", "v3*t3 - v5*t5", "v4*t3 - v5*t4"]


def test_build_chart_dispatches_by_kind():
    for text in (
        "n=5,l=1,i0=1,kind=simplified-A",
        "n=5,l=1,i0=3,kind=simplified-B",
        "n=5,l=1,i0=1,kind=unified",
        "n=5,l=1,i0=1,kind=blowup-patch,j=3",
        "n=5,l=1,i0=1,kind=rees-proj",
        "n=5,l=1,i0=1,kind=raw",
    ):
        spec = parse_instance(text)
        built = build_chart(spec)
        assert built.table is chart_table(spec) or list(built.table.names) == list(
            chart_table(spec).names
        )
        assert built.gens


def test_emission_is_deterministic():
    for text in (
        "n=6,l=1,i0=2,kind=simplified-A",
        "n=7,l=2,i0=6,kind=simplified-B",
        "n=6,l=1,i0=1,kind=blowup-patch,j=5",
        "n=6,l=1,i0=1,kind=rees-proj",
        "n=5,l=1,i0=2,kind=raw",
    ):
        spec = parse_instance(text)
        assert serialize_ideal(build_chart(spec)) == serialize_ideal(
            build_chart(spec)
        )


def test_raw_chart_shape():
    raw = build_raw_chart(ChartSpec(5, 1, 1, "raw"))
    texts = gen_texts(raw)
    # Unit normalization is the last generator.
    assert texts[-1] == "v1 - 1"
    # The rank-one block and trace lead the list.
    assert texts[0] == "-v1*z1 + y11 + pi"
    assert "v3*z3 + v4*z4 + v5*z5 + v1*z1 + v2*z2 - 2*pi" in texts


# ---------------------------------------------------------------------------
# Parametrization of the eliminated variables
# ---------------------------------------------------------------------------

def test_parametrization_frozen_low_block():
    param = build_parametrization(ChartSpec(5, 1, 1, "simplified-A"))
    assert param["z1"].to_text() == "-1/2*v2*z4^2 - v2*z3*z5"
    assert param["z2"].to_text() == "1/2*v1*z4^2 + v1*z3*z5"


def test_parametrization_images_satisfy_raw_relations():
    for text in (
        "n=5,l=1,i0=1,kind=simplified-A",
        "n=5,l=1,i0=2,kind=simplified-A",
        "n=5,l=1,i0=3,kind=simplified-B",
        "n=5,l=1,i0=5,kind=simplified-B",
        "n=6,l=1,i0=1,kind=simplified-A",
        "n=6,l=1,i0=4,kind=simplified-B",
        "n=7,l=2,i0=1,kind=simplified-A",
        "n=7,l=2,i0=7,kind=simplified-B",
        "n=8,l=2,i0=2,kind=simplified-A",
        "n=8,l=2,i0=6,kind=simplified-B",
    ):
        spec = parse_instance(text)
        chart = build_simplified_chart(spec)
        bridge = bridge_table(spec)
        assignment = {
            name: value.cast_to(bridge)
            for name, value in build_parametrization(spec).items()
        }
        raw = build_raw_chart(ChartSpec(spec.n, spec.l, spec.i0, "raw"))
        for g in raw.gens:
            image = g.cast_to(bridge).substitute(assignment)
            if image.is_zero:
                continue
            assert member(image.cast_to(chart.table), chart), (text, g.to_text())
