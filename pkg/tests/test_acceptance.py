"""Acceptance battery: one test per release criterion.

Each test is self-contained evidence for one criterion and prints a single
``CRITERION n: PASS`` line (visible with ``pytest -s``); the ``pytest -v``
row for each test is the canonical pass/fail line.  The expensive criteria
share one session fixture that runs ``verify all`` twice through the real
command-line entry point.
"""

from __future__ import annotations

import itertools
import json
import random
import re
import subprocess
import sys
import time
from pathlib import Path

import pytest

from splitmodels.charts import ChartSpec
from splitmodels.checks import (
    CHECK_IDS,
    check_blowup,
    check_flat,
    check_kottwitz_wedge,
    check_raw_equiv,
    check_smooth,
    run_instance,
)
from splitmodels.ideals import Ideal, dimension, groebner, parse_ideal
from splitmodels.poly import GREVLEX, LEX

from conftest import poly, table

GOLDEN = Path(__file__).parent / "golden"

A_INSTANCE = "n=5,l=1,i0=1,kind=simplified-A"
B_INSTANCE = "n=5,l=1,i0=3,kind=simplified-B"

INSTANCE_RE = re.compile(
    r"n=(\d+),l=(\d+),i0=(\d+),kind=([A-Za-z-]+)(?:,j=(\d+))?$"
)


def run_cli(*args: str, timeout: float = 3600.0) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "splitmodels", *args],
        capture_output=True,
        text=True,
        timeout=timeout,
    )


def fields(instance: str) -> tuple[int, int, int, str, int | None]:
    m = INSTANCE_RE.match(instance)
    assert m, instance
    n, l, i0, kind, j = m.groups()
    return int(n), int(l), int(i0), kind, (int(j) if j else None)


def rows(report: dict, check: str, levels: set[tuple[int, int]] | None = None):
    picked = []
    for row in report["outcomes"]:
        if row["check"] != check:
            continue
        n, l, *_ = fields(row["instance"])
        if levels is None or (n, l) in levels:
            picked.append(row)
    return picked


# ---------------------------------------------------------------------------
# Session fixture: two consecutive full verification runs via the CLI
# ---------------------------------------------------------------------------

@pytest.fixture(scope="session")
def verify_runs(tmp_path_factory):
    out_dir = tmp_path_factory.mktemp("acceptance")
    texts: list[str] = []
    codes: list[int] = []
    walls: list[float] = []
    for k in (1, 2):
        out = out_dir / f"run{k}.json"
        t0 = time.monotonic()
        proc = run_cli("verify", "all", "--out", str(out))
        walls.append(time.monotonic() - t0)
        codes.append(proc.returncode)
        assert out.exists(), proc.stderr
        texts.append(out.read_text())
    return {
        "texts": texts,
        "reports": [json.loads(t) for t in texts],
        "codes": codes,
        "walls": walls,
    }


# ---------------------------------------------------------------------------
# Criterion 1 — engine soundness oracles
# ---------------------------------------------------------------------------

def _brute_force_dimension(i: Ideal) -> int:
    lead = [g.leading_monomial(GREVLEX) for g in groebner(i)]
    names = list(i.table.names)
    for size in range(len(names), -1, -1):
        for subset in itertools.combinations(range(len(names)), size):
            inside = set(subset)
            if all(
                any(e > 0 and k not in inside for k, e in enumerate(m))
                for m in lead
            ):
                return size
    return 0


def test_criterion_1_engine_soundness():
    t0 = time.monotonic()

    # Known reduced lexicographic basis of the twisted cubic.
    tab = table("x", "y", "z")
    cubic = Ideal(tab, [poly(tab, "y - x^2"), poly(tab, "z - x^3")])
    lex_basis = [g.to_text(LEX) for g in groebner(cubic, LEX)]
    assert lex_basis == ["x^2 - y", "x*y - z", "x*z - y^2", "y^3 - z^2"]

    # Reduced bases are canonical: invariant under generator shuffling and
    # rescaling, in both supported orders.
    rng = random.Random(101)
    for gens in (
        ["y - x^2", "z - x^3"],
        ["x*y - 1", "y^2 - x", "x^2 + y^2 + z^2 - 1"],
    ):
        base = [poly(tab, t) for t in gens]
        ref = {
            order: [g.to_text(order) for g in groebner(Ideal(tab, base), order)]
            for order in (GREVLEX, LEX)
        }
        for _ in range(50):
            shuffled = list(base)
            rng.shuffle(shuffled)
            scaled = [
                g * tab.const(rng.choice([1, -1, 2, 3, -5, 7])) for g in shuffled
            ]
            for order in (GREVLEX, LEX):
                got = [
                    g.to_text(order)
                    for g in groebner(Ideal(tab, scaled), order)
                ]
                assert got == ref[order]

    # Krull dimension agrees with exhaustive independent-set search in rings
    # of up to 12 variables.
    names12 = list("abcdefghijk")  # 11 letters + the uniformizer = 12 vars
    tab12 = table(*names12)
    assert len(tab12) == 12
    cases = 0
    for _ in range(30):
        gens = []
        for _ in range(rng.randint(1, 5)):
            m = tab12.one()
            for nm in rng.sample(names12, rng.randint(1, 3)):
                for _ in range(rng.randint(1, 2)):
                    m = m * tab12.var(nm)
            gens.append(m)
        i = Ideal(tab12, gens)
        assert dimension(i) == _brute_force_dimension(i)
        cases += 1
    tab4 = table("a", "b", "c")
    for _ in range(20):
        gens = []
        for _ in range(2):
            terms = [tab4.one(), tab4.one()]
            for t in range(2):
                for nm in rng.sample(["a", "b", "c"], rng.randint(1, 2)):
                    terms[t] = terms[t] * tab4.var(nm)
            gens.append(terms[0] - terms[1] * tab4.const(rng.choice([1, 2])))
        gens = [g for g in gens if not g.is_zero]
        if not gens:
            continue
        i = Ideal(tab4, gens)
        assert dimension(i) == _brute_force_dimension(i)
        cases += 1

    elapsed = time.monotonic() - t0
    assert elapsed < 10.0, f"engine oracle suite took {elapsed:.1f}s (limit 10s)"
    print(
        f"CRITERION 1: PASS — twisted-cubic lex basis exact, reduced-basis "
        f"uniqueness over 50 shuffles x 2 ideals x 2 orders, dimension matches "
        f"brute force on {cases} ideals (<=12 vars), {elapsed:.2f}s < 10s"
    )


# ---------------------------------------------------------------------------
# Criterion 2 — raw/simplified chart equivalence at n=5, l=1
# ---------------------------------------------------------------------------

def test_criterion_2_raw_chart_equivalence():
    times = []
    for i0 in range(1, 6):
        kind = "simplified-A" if i0 <= 2 else "simplified-B"
        spec = ChartSpec(5, 1, i0, kind)
        t0 = time.monotonic()
        o = check_raw_equiv(spec)
        wall = time.monotonic() - t0
        assert o.verdict == "pass", (i0, o.verdict, o.witness)
        assert wall < 60.0, f"i0={i0} took {wall:.1f}s (limit 60s)"
        times.append(wall)
    print(
        "CRITERION 2: PASS — raw chart eliminates to the simplified chart for "
        "every i0 in 1..5 at n=5, l=1; per-index times "
        + ", ".join(f"{t:.1f}s" for t in times)
        + " (limit 60s each)"
    )


# ---------------------------------------------------------------------------
# Criterion 3 — flatness across the whole registry
# ---------------------------------------------------------------------------

def test_criterion_3_flatness_registry_wide(verify_runs):
    report = verify_runs["reports"][0]
    flat = rows(report, "flat")
    valid = rows(report, "valid")
    assert len(flat) == len(valid) == 118

    kinds_seen = set()
    patch_groups: dict[tuple[int, int, int], set[int]] = {}
    for row in flat:
        n, l, i0, kind, j = fields(row["instance"])
        kinds_seen.add(kind)
        if kind == "blowup-patch":
            patch_groups.setdefault((n, l, i0), set()).add(j)
        if row["verdict"] == "budget-exceeded":
            assert (n, l) == (8, 2), (
                f"budget exhaustion on flatness is tolerated only at n=8, l=2; "
                f"got {row['instance']}"
            )
            continue
        assert row["verdict"] == "pass", (row["instance"], row["witness"])
        assert row["elapsed_s"] < 300.0, (row["instance"], row["elapsed_s"])

    assert kinds_seen == {"simplified-A", "simplified-B", "unified", "blowup-patch"}
    for (n, l, i0), js in patch_groups.items():
        assert js == set(range(2 * l + 1, n + 1)), (n, l, i0, sorted(js))

    exceeded = [r for r in flat if r["verdict"] == "budget-exceeded"]
    print(
        f"CRITERION 3: PASS — saturation by the uniformizer fixes all "
        f"{len(flat)} registry chart ideals (kinds: simplified-A, simplified-B, "
        f"unified, blowup-patch with full patch ranges); "
        f"{len(exceeded)} budget concessions used (n=8, l=2 allowance unneeded); "
        f"max per-instance time "
        f"{max(r['elapsed_s'] for r in flat):.1f}s"
    )


# ---------------------------------------------------------------------------
# Criterion 4 — special-fiber decomposition and the pinned singular locus
# ---------------------------------------------------------------------------

def test_criterion_4_special_fiber_components(verify_runs):
    report = verify_runs["reports"][0]
    levels = {(5, 1), (6, 1), (7, 1), (7, 2)}
    comp = rows(report, "components", levels)
    assert len(comp) == 35  # 7 + 8 + 9 + 11 across the four levels
    for row in comp:
        assert row["verdict"] == "pass", (row["instance"], row["witness"])

    smooth = rows(report, "smooth", {(5, 1), (6, 1)})
    assert len(smooth) == 8
    for row in smooth:
        assert row["verdict"] == "pass", (row["instance"], row["witness"])

    print(
        "CRITERION 4: PASS — special fiber matches the expected component "
        "intersection (three components on determinantal charts, two on "
        "hypersurface charts, every component of dimension n-1) on all 35 "
        "instances over (5,1), (6,1), (7,1), (7,2); the quadric component's "
        "singular locus is pinned exactly at (5,1) and (6,1) (8 instances)"
    )


# ---------------------------------------------------------------------------
# Criterion 5 — Kottwitz and wedge conditions
# ---------------------------------------------------------------------------

def test_criterion_5_kottwitz_wedge(verify_runs):
    report = verify_runs["reports"][0]
    for n, l in ((5, 1), (6, 1)):
        picked = rows(report, "kottwitz-wedge", {(n, l)})
        i0_seen = set()
        for row in picked:
            _, _, i0, _, _ = fields(row["instance"])
            i0_seen.add(i0)
            assert row["verdict"] == "pass", (row["instance"], row["witness"])
        assert i0_seen == set(range(1, n + 1)), (n, l, sorted(i0_seen))
    print(
        "CRITERION 5: PASS — characteristic-polynomial, determinant, and "
        "wedge-power membership hold on every chart at (5,1) for i0=1..5 and "
        "(6,1) for i0=1..6"
    )


# ---------------------------------------------------------------------------
# Criterion 6 — blow-up semi-stability
# ---------------------------------------------------------------------------

def test_criterion_6_blowup_semistability(verify_runs):
    report = verify_runs["reports"][0]
    picked = rows(report, "blowup", {(5, 1), (6, 1)})
    assert len(picked) == 15  # 7 at (5,1) + 8 at (6,1)
    kinds = set()
    for row in picked:
        kinds.add(fields(row["instance"])[3])
        assert row["verdict"] == "pass", (row["instance"], row["witness"])
    assert "simplified-B" in kinds  # principal-center identity exercised

    total = sum(row["elapsed_s"] for row in picked)
    assert total < 600.0, f"blow-up checks took {total:.1f}s (limit 600s)"

    # The aggregate rows above cover every tail patch; per-patch calls also
    # pass through the public single-patch interface.
    for j in (3, 4, 5):
        o = check_blowup(ChartSpec(5, 1, 1, "simplified-A"), j=j)
        assert o.verdict == "pass", (j, o.witness)

    print(
        f"CRITERION 6: PASS — Rees-algebra oracle, patch presentations, "
        f"dehomogenizations, and three-part semi-stable patch fibers agree on "
        f"every tail patch over (5,1) and (6,1) ({len(picked)} aggregate rows "
        f"incl. the principal-center identity), {total:.1f}s total < 600s"
    )


# ---------------------------------------------------------------------------
# Criterion 7 — sabotage detection and the exit-code contract
# ---------------------------------------------------------------------------

A_CHART_TEXT = """ring v1 v2 v3 v4 v5 z3 z4 z5 pi
v1 - 1
v3*z4 - v4*z5
v3*z3 - v5*z5
v4*z3 - v5*z4
v3*z3 + v4*z4 + v5*z5 - 2*pi
"""
A_CHART_MISSING_TRACE = "\n".join(A_CHART_TEXT.splitlines()[:-1]) + "\n"
B_CHART_UNIT_SCALED = (
    "ring v1 v2 v3 v4 v5 u pi\nv3 - 1\nv4^2*u^2 + 2*v3*v5*u^2 - 2*pi*u\n"
)


def test_criterion_7_sabotage_and_exit_codes(tmp_path):
    a_spec = ChartSpec(5, 1, 1, "simplified-A")
    b_spec = ChartSpec(5, 1, 3, "simplified-B")

    # Every check identifier must fail, with a witness, on its designated
    # perturbed fixture.
    failures = {}

    bad_level = run_instance("n=6,l=2,i0=1,kind=simplified-A")
    failures["valid"] = bad_level[0]

    failures["flat"] = check_flat(
        parse_ideal("ring x y pi\npi*x\n"), "fixture"
    )

    failures["components"] = run_instance(
        a_spec, checks=("components",), chart=parse_ideal(A_CHART_MISSING_TRACE)
    )[0]

    failures["smooth"] = check_smooth(
        parse_ideal("ring x y z pi\nx*y - z^2\n"), 1, None, "fixture"
    )

    failures["kottwitz-wedge"] = check_kottwitz_wedge(
        a_spec, ideal=parse_ideal(A_CHART_MISSING_TRACE)
    )

    failures["raw-equiv"] = check_raw_equiv(
        a_spec, simplified=parse_ideal(A_CHART_TEXT + "v2\n")
    )

    failures["blowup"] = check_blowup(
        b_spec, chart=parse_ideal(B_CHART_UNIT_SCALED)
    )

    assert set(failures) == set(CHECK_IDS)
    for check_id, outcome in failures.items():
        assert outcome.verdict == "fail", (check_id, outcome.verdict)
        assert outcome.witness, check_id

    # Exit-code contract through the real CLI: pass, fail, usage, budget.
    assert run_cli("verify", B_INSTANCE).returncode == 0

    sabotaged = tmp_path / "sabotaged.txt"
    sabotaged.write_text(A_CHART_MISSING_TRACE)
    assert (
        run_cli(
            "verify",
            A_INSTANCE,
            "--checks",
            "components",
            "--chart-file",
            str(sabotaged),
        ).returncode
        == 1
    )

    assert run_cli("verify", "utter nonsense").returncode == 2

    assert (
        run_cli(
            "verify", A_INSTANCE, "--checks", "flat", "--budget", "1"
        ).returncode
        == 3
    )

    print(
        "CRITERION 7: PASS — all 7 checks fail with a witness on their "
        "perturbed fixtures; CLI exit codes 0 (pass), 1 (fail), 2 (usage), "
        "3 (budget) observed end to end"
    )


# ---------------------------------------------------------------------------
# Criterion 8 — determinism of consecutive full runs
# ---------------------------------------------------------------------------

def test_criterion_8_consecutive_runs_identical(verify_runs):
    code1, code2 = verify_runs["codes"]
    assert code1 == code2, (code1, code2)
    assert code1 in (0, 3)

    zeroed = [
        re.sub(r'"elapsed_s": [0-9.eE+-]+', '"elapsed_s": 0', text)
        for text in verify_runs["texts"]
    ]
    assert zeroed[0] == zeroed[1], "reports differ beyond timing fields"

    for report in verify_runs["reports"]:
        assert report["summary"]["fail"] == 0

    wall1, wall2 = verify_runs["walls"]
    print(
        f"CRITERION 8: PASS — two consecutive full verification runs are "
        f"byte-identical after zeroing per-row timings (exit {code1} both, "
        f"walls {wall1:.0f}s / {wall2:.0f}s, 0 failures in "
        f"{report['summary']['total']} rows)"
    )
