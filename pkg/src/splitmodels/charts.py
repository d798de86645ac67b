"""Parametric construction of the chart ideals and their matrix identities.

Given the discrete data (n, l, i0) — lattice rank, level index, and the
position of the distinguished unit coordinate — this module builds, as exact
polynomial data:

- the raw affine chart ideal in the full matrix variables (x_ij, y_ij, the
  two coordinate vectors, and the uniformizer pi),
- the simplified chart ideals (the determinantal presentation for
  i0 <= 2l, the two-generator hypersurface presentation for i0 > 2l, and the
  unified determinantal presentation valid for every i0),
- the substitution that realizes the simplification (eliminating the matrix
  variables and the first block of z-variables),
- the blow-up patch ideals and the homogeneous presentation of the blow-up
  as minor families over the chart ring,
- the constant structure matrices and characteristic polynomials used by the
  verification checks.

Everything is a pure function of the instance descriptor, and generator
emission order is fixed, so serialized output is byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .ideals import Ideal
from .poly import Polynomial, Rat, RingMismatchError, VarTable

__all__ = [
    "ChartError",
    "ChartSpec",
    "KINDS",
    "is_strongly_non_special",
    "validate_spec",
    "parse_instance",
    "format_instance",
    "MatrixExpr",
    "col_vector",
    "unit_antidiagonal",
    "skew_unit_block",
    "build_constants",
    "chart_table",
    "bridge_table",
    "build_raw_chart",
    "build_simplified_chart",
    "build_chart",
    "build_parametrization",
    "parametrized_matrices",
    "build_blowup_patch",
    "patch_core_factor",
    "build_rees_presentation",
    "char_poly",
    "eval_poly_coeffs",
    "mat_det",
    "jacobian_matrix",
]


class ChartError(ValueError):
    """An instance descriptor that names no valid chart."""


KINDS = (
    "raw",
    "simplified-A",
    "simplified-B",
    "unified",
    "blowup-patch",
    "rees-proj",
)


@dataclass(frozen=True)
class ChartSpec:
    """Discrete instance data selecting one chart.

    ``n`` is the lattice rank, ``l`` the level index (valid only when
    strongly non-special), ``i0`` the coordinate normalized to 1, ``kind``
    the presentation, and ``j`` the patch index for blow-up patches.
    """

    n: int
    l: int
    i0: int
    kind: str
    j: int | None = None


def is_strongly_non_special(n: int, l: int) -> bool:
    """Whether the level index ``l`` is strongly non-special for rank ``n``.

    Even n = 2m excludes l in {0, m-1, m}; odd n = 2m+1 excludes l in
    {0, m}.  Indices outside 0 <= l <= n/2 are never valid.
    """
    if n <= 3 or l < 0 or 2 * l > n:
        return False
    m = n // 2
    if n % 2 == 0:
        return l not in (0, m - 1, m)
    return l not in (0, m)


def validate_spec(spec: ChartSpec) -> None:
    """Raise ``ChartError`` unless the descriptor names a buildable chart."""
    n, l, i0, kind = spec.n, spec.l, spec.i0, spec.kind
    if kind not in KINDS:
        raise ChartError(f"unknown chart kind: {kind!r}")
    if not isinstance(n, int) or not isinstance(l, int) or not isinstance(i0, int):
        raise ChartError("n, l, i0 must be integers")
    if not is_strongly_non_special(n, l):
        raise ChartError("not strongly non-special")
    if not 1 <= i0 <= n:
        raise ChartError(f"i0 must be between 1 and n={n}")
    if kind == "simplified-A" and i0 > 2 * l:
        raise ChartError("kind simplified-A requires i0 <= 2*l")
    if kind == "simplified-B" and i0 <= 2 * l:
        raise ChartError("kind simplified-B requires i0 > 2*l")
    if kind in ("blowup-patch", "rees-proj") and i0 > 2 * l:
        raise ChartError(f"kind {kind} requires i0 <= 2*l")
    if kind == "blowup-patch":
        if spec.j is None:
            raise ChartError("kind blowup-patch requires a patch index j")
        if not 2 * l + 1 <= spec.j <= n:
            raise ChartError(f"patch index j must be between {2 * l + 1} and {n}")
    elif spec.j is not None:
        raise ChartError(f"kind {kind} takes no patch index j")


def format_instance(spec: ChartSpec) -> str:
    base = f"n={spec.n},l={spec.l},i0={spec.i0},kind={spec.kind}"
    if spec.j is not None:
        base += f",j={spec.j}"
    return base


def parse_instance(text: str) -> ChartSpec:
    """Parse an instance string like ``n=5,l=1,i0=1,kind=simplified-A``.

    Raises ``ChartError`` on malformed strings or descriptors that fail
    validation (including "not strongly non-special").
    """
    fields: dict[str, str] = {}
    for part in text.strip().split(","):
        if "=" not in part:
            raise ChartError(f"malformed instance field: {part!r}")
        key, _, value = part.partition("=")
        key = key.strip()
        value = value.strip()
        if key in fields:
            raise ChartError(f"duplicate instance field: {key!r}")
        fields[key] = value
    required = {"n", "l", "i0", "kind"}
    missing = required - fields.keys()
    if missing:
        raise ChartError(f"instance string missing fields: {sorted(missing)}")
    extra = fields.keys() - (required | {"j"})
    if extra:
        raise ChartError(f"unknown instance fields: {sorted(extra)}")

    def as_int(key: str) -> int:
        try:
            return int(fields[key])
        except ValueError:
            raise ChartError(f"field {key} must be an integer") from None

    spec = ChartSpec(
        n=as_int("n"),
        l=as_int("l"),
        i0=as_int("i0"),
        kind=fields["kind"],
        j=as_int("j") if "j" in fields else None,
    )
    validate_spec(spec)
    return spec


# ---------------------------------------------------------------------------
# Matrices of polynomials
# ---------------------------------------------------------------------------

class MatrixExpr:
    """A rectangular matrix of polynomials over one ring.

    Supports the operations the chart constructions need: sum, difference,
    product, transpose, scalar multiple, block assembly, and the second
    exterior power (all 2x2 minors, row-major pair order).
    """

    __slots__ = ("table", "rows", "cols", "entries")

    def __init__(self, table: VarTable, entries: Sequence[Sequence[Polynomial]]):
        entries = tuple(tuple(row) for row in entries)
        if not entries or not entries[0]:
            raise ValueError("matrices must be non-empty")
        cols = len(entries[0])
        for row in entries:
            if len(row) != cols:
                raise ValueError("ragged matrix rows")
            for e in row:
                if not isinstance(e, Polynomial) or e.table != table:
                    raise RingMismatchError("ring mismatch in matrix entry")
        self.table = table
        self.rows = len(entries)
        self.cols = cols
        self.entries = entries

    # -- constructors ---------------------------------------------------------
    @classmethod
    def zeros(cls, table: VarTable, rows: int, cols: int) -> "MatrixExpr":
        zero = table.zero()
        return cls(table, [[zero] * cols for _ in range(rows)])

    @classmethod
    def identity(
        cls, table: VarTable, size: int, scale: "Polynomial | Rat" = 1
    ) -> "MatrixExpr":
        if isinstance(scale, (int, Fraction)):
            scale = table.const(scale)
        zero = table.zero()
        return cls(
            table,
            [
                [scale if i == j else zero for j in range(size)]
                for i in range(size)
            ],
        )

    @classmethod
    def block(
        cls, blocks: Sequence[Sequence["MatrixExpr"]]
    ) -> "MatrixExpr":
        """Assemble a matrix from a 2-D grid of conforming blocks."""
        table = blocks[0][0].table
        rows: list[list[Polynomial]] = []
        for brow in blocks:
            height = brow[0].rows
            for b in brow:
                if b.rows != height:
                    raise ValueError("block row heights disagree")
            for r in range(height):
                row: list[Polynomial] = []
                for b in brow:
                    row.extend(b.entries[r])
                rows.append(row)
        width = len(rows[0])
        for row in rows:
            if len(row) != width:
                raise ValueError("block column widths disagree")
        return cls(table, rows)

    # -- basic protocol ---------------------------------------------------------
    def __getitem__(self, rc: tuple[int, int]) -> Polynomial:
        r, c = rc
        return self.entries[r][c]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MatrixExpr)
            and self.table == other.table
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash((self.table, self.entries))

    def __repr__(self) -> str:
        return f"MatrixExpr({self.rows}x{self.cols} over {len(self.table)} vars)"

    def entries_flat(self) -> list[Polynomial]:
        """All entries, row-major."""
        return [e for row in self.entries for e in row]

    def is_zero(self) -> bool:
        return all(e.is_zero for row in self.entries for e in row)

    # -- algebra ----------------------------------------------------------------
    def _check(self, other: "MatrixExpr") -> None:
        if self.table != other.table:
            raise RingMismatchError("ring mismatch")

    def __add__(self, other: "MatrixExpr") -> "MatrixExpr":
        self._check(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("matrix shapes disagree for addition")
        return MatrixExpr(
            self.table,
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ],
        )

    def __sub__(self, other: "MatrixExpr") -> "MatrixExpr":
        self._check(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("matrix shapes disagree for subtraction")
        return MatrixExpr(
            self.table,
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ],
        )

    def __neg__(self) -> "MatrixExpr":
        return MatrixExpr(
            self.table, [[-a for a in row] for row in self.entries]
        )

    def __mul__(self, other: "MatrixExpr | Polynomial | Rat") -> "MatrixExpr":
        if isinstance(other, (int, Fraction, Polynomial)):
            return MatrixExpr(
                self.table, [[a * other for a in row] for row in self.entries]
            )
        self._check(other)
        if self.cols != other.rows:
            raise ValueError("matrix shapes disagree for product")
        bt = other.transpose().entries
        out: list[list[Polynomial]] = []
        for row in self.entries:
            out_row: list[Polynomial] = []
            for col in bt:
                acc = self.table.zero()
                for a, b in zip(row, col):
                    if a.terms and b.terms:
                        acc = acc + a * b
                out_row.append(acc)
            out.append(out_row)
        return MatrixExpr(self.table, out)

    def __rmul__(self, other: "Polynomial | Rat") -> "MatrixExpr":
        if isinstance(other, (int, Fraction, Polynomial)):
            return MatrixExpr(
                self.table, [[other * a for a in row] for row in self.entries]
            )
        return NotImplemented

    def transpose(self) -> "MatrixExpr":
        return MatrixExpr(
            self.table,
            [
                [self.entries[r][c] for r in range(self.rows)]
                for c in range(self.cols)
            ],
        )

    def trace(self) -> Polynomial:
        if self.rows != self.cols:
            raise ValueError("trace needs a square matrix")
        acc = self.table.zero()
        for i in range(self.rows):
            acc = acc + self.entries[i][i]
        return acc

    def wedge2(self) -> "MatrixExpr":
        """The second exterior power: all 2x2 minors.

        Row index runs over row pairs (r, s) with r < s in row-major order;
        column index over column pairs likewise.  Entry = the 2x2 minor.
        """
        if self.rows < 2 or self.cols < 2:
            raise ValueError("the second exterior power needs a 2x2 or larger matrix")
        row_pairs = [
            (r, s) for r in range(self.rows) for s in range(r + 1, self.rows)
        ]
        col_pairs = [
            (c, d) for c in range(self.cols) for d in range(c + 1, self.cols)
        ]
        e = self.entries
        return MatrixExpr(
            self.table,
            [
                [
                    e[r][c] * e[s][d] - e[r][d] * e[s][c]
                    for (c, d) in col_pairs
                ]
                for (r, s) in row_pairs
            ],
        )


def col_vector(table: VarTable, polys: Sequence[Polynomial]) -> MatrixExpr:
    return MatrixExpr(table, [[p] for p in polys])


def unit_antidiagonal(table: VarTable, size: int) -> MatrixExpr:
    """The size x size matrix with ones on the antidiagonal."""
    one = table.one()
    zero = table.zero()
    return MatrixExpr(
        table,
        [
            [one if r + c == size - 1 else zero for c in range(size)]
            for r in range(size)
        ],
    )


def skew_unit_block(table: VarTable, l: int) -> MatrixExpr:
    """The 2l x 2l skew matrix [[0, H_l], [-H_l, 0]]; squares to -identity."""
    h = unit_antidiagonal(table, l)
    z = MatrixExpr.zeros(table, l, l)
    return MatrixExpr.block([[z, h], [-h, z]])


def build_constants(
    n: int, l: int, table: VarTable | None = None
) -> dict[str, MatrixExpr]:
    """The constant structure matrices for rank n and level index l.

    Returned keys: ``antidiagonal`` (the (n-2l)-block unit antidiagonal),
    ``skew_block`` (the 2l x 2l skew unit block, squaring to -identity),
    ``lattice_frame_low`` and ``lattice_frame_high`` (the two 2n x 2n frame
    matrices, with pi^2 entries standing in for the base uniformizer),
    ``pairing`` (the 2n x 2n block pairing matrix, unimodular), and
    ``mult_by_t`` (multiplication by the degree-two generator on the
    doubled space).
    """
    if not is_strongly_non_special(n, l):
        raise ChartError("not strongly non-special")
    if table is None:
        table = VarTable(["pi"])
    pi0 = table.var("pi") * table.var("pi")
    a, b = 2 * l, n - 2 * l  # block sizes, alternating a, b, a, b
    I_a = MatrixExpr.identity(table, a)
    I_b = MatrixExpr.identity(table, b)
    I_n = MatrixExpr.identity(table, n)
    Z = MatrixExpr.zeros
    h = unit_antidiagonal(table, b)
    j = skew_unit_block(table, l)
    frame_low = MatrixExpr.block(
        [
            [I_a, Z(table, a, b), Z(table, a, a), Z(table, a, b)],
            [Z(table, b, a), Z(table, b, b), Z(table, b, a), I_b * pi0],
            [Z(table, a, a), Z(table, a, b), I_a, Z(table, a, b)],
            [Z(table, b, a), I_b, Z(table, b, a), Z(table, b, b)],
        ]
    )
    frame_high = MatrixExpr.block(
        [
            [Z(table, a, a), Z(table, a, b), I_a * pi0, Z(table, a, b)],
            [Z(table, b, a), I_b, Z(table, b, a), Z(table, b, b)],
            [I_a, Z(table, a, b), Z(table, a, a), Z(table, a, b)],
            [Z(table, b, a), Z(table, b, b), Z(table, b, a), I_b],
        ]
    )
    pairing = MatrixExpr.block(
        [
            [Z(table, a, a), Z(table, a, b), j, Z(table, a, b)],
            [Z(table, b, a), Z(table, b, b), Z(table, b, a), -h],
            [-j, Z(table, a, b), Z(table, a, a), Z(table, a, b)],
            [Z(table, b, a), h, Z(table, b, a), Z(table, b, b)],
        ]
    )
    mult_by_t = MatrixExpr.block(
        [
            [Z(table, n, n), I_n * pi0],
            [I_n, Z(table, n, n)],
        ]
    )
    return {
        "antidiagonal": h,
        "skew_block": j,
        "lattice_frame_low": frame_low,
        "lattice_frame_high": frame_high,
        "pairing": pairing,
        "mult_by_t": mult_by_t,
    }


# ---------------------------------------------------------------------------
# Rings per chart kind
# ---------------------------------------------------------------------------

def _v_names(n: int) -> list[str]:
    return [f"v{i}" for i in range(1, n + 1)]


def _z2_names(n: int, l: int) -> list[str]:
    return [f"z{i}" for i in range(2 * l + 1, n + 1)]


def _z1_names(l: int) -> list[str]:
    return [f"z{i}" for i in range(1, 2 * l + 1)]


def _t_names(n: int, l: int) -> list[str]:
    return [f"t{i}" for i in range(2 * l + 1, n + 1)]


def _matrix_names(prefix: str, n: int) -> list[str]:
    return [f"{prefix}{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1)]


def chart_table(spec: ChartSpec) -> VarTable:
    """The polynomial ring a chart of this kind lives in."""
    n, l = spec.n, spec.l
    if spec.kind == "raw":
        names = (
            _v_names(n)
            + _z2_names(n, l)
            + _z1_names(l)
            + _matrix_names("x", n)
            + _matrix_names("y", n)
            + ["pi"]
        )
    elif spec.kind in ("simplified-A", "unified"):
        names = _v_names(n) + _z2_names(n, l) + ["pi"]
    elif spec.kind == "simplified-B":
        names = _v_names(n) + ["u", "pi"]
    elif spec.kind in ("blowup-patch", "rees-proj"):
        names = _v_names(n) + _z2_names(n, l) + _t_names(n, l) + ["pi"]
    else:
        raise ChartError(f"unknown chart kind: {spec.kind!r}")
    return VarTable(names)


def bridge_table(spec: ChartSpec) -> VarTable:
    """The raw-chart ring, extended by ``u`` for the hypersurface route.

    The raw-to-simplified equivalence substitutes matrix variables by
    expressions in the coordinate vectors; for i0 > 2l those expressions
    involve ``u``, so the substitution happens in this extended ring.
    """
    n, l = spec.n, spec.l
    names = (
        _v_names(n)
        + _z2_names(n, l)
        + _z1_names(l)
        + _matrix_names("x", n)
        + _matrix_names("y", n)
    )
    if spec.i0 > 2 * l:
        names = names + ["u"]
    return VarTable(names + ["pi"])


# ---------------------------------------------------------------------------
# Chart ideal builders
# ---------------------------------------------------------------------------

def _vector(table: VarTable, names: Iterable[str]) -> MatrixExpr:
    return col_vector(table, [table.var(nm) for nm in names])


def _pairs_sum(table: VarTable, left: list[str], right: list[str]) -> Polynomial:
    acc = table.zero()
    for a, b in zip(left, right):
        acc = acc + table.var(a) * table.var(b)
    return acc


def build_raw_chart(spec: ChartSpec) -> Ideal:
    """The raw affine chart ideal in the full matrix variables.

    Generators are emitted in the fixed order: (a) the rank-one expression
    for the y-matrix and the trace normalization; (b) the skew-symmetry
    relations tying x to y; (c) the forward triangular relations; (d) the
    backward triangular relations; then the unit normalization v_{i0}-1.
    """
    validate_spec(spec)
    if spec.kind != "raw":
        raise ChartError("build_raw_chart needs kind=raw")
    n, l, i0 = spec.n, spec.l, spec.i0
    table = chart_table(spec)
    pi = table.var("pi")
    a, b = 2 * l, n - 2 * l

    V = _vector(table, _v_names(n))
    # Logical z-order is z1..zn even though the ring lists the tail block first.
    Z = _vector(table, [f"z{i}" for i in range(1, n + 1)])
    X = MatrixExpr(
        table,
        [[table.var(f"x{i}{j}") for j in range(1, n + 1)] for i in range(1, n + 1)],
    )
    Y = MatrixExpr(
        table,
        [[table.var(f"y{i}{j}") for j in range(1, n + 1)] for i in range(1, n + 1)],
    )

    def blocks(m: MatrixExpr) -> tuple[MatrixExpr, MatrixExpr, MatrixExpr, MatrixExpr]:
        e = m.entries
        return (
            MatrixExpr(table, [row[:a] for row in e[:a]]),
            MatrixExpr(table, [row[a:] for row in e[:a]]),
            MatrixExpr(table, [row[:a] for row in e[a:]]),
            MatrixExpr(table, [row[a:] for row in e[a:]]),
        )

    X1, X2, X3, X4 = blocks(X)
    Y1, Y2, Y3, Y4 = blocks(Y)
    H = unit_antidiagonal(table, b)
    J = skew_unit_block(table, l)
    I_a = MatrixExpr.identity(table, a)
    I_b = MatrixExpr.identity(table, b)
    I_n = MatrixExpr.identity(table, n)
    pi0 = pi * pi

    gens: list[Polynomial] = []
    # (a) rank-one shape of y and the trace normalization.
    gens.extend((Y - V * Z.transpose() + I_n * pi).entries_flat())
    gens.append((Z.transpose() * V).entries[0][0] - 2 * pi)
    # (b) the pairing-compatibility relations between x and y.
    gens.extend((Y1 + J * X1.transpose() * J).entries_flat())
    gens.extend((Y2 + J * X3.transpose() * H).entries_flat())
    gens.extend((Y3 - H * X2.transpose() * J).entries_flat())
    gens.extend((Y4 - H * X4.transpose() * H).entries_flat())
    # (c) forward triangular relations.
    gens.extend((X1 - (Y1 + Y2 * X3)).entries_flat())
    gens.extend((X2 - Y2 * X4).entries_flat())
    gens.extend((Y4 * X4 - I_b * pi0).entries_flat())
    # (d) backward triangular relations.
    gens.extend((X1 * Y1 - I_a * pi0).entries_flat())
    gens.extend((Y3 - X3 * Y1).entries_flat())
    gens.extend((Y4 - (X4 + X3 * Y2)).entries_flat())
    # Unit normalization.
    gens.append(table.var(f"v{i0}") - 1)
    return Ideal(table, gens)


def _det_presentation_gens(table: VarTable, n: int, l: int, i0: int) -> list[Polynomial]:
    """Generators of the determinantal chart presentation.

    v_{i0}-1 first; then the 2x2 minors of the two-column matrix whose rows
    are (v_r, z_{n+2l+1-r}) for r in the tail range, in row-major pair order;
    then the trace normalization sum(z_r v_r) - 2 pi.
    """
    gens: list[Polynomial] = [table.var(f"v{i0}") - 1]
    rng = list(range(2 * l + 1, n + 1))
    mirror = {r: n + 2 * l + 1 - r for r in rng}
    for idx, r in enumerate(rng):
        for s in rng[idx + 1:]:
            gens.append(
                table.var(f"v{r}") * table.var(f"z{mirror[s]}")
                - table.var(f"v{s}") * table.var(f"z{mirror[r]}")
            )
    trace = _pairs_sum(table, [f"z{r}" for r in rng], [f"v{r}" for r in rng])
    gens.append(trace - 2 * table.var("pi"))
    return gens


def build_simplified_chart(spec: ChartSpec) -> Ideal:
    """The simplified chart ideal for kinds simplified-A/simplified-B/unified.

    simplified-A and unified use the determinantal presentation (unified for
    every i0); simplified-B is the two-generator hypersurface presentation
    in the coordinates (v, u).
    """
    validate_spec(spec)
    n, l, i0 = spec.n, spec.l, spec.i0
    table = chart_table(spec)
    if spec.kind in ("simplified-A", "unified"):
        return Ideal(table, _det_presentation_gens(table, n, l, i0))
    if spec.kind != "simplified-B":
        raise ChartError("build_simplified_chart needs a simplified or unified kind")
    rng = list(range(2 * l + 1, n + 1))
    quadric = _pairs_sum(
        table, [f"v{r}" for r in rng], [f"v{n + 2 * l + 1 - r}" for r in rng]
    )
    gens = [
        table.var(f"v{i0}") - 1,
        table.var("u") * quadric - 2 * table.var("pi"),
    ]
    return Ideal(table, gens)


def build_chart(spec: ChartSpec) -> Ideal:
    """Build the chart ideal for any kind (dispatch helper)."""
    validate_spec(spec)
    if spec.kind == "raw":
        return build_raw_chart(spec)
    if spec.kind in ("simplified-A", "simplified-B", "unified"):
        return build_simplified_chart(spec)
    if spec.kind == "blowup-patch":
        return build_blowup_patch(spec)
    if spec.kind == "rees-proj":
        return build_rees_presentation(spec)
    raise ChartError(f"unknown chart kind: {spec.kind!r}")


# ---------------------------------------------------------------------------
# The simplifying substitution and its matrices
# ---------------------------------------------------------------------------

def _param_pieces(
    spec: ChartSpec, table: VarTable
) -> tuple[MatrixExpr, MatrixExpr, MatrixExpr, MatrixExpr]:
    """The column vectors (V1, V2, Z1, Z2) over ``table``.

    For the determinantal kinds the first z-block is eliminated via
    Z1 = -(a/2) J V1 with a = Z2^t H Z2; for the hypersurface kind the tail
    block is u H V2 and the first block is -(a - pi u) J V1 with
    a = u^2 V2^t H V2.
    """
    n, l = spec.n, spec.l
    V1 = _vector(table, [f"v{i}" for i in range(1, 2 * l + 1)])
    V2 = _vector(table, [f"v{i}" for i in range(2 * l + 1, n + 1)])
    H = unit_antidiagonal(table, n - 2 * l)
    J = skew_unit_block(table, l)
    if spec.kind == "simplified-B":
        u = table.var("u")
        Z2 = (H * V2) * u
        quad = (V2.transpose() * H * V2).entries[0][0]
        a = quad * (u * u)
        Z1 = (J * V1) * (-(a - table.var("pi") * u))
    else:
        Z2 = _vector(table, _z2_names(n, l))
        a = (Z2.transpose() * H * Z2).entries[0][0]
        half = Fraction(1, 2)
        Z1 = (J * V1) * (a * -half)
    return V1, V2, Z1, Z2


def parametrized_matrices(spec: ChartSpec) -> tuple[MatrixExpr, MatrixExpr]:
    """The matrices (X, Y) realized inside the simplified chart ring.

    Y = V Z^t - pi I with the eliminated z-block substituted; X is assembled
    from its four blocks in terms of the coordinate vectors.  These are the
    matrices the membership checks (characteristic polynomial, exterior
    power, determinant) run against.
    """
    validate_spec(spec)
    if spec.kind not in ("simplified-A", "simplified-B", "unified"):
        raise ChartError("parametrized matrices need a simplified or unified kind")
    n, l = spec.n, spec.l
    table = chart_table(spec)
    pi = table.var("pi")
    V1, V2, Z1, Z2 = _param_pieces(spec, table)
    V = MatrixExpr.block([[V1], [V2]])
    Z = MatrixExpr.block([[Z1], [Z2]])
    H = unit_antidiagonal(table, n - 2 * l)
    J = skew_unit_block(table, l)
    I_a = MatrixExpr.identity(table, 2 * l)
    I_b = MatrixExpr.identity(table, n - 2 * l)
    I_n = MatrixExpr.identity(table, n)
    Y = V * Z.transpose() - I_n * pi
    X1 = -(J * Z1 * V1.transpose() * J) - I_a * pi
    X2 = J * Z1 * V2.transpose() * H
    X3 = -(H * Z2 * V1.transpose() * J)
    X4 = H * Z2 * V2.transpose() * H - I_b * pi
    X = MatrixExpr.block([[X1, X2], [X3, X4]])
    return X, Y


def build_parametrization(spec: ChartSpec) -> dict[str, Polynomial]:
    """The substitution realizing the chart simplification.

    Maps every eliminated raw-chart variable to its expression in the
    simplified ring: all x_ij and y_ij, the first z-block z1..z_{2l}, and —
    for the hypersurface kind — the tail z-block as well (z_i = u v_mirror).
    Unified charts use the determinantal substitution for every i0.
    """
    validate_spec(spec)
    if spec.kind not in ("simplified-A", "simplified-B", "unified"):
        raise ChartError("parametrization needs a simplified or unified kind")
    n, l = spec.n, spec.l
    table = chart_table(spec)
    X, Y = parametrized_matrices(spec)
    V1, V2, Z1, Z2 = _param_pieces(spec, table)
    assignment: dict[str, Polynomial] = {}
    for i in range(n):
        for j in range(n):
            assignment[f"y{i + 1}{j + 1}"] = Y.entries[i][j]
            assignment[f"x{i + 1}{j + 1}"] = X.entries[i][j]
    for k in range(2 * l):
        assignment[f"z{k + 1}"] = Z1.entries[k][0]
    if spec.kind == "simplified-B":
        for k in range(n - 2 * l):
            assignment[f"z{2 * l + k + 1}"] = Z2.entries[k][0]
    return assignment


# ---------------------------------------------------------------------------
# Blow-up patches and the homogeneous presentation
# ---------------------------------------------------------------------------

def build_blowup_patch(spec: ChartSpec) -> Ideal:
    """The affine blow-up patch where the j-th tail coordinate leads.

    Generators, in order: the unit normalization v_{i0}-1, the patch
    normalization t_j-1, the z-links z_i - z_j t_i (i != j, ascending), the
    v-links v_i - t_{mirror(i)} v_{mirror(j)} (i != mirror(j), ascending),
    and the core relation v_{mirror(j)} z_j q~ - 2 pi, where q~ is
    sum(t_i t_{mirror(i)}) with t_j set to 1.  The trace normalization of
    the chart is implied by these and is not emitted.
    """
    validate_spec(spec)
    if spec.kind != "blowup-patch":
        raise ChartError("build_blowup_patch needs kind=blowup-patch")
    n, l, i0, j = spec.n, spec.l, spec.i0, spec.j
    assert j is not None
    table = chart_table(spec)
    jhat = n + 2 * l + 1 - j
    rng = list(range(2 * l + 1, n + 1))
    gens: list[Polynomial] = [
        table.var(f"v{i0}") - 1,
        table.var(f"t{j}") - 1,
    ]
    zj = table.var(f"z{j}")
    for i in rng:
        if i != j:
            gens.append(table.var(f"z{i}") - zj * table.var(f"t{i}"))
    vjh = table.var(f"v{jhat}")
    for i in rng:
        if i != jhat:
            gens.append(
                table.var(f"v{i}") - table.var(f"t{n + 2 * l + 1 - i}") * vjh
            )
    q = _pairs_sum(
        table, [f"t{i}" for i in rng], [f"t{n + 2 * l + 1 - i}" for i in rng]
    )
    q_patch = q.substitute({f"t{j}": table.one()})
    gens.append(vjh * zj * q_patch - 2 * table.var("pi"))
    return Ideal(table, gens)


def patch_core_factor(spec: ChartSpec) -> Polynomial:
    """The dehomogenized quadric factor q~ of the patch's core relation."""
    validate_spec(spec)
    if spec.kind != "blowup-patch":
        raise ChartError("patch_core_factor needs kind=blowup-patch")
    n, l, j = spec.n, spec.l, spec.j
    assert j is not None
    table = chart_table(spec)
    rng = list(range(2 * l + 1, n + 1))
    q = _pairs_sum(
        table, [f"t{i}" for i in rng], [f"t{n + 2 * l + 1 - i}" for i in rng]
    )
    return q.substitute({f"t{j}": table.one()})


def build_rees_presentation(spec: ChartSpec) -> Ideal:
    """The homogeneous blow-up presentation over the chart ring.

    Generators, in order: the chart relations (unit normalization, the
    determinantal minors, the trace normalization), then the minors tying
    the degree-one generators t to the z-block (rows (z_i, t_i)), then the
    minors tying them to the v-block (rows (v_i, t_{mirror(i)})); both minor
    families in row-major pair order.  Homogeneous in the t-variables.
    """
    validate_spec(spec)
    if spec.kind != "rees-proj":
        raise ChartError("build_rees_presentation needs kind=rees-proj")
    n, l, i0 = spec.n, spec.l, spec.i0
    table = chart_table(spec)
    gens = _det_presentation_gens(table, n, l, i0)
    rng = list(range(2 * l + 1, n + 1))
    for idx, i in enumerate(rng):
        for k in rng[idx + 1:]:
            gens.append(
                table.var(f"z{i}") * table.var(f"t{k}")
                - table.var(f"z{k}") * table.var(f"t{i}")
            )
    mirror = {r: n + 2 * l + 1 - r for r in rng}
    for idx, r in enumerate(rng):
        for s in rng[idx + 1:]:
            gens.append(
                table.var(f"v{r}") * table.var(f"t{mirror[s]}")
                - table.var(f"v{s}") * table.var(f"t{mirror[r]}")
            )
    return Ideal(table, gens)


# ---------------------------------------------------------------------------
# Characteristic polynomials and determinants
# ---------------------------------------------------------------------------

def char_poly(m: MatrixExpr) -> list[Polynomial]:
    """Coefficients of det(t I - M), ascending by power of t.

    Computed by the iterated-trace recurrence, which needs only matrix
    products and exact division by the integers 1..n.  The returned list has
    length n+1 with leading coefficient 1.
    """
    if m.rows != m.cols:
        raise ValueError("characteristic polynomial needs a square matrix")
    n = m.rows
    table = m.table
    coeffs: list[Polynomial] = [table.zero()] * (n + 1)
    coeffs[n] = table.one()
    bk = m
    for k in range(1, n + 1):
        trace = bk.trace()
        ck = trace * Fraction(-1, k)
        coeffs[n - k] = ck
        if k < n:
            bk = m * (bk + MatrixExpr.identity(table, n, ck))
    return coeffs


def eval_poly_coeffs(coeffs: Sequence[Polynomial], value: Polynomial) -> Polynomial:
    """Evaluate sum(coeffs[k] * value^k) by Horner's scheme."""
    table = value.table
    acc = table.zero()
    for c in reversed(coeffs):
        acc = acc * value + c
    return acc


def mat_det(m: MatrixExpr) -> Polynomial:
    """Exact determinant via the characteristic polynomial at zero."""
    coeffs = char_poly(m)
    det = coeffs[0]
    if m.rows % 2 == 1:
        det = -det
    return det


def jacobian_matrix(gens: Sequence[Polynomial], table: VarTable) -> MatrixExpr:
    """The Jacobian: one row per generator, one column per ring variable."""
    if not gens:
        raise ValueError("the Jacobian of an empty generator list is undefined")
    rows = [[g.derivative(name) for name in table.names] for g in gens]
    return MatrixExpr(table, rows)
