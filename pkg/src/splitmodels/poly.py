"""Exact sparse multivariate polynomial arithmetic over the rationals.

This module is the substrate for everything else in the package: a variable
table fixing the ambient polynomial ring, monomials as dense exponent tuples,
immutable polynomials with exact ``fractions.Fraction`` coefficients, pluggable
monomial orders (graded reverse lexicographic, lexicographic, and block
elimination orders), multivariate division, simultaneous substitution, and a
canonical text form with a round-tripping parser.

Design notes:

- Monomials are plain tuples of non-negative ints, one slot per variable of
  the owning ``VarTable``.  Dense tuples are cheap at the variable counts this
  package works with and make order comparisons allocation-free.
- Polynomials are immutable after construction; arithmetic returns fresh
  objects.  This makes them safe to share across worker processes and lets
  ideals cache Groebner bases without defensive copies.
- The uniformizer is an ordinary variable named ``pi``; every ring must
  contain it exactly once.  The square ``pi**2`` plays the role of the base
  uniformizer below it, and is never a separate variable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

__all__ = [
    "RingMismatchError",
    "Monomial",
    "VarTable",
    "MonomialOrder",
    "GREVLEX",
    "LEX",
    "block_order",
    "Polynomial",
    "reduce_poly",
    "reduce_with_quotients",
    "parse_polynomial",
    "mono_mul",
    "mono_divides",
    "mono_div",
    "mono_lcm",
    "mono_degree",
]


class RingMismatchError(ValueError):
    """Raised when an operation mixes polynomials from different rings."""


# A monomial is a dense exponent vector with one entry per ring variable.
Monomial = tuple[int, ...]

Rat = Fraction | int

_NAME_FIRST = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
_NAME_REST = _NAME_FIRST | set("0123456789_")


def _valid_name(name: str) -> bool:
    return (
        bool(name)
        and name[0] in _NAME_FIRST
        and all(ch in _NAME_REST for ch in name[1:])
    )


# ---------------------------------------------------------------------------
# Monomial helpers
# ---------------------------------------------------------------------------

def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    """True iff monomial ``a`` divides monomial ``b``."""
    return all(x <= y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    """Exact quotient ``a / b``; caller guarantees divisibility."""
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x if x >= y else y for x, y in zip(a, b))


def mono_degree(a: Monomial) -> int:
    return sum(a)


# ---------------------------------------------------------------------------
# Variable tables
# ---------------------------------------------------------------------------

class VarTable:
    """An ordered list of variable names fixing a polynomial ring.

    Invariants: names are unique, every name is a valid identifier, and the
    uniformizer variable ``pi`` is present exactly once.  Equality and hashing
    go through the name tuple, so two tables with the same names are the same
    ring for every operation in this package.
    """

    __slots__ = ("names", "_index")

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        if not names:
            raise ValueError("a variable table needs at least one variable")
        seen: set[str] = set()
        for name in names:
            if not _valid_name(name):
                raise ValueError(f"invalid variable name: {name!r}")
            if name in seen:
                raise ValueError(f"duplicate variable name: {name!r}")
            seen.add(name)
        if names.count("pi") != 1:
            raise ValueError('the uniformizer variable "pi" must appear exactly once')
        self.names = names
        self._index = {name: i for i, name in enumerate(names)}

    # -- container protocol -------------------------------------------------
    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, VarTable) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"VarTable({', '.join(self.names)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise RingMismatchError(f"variable {name!r} absent from the ring") from None

    def extend(self, names: Iterable[str]) -> "VarTable":
        """A new table with ``names`` appended (used for auxiliary variables)."""
        return VarTable(self.names + tuple(names))

    # -- polynomial constructors --------------------------------------------
    def zero(self) -> "Polynomial":
        return Polynomial(self, {}, _trust=True)

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, value: Rat) -> "Polynomial":
        c = Fraction(value)
        if c == 0:
            return self.zero()
        return Polynomial(self, {(0,) * len(self.names): c}, _trust=True)

    def var(self, name: str, power: int = 1) -> "Polynomial":
        i = self.index(name)
        if power < 0:
            raise ValueError("variable powers must be non-negative")
        if power == 0:
            return self.one()
        mono = tuple(power if j == i else 0 for j in range(len(self.names)))
        return Polynomial(self, {mono: Fraction(1)}, _trust=True)


# ---------------------------------------------------------------------------
# Monomial orders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MonomialOrder:
    """A total, multiplicative well-ordering of monomials.

    ``kind`` is one of ``"grevlex"`` (graded reverse lexicographic),
    ``"lex"`` (lexicographic), or ``"block"`` (eliminate the variables named
    in ``elim`` first: grevlex on the elimination block, ties broken by
    grevlex on the remaining block).  Ties everywhere are resolved by the
    variable order of the ``VarTable`` the order is applied to, so a
    ``MonomialOrder`` value is ring-independent and hashable (usable as a
    cache key).
    """

    kind: str
    elim: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("grevlex", "lex", "block"):
            raise ValueError(f"unknown order kind: {self.kind!r}")
        if self.kind == "block" and not self.elim:
            raise ValueError("block orders need a non-empty elimination set")
        if self.kind != "block" and self.elim:
            raise ValueError("only block orders carry an elimination set")

    def key_for(self, table: VarTable) -> Callable[[Monomial], tuple]:
        """A sort key realizing this order on ``table``'s monomials.

        Larger key = larger monomial; ``sorted(..., key=key, reverse=True)``
        lists terms leading-first.
        """
        if self.kind == "grevlex":
            def key(m: Monomial) -> tuple:
                total = 0
                for e in m:
                    total += e
                return (total, tuple(-e for e in reversed(m)))
            return key
        if self.kind == "lex":
            def key(m: Monomial) -> tuple:
                return (m,)
            return key
        # Block elimination order.
        elim_set = set(self.elim)
        missing = elim_set - set(table.names)
        if missing:
            raise RingMismatchError(
                f"elimination variables absent from the ring: {sorted(missing)}"
            )
        elim_idx = tuple(i for i, n in enumerate(table.names) if n in elim_set)
        keep_idx = tuple(i for i, n in enumerate(table.names) if n not in elim_set)
        r_elim = tuple(reversed(elim_idx))
        r_keep = tuple(reversed(keep_idx))

        def key(m: Monomial) -> tuple:
            deg_e = 0
            for i in elim_idx:
                deg_e += m[i]
            deg_k = 0
            for i in keep_idx:
                deg_k += m[i]
            return (
                deg_e,
                tuple(-m[i] for i in r_elim),
                deg_k,
                tuple(-m[i] for i in r_keep),
            )

        return key


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def block_order(elim: Iterable[str]) -> MonomialOrder:
    """An elimination order putting the named variables first."""
    return MonomialOrder("block", tuple(elim))


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

class Polynomial:
    """An immutable sparse polynomial: a map monomial -> nonzero rational.

    All arithmetic is exact.  Mixing polynomials from different rings raises
    ``RingMismatchError``.  Term iteration order is unspecified; use
    ``sorted_terms`` for deterministic, order-respecting traversal.
    """

    __slots__ = ("table", "terms", "_sorted", "_hash")

    def __init__(
        self,
        table: VarTable,
        terms: Mapping[Monomial, Rat],
        *,
        _trust: bool = False,
    ):
        self.table = table
        if _trust:
            self.terms: dict[Monomial, Fraction] = dict(terms)
        else:
            n = len(table)
            clean: dict[Monomial, Fraction] = {}
            for mono, coeff in terms.items():
                mono = tuple(mono)
                if len(mono) != n:
                    raise ValueError(
                        f"monomial length {len(mono)} does not match ring size {n}"
                    )
                if any(e < 0 for e in mono):
                    raise ValueError("negative exponent in monomial")
                c = Fraction(coeff)
                if c != 0:
                    c0 = clean.get(mono)
                    c = c if c0 is None else c0 + c
                    if c:
                        clean[mono] = c
                    elif mono in clean:
                        del clean[mono]
            self.terms = clean
        self._sorted: dict[MonomialOrder, tuple[tuple[Monomial, Fraction], ...]] = {}
        self._hash: int | None = None

    # -- basic queries -------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def total_degree(self) -> int:
        """Maximum term degree; the zero polynomial reports -1."""
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def constant_value(self) -> Fraction | None:
        """The rational value of a constant polynomial, else None."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1:
            mono, coeff = next(iter(self.terms.items()))
            if not any(mono):
                return coeff
        return None

    def support_names(self) -> tuple[str, ...]:
        """Names of variables appearing with positive exponent, table order."""
        n = len(self.table)
        used = [False] * n
        for mono in self.terms:
            for i, e in enumerate(mono):
                if e:
                    used[i] = True
        return tuple(name for i, name in enumerate(self.table.names) if used[i])

    # -- ordering-aware views -----------------------------------------------
    def sorted_terms(
        self, order: MonomialOrder = GREVLEX
    ) -> tuple[tuple[Monomial, Fraction], ...]:
        """Terms sorted leading-first under ``order`` (cached)."""
        cached = self._sorted.get(order)
        if cached is None:
            key = order.key_for(self.table)
            cached = tuple(
                (m, self.terms[m])
                for m in sorted(self.terms, key=key, reverse=True)
            )
            self._sorted[order] = cached
        return cached

    def leading_monomial(self, order: MonomialOrder = GREVLEX) -> Monomial:
        if not self.terms:
            raise ValueError("the zero polynomial has no leading term")
        return self.sorted_terms(order)[0][0]

    def leading_coefficient(self, order: MonomialOrder = GREVLEX) -> Fraction:
        if not self.terms:
            raise ValueError("the zero polynomial has no leading term")
        return self.sorted_terms(order)[0][1]

    def monic(self, order: MonomialOrder = GREVLEX) -> "Polynomial":
        if not self.terms:
            return self
        lc = self.leading_coefficient(order)
        if lc == 1:
            return self
        inv = Fraction(1) / lc
        return Polynomial(
            self.table, {m: c * inv for m, c in self.terms.items()}, _trust=True
        )

    # -- equality / hashing ---------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            if isinstance(other, (int, Fraction)):
                return self == self.table.const(other)
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.table, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic ------------------------------------------------------------
    def _check_ring(self, other: "Polynomial") -> None:
        if self.table != other.table:
            raise RingMismatchError("ring mismatch")

    def __neg__(self) -> "Polynomial":
        return Polynomial(
            self.table, {m: -c for m, c in self.terms.items()}, _trust=True
        )

    def __add__(self, other: "Polynomial | Rat") -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = self.table.const(other)
        elif not isinstance(other, Polynomial):
            return NotImplemented
        self._check_ring(other)
        big, small = self.terms, other.terms
        if len(big) < len(small):
            big, small = small, big
        out = dict(big)
        for mono, coeff in small.items():
            c0 = out.get(mono)
            if c0 is None:
                out[mono] = coeff
            else:
                c = c0 + coeff
                if c:
                    out[mono] = c
                else:
                    del out[mono]
        return Polynomial(self.table, out, _trust=True)

    __radd__ = __add__

    def __sub__(self, other: "Polynomial | Rat") -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            other = self.table.const(other)
        elif not isinstance(other, Polynomial):
            return NotImplemented
        self._check_ring(other)
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            c0 = out.get(mono)
            if c0 is None:
                out[mono] = -coeff
            else:
                c = c0 - coeff
                if c:
                    out[mono] = c
                else:
                    del out[mono]
        return Polynomial(self.table, out, _trust=True)

    def __rsub__(self, other: "Polynomial | Rat") -> "Polynomial":
        return (-self) + other

    def __mul__(self, other: "Polynomial | Rat") -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if c == 0:
                return self.table.zero()
            if c == 1:
                return self
            return Polynomial(
                self.table, {m: k * c for m, k in self.terms.items()}, _trust=True
            )
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_ring(other)
        a, b = self.terms, other.terms
        if not a or not b:
            return self.table.zero()
        if len(a) > len(b):
            a, b = b, a
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                mono = tuple(x + y for x, y in zip(m1, m2))
                c0 = out.get(mono)
                if c0 is None:
                    out[mono] = c1 * c2
                else:
                    c = c0 + c1 * c2
                    if c:
                        out[mono] = c
                    else:
                        del out[mono]
        return Polynomial(self.table, out, _trust=True)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = self.table.one()
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base_needed = e > 1
            e >>= 1
            if base_needed and e:
                base = base * base
        return result

    # -- substitution ----------------------------------------------------------
    def substitute(self, assignment: Mapping[str, "Polynomial | Rat"]) -> "Polynomial":
        """Simultaneously replace the named variables by polynomials.

        Every key must name a variable of this ring; every value must live in
        this ring (constants are promoted).  Variables not named are left
        untouched, so the result stays in the same ring.
        """
        if not assignment:
            return self
        table = self.table
        targets: dict[int, Polynomial] = {}
        for name, value in assignment.items():
            if name not in table:
                raise RingMismatchError(
                    f"cannot substitute for {name!r}: variable absent from the ring"
                )
            if isinstance(value, (int, Fraction)):
                value = table.const(value)
            elif not isinstance(value, Polynomial):
                raise TypeError(f"substitution value for {name!r} is not a polynomial")
            if value.table != table:
                raise RingMismatchError("ring mismatch")
            targets[table.index(name)] = value
        n = len(table)
        power_cache: dict[tuple[int, int], Polynomial] = {}

        def power(i: int, e: int) -> Polynomial:
            p = power_cache.get((i, e))
            if p is None:
                p = targets[i] ** e
                power_cache[(i, e)] = p
            return p

        total = table.zero()
        for mono, coeff in self.terms.items():
            rest = list(mono)
            factor: Polynomial | None = None
            for i in targets:
                e = mono[i]
                if e:
                    rest[i] = 0
                    piece = power(i, e)
                    factor = piece if factor is None else factor * piece
            base = Polynomial(table, {tuple(rest): coeff}, _trust=True)
            total = total + (base if factor is None else base * factor)
        return total

    def derivative(self, name: str) -> "Polynomial":
        """The formal partial derivative with respect to the named variable."""
        i = self.table.index(name)
        out: dict[Monomial, Fraction] = {}
        for mono, coeff in self.terms.items():
            e = mono[i]
            if e:
                lowered = list(mono)
                lowered[i] = e - 1
                out[tuple(lowered)] = coeff * e
        return Polynomial(self.table, out, _trust=True)

    def cast_to(self, table: VarTable) -> "Polynomial":
        """Re-express this polynomial in another ring, matching variables by name.

        Every variable that actually occurs must exist in the target ring;
        otherwise this raises ``RingMismatchError``.
        """
        if table == self.table:
            return self
        src = self.table.names
        n_dst = len(table)
        position: list[int | None] = [
            table._index.get(name) for name in src  # noqa: SLF001 (hot path)
        ]
        out: dict[Monomial, Fraction] = {}
        for mono, coeff in self.terms.items():
            dst = [0] * n_dst
            for i, e in enumerate(mono):
                if e:
                    j = position[i]
                    if j is None:
                        raise RingMismatchError(
                            f"cannot cast: variable {src[i]!r} absent from target ring"
                        )
                    dst[j] = e
            out[tuple(dst)] = coeff
        return Polynomial(table, out, _trust=True)

    # -- printing ----------------------------------------------------------------
    def to_text(self, order: MonomialOrder = GREVLEX) -> str:
        """Canonical text form: terms leading-first, coefficients as ``a/b``."""
        if not self.terms:
            return "0"
        names = self.table.names
        pieces: list[str] = []
        for mono, coeff in self.sorted_terms(order):
            sign = "-" if coeff < 0 else "+"
            mag = -coeff if coeff < 0 else coeff
            factors = [
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(names, mono)
                if e
            ]
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            pieces.append((sign, body))
        first_sign, first_body = pieces[0]
        out = [first_body if first_sign == "+" else "-" + first_body]
        for sign, body in pieces[1:]:
            out.append(f" {sign} {body}")
        return "".join(out)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        text = self.to_text()
        if len(text) > 60:
            text = text[:57] + "..."
        return f"Polynomial({text})"


# ---------------------------------------------------------------------------
# Multivariate division
# ---------------------------------------------------------------------------

def reduce_with_quotients(
    p: Polynomial,
    divisors: Sequence[Polynomial],
    order: MonomialOrder = GREVLEX,
) -> tuple[list[Polynomial], Polynomial]:
    """Divide ``p`` by the listed divisors; return (quotients, remainder).

    Deterministic: at every step the leading term of the running polynomial is
    tried against the divisors in list order and the first whose leading
    monomial divides it is used; if none divides, the term moves to the
    remainder.  The identity ``p = sum(q_i * g_i) + r`` holds exactly, and no
    term of ``r`` is divisible by any divisor's leading monomial.
    """
    table = p.table
    for g in divisors:
        if g.table != table:
            raise RingMismatchError("ring mismatch")
        if g.is_zero:
            raise ValueError("zero divisor in reduction basis")
    key = order.key_for(table)
    lead: list[tuple[Monomial, Fraction]] = [
        (g.leading_monomial(order), g.leading_coefficient(order)) for g in divisors
    ]
    work = dict(p.terms)
    remainder: dict[Monomial, Fraction] = {}
    quotients: list[dict[Monomial, Fraction]] = [{} for _ in divisors]
    while work:
        mono = max(work, key=key)
        coeff = work.pop(mono)
        for i, (lm, lc) in enumerate(lead):
            if mono_divides(lm, mono):
                q_mono = mono_div(mono, lm)
                q_coeff = coeff / lc
                quotients[i][q_mono] = quotients[i].get(q_mono, Fraction(0)) + q_coeff
                for m2, c2 in divisors[i].terms.items():
                    if m2 == lm:
                        continue
                    mm = mono_mul(q_mono, m2)
                    c0 = work.get(mm)
                    c = (c0 if c0 is not None else Fraction(0)) - q_coeff * c2
                    if c:
                        work[mm] = c
                    elif c0 is not None:
                        del work[mm]
                break
        else:
            remainder[mono] = coeff
    quots = [
        Polynomial(table, {m: c for m, c in q.items() if c}, _trust=True)
        for q in quotients
    ]
    return quots, Polynomial(table, remainder, _trust=True)


def reduce_poly(
    p: Polynomial,
    divisors: Sequence[Polynomial],
    order: MonomialOrder = GREVLEX,
) -> Polynomial:
    """The remainder (normal form) of ``p`` under multivariate division."""
    _, r = reduce_with_quotients(p, divisors, order)
    return r


# ---------------------------------------------------------------------------
# Parsing the canonical text form
# ---------------------------------------------------------------------------

class _Tokens:
    __slots__ = ("items", "pos")

    def __init__(self, text: str):
        items: list[str] = []
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch in "+-*^/":
                items.append(ch)
                i += 1
                continue
            if ch.isdigit():
                j = i + 1
                while j < n and text[j].isdigit():
                    j += 1
                items.append(text[i:j])
                i = j
                continue
            if ch in _NAME_FIRST:
                j = i + 1
                while j < n and text[j] in _NAME_REST:
                    j += 1
                items.append(text[i:j])
                i = j
                continue
            raise ValueError(f"unexpected character {ch!r} in polynomial text")
        self.items = items
        self.pos = 0

    def peek(self) -> str | None:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ValueError("unexpected end of polynomial text")
        self.pos += 1
        return tok


def parse_polynomial(table: VarTable, text: str) -> Polynomial:
    """Parse the canonical text form back into a polynomial.

    Grammar: sum of terms joined by ``+``/``-``; a term is a ``*``-joined list
    of factors; a factor is an integer, a rational ``a/b``, or a variable with
    an optional ``^k`` power.  Every variable must belong to ``table``.
    Round-trip guarantee: ``parse_polynomial(t, p.to_text(o)) == p``.
    """
    toks = _Tokens(text)
    if toks.peek() is None:
        raise ValueError("empty polynomial text")
    total = table.zero()

    def parse_factor() -> Polynomial:
        tok = toks.take()
        if tok.isdigit():
            value = Fraction(int(tok))
            if toks.peek() == "/":
                toks.take()
                den = toks.take()
                if not den.isdigit() or int(den) == 0:
                    raise ValueError(f"bad rational denominator near {den!r}")
                value /= int(den)
            return table.const(value)
        if not _valid_name(tok):
            raise ValueError(f"unexpected token {tok!r} in polynomial text")
        power = 1
        if toks.peek() == "^":
            toks.take()
            exp = toks.take()
            if not exp.isdigit():
                raise ValueError(f"bad exponent near {exp!r}")
            power = int(exp)
        if tok not in table:
            raise RingMismatchError(f"variable {tok!r} absent from the ring")
        return table.var(tok, power)

    def parse_term() -> Polynomial:
        result = parse_factor()
        while toks.peek() == "*":
            toks.take()
            result = result * parse_factor()
        return result

    sign = 1
    tok = toks.peek()
    if tok in ("+", "-"):
        toks.take()
        sign = -1 if tok == "-" else 1
    total = total + sign * parse_term()
    while toks.peek() is not None:
        opt = toks.take()
        if opt == "+":
            sign = 1
        elif opt == "-":
            sign = -1
        else:
            raise ValueError(f"expected '+' or '-', found {opt!r}")
        total = total + sign * parse_term()
    return total
