"""Groebner bases and ideal-theoretic operations, exactly over the rationals.

The engine is a Buchberger loop with the Gebauer-Moller pair update (product
and chain criteria), normal pair selection (smallest S-pair lcm first), and a
final reduction pass, so the returned basis is the unique reduced Groebner
basis for the requested monomial order.  On top of it sit the classical
constructions: membership, ideal equality, colon ideals, saturation (both the
auxiliary-variable encoding and stabilized iterated quotients), elimination
via block orders, pairwise intersection via the auxiliary ``s`` trick, and
Krull dimension of the quotient ring via maximal independent variable sets of
the leading-term ideal.

Everything is deterministic: pair selection, reduction order, and tie-breaks
are fixed, and resource budgets are enforced by counters, never by wall-clock
time, so identical inputs always yield identical outputs and identical
verdicts.  Exceeding a budget raises ``BudgetExceededError`` carrying the
run's statistics; it signals "too large to decide here", never a wrong answer.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .poly import (
    GREVLEX,
    Monomial,
    MonomialOrder,
    Polynomial,
    RingMismatchError,
    VarTable,
    block_order,
    mono_div,
    mono_divides,
    mono_lcm,
    mono_mul,
    reduce_with_quotients,
)

__all__ = [
    "GBBudget",
    "GBStats",
    "BudgetExceededError",
    "EmptyVarietyError",
    "Ideal",
    "groebner",
    "member",
    "radical_member",
    "equal",
    "contains",
    "quotient",
    "saturate",
    "saturate_iterated",
    "eliminate",
    "intersect",
    "dimension",
    "is_groebner_basis",
    "exact_divide",
    "serialize_ideal",
    "parse_ideal",
    "DEFAULT_BUDGET",
]


@dataclass(frozen=True)
class GBBudget:
    """Deterministic resource limits for one Groebner-basis computation.

    ``max_pair_reductions`` caps the number of S-pairs processed;
    ``max_terms`` caps the total number of stored terms (basis plus the
    intermediate polynomial under reduction), a memory proxy of roughly
    4 GiB at a few hundred bytes per term.  A derived cap on single division
    steps (50x the pair cap) guards against a single runaway reduction.
    """

    max_pair_reductions: int = 1_000_000
    max_terms: int = 10_000_000

    def scaled(self, pair_cap: int) -> "GBBudget":
        return GBBudget(max_pair_reductions=pair_cap, max_terms=self.max_terms)


DEFAULT_BUDGET = GBBudget()


@dataclass
class GBStats:
    """Counters describing one Groebner run."""

    pairs_processed: int = 0
    reductions_to_zero: int = 0
    max_basis_size: int = 0
    elapsed_s: float = 0.0

    def as_dict(self) -> dict[str, float | int]:
        return {
            "pairs_processed": self.pairs_processed,
            "reductions_to_zero": self.reductions_to_zero,
            "max_basis_size": self.max_basis_size,
            "elapsed_s": self.elapsed_s,
        }


class BudgetExceededError(RuntimeError):
    """A Groebner computation hit its budget before completing."""

    def __init__(self, message: str, stats: GBStats):
        super().__init__(message)
        self.stats = stats


class EmptyVarietyError(ValueError):
    """Raised by ``dimension`` on the unit ideal."""


# ---------------------------------------------------------------------------
# Ideals
# ---------------------------------------------------------------------------

class Ideal:
    """A finitely generated ideal: a presentation plus cached reduced bases.

    The generator list is presentation data and is preserved as given (minus
    exact zeros); reduced Groebner bases are computed on demand and cached
    per monomial order.  Ideals are immutable after construction, so the
    cache only ever grows and concurrent readers are safe.
    """

    __slots__ = ("table", "gens", "_gb", "_stats")

    def __init__(self, table: VarTable, gens: Iterable[Polynomial]):
        kept: list[Polynomial] = []
        for g in gens:
            if not isinstance(g, Polynomial):
                raise TypeError("ideal generators must be polynomials")
            if g.table != table:
                raise RingMismatchError("ring mismatch")
            if not g.is_zero:
                kept.append(g)
        self.table = table
        self.gens: tuple[Polynomial, ...] = tuple(kept)
        self._gb: dict[MonomialOrder, tuple[Polynomial, ...]] = {}
        self._stats: dict[MonomialOrder, GBStats] = {}

    def __repr__(self) -> str:
        return f"Ideal({len(self.gens)} gens over {len(self.table)} vars)"

    def with_extra(self, *more: Polynomial) -> "Ideal":
        """A new ideal with additional generators appended."""
        return Ideal(self.table, self.gens + tuple(more))

    def groebner_stats(self, order: MonomialOrder = GREVLEX) -> GBStats | None:
        return self._stats.get(order)


# ---------------------------------------------------------------------------
# Engine internals
# ---------------------------------------------------------------------------

def _neg_key(k: tuple) -> tuple:
    """Elementwise negation of an order key, for min-heap use.

    Keys are nested tuples of ints of shape fixed by (ring, order), so
    elementwise negation exactly reverses the comparison order.
    """
    return tuple(
        -x if isinstance(x, int) else tuple(-y for y in x) for x in k
    )


class _Meter:
    """Mutable budget/statistics accounting for one Groebner run."""

    __slots__ = (
        "budget", "pairs", "zeros", "max_basis", "stored", "steps",
        "step_cap", "t0",
    )

    def __init__(self, budget: GBBudget):
        self.budget = budget
        self.pairs = 0
        self.zeros = 0
        self.max_basis = 0
        self.stored = 0  # total terms across the stored basis
        self.steps = 0
        self.step_cap = 50 * budget.max_pair_reductions
        self.t0 = time.perf_counter()

    def stats(self) -> GBStats:
        return GBStats(
            pairs_processed=self.pairs,
            reductions_to_zero=self.zeros,
            max_basis_size=self.max_basis,
            elapsed_s=time.perf_counter() - self.t0,
        )

    def bail(self, what: str) -> BudgetExceededError:
        return BudgetExceededError(f"budget exceeded ({what})", self.stats())

    def charge_pair(self) -> None:
        self.pairs += 1
        if self.pairs > self.budget.max_pair_reductions:
            raise self.bail("pair reductions")

    def charge_steps(self, n: int, live_terms: int) -> None:
        self.steps += n
        if self.steps > self.step_cap:
            raise self.bail("division steps")
        if self.stored + live_terms > self.budget.max_terms:
            raise self.bail("term storage")


def _mult_dict(
    d: dict[Monomial, Fraction], mono: Monomial, coeff: Fraction
) -> dict[Monomial, Fraction]:
    if coeff == 1:
        return {mono_mul(m, mono): c for m, c in d.items()}
    return {mono_mul(m, mono): c * coeff for m, c in d.items()}


def _normal_form(
    f: dict[Monomial, Fraction],
    basis: Sequence[dict[Monomial, Fraction]],
    lms: Sequence[Monomial],
    active: Sequence[int],
    keyf: Callable[[Monomial], tuple],
    negkeys: dict[Monomial, tuple],
    meter: _Meter,
) -> dict[Monomial, Fraction]:
    """Full normal form of the term map ``f`` against monic basis elements.

    Divisors are tried in the order listed by ``active``; the reduction is a
    classic head-term loop driven by a lazy max-heap over the live monomials.
    """
    work = dict(f)
    if not work:
        return work
    rem: dict[Monomial, Fraction] = {}
    heap: list[tuple[tuple, Monomial]] = []
    for m in work:
        nk = negkeys.get(m)
        if nk is None:
            nk = _neg_key(keyf(m))
            negkeys[m] = nk
        heap.append((nk, m))
    heapq.heapify(heap)
    push = heapq.heappush
    pop = heapq.heappop
    while heap:
        _, mono = pop(heap)
        coeff = work.pop(mono, None)
        if coeff is None:
            continue  # stale heap entry
        hit = -1
        for i in active:
            if mono_divides(lms[i], mono):
                hit = i
                break
        if hit < 0:
            rem[mono] = coeff
            continue
        g = basis[hit]
        q_mono = mono_div(mono, lms[hit])
        meter.charge_steps(len(g), len(work) + len(rem))
        for m2, c2 in g.items():
            if m2 == lms[hit]:
                continue
            mm = mono_mul(q_mono, m2)
            c0 = work.get(mm)
            if c0 is None:
                work[mm] = -coeff * c2
                nk = negkeys.get(mm)
                if nk is None:
                    nk = _neg_key(keyf(mm))
                    negkeys[mm] = nk
                push(heap, (nk, mm))
            else:
                c = c0 - coeff * c2
                if c:
                    work[mm] = c
                else:
                    del work[mm]
    return rem


def _make_monic(d: dict[Monomial, Fraction], lm: Monomial) -> dict[Monomial, Fraction]:
    lc = d[lm]
    if lc == 1:
        return d
    inv = Fraction(1) / lc
    return {m: c * inv for m, c in d.items()}


def _gm_update(
    active: list[int],
    pairs: list[tuple[int, int]],
    lms: Sequence[Monomial],
    t: int,
) -> tuple[list[int], list[tuple[int, int]]]:
    """Gebauer-Moller pair update after appending basis element ``t``.

    Applies the product criterion (coprime leading monomials) and the chain
    criterion (lcm domination) to the new pairs, prunes old pairs whose lcm
    is strictly absorbed by the newcomer, and drops active elements whose
    leading monomial the newcomer divides.  Deterministic: candidates are
    processed in ascending index order.
    """
    lm_t = lms[t]
    cand = list(active)
    lcm_t = {i: mono_lcm(lms[i], lm_t) for i in cand}
    survivors: list[int] = []
    queue = list(cand)
    while queue:
        i = queue.pop(0)
        lcm_i = lcm_t[i]
        if mono_mul(lms[i], lm_t) == lcm_i:
            survivors.append(i)  # coprime: keep now, drop below (product criterion)
            continue
        dominated = any(
            mono_divides(lcm_t[j], lcm_i) for j in queue
        ) or any(mono_divides(lcm_t[j], lcm_i) for j in survivors)
        if not dominated:
            survivors.append(i)
    new_pairs = [
        (i, t) for i in survivors if mono_mul(lms[i], lm_t) != lcm_t[i]
    ]
    kept: list[tuple[int, int]] = []
    for i, j in pairs:
        lcm_ij = mono_lcm(lms[i], lms[j])
        if (
            not mono_divides(lm_t, lcm_ij)
            or mono_lcm(lms[i], lm_t) == lcm_ij
            or mono_lcm(lms[j], lm_t) == lcm_ij
        ):
            kept.append((i, j))
    kept.extend(new_pairs)
    new_active = [i for i in active if not mono_divides(lm_t, lms[i])]
    new_active.append(t)
    return new_active, kept


def _buchberger(
    gens: Sequence[Polynomial],
    table: VarTable,
    order: MonomialOrder,
    budget: GBBudget,
) -> tuple[tuple[Polynomial, ...], GBStats]:
    keyf = order.key_for(table)
    meter = _Meter(budget)
    negkeys: dict[Monomial, tuple] = {}

    basis: list[dict[Monomial, Fraction]] = []
    lms: list[Monomial] = []
    active: list[int] = []
    pairs: list[tuple[int, int]] = []

    def leading(d: dict[Monomial, Fraction]) -> Monomial:
        return max(d, key=keyf)

    def finish_unit() -> tuple[tuple[Polynomial, ...], GBStats]:
        return (table.one(),), meter.stats()

    def append(d: dict[Monomial, Fraction]) -> bool:
        """Store a new monic basis element; True if it is a unit."""
        nonlocal active, pairs
        lm = leading(d)
        if not any(lm):
            return True  # constant: the ideal is the whole ring
        basis.append(_make_monic(d, lm))
        lms.append(lm)
        meter.stored += len(d)
        t = len(basis) - 1
        active, pairs = _gm_update(active, pairs, lms, t)
        if len(active) > meter.max_basis:
            meter.max_basis = len(active)
        return False

    # Seed the basis: reduce each input against what is already there, so
    # massively redundant generator lists (e.g. minor families) collapse
    # before any S-pairs are formed.
    for g in gens:
        if g.is_zero:
            continue
        r = _normal_form(g.terms, basis, lms, active, keyf, negkeys, meter)
        if r:
            if append(r):
                return finish_unit()

    # Main loop, normal selection: smallest S-pair lcm first.
    while pairs:
        best_idx = 0
        best_key = None
        for idx, (i, j) in enumerate(pairs):
            k = (keyf(mono_lcm(lms[i], lms[j])), i, j)
            if best_key is None or k < best_key:
                best_key = k
                best_idx = idx
        i, j = pairs.pop(best_idx)
        meter.charge_pair()
        lcm_ij = mono_lcm(lms[i], lms[j])
        si = _mult_dict(basis[i], mono_div(lcm_ij, lms[i]), Fraction(1))
        sj = _mult_dict(basis[j], mono_div(lcm_ij, lms[j]), Fraction(1))
        spoly = dict(si)
        for m, c in sj.items():
            c0 = spoly.get(m)
            if c0 is None:
                spoly[m] = -c
            else:
                c = c0 - c
                if c:
                    spoly[m] = c
                else:
                    del spoly[m]
        r = _normal_form(spoly, basis, lms, active, keyf, negkeys, meter)
        if r:
            if append(r):
                return finish_unit()
        else:
            meter.zeros += 1

    # Minimalize: keep only elements whose leading monomial no other kept
    # element's leading monomial divides (ascending order => deterministic).
    order_idx = sorted(active, key=lambda i: keyf(lms[i]))
    kept: list[int] = []
    for i in order_idx:
        if not any(mono_divides(lms[j], lms[i]) for j in kept):
            kept.append(i)

    # Tail-reduce each survivor against the others to get the reduced basis.
    reduced: dict[int, dict[Monomial, Fraction]] = {i: basis[i] for i in kept}
    for i in kept:
        others = [j for j in kept if j != i]
        obasis = [reduced[j] for j in others]
        olms = [lms[j] for j in others]
        r = _normal_form(
            reduced[i], obasis, olms, list(range(len(others))), keyf, negkeys, meter
        )
        reduced[i] = _make_monic(r, lms[i])

    final = sorted(kept, key=lambda i: keyf(lms[i]), reverse=True)
    out = tuple(
        Polynomial(table, reduced[i], _trust=True) for i in final
    )
    return out, meter.stats()


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def groebner(
    ideal: Ideal,
    order: MonomialOrder = GREVLEX,
    budget: GBBudget | None = None,
) -> tuple[Polynomial, ...]:
    """The reduced Groebner basis of ``ideal`` for ``order`` (cached).

    Monic, pairwise auto-reduced, sorted leading-monomial-descending; the
    zero ideal yields an empty tuple and the unit ideal yields ``(1,)``.
    """
    cached = ideal._gb.get(order)
    if cached is not None:
        return cached
    gb, stats = _buchberger(
        ideal.gens, ideal.table, order, budget or DEFAULT_BUDGET
    )
    ideal._gb[order] = gb
    ideal._stats[order] = stats
    return gb


def is_groebner_basis(
    basis: Sequence[Polynomial], order: MonomialOrder = GREVLEX
) -> bool:
    """Certificate check: every S-polynomial reduces to zero over ``basis``."""
    if not basis:
        return True
    table = basis[0].table
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            gi, gj = basis[i], basis[j]
            lmi = gi.leading_monomial(order)
            lmj = gj.leading_monomial(order)
            lcm = mono_lcm(lmi, lmj)
            ti = Polynomial(
                table, {mono_div(lcm, lmi): 1 / gi.leading_coefficient(order)}
            )
            tj = Polynomial(
                table, {mono_div(lcm, lmj): 1 / gj.leading_coefficient(order)}
            )
            spoly = ti * gi - tj * gj
            _, r = reduce_with_quotients(spoly, list(basis), order)
            if not r.is_zero:
                return False
    return True


def member(
    p: Polynomial,
    ideal: Ideal,
    budget: GBBudget | None = None,
) -> bool:
    """Ideal membership: the normal form of ``p`` against the basis is zero."""
    if p.table != ideal.table:
        raise RingMismatchError("ring mismatch")
    if p.is_zero:
        return True
    gb = groebner(ideal, GREVLEX, budget)
    if not gb:
        return False
    keyf = GREVLEX.key_for(ideal.table)
    meter = _Meter(budget or DEFAULT_BUDGET)
    basis = [g.terms for g in gb]
    lms = [g.leading_monomial(GREVLEX) for g in gb]
    r = _normal_form(p.terms, basis, lms, list(range(len(gb))), keyf, {}, meter)
    return not r


def radical_member(
    p: Polynomial,
    ideal: Ideal,
    budget: GBBudget | None = None,
) -> bool:
    """Radical membership via the auxiliary-variable encoding.

    ``p`` lies in the radical of ``I`` iff ``I + (1 - w*p)`` is the unit
    ideal in the ring extended by ``w``; no saturation is computed.
    """
    if p.table != ideal.table:
        raise RingMismatchError("ring mismatch")
    if p.is_zero:
        return member(p, ideal, budget)
    big = ideal.table.extend(["w"])
    w = big.var("w")
    gens = [g.cast_to(big) for g in ideal.gens]
    gens.append(big.one() - w * p.cast_to(big))
    gb = groebner(Ideal(big, gens), GREVLEX, budget)
    return len(gb) == 1 and gb[0] == big.one()


def contains(
    big: Ideal, small: Ideal, budget: GBBudget | None = None
) -> bool:
    """True iff every generator of ``small`` is a member of ``big``."""
    return all(member(g, big, budget) for g in small.gens)


def equal(a: Ideal, b: Ideal, budget: GBBudget | None = None) -> bool:
    """Ideal equality: identical reduced Groebner bases in grevlex."""
    if a.table != b.table:
        raise RingMismatchError("ring mismatch")
    return groebner(a, GREVLEX, budget) == groebner(b, GREVLEX, budget)


def exact_divide(p: Polynomial, f: Polynomial) -> Polynomial:
    """Exact quotient ``p / f``; raises if ``f`` does not divide ``p``."""
    if f.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    quots, rem = reduce_with_quotients(p, [f], GREVLEX)
    if not rem.is_zero:
        raise ValueError("inexact polynomial division")
    return quots[0]


def quotient(
    ideal: Ideal, f: Polynomial, budget: GBBudget | None = None
) -> Ideal:
    """The colon ideal ``I : f`` = {g : g*f in I}."""
    if f.table != ideal.table:
        raise RingMismatchError("ring mismatch")
    if f.is_zero:
        raise ValueError("colon ideal by zero is undefined")
    meet = intersect(ideal, Ideal(ideal.table, [f]), budget)
    return Ideal(ideal.table, [exact_divide(g, f) for g in meet.gens])


def intersect(a: Ideal, b: Ideal, budget: GBBudget | None = None) -> Ideal:
    """Pairwise intersection via the auxiliary variable ``s``.

    Eliminates ``s`` from ``s*A + (1-s)*B`` in the extended ring.
    """
    if a.table != b.table:
        raise RingMismatchError("ring mismatch")
    table = a.table
    if "s" in table:
        raise RingMismatchError('auxiliary variable "s" already in the ring')
    big = table.extend(["s"])
    s = big.var("s")
    one_minus_s = big.one() - s
    gens = [s * g.cast_to(big) for g in a.gens]
    gens += [one_minus_s * g.cast_to(big) for g in b.gens]
    mixed = Ideal(big, gens)
    kept = eliminate(mixed, [n for n in table.names], budget)
    return Ideal(table, [g.cast_to(table) for g in kept.gens])


def eliminate(
    ideal: Ideal, keep: Iterable[str], budget: GBBudget | None = None
) -> Ideal:
    """The elimination ideal: all elements supported on the kept variables.

    Computes a Groebner basis for the block order that sorts the dropped
    variables first and selects the basis elements free of them.  The result
    lives in the same ring.
    """
    table = ideal.table
    keep_set = set(keep)
    unknown = keep_set - set(table.names)
    if unknown:
        raise RingMismatchError(
            f"cannot keep variables absent from the ring: {sorted(unknown)}"
        )
    elim = tuple(n for n in table.names if n not in keep_set)
    if not elim:
        return Ideal(table, groebner(ideal, GREVLEX, budget))
    order = block_order(elim)
    gb = groebner(ideal, order, budget)
    elim_idx = [table.index(n) for n in elim]
    kept = [
        g for g in gb
        if all(all(m[i] == 0 for i in elim_idx) for m in g.terms)
    ]
    return Ideal(table, kept)


def saturate(
    ideal: Ideal, f: Polynomial, budget: GBBudget | None = None
) -> Ideal:
    """The saturation ``I : f^infinity`` via the auxiliary variable ``w``.

    Adjoins ``w``, adds the relation ``1 - w*f``, and eliminates ``w``; the
    result is every element some power of ``f`` multiplies into ``I``.
    """
    if f.table != ideal.table:
        raise RingMismatchError("ring mismatch")
    if f.is_zero:
        raise ValueError("saturation by zero is undefined")
    table = ideal.table
    if "w" in table:
        raise RingMismatchError('auxiliary variable "w" already in the ring')
    big = table.extend(["w"])
    w = big.var("w")
    gens = [g.cast_to(big) for g in ideal.gens]
    gens.append(big.one() - w * f.cast_to(big))
    mixed = Ideal(big, gens)
    kept = eliminate(mixed, [n for n in table.names], budget)
    return Ideal(table, [g.cast_to(table) for g in kept.gens])


def saturate_iterated(
    ideal: Ideal,
    f: Polynomial,
    budget: GBBudget | None = None,
    max_rounds: int = 64,
) -> Ideal:
    """The saturation computed as a stabilized chain of colon ideals.

    Iterates ``I, I:f, (I:f):f, ...`` until two consecutive ideals agree.
    This is the independent second route for the saturation; callers that
    certify a claim compare it against ``saturate``.
    """
    current = ideal
    for _ in range(max_rounds):
        nxt = quotient(current, f, budget)
        if equal(nxt, current, budget):
            return current
        current = nxt
    raise RuntimeError("iterated quotient did not stabilize (not reachable)")


def dimension(ideal: Ideal, budget: GBBudget | None = None) -> int:
    """Krull dimension of ring/I via the leading-term ideal.

    The dimension equals the size of the largest variable subset containing
    no leading monomial's support (maximal independent set), computed by a
    memoized branch-and-bound over support bitmasks.  The unit ideal raises
    ``EmptyVarietyError``.
    """
    gb = groebner(ideal, GREVLEX, budget)
    table = ideal.table
    n = len(table)
    if len(gb) == 1 and gb[0] == table.one():
        raise EmptyVarietyError("empty variety")
    masks: set[int] = set()
    for g in gb:
        lm = g.leading_monomial(GREVLEX)
        mask = 0
        for i, e in enumerate(lm):
            if e:
                mask |= 1 << i
        masks.add(mask)
    # Keep only inclusion-minimal supports; the rest impose no new constraint.
    minimal = [
        m for m in sorted(masks)
        if not any(o != m and (o & m) == o for o in masks)
    ]
    full = (1 << n) - 1
    best = 0
    seen: set[int] = set()

    def search(avail: int) -> None:
        nonlocal best
        if avail in seen:
            return
        seen.add(avail)
        count = avail.bit_count()
        if count <= best:
            return
        for m in minimal:
            if (m & ~avail) == 0:
                mm = m
                while mm:
                    bit = mm & -mm
                    search(avail & ~bit)
                    mm ^= bit
                return
        best = count

    search(full)
    return best


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def serialize_ideal(ideal: Ideal, order: MonomialOrder = GREVLEX) -> str:
    """Canonical text: a ring header line, then one generator per line."""
    lines = ["ring " + " ".join(ideal.table.names)]
    lines.extend(g.to_text(order) for g in ideal.gens)
    return "\n".join(lines) + "\n"


def parse_ideal(text: str) -> Ideal:
    """Parse the canonical ideal text form (inverse of ``serialize_ideal``)."""
    from .poly import parse_polynomial

    rows = [ln.strip() for ln in text.splitlines()]
    rows = [ln for ln in rows if ln and not ln.startswith("#")]
    if not rows or not rows[0].startswith("ring "):
        raise ValueError('ideal text must start with a "ring" header line')
    names = rows[0].split()[1:]
    table = VarTable(names)
    gens = [parse_polynomial(table, ln) for ln in rows[1:]]
    return Ideal(table, gens)
